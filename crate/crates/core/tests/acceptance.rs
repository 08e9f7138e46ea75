//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails. Tolerances come from `qwalk::tolerances`.

mod common;

use std::f64::consts::TAU;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use common::{hadamard_oracle, Amp};
use qwalk::experiment::{anderson_rows, near_resonance_rows, run, Experiment, OmegaFlag, RunSpec};
use qwalk::floquet::{exact_period, kinetic_statistics, QuasiEnergy};
use qwalk::observables::{
    distribution, growth_exponent_fit, localization_length_fit, quadratic_coefficient_fit, resonance_peaks, FitWindow,
};
use qwalk::tolerances as tol;
use qwalk::{run_coherent, run_markov, Evolver, InitialCondition, Observable, Omega, SpinorField, WalkParams};

const STEPS: u32 = 2000;

struct Verdict {
    pass: bool,
    detail: String,
}

type Check = fn() -> qwalk::Result<Verdict>;

fn verdict(pass: bool, detail: String) -> qwalk::Result<Verdict> {
    Ok(Verdict { pass, detail })
}

fn coherent_variance(omega: Omega, steps: u32) -> qwalk::Result<qwalk::ObservableSeries> {
    let params = WalkParams::with_default_width(omega, steps)?;
    Ok(run_coherent(params, &InitialCondition::symmetric(), &[Observable::Variance], 1)?.0)
}

fn variance_at(series: &qwalk::ObservableSeries, t: u64) -> f64 {
    let i = series.times().iter().position(|&s| s == t).expect("time recorded");
    series.column(Observable::Variance).unwrap()[i]
}

fn unitarity() -> qwalk::Result<Verdict> {
    let cases = [
        ("Ω=0", Omega::rational(0, 1)?),
        ("Ω=1/9", Omega::rational(1, 9)?),
        ("Ω=1/11", Omega::rational(1, 11)?),
        ("2πΩ=0.1", Omega::from_two_pi(0.1)?),
        ("2πΩ=0.7", Omega::from_two_pi(0.7)?),
    ];
    let mut worst = 0.0f64;
    let mut parts = Vec::new();
    for (name, omega) in cases {
        let params = WalkParams::with_default_width(omega, STEPS)?;
        let mut state = SpinorField::new(&params, &InitialCondition::symmetric())?;
        let ev = Evolver::new(params)?;
        let mut case_worst = 0.0f64;
        for _ in 0..STEPS {
            ev.step(&mut state)?;
            case_worst = case_worst.max((distribution(&state).total() - 1.0).abs());
        }
        worst = worst.max(case_worst);
        parts.push(format!("{name}: {case_worst:.1e}"));
    }
    verdict(
        worst < tol::UNITARITY,
        format!(
            "max |ΣF−1| = {worst:.2e} < {:.0e} ({})",
            tol::UNITARITY,
            parts.join(", ")
        ),
    )
}

fn integer_omega() -> qwalk::Result<Verdict> {
    let steps = 500;
    let init = InitialCondition::symmetric();
    let mut states = Vec::new();
    let mut evolvers = Vec::new();
    for p in 0..3 {
        let params = WalkParams::with_default_width(Omega::rational(p, 1)?, steps)?;
        states.push(SpinorField::new(&params, &init)?);
        evolvers.push(Evolver::new(params)?);
    }
    let mut start = Amp::new();
    start.insert((0, 'L'), init.c_left());
    start.insert((0, 'R'), init.c_right());
    let oracle = hadamard_oracle(start, steps as usize);

    let mut spread = 0.0f64;
    let mut oracle_mismatch = 0usize;
    for t in 1..=steps as usize {
        for (s, e) in states.iter_mut().zip(&evolvers) {
            e.step(s)?;
        }
        for k in states[0].k_min()..=states[0].k_max() {
            let (a0, b0) = states[0].amplitudes_at(k).unwrap();
            for s in &states[1..] {
                let (a, b) = s.amplitudes_at(k).unwrap();
                spread = spread.max((a - a0).norm()).max((b - b0).norm());
            }
            let ra = oracle[t].get(&(k, 'L')).copied().unwrap_or_default();
            let rb = oracle[t].get(&(k, 'R')).copied().unwrap_or_default();
            if a0 != ra || b0 != rb {
                oracle_mismatch += 1;
            }
        }
    }
    verdict(
        spread < tol::INTEGER_OMEGA && oracle_mismatch == 0,
        format!(
            "Ω=0,1,2 max amplitude difference {spread:.2e} < {:.0e}; Ω=0 vs Hadamard oracle: {oracle_mismatch} mismatches",
            tol::INTEGER_OMEGA
        ),
    )
}

fn markov_baseline() -> qwalk::Result<Verdict> {
    let params = WalkParams::with_default_width(Omega::decimal(0.0)?, STEPS)?;
    let (series, _) = run_markov(params, 0, &[Observable::Variance], 1)?;
    let err = series
        .times()
        .iter()
        .zip(series.column(Observable::Variance).unwrap())
        .map(|(&t, &v)| (v - t as f64).abs())
        .fold(0.0f64, f64::max);
    verdict(
        err < tol::MARKOV_VARIANCE,
        format!("max |σ²−t| = {err:.2e} < {:.0e}", tol::MARKOV_VARIANCE),
    )
}

fn saturation_and_growth() -> qwalk::Result<Verdict> {
    let mut pass = true;
    let mut parts = Vec::new();
    for x in [0.1, 0.2, 0.3] {
        let series = coherent_variance(Omega::from_two_pi(x)?, STEPS)?;
        let ratio = variance_at(&series, 2000) / variance_at(&series, 1000);
        pass &= ratio < tol::SATURATION_RATIO;
        parts.push(format!("2πΩ={x}: σ²(2000)/σ²(1000)={ratio:.4}"));
    }
    let series = coherent_variance(Omega::rational(1, 9)?, STEPS)?;
    let gamma = growth_exponent_fit(&series, 500, 2000)?.slope;
    let (lo, hi) = tol::RESONANT_GAMMA;
    pass &= (lo..=hi).contains(&gamma);
    parts.push(format!("Ω=1/9: γ={gamma:.5}"));
    verdict(
        pass,
        format!(
            "ratio < {}, γ ∈ [{lo}, {hi}]; {}",
            tol::SATURATION_RATIO,
            parts.join(", ")
        ),
    )
}

fn localized_profile() -> qwalk::Result<Verdict> {
    let params = WalkParams::with_default_width(Omega::from_two_pi(0.1)?, STEPS)?;
    let (_, state) = run_coherent(params, &InitialCondition::symmetric(), &[], STEPS)?;
    let fit = localization_length_fit(&distribution(&state), &FitWindow::default())?;
    let ell = fit.length();
    let rel = (ell / tol::LOCALIZATION_LENGTH_TWO_PI_0_1 - 1.0).abs();
    verdict(
        fit.localized
            && ell.is_finite()
            && fit.fit.r_squared >= tol::LOCALIZATION_R2
            && rel <= tol::LOCALIZATION_LENGTH_REL,
        format!(
            "ℓ={ell:.6} (frozen {} ±{:.0}%), r²={:.4} ≥ {}",
            tol::LOCALIZATION_LENGTH_TWO_PI_0_1,
            100.0 * tol::LOCALIZATION_LENGTH_REL,
            fit.fit.r_squared,
            tol::LOCALIZATION_R2
        ),
    )
}

fn strictly_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] > w[0])
}

fn near_resonance() -> qwalk::Result<Verdict> {
    let spec = RunSpec::new(Experiment::NearResonanceScan)
        .with_omega(OmegaFlag::Exact, "1/11")
        .with_deltas(&[1e-4, 1e-5, 1e-6, 1e-9]);
    let rows = near_resonance_rows(&spec)?;
    let lengths: Vec<f64> = rows.iter().map(|r| r.localization_length).collect();
    let participation: Vec<f64> = rows.iter().map(|r| r.participation).collect();
    let by_length = strictly_increasing(&lengths);
    let by_participation = strictly_increasing(&participation);
    let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.3}")).collect::<Vec<_>>().join(", ");
    let r2: Vec<String> = rows.iter().map(|r| format!("{:.3}", r.r_squared)).collect();
    verdict(
        by_length || by_participation,
        format!(
            "δ=1e-4..1e-9 ℓ: {} [{}]; PN: {} [{}]; fit r²: {}",
            fmt(&lengths),
            if by_length { "monotone" } else { "not monotone" },
            fmt(&participation),
            if by_participation { "monotone" } else { "not monotone" },
            r2.join(" ")
        ),
    )
}

fn secondary_resonances() -> qwalk::Result<Verdict> {
    let (lo, hi) = tol::RESONANT_GAMMA;
    let main = coherent_variance(Omega::rational(1, 1)?, STEPS)?;
    let c_main = quadratic_coefficient_fit(&main, 500, 2000)?.slope;
    let mut pass = true;
    let mut parts = Vec::new();
    for (p, q) in [(1, 3), (1, 5), (3, 5), (1, 7), (1, 9)] {
        let series = coherent_variance(Omega::rational(p, q)?, STEPS)?;
        let gamma = growth_exponent_fit(&series, 500, 2000)?.slope;
        let c = quadratic_coefficient_fit(&series, 500, 2000)?.slope;
        pass &= (lo..=hi).contains(&gamma) && c < c_main;
        parts.push(format!("{p}/{q}: γ={gamma:.4} c={c:.4}"));
    }
    verdict(
        pass,
        format!("γ ∈ [{lo}, {hi}], c < c(Ω=1)={c_main:.5}; {}", parts.join(", ")),
    )
}

fn resonance_and_detuning() -> qwalk::Result<Verdict> {
    let params = WalkParams::with_default_width(Omega::rational(1, 11)?, STEPS)?;
    let (_, state) = run_coherent(params, &InitialCondition::symmetric(), &[], STEPS)?;
    let report = resonance_peaks(&distribution(&state), 11)?;
    let sites: Vec<String> = report.peaks[..report.examined]
        .iter()
        .map(|p| p.k.to_string())
        .collect();

    let detuned = Omega::rational(1, 11)?.with_delta(1e-4)?;
    let params = WalkParams::with_default_width(detuned, STEPS)?;
    let (_, state) = run_coherent(params, &InitialCondition::symmetric(), &[], STEPS)?;
    let fit = localization_length_fit(&distribution(&state), &FitWindow::default())?;
    let localized = fit.localized && fit.length().is_finite() && fit.fit.r_squared >= tol::LOCALIZATION_R2;
    verdict(
        report.aligned && localized,
        format!(
            "Ω=1/11 peaks at {} aligned={}; Ω=1/11+1e-4 ℓ={:.4} r²={:.4}",
            sites.join(" "),
            report.aligned,
            fit.length(),
            fit.fit.r_squared
        ),
    )
}

fn parity() -> qwalk::Result<Verdict> {
    let mut violations = 0usize;
    for omega in [
        Omega::rational(1, 9)?,
        Omega::from_two_pi(0.1)?,
        Omega::rational(1, 11)?.with_delta(1e-6)?,
    ] {
        let params = WalkParams::with_default_width(omega, STEPS)?;
        let mut state = SpinorField::new(&params, &InitialCondition::symmetric())?;
        let ev = Evolver::new(params)?;
        for t in 1..=STEPS as i64 {
            ev.step(&mut state)?;
            violations += distribution(&state)
                .iter()
                .filter(|&(k, p)| (k - t).rem_euclid(2) == 1 && p != 0.0)
                .count();
        }
    }
    verdict(
        violations == 0,
        format!("{violations} wrong-parity sites with nonzero probability over 3×{STEPS} steps"),
    )
}

fn anderson_chain() -> qwalk::Result<Verdict> {
    let spec = RunSpec::new(Experiment::AndersonCheck {
        w_count: 64,
        range: 200,
        seed: [1.0, 0.0, 0.0, 0.0],
    })
    .with_omega(OmegaFlag::TwoPi, "0.1");
    let rows = anderson_rows(&spec, 64, 200, [1.0, 0.0, 0.0, 0.0])?;
    let failed = rows.iter().filter(|r| r.failure.is_some()).count();
    let max = |f: fn(&qwalk::experiment::ChainRow) -> f64| rows.iter().map(f).fold(0.0f64, f64::max);
    let (r9, r11, ra) = (
        max(|r| r.recursion_residual),
        max(|r| r.second_order_residual),
        max(|r| r.anderson_residual),
    );
    let exceeded = rows.iter().filter(|r| !r.exceedances().is_empty()).count();
    verdict(
        failed == 0 && r9 < tol::FLOQUET_RECURSION && exceeded == 0,
        format!(
            "64 quasienergies: recursion {r9:.2e} < {:.0e}, second-order {r11:.2e} < {:.0e}, tight-binding {ra:.2e} < {:.0e}; {failed} failed rows",
            tol::FLOQUET_RECURSION,
            tol::SECOND_ORDER_CHAIN,
            tol::ANDERSON_CHAIN
        ),
    )
}

fn kinetic_energy_statistics() -> qwalk::Result<Verdict> {
    let stats = kinetic_statistics(Omega::from_two_pi(0.1)?, QuasiEnergy::new(0.0)?, 1000)?;
    let narrow = stats.iqr < tol_iqr(stats.range);
    let random = stats.lag1_autocorrelation.abs() < qwalk::floquet::PSEUDO_RANDOM_AUTOCORRELATION;
    let mut periods = Vec::new();
    let mut periodic = true;
    for j in 0..8 {
        let w = TAU * j as f64 / 8.0;
        let s = kinetic_statistics(Omega::rational(1, 2)?, QuasiEnergy::new(w)?, 1000)?;
        match exact_period(&s.values, 4) {
            Some(p) if 4 % p == 0 => periods.push(p),
            _ => periodic = false,
        }
    }
    verdict(
        narrow && random && periodic,
        format!(
            "2πΩ=0.1: IQR={:.4} vs range/4={:.4} [{}], |lag-1 autocorrelation|={:.4} vs {} [{}]; Ω=1/2 periods {:?} [{}]",
            stats.iqr,
            tol_iqr(stats.range),
            if narrow { "ok" } else { "too wide" },
            stats.lag1_autocorrelation.abs(),
            qwalk::floquet::PSEUDO_RANDOM_AUTOCORRELATION,
            if random { "ok" } else { "too correlated" },
            periods,
            if periodic { "ok" } else { "not periodic" }
        ),
    )
}

fn tol_iqr(range: f64) -> f64 {
    qwalk::floquet::NARROW_IQR_FRACTION * range
}

/// Every run above, as CLI arguments.
fn acceptance_runs() -> Vec<(&'static str, Vec<&'static str>)> {
    vec![
        ("evolve_0.1", vec!["evolve", "--two-pi-omega", "0.1"]),
        ("evolve_0.2", vec!["evolve", "--two-pi-omega", "0.2"]),
        ("evolve_0.3", vec!["evolve", "--two-pi-omega", "0.3"]),
        ("evolve_0.7", vec!["evolve", "--two-pi-omega", "0.7"]),
        ("evolve_1_9", vec!["evolve", "--omega", "1/9", "--markov-baseline"]),
        ("evolve_markov", vec!["evolve", "--omega", "0/1", "--markov"]),
        ("distribution_0.1", vec!["distribution", "--two-pi-omega", "0.1"]),
        (
            "distribution_1_11",
            vec!["distribution", "--omega", "1/11", "--q", "11"],
        ),
        (
            "distribution_1_11_d",
            vec!["distribution", "--omega", "1/11", "--delta", "1e-4"],
        ),
        (
            "near_resonance",
            vec![
                "near-resonance-scan",
                "--omega",
                "1/11",
                "--delta",
                "1e-4,1e-5,1e-6,1e-9",
            ],
        ),
        (
            "variance_scan",
            vec!["variance-scan", "--omegas", "1/3,1/5,3/5,1/7,1/9,1/1,2pi:0.1,markov"],
        ),
        (
            "anderson",
            vec!["anderson-check", "--two-pi-omega", "0.1", "--w-count", "64"],
        ),
        (
            "kinetic_0.1",
            vec!["kinetic-stats", "--two-pi-omega", "0.1", "--w", "0"],
        ),
        ("kinetic_1_2", vec!["kinetic-stats", "--omega", "1/2", "--w", "0"]),
    ]
}

fn run_cli(args: &[&str], out: &Path) -> qwalk::Result<Vec<(String, Vec<u8>)>> {
    let status = Command::new(env!("CARGO_BIN_EXE_qwalk"))
        .args(args)
        .arg("--out")
        .arg(out)
        .status()
        .map_err(|e| qwalk::WalkError::Config(format!("cannot launch qwalk: {e}")))?;
    if !status.success() {
        return Err(qwalk::WalkError::Config(format!(
            "qwalk {} exited with {status}",
            args.join(" ")
        )));
    }
    let dir = out.parent().unwrap();
    let stem = out.file_name().unwrap().to_string_lossy().into_owned();
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.file_name().to_string_lossy().starts_with(&stem))
        .map(|e| {
            let name = e.file_name().to_string_lossy().into_owned();
            (name[stem.len()..].to_string(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    Ok(files)
}

fn determinism() -> qwalk::Result<Verdict> {
    let dir = tempfile::tempdir().map_err(|e| qwalk::WalkError::Config(e.to_string()))?;
    let mut differing = Vec::new();
    let mut files = 0usize;
    for (name, args) in acceptance_runs() {
        let first = run_cli(&args, &dir.path().join(format!("{name}.a.csv")))?;
        let second = run_cli(&args, &dir.path().join(format!("{name}.b.csv")))?;
        files += first.len();
        if first != second {
            differing.push(name);
        }
    }
    // the library entry point must agree with the binary byte for byte
    let spec = RunSpec::new(Experiment::Distribution { q: Some(11) }).with_omega(OmegaFlag::Exact, "1/11");
    let lib = run(&spec)?;
    let cli = run_cli(&acceptance_runs()[7].1, &dir.path().join("distribution_1_11.c.csv"))?;
    let lib_matches = cli.iter().find(|(s, _)| s.is_empty()).map(|(_, b)| b.as_slice()) == Some(lib.csv.as_bytes());
    verdict(
        differing.is_empty() && lib_matches,
        format!(
            "{} runs, {files} files byte-identical across two executions; differing: {:?}; library output matches CLI: {lib_matches}",
            acceptance_runs().len(),
            differing
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, Check); 12] = [
        ("unitarity", unitarity),
        ("integer-omega reduction", integer_omega),
        ("markov baseline", markov_baseline),
        ("saturation vs rational growth", saturation_and_growth),
        ("exponential localization", localized_profile),
        ("near-resonance broadening", near_resonance),
        ("secondary resonances", secondary_resonances),
        ("resonance peaks and detuning", resonance_and_detuning),
        ("parity", parity),
        ("floquet to tight-binding chain", anderson_chain),
        ("kinetic-energy statistics", kinetic_energy_statistics),
        ("determinism", determinism),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (pass, detail) = match check() {
            Ok(v) => (v.pass, v.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        failures += usize::from(!pass);
        println!(
            "{} {:>2} {name}: {detail} ({:.1}s)",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
