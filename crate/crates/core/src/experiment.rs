//! Reproducible experiment runs rendered as CSV text.
//!
//! Every output starts with a `# qwalk {...}` line carrying the full run
//! description as JSON, followed by a header row. Floating-point values are
//! written with 17 significant digits, so identical specs give byte-identical
//! files.

use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Result, WalkError};
use crate::evolution::{run_coherent, run_markov, StepMode};
use crate::floquet::{
    anderson_residual, coefficients, floquet_recursion, kinetic_statistics, second_order_residual, transform,
    Chirality, QuasiEnergy,
};
use crate::observables::{
    growth_exponent_fit, localization_length_fit, participation_number, quadratic_coefficient_fit, resonance_peaks,
    variance, FitWindow, Observable,
};
use crate::phase::Omega;
use crate::state::{InitialCondition, WalkParams};
use crate::tolerances;

/// How Ω was spelled on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OmegaFlag {
    /// `--omega p/q`
    Exact,
    /// `--omega-dec x`
    Decimal,
    /// `--two-pi-omega x`
    TwoPi,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OmegaChoice {
    pub flag: OmegaFlag,
    /// The value exactly as given.
    pub text: String,
}

impl OmegaChoice {
    pub fn new(flag: OmegaFlag, text: impl Into<String>) -> Self {
        OmegaChoice {
            flag,
            text: text.into(),
        }
    }

    pub fn omega(&self) -> Result<Omega> {
        let t = self.text.trim();
        match self.flag {
            OmegaFlag::Exact => {
                if !t.contains('/') {
                    return Err(WalkError::Config(format!("--omega expects p/q, got '{t}'")));
                }
                t.parse()
            }
            OmegaFlag::Decimal => Omega::decimal(parse_f64(t, "--omega-dec")?),
            OmegaFlag::TwoPi => Omega::from_two_pi(parse_f64(t, "--two-pi-omega")?),
        }
    }
}

fn parse_f64(s: &str, what: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| WalkError::Config(format!("{what}: cannot parse '{s}' as a number")))
}

/// An entry of a variance-scan list: `markov`, `p/q`, a decimal, or `2pi:x`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanOmega(pub String);

enum ScanTarget {
    Markov,
    Coherent(Omega),
}

impl ScanOmega {
    fn target(&self) -> Result<ScanTarget> {
        let s = self.0.trim();
        if s == "markov" {
            Ok(ScanTarget::Markov)
        } else if let Some(x) = s.strip_prefix("2pi:") {
            Ok(ScanTarget::Coherent(Omega::from_two_pi(parse_f64(x, "2pi:")?)?))
        } else {
            Ok(ScanTarget::Coherent(s.parse()?))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Experiment {
    Evolve {
        markov: bool,
        markov_baseline: bool,
    },
    Distribution {
        q: Option<u64>,
    },
    VarianceScan {
        omegas: Vec<ScanOmega>,
        t_min: u64,
        t_max: Option<u64>,
    },
    NearResonanceScan,
    AndersonCheck {
        w_count: usize,
        range: i64,
        seed: [f64; 4],
    },
    KineticStats {
        w: f64,
        sites: usize,
    },
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Evolve { .. } => "evolve",
            Experiment::Distribution { .. } => "distribution",
            Experiment::VarianceScan { .. } => "variance-scan",
            Experiment::NearResonanceScan => "near-resonance-scan",
            Experiment::AndersonCheck { .. } => "anderson-check",
            Experiment::KineticStats { .. } => "kinetic-stats",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSpec {
    pub experiment: Experiment,
    pub omega: Option<OmegaChoice>,
    pub deltas: Vec<f64>,
    pub steps: u32,
    /// Defaults to steps + 64.
    pub half_width: Option<u32>,
    pub init: InitialCondition,
    pub stride: u32,
}

impl RunSpec {
    /// Defaults: 2000 steps, symmetric start at the origin, every step recorded.
    pub fn new(experiment: Experiment) -> Self {
        RunSpec {
            experiment,
            omega: None,
            deltas: Vec::new(),
            steps: 2000,
            half_width: None,
            init: InitialCondition::symmetric(),
            stride: 1,
        }
    }

    pub fn with_omega(mut self, flag: OmegaFlag, text: &str) -> Self {
        self.omega = Some(OmegaChoice::new(flag, text));
        self
    }

    pub fn with_deltas(mut self, deltas: &[f64]) -> Self {
        self.deltas = deltas.to_vec();
        self
    }

    pub fn with_steps(mut self, steps: u32) -> Self {
        self.steps = steps;
        self
    }

    pub fn half_width(&self) -> u32 {
        self.half_width.unwrap_or(self.steps + 64)
    }

    fn params(&self, omega: Omega) -> Result<WalkParams> {
        WalkParams::new(omega, self.half_width(), self.steps)
    }

    fn base_omega(&self) -> Result<Omega> {
        self.omega
            .as_ref()
            .ok_or_else(|| WalkError::Config("an omega is required (--omega, --omega-dec or --two-pi-omega)".into()))?
            .omega()
    }

    /// Ω for single-run experiments: the base plus at most one δ.
    fn single_omega(&self) -> Result<Omega> {
        let base = self.base_omega()?;
        match self.deltas.as_slice() {
            [] => Ok(base),
            [d] => base.with_delta(*d),
            _ => Err(WalkError::Config("this experiment takes at most one delta".into())),
        }
    }

    fn header(&self) -> String {
        let json = serde_json::to_string(self).expect("run spec serializes");
        format!("# qwalk {} {}\n", self.experiment.name(), json)
    }
}

/// Main CSV plus optional side files, keyed by the suffix appended to the output path.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub csv: String,
    pub sidecars: Vec<(String, String)>,
}

/// 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn flag(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

pub fn run(spec: &RunSpec) -> Result<RunOutput> {
    if spec.steps == 0 {
        return Err(WalkError::Validation("steps must be at least 1".into()));
    }
    match &spec.experiment {
        Experiment::Evolve {
            markov,
            markov_baseline,
        } => run_evolve(spec, *markov, *markov_baseline),
        Experiment::Distribution { q } => run_distribution(spec, *q),
        Experiment::VarianceScan { omegas, t_min, t_max } => {
            run_variance_scan(spec, omegas, *t_min, t_max.unwrap_or(spec.steps as u64))
        }
        Experiment::NearResonanceScan => run_near_resonance_scan(spec),
        Experiment::AndersonCheck { w_count, range, seed } => run_anderson_check(spec, *w_count, *range, *seed),
        Experiment::KineticStats { w, sites } => run_kinetic_stats(spec, *w, *sites),
    }
}

pub fn run_evolve(spec: &RunSpec, markov: bool, markov_baseline: bool) -> Result<RunOutput> {
    let record = Observable::ALL;
    let mode = if markov { StepMode::Markov } else { StepMode::Coherent };
    let series = match mode {
        StepMode::Markov => {
            // Ω plays no role in the Markov chain; accept a missing one.
            let omega = spec.single_omega().or_else(|_| Omega::decimal(0.0))?;
            run_markov(spec.params(omega)?, spec.init.site, &record, spec.stride)?.0
        }
        StepMode::Coherent => run_coherent(spec.params(spec.single_omega()?)?, &spec.init, &record, spec.stride)?.0,
    };
    let mut out = spec.header();
    out.push_str("t,variance,mean,participation,boundary_leak");
    if markov_baseline {
        out.push_str(",variance_markov");
    }
    out.push('\n');
    let col = |o| series.column(o).expect("all observables recorded");
    let (v, m, p, b) = (
        col(Observable::Variance),
        col(Observable::Mean),
        col(Observable::Participation),
        col(Observable::BoundaryLeak),
    );
    for (i, &t) in series.times().iter().enumerate() {
        let _ = write!(
            out,
            "{t},{},{},{},{}",
            fmt_f64(v[i]),
            fmt_f64(m[i]),
            fmt_f64(p[i]),
            fmt_f64(b[i])
        );
        if markov_baseline {
            let _ = write!(out, ",{}", fmt_f64(t as f64));
        }
        out.push('\n');
    }
    Ok(RunOutput {
        csv: out,
        sidecars: Vec::new(),
    })
}

pub fn run_distribution(spec: &RunSpec, q: Option<u64>) -> Result<RunOutput> {
    let params = spec.params(spec.single_omega()?)?;
    let (_, state) = run_coherent(params, &spec.init, &[Observable::Variance], spec.steps)?;
    let field = crate::observables::distribution(&state);
    let t = field.time() as i64;
    let k0 = spec.init.site;

    let mut out = spec.header();
    out.push_str("k,F_k\n");
    for (k, p) in field.iter() {
        if (k - k0 + t).rem_euclid(2) == 0 {
            let _ = writeln!(out, "{k},{}", fmt_f64(p));
        }
    }

    let mut side = String::new();
    let _ = writeln!(side, "t={t}");
    let _ = writeln!(side, "variance={}", fmt_f64(variance(&field)?));
    let _ = writeln!(side, "participation={}", fmt_f64(participation_number(&field)));
    match localization_length_fit(&field, &FitWindow::default()) {
        Ok(fit) => {
            let _ = writeln!(side, "fit_slope={}", fmt_f64(fit.fit.slope));
            let _ = writeln!(side, "fit_intercept={}", fmt_f64(fit.fit.intercept));
            let _ = writeln!(side, "fit_r_squared={}", fmt_f64(fit.fit.r_squared));
            let _ = writeln!(side, "fit_n_points={}", fit.fit.n_points);
            let _ = writeln!(side, "fit_center={}", fmt_f64(fit.center));
            let _ = writeln!(side, "localization_length={}", fmt_f64(fit.length()));
            let _ = writeln!(side, "localized={}", flag(fit.localized));
        }
        Err(e) => {
            let _ = writeln!(side, "fit_error={e}");
        }
    }
    if let Some(q) = q {
        let report = resonance_peaks(&field, q)?;
        let _ = writeln!(side, "peak_q={q}");
        let _ = writeln!(side, "peak_width={}", fmt_f64(report.width));
        let _ = writeln!(side, "peak_examined={}", report.examined);
        let _ = writeln!(side, "peak_aligned={}", flag(report.aligned));
        let ks: Vec<String> = report.peaks[..report.examined]
            .iter()
            .map(|p| p.k.to_string())
            .collect();
        let _ = writeln!(side, "peak_sites={}", ks.join(" "));
    }
    Ok(RunOutput {
        csv: out,
        sidecars: vec![(".fit.txt".into(), side)],
    })
}

struct ScanRow {
    gamma: f64,
    r_squared: f64,
    quadratic: f64,
}

pub fn run_variance_scan(spec: &RunSpec, omegas: &[ScanOmega], t_min: u64, t_max: u64) -> Result<RunOutput> {
    if omegas.is_empty() {
        return Err(WalkError::Validation("variance scan needs at least one omega".into()));
    }
    let rows: Vec<ScanRow> = omegas
        .par_iter()
        .map(|o| -> Result<ScanRow> {
            let series = match o.target()? {
                ScanTarget::Markov => {
                    let params = spec.params(Omega::decimal(0.0)?)?;
                    run_markov(params, spec.init.site, &[Observable::Variance], spec.stride)?.0
                }
                ScanTarget::Coherent(omega) => {
                    let params = spec.params(omega)?;
                    run_coherent(params, &spec.init, &[Observable::Variance], spec.stride)?.0
                }
            };
            let g = growth_exponent_fit(&series, t_min, t_max)?;
            let c = quadratic_coefficient_fit(&series, t_min, t_max)?;
            Ok(ScanRow {
                gamma: g.slope,
                r_squared: g.r_squared,
                quadratic: c.slope,
            })
        })
        .collect::<Result<_>>()?;
    let mut out = spec.header();
    out.push_str("omega,gamma,r_squared,quadratic_coefficient\n");
    for (o, r) in omegas.iter().zip(rows) {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            o.0,
            fmt_f64(r.gamma),
            fmt_f64(r.r_squared),
            fmt_f64(r.quadratic)
        );
    }
    Ok(RunOutput {
        csv: out,
        sidecars: Vec::new(),
    })
}

/// One row of a near-resonance scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResonanceRow {
    pub delta: f64,
    pub localization_length: f64,
    pub r_squared: f64,
    pub participation: f64,
    pub variance: f64,
}

pub fn near_resonance_rows(spec: &RunSpec) -> Result<Vec<ResonanceRow>> {
    let base = spec.base_omega()?;
    if !matches!(base, Omega::Rational { .. }) {
        return Err(WalkError::Config(
            "near-resonance scan needs an exact rational base (--omega p/q)".into(),
        ));
    }
    if spec.deltas.is_empty() {
        return Err(WalkError::Validation(
            "near-resonance scan needs at least one delta".into(),
        ));
    }
    spec.deltas
        .par_iter()
        .map(|&delta| {
            let params = spec.params(base.with_delta(delta)?)?;
            let (_, state) = run_coherent(params, &spec.init, &[Observable::Variance], spec.steps)?;
            let field = crate::observables::distribution(&state);
            let (len, r2) = match localization_length_fit(&field, &FitWindow::default()) {
                Ok(fit) => (fit.length(), fit.fit.r_squared),
                Err(_) => (f64::NAN, f64::NAN),
            };
            Ok(ResonanceRow {
                delta,
                localization_length: len,
                r_squared: r2,
                participation: participation_number(&field),
                variance: variance(&field)?,
            })
        })
        .collect()
}

pub fn run_near_resonance_scan(spec: &RunSpec) -> Result<RunOutput> {
    let rows = near_resonance_rows(spec)?;
    let mut out = spec.header();
    out.push_str("delta,localization_length,participation,variance_at_t,r_squared\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            fmt_f64(r.delta),
            fmt_f64(r.localization_length),
            fmt_f64(r.participation),
            fmt_f64(r.variance),
            fmt_f64(r.r_squared)
        );
    }
    Ok(RunOutput {
        csv: out,
        sidecars: Vec::new(),
    })
}

/// Outcome of the full Floquet → tight-binding chain at one quasienergy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainRow {
    pub w: f64,
    pub recursion_residual: f64,
    /// Worst of the α (g) and β (g̃) three-term residuals.
    pub second_order_residual: f64,
    pub anderson_residual: f64,
    pub anderson_median: f64,
    pub degenerate: bool,
    pub growth_rate: f64,
    /// Set when the recursion could not be completed.
    pub failure: Option<String>,
}

impl ChainRow {
    /// Stages above their thresholds, as (stage, residual, threshold).
    pub fn exceedances(&self) -> Vec<(&'static str, f64, f64)> {
        let mut v = Vec::new();
        if self.failure.is_some() {
            return v;
        }
        if !(self.recursion_residual < tolerances::FLOQUET_RECURSION) {
            v.push(("eq9_residual", self.recursion_residual, tolerances::FLOQUET_RECURSION));
        }
        if !(self.second_order_residual < tolerances::SECOND_ORDER_CHAIN) {
            v.push((
                "eq11_residual",
                self.second_order_residual,
                tolerances::SECOND_ORDER_CHAIN,
            ));
        }
        if !self.degenerate && !(self.anderson_residual < tolerances::ANDERSON_CHAIN) {
            v.push(("anderson", self.anderson_residual, tolerances::ANDERSON_CHAIN));
        }
        v
    }
}

/// Runs the chain at one quasienergy over k ∈ [−range, range].
pub fn anderson_chain(omega: Omega, w: f64, range: i64, seed: (Complex64, Complex64)) -> Result<ChainRow> {
    let qe = QuasiEnergy::new(w)?;
    let coeffs = coefficients(omega, qe, -range, range)?;
    let failed = |e: WalkError| ChainRow {
        w,
        recursion_residual: f64::NAN,
        second_order_residual: f64::NAN,
        anderson_residual: f64::NAN,
        anderson_median: f64::NAN,
        degenerate: coeffs.degenerate,
        growth_rate: f64::NAN,
        failure: Some(e.to_string()),
    };
    let pair = match floquet_recursion(omega, qe, seed, -range, range) {
        Ok(p) => p,
        Err(e @ (WalkError::Numeric(_) | WalkError::Consistency(_))) => return Ok(failed(e)),
        Err(e) => return Err(e),
    };
    let (alpha, beta) = transform(&pair, &coeffs)?;
    let left = second_order_residual(&alpha, &coeffs, Chirality::Left)?;
    let right = second_order_residual(&beta, &coeffs, Chirality::Right)?;
    let anderson = anderson_residual(&alpha, &coeffs)?;
    Ok(ChainRow {
        w,
        recursion_residual: pair.residual,
        second_order_residual: left.max.max(right.max),
        anderson_residual: anderson.max,
        anderson_median: anderson.median,
        degenerate: coeffs.degenerate,
        growth_rate: 0.5 * (pair.growth_up + pair.growth_down),
        failure: None,
    })
}

pub fn anderson_rows(spec: &RunSpec, w_count: usize, range: i64, seed: [f64; 4]) -> Result<Vec<ChainRow>> {
    if w_count == 0 {
        return Err(WalkError::Validation("quasienergy grid must not be empty".into()));
    }
    let omega = spec.single_omega()?;
    let seed = (Complex64::new(seed[0], seed[1]), Complex64::new(seed[2], seed[3]));
    (0..w_count)
        .into_par_iter()
        .map(|j| anderson_chain(omega, TAU * j as f64 / w_count as f64, range, seed))
        .collect()
}

pub fn run_anderson_check(spec: &RunSpec, w_count: usize, range: i64, seed: [f64; 4]) -> Result<RunOutput> {
    let rows = anderson_rows(spec, w_count, range, seed)?;
    let mut out = spec.header();
    out.push_str("w,eq9_residual,eq11_residual,anderson_residual,degenerate_flag,anderson_median,growth_rate,status\n");
    let mut report = String::new();
    for r in &rows {
        let status = match (&r.failure, r.degenerate) {
            (Some(_), _) => "failed",
            (None, true) => "degenerate",
            (None, false) => "ok",
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            fmt_f64(r.w),
            fmt_f64(r.recursion_residual),
            fmt_f64(r.second_order_residual),
            fmt_f64(r.anderson_residual),
            flag(r.degenerate),
            fmt_f64(r.anderson_median),
            fmt_f64(r.growth_rate),
            status
        );
        if let Some(msg) = &r.failure {
            let _ = writeln!(report, "w={} stage=recursion failed: {msg}", fmt_f64(r.w));
        }
        for (stage, value, threshold) in r.exceedances() {
            let _ = writeln!(
                report,
                "w={} stage={stage} residual={} threshold={}",
                fmt_f64(r.w),
                fmt_f64(value),
                fmt_f64(threshold)
            );
        }
    }
    let sidecars = if report.is_empty() {
        Vec::new()
    } else {
        vec![(".discrepancy.txt".to_string(), report)]
    };
    Ok(RunOutput { csv: out, sidecars })
}

pub fn run_kinetic_stats(spec: &RunSpec, w: f64, sites: usize) -> Result<RunOutput> {
    let stats = kinetic_statistics(spec.single_omega()?, QuasiEnergy::new(w)?, sites)?;
    let mut out = spec.header();
    let stat_lines = [
        ("n_sites", stats.n_sites.to_string()),
        ("min", fmt_f64(stats.min)),
        ("max", fmt_f64(stats.max)),
        ("range", fmt_f64(stats.range)),
        ("q1", fmt_f64(stats.q1)),
        ("median", fmt_f64(stats.median)),
        ("q3", fmt_f64(stats.q3)),
        ("iqr", fmt_f64(stats.iqr)),
        ("lag1_autocorrelation", fmt_f64(stats.lag1_autocorrelation)),
        ("narrowly_peaked", flag(stats.narrowly_peaked).to_string()),
        ("pseudo_random", flag(stats.pseudo_random).to_string()),
        ("degenerate", flag(stats.degenerate).to_string()),
        ("constant", flag(stats.constant).to_string()),
    ];
    for (k, v) in stat_lines {
        let _ = writeln!(out, "# {k}={v}");
    }
    out.push_str("bin_lo,bin_hi,count\n");
    for (lo, hi, c) in &stats.histogram {
        let _ = writeln!(out, "{},{},{c}", fmt_f64(*lo), fmt_f64(*hi));
    }
    Ok(RunOutput {
        csv: out,
        sidecars: Vec::new(),
    })
}

/// Parses `cL_re,cL_im,cR_re,cR_im@k0`.
pub fn parse_init(s: &str) -> Result<InitialCondition> {
    let (amps, site) = s
        .split_once('@')
        .ok_or_else(|| WalkError::Config(format!("--init expects cL_re,cL_im,cR_re,cR_im@k0, got '{s}'")))?;
    let v = parse_list(amps)?;
    if v.len() != 4 {
        return Err(WalkError::Config(format!("--init needs 4 numbers, got {}", v.len())));
    }
    let k0 = i64::from_str(site.trim()).map_err(|_| WalkError::Config(format!("bad initial site '{site}'")))?;
    InitialCondition::new(k0, Complex64::new(v[0], v[1]), Complex64::new(v[2], v[3]))
}

/// Comma-separated floats.
pub fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .filter(|x| !x.trim().is_empty())
        .map(|x| parse_f64(x, "list"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt_f64(1.0), "1.0000000000000000e0");
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_f64(-2.5e-12), "-2.4999999999999998e-12");
        assert_eq!(fmt_f64(-0.25), "-2.5000000000000000e-1");
    }

    #[test]
    fn init_parsing() {
        let init = parse_init("1,0,0,0@3").unwrap();
        assert_eq!(init.site, 3);
        assert!(parse_init("1,0,0@3").is_err());
        assert!(parse_init("1,0,1,0@0").is_err());
        assert!(parse_init("1,0,0,0").is_err());
    }

    #[test]
    fn omega_spellings() {
        assert_eq!(
            OmegaChoice::new(OmegaFlag::Exact, "1/11").omega().unwrap(),
            Omega::rational(1, 11).unwrap()
        );
        assert!(OmegaChoice::new(OmegaFlag::Exact, "0.1").omega().is_err());
        let tp = OmegaChoice::new(OmegaFlag::TwoPi, "0.1").omega().unwrap();
        assert!((tp.value() * TAU - 0.1).abs() < 1e-16);
    }

    #[test]
    fn delta_requires_rational_base() {
        let spec = RunSpec::new(Experiment::Distribution { q: None })
            .with_omega(OmegaFlag::Decimal, "0.3")
            .with_deltas(&[1e-4])
            .with_steps(10);
        assert!(matches!(run(&spec), Err(WalkError::Config(_))));
    }

    #[test]
    fn empty_delta_list_is_rejected() {
        let spec = RunSpec::new(Experiment::NearResonanceScan)
            .with_omega(OmegaFlag::Exact, "1/11")
            .with_steps(10);
        assert!(matches!(run(&spec), Err(WalkError::Validation(_))));
    }

    #[test]
    fn evolve_csv_layout() {
        let spec = RunSpec::new(Experiment::Evolve {
            markov: true,
            markov_baseline: true,
        })
        .with_omega(OmegaFlag::Exact, "0/1")
        .with_steps(4);
        let out = run(&spec).unwrap();
        let lines: Vec<&str> = out.csv.lines().collect();
        assert!(lines[0].starts_with("# qwalk evolve {"));
        assert_eq!(lines[1], "t,variance,mean,participation,boundary_leak,variance_markov");
        assert_eq!(lines.len(), 2 + 5);
        assert!(lines[6].starts_with("4,4.0000000000000000e0,"));
        assert!(lines[6].ends_with(",4.0000000000000000e0"));
    }

    #[test]
    fn missing_omega_is_a_config_error() {
        let spec = RunSpec::new(Experiment::Distribution { q: None }).with_steps(4);
        assert!(matches!(run(&spec), Err(WalkError::Config(_))));
    }
}
