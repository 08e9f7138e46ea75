use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use qwalk::experiment::{self, Experiment, OmegaFlag, RunSpec, ScanOmega};

#[derive(Parser)]
#[command(
    name = "qwalk",
    version,
    about = "Momentum-space quantum walk experiments written as CSV"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Exact rational omega, p/q
    #[arg(long, group = "omega_value")]
    omega: Option<String>,

    /// Decimal omega
    #[arg(long = "omega-dec", group = "omega_value")]
    omega_dec: Option<String>,

    /// Omega given as the product 2*pi*omega
    #[arg(long = "two-pi-omega", group = "omega_value")]
    two_pi_omega: Option<String>,

    /// Offset(s) added to a rational omega
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    delta: Vec<f64>,

    #[arg(long, default_value_t = 2000)]
    steps: u32,

    /// Lattice spans [-n, n]; defaults to steps + 64
    #[arg(long = "half-width")]
    half_width: Option<u32>,

    /// Initial spinor and site: cL_re,cL_im,cR_re,cR_im@k0
    #[arg(long, allow_hyphen_values = true)]
    init: Option<String>,

    /// Record every n-th step
    #[arg(long, default_value_t = 1)]
    stride: u32,

    /// Output CSV path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Variance, mean, participation and boundary leakage versus time
    Evolve {
        #[command(flatten)]
        common: Common,
        /// Evolve the interference-free probability chain instead
        #[arg(long)]
        markov: bool,
        /// Add the diffusive baseline column variance_markov = t
        #[arg(long = "markov-baseline")]
        markov_baseline: bool,
    },
    /// Final momentum distribution with exponential fit and optional peak report
    Distribution {
        #[command(flatten)]
        common: Common,
        /// Check peak alignment with multiples of q
        #[arg(long)]
        q: Option<u64>,
    },
    /// Growth exponent of the variance for a list of omegas
    VarianceScan {
        #[command(flatten)]
        common: Common,
        /// Entries: p/q, decimal, 2pi:x or markov
        #[arg(long, value_delimiter = ',', required = true)]
        omegas: Vec<String>,
        #[arg(long = "t-min", default_value_t = 500)]
        t_min: u64,
        /// Defaults to --steps
        #[arg(long = "t-max")]
        t_max: Option<u64>,
    },
    /// Localization measures for omega = p/q + delta over a delta list
    NearResonanceScan {
        #[command(flatten)]
        common: Common,
    },
    /// Floquet recursion and tight-binding residuals over a quasienergy grid
    AndersonCheck {
        #[command(flatten)]
        common: Common,
        #[arg(long = "w-count", default_value_t = 64)]
        w_count: usize,
        /// Recursion window [-range, range]
        #[arg(long, default_value_t = 200)]
        range: i64,
        /// a0_re,a0_im,b0_re,b0_im
        #[arg(long, default_value = "1,0,0,0", allow_hyphen_values = true)]
        seed: String,
    },
    /// Statistics of the kinetic term T_k
    KineticStats {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        w: f64,
        #[arg(long, default_value_t = 1000)]
        sites: usize,
    },
}

fn build_spec(experiment: Experiment, c: &Common) -> anyhow::Result<RunSpec> {
    let mut spec = RunSpec::new(experiment);
    spec.omega = match (&c.omega, &c.omega_dec, &c.two_pi_omega) {
        (Some(s), None, None) => Some(experiment::OmegaChoice::new(OmegaFlag::Exact, s.as_str())),
        (None, Some(s), None) => Some(experiment::OmegaChoice::new(OmegaFlag::Decimal, s.as_str())),
        (None, None, Some(s)) => Some(experiment::OmegaChoice::new(OmegaFlag::TwoPi, s.as_str())),
        (None, None, None) => None,
        _ => bail!("give exactly one of --omega, --omega-dec, --two-pi-omega"),
    };
    spec.deltas = c.delta.clone();
    spec.steps = c.steps;
    spec.half_width = c.half_width;
    if let Some(init) = &c.init {
        spec.init = experiment::parse_init(init)?;
    }
    spec.stride = c.stride;
    Ok(spec)
}

fn sidecar_path(out: &Path, suffix: &str) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn main() -> anyhow::Result<()> {
    let cli = Cli::parse();
    let (spec, out) = match &cli.command {
        Command::Evolve {
            common,
            markov,
            markov_baseline,
        } => (
            build_spec(
                Experiment::Evolve {
                    markov: *markov,
                    markov_baseline: *markov_baseline,
                },
                common,
            )?,
            common.out.clone(),
        ),
        Command::Distribution { common, q } => (
            build_spec(Experiment::Distribution { q: *q }, common)?,
            common.out.clone(),
        ),
        Command::VarianceScan {
            common,
            omegas,
            t_min,
            t_max,
        } => (
            build_spec(
                Experiment::VarianceScan {
                    omegas: omegas.iter().map(|s| ScanOmega(s.clone())).collect(),
                    t_min: *t_min,
                    t_max: *t_max,
                },
                common,
            )?,
            common.out.clone(),
        ),
        Command::NearResonanceScan { common } => {
            (build_spec(Experiment::NearResonanceScan, common)?, common.out.clone())
        }
        Command::AndersonCheck {
            common,
            w_count,
            range,
            seed,
        } => {
            let v = experiment::parse_list(seed)?;
            let seed: [f64; 4] = v.try_into().map_err(|_| anyhow::anyhow!("--seed needs four numbers"))?;
            (
                build_spec(
                    Experiment::AndersonCheck {
                        w_count: *w_count,
                        range: *range,
                        seed,
                    },
                    common,
                )?,
                common.out.clone(),
            )
        }
        Command::KineticStats { common, w, sites } => (
            build_spec(Experiment::KineticStats { w: *w, sites: *sites }, common)?,
            common.out.clone(),
        ),
    };

    // Nothing is written unless the whole run succeeded.
    let output = experiment::run(&spec).with_context(|| format!("{} failed", spec.experiment.name()))?;
    match out {
        Some(path) => {
            fs::write(&path, &output.csv).with_context(|| format!("writing {}", path.display()))?;
            for (suffix, body) in &output.sidecars {
                let p = sidecar_path(&path, suffix);
                fs::write(&p, body).with_context(|| format!("writing {}", p.display()))?;
            }
        }
        None => {
            std::io::stdout().write_all(output.csv.as_bytes())?;
            for (suffix, body) in &output.sidecars {
                eprintln!("--- {suffix}");
                eprint!("{body}");
            }
        }
    }
    Ok(())
}
