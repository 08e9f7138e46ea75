//! Scale parameter Ω and the reduced drift phase e^{-i2πΩk²}.
//!
//! The argument 2πΩk² grows like k², so at |k| ~ 2000 it is of order 10⁶ and a
//! naive `sin`/`cos` of the raw product throws away most of the significant
//! digits. Instead the phase is carried in turns: Ωk² is reduced modulo one
//! before it is multiplied by 2π. For a rational Ω = p/q the reduction is done
//! in integer arithmetic, for a decimal Ω the product Ωk² is formed exactly as
//! an unevaluated sum `hi + lo` with a fused multiply-add.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Result, WalkError};

/// Largest |k| for which k² is exact in an `f64`.
pub const MAX_SITE: i64 = 1 << 26;

/// The scale parameter Ω = ħτ/4πm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Omega {
    /// Exact p/q plus an optional decimal offset δ.
    Rational {
        p: i64,
        q: u64,
        delta: f64,
    },
    Decimal(f64),
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

impl Omega {
    pub fn rational(p: i64, q: u64) -> Result<Self> {
        if q == 0 {
            return Err(WalkError::Validation("omega denominator must be positive".into()));
        }
        let g = gcd(p.unsigned_abs(), q).max(1);
        Ok(Omega::Rational {
            p: p / g as i64,
            q: q / g,
            delta: 0.0,
        })
    }

    pub fn decimal(x: f64) -> Result<Self> {
        if !x.is_finite() {
            return Err(WalkError::Validation(format!("omega must be finite, got {x}")));
        }
        Ok(Omega::Decimal(x))
    }

    /// Ω from the product 2πΩ, the parameterisation used for the irrational runs.
    pub fn from_two_pi(x: f64) -> Result<Self> {
        if !x.is_finite() {
            return Err(WalkError::Validation(format!("2*pi*omega must be finite, got {x}")));
        }
        Ok(Omega::Decimal(x / TAU))
    }

    /// Adds δ to a rational base. Offsets on a decimal Ω are rejected.
    pub fn with_delta(self, delta: f64) -> Result<Self> {
        if !delta.is_finite() {
            return Err(WalkError::Validation(format!("delta must be finite, got {delta}")));
        }
        match self {
            Omega::Rational { p, q, .. } => Ok(Omega::Rational { p, q, delta }),
            Omega::Decimal(_) => Err(WalkError::Config(
                "delta offsets require an exact rational omega (p/q)".into(),
            )),
        }
    }

    /// Nearest `f64` to Ω. Only for reporting; phases never use it.
    pub fn value(&self) -> f64 {
        match *self {
            Omega::Rational { p, q, delta } => p as f64 / q as f64 + delta,
            Omega::Decimal(x) => x,
        }
    }

    /// Ωk² mod 1, in [0, 1).
    pub fn turns(&self, k: i64) -> f64 {
        debug_assert!(k.abs() <= MAX_SITE);
        match *self {
            Omega::Rational { p, q, delta } => {
                let q128 = q as i128;
                let k2 = (k as i128 * k as i128).rem_euclid(q128);
                let num = (p as i128).rem_euclid(q128) * k2 % q128;
                let exact = num as f64 / q as f64;
                if delta == 0.0 {
                    exact
                } else {
                    wrap_unit(exact + product_turns(delta, k))
                }
            }
            Omega::Decimal(x) => product_turns(x, k),
        }
    }

    /// e^{-i2πΩk²} evaluated from the reduced argument.
    pub fn drift_phase(&self, k: i64) -> Complex64 {
        let angle = TAU * centered(self.turns(k));
        let (s, c) = angle.sin_cos();
        Complex64::new(c, -s)
    }
}

/// frac(x·k²) with x·k² formed exactly as hi + lo.
fn product_turns(x: f64, k: i64) -> f64 {
    let k2 = (k * k) as f64;
    let hi = x * k2;
    let lo = x.mul_add(k2, -hi);
    let frac_hi = hi - hi.floor();
    wrap_unit(frac_hi + lo)
}

fn wrap_unit(t: f64) -> f64 {
    let r = t - t.floor();
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Maps turns in [0, 1) to [-1/2, 1/2).
fn centered(t: f64) -> f64 {
    if t >= 0.5 {
        t - 1.0
    } else {
        t
    }
}

impl fmt::Display for Omega {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Omega::Rational { p, q, delta } if delta == 0.0 => write!(f, "{p}/{q}"),
            Omega::Rational { p, q, delta } => write!(f, "{p}/{q}+{delta:e}"),
            Omega::Decimal(x) => write!(f, "{x}"),
        }
    }
}

impl FromStr for Omega {
    type Err = WalkError;

    /// Accepts `p/q` (exact) or a decimal literal.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let p: i64 = p
                .trim()
                .parse()
                .map_err(|_| WalkError::Config(format!("bad omega numerator in '{s}'")))?;
            let q: u64 = q
                .trim()
                .parse()
                .map_err(|_| WalkError::Config(format!("bad omega denominator in '{s}'")))?;
            Omega::rational(p, q)
        } else {
            let x: f64 = s
                .parse()
                .map_err(|_| WalkError::Config(format!("bad omega value '{s}'")))?;
            Omega::decimal(x)
        }
    }
}

/// Per-site drift phases for a fixed Ω, built once per run.
#[derive(Debug, Clone)]
pub struct PhaseTable {
    omega: Omega,
    k_min: i64,
    factors: Vec<Complex64>,
}

impl PhaseTable {
    pub fn new(omega: Omega, k_min: i64, len: usize) -> Self {
        let factors = (0..len as i64).map(|i| omega.drift_phase(k_min + i)).collect();
        PhaseTable { omega, k_min, factors }
    }

    pub fn omega(&self) -> Omega {
        self.omega
    }

    pub fn k_min(&self) -> i64 {
        self.k_min
    }

    pub fn factors(&self) -> &[Complex64] {
        &self.factors
    }
}
