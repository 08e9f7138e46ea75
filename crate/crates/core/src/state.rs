//! Lattice state and run parameters.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Result, WalkError};
use crate::phase::{Omega, MAX_SITE};

/// Amplitudes are plain double-precision complex numbers.
pub type ComplexValue = Complex64;

/// Norm tolerance for constructed spinors and states.
pub const NORM_TOLERANCE: f64 = 1e-9;

pub const DEFAULT_BOUNDARY_TOLERANCE: f64 = 1e-12;

/// Parameters shared by every run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WalkParams {
    pub omega: Omega,
    /// The lattice spans k ∈ [-half_width, half_width].
    pub half_width: u32,
    /// Number of unit time steps (τ = 1).
    pub steps: u32,
    /// Largest probability allowed on the two outermost sites at either edge.
    pub boundary_tolerance: f64,
}

impl WalkParams {
    pub fn new(omega: Omega, half_width: u32, steps: u32) -> Result<Self> {
        let params = WalkParams {
            omega,
            half_width,
            steps,
            boundary_tolerance: DEFAULT_BOUNDARY_TOLERANCE,
        };
        params.validate()?;
        Ok(params)
    }

    /// Half-width with the default light-cone margin of 64 sites.
    pub fn with_default_width(omega: Omega, steps: u32) -> Result<Self> {
        Self::new(omega, steps + 64, steps)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.omega.value().is_finite() {
            return Err(WalkError::Validation("omega must be finite".into()));
        }
        if self.half_width < 2 {
            return Err(WalkError::Config("half_width must be at least 2".into()));
        }
        if self.half_width as i64 > MAX_SITE {
            return Err(WalkError::Config(format!("half_width exceeds {MAX_SITE}")));
        }
        if !(self.boundary_tolerance >= 0.0) {
            return Err(WalkError::Config("boundary_tolerance must be non-negative".into()));
        }
        Ok(())
    }

    pub fn k_min(&self) -> i64 {
        -(self.half_width as i64)
    }

    pub fn n_sites(&self) -> usize {
        2 * self.half_width as usize + 1
    }
}

/// Single-site start with a normalized chirality spinor (c_L, c_R).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InitialCondition {
    pub site: i64,
    pub left: (f64, f64),
    pub right: (f64, f64),
}

impl InitialCondition {
    pub fn new(site: i64, left: ComplexValue, right: ComplexValue) -> Result<Self> {
        let norm = left.norm_sqr() + right.norm_sqr();
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(WalkError::Validation(format!(
                "chirality spinor has norm {norm}, expected 1"
            )));
        }
        Ok(InitialCondition {
            site,
            left: (left.re, left.im),
            right: (right.re, right.im),
        })
    }

    /// (1/√2)(1, i) at the origin.
    pub fn symmetric() -> Self {
        InitialCondition {
            site: 0,
            left: (FRAC_1_SQRT_2, 0.0),
            right: (0.0, FRAC_1_SQRT_2),
        }
    }

    pub fn c_left(&self) -> ComplexValue {
        Complex64::new(self.left.0, self.left.1)
    }

    pub fn c_right(&self) -> ComplexValue {
        Complex64::new(self.right.0, self.right.1)
    }
}

impl Default for InitialCondition {
    fn default() -> Self {
        Self::symmetric()
    }
}

/// Spinor amplitudes (a_k, b_k) over the stored sites, upper component = left chirality.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorField {
    pub(crate) k_min: i64,
    pub(crate) a: Vec<ComplexValue>,
    pub(crate) b: Vec<ComplexValue>,
    pub(crate) t: u64,
}

impl SpinorField {
    /// Delta state at `init.site` on the lattice described by `params`.
    pub fn new(params: &WalkParams, init: &InitialCondition) -> Result<Self> {
        params.validate()?;
        let hw = params.half_width as i64;
        if init.site.abs() > hw {
            return Err(WalkError::Config(format!(
                "initial site {} outside lattice [-{hw}, {hw}]",
                init.site
            )));
        }
        // Re-check in case the struct was built by hand.
        InitialCondition::new(init.site, init.c_left(), init.c_right())?;
        let n = params.n_sites();
        let mut a = vec![Complex64::new(0.0, 0.0); n];
        let mut b = a.clone();
        let i = (init.site + hw) as usize;
        a[i] = init.c_left();
        b[i] = init.c_right();
        Ok(SpinorField { k_min: -hw, a, b, t: 0 })
    }

    /// Builds a field from raw amplitudes. Lengths must match; no normalization check.
    pub fn from_amplitudes(k_min: i64, a: Vec<ComplexValue>, b: Vec<ComplexValue>, t: u64) -> Result<Self> {
        if a.len() != b.len() || a.is_empty() {
            return Err(WalkError::Validation(
                "amplitude sequences must be non-empty and of equal length".into(),
            ));
        }
        if a.iter().chain(b.iter()).any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(WalkError::Validation("amplitudes must be finite".into()));
        }
        Ok(SpinorField { k_min, a, b, t })
    }

    pub fn k_min(&self) -> i64 {
        self.k_min
    }

    pub fn k_max(&self) -> i64 {
        self.k_min + self.a.len() as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// Elapsed steps.
    pub fn time(&self) -> u64 {
        self.t
    }

    pub fn left(&self) -> &[ComplexValue] {
        &self.a
    }

    pub fn right(&self) -> &[ComplexValue] {
        &self.b
    }

    fn index(&self, k: i64) -> Option<usize> {
        if k < self.k_min || k > self.k_max() {
            None
        } else {
            Some((k - self.k_min) as usize)
        }
    }

    pub fn amplitudes_at(&self, k: i64) -> Option<(ComplexValue, ComplexValue)> {
        self.index(k).map(|i| (self.a[i], self.b[i]))
    }

    /// F_k = |a_k|² + |b_k|². Sites outside the lattice carry nothing.
    pub fn probability_at(&self, k: i64) -> f64 {
        self.index(k)
            .map(|i| self.a[i].norm_sqr() + self.b[i].norm_sqr())
            .unwrap_or(0.0)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.a.iter().chain(self.b.iter()).map(|z| z.norm_sqr()).sum()
    }

    /// Probability on the two outermost sites at each edge.
    pub fn boundary_probability(&self) -> f64 {
        edge_indices(self.len())
            .map(|i| self.a[i].norm_sqr() + self.b[i].norm_sqr())
            .sum()
    }
}

/// Indices of the sites with |k| ∈ {K-1, K}, without repeats on tiny lattices.
pub(crate) fn edge_indices(n: usize) -> impl Iterator<Item = usize> {
    let mut idx = vec![0, 1, n.saturating_sub(2), n.saturating_sub(1)];
    idx.retain(|&i| i < n);
    idx.sort_unstable();
    idx.dedup();
    idx.into_iter()
}
