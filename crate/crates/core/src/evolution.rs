//! One-step map of the walk and its interference-free (Markov) counterpart.
//!
//! The coherent step is
//!
//! ```text
//! a_k ← (a_{k+1} + b_{k+1}) / √2 · e^{-i2πΩk²}
//! b_k ← (a_{k-1} − b_{k-1}) / √2 · e^{-i2πΩk²}
//! ```
//!
//! i.e. a Hadamard coin, a chirality-conditioned shift and a drift phase keyed
//! to the destination site. Dropping the interference terms Re(a_k b_k*) from
//! the induced probability map leaves the unbiased random walk
//! F_k ← (F_{k+1} + F_{k-1}) / 2.

use std::f64::consts::FRAC_1_SQRT_2;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Result, WalkError};
use crate::observables::{self, Observable, ObservableSeries};
use crate::phase::{Omega, PhaseTable};
use crate::state::{edge_indices, InitialCondition, SpinorField, WalkParams, NORM_TOLERANCE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StepMode {
    Coherent,
    Markov,
}

impl FromStr for StepMode {
    type Err = WalkError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "coherent" => Ok(StepMode::Coherent),
            "markov" => Ok(StepMode::Markov),
            _ => Err(WalkError::Config(format!("unknown step mode '{s}'"))),
        }
    }
}

/// Real probability distribution over the lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityField {
    pub(crate) k_min: i64,
    pub(crate) f: Vec<f64>,
    pub(crate) t: u64,
}

impl ProbabilityField {
    pub fn new(k_min: i64, f: Vec<f64>, t: u64) -> Result<Self> {
        if f.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
            return Err(WalkError::Validation(
                "probabilities must be finite and non-negative".into(),
            ));
        }
        Ok(ProbabilityField { k_min, f, t })
    }

    /// Unit mass at `site` on [-half_width, half_width].
    pub fn delta(params: &WalkParams, site: i64) -> Result<Self> {
        params.validate()?;
        let hw = params.half_width as i64;
        if site.abs() > hw {
            return Err(WalkError::Config(format!(
                "initial site {site} outside lattice [-{hw}, {hw}]"
            )));
        }
        let mut f = vec![0.0; params.n_sites()];
        f[(site + hw) as usize] = 1.0;
        Ok(ProbabilityField { k_min: -hw, f, t: 0 })
    }

    pub fn k_min(&self) -> i64 {
        self.k_min
    }

    pub fn k_max(&self) -> i64 {
        self.k_min + self.f.len() as i64 - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.f
    }

    pub fn time(&self) -> u64 {
        self.t
    }

    pub fn len(&self) -> usize {
        self.f.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f.is_empty()
    }

    pub fn get(&self, k: i64) -> f64 {
        if k < self.k_min || k > self.k_max() {
            0.0
        } else {
            self.f[(k - self.k_min) as usize]
        }
    }

    /// (k, F_k) pairs in increasing k.
    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.f.iter().enumerate().map(move |(i, &p)| (self.k_min + i as i64, p))
    }

    pub fn total(&self) -> f64 {
        self.f.iter().sum()
    }

    pub fn boundary_probability(&self) -> f64 {
        edge_indices(self.f.len()).map(|i| self.f[i]).sum()
    }
}

/// Hadamard coin at every site: (a, b) ← ((a + b)/√2, (a − b)/√2).
pub fn coin_step(state: &mut SpinorField) {
    for (a, b) in state.a.iter_mut().zip(state.b.iter_mut()) {
        let (x, y) = (*a, *b);
        *a = (x + y) * FRAC_1_SQRT_2;
        *b = (x - y) * FRAC_1_SQRT_2;
    }
}

fn check_leak(leak: f64, tolerance: f64, step: u64) -> Result<()> {
    if leak > tolerance {
        Err(WalkError::LatticeOverflow { step, leak, tolerance })
    } else {
        Ok(())
    }
}

/// Conditional shift: a_k ← a_{k+1}, b_k ← b_{k-1}.
///
/// Fails instead of shifting if the edge sites carry more than `tolerance`.
/// What leaves the stored range after a passing check is dropped.
pub fn shift_step(state: &mut SpinorField, tolerance: f64) -> Result<()> {
    check_leak(state.boundary_probability(), tolerance, state.t + 1)?;
    let zero = num_complex::Complex64::new(0.0, 0.0);
    state.a.rotate_left(1);
    if let Some(last) = state.a.last_mut() {
        *last = zero;
    }
    state.b.rotate_right(1);
    if let Some(first) = state.b.first_mut() {
        *first = zero;
    }
    Ok(())
}

/// Multiplies each site by e^{-i2πΩk²}.
pub fn phase_step(state: &mut SpinorField, omega: Omega) {
    let table = PhaseTable::new(omega, state.k_min, state.len());
    apply_phase(state, &table);
}

fn apply_phase(state: &mut SpinorField, table: &PhaseTable) {
    debug_assert_eq!(table.k_min(), state.k_min);
    for ((a, b), &z) in state.a.iter_mut().zip(state.b.iter_mut()).zip(table.factors()) {
        *a *= z;
        *b *= z;
    }
}

/// Owns the phase table for one Ω and applies the full step.
#[derive(Debug, Clone)]
pub struct Evolver {
    params: WalkParams,
    table: PhaseTable,
}

impl Evolver {
    pub fn new(params: WalkParams) -> Result<Self> {
        params.validate()?;
        let table = PhaseTable::new(params.omega, params.k_min(), params.n_sites());
        Ok(Evolver { params, table })
    }

    pub fn params(&self) -> &WalkParams {
        &self.params
    }

    /// One application of the map, fused into a single pass.
    pub fn step(&self, state: &mut SpinorField) -> Result<()> {
        if state.k_min != self.table.k_min() || state.len() != self.table.factors().len() {
            return Err(WalkError::Validation("state lattice does not match the evolver".into()));
        }
        check_leak(
            state.boundary_probability(),
            self.params.boundary_tolerance,
            state.t + 1,
        )?;
        let n = state.len();
        let phase = self.table.factors();
        let zero = num_complex::Complex64::new(0.0, 0.0);
        let mut a = vec![zero; n];
        let mut b = vec![zero; n];
        for i in 0..n {
            if i + 1 < n {
                a[i] = (state.a[i + 1] + state.b[i + 1]) * FRAC_1_SQRT_2 * phase[i];
            }
            if i > 0 {
                b[i] = (state.a[i - 1] - state.b[i - 1]) * FRAC_1_SQRT_2 * phase[i];
            }
        }
        state.a = a;
        state.b = b;
        state.t += 1;
        Ok(())
    }

    /// Same step spelled as coin, shift, then phase.
    pub fn step_composed(&self, state: &mut SpinorField) -> Result<()> {
        coin_step(state);
        shift_step(state, self.params.boundary_tolerance)?;
        apply_phase(state, &self.table);
        state.t += 1;
        Ok(())
    }
}

/// F_k ← (F_{k+1} + F_{k-1}) / 2 with the same edge handling as the coherent shift.
pub fn markov_step(field: &mut ProbabilityField, tolerance: f64) -> Result<()> {
    check_leak(field.boundary_probability(), tolerance, field.t + 1)?;
    let n = field.f.len();
    let old = &field.f;
    let next: Vec<f64> = (0..n)
        .map(|i| {
            let up = if i + 1 < n { old[i + 1] } else { 0.0 };
            let down = if i > 0 { old[i - 1] } else { 0.0 };
            0.5 * (up + down)
        })
        .collect();
    field.f = next;
    field.t += 1;
    Ok(())
}

/// Something that can be advanced one step and observed.
pub trait Walk {
    fn advance(&mut self) -> Result<()>;
    fn distribution(&self) -> ProbabilityField;
    fn time(&self) -> u64;
}

pub struct CoherentWalk {
    pub state: SpinorField,
    evolver: Evolver,
}

impl CoherentWalk {
    pub fn new(params: WalkParams, init: &InitialCondition) -> Result<Self> {
        let state = SpinorField::new(&params, init)?;
        Ok(CoherentWalk {
            state,
            evolver: Evolver::new(params)?,
        })
    }
}

impl Walk for CoherentWalk {
    fn advance(&mut self) -> Result<()> {
        self.evolver.step(&mut self.state)
    }

    fn distribution(&self) -> ProbabilityField {
        observables::distribution(&self.state)
    }

    fn time(&self) -> u64 {
        self.state.time()
    }
}

pub struct MarkovWalk {
    pub field: ProbabilityField,
    tolerance: f64,
}

impl MarkovWalk {
    pub fn new(params: &WalkParams, site: i64) -> Result<Self> {
        Ok(MarkovWalk {
            field: ProbabilityField::delta(params, site)?,
            tolerance: params.boundary_tolerance,
        })
    }
}

impl Walk for MarkovWalk {
    fn advance(&mut self) -> Result<()> {
        markov_step(&mut self.field, self.tolerance)
    }

    fn distribution(&self) -> ProbabilityField {
        self.field.clone()
    }

    fn time(&self) -> u64 {
        self.field.t
    }
}

/// Advances `walk` by `steps`, recording the requested observables at t = 0,
/// every `stride` steps, and at the final step.
///
/// The total probability is checked after every step; drift beyond
/// [`NORM_TOLERANCE`] is an error, never silently renormalized.
pub fn evolve<W: Walk>(walk: &mut W, steps: u32, record: &[Observable], stride: u32) -> Result<ObservableSeries> {
    if steps == 0 {
        return Err(WalkError::Validation("steps must be at least 1".into()));
    }
    if stride == 0 {
        return Err(WalkError::Config("record stride must be at least 1".into()));
    }
    let mut series = ObservableSeries::new(record);
    series.push_field(&walk.distribution())?;
    for s in 1..=steps {
        walk.advance()?;
        let field = walk.distribution();
        let drift = (field.total() - 1.0).abs();
        if !(drift <= NORM_TOLERANCE) {
            return Err(WalkError::NormDrift {
                step: walk.time(),
                drift,
            });
        }
        if s % stride == 0 || s == steps {
            series.push_field(&field)?;
        }
    }
    Ok(series)
}

/// Coherent run from `init`; returns the series and the final state.
pub fn run_coherent(
    params: WalkParams,
    init: &InitialCondition,
    record: &[Observable],
    stride: u32,
) -> Result<(ObservableSeries, SpinorField)> {
    let mut walk = CoherentWalk::new(params, init)?;
    let series = evolve(&mut walk, params.steps, record, stride)?;
    Ok((series, walk.state))
}

/// Markov run from a delta at `site`.
pub fn run_markov(
    params: WalkParams,
    site: i64,
    record: &[Observable],
    stride: u32,
) -> Result<(ObservableSeries, ProbabilityField)> {
    let mut walk = MarkovWalk::new(&params, site)?;
    let series = evolve(&mut walk, params.steps, record, stride)?;
    Ok((series, walk.field))
}
