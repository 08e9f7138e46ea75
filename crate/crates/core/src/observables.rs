//! Measured quantities: momentum distribution, interference term, moments,
//! participation number, and the fits behind the localization and resonance
//! diagnostics.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Result, WalkError};
use crate::evolution::ProbabilityField;
use crate::fit::{linear_fit, FitResult};
use crate::state::{SpinorField, NORM_TOLERANCE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Observable {
    Variance,
    Mean,
    Participation,
    BoundaryLeak,
}

impl Observable {
    pub const ALL: [Observable; 4] = [
        Observable::Variance,
        Observable::Mean,
        Observable::Participation,
        Observable::BoundaryLeak,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Observable::Variance => "variance",
            Observable::Mean => "mean",
            Observable::Participation => "participation",
            Observable::BoundaryLeak => "boundary_leak",
        }
    }

    fn measure(self, field: &ProbabilityField) -> Result<f64> {
        Ok(match self {
            Observable::Variance => variance(field)?,
            Observable::Mean => mean(field),
            Observable::Participation => participation_number(field),
            Observable::BoundaryLeak => field.boundary_probability(),
        })
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Observable {
    type Err = WalkError;

    fn from_str(s: &str) -> Result<Self> {
        Observable::ALL
            .into_iter()
            .find(|o| o.name() == s)
            .ok_or_else(|| WalkError::Config(format!("unknown observable '{s}'")))
    }
}

/// Time-indexed observable columns.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableSeries {
    times: Vec<u64>,
    columns: Vec<(Observable, Vec<f64>)>,
}

impl ObservableSeries {
    pub fn new(record: &[Observable]) -> Self {
        let mut names: Vec<Observable> = Vec::new();
        for &o in record {
            if !names.contains(&o) {
                names.push(o);
            }
        }
        ObservableSeries {
            times: Vec::new(),
            columns: names.into_iter().map(|o| (o, Vec::new())).collect(),
        }
    }

    pub fn push_field(&mut self, field: &ProbabilityField) -> Result<()> {
        if let Some(&last) = self.times.last() {
            if field.time() <= last {
                return Err(WalkError::Validation("series times must increase".into()));
            }
        }
        let values = self
            .columns
            .iter()
            .map(|(o, _)| o.measure(field))
            .collect::<Result<Vec<_>>>()?;
        self.times.push(field.time());
        for ((_, col), v) in self.columns.iter_mut().zip(values) {
            col.push(v);
        }
        Ok(())
    }

    pub fn times(&self) -> &[u64] {
        &self.times
    }

    pub fn observables(&self) -> impl Iterator<Item = Observable> + '_ {
        self.columns.iter().map(|(o, _)| *o)
    }

    pub fn column(&self, obs: Observable) -> Option<&[f64]> {
        self.columns.iter().find(|(o, _)| *o == obs).map(|(_, v)| v.as_slice())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// F_k = |a_k|² + |b_k|² at every stored site.
pub fn distribution(state: &SpinorField) -> ProbabilityField {
    let f = state
        .left()
        .iter()
        .zip(state.right())
        .map(|(a, b)| a.norm_sqr() + b.norm_sqr())
        .collect();
    ProbabilityField {
        k_min: state.k_min(),
        f,
        t: state.time(),
    }
}

/// β_k = Re(a_k b_k*); zero off the lattice.
pub fn interference_term(state: &SpinorField, k: i64) -> f64 {
    state.amplitudes_at(k).map(|(a, b)| (a * b.conj()).re).unwrap_or(0.0)
}

pub fn mean(field: &ProbabilityField) -> f64 {
    field.iter().map(|(k, p)| k as f64 * p).sum::<f64>()
}

/// Second central moment Σ k² F_k − (Σ k F_k)², evaluated in two passes.
pub fn variance(field: &ProbabilityField) -> Result<f64> {
    let total = field.total();
    if !((total - 1.0).abs() <= NORM_TOLERANCE) {
        return Err(WalkError::Validation(format!(
            "field is not normalized (sum = {total})"
        )));
    }
    let mu = mean(field);
    let v = field
        .iter()
        .map(|(k, p)| {
            let d = k as f64 - mu;
            d * d * p
        })
        .sum::<f64>();
    Ok(v.max(0.0))
}

/// 1 / Σ F_k². Zero for an empty field.
pub fn participation_number(field: &ProbabilityField) -> f64 {
    let s: f64 = field.values().iter().map(|p| p * p).sum();
    if s > 0.0 {
        1.0 / s
    } else {
        0.0
    }
}

/// Which sites enter the exponential fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitWindow {
    /// Sites with F_k at or below this are ignored.
    pub floor: f64,
    /// Fraction of the usable sites farthest from the centre that is dropped.
    pub edge_fraction: f64,
}

impl Default for FitWindow {
    fn default() -> Self {
        FitWindow {
            floor: 1e-14,
            edge_fraction: 0.05,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LocalizationFit {
    /// `derived_quantity` is ℓ in F_k ∝ exp(−|k − k̄|/ℓ), infinite when not localized.
    pub fit: FitResult,
    pub center: f64,
    pub localized: bool,
}

impl LocalizationFit {
    pub fn length(&self) -> f64 {
        self.fit.derived_quantity
    }
}

const FLAT_SLOPE: f64 = 1e-9;

/// Least-squares fit of ln F_k against |k − k̄| over the sites kept by `window`.
pub fn localization_length_fit(field: &ProbabilityField, window: &FitWindow) -> Result<LocalizationFit> {
    let total = field.total();
    if !(total > 0.0) {
        return Err(WalkError::Fit("empty distribution".into()));
    }
    let center = mean(field) / total;
    let mut pts: Vec<(f64, f64)> = field
        .iter()
        .filter(|&(_, p)| p > window.floor)
        .map(|(k, p)| ((k as f64 - center).abs(), p.ln()))
        .collect();
    pts.sort_by(|x, y| x.0.total_cmp(&y.0));
    let drop = (pts.len() as f64 * window.edge_fraction).floor() as usize;
    pts.truncate(pts.len() - drop);
    if pts.len() < 3 {
        return Err(WalkError::Fit(format!("only {} usable sites", pts.len())));
    }
    let (x, y): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
    let mut fit = linear_fit(&x, &y)?;
    let localized = fit.slope < -FLAT_SLOPE;
    fit.derived_quantity = if localized { -1.0 / fit.slope } else { f64::INFINITY };
    Ok(LocalizationFit { fit, center, localized })
}

fn window_points(series: &ObservableSeries, t_min: u64, t_max: u64) -> Result<Vec<(f64, f64)>> {
    if t_min < 1 || t_max <= t_min {
        return Err(WalkError::Validation(format!("bad fit window [{t_min}, {t_max}]")));
    }
    let var = series
        .column(Observable::Variance)
        .ok_or_else(|| WalkError::Config("series does not record the variance".into()))?;
    let pts: Vec<(f64, f64)> = series
        .times()
        .iter()
        .zip(var)
        .filter(|(&t, _)| t >= t_min && t <= t_max)
        .map(|(&t, &v)| (t as f64, v))
        .collect();
    if pts.len() < 10 {
        return Err(WalkError::Fit(format!("window holds {} points, need 10", pts.len())));
    }
    Ok(pts)
}

/// γ from ln σ² = γ ln t + c over t ∈ [t_min, t_max].
pub fn growth_exponent_fit(series: &ObservableSeries, t_min: u64, t_max: u64) -> Result<FitResult> {
    let pts = window_points(series, t_min, t_max)?;
    if pts.iter().any(|&(_, v)| !(v > 0.0)) {
        return Err(WalkError::Fit("zero variance inside the fit window".into()));
    }
    let x: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
    let y: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    linear_fit(&x, &y)
}

/// c from σ² = c t² + d over t ∈ [t_min, t_max].
pub fn quadratic_coefficient_fit(series: &ObservableSeries, t_min: u64, t_max: u64) -> Result<FitResult> {
    let pts = window_points(series, t_min, t_max)?;
    let x: Vec<f64> = pts.iter().map(|p| p.0 * p.0).collect();
    let y: Vec<f64> = pts.iter().map(|p| p.1).collect();
    linear_fit(&x, &y)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Peak {
    pub k: i64,
    pub height: f64,
    pub prominence: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeakReport {
    pub q: u64,
    /// Prominent peaks, tallest first.
    pub peaks: Vec<Peak>,
    /// Effective width of the distribution in lattice sites.
    pub width: f64,
    /// Number of leading peaks the verdict looks at, ⌈width/q⌉.
    pub examined: usize,
    pub aligned: bool,
}

/// Peaks lower than this fraction of the global maximum, measured as prominence, are ripple.
pub const PEAK_PROMINENCE_FLOOR: f64 = 1e-6;

/// Local maxima of F_k over same-parity neighbours and whether the leading
/// ones sit within one site of a multiple of `q`.
///
/// The effective width is the participation number times the spacing of the
/// occupied sublattice (2 when one parity class is empty, as for a walk
/// started on a single site).
pub fn resonance_peaks(field: &ProbabilityField, q: u64) -> Result<PeakReport> {
    if q < 2 {
        return Err(WalkError::Validation("q must be at least 2".into()));
    }
    let values = field.values();
    let global_max = values.iter().cloned().fold(0.0_f64, f64::max);
    if values.is_empty() || !(global_max > 0.0) {
        return Err(WalkError::Validation("empty distribution".into()));
    }
    let mut peaks = Vec::new();
    let mut occupied_classes = 0;
    for start in 0..2usize.min(values.len()) {
        let sub: Vec<f64> = values.iter().skip(start).step_by(2).cloned().collect();
        if sub.iter().any(|&p| p > 0.0) {
            occupied_classes += 1;
        }
        for j in 0..sub.len() {
            let left = if j > 0 { sub[j - 1] } else { 0.0 };
            let right = if j + 1 < sub.len() { sub[j + 1] } else { 0.0 };
            if sub[j] > left && sub[j] > right {
                let prominence = prominence(&sub, j);
                if prominence >= PEAK_PROMINENCE_FLOOR * global_max {
                    let i = start + 2 * j;
                    peaks.push(Peak {
                        k: field.k_min() + i as i64,
                        height: sub[j],
                        prominence,
                    });
                }
            }
        }
    }
    peaks.sort_by(|x, y| y.height.total_cmp(&x.height).then(x.k.cmp(&y.k)));

    let spacing = if occupied_classes == 1 { 2.0 } else { 1.0 };
    let width = participation_number(field) * spacing;
    let examined = ((width / q as f64).ceil() as usize).max(1).min(peaks.len());
    let qi = q as i64;
    let aligned = examined > 0
        && peaks[..examined].iter().all(|p| {
            let r = p.k.rem_euclid(qi);
            r <= 1 || r >= qi - 1
        });
    Ok(PeakReport {
        q,
        peaks,
        width,
        examined,
        aligned,
    })
}

/// Height above the higher of the two minima separating `j` from taller terrain.
fn prominence(values: &[f64], j: usize) -> f64 {
    let h = values[j];
    let mut left_min = h;
    let mut i = j;
    while i > 0 {
        i -= 1;
        if values[i] > h {
            break;
        }
        left_min = left_min.min(values[i]);
    }
    if i == 0 && values[0] <= h {
        left_min = left_min.min(0.0);
    }
    let mut right_min = h;
    let mut i = j;
    while i + 1 < values.len() {
        i += 1;
        if values[i] > h {
            break;
        }
        right_min = right_min.min(values[i]);
    }
    if i + 1 == values.len() && values[i] <= h {
        right_min = right_min.min(0.0);
    }
    h - left_min.max(right_min)
}
