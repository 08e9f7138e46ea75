//! Floquet eigenstates of the one-step map and their tight-binding form.
//!
//! A Floquet state with quasienergy w obeys
//!
//! ```text
//! f_k a_k = a_{k+1} + b_{k+1},    f_k b_k = a_{k-1} − b_{k-1},    f_k = √2 e^{i(2πΩk² − w)}
//! ```
//!
//! Substituting (α_k, β_k) = i^k f_k (a_k, b_k) decouples the chiralities into
//! three-term recursions g_k α_k = α_{k+1} + α_{k-1} and
//! g̃_k β_k = β_{k+1} + β_{k-1}, with g_k = i(f_{k+1} − f_k*) and
//! g̃_k = i(f_{k-1} − f_k*). Because g_k is complex, applying the α recursion
//! a second time and separating real and imaginary parts of g yields a real
//! five-diagonal equation
//!
//! ```text
//! T_k α_k + Σ_{0<|l−k|≤2} W_kl α_l = 0
//! ```
//!
//! with T and W built from g^r = Re g and g^i = Im g. This module builds all of
//! these objects and measures how well each stage of the chain holds.

use std::f64::consts::{SQRT_2, TAU};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Result, WalkError};
use crate::phase::{Omega, MAX_SITE};
use crate::state::ComplexValue;

/// Quasienergy reduced to [0, 2π).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct QuasiEnergy(f64);

impl QuasiEnergy {
    pub fn new(w: f64) -> Result<Self> {
        if !w.is_finite() {
            return Err(WalkError::Validation(format!("quasienergy must be finite, got {w}")));
        }
        let r = w.rem_euclid(TAU);
        Ok(QuasiEnergy(if r >= TAU { 0.0 } else { r }))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Which chirality component a second-order recursion describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Chirality {
    /// α, coupled through g_k.
    Left,
    /// β, coupled through g̃_k.
    Right,
}

/// Offsets l − k stored in each hopping band entry.
pub const BAND_OFFSETS: [i64; 4] = [-2, -1, 1, 2];

/// |g^i| below this everywhere makes the tight-binding form vacuous.
pub const DEGENERATE_IMAG: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct AndersonCoefficients {
    pub omega: Omega,
    pub w: QuasiEnergy,
    k_min: i64,
    pub f: Vec<ComplexValue>,
    pub g: Vec<ComplexValue>,
    pub g_tilde: Vec<ComplexValue>,
    /// Diagonal (kinetic) term T_k.
    pub kinetic: Vec<f64>,
    /// W_kl for l − k in [`BAND_OFFSETS`] order.
    pub hopping: Vec<[f64; 4]>,
    /// g has no imaginary part anywhere, so T and W vanish identically.
    pub degenerate: bool,
}

impl AndersonCoefficients {
    pub fn k_min(&self) -> i64 {
        self.k_min
    }

    pub fn k_max(&self) -> i64 {
        self.k_min + self.f.len() as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.f.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f.is_empty()
    }

    fn index(&self, k: i64) -> Option<usize> {
        (k >= self.k_min && k <= self.k_max()).then(|| (k - self.k_min) as usize)
    }

    pub fn kinetic_at(&self, k: i64) -> Option<f64> {
        self.index(k).map(|i| self.kinetic[i])
    }

    /// W_kl. Zero for l = k and for |l − k| > 2.
    pub fn hopping_at(&self, k: i64, l: i64) -> f64 {
        let Some(i) = self.index(k) else { return 0.0 };
        match BAND_OFFSETS.iter().position(|&d| d == l - k) {
            Some(j) => self.hopping[i][j],
            None => 0.0,
        }
    }

    fn coupling(&self, chirality: Chirality) -> &[ComplexValue] {
        match chirality {
            Chirality::Left => &self.g,
            Chirality::Right => &self.g_tilde,
        }
    }
}

/// f_k = √2 e^{i(2πΩk² − w)} with Ωk² reduced modulo one first.
pub fn floquet_factor(omega: &Omega, w: QuasiEnergy, k: i64) -> ComplexValue {
    let turns = omega.turns(k);
    let t = if turns >= 0.5 { turns - 1.0 } else { turns };
    let angle = TAU * t - w.value();
    let (s, c) = angle.sin_cos();
    Complex64::new(SQRT_2 * c, SQRT_2 * s)
}

/// Builds f, g, g̃, T and W on every site of [k_lo, k_hi].
pub fn coefficients(omega: Omega, w: QuasiEnergy, k_lo: i64, k_hi: i64) -> Result<AndersonCoefficients> {
    if k_hi - k_lo < 6 {
        return Err(WalkError::Validation(format!(
            "coefficient range [{k_lo}, {k_hi}] spans fewer than 7 sites"
        )));
    }
    if k_lo.abs() > MAX_SITE - 3 || k_hi.abs() > MAX_SITE - 3 {
        return Err(WalkError::Validation("coefficient range too large".into()));
    }
    const PAD: i64 = 2;
    let f_ext: Vec<ComplexValue> = (k_lo - PAD..=k_hi + PAD)
        .map(|k| floquet_factor(&omega, w, k))
        .collect();
    let n = (k_hi - k_lo + 1) as usize;
    let p = PAD as usize;
    // f_ext[i + p] is f at k_lo + i.
    let i = Complex64::i();
    let g_at = |e: usize| i * (f_ext[e + 1] - f_ext[e].conj());
    let gt_at = |e: usize| i * (f_ext[e - 1] - f_ext[e].conj());

    let f: Vec<ComplexValue> = f_ext[p..p + n].to_vec();
    // g on [k_lo − 1, k_hi + 1]
    let g_ext: Vec<ComplexValue> = (p - 1..p + n + 1).map(g_at).collect();
    let g: Vec<ComplexValue> = g_ext[1..1 + n].to_vec();
    let g_tilde: Vec<ComplexValue> = (p..p + n).map(gt_at).collect();

    let gr = |j: usize| g_ext[j].re;
    let gi = |j: usize| g_ext[j].im;
    let mut kinetic = Vec::with_capacity(n);
    let mut hopping = Vec::with_capacity(n);
    for s in 0..n {
        // g_ext index of site k is s + 1
        let (m, c, pl) = (s, s + 1, s + 2);
        kinetic.push(gi(c) * (gi(m) + gi(pl)) + gi(pl) * gi(m) * (gr(c) * gr(c) + gi(c) * gi(c)));
        // l = k − 2: g^i_{l+2} g^i_{l+3}
        let w_m2 = gi(c) * gi(pl);
        // l = k − 1: −g^i_{l+2} [g^r_l g^i_{l+1} + g^i_l g^r_{l+1}]
        let w_m1 = -gi(pl) * (gr(m) * gi(c) + gi(m) * gr(c));
        // l = k + 1: −g^i_{l−2} [g^r_l g^i_{l−1} + g^i_l g^r_{l−1}]
        let w_p1 = -gi(m) * (gr(pl) * gi(c) + gi(pl) * gr(c));
        // l = k + 2: g^i_{l−2} g^i_{l−3}
        let w_p2 = gi(c) * gi(m);
        hopping.push([w_m2, w_m1, w_p1, w_p2]);
    }
    let degenerate = g_ext.iter().all(|z| z.im.abs() < DEGENERATE_IMAG);
    Ok(AndersonCoefficients {
        omega,
        w,
        k_min: k_lo,
        f,
        g,
        g_tilde,
        kinetic,
        hopping,
        degenerate,
    })
}

/// Solution of the Floquet relations grown from a seed at k = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct FloquetPair {
    k_min: i64,
    pub a: Vec<ComplexValue>,
    pub b: Vec<ComplexValue>,
    pub w: QuasiEnergy,
    /// Largest relative violation of the two Floquet relations.
    pub residual: f64,
    /// Natural log of the factor divided out of the stored amplitudes.
    pub log_scale: f64,
    /// Mean logarithmic growth per site towards k_max and towards k_min.
    pub growth_up: f64,
    pub growth_down: f64,
}

impl FloquetPair {
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
}

/// Recursion steps between rescalings.
pub const RESCALE_EVERY: usize = 32;

/// Relative residual allowed on the Floquet relations themselves.
pub const FLOQUET_RESIDUAL_TOLERANCE: f64 = 1e-10;

fn rescale(a: &mut [ComplexValue], b: &mut [ComplexValue], log_scale: &mut f64) -> Result<()> {
    let m = a.iter().chain(b.iter()).map(|z| z.norm()).fold(0.0_f64, f64::max);
    if !m.is_finite() {
        return Err(WalkError::Numeric("Floquet recursion overflowed".into()));
    }
    if m > 0.0 {
        let inv = 1.0 / m;
        for z in a.iter_mut().chain(b.iter_mut()) {
            *z *= inv;
        }
        *log_scale += m.ln();
    }
    Ok(())
}

/// Grows (a_k, b_k) over [k_lo, k_hi] from `seed` = (a_0, b_0).
///
/// Upward: b_{k+1} = (a_k − b_k)/f_{k+1}, a_{k+1} = f_k a_k − b_{k+1}.
/// Downward: a_{k-1} = (a_k + b_k)/f_{k-1}, b_{k-1} = a_{k-1} − f_k b_k.
/// The whole array is divided by its largest magnitude every
/// [`RESCALE_EVERY`] steps, which leaves the linear relations intact.
pub fn floquet_recursion(
    omega: Omega,
    w: QuasiEnergy,
    seed: (ComplexValue, ComplexValue),
    k_lo: i64,
    k_hi: i64,
) -> Result<FloquetPair> {
    if seed.0.norm_sqr() + seed.1.norm_sqr() == 0.0 {
        return Err(WalkError::Validation("Floquet seed must not be zero".into()));
    }
    if !(seed.0.re.is_finite() && seed.0.im.is_finite() && seed.1.re.is_finite() && seed.1.im.is_finite()) {
        return Err(WalkError::Validation("Floquet seed must be finite".into()));
    }
    if k_lo > 0 || k_hi < 0 || k_hi - k_lo < 2 {
        return Err(WalkError::Validation(format!(
            "range [{k_lo}, {k_hi}] must contain the seed site 0 and span at least 3 sites"
        )));
    }
    if k_lo.abs() > MAX_SITE || k_hi.abs() > MAX_SITE {
        return Err(WalkError::Validation("recursion range too large".into()));
    }
    let n = (k_hi - k_lo + 1) as usize;
    let f: Vec<ComplexValue> = (k_lo..=k_hi).map(|k| floquet_factor(&omega, w, k)).collect();
    let zero = Complex64::new(0.0, 0.0);
    let mut a = vec![zero; n];
    let mut b = vec![zero; n];
    let origin = (-k_lo) as usize;
    a[origin] = seed.0;
    b[origin] = seed.1;
    let mut log_scale = 0.0;

    for (count, i) in (1..=origin).rev().enumerate() {
        a[i - 1] = (a[i] + b[i]) / f[i - 1];
        b[i - 1] = a[i - 1] - f[i] * b[i];
        if (count + 1) % RESCALE_EVERY == 0 {
            rescale(&mut a, &mut b, &mut log_scale)?;
        }
    }
    for (count, i) in (origin..n - 1).enumerate() {
        b[i + 1] = (a[i] - b[i]) / f[i + 1];
        a[i + 1] = f[i] * a[i] - b[i + 1];
        if (count + 1) % RESCALE_EVERY == 0 {
            rescale(&mut a, &mut b, &mut log_scale)?;
        }
    }
    rescale(&mut a, &mut b, &mut log_scale)?;

    let residual = floquet_residual(&f, &a, &b);
    if !(residual <= FLOQUET_RESIDUAL_TOLERANCE) {
        return Err(WalkError::Consistency(format!(
            "Floquet relations violated: relative residual {residual:e}"
        )));
    }
    let mag = |i: usize| a[i].norm().max(b[i].norm());
    let growth = |i: usize, dist: i64| {
        if dist == 0 || mag(origin) == 0.0 || mag(i) == 0.0 {
            f64::NAN
        } else {
            (mag(i) / mag(origin)).ln() / dist as f64
        }
    };
    let growth_up = growth(n - 1, k_hi);
    let growth_down = growth(0, -k_lo);
    Ok(FloquetPair {
        k_min: k_lo,
        a,
        b,
        w,
        residual,
        log_scale,
        growth_up,
        growth_down,
    })
}

/// Magnitudes this small are dominated by subnormal rounding and are skipped.
const TINY: f64 = 1e-280;

fn relative(num: f64, scale: f64, global: f64) -> Option<f64> {
    (scale > TINY * global.max(1.0) && scale > 0.0).then(|| num / scale)
}

/// Largest relative violation of f_k a_k = a_{k+1} + b_{k+1} and f_k b_k = a_{k-1} − b_{k-1}.
pub fn floquet_residual(f: &[ComplexValue], a: &[ComplexValue], b: &[ComplexValue]) -> f64 {
    let n = a.len();
    let global = a.iter().chain(b).map(|z| z.norm()).fold(0.0_f64, f64::max);
    let mut worst = 0.0_f64;
    for k in 0..n {
        if k + 1 < n {
            let lhs = f[k] * a[k];
            let scale = lhs.norm().max(a[k + 1].norm()).max(b[k + 1].norm());
            if let Some(r) = relative((lhs - a[k + 1] - b[k + 1]).norm(), scale, global) {
                worst = worst.max(r);
            }
        }
        if k > 0 {
            let lhs = f[k] * b[k];
            let scale = lhs.norm().max(a[k - 1].norm()).max(b[k - 1].norm());
            if let Some(r) = relative((lhs - a[k - 1] + b[k - 1]).norm(), scale, global) {
                worst = worst.max(r);
            }
        }
    }
    worst
}

/// Residual of a Floquet pair against the coefficients of the same (Ω, w).
pub fn pair_residual(pair: &FloquetPair, coeffs: &AndersonCoefficients) -> Result<f64> {
    check_range(pair.k_min, pair.len(), coeffs)?;
    Ok(floquet_residual(&coeffs.f, &pair.a, &pair.b))
}

fn check_range(k_min: i64, len: usize, coeffs: &AndersonCoefficients) -> Result<()> {
    if k_min != coeffs.k_min || len != coeffs.len() {
        return Err(WalkError::Validation(format!(
            "range mismatch: sequence starts at {k_min} with {len} sites, coefficients start at {} with {}",
            coeffs.k_min,
            coeffs.len()
        )));
    }
    Ok(())
}

fn i_pow(k: i64) -> Complex64 {
    match k.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// (α_k, β_k) = i^k f_k (a_k, b_k).
pub fn transform(pair: &FloquetPair, coeffs: &AndersonCoefficients) -> Result<(Vec<ComplexValue>, Vec<ComplexValue>)> {
    check_range(pair.k_min, pair.len(), coeffs)?;
    let factor = |idx: usize| i_pow(pair.k_min + idx as i64) * coeffs.f[idx];
    let alpha = pair.a.iter().enumerate().map(|(i, z)| factor(i) * z).collect();
    let beta = pair.b.iter().enumerate().map(|(i, z)| factor(i) * z).collect();
    Ok((alpha, beta))
}

/// Solution of the three-term recursion x_{k+1} = c_k x_k − x_{k-1}
/// started from x at the first two sites of the coefficient range.
pub fn propagate_second_order(
    coeffs: &AndersonCoefficients,
    chirality: Chirality,
    first: ComplexValue,
    second: ComplexValue,
) -> Vec<ComplexValue> {
    let c = coeffs.coupling(chirality);
    let n = coeffs.len();
    let mut x = Vec::with_capacity(n);
    x.push(first);
    if n > 1 {
        x.push(second);
    }
    for k in 1..n.saturating_sub(1) {
        let next = c[k] * x[k] - x[k - 1];
        x.push(next);
    }
    x
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    /// Site of the first entry in `per_site`.
    pub first_site: i64,
    pub per_site: Vec<f64>,
    pub max: f64,
    pub median: f64,
    /// Nothing to test: all-zero input or vanishing coefficients.
    pub degenerate: bool,
}

impl ResidualReport {
    fn from_sites(first_site: i64, per_site: Vec<f64>, degenerate: bool) -> Self {
        let max = per_site.iter().cloned().fold(0.0_f64, f64::max);
        let median = median(&per_site);
        ResidualReport {
            first_site,
            per_site,
            max,
            median,
            degenerate,
        }
    }

    /// Sites whose residual exceeds `threshold`.
    pub fn sites_above(&self, threshold: f64) -> Vec<i64> {
        self.per_site
            .iter()
            .enumerate()
            .filter(|(_, &r)| r > threshold)
            .map(|(i, _)| self.first_site + i as i64)
            .collect()
    }
}

fn median(v: &[f64]) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let m = s.len() / 2;
    if s.len() % 2 == 1 {
        s[m]
    } else {
        0.5 * (s[m - 1] + s[m])
    }
}

/// Per-site |c_k x_k − x_{k+1} − x_{k-1}| / max(|x_{k-1}|, |x_k|, |x_{k+1}|)
/// on interior sites, with c = g (left) or g̃ (right).
pub fn second_order_residual(
    x: &[ComplexValue],
    coeffs: &AndersonCoefficients,
    chirality: Chirality,
) -> Result<ResidualReport> {
    check_range(coeffs.k_min, x.len(), coeffs)?;
    if x.len() < 3 {
        return Err(WalkError::Validation("need at least 3 sites".into()));
    }
    let c = coeffs.coupling(chirality);
    let mut all_zero = true;
    let per_site = (1..x.len() - 1)
        .map(|k| {
            let scale = x[k - 1].norm().max(x[k].norm()).max(x[k + 1].norm());
            if scale == 0.0 {
                return 0.0;
            }
            all_zero = false;
            (c[k] * x[k] - x[k + 1] - x[k - 1]).norm() / scale
        })
        .collect();
    Ok(ResidualReport::from_sites(coeffs.k_min + 1, per_site, all_zero))
}

/// Per-site |T_k α_k + Σ W_kl α_l| / (|T_k α_k| + Σ |W_kl α_l|) on sites two
/// or more away from either end.
pub fn anderson_residual(alpha: &[ComplexValue], coeffs: &AndersonCoefficients) -> Result<ResidualReport> {
    check_range(coeffs.k_min, alpha.len(), coeffs)?;
    if alpha.len() < 7 {
        return Err(WalkError::Validation("need at least 7 sites".into()));
    }
    let n = alpha.len();
    let per_site = (2..n - 2)
        .map(|i| {
            let mut sum = coeffs.kinetic[i] * alpha[i];
            let mut scale = coeffs.kinetic[i].abs() * alpha[i].norm();
            for (j, &d) in BAND_OFFSETS.iter().enumerate() {
                let l = (i as i64 + d) as usize;
                let wkl = coeffs.hopping[i][j];
                sum += wkl * alpha[l];
                scale += wkl.abs() * alpha[l].norm();
            }
            if scale == 0.0 {
                0.0
            } else {
                sum.norm() / scale
            }
        })
        .collect();
    Ok(ResidualReport::from_sites(
        coeffs.k_min + 2,
        per_site,
        coeffs.degenerate,
    ))
}

/// Lag-`lag` autocorrelation: Pearson correlation of x[..n−lag] with x[lag..].
/// NaN when either segment is constant.
pub fn autocorrelation(x: &[f64], lag: usize) -> f64 {
    if x.len() < lag + 2 {
        return f64::NAN;
    }
    let (u, v) = (&x[..x.len() - lag], &x[lag..]);
    let m = u.len() as f64;
    let mu = u.iter().sum::<f64>() / m;
    let mv = v.iter().sum::<f64>() / m;
    let (mut suv, mut suu, mut svv) = (0.0, 0.0, 0.0);
    for (p, q) in u.iter().zip(v) {
        let (du, dv) = (p - mu, q - mv);
        suv += du * dv;
        suu += du * du;
        svv += dv * dv;
    }
    if suu == 0.0 || svv == 0.0 {
        return f64::NAN;
    }
    suv / (suu * svv).sqrt()
}

/// Smallest p ≤ `max_period` with x[k + p] == x[k] bitwise for every k.
pub fn exact_period(x: &[f64], max_period: usize) -> Option<usize> {
    (1..=max_period.min(x.len().saturating_sub(1)))
        .find(|&p| x.iter().zip(&x[p..]).all(|(u, v)| u.to_bits() == v.to_bits()))
}

/// Linear-interpolated quantile of sorted data, q in [0, 1].
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

pub const HISTOGRAM_BINS: usize = 32;

/// Below this the IQR is "narrow" relative to the total range (IQR < range / 4).
pub const NARROW_IQR_FRACTION: f64 = 0.25;

/// Below this |lag-1 autocorrelation| the sequence counts as pseudo-random.
pub const PSEUDO_RANDOM_AUTOCORRELATION: f64 = 0.3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KineticStatistics {
    pub n_sites: usize,
    pub k_first: i64,
    pub min: f64,
    pub max: f64,
    pub range: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub iqr: f64,
    pub lag1_autocorrelation: f64,
    /// (lower edge, upper edge, count) per bin.
    pub histogram: Vec<(f64, f64, usize)>,
    pub narrowly_peaked: bool,
    pub pseudo_random: bool,
    /// g has no imaginary part, so T vanishes identically.
    pub degenerate: bool,
    /// All T_k equal; the autocorrelation is then NaN.
    pub constant: bool,
    pub values: Vec<f64>,
}

/// Distribution of T_k over k = 0, …, n_sites − 1.
pub fn kinetic_statistics(omega: Omega, w: QuasiEnergy, n_sites: usize) -> Result<KineticStatistics> {
    if n_sites < 100 {
        return Err(WalkError::Validation(format!("need at least 100 sites, got {n_sites}")));
    }
    let coeffs = coefficients(omega, w, 0, n_sites as i64 - 1)?;
    let values = coeffs.kinetic.clone();
    let mut sorted = values.clone();
    sorted.sort_by(f64::total_cmp);
    let min = sorted[0];
    let max = sorted[n_sites - 1];
    let range = max - min;
    let q1 = quantile(&sorted, 0.25);
    let median = quantile(&sorted, 0.5);
    let q3 = quantile(&sorted, 0.75);
    let iqr = q3 - q1;
    let constant = range == 0.0;
    let lag1 = autocorrelation(&values, 1);

    let histogram = if constant {
        vec![(min, max, n_sites)]
    } else {
        let width = range / HISTOGRAM_BINS as f64;
        let mut counts = vec![0usize; HISTOGRAM_BINS];
        for &v in &values {
            let b = (((v - min) / width) as usize).min(HISTOGRAM_BINS - 1);
            counts[b] += 1;
        }
        counts
            .into_iter()
            .enumerate()
            .map(|(b, c)| (min + b as f64 * width, min + (b + 1) as f64 * width, c))
            .collect()
    };
    Ok(KineticStatistics {
        n_sites,
        k_first: 0,
        min,
        max,
        range,
        q1,
        median,
        q3,
        iqr,
        lag1_autocorrelation: lag1,
        histogram,
        narrowly_peaked: !constant && iqr < NARROW_IQR_FRACTION * range,
        pseudo_random: lag1.abs() < PSEUDO_RANDOM_AUTOCORRELATION,
        degenerate: coeffs.degenerate,
        constant,
        values,
    })
}
