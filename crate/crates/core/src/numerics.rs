//! Scalar math primitives shared by the rest of the crate: standard normal
//! density/distribution functions, truncated-normal moments, a bracketed
//! one-dimensional minimizer, central finite differences, and a seedable
//! deterministic random generator.
//!
//! Everything here is `f64`; the comparisons made elsewhere in the crate
//! (analytic formulas against numerical oracles) need headroom well below
//! experiment-level tolerances.

use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

/// 1 / sqrt(2*pi)
const INV_SQRT_2PI: f64 = 0.3989422804014326779399460599343819;
const SQRT_2: f64 = std::f64::consts::SQRT_2;
/// 2 / sqrt(pi)
const TWO_OVER_SQRT_PI: f64 = 1.1283791670955125738961589031215452;

/// Hazard ratios with alpha beyond this are reported as saturated rather
/// than returning a tail value the caller cannot distinguish from noise.
const HAZARD_ALPHA_MAX: f64 = 8.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("non-finite input {0}")]
    NonFiniteInput(f64),
    #[error("non-finite function value at x = {0}")]
    NonFiniteValue(f64),
    #[error("sigma must be positive and finite, got {0}")]
    InvalidSigma(f64),
    #[error("hazard ratio saturated: alpha = {0} exceeds {HAZARD_ALPHA_MAX}")]
    HazardSaturation(f64),
    #[error("invalid bracket [{lo}, {hi}]")]
    InvalidBracket { lo: f64, hi: f64 },
    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
    #[error("step size must be positive, got {0}")]
    InvalidStep(f64),
}

/// Mean and standard deviation of a Gaussian, in pre-activation units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianParams {
    mu: f64,
    sigma: f64,
}

impl GaussianParams {
    pub fn new(mu: f64, sigma: f64) -> Result<Self, NumericsError> {
        if !mu.is_finite() {
            return Err(NumericsError::NonFiniteInput(mu));
        }
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(NumericsError::InvalidSigma(sigma));
        }
        Ok(Self { mu, sigma })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

/// Standard normal density phi(x).
pub fn std_normal_pdf(x: f64) -> Result<f64, NumericsError> {
    if !x.is_finite() {
        return Err(NumericsError::NonFiniteInput(x));
    }
    Ok(INV_SQRT_2PI * (-0.5 * x * x).exp())
}

/// Standard normal distribution function Phi(x), via erfc.
///
/// Absolute error is below 1e-14 on the range exercised by the tests.
pub fn std_normal_cdf(x: f64) -> Result<f64, NumericsError> {
    if !x.is_finite() {
        return Err(NumericsError::NonFiniteInput(x));
    }
    let z = x / SQRT_2;
    if z >= 0.0 {
        Ok(1.0 - 0.5 * erfc(z))
    } else {
        Ok(0.5 * erfc(-z))
    }
}

/// Complementary error function for z >= 0.
///
/// Maclaurin series below 2.5, Lentz-evaluated continued fraction above.
fn erfc(z: f64) -> f64 {
    debug_assert!(z >= 0.0);
    if z < 2.5 {
        1.0 - erf_series(z)
    } else {
        erfc_continued_fraction(z)
    }
}

/// erf(z) = (2/sqrt(pi)) * sum_n (-1)^n z^(2n+1) / (n! (2n+1)), z in [0, 2.5).
fn erf_series(z: f64) -> f64 {
    let z2 = z * z;
    let mut term = z;
    let mut sum = z;
    let mut n = 1.0;
    loop {
        term *= -z2 / n;
        let contrib = term / (2.0 * n + 1.0);
        sum += contrib;
        if contrib.abs() < 1e-18 * sum.abs() + 1e-300 {
            break;
        }
        n += 1.0;
    }
    TWO_OVER_SQRT_PI * sum
}

/// erfc(z) = exp(-z^2)/sqrt(pi) * 1/(z + (1/2)/(z + 1/(z + (3/2)/(z + ...)))),
/// evaluated by backward recurrence; accurate to machine precision for
/// z >= 2.5.
fn erfc_continued_fraction(z: f64) -> f64 {
    const TERMS: u32 = 160;
    let mut f = z;
    for k in (1..=TERMS).rev() {
        f = z + (0.5 * k as f64) / f;
    }
    (-z * z).exp() / (std::f64::consts::PI.sqrt() * f)
}

/// phi(alpha) / (1 - Phi(alpha)), the truncated-normal hazard ratio.
///
/// The denominator is evaluated directly through the complementary tail so
/// it stays accurate for large alpha instead of cancelling against 1.
pub fn hazard_ratio(alpha: f64) -> Result<f64, NumericsError> {
    if !alpha.is_finite() {
        return Err(NumericsError::NonFiniteInput(alpha));
    }
    if alpha > HAZARD_ALPHA_MAX {
        return Err(NumericsError::HazardSaturation(alpha));
    }
    let tail = if alpha >= 0.0 {
        0.5 * erfc(alpha / SQRT_2)
    } else {
        1.0 - 0.5 * erfc(-alpha / SQRT_2)
    };
    Ok(std_normal_pdf(alpha)? / tail)
}

/// Mean of a normal distribution truncated below at `lower`:
/// mu + sigma * phi(alpha) / (1 - Phi(alpha)) with alpha = (lower - mu) / sigma.
pub fn truncated_normal_mean(params: GaussianParams, lower: f64) -> Result<f64, NumericsError> {
    if !lower.is_finite() {
        return Err(NumericsError::NonFiniteInput(lower));
    }
    let alpha = (lower - params.mu) / params.sigma;
    Ok(params.mu + params.sigma * hazard_ratio(alpha)?)
}

/// Minimize a scalar function over `[lo, hi]`.
///
/// A coarse scan over at least 201 grid points locates the best cell
/// before golden-section refinement; the scan guards against mild
/// non-unimodality in the loss curves this crate minimizes.
pub fn minimize_scalar<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64, NumericsError>
where
    F: Fn(f64) -> f64,
{
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(NumericsError::InvalidBracket { lo, hi });
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(NumericsError::InvalidTolerance(tol));
    }

    const GRID: usize = 201;
    let step = (hi - lo) / (GRID - 1) as f64;
    let mut best_idx = 0;
    let mut best_val = f64::INFINITY;
    for i in 0..GRID {
        let x = lo + step * i as f64;
        let v = f(x);
        if !v.is_finite() {
            return Err(NumericsError::NonFiniteValue(x));
        }
        if v < best_val {
            best_val = v;
            best_idx = i;
        }
    }

    let mut a = lo + step * best_idx.saturating_sub(1) as f64;
    let mut b = (lo + step * (best_idx + 1) as f64).min(hi);

    // golden-section refinement
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut iters = 0;
    while b - a > tol && iters < 300 {
        if !f1.is_finite() {
            return Err(NumericsError::NonFiniteValue(x1));
        }
        if !f2.is_finite() {
            return Err(NumericsError::NonFiniteValue(x2));
        }
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
        iters += 1;
    }
    Ok(0.5 * (a + b))
}

/// Central finite difference (f(x+h) - f(x-h)) / (2h).
pub fn finite_difference<F>(f: F, x: f64, h: f64) -> Result<f64, NumericsError>
where
    F: Fn(f64) -> f64,
{
    if !x.is_finite() {
        return Err(NumericsError::NonFiniteInput(x));
    }
    if !(h.is_finite() && h > 0.0) {
        return Err(NumericsError::InvalidStep(h));
    }
    let fp = f(x + h);
    let fm = f(x - h);
    if !fp.is_finite() {
        return Err(NumericsError::NonFiniteValue(x + h));
    }
    if !fm.is_finite() {
        return Err(NumericsError::NonFiniteValue(x - h));
    }
    Ok((fp - fm) / (2.0 * h))
}

/// Seedable deterministic random generator.
///
/// ChaCha8 keyed from the seed, so identical seeds give identical streams
/// on every platform. One generator per unit of work; never shared.
#[derive(Debug, Clone)]
pub struct Rng {
    seed: u64,
    inner: ChaCha8Rng,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Independent generator for a parallel unit of work; same seed,
    /// separate stream.
    pub fn derive(&self, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(self.seed);
        inner.set_stream(stream);
        Self {
            seed: self.seed,
            inner,
        }
    }

    /// Uniform draw in [lo, hi).
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.inner.random::<f64>()
    }

    pub fn standard_normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.inner)
    }

    pub fn normal(&mut self, mu: f64, sigma: f64) -> f64 {
        mu + sigma * self.standard_normal()
    }

    /// Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.inner.random_range(0..=i);
            items.swap(i, j);
        }
    }
}
