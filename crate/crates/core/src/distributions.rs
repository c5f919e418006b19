//! Random variate generators used by the Gibbs kernels.
//!
//! Every sampler takes the generator by `&mut R` so a single [`RngStream`]
//! can be threaded through a sweep. Gamma-family parameters use the
//! shape–rate convention throughout (mean = shape / rate); the inverse-gamma
//! `scale` is the rate of the reciprocal Gamma.
//!
//! Outputs are clamped into `[f64::MIN_POSITIVE, f64::MAX]`, so extreme but
//! valid parameters never produce zero, infinity, or NaN.
//!
//! [`RngStream`]: crate::rng::RngStream

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma, StandardNormal};

use crate::error::{domain, Result};

/// Truncation point of the two-piece proposal for the Jacobi variable J*(1, z).
const PG_TRUNC: f64 = 0.64;

#[inline]
fn clamp_positive(x: f64) -> f64 {
    if x.is_nan() {
        f64::MIN_POSITIVE
    } else {
        x.clamp(f64::MIN_POSITIVE, f64::MAX)
    }
}

fn check_positive(name: &str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        domain(format!("{name} must be positive and finite, got {value}"))
    }
}

/// Parameters of a Pólya-Gamma law PG(shape, tilt).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolyaGammaParams {
    shape: f64,
    tilt: f64,
}

impl PolyaGammaParams {
    pub fn new(shape: f64, tilt: f64) -> Result<Self> {
        check_positive("Polya-Gamma shape", shape)?;
        if !tilt.is_finite() {
            return domain(format!("Polya-Gamma tilt must be finite, got {tilt}"));
        }
        Ok(Self { shape, tilt })
    }

    pub fn shape(&self) -> f64 {
        self.shape
    }

    /// Sign of the tilt is irrelevant; the law depends on `tilt²` only.
    pub fn tilt(&self) -> f64 {
        self.tilt.abs()
    }

    /// E[X] = shape · tanh(c/2) / (2c), with limit shape/4 at c = 0.
    pub fn mean(&self) -> f64 {
        let c = self.tilt.abs();
        if c < 1e-6 {
            // series: tanh(x)/x = 1 - x²/3 + ...
            self.shape * 0.25 * (1.0 - c * c / 12.0)
        } else {
            self.shape * (0.5 * c).tanh() / (2.0 * c)
        }
    }
}

/// log Φ(x) for the standard normal CDF, accurate in the far left tail.
pub(crate) fn log_normal_cdf(x: f64) -> f64 {
    if x > -30.0 {
        (0.5 * libm::erfc(-x * FRAC_1_SQRT_2)).ln()
    } else {
        // Mills-ratio asymptotic expansion
        let x2 = x * x;
        -0.5 * x2 - (-x * (2.0 * PI).sqrt()).ln() + (1.0 - 1.0 / x2 + 3.0 / (x2 * x2)).ln()
    }
}

#[cfg(test)]
pub(crate) fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// n-th term of the alternating series for the J*(1) density, piecewise at
/// the truncation point.
#[inline]
fn jacobi_term(n: u32, x: f64) -> f64 {
    let k = (n as f64 + 0.5) * PI;
    if x > PG_TRUNC {
        k * (-0.5 * k * k * x).exp()
    } else if x > 0.0 {
        let h = n as f64 + 0.5;
        (-1.5 * ((0.5 * PI).ln() + x.ln()) + k.ln() - 2.0 * h * h / x).exp()
    } else {
        0.0
    }
}

/// Probability of drawing from the exponential tail piece of the proposal.
fn exponential_piece_mass(z: f64) -> f64 {
    let t = PG_TRUNC;
    let fz = 0.125 * PI * PI + 0.5 * z * z;
    let root_inv_t = (1.0 / t).sqrt();
    let b = root_inv_t * (t * z - 1.0);
    let a = -root_inv_t * (t * z + 1.0);
    let x0 = fz.ln() + fz * t;
    let xb = x0 - z + log_normal_cdf(b);
    let xa = x0 + z + log_normal_cdf(a);
    let q_over_p = 4.0 / PI * (xb.exp() + xa.exp());
    1.0 / (1.0 + q_over_p)
}

/// Inverse-Gaussian IG(1/z, 1) truncated to (0, PG_TRUNC).
fn truncated_inverse_gaussian<R: Rng + ?Sized>(z: f64, rng: &mut R) -> f64 {
    let t = PG_TRUNC;
    let mu = 1.0 / z;
    if mu > t {
        // 1/chi²₁ truncated below t, corrected by the exponential tilt
        loop {
            let (mut e1, mut e2): (f64, f64) = (Exp1.sample(rng), Exp1.sample(rng));
            while e1 * e1 > 2.0 * e2 / t {
                e1 = Exp1.sample(rng);
                e2 = Exp1.sample(rng);
            }
            let d = 1.0 + e1 * t;
            let x = t / (d * d);
            let alpha = (-0.5 * z * z * x).exp();
            if rng.random::<f64>() <= alpha {
                return x;
            }
        }
    } else {
        loop {
            let x = inverse_gaussian_unchecked(mu, 1.0, rng);
            if x < t {
                return x;
            }
        }
    }
}

/// One exact draw from PG(1, tilt).
///
/// Uses the alternating-series rejection sampler on J*(1, |tilt|/2) with a
/// truncated inverse-Gaussian / exponential proposal, then rescales by 1/4.
pub fn sample_polya_gamma<R: Rng + ?Sized>(tilt: f64, rng: &mut R) -> f64 {
    let z = 0.5 * tilt.abs();
    let fz = 0.125 * PI * PI + 0.5 * z * z;
    let mass = exponential_piece_mass(z);
    loop {
        let x = if rng.random::<f64>() < mass {
            let e: f64 = Exp1.sample(rng);
            PG_TRUNC + e / fz
        } else {
            truncated_inverse_gaussian(z, rng)
        };
        let mut s = jacobi_term(0, x);
        let y = rng.random::<f64>() * s;
        let mut n = 0u32;
        loop {
            n += 1;
            if n % 2 == 1 {
                s -= jacobi_term(n, x);
                if y <= s {
                    return clamp_positive(0.25 * x);
                }
            } else {
                s += jacobi_term(n, x);
                if y > s {
                    break;
                }
            }
        }
    }
}

/// Michael–Schucany–Haas transform with the root-difference rewritten to
/// avoid cancellation when `mean / shape` is large.
#[inline]
fn inverse_gaussian_unchecked<R: Rng + ?Sized>(mean: f64, shape: f64, rng: &mut R) -> f64 {
    let n: f64 = StandardNormal.sample(rng);
    let y = n * n;
    let phi = mean * y / shape;
    // mean · (1 + φ/2 − ½√(φ² + 4φ)) == mean / (1 + φ/2 + ½√(φ² + 4φ))
    let x = if phi > 0.0 {
        mean / (1.0 + 0.5 * phi + 0.5 * phi * (1.0 + 4.0 / phi).sqrt())
    } else {
        mean
    };
    let u: f64 = rng.random();
    if u * (mean + x) <= mean {
        clamp_positive(x)
    } else {
        clamp_positive(mean * (mean / x))
    }
}

/// Inverse-Gaussian draw with the given mean and shape (λ).
pub fn sample_inverse_gaussian<R: Rng + ?Sized>(mean: f64, shape: f64, rng: &mut R) -> Result<f64> {
    check_positive("inverse-Gaussian mean", mean)?;
    check_positive("inverse-Gaussian shape", shape)?;
    Ok(inverse_gaussian_unchecked(mean, shape, rng))
}

/// Gamma draw, shape–rate convention.
pub fn sample_gamma<R: Rng + ?Sized>(shape: f64, rate: f64, rng: &mut R) -> Result<f64> {
    check_positive("gamma shape", shape)?;
    check_positive("gamma rate", rate)?;
    let dist =
        Gamma::new(shape, 1.0 / rate).map_err(|e| crate::Error::Domain(format!("gamma({shape}, {rate}): {e}")))?;
    Ok(clamp_positive(dist.sample(rng)))
}

/// Inverse-gamma draw: the reciprocal of Gamma(shape, rate = scale).
pub fn sample_inverse_gamma<R: Rng + ?Sized>(shape: f64, scale: f64, rng: &mut R) -> Result<f64> {
    let g = sample_gamma(shape, scale, rng)?;
    Ok(clamp_positive(1.0 / g))
}

/// Exponential draw with mean 1/rate.
pub fn sample_exponential<R: Rng + ?Sized>(rate: f64, rng: &mut R) -> Result<f64> {
    check_positive("exponential rate", rate)?;
    let e: f64 = Exp1.sample(rng);
    Ok(clamp_positive(e / rate))
}

/// Standard normal truncated to `[lo, hi]` (exact; Robert's mixed proposals).
fn standard_normal_truncated<R: Rng + ?Sized>(lo: f64, hi: f64, rng: &mut R) -> f64 {
    if lo <= 0.0 && hi >= 0.0 {
        if hi - lo >= (2.0 * PI).sqrt() {
            loop {
                let x: f64 = StandardNormal.sample(rng);
                if x >= lo && x <= hi {
                    return x;
                }
            }
        }
        loop {
            let x = lo + (hi - lo) * rng.random::<f64>();
            if rng.random::<f64>() <= (-0.5 * x * x).exp() {
                return x;
            }
        }
    }
    if hi < 0.0 {
        return -standard_normal_truncated(-hi, -lo, rng);
    }
    // 0 < lo < hi
    let alpha = 0.5 * (lo + (lo * lo + 4.0).sqrt());
    let uniform_ok = hi - lo < 2.0 / alpha;
    loop {
        if uniform_ok {
            let x = lo + (hi - lo) * rng.random::<f64>();
            if rng.random::<f64>() <= (0.5 * (lo * lo - x * x)).exp() {
                return x;
            }
        } else {
            let e: f64 = Exp1.sample(rng);
            let x = lo + e / alpha;
            if x <= hi && rng.random::<f64>() <= (-0.5 * (x - alpha) * (x - alpha)).exp() {
                return x;
            }
        }
    }
}

/// Normal(mean, sd²) restricted to `[lo, hi]`.
pub fn sample_truncated_normal<R: Rng + ?Sized>(mean: f64, sd: f64, lo: f64, hi: f64, rng: &mut R) -> Result<f64> {
    check_positive("normal sd", sd)?;
    if lo.is_nan() || hi.is_nan() || lo >= hi {
        return domain(format!("empty truncation interval [{lo}, {hi}]"));
    }
    let a = (lo - mean) / sd;
    let b = (hi - mean) / sd;
    Ok((mean + sd * standard_normal_truncated(a, b, rng)).clamp(lo, hi))
}
