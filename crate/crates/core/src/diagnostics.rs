//! Single-chain convergence diagnostics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minimum series length accepted by [`effective_sample_size`].
pub const MIN_ESS_DRAWS: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EssEstimate {
    pub ess: f64,
    /// Set when the series has (numerically) zero variance; `ess` is then
    /// reported as the series length.
    pub degenerate: bool,
}

/// Effective sample size via Geyer's initial positive sequence, with the
/// initial monotone correction. Capped at the series length.
pub fn effective_sample_size(draws: &[f64]) -> Result<EssEstimate> {
    let n = draws.len();
    if n < MIN_ESS_DRAWS {
        return Err(Error::InsufficientDraws {
            needed: MIN_ESS_DRAWS,
            have: n,
        });
    }
    let nf = n as f64;
    let mean = draws.iter().sum::<f64>() / nf;
    let centered: Vec<f64> = draws.iter().map(|x| x - mean).collect();
    let acov = |lag: usize| -> f64 {
        centered[..n - lag]
            .iter()
            .zip(&centered[lag..])
            .map(|(a, b)| a * b)
            .sum::<f64>()
            / nf
    };
    let c0 = acov(0);
    let scale = draws.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1.0);
    if c0.is_nan() || c0 <= (1e-14 * scale).powi(2) {
        log::warn!("effective sample size requested for a constant series");
        return Ok(EssEstimate {
            ess: nf,
            degenerate: true,
        });
    }

    let mut tau = -1.0;
    let mut prev_pair = f64::INFINITY;
    let mut lag = 0;
    while lag + 1 < n {
        let pair = (acov(lag) + acov(lag + 1)) / c0;
        if pair <= 0.0 {
            break;
        }
        let pair = pair.min(prev_pair);
        tau += 2.0 * pair;
        prev_pair = pair;
        lag += 2;
    }
    let ess = (nf / tau.max(1.0 / nf)).min(nf);
    Ok(EssEstimate { ess, degenerate: false })
}

/// Mann–Kendall trend statistic (normal approximation, no tie correction).
/// Large |z| indicates a monotone trend.
pub fn mann_kendall_z(series: &[f64]) -> f64 {
    let n = series.len();
    if n < 3 {
        return 0.0;
    }
    let mut s: i64 = 0;
    for i in 0..n - 1 {
        for j in i + 1..n {
            s += match series[j].partial_cmp(&series[i]) {
                Some(std::cmp::Ordering::Greater) => 1,
                Some(std::cmp::Ordering::Less) => -1,
                _ => 0,
            };
        }
    }
    let nf = n as f64;
    let var = nf * (nf - 1.0) * (2.0 * nf + 5.0) / 18.0;
    let s = s as f64;
    if s > 0.0 {
        (s - 1.0) / var.sqrt()
    } else if s < 0.0 {
        (s + 1.0) / var.sqrt()
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn white_noise_ess_near_n() {
        let mut rng = RngStream::new(1, 0);
        let xs: Vec<f64> = (0..10_000).map(|_| StandardNormal.sample(&mut rng)).collect();
        let e = effective_sample_size(&xs).unwrap();
        assert!(e.ess > 8_000.0 && e.ess <= 10_000.0, "{}", e.ess);
        assert!(!e.degenerate);
    }

    #[test]
    fn ar1_ess_matches_formula() {
        let mut rng = RngStream::new(2, 0);
        let n = 50_000;
        let phi = 0.9;
        let mut x = 0.0;
        let xs: Vec<f64> = (0..n)
            .map(|_| {
                let e: f64 = StandardNormal.sample(&mut rng);
                x = phi * x + e;
                x
            })
            .collect();
        let expected = n as f64 * (1.0 - phi) / (1.0 + phi);
        let e = effective_sample_size(&xs).unwrap().ess;
        assert!(e > expected / 1.5 && e < expected * 1.5, "{e} vs {expected}");
    }

    #[test]
    fn constant_series_is_degenerate() {
        let e = effective_sample_size(&[3.0; 500]).unwrap();
        assert!(e.degenerate);
        assert!(matches!(
            effective_sample_size(&[1.0; 10]),
            Err(Error::InsufficientDraws { .. })
        ));
    }

    #[test]
    fn mann_kendall_detects_trend() {
        let up: Vec<f64> = (0..200).map(|i| i as f64).collect();
        assert!(mann_kendall_z(&up) > 10.0);
        let mut rng = RngStream::new(3, 0);
        let noise: Vec<f64> = (0..500).map(|_| StandardNormal.sample(&mut rng)).collect();
        assert!(mann_kendall_z(&noise).abs() < 4.0);
    }
}
