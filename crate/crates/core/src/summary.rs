//! Posterior point estimates, equal-tailed credible intervals, and the
//! zero/fusion decision flags.

use serde::{Deserialize, Serialize};

use crate::chain::Chain;
use crate::error::{Error, Result};

pub const SELECTION_LEVEL: f64 = 0.95;
pub const FUSION_LEVEL: f64 = 0.50;
pub const MIN_SUMMARY_DRAWS: usize = 100;

/// Type-7 sample quantile (linear interpolation between order statistics)
/// of already-sorted data.
fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Equal-tailed interval at quantiles (1−level)/2 and 1−(1−level)/2.
pub fn credible_interval(draws: &[f64], level: f64) -> Result<(f64, f64)> {
    if draws.len() < 2 {
        return Err(Error::InsufficientDraws {
            needed: 2,
            have: draws.len(),
        });
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::Domain(format!("credible level must lie in (0,1), got {level}")));
    }
    if draws.iter().any(|d| d.is_nan()) {
        return Err(Error::Domain("draws contain NaN".into()));
    }
    let mut sorted = draws.to_vec();
    sorted.sort_by(f64::total_cmp);
    let tail = 0.5 * (1.0 - level);
    Ok((quantile_sorted(&sorted, tail), quantile_sorted(&sorted, 1.0 - tail)))
}

fn contains_zero((lo, hi): (f64, f64)) -> bool {
    lo <= 0.0 && 0.0 <= hi
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PosteriorSummary {
    pub beta0_mean: f64,
    pub beta_mean: Vec<f64>,
    /// 95% intervals per coefficient.
    pub ci_beta: Vec<(f64, f64)>,
    /// 50% intervals of the draw-wise differences β_{j+1} − β_j.
    pub ci_diff: Vec<(f64, f64)>,
    /// true = coefficient judged non-zero (interval excludes 0).
    pub selected: Vec<bool>,
    /// true = difference judged non-zero (interval excludes 0).
    pub fused: Vec<bool>,
}

impl PosteriorSummary {
    pub fn n_zero(&self) -> usize {
        self.selected.iter().filter(|s| !**s).count()
    }

    /// Groups of adjacent coefficients separated by non-zero differences.
    pub fn n_groups(&self) -> usize {
        1 + self.fused.iter().filter(|f| **f).count()
    }
}

pub fn summarize(chain: &Chain) -> Result<PosteriorSummary> {
    summarize_at(chain, SELECTION_LEVEL, FUSION_LEVEL)
}

/// Summary with explicit interval levels for selection and fusion.
pub fn summarize_at(chain: &Chain, selection_level: f64, fusion_level: f64) -> Result<PosteriorSummary> {
    if chain.retained < MIN_SUMMARY_DRAWS || chain.beta_draws.len() < MIN_SUMMARY_DRAWS {
        return Err(Error::InsufficientDraws {
            needed: MIN_SUMMARY_DRAWS,
            have: chain.beta_draws.len(),
        });
    }
    let m = chain.beta_draws.len() as f64;
    let p = chain.p();
    let beta0_mean = chain.beta0_draws.iter().sum::<f64>() / m;
    let mut beta_mean = Vec::with_capacity(p);
    let mut ci_beta = Vec::with_capacity(p);
    for j in 0..p {
        let col = chain.beta_column(j);
        beta_mean.push(col.iter().sum::<f64>() / m);
        ci_beta.push(credible_interval(&col, selection_level)?);
    }
    let mut ci_diff = Vec::with_capacity(p.saturating_sub(1));
    for j in 1..p {
        let diffs: Vec<f64> = chain.beta_draws.iter().map(|row| row[j] - row[j - 1]).collect();
        ci_diff.push(credible_interval(&diffs, fusion_level)?);
    }
    let selected = ci_beta.iter().map(|ci| !contains_zero(*ci)).collect();
    let fused = ci_diff.iter().map(|ci| !contains_zero(*ci)).collect();
    Ok(PosteriorSummary {
        beta0_mean,
        beta_mean,
        ci_beta,
        ci_diff,
        selected,
        fused,
    })
}
