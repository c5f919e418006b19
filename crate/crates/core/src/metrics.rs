//! Estimation, prediction, selection, and fusion measures, plus ROC and
//! precision–recall areas.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::data::{softplus, Dataset};
use crate::error::{Error, Result};
use crate::summary::PosteriorSummary;

/// Point estimates and decision flags from one replication.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplicationResult {
    pub beta0_hat: f64,
    pub beta_hat: Vec<f64>,
    pub selected: Vec<bool>,
    pub fused_nonzero: Vec<bool>,
}

impl From<&PosteriorSummary> for ReplicationResult {
    fn from(s: &PosteriorSummary) -> Self {
        Self {
            beta0_hat: s.beta0_mean,
            beta_hat: s.beta_mean.clone(),
            selected: s.selected.clone(),
            fused_nonzero: s.fused.clone(),
        }
    }
}

/// Mean and sample standard deviation over replications.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanSd {
    pub mean: f64,
    pub sd: f64,
}

impl MeanSd {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let sd = if values.len() > 1 {
            (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Self { mean, sd }
    }
}

/// A rate whose denominator class may be empty (then `None`, i.e. undefined).
pub type Rate = Option<MeanSd>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricTable {
    pub mse: MeanSd,
    /// Per-test-point negative log-likelihood.
    pub el: MeanSd,
    /// Same quantity summed over the test set.
    pub el_sum: MeanSd,
    pub pv: Rate,
    pub pzv: Rate,
    pub av: MeanSd,
    pub pf: Rate,
    pub pnf: Rate,
    pub af: MeanSd,
    pub completed: usize,
    pub failed: usize,
}

fn check_dims(results: &[ReplicationResult], beta_star: &[f64]) -> Result<()> {
    if results.is_empty() {
        return Err(Error::Dimension("no replication results".into()));
    }
    let p = beta_star.len();
    for (k, r) in results.iter().enumerate() {
        if r.beta_hat.len() != p || r.selected.len() != p || r.fused_nonzero.len() + 1 != p {
            return Err(Error::Dimension(format!(
                "replication {k} has p={} but truth has p={p}",
                r.beta_hat.len()
            )));
        }
    }
    Ok(())
}

/// Per replication: β̂₀² + ‖β̂ − β*‖².
pub fn squared_error(result: &ReplicationResult, beta_star: &[f64]) -> f64 {
    result.beta0_hat * result.beta0_hat
        + result
            .beta_hat
            .iter()
            .zip(beta_star)
            .map(|(b, t)| (b - t) * (b - t))
            .sum::<f64>()
}

pub fn mse(results: &[ReplicationResult], beta_star: &[f64]) -> Result<MeanSd> {
    check_dims(results, beta_star)?;
    let v: Vec<f64> = results.iter().map(|r| squared_error(r, beta_star)).collect();
    Ok(MeanSd::of(&v))
}

/// −(1/m) Σⱼ [yⱼ ηⱼ − log(1 + exp ηⱼ)] over the test set, ηⱼ = β̂₀ + xⱼᵀβ̂.
pub fn expected_neg_loglik(result: &ReplicationResult, test: &Dataset) -> Result<f64> {
    if result.beta_hat.len() != test.p() {
        return Err(Error::Dimension(format!(
            "estimate has p={} but test data has p={}",
            result.beta_hat.len(),
            test.p()
        )));
    }
    let m = test.n() as f64;
    let total: f64 = test
        .x()
        .row_iter()
        .zip(test.y())
        .map(|(row, &y)| {
            let eta = result.beta0_hat + row.iter().zip(&result.beta_hat).map(|(a, b)| a * b).sum::<f64>();
            y as f64 * eta - softplus(eta)
        })
        .sum();
    Ok(-total / m)
}

/// Share of the `class` members whose decision is `correct`, per replication.
fn class_rate(
    results: &[ReplicationResult],
    class: &[bool],
    correct: impl Fn(&ReplicationResult, usize) -> bool,
) -> Rate {
    let size = class.iter().filter(|c| **c).count();
    if size == 0 {
        return None;
    }
    let per: Vec<f64> = results
        .iter()
        .map(|r| class.iter().enumerate().filter(|(j, c)| **c && correct(r, *j)).count() as f64 / size as f64)
        .collect();
    Some(MeanSd::of(&per))
}

fn overall_rate(
    results: &[ReplicationResult],
    truth_nonzero: &[bool],
    decided_nonzero: impl Fn(&ReplicationResult, usize) -> bool,
) -> MeanSd {
    let per: Vec<f64> = results
        .iter()
        .map(|r| {
            truth_nonzero
                .iter()
                .enumerate()
                .filter(|(j, t)| **t == decided_nonzero(r, *j))
                .count() as f64
                / truth_nonzero.len() as f64
        })
        .collect();
    MeanSd::of(&per)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rates {
    /// Correct on the truly non-zero class.
    pub positive: Rate,
    /// Correct on the truly zero class.
    pub zero: Rate,
    pub overall: MeanSd,
}

/// PV, PZV, AV from each replication's selection flags.
pub fn selection_rates(results: &[ReplicationResult], beta_star: &[f64]) -> Result<Rates> {
    check_dims(results, beta_star)?;
    let nonzero: Vec<bool> = beta_star.iter().map(|b| *b != 0.0).collect();
    let zero: Vec<bool> = nonzero.iter().map(|b| !b).collect();
    Ok(Rates {
        positive: class_rate(results, &nonzero, |r, j| r.selected[j]),
        zero: class_rate(results, &zero, |r, j| !r.selected[j]),
        overall: overall_rate(results, &nonzero, |r, j| r.selected[j]),
    })
}

/// PF, PNF, AF over the p−1 adjacent differences.
pub fn fusion_rates(results: &[ReplicationResult], beta_star: &[f64]) -> Result<Rates> {
    check_dims(results, beta_star)?;
    let nonzero: Vec<bool> = beta_star.windows(2).map(|w| w[1] - w[0] != 0.0).collect();
    let zero: Vec<bool> = nonzero.iter().map(|b| !b).collect();
    Ok(Rates {
        positive: class_rate(results, &nonzero, |r, j| r.fused_nonzero[j]),
        zero: class_rate(results, &zero, |r, j| !r.fused_nonzero[j]),
        overall: overall_rate(results, &nonzero, |r, j| r.fused_nonzero[j]),
    })
}

/// Assemble the full table from replication results and per-replication
/// per-point EL values (`el[k]` scored on replication k's test set of size
/// `test_size`).
pub fn metric_table(
    results: &[ReplicationResult],
    el: &[f64],
    test_size: usize,
    beta_star: &[f64],
    failed: usize,
) -> Result<MetricTable> {
    if el.len() != results.len() {
        return Err(Error::Dimension("one EL value per replication required".into()));
    }
    let sel = selection_rates(results, beta_star)?;
    let fus = fusion_rates(results, beta_star)?;
    let el_sum: Vec<f64> = el.iter().map(|v| v * test_size as f64).collect();
    Ok(MetricTable {
        mse: mse(results, beta_star)?,
        el: MeanSd::of(el),
        el_sum: MeanSd::of(&el_sum),
        pv: sel.positive,
        pzv: sel.zero,
        av: sel.overall,
        pf: fus.positive,
        pnf: fus.zero,
        af: fus.overall,
        completed: results.len(),
        failed,
    })
}

fn check_scores(scores: &[f64], labels: &[u8]) -> Result<()> {
    if scores.len() != labels.len() {
        return Err(Error::Dimension(format!(
            "{} scores but {} labels",
            scores.len(),
            labels.len()
        )));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::Domain("scores contain NaN".into()));
    }
    Ok(())
}

/// Indices sorted by descending score, grouped into runs of tied scores.
fn tie_groups_descending(scores: &[f64]) -> Vec<Vec<usize>> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).unwrap_or(Ordering::Equal));
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for i in idx {
        match groups.last_mut() {
            Some(g) if scores[g[0]] == scores[i] => g.push(i),
            _ => groups.push(vec![i]),
        }
    }
    groups
}

/// P(score of a random positive > score of a random negative), ties ½.
pub fn auc(scores: &[f64], labels: &[u8]) -> Result<f64> {
    check_scores(scores, labels)?;
    let pos = labels.iter().filter(|&&l| l == 1).count();
    let neg = labels.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::Domain("AUC needs both classes present".into()));
    }
    // sweep from the highest score down; each negative beats nothing above it
    let mut wins = 0.0;
    let mut pos_above = 0usize;
    for g in tie_groups_descending(scores) {
        let gp = g.iter().filter(|&&i| labels[i] == 1).count();
        let gn = g.len() - gp;
        wins += gn as f64 * (pos_above as f64 + 0.5 * gp as f64);
        pos_above += gp;
    }
    Ok(wins / (pos as f64 * neg as f64))
}

/// Area under the precision–recall curve.
///
/// Thresholds are swept over the distinct scores from high to low; each
/// achieved (recall, precision) point is joined to the next by a trapezoid,
/// and the curve starts at (0, precision of the first threshold).
pub fn pr_auc(scores: &[f64], labels: &[u8]) -> Result<f64> {
    check_scores(scores, labels)?;
    let pos = labels.iter().filter(|&&l| l == 1).count();
    if pos == 0 {
        return Err(Error::Domain("PR-AUC needs at least one positive".into()));
    }
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut prev: Option<(f64, f64)> = None;
    let mut area = 0.0;
    for g in tie_groups_descending(scores) {
        let gp = g.iter().filter(|&&i| labels[i] == 1).count();
        tp += gp;
        fp += g.len() - gp;
        let recall = tp as f64 / pos as f64;
        let precision = tp as f64 / (tp + fp) as f64;
        let (r0, p0) = prev.unwrap_or((0.0, precision));
        area += (recall - r0) * 0.5 * (precision + p0);
        prev = Some((recall, precision));
    }
    Ok(area)
}
