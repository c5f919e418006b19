//! Synthetic designs and replicated experiments.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::{run_chain_on_stream, HyperConfig};
use crate::data::{predict_prob, Dataset};
use crate::error::{Error, Result};
use crate::gibbs::ModelKind;
use crate::metrics::{expected_neg_loglik, metric_table, MetricTable, ReplicationResult};
use crate::rng::{stream_id_for, RngStream};
use crate::summary::summarize;

const ROLE_TRAIN: u64 = 0;
const ROLE_TEST: u64 = 1;
const ROLE_CHAIN: u64 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BetaVariant {
    B1,
    B2,
    B4,
}

impl FromStr for BetaVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "b1" | "1" => Ok(BetaVariant::B1),
            "b2" | "2" => Ok(BetaVariant::B2),
            "b4" | "4" => Ok(BetaVariant::B4),
            other => Err(Error::Config(format!("unknown beta variant '{other}' (b1, b2, b4)"))),
        }
    }
}

impl fmt::Display for BetaVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BetaVariant::B1 => "b1",
            BetaVariant::B2 => "b2",
            BetaVariant::B4 => "b4",
        })
    }
}

/// One simulation setting.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseSpec {
    pub case_id: u8,
    pub beta_variant: BetaVariant,
    pub rho: f64,
    pub n: usize,
    pub replications: usize,
    pub test_size: usize,
    pub seed: u64,
}

impl CaseSpec {
    /// Full-scale defaults for a case: n = 500 (Cases 1–3) or 300 (Case 4),
    /// 100 replications, 1000 test points.
    pub fn standard(case_id: u8, beta_variant: BetaVariant, rho: f64, seed: u64) -> Self {
        Self {
            case_id,
            beta_variant,
            rho,
            n: if case_id == 4 { 300 } else { 500 },
            replications: 100,
            test_size: 1000,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=4).contains(&self.case_id) {
            return Err(Error::Config(format!("case id must be 1-4, got {}", self.case_id)));
        }
        if (self.case_id == 4) != (self.beta_variant == BetaVariant::B4) {
            return Err(Error::Config(format!(
                "beta variant {} is not valid with case {}",
                self.beta_variant, self.case_id
            )));
        }
        if self.case_id == 1 && !(0.0..1.0).contains(&self.rho) {
            return Err(Error::Config(format!("rho must lie in [0, 1), got {}", self.rho)));
        }
        if self.n == 0 || self.replications == 0 || self.test_size == 0 {
            return Err(Error::Config("n, replications and test_size must be positive".into()));
        }
        Ok(())
    }
}

/// Chain-length and replication presets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    /// 10 replications, 4000 iterations, 2000 burn-in.
    Desk,
    /// 100 replications, 10000 iterations, 6000 burn-in.
    Paper,
}

impl Preset {
    pub fn replications(self) -> usize {
        match self {
            Preset::Desk => 10,
            Preset::Paper => 100,
        }
    }

    pub fn iterations_burnin(self) -> (usize, usize) {
        match self {
            Preset::Desk => (4000, 2000),
            Preset::Paper => (10_000, 6000),
        }
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "desk" => Ok(Preset::Desk),
            "paper" => Ok(Preset::Paper),
            other => Err(Error::Config(format!("unknown preset '{other}' (desk, paper)"))),
        }
    }
}

fn blocks(parts: &[(f64, usize)]) -> Vec<f64> {
    parts.iter().flat_map(|&(v, k)| std::iter::repeat_n(v, k)).collect()
}

/// True coefficient vector for a case/variant combination.
pub fn make_beta_star(case_id: u8, variant: BetaVariant) -> Result<Vec<f64>> {
    match (case_id, variant) {
        (1..=3, BetaVariant::B1) => Ok(blocks(&[(1.0, 5), (0.0, 5), (1.0, 5), (0.0, 5)])),
        (1..=3, BetaVariant::B2) => Ok(blocks(&[(-1.0, 5), (2.0, 5), (1.0, 5), (0.0, 5)])),
        (4, BetaVariant::B4) => Ok(blocks(&[(1.0, 20), (-1.0, 20), (0.0, 170), (1.5, 20), (0.0, 170)])),
        _ => Err(Error::Config(format!(
            "beta variant {variant} is not valid with case {case_id}"
        ))),
    }
}

/// Covariance of the covariates.
pub fn make_sigma(case_id: u8, beta_star: &[f64], rho: f64) -> Result<DMatrix<f64>> {
    let p = beta_star.len();
    let within_block = |i: usize, j: usize| {
        let d = i.abs_diff(j);
        beta_star[i] == beta_star[j] && (1..=4).contains(&d)
    };
    let sigma = match case_id {
        1 => DMatrix::from_fn(p, p, |i, j| if i == j { 1.0 } else { rho }),
        2 => DMatrix::from_fn(p, p, |i, j| {
            if i == j {
                1.0
            } else if within_block(i, j) {
                0.5
            } else {
                0.0
            }
        }),
        3 => DMatrix::from_fn(p, p, |i, j| {
            if i == j {
                1.0
            } else if within_block(i, j) {
                0.5f64.powi(i.abs_diff(j) as i32)
            } else {
                0.0
            }
        }),
        4 => DMatrix::identity(p, p),
        other => return Err(Error::Config(format!("case id must be 1-4, got {other}"))),
    };
    if sigma.clone().cholesky().is_none() {
        return Err(Error::NotPositiveDefinite);
    }
    Ok(sigma)
}

fn draw_dataset<R: Rng + ?Sized>(chol_l: &DMatrix<f64>, beta_star: &[f64], n: usize, rng: &mut R) -> Result<Dataset> {
    let p = beta_star.len();
    let z = DMatrix::from_fn(p, n, |_, _| StandardNormal.sample(rng));
    let x = (chol_l * z).transpose();
    let y = x
        .row_iter()
        .map(|row| {
            let prob = predict_prob(0.0, beta_star, row.transpose().as_slice());
            (rng.random::<f64>() < prob) as u8
        })
        .collect();
    Dataset::new(x, y)
}

/// Train and test sets for one replication. Deterministic in
/// `(spec.seed, replication)`; train and test use disjoint streams.
pub fn generate_dataset(spec: &CaseSpec, replication: usize) -> Result<(Dataset, Dataset)> {
    spec.validate()?;
    let beta_star = make_beta_star(spec.case_id, spec.beta_variant)?;
    let sigma = make_sigma(spec.case_id, &beta_star, spec.rho)?;
    let l = sigma.cholesky().ok_or(Error::NotPositiveDefinite)?.unpack();
    let mut train_rng = RngStream::substream(spec.seed, &[replication as u64, ROLE_TRAIN]);
    let mut test_rng = RngStream::substream(spec.seed, &[replication as u64, ROLE_TEST]);
    let train = draw_dataset(&l, &beta_star, spec.n, &mut train_rng)?;
    let test = draw_dataset(&l, &beta_star, spec.test_size, &mut test_rng)?;
    Ok((train, test))
}

/// Design drawn from an explicit coefficient vector with identity covariance;
/// used for the null-signal check.
pub fn generate_from_beta(beta_star: &[f64], n: usize, seed: u64) -> Result<Dataset> {
    let l = DMatrix::identity(beta_star.len(), beta_star.len());
    draw_dataset(&l, beta_star, n, &mut RngStream::new(seed, 0))
}

/// Stream used for the chain of one replication.
pub fn chain_stream_id(replication: usize) -> u64 {
    stream_id_for(&[replication as u64, ROLE_CHAIN])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplicationOutcome {
    pub replication: usize,
    pub result: ReplicationResult,
    /// Per-point negative log-likelihood on the replication's test set.
    pub el: f64,
    pub pd_retries: usize,
}

pub fn run_replication(
    spec: &CaseSpec,
    model: ModelKind,
    hyper: &HyperConfig,
    replication: usize,
) -> Result<ReplicationOutcome> {
    let (train, test) = generate_dataset(spec, replication)?;
    let chain_hyper = HyperConfig {
        seed: spec.seed,
        ..*hyper
    };
    let chain = run_chain_on_stream(model, &train, &chain_hyper, chain_stream_id(replication))?;
    let summary = summarize(&chain)?;
    let result = ReplicationResult::from(&summary);
    let el = expected_neg_loglik(&result, &test)?;
    Ok(ReplicationOutcome {
        replication,
        result,
        el,
        pd_retries: chain.pd_retry_count,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub spec: CaseSpec,
    pub model: ModelKind,
    pub table: MetricTable,
    pub outcomes: Vec<ReplicationOutcome>,
    /// (replication, error message) for replications that aborted.
    pub failures: Vec<(usize, String)>,
}

/// All replications for one model, run in parallel, aggregated into a table.
pub fn run_experiment(spec: &CaseSpec, model: ModelKind, hyper: &HyperConfig) -> Result<ExperimentReport> {
    spec.validate()?;
    hyper.validate()?;
    let beta_star = make_beta_star(spec.case_id, spec.beta_variant)?;
    let runs: Vec<(usize, Result<ReplicationOutcome>)> = (0..spec.replications)
        .into_par_iter()
        .map(|k| (k, run_replication(spec, model, hyper, k)))
        .collect();

    let mut outcomes = Vec::new();
    let mut failures = Vec::new();
    for (k, r) in runs {
        match r {
            Ok(o) => outcomes.push(o),
            Err(e) => {
                log::error!("replication {k} of {model} failed: {e}");
                failures.push((k, e.to_string()));
            }
        }
    }
    if outcomes.is_empty() {
        return Err(Error::Config(format!("all {} replications failed", spec.replications)));
    }
    let results: Vec<ReplicationResult> = outcomes.iter().map(|o| o.result.clone()).collect();
    let el: Vec<f64> = outcomes.iter().map(|o| o.el).collect();
    let table = metric_table(&results, &el, spec.test_size, &beta_star, failures.len())?;
    Ok(ExperimentReport {
        spec: *spec,
        model,
        table,
        outcomes,
        failures,
    })
}

/// Sample covariance of the design's columns.
pub fn sample_covariance(x: &DMatrix<f64>) -> DMatrix<f64> {
    let n = x.nrows() as f64;
    let means = DVector::from_iterator(x.ncols(), x.column_iter().map(|c| c.sum() / n));
    let mut centered = x.clone();
    for (mut col, m) in centered.column_iter_mut().zip(means.iter()) {
        col.add_scalar_mut(-m);
    }
    centered.tr_mul(&centered) / (n - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beta_star_shapes() {
        let b1 = make_beta_star(1, BetaVariant::B1).unwrap();
        assert_eq!(b1.len(), 20);
        assert_eq!(b1.iter().filter(|b| **b != 0.0).count(), 10);
        let b4 = make_beta_star(4, BetaVariant::B4).unwrap();
        assert_eq!(b4.len(), 400);
        assert_eq!(b4.iter().filter(|b| **b != 0.0).count(), 60);
        let b2 = make_beta_star(2, BetaVariant::B2).unwrap();
        let jumps: Vec<usize> = (1..20).filter(|&j| b2[j] != b2[j - 1]).collect();
        assert_eq!(jumps, vec![5, 10, 15]);
        assert!(make_beta_star(1, BetaVariant::B4).is_err());
        assert!(make_beta_star(4, BetaVariant::B1).is_err());
    }

    #[test]
    fn sigma_cases() {
        let b1 = make_beta_star(1, BetaVariant::B1).unwrap();
        assert_eq!(make_sigma(1, &b1, 0.0).unwrap(), DMatrix::identity(20, 20));
        let s = make_sigma(1, &[1.0, 1.0, 1.0], 0.5).unwrap();
        assert_eq!(
            s,
            DMatrix::from_row_slice(3, 3, &[1.0, 0.5, 0.5, 0.5, 1.0, 0.5, 0.5, 0.5, 1.0])
        );
        let s3 = make_sigma(3, &b1, 0.0).unwrap();
        assert_eq!(s3[(0, 2)], 0.25);
        assert_eq!(s3[(4, 5)], 0.0);
        let s2 = make_sigma(2, &b1, 0.0).unwrap();
        assert_eq!(s2[(0, 4)], 0.5);
        assert_eq!(s2[(4, 5)], 0.0);
        // zero blocks 5..10 and 15..20 are equal-valued but farther than 4 apart
        assert_eq!(s2[(9, 15)], 0.0);
        assert!(matches!(
            make_sigma(1, &[0.0; 3], -0.9),
            Err(Error::NotPositiveDefinite)
        ));
    }

    #[test]
    fn sigma_structure_invariants() {
        for (case, v) in [
            (1, BetaVariant::B1),
            (2, BetaVariant::B1),
            (2, BetaVariant::B2),
            (3, BetaVariant::B2),
            (4, BetaVariant::B4),
        ] {
            let b = make_beta_star(case, v).unwrap();
            let s = make_sigma(case, &b, 0.5).unwrap();
            assert_eq!(s, s.transpose());
            assert!((0..b.len()).all(|i| s[(i, i)] == 1.0));
            if case == 2 || case == 3 {
                for i in 0..b.len() {
                    for j in 0..b.len() {
                        if i.abs_diff(j) > 4 {
                            assert_eq!(s[(i, j)], 0.0);
                        }
                        // Toeplitz within a constant block
                        if i + 1 < b.len() && j + 1 < b.len() && b[i] == b[i + 1] && b[j] == b[j + 1] && b[i] == b[j] {
                            assert_eq!(s[(i, j)], s[(i + 1, j + 1)]);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn spec_validation() {
        let mut s = CaseSpec::standard(1, BetaVariant::B1, 0.0, 1);
        assert!(s.validate().is_ok());
        s.case_id = 5;
        assert!(s.validate().is_err());
        let s = CaseSpec::standard(4, BetaVariant::B1, 0.0, 1);
        assert!(s.validate().is_err());
        let s = CaseSpec::standard(1, BetaVariant::B1, 1.0, 1);
        assert!(s.validate().is_err());
        assert_eq!(CaseSpec::standard(4, BetaVariant::B4, 0.0, 1).n, 300);
    }

    #[test]
    fn datasets_deterministic_and_disjoint() {
        let spec = CaseSpec {
            n: 50,
            test_size: 50,
            ..CaseSpec::standard(1, BetaVariant::B1, 0.0, 9)
        };
        let (a, b) = generate_dataset(&spec, 3).unwrap();
        let (c, d) = generate_dataset(&spec, 3).unwrap();
        assert_eq!(a, c);
        assert_eq!(b, d);
        assert_ne!(a.x(), b.x());
        let (e, _) = generate_dataset(&spec, 4).unwrap();
        assert_ne!(a, e);
    }

    #[test]
    fn null_signal_is_balanced() {
        let d = generate_from_beta(&[0.0; 3], 10_000, 5).unwrap();
        assert!((d.positive_fraction() - 0.5).abs() < 0.015);
    }

    #[test]
    fn case1_covariance_concentrates() {
        let spec = CaseSpec::standard(1, BetaVariant::B1, 0.0, 11);
        let (train, _) = generate_dataset(&spec, 0).unwrap();
        let cov = sample_covariance(train.x());
        let sigma = make_sigma(1, &make_beta_star(1, BetaVariant::B1).unwrap(), 0.0).unwrap();
        assert!((cov - sigma).abs().max() < 0.15);
    }

    #[test]
    fn presets() {
        assert_eq!(Preset::Desk.replications(), 10);
        assert_eq!(Preset::Paper.iterations_burnin(), (10_000, 6000));
        assert!("quick".parse::<Preset>().is_err());
    }
}
