//! Binary-response datasets and the logistic likelihood.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Design matrix (rows are observations) and 0/1 response.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    x: DMatrix<f64>,
    y: Vec<u8>,
}

impl Dataset {
    /// Requires `n >= 1`, `p >= 2`, matching lengths, and a 0/1 response.
    pub fn new(x: DMatrix<f64>, y: Vec<u8>) -> Result<Self> {
        if x.nrows() == 0 {
            return Err(Error::Dimension("dataset needs at least one row".into()));
        }
        if x.ncols() < 2 {
            return Err(Error::Dimension(format!(
                "fusion needs at least two covariates, got {}",
                x.ncols()
            )));
        }
        if x.nrows() != y.len() {
            return Err(Error::Dimension(format!(
                "design has {} rows but response has {} entries",
                x.nrows(),
                y.len()
            )));
        }
        if let Some(i) = y.iter().position(|&v| v > 1) {
            return Err(Error::Domain(format!("response[{i}] = {} is not 0/1", y[i])));
        }
        if let Some(v) = x.iter().find(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("design contains non-finite value {v}")));
        }
        Ok(Self { x, y })
    }

    pub fn from_rows(rows: &[Vec<f64>], y: Vec<u8>) -> Result<Self> {
        let n = rows.len();
        let p = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != p) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        let x = DMatrix::from_fn(n, p, |i, j| rows[i][j]);
        Self::new(x, y)
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn y(&self) -> &[u8] {
        &self.y
    }

    /// Replace the response in place (same length, 0/1).
    pub fn set_response(&mut self, y: Vec<u8>) -> Result<()> {
        if y.len() != self.n() || y.iter().any(|&v| v > 1) {
            return Err(Error::Dimension("replacement response must be 0/1 of length n".into()));
        }
        self.y = y;
        Ok(())
    }

    /// κᵢ = yᵢ − ½.
    pub fn kappa(&self) -> DVector<f64> {
        DVector::from_iterator(self.n(), self.y.iter().map(|&v| v as f64 - 0.5))
    }

    pub fn positive_fraction(&self) -> f64 {
        self.y.iter().map(|&v| v as f64).sum::<f64>() / self.n() as f64
    }
}

/// log(1 + eᵗ) without overflow.
#[inline]
pub fn softplus(t: f64) -> f64 {
    if t > 0.0 {
        t + (-t).exp().ln_1p()
    } else {
        t.exp().ln_1p()
    }
}

pub fn linear_predictor(beta0: f64, beta: &[f64], x: &[f64]) -> f64 {
    beta0 + beta.iter().zip(x).map(|(b, v)| b * v).sum::<f64>()
}

/// Σᵢ [yᵢ ηᵢ − log(1 + exp ηᵢ)] with ηᵢ = β₀ + xᵢᵀβ.
pub fn log_likelihood(beta0: f64, beta: &[f64], data: &Dataset) -> Result<f64> {
    if beta.len() != data.p() {
        return Err(Error::Dimension(format!(
            "beta has length {}, data has {} columns",
            beta.len(),
            data.p()
        )));
    }
    let eta = data.x() * DVector::from_column_slice(beta);
    Ok(eta
        .iter()
        .zip(data.y())
        .map(|(e, &y)| {
            let t = beta0 + e;
            y as f64 * t - softplus(t)
        })
        .sum())
}

/// Success probability, kept strictly inside (0, 1).
pub fn predict_prob(beta0: f64, beta: &[f64], x: &[f64]) -> f64 {
    let t = linear_predictor(beta0, beta, x);
    let p = if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    };
    p.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0)
}
