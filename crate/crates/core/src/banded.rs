//! Tridiagonal prior precisions and Gaussian draws parameterised by a
//! precision matrix.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{domain, Error, Result};

/// Symmetric tridiagonal matrix, off-diagonal stored once.
#[derive(Clone, Debug, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    pub offdiag: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || offdiag.len() + 1 != diag.len() {
            return Err(Error::Dimension(format!(
                "tridiagonal needs offdiag length diag-1, got {} and {}",
                diag.len(),
                offdiag.len()
            )));
        }
        Ok(Self { diag, offdiag })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let p = self.dim();
        let mut m = DMatrix::zeros(p, p);
        self.add_into(&mut m);
        m
    }

    fn add_into(&self, m: &mut DMatrix<f64>) {
        for (j, d) in self.diag.iter().enumerate() {
            m[(j, j)] += d;
        }
        for (j, o) in self.offdiag.iter().enumerate() {
            m[(j, j + 1)] += o;
            m[(j + 1, j)] += o;
        }
    }
}

fn check_all_positive(name: &str, xs: &[f64]) -> Result<()> {
    match xs.iter().position(|x| *x <= 0.0 || !x.is_finite()) {
        Some(j) => domain(format!("{name}[{j}] = {} is not strictly positive", xs[j])),
        None => Ok(()),
    }
}

/// Tridiagonal assembly shared by both fused priors: `diag(1/tau2) + Dᵀ diag(1/diff_var) D`.
fn assemble(tau2: &[f64], diff_var: impl Iterator<Item = f64>) -> SymTridiagonal {
    let mut diag: Vec<f64> = tau2.iter().map(|t| 1.0 / t).collect();
    let mut offdiag = Vec::with_capacity(tau2.len().saturating_sub(1));
    for (j, v) in diff_var.enumerate() {
        let inv = 1.0 / v;
        diag[j] += inv;
        diag[j + 1] += inv;
        offdiag.push(-inv);
    }
    SymTridiagonal { diag, offdiag }
}

/// Prior precision of the Laplace-fusion model.
///
/// `ttau2[j]` is the scale of the difference between coefficients `j` and
/// `j + 1` (zero-based), i.e. it holds τ̃₂² … τ̃ₚ².
pub fn build_fused_precision(tau2: &[f64], ttau2: &[f64]) -> Result<SymTridiagonal> {
    if tau2.len() < 2 || ttau2.len() + 1 != tau2.len() {
        return Err(Error::Dimension(format!(
            "expected tau2 of length p >= 2 and ttau2 of length p-1, got {} and {}",
            tau2.len(),
            ttau2.len()
        )));
    }
    check_all_positive("tau2", tau2)?;
    check_all_positive("ttau2", ttau2)?;
    Ok(assemble(tau2, ttau2.iter().copied()))
}

/// Prior precision of the horseshoe-fusion model: difference variances are
/// `lambda2[j] * ttilde2`.
pub fn build_horseshoe_precision(tau2: &[f64], lambda2: &[f64], ttilde2: f64) -> Result<SymTridiagonal> {
    if tau2.len() < 2 || lambda2.len() + 1 != tau2.len() {
        return Err(Error::Dimension(format!(
            "expected tau2 of length p >= 2 and lambda2 of length p-1, got {} and {}",
            tau2.len(),
            lambda2.len()
        )));
    }
    check_all_positive("tau2", tau2)?;
    check_all_positive("lambda2", lambda2)?;
    check_all_positive("ttilde2", &[ttilde2])?;
    Ok(assemble(tau2, lambda2.iter().map(|l| l * ttilde2)))
}

/// Diagonal prior precision `diag(1/tau2)` (Bayesian lasso).
pub fn build_diagonal_precision(tau2: &[f64]) -> Result<SymTridiagonal> {
    if tau2.is_empty() {
        return Err(Error::Dimension("empty tau2".into()));
    }
    check_all_positive("tau2", tau2)?;
    Ok(SymTridiagonal {
        diag: tau2.iter().map(|t| 1.0 / t).collect(),
        offdiag: vec![0.0; tau2.len() - 1],
    })
}

/// `dense + tri`, entrywise.
pub fn add_tridiagonal(dense: &DMatrix<f64>, tri: &SymTridiagonal) -> Result<DMatrix<f64>> {
    let mut out = dense.clone();
    add_tridiagonal_in_place(&mut out, tri)?;
    Ok(out)
}

pub fn add_tridiagonal_in_place(dense: &mut DMatrix<f64>, tri: &SymTridiagonal) -> Result<()> {
    let p = tri.dim();
    if dense.nrows() != p || dense.ncols() != p {
        return Err(Error::Dimension(format!(
            "dense is {}x{}, tridiagonal is {p}x{p}",
            dense.nrows(),
            dense.ncols()
        )));
    }
    tri.add_into(dense);
    Ok(())
}

/// Gaussian N(A⁻¹ m, A⁻¹) described by its precision `A` and linear term `m`.
#[derive(Clone, Debug)]
pub struct PrecisionSystem {
    pub precision: DMatrix<f64>,
    pub linear_term: DVector<f64>,
}

impl PrecisionSystem {
    pub fn new(precision: DMatrix<f64>, linear_term: DVector<f64>) -> Result<Self> {
        let p = linear_term.len();
        if precision.nrows() != p || precision.ncols() != p {
            return Err(Error::Dimension(format!(
                "precision is {}x{}, linear term has length {p}",
                precision.nrows(),
                precision.ncols()
            )));
        }
        Ok(Self { precision, linear_term })
    }

    pub fn dim(&self) -> usize {
        self.linear_term.len()
    }
}

/// One draw from N(A⁻¹m, A⁻¹).
///
/// With A = LLᵀ: solve L u = m, then Lᵀ x = u + ε for ε ~ N(0, I). The mean
/// part is Lᵀ⁻¹L⁻¹m = A⁻¹m and the noise part has covariance (LLᵀ)⁻¹.
pub fn sample_gaussian_from_precision<R: Rng + ?Sized>(sys: &PrecisionSystem, rng: &mut R) -> Result<DVector<f64>> {
    sample_gaussian_from_parts(sys.precision.clone(), &sys.linear_term, rng)
}

/// As [`sample_gaussian_from_precision`], consuming the precision buffer to
/// factor it in place.
pub fn sample_gaussian_from_parts<R: Rng + ?Sized>(
    precision: DMatrix<f64>,
    linear_term: &DVector<f64>,
    rng: &mut R,
) -> Result<DVector<f64>> {
    let p = linear_term.len();
    if precision.nrows() != p || precision.ncols() != p {
        return Err(Error::Dimension(format!(
            "precision is {}x{}, linear term has length {p}",
            precision.nrows(),
            precision.ncols()
        )));
    }
    let chol = precision.cholesky().ok_or(Error::NotPositiveDefinite)?;
    let l = chol.l_dirty();
    let mut x = linear_term.clone();
    if !l.solve_lower_triangular_mut(&mut x) {
        return Err(Error::NotPositiveDefinite);
    }
    for xi in x.iter_mut() {
        let e: f64 = StandardNormal.sample(rng);
        *xi += e;
    }
    if !l.tr_solve_lower_triangular_mut(&mut x) {
        return Err(Error::NotPositiveDefinite);
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NotPositiveDefinite);
    }
    Ok(x)
}
