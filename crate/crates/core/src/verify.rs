//! Controllability certificates: PBH eigenvalue rank test, PBH eigenvector
//! orthogonality test and the Kalman rank test.
//!
//! The Kalman test needs no eigen data and is the verdict of record; the PBH
//! tests are diagnostics. Disagreements are reported, never resolved.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::numerics::{controllability_matrix, inner, norm, numerical_rank, ComplexDenseMatrix, LeftEigenbasis};
use crate::{Error, Result, Tolerances};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PbhEigenvalueCheck {
    pub controllable: bool,
    /// `rank([A - lambda I | b])` for each eigenvalue, in the order given.
    pub ranks: Vec<usize>,
    pub rank_tol: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PbhEigenvectorCheck {
    pub controllable: bool,
    /// First eigenvector (0-based) numerically orthogonal to `b`.
    pub violator: Option<usize>,
    /// `min_j |v_j^H b| / (|v_j| |b|)`.
    pub min_ratio: f64,
    pub tau: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KalmanCheck {
    pub controllable: bool,
    pub rank: usize,
    pub rank_tol: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub pbh_eigenvalue: Option<PbhEigenvalueCheck>,
    pub pbh_eigenvector: Option<PbhEigenvectorCheck>,
    pub kalman: Option<KalmanCheck>,
    /// All verdicts that were computed agree.
    pub consistent: bool,
    pub tolerances: Tolerances,
}

impl VerificationReport {
    /// Verdict of record: Kalman when available, otherwise PBH eigenvector,
    /// otherwise PBH eigenvalue.
    pub fn controllable(&self) -> bool {
        self.kalman
            .as_ref()
            .map(|k| k.controllable)
            .or(self.pbh_eigenvector.as_ref().map(|p| p.controllable))
            .or(self.pbh_eigenvalue.as_ref().map(|p| p.controllable))
            .unwrap_or(false)
    }
}

fn check_dims(a: &ComplexDenseMatrix, b: &[Complex64]) -> Result<()> {
    a.require_square()?;
    if b.len() != a.rows() {
        return Err(Error::DimensionMismatch(format!(
            "input vector of length {} for a {n}x{n} matrix",
            b.len(),
            n = a.rows()
        )));
    }
    Ok(())
}

/// `rank([A - lambda I | b]) = n` for every given eigenvalue.
pub fn pbh_eigenvalue_test(
    a: &ComplexDenseMatrix,
    b: &[Complex64],
    eigenvalues: &[Complex64],
    rank_tol: Option<f64>,
) -> Result<PbhEigenvalueCheck> {
    check_dims(a, b)?;
    let n = a.rows();
    let rank_tol = rank_tol.unwrap_or_else(|| crate::default_rank_tol(n, n + 1));
    let ranks = eigenvalues
        .iter()
        .map(|&lambda| Ok(numerical_rank(&a.shifted(lambda)?.with_column(b)?, rank_tol)))
        .collect::<Result<Vec<_>>>()?;
    Ok(PbhEigenvalueCheck {
        controllable: ranks.iter().all(|&r| r == n),
        ranks,
        rank_tol,
    })
}

/// `|v_j^H b| > tau |v_j| |b|` for every left eigenvector.
pub fn pbh_eigenvector_test(basis: &LeftEigenbasis, b: &[Complex64], tau: f64) -> Result<PbhEigenvectorCheck> {
    let b_norm = norm(b);
    let mut violator = None;
    let mut min_ratio = f64::INFINITY;
    for (j, pair) in basis.pairs().iter().enumerate() {
        if pair.vector.len() != b.len() {
            return Err(Error::DimensionMismatch(format!(
                "eigenvector of length {} against input of length {}",
                pair.vector.len(),
                b.len()
            )));
        }
        let scale = norm(&pair.vector) * b_norm;
        let ratio = if scale > 0.0 { inner(&pair.vector, b).norm() / scale } else { 0.0 };
        min_ratio = min_ratio.min(ratio);
        if ratio <= tau && violator.is_none() {
            violator = Some(j);
        }
    }
    Ok(PbhEigenvectorCheck {
        controllable: violator.is_none() && !basis.is_empty(),
        violator,
        min_ratio: if min_ratio.is_finite() { min_ratio } else { 0.0 },
        tau,
    })
}

/// `rank([b, Ab, ..., A^(n-1) b]) = n`.
pub fn kalman_test(a: &ComplexDenseMatrix, b: &[Complex64], rank_tol: Option<f64>) -> Result<KalmanCheck> {
    check_dims(a, b)?;
    let n = a.rows();
    let rank_tol = rank_tol.unwrap_or_else(|| crate::default_rank_tol(n, n));
    let rank = numerical_rank(&controllability_matrix(a, b)?, rank_tol);
    Ok(KalmanCheck {
        controllable: rank == n,
        rank,
        rank_tol,
    })
}

/// Runs every test the available data allows.
pub fn verify(
    a: Option<&ComplexDenseMatrix>,
    basis: Option<&LeftEigenbasis>,
    b: &[Complex64],
    tolerances: &Tolerances,
) -> Result<VerificationReport> {
    let kalman = a.map(|a| kalman_test(a, b, tolerances.rank_tol)).transpose()?;
    let pbh_eigenvalue = match (a, basis) {
        (Some(a), Some(basis)) => Some(pbh_eigenvalue_test(a, b, &basis.eigenvalues(), tolerances.rank_tol)?),
        _ => None,
    };
    let pbh_eigenvector = basis.map(|basis| pbh_eigenvector_test(basis, b, tolerances.tau)).transpose()?;
    let verdicts: Vec<bool> = [
        kalman.as_ref().map(|k| k.controllable),
        pbh_eigenvalue.as_ref().map(|p| p.controllable),
        pbh_eigenvector.as_ref().map(|p| p.controllable),
    ]
    .into_iter()
    .flatten()
    .collect();
    Ok(VerificationReport {
        consistent: verdicts.windows(2).all(|w| w[0] == w[1]),
        pbh_eigenvalue,
        pbh_eigenvector,
        kalman,
        tolerances: *tolerances,
    })
}
