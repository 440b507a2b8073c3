//! Dense complex linear algebra: left eigenbases, numerical rank and the
//! Kalman controllability matrix.

use std::cmp::Ordering;

use nalgebra::{DMatrix, Schur, SVD};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Entries below this fraction of the largest modulus are skipped when
/// picking the entry whose phase is fixed during normalization.
const PHASE_PIVOT_REL: f64 = 1e-6;

/// Row-major dense matrix of complex scalars with finite entries.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexDenseMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl ComplexDenseMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        if let Some(k) = entries.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite {
                row: k / cols.max(1),
                col: k % cols.max(1),
            });
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().position(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch(format!(
                "row {bad} has {} entries, expected {cols}",
                rows[bad].len()
            )));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    /// Builds a matrix from its columns.
    pub fn from_columns(columns: &[Vec<Complex64>]) -> Result<Self> {
        let rows = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != rows) {
            return Err(Error::DimensionMismatch("columns of unequal length".into()));
        }
        let cols = columns.len();
        let mut entries = vec![ZERO; rows * cols];
        for (j, c) in columns.iter().enumerate() {
            for (i, &z) in c.iter().enumerate() {
                entries[i * cols + j] = z;
            }
        }
        Self::new(rows, cols, entries)
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = vec![ZERO; n * n];
        for i in 0..n {
            entries[i * n + i] = ONE;
        }
        Self { rows: n, cols: n, entries }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![ZERO; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[Complex64] {
        &self.entries[row * self.cols..(row + 1) * self.cols]
    }

    pub fn column(&self, col: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self.get(i, col)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Complex64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// True when every entry has zero imaginary part.
    pub fn is_real(&self) -> bool {
        self.entries.iter().all(|z| z.im == 0.0)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `self * x`.
    pub fn mul_vec(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} against {} columns",
                x.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// `self - shift * I`.
    pub fn shifted(&self, shift: Complex64) -> Result<Self> {
        self.require_square()?;
        let mut out = self.clone();
        for i in 0..self.rows {
            out.entries[i * self.cols + i] -= shift;
        }
        Ok(out)
    }

    /// Appends `column` on the right.
    pub fn with_column(&self, column: &[Complex64]) -> Result<Self> {
        if column.len() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "column of length {} for {} rows",
                column.len(),
                self.rows
            )));
        }
        let cols = self.cols + 1;
        let mut entries = Vec::with_capacity(self.rows * cols);
        for (i, &z) in column.iter().enumerate() {
            entries.extend_from_slice(self.row(i));
            entries.push(z);
        }
        Ok(Self {
            rows: self.rows,
            cols,
            entries,
        })
    }

    pub fn require_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.entries)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EigenSource {
    Computed,
    UserSupplied,
}

/// One eigenvalue with its left eigenvector `v`, i.e. `v^H A = lambda v^H`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenPair {
    pub value: Complex64,
    pub vector: Vec<Complex64>,
}

/// The `n` left eigenpairs of a simple `n x n` matrix.
///
/// Pairs are ordered by decreasing real part of the eigenvalue, then by
/// decreasing imaginary part.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeftEigenbasis {
    pairs: Vec<EigenPair>,
    source: EigenSource,
}

impl LeftEigenbasis {
    /// Wraps a user-supplied eigenbasis. Only shape, finiteness, nonzero
    /// vectors and eigenvalue simplicity are checked; no matrix is involved.
    pub fn user_supplied(pairs: Vec<EigenPair>, gap_tol: f64) -> Result<Self> {
        let n = pairs.len();
        if n == 0 {
            return Err(Error::Dimension("eigenbasis has no pairs".into()));
        }
        for (j, p) in pairs.iter().enumerate() {
            if p.vector.len() != n {
                return Err(Error::Dimension(format!(
                    "eigenvector {j} has length {}, expected {n}",
                    p.vector.len()
                )));
            }
            let finite = |z: &Complex64| z.re.is_finite() && z.im.is_finite();
            if !finite(&p.value) || !p.vector.iter().all(finite) {
                return Err(Error::Parse(format!("eigenpair {j} has a non-finite entry")));
            }
            if norm(&p.vector) == 0.0 {
                return Err(Error::Dimension(format!("eigenvector {j} is zero")));
            }
        }
        let values: Vec<Complex64> = pairs.iter().map(|p| p.value).collect();
        check_simple(&values, gap_tol)?;
        Ok(Self {
            pairs,
            source: EigenSource::UserSupplied,
        })
    }

    pub fn pairs(&self) -> &[EigenPair] {
        &self.pairs
    }

    pub fn source(&self) -> EigenSource {
        self.source
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn eigenvalues(&self) -> Vec<Complex64> {
        self.pairs.iter().map(|p| p.value).collect()
    }

    pub fn vectors(&self) -> Vec<Vec<Complex64>> {
        self.pairs.iter().map(|p| p.vector.clone()).collect()
    }
}

/// Conjugate-linear inner product `v^H b`.
pub fn inner(v: &[Complex64], b: &[Complex64]) -> Complex64 {
    v.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `|| v^H A - lambda v^H ||_2`.
pub fn left_residual(a: &ComplexDenseMatrix, pair: &EigenPair) -> f64 {
    let n = a.rows();
    (0..n)
        .map(|j| {
            let va: Complex64 = (0..n).map(|i| pair.vector[i].conj() * a.get(i, j)).sum();
            (va - pair.value * pair.vector[j].conj()).norm_sqr()
        })
        .sum::<f64>()
        .sqrt()
}

/// True iff every pair of eigenvalues is separated by more than
/// `gap_tol * (1 + max |lambda|)`.
pub fn is_simple(eigenvalues: &[Complex64], gap_tol: f64) -> bool {
    closest_pair(eigenvalues, gap_tol).is_none()
}

fn closest_pair(eigenvalues: &[Complex64], gap_tol: f64) -> Option<(Complex64, Complex64)> {
    let scale = 1.0 + eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let threshold = gap_tol * scale;
    for (i, a) in eigenvalues.iter().enumerate() {
        for b in &eigenvalues[i + 1..] {
            if (a - b).norm() <= threshold {
                return Some((*a, *b));
            }
        }
    }
    None
}

fn check_simple(eigenvalues: &[Complex64], gap_tol: f64) -> Result<()> {
    match closest_pair(eigenvalues, gap_tol) {
        Some((a, b)) => Err(Error::NotSimple {
            a: a.to_string(),
            b: b.to_string(),
        }),
        None => Ok(()),
    }
}

/// Computes the left eigenbasis of a simple square matrix.
///
/// A complex Schur form `A = Q T Q^H` is computed (Hessenberg reduction and
/// shifted QR). For each diagonal entry `T_kk` the row system `w T = T_kk w`
/// is solved by forward substitution, and `v = Q conj(w)` is the left
/// eigenvector of `A`. Vectors are scaled to unit norm with the first
/// significant entry real and positive.
pub fn left_eigenbasis(a: &ComplexDenseMatrix, residual_tol: f64, gap_tol: f64) -> Result<LeftEigenbasis> {
    a.require_square()?;
    let n = a.rows();
    if n == 0 {
        return Err(Error::Dimension("empty matrix".into()));
    }
    let schur = Schur::try_new(a.to_nalgebra(), f64::EPSILON, 10_000 * n)
        .ok_or_else(|| Error::EigensolveFailed("Schur iteration did not converge".into()))?;
    let (q, t) = schur.unpack();

    let values: Vec<Complex64> = (0..n).map(|k| t[(k, k)]).collect();
    check_simple(&values, gap_tol)?;

    let a_norm = a.frobenius_norm();
    let mut pairs = Vec::with_capacity(n);
    for (k, &lambda) in values.iter().enumerate() {
        let mut w = vec![ZERO; n];
        w[k] = ONE;
        for j in k + 1..n {
            let acc: Complex64 = (k..j).map(|i| w[i] * t[(i, j)]).sum();
            w[j] = acc / (lambda - t[(j, j)]);
        }
        let mut v: Vec<Complex64> = (0..n)
            .map(|i| (0..n).map(|j| q[(i, j)] * w[j].conj()).sum())
            .collect();
        normalize(&mut v);
        let pair = EigenPair { value: lambda, vector: v };
        let residual = left_residual(a, &pair);
        if residual > residual_tol * a_norm.max(f64::MIN_POSITIVE) {
            return Err(Error::EigensolveFailed(format!(
                "eigenpair for {lambda} has residual {residual:.3e} above {residual_tol:.1e} * |A|"
            )));
        }
        pairs.push(pair);
    }
    pairs.sort_by(|x, y| eigen_order(x.value, y.value));
    Ok(LeftEigenbasis {
        pairs,
        source: EigenSource::Computed,
    })
}

fn eigen_order(a: Complex64, b: Complex64) -> Ordering {
    b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im))
}

/// Unit Euclidean norm, first significant entry real and positive.
pub fn normalize(v: &mut [Complex64]) {
    let nrm = norm(v);
    if nrm == 0.0 {
        return;
    }
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let pivot = v
        .iter()
        .find(|z| z.norm() > PHASE_PIVOT_REL * max)
        .copied()
        .unwrap_or(ONE);
    let phase = pivot.conj() / pivot.norm();
    for z in v.iter_mut() {
        *z = *z * phase / nrm;
    }
}

/// Number of singular values above `rank_tol * sigma_max`; zero for a zero
/// or empty matrix.
pub fn numerical_rank(m: &ComplexDenseMatrix, rank_tol: f64) -> usize {
    if m.rows() == 0 || m.cols() == 0 {
        return 0;
    }
    let sv = SVD::new(m.to_nalgebra(), false, false).singular_values;
    let max = sv.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rank_tol * max).count()
}

/// Singular values in decreasing order.
pub fn singular_values(m: &ComplexDenseMatrix) -> Vec<f64> {
    if m.rows() == 0 || m.cols() == 0 {
        return Vec::new();
    }
    let mut sv: Vec<f64> = SVD::new(m.to_nalgebra(), false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// `[b, Ab, ..., A^(n-1) b]`.
pub fn controllability_matrix(a: &ComplexDenseMatrix, b: &[Complex64]) -> Result<ComplexDenseMatrix> {
    a.require_square()?;
    if b.len() != a.rows() {
        return Err(Error::DimensionMismatch(format!(
            "input vector of length {} for a {n}x{n} matrix",
            b.len(),
            n = a.rows()
        )));
    }
    let mut columns = Vec::with_capacity(a.rows());
    let mut current = b.to_vec();
    for _ in 0..a.rows() {
        let next = a.mul_vec(&current)?;
        columns.push(std::mem::replace(&mut current, next));
    }
    ComplexDenseMatrix::from_columns(&columns)
}
