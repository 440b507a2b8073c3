//! Sparsest single-input placement.
//!
//! The pipeline reduces the problem to minimum set cover over the zero
//! patterns of the left eigenvectors, solves the cover, realizes numerical
//! input values on the chosen support and certifies the result.
//!
//! Set `i` of the cover instance collects the eigenvectors that are nonzero
//! at state `i`, so a cover is exactly a support that no eigenvector is
//! structurally orthogonal to.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::numerics::{inner, left_eigenbasis, left_residual, norm, ComplexDenseMatrix, LeftEigenbasis};
use crate::setcover::{CoverSolution, SetCoverInstance, DEFAULT_EXACT_LIMIT};
use crate::structure::{restrict, structural_inner, structural_pattern, StructuralVector};
use crate::verify::{verify, VerificationReport};
use crate::{Error, Result, Tolerances};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Greedy,
}

/// Builds the cover instance: universe = eigenvector indices, set `i` =
/// eigenvectors with a star at state `i`.
pub fn build_cover_instance(patterns: &[StructuralVector]) -> Result<SetCoverInstance> {
    let n = patterns
        .first()
        .map(StructuralVector::len)
        .ok_or_else(|| Error::Dimension("no eigenvector patterns".into()))?;
    if let Some(p) = patterns.iter().find(|p| p.len() != n) {
        return Err(Error::DimensionMismatch(format!(
            "pattern of length {} among patterns of length {n}",
            p.len()
        )));
    }
    if let Some(j) = patterns.iter().position(|p| p.zero_norm() == 0) {
        return Err(Error::ZeroPattern(j));
    }
    let sets = (0..n)
        .map(|i| (0..patterns.len()).filter(|&j| patterns[j].is_star(i)).collect())
        .collect();
    SetCoverInstance::new(patterns.len(), sets)
}

/// Pattern with stars exactly at the chosen set indices.
pub fn support_from_cover(indices: &[usize], n: usize) -> Result<StructuralVector> {
    StructuralVector::from_positions(n, indices)
}

/// Parameters of the numerical realization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealizationConfig {
    /// Step size of the orthogonality corrections.
    pub eps1: f64,
    /// Step size of the zero-entry repairs.
    pub eps2: f64,
    /// Initial multiplier per vector; `None` means all ones.
    pub alphas: Option<Vec<f64>>,
    /// `|v . b| <= tau |v| |b|` counts as orthogonal, and
    /// `|b_k| <= tau |b|` as a zero entry.
    pub tau: f64,
    /// Relative threshold for the feasibility check on vector patterns.
    pub zero_tol: f64,
}

impl Default for RealizationConfig {
    fn default() -> Self {
        Self {
            eps1: 0.1,
            eps2: 0.1,
            alphas: None,
            tau: crate::tolerance::DEFAULT_TAU,
            zero_tol: crate::tolerance::DEFAULT_ZERO_TOL,
        }
    }
}

impl RealizationConfig {
    pub fn validate(&self, vectors: usize) -> Result<()> {
        for (name, v) in [("eps1", self.eps1), ("eps2", self.eps2), ("tau", self.tau)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidConfig(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.zero_tol.is_finite() && self.zero_tol >= 0.0) {
            return Err(Error::InvalidConfig("zero_tol must be nonnegative".into()));
        }
        if let Some(alphas) = &self.alphas {
            if alphas.len() != vectors {
                return Err(Error::InvalidConfig(format!(
                    "{} multipliers for {vectors} vectors",
                    alphas.len()
                )));
            }
            if alphas.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
                return Err(Error::InvalidConfig("multipliers must be positive".into()));
            }
        }
        Ok(())
    }
}

/// Iteration counts recorded while realizing.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealizationTrace {
    /// Orthogonality corrections made after adding vector `j`.
    pub corrections: Vec<usize>,
    /// `(entry, multiplier count)` for each repaired zero entry of the
    /// support-restricted vector.
    pub repairs: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Realization {
    pub vector: Vec<Complex64>,
    pub trace: RealizationTrace,
}

/// Numerical input on `pattern` that no vector is orthogonal to.
///
/// Works on the vectors restricted to the support and scaled to unit norm
/// (positive rescaling does not change orthogonality). Vectors are added one
/// at a time; whenever the running sum becomes orthogonal to an already
/// added vector, another `eps1` multiple of the newest vector is added. Each
/// earlier vector can be orthogonal for at most one such multiple, so at most
/// `j + 1` corrections follow the `j`-th (0-based) vector. Zero entries are
/// then repaired by adding `eps2` multiples of the lowest-indexed vector that
/// is nonzero there, at most `p + |J| + 1` times per entry. Finally the
/// values are scattered back onto the support.
pub fn realize(pattern: &StructuralVector, vectors: &[Vec<Complex64>], config: &RealizationConfig) -> Result<Realization> {
    config.validate(vectors.len())?;
    let n = pattern.len();
    for (j, v) in vectors.iter().enumerate() {
        if v.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "vector {j} has length {}, pattern has length {n}",
                v.len()
            )));
        }
        if !structural_inner(pattern, &structural_pattern(v, config.zero_tol))? {
            return Err(Error::Infeasible(j));
        }
    }
    let p = pattern.zero_norm();
    if p == 0 {
        return Err(Error::EmptySupport);
    }

    let working: Vec<Vec<Complex64>> = vectors
        .iter()
        .map(|v| {
            let r = restrict(v, pattern)?;
            let s = norm(&r);
            Ok(r.into_iter().map(|z| z / s).collect())
        })
        .collect::<Result<_>>()?;
    let tau = config.tau;
    let orthogonal = |b: &[Complex64], w: &[Complex64]| inner(w, b).norm() <= tau * norm(b);
    let axpy = |b: &mut [Complex64], s: f64, w: &[Complex64]| b.iter_mut().zip(w).for_each(|(x, y)| *x += y * s);

    let mut trace = RealizationTrace::default();
    let mut b = vec![ZERO; p];
    for (j, w) in working.iter().enumerate() {
        let alpha = config.alphas.as_ref().map_or(1.0, |a| a[j]);
        axpy(&mut b, alpha, w);
        let mut corrections = 0;
        while working[..=j].iter().any(|wi| orthogonal(&b, wi)) {
            if corrections == j + 1 {
                return Err(Error::RepairFailed(format!(
                    "running sum stays orthogonal to an earlier vector after {corrections} corrections at vector {j}"
                )));
            }
            axpy(&mut b, config.eps1, w);
            corrections += 1;
        }
        trace.corrections.push(corrections);
    }

    let bound = p + working.len() + 1;
    for k in 0..p {
        let is_zero = |b: &[Complex64], i: usize| b[i].norm() <= tau * norm(b);
        if !is_zero(&b, k) {
            continue;
        }
        // Lowest-indexed vector that is structurally nonzero at k; if none is,
        // the entry is free and a canonical direction repairs it.
        let direction: Vec<Complex64> = working
            .iter()
            .find(|w| structural_pattern(w, config.zero_tol).is_star(k))
            .cloned()
            .unwrap_or_else(|| {
                let mut e = vec![ZERO; p];
                e[k] = Complex64::new(1.0, 0.0);
                e
            });
        let mut repaired = None;
        for l in 1..=bound {
            axpy(&mut b, config.eps2, &direction);
            let prefix_nonzero = (0..=k).all(|i| !is_zero(&b, i));
            if prefix_nonzero && !working.iter().any(|w| orthogonal(&b, w)) {
                repaired = Some(l);
                break;
            }
        }
        let l = repaired.ok_or_else(|| Error::RepairFailed(format!("entry {k} of the support after {bound} multipliers")))?;
        trace.repairs.push((k, l));
    }

    let mut vector = vec![ZERO; n];
    for (slot, value) in pattern.support().into_iter().zip(b) {
        vector[slot] = value;
    }
    Ok(Realization { vector, trace })
}

/// What the solver starts from.
#[derive(Clone, Copy, Debug)]
pub enum McpInput<'a> {
    Matrix(&'a ComplexDenseMatrix),
    /// A given eigenbasis, optionally with the matrix it belongs to. Without
    /// the matrix the Kalman certificate is unavailable.
    Basis {
        basis: &'a LeftEigenbasis,
        matrix: Option<&'a ComplexDenseMatrix>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub tolerances: Tolerances,
    pub eps1: f64,
    pub eps2: f64,
    pub alphas: Option<Vec<f64>>,
    pub exact_limit: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        let r = RealizationConfig::default();
        Self {
            tolerances: Tolerances::default(),
            eps1: r.eps1,
            eps2: r.eps2,
            alphas: None,
            exact_limit: DEFAULT_EXACT_LIMIT,
        }
    }
}

impl SolveOptions {
    pub fn realization_config(&self) -> RealizationConfig {
        RealizationConfig {
            eps1: self.eps1,
            eps2: self.eps2,
            alphas: self.alphas.clone(),
            tau: self.tolerances.tau,
            zero_tol: self.tolerances.zero_tol,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McpSolution {
    pub mode: Mode,
    pub eigenbasis: LeftEigenbasis,
    /// Pattern of each eigenvector, in eigenbasis order.
    pub patterns: Vec<StructuralVector>,
    pub instance: SetCoverInstance,
    pub cover: CoverSolution,
    /// Stars exactly at `cover.indices`.
    pub pattern: StructuralVector,
    pub vector: Vec<Complex64>,
    pub trace: RealizationTrace,
    pub certificate: VerificationReport,
}

impl McpSolution {
    pub fn support(&self) -> &[usize] {
        &self.cover.indices
    }
}

/// Runs the whole pipeline. Fails with [`Error::VerificationFailed`], which
/// carries the complete solution, if the realized input is not certified.
pub fn solve_mcp(input: McpInput<'_>, mode: Mode, options: &SolveOptions) -> Result<McpSolution> {
    let tol = &options.tolerances;
    tol.validate()?;
    let (basis, matrix) = match input {
        McpInput::Matrix(a) => (left_eigenbasis(a, tol.residual_tol, tol.gap_tol)?, Some(a)),
        McpInput::Basis { basis, matrix } => {
            if !crate::numerics::is_simple(&basis.eigenvalues(), tol.gap_tol) {
                return Err(Error::NotSimple {
                    a: "supplied".into(),
                    b: "eigenvalues".into(),
                });
            }
            if let Some(a) = matrix {
                check_supplied_basis(a, basis, tol.residual_tol)?;
            }
            (basis.clone(), matrix)
        }
    };

    let patterns: Vec<StructuralVector> = basis
        .pairs()
        .iter()
        .map(|p| structural_pattern(&p.vector, tol.zero_tol))
        .collect();
    let instance = build_cover_instance(&patterns)?;
    let cover = match mode {
        Mode::Exact => instance.solve_exact_with_limit(options.exact_limit)?,
        Mode::Greedy => instance.solve_greedy(),
    };
    let pattern = support_from_cover(&cover.indices, basis.len())?;
    let realization = realize(&pattern, &basis.vectors(), &options.realization_config())?;
    let certificate = verify(matrix, Some(&basis), &realization.vector, tol)?;

    let solution = McpSolution {
        mode,
        eigenbasis: basis,
        patterns,
        instance,
        cover,
        pattern,
        vector: realization.vector,
        trace: realization.trace,
        certificate,
    };
    if solution.certificate.controllable() {
        Ok(solution)
    } else {
        let reason = match &solution.certificate.kalman {
            Some(k) => format!(
                "Kalman rank {} < {} at rank_tol {:.1e}",
                k.rank,
                solution.eigenbasis.len(),
                k.rank_tol
            ),
            None => "input is numerically orthogonal to a left eigenvector".to_string(),
        };
        Err(Error::VerificationFailed {
            reason,
            solution: Box::new(solution),
        })
    }
}

fn check_supplied_basis(a: &ComplexDenseMatrix, basis: &LeftEigenbasis, residual_tol: f64) -> Result<()> {
    a.require_square()?;
    if basis.len() != a.rows() {
        return Err(Error::InvalidEigenbasis(format!(
            "{} pairs for a {n}x{n} matrix",
            basis.len(),
            n = a.rows()
        )));
    }
    let a_norm = a.frobenius_norm();
    for (j, pair) in basis.pairs().iter().enumerate() {
        let r = left_residual(a, pair) / norm(&pair.vector);
        if r > residual_tol * a_norm.max(f64::MIN_POSITIVE) {
            return Err(Error::InvalidEigenbasis(format!(
                "pair {j} has relative residual {r:.3e}"
            )));
        }
    }
    Ok(())
}
