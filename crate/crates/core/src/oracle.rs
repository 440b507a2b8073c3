//! Brute-force reference for the sparsest input.
//!
//! Supports are enumerated by increasing size. A support is feasible iff
//! every left eigenvector is nonzero somewhere on it, which is the
//! eigenvector form of the controllability test applied to a generic input
//! on that support. Only the winners are realized and Kalman-checked.

use serde::{Deserialize, Serialize};

use crate::mcp::{realize, RealizationConfig};
use crate::numerics::{left_eigenbasis, ComplexDenseMatrix};
use crate::structure::{structural_pattern, StructuralVector};
use crate::verify::kalman_test;
use crate::{Error, Result, Tolerances};

pub const DEFAULT_N_LIMIT: usize = 12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportVerdict {
    pub support: Vec<usize>,
    pub kalman_rank: Option<usize>,
    pub controllable: bool,
    /// Set when realization itself failed.
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub min_support_size: usize,
    /// Every support of minimum size, in lexicographic order (0-based).
    pub optimal_supports: Vec<Vec<usize>>,
    pub verdicts: Vec<SupportVerdict>,
}

impl OracleResult {
    pub fn all_verified(&self) -> bool {
        self.verdicts.iter().all(|v| v.controllable)
    }
}

/// Lexicographic `k`-subsets of `0..n`.
fn for_each_subset(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    let mut idx: Vec<usize> = (0..k).collect();
    if k > n {
        return;
    }
    loop {
        f(&idx);
        let Some(i) = (0..k).rev().find(|&i| idx[i] < n - k + i) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

pub fn brute_force_mcp(a: &ComplexDenseMatrix, n_limit: usize, tolerances: &Tolerances) -> Result<OracleResult> {
    a.require_square()?;
    let n = a.rows();
    if n > n_limit {
        return Err(Error::TooLarge { size: n, limit: n_limit });
    }
    let basis = left_eigenbasis(a, tolerances.residual_tol, tolerances.gap_tol)?;
    let patterns: Vec<StructuralVector> = basis
        .pairs()
        .iter()
        .map(|p| structural_pattern(&p.vector, tolerances.zero_tol))
        .collect();

    let mut optimal_supports = Vec::new();
    let mut min_support_size = 0;
    for k in 1..=n {
        for_each_subset(n, k, |support| {
            if patterns.iter().all(|v| support.iter().any(|&i| v.is_star(i))) {
                optimal_supports.push(support.to_vec());
            }
        });
        if !optimal_supports.is_empty() {
            min_support_size = k;
            break;
        }
    }
    if optimal_supports.is_empty() {
        let j = patterns.iter().position(|p| p.zero_norm() == 0).unwrap_or(0);
        return Err(Error::ZeroPattern(j));
    }

    let config = RealizationConfig {
        tau: tolerances.tau,
        zero_tol: tolerances.zero_tol,
        ..RealizationConfig::default()
    };
    let vectors = basis.vectors();
    let verdicts = optimal_supports
        .iter()
        .map(|support| {
            let pattern = StructuralVector::from_positions(n, support)?;
            Ok(match realize(&pattern, &vectors, &config) {
                Ok(r) => {
                    let k = kalman_test(a, &r.vector, tolerances.rank_tol)?;
                    SupportVerdict {
                        support: support.clone(),
                        kalman_rank: Some(k.rank),
                        controllable: k.controllable,
                        error: None,
                    }
                }
                Err(e) => SupportVerdict {
                    support: support.clone(),
                    kalman_rank: None,
                    controllable: false,
                    error: Some(e.to_string()),
                },
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(OracleResult {
        min_support_size,
        optimal_supports,
        verdicts,
    })
}
