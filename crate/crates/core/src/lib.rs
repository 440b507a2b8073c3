//! Sparsest single-input actuator placement for linear time-invariant
//! systems `x' = A x + b u`.
//!
//! The sparsest `b` making `(A, b)` controllable is found by reducing to
//! minimum set cover over the zero patterns of `A`'s left eigenvectors
//! ([`mcp`]), realizing numerical values on the chosen support and
//! certifying the result ([`verify`]). The structural counterpart, where only
//! the zero pattern of `A` is known, is solved in [`structural`].

pub mod error;
pub mod fixtures;
pub mod mcp;
pub mod numerics;
pub mod oracle;
pub mod problem;
pub mod setcover;
pub mod structural;
pub mod structure;
pub mod tolerance;
pub mod verify;

pub use error::{Error, Result};
pub use mcp::{solve_mcp, McpInput, McpSolution, Mode, RealizationConfig, SolveOptions};
pub use numerics::{ComplexDenseMatrix, EigenPair, LeftEigenbasis};
pub use num_complex::Complex64;
pub use setcover::{CoverSolution, SetCoverInstance};
pub use structure::{StructuralMatrix, StructuralVector};
pub use tolerance::{default_rank_tol, ToleranceOverrides, Tolerances};
pub use verify::VerificationReport;
