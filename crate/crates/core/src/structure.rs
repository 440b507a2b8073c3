//! Zero/nonzero patterns of vectors and matrices.
//!
//! A `true` mark is a free (nonzero) entry, written `*` in text form; `false`
//! is a fixed zero, written `0`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::numerics::ComplexDenseMatrix;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StructuralVector {
    marks: Vec<bool>,
}

impl StructuralVector {
    pub fn new(marks: Vec<bool>) -> Self {
        Self { marks }
    }

    pub fn zeros(len: usize) -> Self {
        Self { marks: vec![false; len] }
    }

    pub fn full(len: usize) -> Self {
        Self { marks: vec![true; len] }
    }

    /// Pattern with stars exactly at `positions` (0-based).
    pub fn from_positions(len: usize, positions: &[usize]) -> Result<Self> {
        let mut marks = vec![false; len];
        for &p in positions {
            if p >= len {
                return Err(Error::IndexOutOfRange { index: p, len });
            }
            marks[p] = true;
        }
        Ok(Self { marks })
    }

    pub fn len(&self) -> usize {
        self.marks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.marks.is_empty()
    }

    pub fn is_star(&self, i: usize) -> bool {
        self.marks[i]
    }

    pub fn marks(&self) -> &[bool] {
        &self.marks
    }

    /// Positions of the stars, ascending.
    pub fn support(&self) -> Vec<usize> {
        self.marks.iter().enumerate().filter(|(_, &m)| m).map(|(i, _)| i).collect()
    }

    /// Number of stars.
    pub fn zero_norm(&self) -> usize {
        self.marks.iter().filter(|&&m| m).count()
    }
}

impl fmt::Display for StructuralVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &m in &self.marks {
            f.write_str(if m { "*" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for StructuralVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|ch| match ch {
                '*' => Ok(true),
                '0' => Ok(false),
                other => Err(Error::Parse(format!("invalid pattern character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self::new)
    }
}

impl Serialize for StructuralVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for StructuralVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Row-major `{0, *}` matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructuralMatrix {
    rows: usize,
    cols: usize,
    marks: Vec<bool>,
}

impl StructuralMatrix {
    pub fn new(rows: usize, cols: usize, marks: Vec<bool>) -> Result<Self> {
        if marks.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} marks for a {rows}x{cols} pattern",
                marks.len()
            )));
        }
        Ok(Self { rows, cols, marks })
    }

    /// Parses rows such as `["**0", "0*0", "00*"]`.
    pub fn from_row_strings<S: AsRef<str>>(rows: &[S]) -> Result<Self> {
        let parsed: Vec<StructuralVector> = rows.iter().map(|r| r.as_ref().parse()).collect::<Result<_>>()?;
        let cols = parsed.first().map_or(0, StructuralVector::len);
        if parsed.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("pattern rows of unequal length".into()));
        }
        let marks = parsed.iter().flat_map(|r| r.marks.iter().copied()).collect();
        Self::new(parsed.len(), cols, marks)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_star(&self, row: usize, col: usize) -> bool {
        self.marks[row * self.cols + col]
    }

    pub fn row_strings(&self) -> Vec<String> {
        (0..self.rows)
            .map(|i| StructuralVector::new(self.marks[i * self.cols..(i + 1) * self.cols].to_vec()).to_string())
            .collect()
    }
}

fn is_above(z: Complex64, max: f64, zero_tol: f64) -> bool {
    max > 0.0 && z.norm() > zero_tol * max
}

/// Entry `i` is a star iff `|v_i| > zero_tol * max_j |v_j|`.
pub fn structural_pattern(v: &[Complex64], zero_tol: f64) -> StructuralVector {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    StructuralVector::new(v.iter().map(|&z| is_above(z, max, zero_tol)).collect())
}

/// Entrywise pattern of a matrix, thresholded relative to its largest entry.
pub fn matrix_pattern(a: &ComplexDenseMatrix, zero_tol: f64) -> StructuralMatrix {
    let max = a.entries().iter().map(|z| z.norm()).fold(0.0, f64::max);
    StructuralMatrix {
        rows: a.rows(),
        cols: a.cols(),
        marks: a.entries().iter().map(|&z| is_above(z, max, zero_tol)).collect(),
    }
}

fn same_len(v: &StructuralVector, w: &StructuralVector) -> Result<()> {
    if v.len() == w.len() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch(format!(
            "patterns of length {} and {}",
            v.len(),
            w.len()
        )))
    }
}

/// Structural inner product: `true` (a star) iff some position is a star in
/// both patterns.
pub fn structural_inner(v: &StructuralVector, w: &StructuralVector) -> Result<bool> {
    same_len(v, w)?;
    Ok(v.marks.iter().zip(&w.marks).any(|(&a, &b)| a && b))
}

/// `v >= w`: every star of `w` is a star of `v`.
pub fn structural_geq(v: &StructuralVector, w: &StructuralVector) -> Result<bool> {
    same_len(v, w)?;
    Ok(v.marks.iter().zip(&w.marks).all(|(&a, &b)| a || !b))
}

/// Subvector of `v` on the stars of `pattern`, in order.
pub fn restrict(v: &[Complex64], pattern: &StructuralVector) -> Result<Vec<Complex64>> {
    if v.len() != pattern.len() {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} against pattern of length {}",
            v.len(),
            pattern.len()
        )));
    }
    if pattern.zero_norm() == 0 {
        return Err(Error::EmptySupport);
    }
    Ok(v.iter().zip(&pattern.marks).filter(|(_, &m)| m).map(|(z, _)| *z).collect())
}
