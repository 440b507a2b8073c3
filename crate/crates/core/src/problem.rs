//! Problem files.
//!
//! The canonical format is JSON with complex entries written as
//! `[real, imaginary]` pairs; plain numbers are accepted as real entries:
//!
//! ```json
//! {
//!   "n": 2,
//!   "matrix": [[1, [0.5, 0]], [0, 2]],
//!   "eigenbasis": {
//!     "eigenvalues": [2, 1],
//!     "eigenvectors": [[[0.447, 0], [0.894, 0]], [1, 0]]
//!   },
//!   "tolerances": { "zero_tol": 1e-12 }
//! }
//! ```
//!
//! `eigenbasis` and `tolerances` are optional. Eigenvectors are left
//! eigenvectors `v` with `v^H A = lambda v^H`.
//!
//! A whitespace-separated real matrix, one row per line with `#` comments,
//! is also accepted.

use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::numerics::{ComplexDenseMatrix, EigenPair};
use crate::tolerance::ToleranceOverrides;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum Entry {
    Real(f64),
    Pair([f64; 2]),
}

impl From<Entry> for Complex64 {
    fn from(e: Entry) -> Self {
        match e {
            Entry::Real(x) => Complex64::new(x, 0.0),
            Entry::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

impl From<Complex64> for Entry {
    fn from(z: Complex64) -> Self {
        Entry::Pair([z.re, z.im])
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEigenbasis {
    eigenvalues: Vec<Entry>,
    eigenvectors: Vec<Vec<Entry>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    n: usize,
    matrix: Vec<Vec<Entry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    eigenbasis: Option<RawEigenbasis>,
    #[serde(default, skip_serializing_if = "ToleranceOverrides::is_empty")]
    tolerances: ToleranceOverrides,
}

/// A validated problem: an `n x n` matrix, optionally its eigenbasis, and
/// tolerance overrides.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemFile {
    pub matrix: ComplexDenseMatrix,
    pub eigenbasis: Option<Vec<EigenPair>>,
    pub tolerances: ToleranceOverrides,
}

impl ProblemFile {
    pub fn new(matrix: ComplexDenseMatrix) -> Result<Self> {
        matrix.require_square()?;
        Ok(Self {
            matrix,
            eigenbasis: None,
            tolerances: ToleranceOverrides::default(),
        })
    }

    pub fn n(&self) -> usize {
        self.matrix.rows()
    }

    pub fn to_json_string(&self) -> String {
        let entries = |row: &[Complex64]| row.iter().map(|&z| Entry::from(z)).collect::<Vec<_>>();
        let raw = RawProblem {
            n: self.n(),
            matrix: self.matrix.to_rows().iter().map(|r| entries(r)).collect(),
            eigenbasis: self.eigenbasis.as_ref().map(|pairs| RawEigenbasis {
                eigenvalues: pairs.iter().map(|p| p.value.into()).collect(),
                eigenvectors: pairs.iter().map(|p| entries(&p.vector)).collect(),
            }),
            tolerances: self.tolerances,
        };
        serde_json::to_string_pretty(&raw).expect("problem serializes")
    }

    pub fn parse_json(text: &str) -> Result<Self> {
        let raw: RawProblem = serde_json::from_str(text)
            .map_err(|e| Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column())))?;
        let n = raw.n;
        if n == 0 {
            return Err(Error::Dimension("n must be at least 1".into()));
        }
        if raw.matrix.len() != n {
            return Err(Error::Dimension(format!("matrix has {} rows, expected n = {n}", raw.matrix.len())));
        }
        let mut rows = Vec::with_capacity(n);
        for (i, row) in raw.matrix.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::Dimension(format!("matrix[{i}] has {} entries, expected {n}", row.len())));
            }
            rows.push(row.into_iter().map(Complex64::from).collect());
        }
        let matrix = ComplexDenseMatrix::from_rows(&rows).map_err(|e| match e {
            Error::NonFinite { row, col } => Error::Parse(format!("matrix[{row}][{col}] is not finite")),
            other => other,
        })?;
        let eigenbasis = raw.eigenbasis.map(|eb| convert_eigenbasis(eb, n)).transpose()?;
        Ok(Self {
            matrix,
            eigenbasis,
            tolerances: raw.tolerances,
        })
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let row = line
                .split_whitespace()
                .enumerate()
                .map(|(col, tok)| {
                    tok.parse::<f64>()
                        .ok()
                        .filter(|x| x.is_finite())
                        .ok_or_else(|| Error::Parse(format!("line {}, field {}: invalid number {tok:?}", lineno + 1, col + 1)))
                })
                .collect::<Result<Vec<f64>>>()?;
            rows.push(row);
        }
        let n = rows.len();
        if n == 0 {
            return Err(Error::Dimension("empty matrix".into()));
        }
        if let Some(i) = rows.iter().position(|r| r.len() != n) {
            return Err(Error::Dimension(format!("row {} has {} entries, expected {n}", i + 1, rows[i].len())));
        }
        Self::new(ComplexDenseMatrix::from_real_rows(&rows)?)
    }

    /// JSON when the first non-blank character is `{`, plain text otherwise.
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            Self::parse_json(text)
        } else {
            Self::parse_text(text)
        }
    }
}

fn convert_eigenbasis(raw: RawEigenbasis, n: usize) -> Result<Vec<EigenPair>> {
    if raw.eigenvalues.len() != n {
        return Err(Error::Dimension(format!(
            "eigenbasis.eigenvalues has {} entries, expected n = {n}",
            raw.eigenvalues.len()
        )));
    }
    if raw.eigenvectors.len() != n {
        return Err(Error::Dimension(format!(
            "eigenbasis.eigenvectors has {} vectors, expected n = {n}",
            raw.eigenvectors.len()
        )));
    }
    let finite = |z: &Complex64| z.re.is_finite() && z.im.is_finite();
    raw.eigenvalues
        .into_iter()
        .zip(raw.eigenvectors)
        .enumerate()
        .map(|(j, (value, vector))| {
            if vector.len() != n {
                return Err(Error::Dimension(format!(
                    "eigenbasis.eigenvectors[{j}] has {} entries, expected {n}",
                    vector.len()
                )));
            }
            let pair = EigenPair {
                value: value.into(),
                vector: vector.into_iter().map(Complex64::from).collect(),
            };
            if !finite(&pair.value) || !pair.vector.iter().all(finite) {
                return Err(Error::Parse(format!("eigenbasis pair {j} is not finite")));
            }
            Ok(pair)
        })
        .collect()
}

pub fn load_problem(path: impl AsRef<Path>) -> Result<ProblemFile> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    ProblemFile::parse(&text).map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        Error::Dimension(msg) => Error::Dimension(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// Adds independent uniform noise from `[-magnitude, magnitude]` to every
/// nonzero entry (real and imaginary parts separately, the latter only when
/// nonzero). Zero entries stay exactly zero, so the pattern is preserved.
pub fn perturb_nonzero_entries(a: &ComplexDenseMatrix, magnitude: f64, seed: u64) -> Result<ComplexDenseMatrix> {
    if !(magnitude.is_finite() && magnitude >= 0.0) {
        return Err(Error::InvalidConfig(format!("perturbation magnitude {magnitude}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let entries = a
        .entries()
        .iter()
        .map(|&z| {
            if z == Complex64::new(0.0, 0.0) || magnitude == 0.0 {
                return z;
            }
            let re = z.re + rng.random_range(-magnitude..=magnitude);
            let im = if z.im != 0.0 {
                z.im + rng.random_range(-magnitude..=magnitude)
            } else {
                0.0
            };
            Complex64::new(re, im)
        })
        .collect();
    ComplexDenseMatrix::new(a.rows(), a.cols(), entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::eq7;
    use proptest::prelude::*;

    const EQ7_JSON: &str = r#"{
  "n": 5,
  "matrix": [
    [3, 1.5, -1.5, -1, 0.5],
    [0, 2, 0, 0, 0],
    [-2, -1.5, 2.5, -1, -0.5],
    [0, 0, 0, 3, 0],
    [2, 1.5, 1.5, 1, 4.5]
  ]
}"#;

    #[test]
    fn loads_eq7() {
        let p = ProblemFile::parse(EQ7_JSON).unwrap();
        assert_eq!(p.n(), 5);
        assert_eq!(p.matrix, eq7());
        assert!(p.eigenbasis.is_none());
    }

    #[test]
    fn text_format() {
        let p = ProblemFile::parse("# two states\n1 0\n0.5 2 # trailing\n\n").unwrap();
        assert_eq!(p.n(), 2);
        assert_eq!(p.matrix.get(1, 0), Complex64::new(0.5, 0.0));
        let err = ProblemFile::parse("1 0\n0 x\n").unwrap_err();
        assert!(err.to_string().contains("line 2, field 2"), "{err}");
        assert!(matches!(ProblemFile::parse("1 0\n0\n"), Err(Error::Dimension(_))));
    }

    #[test]
    fn eigenbasis_is_loaded() {
        let text = r#"{"n": 2, "matrix": [[1, 0], [0, [2, 0]]],
            "eigenbasis": {"eigenvalues": [2, 1], "eigenvectors": [[0, 1], [[1, 0], 0]]}}"#;
        let p = ProblemFile::parse(text).unwrap();
        let pairs = p.eigenbasis.unwrap();
        assert_eq!(pairs[0].value, Complex64::new(2.0, 0.0));
        assert_eq!(pairs[1].vector, vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
    }

    #[test]
    fn wrong_eigenpair_count() {
        let text = r#"{"n": 2, "matrix": [[1, 0], [0, 2]],
            "eigenbasis": {"eigenvalues": [2], "eigenvectors": [[0, 1]]}}"#;
        let err = ProblemFile::parse(text).unwrap_err();
        assert!(matches!(err, Error::Dimension(ref m) if m.contains("eigenvalues")), "{err}");
    }

    #[test]
    fn parse_errors_carry_position() {
        let err = ProblemFile::parse("{\n  \"n\": 2,\n  \"matrix\": [[1, 0], [0, \"x\"]]\n}").unwrap_err();
        assert!(matches!(err, Error::Parse(ref m) if m.contains("line 3")), "{err}");
        let err = ProblemFile::parse(r#"{"n": 2, "matrix": [[1, 0]]}"#).unwrap_err();
        assert!(matches!(err, Error::Dimension(_)));
        let err = ProblemFile::parse(r#"{"n": 1, "matrix": [[1]], "extra": 0}"#).unwrap_err();
        assert!(matches!(err, Error::Parse(_)));
    }

    #[test]
    fn perturbation_keeps_pattern_and_is_seeded() {
        let a = eq7();
        let p1 = perturb_nonzero_entries(&a, 1e-10, 7).unwrap();
        let p2 = perturb_nonzero_entries(&a, 1e-10, 7).unwrap();
        let p3 = perturb_nonzero_entries(&a, 1e-10, 8).unwrap();
        assert_eq!(p1, p2);
        assert_ne!(p1, p3);
        for (x, y) in a.entries().iter().zip(p1.entries()) {
            assert_eq!(*x == Complex64::new(0.0, 0.0), *y == Complex64::new(0.0, 0.0));
            assert!((x - y).norm() <= 1e-10);
        }
    }

    fn problems() -> impl Strategy<Value = ProblemFile> {
        (1usize..=4).prop_flat_map(|n| {
            (
                proptest::collection::vec((-1e6f64..1e6, -1e6f64..1e6), n * n),
                proptest::option::of(proptest::collection::vec((-1e3f64..1e3, -1e3f64..1e3), n * (n + 1))),
                proptest::option::of(1e-16f64..1e-2),
            )
                .prop_map(move |(entries, basis, zero_tol)| {
                    let c = |(re, im): (f64, f64)| Complex64::new(re, im);
                    let matrix = ComplexDenseMatrix::new(n, n, entries.into_iter().map(c).collect()).unwrap();
                    let eigenbasis = basis.map(|flat| {
                        flat.chunks(n + 1)
                            .map(|ch| EigenPair {
                                value: c(ch[0]),
                                vector: ch[1..].iter().copied().map(c).collect(),
                            })
                            .collect()
                    });
                    ProblemFile {
                        matrix,
                        eigenbasis,
                        tolerances: ToleranceOverrides {
                            zero_tol,
                            ..Default::default()
                        },
                    }
                })
        })
    }

    proptest! {
        #[test]
        fn json_round_trip(p in problems()) {
            let again = ProblemFile::parse(&p.to_json_string()).unwrap();
            prop_assert_eq!(again, p);
        }
    }
}
