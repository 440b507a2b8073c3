//! Python bindings. Matrices are nested sequences of numbers (real or
//! complex); indices are 0-based as in the Rust API.

use ::mincontrol as mc;
use mc::mcp::{McpInput, McpSolution, Mode, SolveOptions};
use mc::numerics::{left_eigenbasis as left_eigenbasis_rs, ComplexDenseMatrix};
use mc::{Complex64, Error};
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

create_exception!(mincontrol, MincontrolError, PyValueError, "Base class of mincontrol errors.");
create_exception!(mincontrol, InputError, MincontrolError, "Malformed input or configuration.");
create_exception!(
    mincontrol,
    UnsolvableError,
    MincontrolError,
    "Well-formed input without a certified answer (not simple, infeasible, ...)."
);

fn to_py(e: Error) -> PyErr {
    let msg = e.to_string();
    match e {
        Error::NotSimple { .. }
        | Error::EigensolveFailed(_)
        | Error::ZeroPattern(_)
        | Error::Infeasible(_)
        | Error::RepairFailed(_)
        | Error::VerificationFailed { .. }
        | Error::MissingSelfLoops(_)
        | Error::TooLarge { .. } => UnsolvableError::new_err(msg),
        _ => InputError::new_err(msg),
    }
}

fn matrix(rows: Vec<Vec<Complex64>>) -> PyResult<ComplexDenseMatrix> {
    ComplexDenseMatrix::from_rows(&rows).map_err(to_py)
}

/// Numerical thresholds; defaults match the library.
#[pyclass(module = "mincontrol", from_py_object)]
#[derive(Clone, Copy)]
struct Tolerances {
    #[pyo3(get, set)]
    residual_tol: f64,
    #[pyo3(get, set)]
    gap_tol: f64,
    #[pyo3(get, set)]
    rank_tol: Option<f64>,
    #[pyo3(get, set)]
    zero_tol: f64,
    #[pyo3(get, set)]
    tau: f64,
}

impl From<Tolerances> for mc::Tolerances {
    fn from(t: Tolerances) -> Self {
        mc::Tolerances {
            residual_tol: t.residual_tol,
            gap_tol: t.gap_tol,
            rank_tol: t.rank_tol,
            zero_tol: t.zero_tol,
            tau: t.tau,
        }
    }
}

#[pymethods]
impl Tolerances {
    #[new]
    #[pyo3(signature = (residual_tol=None, gap_tol=None, rank_tol=None, zero_tol=None, tau=None))]
    fn new(
        residual_tol: Option<f64>,
        gap_tol: Option<f64>,
        rank_tol: Option<f64>,
        zero_tol: Option<f64>,
        tau: Option<f64>,
    ) -> PyResult<Self> {
        let d = mc::Tolerances::default();
        let t = mc::Tolerances {
            residual_tol: residual_tol.unwrap_or(d.residual_tol),
            gap_tol: gap_tol.unwrap_or(d.gap_tol),
            rank_tol: rank_tol.or(d.rank_tol),
            zero_tol: zero_tol.unwrap_or(d.zero_tol),
            tau: tau.unwrap_or(d.tau),
        };
        t.validate().map_err(to_py)?;
        Ok(Self {
            residual_tol: t.residual_tol,
            gap_tol: t.gap_tol,
            rank_tol: t.rank_tol,
            zero_tol: t.zero_tol,
            tau: t.tau,
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "Tolerances(residual_tol={:e}, gap_tol={:e}, rank_tol={}, zero_tol={:e}, tau={:e})",
            self.residual_tol,
            self.gap_tol,
            self.rank_tol.map_or("None".into(), |r| format!("{r:e}")),
            self.zero_tol,
            self.tau
        )
    }
}

fn tolerances(t: Option<Tolerances>) -> mc::Tolerances {
    t.map(Into::into).unwrap_or_default()
}

/// Result of `solve_mcp`.
#[pyclass(module = "mincontrol", frozen)]
struct Solution {
    inner: McpSolution,
    verified: bool,
}

#[pymethods]
impl Solution {
    #[getter]
    fn mode(&self) -> &'static str {
        match self.inner.mode {
            Mode::Exact => "exact",
            Mode::Greedy => "greedy",
        }
    }

    /// Chosen states (0-based).
    #[getter]
    fn support(&self) -> Vec<usize> {
        self.inner.support().to_vec()
    }

    /// Pattern string such as "0***0".
    #[getter]
    fn pattern(&self) -> String {
        self.inner.pattern.to_string()
    }

    #[getter]
    fn vector(&self) -> Vec<Complex64> {
        self.inner.vector.clone()
    }

    #[getter]
    fn eigenvalues(&self) -> Vec<Complex64> {
        self.inner.eigenbasis.eigenvalues()
    }

    /// Pattern of each left eigenvector.
    #[getter]
    fn patterns(&self) -> Vec<String> {
        self.inner.patterns.iter().map(ToString::to_string).collect()
    }

    /// `sets[i]`: eigenvectors nonzero at state `i`.
    #[getter]
    fn sets(&self) -> Vec<Vec<usize>> {
        self.inner.instance.sets().to_vec()
    }

    /// Whether the certificate accepted the realized input.
    #[getter]
    fn verified(&self) -> bool {
        self.verified
    }

    #[getter]
    fn kalman_rank(&self) -> Option<usize> {
        self.inner.certificate.kalman.as_ref().map(|k| k.rank)
    }

    #[getter]
    fn consistent(&self) -> bool {
        self.inner.certificate.consistent
    }

    fn __repr__(&self) -> String {
        format!(
            "Solution(mode={:?}, pattern={:?}, support={:?}, verified={})",
            self.mode(),
            self.pattern(),
            self.support(),
            if self.verified { "True" } else { "False" }
        )
    }
}

/// Left eigenpairs `(lambda, v)` with `v^H A = lambda v^H`, sorted by
/// decreasing real part.
#[pyfunction]
#[pyo3(signature = (a, tolerances=None))]
fn left_eigenbasis(a: Vec<Vec<Complex64>>, tolerances: Option<Tolerances>) -> PyResult<Vec<(Complex64, Vec<Complex64>)>> {
    let t = self::tolerances(tolerances);
    let basis = left_eigenbasis_rs(&matrix(a)?, t.residual_tol, t.gap_tol).map_err(to_py)?;
    Ok(basis.pairs().iter().map(|p| (p.value, p.vector.clone())).collect())
}

#[pyfunction]
#[pyo3(signature = (v, zero_tol=mc::tolerance::DEFAULT_ZERO_TOL))]
fn structural_pattern(v: Vec<Complex64>, zero_tol: f64) -> String {
    mc::structure::structural_pattern(&v, zero_tol).to_string()
}

/// Sparsest input making `(A, b)` controllable. Returns the solution even
/// when the certificate fails; check `Solution.verified`.
#[pyfunction]
#[pyo3(signature = (a, mode="exact", tolerances=None))]
fn solve_mcp(py: Python<'_>, a: Vec<Vec<Complex64>>, mode: &str, tolerances: Option<Tolerances>) -> PyResult<Solution> {
    let mode = match mode {
        "exact" => Mode::Exact,
        "greedy" => Mode::Greedy,
        other => return Err(InputError::new_err(format!("mode must be 'exact' or 'greedy', got {other:?}"))),
    };
    let a = matrix(a)?;
    let options = SolveOptions {
        tolerances: self::tolerances(tolerances),
        ..SolveOptions::default()
    };
    let result = py.detach(|| mc::solve_mcp(McpInput::Matrix(&a), mode, &options));
    match result {
        Ok(inner) => Ok(Solution { inner, verified: true }),
        Err(Error::VerificationFailed { solution, .. }) => Ok(Solution {
            inner: *solution,
            verified: false,
        }),
        Err(e) => Err(to_py(e)),
    }
}

/// Structural solution on the zero pattern of `A` (full diagonal required).
#[pyfunction]
#[pyo3(signature = (a, zero_tol=mc::tolerance::DEFAULT_ZERO_TOL))]
fn solve_mscp(a: Vec<Vec<Complex64>>, zero_tol: f64) -> PyResult<String> {
    let pattern = mc::structure::matrix_pattern(&matrix(a)?, zero_tol);
    Ok(mc::structural::solve_mscp(&pattern).map_err(to_py)?.to_string())
}

/// `{"kalman": bool, "pbh_eigenvalue": bool, "pbh_eigenvector": bool,
/// "consistent": bool, "kalman_rank": int}`.
#[pyfunction]
#[pyo3(signature = (a, b, tolerances=None))]
fn verify(
    py: Python<'_>,
    a: Vec<Vec<Complex64>>,
    b: Vec<Complex64>,
    tolerances: Option<Tolerances>,
) -> PyResult<Py<pyo3::types::PyDict>> {
    let a = matrix(a)?;
    let t = self::tolerances(tolerances);
    let basis = left_eigenbasis_rs(&a, t.residual_tol, t.gap_tol).map_err(to_py)?;
    let r = mc::verify::verify(Some(&a), Some(&basis), &b, &t).map_err(to_py)?;
    let d = pyo3::types::PyDict::new(py);
    let k = r.kalman.as_ref().expect("matrix given");
    d.set_item("kalman", k.controllable)?;
    d.set_item("kalman_rank", k.rank)?;
    d.set_item("pbh_eigenvalue", r.pbh_eigenvalue.as_ref().map(|p| p.controllable))?;
    d.set_item("pbh_eigenvector", r.pbh_eigenvector.as_ref().map(|p| p.controllable))?;
    d.set_item("consistent", r.consistent)?;
    Ok(d.unbind())
}

/// Brute-force minimum support size and all optimal supports.
#[pyfunction]
#[pyo3(signature = (a, n_limit=mc::oracle::DEFAULT_N_LIMIT, tolerances=None))]
fn brute_force_mcp(
    py: Python<'_>,
    a: Vec<Vec<Complex64>>,
    n_limit: usize,
    tolerances: Option<Tolerances>,
) -> PyResult<(usize, Vec<Vec<usize>>)> {
    let a = matrix(a)?;
    let t = self::tolerances(tolerances);
    let r = py.detach(|| mc::oracle::brute_force_mcp(&a, n_limit, &t)).map_err(to_py)?;
    Ok((r.min_support_size, r.optimal_supports))
}

/// Minimum set cover; returns the lexicographically first optimal indices.
#[pyfunction]
fn set_cover_exact(universe_size: usize, sets: Vec<Vec<usize>>) -> PyResult<Vec<usize>> {
    let instance = mc::SetCoverInstance::new(universe_size, sets).map_err(to_py)?;
    Ok(instance.solve_exact().map_err(to_py)?.indices)
}

#[pyfunction]
fn set_cover_greedy(universe_size: usize, sets: Vec<Vec<usize>>) -> PyResult<Vec<usize>> {
    let instance = mc::SetCoverInstance::new(universe_size, sets).map_err(to_py)?;
    Ok(instance.solve_greedy().indices)
}

/// Uniform noise in `[-magnitude, magnitude]` on the nonzero entries.
#[pyfunction]
fn perturb(a: Vec<Vec<Complex64>>, magnitude: f64, seed: u64) -> PyResult<Vec<Vec<Complex64>>> {
    let p = mc::problem::perturb_nonzero_entries(&matrix(a)?, magnitude, seed).map_err(to_py)?;
    Ok(p.to_rows())
}

/// Matrix of a problem file (JSON or plain text).
#[pyfunction]
fn load_problem(path: std::path::PathBuf) -> PyResult<Vec<Vec<Complex64>>> {
    Ok(mc::problem::load_problem(path).map_err(to_py)?.matrix.to_rows())
}

/// The 5-state worked example.
#[pyfunction]
fn worked_example() -> Vec<Vec<Complex64>> {
    mc::fixtures::worked_example().to_rows()
}

#[pymodule]
#[pyo3(name = "mincontrol")]
fn mincontrol_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add("MincontrolError", py.get_type::<MincontrolError>())?;
    m.add("InputError", py.get_type::<InputError>())?;
    m.add("UnsolvableError", py.get_type::<UnsolvableError>())?;
    m.add_class::<Tolerances>()?;
    m.add_class::<Solution>()?;
    m.add_function(wrap_pyfunction!(left_eigenbasis, m)?)?;
    m.add_function(wrap_pyfunction!(structural_pattern, m)?)?;
    m.add_function(wrap_pyfunction!(solve_mcp, m)?)?;
    m.add_function(wrap_pyfunction!(solve_mscp, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(brute_force_mcp, m)?)?;
    m.add_function(wrap_pyfunction!(set_cover_exact, m)?)?;
    m.add_function(wrap_pyfunction!(set_cover_greedy, m)?)?;
    m.add_function(wrap_pyfunction!(perturb, m)?)?;
    m.add_function(wrap_pyfunction!(load_problem, m)?)?;
    m.add_function(wrap_pyfunction!(worked_example, m)?)?;
    Ok(())
}
