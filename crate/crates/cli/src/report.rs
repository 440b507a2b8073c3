//! Report types. State, eigenvector and set indices are 1-based here, as
//! users read them; the library is 0-based throughout.

use std::fmt::Write as _;

use mincontrol::oracle::OracleResult;
use mincontrol::verify::{KalmanCheck, PbhEigenvalueCheck};
use mincontrol::{Complex64, Tolerances, VerificationReport};
use serde::Serialize;

/// Bumped on any incompatible change to the JSON layout; mirrored in
/// `docs/report.schema.json`.
pub const SCHEMA_VERSION: &str = "1.0.0";

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct C(pub [f64; 2]);

impl From<Complex64> for C {
    fn from(z: Complex64) -> Self {
        C([z.re, z.im])
    }
}

pub fn complex_list(v: &[Complex64]) -> Vec<C> {
    v.iter().map(|&z| z.into()).collect()
}

pub fn one_based(v: &[usize]) -> Vec<usize> {
    v.iter().map(|i| i + 1).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    /// A result was produced but could not be certified.
    Unverified,
    /// `verify` found the input uncontrollable.
    Uncontrollable,
    Error,
}

#[derive(Clone, Debug, Serialize)]
pub struct Perturbation {
    pub magnitude: f64,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct InputInfo {
    /// SHA-256 of the problem file bytes.
    pub sha256: String,
    pub n: usize,
    /// `computed` or `supplied`.
    pub eigenbasis: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub perturbation: Option<Perturbation>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Timings {
    pub load_ms: f64,
    pub solve_ms: f64,
    pub total_ms: f64,
}

#[derive(Debug, Serialize)]
pub struct Report<B> {
    pub schema_version: &'static str,
    pub command: &'static str,
    pub status: Status,
    pub input: InputInfo,
    pub tolerances: Tolerances,
    #[serde(flatten)]
    pub body: B,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

#[derive(Debug, Serialize)]
pub struct ErrorReport {
    pub schema_version: &'static str,
    pub command: &'static str,
    pub status: Status,
    pub error: ErrorInfo,
}

#[derive(Debug, Serialize)]
pub struct ErrorInfo {
    pub kind: &'static str,
    pub message: String,
}

#[derive(Debug, Serialize)]
pub struct PbhEigenvectorJson {
    pub controllable: bool,
    /// 1-based index of the first orthogonal eigenvector.
    pub violator: Option<usize>,
    pub min_ratio: f64,
    pub tau: f64,
}

#[derive(Debug, Serialize)]
pub struct VerificationJson {
    /// Verdict of record (Kalman when the matrix is available).
    pub controllable: bool,
    pub consistent: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kalman: Option<KalmanCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pbh_eigenvalue: Option<PbhEigenvalueCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pbh_eigenvector: Option<PbhEigenvectorJson>,
}

impl From<&VerificationReport> for VerificationJson {
    fn from(r: &VerificationReport) -> Self {
        Self {
            controllable: r.controllable(),
            consistent: r.consistent,
            kalman: r.kalman.clone(),
            pbh_eigenvalue: r.pbh_eigenvalue.clone(),
            pbh_eigenvector: r.pbh_eigenvector.as_ref().map(|p| PbhEigenvectorJson {
                controllable: p.controllable,
                violator: p.violator.map(|j| j + 1),
                min_ratio: p.min_ratio,
                tau: p.tau,
            }),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct InstanceJson {
    pub universe_size: usize,
    /// `sets[i]`: eigenvectors with a nonzero entry at state `i + 1`.
    pub sets: Vec<Vec<usize>>,
}

#[derive(Debug, Serialize)]
pub struct CoverJson {
    pub indices: Vec<usize>,
    pub size: usize,
    pub exact: bool,
}

#[derive(Debug, Serialize)]
pub struct TraceJson {
    pub corrections: Vec<usize>,
    /// `[entry, multipliers]`, entry as a 1-based position within the support.
    pub repairs: Vec<[usize; 2]>,
}

#[derive(Debug, Serialize)]
pub struct McpBody {
    pub mode: mincontrol::Mode,
    pub eigenvalues: Vec<C>,
    pub patterns: Vec<String>,
    pub instance: InstanceJson,
    pub cover: CoverJson,
    pub pattern: String,
    pub b: Vec<C>,
    pub realization: TraceJson,
    pub verification: VerificationJson,
}

#[derive(Debug, Serialize)]
pub struct ComponentJson {
    pub states: Vec<usize>,
    pub top_linked: bool,
}

#[derive(Debug, Serialize)]
pub struct MscpBody {
    pub matrix_pattern: Vec<String>,
    pub components: Vec<ComponentJson>,
    pub non_top_linked: usize,
    pub pattern: String,
    pub support: Vec<usize>,
    pub size: usize,
}

#[derive(Debug, Serialize)]
pub struct VerifyBody {
    pub method: &'static str,
    pub b: Vec<C>,
    pub verification: VerificationJson,
}

#[derive(Debug, Serialize)]
pub struct OracleBody {
    pub n_limit: usize,
    pub min_support_size: usize,
    pub optimal_supports: Vec<Vec<usize>>,
    pub verdicts: Vec<SupportVerdictJson>,
    pub all_verified: bool,
}

#[derive(Debug, Serialize)]
pub struct SupportVerdictJson {
    pub support: Vec<usize>,
    pub kalman_rank: Option<usize>,
    pub controllable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl From<&OracleResult> for OracleBody {
    fn from(r: &OracleResult) -> Self {
        Self {
            n_limit: 0,
            min_support_size: r.min_support_size,
            optimal_supports: r.optimal_supports.iter().map(|s| one_based(s)).collect(),
            verdicts: r
                .verdicts
                .iter()
                .map(|v| SupportVerdictJson {
                    support: one_based(&v.support),
                    kalman_rank: v.kalman_rank,
                    controllable: v.controllable,
                    error: v.error.clone(),
                })
                .collect(),
            all_verified: r.all_verified(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct CompareSide {
    pub support: Vec<usize>,
    pub size: usize,
    pub pattern: String,
}

#[derive(Debug, Serialize)]
pub struct CompareBody {
    pub mode: mincontrol::Mode,
    pub mcp: CompareSide,
    /// Whether the MCP input passed verification.
    pub mcp_verified: bool,
    pub mscp: CompareSide,
    /// MCP pattern >= MSCP pattern, entrywise on stars.
    pub dominance: bool,
    pub extra_states: isize,
}

#[derive(Debug, Serialize)]
pub struct EigenPairJson {
    pub value: C,
    pub vector: Vec<C>,
    pub pattern: String,
    pub residual: f64,
}

#[derive(Debug, Serialize)]
pub struct EigBody {
    pub pairs: Vec<EigenPairJson>,
}

pub fn fmt_complex(z: C) -> String {
    let [re, im] = z.0;
    if im == 0.0 {
        format!("{re:.6}")
    } else {
        format!("{re:.6}{}{:.6}i", if im < 0.0 { '-' } else { '+' }, im.abs())
    }
}

fn fmt_vec(v: &[C]) -> String {
    let parts: Vec<String> = v.iter().map(|&z| fmt_complex(z)).collect();
    format!("[{}]", parts.join(", "))
}

fn fmt_set(v: &[usize]) -> String {
    let parts: Vec<String> = v.iter().map(usize::to_string).collect();
    format!("{{{}}}", parts.join(","))
}

fn line(out: &mut String, key: &str, value: impl std::fmt::Display) {
    let _ = writeln!(out, "  {key:<14}{value}");
}

fn verification_lines(out: &mut String, v: &VerificationJson) {
    if let Some(k) = &v.kalman {
        line(
            out,
            "kalman",
            format!("rank {} (rank_tol {:.1e}) -> {}", k.rank, k.rank_tol, verdict(k.controllable)),
        );
    }
    if let Some(p) = &v.pbh_eigenvalue {
        let ranks: Vec<String> = p.ranks.iter().map(usize::to_string).collect();
        line(
            out,
            "pbh-eig",
            format!("ranks [{}] -> {}", ranks.join(", "), verdict(p.controllable)),
        );
    }
    if let Some(p) = &v.pbh_eigenvector {
        let violator = p.violator.map(|j| format!(", orthogonal to v{j}")).unwrap_or_default();
        line(
            out,
            "pbh-vec",
            format!("min ratio {:.3e} (tau {:.1e}){violator} -> {}", p.min_ratio, p.tau, verdict(p.controllable)),
        );
    }
    line(out, "verdict", verdict(v.controllable));
    if !v.consistent {
        line(out, "warning", "tests disagree; verdicts depend on the tolerances above");
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "controllable"
    } else {
        "not controllable"
    }
}

pub trait TextBody {
    fn text(&self, out: &mut String);
}

impl<B: TextBody> Report<B> {
    pub fn to_text(&self) -> String {
        let mut out = format!("{} [{}]\n", self.command, serde_plain(&self.status));
        line(&mut out, "n", self.input.n);
        line(&mut out, "sha256", &self.input.sha256);
        if let Some(p) = &self.input.perturbation {
            line(&mut out, "perturbation", format!("+-{:e} (seed {})", p.magnitude, p.seed));
        }
        if self.input.eigenbasis == "supplied" {
            line(&mut out, "eigenbasis", "supplied");
        }
        self.body.text(&mut out);
        let t = &self.tolerances;
        let rank = t.rank_tol.map_or("default".to_string(), |r| format!("{r:.1e}"));
        line(
            &mut out,
            "tolerances",
            format!(
                "residual {:.1e}, gap {:.1e}, rank {rank}, zero {:.1e}, tau {:.1e}",
                t.residual_tol, t.gap_tol, t.zero_tol, t.tau
            ),
        );
        if let Some(t) = &self.timings {
            line(
                &mut out,
                "time",
                format!("load {:.3} ms, solve {:.3} ms, total {:.3} ms", t.load_ms, t.solve_ms, t.total_ms),
            );
        }
        out
    }
}

fn serde_plain<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v)
        .ok()
        .and_then(|v| v.as_str().map(str::to_owned))
        .unwrap_or_default()
}

impl TextBody for McpBody {
    fn text(&self, out: &mut String) {
        line(out, "mode", serde_plain(&self.mode));
        line(out, "eigenvalues", fmt_vec(&self.eigenvalues));
        for (j, p) in self.patterns.iter().enumerate() {
            line(out, &format!("v{}", j + 1), p);
        }
        let sets: Vec<String> = self
            .instance
            .sets
            .iter()
            .enumerate()
            .map(|(i, s)| format!("S{}={}", i + 1, fmt_set(s)))
            .collect();
        line(out, "sets", sets.join(" "));
        line(
            out,
            "cover",
            format!(
                "{} (size {}, {})",
                fmt_set(&self.cover.indices),
                self.cover.size,
                if self.cover.exact { "optimal" } else { "greedy" }
            ),
        );
        line(out, "pattern", &self.pattern);
        line(out, "b", fmt_vec(&self.b));
        verification_lines(out, &self.verification);
    }
}

impl TextBody for MscpBody {
    fn text(&self, out: &mut String) {
        for (i, row) in self.matrix_pattern.iter().enumerate() {
            line(out, if i == 0 { "A pattern" } else { "" }, row);
        }
        for c in &self.components {
            let tag = if c.top_linked { "" } else { "  (non-top-linked)" };
            line(out, "scc", format!("{}{tag}", fmt_set(&c.states)));
        }
        line(out, "pattern", &self.pattern);
        line(out, "support", format!("{} (size {})", fmt_set(&self.support), self.size));
    }
}

impl TextBody for VerifyBody {
    fn text(&self, out: &mut String) {
        line(out, "method", self.method);
        line(out, "b", fmt_vec(&self.b));
        verification_lines(out, &self.verification);
    }
}

impl TextBody for OracleBody {
    fn text(&self, out: &mut String) {
        line(out, "minimum", self.min_support_size);
        for v in &self.verdicts {
            let rank = v.kalman_rank.map_or("-".to_string(), |r| r.to_string());
            let err = v.error.as_deref().map(|e| format!(" ({e})")).unwrap_or_default();
            line(
                out,
                "support",
                format!("{} kalman rank {rank} -> {}{err}", fmt_set(&v.support), verdict(v.controllable)),
            );
        }
    }
}

impl TextBody for CompareBody {
    fn text(&self, out: &mut String) {
        let verified = if self.mcp_verified { "" } else { ", unverified" };
        line(
            out,
            "mcp",
            format!("{} {} (size {}{verified})", self.mcp.pattern, fmt_set(&self.mcp.support), self.mcp.size),
        );
        line(
            out,
            "mscp",
            format!("{} {} (size {})", self.mscp.pattern, fmt_set(&self.mscp.support), self.mscp.size),
        );
        line(out, "dominance", self.dominance);
        line(out, "extra states", self.extra_states);
    }
}

impl TextBody for EigBody {
    fn text(&self, out: &mut String) {
        for (j, p) in self.pairs.iter().enumerate() {
            line(
                out,
                &format!("v{}", j + 1),
                format!("lambda {}  {}  {}  residual {:.1e}", fmt_complex(p.value), p.pattern, fmt_vec(&p.vector), p.residual),
            );
        }
    }
}
