//! Experiment engine: configs, scheme × N sweeps, convergence tables.
//!
//! Rates are measured the way the benchmark tables report them, from the
//! self-difference `‖u^N(T) - u^{2N}(T)‖` of consecutive step counts.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cq::{cq_weights, discrete_convolve};
use crate::error::{Error, Result};
use crate::exec::{par_map, Execution};
use crate::mittag_leffler::{ml, MLParams};
use crate::oracle::{exact_solution, SeparableProblem};
use crate::quadrature::{jacobi_rule, DEFAULT_NODES};
use crate::solver::{check_compatible, solve, SchemeKind, SolverOptions, TimeGrid};
use crate::source::{Profile, SourceSpec, SourceTerm, TimeProfile};
use crate::space::{GridFunction, SpaceMode, SpatialOperator};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpaceKind {
    Cheb,
    Fd,
    /// `A = -λ₁`, one unknown.
    Scalar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Composition {
    Product,
    Convolution,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitialData {
    /// `v(x) = sin(x)√(1 - x²)`
    Example,
    Zero,
    /// `v = φ₁`
    Eigen1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceKind {
    /// `(1 + t^μ + t^{αμ}) ∘ (1-t)^β e^x (1 + χ_{(0,1)}(x))`
    Example,
    Zero,
    /// `t^μ φ₁(x)`
    Eigen1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Table,
    #[default]
    Both,
}

/// How differences between two discrete solutions are measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormKind {
    /// Plain Euclidean norm of the nodal values.
    #[default]
    Nodal,
    /// Quadrature-weighted `L²` norm of the operator.
    L2,
}

fn default_version() -> u32 {
    SCHEMA_VERSION
}
fn default_t() -> f64 {
    1.0
}
fn default_space() -> SpaceKind {
    SpaceKind::Cheb
}
fn default_resolution() -> usize {
    40
}
fn default_operator() -> Composition {
    Composition::Product
}
fn default_initial() -> InitialData {
    InitialData::Example
}
fn default_source() -> SourceKind {
    SourceKind::Example
}
fn default_nodes() -> usize {
    DEFAULT_NODES
}

/// Flat JSON experiment description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_version")]
    pub schema_version: u32,
    #[serde(default)]
    pub name: Option<String>,
    pub alpha: f64,
    #[serde(rename = "T", default = "default_t")]
    pub t_final: f64,
    pub schemes: Vec<SchemeKind>,
    #[serde(rename = "N")]
    pub n_list: Vec<usize>,
    #[serde(default = "default_space")]
    pub space: SpaceKind,
    /// Chebyshev degree or number of interior finite-difference points.
    #[serde(default = "default_resolution")]
    pub resolution: usize,
    #[serde(default)]
    pub norm: NormKind,
    #[serde(default)]
    pub mu: f64,
    #[serde(default)]
    pub beta: f64,
    #[serde(default = "default_operator")]
    pub operator: Composition,
    #[serde(default = "default_initial")]
    pub initial: InitialData,
    #[serde(default = "default_source")]
    pub source: SourceKind,
    #[serde(default = "default_nodes")]
    pub quadrature_nodes: usize,
    #[serde(default)]
    pub corr_every_step: bool,
    /// Report incompatible schemes as table cells instead of failing.
    #[serde(default)]
    pub allow_incompatible: bool,
    #[serde(default)]
    pub format: OutputFormat,
}

impl ExperimentConfig {
    /// Example-problem config with `T = 1` and `N = 50..800`.
    pub fn example(
        alpha: f64,
        mu: f64,
        beta: f64,
        operator: Composition,
        schemes: &[SchemeKind],
    ) -> Self {
        ExperimentConfig {
            schema_version: SCHEMA_VERSION,
            name: None,
            alpha,
            t_final: 1.0,
            schemes: schemes.to_vec(),
            n_list: vec![50, 100, 200, 400, 800],
            space: default_space(),
            resolution: default_resolution(),
            norm: NormKind::Nodal,
            mu,
            beta,
            operator,
            initial: InitialData::Example,
            source: SourceKind::Example,
            quadrature_nodes: DEFAULT_NODES,
            corr_every_step: false,
            allow_incompatible: false,
            format: OutputFormat::Both,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::config("json", e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut cfg = Self::from_json(&text)?;
        if cfg.name.is_none() {
            cfg.name = path.file_stem().map(|s| s.to_string_lossy().into_owned());
        }
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn display_name(&self) -> String {
        self.name
            .clone()
            .unwrap_or_else(|| "experiment".to_string())
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::config(
                "schema_version",
                format!("expected {SCHEMA_VERSION}, got {}", self.schema_version),
            ));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::config(
                "alpha",
                format!("must lie in (0, 1), got {}", self.alpha),
            ));
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return Err(Error::config(
                "T",
                format!("must be positive, got {}", self.t_final),
            ));
        }
        if self.schemes.is_empty() {
            return Err(Error::config("schemes", "list is empty"));
        }
        for (i, s) in self.schemes.iter().enumerate() {
            if self.schemes[..i].contains(s) {
                return Err(Error::config("schemes", format!("{s} listed twice")));
            }
        }
        if self.n_list.is_empty() || self.n_list[0] == 0 {
            return Err(Error::config(
                "N",
                "need a nonempty list of positive step counts",
            ));
        }
        for w in self.n_list.windows(2) {
            if w[1] != 2 * w[0] {
                return Err(Error::config(
                    "N",
                    format!(
                        "each entry must double the previous one ({} -> {})",
                        w[0], w[1]
                    ),
                ));
            }
        }
        let min_res = match self.space {
            SpaceKind::Cheb => 2,
            SpaceKind::Fd => 1,
            SpaceKind::Scalar => 0,
        };
        if self.resolution < min_res {
            return Err(Error::config(
                "resolution",
                format!("must be at least {min_res}"),
            ));
        }
        if !self.mu.is_finite() {
            return Err(Error::config("mu", "must be finite"));
        }
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return Err(Error::config(
                "beta",
                format!("must be nonnegative, got {}", self.beta),
            ));
        }
        if self.quadrature_nodes == 0 {
            return Err(Error::config("quadrature_nodes", "must be positive"));
        }
        Ok(())
    }
}

/// Operator, initial value and source assembled from a config.
#[derive(Debug, Clone)]
pub struct Problem {
    pub op: SpatialOperator,
    pub v: GridFunction,
    pub g: SourceSpec,
}

fn first_mode(x: f64) -> f64 {
    (std::f64::consts::PI * (x + 1.0) / 2.0).sin()
}

/// `e^x (1 + χ_{(0,1)}(x))`
pub fn example_profile(x: f64) -> f64 {
    let chi = if x > 0.0 && x < 1.0 { 1.0 } else { 0.0 };
    x.exp() * (1.0 + chi)
}

/// `sin(x)√(1 - x²)`
pub fn example_initial(x: f64) -> f64 {
    x.sin() * (1.0 - x * x).sqrt()
}

pub fn build_problem(cfg: &ExperimentConfig) -> Result<Problem> {
    let mode = match cfg.space {
        SpaceKind::Cheb => SpaceMode::Chebyshev {
            degree: cfg.resolution,
        },
        SpaceKind::Fd => SpaceMode::FiniteDifference {
            interior: cfg.resolution,
        },
        SpaceKind::Scalar => SpaceMode::Scalar {
            lambda: (std::f64::consts::PI / 2.0).powi(2),
        },
    };
    let op = SpatialOperator::new(mode)?;
    // the scalar operator stands for the first mode, so φ₁ becomes 1
    let mode_one = |x: f64| {
        if cfg.space == SpaceKind::Scalar {
            1.0
        } else {
            first_mode(x)
        }
    };

    let v = match cfg.initial {
        InitialData::Example => op.sample(example_initial),
        InitialData::Zero => GridFunction::zeros(op.dim()),
        InitialData::Eigen1 => op.sample(mode_one),
    };

    let terms = match cfg.source {
        SourceKind::Zero => vec![SourceTerm::Monomial {
            mu: 0.0,
            q: GridFunction::zeros(op.dim()),
        }],
        SourceKind::Eigen1 => vec![SourceTerm::Monomial {
            mu: cfg.mu,
            q: op.sample(mode_one),
        }],
        SourceKind::Example => {
            let f = Profile::separable(
                TimeProfile::OneMinusPower(cfg.beta),
                op.sample(example_profile),
            );
            [0.0, cfg.mu, cfg.alpha * cfg.mu]
                .iter()
                .map(|&mu| match cfg.operator {
                    Composition::Product => SourceTerm::Product { mu, f: f.clone() },
                    Composition::Convolution => SourceTerm::Convolution { mu, f: f.clone() },
                })
                .collect()
        }
    };
    let g = SourceSpec::with_rule_size(terms, cfg.quadrature_nodes).map_err(|e| match e {
        Error::InvalidParameter { name, reason } => Error::config(name, reason),
        e => e,
    })?;
    Ok(Problem { op, v, g })
}

/// `‖u_A - u_B‖` in the operator's discrete `L²` norm.
pub fn self_difference(op: &SpatialOperator, a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    op.discrete_l2_norm(&diff)
}

/// `‖a - b‖` in the chosen norm.
pub fn error_norm(norm: NormKind, op: &SpatialOperator, a: &[f64], b: &[f64]) -> Result<f64> {
    match norm {
        NormKind::L2 => self_difference(op, a, b),
        NormKind::Nodal => {
            if a.len() != b.len() {
                return Err(Error::DimensionMismatch {
                    expected: a.len(),
                    actual: b.len(),
                });
            }
            Ok(a.iter()
                .zip(b)
                .map(|(x, y)| (x - y).powi(2))
                .sum::<f64>()
                .sqrt())
        }
    }
}

/// `log₂(e_H / e_{H/2})`; NaN unless both errors are positive and finite.
pub fn empirical_rate(e_h: f64, e_half: f64) -> f64 {
    if e_h > 0.0 && e_half > 0.0 && e_h.is_finite() && e_half.is_finite() {
        (e_h / e_half).log2()
    } else {
        f64::NAN
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub n: usize,
    pub error: f64,
    /// Rate against the previous row; absent on the first row.
    pub rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TableStatus {
    Ok,
    Incompatible(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub scheme: SchemeKind,
    pub rows: Vec<TableRow>,
    pub status: TableStatus,
}

impl ConvergenceTable {
    pub fn from_errors(scheme: SchemeKind, ns: &[usize], errors: &[f64]) -> Self {
        let rows = ns
            .iter()
            .zip(errors)
            .enumerate()
            .map(|(i, (&n, &error))| TableRow {
                n,
                error,
                rate: (i > 0).then(|| empirical_rate(errors[i - 1], error)),
            })
            .collect();
        ConvergenceTable {
            scheme,
            rows,
            status: TableStatus::Ok,
        }
    }

    pub fn errors(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.error).collect()
    }

    /// Rates of rows `1..`.
    pub fn rates(&self) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.rate).collect()
    }

    pub fn row(&self, n: usize) -> Option<&TableRow> {
        self.rows.iter().find(|r| r.n == n)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub name: String,
    pub tables: Vec<ConvergenceTable>,
}

impl ExperimentReport {
    pub fn table(&self, scheme: SchemeKind) -> Option<&ConvergenceTable> {
        self.tables.iter().find(|t| t.scheme == scheme)
    }

    /// `scheme,N,error,rate` with NaN spelled `NaN`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("scheme,N,error,rate\n");
        for t in &self.tables {
            match &t.status {
                TableStatus::Incompatible(_) => {
                    for r in &t.rows {
                        let _ = writeln!(out, "{},{},incompatible,", t.scheme, r.n);
                    }
                }
                TableStatus::Ok => {
                    for r in &t.rows {
                        let rate = r.rate.map(fmt_rate).unwrap_or_default();
                        let _ =
                            writeln!(out, "{},{},{},{}", t.scheme, r.n, fmt_error(r.error), rate);
                    }
                }
            }
        }
        out
    }

    /// Errors across, rates underneath, one block per scheme.
    pub fn to_table(&self) -> String {
        let ns: Vec<usize> = self
            .tables
            .first()
            .map(|t| t.rows.iter().map(|r| r.n).collect())
            .unwrap_or_default();
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.name);
        let _ = write!(out, "{:<11}", "scheme");
        for n in &ns {
            let _ = write!(out, " {:>12}", format!("N={n}"));
        }
        out.push('\n');
        for t in &self.tables {
            let _ = write!(out, "{:<11}", t.scheme.name());
            match &t.status {
                TableStatus::Incompatible(reason) => {
                    let _ = writeln!(out, " incompatible: {reason}");
                    continue;
                }
                TableStatus::Ok => {}
            }
            for r in &t.rows {
                let _ = write!(out, " {:>12}", fmt_error(r.error));
            }
            out.push('\n');
            let _ = write!(out, "{:<11}", "  rate");
            for r in &t.rows {
                let cell = r.rate.map(fmt_rate).unwrap_or_default();
                let _ = write!(out, " {cell:>12}");
            }
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, dir: &Path) -> Result<std::path::PathBuf> {
        std::fs::create_dir_all(dir)?;
        let path = dir.join(format!("{}.csv", self.name));
        std::fs::write(&path, self.to_csv())?;
        Ok(path)
    }
}

fn fmt_error(e: f64) -> String {
    if e.is_nan() {
        "NaN".to_string()
    } else {
        format!("{e:.4e}")
    }
}

fn fmt_rate(r: f64) -> String {
    if r.is_nan() {
        "NaN".to_string()
    } else {
        format!("{r:.4}")
    }
}

fn solver_options(cfg: &ExperimentConfig, exec: Execution) -> SolverOptions {
    SolverOptions {
        corr_every_step: cfg.corr_every_step,
        // one level of parallelism is enough: the sweep is already parallel
        execution: Some(if exec.is_parallel() {
            Execution::Sequential
        } else {
            exec
        }),
    }
}

/// Final-time solution; NaN is returned only when the scheme needed an
/// infinite `g⁰`, anything else non-finite is an error.
fn final_solution(
    scheme: SchemeKind,
    n: usize,
    cfg: &ExperimentConfig,
    problem: &Problem,
    opts: &SolverOptions,
) -> Result<GridFunction> {
    let grid = TimeGrid::new(cfg.t_final, n)?;
    let r = solve(
        scheme,
        cfg.alpha,
        &grid,
        &problem.op,
        &problem.v,
        &problem.g,
        opts,
    )?;
    let u = r.u_final();
    if !u.is_finite() && !r.diagnostics.singular_start {
        return Err(Error::Diverged {
            scheme: scheme.name().to_string(),
            steps: n,
        });
    }
    Ok(u)
}

/// Splits schemes into runnable ones and incompatible table stubs.
fn screen_schemes(
    cfg: &ExperimentConfig,
    problem: &Problem,
) -> Result<(Vec<SchemeKind>, Vec<ConvergenceTable>)> {
    let mut runnable = Vec::new();
    let mut stubs = Vec::new();
    for &s in &cfg.schemes {
        match check_compatible(s, &problem.g) {
            Ok(()) => runnable.push(s),
            Err(e @ Error::IncompatibleScheme { .. }) if cfg.allow_incompatible => stubs.push(ConvergenceTable {
                scheme: s,
                rows: cfg
                    .n_list
                    .iter()
                    .map(|&n| TableRow {
                        n,
                        error: f64::NAN,
                        rate: None,
                    })
                    .collect(),
                status: TableStatus::Incompatible(e.to_string()),
            }),
            Err(Error::IncompatibleScheme { scheme, mu, minimal }) => {
                return Err(Error::config(
                    "schemes",
                    format!("{scheme} cannot integrate a t^{mu} source; use {minimal} or set allow_incompatible"),
                ))
            }
            Err(e) => return Err(e),
        }
    }
    Ok((runnable, stubs))
}

/// Merges computed tables and stubs back into config order.
fn assemble(
    cfg: &ExperimentConfig,
    mut tables: Vec<ConvergenceTable>,
    stubs: Vec<ConvergenceTable>,
) -> ExperimentReport {
    let mut all = tables.drain(..).chain(stubs).collect::<Vec<_>>();
    all.sort_by_key(|t| cfg.schemes.iter().position(|s| *s == t.scheme));
    ExperimentReport {
        name: cfg.display_name(),
        tables: all,
    }
}

/// Self-convergence sweep: every scheme at every `N` plus `2·N_last`.
pub fn run_experiment(cfg: &ExperimentConfig, exec: Execution) -> Result<ExperimentReport> {
    cfg.validate()?;
    let problem = build_problem(cfg)?;
    let (runnable, stubs) = screen_schemes(cfg, &problem)?;

    let mut ns = cfg.n_list.clone();
    ns.push(2 * cfg.n_list[cfg.n_list.len() - 1]);
    let tasks: Vec<(SchemeKind, usize)> = runnable
        .iter()
        .flat_map(|&s| ns.iter().map(move |&n| (s, n)))
        .collect();
    let opts = solver_options(cfg, exec);
    let solutions = par_map(exec, &tasks, |&(s, n)| {
        final_solution(s, n, cfg, &problem, &opts)
    });
    let solutions: Vec<GridFunction> = solutions.into_iter().collect::<Result<_>>()?;

    let mut tables = Vec::new();
    for (i, &s) in runnable.iter().enumerate() {
        let finals = &solutions[i * ns.len()..(i + 1) * ns.len()];
        let errors = finals
            .windows(2)
            .map(|w| error_norm(cfg.norm, &problem.op, &w[0], &w[1]))
            .collect::<Result<Vec<f64>>>()?;
        tables.push(ConvergenceTable::from_errors(s, &cfg.n_list, &errors));
    }
    Ok(assemble(cfg, tables, stubs))
}

/// The exact solution available for a config, if any.
pub fn separable_problem(cfg: &ExperimentConfig) -> Result<SeparableProblem> {
    let v = match cfg.initial {
        InitialData::Zero => 0.0,
        InitialData::Eigen1 => 1.0,
        InitialData::Example => {
            return Err(Error::config(
                "initial",
                "oracle needs `zero` or `eigen1` initial data",
            ));
        }
    };
    let q = match cfg.source {
        SourceKind::Zero => 0.0,
        SourceKind::Eigen1 => 1.0,
        SourceKind::Example => {
            return Err(Error::config(
                "source",
                "oracle needs a `zero` or `eigen1` source",
            ));
        }
    };
    let mu = if q == 0.0 { 0.0 } else { cfg.mu };
    let p = if cfg.space == SpaceKind::Scalar {
        SeparableProblem::scalar(cfg.alpha, (std::f64::consts::PI / 2.0).powi(2), mu, v, q)
    } else {
        SeparableProblem::eigen(cfg.alpha, mu, &[(1, v, q)])
    };
    p.map_err(|e| match e {
        Error::InvalidParameter { name, reason } => Error::config(name, reason),
        e => e,
    })
}

/// Direct errors `‖u^N(T) - u(T)‖` against the separable exact solution.
pub fn run_oracle_check(cfg: &ExperimentConfig, exec: Execution) -> Result<ExperimentReport> {
    cfg.validate()?;
    let exact_problem = separable_problem(cfg)?;
    let problem = build_problem(cfg)?;
    let exact = exact_solution(&exact_problem, cfg.t_final, problem.op.nodes())?;
    let (runnable, stubs) = screen_schemes(cfg, &problem)?;

    let tasks: Vec<(SchemeKind, usize)> = runnable
        .iter()
        .flat_map(|&s| cfg.n_list.iter().map(move |&n| (s, n)))
        .collect();
    let opts = solver_options(cfg, exec);
    let errors = par_map(exec, &tasks, |&(s, n)| {
        let u = final_solution(s, n, cfg, &problem, &opts)?;
        error_norm(cfg.norm, &problem.op, &u, &exact)
    });
    let errors: Vec<f64> = errors.into_iter().collect::<Result<_>>()?;
    let k = cfg.n_list.len();
    let tables = runnable
        .iter()
        .enumerate()
        .map(|(i, &s)| ConvergenceTable::from_errors(s, &cfg.n_list, &errors[i * k..(i + 1) * k]))
        .collect();
    Ok(assemble(cfg, tables, stubs))
}

/// Outcome of one self-test check.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, value: f64, tol: f64) -> CheckResult {
    CheckResult {
        name,
        passed: value <= tol,
        detail: format!("{value:.3e} (tol {tol:.0e})"),
    }
}

/// Quick invariant suite for `selftest`.
pub fn selftest() -> Vec<CheckResult> {
    let mut out = Vec::new();

    let worst_inverse = [0.3, 0.5, 0.7, 0.99]
        .iter()
        .map(|&a| {
            let n = 64;
            let w = cq_weights(a, n);
            let inv = cq_weights(-a, n);
            let hist: Vec<Vec<f64>> = (0..=n).map(|j| vec![inv[j]]).collect();
            (0..=n)
                .map(|m| {
                    let c = discrete_convolve(w.as_slice(), &hist, m)
                        .map(|v| v[0])
                        .unwrap_or(f64::NAN);
                    (c - if m == 0 { 1.0 } else { 0.0 }).abs()
                })
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max);
    out.push(check("cq inverse convolution", worst_inverse, 1e-12));

    let moments = (|| -> Result<f64> {
        let mut worst: f64 = 0.0;
        for (a, b) in [(-0.5, 0.0), (0.3, 1.9), (-0.8, 2.0)] {
            let rule = jacobi_rule(a, b, 16)?;
            for p in 0..=20 {
                let exact = crate::gamma::beta(a + 1.0 + p as f64, b + 1.0);
                let got = rule.integrate_scalar(|s| s.powi(p))?;
                worst = worst.max(((got - exact) / exact).abs());
            }
        }
        Ok(worst)
    })()
    .unwrap_or(f64::NAN);
    out.push(check("Gauss-Jacobi moments", moments, 1e-12));

    let recurrence = (|| -> Result<f64> {
        let mut worst: f64 = 0.0;
        for (a, b) in [(0.5, 1.0), (0.7, 0.7), (0.3, 1.3)] {
            for z in [-1.0, -0.5, 0.5, 1.0] {
                let l = ml(MLParams::new(a, b)?, z)?;
                let r = ml(MLParams::new(a, a + b)?, z)?;
                worst = worst.max((l - crate::gamma::rgamma(b) - z * r).abs() / l.abs().max(1.0));
            }
        }
        Ok(worst)
    })()
    .unwrap_or(f64::NAN);
    out.push(check("Mittag-Leffler recurrence", recurrence, 1e-12));

    let eigen = (|| -> Result<f64> {
        let op = SpatialOperator::chebyshev(16)?;
        let w = op.sample(first_mode);
        let aw = op.apply(&w)?;
        let lam = (std::f64::consts::PI / 2.0).powi(2);
        Ok(aw
            .iter()
            .zip(w.iter())
            .map(|(a, b)| (a + lam * b).abs())
            .fold(0.0, f64::max))
    })()
    .unwrap_or(f64::NAN);
    out.push(check("Chebyshev eigenfunction", eigen, 1e-10));

    let mut cfg =
        ExperimentConfig::example(0.7, -0.8, 0.0, Composition::Product, &[SchemeKind::Id2Bdf2]);
    cfg.n_list = vec![10, 20];
    cfg.resolution = 12;
    let determinism = match (
        run_experiment(&cfg, Execution::Sequential),
        run_experiment(&cfg, Execution::default()),
    ) {
        (Ok(a), Ok(b)) if a.to_csv() == b.to_csv() => 0.0,
        _ => 1.0,
    };
    out.push(CheckResult {
        name: "byte-identical reruns",
        passed: determinism == 0.0,
        detail: if determinism == 0.0 {
            "identical".into()
        } else {
            "differs".into()
        },
    });
    out
}
