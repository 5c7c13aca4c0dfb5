//! Time stepping for `∂^α_t u - Au = g`, `u(0) = v`.
//!
//! All schemes advance `V = u - v` with the fractional BDF2 convolution
//! quadrature and differ only in the right-hand side:
//!
//! | scheme    | right-hand side at step `n`                    |
//! |-----------|------------------------------------------------|
//! | BDF2      | `Av + g^n`                                     |
//! | Corr-BDF2 | `(3/2)Av + (1/2)g^0 + g^1` at `n = 1`, else as BDF2 |
//! | ID1-BDF2  | `∂_τ(t Av + J¹g)(t_n)`                         |
//! | ID2-BDF2  | `∂²_τ(t²/2 Av + J²g)(t_n)`                     |
//! | ID3-BDF2  | `∂³_τ(t³/6 Av + J³g)(t_n)`                     |

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::cq::{bdf2_power_weights, cq_weights, power_difference, WeightSequence};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::source::{tabulate_regularized_with, RegularizedSource, SourceSpec};
use crate::space::{GridFunction, SpatialOperator};

/// Uniform partition `t_n = nτ` of `[0, T]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub t_final: f64,
    pub n: usize,
    pub tau: f64,
}

impl TimeGrid {
    pub fn new(t_final: f64, n: usize) -> Result<Self> {
        if !(t_final > 0.0 && t_final.is_finite()) {
            return Err(Error::invalid(
                "T",
                format!("must be positive, got {t_final}"),
            ));
        }
        if n == 0 {
            return Err(Error::invalid("N", "need at least one step"));
        }
        Ok(TimeGrid {
            t_final,
            n,
            tau: t_final / n as f64,
        })
    }

    /// `t_n`, with `t_N = T` exactly.
    pub fn time(&self, n: usize) -> f64 {
        if n == self.n {
            self.t_final
        } else {
            n as f64 * self.tau
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SchemeKind {
    #[serde(rename = "BDF2")]
    Bdf2,
    #[serde(rename = "Corr-BDF2")]
    CorrBdf2,
    #[serde(rename = "ID1-BDF2")]
    Id1Bdf2,
    #[serde(rename = "ID2-BDF2")]
    Id2Bdf2,
    #[serde(rename = "ID3-BDF2")]
    Id3Bdf2,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 5] = [
        SchemeKind::Bdf2,
        SchemeKind::CorrBdf2,
        SchemeKind::Id1Bdf2,
        SchemeKind::Id2Bdf2,
        SchemeKind::Id3Bdf2,
    ];

    /// Order `k` of the time integral applied to the source.
    pub fn regularization(self) -> usize {
        match self {
            SchemeKind::Bdf2 | SchemeKind::CorrBdf2 => 0,
            SchemeKind::Id1Bdf2 => 1,
            SchemeKind::Id2Bdf2 => 2,
            SchemeKind::Id3Bdf2 => 3,
        }
    }

    pub fn with_regularization(k: usize) -> Option<SchemeKind> {
        match k {
            1 => Some(SchemeKind::Id1Bdf2),
            2 => Some(SchemeKind::Id2Bdf2),
            3 => Some(SchemeKind::Id3Bdf2),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::Bdf2 => "BDF2",
            SchemeKind::CorrBdf2 => "Corr-BDF2",
            SchemeKind::Id1Bdf2 => "ID1-BDF2",
            SchemeKind::Id2Bdf2 => "ID2-BDF2",
            SchemeKind::Id3Bdf2 => "ID3-BDF2",
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        match key.as_str() {
            "bdf2" => Ok(SchemeKind::Bdf2),
            "corrbdf2" => Ok(SchemeKind::CorrBdf2),
            "id1bdf2" | "id1" => Ok(SchemeKind::Id1Bdf2),
            "id2bdf2" | "id2" => Ok(SchemeKind::Id2Bdf2),
            "id3bdf2" | "id3" => Ok(SchemeKind::Id3Bdf2),
            _ => Err(Error::invalid("scheme", format!("unknown scheme `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SolverOptions {
    /// Apply the Corr-BDF2 correction at every step rather than only at `n = 1`.
    pub corr_every_step: bool,
    pub execution: Option<Execution>,
}

#[derive(Debug, Clone, Default)]
pub struct Diagnostics {
    /// `max |(cI - A)Vⁿ - bⁿ|` for each step `n = 1..=N`.
    pub residuals: Vec<f64>,
    pub wall_time: Duration,
    /// The source is infinite at `t = 0` and the scheme needed `g⁰`.
    pub singular_start: bool,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub scheme: SchemeKind,
    pub grid: TimeGrid,
    /// `V⁰..V^N` with `V⁰ = 0`.
    pub history: Vec<GridFunction>,
    pub v: GridFunction,
    pub diagnostics: Diagnostics,
}

impl SolveResult {
    /// `uⁿ = Vⁿ + v`.
    pub fn u(&self, n: usize) -> GridFunction {
        let mut u = self.history[n].clone();
        u.axpy(1.0, &self.v);
        u
    }

    pub fn u_final(&self) -> GridFunction {
        self.u(self.grid.n)
    }

    pub fn is_finite(&self) -> bool {
        self.history.iter().all(GridFunction::is_finite)
    }
}

/// Right-hand side for step `n ≥ 1`; `reg` must carry `J^k g` with
/// `k = scheme.regularization()`.
pub fn rhs_at_step(
    scheme: SchemeKind,
    n: usize,
    grid: &TimeGrid,
    op: &SpatialOperator,
    v: &GridFunction,
    reg: &RegularizedSource,
    opts: &SolverOptions,
) -> Result<GridFunction> {
    let av = op.apply(v)?;
    let pw = power_weights(scheme, grid.n)?;
    rhs_from_parts(scheme, n, grid, &av, reg, pw.as_ref(), opts)
}

fn power_weights(scheme: SchemeKind, n: usize) -> Result<Option<WeightSequence>> {
    match scheme.regularization() {
        0 => Ok(None),
        p => bdf2_power_weights(p as i32, n).map(Some),
    }
}

fn factorial(p: usize) -> f64 {
    (1..=p).map(|j| j as f64).product()
}

fn rhs_from_parts(
    scheme: SchemeKind,
    n: usize,
    grid: &TimeGrid,
    av: &GridFunction,
    reg: &RegularizedSource,
    pw: Option<&WeightSequence>,
    opts: &SolverOptions,
) -> Result<GridFunction> {
    if n == 0 || n > grid.n || reg.values.len() <= n {
        return Err(Error::invalid(
            "n",
            format!("step {n} outside 1..={}", grid.n),
        ));
    }
    if reg.k != scheme.regularization() {
        return Err(Error::invalid(
            "reg",
            format!(
                "{scheme} needs J^{} g, got J^{} g",
                scheme.regularization(),
                reg.k
            ),
        ));
    }
    let corrected = scheme == SchemeKind::CorrBdf2 && (n == 1 || opts.corr_every_step);
    match (scheme, pw) {
        (SchemeKind::Bdf2 | SchemeKind::CorrBdf2, _) if !corrected => {
            let mut r = reg.values[n].clone();
            r.axpy(1.0, av);
            Ok(r)
        }
        (SchemeKind::CorrBdf2, _) => {
            if reg.singular_start {
                return Err(Error::SingularAtZero {
                    mu: f64::NEG_INFINITY,
                });
            }
            let mut r = reg.values[n].clone();
            r.axpy(1.5, av);
            r.axpy(0.5, &reg.values[0]);
            Ok(r)
        }
        (_, Some(pw)) => {
            // ∂^p_τ(t^p/p! · Av + J^p g)(t_n)
            let p = scheme.regularization();
            let mut r = av.scaled(power_difference(pw, p, p as f64, n) / factorial(p));
            r.axpy(1.0, &reg.differenced[n]);
            Ok(r)
        }
        _ => unreachable!("weights prepared for every ID scheme"),
    }
}

/// One CQ step: solves `(w₀τ^{-α} - A)Vⁿ = rhs - τ^{-α} Σ_{j=1}^{n} w_j V^{n-j}`
/// given `history = [V⁰, …, V^{n-1}]`.
pub fn step(
    n: usize,
    grid: &TimeGrid,
    op: &SpatialOperator,
    weights: &WeightSequence,
    history: &[GridFunction],
    rhs: &GridFunction,
) -> Result<GridFunction> {
    Ok(step_with_residual(n, grid, op, weights, history, rhs)?.0)
}

fn step_with_residual(
    n: usize,
    grid: &TimeGrid,
    op: &SpatialOperator,
    weights: &WeightSequence,
    history: &[GridFunction],
    rhs: &GridFunction,
) -> Result<(GridFunction, f64)> {
    if history.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: history.len(),
        });
    }
    if weights.len() <= n {
        return Err(Error::DimensionMismatch {
            expected: n + 1,
            actual: weights.len(),
        });
    }
    let scale = grid.tau.powf(-weights.alpha);
    let mut b = rhs.clone();
    for j in 1..=n {
        b.axpy(-scale * weights[j], &history[n - j]);
    }
    let c = weights[0] * scale;
    let x = op.solve_shifted(c, &b)?;
    let ax = op.apply(&x)?;
    let residual = x
        .iter()
        .zip(ax.iter())
        .zip(b.iter())
        .map(|((xi, ai), bi)| (c * xi - ai - bi).abs())
        .fold(0.0, f64::max);
    Ok((x, residual))
}

/// Checks that `scheme` can integrate `g`, naming the cheapest scheme that can.
pub fn check_compatible(scheme: SchemeKind, g: &SourceSpec) -> Result<()> {
    let k = scheme.regularization();
    if g.admits(k) {
        return Ok(());
    }
    let minimal = g
        .minimal_regularization()
        .and_then(SchemeKind::with_regularization)
        .map(|s| s.name().to_string())
        .unwrap_or_else(|| "no available scheme".to_string());
    Err(Error::IncompatibleScheme {
        scheme: scheme.name().to_string(),
        mu: g.min_mu(),
        minimal,
    })
}

/// Runs `scheme` on `[0, T]` and returns the full history.
///
/// A Corr-BDF2 run whose source is infinite at `t = 0` is not an error: the
/// first step is poisoned with NaN and the diagnostics record why.
pub fn solve(
    scheme: SchemeKind,
    alpha: f64,
    grid: &TimeGrid,
    op: &SpatialOperator,
    v: &GridFunction,
    g: &SourceSpec,
    opts: &SolverOptions,
) -> Result<SolveResult> {
    let start = Instant::now();
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid(
            "alpha",
            format!("must lie in (0, 1), got {alpha}"),
        ));
    }
    for len in [v.len(), g.dim()] {
        if len != op.dim() {
            return Err(Error::DimensionMismatch {
                expected: op.dim(),
                actual: len,
            });
        }
    }
    check_compatible(scheme, g)?;

    let exec = opts.execution.unwrap_or_default();
    let reg = tabulate_regularized_with(g, scheme.regularization(), grid, exec)?;
    let weights = cq_weights(alpha, grid.n);
    let pw = power_weights(scheme, grid.n)?;
    let av = op.apply(v)?;

    let mut history = Vec::with_capacity(grid.n + 1);
    history.push(GridFunction::zeros(op.dim()));
    let mut diagnostics = Diagnostics::default();
    for n in 1..=grid.n {
        let rhs = match rhs_from_parts(scheme, n, grid, &av, &reg, pw.as_ref(), opts) {
            Ok(r) => r,
            Err(Error::SingularAtZero { .. }) => {
                diagnostics.singular_start = true;
                GridFunction(vec![f64::NAN; op.dim()])
            }
            Err(e) => return Err(e),
        };
        let (vn, residual) = step_with_residual(n, grid, op, &weights, &history, &rhs)?;
        diagnostics.residuals.push(residual);
        history.push(vn);
    }
    diagnostics.wall_time = start.elapsed();
    Ok(SolveResult {
        scheme,
        grid: *grid,
        history,
        v: v.clone(),
        diagnostics,
    })
}
