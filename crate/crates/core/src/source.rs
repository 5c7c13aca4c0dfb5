//! Source terms `g(x, t)` and their k-fold time integrals `J^k g`.
//!
//! A source is a sum of terms of three shapes: a monomial `t^μ q(x)`, a
//! product `t^μ f(x, t)` and a Laplace convolution `(t^μ ∗ f)(x, t)`. The
//! singular factor of each integral is moved into a Gauss-Jacobi weight, so
//! the quadrature only ever sees the smooth part `f`.

use std::fmt;
use std::sync::Arc;

use crate::cq::{bdf2_power_weights, power_difference};
use crate::error::{Error, Result};
use crate::exec::{par_map, Execution};
use crate::gamma::{gamma, rgamma};
use crate::quadrature::{jacobi_rule, JacobiRule, DEFAULT_NODES};
use crate::solver::TimeGrid;
use crate::space::GridFunction;

/// Scalar time factor of a separable profile `f(x, t) = a(t) q(x)`.
#[derive(Clone)]
pub enum TimeProfile {
    One,
    /// `(1 - t)^β`
    OneMinusPower(f64),
    /// `e^{ct}`
    Exp(f64),
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl TimeProfile {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            TimeProfile::One => 1.0,
            TimeProfile::OneMinusPower(beta) => {
                if *beta == 0.0 {
                    1.0
                } else {
                    (1.0 - t).powf(*beta)
                }
            }
            TimeProfile::Exp(c) => (c * t).exp(),
            TimeProfile::Custom(f) => f(t),
        }
    }

    /// True when the profile is constant in time.
    pub fn is_constant(&self) -> bool {
        matches!(
            self,
            TimeProfile::One | TimeProfile::OneMinusPower(0.0) | TimeProfile::Exp(0.0)
        )
    }
}

impl fmt::Debug for TimeProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TimeProfile::One => write!(f, "One"),
            TimeProfile::OneMinusPower(b) => write!(f, "OneMinusPower({b})"),
            TimeProfile::Exp(c) => write!(f, "Exp({c})"),
            TimeProfile::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

/// Pointwise `f(x, t)`.
#[derive(Clone)]
pub struct SpaceTimeFn(pub Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>);

impl fmt::Debug for SpaceTimeFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SpaceTimeFn(..)")
    }
}

/// The smooth factor `f(x, t)` of a product or convolution term, already
/// bound to the spatial nodes.
#[derive(Debug, Clone)]
pub enum Profile {
    Separable { time: TimeProfile, q: GridFunction },
    Sampled { nodes: Vec<f64>, f: SpaceTimeFn },
}

impl Profile {
    pub fn separable(time: TimeProfile, q: GridFunction) -> Self {
        Profile::Separable { time, q }
    }

    pub fn sampled(nodes: &[f64], f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Profile::Sampled {
            nodes: nodes.to_vec(),
            f: SpaceTimeFn(Arc::new(f)),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Profile::Separable { q, .. } => q.len(),
            Profile::Sampled { nodes, .. } => nodes.len(),
        }
    }

    pub fn eval(&self, t: f64) -> GridFunction {
        match self {
            Profile::Separable { time, q } => q.scaled(time.eval(t)),
            Profile::Sampled { nodes, f } => {
                GridFunction(nodes.iter().map(|&x| (f.0)(x, t)).collect())
            }
        }
    }

    /// `Σ wᵢ f(·, t σᵢ)`.
    fn integrate(&self, rule: &JacobiRule, t: f64) -> Result<GridFunction> {
        match self {
            Profile::Separable { time, q } => {
                let s = rule.integrate_scalar(|sigma| time.eval(t * sigma))?;
                Ok(q.scaled(s))
            }
            Profile::Sampled { nodes, f } => {
                let v =
                    rule.integrate(|sigma| nodes.iter().map(|&x| (f.0)(x, t * sigma)).collect())?;
                Ok(GridFunction(v))
            }
        }
    }

    /// The spatial factor when `f` does not depend on time.
    fn constant_part(&self) -> Option<&GridFunction> {
        match self {
            Profile::Separable { time, q } if time.is_constant() => Some(q),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub enum SourceTerm {
    /// `t^μ q(x)`; `μ` may be below `-1` (finite-part integrals).
    Monomial { mu: f64, q: GridFunction },
    /// `t^μ f(x, t)`
    Product { mu: f64, f: Profile },
    /// `(t^μ ∗ f)(x, t) = ∫₀ᵗ (t - s)^μ f(x, s) ds`
    Convolution { mu: f64, f: Profile },
}

impl SourceTerm {
    pub fn mu(&self) -> f64 {
        match self {
            SourceTerm::Monomial { mu, .. }
            | SourceTerm::Product { mu, .. }
            | SourceTerm::Convolution { mu, .. } => *mu,
        }
    }

    fn dim(&self) -> usize {
        match self {
            SourceTerm::Monomial { q, .. } => q.len(),
            SourceTerm::Product { f, .. } | SourceTerm::Convolution { f, .. } => f.dim(),
        }
    }

    /// Products with a time-independent factor are monomials in disguise and
    /// get the closed form.
    fn as_monomial(&self) -> Option<(f64, &GridFunction)> {
        match self {
            SourceTerm::Monomial { mu, q } => Some((*mu, q)),
            SourceTerm::Product { mu, f } => f.constant_part().map(|q| (*mu, q)),
            SourceTerm::Convolution { .. } => None,
        }
    }

    fn validate(&self) -> Result<()> {
        let mu = self.mu();
        if !mu.is_finite() {
            return Err(Error::invalid("mu", "must be finite"));
        }
        if self.as_monomial().is_some() {
            if mu < 0.0 && mu.fract() == 0.0 {
                return Err(Error::invalid(
                    "mu",
                    format!("negative integer exponent {mu} has no finite part"),
                ));
            }
        } else if mu <= -1.0 {
            return Err(Error::invalid(
                "mu",
                format!("quadrature needs mu > -1, got {mu}"),
            ));
        }
        Ok(())
    }

    /// Whether `J^k` of this term is finite and vanishes at `t = 0`.
    fn admits(&self, k: usize) -> bool {
        if k == 0 {
            return true;
        }
        let mu = self.mu();
        mu + k as f64 > 0.0 && (1..=k).all(|j| mu + j as f64 != 0.0)
    }
}

/// Additive source `g = Σ terms`, sharing one spatial grid.
#[derive(Debug, Clone)]
pub struct SourceSpec {
    terms: Vec<SourceTerm>,
    dim: usize,
    rule_size: usize,
}

impl SourceSpec {
    pub fn new(terms: Vec<SourceTerm>) -> Result<Self> {
        Self::with_rule_size(terms, DEFAULT_NODES)
    }

    pub fn with_rule_size(terms: Vec<SourceTerm>, rule_size: usize) -> Result<Self> {
        let dim = terms
            .first()
            .map(SourceTerm::dim)
            .ok_or_else(|| Error::invalid("terms", "empty source"))?;
        if rule_size == 0 {
            return Err(Error::invalid("rule_size", "need at least one node"));
        }
        for term in &terms {
            term.validate()?;
            if term.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: term.dim(),
                });
            }
        }
        Ok(SourceSpec {
            terms,
            dim,
            rule_size,
        })
    }

    /// The zero source on `dim` nodes.
    pub fn zero(dim: usize) -> Self {
        SourceSpec {
            terms: vec![SourceTerm::Monomial {
                mu: 0.0,
                q: GridFunction::zeros(dim),
            }],
            dim,
            rule_size: DEFAULT_NODES,
        }
    }

    pub fn terms(&self) -> &[SourceTerm] {
        &self.terms
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rule_size(&self) -> usize {
        self.rule_size
    }

    pub fn admits(&self, k: usize) -> bool {
        self.terms.iter().all(|t| t.admits(k))
    }

    /// Smallest `k ≥ 1` for which every `J^k` term is finite at `t = 0`.
    pub fn minimal_regularization(&self) -> Option<usize> {
        (1..=3).find(|&k| self.admits(k))
    }

    /// The most singular exponent.
    pub fn min_mu(&self) -> f64 {
        self.terms
            .iter()
            .map(SourceTerm::mu)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Scalar factor `t^{μ+k} / ((μ+1)(μ+2)…(μ+k))` of `J^k t^μ`.
///
/// For `μ < -1` this is Hadamard's finite part.
pub fn jk_monomial(mu: f64, k: usize, t: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::invalid("k", "need k >= 1"));
    }
    if mu + k as f64 <= 0.0 {
        return Err(Error::invalid(
            "mu",
            format!("mu + k = {} is not positive", mu + k as f64),
        ));
    }
    if !(t >= 0.0) {
        return Err(Error::invalid("t", format!("must be nonnegative, got {t}")));
    }
    let denom: f64 = (1..=k).map(|j| mu + j as f64).product();
    if denom == 0.0 {
        return Err(Error::invalid(
            "mu",
            format!("mu = {mu} hits a pole of the finite part"),
        ));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    Ok(t.powf(mu + k as f64) / denom)
}

fn product_rule(mu: f64, k: usize, rule_size: usize) -> Result<JacobiRule> {
    jacobi_rule(mu, k as f64 - 1.0, rule_size)
}

fn convolution_rule(mu: f64, k: usize, rule_size: usize) -> Result<JacobiRule> {
    jacobi_rule(0.0, mu + k as f64, rule_size)
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|j| j as f64).product()
}

fn product_with_rule(
    mu: f64,
    f: &Profile,
    k: usize,
    t: f64,
    rule: &JacobiRule,
) -> Result<GridFunction> {
    if t == 0.0 {
        return Ok(GridFunction::zeros(f.dim()));
    }
    let scale = t.powf(k as f64 + mu) / factorial(k - 1);
    Ok(f.integrate(rule, t)?.scaled(scale))
}

fn convolution_with_rule(
    mu: f64,
    f: &Profile,
    k: usize,
    t: f64,
    rule: &JacobiRule,
) -> Result<GridFunction> {
    if t == 0.0 {
        return Ok(GridFunction::zeros(f.dim()));
    }
    let scale = gamma(mu + 1.0) * rgamma(mu + k as f64 + 1.0) * t.powf(mu + k as f64 + 1.0);
    Ok(f.integrate(rule, t)?.scaled(scale))
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::invalid("t", format!("must be nonnegative, got {t}")));
    }
    Ok(())
}

/// `J^k(s^μ f(s))(t) = t^{k+μ}/(k-1)! ∫₀¹ σ^μ (1-σ)^{k-1} f(tσ) dσ`.
pub fn jk_product(
    mu: f64,
    f: &Profile,
    k: usize,
    t: f64,
    rule_size: usize,
) -> Result<GridFunction> {
    if k == 0 {
        return Err(Error::invalid("k", "need k >= 1"));
    }
    if mu <= -1.0 {
        return Err(Error::invalid(
            "mu",
            format!("quadrature needs mu > -1, got {mu}"),
        ));
    }
    check_time(t)?;
    product_with_rule(mu, f, k, t, &product_rule(mu, k, rule_size)?)
}

/// `J^k(t^μ ∗ f)(t) = Γ(μ+1)/Γ(μ+k+1) ∫₀ᵗ (t-s)^{μ+k} f(s) ds`.
///
/// `k = 0` gives the convolution itself.
pub fn jk_convolution(
    mu: f64,
    f: &Profile,
    k: usize,
    t: f64,
    rule_size: usize,
) -> Result<GridFunction> {
    if mu <= -1.0 {
        return Err(Error::invalid(
            "mu",
            format!("convolution needs mu > -1, got {mu}"),
        ));
    }
    check_time(t)?;
    convolution_with_rule(mu, f, k, t, &convolution_rule(mu, k, rule_size)?)
}

/// One term with its quadrature rule prepared for a fixed `k`.
struct PreparedTerm<'a> {
    term: &'a SourceTerm,
    rule: Option<JacobiRule>,
}

impl<'a> PreparedTerm<'a> {
    fn new(term: &'a SourceTerm, k: usize, rule_size: usize) -> Result<Self> {
        let rule = if term.as_monomial().is_some() {
            None
        } else {
            match term {
                SourceTerm::Product { mu, .. } if k >= 1 => Some(product_rule(*mu, k, rule_size)?),
                SourceTerm::Convolution { mu, .. } => Some(convolution_rule(*mu, k, rule_size)?),
                _ => None,
            }
        };
        Ok(PreparedTerm { term, rule })
    }

    fn value(&self, k: usize, t: f64) -> Result<GridFunction> {
        if let Some((mu, q)) = self.term.as_monomial() {
            let s = if k == 0 {
                raw_power(mu, t)?
            } else {
                jk_monomial(mu, k, t)?
            };
            return Ok(q.scaled(s));
        }
        match (self.term, &self.rule) {
            (SourceTerm::Product { mu, f }, None) => Ok(f.eval(t).scaled(raw_power(*mu, t)?)),
            (SourceTerm::Product { mu, f }, Some(rule)) => product_with_rule(*mu, f, k, t, rule),
            (SourceTerm::Convolution { mu, f }, Some(rule)) => {
                convolution_with_rule(*mu, f, k, t, rule)
            }
            _ => unreachable!("rule prepared for every quadrature term"),
        }
    }
}

/// `t^μ`, with `0^0 = 1` and an error for the singular value at zero.
fn raw_power(mu: f64, t: f64) -> Result<f64> {
    if t == 0.0 {
        return match mu {
            m if m > 0.0 => Ok(0.0),
            0.0 => Ok(1.0),
            _ => Err(Error::SingularAtZero { mu }),
        };
    }
    Ok(t.powf(mu))
}

fn sum_terms(prepared: &[PreparedTerm<'_>], dim: usize, k: usize, t: f64) -> Result<GridFunction> {
    let mut acc = GridFunction::zeros(dim);
    for p in prepared {
        acc.axpy(1.0, &p.value(k, t)?);
    }
    Ok(acc)
}

fn prepare(g: &SourceSpec, k: usize) -> Result<Vec<PreparedTerm<'_>>> {
    g.terms
        .iter()
        .map(|t| PreparedTerm::new(t, k, g.rule_size))
        .collect()
}

/// `g(·, t)`.
pub fn eval_source(g: &SourceSpec, t: f64) -> Result<GridFunction> {
    check_time(t)?;
    sum_terms(&prepare(g, 0)?, g.dim, 0, t)
}

/// `J^k g(·, t)` for `k ≥ 1`.
pub fn eval_regularized(g: &SourceSpec, k: usize, t: f64) -> Result<GridFunction> {
    if k == 0 {
        return eval_source(g, t);
    }
    check_time(t)?;
    if !g.admits(k) {
        return Err(Error::invalid(
            "k",
            format!("J^{k} of a t^{} term is not finite at 0", g.min_mu()),
        ));
    }
    sum_terms(&prepare(g, k)?, g.dim, k, t)
}

/// `G^n = J^k g(t_n)` for `n = 0..=N`.
#[derive(Debug, Clone)]
pub struct RegularizedSource {
    pub k: usize,
    pub values: Vec<GridFunction>,
    /// `∂^k_τ G` at `t_n` for `k ≥ 1` (entry 0 unused); empty for `k = 0`.
    pub differenced: Vec<GridFunction>,
    /// Set when `k = 0` and `g` blows up at `t = 0`; `values[0]` is then NaN.
    pub singular_start: bool,
}

pub fn tabulate_regularized(
    g: &SourceSpec,
    k: usize,
    grid: &TimeGrid,
) -> Result<RegularizedSource> {
    tabulate_regularized_with(g, k, grid, Execution::default())
}

pub fn tabulate_regularized_with(
    g: &SourceSpec,
    k: usize,
    grid: &TimeGrid,
    exec: Execution,
) -> Result<RegularizedSource> {
    if k > 3 {
        return Err(Error::invalid(
            "k",
            format!("regularization order must be 0..=3, got {k}"),
        ));
    }
    if !g.admits(k) {
        return Err(Error::invalid(
            "k",
            format!("J^{k} of a t^{} term is not finite at 0", g.min_mu()),
        ));
    }
    let prepared = prepare(g, k)?;
    let (monomials, quadrature): (Vec<_>, Vec<_>) = prepared
        .into_iter()
        .partition(|p| p.term.as_monomial().is_some());
    let steps: Vec<usize> = (0..=grid.n).collect();
    let results = par_map(exec, &steps, |&n| {
        let t = grid.time(n);
        Ok::<_, Error>((
            sum_terms(&monomials, g.dim, k, t)?,
            sum_terms(&quadrature, g.dim, k, t)?,
        ))
    });

    let mut singular_start = false;
    let mut values = Vec::with_capacity(results.len());
    let mut quad_values = Vec::with_capacity(results.len());
    for (n, r) in results.into_iter().enumerate() {
        match r {
            Ok((mut m, q)) => {
                m.axpy(1.0, &q);
                values.push(m);
                quad_values.push(q);
            }
            Err(Error::SingularAtZero { .. }) if n == 0 && k == 0 => {
                singular_start = true;
                values.push(GridFunction(vec![f64::NAN; g.dim]));
            }
            Err(e) => return Err(e),
        }
    }
    let differenced = if k == 0 {
        Vec::new()
    } else {
        difference(&monomials, &quad_values, g.dim, k, grid)?
    };
    Ok(RegularizedSource {
        k,
        values,
        differenced,
        singular_start,
    })
}

/// `∂^k_τ G`. Monomials are differenced in closed form on the integer
/// lattice, which avoids the `τ^{-k}` blow-up of rounding in `G`.
fn difference(
    monomials: &[PreparedTerm<'_>],
    quad: &[GridFunction],
    dim: usize,
    k: usize,
    grid: &TimeGrid,
) -> Result<Vec<GridFunction>> {
    let pw = bdf2_power_weights(k as i32, grid.n)?;
    let scale = grid.tau.powi(-(k as i32));
    let mut out = vec![GridFunction::zeros(dim)];
    for n in 1..=grid.n {
        let mut d = GridFunction::zeros(dim);
        for (j, &w) in pw.weights.iter().enumerate().take(n.min(2 * k) + 1) {
            d.axpy(scale * w, &quad[n - j]);
        }
        for m in monomials {
            let (mu, q) = m.term.as_monomial().expect("partitioned on monomials");
            let c = jk_monomial(mu, k, 1.0)?
                * grid.tau.powf(mu)
                * power_difference(&pw, k, mu + k as f64, n);
            d.axpy(c, q);
        }
        out.push(d);
    }
    Ok(out)
}
