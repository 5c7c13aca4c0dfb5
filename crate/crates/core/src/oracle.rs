//! Exact solutions by separation of variables.
//!
//! For `q(x) t^μ` sources and data expanded in Dirichlet eigenfunctions
//! `φ_k(x) = sin(kπ(x+1)/2)`, `-φ_k'' = λ_k φ_k`, each mode evolves as
//!
//! ```text
//! u_k(t) = E_{α,1}(-λ_k t^α) v_k + Γ(μ+1) t^{α+μ} E_{α,α+μ+1}(-λ_k t^α) q_k
//! ```

use crate::error::{Error, Result};
use crate::gamma::gamma;
use crate::mittag_leffler::{ml, MLParams};
use crate::space::{eigenpairs, GridFunction};

/// Spatial shape of one mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModeShape {
    /// `φ ≡ 1`, for the scalar operator `A = -λ`.
    Constant,
    /// `φ_k`
    Sine(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    pub shape: ModeShape,
    pub lambda: f64,
    /// Coefficient of the initial value.
    pub v: f64,
    /// Coefficient of the source profile.
    pub q: f64,
}

impl Mode {
    pub fn phi(&self, x: f64) -> f64 {
        match self.shape {
            ModeShape::Constant => 1.0,
            ModeShape::Sine(k) => (k as f64 * std::f64::consts::PI * (x + 1.0) / 2.0).sin(),
        }
    }
}

/// `∂^α_t u = ∂²_x u + t^μ q(x)`, `u(0) = v`, with finitely many modes.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparableProblem {
    pub alpha: f64,
    pub mu: f64,
    pub modes: Vec<Mode>,
}

impl SeparableProblem {
    pub fn new(alpha: f64, mu: f64, modes: Vec<Mode>) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::invalid(
                "alpha",
                format!("must lie in (0, 1], got {alpha}"),
            ));
        }
        if modes.iter().any(|m| m.q != 0.0) && !(mu > -1.0) {
            return Err(Error::invalid(
                "mu",
                format!("exact solution needs mu > -1, got {mu}"),
            ));
        }
        if modes.iter().any(|m| !(m.lambda >= 0.0)) {
            return Err(Error::invalid("lambda", "eigenvalues must be nonnegative"));
        }
        Ok(SeparableProblem { alpha, mu, modes })
    }

    /// Sine modes from `(k, v_k, q_k)` triples.
    pub fn eigen(alpha: f64, mu: f64, coeffs: &[(usize, f64, f64)]) -> Result<Self> {
        let k_max = coeffs.iter().map(|c| c.0).max().unwrap_or(0);
        let pairs = eigenpairs(k_max);
        let modes = coeffs
            .iter()
            .map(|&(k, v, q)| {
                if k == 0 {
                    return Err(Error::invalid("k", "modes start at k = 1"));
                }
                Ok(Mode {
                    shape: ModeShape::Sine(k),
                    lambda: pairs[k - 1].lambda,
                    v,
                    q,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(alpha, mu, modes)
    }

    /// One constant mode: the scalar equation `D^α u + λu = q t^μ`.
    pub fn scalar(alpha: f64, lambda: f64, mu: f64, v: f64, q: f64) -> Result<Self> {
        Self::new(
            alpha,
            mu,
            vec![Mode {
                shape: ModeShape::Constant,
                lambda,
                v,
                q,
            }],
        )
    }

    /// `u_k(t)`.
    pub fn time_factor(&self, mode: &Mode, t: f64) -> Result<f64> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::invalid("t", format!("must be nonnegative, got {t}")));
        }
        let (alpha, mu) = (self.alpha, self.mu);
        let z = -mode.lambda * t.powf(alpha);
        let mut u = 0.0;
        if mode.v != 0.0 {
            u += ml(MLParams::new(alpha, 1.0)?, z)? * mode.v;
        }
        if mode.q != 0.0 {
            if t == 0.0 {
                if alpha + mu < 0.0 {
                    return Err(Error::SingularAtZero { mu });
                }
                if alpha + mu > 0.0 {
                    return Ok(u);
                }
            }
            let e = ml(MLParams::new(alpha, alpha + mu + 1.0)?, z)?;
            u += gamma(mu + 1.0) * t.powf(alpha + mu) * e * mode.q;
        }
        Ok(u)
    }
}

/// `u(x, t)` at the given nodes.
pub fn exact_solution(p: &SeparableProblem, t: f64, nodes: &[f64]) -> Result<GridFunction> {
    let mut u = GridFunction::zeros(nodes.len());
    for mode in &p.modes {
        let c = p.time_factor(mode, t)?;
        for (ui, &x) in u.iter_mut().zip(nodes) {
            *ui += c * mode.phi(x);
        }
    }
    Ok(u)
}

/// Solution of `D^α u + λu = q t^μ`, `u(0) = v`.
pub fn scalar_reference(alpha: f64, lambda: f64, mu: f64, v: f64, q: f64, t: f64) -> Result<f64> {
    let p = SeparableProblem::scalar(alpha, lambda, mu, v, q)?;
    p.time_factor(&p.modes[0], t)
}
