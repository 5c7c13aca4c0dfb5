//! Gauss-Jacobi quadrature on `[0, 1]` with weight `σ^a (1-σ)^b`.
//!
//! Nodes and weights come from the Golub-Welsch eigenproblem of the Jacobi
//! matrix. Endpoint singularities of the integrand are absorbed by the
//! weight, so the integrand is never evaluated at `σ = 0` or `σ = 1`.

use crate::error::{Error, Result};
use crate::gamma::{beta, ln_gamma};

/// Default node count for source-regularization integrals.
pub const DEFAULT_NODES: usize = 64;

/// An `m`-point Gauss-Jacobi rule on `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiRule {
    pub a: f64,
    pub b: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// `∫₀¹ σ^a (1-σ)^b dσ`.
fn zeroth_moment(a: f64, b: f64) -> f64 {
    if a + b < 100.0 {
        beta(a + 1.0, b + 1.0)
    } else {
        (ln_gamma(a + 1.0) + ln_gamma(b + 1.0) - ln_gamma(a + b + 2.0)).exp()
    }
}

/// Builds the `m`-point rule exact for `σ^a (1-σ)^b P(σ)`, `deg P <= 2m - 1`.
pub fn jacobi_rule(a: f64, b: f64, m: usize) -> Result<JacobiRule> {
    if !(a > -1.0 && a.is_finite()) {
        return Err(Error::invalid(
            "a",
            format!("left exponent must exceed -1, got {a}"),
        ));
    }
    if !(b > -1.0 && b.is_finite()) {
        return Err(Error::invalid(
            "b",
            format!("right exponent must exceed -1, got {b}"),
        ));
    }
    if m == 0 {
        return Err(Error::invalid("m", "at least one node is required"));
    }

    // Monic Jacobi recurrence on [-1, 1] for (1-x)^p (1+x)^q with σ = (1+x)/2,
    // so q = a (left end) and p = b (right end).
    let (p, q) = (b, a);
    let s = p + q;
    let mut diag = vec![0.0; m];
    let mut off = vec![0.0; m];
    diag[0] = (q - p) / (s + 2.0);
    for k in 1..m {
        let kf = k as f64;
        let two_k = 2.0 * kf + s;
        diag[k] = (q * q - p * p) / (two_k * (two_k + 2.0));
        // 4k(k+p)(k+q)(k+s) / ((2k+s)^2 (2k+s+1)(2k+s-1)); the (k+s)/(2k+s-1)
        // factor is 0/0 when k = 1 and s = -1, where its limit is 1.
        let ratio = if k == 1 && (s + 1.0).abs() < 1e-14 {
            1.0
        } else {
            (kf + s) / (two_k - 1.0)
        };
        let b2 = 4.0 * kf * (kf + p) * (kf + q) / (two_k * two_k * (two_k + 1.0)) * ratio;
        off[k - 1] = b2.sqrt();
    }
    for d in diag.iter_mut() {
        *d = 0.5 * (1.0 + *d);
    }
    for e in off.iter_mut() {
        *e *= 0.5;
    }

    let (values, first) = symmetric_tridiagonal_eigen(diag, off)?;
    let mu0 = zeroth_moment(a, b);
    let nodes = values;
    let weights = first.iter().map(|z| mu0 * z * z).collect();
    Ok(JacobiRule {
        a,
        b,
        nodes,
        weights,
    })
}

/// Eigenvalues (ascending) and first eigenvector components of a symmetric
/// tridiagonal matrix, via implicit-shift QL.
///
/// `off[i]` couples rows `i` and `i + 1`; its last entry is ignored.
fn symmetric_tridiagonal_eigen(mut d: Vec<f64>, mut e: Vec<f64>) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = d.len();
    let mut z = vec![0.0; n];
    z[0] = 1.0;
    if n == 1 {
        return Ok((d, z));
    }
    e[n - 1] = 0.0;

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::invalid(
                    "jacobi matrix",
                    "QL iteration did not converge",
                ));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let bb = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * bb;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - bb;
                let zf = z[i + 1];
                z[i + 1] = s * z[i] + c * zf;
                z[i] = c * z[i] - s * zf;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    Ok((
        order.iter().map(|&i| d[i]).collect(),
        order.iter().map(|&i| z[i]).collect(),
    ))
}

impl JacobiRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `Σ wᵢ f(σᵢ)` for scalar integrands.
    pub fn integrate_scalar(&self, mut f: impl FnMut(f64) -> f64) -> Result<f64> {
        let mut acc = 0.0;
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            let v = f(x);
            if !v.is_finite() {
                return Err(Error::NonFinite { node: x, value: v });
            }
            acc += w * v;
        }
        Ok(acc)
    }

    /// `Σ wᵢ f(σᵢ)` for vector-valued integrands.
    pub fn integrate(&self, mut f: impl FnMut(f64) -> Vec<f64>) -> Result<Vec<f64>> {
        let mut acc: Option<Vec<f64>> = None;
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            let v = f(x);
            if let Some(bad) = v.iter().find(|y| !y.is_finite()) {
                return Err(Error::NonFinite {
                    node: x,
                    value: *bad,
                });
            }
            match acc.as_mut() {
                None => acc = Some(v.iter().map(|y| w * y).collect()),
                Some(sum) => {
                    if sum.len() != v.len() {
                        return Err(Error::DimensionMismatch {
                            expected: sum.len(),
                            actual: v.len(),
                        });
                    }
                    for (s, y) in sum.iter_mut().zip(&v) {
                        *s += w * y;
                    }
                }
            }
        }
        Ok(acc.unwrap_or_default())
    }
}
