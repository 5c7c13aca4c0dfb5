//! BDF2 convolution quadrature.
//!
//! The fractional operator is discretized as
//!
//! ```text
//! ∂^α_τ φ^n = τ^{-α} Σ_{j=0}^{n} w_j φ^{n-j},   Σ_j w_j ξ^j = (3/2 - 2ξ + ξ²/2)^α
//! ```
//!
//! Stored weights never carry the `τ^{-α}` factor, so one table serves every
//! step size.

use crate::error::{Error, Result};

/// Taylor coefficients `w_0..w_n` of the BDF2 symbol raised to `alpha`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSequence {
    pub alpha: f64,
    pub weights: Vec<f64>,
}

impl WeightSequence {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.weights
    }
}

impl std::ops::Index<usize> for WeightSequence {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.weights[i]
    }
}

/// Coefficients of `(1 - ξ/scale)^alpha` up to degree `n`.
fn binomial_series(alpha: f64, scale: f64, n: usize) -> Vec<f64> {
    let mut c = Vec::with_capacity(n + 1);
    c.push(1.0);
    for m in 1..=n {
        let mf = m as f64;
        let prev = c[m - 1];
        c.push(prev * (mf - 1.0 - alpha) / (mf * scale));
    }
    c
}

/// Fractional BDF2 weights `w_0..w_n` for any real `alpha`.
///
/// Uses `3/2 - 2ξ + ξ²/2 = (3/2)(1 - ξ)(1 - ξ/3)` and convolves the two
/// generalized binomial series. Integer orders 0..=3 are dispatched to the
/// exact polynomial expansion.
pub fn cq_weights(alpha: f64, n: usize) -> WeightSequence {
    if alpha == 0.0 {
        let mut weights = vec![0.0; n + 1];
        weights[0] = 1.0;
        return WeightSequence { alpha, weights };
    }
    if alpha.fract() == 0.0 && (1.0..=3.0).contains(&alpha) {
        return bdf2_power_weights(alpha as i32, n).expect("order checked");
    }

    let left = binomial_series(alpha, 1.0, n);
    let right = binomial_series(alpha, 3.0, n);
    let scale = 1.5f64.powf(alpha);
    let weights = (0..=n)
        .map(|j| {
            let s: f64 = (0..=j).map(|i| left[i] * right[j - i]).sum();
            scale * s
        })
        .collect();
    WeightSequence { alpha, weights }
}

/// Coefficients of `(3/2 - 2ξ + ξ²/2)^p`, zero padded to length `n + 1`.
///
/// These define the integer-order difference operators `∂^p_τ` used to
/// differentiate the regularized source.
pub fn bdf2_power_weights(p: i32, n: usize) -> Result<WeightSequence> {
    if p <= 0 {
        return Err(Error::invalid(
            "p",
            format!("power must be positive, got {p}"),
        ));
    }
    let base = [1.5, -2.0, 0.5];
    let mut poly = vec![1.0];
    for _ in 0..p {
        let mut next = vec![0.0; poly.len() + 2];
        for (i, a) in poly.iter().enumerate() {
            for (j, b) in base.iter().enumerate() {
                next[i + j] += a * b;
            }
        }
        poly = next;
    }
    let mut weights = vec![0.0; n + 1];
    for (w, c) in weights.iter_mut().zip(poly) {
        *w = c;
    }
    Ok(WeightSequence {
        alpha: p as f64,
        weights,
    })
}

/// `Σ_{j=0}^{n} w_j φ^{n-j}` over vector-valued history; no `τ` scaling.
pub fn discrete_convolve<V: AsRef<[f64]>>(
    weights: &[f64],
    history: &[V],
    n: usize,
) -> Result<Vec<f64>> {
    if history.len() < n + 1 {
        return Err(Error::DimensionMismatch {
            expected: n + 1,
            actual: history.len(),
        });
    }
    if weights.len() < n + 1 {
        return Err(Error::DimensionMismatch {
            expected: n + 1,
            actual: weights.len(),
        });
    }
    let dim = history[0].as_ref().len();
    let mut out = vec![0.0; dim];
    for (j, &w) in weights[..=n].iter().enumerate() {
        let phi = history[n - j].as_ref();
        if phi.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: phi.len(),
            });
        }
        if w == 0.0 {
            continue;
        }
        for (o, p) in out.iter_mut().zip(phi) {
            *o += w * p;
        }
    }
    Ok(out)
}

/// `Σ_{j=0}^{min(n,2p)} w_j (n-j)^s` for the weights of `∂^p_τ`, `s > 0`.
///
/// Far from the origin the direct sum loses about `n^p` in relative accuracy.
/// There `(1 - j/n)^s` is expanded binomially instead; the moments `Σ w_j j^k`
/// vanish for `k < p`, so the cancelling terms are dropped exactly.
pub fn power_difference(w: &WeightSequence, p: usize, s: f64, n: usize) -> f64 {
    let width = 2 * p;
    if p == 0 || n < 8 * p || w.weights.len() <= width {
        return w
            .weights
            .iter()
            .enumerate()
            .take(n.min(width) + 1)
            .map(|(j, wj)| {
                if n == j {
                    0.0
                } else {
                    wj * ((n - j) as f64).powf(s)
                }
            })
            .sum();
    }
    let nf = n as f64;
    let mut binom = 1.0;
    let mut sum = 0.0;
    // j/n ≤ 1/4, so 40 terms are far below rounding; some moments past
    // k = p vanish too, so there is no early exit on a small term
    for k in 1..=40 {
        binom *= -(s - (k - 1) as f64) / k as f64;
        if k < p {
            continue;
        }
        let moment: f64 = w.weights[1..=width]
            .iter()
            .enumerate()
            .map(|(i, wj)| wj * ((i + 1) as f64 / nf).powi(k as i32))
            .sum();
        sum += binom * moment;
        if binom == 0.0 {
            break;
        }
    }
    nf.powf(s) * sum
}
