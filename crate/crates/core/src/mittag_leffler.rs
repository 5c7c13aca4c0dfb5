//! Two-parameter Mittag-Leffler function `E_{α,β}(z) = Σ z^k / Γ(αk + β)`.
//!
//! Only the direct power series is used. It is accurate where the terms do
//! not cancel badly; arguments where the alternating series loses more than
//! three digits are rejected with [`Error::IllConditioned`] rather than
//! returning a silently wrong value. For `0 < α < 1` this covers the oracle's
//! working range `|λ_k t^α| ≲ 3`.

use crate::error::{Error, Result};
use crate::gamma::{ln_gamma, rgamma};

/// Largest `|z|` accepted by the series.
pub const DOMAIN_LIMIT: f64 = 30.0;
/// Hard cap on the number of series terms.
pub const MAX_TERMS: usize = 400;
/// Largest accepted ratio `Σ|t_k| / max(1, |Σ t_k|)`.
pub const MAX_CANCELLATION: f64 = 1e3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MLParams {
    pub alpha: f64,
    pub beta: f64,
}

impl MLParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::invalid(
                "alpha",
                format!("must be positive, got {alpha}"),
            ));
        }
        if !beta.is_finite() {
            return Err(Error::invalid("beta", "must be finite"));
        }
        Ok(Self { alpha, beta })
    }
}

/// `z^k / Γ(αk + β)`.
fn term(z: f64, k: usize, x: f64) -> f64 {
    if x < 170.0 {
        return z.powi(k as i32) * rgamma(x);
    }
    // beyond the direct range of Γ: work in logs
    let sign = if z < 0.0 && k % 2 == 1 { -1.0 } else { 1.0 };
    sign * (k as f64 * z.abs().ln() - ln_gamma(x)).exp()
}

/// Raw series value together with its cancellation factor
/// `Σ|t_k| / max(1, |Σ t_k|)`; the absolute rounding error is roughly
/// `1e-16 · factor · max(1, |value|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: f64,
    pub cancellation: f64,
    pub terms: usize,
}

/// Sums the power series with Neumaier compensation, without judging its
/// conditioning.
pub fn ml_series(params: MLParams, z: f64) -> Result<SeriesValue> {
    let MLParams { alpha, beta } = params;
    if !(alpha > 0.0) {
        return Err(Error::invalid(
            "alpha",
            format!("must be positive, got {alpha}"),
        ));
    }
    if !z.is_finite() || z.abs() > DOMAIN_LIMIT {
        return Err(Error::OutOfDomain {
            z,
            limit: DOMAIN_LIMIT,
        });
    }
    if z == 0.0 {
        return Ok(SeriesValue {
            value: rgamma(beta),
            cancellation: 1.0,
            terms: 1,
        });
    }

    let mut sum = 0.0;
    let mut comp = 0.0;
    let mut abs_sum = 0.0;
    // a term can vanish at a pole of Γ, so convergence needs two small terms in a row
    let mut small_run = 0;
    for k in 0..MAX_TERMS {
        let t = term(z, k, alpha * k as f64 + beta);
        abs_sum += t.abs();
        let next = sum + t;
        if sum.abs() >= t.abs() {
            comp += (sum - next) + t;
        } else {
            comp += (t - next) + sum;
        }
        sum = next;

        let total = sum + comp;
        if t.abs() <= 1e-16 * total.abs() {
            small_run += 1;
            if small_run >= 2 {
                return Ok(SeriesValue {
                    value: total,
                    cancellation: abs_sum / total.abs().max(1.0),
                    terms: k + 1,
                });
            }
        } else {
            small_run = 0;
        }
    }
    Err(Error::NotConverged { terms: MAX_TERMS })
}

/// `E_{α,β}(z)`, rejecting arguments where the series cancels by more than
/// [`MAX_CANCELLATION`].
pub fn ml(params: MLParams, z: f64) -> Result<f64> {
    let s = ml_series(params, z)?;
    if s.cancellation > MAX_CANCELLATION {
        return Err(Error::IllConditioned {
            z,
            factor: s.cancellation,
        });
    }
    Ok(s.value)
}

/// `E_{α,1}(z)`.
pub fn ml1(alpha: f64, z: f64) -> Result<f64> {
    ml(MLParams::new(alpha, 1.0)?, z)
}
