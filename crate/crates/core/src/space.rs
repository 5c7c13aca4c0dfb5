//! Discrete Dirichlet Laplacian on `(-1, 1)`.
//!
//! Three discretizations share one interface: a scalar stand-in `A = -λ`,
//! the three-point finite-difference stencil, and Chebyshev collocation at the
//! Gauss-Lobatto points. Every time-stepping scheme solves `(cI - A)x = b`
//! with the same shift `c` at each step, so factorizations are cached per `c`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::ops::{Deref, DerefMut};
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Values at the interior nodes of a [`SpatialOperator`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GridFunction(pub Vec<f64>);

impl GridFunction {
    pub fn zeros(n: usize) -> Self {
        GridFunction(vec![0.0; n])
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    /// `self += a * other`
    pub fn axpy(&mut self, a: f64, other: &[f64]) {
        for (s, o) in self.0.iter_mut().zip(other) {
            *s += a * o;
        }
    }

    pub fn scaled(&self, a: f64) -> GridFunction {
        GridFunction(self.0.iter().map(|v| a * v).collect())
    }
}

impl Deref for GridFunction {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for GridFunction {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

impl AsRef<[f64]> for GridFunction {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for GridFunction {
    fn from(v: Vec<f64>) -> Self {
        GridFunction(v)
    }
}

/// Which discretization of the Laplacian to build.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpaceMode {
    /// `A = -λ` on one-dimensional vectors.
    Scalar { lambda: f64 },
    /// Three-point stencil on `interior` equispaced interior points.
    FiniteDifference { interior: usize },
    /// Collocation at the `degree + 1` Chebyshev-Gauss-Lobatto points.
    Chebyshev { degree: usize },
}

/// Factorization of `cI - A` for one shift `c`.
#[derive(Debug, Clone)]
pub enum ShiftedFactor {
    Scalar {
        denom: f64,
    },
    /// Thomas elimination: normalized super-diagonal and pivots.
    Tridiagonal {
        off: f64,
        upper: Vec<f64>,
        pivots: Vec<f64>,
    },
    /// Row-major LU with partial pivoting.
    Lu {
        n: usize,
        lu: Vec<f64>,
        perm: Vec<usize>,
    },
}

impl ShiftedFactor {
    /// Solves into `out`; `rhs` and `out` must have the operator's dimension.
    pub fn solve_into(&self, rhs: &[f64], out: &mut [f64]) {
        match self {
            ShiftedFactor::Scalar { denom } => out[0] = rhs[0] / denom,
            ShiftedFactor::Tridiagonal { off, upper, pivots } => {
                let n = rhs.len();
                out[0] = rhs[0] / pivots[0];
                for i in 1..n {
                    out[i] = (rhs[i] - off * out[i - 1]) / pivots[i];
                }
                for i in (0..n - 1).rev() {
                    out[i] -= upper[i] * out[i + 1];
                }
            }
            ShiftedFactor::Lu { n, lu, perm } => {
                let n = *n;
                for i in 0..n {
                    let mut s = rhs[perm[i]];
                    let row = &lu[i * n..i * n + i];
                    for (l, x) in row.iter().zip(&out[..i]) {
                        s -= l * x;
                    }
                    out[i] = s;
                }
                for i in (0..n).rev() {
                    let row = &lu[i * n..(i + 1) * n];
                    let mut s = out[i];
                    for (u, x) in row[i + 1..].iter().zip(&out[i + 1..]) {
                        s -= u * x;
                    }
                    out[i] = s / row[i];
                }
            }
        }
    }
}

/// The discrete operator `A` with homogeneous Dirichlet data.
#[derive(Debug)]
pub struct SpatialOperator {
    mode: SpaceMode,
    nodes: Vec<f64>,
    norm_weights: Vec<f64>,
    /// Interior collocation matrix (Chebyshev mode only), row-major.
    matrix: Vec<f64>,
    cache: Mutex<HashMap<u64, Arc<ShiftedFactor>>>,
}

impl Clone for SpatialOperator {
    fn clone(&self) -> Self {
        SpatialOperator {
            mode: self.mode,
            nodes: self.nodes.clone(),
            norm_weights: self.norm_weights.clone(),
            matrix: self.matrix.clone(),
            cache: Mutex::new(HashMap::new()),
        }
    }
}

impl SpatialOperator {
    pub fn new(mode: SpaceMode) -> Result<Self> {
        match mode {
            SpaceMode::Scalar { lambda } => Self::scalar(lambda),
            SpaceMode::FiniteDifference { interior } => Self::finite_difference(interior),
            SpaceMode::Chebyshev { degree } => Self::chebyshev(degree),
        }
    }

    pub fn scalar(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::invalid(
                "lambda",
                format!("must be positive, got {lambda}"),
            ));
        }
        Ok(Self::assemble(
            SpaceMode::Scalar { lambda },
            vec![0.0],
            vec![1.0],
            Vec::new(),
        ))
    }

    pub fn finite_difference(interior: usize) -> Result<Self> {
        if interior == 0 {
            return Err(Error::invalid(
                "interior",
                "need at least one interior point",
            ));
        }
        let h = 2.0 / (interior as f64 + 1.0);
        let nodes = (1..=interior).map(|i| -1.0 + i as f64 * h).collect();
        Ok(Self::assemble(
            SpaceMode::FiniteDifference { interior },
            nodes,
            vec![h; interior],
            Vec::new(),
        ))
    }

    pub fn chebyshev(degree: usize) -> Result<Self> {
        if degree < 2 {
            return Err(Error::invalid(
                "degree",
                format!("need degree >= 2, got {degree}"),
            ));
        }
        let m = degree;
        let all_nodes: Vec<f64> = (0..=m).map(|j| -(PI * j as f64 / m as f64).cos()).collect();
        let d2 = cheb_second_derivative(m);
        let n = m - 1;
        let mut matrix = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                matrix[i * n + j] = d2[(i + 1) * (m + 1) + (j + 1)];
            }
        }
        let cc = clenshaw_curtis(m);
        Ok(Self::assemble(
            SpaceMode::Chebyshev { degree },
            all_nodes[1..m].to_vec(),
            cc[1..m].to_vec(),
            matrix,
        ))
    }

    fn assemble(
        mode: SpaceMode,
        nodes: Vec<f64>,
        norm_weights: Vec<f64>,
        matrix: Vec<f64>,
    ) -> Self {
        SpatialOperator {
            mode,
            nodes,
            norm_weights,
            matrix,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn mode(&self) -> SpaceMode {
        self.mode
    }

    /// Interior node coordinates, ascending.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn dim(&self) -> usize {
        self.nodes.len()
    }

    /// Quadrature weights of the discrete `L²` inner product.
    pub fn norm_weights(&self) -> &[f64] {
        &self.norm_weights
    }

    pub fn sample(&self, f: impl Fn(f64) -> f64) -> GridFunction {
        GridFunction(self.nodes.iter().map(|&x| f(x)).collect())
    }

    fn check_dim(&self, len: usize) -> Result<()> {
        if len != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: len,
            });
        }
        Ok(())
    }

    pub fn apply(&self, w: &[f64]) -> Result<GridFunction> {
        self.check_dim(w.len())?;
        let out = match self.mode {
            SpaceMode::Scalar { lambda } => vec![-lambda * w[0]],
            SpaceMode::FiniteDifference { interior } => {
                let h = 2.0 / (interior as f64 + 1.0);
                let inv = 1.0 / (h * h);
                (0..interior)
                    .map(|i| {
                        let left = if i > 0 { w[i - 1] } else { 0.0 };
                        let right = if i + 1 < interior { w[i + 1] } else { 0.0 };
                        (left - 2.0 * w[i] + right) * inv
                    })
                    .collect()
            }
            SpaceMode::Chebyshev { .. } => {
                let n = self.dim();
                (0..n)
                    .map(|i| {
                        self.matrix[i * n..(i + 1) * n]
                            .iter()
                            .zip(w)
                            .map(|(a, b)| a * b)
                            .sum()
                    })
                    .collect()
            }
        };
        Ok(GridFunction(out))
    }

    /// Returns the (cached) factorization of `cI - A`.
    pub fn factor_shifted(&self, c: f64) -> Result<Arc<ShiftedFactor>> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::invalid(
                "c",
                format!("shift must be positive, got {c}"),
            ));
        }
        let key = c.to_bits();
        if let Some(f) = self.cache.lock().expect("factor cache poisoned").get(&key) {
            return Ok(Arc::clone(f));
        }
        let factor = Arc::new(self.build_factor(c)?);
        self.cache
            .lock()
            .expect("factor cache poisoned")
            .insert(key, Arc::clone(&factor));
        Ok(factor)
    }

    fn build_factor(&self, c: f64) -> Result<ShiftedFactor> {
        match self.mode {
            SpaceMode::Scalar { lambda } => Ok(ShiftedFactor::Scalar { denom: c + lambda }),
            SpaceMode::FiniteDifference { interior } => {
                let h = 2.0 / (interior as f64 + 1.0);
                let diag = c + 2.0 / (h * h);
                let off = -1.0 / (h * h);
                let mut upper = vec![0.0; interior];
                let mut pivots = vec![0.0; interior];
                pivots[0] = diag;
                for i in 1..interior {
                    upper[i - 1] = off / pivots[i - 1];
                    pivots[i] = diag - off * upper[i - 1];
                }
                Ok(ShiftedFactor::Tridiagonal { off, upper, pivots })
            }
            SpaceMode::Chebyshev { .. } => {
                let n = self.dim();
                let mut lu: Vec<f64> = self.matrix.iter().map(|a| -a).collect();
                for i in 0..n {
                    lu[i * n + i] += c;
                }
                let perm = lu_in_place(&mut lu, n)?;
                Ok(ShiftedFactor::Lu { n, lu, perm })
            }
        }
    }

    /// Solves `(cI - A)x = rhs`.
    pub fn solve_shifted(&self, c: f64, rhs: &[f64]) -> Result<GridFunction> {
        self.check_dim(rhs.len())?;
        let factor = self.factor_shifted(c)?;
        let mut out = vec![0.0; rhs.len()];
        factor.solve_into(rhs, &mut out);
        Ok(GridFunction(out))
    }

    /// `sqrt(Σ ωᵢ wᵢ²)`.
    pub fn discrete_l2_norm(&self, w: &[f64]) -> Result<f64> {
        self.check_dim(w.len())?;
        if let SpaceMode::Scalar { .. } = self.mode {
            return Ok(w[0].abs());
        }
        Ok(self
            .norm_weights
            .iter()
            .zip(w)
            .map(|(o, v)| o * v * v)
            .sum::<f64>()
            .sqrt())
    }
}

/// Doolittle LU with partial pivoting; returns the row permutation.
fn lu_in_place(a: &mut [f64], n: usize) -> Result<Vec<usize>> {
    let mut perm: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let (p, max) = (k..n)
            .map(|i| (i, a[i * n + k].abs()))
            .fold(
                (k, -1.0),
                |best, cur| if cur.1 > best.1 { cur } else { best },
            );
        if max == 0.0 {
            return Err(Error::SingularSystem { column: k });
        }
        if p != k {
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
            perm.swap(k, p);
        }
        let pivot = a[k * n + k];
        for i in k + 1..n {
            let l = a[i * n + k] / pivot;
            a[i * n + k] = l;
            if l != 0.0 {
                for j in k + 1..n {
                    a[i * n + j] -= l * a[k * n + j];
                }
            }
        }
    }
    Ok(perm)
}

/// Full `(m+1)²` second-derivative matrix at the ascending CGL points
/// `x_j = -cos(jπ/m)`, row-major.
///
/// Off-diagonal entries use the trigonometric form of `x_i - x_j`; diagonals
/// are negative row sums so constants are differentiated exactly.
fn cheb_second_derivative(m: usize) -> Vec<f64> {
    let n = m + 1;
    let c = |j: usize| if j == 0 || j == m { 2.0 } else { 1.0 };
    let half = PI / (2.0 * m as f64);
    let diff = |i: usize, j: usize| {
        2.0 * (half * (i + j) as f64).sin() * (half * (i as f64 - j as f64)).sin()
    };

    let mut d1 = vec![0.0; n * n];
    for i in 0..n {
        let mut row_sum = 0.0;
        for j in 0..n {
            if i != j {
                let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                let v = c(i) / c(j) * sign / diff(i, j);
                d1[i * n + j] = v;
                row_sum += v;
            }
        }
        d1[i * n + i] = -row_sum;
    }

    let mut d2 = vec![0.0; n * n];
    for i in 0..n {
        let mut row_sum = 0.0;
        for j in 0..n {
            if i != j {
                let v = 2.0 * d1[i * n + j] * (d1[i * n + i] - 1.0 / diff(i, j));
                d2[i * n + j] = v;
                row_sum += v;
            }
        }
        d2[i * n + i] = -row_sum;
    }
    d2
}

/// Clenshaw-Curtis weights at the `m + 1` CGL points.
fn clenshaw_curtis(m: usize) -> Vec<f64> {
    let mf = m as f64;
    let mut w = vec![0.0; m + 1];
    let end = if m.is_multiple_of(2) {
        1.0 / (mf * mf - 1.0)
    } else {
        1.0 / (mf * mf)
    };
    w[0] = end;
    w[m] = end;
    for (j, wj) in w.iter_mut().enumerate().take(m).skip(1) {
        let theta = PI * j as f64 / mf;
        let mut v = 1.0;
        if m.is_multiple_of(2) {
            for k in 1..m / 2 {
                let kf = k as f64;
                v -= 2.0 * (2.0 * kf * theta).cos() / (4.0 * kf * kf - 1.0);
            }
            v -= (mf * theta).cos() / (mf * mf - 1.0);
        } else {
            for k in 1..=(m - 1) / 2 {
                let kf = k as f64;
                v -= 2.0 * (2.0 * kf * theta).cos() / (4.0 * kf * kf - 1.0);
            }
        }
        *wj = 2.0 * v / mf;
    }
    w
}

/// One Dirichlet eigenpair of `d²/dx²` on `(-1, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigenpair {
    pub k: usize,
    /// `(kπ/2)²`
    pub lambda: f64,
}

impl Eigenpair {
    /// `φ_k(x) = sin(kπ(x+1)/2)`
    pub fn phi(&self, x: f64) -> f64 {
        (self.k as f64 * PI * (x + 1.0) / 2.0).sin()
    }
}

/// The first `k_max` eigenpairs, `λ_k = (kπ/2)²`.
pub fn eigenpairs(k_max: usize) -> Vec<Eigenpair> {
    (1..=k_max)
        .map(|k| Eigenpair {
            k,
            lambda: (k as f64 * PI / 2.0).powi(2),
        })
        .collect()
}
