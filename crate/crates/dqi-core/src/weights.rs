//! The optimal DQI amplitude weights `w_k`.
//!
//! The weights are the principal eigenvector of the symmetric tridiagonal
//! matrix with diagonal `(0, d, 2d, ..., l*d)` and off-diagonal entries
//! `a_k = sqrt(k (m - k + 1))`, where `d = (p - 2r) / sqrt(r (p - r))`.
//! For Max-XORSAT `p = 2, r = 1`, so `d = 0`.

use serde::Serialize;

use crate::error::{Error, Result};

/// Parameters of the weight matrix.
#[derive(Clone, Copy, Debug)]
pub struct TridiagonalSpec {
    /// Number of constraints.
    pub m: usize,
    /// Polynomial degree (maximum error weight).
    pub ell: usize,
    /// Field prime; 2 for Max-XORSAT.
    pub p: u32,
    /// Number of satisfying inputs per constraint; 1 for Max-XORSAT.
    pub r: u32,
}

impl TridiagonalSpec {
    /// Max-XORSAT parameters (`p = 2`, `r = 1`).
    pub fn xorsat(m: usize, ell: usize) -> Self {
        assert!(ell >= 1 && ell <= m, "require 1 <= ell <= m");
        Self { m, ell, p: 2, r: 1 }
    }

    /// Diagonal scaling parameter `d = (p - 2r) / sqrt(r (p - r))`.
    pub fn d(&self) -> f64 {
        let (p, r) = (self.p as f64, self.r as f64);
        (p - 2.0 * r) / (r * (p - r)).sqrt()
    }

    /// Off-diagonal entry `a_k = sqrt(k (m - k + 1))` for `k = 1..=ell`.
    pub fn a(&self, k: usize) -> f64 {
        debug_assert!(k >= 1 && k <= self.ell);
        ((k * (self.m - k + 1)) as f64).sqrt()
    }
}

/// Dense symmetric matrix, row-major; only used at size `(ell+1)^2`.
pub type DenseMatrix = Vec<Vec<f64>>;

/// Build the `(ell+1) x (ell+1)` weight matrix: diagonal entry `k` (0-based)
/// is `k * d`, and entry `(k-1, k) = (k, k-1) = a_k`.
pub fn build_matrix(spec: &TridiagonalSpec) -> DenseMatrix {
    let n = spec.ell + 1;
    let d = spec.d();
    let mut a = vec![vec![0.0; n]; n];
    for k in 0..n {
        a[k][k] = k as f64 * d;
    }
    for k in 1..n {
        let v = spec.a(k);
        a[k - 1][k] = v;
        a[k][k - 1] = v;
    }
    a
}

/// The weights `w_0..w_ell` with their eigenvalue.
#[derive(Clone, Debug, Serialize)]
pub struct WeightVector {
    pub w: Vec<f64>,
    pub eigenvalue: f64,
}

impl WeightVector {
    pub fn ell(&self) -> usize {
        self.w.len() - 1
    }
}

const POWER_TOL: f64 = 1e-12;
const POWER_MAX_ITERS: usize = 100_000;
const RESIDUAL_TOL: f64 = 1e-10;

/// Principal (largest-eigenvalue) eigenpair of a symmetric matrix via
/// shifted power iteration. The shift is the maximum absolute row sum, which
/// makes the target eigenvalue dominant in magnitude. The sign is fixed so
/// the largest-magnitude component is positive and the vector is normalized.
pub fn principal_eigenvector(a: &DenseMatrix) -> Result<WeightVector> {
    let n = a.len();
    assert!(n >= 1 && a.iter().all(|row| row.len() == n), "matrix must be square");
    if n == 1 {
        return Ok(WeightVector { w: vec![1.0], eigenvalue: a[0][0] });
    }

    let shift: f64 = a
        .iter()
        .map(|row| row.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max);

    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut prev = v.clone();
    let mut converged = false;
    for _ in 0..POWER_MAX_ITERS {
        let mut next = vec![0.0; n];
        for i in 0..n {
            let mut acc = shift * v[i];
            for j in 0..n {
                acc += a[i][j] * v[j];
            }
            next[i] = acc;
        }
        let norm = next.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            // v landed in the kernel of A + shift I; restart deterministically
            next = (0..n).map(|i| ((i + 1) as f64).sqrt()).collect();
            let r = next.iter().map(|x| x * x).sum::<f64>().sqrt();
            next.iter_mut().for_each(|x| *x /= r);
        } else {
            next.iter_mut().for_each(|x| *x /= norm);
        }
        let delta = next
            .iter()
            .zip(&prev)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        prev = next.clone();
        v = next;
        if delta < POWER_TOL {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence(POWER_MAX_ITERS));
    }

    // Rayleigh quotient of the (unit) iterate
    let av: Vec<f64> = (0..n).map(|i| (0..n).map(|j| a[i][j] * v[j]).sum()).collect();
    let lambda: f64 = v.iter().zip(&av).map(|(x, y)| x * y).sum();

    let residual = av
        .iter()
        .zip(&v)
        .map(|(x, y)| (x - lambda * y).abs())
        .fold(0.0, f64::max);
    if residual > RESIDUAL_TOL {
        return Err(Error::NoConvergence(POWER_MAX_ITERS));
    }

    // sign: largest-magnitude component positive
    let mut idx = 0;
    for i in 1..n {
        if v[i].abs() > v[idx].abs() {
            idx = i;
        }
    }
    if v[idx] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }

    Ok(WeightVector { w: v, eigenvalue: lambda })
}

/// Weights for a Max-XORSAT instance with `m` constraints and degree `ell`.
pub fn xorsat_weights(m: usize, ell: usize) -> Result<WeightVector> {
    principal_eigenvector(&build_matrix(&TridiagonalSpec::xorsat(m, ell)))
}
