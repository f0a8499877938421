//! Dense Hermitian eigenvalues and symmetric tridiagonal solvers.
//!
//! Hermitian matrices are reduced to real symmetric tridiagonal form with
//! complex Householder reflections and then diagonalized by implicit QL
//! with Wilkinson-style shifts. Matrices are row-major `dim * dim` slices.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::C64;

/// Largest deviation `|a_ij - conj(a_ji)|` over the matrix.
pub fn hermiticity_defect(a: &[C64], dim: usize) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..dim {
        for j in i..dim {
            let d = (a[i * dim + j] - a[j * dim + i].conj()).norm();
            worst = worst.max(d);
        }
    }
    worst
}

/// All eigenvalues of a Hermitian matrix, ascending.
///
/// Only the upper triangle (including the diagonal) is read.
pub fn hermitian_eigenvalues(a: &[C64], dim: usize) -> Vec<f64> {
    debug_assert_eq!(a.len(), dim * dim);
    match dim {
        0 => Vec::new(),
        1 => vec![a[0].re],
        2 => {
            let (lo, hi) = eig2(a[0].re, a[3].re, a[1]);
            vec![lo, hi]
        }
        _ => {
            let mut work = a.to_vec();
            let (mut diag, mut off) = tridiagonalize(&mut work, dim);
            tridiagonal_ql(&mut diag, &mut off);
            diag.sort_by(f64::total_cmp);
            diag
        }
    }
}

/// Largest eigenvalue of a Hermitian matrix.
pub fn hermitian_max_eigenvalue(a: &[C64], dim: usize) -> f64 {
    match dim {
        0 => f64::NEG_INFINITY,
        1 => a[0].re,
        2 => eig2(a[0].re, a[3].re, a[1]).1,
        _ => {
            let mut work = a.to_vec();
            let (mut diag, mut off) = tridiagonalize(&mut work, dim);
            tridiagonal_ql(&mut diag, &mut off);
            diag.into_iter().fold(f64::NEG_INFINITY, f64::max)
        }
    }
}

/// Closed-form eigenvalues `(low, high)` of `[[a, b], [b*, d]]`.
#[inline]
pub fn eig2(a: f64, d: f64, b: C64) -> (f64, f64) {
    let mean = 0.5 * (a + d);
    let half = 0.5 * (a - d);
    let radius = (half * half + b.norm_sqr()).sqrt();
    (mean - radius, mean + radius)
}

/// Householder reduction of a Hermitian matrix (upper triangle and diagonal
/// are read; the buffer is destroyed) to a real symmetric tridiagonal matrix
/// with the same spectrum.
///
/// Returns `(diagonal, off_diagonal)`; `off_diagonal[k]` couples rows `k`
/// and `k + 1`, and the vector is padded with a trailing zero.
fn tridiagonalize(m: &mut [C64], dim: usize) -> (Vec<f64>, Vec<f64>) {
    // Fill the lower triangle from the upper one so callers may pass either.
    for i in 0..dim {
        for j in (i + 1)..dim {
            m[j * dim + i] = m[i * dim + j].conj();
        }
    }
    let mut diag = vec![0.0; dim];
    let mut off = vec![0.0; dim];
    let mut v = vec![C64::new(0.0, 0.0); dim];
    let mut p = vec![C64::new(0.0, 0.0); dim];

    for k in 0..dim.saturating_sub(1) {
        diag[k] = m[k * dim + k].re;
        let start = k + 1;
        let len = dim - start;
        if len == 1 {
            off[k] = m[start * dim + k].norm();
            continue;
        }
        let mut norm_sq = 0.0;
        for i in start..dim {
            norm_sq += m[i * dim + k].norm_sqr();
        }
        let norm = norm_sq.sqrt();
        if norm == 0.0 {
            off[k] = 0.0;
            continue;
        }
        let x0 = m[start * dim + k];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { C64::new(1.0, 0.0) };
        let alpha = -phase * norm;

        let v = &mut v[..len];
        for (idx, i) in (start..dim).enumerate() {
            v[idx] = m[i * dim + k];
        }
        v[0] -= alpha;
        let v_norm_sq: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if v_norm_sq == 0.0 {
            off[k] = norm;
            continue;
        }
        let tau = 2.0 / v_norm_sq;

        // p = tau * B v over the trailing block B.
        let p = &mut p[..len];
        for (ii, i) in (start..dim).enumerate() {
            let row = &m[i * dim + start..i * dim + dim];
            let mut acc = C64::new(0.0, 0.0);
            for (b, vj) in row.iter().zip(v.iter()) {
                acc += b * vj;
            }
            p[ii] = acc * tau;
        }
        let mut vp = C64::new(0.0, 0.0);
        for (vi, pi) in v.iter().zip(p.iter()) {
            vp += vi.conj() * pi;
        }
        let half_k = 0.5 * tau * vp.re;
        for (pi, vi) in p.iter_mut().zip(v.iter()) {
            *pi -= vi * half_k;
        }
        // B <- B - v w^H - w v^H with w stored in p.
        for (ii, i) in (start..dim).enumerate() {
            let (vi, wi) = (v[ii], p[ii]);
            let row = &mut m[i * dim + start..i * dim + dim];
            for (jj, b) in row.iter_mut().enumerate() {
                *b -= vi * p[jj].conj() + wi * v[jj].conj();
            }
        }
        off[k] = norm;
    }
    diag[dim - 1] = m[(dim - 1) * dim + dim - 1].re;
    (diag, off)
}

/// Eigenvalues of the symmetric tridiagonal matrix (`diag`, `off`) by
/// implicit QL. On return `diag` holds the (unsorted) eigenvalues and `off`
/// is destroyed. `off[k]` couples `k` and `k + 1`; `off.len() == diag.len()`.
pub fn tridiagonal_ql(diag: &mut [f64], off: &mut [f64]) {
    let n = diag.len();
    if n < 2 {
        return;
    }
    debug_assert_eq!(off.len(), n);
    off[n - 1] = 0.0;
    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = diag[m].abs() + diag[m + 1].abs();
                if off[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > 90 {
                break;
            }
            let mut g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
            let mut r = g.hypot(1.0);
            g = diag[m] - diag[l] + off[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * off[i];
                let b = c * off[i];
                r = f.hypot(g);
                off[i + 1] = r;
                if r == 0.0 {
                    diag[i + 1] -= p;
                    off[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            diag[l] -= p;
            off[l] = g;
            off[m] = 0.0;
        }
    }
}

/// Eigenvalues of a symmetric tridiagonal matrix, ascending.
pub fn tridiagonal_eigenvalues(diag: &[f64], off: &[f64]) -> Vec<f64> {
    let mut d = diag.to_vec();
    let mut e = vec![0.0; d.len()];
    e[..off.len().min(d.len())].copy_from_slice(&off[..off.len().min(d.len())]);
    tridiagonal_ql(&mut d, &mut e);
    d.sort_by(f64::total_cmp);
    d
}

/// Unit eigenvector of a symmetric tridiagonal matrix for the eigenvalue
/// `lambda`, by two steps of inverse iteration.
pub fn tridiagonal_eigenvector(diag: &[f64], off: &[f64], lambda: f64) -> Vec<f64> {
    let n = diag.len();
    if n == 1 {
        return vec![1.0];
    }
    let scale = diag
        .iter()
        .chain(off.iter())
        .fold(0.0f64, |acc, x| acc.max(x.abs()))
        .max(f64::MIN_POSITIVE);
    let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 1e-3 * i as f64).collect();
    for _ in 0..3 {
        solve_shifted(diag, off, lambda, scale, &mut x);
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            break;
        }
        x.iter_mut().for_each(|v| *v /= norm);
    }
    x
}

/// Solves `(T - shift I) x = rhs` in place by LU with partial pivoting.
fn solve_shifted(diag: &[f64], off: &[f64], shift: f64, scale: f64, rhs: &mut [f64]) {
    let n = diag.len();
    let tiny = f64::EPSILON * scale;
    let mut d: Vec<f64> = diag.iter().map(|v| v - shift).collect();
    let mut dl: Vec<f64> = off[..n - 1].to_vec();
    let mut du: Vec<f64> = off[..n - 1].to_vec();
    let mut du2 = vec![0.0; n.saturating_sub(2)];
    let mut swapped = vec![false; n - 1];

    for i in 0..n - 1 {
        if d[i].abs() >= dl[i].abs() {
            if d[i] == 0.0 {
                d[i] = tiny;
            }
            let fact = dl[i] / d[i];
            dl[i] = fact;
            d[i + 1] -= fact * du[i];
        } else {
            let fact = d[i] / dl[i];
            d[i] = dl[i];
            dl[i] = fact;
            let temp = du[i];
            du[i] = d[i + 1];
            d[i + 1] = temp - fact * d[i + 1];
            if i < n - 2 {
                du2[i] = du[i + 1];
                du[i + 1] = -fact * du[i + 1];
            }
            swapped[i] = true;
        }
    }
    if d[n - 1] == 0.0 {
        d[n - 1] = tiny;
    }

    for i in 0..n - 1 {
        if swapped[i] {
            let temp = rhs[i];
            rhs[i] = rhs[i + 1];
            rhs[i + 1] = temp - dl[i] * rhs[i];
        } else {
            rhs[i + 1] -= dl[i] * rhs[i];
        }
    }
    rhs[n - 1] /= d[n - 1];
    if n > 1 {
        rhs[n - 2] = (rhs[n - 2] - du[n - 2] * rhs[n - 1]) / d[n - 2];
    }
    for i in (0..n.saturating_sub(2)).rev() {
        rhs[i] = (rhs[i] - du[i] * rhs[i + 1] - du2[i] * rhs[i + 2]) / d[i];
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn two_by_two_closed_form() {
        let (lo, hi) = eig2(0.5, 0.5, c(0.0, 0.0));
        assert_abs_diff_eq!(lo, 0.5);
        assert_abs_diff_eq!(hi, 0.5);
        let (lo, hi) = eig2(1.0, 0.0, c(0.0, 0.0));
        assert_abs_diff_eq!(lo, 0.0);
        assert_abs_diff_eq!(hi, 1.0);
    }

    #[test]
    fn tridiagonal_matches_known_spectrum() {
        // Path-graph Laplacian-like matrix: 2 on the diagonal, -1 off it.
        let n = 8;
        let diag = vec![2.0; n];
        let off = vec![-1.0; n - 1];
        let evals = tridiagonal_eigenvalues(&diag, &off);
        for (k, ev) in evals.iter().enumerate() {
            let expected =
                2.0 - 2.0 * (core::f64::consts::PI * (k + 1) as f64 / (n + 1) as f64).cos();
            assert_abs_diff_eq!(*ev, expected, epsilon = 1e-12);
        }
    }

    #[test]
    fn inverse_iteration_recovers_eigenvector() {
        let diag = [1.0, -2.0, 0.5, 3.0];
        let off = [0.3, 0.7, -0.2];
        let evals = tridiagonal_eigenvalues(&diag, &off);
        let x = tridiagonal_eigenvector(&diag, &off, evals[0]);
        for i in 0..4 {
            let mut tx = diag[i] * x[i];
            if i > 0 {
                tx += off[i - 1] * x[i - 1];
            }
            if i < 3 {
                tx += off[i] * x[i + 1];
            }
            assert_abs_diff_eq!(tx, evals[0] * x[i], epsilon = 1e-12);
        }
    }

    #[test]
    fn complex_hermitian_spectrum() {
        // diag(3, 1) rotated by a unitary plus a decoupled block.
        let a = [
            c(2.0, 0.0),
            c(0.0, 1.0),
            c(0.0, 0.0),
            c(0.0, -1.0),
            c(2.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(-1.0, 0.0),
        ];
        let evals = hermitian_eigenvalues(&a, 3);
        assert_abs_diff_eq!(evals[0], -1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(evals[1], 1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(evals[2], 3.0, epsilon = 1e-13);
        assert_abs_diff_eq!(hermitian_max_eigenvalue(&a, 3), 3.0, epsilon = 1e-13);
    }
}
