//! Closed-form GGM and LGGM values for state families where they are known,
//! plus the analytic post-measurement quantities they are built from.
//!
//! Outcome indices follow [`crate::qstate::measurement_bras`]: outcome 0 is
//! the projection onto `|ξ¹⟩`, outcome 1 onto `|ξ²⟩`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::optimize::{maximize_over_angles, OptimizerSettings};
use crate::qstate::{binomial, DensityMatrix};
use crate::C64;

/// A closed-form value with a note on where it comes from and where it holds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticValue {
    pub value: f64,
    pub source: &'static str,
    pub validity: &'static str,
}

impl AnalyticValue {
    fn new(value: f64, source: &'static str, validity: &'static str) -> Self {
        Self { value, source, validity }
    }
}

/// `(q_1, q_2)` for both outcomes of a single-qubit measurement at polar
/// angle `theta`: the weights with which the `|0>` and `|1>` branches of
/// the measured qubit survive.
pub fn branch_weights(theta: f64) -> [(f64, f64); 2] {
    let (s, c) = (0.5 * theta).sin_cos();
    [(c * c, s * s), (s * s, c * c)]
}

/// `u^l`: `cos^4(θ/2)` for outcome 0 and `sin^4(θ/2)` for outcome 1.
pub fn fourth_power_weight(theta: f64, outcome: usize) -> f64 {
    let (s, c) = (0.5 * theta).sin_cos();
    if outcome == 0 {
        c.powi(4)
    } else {
        s.powi(4)
    }
}

/// LGGM of `a1|0..0> + a2|1..1>` measured on one qubit, with
/// `|a2|^2 <= 1/2`: the smaller branch weight.
pub fn gghz_lggm(a2_sq: f64) -> Result<AnalyticValue> {
    if !(0.0..=0.5).contains(&a2_sq) {
        return Err(Error::InvalidParameter(format!(
            "smaller branch weight {a2_sq} must lie in [0, 1/2]"
        )));
    }
    Ok(AnalyticValue::new(a2_sq, "gGHZ: smaller branch weight", "any N >= 3, any position"))
}

fn check_weights(a_sq: &[f64]) -> Result<()> {
    let sum: f64 = a_sq.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter(format!("weights sum to {sum}, expected 1")));
    }
    if a_sq.iter().any(|&w| !(w > 0.0)) {
        return Err(Error::InvalidParameter(
            "a zero weight removes a qubit from the W superposition".into(),
        ));
    }
    Ok(())
}

/// LGGM of a three-qubit gW state with weights `a_sq` measured on qubit
/// `r`: the smaller of the two weights not on `r`.
pub fn gw_lggm_table(a_sq: [f64; 3], r: usize) -> Result<AnalyticValue> {
    check_weights(&a_sq)?;
    if !(1..=3).contains(&r) {
        return Err(Error::InvalidPositions(format!("position {r} outside 1..=3")));
    }
    let value = (0..3).filter(|&i| i != r - 1).map(|i| a_sq[i]).fold(f64::INFINITY, f64::min);
    Ok(AnalyticValue::new(value, "gW3: min of the unmeasured weights", "computational basis optimal"))
}

/// GGM of a gW state: its smallest weight.
pub fn gw_ggm(a_sq: &[f64]) -> Result<AnalyticValue> {
    check_weights(a_sq)?;
    let value = a_sq.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(AnalyticValue::new(value, "gW: smallest weight", "N >= 3"))
}

/// Largest LGGM any gW state with the same smallest weight can reach by a
/// single-qubit measurement: `(1 - min a)/(N - 1)`.
pub fn gw_lggm_upper_bound(a_sq: &[f64]) -> Result<AnalyticValue> {
    check_weights(a_sq)?;
    let min = a_sq.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(AnalyticValue::new(
        (1.0 - min) / (a_sq.len() - 1) as f64,
        "gW: equal-weight remainder bound",
        "single-qubit measurement",
    ))
}

/// Global single-qubit LGGM of a gW state: measure the qubit with the
/// smallest weight (smallest index on ties), leaving the second smallest.
pub fn gw_global_lggm(a_sq: &[f64]) -> Result<(usize, AnalyticValue)> {
    check_weights(a_sq)?;
    let mut r = 0;
    for (i, &w) in a_sq.iter().enumerate() {
        if w < a_sq[r] {
            r = i;
        }
    }
    let value = a_sq
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != r)
        .map(|(_, &w)| w)
        .fold(f64::INFINITY, f64::min);
    Ok((r + 1, AnalyticValue::new(value, "gW: measure the smallest weight", "computational basis optimal")))
}

fn fold_excitations(n: usize, k: usize) -> Result<usize> {
    if k > n {
        return Err(Error::InvalidParameter(format!("excitations {k} outside 0..={n}")));
    }
    Ok(if 2 * k > n { n - k } else { k })
}

/// GGM of the Dicke state `|D^N_k>`, `N > 2`.
pub fn dicke_ggm(n: usize, k: usize) -> Result<AnalyticValue> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("Dicke GGM formula needs N > 2, got {n}")));
    }
    let k = fold_excitations(n, k)?;
    let nf = n as f64;
    Ok(if 2 * k == n {
        AnalyticValue::new((nf - 2.0) / (2.0 * (nf - 1.0)), "Dicke GGM, half filling", "k = N/2")
    } else {
        AnalyticValue::new(k as f64 / nf, "Dicke GGM", "k < N/2")
    })
}

/// Single-qubit LGGM of `|D^N_k>`, `N >= 3`.
pub fn dicke_lggm(n: usize, k: usize) -> Result<AnalyticValue> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("Dicke LGGM formula needs N >= 3, got {n}")));
    }
    let k = fold_excitations(n, k)?;
    if n % 2 == 0 {
        return dicke_ggm(n, k).map(|v| AnalyticValue { source: "Dicke LGGM, even N", ..v });
    }
    let nf = n as f64;
    Ok(if n == 3 && k == 1 {
        AnalyticValue::new(1.0 / 3.0, "Dicke LGGM, N = 3", "k = 1, 2")
    } else if 2 * k + 1 == n {
        AnalyticValue::new(
            (nf - 1.0) / (2.0 * nf) - (nf + 1.0) / (4.0 * nf * (nf - 2.0)),
            "Dicke LGGM, odd N near half filling",
            "k = (N +- 1)/2, N > 3",
        )
    } else {
        AnalyticValue::new(k as f64 / nf, "Dicke LGGM, odd N", "k < (N - 1)/2")
    })
}

/// Tabulated `(G, E_L^1..4, E_L^{12,13,14,23,24,34})` for the parameter-free
/// four-qubit families 7, 8 and 9.
fn fourq_row(class: u8) -> Result<[f64; 11]> {
    const Q: f64 = 0.25;
    const H: f64 = 0.5;
    match class {
        7 => Ok([Q; 11]),
        8 => Ok([Q, H, Q, Q, Q, H, H, H, H, H, Q]),
        9 => Ok([0.0, H, 0.0, 0.0, 0.0, H, H, H, H, H, 0.0]),
        _ => Err(Error::InvalidParameter(format!("tabulated classes are 7, 8, 9; got {class}"))),
    }
}

/// Tabulated GGM of four-qubit family 7, 8 or 9.
pub fn fourq_ggm(class: u8) -> Result<AnalyticValue> {
    Ok(AnalyticValue::new(fourq_row(class)?[0], "four-qubit table", "GGM"))
}

/// Tabulated LGGM of four-qubit family 7, 8 or 9 for one measured qubit or
/// a pair of measured qubits.
pub fn fourq_table(class: u8, positions: &[usize]) -> Result<AnalyticValue> {
    let row = fourq_row(class)?;
    let mut p = positions.to_vec();
    p.sort_unstable();
    let column = match p.as_slice() {
        [r @ 1..=4] => *r,
        [a, b] if a != b && (1..=4).contains(a) && (1..=4).contains(b) => {
            const PAIRS: [[usize; 2]; 6] = [[1, 2], [1, 3], [1, 4], [2, 3], [2, 4], [3, 4]];
            5 + PAIRS.iter().position(|q| q == &[*a, *b]).expect("valid pair")
        }
        _ => {
            return Err(Error::InvalidPositions(format!(
                "expected one qubit or a pair of qubits in 1..=4, got {positions:?}"
            )))
        }
    };
    Ok(AnalyticValue::new(row[column], "four-qubit table", "measured qubits as given"))
}

/// Sum over both outcomes of `sqrt(p_l^2 - 4 a1 a2 u_l)` for the W-class
/// state `sqrt(a1)|001> + sqrt(a2)|010> + sqrt(a3)|100> + sqrt(a4)|000>`
/// measured on qubit 1 at angles `(theta, phi)`.
pub fn wclass_fwc(a: [f64; 4], theta: f64, phi: f64) -> Result<f64> {
    if a.iter().any(|&x| !(x >= 0.0 && x.is_finite())) || (a.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter(format!("invalid W-class weights {a:?}")));
    }
    Ok(wclass_fwc_unchecked(a, theta, phi))
}

fn wclass_fwc_unchecked(a: [f64; 4], theta: f64, phi: f64) -> f64 {
    let [a1, a2, a3, a4] = a;
    let cross = (a3 * a4).sqrt() * theta.sin() * phi.cos();
    branch_weights(theta)
        .iter()
        .enumerate()
        .map(|(l, &(q1, q2))| {
            let sign = if l == 0 { 1.0 } else { -1.0 };
            let p = (a1 + a2 + a4) * q1 + a3 * q2 + sign * cross;
            (p * p - 4.0 * a1 * a2 * fourth_power_weight(theta, l)).max(0.0).sqrt()
        })
        .sum()
}

/// `(1 - min f_wc)/2`, the qubit-1 LGGM of a W-class state, minimized with
/// the generic angle search.
pub fn wclass_lggm(a: [f64; 4], settings: &OptimizerSettings) -> Result<f64> {
    wclass_fwc(a, 0.0, 0.0)?;
    let best = maximize_over_angles(1, settings, &[], |x| {
        0.5 * (1.0 - wclass_fwc_unchecked(a, x[0], x[1]))
    })?;
    Ok(best.value)
}

/// Reduced density matrix, in the symmetric basis `|D^n_0>..|D^n_n>`, of
/// `n` qubits of the state left after measuring one qubit of `|D^N_k>` at
/// `(theta, phi)` with the given outcome.
pub fn dicke_post_measurement_symmetric(
    n_total: usize,
    k: usize,
    n: usize,
    theta: f64,
    phi: f64,
    outcome: usize,
) -> Result<Vec<C64>> {
    if n_total < 3 || k > n_total {
        return Err(Error::InvalidParameter(format!("invalid Dicke state N = {n_total}, k = {k}")));
    }
    if n == 0 || n > (n_total - 1) / 2 {
        return Err(Error::InvalidParameter(format!(
            "subset size {n} outside 1..={}",
            (n_total - 1) / 2
        )));
    }
    if outcome > 1 {
        return Err(Error::InvalidParameter(format!("outcome {outcome} must be 0 or 1")));
    }
    let (q1, q2) = branch_weights(theta)[outcome];
    let total = binomial(n_total, k);
    let a_k = binomial(n_total - 1, k) / total;
    let b_k = if k == 0 { 0.0 } else { binomial(n_total - 1, k - 1) / total };
    let p = a_k * q1 + b_k * q2;
    if p < crate::qstate::PROBABILITY_FLOOR {
        return Err(Error::InvalidParameter("outcome has zero probability".into()));
    }
    let rest = n_total - 1 - n;
    let c = |top: usize, bottom: isize| -> f64 {
        if bottom < 0 {
            0.0
        } else {
            binomial(top, bottom as usize)
        }
    };
    let k = k as isize;
    let dim = n + 1;
    let mut rho = vec![C64::new(0.0, 0.0); dim * dim];
    let norm = 1.0 / (total * p);
    for i in 0..=n {
        let ii = i as isize;
        let f = binomial(n, i) * (c(rest, k - ii) * q1 + c(rest, k - ii - 1) * q2);
        rho[i * dim + i] = C64::new(f * norm, 0.0);
    }
    let sign = if outcome == 0 { 1.0 } else { -1.0 };
    let phase = C64::from_polar(1.0, -phi);
    for i in 0..n {
        let ii = i as isize;
        let g = 0.5 * theta.sin() * c(rest, k - ii - 1) * (binomial(n, i + 1) * binomial(n, i)).sqrt();
        let upper = phase * (sign * g * norm);
        rho[i * dim + i + 1] = upper;
        rho[(i + 1) * dim + i] = upper.conj();
    }
    Ok(rho)
}

/// [`dicke_post_measurement_symmetric`] expanded to the `2^n` qubit basis.
pub fn dicke_post_measurement_rdm(
    n_total: usize,
    k: usize,
    n: usize,
    theta: f64,
    phi: f64,
    outcome: usize,
) -> Result<DensityMatrix> {
    let sym = dicke_post_measurement_symmetric(n_total, k, n, theta, phi, outcome)?;
    let dim_sym = n + 1;
    let dim = 1usize << n;
    let mut entries = vec![C64::new(0.0, 0.0); dim * dim];
    for a in 0..dim {
        let wa = a.count_ones() as usize;
        for b in 0..dim {
            let wb = b.count_ones() as usize;
            let scale = 1.0 / (binomial(n, wa) * binomial(n, wb)).sqrt();
            entries[a * dim + b] = sym[wa * dim_sym + wb] * scale;
        }
    }
    DensityMatrix::from_entries(n, entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use core::f64::consts::PI;

    #[test]
    fn gghz_examples() {
        assert_eq!(gghz_lggm(0.5).unwrap().value, 0.5);
        assert_eq!(gghz_lggm(0.0).unwrap().value, 0.0);
        assert_eq!(gghz_lggm(0.3).unwrap().value, 0.3);
        assert!(gghz_lggm(0.6).is_err());
    }

    #[test]
    fn gw_min_rule() {
        assert_abs_diff_eq!(gw_lggm_table([0.5, 0.3, 0.2], 1).unwrap().value, 0.2);
        assert_abs_diff_eq!(gw_lggm_table([1.0 / 3.0; 3], 2).unwrap().value, 1.0 / 3.0);
        assert_abs_diff_eq!(gw_lggm_table([0.2, 0.5, 0.3], 3).unwrap().value, 0.2);
        assert!(gw_lggm_table([0.5, 0.5, 0.0], 1).is_err());
        let (r, v) = gw_global_lggm(&[0.2, 0.5, 0.3]).unwrap();
        assert_eq!(r, 1);
        assert_abs_diff_eq!(v.value, 0.3);
    }

    #[test]
    fn dicke_closed_forms() {
        assert_abs_diff_eq!(dicke_ggm(6, 3).unwrap().value, 0.4);
        assert_abs_diff_eq!(dicke_ggm(7, 0).unwrap().value, 0.0);
        assert_abs_diff_eq!(dicke_ggm(7, 3).unwrap().value, 3.0 / 7.0);
        assert_abs_diff_eq!(dicke_ggm(7, 4).unwrap().value, 3.0 / 7.0);
        assert_abs_diff_eq!(dicke_lggm(8, 4).unwrap().value, 3.0 / 7.0, epsilon = 1e-15);
        assert_abs_diff_eq!(dicke_lggm(3, 1).unwrap().value, 1.0 / 3.0);
        assert_abs_diff_eq!(dicke_lggm(3, 2).unwrap().value, 1.0 / 3.0);
        assert_abs_diff_eq!(dicke_lggm(9, 4).unwrap().value, 4.0 / 9.0 - 5.0 / 126.0, epsilon = 1e-15);
        assert_abs_diff_eq!(dicke_lggm(7, 3).unwrap().value, 0.371_428_571, epsilon = 1e-9);
    }

    #[test]
    fn dicke_lggm_never_exceeds_ggm() {
        for n in 3..=10 {
            for k in 0..=n {
                let g = dicke_ggm(n, k).unwrap().value;
                let l = dicke_lggm(n, k).unwrap().value;
                let strict = n % 2 == 1 && n > 3 && (2 * k + 1 == n || 2 * k == n + 1);
                if strict {
                    assert!(l < g - 1e-3, "N={n} k={k}");
                } else {
                    assert_abs_diff_eq!(l, g, epsilon = 1e-15);
                }
            }
        }
    }

    #[test]
    fn four_qubit_table_lookups() {
        assert_eq!(fourq_table(7, &[2]).unwrap().value, 0.25);
        assert_eq!(fourq_table(9, &[3]).unwrap().value, 0.0);
        assert_eq!(fourq_table(8, &[4, 3]).unwrap().value, 0.25);
        assert_eq!(fourq_table(8, &[1]).unwrap().value, 0.5);
        assert_eq!(fourq_ggm(9).unwrap().value, 0.0);
        assert!(fourq_table(6, &[1]).is_err());
        assert!(fourq_table(8, &[1, 1]).is_err());
    }

    #[test]
    fn fwc_reduces_for_pure_gw() {
        let a = [0.2, 0.3, 0.5, 0.0];
        let base = wclass_fwc(a, 0.8, 0.0).unwrap();
        assert_abs_diff_eq!(wclass_fwc(a, 0.8, 1.7).unwrap(), base, epsilon = 1e-15);
        // θ = 0: outcome probabilities a1 + a2 + a4 and a3.
        let a = [0.1, 0.2, 0.3, 0.4];
        let p0 = 0.7f64;
        let expected = (p0 * p0 - 4.0 * 0.1 * 0.2).sqrt() + 0.3;
        assert_abs_diff_eq!(wclass_fwc(a, 0.0, 0.0).unwrap(), expected, epsilon = 1e-15);
    }

    #[test]
    fn dicke_rdm_is_a_density_matrix() {
        let rho = dicke_post_measurement_rdm(6, 2, 2, 1.1, 0.4, 1).unwrap();
        assert_abs_diff_eq!(rho.trace(), 1.0, epsilon = 1e-12);
        assert!(rho.hermiticity_defect() < 1e-15);
        assert!(rho.eigenvalues().iter().all(|&e| e > -1e-12));
        let diag = dicke_post_measurement_symmetric(5, 2, 2, 0.0, 0.0, 0).unwrap();
        assert_abs_diff_eq!(diag[1].norm(), 0.0);
        assert!(dicke_post_measurement_symmetric(6, 2, 3, PI / 3.0, 0.0, 0).is_err());
    }
}
