//! Generalized geometric measure: one minus the largest squared Schmidt
//! coefficient over all bipartitions.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg;
use crate::qstate::{self, DensityMatrix, PureState};
use crate::C64;

/// Cuts whose largest eigenvalue is within this of the maximum are ties.
pub const CUT_TIE_TOLERANCE: f64 = 1e-10;

const HERMITIAN_TOLERANCE: f64 = 1e-10;

/// Which bipartitions to search.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum CutPolicy {
    /// Every subset of size `1..=N/2` (half-size subsets only once).
    #[default]
    AllCuts,
    /// Subsets of size at most the given bound.
    MaxCutSize(usize),
    /// Only the listed subsets (1-based positions).
    ExplicitCuts(Vec<Vec<usize>>),
}

/// Result of a GGM evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct GgmValue {
    pub value: f64,
    /// Canonical maximizing subset: the lexicographically smallest tie.
    pub argmax_cut: Vec<usize>,
    pub max_schmidt_sq: f64,
    /// Every cut within [`CUT_TIE_TOLERANCE`] of the maximum, sorted.
    pub tied_cuts: Vec<Vec<usize>>,
}

/// Largest eigenvalue of a Hermitian density matrix.
pub fn max_eigenvalue(rho: &DensityMatrix) -> Result<f64> {
    let defect = rho.hermiticity_defect();
    if defect > HERMITIAN_TOLERANCE {
        return Err(Error::NotHermitian(defect));
    }
    Ok(linalg::hermitian_max_eigenvalue(rho.entries(), rho.dim()))
}

/// Squared Schmidt coefficients across `subset : rest`, descending.
pub fn schmidt_spectrum(state: &PureState, subset: &[usize]) -> Result<Vec<f64>> {
    let rho = qstate::reduced_density(state, subset)?;
    Ok(rho.eigenvalues().into_iter().map(|x| x.max(0.0)).collect())
}

/// GGM of `state` over the cuts selected by `policy`.
pub fn ggm(state: &PureState, policy: &CutPolicy) -> Result<GgmValue> {
    let plan = CutPlan::new(state.n_qubits(), policy)?;
    let mut scratch = plan.scratch();
    let amps = state.amplitudes();
    let p = qstate::norm_sqr(amps);
    let deficits: Vec<f64> = plan.cuts.iter().map(|c| plan.deficit(c, amps, p, &mut scratch)).collect();
    let best = deficits.iter().copied().fold(f64::INFINITY, f64::min);
    let mut tied_cuts: Vec<Vec<usize>> = plan
        .cuts
        .iter()
        .zip(&deficits)
        .filter(|(_, d)| **d <= best + CUT_TIE_TOLERANCE)
        .map(|(c, _)| c.qubits.clone())
        .collect();
    tied_cuts.sort();
    let value = best.clamp(0.0, 1.0);
    Ok(GgmValue {
        value,
        argmax_cut: tied_cuts[0].clone(),
        max_schmidt_sq: 1.0 - value,
        tied_cuts,
    })
}

/// A prepared bipartition.
#[derive(Debug, Clone)]
pub(crate) struct Cut {
    pub(crate) qubits: Vec<usize>,
    offsets: Vec<usize>,
    complement: usize,
}

/// The set of cuts to search for states of a fixed size.
#[derive(Debug, Clone)]
pub(crate) struct CutPlan {
    n: usize,
    pub(crate) cuts: Vec<Cut>,
    max_dim: usize,
}

impl CutPlan {
    pub(crate) fn new(n: usize, policy: &CutPolicy) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!(
                "GGM needs at least 2 qubits, got {n}"
            )));
        }
        let half = n / 2;
        let subsets: Vec<Vec<usize>> = match policy {
            CutPolicy::AllCuts => enumerate_cuts(n, half),
            CutPolicy::MaxCutSize(k) => {
                if *k == 0 {
                    return Err(Error::InvalidParameter("maximum cut size must be >= 1".into()));
                }
                enumerate_cuts(n, (*k).min(half))
            }
            CutPolicy::ExplicitCuts(list) => {
                if list.is_empty() {
                    return Err(Error::EmptyCuts);
                }
                for cut in list {
                    if cut.is_empty() || cut.len() > half {
                        return Err(Error::InvalidPositions(format!(
                            "cut {cut:?} must have between 1 and {half} qubits"
                        )));
                    }
                    qstate::validate_positions(n, cut)?;
                }
                list.iter()
                    .map(|c| {
                        let mut c = c.clone();
                        c.sort_unstable();
                        c
                    })
                    .collect()
            }
        };
        let cuts: Vec<Cut> = subsets
            .into_iter()
            .map(|qubits| Cut {
                offsets: qstate::subset_offsets(n, &qubits),
                complement: qstate::complement_mask(n, &qubits),
                qubits,
            })
            .collect();
        let max_dim = cuts.iter().map(|c| c.offsets.len()).max().unwrap_or(1);
        Ok(Self { n, cuts, max_dim })
    }

    pub(crate) fn scratch(&self) -> Vec<C64> {
        vec![C64::new(0.0, 0.0); self.max_dim * self.max_dim]
    }

    /// `p * GGM(amps / sqrt(p))` for an unnormalized vector of squared norm
    /// `p`: the smallest gap between `p` and a cut's top eigenvalue.
    pub(crate) fn weighted_ggm(&self, amps: &[C64], scratch: &mut [C64]) -> f64 {
        let p = qstate::norm_sqr(amps);
        if p < qstate::PROBABILITY_FLOOR {
            return 0.0;
        }
        if self.n == 2 && self.cuts.len() == 1 {
            return two_qubit_deficit(amps, p);
        }
        let mut best = f64::INFINITY;
        for cut in &self.cuts {
            best = best.min(self.deficit_below(cut, amps, p, scratch, best));
        }
        best.max(0.0)
    }

    /// As [`CutPlan::deficit`], but may return any value `>= bound` without
    /// diagonalizing when `‖ρ‖_F` shows the cut cannot go below `bound`.
    fn deficit_below(&self, cut: &Cut, amps: &[C64], p: f64, scratch: &mut [C64], bound: f64) -> f64 {
        if self.n == 2 || cut.qubits.len() == 1 {
            return self.deficit(cut, amps, p, scratch);
        }
        let dim = cut.offsets.len();
        let rho = &mut scratch[..dim * dim];
        qstate::accumulate_rdm(amps, self.n, &cut.offsets, cut.complement, rho);
        let frobenius = rho.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if p - frobenius >= bound {
            return p - frobenius;
        }
        (p - linalg::hermitian_max_eigenvalue(rho, dim)).max(0.0)
    }

    /// `p` minus the largest eigenvalue of the cut's reduced matrix.
    pub(crate) fn deficit(&self, cut: &Cut, amps: &[C64], p: f64, scratch: &mut [C64]) -> f64 {
        if self.n == 2 {
            return two_qubit_deficit(amps, p);
        }
        if cut.qubits.len() == 1 {
            return single_qubit_deficit(amps, self.n, cut.qubits[0]);
        }
        let dim = cut.offsets.len();
        let rho = &mut scratch[..dim * dim];
        qstate::accumulate_rdm(amps, self.n, &cut.offsets, cut.complement, rho);
        (p - linalg::hermitian_max_eigenvalue(rho, dim)).max(0.0)
    }
}

/// Smallest eigenvalue of the single-qubit reduced matrix of `qubit`.
#[inline]
fn single_qubit_deficit(amps: &[C64], n: usize, qubit: usize) -> f64 {
    let bit = 1usize << (n - qubit);
    let (mut a, mut d, mut b) = (0.0, 0.0, C64::new(0.0, 0.0));
    let low = bit - 1;
    for j in 0..amps.len() / 2 {
        let i0 = ((j & !low) << 1) | (j & low);
        let (x, y) = (amps[i0], amps[i0 | bit]);
        a += x.norm_sqr();
        d += y.norm_sqr();
        b += x * y.conj();
    }
    let (_, hi) = linalg::eig2(a, d, b);
    if hi <= 0.0 {
        return 0.0;
    }
    ((a * d - b.norm_sqr()) / hi).max(0.0)
}

/// `(p - sqrt(p^2 - 4|det|^2)) / 2` for the 2x2 coefficient matrix.
#[inline]
fn two_qubit_deficit(amps: &[C64], p: f64) -> f64 {
    let det = (amps[0] * amps[3] - amps[1] * amps[2]).norm_sqr();
    let disc = (p * p - 4.0 * det).max(0.0).sqrt();
    let denom = p + disc;
    if denom <= 0.0 {
        return 0.0;
    }
    2.0 * det / denom
}

/// Subsets of `1..=n` with sizes `1..=max_size`; subsets of size `n/2`
/// (for even `n`) are kept only if they contain qubit 1.
fn enumerate_cuts(n: usize, max_size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for size in 1..=max_size {
        let mut combo: Vec<usize> = (1..=size).collect();
        loop {
            if !(2 * size == n && combo[0] != 1) {
                out.push(combo.clone());
            }
            // Advance to the next combination in lexicographic order.
            let mut i = size;
            while i > 0 && combo[i - 1] == n - size + i {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            combo[i - 1] += 1;
            for j in i..size {
                combo[j] = combo[j - 1] + 1;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{build, StateSpec};
    use approx::assert_abs_diff_eq;

    fn r(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn cut_enumeration_counts() {
        assert_eq!(enumerate_cuts(4, 2).len(), 4 + 3);
        assert_eq!(enumerate_cuts(5, 2).len(), 5 + 10);
        assert_eq!(enumerate_cuts(6, 3).len(), 6 + 15 + 10);
        assert_eq!(enumerate_cuts(3, 1), vec![vec![1], vec![2], vec![3]]);
    }

    #[test]
    fn max_eigenvalue_examples() {
        let half = DensityMatrix::from_entries(1, vec![r(0.5), r(0.0), r(0.0), r(0.5)]).unwrap();
        assert_abs_diff_eq!(max_eigenvalue(&half).unwrap(), 0.5);
        let proj = DensityMatrix::from_entries(1, vec![r(0.5), r(0.5), r(0.5), r(0.5)]).unwrap();
        assert_abs_diff_eq!(max_eigenvalue(&proj).unwrap(), 1.0, epsilon = 1e-15);
        let bad = DensityMatrix::from_entries(1, vec![r(0.5), r(0.3), r(0.0), r(0.5)]).unwrap();
        assert!(matches!(max_eigenvalue(&bad), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn ghz_and_w_values() {
        for n in 3..=8 {
            let ghz =
                build(&StateSpec::Gghz { n_qubits: n, a1: r(1.0), a2: r(1.0) }).unwrap();
            assert_abs_diff_eq!(ggm(&ghz, &CutPolicy::AllCuts).unwrap().value, 0.5, epsilon = 1e-12);
            let w = build(&StateSpec::Dicke { n_qubits: n, excitations: 1 }).unwrap();
            assert_abs_diff_eq!(
                ggm(&w, &CutPolicy::AllCuts).unwrap().value,
                1.0 / n as f64,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn dicke_values() {
        let d63 = build(&StateSpec::Dicke { n_qubits: 6, excitations: 3 }).unwrap();
        assert_abs_diff_eq!(ggm(&d63, &CutPolicy::AllCuts).unwrap().value, 0.4, epsilon = 1e-12);
        let d73 = build(&StateSpec::Dicke { n_qubits: 7, excitations: 3 }).unwrap();
        assert_abs_diff_eq!(
            ggm(&d73, &CutPolicy::AllCuts).unwrap().value,
            3.0 / 7.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn product_state_has_zero_ggm() {
        let s = PureState::basis(5, 0b10110).unwrap();
        let g = ggm(&s, &CutPolicy::AllCuts).unwrap();
        assert_abs_diff_eq!(g.value, 0.0, epsilon = 1e-15);
        assert_eq!(g.argmax_cut, vec![1]);
    }

    #[test]
    fn argmax_cut_of_gw_is_smallest_weight() {
        let gw = build(&StateSpec::Gw(vec![r(0.5f64.sqrt()), r(0.3f64.sqrt()), r(0.2f64.sqrt())]))
            .unwrap();
        let g = ggm(&gw, &CutPolicy::AllCuts).unwrap();
        assert_abs_diff_eq!(g.value, 0.2, epsilon = 1e-12);
        assert_eq!(g.argmax_cut, vec![3]);
        assert_eq!(g.tied_cuts, vec![vec![3]]);
        let spectrum = schmidt_spectrum(&gw, &[1]).unwrap();
        assert_abs_diff_eq!(spectrum[0], 0.5, epsilon = 1e-14);
    }

    #[test]
    fn ghz_ties_every_cut() {
        let ghz = build(&StateSpec::Gghz { n_qubits: 4, a1: r(1.0), a2: r(1.0) }).unwrap();
        let g = ggm(&ghz, &CutPolicy::AllCuts).unwrap();
        assert_eq!(g.tied_cuts.len(), 7);
        assert_eq!(g.argmax_cut, vec![1]);
    }

    #[test]
    fn policy_validation() {
        let s = PureState::basis(4, 0).unwrap();
        assert!(matches!(ggm(&s, &CutPolicy::ExplicitCuts(vec![])), Err(Error::EmptyCuts)));
        assert!(ggm(&s, &CutPolicy::ExplicitCuts(vec![vec![1, 2, 3]])).is_err());
        assert!(ggm(&s, &CutPolicy::MaxCutSize(0)).is_err());
        assert!(ggm(&PureState::basis(1, 0).unwrap(), &CutPolicy::AllCuts).is_err());
    }

    #[test]
    fn weighted_form_matches_normalized_value() {
        let s = qstate::haar_random(5, 9).unwrap();
        let plan = CutPlan::new(5, &CutPolicy::AllCuts).unwrap();
        let mut scratch = plan.scratch();
        let scaled: Vec<C64> = s.amplitudes().iter().map(|a| a * 0.6).collect();
        let weighted = plan.weighted_ggm(&scaled, &mut scratch);
        let g = ggm(&s, &CutPolicy::AllCuts).unwrap().value;
        assert_abs_diff_eq!(weighted, 0.36 * g, epsilon = 1e-14);

        let two = qstate::haar_random(2, 3).unwrap();
        let plan = CutPlan::new(2, &CutPolicy::AllCuts).unwrap();
        let mut scratch = plan.scratch();
        let rho = qstate::reduced_density(&two, &[1]).unwrap();
        let expected = 1.0 - max_eigenvalue(&rho).unwrap();
        assert_abs_diff_eq!(plan.weighted_ggm(two.amplitudes(), &mut scratch), expected, epsilon = 1e-14);
    }
}
