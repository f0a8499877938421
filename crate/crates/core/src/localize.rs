//! Localizable GGM: the best average GGM left on the unmeasured qubits after
//! local projective measurements, optimized over the measurement bases.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::ggm::{self, CutPlan, CutPolicy};
use crate::optimize::{self, angle_grid, OptimizerSettings};
use crate::qstate::{self, PureState};
use crate::C64;

/// Position sets whose LGGM differ by less than this are considered tied.
pub const POSITION_TIE_TOLERANCE: f64 = 1e-9;

/// Two quantities closer than this count as equal in comparisons of
/// entanglement values.
pub const EQUALITY_TOLERANCE: f64 = 1e-4;

/// Measured qubits and one `(θ, φ)` pair per measured qubit.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementConfig {
    pub positions: Vec<usize>,
    pub angles: Vec<(f64, f64)>,
}

impl MeasurementConfig {
    /// Computational-basis measurement of `positions`.
    pub fn computational(positions: &[usize]) -> Self {
        Self { positions: positions.to_vec(), angles: vec![(0.0, 0.0); positions.len()] }
    }
}

/// One measurement outcome: its probability and the collapsed state of the
/// unmeasured qubits (`None` when the outcome is impossible).
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleEntry {
    pub probability: f64,
    pub state: Option<PureState>,
}

/// All `2^m` outcomes of a local measurement, in outcome order.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    pub entries: Vec<EnsembleEntry>,
}

impl Ensemble {
    pub fn total_probability(&self) -> f64 {
        self.entries.iter().map(|e| e.probability).sum()
    }
}

/// Post-measurement ensemble of `state` under `config`.
pub fn ensemble(state: &PureState, config: &MeasurementConfig) -> Result<Ensemble> {
    qstate::validate_measurement(state.n_qubits(), &config.positions, &config.angles)?;
    let entries = (0..1usize << config.positions.len())
        .map(|l| {
            let (probability, state) =
                qstate::project_and_trace(state, &config.positions, &config.angles, l)?;
            Ok(EnsembleEntry { probability, state })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Ensemble { entries })
}

/// Probability-weighted GGM of the ensemble members.
pub fn average_ggm(ensemble: &Ensemble, policy: &CutPolicy) -> Result<f64> {
    let mut total = 0.0;
    for entry in &ensemble.entries {
        if let Some(state) = &entry.state {
            total += entry.probability * ggm::ggm(state, policy)?.value;
        }
    }
    Ok(total)
}

/// Result of an LGGM optimization.
#[derive(Debug, Clone, PartialEq)]
pub struct LggmResult {
    pub positions: Vec<usize>,
    /// Best average GGM found; a lower bound on the supremum.
    pub value: f64,
    pub optimal_angles: Vec<(f64, f64)>,
    /// `(probability, GGM)` of each outcome at `optimal_angles`.
    pub per_outcome: Vec<(f64, f64)>,
    pub evaluations: usize,
}

/// LGGM of `state` for measurements on `positions`.
pub fn lggm(
    state: &PureState,
    positions: &[usize],
    settings: &OptimizerSettings,
    policy: &CutPolicy,
) -> Result<LggmResult> {
    lggm_with_hints(state, positions, settings, policy, &[])
}

/// As [`lggm`], also trying each angle set in `hints` as a starting point.
pub fn lggm_with_hints(
    state: &PureState,
    positions: &[usize],
    settings: &OptimizerSettings,
    policy: &CutPolicy,
    hints: &[Vec<(f64, f64)>],
) -> Result<LggmResult> {
    settings.validate()?;
    let n = state.n_qubits();
    let m = positions.len();
    qstate::validate_measurement(n, positions, &vec![(0.0, 0.0); m])?;
    let mut objective = Objective::new(state.amplitudes(), n, positions, policy)?;

    let grid = angle_grid(settings.grid_points_per_angle);
    let mut search = GridSearch {
        grid: &grid,
        point: vec![0.0; 2 * m],
        best: vec![0.0; 2 * m],
        best_value: f64::NEG_INFINITY,
        evaluations: 0,
    };
    search.run(&mut objective, 0);
    let GridSearch { mut best, mut best_value, mut evaluations, .. } = search;
    for hint in hints.iter().filter(|h| h.len() == m) {
        let flat: Vec<f64> = hint.iter().flat_map(|&(t, p)| [t, p]).collect();
        let v = objective.eval(&flat);
        evaluations += 1;
        if v > best_value {
            best_value = v;
            best = flat;
        }
    }

    let optimum = optimize::finish(m, settings, best, best_value, evaluations, &mut |x: &[f64]| {
        objective.eval(x)
    })?;

    let config = MeasurementConfig { positions: positions.to_vec(), angles: optimum.angles.clone() };
    let ens = ensemble(state, &config)?;
    let mut per_outcome = Vec::with_capacity(ens.entries.len());
    for entry in &ens.entries {
        let g = match &entry.state {
            Some(s) => ggm::ggm(s, policy)?.value,
            None => 0.0,
        };
        per_outcome.push((entry.probability, g));
    }
    Ok(LggmResult {
        positions: positions.to_vec(),
        value: optimum.value,
        optimal_angles: optimum.angles,
        per_outcome,
        evaluations: optimum.evaluations,
    })
}

/// LGGM maximized over every set of `m` measured qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalLggm {
    pub best: LggmResult,
    pub per_position_set: BTreeMap<Vec<usize>, LggmResult>,
    /// The state is permutation symmetric and only one set was evaluated.
    pub symmetric_shortcut: bool,
}

/// Global LGGM over all `C(N, m)` position sets.
pub fn global_lggm(
    state: &PureState,
    m: usize,
    settings: &OptimizerSettings,
    policy: &CutPolicy,
) -> Result<GlobalLggm> {
    let n = state.n_qubits();
    if m == 0 || m + 2 > n {
        return Err(Error::InvalidParameter(format!(
            "number of measured qubits {m} must lie in 1..={}",
            n.saturating_sub(2)
        )));
    }
    let symmetric = state.is_permutation_symmetric(1e-12);
    let sets: Vec<Vec<usize>> =
        if symmetric { vec![(1..=m).collect()] } else { combinations(n, m) };
    let mut per_position_set = BTreeMap::new();
    let mut best: Option<LggmResult> = None;
    for set in sets {
        let result = lggm(state, &set, settings, policy)?;
        let better = match &best {
            None => true,
            Some(b) => result.value > b.value + POSITION_TIE_TOLERANCE,
        };
        if better {
            best = Some(result.clone());
        }
        per_position_set.insert(set, result);
    }
    Ok(GlobalLggm {
        best: best.expect("at least one position set"),
        per_position_set,
        symmetric_shortcut: symmetric,
    })
}

/// Outcome of checking the three-qubit measurement-position rule.
#[derive(Debug, Clone, PartialEq)]
pub struct ConjectureReport {
    pub ggm: f64,
    /// Qubits `r` whose `r : rest` cut attains the GGM (ties included).
    pub ggm_positions: Vec<usize>,
    /// LGGM for measuring qubit 1, 2 and 3.
    pub single: [f64; 3],
    pub global: f64,
    /// `E_L^r >= G` for the maximizing qubit `r`.
    pub lggm_at_cut_dominates: bool,
    /// The global LGGM is attained by measuring `r`.
    pub global_at_cut: bool,
    /// `E_L^{r'} = G` for the other two qubits.
    pub others_equal_ggm: bool,
    pub holds: bool,
}

/// Checks, for a three-qubit state, that measuring the qubit `r` whose
/// `r : rest` cut carries the largest Schmidt coefficient gives the global
/// LGGM with `E_L^r >= G`, while measuring either other qubit gives
/// exactly `G` (all within [`EQUALITY_TOLERANCE`]).
pub fn conjecture_check(state: &PureState, settings: &OptimizerSettings) -> Result<ConjectureReport> {
    if state.n_qubits() != 3 {
        return Err(Error::InvalidParameter(format!(
            "the check applies to 3 qubits, got {}",
            state.n_qubits()
        )));
    }
    let g = ggm::ggm(state, &CutPolicy::AllCuts)?;
    let mut single = [0.0; 3];
    for (r, slot) in single.iter_mut().enumerate() {
        *slot = lggm(state, &[r + 1], settings, &CutPolicy::AllCuts)?.value;
    }
    let global = single.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let ggm_positions: Vec<usize> = g.tied_cuts.iter().map(|c| c[0]).collect();
    let tol = EQUALITY_TOLERANCE;
    let verdict = |r: usize| {
        let dominates = single[r - 1] >= g.value - tol;
        let at_cut = (global - single[r - 1]).abs() <= tol;
        let others = (1..=3).filter(|&q| q != r).all(|q| (single[q - 1] - g.value).abs() <= tol);
        (dominates, at_cut, others)
    };
    let chosen = ggm_positions
        .iter()
        .copied()
        .find(|&r| {
            let (a, b, c) = verdict(r);
            a && b && c
        })
        .unwrap_or(ggm_positions[0]);
    let (lggm_at_cut_dominates, global_at_cut, others_equal_ggm) = verdict(chosen);
    Ok(ConjectureReport {
        ggm: g.value,
        ggm_positions,
        single,
        global,
        lggm_at_cut_dominates,
        global_at_cut,
        others_equal_ggm,
        holds: lggm_at_cut_dominates && global_at_cut && others_equal_ggm,
    })
}

/// Sorted `m`-subsets of `1..=n` in lexicographic order.
pub(crate) fn combinations(n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut combo: Vec<usize> = (1..=m).collect();
    loop {
        out.push(combo.clone());
        let mut i = m;
        while i > 0 && combo[i - 1] == n - m + i {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        combo[i - 1] += 1;
        for j in i..m {
            combo[j] = combo[j - 1] + 1;
        }
    }
}

/// Average GGM as a function of the measurement angles, with the partial
/// contractions of every measured-qubit prefix kept between calls.
struct Objective {
    n: usize,
    adjusted: Vec<usize>,
    plan: CutPlan,
    /// `levels[j]` holds the `2^j` unnormalized branches after measuring
    /// the first `j` qubits, concatenated.
    levels: Vec<Vec<C64>>,
    scratch: Vec<C64>,
}

impl Objective {
    fn new(amps: &[C64], n: usize, positions: &[usize], policy: &CutPolicy) -> Result<Self> {
        let m = positions.len();
        let plan = CutPlan::new(n - m, policy)?;
        let scratch = plan.scratch();
        let mut levels = Vec::with_capacity(m + 1);
        levels.push(amps.to_vec());
        for _ in 0..m {
            levels.push(vec![C64::new(0.0, 0.0); amps.len()]);
        }
        let adjusted = (0..m).map(|j| qstate::adjusted_position(positions, j)).collect();
        Ok(Self { n, adjusted, plan, levels, scratch })
    }

    fn m(&self) -> usize {
        self.adjusted.len()
    }

    /// Recomputes level `j + 1` for angles `(theta, phi)` on measured qubit `j`.
    fn expand(&mut self, j: usize, theta: f64, phi: f64) {
        let bras = qstate::measurement_bras(theta, phi);
        let width = self.n - j;
        let len = 1usize << width;
        let (lower, upper) = self.levels.split_at_mut(j + 1);
        let src = &lower[j];
        let dst = &mut upper[0];
        for b in 0..1usize << j {
            let block = &src[b * len..(b + 1) * len];
            if block.iter().all(|a| a.re == 0.0 && a.im == 0.0) {
                dst[2 * b * (len / 2)..(2 * b + 2) * (len / 2)]
                    .iter_mut()
                    .for_each(|x| *x = C64::new(0.0, 0.0));
                continue;
            }
            for (l, bra) in bras.iter().enumerate() {
                let start = (2 * b + l) * (len / 2);
                qstate::contract_qubit(block, width, self.adjusted[j], *bra, &mut dst[start..start + len / 2]);
            }
        }
    }

    /// Sum of `p^l GGM(ψ^l)` over the fully measured branches.
    fn leaf_value(&mut self) -> f64 {
        let m = self.m();
        let len = 1usize << (self.n - m);
        let leaves = &self.levels[m];
        let mut total = 0.0;
        for branch in leaves.chunks(len) {
            total += self.plan.weighted_ggm(branch, &mut self.scratch);
        }
        total
    }

    fn eval(&mut self, x: &[f64]) -> f64 {
        for j in 0..self.m() {
            self.expand(j, x[2 * j], x[2 * j + 1]);
        }
        self.leaf_value()
    }
}

/// Product-grid search that reuses prefix contractions.
struct GridSearch<'g> {
    grid: &'g [(f64, f64)],
    point: Vec<f64>,
    best: Vec<f64>,
    best_value: f64,
    evaluations: usize,
}

impl GridSearch<'_> {
    fn run(&mut self, objective: &mut Objective, j: usize) {
        let m = objective.m();
        for &(theta, phi) in self.grid {
            self.point[2 * j] = theta;
            self.point[2 * j + 1] = phi;
            objective.expand(j, theta, phi);
            if j + 1 == m {
                let v = objective.leaf_value();
                self.evaluations += 1;
                if v > self.best_value {
                    self.best_value = v;
                    self.best.copy_from_slice(&self.point);
                }
            } else {
                self.run(objective, j + 1);
            }
        }
    }
}
