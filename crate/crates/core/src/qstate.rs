//! Pure states, named state families, partial traces and projective collapse.
//!
//! Qubit 1 is the most significant bit of a basis index, so for `N` qubits
//! qubit `q` contributes the bit `1 << (N - q)`. All public positions are
//! 1-based.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg;
use crate::C64;

/// Largest register built unless a different cap is requested.
pub const DEFAULT_MAX_QUBITS: usize = 26;

/// Outcomes with probability below this are treated as impossible.
pub const PROBABILITY_FLOOR: f64 = 1e-12;

const NORM_TOLERANCE: f64 = 1e-12;

/// A normalized state vector of `n_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    n_qubits: usize,
    amplitudes: Vec<C64>,
}

impl PureState {
    /// Wraps amplitudes that are already normalized to within `1e-12`.
    pub fn from_normalized(amplitudes: Vec<C64>) -> Result<Self> {
        let n_qubits = qubits_for_len(amplitudes.len())?;
        let norm_sq = norm_sqr(&amplitudes);
        if (norm_sq - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized(norm_sq));
        }
        Ok(Self { n_qubits, amplitudes })
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn from_amplitudes(mut amplitudes: Vec<C64>) -> Result<Self> {
        let n_qubits = qubits_for_len(amplitudes.len())?;
        let norm_sq = norm_sqr(&amplitudes);
        if !(norm_sq.is_finite() && norm_sq > 0.0) {
            return Err(Error::ZeroNorm);
        }
        let inv = 1.0 / norm_sq.sqrt();
        amplitudes.iter_mut().for_each(|a| *a *= inv);
        Ok(Self { n_qubits, amplitudes })
    }

    /// The computational basis state with the given index.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        check_cap(n_qubits, DEFAULT_MAX_QUBITS)?;
        if n_qubits == 0 || index >= 1 << n_qubits {
            return Err(Error::InvalidParameter(format!(
                "basis index {index} out of range for {n_qubits} qubits"
            )));
        }
        let mut amplitudes = vec![C64::new(0.0, 0.0); 1 << n_qubits];
        amplitudes[index] = C64::new(1.0, 0.0);
        Ok(Self { n_qubits, amplitudes })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    /// `self ⊗ other`, with `self` on the leading qubits.
    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        check_cap(self.n_qubits + other.n_qubits, DEFAULT_MAX_QUBITS)?;
        let mut amplitudes = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amplitudes.push(a * b);
            }
        }
        Ok(PureState { n_qubits: self.n_qubits + other.n_qubits, amplitudes })
    }

    /// Applies the 2x2 matrix `u` (row-major) to qubit `qubit`.
    pub fn apply_single_qubit(&mut self, qubit: usize, u: &[C64; 4]) -> Result<()> {
        validate_positions(self.n_qubits, &[qubit])?;
        let bit = 1usize << (self.n_qubits - qubit);
        for i in 0..self.amplitudes.len() {
            if i & bit == 0 {
                let (a0, a1) = (self.amplitudes[i], self.amplitudes[i | bit]);
                self.amplitudes[i] = u[0] * a0 + u[1] * a1;
                self.amplitudes[i | bit] = u[2] * a0 + u[3] * a1;
            }
        }
        Ok(())
    }

    /// Applies one 2x2 unitary per qubit, `unitaries[q - 1]` on qubit `q`.
    pub fn apply_local_unitaries(&self, unitaries: &[[C64; 4]]) -> Result<PureState> {
        if unitaries.len() != self.n_qubits {
            return Err(Error::LengthMismatch { expected: self.n_qubits, got: unitaries.len() });
        }
        let mut out = self.clone();
        for (q, u) in unitaries.iter().enumerate() {
            out.apply_single_qubit(q + 1, u)?;
        }
        Ok(out)
    }

    /// Whether the state is unchanged by every permutation of qubits,
    /// checked through adjacent transpositions.
    pub fn is_permutation_symmetric(&self, tolerance: f64) -> bool {
        let n = self.n_qubits;
        for q in 0..n.saturating_sub(1) {
            let hi = 1usize << (n - 1 - q);
            let lo = hi >> 1;
            for (i, a) in self.amplitudes.iter().enumerate() {
                let (b_hi, b_lo) = (i & hi != 0, i & lo != 0);
                if b_hi != b_lo {
                    let j = i ^ hi ^ lo;
                    if (a - self.amplitudes[j]).norm() > tolerance {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Inner product `<self|other>`.
    pub fn overlap(&self, other: &PureState) -> C64 {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum()
    }
}

/// Reduced density matrix of `n_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    entries: Vec<C64>,
}

impl DensityMatrix {
    /// Wraps a row-major `2^n x 2^n` matrix.
    pub fn from_entries(n_qubits: usize, entries: Vec<C64>) -> Result<Self> {
        let dim = 1usize << n_qubits;
        if entries.len() != dim * dim {
            return Err(Error::LengthMismatch { expected: dim * dim, got: entries.len() });
        }
        Ok(Self { n_qubits, entries })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.entries[row * self.dim() + col]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.get(i, i).re).sum()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        linalg::hermiticity_defect(&self.entries, self.dim())
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev = linalg::hermitian_eigenvalues(&self.entries, self.dim());
        ev.reverse();
        ev
    }
}

/// Parameters of the four-qubit and five-qubit states for which measuring
/// two qubits beats measuring one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairAdvantageExample {
    FourQubit,
    FiveQubit,
}

/// A named family of states together with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    /// `a1 |0...0> + a2 |1...1>`.
    Gghz { n_qubits: usize, a1: C64, a2: C64 },
    /// Single-excitation superposition; `coefficients[q - 1]` multiplies the
    /// basis state with the excitation on qubit `q`.
    Gw(Vec<C64>),
    /// Symmetric state with `excitations` ones.
    Dicke { n_qubits: usize, excitations: usize },
    /// `sum_k coefficients[k] |D^N_k>`, `N = coefficients.len() - 1`.
    DickeSuperposition(Vec<C64>),
    /// `sqrt(a1)|001> + sqrt(a2)|010> + sqrt(a3)|100> + sqrt(a4)|000>` with
    /// `a4 = 1 - a1 - a2 - a3`.
    WClass { a1: f64, a2: f64, a3: f64 },
    /// `c_d |000> + e^{i mu} s_d (x)_i (c_gi |0> + s_gi |1>)`, normalized.
    GhzClass { delta: f64, gamma: [f64; 3], mu: f64 },
    /// Representative of one of the nine four-qubit families (index 1..=9).
    /// Families 7 to 9 take no parameters.
    FourQubitClass { index: u8, params: [C64; 4] },
    /// Real-parameter states where two-qubit measurement helps; `a <= 1/2`.
    PairAdvantage { which: PairAdvantageExample, a: f64 },
    /// Explicit amplitudes, rescaled to unit norm.
    Raw(Vec<C64>),
    /// Haar-random state from a seeded generator.
    Haar { n_qubits: usize, seed: u64 },
}

/// Builds a state with the default register cap.
pub fn build(spec: &StateSpec) -> Result<PureState> {
    build_with_cap(spec, DEFAULT_MAX_QUBITS)
}

/// Builds a state, refusing registers larger than `max_qubits`.
pub fn build_with_cap(spec: &StateSpec, max_qubits: usize) -> Result<PureState> {
    let zero = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    match spec {
        StateSpec::Gghz { n_qubits, a1, a2 } => {
            check_register(*n_qubits, max_qubits)?;
            let mut amps = vec![zero; 1 << n_qubits];
            amps[0] = *a1;
            amps[(1 << n_qubits) - 1] = *a2;
            PureState::from_amplitudes(amps)
        }
        StateSpec::Gw(coefficients) => {
            let n = coefficients.len();
            check_register(n, max_qubits)?;
            let mut amps = vec![zero; 1 << n];
            for (q, a) in coefficients.iter().enumerate() {
                amps[1 << (n - 1 - q)] = *a;
            }
            PureState::from_amplitudes(amps)
        }
        StateSpec::Dicke { n_qubits, excitations } => {
            check_register(*n_qubits, max_qubits)?;
            if excitations > n_qubits {
                return Err(Error::InvalidParameter(format!(
                    "Dicke excitations {excitations} outside 0..={n_qubits}"
                )));
            }
            let mut amps = vec![zero; 1 << n_qubits];
            for (i, a) in amps.iter_mut().enumerate() {
                if i.count_ones() as usize == *excitations {
                    *a = one;
                }
            }
            PureState::from_amplitudes(amps)
        }
        StateSpec::DickeSuperposition(coefficients) => {
            if coefficients.len() < 2 {
                return Err(Error::InvalidParameter(
                    "Dicke superposition needs at least two coefficients".into(),
                ));
            }
            let n = coefficients.len() - 1;
            check_register(n, max_qubits)?;
            let amps = (0..1usize << n)
                .map(|i| {
                    let k = i.count_ones() as usize;
                    coefficients[k] / binomial(n, k).sqrt()
                })
                .collect();
            PureState::from_amplitudes(amps)
        }
        StateSpec::WClass { a1, a2, a3 } => {
            for (name, v) in [("a1", a1), ("a2", a2), ("a3", a3)] {
                if !(v.is_finite() && *v >= 0.0) {
                    return Err(Error::InvalidParameter(format!("W-class {name} = {v}")));
                }
            }
            let a4 = 1.0 - (a1 + a2 + a3);
            if a4 < -1e-12 {
                return Err(Error::InvalidParameter(format!(
                    "W-class weights sum to {} > 1",
                    a1 + a2 + a3
                )));
            }
            let mut amps = vec![zero; 8];
            amps[0b001] = C64::new(a1.sqrt(), 0.0);
            amps[0b010] = C64::new(a2.sqrt(), 0.0);
            amps[0b100] = C64::new(a3.sqrt(), 0.0);
            amps[0b000] = C64::new(a4.max(0.0).sqrt(), 0.0);
            PureState::from_amplitudes(amps)
        }
        StateSpec::GhzClass { delta, gamma, mu } => {
            let all = [*delta, gamma[0], gamma[1], gamma[2], *mu];
            if all.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidParameter("GHZ-class angles must be finite".into()));
            }
            let eta: Vec<[f64; 2]> = gamma.iter().map(|g| [g.cos(), g.sin()]).collect();
            let branch = C64::from_polar(delta.sin(), *mu);
            let mut amps = vec![zero; 8];
            for (i, a) in amps.iter_mut().enumerate() {
                let mut prod = 1.0;
                for (q, e) in eta.iter().enumerate() {
                    prod *= e[(i >> (2 - q)) & 1];
                }
                *a = branch * prod;
            }
            amps[0] += C64::new(delta.cos(), 0.0);
            PureState::from_amplitudes(amps)
        }
        StateSpec::FourQubitClass { index, params } => four_qubit_class(*index, params),
        StateSpec::PairAdvantage { which, a } => pair_advantage(*which, *a),
        StateSpec::Raw(amplitudes) => {
            let n = qubits_for_len(amplitudes.len())?;
            check_cap(n, max_qubits)?;
            PureState::from_amplitudes(amplitudes.clone())
        }
        StateSpec::Haar { n_qubits, seed } => haar_random_with_cap(*n_qubits, *seed, max_qubits),
    }
}

fn four_qubit_class(index: u8, params: &[C64; 4]) -> Result<PureState> {
    let [a1, a2, a3, a4] = *params;
    let zero = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let i_unit = C64::new(0.0, 1.0);
    let mut amps = vec![zero; 16];
    let mut set = |bits: &[usize], value: C64| {
        for b in bits {
            amps[*b] += value;
        }
    };
    match index {
        1 => {
            set(&[0b0000, 0b1111], (a1 + a2) * 0.5);
            set(&[0b0011, 0b1100], (a1 - a2) * 0.5);
            set(&[0b0101, 0b1010], (a3 + a4) * 0.5);
            set(&[0b0110, 0b1001], (a3 - a4) * 0.5);
        }
        2 => {
            set(&[0b0000, 0b1111], (a1 + a2) * 0.5);
            set(&[0b0011, 0b1100], (a1 - a2) * 0.5);
            set(&[0b0101, 0b1010, 0b0110], a3);
        }
        3 => {
            set(&[0b0000, 0b1111], a1);
            set(&[0b0101, 0b1010, 0b0110, 0b0011], a2);
        }
        4 => {
            set(&[0b0000, 0b1111], a1);
            set(&[0b0101, 0b1010], (a1 + a2) * 0.5);
            set(&[0b0110, 0b1001], (a1 - a2) * 0.5);
            set(&[0b0001, 0b0010, 0b0111, 0b1011], i_unit * (0.5 * 2f64.sqrt()));
        }
        5 => {
            set(&[0b0000, 0b0101, 0b1010, 0b1111], a1);
            set(&[0b0001], i_unit);
            set(&[0b0110], one);
            set(&[0b1011], -i_unit);
        }
        6 => {
            set(&[0b0000, 0b1111], a1);
            set(&[0b0011, 0b0101, 0b0110], one);
        }
        7 => set(&[0b0000, 0b0101, 0b1000, 0b1110], one),
        8 => set(&[0b0000, 0b1011, 0b1101, 0b1110], one),
        9 => set(&[0b0000, 0b0111], one),
        _ => {
            return Err(Error::InvalidParameter(format!(
                "four-qubit class index {index} outside 1..=9"
            )))
        }
    }
    PureState::from_amplitudes(amps)
}

fn pair_advantage(which: PairAdvantageExample, a: f64) -> Result<PureState> {
    if !(a.is_finite() && a.abs() <= 0.5) {
        return Err(Error::InvalidParameter(format!("parameter a = {a} must satisfy |a| <= 1/2")));
    }
    let rest = 1.0 - 4.0 * a * a;
    let (n, heavy, light, b): (usize, &[usize], &[usize], f64) = match which {
        PairAdvantageExample::FourQubit => (
            4,
            &[0b0000, 0b0011, 0b1100, 0b1111],
            &[0b0101, 0b1010, 0b0110, 0b1001, 0b1011, 0b0100],
            (rest / 6.0).sqrt(),
        ),
        PairAdvantageExample::FiveQubit => (
            5,
            &[0b00000, 0b00111, 0b11000, 0b11111],
            &[0b01010, 0b10101, 0b00001, 0b10000],
            (rest / 4.0).sqrt(),
        ),
    };
    let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
    for i in heavy {
        amps[*i] = C64::new(a, 0.0);
    }
    for i in light {
        amps[*i] = C64::new(b, 0.0);
    }
    PureState::from_amplitudes(amps)
}

/// Haar-random state of `n_qubits` qubits, deterministic in `seed`.
pub fn haar_random(n_qubits: usize, seed: u64) -> Result<PureState> {
    haar_random_with_cap(n_qubits, seed, DEFAULT_MAX_QUBITS)
}

fn haar_random_with_cap(n_qubits: usize, seed: u64, max_qubits: usize) -> Result<PureState> {
    if n_qubits < 2 {
        return Err(Error::InvalidParameter("Haar sampling needs at least 2 qubits".into()));
    }
    check_cap(n_qubits, max_qubits)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    haar_random_with_rng(n_qubits, &mut rng)
}

/// Haar-random state drawn from `rng`.
pub fn haar_random_with_rng<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> Result<PureState> {
    check_register(n_qubits, DEFAULT_MAX_QUBITS)?;
    PureState::from_amplitudes(gaussian_amplitudes(1 << n_qubits, rng))
}

/// `len` independent standard complex Gaussian numbers.
pub fn gaussian_amplitudes<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Vec<C64> {
    (0..len)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            C64::new(re, im)
        })
        .collect()
}

/// Haar-random 2x2 unitary, row-major.
pub fn random_unitary_2x2<R: Rng + ?Sized>(rng: &mut R) -> [C64; 4] {
    // First column from a Haar-random qubit, second column orthogonal to it
    // with an independent random phase.
    let v = gaussian_amplitudes(2, rng);
    let norm = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    let (a, b) = (v[0] / norm, v[1] / norm);
    let phase = C64::from_polar(1.0, rng.random::<f64>() * 2.0 * PI);
    [a, -b.conj() * phase, b, a.conj() * phase]
}

/// Reduced density matrix of the ordered `subset`; `subset[0]` is the most
/// significant qubit of the result.
pub fn reduced_density(state: &PureState, subset: &[usize]) -> Result<DensityMatrix> {
    let n = state.n_qubits;
    if subset.is_empty() {
        return Err(Error::InvalidPositions("subset must be nonempty".into()));
    }
    validate_positions(n, subset)?;
    let offsets = subset_offsets(n, subset);
    let dim = offsets.len();
    let mut entries = vec![C64::new(0.0, 0.0); dim * dim];
    accumulate_rdm(&state.amplitudes, n, &offsets, complement_mask(n, subset), &mut entries);
    DensityMatrix::from_entries(subset.len(), entries)
}

/// Measures `positions` in the product basis given by `angles` and keeps
/// outcome `outcome` (bit `j` of the outcome, counted from the most
/// significant of `m` bits, selects the second basis vector on
/// `positions[j]`). Returns the probability and the normalized state of
/// the unmeasured qubits, or `None` when the probability is below
/// [`PROBABILITY_FLOOR`].
pub fn project_and_trace(
    state: &PureState,
    positions: &[usize],
    angles: &[(f64, f64)],
    outcome: usize,
) -> Result<(f64, Option<PureState>)> {
    let n = state.n_qubits;
    let m = positions.len();
    validate_measurement(n, positions, angles)?;
    if outcome >= 1 << m {
        return Err(Error::InvalidParameter(format!("outcome {outcome} outside 0..{}", 1 << m)));
    }
    let amps = collapse_unnormalized(&state.amplitudes, n, positions, angles, outcome);
    let p = norm_sqr(&amps);
    if p < PROBABILITY_FLOOR {
        return Ok((0.0, None));
    }
    let inv = 1.0 / p.sqrt();
    let amplitudes = amps.into_iter().map(|a| a * inv).collect();
    Ok((p, Some(PureState { n_qubits: n - m, amplitudes })))
}

/// Checks positions and angles of a local measurement.
pub(crate) fn validate_measurement(
    n: usize,
    positions: &[usize],
    angles: &[(f64, f64)],
) -> Result<()> {
    if positions.is_empty() {
        return Err(Error::InvalidPositions("at least one qubit must be measured".into()));
    }
    validate_positions(n, positions)?;
    if positions.len() + 2 > n {
        return Err(Error::InvalidPositions(format!(
            "measuring {} of {n} qubits leaves fewer than 2",
            positions.len()
        )));
    }
    if angles.len() != positions.len() {
        return Err(Error::LengthMismatch { expected: positions.len(), got: angles.len() });
    }
    for &(theta, phi) in angles {
        if !(0.0..=PI).contains(&theta) || !phi.is_finite() {
            return Err(Error::AngleOutOfRange(format!(
                "theta = {theta} must lie in [0, pi] and phi = {phi} must be finite"
            )));
        }
    }
    Ok(())
}

/// Unnormalized post-measurement vector for one outcome.
pub(crate) fn collapse_unnormalized(
    amps: &[C64],
    n: usize,
    positions: &[usize],
    angles: &[(f64, f64)],
    outcome: usize,
) -> Vec<C64> {
    let m = positions.len();
    let mut current = amps.to_vec();
    let mut next = Vec::new();
    for j in 0..m {
        let bit = (outcome >> (m - 1 - j)) & 1;
        let bra = measurement_bras(angles[j].0, angles[j].1)[bit];
        let width = n - j;
        next.resize(current.len() / 2, C64::new(0.0, 0.0));
        contract_qubit(&current, width, adjusted_position(positions, j), bra, &mut next);
        core::mem::swap(&mut current, &mut next);
    }
    current
}

/// 0-based position (from the most significant bit) of `positions[j]`
/// after the qubits `positions[..j]` have been removed.
pub(crate) fn adjusted_position(positions: &[usize], j: usize) -> usize {
    let p = positions[j];
    let removed_before = positions[..j].iter().filter(|&&q| q < p).count();
    p - 1 - removed_before
}

/// Bras `<xi^1|` and `<xi^2|` of the basis
/// `|xi^1> = c|0> + e^{i phi} s|1>`, `|xi^2> = -e^{-i phi} s|0> + c|1>`
/// with `c = cos(theta/2)`, `s = sin(theta/2)`.
#[inline]
pub fn measurement_bras(theta: f64, phi: f64) -> [[C64; 2]; 2] {
    let (s, c) = (0.5 * theta).sin_cos();
    let (sp, cp) = phi.sin_cos();
    let e_minus = C64::new(cp, -sp);
    let e_plus = C64::new(cp, sp);
    [[C64::new(c, 0.0), e_minus * s], [-e_plus * s, C64::new(c, 0.0)]]
}

/// Contracts qubit `qubit` (0-based from the most significant bit) of the
/// `n`-qubit vector `src` with `bra`, writing `2^(n-1)` amplitudes to `dst`.
#[inline]
pub(crate) fn contract_qubit(src: &[C64], n: usize, qubit: usize, bra: [C64; 2], dst: &mut [C64]) {
    let shift = n - 1 - qubit;
    let low_mask = (1usize << shift) - 1;
    for (j, out) in dst.iter_mut().enumerate() {
        let base = ((j & !low_mask) << 1) | (j & low_mask);
        *out = bra[0] * src[base] + bra[1] * src[base | (1 << shift)];
    }
}

/// Accumulates the (unnormalized) reduced density matrix into `out`
/// (row-major, `offsets.len()` square). `offsets[a]` places the subset
/// index `a` into a full basis index; `complement` is the mask of the
/// traced-out bits.
pub(crate) fn accumulate_rdm(
    amps: &[C64],
    _n: usize,
    offsets: &[usize],
    complement: usize,
    out: &mut [C64],
) {
    let dim = offsets.len();
    out.iter_mut().for_each(|x| *x = C64::new(0.0, 0.0));
    let mut stack = [C64::new(0.0, 0.0); 64];
    let mut heap = Vec::new();
    let gathered: &mut [C64] = if dim <= stack.len() {
        &mut stack[..dim]
    } else {
        heap.resize(dim, C64::new(0.0, 0.0));
        &mut heap
    };
    let mut s = 0usize;
    loop {
        for (g, off) in gathered.iter_mut().zip(offsets) {
            *g = amps[s | off];
        }
        for a in 0..dim {
            let va = gathered[a];
            if va.re == 0.0 && va.im == 0.0 {
                continue;
            }
            let row = &mut out[a * dim..(a + 1) * dim];
            for b in a..dim {
                row[b] += va * gathered[b].conj();
            }
        }
        if s == complement {
            break;
        }
        s = s.wrapping_sub(complement) & complement;
    }
    for a in 0..dim {
        for b in 0..a {
            out[a * dim + b] = out[b * dim + a].conj();
        }
    }
}

/// Full-basis offsets of every index of the ordered subset.
pub(crate) fn subset_offsets(n: usize, subset: &[usize]) -> Vec<usize> {
    let k = subset.len();
    (0..1usize << k)
        .map(|a| {
            subset
                .iter()
                .enumerate()
                .filter(|(j, _)| (a >> (k - 1 - j)) & 1 == 1)
                .map(|(_, &q)| 1usize << (n - q))
                .sum()
        })
        .collect()
}

pub(crate) fn complement_mask(n: usize, subset: &[usize]) -> usize {
    let all = (1usize << n) - 1;
    all ^ subset.iter().map(|&q| 1usize << (n - q)).sum::<usize>()
}

/// Positions must be distinct and lie in `1..=n`.
pub(crate) fn validate_positions(n: usize, positions: &[usize]) -> Result<()> {
    for (i, &p) in positions.iter().enumerate() {
        if p == 0 || p > n {
            return Err(Error::InvalidPositions(format!("position {p} outside 1..={n}")));
        }
        if positions[..i].contains(&p) {
            return Err(Error::InvalidPositions(format!("position {p} repeated")));
        }
    }
    Ok(())
}

pub(crate) fn norm_sqr(amps: &[C64]) -> f64 {
    amps.iter().map(|a| a.norm_sqr()).sum()
}

/// Binomial coefficient as a float; zero outside `0 <= k <= n`.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

fn qubits_for_len(len: usize) -> Result<usize> {
    if len < 2 || !len.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(len));
    }
    Ok(len.trailing_zeros() as usize)
}

fn check_register(n: usize, cap: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter("a state needs at least one qubit".into()));
    }
    check_cap(n, cap)
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        return Err(Error::DimensionOverflow { n_qubits: n, cap });
    }
    Ok(())
}
