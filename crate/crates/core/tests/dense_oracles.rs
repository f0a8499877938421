//! Dense-matrix cross-checks for the matrix-free and iterative kernels.

use approx::assert_abs_diff_eq;
use nalgebra::{DMatrix, DVector};

use lggm_core::spin::{
    apply_hamiltonian, ground_state, lanczos_lowest, LanczosSettings, SectorStrategy, SpinModel,
    SpinModelSpec,
};
use lggm_core::{haar_random, reduced_density, schmidt_spectrum, C64};

fn pauli_string(n: usize, ops: &[(usize, char)]) -> DMatrix<nalgebra::Complex<f64>> {
    use nalgebra::Complex;
    let one = Complex::new(1.0, 0.0);
    let zero = Complex::new(0.0, 0.0);
    let i = Complex::new(0.0, 1.0);
    let mut out = DMatrix::from_element(1, 1, one);
    for site in 0..n {
        let op = ops.iter().find(|(s, _)| *s == site).map(|(_, o)| *o).unwrap_or('I');
        let m = match op {
            'X' => DMatrix::from_row_slice(2, 2, &[zero, one, one, zero]),
            'Y' => DMatrix::from_row_slice(2, 2, &[zero, -i, i, zero]),
            'Z' => DMatrix::from_row_slice(2, 2, &[one, zero, zero, -one]),
            _ => DMatrix::identity(2, 2),
        };
        out = out.kronecker(&m);
    }
    out
}

/// Hamiltonian assembled from Kronecker products of Pauli matrices; site 0
/// is the leftmost factor, i.e. the most significant bit.
fn dense_hamiltonian(spec: &SpinModelSpec) -> DMatrix<f64> {
    let n = spec.n_sites;
    let dim = 1 << n;
    let mut h = DMatrix::<nalgebra::Complex<f64>>::zeros(dim, dim);
    let c = |x: f64| nalgebra::Complex::new(x, 0.0);
    for i in 0..n {
        let j = (i + 1) % n;
        match spec.model {
            SpinModel::Ising { j: coupling, h: field } => {
                h += pauli_string(n, &[(i, 'X'), (j, 'X')]) * c(coupling);
                h += pauli_string(n, &[(i, 'Z')]) * c(field);
            }
            SpinModel::Xxz { j: coupling, delta, h: field } => {
                h += pauli_string(n, &[(i, 'X'), (j, 'X')]) * c(coupling);
                h += pauli_string(n, &[(i, 'Y'), (j, 'Y')]) * c(coupling);
                h += pauli_string(n, &[(i, 'Z'), (j, 'Z')]) * c(-coupling * delta);
                h += pauli_string(n, &[(i, 'Z')]) * c(field);
            }
        }
    }
    assert!(h.iter().all(|z| z.im.abs() < 1e-12));
    h.map(|z| z.re)
}

fn models() -> Vec<SpinModelSpec> {
    let mut out = Vec::new();
    for n in [2, 3, 4, 5, 6, 8] {
        out.push(SpinModelSpec::ising(n, 0.7));
        out.push(SpinModelSpec::ising(n, 1.3));
        out.push(SpinModelSpec::xxz(n, 0.5, 0.3));
        out.push(SpinModelSpec::xxz(n, -1.4, 0.0));
    }
    out
}

#[test]
fn matrix_free_action_matches_dense_hamiltonian() {
    for spec in models() {
        let dense = dense_hamiltonian(&spec);
        let dim = spec.dim();
        let v: Vec<f64> = (0..dim).map(|i| ((i * 7919) % 113) as f64 / 113.0 - 0.4).collect();
        let expected = &dense * DVector::from_vec(v.clone());
        let got = apply_hamiltonian(&spec, &v).unwrap();
        for (a, b) in got.iter().zip(expected.iter()) {
            assert_abs_diff_eq!(*a, *b, epsilon = 1e-12);
        }
    }
}

#[test]
fn ground_energy_matches_dense_diagonalization() {
    let mut specs = models();
    specs.push(SpinModelSpec::ising(10, 1.0));
    specs.push(SpinModelSpec::xxz(10, 0.5, 0.4));
    for spec in specs {
        let dense = dense_hamiltonian(&spec);
        let eig = dense.clone().symmetric_eigen();
        let exact = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        for sectors in [SectorStrategy::Auto, SectorStrategy::Full] {
            let settings = LanczosSettings { sectors, ..Default::default() };
            let gs = ground_state(&spec, &settings).unwrap();
            assert_abs_diff_eq!(gs.energy, exact, epsilon = 1e-9);
            // Residual of the returned vector against the dense matrix.
            let psi = DVector::from_iterator(spec.dim(), gs.state.amplitudes().iter().map(|z| z.re));
            let r = &dense * &psi - &psi * gs.energy;
            assert!(r.norm() < 1e-9, "{spec:?}: residual {}", r.norm());
        }
    }
}

#[test]
fn lanczos_on_random_symmetric_matrix() {
    let dim = 60;
    let m = DMatrix::<f64>::from_fn(dim, dim, |i, j| (((i * 31 + j * 17) % 23) as f64 - 11.0) / 7.0);
    let a = &m + m.transpose();
    let exact = a.clone().symmetric_eigen().eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let out = lanczos_lowest(
        |x, y| {
            let r = &a * DVector::from_column_slice(x);
            y.copy_from_slice(r.as_slice());
        },
        vec![1.0; dim],
        &LanczosSettings::default(),
    )
    .unwrap();
    assert_abs_diff_eq!(out.energy, exact, epsilon = 1e-9);
}

#[test]
fn schmidt_spectrum_matches_singular_values() {
    for seed in 0..20 {
        let n = 3 + (seed as usize % 4);
        let state = haar_random(n, seed).unwrap();
        let k = 1 + (seed as usize % (n / 2));
        // Leading qubits 1..=k: the amplitude vector reshapes row-major.
        let subset: Vec<usize> = (1..=k).collect();
        let rows = 1 << k;
        let cols = 1 << (n - k);
        let amps: Vec<nalgebra::Complex<f64>> =
            state.amplitudes().iter().map(|z| nalgebra::Complex::new(z.re, z.im)).collect();
        let m = DMatrix::from_row_slice(rows, cols, &amps);
        let mut sv: Vec<f64> = m.singular_values().iter().map(|s| s * s).collect();
        sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let spectrum = schmidt_spectrum(&state, &subset).unwrap();
        for (a, b) in spectrum.iter().zip(&sv) {
            assert_abs_diff_eq!(*a, *b, epsilon = 1e-12);
        }
    }
}

#[test]
fn reduced_density_matches_dense_partial_trace() {
    let state = haar_random(4, 9).unwrap();
    let amps = state.amplitudes();
    // Qubits 3 and 1, in that order: bit 1 of the result is qubit 3.
    let rho = reduced_density(&state, &[3, 1]).unwrap();
    for a in 0..4 {
        for b in 0..4 {
            let mut sum = C64::new(0.0, 0.0);
            for rest in 0..4 {
                let idx = |x: usize| {
                    let q3 = (x >> 1) & 1;
                    let q1 = x & 1;
                    let q2 = (rest >> 1) & 1;
                    let q4 = rest & 1;
                    (q1 << 3) | (q2 << 2) | (q3 << 1) | q4
                };
                sum += amps[idx(a)] * amps[idx(b)].conj();
            }
            assert_abs_diff_eq!(rho.get(a, b).re, sum.re, epsilon = 1e-14);
            assert_abs_diff_eq!(rho.get(a, b).im, sum.im, epsilon = 1e-14);
        }
    }
}
