use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::hamiltonian::{apply_hamiltonian_into, SpinModel, SpinModelSpec};
use crate::error::{Error, Result};
use crate::linalg;
use crate::qstate::PureState;
use crate::C64;

/// Energies closer than this are reported as degenerate.
pub const DEGENERACY_TOLERANCE: f64 = 1e-8;

/// Which invariant subspaces to search for the ground state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SectorStrategy {
    /// Run Lanczos separately in every symmetry sector of the model
    /// (parity for Ising, magnetization for XXZ) and keep the lowest.
    #[default]
    Auto,
    /// One run over the full space from an unrestricted start vector.
    Full,
}

/// A symmetry sector, labelled by the number of `|1>` sites where relevant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Sector {
    Full,
    /// Parity of the number of `|1>` sites (0 even, 1 odd).
    Parity(u8),
    /// Number of `|1>` sites.
    Magnetization(usize),
}

impl Sector {
    fn contains(&self, index: usize) -> bool {
        match *self {
            Sector::Full => true,
            Sector::Parity(p) => index.count_ones() % 2 == p as u32,
            Sector::Magnetization(k) => index.count_ones() as usize == k,
        }
    }

    /// Total `S^z = Σ σ^z / 2` for magnetization sectors of `n` sites.
    pub fn total_sz(&self, n_sites: usize) -> Option<f64> {
        match *self {
            Sector::Magnetization(k) => Some(0.5 * (n_sites as f64 - 2.0 * k as f64)),
            _ => None,
        }
    }
}

/// Lanczos controls.
#[derive(Debug, Clone, PartialEq)]
pub struct LanczosSettings {
    pub max_iterations: usize,
    /// Required bound on `‖Hψ − Eψ‖`.
    pub residual_tolerance: f64,
    /// Orthogonalize every new vector against the whole stored basis.
    pub reorthogonalize: bool,
    pub seed: u64,
    pub sectors: SectorStrategy,
}

impl Default for LanczosSettings {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            residual_tolerance: 1e-10,
            reorthogonalize: true,
            seed: 0x5eed,
            sectors: SectorStrategy::Auto,
        }
    }
}

/// Lowest eigenpair found by [`lanczos_lowest`].
#[derive(Debug, Clone, PartialEq)]
pub struct LanczosOutcome {
    pub energy: f64,
    pub vector: Vec<f64>,
    /// `‖Hψ − Eψ‖` recomputed from the returned vector.
    pub residual: f64,
    pub iterations: usize,
    /// Second-lowest Ritz value, an upper bound on the next eigenvalue.
    pub second_ritz: Option<f64>,
}

/// Lowest eigenpair of the real symmetric operator `apply` (which writes
/// `H x` into its second argument), starting from `start`.
pub fn lanczos_lowest<F>(mut apply: F, start: Vec<f64>, settings: &LanczosSettings) -> Result<LanczosOutcome>
where
    F: FnMut(&[f64], &mut [f64]),
{
    if !(settings.residual_tolerance > 0.0) {
        return Err(Error::InvalidParameter("residual tolerance must be positive".into()));
    }
    let dim = start.len();
    let start_norm = norm(&start);
    if !(start_norm > 0.0) {
        return Err(Error::ZeroNorm);
    }
    let mut basis: Vec<Vec<f64>> = vec![start.iter().map(|x| x / start_norm).collect()];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut w = vec![0.0; dim];
    let mut last_residual = f64::INFINITY;

    for k in 0..settings.max_iterations.max(1) {
        apply(&basis[k], &mut w);
        let alpha = dot(&basis[k], &w);
        axpy(-alpha, &basis[k], &mut w);
        if k > 0 {
            axpy(-betas[k - 1], &basis[k - 1], &mut w);
        }
        if settings.reorthogonalize {
            for _ in 0..2 {
                for q in &basis {
                    let c = dot(q, &w);
                    axpy(-c, q, &mut w);
                }
            }
        }
        alphas.push(alpha);
        let beta = norm(&w);
        let scale = alphas.iter().map(|a| a.abs()).fold(1.0, f64::max);
        let exhausted = beta <= 1e-13 * scale || k + 1 == dim;

        let evals = linalg::tridiagonal_eigenvalues(&alphas, &betas);
        let theta = evals[0];
        let y = linalg::tridiagonal_eigenvector(&alphas, &betas, theta);
        let estimate = beta * y[k].abs();
        if estimate < settings.residual_tolerance || exhausted {
            let vector = ritz_vector(&basis, &y);
            let residual = residual_norm(&mut apply, &vector, theta);
            last_residual = residual;
            if residual < settings.residual_tolerance || exhausted {
                if residual >= settings.residual_tolerance {
                    return Err(Error::NoConvergence { iterations: k + 1, residual });
                }
                return Ok(LanczosOutcome {
                    energy: theta,
                    vector,
                    residual,
                    iterations: k + 1,
                    second_ritz: evals.get(1).copied(),
                });
            }
        } else {
            last_residual = estimate;
        }
        betas.push(beta);
        basis.push(w.iter().map(|x| x / beta).collect());
    }
    Err(Error::NoConvergence { iterations: settings.max_iterations, residual: last_residual })
}

fn ritz_vector(basis: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let mut v = vec![0.0; basis[0].len()];
    for (q, &c) in basis.iter().zip(y) {
        axpy(c, q, &mut v);
    }
    let n = norm(&v);
    v.iter_mut().for_each(|x| *x /= n);
    v
}

fn residual_norm<F: FnMut(&[f64], &mut [f64])>(apply: &mut F, v: &[f64], theta: f64) -> f64 {
    let mut hv = vec![0.0; v.len()];
    apply(v, &mut hv);
    hv.iter().zip(v).map(|(h, x)| (h - theta * x).powi(2)).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(c: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += c * xi;
    }
}

/// Ground state of a spin chain.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundState {
    pub energy: f64,
    pub state: PureState,
    pub residual: f64,
    pub iterations: usize,
    pub sector: Sector,
    /// Lowest energy of every searched sector.
    pub sector_energies: Vec<(Sector, f64)>,
    /// Distance to the next level found (other sectors or the second Ritz
    /// value of the ground sector).
    pub gap: f64,
    pub degenerate: bool,
}

/// Lowest eigenpair of the chain.
pub fn ground_state(spec: &SpinModelSpec, settings: &LanczosSettings) -> Result<GroundState> {
    spec.validate()?;
    let n = spec.n_sites;
    let sectors: Vec<Sector> = match (settings.sectors, spec.model) {
        (SectorStrategy::Full, _) => vec![Sector::Full],
        (SectorStrategy::Auto, SpinModel::Ising { .. }) => vec![Sector::Parity(0), Sector::Parity(1)],
        (SectorStrategy::Auto, SpinModel::Xxz { .. }) => (0..=n).map(Sector::Magnetization).collect(),
    };
    let dim = spec.dim();
    let mut runs: Vec<(Sector, LanczosOutcome)> = Vec::with_capacity(sectors.len());
    for (stream, sector) in sectors.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
        rng.set_stream(stream as u64);
        let start: Vec<f64> = (0..dim)
            .map(|i| {
                let x: f64 = rng.random_range(-1.0..1.0);
                if sector.contains(i) {
                    x
                } else {
                    0.0
                }
            })
            .collect();
        let outcome = lanczos_lowest(
            |x, y| apply_hamiltonian_into(spec, x, y).expect("dimension checked"),
            start,
            settings,
        )?;
        runs.push((*sector, outcome));
    }
    let mut best = 0;
    for (i, (_, run)) in runs.iter().enumerate() {
        if run.energy < runs[best].1.energy - 1e-12 {
            best = i;
        }
    }
    let energy = runs[best].1.energy;
    let mut gap = runs[best].1.second_ritz.map_or(f64::INFINITY, |e| e - energy);
    for (i, (_, run)) in runs.iter().enumerate() {
        if i != best {
            gap = gap.min(run.energy - energy);
        }
    }
    let sector_energies = runs.iter().map(|(s, r)| (*s, r.energy)).collect();
    let iterations = runs.iter().map(|(_, r)| r.iterations).sum();
    let (sector, run) = runs.swap_remove(best);
    let state = PureState::from_amplitudes(run.vector.iter().map(|&x| C64::new(x, 0.0)).collect())?;
    Ok(GroundState {
        energy,
        state,
        residual: run.residual,
        iterations,
        sector,
        sector_energies,
        gap,
        degenerate: gap < DEGENERACY_TOLERANCE,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn diagonal_operator() {
        let d: Vec<f64> = (0..20).map(|i| (i as f64 - 7.5).powi(2)).collect();
        let start = vec![1.0; 20];
        let out = lanczos_lowest(
            |x, y| {
                for i in 0..20 {
                    y[i] = d[i] * x[i];
                }
            },
            start,
            &LanczosSettings::default(),
        )
        .unwrap();
        assert_abs_diff_eq!(out.energy, 0.25, epsilon = 1e-12);
        assert!(out.residual < 1e-10);
    }

    #[test]
    fn paramagnetic_limit_is_product() {
        let gs = ground_state(&SpinModelSpec::ising(8, 1e-4), &LanczosSettings::default()).unwrap();
        // h dominates: every site in the σ^z = -1 state |1>.
        assert!(gs.state.amplitudes()[255].norm() > 0.999_999);
        assert_eq!(gs.sector, Sector::Parity(0));
    }

    #[test]
    fn saturated_xxz_sits_in_extreme_sector() {
        let gs = ground_state(&SpinModelSpec::xxz(6, 0.5, 3.0), &LanczosSettings::default()).unwrap();
        assert_eq!(gs.sector, Sector::Magnetization(6));
        assert_eq!(gs.sector.total_sz(6), Some(-3.0));
    }

    #[test]
    fn iteration_cap_reports_non_convergence() {
        let settings = LanczosSettings { max_iterations: 2, ..Default::default() };
        assert!(matches!(
            ground_state(&SpinModelSpec::ising(10, 1.0), &settings),
            Err(Error::NoConvergence { .. })
        ));
    }
}
