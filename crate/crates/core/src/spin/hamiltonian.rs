use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, AddAssign, Mul};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::qstate::DEFAULT_MAX_QUBITS;

/// Couplings of a periodic chain. `σ^z|0> = +|0>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpinModel {
    /// `H = J Σ σ^x_i σ^x_{i+1} + h Σ σ^z_i`, with `J, h > 0`.
    Ising { j: f64, h: f64 },
    /// `H = J Σ (σ^x_i σ^x_{i+1} + σ^y_i σ^y_{i+1} - Δ σ^z_i σ^z_{i+1}) + h Σ σ^z_i`.
    Xxz { j: f64, delta: f64, h: f64 },
}

/// A model on `n_sites` sites with periodic boundaries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinModelSpec {
    pub model: SpinModel,
    pub n_sites: usize,
}

impl SpinModelSpec {
    /// Ising chain at `λ = J/h` with `h = 1`.
    pub fn ising(n_sites: usize, lambda: f64) -> Self {
        Self { model: SpinModel::Ising { j: lambda, h: 1.0 }, n_sites }
    }

    /// XXZ chain at anisotropy `delta` and `λ = h/J` with `J = 1`.
    pub fn xxz(n_sites: usize, delta: f64, lambda: f64) -> Self {
        Self { model: SpinModel::Xxz { j: 1.0, delta, h: lambda }, n_sites }
    }

    pub fn dim(&self) -> usize {
        1 << self.n_sites
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sites < 2 {
            return Err(Error::InvalidParameter(format!(
                "a chain needs at least 2 sites, got {}",
                self.n_sites
            )));
        }
        if self.n_sites > DEFAULT_MAX_QUBITS {
            return Err(Error::DimensionOverflow { n_qubits: self.n_sites, cap: DEFAULT_MAX_QUBITS });
        }
        match self.model {
            SpinModel::Ising { j, h } => {
                if !(j > 0.0 && h > 0.0 && j.is_finite() && h.is_finite()) {
                    return Err(Error::InvalidParameter(format!(
                        "Ising couplings must be positive, got J = {j}, h = {h}"
                    )));
                }
            }
            SpinModel::Xxz { j, delta, h } => {
                if ![j, delta, h].iter().all(|v| v.is_finite()) {
                    return Err(Error::InvalidParameter("XXZ couplings must be finite".into()));
                }
            }
        }
        Ok(())
    }

    /// Bit masks of the `N` periodic bonds (two coinciding bonds for `N = 2`).
    pub(crate) fn bonds(&self) -> Vec<usize> {
        let n = self.n_sites;
        (0..n).map(|i| (1usize << (n - 1 - i)) | (1usize << (n - 1 - (i + 1) % n))).collect()
    }
}

/// `H v`, computed without forming the matrix.
pub fn apply_hamiltonian<T>(spec: &SpinModelSpec, v: &[T]) -> Result<Vec<T>>
where
    T: Copy + Zero + Add<Output = T> + AddAssign + Mul<f64, Output = T>,
{
    let mut out = vec![T::zero(); v.len()];
    apply_hamiltonian_into(spec, v, &mut out)?;
    Ok(out)
}

/// Writes `H v` into `out`.
pub fn apply_hamiltonian_into<T>(spec: &SpinModelSpec, v: &[T], out: &mut [T]) -> Result<()>
where
    T: Copy + Zero + Add<Output = T> + AddAssign + Mul<f64, Output = T>,
{
    let dim = spec.dim();
    if v.len() != dim || out.len() != dim {
        return Err(Error::LengthMismatch { expected: dim, got: v.len().min(out.len()) });
    }
    let n = spec.n_sites as f64;
    let bonds = spec.bonds();
    match spec.model {
        SpinModel::Ising { j, h } => {
            for (i, o) in out.iter_mut().enumerate() {
                *o = v[i] * (h * (n - 2.0 * i.count_ones() as f64));
            }
            for (i, &x) in v.iter().enumerate() {
                for &b in &bonds {
                    out[i ^ b] += x * j;
                }
            }
        }
        SpinModel::Xxz { j, delta, h } => {
            for (i, o) in out.iter_mut().enumerate() {
                let mut zz = 0.0;
                for &b in &bonds {
                    let both = (i & b).count_ones();
                    zz += if both == 1 { -1.0 } else { 1.0 };
                }
                *o = v[i] * (-j * delta * zz + h * (n - 2.0 * i.count_ones() as f64));
            }
            for (i, &x) in v.iter().enumerate() {
                for &b in &bonds {
                    if (i & b).count_ones() == 1 {
                        out[i ^ b] += x * (2.0 * j);
                    }
                }
            }
        }
    }
    Ok(())
}
