//! Angle search for local measurement bases: a seeded grid over the Bloch
//! sphere of each measured qubit, followed by Nelder-Mead refinement.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

const TWO_PI: f64 = 2.0 * PI;
const POLE_SNAP: f64 = 1e-9;
const SNAP_LOSS: f64 = 1e-12;

/// Controls the grid and the refinement stage.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerSettings {
    /// Grid points for θ over `[0, π]` and for φ over `[0, 2π)`.
    pub grid_points_per_angle: usize,
    pub refine_iterations: usize,
    /// Refinement stops once the simplex diameter drops below this.
    pub refine_tolerance: f64,
    /// Prefer the computational basis when it ties with the optimum.
    pub include_computational_basis: bool,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self {
            grid_points_per_angle: 24,
            refine_iterations: 200,
            refine_tolerance: 1e-7,
            include_computational_basis: true,
        }
    }
}

impl OptimizerSettings {
    pub fn validate(&self) -> Result<()> {
        if self.grid_points_per_angle < 2 {
            return Err(Error::InvalidParameter("grid_points_per_angle must be >= 2".into()));
        }
        if !(self.refine_tolerance > 0.0 && self.refine_tolerance.is_finite()) {
            return Err(Error::InvalidParameter("refine_tolerance must be positive".into()));
        }
        Ok(())
    }

    /// Initial simplex step for θ and φ: half a grid spacing.
    pub(crate) fn steps(&self) -> (f64, f64) {
        let g = self.grid_points_per_angle as f64;
        (0.5 * PI / (g - 1.0), PI / g)
    }
}

/// Single-qubit grid: θ on `linspace(0, π, G)` plus `π/2`, φ on multiples of
/// `2π/G`. The poles carry only φ = 0.
pub fn angle_grid(points: usize) -> Vec<(f64, f64)> {
    let points = points.max(2);
    let mut thetas: Vec<f64> =
        (0..points).map(|i| PI * i as f64 / (points - 1) as f64).collect();
    if !thetas.iter().any(|t| (t - 0.5 * PI).abs() < 1e-12) {
        thetas.push(0.5 * PI);
        thetas.sort_by(f64::total_cmp);
    }
    let mut out = Vec::new();
    for &t in &thetas {
        if t == 0.0 || t == PI {
            out.push((t, 0.0));
        } else {
            for k in 0..points {
                out.push((t, TWO_PI * k as f64 / points as f64));
            }
        }
    }
    out
}

/// Maps any real pair onto `θ ∈ [0, π]`, `φ ∈ [0, 2π)` describing the same
/// measurement basis.
pub fn canonical_angle(theta: f64, phi: f64) -> (f64, f64) {
    let mut t = wrap(theta);
    let mut p = phi;
    if t > PI {
        t = TWO_PI - t;
        p += PI;
    }
    let mut p = wrap(p);
    if p >= TWO_PI {
        p = 0.0;
    }
    (t, p)
}

fn wrap(x: f64) -> f64 {
    let r = x % TWO_PI;
    if r < 0.0 {
        r + TWO_PI
    } else {
        r
    }
}

/// Outcome of [`maximize_over_angles`].
#[derive(Debug, Clone, PartialEq)]
pub struct AngleOptimum {
    pub angles: Vec<(f64, f64)>,
    pub value: f64,
    pub evaluations: usize,
}

/// Maximizes `f` over `m` measurement angle pairs. `f` receives the flat
/// slice `[θ1, φ1, θ2, φ2, ...]` and must accept any real values.
pub fn maximize_over_angles<F>(
    m: usize,
    settings: &OptimizerSettings,
    hints: &[Vec<(f64, f64)>],
    mut f: F,
) -> Result<AngleOptimum>
where
    F: FnMut(&[f64]) -> f64,
{
    settings.validate()?;
    let grid = angle_grid(settings.grid_points_per_angle);
    let mut best = vec![0.0; 2 * m];
    let mut best_value = f64::NEG_INFINITY;
    let mut evaluations = 0usize;
    let mut point = vec![0.0; 2 * m];
    let mut index = vec![0usize; m];
    // Odometer over the product grid.
    'grid: loop {
        for (j, &g) in index.iter().enumerate() {
            point[2 * j] = grid[g].0;
            point[2 * j + 1] = grid[g].1;
        }
        let v = f(&point);
        evaluations += 1;
        if v > best_value {
            best_value = v;
            best.copy_from_slice(&point);
        }
        let mut j = m;
        loop {
            if j == 0 {
                break 'grid;
            }
            j -= 1;
            index[j] += 1;
            if index[j] < grid.len() {
                break;
            }
            index[j] = 0;
        }
    }
    for hint in hints {
        if hint.len() != m {
            continue;
        }
        let flat: Vec<f64> = hint.iter().flat_map(|&(t, p)| [t, p]).collect();
        let v = f(&flat);
        evaluations += 1;
        if v > best_value {
            best_value = v;
            best = flat;
        }
    }
    finish(m, settings, best, best_value, evaluations, &mut f)
}

/// Refines the best starting point and canonicalizes the result.
pub(crate) fn finish<F>(
    m: usize,
    settings: &OptimizerSettings,
    start: Vec<f64>,
    start_value: f64,
    mut evaluations: usize,
    f: &mut F,
) -> Result<AngleOptimum>
where
    F: FnMut(&[f64]) -> f64,
{
    let (theta_step, phi_step) = settings.steps();
    let steps: Vec<f64> = (0..2 * m).map(|i| if i % 2 == 0 { theta_step } else { phi_step }).collect();
    let refined = nelder_mead_max(
        &mut *f,
        &start,
        start_value,
        &steps,
        settings.refine_iterations,
        settings.refine_tolerance,
    );
    evaluations += refined.evaluations;
    let (mut point, mut value) = if refined.value >= start_value {
        (refined.point, refined.value)
    } else {
        (start, start_value)
    };

    let canonical: Vec<f64> = point
        .chunks(2)
        .flat_map(|c| {
            let (t, p) = canonical_angle(c[0], c[1]);
            [t, p]
        })
        .collect();
    let mut snapped = canonical.clone();
    for c in snapped.chunks_mut(2) {
        if c[0] < POLE_SNAP {
            c[0] = 0.0;
            c[1] = 0.0;
        } else if PI - c[0] < POLE_SNAP {
            c[0] = PI;
            c[1] = 0.0;
        }
    }
    let snapped_value = f(&snapped);
    evaluations += 1;
    if snapped_value >= value - SNAP_LOSS {
        point = snapped;
        value = snapped_value;
    } else {
        let v = f(&canonical);
        evaluations += 1;
        point = canonical;
        value = v;
    }

    if settings.include_computational_basis {
        let zero = vec![0.0; 2 * m];
        if point != zero {
            let v = f(&zero);
            evaluations += 1;
            if v >= value - SNAP_LOSS {
                point = zero;
                value = v;
            }
        }
    }

    Ok(AngleOptimum {
        angles: point.chunks(2).map(|c| (c[0], c[1])).collect(),
        value,
        evaluations,
    })
}

/// Result of a simplex search.
#[derive(Debug, Clone)]
pub struct SimplexResult {
    pub point: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
}

/// Nelder-Mead maximization from `start` with per-coordinate initial steps.
/// Stops when every vertex lies within `tolerance` of the best vertex or
/// after `max_iterations` iterations.
pub fn nelder_mead_max<F>(
    f: &mut F,
    start: &[f64],
    start_value: f64,
    steps: &[f64],
    max_iterations: usize,
    tolerance: f64,
) -> SimplexResult
where
    F: FnMut(&[f64]) -> f64,
{
    let d = start.len();
    let mut evaluations = 0;
    // Work with -f so the textbook minimization form applies.
    let mut vertices: Vec<Vec<f64>> = Vec::with_capacity(d + 1);
    let mut values: Vec<f64> = Vec::with_capacity(d + 1);
    vertices.push(start.to_vec());
    values.push(-start_value);
    for i in 0..d {
        let mut v = start.to_vec();
        v[i] += steps[i];
        values.push(-f(&v));
        evaluations += 1;
        vertices.push(v);
    }

    let mut centroid = vec![0.0; d];
    let mut trial = vec![0.0; d];
    let mut trial2 = vec![0.0; d];
    for _ in 0..max_iterations {
        let mut order: Vec<usize> = (0..=d).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let best = order[0];
        let worst = order[d];
        let second_worst = order[d - 1];

        let diameter = vertices
            .iter()
            .map(|v| {
                v.iter()
                    .zip(&vertices[best])
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if diameter < tolerance {
            break;
        }

        centroid.iter_mut().for_each(|c| *c = 0.0);
        for (k, v) in vertices.iter().enumerate() {
            if k != worst {
                for (c, x) in centroid.iter_mut().zip(v) {
                    *c += x;
                }
            }
        }
        centroid.iter_mut().for_each(|c| *c /= d as f64);

        for i in 0..d {
            trial[i] = centroid[i] + (centroid[i] - vertices[worst][i]);
        }
        let reflected = -f(&trial);
        evaluations += 1;

        if reflected < values[best] {
            for i in 0..d {
                trial2[i] = centroid[i] + 2.0 * (centroid[i] - vertices[worst][i]);
            }
            let expanded = -f(&trial2);
            evaluations += 1;
            if expanded < reflected {
                vertices[worst].copy_from_slice(&trial2);
                values[worst] = expanded;
            } else {
                vertices[worst].copy_from_slice(&trial);
                values[worst] = reflected;
            }
            continue;
        }
        if reflected < values[second_worst] {
            vertices[worst].copy_from_slice(&trial);
            values[worst] = reflected;
            continue;
        }
        let (base, base_value) = if reflected < values[worst] {
            (trial.clone(), reflected)
        } else {
            (vertices[worst].clone(), values[worst])
        };
        for i in 0..d {
            trial2[i] = centroid[i] + 0.5 * (base[i] - centroid[i]);
        }
        let contracted = -f(&trial2);
        evaluations += 1;
        if contracted < base_value {
            vertices[worst].copy_from_slice(&trial2);
            values[worst] = contracted;
            continue;
        }
        // Shrink towards the best vertex.
        let anchor = vertices[best].clone();
        for k in 0..=d {
            if k == best {
                continue;
            }
            for i in 0..d {
                vertices[k][i] = anchor[i] + 0.5 * (vertices[k][i] - anchor[i]);
            }
            values[k] = -f(&vertices[k]);
            evaluations += 1;
        }
    }
    let best = (0..=d).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap_or(0);
    SimplexResult { point: vertices[best].clone(), value: -values[best], evaluations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn grid_contains_required_angles() {
        let g = angle_grid(24);
        assert!(g.contains(&(0.0, 0.0)));
        assert!(g.contains(&(PI, 0.0)));
        assert!(g.iter().any(|&(t, p)| t == 0.5 * PI && p == 0.0));
        assert_eq!(g.len(), 23 * 24 + 2);
        assert_eq!(angle_grid(5).len(), 3 * 5 + 2);
    }

    #[test]
    fn canonical_angles() {
        let (t, p) = canonical_angle(-0.3, 0.2);
        assert_abs_diff_eq!(t, 0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(p, 0.2 + PI, epsilon = 1e-15);
        let (t, p) = canonical_angle(1.0, -0.5);
        assert_abs_diff_eq!(t, 1.0);
        assert_abs_diff_eq!(p, TWO_PI - 0.5, epsilon = 1e-15);
        let (t, p) = canonical_angle(1.0 + TWO_PI, 2.0 + 2.0 * TWO_PI);
        assert_abs_diff_eq!(t, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(p, 2.0, epsilon = 1e-14);
    }

    #[test]
    fn simplex_finds_quadratic_peak() {
        let mut f = |x: &[f64]| -(x[0] - 1.2).powi(2) - 3.0 * (x[1] + 0.4).powi(2);
        let start = [0.0, 0.0];
        let v0 = f(&start);
        let r = nelder_mead_max(&mut f, &start, v0, &[0.1, 0.1], 500, 1e-9);
        assert_abs_diff_eq!(r.point[0], 1.2, epsilon = 1e-7);
        assert_abs_diff_eq!(r.point[1], -0.4, epsilon = 1e-7);
    }

    #[test]
    fn angle_search_snaps_to_pole() {
        // Peak at θ = 0, where φ is immaterial.
        let opt = maximize_over_angles(1, &OptimizerSettings::default(), &[], |x| x[0].cos())
            .unwrap();
        assert_eq!(opt.angles, vec![(0.0, 0.0)]);
        assert_abs_diff_eq!(opt.value, 1.0);
    }

    #[test]
    fn angle_search_off_grid_optimum() {
        let target = (1.0, 2.5);
        let opt = maximize_over_angles(1, &OptimizerSettings::default(), &[], |x| {
            -(x[0] - target.0).powi(2) - (x[1] - target.1).powi(2)
        })
        .unwrap();
        assert_abs_diff_eq!(opt.angles[0].0, target.0, epsilon = 1e-6);
        assert_abs_diff_eq!(opt.angles[0].1, target.1, epsilon = 1e-6);
    }

    #[test]
    fn settings_validation() {
        let s = OptimizerSettings { grid_points_per_angle: 1, ..Default::default() };
        assert!(s.validate().is_err());
    }
}
