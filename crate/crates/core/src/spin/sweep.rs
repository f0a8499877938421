use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::hamiltonian::{SpinModel, SpinModelSpec};
use super::lanczos::{ground_state, LanczosSettings, Sector};
use crate::error::{Error, Result};
use crate::ggm::{ggm, CutPolicy};
use crate::localize::lggm_with_hints;
use crate::optimize::OptimizerSettings;
use crate::qstate::PureState;

const SAME_STATE: f64 = 1e-12;

/// The coupling varied along a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    /// `J/h` for Ising, `h/J` for XXZ.
    Lambda,
    /// XXZ anisotropy.
    Delta,
}

/// Quantities evaluated at each grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Measure {
    Ggm,
    /// LGGM measuring site 1.
    Lggm1,
    /// LGGM measuring sites 1 and 2.
    Lggm12,
}

/// A sweep request. The swept coupling of `model` is overwritten at every
/// grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub model: SpinModelSpec,
    pub parameter: SweepParameter,
    pub grid: Vec<f64>,
    pub measures: Vec<Measure>,
    pub policy: CutPolicy,
    pub optimizer: OptimizerSettings,
    /// Optimizer for the two-site measurement.
    pub pair_optimizer: OptimizerSettings,
    pub lanczos: LanczosSettings,
    /// Seed each LGGM search with the previous point's optimal angles.
    pub warm_start: bool,
}

impl SweepSpec {
    /// Defaults: all three measures, cuts of at most two sites, warm start.
    pub fn new(model: SpinModelSpec, parameter: SweepParameter, grid: Vec<f64>) -> Self {
        Self {
            model,
            parameter,
            grid,
            measures: vec![Measure::Ggm, Measure::Lggm1, Measure::Lggm12],
            policy: CutPolicy::MaxCutSize(2),
            optimizer: OptimizerSettings::default(),
            pair_optimizer: OptimizerSettings::default(),
            lanczos: LanczosSettings::default(),
            warm_start: true,
        }
    }

    fn model_at(&self, x: f64) -> Result<SpinModelSpec> {
        let model = match (self.model.model, self.parameter) {
            (SpinModel::Ising { h, .. }, SweepParameter::Lambda) => SpinModel::Ising { j: x * h, h },
            (SpinModel::Xxz { j, delta, .. }, SweepParameter::Lambda) => SpinModel::Xxz { j, delta, h: x * j },
            (SpinModel::Xxz { j, h, .. }, SweepParameter::Delta) => SpinModel::Xxz { j, delta: x, h },
            (SpinModel::Ising { .. }, SweepParameter::Delta) => {
                return Err(Error::InvalidParameter("the Ising chain has no anisotropy".into()))
            }
        };
        Ok(SpinModelSpec { model, n_sites: self.model.n_sites })
    }
}

/// Results at one grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub parameter: f64,
    pub energy: f64,
    pub ggm: Option<f64>,
    pub lggm1: Option<f64>,
    pub lggm12: Option<f64>,
    pub angles1: Option<Vec<(f64, f64)>>,
    pub angles12: Option<Vec<(f64, f64)>>,
    pub sector: Sector,
    pub total_sz: Option<f64>,
    pub degenerate: bool,
}

/// A series stored in a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Series {
    Energy,
    Ggm,
    Lggm1,
    Lggm12,
}

/// Extremum type to locate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremumKind {
    /// Largest central-difference derivative.
    Max,
    /// Interior minimum of the series itself.
    Min,
    /// Largest jump between left and right one-sided differences.
    Cusp,
}

/// A located feature of a series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub parameter: f64,
    pub index: usize,
    /// Derivative value (max), depth below the neighbour mean (min), or
    /// slope jump (cusp).
    pub sharpness: f64,
}

/// Output of [`sweep`].
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub parameter: SweepParameter,
    pub grid: Vec<f64>,
    pub points: Vec<SweepPoint>,
}

impl SweepResult {
    pub fn series(&self, which: Series) -> Option<Vec<f64>> {
        self.points
            .iter()
            .map(|p| match which {
                Series::Energy => Some(p.energy),
                Series::Ggm => p.ggm,
                Series::Lggm1 => p.lggm1,
                Series::Lggm12 => p.lggm12,
            })
            .collect()
    }

    /// Central differences of a series, at the interior grid points.
    pub fn derivative(&self, which: Series) -> Option<Vec<f64>> {
        self.series(which).map(|y| central_differences(&self.grid, &y))
    }

    /// Max, min and cusp of every stored entanglement series, where defined.
    pub fn extrema(&self) -> Vec<(Series, ExtremumKind, Extremum)> {
        let mut out = Vec::new();
        for series in [Series::Ggm, Series::Lggm1, Series::Lggm12] {
            for kind in [ExtremumKind::Max, ExtremumKind::Min, ExtremumKind::Cusp] {
                if let Ok(e) = locate_extremum(self, series, kind) {
                    out.push((series, kind, e));
                }
            }
        }
        out
    }
}

/// Ground state and requested measures at every grid point, in order.
pub fn sweep(spec: &SweepSpec) -> Result<SweepResult> {
    if spec.grid.is_empty() {
        return Err(Error::InvalidParameter("empty sweep grid".into()));
    }
    if spec.grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter("sweep grid must be strictly increasing".into()));
    }
    let mut points = Vec::with_capacity(spec.grid.len());
    let mut hints1: Vec<Vec<(f64, f64)>> = Vec::new();
    let mut hints12: Vec<Vec<(f64, f64)>> = Vec::new();
    let mut previous: Option<PureState> = None;
    for &x in &spec.grid {
        let model = spec.model_at(x)?;
        let gs = ground_state(&model, &spec.lanczos)?;
        // Field sweeps inside one magnetization sector leave the state unchanged.
        let unchanged = match (&previous, points.last()) {
            (Some(prev), Some(last)) => {
                let last: &SweepPoint = last;
                last.sector == gs.sector
                    && !last.degenerate
                    && !gs.degenerate
                    && prev.overlap(&gs.state).norm() > 1.0 - SAME_STATE
            }
            _ => false,
        };
        if unchanged {
            let mut point = points.last().cloned().expect("checked above");
            point.parameter = x;
            point.energy = gs.energy;
            points.push(point);
            continue;
        }
        let mut point = SweepPoint {
            parameter: x,
            energy: gs.energy,
            ggm: None,
            lggm1: None,
            lggm12: None,
            angles1: None,
            angles12: None,
            sector: gs.sector,
            total_sz: gs.sector.total_sz(model.n_sites),
            degenerate: gs.degenerate,
        };
        if spec.measures.contains(&Measure::Ggm) {
            point.ggm = Some(ggm(&gs.state, &spec.policy)?.value);
        }
        if spec.measures.contains(&Measure::Lggm1) {
            let r = lggm_with_hints(&gs.state, &[1], &spec.optimizer, &spec.policy, &hints1)?;
            if spec.warm_start {
                hints1 = vec![r.optimal_angles.clone()];
            }
            point.lggm1 = Some(r.value);
            point.angles1 = Some(r.optimal_angles);
        }
        if spec.measures.contains(&Measure::Lggm12) {
            let r = lggm_with_hints(&gs.state, &[1, 2], &spec.pair_optimizer, &spec.policy, &hints12)?;
            if spec.warm_start {
                hints12 = vec![r.optimal_angles.clone()];
            }
            point.lggm12 = Some(r.value);
            point.angles12 = Some(r.optimal_angles);
        }
        points.push(point);
        previous = Some(gs.state);
    }
    Ok(SweepResult { parameter: spec.parameter, grid: spec.grid.clone(), points })
}

/// `(y[i+1] - y[i-1]) / (x[i+1] - x[i-1])` for the interior points.
pub fn central_differences(x: &[f64], y: &[f64]) -> Vec<f64> {
    (1..x.len().saturating_sub(1))
        .map(|i| (y[i + 1] - y[i - 1]) / (x[i + 1] - x[i - 1]))
        .collect()
}

/// Locates a maximum of the derivative, an interior minimum, or a cusp.
pub fn locate_extremum(result: &SweepResult, series: Series, kind: ExtremumKind) -> Result<Extremum> {
    let y = result
        .series(series)
        .ok_or_else(|| Error::InvalidParameter(format!("series {series:?} was not computed")))?;
    let x = &result.grid;
    if x.len() < 3 {
        return Err(Error::FlatSeries);
    }
    let scale = y.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    match kind {
        ExtremumKind::Max => {
            let d = central_differences(x, &y);
            let (lo, hi) = range(&d);
            if hi - lo <= 1e-9 * scale.max(hi.abs()) {
                return Err(Error::FlatSeries);
            }
            let i = argmax(&d);
            Ok(Extremum { parameter: x[i + 1], index: i + 1, sharpness: d[i] })
        }
        ExtremumKind::Min => {
            let (lo, hi) = range(&y);
            if hi - lo <= 1e-12 * scale {
                return Err(Error::FlatSeries);
            }
            let neg: Vec<f64> = y.iter().map(|v| -v).collect();
            let i = argmax(&neg);
            if i == 0 || i + 1 == y.len() {
                return Err(Error::FlatSeries);
            }
            Ok(Extremum { parameter: x[i], index: i, sharpness: 0.5 * (y[i - 1] + y[i + 1]) - y[i] })
        }
        ExtremumKind::Cusp => {
            let jumps: Vec<f64> = (1..x.len() - 1)
                .map(|i| {
                    let right = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
                    let left = (y[i] - y[i - 1]) / (x[i] - x[i - 1]);
                    (right - left).abs()
                })
                .collect();
            let (_, hi) = range(&jumps);
            let slope_scale = central_differences(x, &y).iter().fold(scale, |a, v| a.max(v.abs()));
            if hi <= 1e-9 * slope_scale {
                return Err(Error::FlatSeries);
            }
            let i = argmax(&jumps);
            Ok(Extremum { parameter: x[i + 1], index: i + 1, sharpness: jumps[i] })
        }
    }
}

fn range(v: &[f64]) -> (f64, f64) {
    v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
}

/// First index of the largest value.
fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn result_from(x: Vec<f64>, y: Vec<f64>) -> SweepResult {
        let points = x
            .iter()
            .zip(&y)
            .map(|(&p, &v)| SweepPoint {
                parameter: p,
                energy: 0.0,
                ggm: Some(v),
                lggm1: Some(v),
                lggm12: None,
                angles1: None,
                angles12: None,
                sector: Sector::Full,
                total_sz: None,
                degenerate: false,
            })
            .collect();
        SweepResult { parameter: SweepParameter::Lambda, grid: x, points }
    }

    #[test]
    fn central_difference_of_quadratic_is_exact() {
        let x: Vec<f64> = (0..6).map(|i| i as f64 * 0.5).collect();
        let y: Vec<f64> = x.iter().map(|v| v * v).collect();
        let d = central_differences(&x, &y);
        assert_eq!(d.len(), 4);
        for (i, di) in d.iter().enumerate() {
            assert_abs_diff_eq!(*di, 2.0 * x[i + 1], epsilon = 1e-12);
        }
    }

    #[test]
    fn linear_series_is_flat() {
        let x: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 0.3 * v + 1.0).collect();
        let r = result_from(x, y);
        for kind in [ExtremumKind::Max, ExtremumKind::Min, ExtremumKind::Cusp] {
            assert_eq!(locate_extremum(&r, Series::Ggm, kind), Err(Error::FlatSeries));
        }
    }

    #[test]
    fn finds_features() {
        let x: Vec<f64> = (0..21).map(|i| -2.0 + 0.1 * i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| (v + 1.0).abs()).collect();
        let r = result_from(x.clone(), y);
        let min = locate_extremum(&r, Series::Ggm, ExtremumKind::Min).unwrap();
        assert_abs_diff_eq!(min.parameter, -1.0, epsilon = 1e-12);
        let cusp = locate_extremum(&r, Series::Ggm, ExtremumKind::Cusp).unwrap();
        assert_abs_diff_eq!(cusp.parameter, -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(cusp.sharpness, 2.0, epsilon = 1e-9);

        let y: Vec<f64> = x.iter().map(|v| (4.0 * (v + 0.5)).tanh()).collect();
        let r = result_from(x, y);
        let max = locate_extremum(&r, Series::Ggm, ExtremumKind::Max).unwrap();
        assert_abs_diff_eq!(max.parameter, -0.5, epsilon = 1e-12);
    }

    #[test]
    fn grid_validation() {
        let mut spec = SweepSpec::new(SpinModelSpec::ising(4, 1.0), SweepParameter::Lambda, vec![]);
        assert!(sweep(&spec).is_err());
        spec.grid = vec![0.5, 0.4];
        assert!(sweep(&spec).is_err());
        spec.grid = vec![0.5];
        spec.parameter = SweepParameter::Delta;
        assert!(sweep(&spec).is_err());
    }
}
