use lggm_core::spin::{
    locate_extremum, sweep, ExtremumKind, Measure, Sector, Series, SpinModelSpec, SweepParameter, SweepSpec,
};
use lggm_core::Error;

fn grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let n = ((stop - start) / step).round() as usize;
    (0..=n).map(|i| start + step * i as f64).collect()
}

#[test]
fn sweeps_are_deterministic() {
    let mut spec = SweepSpec::new(SpinModelSpec::ising(6, 1.0), SweepParameter::Lambda, grid(0.5, 1.5, 0.25));
    spec.measures = vec![Measure::Ggm, Measure::Lggm1];
    assert_eq!(sweep(&spec).unwrap(), sweep(&spec).unwrap());
}

#[test]
fn xxz_field_plateaus_follow_magnetization() {
    let spec = SweepSpec::new(SpinModelSpec::xxz(6, 0.5, 0.0), SweepParameter::Lambda, grid(0.0, 1.6, 0.1));
    let result = sweep(&spec).unwrap();
    let g = result.series(Series::Ggm).unwrap();
    for (w, pts) in g.windows(2).zip(result.points.windows(2)) {
        let moved = (w[1] - w[0]).abs() > 1e-9;
        let sector_changed = pts[0].sector != pts[1].sector;
        assert_eq!(moved, sector_changed, "at {}", pts[1].parameter);
    }
    // Fully polarized above the saturation field h = 2J(1 - Δ).
    for p in result.points.iter().filter(|p| p.parameter > 1.0 + 1e-9) {
        assert_eq!(p.sector, Sector::Magnetization(6));
        assert!(p.ggm.unwrap() < 1e-12 && p.lggm1.unwrap() < 1e-12 && p.lggm12.unwrap() < 1e-12);
    }
}

#[test]
fn flat_series_has_no_extremum() {
    let mut spec = SweepSpec::new(SpinModelSpec::xxz(4, 0.5, 0.0), SweepParameter::Lambda, grid(1.2, 1.6, 0.1));
    spec.measures = vec![Measure::Ggm];
    let result = sweep(&spec).unwrap();
    assert_eq!(locate_extremum(&result, Series::Ggm, ExtremumKind::Min), Err(Error::FlatSeries));
    assert_eq!(locate_extremum(&result, Series::Ggm, ExtremumKind::Max), Err(Error::FlatSeries));
}
