//! Sampling campaigns: draw states from a family, evaluate the measures,
//! and tally how the localized values compare with the GGM.

use std::f64::consts::PI;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use lggm_core::qstate::{gaussian_amplitudes, haar_random_with_rng};
use lggm_core::{
    build, conjecture_check, ggm, global_lggm, lggm, CutPolicy, OptimizerSettings, PureState, StateSpec,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::format::{opt9, sig9};

/// A state family whose free parameters are drawn at random.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Haar-random states of the whole register.
    Haar { n_qubits: usize },
    /// `a1|0..0> + a2|1..1>` with a Haar-random `(a1, a2)`.
    Gghz { n_qubits: usize },
    /// Single-excitation states with Haar-random coefficients.
    Gw { n_qubits: usize },
    /// Symmetric states: Haar-random superpositions of Dicke states.
    DickeSuperposition { n_qubits: usize },
    /// Three-qubit W class with weights uniform on the simplex.
    WClass,
    /// Three-qubit GHZ class with uniformly drawn angles.
    GhzClass,
}

impl Family {
    pub fn n_qubits(&self) -> usize {
        match *self {
            Family::Haar { n_qubits }
            | Family::Gghz { n_qubits }
            | Family::Gw { n_qubits }
            | Family::DickeSuperposition { n_qubits } => n_qubits,
            Family::WClass | Family::GhzClass => 3,
        }
    }

    /// Parses a family name; `n_qubits` is ignored for the three-qubit classes.
    pub fn parse(name: &str, n_qubits: usize) -> Result<Self, CliError> {
        Ok(match name {
            "haar" => Family::Haar { n_qubits },
            "gghz" => Family::Gghz { n_qubits },
            "gw" => Family::Gw { n_qubits },
            "dicke-sup" => Family::DickeSuperposition { n_qubits },
            "wclass" => Family::WClass,
            "ghz-class" => Family::GhzClass,
            other => {
                return Err(CliError::Usage(format!(
                    "unknown family `{other}` (expected haar, gghz, gw, dicke-sup, wclass, ghz-class)"
                )))
            }
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> lggm_core::Result<PureState> {
        match *self {
            Family::Haar { n_qubits } => haar_random_with_rng(n_qubits, rng),
            Family::Gghz { n_qubits } => {
                let a = gaussian_amplitudes(2, rng);
                let norm = (a[0].norm_sqr() + a[1].norm_sqr()).sqrt();
                build(&StateSpec::Gghz { n_qubits, a1: a[0] / norm, a2: a[1] / norm })
            }
            Family::Gw { n_qubits } => build(&StateSpec::Gw(gaussian_amplitudes(n_qubits, rng))),
            Family::DickeSuperposition { n_qubits } => {
                build(&StateSpec::DickeSuperposition(gaussian_amplitudes(n_qubits + 1, rng)))
            }
            Family::WClass => {
                let g = gaussian_amplitudes(4, rng);
                let total: f64 = g.iter().map(|z| z.norm_sqr()).sum();
                let w: Vec<f64> = g.iter().map(|z| z.norm_sqr() / total).collect();
                build(&StateSpec::WClass { a1: w[0], a2: w[1], a3: w[2] })
            }
            Family::GhzClass => {
                let delta = rng.random_range(0.0..PI / 4.0);
                let gamma = [
                    rng.random_range(0.0..PI / 2.0),
                    rng.random_range(0.0..PI / 2.0),
                    rng.random_range(0.0..PI / 2.0),
                ];
                let mu = rng.random_range(0.0..2.0 * PI);
                build(&StateSpec::GhzClass { delta, gamma, mu })
            }
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Haar { n_qubits } => write!(f, "haar-{n_qubits}"),
            Family::Gghz { n_qubits } => write!(f, "gghz-{n_qubits}"),
            Family::Gw { n_qubits } => write!(f, "gw-{n_qubits}"),
            Family::DickeSuperposition { n_qubits } => write!(f, "dicke-sup-{n_qubits}"),
            Family::WClass => write!(f, "wclass"),
            Family::GhzClass => write!(f, "ghz-class"),
        }
    }
}

/// Which quantities to evaluate besides the GGM.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CampaignMeasures {
    /// LGGM measuring qubit 1.
    pub lggm1: bool,
    /// LGGM measuring qubits 1 and 2.
    pub lggm12: bool,
    /// Single-qubit LGGM maximized over the measured qubit.
    pub global: bool,
    /// Three-qubit measurement-position rule.
    pub conjecture: bool,
}

impl FromStr for CampaignMeasures {
    type Err = CliError;

    /// Comma-separated subset of `G, EL1, EL12, global, conjecture`.
    fn from_str(s: &str) -> Result<Self, CliError> {
        let mut out = CampaignMeasures::default();
        for item in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            match item.to_ascii_lowercase().as_str() {
                "g" | "ggm" => {}
                "el1" => out.lggm1 = true,
                "el12" => out.lggm12 = true,
                "global" | "egl" => out.global = true,
                "conjecture" => out.conjecture = true,
                other => return Err(CliError::Usage(format!("unknown campaign measure `{other}`"))),
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignSpec {
    pub family: Family,
    pub n_samples: u64,
    pub seed: u64,
    pub measures: CampaignMeasures,
    pub equality_tolerance: f64,
    pub optimizer: OptimizerSettings,
    pub policy: CutPolicy,
}

impl CampaignSpec {
    pub fn new(family: Family, n_samples: u64, seed: u64, measures: CampaignMeasures) -> Self {
        Self {
            family,
            n_samples,
            seed,
            measures,
            equality_tolerance: lggm_core::localize::EQUALITY_TOLERANCE,
            optimizer: OptimizerSettings::default(),
            policy: CutPolicy::AllCuts,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.n_samples == 0 {
            return Err(CliError::Usage("a campaign needs at least one sample".into()));
        }
        if !(self.equality_tolerance >= 0.0) {
            return Err(CliError::Usage("equality tolerance must be non-negative".into()));
        }
        let n = self.family.n_qubits();
        if n < 2 {
            return Err(CliError::Usage(format!("family {} needs at least 2 qubits", self.family)));
        }
        if n > lggm_core::qstate::DEFAULT_MAX_QUBITS {
            return Err(lggm_core::Error::DimensionOverflow {
                n_qubits: n,
                cap: lggm_core::qstate::DEFAULT_MAX_QUBITS,
            }
            .into());
        }
        let m = self.measures;
        if (m.lggm1 || m.global) && n < 3 {
            return Err(CliError::Usage("single-qubit LGGM needs at least 3 qubits".into()));
        }
        if m.lggm12 && n < 4 {
            return Err(CliError::Usage("two-qubit LGGM needs at least 4 qubits".into()));
        }
        if m.conjecture && n != 3 {
            return Err(CliError::Usage("the conjecture check applies to 3 qubits".into()));
        }
        self.optimizer.validate()?;
        Ok(())
    }
}

/// Values for one sample; missing measures are `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRow {
    pub index: u64,
    pub ggm: f64,
    pub lggm1: Option<f64>,
    pub lggm12: Option<f64>,
    pub global: Option<f64>,
    pub global_positions: Option<Vec<usize>>,
    pub conjecture_holds: Option<bool>,
}

/// Generator for sample `index`: one ChaCha stream per sample, so results
/// do not depend on scheduling.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn evaluate_sample(spec: &CampaignSpec, index: u64) -> lggm_core::Result<SampleRow> {
    let mut rng = sample_rng(spec.seed, index);
    let state = spec.family.sample(&mut rng)?;
    let m = spec.measures;
    let opt = &spec.optimizer;
    let policy = &spec.policy;
    let g = ggm(&state, policy)?.value;
    let lggm1 = if m.lggm1 { Some(lggm(&state, &[1], opt, policy)?.value) } else { None };
    let lggm12 = if m.lggm12 { Some(lggm(&state, &[1, 2], opt, policy)?.value) } else { None };
    let (global, global_positions) = if m.global {
        let r = global_lggm(&state, 1, opt, policy)?;
        (Some(r.best.value), Some(r.best.positions))
    } else {
        (None, None)
    };
    let conjecture_holds = if m.conjecture { Some(conjecture_check(&state, opt)?.holds) } else { None };
    Ok(SampleRow { index, ggm: g, lggm1, lggm12, global, global_positions, conjecture_holds })
}

/// Evaluates every sample on the current rayon pool; rows come back in
/// index order.
pub fn run_campaign(spec: &CampaignSpec) -> Result<Vec<SampleRow>, CliError> {
    spec.validate()?;
    (0..spec.n_samples)
        .into_par_iter()
        .map(|i| evaluate_sample(spec, i).map_err(CliError::from))
        .collect()
}

pub const CSV_HEADER: &str = "seed_index,G,EL1,EL12,EGL,EGL_positions,conjecture";

pub fn write_csv<W: Write>(rows: &[SampleRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        let positions = r
            .global_positions
            .as_ref()
            .map(|p| p.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(";"))
            .unwrap_or_default();
        let conjecture = r.conjecture_holds.map(|b| if b { "1" } else { "0" }).unwrap_or("");
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.index,
            sig9(r.ggm),
            opt9(r.lggm1),
            opt9(r.lggm12),
            opt9(r.global),
            positions,
            conjecture
        )?;
    }
    Ok(())
}

/// Inverse of [`write_csv`].
pub fn parse_csv(text: &str) -> Result<Vec<SampleRow>, CliError> {
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err(CliError::Parse("unexpected campaign CSV header".into()));
    }
    let num = |s: &str| -> Result<Option<f64>, CliError> {
        if s.is_empty() {
            Ok(None)
        } else {
            s.parse().map(Some).map_err(|_| CliError::Parse(format!("bad number `{s}`")))
        }
    };
    lines
        .filter(|l| !l.is_empty())
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 7 {
                return Err(CliError::Parse(format!("expected 7 fields in `{line}`")));
            }
            let positions = if f[5].is_empty() {
                None
            } else {
                Some(
                    f[5].split(';')
                        .map(|q| q.parse().map_err(|_| CliError::Parse(format!("bad position `{q}`"))))
                        .collect::<Result<Vec<usize>, _>>()?,
                )
            };
            Ok(SampleRow {
                index: f[0].parse().map_err(|_| CliError::Parse(format!("bad index `{}`", f[0])))?,
                ggm: num(f[1])?.ok_or_else(|| CliError::Parse("missing G".into()))?,
                lggm1: num(f[2])?,
                lggm12: num(f[3])?,
                global: num(f[4])?,
                global_positions: positions,
                conjecture_holds: match f[6] {
                    "" => None,
                    "1" => Some(true),
                    "0" => Some(false),
                    other => return Err(CliError::Parse(format!("bad conjecture flag `{other}`"))),
                },
            })
        })
        .collect()
}

/// Counts of `a > b`, `a = b`, `a < b` with equality within a tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tally {
    pub count: usize,
    pub greater: usize,
    pub equal: usize,
    pub less: usize,
    pub frac_greater: f64,
    pub frac_equal: f64,
    pub frac_less: f64,
}

impl Tally {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (f64, f64)>, tolerance: f64) -> Self {
        let (mut greater, mut equal, mut less) = (0, 0, 0);
        for (a, b) in pairs {
            if a > b + tolerance {
                greater += 1;
            } else if a < b - tolerance {
                less += 1;
            } else {
                equal += 1;
            }
        }
        let count = greater + equal + less;
        let frac = |k: usize| if count == 0 { 0.0 } else { k as f64 / count as f64 };
        Self {
            count,
            greater,
            equal,
            less,
            frac_greater: frac(greater),
            frac_equal: frac(equal),
            frac_less: frac(less),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignSummary {
    pub family: String,
    pub n_samples: usize,
    pub seed: u64,
    pub equality_tolerance: f64,
    /// `EL1` against `G`.
    pub el1_vs_g: Option<Tally>,
    /// `EL12` against `G`.
    pub el12_vs_g: Option<Tally>,
    /// `EL12` against `EL1`.
    pub el12_vs_el1: Option<Tally>,
    /// `EL12` against `G`, restricted to samples with `EL1 <= G`.
    pub el12_vs_g_where_el1_not_above_g: Option<Tally>,
    /// `EL12` against `EL1`, restricted to samples with `EL1 <= G`.
    pub el12_vs_el1_where_el1_not_above_g: Option<Tally>,
    /// Global single-qubit LGGM against `G`.
    pub global_vs_g: Option<Tally>,
    pub conjecture_violations: Option<usize>,
}

pub fn summarize(family: &str, seed: u64, rows: &[SampleRow], tolerance: f64) -> CampaignSummary {
    let tally = |f: &dyn Fn(&SampleRow) -> Option<(f64, f64)>, keep: &dyn Fn(&SampleRow) -> bool| {
        let pairs: Vec<(f64, f64)> = rows.iter().filter(|r| keep(r)).filter_map(f).collect();
        if rows.iter().any(|r| f(r).is_some()) {
            Some(Tally::from_pairs(pairs, tolerance))
        } else {
            None
        }
    };
    let all = |_: &SampleRow| true;
    let el1_not_above = |r: &SampleRow| r.lggm1.is_some_and(|e| e <= r.ggm + tolerance);
    let el1_g = |r: &SampleRow| r.lggm1.map(|e| (e, r.ggm));
    let el12_g = |r: &SampleRow| r.lggm12.map(|e| (e, r.ggm));
    let el12_el1 = |r: &SampleRow| r.lggm12.zip(r.lggm1);
    let has_both = rows.iter().any(|r| r.lggm1.is_some() && r.lggm12.is_some());
    CampaignSummary {
        family: family.to_string(),
        n_samples: rows.len(),
        seed,
        equality_tolerance: tolerance,
        el1_vs_g: tally(&el1_g, &all),
        el12_vs_g: tally(&el12_g, &all),
        el12_vs_el1: tally(&el12_el1, &all),
        el12_vs_g_where_el1_not_above_g: if has_both { tally(&el12_g, &el1_not_above) } else { None },
        el12_vs_el1_where_el1_not_above_g: if has_both { tally(&el12_el1, &el1_not_above) } else { None },
        global_vs_g: tally(&|r: &SampleRow| r.global.map(|e| (e, r.ggm)), &all),
        conjecture_violations: if rows.iter().any(|r| r.conjecture_holds.is_some()) {
            Some(rows.iter().filter(|r| r.conjecture_holds == Some(false)).count())
        } else {
            None
        },
    }
}
