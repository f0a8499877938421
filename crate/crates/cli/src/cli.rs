//! Argument definitions and the three subcommands.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lggm_core::qstate::PairAdvantageExample;
use lggm_core::spin::{
    locate_extremum, sweep, ExtremumKind, Measure, Sector, Series, SpinModelSpec, SweepParameter, SweepResult,
    SweepSpec,
};
use lggm_core::{build, ggm, global_lggm, lggm, CutPolicy, OptimizerSettings, PureState, StateSpec, C64};
use serde::Serialize;
use serde_json::json;

use crate::campaign::{run_campaign, summarize, write_csv, CampaignMeasures, CampaignSpec, Family};
use crate::error::CliError;
use crate::format::{opt9, sig9};
use crate::io::{read_state, write_state};

#[derive(Debug, Parser)]
#[command(name = "lggm", version, about = "GGM and localizable GGM of multiqubit pure states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate measures for a named or file-loaded state.
    Measure(MeasureArgs),
    /// Sample a state family and tally the measures.
    Campaign(CampaignArgs),
    /// Ground-state sweep of a spin chain.
    Spin(SpinArgs),
}

#[derive(Debug, Clone, Args)]
pub struct OptimizerArgs {
    /// Grid points per angle for the initial search.
    #[arg(long, default_value_t = 24)]
    pub grid: usize,
    /// Nelder-Mead iteration cap.
    #[arg(long, default_value_t = 200)]
    pub refine_iterations: usize,
    #[arg(long, default_value_t = 1e-7)]
    pub refine_tolerance: f64,
    /// Do not prefer the computational basis on ties.
    #[arg(long)]
    pub no_computational_basis: bool,
}

impl OptimizerArgs {
    pub fn settings(&self) -> OptimizerSettings {
        OptimizerSettings {
            grid_points_per_angle: self.grid,
            refine_iterations: self.refine_iterations,
            refine_tolerance: self.refine_tolerance,
            include_computational_basis: !self.no_computational_basis,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StateName {
    Ghz,
    W,
    Dicke,
    Gghz,
    Haar,
    Product,
    /// One of the parameter-free four-qubit classes; `--k` picks 7, 8 or 9.
    Fourq,
    Pair4,
    Pair5,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MeasureKind {
    Ggm,
    Lggm,
    Global,
}

#[derive(Debug, Args)]
pub struct MeasureArgs {
    #[arg(long, value_enum, conflicts_with = "state_file", required_unless_present = "state_file")]
    pub state: Option<StateName>,
    /// JSON state file: {"n_qubits": N, "amplitudes": [[re, im], ...]}.
    #[arg(long)]
    pub state_file: Option<PathBuf>,
    /// Number of qubits.
    #[arg(long)]
    pub n: Option<usize>,
    /// Excitations (dicke) or class index (fourq).
    #[arg(long)]
    pub k: Option<usize>,
    /// Smaller branch weight |a2|^2 (gghz) or the parameter a (pair4, pair5).
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "ggm")]
    pub measure: Vec<MeasureKind>,
    /// Measured qubits for `lggm`, 1-based.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub positions: Vec<usize>,
    /// Number of measured qubits for `global`.
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    /// Only consider cuts of at most this many qubits.
    #[arg(long, conflicts_with = "cuts")]
    pub max_cut_size: Option<usize>,
    /// Explicit cuts, e.g. `1;2,3` for {1} and {2,3}.
    #[arg(long)]
    pub cuts: Option<String>,
    #[command(flatten)]
    pub optimizer: OptimizerArgs,
    /// Print JSON instead of text.
    #[arg(long)]
    pub json: bool,
    /// Write the state to this file.
    #[arg(long)]
    pub save_state: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CampaignArgs {
    /// haar, gghz, gw, dicke-sup, wclass or ghz-class.
    #[arg(long)]
    pub family: String,
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[arg(long, default_value_t = 10_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Comma-separated: G, EL1, EL12, global, conjecture.
    #[arg(long, default_value = "G,EL1")]
    pub measures: String,
    /// Values closer than this count as equal.
    #[arg(long, default_value_t = 1e-4)]
    pub tolerance: f64,
    #[arg(long)]
    pub max_cut_size: Option<usize>,
    #[command(flatten)]
    pub optimizer: OptimizerArgs,
    /// Per-sample CSV (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Summary JSON (default: stderr).
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelName {
    Ising,
    Xxz,
}

#[derive(Debug, Args)]
pub struct SpinArgs {
    #[arg(long, value_enum)]
    pub model: ModelName,
    #[arg(long)]
    pub n: usize,
    /// `J/h` (Ising) or `h/J` (XXZ): a value or a range `start:stop:step`.
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<String>,
    /// XXZ anisotropy: a value or a range `start:stop:step`.
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<String>,
    /// Fixed XXZ field `h/J`; same as a scalar `--lambda`.
    #[arg(long, conflicts_with = "lambda", allow_hyphen_values = true)]
    pub field: Option<f64>,
    /// Comma-separated: G, EL1, EL12.
    #[arg(long, default_value = "G,EL1,EL12")]
    pub measures: String,
    #[arg(long, default_value_t = 2)]
    pub max_cut_size: usize,
    #[command(flatten)]
    pub optimizer: OptimizerArgs,
    /// Grid points per angle for the two-qubit LGGM.
    #[arg(long, default_value_t = 24)]
    pub pair_grid: usize,
    /// Sweep CSV (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Extremum report JSON (default: stderr).
    #[arg(long)]
    pub report: Option<PathBuf>,
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Measure(args) => cmd_measure(&args, &mut io::stdout().lock()),
        Command::Campaign(args) => cmd_campaign(&args),
        Command::Spin(args) => cmd_spin(&args),
    }
}

fn io_err(e: io::Error) -> CliError {
    CliError::Io(e.to_string())
}

fn need<T: Copy>(value: Option<T>, flag: &str, state: StateName) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Usage(format!("--{flag} is required for --state {state:?}").to_lowercase()))
}

pub fn named_state(args: &MeasureArgs, name: StateName) -> Result<PureState, CliError> {
    let half = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let spec = match name {
        StateName::Ghz => StateSpec::Gghz { n_qubits: need(args.n, "n", name)?, a1: half, a2: half },
        StateName::W => StateSpec::Dicke { n_qubits: need(args.n, "n", name)?, excitations: 1 },
        StateName::Dicke => StateSpec::Dicke { n_qubits: need(args.n, "n", name)?, excitations: need(args.k, "k", name)? },
        StateName::Gghz => {
            let w = need(args.a, "a", name)?;
            if !(0.0..=1.0).contains(&w) {
                return Err(CliError::Usage(format!("--a {w} must lie in [0, 1]")));
            }
            StateSpec::Gghz {
                n_qubits: need(args.n, "n", name)?,
                a1: C64::new((1.0 - w).sqrt(), 0.0),
                a2: C64::new(w.sqrt(), 0.0),
            }
        }
        StateName::Haar => StateSpec::Haar { n_qubits: need(args.n, "n", name)?, seed: args.seed },
        StateName::Product => {
            return Ok(PureState::basis(need(args.n, "n", name)?, 0)?);
        }
        StateName::Fourq => {
            let k = need(args.k, "k", name)?;
            if !(7..=9).contains(&k) {
                return Err(CliError::Usage(format!("--k {k}: only classes 7, 8 and 9 are parameter-free")));
            }
            StateSpec::FourQubitClass { index: k as u8, params: [C64::new(0.0, 0.0); 4] }
        }
        StateName::Pair4 => StateSpec::PairAdvantage { which: PairAdvantageExample::FourQubit, a: need(args.a, "a", name)? },
        StateName::Pair5 => StateSpec::PairAdvantage { which: PairAdvantageExample::FiveQubit, a: need(args.a, "a", name)? },
    };
    Ok(build(&spec)?)
}

pub fn parse_cuts(text: &str) -> Result<Vec<Vec<usize>>, CliError> {
    text.split(';')
        .map(|cut| {
            cut.split(',')
                .map(|q| q.trim().parse::<usize>().map_err(|_| CliError::Usage(format!("bad qubit `{q}` in --cuts"))))
                .collect()
        })
        .collect()
}

fn policy(max_cut_size: Option<usize>, cuts: Option<&str>) -> Result<CutPolicy, CliError> {
    Ok(match (max_cut_size, cuts) {
        (_, Some(c)) => CutPolicy::ExplicitCuts(parse_cuts(c)?),
        (Some(k), None) => CutPolicy::MaxCutSize(k),
        (None, None) => CutPolicy::AllCuts,
    })
}

fn angles_text(angles: &[(f64, f64)]) -> String {
    angles.iter().map(|(t, p)| format!("{}:{}", sig9(*t), sig9(*p))).collect::<Vec<_>>().join(",")
}

fn positions_text(p: &[usize]) -> String {
    p.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(",")
}

pub fn cmd_measure<W: Write>(args: &MeasureArgs, out: &mut W) -> Result<(), CliError> {
    let state = match (&args.state_file, args.state) {
        (Some(path), _) => read_state(path)?,
        (None, Some(name)) => named_state(args, name)?,
        (None, None) => return Err(CliError::Usage("give --state or --state-file".into())),
    };
    if let Some(path) = &args.save_state {
        write_state(path, &state)?;
    }
    let policy = policy(args.max_cut_size, args.cuts.as_deref())?;
    let settings = args.optimizer.settings();
    let mut report = serde_json::Map::new();
    report.insert("n_qubits".into(), json!(state.n_qubits()));
    let mut lines = Vec::new();
    for kind in &args.measure {
        match kind {
            MeasureKind::Ggm => {
                let g = ggm(&state, &policy)?;
                lines.push(format!("G\t{}", sig9(g.value)));
                lines.push(format!("cut\t{}", positions_text(&g.argmax_cut)));
                report.insert("G".into(), json!(g.value));
                report.insert("cut".into(), json!(g.argmax_cut));
            }
            MeasureKind::Lggm => {
                let r = lggm(&state, &args.positions, &settings, &policy)?;
                let key = format!("EL{{{}}}", positions_text(&r.positions));
                lines.push(format!("{key}\t{}\tangles\t{}", sig9(r.value), angles_text(&r.optimal_angles)));
                report.insert(
                    "lggm".into(),
                    json!({"positions": r.positions, "value": r.value, "angles": r.optimal_angles,
                           "outcomes": r.per_outcome}),
                );
            }
            MeasureKind::Global => {
                let r = global_lggm(&state, args.m, &settings, &policy)?;
                lines.push(format!(
                    "EGL(m={})\t{}\tpositions\t{}\tangles\t{}",
                    args.m,
                    sig9(r.best.value),
                    positions_text(&r.best.positions),
                    angles_text(&r.best.optimal_angles)
                ));
                let per_set: Vec<_> =
                    r.per_position_set.values().map(|v| json!({"positions": v.positions, "value": v.value})).collect();
                report.insert(
                    "global".into(),
                    json!({"m": args.m, "value": r.best.value, "positions": r.best.positions,
                           "angles": r.best.optimal_angles, "symmetric_shortcut": r.symmetric_shortcut,
                           "per_position_set": per_set}),
                );
            }
        }
    }
    if args.json {
        serde_json::to_writer_pretty(&mut *out, &report).map_err(|e| CliError::Io(e.to_string()))?;
        writeln!(out).map_err(io_err)?;
    } else {
        for line in lines {
            writeln!(out, "{line}").map_err(io_err)?;
        }
    }
    Ok(())
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn side_output(path: &Option<PathBuf>, value: &impl Serialize) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    match path {
        Some(p) => std::fs::write(p, text + "\n").map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => writeln!(io::stderr(), "{text}").map_err(io_err),
    }
}

pub fn cmd_campaign(args: &CampaignArgs) -> Result<(), CliError> {
    let family = Family::parse(&args.family, args.n)?;
    let measures: CampaignMeasures = args.measures.parse()?;
    let mut spec = CampaignSpec::new(family, args.samples, args.seed, measures);
    spec.equality_tolerance = args.tolerance;
    spec.optimizer = args.optimizer.settings();
    spec.policy = policy(args.max_cut_size, None)?;
    let rows = run_campaign(&spec)?;
    let mut out = output(&args.out)?;
    write_csv(&rows, &mut out).map_err(io_err)?;
    out.flush().map_err(io_err)?;
    let summary = summarize(&family.to_string(), args.seed, &rows, args.tolerance);
    side_output(&args.summary, &summary)
}

/// A scalar, or `start:stop:step` expanded to an inclusive grid.
#[derive(Debug, Clone, PartialEq)]
pub enum Range {
    Value(f64),
    Grid(Vec<f64>),
}

pub fn parse_range(text: &str) -> Result<Range, CliError> {
    let bad = || CliError::Usage(format!("`{text}` is neither a number nor start:stop:step"));
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [v] => v.trim().parse().map(Range::Value).map_err(|_| bad()),
        [a, b, s] => {
            let a: f64 = a.trim().parse().map_err(|_| bad())?;
            let b: f64 = b.trim().parse().map_err(|_| bad())?;
            let s: f64 = s.trim().parse().map_err(|_| bad())?;
            if !(s > 0.0) || !a.is_finite() || !b.is_finite() {
                return Err(bad());
            }
            if b < a {
                return Err(CliError::Usage(format!("empty grid `{text}`")));
            }
            let n = ((b - a) / s + 1e-9).floor() as usize;
            // Round off accumulated drift so grid points print as typed.
            Ok(Range::Grid((0..=n).map(|i| ((a + s * i as f64) * 1e12).round() / 1e12).collect()))
        }
        _ => Err(bad()),
    }
}

fn spin_measures(text: &str) -> Result<Vec<Measure>, CliError> {
    let mut out = Vec::new();
    for item in text.split(',').map(str::trim).filter(|x| !x.is_empty()) {
        out.push(match item.to_ascii_lowercase().as_str() {
            "g" | "ggm" => Measure::Ggm,
            "el1" => Measure::Lggm1,
            "el12" => Measure::Lggm12,
            other => return Err(CliError::Usage(format!("unknown spin measure `{other}`"))),
        });
    }
    Ok(out)
}

pub fn spin_spec(args: &SpinArgs) -> Result<SweepSpec, CliError> {
    let lambda = match (&args.lambda, args.field) {
        (Some(t), _) => Some(parse_range(t)?),
        (None, Some(h)) => Some(Range::Value(h)),
        (None, None) => None,
    };
    let delta = args.delta.as_deref().map(parse_range).transpose()?;
    let (model, parameter, grid) = match args.model {
        ModelName::Ising => {
            if delta.is_some() {
                return Err(CliError::Usage("the Ising chain takes no --delta".into()));
            }
            match lambda {
                Some(Range::Grid(g)) => (SpinModelSpec::ising(args.n, 1.0), SweepParameter::Lambda, g),
                _ => return Err(CliError::Usage("give --lambda as start:stop:step".into())),
            }
        }
        ModelName::Xxz => match (lambda, delta) {
            (Some(Range::Grid(g)), Some(Range::Value(d))) => {
                (SpinModelSpec::xxz(args.n, d, 0.0), SweepParameter::Lambda, g)
            }
            (lambda, Some(Range::Grid(g))) => {
                let l = match lambda {
                    None => 0.0,
                    Some(Range::Value(l)) => l,
                    Some(Range::Grid(_)) => return Err(CliError::Usage("sweep only one of --lambda, --delta".into())),
                };
                (SpinModelSpec::xxz(args.n, 0.0, l), SweepParameter::Delta, g)
            }
            _ => {
                return Err(CliError::Usage(
                    "XXZ needs one range (--lambda or --delta) and a value for the other".into(),
                ))
            }
        },
    };
    let mut spec = SweepSpec::new(model, parameter, grid);
    spec.measures = spin_measures(&args.measures)?;
    spec.policy = CutPolicy::MaxCutSize(args.max_cut_size);
    spec.optimizer = args.optimizer.settings();
    spec.pair_optimizer = OptimizerSettings { grid_points_per_angle: args.pair_grid, ..args.optimizer.settings() };
    Ok(spec)
}

pub const SPIN_CSV_HEADER: &str = "param,energy,G,EL1,EL12,dG,dEL1,dEL12";

pub fn write_sweep_csv<W: Write>(result: &SweepResult, mut out: W) -> io::Result<()> {
    writeln!(out, "{SPIN_CSV_HEADER}")?;
    let deriv = |s: Series| result.derivative(s);
    let (dg, d1, d12) = (deriv(Series::Ggm), deriv(Series::Lggm1), deriv(Series::Lggm12));
    let last = result.points.len().saturating_sub(1);
    for (i, p) in result.points.iter().enumerate() {
        let at = |d: &Option<Vec<f64>>| if i == 0 || i == last { None } else { d.as_ref().map(|v| v[i - 1]) };
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            sig9(p.parameter),
            sig9(p.energy),
            opt9(p.ggm),
            opt9(p.lggm1),
            opt9(p.lggm12),
            opt9(at(&dg)),
            opt9(at(&d1)),
            opt9(at(&d12))
        )?;
    }
    Ok(())
}

fn sector_label(s: Sector, n: usize) -> String {
    match s {
        Sector::Full => "full".into(),
        Sector::Parity(p) => format!("parity {}", if p == 0 { "even" } else { "odd" }),
        Sector::Magnetization(_) => format!("Sz={}", s.total_sz(n).unwrap_or(0.0)),
    }
}

pub fn sweep_report(spec: &SweepSpec, result: &SweepResult) -> serde_json::Value {
    let n = spec.model.n_sites;
    let mut extrema = Vec::new();
    for (series, name) in [(Series::Ggm, "G"), (Series::Lggm1, "EL1"), (Series::Lggm12, "EL12")] {
        if result.series(series).is_none() {
            continue;
        }
        for (kind, kind_name) in
            [(ExtremumKind::Max, "max_derivative"), (ExtremumKind::Min, "min"), (ExtremumKind::Cusp, "cusp")]
        {
            let entry = match locate_extremum(result, series, kind) {
                Ok(e) => json!({"series": name, "kind": kind_name, "parameter": e.parameter,
                                "index": e.index, "sharpness": e.sharpness}),
                Err(e) => json!({"series": name, "kind": kind_name, "error": e.to_string()}),
            };
            extrema.push(entry);
        }
    }
    let sector_changes: Vec<f64> = result
        .points
        .windows(2)
        .filter(|w| w[0].sector != w[1].sector)
        .map(|w| 0.5 * (w[0].parameter + w[1].parameter))
        .collect();
    let points: Vec<_> = result
        .points
        .iter()
        .map(|p| json!({"param": p.parameter, "sector": sector_label(p.sector, n), "degenerate": p.degenerate}))
        .collect();
    json!({
        "parameter": match spec.parameter { SweepParameter::Lambda => "lambda", SweepParameter::Delta => "delta" },
        "n_sites": n,
        "extrema": extrema,
        "sector_changes": sector_changes,
        "points": points,
    })
}

pub fn cmd_spin(args: &SpinArgs) -> Result<(), CliError> {
    let spec = spin_spec(args)?;
    let result = sweep(&spec)?;
    let mut out = output(&args.out)?;
    write_sweep_csv(&result, &mut out).map_err(io_err)?;
    out.flush().map_err(io_err)?;
    side_output(&args.report, &sweep_report(&spec, &result))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("0.5").unwrap(), Range::Value(0.5));
        assert_eq!(parse_range("-1.2:-0.8:0.1").unwrap(), Range::Grid(vec![-1.2, -1.1, -1.0, -0.9, -0.8]));
        assert_eq!(parse_range("0:1:0.25").unwrap(), Range::Grid(vec![0.0, 0.25, 0.5, 0.75, 1.0]));
        assert!(matches!(parse_range("1:0:0.1"), Err(CliError::Usage(_))));
        assert!(matches!(parse_range("0:1:0"), Err(CliError::Usage(_))));
        assert!(matches!(parse_range("x"), Err(CliError::Usage(_))));
    }

    #[test]
    fn cuts() {
        assert_eq!(parse_cuts("1;2,3").unwrap(), vec![vec![1], vec![2, 3]]);
        assert!(parse_cuts("1;a").is_err());
    }
}
