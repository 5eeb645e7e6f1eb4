//! Command-line front end.
//!
//! Settings come from built-in defaults, then an optional `--config` TOML
//! file, then command-line flags, each overriding the last. Every CSV and
//! JSON artifact carries a hash of the effective settings.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::diagnostics::{self, trace_csv};
use crate::dynamics::Subspace;
use crate::error::{Error, Result};
use crate::fixtures;
use crate::pauli::CommuteMode;
use crate::schedule::{Profile, Schedule};
use crate::vanqver::{
    self, Bracket, Mode, OptimizeConfig, Problem, RunRecord, SweepVariable, VariationalParams,
    SWEEP_CSV_HEADER,
};

pub const RESULTS_DIR_ENV: &str = "VANQVER_RESULTS_DIR";
const DEFAULT_RESULTS_DIR: &str = "vanqver-results";

#[derive(Debug, Parser)]
#[command(
    name = "vanqver",
    version,
    about = "Variational adiabatic quantum eigensolver simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Optimise (or run the standard anneal) at one annealing time.
    Run(RunArgs),
    /// Search for the time to chemical accuracy.
    Tca(TcaArgs),
    /// Run a grid of annealing times, P4 separations or tolerances.
    Sweep(SweepArgs),
    /// Gap, overlap and adiabatic-bound traces for stored parameters.
    Diagnose(DiagnoseArgs),
    /// Bundled molecular fixtures.
    Fixtures {
        #[command(subcommand)]
        command: FixturesCommand,
    },
}

#[derive(Debug, Subcommand)]
pub enum FixturesCommand {
    List,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Vanqver,
    Standard,
    Both,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SweepVariableArg {
    #[value(name = "T")]
    Time,
    Distance,
    Tolerance,
}

/// Settings shared by every command.
#[derive(Debug, Clone, Args)]
pub struct Common {
    /// TOML file of `key = value` settings.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Bundled fixture name or path to an FCIDUMP file.
    #[arg(long)]
    pub fixture: Option<String>,
    /// Annealing time in inverse Hartree.
    #[arg(long = "T")]
    pub total_time: Option<f64>,
    /// Optimiser termination tolerance.
    #[arg(long = "tol")]
    pub epsilon_tol: Option<f64>,
    /// Fixed number of midpoint steps.
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub max_iterations: Option<usize>,
    /// Navigator amplitude scale.
    #[arg(long)]
    pub alpha: Option<f64>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Write the full run record as JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Print the qubit Hamiltonians and exit.
    #[arg(long)]
    pub dump_hamiltonian: bool,
}

#[derive(Debug, Args)]
pub struct TcaArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum, default_value = "both")]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 0.01)]
    pub lo: f64,
    #[arg(long, default_value_t = 1.0)]
    pub hi: f64,
    /// Bisection stops once hi / lo is at most this.
    #[arg(long, default_value_t = 1.05)]
    pub ratio: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long, value_enum)]
    pub variable: SweepVariableArg,
    /// Comma-separated grid values.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    pub grid: Vec<f64>,
    /// CSV output path (stdout if absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DiagnoseArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 41)]
    pub samples: usize,
    /// Optimise when no stored parameters are found.
    #[arg(long)]
    pub optimize: bool,
    /// List qubit-wise commuting measurement groups of the final Hamiltonian.
    #[arg(long)]
    pub groups: bool,
    /// Directory for the gap, overlap and bound CSV traces.
    #[arg(long)]
    pub plot_data: Option<PathBuf>,
}

/// Keys accepted in a `--config` file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub fixture: Option<String>,
    pub mode: Option<String>,
    #[serde(rename = "T")]
    pub total_time: Option<f64>,
    pub epsilon_tol: Option<f64>,
    pub steps: Option<usize>,
    pub max_iterations: Option<usize>,
    pub alpha: Option<f64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}

/// Fully resolved settings; hashed for provenance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub fixture: String,
    pub mode: String,
    #[serde(rename = "T")]
    pub total_time: f64,
    pub epsilon_tol: f64,
    pub steps: Option<usize>,
    pub max_iterations: usize,
    pub alpha: f64,
    pub extra: Vec<(String, String)>,
}

impl RunConfig {
    fn resolve(command: &str, common: &Common, mode: Option<String>) -> Result<Self> {
        let file = match &common.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        let defaults = OptimizeConfig::default();
        let fixture = common
            .fixture
            .clone()
            .or(file.fixture)
            .ok_or_else(|| Error::Config("no fixture given (use --fixture)".into()))?;
        Ok(RunConfig {
            command: command.to_string(),
            fixture,
            mode: mode.or(file.mode).unwrap_or_else(|| "vanqver".into()),
            total_time: common.total_time.or(file.total_time).unwrap_or(0.1),
            epsilon_tol: common
                .epsilon_tol
                .or(file.epsilon_tol)
                .unwrap_or(defaults.epsilon_tol),
            steps: common.steps.or(file.steps),
            max_iterations: common
                .max_iterations
                .or(file.max_iterations)
                .unwrap_or(defaults.max_iterations),
            alpha: common.alpha.or(file.alpha).unwrap_or(defaults.alpha),
            extra: Vec::new(),
        })
    }

    pub fn optimize_config(&self) -> OptimizeConfig {
        OptimizeConfig {
            epsilon_tol: self.epsilon_tol,
            max_iterations: self.max_iterations,
            steps: self.steps,
            alpha: self.alpha,
            ..Default::default()
        }
    }

    /// First 16 hex digits of the SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        hex::encode(&Sha256::digest(json.as_bytes())[..8])
    }
}

fn mode_name(mode: Option<ModeArg>) -> Option<String> {
    mode.map(|m| {
        match m {
            ModeArg::Vanqver => "vanqver",
            ModeArg::Standard => "standard",
            ModeArg::Both => "both",
        }
        .to_string()
    })
}

fn single_mode(name: &str) -> Result<Mode> {
    name.parse()
}

/// Where converged runs are cached.
pub fn results_dir() -> PathBuf {
    std::env::var_os(RESULTS_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_RESULTS_DIR))
}

fn cache_key(fixture: &str, mode: Mode, total_time: f64, epsilon_tol: f64) -> String {
    let key = format!("{fixture}|{mode}|{total_time:?}|{epsilon_tol:?}");
    hex::encode(&Sha256::digest(key.as_bytes())[..12])
}

fn cache_path(fixture: &str, mode: Mode, total_time: f64, epsilon_tol: f64) -> PathBuf {
    results_dir().join(format!(
        "{}.json",
        cache_key(fixture, mode, total_time, epsilon_tol)
    ))
}

fn store_cached(record: &RunRecord) -> Result<()> {
    let path = cache_path(
        &record.fixture,
        record.mode,
        record.total_time,
        record.epsilon_tol,
    );
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let json = serde_json::to_string_pretty(record)?;
    std::fs::write(&path, json).map_err(|e| Error::io(&path, e))
}

fn load_cached(fixture: &str, mode: Mode, total_time: f64, epsilon_tol: f64) -> Option<RunRecord> {
    let path = cache_path(fixture, mode, total_time, epsilon_tol);
    let text = std::fs::read_to_string(path).ok()?;
    serde_json::from_str(&text).ok()
}

#[derive(Serialize)]
struct Artifact<'a, T: Serialize> {
    config_hash: &'a str,
    config: &'a RunConfig,
    result: &'a T,
}

fn write_json<T: Serialize>(path: &Path, config: &RunConfig, result: &T) -> Result<()> {
    let hash = config.hash();
    let artifact = Artifact {
        config_hash: &hash,
        config,
        result,
    };
    let mut text = serde_json::to_string_pretty(&artifact)?;
    text.push('\n');
    write_file(path, &text)
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn load_problem(fixture: &str) -> Result<Problem> {
    Problem::from_fixture(&fixtures::load_any(fixture)?)
}

fn verdict(record: &RunRecord) -> &'static str {
    if record.chemically_accurate() {
        "YES"
    } else {
        "NO"
    }
}

fn cmd_run(args: RunArgs, out: &mut dyn Write) -> Result<()> {
    let config = RunConfig::resolve("run", &args.common, mode_name(args.mode))?;
    let problem = load_problem(&config.fixture)?;
    if args.dump_hamiltonian {
        writeln!(out, "# final Hamiltonian ({} terms)", problem.h_fin().len()).ok();
        write!(out, "{}", problem.h_fin().to_text()).ok();
        writeln!(out, "# Moller-Plesset initial Hamiltonian").ok();
        write!(out, "{}", problem.h_mp().to_text()).ok();
        return Ok(());
    }
    let mode = single_mode(&config.mode)?;
    let record = vanqver::run_mode(&problem, mode, config.total_time, &config.optimize_config())?;
    eprintln!("wall time: {:.3} s", record.wall_time.as_secs_f64());
    if mode == Mode::Vanqver {
        store_cached(&record)?;
    }
    writeln!(out, "config hash: {}", config.hash()).ok();
    writeln!(out, "fixture: {}", record.fixture).ok();
    writeln!(out, "mode: {}", record.mode).ok();
    writeln!(out, "T: {}", record.total_time).ok();
    writeln!(out, "E_final: {:.10}", record.final_energy).ok();
    writeln!(out, "E_FCI: {:.10}", record.e_fci).ok();
    writeln!(out, "delta_E: {:.3e}", record.delta_e()).ok();
    if mode == Mode::Vanqver {
        writeln!(out, "iterations: {}", record.n_iterations).ok();
        writeln!(out, "converged: {}", record.converged).ok();
    }
    writeln!(out, "chemical accuracy: {}", verdict(&record)).ok();
    if let Some(path) = &args.out {
        write_json(path, &config, &record)?;
    }
    Ok(())
}

fn modes(name: &str) -> Result<Vec<Mode>> {
    if name == "both" {
        Ok(vec![Mode::Vanqver, Mode::Standard])
    } else {
        Ok(vec![single_mode(name)?])
    }
}

fn cmd_tca(args: TcaArgs, out: &mut dyn Write) -> Result<()> {
    let mut config = RunConfig::resolve("tca", &args.common, mode_name(Some(args.mode)))?;
    config.extra = vec![
        ("lo".into(), args.lo.to_string()),
        ("hi".into(), args.hi.to_string()),
        ("ratio".into(), args.ratio.to_string()),
    ];
    let problem = load_problem(&config.fixture)?;
    let bracket = Bracket {
        ratio: args.ratio,
        ..Bracket::new(args.lo, args.hi)
    };
    let mut reports = Vec::new();
    writeln!(out, "config hash: {}", config.hash()).ok();
    writeln!(out, "mode,T_CA,T_fail,evaluations,non_monotonic").ok();
    for mode in modes(&config.mode)? {
        let report =
            vanqver::time_to_chemical_accuracy(&problem, mode, &config.optimize_config(), bracket)?;
        if report.shrunk {
            eprintln!("{mode}: lower bracket already reached chemical accuracy; shrank it");
        }
        if report.expanded {
            eprintln!("{mode}: upper bracket missed chemical accuracy; expanded it");
        }
        writeln!(
            out,
            "{},{},{},{},{}",
            mode,
            report.t_ca,
            report.t_fail,
            report.samples.len(),
            report.non_monotonic
        )
        .ok();
        reports.push(report);
    }
    if let [a, b] = reports.as_slice() {
        writeln!(out, "ratio standard/vanqver: {:.1}", b.t_ca / a.t_ca).ok();
    }
    if let Some(path) = &args.out {
        write_json(path, &config, &reports)?;
    }
    Ok(())
}

fn cmd_sweep(args: SweepArgs, out: &mut dyn Write) -> Result<()> {
    let needs_fixture = !matches!(args.variable, SweepVariableArg::Distance);
    let mut common = args.common.clone();
    if !needs_fixture && common.fixture.is_none() {
        common.fixture = Some("p4".into());
    }
    let mut config = RunConfig::resolve("sweep", &common, mode_name(args.mode))?;
    config.extra = vec![
        ("variable".into(), format!("{:?}", args.variable)),
        (
            "grid".into(),
            args.grid
                .iter()
                .map(f64::to_string)
                .collect::<Vec<_>>()
                .join(","),
        ),
    ];
    let mode = single_mode(&config.mode)?;
    let problem = if needs_fixture && !args.grid.is_empty() {
        Some(load_problem(&config.fixture)?)
    } else {
        None
    };
    let variable = match args.variable {
        SweepVariableArg::Time => SweepVariable::Time(args.grid.clone()),
        SweepVariableArg::Distance => SweepVariable::Distance {
            distances: args.grid.clone(),
            total_time: config.total_time,
        },
        SweepVariableArg::Tolerance => SweepVariable::Tolerance {
            tolerances: args.grid.clone(),
            total_time: config.total_time,
        },
    };
    let rows = vanqver::sweep(
        problem.as_ref(),
        &mut |d| Problem::from_fixture(&fixtures::p4(d)?),
        &variable,
        mode,
        &config.optimize_config(),
    )?;
    let mut csv = format!("# config_hash={}\n{SWEEP_CSV_HEADER}\n", config.hash());
    for row in &rows {
        csv.push_str(&row.csv_line());
        csv.push('\n');
    }
    match &args.out {
        Some(path) => write_file(path, &csv)?,
        None => {
            write!(out, "{csv}").ok();
        }
    }
    if let Some(path) = &args.json {
        write_json(path, &config, &rows)?;
    }
    Ok(())
}

fn cmd_diagnose(args: DiagnoseArgs, out: &mut dyn Write) -> Result<()> {
    let mut config = RunConfig::resolve("diagnose", &args.common, Some("vanqver".into()))?;
    config.extra = vec![("samples".into(), args.samples.to_string())];
    let problem = load_problem(&config.fixture)?;
    let hash = config.hash();
    writeln!(out, "config hash: {hash}").ok();

    if args.groups {
        let grouping = diagnostics::group_commuting(problem.h_fin(), CommuteMode::QubitWise);
        writeln!(
            out,
            "{} terms in {} qubit-wise commuting groups",
            grouping.n_terms(),
            grouping.groups.len()
        )
        .ok();
        write!(out, "{}", grouping.to_text()).ok();
    }

    let t = config.total_time;
    let cached = load_cached(problem.name(), Mode::Vanqver, t, config.epsilon_tol);
    let params: VariationalParams = match cached.and_then(|r| r.final_params) {
        Some(p) => p,
        None if args.optimize => {
            let record = vanqver::optimize(&problem, t, &config.optimize_config())?;
            store_cached(&record)?;
            record
                .final_params
                .expect("vanqver records carry parameters")
        }
        None => {
            eprintln!(
                "warning: no stored parameters for {} at T = {t}, tol = {}; using theta = 0",
                problem.name(),
                config.epsilon_tol
            );
            problem.initial_params()
        }
    };
    let schedule = Schedule::with_alpha(t, config.alpha, Profile::Quadratic)?;
    let spec = problem.anneal_spec(&params, schedule, config.steps)?;
    let mut bare = params.clone();
    bare.theta.values_mut().iter_mut().for_each(|v| *v = 0.0);
    let bare_spec = problem.anneal_spec(&bare, schedule, config.steps)?;
    let psi0 = problem.reference_state()?;
    let sector: &Subspace = problem.sector();

    let gap = diagnostics::gap_trace(&spec, args.samples, sector)?;
    let gap_bare = diagnostics::gap_trace(&bare_spec, args.samples, sector)?;
    let overlap = diagnostics::overlap_trace(&spec, &psi0, args.samples)?;
    let overlap_bare = diagnostics::overlap_trace(&bare_spec, &psi0, args.samples)?;
    let bound = diagnostics::adiabatic_bound(&spec, args.samples, sector)?;

    writeln!(
        out,
        "t,gap,gap_no_navigator,overlap,overlap_no_navigator,bound"
    )
    .ok();
    for k in 0..gap.samples.len() {
        writeln!(
            out,
            "{:.6},{:.8e},{:.8e},{:.10},{:.10},{:.6e}",
            gap.samples[k].0,
            gap.samples[k].1,
            gap_bare.samples[k].1,
            overlap.samples[k].1,
            overlap_bare.samples[k].1,
            bound[k].value
        )
        .ok();
    }
    if let Some(dir) = &args.plot_data {
        let bound_pairs: Vec<(f64, f64)> = bound.iter().map(|b| (b.s, b.value)).collect();
        for (name, samples) in [
            ("gap.csv", &gap.samples),
            ("gap_no_navigator.csv", &gap_bare.samples),
            ("overlap.csv", &overlap.samples),
            ("overlap_no_navigator.csv", &overlap_bare.samples),
            ("adiabatic_bound.csv", &bound_pairs),
        ] {
            write_file(&dir.join(name), &trace_csv(samples, &hash))?;
        }
    }
    Ok(())
}

fn cmd_fixtures(out: &mut dyn Write) -> Result<()> {
    for name in fixtures::list() {
        let f = fixtures::load(name)?;
        writeln!(
            out,
            "{name}\t{} qubits\tE_HF {:.10}\tE_FCI {:.10}\t{}",
            f.n_qubits(),
            f.metadata.hf_energy,
            f.metadata.fci_energy,
            f.metadata.description
        )
        .ok();
    }
    Ok(())
}

/// Exit status for an error: 2 for usage and configuration problems,
/// 1 for failures while running.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_)
        | Error::UnknownFixture(_)
        | Error::Io { .. }
        | Error::Metadata(_)
        | Error::Fcidump { .. } => 2,
        _ => 1,
    }
}

/// Runs a parsed command, writing its report to `out`.
pub fn execute(cli: Cli, out: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Run(a) => cmd_run(a, out),
        Command::Tca(a) => cmd_tca(a, out),
        Command::Sweep(a) => cmd_sweep(a, out),
        Command::Diagnose(a) => cmd_diagnose(a, out),
        Command::Fixtures {
            command: FixturesCommand::List,
        } => cmd_fixtures(out),
    }
}

/// Entry point for the binary; returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            e.print().ok();
            return code;
        }
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match execute(cli, &mut lock) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_precedence_and_hash() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.toml");
        std::fs::write(&path, "fixture = \"h2\"\nT = 0.5\nepsilon_tol = 0.01\n").unwrap();
        let common = Common {
            config: Some(path),
            fixture: None,
            total_time: Some(0.2),
            epsilon_tol: None,
            steps: None,
            max_iterations: None,
            alpha: None,
        };
        let cfg = RunConfig::resolve("run", &common, None).unwrap();
        assert_eq!(cfg.fixture, "h2");
        assert_eq!(cfg.total_time, 0.2);
        assert_eq!(cfg.epsilon_tol, 0.01);
        assert_eq!(cfg.hash(), cfg.clone().hash());
        let mut other = cfg.clone();
        other.total_time = 0.3;
        assert_ne!(cfg.hash(), other.hash());
    }

    #[test]
    fn unknown_config_keys_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.toml");
        std::fs::write(&path, "temperature = 3\n").unwrap();
        assert!(matches!(FileConfig::load(&path), Err(Error::Config(_))));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::UnknownFixture("x".into())), 2);
        assert_eq!(exit_code(&Error::NormDrift { drift: 1.0 }), 1);
    }
}
