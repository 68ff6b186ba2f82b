//! Command-line front end: configuration, study dispatch and CSV output.
//!
//! A run is described by flat `key=value` settings, read from an optional
//! config file and overridden by command-line flags:
//!
//! ```text
//! problem=example1
//! alpha=0.25
//! lambda=1
//! M=80
//! study=time-order
//! refine=64,128,256,512
//! output=temporal.csv
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Parser;
use fracburgers::analysis::{
    perturbation_amplification, self_convergence_space, self_convergence_time, spatial_order_study,
    temporal_order_study,
};
use fracburgers::problems;
use fracburgers::report::{final_state_to_csv, report_to_csv, stability_to_csv};
use fracburgers::{solve, ConvergenceReport, ProblemSpec, SolverConfig, StudyOptions};

/// Environment variable holding the worker count for studies.
pub const WORKERS_ENV: &str = "FRACBURGERS_WORKERS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_IO: i32 = 4;

/// Every key accepted in a config file.
pub const KEYS: [&str; 13] = [
    "problem",
    "alpha",
    "mu1",
    "mu2",
    "lambda",
    "M",
    "N",
    "fp_tolerance",
    "max_fp_iterations",
    "output",
    "study",
    "refine",
    "epsilons",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Study {
    Single,
    TimeOrder,
    SpaceOrder,
    SelfTime,
    SelfSpace,
    Stability,
}

impl Study {
    pub const ALL: [Study; 6] = [
        Study::Single,
        Study::TimeOrder,
        Study::SpaceOrder,
        Study::SelfTime,
        Study::SelfSpace,
        Study::Stability,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Study::Single => "single",
            Study::TimeOrder => "time-order",
            Study::SpaceOrder => "space-order",
            Study::SelfTime => "self-time",
            Study::SelfSpace => "self-space",
            Study::Stability => "stability",
        }
    }

    /// Whether the study refines a doubling list.
    pub fn uses_refinement(&self) -> bool {
        !matches!(self, Study::Single | Study::Stability)
    }
}

impl fmt::Display for Study {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Study {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Study::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Study::ALL.iter().map(Study::name).collect();
                format!("unknown study `{s}` (expected one of {})", names.join(", "))
            })
    }
}

/// A fully validated run description.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem: String,
    pub alpha: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub lambda: f64,
    pub m: usize,
    pub n: usize,
    pub fp_tolerance: f64,
    pub max_fp_iterations: usize,
    pub output_path: PathBuf,
    pub study: Study,
    pub refinement_list: Vec<usize>,
    /// Perturbation sizes for the stability study.
    pub epsilons: Vec<f64>,
}

impl RunConfig {
    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            fp_tolerance: self.fp_tolerance,
            max_fp_iterations: self.max_fp_iterations,
            nan_guard: true,
        }
    }

    pub fn build_problem(&self) -> Result<ProblemSpec, ConfigError> {
        problems::build(&self.problem, self.alpha, self.mu1, self.mu2, self.lambda).map_err(|e| {
            let key = match &e {
                fracburgers::Error::Config(msg) if msg.starts_with("unknown problem") => "problem",
                fracburgers::Error::Config(_) => "alpha",
                fracburgers::Error::Domain { name, .. } => config_key(name),
                _ => "problem",
            };
            ConfigError::new(key, e.to_string())
        })
    }

    /// Metadata lines shared by every CSV this run writes.
    fn metadata(&self) -> Vec<(&'static str, String)> {
        vec![
            ("problem", self.problem.clone()),
            ("alpha", self.alpha.to_string()),
            ("mu1", self.mu1.to_string()),
            ("mu2", self.mu2.to_string()),
            ("lambda", self.lambda.to_string()),
            ("M", self.m.to_string()),
            ("N", self.n.to_string()),
            ("study", self.study.to_string()),
        ]
    }
}

fn config_key(param: &str) -> &'static str {
    match param {
        "alpha" => "alpha",
        "lambda" => "lambda",
        "mu1/mu2" => "mu1",
        "fp_tolerance" => "fp_tolerance",
        "max_fp_iterations" => "max_fp_iterations",
        "refine" => "refine",
        _ => "problem",
    }
}

/// A rejected setting; `key` names the offending entry.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub key: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(key: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            key: key.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid `{}`: {}", self.key, self.message)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug)]
pub enum CliError {
    /// `--help` or `--version` was requested; carries the text to print.
    Help(String),
    Config(ConfigError),
    Solver(fracburgers::Error),
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Help(_) => EXIT_OK,
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Solver(e) if e.is_solver_failure() => EXIT_SOLVER,
            CliError::Solver(_) => EXIT_CONFIG,
            CliError::Io { .. } => EXIT_IO,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Help(text) => f.write_str(text),
            CliError::Config(e) => write!(f, "{e}"),
            CliError::Solver(e) => write!(f, "{e}"),
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
        }
    }
}

impl std::error::Error for CliError {}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<fracburgers::Error> for CliError {
    fn from(e: fracburgers::Error) -> Self {
        CliError::Solver(e)
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "fracburgers",
    allow_negative_numbers = true,
    about = "Compact difference solver for the mixed-type time-fractional Burgers equation"
)]
struct Flags {
    /// Flat key=value config file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// example1 | example2 | example3
    #[arg(long)]
    problem: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    mu1: Option<String>,
    #[arg(long)]
    mu2: Option<String>,
    #[arg(long)]
    lambda: Option<String>,
    /// Space subdivisions.
    #[arg(long = "M")]
    m: Option<String>,
    /// Time steps.
    #[arg(long = "N")]
    n: Option<String>,
    #[arg(long = "fp-tolerance")]
    fp_tolerance: Option<String>,
    #[arg(long = "max-fp-iterations")]
    max_fp_iterations: Option<String>,
    /// CSV output path.
    #[arg(long)]
    output: Option<String>,
    /// single | time-order | space-order | self-time | self-space | stability
    #[arg(long)]
    study: Option<String>,
    /// Comma-separated doubling list of N (time studies) or M (space studies).
    #[arg(long)]
    refine: Option<String>,
    /// Comma-separated perturbation sizes for the stability study.
    #[arg(long)]
    epsilons: Option<String>,
}

impl Flags {
    fn entries(self) -> Vec<(&'static str, String)> {
        [
            ("problem", self.problem),
            ("alpha", self.alpha),
            ("mu1", self.mu1),
            ("mu2", self.mu2),
            ("lambda", self.lambda),
            ("M", self.m),
            ("N", self.n),
            ("fp_tolerance", self.fp_tolerance),
            ("max_fp_iterations", self.max_fp_iterations),
            ("output", self.output),
            ("study", self.study),
            ("refine", self.refine),
            ("epsilons", self.epsilons),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.map(|v| (k, v)))
        .collect()
    }
}

/// Parses the flat `key=value` format. Blank lines and `#` comments are skipped;
/// `-` in keys is read as `_`.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut map = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            ConfigError::new(line, format!("line {}: expected key=value", lineno + 1))
        })?;
        let key = k.trim().replace('-', "_");
        if !KEYS.contains(&key.as_str()) {
            return Err(ConfigError::new(key, "unknown key"));
        }
        map.insert(key, v.trim().to_string());
    }
    Ok(map)
}

/// Builds a [`RunConfig`] from command-line arguments (including the program
/// name in `args[0]`).
pub fn parse_config<I, T>(args: I) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let flags = Flags::try_parse_from(args).map_err(|e| {
        use clap::error::ErrorKind;
        if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
            return CliError::Help(e.to_string());
        }
        let key = e
            .get(clap::error::ContextKind::InvalidArg)
            .map(|v| v.to_string())
            .unwrap_or_else(|| "arguments".into());
        let text = e.to_string();
        let first = text.lines().next().unwrap_or_default();
        ConfigError::new(key, first.trim_start_matches("error: ")).into()
    })?;
    let mut map = match &flags.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            parse_config_text(&text)?
        }
        None => BTreeMap::new(),
    };
    for (k, v) in flags.entries() {
        map.insert(k.to_string(), v);
    }
    Ok(config_from_map(&map)?)
}

fn field<T: FromStr>(
    map: &BTreeMap<String, String>,
    key: &str,
    default: T,
) -> Result<T, ConfigError> {
    match map.get(key) {
        None => Ok(default),
        Some(s) => s
            .parse()
            .map_err(|_| ConfigError::new(key, format!("cannot parse `{s}`"))),
    }
}

fn list<T: FromStr>(map: &BTreeMap<String, String>, key: &str) -> Result<Vec<T>, ConfigError> {
    match map.get(key) {
        None => Ok(Vec::new()),
        Some(s) => s
            .split(',')
            .map(|p| {
                p.trim()
                    .parse()
                    .map_err(|_| ConfigError::new(key, format!("cannot parse list entry `{p}`")))
            })
            .collect(),
    }
}

/// Validates a key/value map (keys as in [`KEYS`]) into a [`RunConfig`].
pub fn config_from_map(map: &BTreeMap<String, String>) -> Result<RunConfig, ConfigError> {
    if let Some(k) = map.keys().find(|k| !KEYS.contains(&k.as_str())) {
        return Err(ConfigError::new(k.clone(), "unknown key"));
    }
    let study: Study = match map.get("study") {
        None => Study::Single,
        Some(s) => s.parse().map_err(|e| ConfigError::new("study", e))?,
    };
    let problem: String = field(map, "problem", "example1".to_string())?;
    let default_output = format!("{problem}-{study}.csv");
    let config = RunConfig {
        alpha: field(map, "alpha", 0.5)?,
        mu1: field(map, "mu1", 1.0)?,
        mu2: field(map, "mu2", 1.0)?,
        lambda: field(map, "lambda", 1.0)?,
        m: field(map, "M", 80)?,
        n: field(map, "N", 64)?,
        fp_tolerance: field(map, "fp_tolerance", SolverConfig::default().fp_tolerance)?,
        max_fp_iterations: field(
            map,
            "max_fp_iterations",
            SolverConfig::default().max_fp_iterations,
        )?,
        output_path: PathBuf::from(field(map, "output", default_output)?),
        refinement_list: list(map, "refine")?,
        epsilons: match map.contains_key("epsilons") {
            true => list(map, "epsilons")?,
            false => vec![1e-6, 1e-7],
        },
        problem,
        study,
    };
    validate(&config)?;
    Ok(config)
}

fn validate(c: &RunConfig) -> Result<(), ConfigError> {
    if !problems::KEYS.contains(&c.problem.as_str()) {
        return Err(ConfigError::new(
            "problem",
            format!(
                "unknown problem `{}` (known: {})",
                c.problem,
                problems::KEYS.join(", ")
            ),
        ));
    }
    if !(c.alpha > 0.0 && c.alpha < 1.0) {
        return Err(ConfigError::new(
            "alpha",
            format!("must lie in (0, 1), got {}", c.alpha),
        ));
    }
    if c.problem == "example2" && c.alpha != problems::EXAMPLE2_ALPHA {
        return Err(ConfigError::new(
            "alpha",
            format!(
                "example2 is defined for alpha = {} only",
                problems::EXAMPLE2_ALPHA
            ),
        ));
    }
    if !(c.mu1 >= 0.0 && c.mu1.is_finite()) {
        return Err(ConfigError::new("mu1", "must be non-negative"));
    }
    if !(c.mu2 >= 0.0 && c.mu2.is_finite()) {
        return Err(ConfigError::new("mu2", "must be non-negative"));
    }
    if c.mu1 == 0.0 && c.mu2 == 0.0 {
        return Err(ConfigError::new("mu1", "mu1 and mu2 cannot both vanish"));
    }
    if !(c.lambda > 0.0 && c.lambda.is_finite()) {
        return Err(ConfigError::new("lambda", "must be positive"));
    }
    if c.m < 2 {
        return Err(ConfigError::new("M", "must be at least 2"));
    }
    if c.n < 1 {
        return Err(ConfigError::new("N", "must be at least 1"));
    }
    if !(c.fp_tolerance > 0.0 && c.fp_tolerance.is_finite()) {
        return Err(ConfigError::new("fp_tolerance", "must be positive"));
    }
    if c.max_fp_iterations == 0 {
        return Err(ConfigError::new("max_fp_iterations", "must be at least 1"));
    }
    if c.study.uses_refinement() {
        if c.refinement_list.is_empty() {
            return Err(ConfigError::new(
                "refine",
                format!("required by study {}", c.study),
            ));
        }
        fracburgers::analysis::check_doubling(&c.refinement_list).map_err(|e| match e {
            fracburgers::Error::Domain { reason, .. } => ConfigError::new("refine", reason),
            other => ConfigError::new("refine", other.to_string()),
        })?;
        let min = match c.study {
            Study::SpaceOrder | Study::SelfSpace => 2,
            _ => 1,
        };
        if c.refinement_list[0] < min {
            return Err(ConfigError::new(
                "refine",
                format!("entries must be at least {min}"),
            ));
        }
    }
    if c.study == Study::Stability
        && (c.epsilons.is_empty() || c.epsilons.iter().any(|e| !(*e > 0.0 && e.is_finite())))
    {
        return Err(ConfigError::new(
            "epsilons",
            "needs positive perturbation sizes",
        ));
    }
    Ok(())
}

/// Worker count from [`WORKERS_ENV`]; 1 when unset.
pub fn workers_from_env() -> Result<usize, ConfigError> {
    match std::env::var(WORKERS_ENV) {
        Err(_) => Ok(1),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(w) if w >= 1 => Ok(w),
            _ => Err(ConfigError::new(
                WORKERS_ENV,
                format!("expected a positive integer, got `{s}`"),
            )),
        },
    }
}

/// What a run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    /// CSV text, as written to `config.output_path`.
    pub csv: String,
    /// Human-readable table mirroring the CSV.
    pub table: String,
    pub report: Option<ConvergenceReport>,
}

/// Executes the configured study without touching the filesystem.
pub fn execute(config: &RunConfig, workers: usize) -> Result<RunOutput, CliError> {
    let problem = config.build_problem()?;
    let options = StudyOptions {
        solver: config.solver_config(),
        workers,
    };
    let list = &config.refinement_list;
    let report = match config.study {
        Study::Single => return single(config, &problem),
        Study::Stability => return stability(config, &problem),
        Study::TimeOrder => temporal_order_study(&problem, config.m, list, options)?,
        Study::SpaceOrder => spatial_order_study(&problem, config.n, list, options)?,
        Study::SelfTime => self_convergence_time(&problem, config.m, list, options)?,
        Study::SelfSpace => self_convergence_space(&problem, config.n, list, options)?,
    };
    Ok(RunOutput {
        csv: report_to_csv(&report),
        table: report.to_string(),
        report: Some(report),
    })
}

fn single(config: &RunConfig, problem: &ProblemSpec) -> Result<RunOutput, CliError> {
    let r = solve(
        problem,
        problem.grid(config.m)?,
        problem.time_mesh(config.n)?,
        config.solver_config(),
        false,
    )?;
    let mut meta = config.metadata();
    if let Some(e) = r.max_error {
        meta.push(("E_inf", fracburgers::report::format_float(e)));
    }
    let csv = final_state_to_csv(&meta, &r.final_u, &r.final_w);
    let mut table = format!(
        "{} alpha={} M={} N={} sweeps={}\n",
        config.problem,
        config.alpha,
        config.m,
        config.n,
        r.iteration_counts.iter().sum::<usize>()
    );
    if let Some(e) = r.max_error {
        table.push_str(&format!("E_inf = {e:.4e}\n"));
    }
    table.push_str(&format!(
        "{:>10}  {:>14}  {:>14}\n",
        "x", "u_final", "w_final"
    ));
    for (i, x) in r.final_u.grid().nodes().enumerate() {
        table.push_str(&format!(
            "{x:>10.6}  {:>14.6e}  {:>14.6e}\n",
            r.final_u[i], r.final_w[i]
        ));
    }
    Ok(RunOutput {
        csv,
        table,
        report: None,
    })
}

fn stability(config: &RunConfig, problem: &ProblemSpec) -> Result<RunOutput, CliError> {
    let grid = problem.grid(config.m)?;
    let tmesh = problem.time_mesh(config.n)?;
    let rows = config
        .epsilons
        .iter()
        .map(|&eps| {
            perturbation_amplification(problem, grid, tmesh, eps, config.solver_config())
                .map(|a| (eps, a))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut table = format!("{:>12}  {:>14}\n", "epsilon", "amplification");
    for (e, a) in &rows {
        table.push_str(&format!("{e:>12.3e}  {a:>14.6e}\n"));
    }
    Ok(RunOutput {
        csv: stability_to_csv(&config.metadata(), &rows),
        table,
        report: None,
    })
}

/// Executes the study, writes the CSV and returns the output.
pub fn run(config: &RunConfig) -> Result<RunOutput, CliError> {
    let out = execute(config, workers_from_env()?)?;
    write_output(&config.output_path, &out.csv)?;
    Ok(out)
}

fn write_output(path: &Path, csv: &str) -> Result<(), CliError> {
    std::fs::write(path, csv).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Entry point shared by the binary: parse, run, print, map to an exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let config = match parse_config(args) {
        Ok(c) => c,
        Err(CliError::Help(text)) => {
            print!("{text}");
            return EXIT_OK;
        }
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    match run(&config) {
        Ok(out) => {
            print!("{}", out.table);
            println!("wrote {}", config.output_path.display());
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn study_names_round_trip() {
        for st in Study::ALL {
            assert_eq!(st.name().parse::<Study>().unwrap(), st);
        }
        assert!("order".parse::<Study>().is_err());
        assert!(!Study::Single.uses_refinement() && !Study::Stability.uses_refinement());
        assert!(Study::SelfTime.uses_refinement());
    }

    #[test]
    fn config_text_skips_comments_and_blank_lines() {
        let map = parse_config_text("# header\n\n  alpha = 0.25 \nmax-fp-iterations=7\n").unwrap();
        assert_eq!(map.len(), 2);
        assert_eq!(map["alpha"], "0.25");
        assert_eq!(map["max_fp_iterations"], "7");
    }

    #[test]
    fn defaults_and_default_output_name() {
        let c = config_from_map(&BTreeMap::new()).unwrap();
        assert_eq!(c.problem, "example1");
        assert_eq!(c.study, Study::Single);
        assert_eq!(c.output_path, PathBuf::from("example1-single.csv"));
        assert_eq!(c.epsilons, vec![1e-6, 1e-7]);
        assert_eq!(c.solver_config(), SolverConfig::default());
    }

    #[test]
    fn exit_code_classes() {
        let cfg = CliError::Config(ConfigError::new("alpha", "bad"));
        assert_eq!(cfg.exit_code(), EXIT_CONFIG);
        assert_eq!(cfg.to_string(), "invalid `alpha`: bad");
        let blowup = CliError::Solver(fracburgers::Error::Blowup {
            step: 1,
            iteration: 1,
        });
        assert_eq!(blowup.exit_code(), EXIT_SOLVER);
        let missing = CliError::Solver(fracburgers::Error::MissingExact("example3".into()));
        assert_eq!(missing.exit_code(), EXIT_CONFIG);
        assert_eq!(CliError::Help(String::new()).exit_code(), EXIT_OK);
    }
}
