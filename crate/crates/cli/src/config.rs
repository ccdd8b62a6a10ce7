//! Run configuration: `key = value` files, `--key value` flags and defaults.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Arg, ArgAction};
use dissipaq_core::classical::Integrator;
use dissipaq_core::quantum::Stencil;
use dissipaq_core::wkb::EscapeConvention;

pub const WORKERS_ENV: &str = "DISSIPAQ_WORKERS";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Classical,
    Spectrum,
    Evolve,
    Tunnel,
    Instanton,
    Compare,
}

impl Command {
    pub const ALL: [Command; 6] = [
        Command::Classical,
        Command::Spectrum,
        Command::Evolve,
        Command::Tunnel,
        Command::Instanton,
        Command::Compare,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Command::Classical => "classical",
            Command::Spectrum => "spectrum",
            Command::Evolve => "evolve",
            Command::Tunnel => "tunnel",
            Command::Instanton => "instanton",
            Command::Compare => "compare",
        }
    }

    /// Commands that always work with the cubic barrier.
    fn barrier_only(self) -> bool {
        matches!(
            self,
            Command::Tunnel | Command::Instanton | Command::Compare
        )
    }
}

impl FromStr for Command {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        Command::ALL
            .into_iter()
            .find(|c| c.tag() == s)
            .ok_or_else(|| ConfigError::new(format!("unknown command `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PotentialKind {
    /// `½ω²x²`.
    Harmonic,
    /// `½ω²x²(1 − x/a)`.
    Cubic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorChoice {
    /// Damped-oscillator operator with ground eigenvalue 0.
    Dsho,
    /// The general operator at `ω₂ = ω₁`, `c = −½ħω₁`.
    Schrodinger,
    General,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Initial {
    /// `(|0⟩ + |1⟩)/√2`.
    Superposition,
    Level(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub omega: f64,
    pub gamma: f64,
    pub a: f64,
    pub hbar: f64,
    pub omega2: Option<f64>,
    pub c: Option<f64>,
    pub potential: PotentialKind,
    pub operator: OperatorChoice,
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
    pub stencil: Stencil,
    pub levels: usize,
    pub initial: Initial,
    pub x0: f64,
    pub p0: f64,
    pub method: Integrator,
    pub step: f64,
    pub horizon: f64,
    pub stride: usize,
    /// `None` runs every convention.
    pub convention: Option<EscapeConvention>,
    pub period: f64,
    pub nodes: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub period_check: bool,
    pub sweep: Option<Vec<f64>>,
    pub workers: usize,
    pub out: PathBuf,
    /// Resolved `key=value` pairs, in key-table order, excluding `out` and
    /// `workers` (neither may change the output).
    echo: Vec<(&'static str, String)>,
}

struct Key {
    name: &'static str,
    default: &'static str,
    help: &'static str,
}

const fn key(name: &'static str, default: &'static str, help: &'static str) -> Key {
    Key {
        name,
        default,
        help,
    }
}

/// Every configuration key. An empty default means "unset".
const KEYS: &[Key] = &[
    key("omega", "1", "oscillator frequency ω"),
    key("gamma", "0.1", "friction γ"),
    key("a", "1", "barrier exit scale a of the cubic potential"),
    key("hbar", "1", "action scale ħ"),
    key(
        "omega2",
        "",
        "ω₂ override (default: ω₁ or the curvature at the minimum)",
    ),
    key(
        "c",
        "",
        "constant c of the general operator (default: makes min Im λ = 0)",
    ),
    key("potential", "auto", "harmonic | cubic | auto"),
    key("operator", "auto", "dsho | schrodinger | general | auto"),
    key("x_min", "-12", "left grid end"),
    key("x_max", "12", "right grid end"),
    key("n", "800", "grid nodes, boundaries included"),
    key("stencil", "4", "Laplacian order: 2 | 4"),
    key("levels", "6", "eigenvalues written / overlaps tracked"),
    key(
        "initial",
        "superposition",
        "initial wave function: superposition | level index",
    ),
    key("x0", "1", "initial position"),
    key("p0", "0", "initial momentum"),
    key("method", "rk4", "classical integrator: rk4 | split"),
    key("step", "0.001", "time step"),
    key("horizon", "10", "time horizon"),
    key(
        "stride",
        "10",
        "write every stride-th step (the last is always written)",
    ),
    key(
        "convention",
        "all",
        "escape point: real_a | scaled | complex_zero | all",
    ),
    key("period", "40", "imaginary-time period T"),
    key("nodes", "2048", "path nodes m (power of two ≥ 64)"),
    key("tol", "1e-8", "relaxation residual tolerance"),
    key("max_iter", "10000", "relaxation iteration cap"),
    key(
        "period_check",
        "false",
        "also relax at doubled period and nodes",
    ),
    key("sweep", "", "comma-separated list of γ values"),
    key(
        "workers",
        "",
        "worker threads for sweeps (default: available cores)",
    ),
];

/// A malformed or inconsistent configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub key: Option<String>,
    pub message: String,
}

impl ConfigError {
    pub fn new(message: impl Into<String>) -> Self {
        Self {
            line: None,
            key: None,
            message: message.into(),
        }
    }

    pub fn for_key(key: &str, message: impl Into<String>) -> Self {
        Self {
            key: Some(key.to_string()),
            ..Self::new(message)
        }
    }

    fn at_line(mut self, line: usize) -> Self {
        self.line = Some(line);
        self
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(line) = self.line {
            write!(f, "line {line}: ")?;
        }
        if let Some(key) = &self.key {
            write!(f, "key `{key}`: ")?;
        }
        f.write_str(&self.message)
    }
}

impl std::error::Error for ConfigError {}

/// Outcome of argument parsing.
#[derive(Debug)]
pub enum Parsed {
    Run(Box<RunConfig>),
    /// `--help` or `--version`; the text goes to stdout.
    Info(String),
}

fn cli() -> clap::Command {
    let mut cmd = clap::Command::new("dissipaq")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Dissipative dynamics through a complex Hamiltonian")
        .arg(
            Arg::new("command")
                .required(true)
                .value_parser(Command::ALL.map(|c| c.tag()))
                .help("what to compute"),
        )
        .arg(
            Arg::new("config")
                .long("config")
                .value_name("FILE")
                .help("key = value file"),
        )
        .arg(
            Arg::new("out")
                .long("out")
                .value_name("DIR")
                .required(true)
                .help("output directory"),
        );
    for k in KEYS {
        let help = if k.default.is_empty() {
            k.help.to_string()
        } else {
            format!("{} [default: {}]", k.help, k.default)
        };
        cmd = cmd.arg(
            Arg::new(k.name)
                .long(k.name)
                .value_name("VALUE")
                .action(ArgAction::Set)
                .allow_hyphen_values(true)
                .help(help),
        );
    }
    cmd
}

/// Reads `key = value` lines; `#` starts a comment.
pub fn parse_file(text: &str) -> Result<BTreeMap<String, (usize, String)>, ConfigError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let Some((k, v)) = body.split_once('=') else {
            return Err(
                ConfigError::new(format!("expected `key = value`, got `{body}`")).at_line(line),
            );
        };
        let (k, v) = (k.trim(), v.trim());
        if !KEYS.iter().any(|key| key.name == k) {
            return Err(ConfigError::for_key(k, "unknown key").at_line(line));
        }
        if let Some((first, _)) = out.insert(k.to_string(), (line, v.to_string())) {
            return Err(
                ConfigError::for_key(k, format!("already set on line {first}")).at_line(line),
            );
        }
    }
    Ok(out)
}

/// Parses `argv` (program name first). `workers_env` is the value of
/// `DISSIPAQ_WORKERS`, if set.
pub fn parse_args<I, T>(args: I, workers_env: Option<String>) -> Result<Parsed, ConfigError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let m = match cli().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    Ok(Parsed::Info(e.to_string()))
                }
                _ => Err(ConfigError::new(
                    e.to_string()
                        .lines()
                        .next()
                        .unwrap_or("bad arguments")
                        .to_string(),
                )),
            };
        }
    };
    let command: Command = m.get_one::<String>("command").expect("required").parse()?;
    let out = PathBuf::from(m.get_one::<String>("out").expect("required"));

    let mut raw: BTreeMap<String, (Option<usize>, String)> = KEYS
        .iter()
        .map(|k| (k.name.to_string(), (None, k.default.to_string())))
        .collect();
    if let Some(path) = m.get_one::<String>("config") {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new(format!("cannot read config `{path}`: {e}")))?;
        for (k, (line, v)) in parse_file(&text)? {
            raw.insert(k, (Some(line), v));
        }
    }
    for k in KEYS {
        if let Some(v) = m.get_one::<String>(k.name) {
            raw.insert(k.name.to_string(), (None, v.clone()));
        }
    }
    if let Some(w) = workers_env {
        raw.insert("workers".into(), (None, w));
    }
    Ok(Parsed::Run(Box::new(resolve(command, out, &raw)?)))
}

/// Convenience for config files: `parse_args` over a file and no flags.
pub fn from_file(command: Command, file: &Path, out: &Path) -> Result<RunConfig, ConfigError> {
    let args = [
        "dissipaq".into(),
        command.tag().into(),
        "--config".into(),
        file.as_os_str().to_owned(),
        "--out".into(),
        out.as_os_str().to_owned(),
    ];
    match parse_args::<_, std::ffi::OsString>(args, None)? {
        Parsed::Run(c) => Ok(*c),
        Parsed::Info(_) => unreachable!("no help flag given"),
    }
}

struct Values<'a> {
    raw: &'a BTreeMap<String, (Option<usize>, String)>,
}

impl Values<'_> {
    fn get(&self, k: &str) -> &str {
        &self.raw[k].1
    }

    fn err(&self, k: &str, message: impl Into<String>) -> ConfigError {
        let e = ConfigError::for_key(k, message);
        match self.raw[k].0 {
            Some(line) => e.at_line(line),
            None => e,
        }
    }

    fn parse<T: FromStr>(&self, k: &str, what: &str) -> Result<T, ConfigError> {
        self.get(k)
            .parse()
            .map_err(|_| self.err(k, format!("expected {what}, got `{}`", self.get(k))))
    }

    fn float(&self, k: &str) -> Result<f64, ConfigError> {
        let v: f64 = self.parse(k, "a number")?;
        if !v.is_finite() {
            return Err(self.err(k, "must be finite"));
        }
        Ok(v)
    }

    fn positive(&self, k: &str) -> Result<f64, ConfigError> {
        let v = self.float(k)?;
        if v <= 0.0 {
            return Err(self.err(k, "must be positive"));
        }
        Ok(v)
    }

    fn optional_float(&self, k: &str) -> Result<Option<f64>, ConfigError> {
        if self.get(k).is_empty() {
            Ok(None)
        } else {
            self.float(k).map(Some)
        }
    }

    fn count(&self, k: &str, min: usize) -> Result<usize, ConfigError> {
        let v: usize = self.parse(k, "a nonnegative integer")?;
        if v < min {
            return Err(self.err(k, format!("must be at least {min}")));
        }
        Ok(v)
    }

    fn core<T: FromStr<Err = dissipaq_core::Error>>(&self, k: &str) -> Result<T, ConfigError> {
        self.get(k)
            .parse()
            .map_err(|e: dissipaq_core::Error| self.err(k, e.to_string()))
    }
}

fn resolve(
    command: Command,
    out: PathBuf,
    raw: &BTreeMap<String, (Option<usize>, String)>,
) -> Result<RunConfig, ConfigError> {
    let v = Values { raw };
    let potential = match v.get("potential") {
        "auto" if command.barrier_only() => PotentialKind::Cubic,
        "auto" => PotentialKind::Harmonic,
        "harmonic" if command.barrier_only() => {
            return Err(v.err(
                "potential",
                format!("`{}` needs the cubic barrier", command.tag()),
            ));
        }
        "harmonic" => PotentialKind::Harmonic,
        "cubic" => PotentialKind::Cubic,
        other => {
            return Err(v.err(
                "potential",
                format!("unknown potential `{other}` (harmonic|cubic|auto)"),
            ))
        }
    };
    let operator = match (v.get("operator"), potential) {
        ("auto", PotentialKind::Harmonic) => OperatorChoice::Dsho,
        ("auto", PotentialKind::Cubic) | ("general", _) => OperatorChoice::General,
        ("dsho" | "schrodinger", PotentialKind::Cubic) => {
            return Err(v.err(
                "operator",
                "the damped-oscillator operators need potential = harmonic",
            ));
        }
        ("dsho", _) => OperatorChoice::Dsho,
        ("schrodinger", _) => OperatorChoice::Schrodinger,
        (other, _) => {
            return Err(v.err(
                "operator",
                format!("unknown operator `{other}` (dsho|schrodinger|general|auto)"),
            ));
        }
    };
    let initial = match v.get("initial") {
        "superposition" => Initial::Superposition,
        _ => Initial::Level(v.parse("initial", "`superposition` or a level index")?),
    };
    let convention = match v.get("convention") {
        "all" => None,
        _ => Some(v.core("convention")?),
    };
    let period_check = match v.get("period_check") {
        "true" => true,
        "false" => false,
        other => {
            return Err(v.err(
                "period_check",
                format!("expected true or false, got `{other}`"),
            ))
        }
    };
    let sweep = match v.get("sweep") {
        "" => None,
        s => Some(
            s.split(',')
                .map(|g| g.trim().parse::<f64>().ok().filter(|g| g.is_finite()))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| {
                    v.err(
                        "sweep",
                        format!("expected comma-separated numbers, got `{s}`"),
                    )
                })?,
        ),
    };
    let workers = match v.get("workers") {
        "" => std::thread::available_parallelism().map_or(1, |n| n.get()),
        _ => v.count("workers", 1)?,
    };
    let levels = v.count("levels", 1)?;
    if let Initial::Level(k) = initial {
        if k >= levels {
            return Err(v.err(
                "initial",
                format!("level {k} is not below levels = {levels}"),
            ));
        }
    }
    if command == Command::Evolve && levels < 2 && initial == Initial::Superposition {
        return Err(v.err("levels", "the superposition needs levels ≥ 2"));
    }

    let cfg = RunConfig {
        command,
        omega: v.positive("omega")?,
        gamma: v.float("gamma")?,
        a: v.positive("a")?,
        hbar: v.positive("hbar")?,
        omega2: v.optional_float("omega2")?,
        c: v.optional_float("c")?,
        potential,
        operator,
        x_min: v.float("x_min")?,
        x_max: v.float("x_max")?,
        n: v.count("n", 5)?,
        stencil: v.core("stencil")?,
        levels,
        initial,
        x0: v.float("x0")?,
        p0: v.float("p0")?,
        method: v.core("method")?,
        step: v.positive("step")?,
        horizon: v.positive("horizon")?,
        stride: v.count("stride", 1)?,
        convention,
        period: v.positive("period")?,
        nodes: v.count("nodes", 64)?,
        tol: v.positive("tol")?,
        max_iter: v.count("max_iter", 1)?,
        period_check,
        sweep,
        workers,
        out,
        echo: Vec::new(),
    };
    if cfg.x_min >= cfg.x_max {
        return Err(v.err("x_max", "must exceed x_min"));
    }
    if cfg.gamma < 0.0 {
        return Err(v.err("gamma", "must be nonnegative"));
    }
    if let Some(g) = cfg
        .sweep
        .as_ref()
        .and_then(|s| s.iter().find(|g| **g < 0.0))
    {
        return Err(v.err("sweep", format!("γ = {g} is negative")));
    }
    Ok(cfg.with_echo())
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

impl RunConfig {
    fn with_echo(mut self) -> Self {
        let potential = match self.potential {
            PotentialKind::Harmonic => "harmonic",
            PotentialKind::Cubic => "cubic",
        };
        let operator = match self.operator {
            OperatorChoice::Dsho => "dsho",
            OperatorChoice::Schrodinger => "schrodinger",
            OperatorChoice::General => "general",
        };
        let initial = match self.initial {
            Initial::Superposition => "superposition".to_string(),
            Initial::Level(k) => k.to_string(),
        };
        let sweep = self
            .sweep
            .as_ref()
            .map(|s| s.iter().map(f64::to_string).collect::<Vec<_>>().join(","))
            .unwrap_or_default();
        self.echo = vec![
            ("omega", self.omega.to_string()),
            ("gamma", self.gamma.to_string()),
            ("a", self.a.to_string()),
            ("hbar", self.hbar.to_string()),
            ("omega2", fmt_opt(self.omega2)),
            ("c", fmt_opt(self.c)),
            ("potential", potential.into()),
            ("operator", operator.into()),
            ("x_min", self.x_min.to_string()),
            ("x_max", self.x_max.to_string()),
            ("n", self.n.to_string()),
            ("stencil", self.stencil.tag().into()),
            ("levels", self.levels.to_string()),
            ("initial", initial),
            ("x0", self.x0.to_string()),
            ("p0", self.p0.to_string()),
            ("method", self.method.tag().into()),
            ("step", self.step.to_string()),
            ("horizon", self.horizon.to_string()),
            ("stride", self.stride.to_string()),
            (
                "convention",
                self.convention.map_or("all", |c| c.tag()).into(),
            ),
            ("period", self.period.to_string()),
            ("nodes", self.nodes.to_string()),
            ("tol", self.tol.to_string()),
            ("max_iter", self.max_iter.to_string()),
            ("period_check", self.period_check.to_string()),
            ("sweep", sweep),
        ];
        self
    }

    /// `command=… key=value …`, the provenance echo written into every CSV.
    pub fn echo(&self) -> String {
        let mut s = format!("command={}", self.command.tag());
        for (k, v) in &self.echo {
            s.push(' ');
            s.push_str(k);
            s.push('=');
            s.push_str(v);
        }
        s
    }

    /// Sweep values, or the single configured `γ`.
    pub fn gammas(&self) -> Vec<f64> {
        self.sweep.clone().unwrap_or_else(|| vec![self.gamma])
    }

    /// This configuration at one sweep value, with the sweep removed.
    pub fn at_gamma(&self, gamma: f64) -> RunConfig {
        RunConfig {
            gamma,
            sweep: None,
            ..self.clone()
        }
        .with_echo()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Result<RunConfig, ConfigError> {
        let mut argv = vec!["dissipaq"];
        argv.extend_from_slice(args);
        match parse_args(argv, None)? {
            Parsed::Run(c) => Ok(*c),
            Parsed::Info(_) => panic!("unexpected info"),
        }
    }

    #[test]
    fn defaults() {
        let c = parse(&["spectrum", "--out", "o"]).unwrap();
        assert_eq!(
            (c.omega, c.gamma, c.x_min, c.x_max, c.n),
            (1.0, 0.1, -12.0, 12.0, 800)
        );
        assert_eq!(c.potential, PotentialKind::Harmonic);
        assert_eq!(c.operator, OperatorChoice::Dsho);
        assert_eq!(c.sweep, None);
        let t = parse(&["tunnel", "--out", "o"]).unwrap();
        assert_eq!(t.potential, PotentialKind::Cubic);
    }

    #[test]
    fn file_and_flag_precedence() {
        let dir = tempfile::tempdir().unwrap();
        let f = dir.path().join("run.cfg");
        std::fs::write(&f, "# comment\ngamma = 0.2\nomega = 2 # trailing\n\n").unwrap();
        let fs = f.to_str().unwrap();
        let c = parse(&["spectrum", "--config", fs, "--out", "o"]).unwrap();
        assert_eq!((c.gamma, c.omega), (0.2, 2.0));
        let c = parse(&["spectrum", "--config", fs, "--gamma", "0.3", "--out", "o"]).unwrap();
        assert_eq!((c.gamma, c.omega), (0.3, 2.0));
    }

    #[test]
    fn file_errors_carry_line_and_key() {
        let e = parse_file("gamma = 0.1\nbogus = 3\n").unwrap_err();
        assert_eq!((e.line, e.key.as_deref()), (Some(2), Some("bogus")));
        let e = parse_file("gamma\n").unwrap_err();
        assert_eq!(e.line, Some(1));
        let e = parse_file("n = 3\nn = 4\n").unwrap_err();
        assert_eq!((e.line, e.key.as_deref()), (Some(2), Some("n")));
    }

    #[test]
    fn value_errors() {
        assert_eq!(
            parse(&["spectrum", "--n", "x", "--out", "o"])
                .unwrap_err()
                .key
                .as_deref(),
            Some("n")
        );
        assert!(parse(&["spectrum", "--bogus", "1", "--out", "o"]).is_err());
        assert!(parse(&["spectrum"]).is_err());
        assert!(parse(&["tunnel", "--potential", "harmonic", "--out", "o"]).is_err());
        assert!(parse(&[
            "spectrum",
            "--potential",
            "cubic",
            "--operator",
            "dsho",
            "--out",
            "o"
        ])
        .is_err());
        assert!(parse(&["spectrum", "--x_min", "3", "--x_max", "1", "--out", "o"]).is_err());
        assert!(parse(&["tunnel", "--convention", "nope", "--out", "o"]).is_err());
        assert!(parse(&["spectrum", "--gamma", "nan", "--out", "o"]).is_err());
    }

    #[test]
    fn sweep_plan() {
        let c = parse(&["spectrum", "--sweep", "0,0.05,0.1", "--out", "o"]).unwrap();
        assert_eq!(c.gammas(), vec![0.0, 0.05, 0.1]);
        let e = c.at_gamma(0.05);
        assert_eq!((e.gamma, e.sweep.clone()), (0.05, None));
        assert!(e.echo().contains(" gamma=0.05 "));
        assert!(parse(&["spectrum", "--sweep", "0,,1", "--out", "o"]).is_err());
    }

    #[test]
    fn workers_env_overrides() {
        let argv = ["dissipaq", "compare", "--workers", "3", "--out", "o"];
        match parse_args(argv, Some("5".into())).unwrap() {
            Parsed::Run(c) => assert_eq!(c.workers, 5),
            Parsed::Info(_) => unreachable!(),
        }
        assert!(parse_args(argv, Some("zero".into())).is_err());
    }

    #[test]
    fn echo_ignores_out_and_workers() {
        let a = parse(&["classical", "--out", "a", "--workers", "1"]).unwrap();
        let b = parse(&["classical", "--out", "b", "--workers", "4"]).unwrap();
        assert_eq!(a.echo(), b.echo());
    }
}
