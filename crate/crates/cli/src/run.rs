//! Dispatch of a [`RunConfig`] to the core and CSV emission.

use std::fmt;
use std::io;
use std::path::PathBuf;

use dissipaq_core::classical::{energy_series, integrate};
use dissipaq_core::instanton::{
    compare_exponents, period_convergence, relax_barrier, PathGrid, RelaxOptions,
};
use dissipaq_core::phase::natural_omega2;
use dissipaq_core::quantum::{
    build_dsho_hamiltonian, build_general_hamiltonian, build_schrodinger_dsho, choose_c, evolve,
    spectrum, Grid, OperatorMatrix, WaveFunction,
};
use dissipaq_core::wkb::{
    closed_form_exponent, tunneling_probability, BarrierSpec, EscapeConvention,
};
use dissipaq_core::{Complex64, PhaseState, SystemSpec};
use rayon::prelude::*;

use crate::config::{Command, ConfigError, Initial, OperatorChoice, PotentialKind, RunConfig};
use crate::table::{Cell, ResultTable};

#[derive(Debug)]
pub enum RunError {
    Config(ConfigError),
    Core(dissipaq_core::Error),
    Io { path: PathBuf, source: io::Error },
}

impl RunError {
    /// 2 for bad input, 3 for a numerical method failing on valid input.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Core(e) if e.is_numerical() => 3,
            _ => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            RunError::Config(_) => "config",
            RunError::Core(e) if e.is_numerical() => "numerical",
            RunError::Core(_) => "invalid",
            RunError::Io { .. } => "io",
        }
    }

    /// Single line for standard error: `error code=N kind=K message=…`.
    pub fn machine_line(&self) -> String {
        let msg = self.to_string().replace(['\n', '\r'], " ");
        format!(
            "error code={} kind={} message={}",
            self.exit_code(),
            self.kind(),
            msg
        )
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config(e) => e.fmt(f),
            RunError::Core(e) => e.fmt(f),
            RunError::Io { path, source } => write!(f, "{}: {source}", path.display()),
        }
    }
}

impl std::error::Error for RunError {}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e)
    }
}

impl From<dissipaq_core::Error> for RunError {
    fn from(e: dissipaq_core::Error) -> Self {
        RunError::Core(e)
    }
}

type Output = Vec<(PathBuf, ResultTable)>;

fn provenance(cfg: &RunConfig) -> String {
    format!("dissipaq {} {}", env!("CARGO_PKG_VERSION"), cfg.echo())
}

fn table(cfg: &RunConfig, columns: &[&str]) -> ResultTable {
    ResultTable::new(provenance(cfg), columns)
}

fn push(t: &mut ResultTable, row: Vec<Cell>) {
    t.push(row).expect("row width matches the column list");
}

/// Runs `cfg` and writes its CSV files under `cfg.out`, returning the paths
/// written. Everything is computed before the first file is written.
pub fn run(cfg: &RunConfig) -> Result<Vec<PathBuf>, RunError> {
    dissipaq_core::use_sequential_linalg();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| ConfigError::for_key("workers", e.to_string()))?;
    let files = pool.install(|| compute(cfg))?;
    std::fs::create_dir_all(&cfg.out).map_err(|source| RunError::Io {
        path: cfg.out.clone(),
        source,
    })?;
    let mut written = Vec::with_capacity(files.len());
    for (rel, t) in files {
        let path = cfg.out.join(rel);
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).map_err(|source| RunError::Io {
                path: dir.to_path_buf(),
                source,
            })?;
        }
        t.write_atomic(&path).map_err(|source| RunError::Io {
            path: path.clone(),
            source,
        })?;
        written.push(path);
    }
    Ok(written)
}

/// All output tables, with paths relative to the output directory.
pub fn compute(cfg: &RunConfig) -> Result<Output, RunError> {
    match cfg.command {
        Command::Tunnel => tunnel(cfg),
        Command::Compare => compare(cfg),
        _ => match &cfg.sweep {
            None => single(cfg),
            Some(gammas) => {
                let entries = gammas
                    .par_iter()
                    .map(|&g| single(&cfg.at_gamma(g)))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(entries
                    .into_iter()
                    .enumerate()
                    .flat_map(|(k, files)| {
                        let dir = PathBuf::from(format!("sweep_{k:03}"));
                        files.into_iter().map(move |(p, t)| (dir.join(p), t))
                    })
                    .collect())
            }
        },
    }
}

fn single(cfg: &RunConfig) -> Result<Output, RunError> {
    match cfg.command {
        Command::Classical => classical(cfg),
        Command::Spectrum => spectrum_table(cfg),
        Command::Evolve => evolution(cfg),
        Command::Instanton => instanton(cfg),
        Command::Tunnel | Command::Compare => unreachable!("sweeps are rows for these commands"),
    }
}

fn system(cfg: &RunConfig) -> Result<SystemSpec, RunError> {
    let sys = match cfg.potential {
        PotentialKind::Harmonic => SystemSpec::dsho(cfg.omega, cfg.gamma)?,
        PotentialKind::Cubic => SystemSpec::cubic_barrier(cfg.omega, cfg.a, cfg.gamma)?,
    };
    Ok(sys.with_hbar(cfg.hbar)?)
}

fn barrier(cfg: &RunConfig, gamma: f64) -> Result<BarrierSpec, RunError> {
    Ok(BarrierSpec::new(cfg.omega, cfg.a, gamma, cfg.hbar)?)
}

fn classical(cfg: &RunConfig) -> Result<Output, RunError> {
    let sys = system(cfg)?;
    let traj = integrate(
        &sys,
        &PhaseState::point(cfg.x0, cfg.p0),
        cfg.step,
        cfg.horizon,
        cfg.method,
    )?;
    let energy = energy_series(&traj, &sys)?;
    let mut t = table(cfg, &["t", "x", "p", "H"]);
    let last = traj.len() - 1;
    for (k, s) in traj.samples.iter().enumerate() {
        if k % cfg.stride == 0 || k == last {
            push(
                &mut t,
                vec![
                    s.t.into(),
                    s.x[0].into(),
                    s.p[0].into(),
                    energy.values[k].into(),
                ],
            );
        }
    }
    Ok(vec![("trajectory.csv".into(), t)])
}

fn operator(cfg: &RunConfig) -> Result<OperatorMatrix, RunError> {
    let grid = Grid::new(cfg.x_min, cfg.x_max, cfg.n)?.with_stencil(cfg.stencil);
    let op = match cfg.operator {
        OperatorChoice::Dsho => build_dsho_hamiltonian(cfg.omega, cfg.gamma, cfg.hbar, &grid)?,
        OperatorChoice::Schrodinger => {
            build_schrodinger_dsho(cfg.omega, cfg.gamma, cfg.hbar, &grid)?
        }
        OperatorChoice::General => {
            let sys = system(cfg)?;
            let omega2 = match cfg.omega2 {
                Some(w) => w,
                None => natural_omega2(&sys, &[0.0])?,
            };
            match cfg.c {
                Some(c) => build_general_hamiltonian(&sys, omega2, c, &grid)?,
                None => {
                    let op = build_general_hamiltonian(&sys, omega2, 0.0, &grid)?;
                    if cfg.gamma == 0.0 {
                        op
                    } else {
                        let c = choose_c(&op, cfg.gamma, omega2)?.c;
                        op.shift_c(c)?
                    }
                }
            }
        }
    };
    Ok(op)
}

fn check_levels(cfg: &RunConfig, op: &OperatorMatrix) -> Result<(), RunError> {
    if cfg.levels > op.dim() {
        return Err(
            ConfigError::for_key("levels", format!("at most {} on this grid", op.dim())).into(),
        );
    }
    Ok(())
}

fn spectrum_table(cfg: &RunConfig) -> Result<Output, RunError> {
    let op = operator(cfg)?;
    check_levels(cfg, &op)?;
    let s = spectrum(&op, cfg.levels)?;
    let mut t = table(cfg, &["index", "re_lambda", "im_lambda", "residual"]);
    for (k, (lam, r)) in s.eigenvalues.iter().zip(&s.residuals).enumerate() {
        push(
            &mut t,
            vec![k.into(), lam.re.into(), lam.im.into(), (*r).into()],
        );
    }
    Ok(vec![("spectrum.csv".into(), t)])
}

fn evolution(cfg: &RunConfig) -> Result<Output, RunError> {
    let op = operator(cfg)?;
    check_levels(cfg, &op)?;
    let grid = *op.grid();
    let s = spectrum(&op, cfg.levels)?;
    let modes = s
        .eigenvectors
        .iter()
        .map(|v| WaveFunction::from_interior(grid, v)?.normalized())
        .collect::<Result<Vec<_>, _>>()?;
    let psi0 = match cfg.initial {
        Initial::Level(k) => modes[k].clone(),
        Initial::Superposition => {
            let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            modes[0].combine(h, &modes[1], h)?
        }
    };
    let snaps = evolve(&op, &psi0, cfg.step, cfg.horizon, cfg.stride)?;
    let mut columns = vec!["t".to_string(), "norm".into(), "overlap_ground".into()];
    columns.extend((1..cfg.levels).map(|k| format!("overlap_{k}")));
    let names: Vec<&str> = columns.iter().map(String::as_str).collect();
    let mut t = table(cfg, &names);
    for snap in &snaps {
        let mut row: Vec<Cell> = vec![snap.t.into(), snap.psi.norm().into()];
        for m in &modes {
            row.push(m.inner(&snap.psi)?.norm().into());
        }
        push(&mut t, row);
    }
    Ok(vec![("evolution.csv".into(), t)])
}

fn relax_options(cfg: &RunConfig) -> RelaxOptions {
    RelaxOptions {
        tol: cfg.tol,
        max_iter: cfg.max_iter,
        curvature_floor: None,
    }
}

fn path_grid(cfg: &RunConfig) -> Result<PathGrid, RunError> {
    Ok(PathGrid::new(cfg.period, cfg.nodes)?)
}

const ACTION_COLUMNS: [&str; 3] = ["gamma", "cl_action", "ch_exponent"];

fn instanton(cfg: &RunConfig) -> Result<Output, RunError> {
    let b = barrier(cfg, cfg.gamma)?;
    let grid = path_grid(cfg)?;
    let opts = relax_options(cfg);
    let r = relax_barrier(&b, cfg.gamma, grid, &opts)?;
    let mut path = table(cfg, &["tau", "x"]);
    for (k, x) in r.path.values().iter().enumerate() {
        push(&mut path, vec![grid.tau(k).into(), (*x).into()]);
    }
    let mut actions = table(cfg, &ACTION_COLUMNS);
    push(
        &mut actions,
        vec![
            cfg.gamma.into(),
            (r.action / b.hbar()).into(),
            closed_form_exponent(&b).into(),
        ],
    );
    let mut out = vec![
        ("instanton.csv".into(), path),
        ("actions.csv".into(), actions),
    ];
    if cfg.period_check {
        let c = period_convergence(&b, grid, &opts)?;
        let mut t = table(cfg, &["action", "doubled_action", "relative_change"]);
        push(
            &mut t,
            vec![
                c.action.into(),
                c.doubled_action.into(),
                c.relative_change.into(),
            ],
        );
        out.push(("period_check.csv".into(), t));
    }
    Ok(out)
}

fn tunnel(cfg: &RunConfig) -> Result<Output, RunError> {
    let conventions: Vec<EscapeConvention> = match cfg.convention {
        Some(c) => vec![c],
        None => EscapeConvention::ALL.to_vec(),
    };
    let mut t = table(
        cfg,
        &[
            "gamma",
            "exponent_quadrature",
            "exponent_closed_form",
            "convention",
        ],
    );
    for gamma in cfg.gammas() {
        let b = barrier(cfg, gamma)?;
        let closed = closed_form_exponent(&b);
        for &c in &conventions {
            let r = tunneling_probability(&b, cfg.omega2, c)?;
            push(
                &mut t,
                vec![
                    gamma.into(),
                    r.exponent.into(),
                    closed.into(),
                    c.tag().into(),
                ],
            );
        }
    }
    Ok(vec![("tunneling.csv".into(), t)])
}

fn compare(cfg: &RunConfig) -> Result<Output, RunError> {
    let gammas = cfg.gammas();
    for &g in &gammas {
        barrier(cfg, g)?;
    }
    let table_rows = compare_exponents(
        &barrier(cfg, 0.0)?,
        &gammas,
        path_grid(cfg)?,
        &relax_options(cfg),
    )?;
    let mut t = table(cfg, &ACTION_COLUMNS);
    for r in &table_rows.rows {
        push(
            &mut t,
            vec![r.gamma.into(), r.cl_action.into(), r.ch_exponent.into()],
        );
    }
    Ok(vec![("actions.csv".into(), t)])
}
