//! Library half of the command-line front end: argument handling, run
//! configuration, mode execution, CSV output. The binary in `main.rs` is a
//! thin wrapper so integration tests can exercise everything in-process.

pub mod output;
pub mod runconfig;

use std::fmt;
use std::path::Path;

use jumpfb::dynamics::steady_state;
use jumpfb::entanglement::{concurrence, fidelity_to_singlet, purity};
use jumpfb::liouvillian::build;
use jumpfb::sweeps::{refine_max, sweep, time_series, SweepSpec, TimeSeriesSpec};
use jumpfb::trajectories::ensemble_average;
use jumpfb::Error as CoreError;

use runconfig::{figure_presets, Mode, RunConfig};

/// Exit codes: 2 config/usage, 3 numerical, 4 I/O.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(CoreError),
    Io(std::io::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "configuration error: {msg}"),
            CliError::Numerical(e) => write!(f, "numerical failure: {e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidConfig(msg) => CliError::Config(msg),
            other => CliError::Numerical(other),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

const USAGE: &str = "usage: jumpfb <steady|evolve|traj|sweep|figure> [--config <path>] \
[--output <path>] [--threads <n>] [--<json.path> <value>]...";

/// Parse arguments, run, report. Returns the process exit code.
pub fn run_main(args: &[String]) -> i32 {
    match execute(args) {
        Ok(summary) => {
            println!("{summary}");
            0
        }
        Err(e) => {
            eprintln!("{e}");
            if matches!(e, CliError::Config(_)) {
                eprintln!("{USAGE}");
            }
            e.exit_code()
        }
    }
}

/// Run a full invocation, returning the one-line summary for stdout.
pub fn execute(args: &[String]) -> Result<String, CliError> {
    let (config, threads) = parse_args(args)?;
    if let Some(n) = threads {
        // affects speed only; results are reduced in deterministic order
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    run_config(&config)
}

/// Assemble the effective `RunConfig` from `--config`, dotted overrides, and
/// the subcommand.
pub fn parse_args(args: &[String]) -> Result<(RunConfig, Option<usize>), CliError> {
    let mut iter = args.iter();
    let subcommand = iter
        .next()
        .ok_or_else(|| CliError::Config("missing subcommand".to_string()))?;
    let mode = Mode::parse(subcommand)?;

    let mut config_path: Option<String> = None;
    let mut overrides: Vec<(String, String)> = Vec::new();
    let mut threads: Option<usize> = None;
    while let Some(arg) = iter.next() {
        let flag = arg
            .strip_prefix("--")
            .ok_or_else(|| CliError::Config(format!("unexpected argument '{arg}'")))?;
        let value = iter
            .next()
            .ok_or_else(|| CliError::Config(format!("flag --{flag} needs a value")))?;
        match flag {
            "config" => config_path = Some(value.clone()),
            "threads" => {
                threads = Some(value.parse().map_err(|_| {
                    CliError::Config(format!("--threads needs an integer, got '{value}'"))
                })?)
            }
            "output" => overrides.push(("output.path".to_string(), value.clone())),
            path => overrides.push((path.to_string(), value.clone())),
        }
    }

    let mut tree: serde_json::Value = match &config_path {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("cannot parse {path}: {e}")))?
        }
        None => serde_json::json!({}),
    };
    if !tree.is_object() {
        return Err(CliError::Config("config root must be a JSON object".to_string()));
    }

    for (path, raw) in &overrides {
        let value: serde_json::Value = match serde_json::from_str(raw) {
            Ok(v) => v,
            Err(_) => serde_json::Value::String(raw.clone()),
        };
        set_path(&mut tree, path, value)?;
    }

    // the subcommand is authoritative for the mode; a conflicting config is
    // an error rather than a silent override
    if let Some(existing) = tree.get("mode").and_then(|m| m.as_str()) {
        if existing != mode.name() {
            return Err(CliError::Config(format!(
                "config mode '{existing}' conflicts with subcommand '{}'",
                mode.name()
            )));
        }
    }
    tree["mode"] = serde_json::Value::String(mode.name().to_string());

    // figure mode runs a preset; only the figure name and output destination
    // come from the invocation
    let config: RunConfig = if mode == Mode::Figure {
        let slim: serde_json::Value = tree.clone();
        let obj = slim.as_object().unwrap();
        for key in obj.keys() {
            if !["mode", "figure", "output"].contains(&key.as_str()) {
                return Err(CliError::Config(format!(
                    "figure mode is fully preset; unexpected key '{key}'"
                )));
            }
        }
        let name = match obj.get("figure") {
            Some(serde_json::Value::String(s)) => s.clone(),
            Some(serde_json::Value::Number(n)) => n.to_string(),
            _ => return Err(CliError::Config("figure mode needs a figure name".to_string())),
        };
        let mut preset = figure_presets(&name)?;
        if let Some(output) = obj.get("output") {
            preset.output = serde_json::from_value(output.clone())
                .map_err(|e| CliError::Config(format!("bad output section: {e}")))?;
        }
        preset
    } else {
        serde_json::from_value(tree).map_err(|e| CliError::Config(e.to_string()))?
    };
    Ok((config, threads))
}

fn set_path(
    tree: &mut serde_json::Value,
    path: &str,
    value: serde_json::Value,
) -> Result<(), CliError> {
    let mut node = tree;
    let parts: Vec<&str> = path.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        if part.is_empty() {
            return Err(CliError::Config(format!("bad override path '{path}'")));
        }
        let obj = node
            .as_object_mut()
            .ok_or_else(|| CliError::Config(format!("override path '{path}' crosses a non-object")))?;
        if i == parts.len() - 1 {
            obj.insert(part.to_string(), value);
            return Ok(());
        }
        node = obj
            .entry(part.to_string())
            .or_insert_with(|| serde_json::json!({}));
    }
    unreachable!()
}

/// Execute a validated configuration: compute, write the CSV, and return the
/// stdout summary line.
pub fn run_config(config: &RunConfig) -> Result<String, CliError> {
    let (table, summary) = match config.mode {
        Mode::Steady => run_steady(config)?,
        Mode::Evolve => run_evolve(config)?,
        Mode::Traj => run_traj(config)?,
        Mode::Sweep => run_sweep(config)?,
        Mode::Figure => run_figure(config)?,
    };
    write_output(&config.output.path, &table)?;
    Ok(summary)
}

fn write_output(path: &str, table: &str) -> Result<(), CliError> {
    if let Some(parent) = Path::new(path).parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::write(path, table)?;
    Ok(())
}

fn run_steady(config: &RunConfig) -> Result<(String, String), CliError> {
    let system = config.system_config()?;
    let l = build(&system)?;
    let result = steady_state(&l)?;
    let c = concurrence(&result.rho)?;
    let table = output::steady_table(&[
        ("concurrence", c),
        ("fidelity_to_singlet", fidelity_to_singlet(&result.rho)),
        ("purity", purity(&result.rho)),
        ("null_dimension", result.null_dimension as f64),
        ("residual", result.residual),
        ("gap", result.gap),
    ]);
    let summary = format!(
        "steady: concurrence={c:.6} null_dimension={} residual={:.3e}",
        result.null_dimension, result.residual
    );
    Ok((table, summary))
}

fn run_evolve(config: &RunConfig) -> Result<(String, String), CliError> {
    let spec = TimeSeriesSpec {
        config: config.system_config()?,
        initial: config.initial_density()?,
        t_final: config.time.t_final,
        samples: config.time.samples,
    };
    let points = time_series(&spec)?;
    let last = points.last().expect("at least two samples");
    let summary = format!(
        "evolve: samples={} t_final={} final_concurrence={:.6}",
        points.len(),
        config.time.t_final,
        last.concurrence
    );
    Ok((output::time_series_table(&points), summary))
}

fn run_traj(config: &RunConfig) -> Result<(String, String), CliError> {
    let system = config.system_config()?;
    let psi0 = config.initial_pure()?;
    let trajectories = config
        .trajectories
        .ok_or_else(|| CliError::Config("traj mode needs a trajectories section".to_string()))?;
    let base_seed = trajectories.base_seed.ok_or_else(|| {
        CliError::Config("traj mode needs an explicit trajectories.base_seed".to_string())
    })?;
    let times: Vec<f64> = (0..config.time.samples)
        .map(|i| config.time.t_final * i as f64 / (config.time.samples - 1) as f64)
        .collect();
    let ensemble = ensemble_average(
        &system,
        &psi0,
        config.time.t_final,
        config.time.dt,
        &times,
        trajectories.n,
        base_seed,
    )?;
    let mean_concurrence: Vec<f64> = ensemble
        .mean_states
        .iter()
        .map(concurrence)
        .collect::<Result<_, _>>()?;
    let summary = format!(
        "traj: n={} final_mean_concurrence={:.6} max_stderr={:.3e}",
        trajectories.n,
        mean_concurrence.last().unwrap(),
        ensemble.stderr.iter().cloned().fold(0.0, f64::max)
    );
    let table =
        output::trajectory_table(&ensemble.times, &mean_concurrence, &ensemble.stderr, trajectories.n);
    Ok((table, summary))
}

fn sweep_spec(config: &RunConfig) -> Result<SweepSpec, CliError> {
    let sweep_config = config
        .sweep
        .ok_or_else(|| CliError::Config("sweep mode needs a sweep section".to_string()))?;
    Ok(SweepSpec {
        base: config.system_config()?,
        omega_axis: sweep_config.omega_axis.into(),
        lambda_axis: sweep_config.lambda_axis.into(),
        quantity: sweep_config.quantity.into(),
    })
}

fn run_sweep(config: &RunConfig) -> Result<(String, String), CliError> {
    let spec = sweep_spec(config)?;
    let result = sweep(&spec)?;
    let summary = match result.argmax {
        Some((omega, lambda, value)) => {
            let (ro, rl, rv) = refine_max(&result, &spec)?;
            format!(
                "sweep: cells={} grid_max={value:.6} at (omega={omega:.6}, lambda={lambda:.6}); \
                 refined {rv:.6} at (omega={ro:.6}, lambda={rl:.6})",
                result.omegas.len() * result.lambdas.len()
            )
        }
        None => "sweep: no usable cells".to_string(),
    };
    Ok((output::sweep_table(&result), summary))
}

fn run_figure(config: &RunConfig) -> Result<(String, String), CliError> {
    let name = config
        .figure
        .as_deref()
        .ok_or_else(|| CliError::Config("figure mode needs a figure name".to_string()))?;
    match name {
        "2a" | "2b" | "2c" | "2d" => {
            let (table, summary) = run_sweep(config)?;
            Ok((table, format!("figure {name} {summary}")))
        }
        "3" => {
            let system = config.system_config()?;
            let gammas = [("C1", 0.001), ("C2", 0.01)];
            let mut series = Vec::new();
            for (tag, gamma) in gammas {
                for (suffix, feedback) in
                    [("nofb", jumpfb::Feedback::None), ("fb", system.feedback)]
                {
                    let series_config = jumpfb::SystemConfig {
                        gamma1: gamma,
                        gamma2: gamma,
                        feedback,
                        ..system
                    };
                    series.push((format!("{tag}_{suffix}"), series_config));
                }
            }
            series.push((
                "C3_fb_deph".to_string(),
                jumpfb::SystemConfig {
                    gamma1: 0.01,
                    gamma2: 0.01,
                    gamma_deph: 0.01,
                    ..system
                },
            ));
            let table = run_series(config, &series)?;
            Ok((table, format!("figure 3: {} series written", series.len())))
        }
        "4" => {
            let system = config.system_config()?;
            let mut series = Vec::new();
            for gamma in [0.0, 0.01] {
                for eta in [1.0, 0.5] {
                    series.push((
                        format!("eta{eta}_gamma{gamma}"),
                        jumpfb::SystemConfig {
                            eta,
                            gamma1: gamma,
                            gamma2: gamma,
                            ..system
                        },
                    ));
                }
            }
            let table = run_series(config, &series)?;
            Ok((table, format!("figure 4: {} series written", series.len())))
        }
        other => Err(CliError::Config(format!("unknown figure '{other}'"))),
    }
}

fn run_series(
    config: &RunConfig,
    series: &[(String, jumpfb::SystemConfig)],
) -> Result<String, CliError> {
    let mut labeled = Vec::new();
    for (label, system) in series {
        let spec = TimeSeriesSpec {
            config: *system,
            initial: config.initial_density()?,
            t_final: config.time.t_final,
            samples: config.time.samples,
        };
        labeled.push((label.clone(), time_series(&spec)?));
    }
    Ok(output::labeled_time_series_table(&labeled))
}
