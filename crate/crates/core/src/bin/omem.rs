use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use omem::cli::calibration::convention_report;
use omem::cli::montecarlo::{default_setup, run_montecarlo};
use omem::cli::presets;
use omem::cli::sweep::{metadata, write_csv, FIGURE_NAMES};
use omem::cli::units::parse_quantity;
use omem::cli::{
    figure, run_sweep, Config, FrequencyConvention, ResultRow, Spacing, SweepAxis, SweepRange,
    SweepSpec,
};
use omem::stochastic::TrajectoryConfig;
use omem::{CouplingPhase, Error, Result};

/// Fidelity of a write/store/read optomechanical quantum memory under
/// colored control-laser phase noise.
#[derive(Parser)]
#[command(name = "omem", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one configuration.
    Fidelity(Common),
    /// Sweep one parameter, or reproduce a figure with --figure.
    Sweep(SweepArgs),
    /// Compare the covariance engine with stochastic trajectories.
    Montecarlo(McArgs),
    /// List the built-in presets.
    Presets,
    /// Print the fully resolved configuration.
    DumpConfig(Common),
    /// Tabulate the reference fidelities under both frequency conventions.
    Calibrate {
        /// Write the markdown report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Clone, Default)]
struct Common {
    /// Built-in parameter set (teufel, groblacher).
    #[arg(long)]
    preset: Option<String>,
    /// key = value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write results as CSV to this path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Control linewidth, e.g. 1kHz.
    #[arg(long = "GammaL")]
    gamma_l: Option<String>,
    /// Frequency-noise cutoff, e.g. 0.5MHz.
    #[arg(long)]
    gammac: Option<String>,
    /// Real coherent amplitude of the input.
    #[arg(long)]
    alpha: Option<String>,
    /// Squeezing parameter of the input.
    #[arg(long)]
    r: Option<String>,
    /// Storage time, e.g. 0.95us.
    #[arg(long)]
    tau: Option<String>,
    /// Mechanical quality factor.
    #[arg(long = "Qm")]
    qm: Option<String>,
    /// Effective coupling, e.g. 534.5kHz.
    #[arg(long = "G")]
    g: Option<String>,
    /// How Hz values become rad/s: ordinary (x 2pi) or angular.
    #[arg(long)]
    frequency_convention: Option<FrequencyConvention>,
    /// Initial frequency-noise variance: paper or stationary.
    #[arg(long)]
    psi0: Option<String>,
    /// Rotation compensation: fixed or optimize.
    #[arg(long)]
    rotation: Option<String>,
    /// Noise drive during storage: retained or decoupled.
    #[arg(long)]
    store_noise: Option<String>,
    /// Any other config key, as key=value. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    /// Canned sweep bundle: fig3, fig4a, fig4b, fig5, fig6a, fig6b, fig7a, fig7b, fig8.
    #[arg(long)]
    figure: Option<String>,
    /// Axis to sweep: Qm, GammaL, gammac, G, tau, r, T.
    #[arg(long, required_unless_present = "figure")]
    axis: Option<SweepAxis>,
    /// Axis start, with units for rates and times.
    #[arg(long, required_unless_present = "figure")]
    from: Option<String>,
    /// Axis end.
    #[arg(long, required_unless_present = "figure")]
    to: Option<String>,
    /// Number of points, endpoints included.
    #[arg(long, default_value_t = 21)]
    points: usize,
    /// linear or log.
    #[arg(long, default_value = "linear")]
    spacing: Spacing,
}

#[derive(Args)]
struct McArgs {
    #[command(flatten)]
    common: Common,
    /// RNG seed [default: 2024].
    #[arg(long)]
    seed: Option<u64>,
    /// Trajectories [default: 5000].
    #[arg(long)]
    n_traj: Option<usize>,
    /// Step in units of 1/omega_m.
    #[arg(long)]
    dt: Option<f64>,
    /// Run write, store and read instead of the write pulse alone.
    #[arg(long)]
    full_protocol: bool,
}

impl Common {
    fn has_scenario(&self) -> bool {
        self.preset.is_some() || self.config.is_some()
    }

    /// File entries, then flags, in that order so that flags win.
    fn config(&self) -> Result<Config> {
        let mut cfg = match &self.config {
            Some(path) => Config::from_file(path)?,
            None => Config::default(),
        };
        let flags = [
            ("preset", &self.preset),
            ("GammaL", &self.gamma_l),
            ("gammac", &self.gammac),
            ("alpha", &self.alpha),
            ("r", &self.r),
            ("tau", &self.tau),
            ("Qm", &self.qm),
            ("G", &self.g),
            ("psi0", &self.psi0),
            ("rotation", &self.rotation),
            ("store-noise", &self.store_noise),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set(key, v.clone())?;
            }
        }
        for kv in &self.set {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("--set expects key=value, got '{kv}'")))?;
            cfg.set(k.trim(), v.trim())?;
        }
        Ok(cfg)
    }
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn io_err(path: Option<&Path>) -> impl Fn(io::Error) -> Error + '_ {
    move |e| {
        Error::Numerical(format!(
            "writing {}: {e}",
            path.map_or("stdout".into(), |p| p.display().to_string())
        ))
    }
}

fn fidelity(args: &Common) -> Result<()> {
    let cfg = args.config()?;
    let sc = cfg.resolve(args.frequency_convention)?;
    let outcome = omem::evaluate(&sc.params, &sc.input, &sc.protocol)?;
    let row = ResultRow::from_result("fidelity", "none", f64::NAN, sc.clone(), Ok(outcome));
    let mut text = format!(
        "F       = {:.6}\nn_h     = {:.6e}\nlambda  = {:.6e}\ntheta   = {:.6}\nt_s     = {:.6e} s\n",
        row.fidelity, row.n_h, row.lambda, row.theta, row.t_s
    );
    text.push_str(&sc.dump());
    print_quietly(&text);
    if row.fidelity < 0.5 {
        eprintln!("warning: fidelity {:.4} is below 0.5", row.fidelity);
    }
    if let Some(path) = &args.out {
        let meta = vec![
            format!("omem {} fidelity", env!("CARGO_PKG_VERSION")),
            sc.dump(),
        ];
        write_csv(output(&args.out)?, &meta, &[row]).map_err(io_err(Some(path)))?;
    }
    Ok(())
}

fn sweep(args: &SweepArgs) -> Result<()> {
    let base = args.common.config()?;
    let (title, specs, forced) = match &args.figure {
        Some(name) => {
            let convention = args
                .common
                .frequency_convention
                .unwrap_or(FrequencyConvention::Angular);
            let fig = figure(name, convention).ok_or_else(|| {
                Error::Config(format!(
                    "unknown figure '{name}' (one of {})",
                    FIGURE_NAMES.join(", ")
                ))
            })?;
            // Figure settings first, then the user's config and flags on top.
            let specs: Vec<SweepSpec> = fig
                .sweeps
                .into_iter()
                .map(|s| SweepSpec {
                    overrides: s.overrides.into_iter().chain(base_pairs(&base)).collect(),
                    ..s
                })
                .collect();
            (
                format!("{} ({})", fig.name, fig.description),
                specs,
                Some(convention),
            )
        }
        None => {
            let axis = args.axis.expect("clap enforces --axis");
            let convention = base.convention(args.common.frequency_convention)?;
            let parse = |raw: &Option<String>| -> Result<f64> {
                parse_quantity(raw.as_deref().unwrap_or(""), axis.dimension(), convention)
                    .map_err(|m| Error::Config(format!("sweep range: {m}")))
            };
            let range = SweepRange {
                start: parse(&args.from)?,
                stop: parse(&args.to)?,
                points: args.points,
                spacing: args.spacing,
            };
            let spec = SweepSpec {
                label: axis.name().into(),
                axis,
                range,
                overrides: base_pairs(&base).collect(),
            };
            (
                format!("sweep over {axis}"),
                vec![spec],
                args.common.frequency_convention,
            )
        }
    };
    let empty = Config::default();
    let mut meta = metadata(&title, &specs, &empty, forced)?;
    meta.insert(
        1,
        format!(
            "frequency-convention = {}",
            specs_convention(&specs, forced)?
        ),
    );
    let rows = run_sweep(&specs, &empty, forced)?;
    let failed = rows.iter().filter(|r| r.error.is_some()).count();
    if failed > 0 {
        eprintln!(
            "warning: {failed} of {} points failed; see the error column",
            rows.len()
        );
    }
    write_csv(output(&args.common.out)?, &meta, &rows).map_err(io_err(args.common.out.as_deref()))
}

fn specs_convention(
    specs: &[SweepSpec],
    forced: Option<FrequencyConvention>,
) -> Result<FrequencyConvention> {
    match specs.first() {
        Some(s) => Ok(s.config(&Config::default())?.convention(forced)?),
        None => Ok(forced.unwrap_or_default()),
    }
}

fn base_pairs(cfg: &Config) -> impl Iterator<Item = (String, String)> + '_ {
    cfg.pairs().map(|(k, v)| (k.to_string(), v.to_string()))
}

fn montecarlo(args: &McArgs) -> Result<()> {
    let (params, input, phases, mut cfg) =
        if args.common.has_scenario() || !args.common.set.is_empty() {
            let sc = args
                .common
                .config()?
                .resolve(args.common.frequency_convention)?;
            let t_s = sc.protocol.pulse_time(&sc.params)?;
            let mut phases = vec![(CouplingPhase::Write, t_s)];
            if args.full_protocol {
                phases.push((CouplingPhase::Store, sc.protocol.tau));
                phases.push((CouplingPhase::Read, t_s));
            }
            let (_, _, _, defaults) = default_setup();
            let cfg = TrajectoryConfig {
                dt: 1e-3 / sc.params.omega_m,
                n_steps: 0,
                ..defaults
            };
            (sc.params, sc.input, phases, cfg)
        } else {
            default_setup()
        };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(n) = args.n_traj {
        cfg.n_traj = n;
    }
    if let Some(dt) = args.dt {
        cfg.dt = dt / params.omega_m;
    }
    let report = run_montecarlo(&params, &input, &phases, &cfg)?;
    let mut out = output(&args.common.out)?;
    writeln!(out, "{report}").map_err(io_err(args.common.out.as_deref()))?;
    out.flush().map_err(io_err(args.common.out.as_deref()))?;
    if report.max_abs_z() > 4.0 {
        return Err(Error::Numerical(format!(
            "Monte Carlo disagrees with the covariance engine: max |z| = {:.2}",
            report.max_abs_z()
        )));
    }
    Ok(())
}

fn list_presets() -> Result<()> {
    let mut text = String::new();
    for p in presets::all() {
        text.push_str(&format!("{}: {}\n", p.name, p.description));
        for line in p.scenario.dump().lines() {
            text.push_str(&format!("    {line}\n"));
        }
    }
    print_quietly(&text);
    Ok(())
}

/// Writes to stdout; a closed pipe (`omem ... | head`) is not an error.
fn print_quietly(text: &str) {
    let mut out = io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
}

fn dump_config(args: &Common) -> Result<()> {
    let sc = args.config()?.resolve(args.frequency_convention)?;
    let mut out = output(&args.out)?;
    out.write_all(sc.dump().as_bytes())
        .map_err(io_err(args.out.as_deref()))?;
    out.flush().map_err(io_err(args.out.as_deref()))
}

fn calibrate(out: &Option<PathBuf>) -> Result<()> {
    let report = convention_report()?;
    let mut w = output(out)?;
    w.write_all(report.as_bytes())
        .map_err(io_err(out.as_deref()))?;
    w.flush().map_err(io_err(out.as_deref()))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Fidelity(args) => fidelity(args),
        Command::Sweep(args) => sweep(args),
        Command::Montecarlo(args) => montecarlo(args),
        Command::Presets => list_presets(),
        Command::DumpConfig(args) => dump_config(args),
        Command::Calibrate { out } => calibrate(out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("omem: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
