use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use centralkit::config::{parse_config, Command, RunConfig, KEYS};
use centralkit::run::run;
use centralkit::Error;

const EXIT_USAGE: u8 = 1;
const EXIT_SOLVER: u8 = 2;
const EXIT_BATTERY: u8 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "centralkit",
    version,
    about = "Central schemes, spectral edge detection and spectral viscosity for 1D conservation laws",
    after_help = after_help()
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,

    /// Configuration file of `key = value` lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Directory for CSV and gnuplot output (default: `output` key, else `.`).
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// `key=value` applied after the config file; repeatable.
    #[arg(long = "override", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Sub {
    /// Evolve the configured problem and write solution.csv.
    Solve,
    /// Locate jumps of the Fourier data and write edges.csv and jump.csv.
    DetectEdges,
    /// Adaptive mollification of the Fourier data; writes mollified.csv.
    Mollify,
    /// Refinement study against the exact sine solution; writes convergence.csv.
    Convergence,
    /// Run every acceptance criterion; exit 3 if any fails.
    Battery,
}

impl From<Sub> for Command {
    fn from(s: Sub) -> Self {
        match s {
            Sub::Solve => Command::Solve,
            Sub::DetectEdges => Command::DetectEdges,
            Sub::Mollify => Command::Mollify,
            Sub::Convergence => Command::Convergence,
            Sub::Battery => Command::Battery,
        }
    }
}

fn after_help() -> String {
    let d = RunConfig::default();
    format!(
        "Config keys: {}\n\n\
         Defaults: model = {}, method = nt, n_cells = {}, N = {}, domain [0, 2pi) periodic, \
         initial = sine ({} + {} sin x), t_final = {}, cfl = 0.45 (nt) / 0.9 (kt), limiter_theta = 1, \
         rk_order = 2, sv_beta = {}, sv_s = 1, sv_c1 = {}, sv_c2 = {}, edge_threshold = {}, \
         mollifier_beta = {}, mollifier_cp = {}, resolutions = 64,128,256,512, exclusion_cells = {}.\n\n\
         Environment: CENTRALKIT_THREADS caps worker threads.\n\
         Exit codes: 0 success, 1 usage or config error, 2 solver failure, 3 battery failure.",
        KEYS.join(", "),
        d.model,
        d.n_cells,
        d.modes,
        d.sine_a,
        d.sine_b,
        d.t_final,
        d.sv_beta,
        d.sv_c1,
        d.sv_c2,
        d.edge_threshold,
        d.mollifier_beta,
        d.mollifier_cp,
        d.exclusion_cells,
    )
}

fn load(cli: &Cli) -> Result<RunConfig, String> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            parse_config(&text).map_err(|e| format!("{}: {e}", path.display()))?
        }
        None => RunConfig::default(),
    };
    for kv in &cli.overrides {
        cfg.apply_override(kv).map_err(|e| e.to_string())?;
    }
    Ok(cfg)
}

fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("CENTRALKIT_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|n| *n > 0).ok_or(format!("CENTRALKIT_THREADS = '{v}' is not a positive integer"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(EXIT_USAGE);
    }
    let cfg = match load(&cli) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let command: Command = cli.command.into();
    if let Some(c) = cfg.command {
        if c != command {
            eprintln!("error: config names subcommand {c:?} but {command:?} was requested");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    let dir = cli.output.clone().or_else(|| cfg.output.clone()).unwrap_or_else(|| PathBuf::from("."));
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match run(&cfg, command, &dir, &mut out) {
        Ok(outcome) => {
            for f in &outcome.files {
                let _ = writeln!(out, "wrote {}", f.display());
            }
            match outcome.battery {
                Some(false) => ExitCode::from(EXIT_BATTERY),
                _ => ExitCode::SUCCESS,
            }
        }
        Err(e @ Error::InvalidParameter(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_SOLVER)
        }
    }
}
