use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod config;

use commands::Failure;
use config::Settings;

/// Equilibria and dynamics of magnetic nanoparticle chains and rings.
#[derive(Debug, Parser)]
#[command(name = "colloid", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// Flat `key = value` file; flags override its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Repulsion amplitude.
    #[arg(long = "A", global = true)]
    a: Option<f64>,
    /// Attraction amplitude.
    #[arg(long = "B", global = true)]
    b: Option<f64>,
    /// Transverse dipolar amplitude.
    #[arg(long = "B0", global = true)]
    b0: Option<f64>,
    /// Repulsion exponent.
    #[arg(long, global = true, allow_negative_numbers = true)]
    alpha: Option<f64>,
    /// Attraction exponent.
    #[arg(long, global = true, allow_negative_numbers = true)]
    beta: Option<f64>,
    /// Output file (stdout when omitted).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// csv or json.
    #[arg(long, global = true)]
    format: Option<String>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Solver or convergence tolerance.
    #[arg(long, global = true, allow_negative_numbers = true)]
    tol: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Minimal-energy spacings of a straight chain.
    Spear {
        #[arg(long = "N")]
        n: Option<usize>,
        /// Comma-separated particle counts; writes the asymptotic table instead.
        #[arg(long)]
        sweep: Option<String>,
        #[arg(long)]
        max_iter: Option<usize>,
    },
    /// Critical ring radius.
    Ring {
        #[arg(long = "N")]
        n: Option<usize>,
        /// Comma-separated particle counts.
        #[arg(long)]
        sweep: Option<String>,
    },
    /// Damped 3-D dynamics from a seeded initial state.
    Dynamics {
        #[arg(long = "N")]
        n: Option<usize>,
        /// ring, spear or random.
        #[arg(long)]
        init: Option<String>,
        /// Noise amplitude relative to the bulk spacing.
        #[arg(long, allow_negative_numbers = true)]
        perturb: Option<f64>,
        #[arg(long)]
        mu: Option<f64>,
        #[arg(long)]
        radius: Option<f64>,
        #[arg(long)]
        nu: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        dt: Option<f64>,
        #[arg(long)]
        horizon: Option<f64>,
        /// Steps between recorded samples.
        #[arg(long)]
        cadence: Option<usize>,
        /// Also write the snapshot table here.
        #[arg(long)]
        snapshots: Option<PathBuf>,
    },
    /// Stability thresholds and characteristic distances.
    Thresholds,
    /// Decay bounds for inverses of diagonally dominant matrices.
    Gershgorin {
        /// random or spear.
        #[arg(long)]
        matrix: Option<String>,
        /// Matrix dimension.
        #[arg(long = "N")]
        n: Option<usize>,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        c: Option<f64>,
        #[arg(long)]
        d: Option<f64>,
        #[arg(long)]
        samples: Option<usize>,
    },
}

fn settings(cli: &Cli) -> Result<Settings, Failure> {
    let g = &cli.global;
    let mut s = match &g.config {
        Some(path) => Settings::load(path)?,
        None => Settings::default(),
    };
    s.set("A", g.a);
    s.set("B", g.b);
    s.set("B0", g.b0);
    s.set("alpha", g.alpha);
    s.set("beta", g.beta);
    s.set("out", g.out.as_ref().map(|p| p.display()));
    s.set("format", g.format.as_ref());
    s.set("seed", g.seed);
    s.set("tol", g.tol);
    match &cli.command {
        Command::Spear { n, sweep, max_iter } => {
            s.set("N", *n);
            s.set("sweep", sweep.as_ref());
            s.set("max_iter", *max_iter);
        }
        Command::Ring { n, sweep } => {
            s.set("N", *n);
            s.set("sweep", sweep.as_ref());
        }
        Command::Dynamics { n, init, perturb, mu, radius, nu, dt, horizon, cadence, snapshots } => {
            s.set("N", *n);
            s.set("init", init.as_ref());
            s.set("perturb", *perturb);
            s.set("mu", *mu);
            s.set("radius", *radius);
            s.set("nu", *nu);
            s.set("dt", *dt);
            s.set("horizon", *horizon);
            s.set("cadence", *cadence);
            s.set("snapshots", snapshots.as_ref().map(|p| p.display()));
        }
        Command::Thresholds => {}
        Command::Gershgorin { matrix, n, gamma, c, d, samples } => {
            s.set("matrix", matrix.as_ref());
            s.set("N", *n);
            s.set("gamma", *gamma);
            s.set("c", *c);
            s.set("d", *d);
            s.set("samples", *samples);
        }
    }
    Ok(s)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = settings(&cli).and_then(|s| match cli.command {
        Command::Spear { .. } => commands::cmd_spear(&s),
        Command::Ring { .. } => commands::cmd_ring(&s),
        Command::Dynamics { .. } => commands::cmd_dynamics(&s),
        Command::Thresholds => commands::cmd_thresholds(&s),
        Command::Gershgorin { .. } => commands::cmd_gershgorin(&s),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("colloid: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
