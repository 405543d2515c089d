//! Subcommand bodies. Each reads a merged [`Settings`], validates it, runs the
//! solver and writes a CSV or JSON table.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;

use colloid_core::dynamics::{
    jitter, random_arc_state, run, write_snapshots_csv, PhysicalParams, RunOptions, RunSummary, SystemState,
};
use colloid_core::gershgorin::{check_inverse_decay, sample_decay_matrix, scaled_spear_hessian, verify_hypotheses, Counterexample, DecayMatrixSpec, HypothesisReport, MAX_DIM};
use colloid_core::potential::{alpha_dag, alpha_star, ROOT_TOL};
use colloid_core::ring::{ring_configuration, ring_radius};
use colloid_core::spear::{asymptotic_report, hessian_bounds, solve_spear, MAX_SPEAR_N};
use colloid_core::{characteristic_distances, ordering_margins, DistanceSet, Error, LJParams, OrderingMargins};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{ConfigError, Settings};

#[derive(Debug)]
pub enum Failure {
    Config(ConfigError),
    Convergence(String),
    Io(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) => 1,
            Self::Convergence(_) => 2,
            Self::Io(_) => 3,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Config(e) => write!(f, "config error: {e}"),
            Self::Convergence(m) => write!(f, "solver failure: {m}"),
            Self::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Self::Config(e)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParams { key, reason } => Self::Config(ConfigError::new(key, reason)),
            Error::Domain(m) => Self::Config(ConfigError::new("input", m)),
            other => Self::Convergence(other.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

fn format(s: &Settings, default: Format) -> Result<Format, ConfigError> {
    match s.raw("format") {
        None => Ok(default),
        Some("csv") => Ok(Format::Csv),
        Some("json") => Ok(Format::Json),
        Some(other) => Err(ConfigError::new("format", format!("expected csv or json, got `{other}`"))),
    }
}

fn json_only(s: &Settings) -> Result<(), ConfigError> {
    match format(s, Format::Json)? {
        Format::Json => Ok(()),
        Format::Csv => Err(ConfigError::new("format", "this command only writes json")),
    }
}

/// Writes to `path`, or to stdout when absent.
fn emit(path: Option<PathBuf>, text: &str) -> Outcome {
    match path {
        Some(p) => std::fs::write(&p, text).map_err(|e| Failure::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| Failure::Io(format!("stdout: {e}")))
        }
    }
}

fn out_path(s: &Settings) -> Option<PathBuf> {
    s.raw("out").map(PathBuf::from)
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut text = serde_json::to_string_pretty(v).expect("reports serialize");
    text.push('\n');
    text
}

/// 17 significant digits.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv<const K: usize>(header: [&str; K], rows: impl IntoIterator<Item = [String; K]>) -> String {
    let mut text = header.join(",");
    text.push('\n');
    for row in rows {
        let _ = writeln!(text, "{}", row.join(","));
    }
    text
}

fn lj(s: &Settings) -> Result<LJParams, Failure> {
    let get = |k: &str, d: f64| s.get_or(k, d);
    Ok(LJParams::new(get("A", 1.0)?, get("B", 1.0)?, get("B0", 1.0)?, get("alpha", 12.0)?, get("beta", 3.0)?)?)
}

fn count(s: &Settings, key: &str, default: usize, min: usize, max: usize) -> Result<usize, ConfigError> {
    let n = s.get_or(key, default)?;
    if n < min || n > max {
        return Err(ConfigError::new(key, format!("must lie in [{min}, {max}], got {n}")));
    }
    Ok(n)
}

fn sweep(s: &Settings, min: usize, max: usize) -> Result<Option<Vec<usize>>, ConfigError> {
    let Some(ns) = s.list::<usize>("sweep")? else {
        return Ok(None);
    };
    if ns.is_empty() || ns.windows(2).any(|w| w[1] <= w[0]) {
        return Err(ConfigError::new("sweep", "must be a strictly increasing list"));
    }
    if let Some(&bad) = ns.iter().find(|&&n| n < min || n > max) {
        return Err(ConfigError::new("sweep", format!("entries must lie in [{min}, {max}], got {bad}")));
    }
    Ok(Some(ns))
}

#[derive(Serialize)]
struct SpearReport {
    #[serde(rename = "N")]
    n: usize,
    params: LJParams,
    distances: DistanceSet,
    energy: f64,
    iterations: usize,
    grad_norm: f64,
    convexity_certified: bool,
    spacing: Vec<f64>,
    residual: Vec<f64>,
}

pub fn cmd_spear(s: &Settings) -> Outcome {
    let p = lj(s)?;
    let tol = s.positive("tol", 1e-10)?;
    let max_iter = s.get_or("max_iter", 100usize)?;
    let fmt = format(s, Format::Csv)?;
    let d = characteristic_distances(&p);
    if let Some(ns) = sweep(s, 4, MAX_SPEAR_N)? {
        let table = asymptotic_report(&p, &ns, tol, max_iter)?;
        let text = match fmt {
            Format::Json => to_json(&table),
            Format::Csv => csv(
                ["N", "center", "quarter", "boundary", "center_error", "quarter_error", "boundary_to_tilde", "boundary_to_bar", "min_spacing", "iterations"],
                table.rows.iter().map(|r| {
                    [
                        r.n.to_string(),
                        num(r.center),
                        num(r.quarter),
                        num(r.boundary),
                        num(r.center_error),
                        num(r.quarter_error),
                        num(r.boundary_to_tilde),
                        num(r.boundary_to_bar),
                        num(r.min_spacing),
                        r.iterations.to_string(),
                    ]
                }),
            ),
        };
        return emit(out_path(s), &text);
    }
    let n = count(s, "N", 16, 2, MAX_SPEAR_N)?;
    let sol = solve_spear(n, &p, tol, max_iter)?;
    let text = match fmt {
        Format::Json => to_json(&SpearReport {
            n,
            params: p,
            distances: d,
            energy: sol.energy,
            iterations: sol.iterations,
            grad_norm: sol.grad_norm,
            convexity_certified: sol.certificate.is_some_and(|c| c.certifies_convexity()),
            spacing: sol.spacing.as_slice().to_vec(),
            residual: sol.gradient.clone(),
        }),
        Format::Csv => csv(
            ["k", "h_k", "h_bar", "h_check", "h_hat", "residual_k"],
            sol.spacing
                .as_slice()
                .iter()
                .zip(&sol.gradient)
                .enumerate()
                .map(|(k, (h, r))| [(k + 1).to_string(), num(*h), num(d.h_bar), num(d.h_check), num(d.h_hat), num(*r)]),
        ),
    };
    emit(out_path(s), &text)
}

#[derive(Serialize)]
struct RingLine {
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "A_tilde")]
    a_tilde: f64,
    #[serde(rename = "B_tilde")]
    b_tilde: f64,
    r_star: f64,
    nn_distance: f64,
    nn_error: f64,
    h_bar: f64,
}

pub fn cmd_ring(s: &Settings) -> Outcome {
    let p = lj(s)?;
    let fmt = format(s, Format::Csv)?;
    let ns = match sweep(s, 2, 1 << 24)? {
        Some(ns) => ns,
        None => vec![count(s, "N", 12, 2, 1 << 24)?],
    };
    let h_bar = characteristic_distances(&p).h_bar;
    let lines = ns
        .iter()
        .map(|&n| {
            let r = ring_radius(n, &p)?;
            Ok(RingLine {
                n,
                a_tilde: r.a_tilde,
                b_tilde: r.b_tilde,
                r_star: r.radius,
                nn_distance: r.nn_distance,
                nn_error: (r.nn_distance - h_bar).abs(),
                h_bar,
            })
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    let text = match fmt {
        Format::Json => to_json(&lines),
        Format::Csv => csv(
            ["N", "A_tilde", "B_tilde", "r_star", "nn_distance", "nn_error", "h_bar"],
            lines.iter().map(|l| {
                [l.n.to_string(), num(l.a_tilde), num(l.b_tilde), num(l.r_star), num(l.nn_distance), num(l.nn_error), num(l.h_bar)]
            }),
        ),
    };
    emit(out_path(s), &text)
}

fn initial_state(s: &Settings, p: &LJParams, n: usize, rng: &mut ChaCha8Rng) -> Result<SystemState, Failure> {
    let h_bar = characteristic_distances(p).h_bar;
    let amplitude = s.get_or("perturb", 0.05)?;
    let init = s.raw("init").unwrap_or("random");
    let clean = match init {
        "random" => return Ok(random_arc_state(n, h_bar, amplitude, rng)?),
        "spear" => SystemState::spear(&solve_spear(n, p, 1e-13, 200)?.spacing),
        "ring" => ring_configuration(n, ring_radius(n, p)?.radius)?,
        other => return Err(ConfigError::new("init", format!("expected ring, spear or random, got `{other}`")).into()),
    };
    Ok(jitter(&clean, amplitude, h_bar, rng)?)
}

pub fn cmd_dynamics(s: &Settings) -> Outcome {
    let p = lj(s)?;
    let phys = PhysicalParams::new(p, s.positive("mu", 1.0)?, s.positive("radius", 0.5)?, s.positive("nu", 0.2)?)?;
    let n = count(s, "N", 12, 2, 4096)?;
    let fmt = format(s, Format::Json)?;
    let snapshots = s.raw("snapshots").map(PathBuf::from);
    let opts = RunOptions {
        horizon: s.positive("horizon", 1e4)?,
        dt: s.positive("dt", 1e-2)?,
        cadence: count(s, "cadence", 100, 1, usize::MAX)?,
        tol: s.positive("tol", 1e-6)?,
        keep_snapshots: fmt == Format::Csv || snapshots.is_some(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(s.get_or("seed", 0u64)?);
    let initial = initial_state(s, &p, n, &mut rng)?;
    let traj = run(&initial, &phys, &opts)?;
    let table = || {
        let mut buf = Vec::new();
        write_snapshots_csv(&mut buf, &traj.snapshots).expect("writing to memory");
        String::from_utf8(buf).expect("ascii table")
    };
    if let Some(path) = snapshots {
        emit(Some(path), &table())?;
    }
    let summary = RunSummary::new(&traj, &initial);
    let text = match fmt {
        Format::Json => to_json(&summary),
        Format::Csv => table(),
    };
    emit(out_path(s), &text)?;
    if !traj.converged {
        return Err(Failure::Convergence(format!(
            "gradient {:.3e} still above tol after t = {}",
            summary.final_grad_norm, summary.final_time
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct ThresholdReport {
    beta: f64,
    alpha_dag: f64,
    alpha_star: f64,
    params: LJParams,
    distances: DistanceSet,
    ordering: OrderingMargins,
    convexity_certified: bool,
}

pub fn cmd_thresholds(s: &Settings) -> Outcome {
    json_only(s)?;
    let p = lj(s)?;
    let tol = s.positive("tol", ROOT_TOL)?;
    let report = ThresholdReport {
        beta: p.beta(),
        alpha_dag: alpha_dag(p.beta(), tol)?,
        alpha_star: alpha_star(p.beta(), tol)?,
        params: p,
        distances: characteristic_distances(&p),
        ordering: ordering_margins(&p),
        convexity_certified: hessian_bounds(&p).certifies_convexity(),
    };
    emit(out_path(s), &to_json(&report))
}

#[derive(Serialize)]
struct GershgorinReport {
    matrix: String,
    #[serde(rename = "N")]
    n: usize,
    samples: usize,
    gamma: f64,
    c: f64,
    d: f64,
    hypotheses: HypothesisReport,
    hypotheses_hold: bool,
    r_plus: f64,
    kappa: Option<f64>,
    max_ratio: Option<f64>,
    counterexample: Option<Counterexample>,
}

pub fn cmd_gershgorin(s: &Settings) -> Outcome {
    json_only(s)?;
    let kind = s.raw("matrix").unwrap_or("random").to_string();
    let n = count(s, "N", 100, 2, MAX_DIM)?;
    let samples = count(s, "samples", 1, 1, 100_000)?;
    let mut rng = ChaCha8Rng::seed_from_u64(s.get_or("seed", 0u64)?);
    let (matrices, spec) = match kind.as_str() {
        "random" => {
            let spec = DecayMatrixSpec::new(s.positive("gamma", 4.0)?, s.get_or("c", 0.01)?, s.positive("d", 1.0)?)?;
            ((0..samples).map(|_| sample_decay_matrix(n, &spec, &mut rng)).collect::<Vec<_>>(), spec)
        }
        "spear" => {
            let p = lj(s)?;
            let (m, spec) = scaled_spear_hessian(n + 1, characteristic_distances(&p).h_bar, &p)?;
            (vec![m], spec)
        }
        other => return Err(ConfigError::new("matrix", format!("expected random or spear, got `{other}`")).into()),
    };
    let mut hypotheses = None;
    let mut hold = true;
    let mut max_ratio: Option<f64> = None;
    let mut counterexample = None;
    for m in &matrices {
        let h = verify_hypotheses(m, &spec)?;
        if hypotheses.is_none() || (hold && !h.all_pass()) {
            hypotheses = Some(h);
        }
        hold &= h.all_pass();
        if spec.kappa().is_some() {
            let r = check_inverse_decay(m, &spec)?;
            if r.singular {
                return Err(Failure::Convergence("matrix is singular".into()));
            }
            max_ratio = Some(max_ratio.map_or(r.max_ratio, |v| v.max(r.max_ratio)));
            counterexample = counterexample.or(r.counterexample);
        }
    }
    let report = GershgorinReport {
        matrix: kind,
        n,
        samples: matrices.len(),
        gamma: spec.gamma(),
        c: spec.c(),
        d: spec.d(),
        hypotheses: hypotheses.expect("at least one matrix"),
        hypotheses_hold: hold,
        r_plus: spec.r_plus(),
        kappa: spec.kappa(),
        max_ratio,
        counterexample,
    };
    emit(out_path(s), &to_json(&report))
}
