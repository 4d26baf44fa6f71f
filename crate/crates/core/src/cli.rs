//! Command implementations behind the `phasebal` binary.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid configuration,
//! 3 boundary violation during a run, 4 interpolant certification failure.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::hint::black_box;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::control::ControlGains;
use crate::curve::{self, CurveSpec, Orbit};
use crate::error::Error;
use crate::scenario::ScenarioFile;
use crate::sim::{self, Scenario, TrajectoryLog};
use crate::specfun::{SigmaInterpolant, CERT_OVERSAMPLE, MAX_INTERP_ERROR};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_BOUNDARY: i32 = 3;
pub const EXIT_CERTIFICATION: i32 = 4;

pub const TRAJECTORY_HEADER: &str = "time,agent,x,y,theta,u,zeta,e_norm,psi";
pub const CURVE_HEADER: &str = "t,x,y,kappa,sigma,psi";
pub const BOUNDARY_HEADER: &str = "t,outer_x,outer_y,inner_x,inner_y";

/// Default number of timed calls per path in `bench`.
pub const BENCH_CALLS: usize = 1_000_000;

#[derive(Debug)]
pub enum CliError {
    Io { path: PathBuf, source: io::Error },
    Config(String),
    Boundary(Error),
    Certification(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => EXIT_IO,
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Boundary(_) => EXIT_BOUNDARY,
            CliError::Certification(_) => EXIT_CERTIFICATION,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            CliError::Config(msg) => f.write_str(msg),
            CliError::Boundary(e) | CliError::Certification(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::BoundaryViolation { .. } => CliError::Boundary(e),
            Error::Certification { .. } => CliError::Certification(e),
            other => CliError::Config(other.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn load_file(path: &Path) -> CliResult<ScenarioFile> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    ScenarioFile::from_json(&text)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn load_scenario(path: &Path) -> CliResult<Scenario> {
    Ok(load_file(path)?.to_scenario()?)
}

/// Prints per-agent feasibility and every violation.
pub fn cmd_validate(config: &Path, out: &mut dyn Write) -> CliResult<()> {
    let scenario = load_scenario(config)?;
    let delta = scenario.gains.delta;
    let errors = sim::initial_errors(&scenario);
    let w = |out: &mut dyn Write, s: String| writeln!(out, "{s}").map_err(io_err(Path::new("<stdout>")));
    for (k, e) in errors.iter().enumerate() {
        let verdict = if *e < delta { "ok" } else { "INFEASIBLE" };
        w(out, format!("agent {k}: |e(0)| = {e:.12} delta = {delta} {verdict}"))?;
    }
    let problems = sim::validate(&scenario);
    if problems.is_empty() {
        w(out, "valid".into())?;
        return Ok(());
    }
    let msg: Vec<String> = problems.iter().map(|p| p.to_string()).collect();
    Err(CliError::Config(msg.join("\n")))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub completed: bool,
    pub failure: Option<String>,
    pub n_agents: usize,
    pub steps: usize,
    pub final_time: f64,
    pub final_order_parameter: f64,
    pub final_max_e_norm: f64,
    pub max_e_norm: f64,
    pub min_margin: f64,
    pub mean_u_last_10s: Vec<f64>,
    pub max_abs_zeta_last_10s: f64,
    pub final_psi: Vec<f64>,
    pub pairwise_separations: Vec<f64>,
    pub perimeter: f64,
    pub wall_clock_s: f64,
    pub gains: ControlGains,
    pub dt: f64,
}

impl RunSummary {
    pub fn new(scenario: &Scenario, log: &TrajectoryLog, wall_clock_s: f64) -> Self {
        let st = &log.stats;
        RunSummary {
            completed: log.is_complete(),
            failure: log.failure.as_ref().map(|e| e.to_string()),
            n_agents: log.n_agents,
            steps: st.steps_completed,
            final_time: st.final_time,
            final_order_parameter: st.final_order_parameter,
            final_max_e_norm: st.final_max_e_norm,
            max_e_norm: st.max_e_norm,
            min_margin: st.min_margin,
            mean_u_last_10s: st.mean_u_tail.clone(),
            max_abs_zeta_last_10s: st.max_abs_zeta_tail,
            final_psi: st.final_psis.clone(),
            pairwise_separations: sim::pairwise_separations(&st.final_psis),
            perimeter: curve::perimeter(&scenario.curve),
            wall_clock_s,
            gains: scenario.gains,
            dt: scenario.dt,
        }
    }
}

/// CSV text of a trajectory log, header included.
pub fn trajectory_csv(log: &TrajectoryLog) -> String {
    let mut s = String::with_capacity(64 * (log.rows.len() + 1));
    s.push_str(TRAJECTORY_HEADER);
    s.push('\n');
    for r in &log.rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{}",
            r.time, r.agent, r.x, r.y, r.theta, r.u, r.zeta, r.e_norm, r.psi
        );
    }
    s
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    let f = fs::File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(f);
    w.write_all(contents.as_bytes()).map_err(io_err(path))?;
    w.flush().map_err(io_err(path))
}

/// Runs a scenario and writes `trajectory.csv` and `summary.json` to `out_dir`.
pub fn cmd_run(
    config: &Path,
    out_dir: &Path,
    decimation: Option<usize>,
    out: &mut dyn Write,
) -> CliResult<RunSummary> {
    let mut scenario = load_scenario(config)?;
    if let Some(d) = decimation {
        scenario.log_decimation = d;
    }
    let problems = sim::validate(&scenario);
    if !problems.is_empty() {
        let msg: Vec<String> = problems.iter().map(|p| p.to_string()).collect();
        return Err(CliError::Config(msg.join("\n")));
    }
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;

    let started = Instant::now();
    let log = sim::run(&scenario)?;
    let elapsed = started.elapsed().as_secs_f64();

    write_file(&out_dir.join("trajectory.csv"), &trajectory_csv(&log))?;
    let summary = RunSummary::new(&scenario, &log, elapsed);
    let json = serde_json::to_string_pretty(&summary).expect("summary serializes");
    write_file(&out_dir.join("summary.json"), &json)?;

    let _ = writeln!(
        out,
        "steps {} | order parameter {:.3e} | max |e| {:.4} | mean u (last 10 s) {:?} | {:.2} s",
        summary.steps,
        summary.final_order_parameter,
        summary.max_e_norm,
        summary.mean_u_last_10s,
        elapsed
    );
    match log.failure {
        Some(e) => Err(CliError::Boundary(e)),
        None => Ok(summary),
    }
}

/// Writes `curve.csv` (one closed period, σ and ψ measured from t = −π)
/// and `boundary.csv` (offsets at distance δ).
pub fn cmd_curve(config: &Path, samples: usize, out_dir: &Path, err: &mut dyn Write) -> CliResult<()> {
    let file = load_file(config)?;
    let spec = file.curve.to_spec()?;
    let delta = file.gains.delta;
    if samples < 16 {
        return Err(CliError::Config(format!("--samples must be >= 16, got {samples}")));
    }
    let boundary = curve::offset_boundary(&spec, delta, samples)?;
    if let Some(w) = &boundary.warning {
        let _ = writeln!(err, "warning: {w}");
    }
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    write_file(&out_dir.join("curve.csv"), &curve_csv(&spec, samples))?;

    let mut s = String::from(BOUNDARY_HEADER);
    s.push('\n');
    for ((t, o), i) in boundary.t.iter().zip(&boundary.outer).zip(&boundary.inner) {
        let _ = writeln!(s, "{t},{},{},{},{}", o.0, o.1, i.0, i.1);
    }
    write_file(&out_dir.join("boundary.csv"), &s)
}

/// CSV text of `samples` points over the closed period t ∈ [−π, π].
pub fn curve_csv(spec: &CurveSpec, samples: usize) -> String {
    let orbit = Orbit::new(*spec);
    let start = orbit.sigma_direct(-PI);
    let gamma = orbit.perimeter();
    let mut s = String::from(CURVE_HEADER);
    s.push('\n');
    for i in 0..samples {
        let t = -PI + 2.0 * PI * i as f64 / (samples - 1) as f64;
        let (x, y) = curve::point_on_curve(spec, t);
        let sigma = orbit.sigma_direct(t) - start;
        let psi = curve::wrap_phase(2.0 * PI * sigma / gamma);
        let kappa = curve::parametric_curvature(spec, t);
        let _ = writeln!(s, "{t},{x},{y},{kappa},{sigma},{psi}");
    }
    s
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub closed_form: bool,
    pub calls: usize,
    pub grid_size: usize,
    pub direct_ns_per_call: f64,
    pub interp_ns_per_call: f64,
    pub direct_calls_per_s: f64,
    pub interp_calls_per_s: f64,
    pub speedup: f64,
    pub certified_max_error: f64,
    pub sweep_max_error: f64,
}

fn sample_params(n: usize) -> Vec<f64> {
    // Golden-ratio sequence: deterministic and evenly spread over (−π, π).
    let g = 0.618_033_988_749_894_9;
    (0..n).map(|j| -PI + 2.0 * PI * ((j as f64 * g) % 1.0)).collect()
}

fn time_per_call<F: Fn(f64) -> f64>(f: F, params: &[f64], calls: usize) -> f64 {
    let mut best = f64::INFINITY;
    for _ in 0..3 {
        let started = Instant::now();
        let mut acc = 0.0;
        let mut done = 0;
        while done < calls {
            for &t in params.iter().take(calls - done) {
                acc += f(black_box(t));
            }
            done += params.len().min(calls - done);
        }
        black_box(acc);
        best = best.min(started.elapsed().as_secs_f64() / calls as f64);
    }
    best * 1e9
}

/// Times direct σ(t) against the interpolant on the same parameters.
pub fn run_bench(spec: &CurveSpec, grid: usize, calls: usize) -> crate::error::Result<BenchReport> {
    if spec.is_circle() {
        return Ok(BenchReport {
            closed_form: true,
            calls: 0,
            grid_size: 0,
            direct_ns_per_call: 0.0,
            interp_ns_per_call: 0.0,
            direct_calls_per_s: 0.0,
            interp_calls_per_s: 0.0,
            speedup: 1.0,
            certified_max_error: 0.0,
            sweep_max_error: 0.0,
        });
    }
    let interp = SigmaInterpolant::build(spec, grid)?;
    let orbit = Orbit::new(*spec);
    let params = sample_params(4096);

    let sweep = sample_params(CERT_OVERSAMPLE * 4 * grid);
    let sweep_max_error = sweep
        .iter()
        .map(|&t| (interp.eval(t) - orbit.sigma_direct(t)).abs())
        .fold(0.0, f64::max);
    if !(sweep_max_error <= MAX_INTERP_ERROR) {
        return Err(Error::Certification {
            max_error: sweep_max_error,
            bound: MAX_INTERP_ERROR,
        });
    }

    let direct = time_per_call(|t| orbit.sigma_direct(t), &params, calls);
    let fast = time_per_call(|t| interp.eval(t), &params, calls);
    Ok(BenchReport {
        closed_form: false,
        calls,
        grid_size: interp.grid_size(),
        direct_ns_per_call: direct,
        interp_ns_per_call: fast,
        direct_calls_per_s: 1e9 / direct,
        interp_calls_per_s: 1e9 / fast,
        speedup: direct / fast,
        certified_max_error: interp.max_abs_error(),
        sweep_max_error,
    })
}

pub fn cmd_bench(config: &Path, calls: usize, out: &mut dyn Write) -> CliResult<BenchReport> {
    let file = load_file(config)?;
    let spec = file.curve.to_spec()?;
    let report = run_bench(&spec, file.sim.sigma_grid, calls)?;
    let mut text = String::new();
    if report.closed_form {
        text.push_str("circle: sigma is closed-form (r * (t - pi/2)); interpolation unnecessary\n");
    } else {
        let _ = writeln!(text, "calls per path        {}", report.calls);
        let _ = writeln!(text, "grid cells            {}", report.grid_size);
        let _ = writeln!(
            text,
            "direct (Carlson)      {:.1} ns/call  {:.3e} calls/s",
            report.direct_ns_per_call, report.direct_calls_per_s
        );
        let _ = writeln!(
            text,
            "interpolated          {:.1} ns/call  {:.3e} calls/s",
            report.interp_ns_per_call, report.interp_calls_per_s
        );
        let _ = writeln!(text, "speedup               {:.2}x", report.speedup);
        let _ = writeln!(text, "certified max error   {:.3e}", report.certified_max_error);
        let _ = writeln!(text, "sweep max error       {:.3e}", report.sweep_max_error);
    }
    let json = serde_json::to_string(&report).expect("report serializes");
    out.write_all(text.as_bytes())
        .and_then(|_| writeln!(out, "{json}"))
        .map_err(io_err(Path::new("<stdout>")))?;
    Ok(report)
}
