//! Closed-loop integration of the unicycle swarm.
//!
//! Every agent moves at unit speed with ẋ = cos θ, ẏ = sin θ, θ̇ = u. The
//! coupled system is advanced with classical RK4, and the control of every
//! agent is re-evaluated at each stage from the full stage state.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::control::{self, ControlGains, ControlOutput};
use crate::curve::{self, CurveSpec, Orbit};
use crate::error::{Error, Result};

pub const DEFAULT_DT: f64 = 1e-3;
pub const DEFAULT_T_FINAL: f64 = 100.0;
pub const DEFAULT_DECIMATION: usize = 10;
pub const DEFAULT_SIGMA_GRID: usize = 1024;
/// Window at the end of a run used for steady-state statistics (s).
pub const TAIL_WINDOW: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgentState {
    pub x: f64,
    pub y: f64,
    /// Heading, kept unwrapped.
    pub theta: f64,
}

impl AgentState {
    pub fn new(x: f64, y: f64, theta: f64) -> Self {
        AgentState { x, y, theta }
    }

    fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.theta.is_finite()
    }

    fn axpy(&self, h: f64, rate: &AgentState) -> AgentState {
        AgentState {
            x: self.x + h * rate.x,
            y: self.y + h * rate.y,
            theta: self.theta + h * rate.theta,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SigmaMode {
    #[default]
    Direct,
    Interpolated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub curve: CurveSpec,
    pub gains: ControlGains,
    pub agents: Vec<AgentState>,
    pub dt: f64,
    pub t_final: f64,
    pub speed: f64,
    pub sigma_mode: SigmaMode,
    pub sigma_grid: usize,
    pub log_decimation: usize,
}

impl Scenario {
    pub fn new(curve: CurveSpec, gains: ControlGains, agents: Vec<AgentState>) -> Self {
        Scenario {
            curve,
            gains,
            agents,
            dt: DEFAULT_DT,
            t_final: DEFAULT_T_FINAL,
            speed: 1.0,
            sigma_mode: SigmaMode::Direct,
            sigma_grid: DEFAULT_SIGMA_GRID,
            log_decimation: DEFAULT_DECIMATION,
        }
    }

    pub fn steps(&self) -> usize {
        (self.t_final / self.dt).round() as usize
    }
}

/// A problem found by [`validate`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    Infeasible { agent: usize, e_norm: f64, delta: f64 },
    Parameter(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Infeasible {
                agent,
                e_norm,
                delta,
            } => write!(
                f,
                "agents[{agent}] infeasible: |e(0)| = {e_norm} is not < delta = {delta}"
            ),
            Violation::Parameter(msg) => f.write_str(msg),
        }
    }
}

/// |e_k(0)| for every agent.
pub fn initial_errors(scenario: &Scenario) -> Vec<f64> {
    scenario
        .agents
        .iter()
        .map(|s| {
            let (ex, ey) = curve::position_error(&scenario.curve, s);
            ex.hypot(ey)
        })
        .collect()
}

pub fn validate(scenario: &Scenario) -> Vec<Violation> {
    let mut out: Vec<Violation> = scenario
        .gains
        .violations()
        .into_iter()
        .map(Violation::Parameter)
        .collect();
    let mut param = |msg: String| out.push(Violation::Parameter(msg));

    if scenario.agents.is_empty() {
        param("agents must contain at least one agent".into());
    }
    if !(scenario.dt.is_finite() && scenario.dt > 0.0) {
        param(format!("sim.dt must be > 0, got {}", scenario.dt));
    }
    if !(scenario.t_final.is_finite() && scenario.t_final > scenario.dt) {
        param(format!(
            "sim.t_final must be > sim.dt, got {}",
            scenario.t_final
        ));
    }
    if scenario.speed != 1.0 {
        param(format!("speed must be 1.0, got {}", scenario.speed));
    }
    if scenario.log_decimation == 0 {
        param("sim.log_decimation must be >= 1".into());
    }
    if scenario.sigma_mode == SigmaMode::Interpolated
        && scenario.sigma_grid < crate::specfun::MIN_GRID
    {
        param(format!(
            "sim.sigma_grid must be >= {}, got {}",
            crate::specfun::MIN_GRID,
            scenario.sigma_grid
        ));
    }
    for (k, s) in scenario.agents.iter().enumerate() {
        if !s.is_finite() {
            param(format!("agents[{k}] has non-finite fields"));
        }
    }

    let delta = scenario.gains.delta;
    for (agent, e_norm) in initial_errors(scenario).into_iter().enumerate() {
        if !(e_norm < delta) {
            out.push(Violation::Infeasible {
                agent,
                e_norm,
                delta,
            });
        }
    }
    out
}

/// (ẋ, ẏ, θ̇) packed into an [`AgentState`].
pub fn derivative(state: &AgentState, u: f64, speed: f64) -> AgentState {
    let (s, c) = state.theta.sin_cos();
    AgentState {
        x: speed * c,
        y: speed * s,
        theta: u,
    }
}

/// |N⁻¹ Σ exp(iψ_k)|.
pub fn order_parameter(psis: &[f64]) -> f64 {
    let n = psis.len() as f64;
    let (s, c) = psis
        .iter()
        .fold((0.0, 0.0), |(s, c), p| (s + p.sin(), c + p.cos()));
    (s / n).hypot(c / n)
}

/// Circular distance in [0, π] between every pair of phases.
pub fn pairwise_separations(psis: &[f64]) -> Vec<f64> {
    let mut out = Vec::new();
    for i in 0..psis.len() {
        for j in i + 1..psis.len() {
            let d = (psis[j] - psis[i]).rem_euclid(2.0 * PI);
            out.push(d.min(2.0 * PI - d));
        }
    }
    out
}

/// Everything a step needs besides the states themselves.
#[derive(Debug, Clone)]
pub struct Simulator {
    orbit: Orbit,
    gains: ControlGains,
    speed: f64,
}

impl Simulator {
    pub fn new(orbit: Orbit, gains: ControlGains) -> Self {
        Simulator {
            orbit,
            gains,
            speed: 1.0,
        }
    }

    pub fn for_scenario(scenario: &Scenario) -> Result<Self> {
        let orbit = match scenario.sigma_mode {
            SigmaMode::Direct => Orbit::new(scenario.curve),
            SigmaMode::Interpolated => Orbit::with_interpolant(scenario.curve, scenario.sigma_grid)?,
        };
        Ok(Simulator {
            orbit,
            gains: scenario.gains,
            speed: scenario.speed,
        })
    }

    pub fn orbit(&self) -> &Orbit {
        &self.orbit
    }

    /// Controls of all agents at one snapshot. `stage` and `time` only
    /// label a boundary violation.
    pub fn controls(&self, states: &[AgentState], stage: usize, time: f64) -> Result<Vec<ControlOutput>> {
        let psis = control::phases(&self.orbit, states);
        states
            .iter()
            .enumerate()
            .map(|(k, s)| {
                control::zeta(&self.orbit, s, &psis, k, &self.gains).map_err(|e| match e {
                    Error::BoundaryViolation { agent, margin, .. } => Error::BoundaryViolation {
                        agent,
                        stage,
                        time,
                        margin,
                    },
                    other => other,
                })
            })
            .collect()
    }

    fn rates(&self, states: &[AgentState], outs: &[ControlOutput]) -> Vec<AgentState> {
        states
            .iter()
            .zip(outs)
            .map(|(s, o)| derivative(s, o.u, self.speed))
            .collect()
    }

    fn stage(&self, states: &[AgentState], h: f64, rates: &[AgentState], stage: usize, time: f64) -> Result<Vec<AgentState>> {
        let probe: Vec<AgentState> = states.iter().zip(rates).map(|(s, r)| s.axpy(h, r)).collect();
        let outs = self.controls(&probe, stage, time)?;
        Ok(self.rates(&probe, &outs))
    }

    fn advance(&self, states: &[AgentState], first: &[ControlOutput], time: f64, dt: f64) -> Result<Vec<AgentState>> {
        let k1 = self.rates(states, first);
        let k2 = self.stage(states, 0.5 * dt, &k1, 2, time + 0.5 * dt)?;
        let k3 = self.stage(states, 0.5 * dt, &k2, 3, time + 0.5 * dt)?;
        let k4 = self.stage(states, dt, &k3, 4, time + dt)?;
        let next: Vec<AgentState> = (0..states.len())
            .map(|i| {
                let s = &states[i];
                let w = |f: fn(&AgentState) -> f64| {
                    f(&k1[i]) + 2.0 * f(&k2[i]) + 2.0 * f(&k3[i]) + f(&k4[i])
                };
                AgentState {
                    x: s.x + dt / 6.0 * w(|r| r.x),
                    y: s.y + dt / 6.0 * w(|r| r.y),
                    theta: s.theta + dt / 6.0 * w(|r| r.theta),
                }
            })
            .collect();
        if let Some(agent) = next.iter().position(|s| !s.is_finite()) {
            return Err(Error::BoundaryViolation {
                agent,
                stage: 4,
                time: time + dt,
                margin: f64::NAN,
            });
        }
        Ok(next)
    }

    /// One RK4 step of the whole swarm starting at `time`.
    pub fn step(&self, states: &[AgentState], time: f64, dt: f64) -> Result<Vec<AgentState>> {
        let first = self.controls(states, 1, time)?;
        self.advance(states, &first, time, dt)
    }
}

/// One logged agent sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogRow {
    pub time: f64,
    pub agent: usize,
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    pub u: f64,
    pub zeta: f64,
    pub e_norm: f64,
    pub psi: f64,
}

/// Swarm metrics at one logged step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepMetrics {
    pub time: f64,
    pub order_parameter: f64,
    /// min_k (δ² − |e_k|²).
    pub min_margin: f64,
}

/// Whole-run statistics, accumulated at full step rate.
#[derive(Debug, Clone, PartialEq)]
pub struct RunStats {
    pub steps_completed: usize,
    pub final_time: f64,
    pub final_psis: Vec<f64>,
    pub final_order_parameter: f64,
    pub final_max_e_norm: f64,
    pub max_e_norm: f64,
    pub min_margin: f64,
    /// Mean u_k over the last [`TAIL_WINDOW`] seconds.
    pub mean_u_tail: Vec<f64>,
    pub max_abs_zeta_tail: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryLog {
    pub n_agents: usize,
    pub rows: Vec<LogRow>,
    pub metrics: Vec<StepMetrics>,
    pub stats: RunStats,
    /// Set when the run stopped early on a boundary violation.
    pub failure: Option<Error>,
}

impl TrajectoryLog {
    pub fn is_complete(&self) -> bool {
        self.failure.is_none()
    }

    /// Logged samples of one agent, in time order.
    pub fn agent_rows(&self, agent: usize) -> impl Iterator<Item = &LogRow> {
        self.rows.iter().filter(move |r| r.agent == agent)
    }
}

/// Integrates a validated scenario to `t_final`.
///
/// Invalid scenarios are rejected with [`Error::Config`]; a boundary
/// violation during integration stops the run and is reported in
/// [`TrajectoryLog::failure`] with the log up to that point.
pub fn run(scenario: &Scenario) -> Result<TrajectoryLog> {
    let problems = validate(scenario);
    if !problems.is_empty() {
        let msg: Vec<String> = problems.iter().map(|v| v.to_string()).collect();
        return Err(Error::Config(msg.join("; ")));
    }
    let sim = Simulator::for_scenario(scenario)?;
    let n = scenario.agents.len();
    let steps = scenario.steps();
    let dt = scenario.dt;
    let dec = scenario.log_decimation;
    let tail_start = (scenario.t_final - TAIL_WINDOW).max(0.0);

    let mut log = TrajectoryLog {
        n_agents: n,
        rows: Vec::with_capacity(n * (steps / dec + 1)),
        metrics: Vec::with_capacity(steps / dec + 1),
        stats: RunStats {
            steps_completed: 0,
            final_time: 0.0,
            final_psis: Vec::new(),
            final_order_parameter: f64::NAN,
            final_max_e_norm: f64::NAN,
            max_e_norm: 0.0,
            min_margin: f64::INFINITY,
            mean_u_tail: vec![0.0; n],
            max_abs_zeta_tail: 0.0,
        },
        failure: None,
    };
    let mut tail_count = 0usize;
    let mut states = scenario.agents.clone();

    for i in 0..=steps {
        let time = i as f64 * dt;
        let outs = match sim.controls(&states, 1, time) {
            Ok(o) => o,
            Err(e) => {
                log.failure = Some(e);
                break;
            }
        };

        let psis: Vec<f64> = outs.iter().map(|o| o.psi).collect();
        let max_e = outs.iter().map(|o| o.e_norm).fold(0.0, f64::max);
        let min_margin = outs.iter().map(|o| o.margin).fold(f64::INFINITY, f64::min);
        let st = &mut log.stats;
        st.steps_completed = i;
        st.final_time = time;
        st.max_e_norm = st.max_e_norm.max(max_e);
        st.min_margin = st.min_margin.min(min_margin);
        st.final_max_e_norm = max_e;
        st.final_order_parameter = order_parameter(&psis);
        st.final_psis = psis;
        if time >= tail_start - 0.5 * dt {
            tail_count += 1;
            for (acc, o) in st.mean_u_tail.iter_mut().zip(&outs) {
                *acc += o.u;
            }
            let zmax = outs.iter().map(|o| o.zeta.abs()).fold(0.0, f64::max);
            st.max_abs_zeta_tail = st.max_abs_zeta_tail.max(zmax);
        }

        if i % dec == 0 {
            log.metrics.push(StepMetrics {
                time,
                order_parameter: st.final_order_parameter,
                min_margin,
            });
            log.rows.extend(states.iter().zip(&outs).enumerate().map(|(agent, (s, o))| LogRow {
                time,
                agent,
                x: s.x,
                y: s.y,
                theta: s.theta,
                u: o.u,
                zeta: o.zeta,
                e_norm: o.e_norm,
                psi: o.psi,
            }));
        }

        if i == steps {
            break;
        }
        match sim.advance(&states, &outs, time, dt) {
            Ok(next) => states = next,
            Err(e) => {
                log.failure = Some(e);
                break;
            }
        }
    }

    if tail_count > 0 {
        for acc in log.stats.mean_u_tail.iter_mut() {
            *acc /= tail_count as f64;
        }
    }
    Ok(log)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn circle_scenario(agents: Vec<AgentState>) -> Scenario {
        Scenario::new(
            CurveSpec::circle(1.0).unwrap(),
            ControlGains::with_delta(1.0).unwrap(),
            agents,
        )
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(derivative(&AgentState::new(0.0, 0.0, 0.0), 0.0, 1.0), AgentState::new(1.0, 0.0, 0.0));
        let d = derivative(&AgentState::new(0.0, 0.0, FRAC_PI_2), 1.0, 1.0);
        assert!(d.x.abs() < 1e-16 && d.y == 1.0 && d.theta == 1.0);
        let d = derivative(&AgentState::new(3.0, -2.0, 0.77), 5.0, 1.0);
        assert!((d.x.hypot(d.y) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn order_parameter_examples() {
        let two_pi = 2.0 * PI;
        assert!(order_parameter(&[0.0, two_pi / 3.0, 2.0 * two_pi / 3.0]) < 1e-15);
        assert!((order_parameter(&[1.1; 4]) - 1.0).abs() < 1e-15);
        assert!(order_parameter(&[0.0, PI]) < 1e-15);
    }

    #[test]
    fn separations_wrap() {
        let s = pairwise_separations(&[0.1, 2.0 * PI - 0.1]);
        assert!((s[0] - 0.2).abs() < 1e-14);
    }

    #[test]
    fn infeasible_agent_reported() {
        let sc = circle_scenario(vec![AgentState::new(3.0, 0.0, FRAC_PI_2)]);
        let v = validate(&sc);
        assert_eq!(v.len(), 1);
        match &v[0] {
            Violation::Infeasible { agent, e_norm, .. } => {
                assert_eq!(*agent, 0);
                assert!((e_norm - 2.0).abs() < 1e-15);
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(run(&sc), Err(Error::Config(_))));
    }

    #[test]
    fn parameter_violations() {
        let mut sc = circle_scenario(vec![AgentState::new(1.0, 0.0, FRAC_PI_2)]);
        sc.dt = 0.0;
        sc.t_final = -1.0;
        sc.speed = 2.0;
        sc.log_decimation = 0;
        assert_eq!(validate(&sc).len(), 4);
        let sc = circle_scenario(vec![]);
        assert_eq!(validate(&sc).len(), 1);
    }

    #[test]
    fn on_curve_agent_stays_on_curve_for_one_step() {
        let sim = Simulator::new(
            Orbit::new(CurveSpec::circle(1.0).unwrap()),
            ControlGains::with_delta(1.0).unwrap(),
        );
        let s0 = [AgentState::new(1.0, 0.0, FRAC_PI_2)];
        let s1 = sim.step(&s0, 0.0, 1e-3).unwrap();
        assert!((s1[0].x.hypot(s1[0].y) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_coupling_drift_is_small() {
        let spec = CurveSpec::circle(1.0).unwrap();
        let gains = ControlGains {
            kc: 1.0,
            k_coupling: 0.0,
            delta: 1.0,
        };
        let sim = Simulator::new(Orbit::new(spec), gains);
        let mut s = vec![AgentState::new(1.0, 0.0, FRAC_PI_2)];
        for i in 0..10_000 {
            s = sim.step(&s, i as f64 * 1e-3, 1e-3).unwrap();
        }
        let (ex, ey) = curve::position_error(&spec, &s[0]);
        assert!(ex.hypot(ey) < 1e-8);
    }

    #[test]
    fn run_logs_with_decimation() {
        let mut sc = circle_scenario(vec![
            AgentState::new(1.2, 0.0, FRAC_PI_2),
            AgentState::new(-1.1, 0.0, -FRAC_PI_2),
        ]);
        sc.t_final = 1.0;
        sc.log_decimation = 7;
        let log = run(&sc).unwrap();
        assert!(log.is_complete());
        let steps = sc.steps();
        assert_eq!(log.rows.len(), 2 * (steps / 7 + 1));
        assert!(log.metrics.windows(2).all(|w| w[1].time > w[0].time));
        assert_eq!(log.stats.steps_completed, steps);
    }
}
