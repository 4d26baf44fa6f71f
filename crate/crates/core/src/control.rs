//! Turn-rate law u_k = κ(1 + ζ_k), with ζ_k the sum of a barrier term
//! that keeps |e_k| < δ and a phase coupling term that spreads the
//! agents evenly along the curve.

use serde::{Deserialize, Serialize};

use crate::curve::{self, CurveSpec, Orbit};
use crate::error::{Error, Result};
use crate::sim::AgentState;

/// Smallest admissible δ² − |e|² (m²) before the barrier is treated as
/// violated.
pub const BARRIER_GUARD: f64 = 1e-9;

pub const DEFAULT_KC: f64 = 1.0;
pub const DEFAULT_K: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlGains {
    /// Barrier gain K_c.
    pub kc: f64,
    /// Coupling gain K.
    #[serde(rename = "k")]
    pub k_coupling: f64,
    /// Boundary distance δ from the curve.
    pub delta: f64,
}

impl ControlGains {
    pub fn new(kc: f64, k_coupling: f64, delta: f64) -> Result<Self> {
        let g = ControlGains {
            kc,
            k_coupling,
            delta,
        };
        match g.violations().into_iter().next() {
            Some(msg) => Err(Error::Config(msg)),
            None => Ok(g),
        }
    }

    pub fn with_delta(delta: f64) -> Result<Self> {
        Self::new(DEFAULT_KC, DEFAULT_K, delta)
    }

    pub(crate) fn violations(&self) -> Vec<String> {
        [("kc", self.kc), ("k", self.k_coupling), ("delta", self.delta)]
            .into_iter()
            .filter(|(_, v)| !(v.is_finite() && *v > 0.0))
            .map(|(name, v)| format!("gains.{name} must be > 0, got {v}"))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlOutput {
    pub u: f64,
    pub zeta: f64,
    pub barrier_term: f64,
    pub coupling_term: f64,
    pub e_norm: f64,
    pub psi: f64,
    pub kappa: f64,
    /// δ² − |e|².
    pub margin: f64,
}

/// −(K/N) Σ_j sin(ψ_j − ψ_k).
pub fn coupling_term(psis: &[f64], k: usize, k_coupling: f64) -> Result<f64> {
    let n = psis.len();
    let psi_k = *psis.get(k).ok_or(Error::Index { index: k, len: n })?;
    let sum: f64 = psis.iter().map(|&p| (p - psi_k).sin()).sum();
    Ok(-k_coupling / n as f64 * sum)
}

fn barrier(gains: &ControlGains, ex: f64, ey: f64, theta: f64, agent: usize) -> Result<(f64, f64)> {
    let e2 = ex * ex + ey * ey;
    let margin = gains.delta * gains.delta - e2;
    if !(margin >= BARRIER_GUARD) {
        return Err(Error::BoundaryViolation {
            agent,
            stage: 0,
            time: f64::NAN,
            margin,
        });
    }
    let (s, c) = theta.sin_cos();
    Ok((gains.kc * (ex * c + ey * s) / margin, margin))
}

/// Agent k's ζ with ψ values already computed for the whole swarm.
pub fn zeta(
    orbit: &Orbit,
    state: &AgentState,
    psis: &[f64],
    k: usize,
    gains: &ControlGains,
) -> Result<ControlOutput> {
    let spec = orbit.spec();
    let t = curve::project(spec, state.theta);
    let (px, py) = curve::point_on_curve(spec, t);
    let (ex, ey) = (state.x - px, state.y - py);
    let coupling = coupling_term(psis, k, gains.k_coupling)?;
    let (barrier_term, margin) = barrier(gains, ex, ey, state.theta, k)?;
    let zeta = barrier_term + coupling;
    let kappa = curve::curvature(spec, state.theta);
    Ok(ControlOutput {
        u: kappa * (1.0 + zeta),
        zeta,
        barrier_term,
        coupling_term: coupling,
        e_norm: ex.hypot(ey),
        psi: psis[k],
        kappa,
        margin,
    })
}

/// Closed-form ζ for a circle of radius r, with headings standing in for
/// curve phases.
pub fn zeta_circle(
    r: f64,
    state: &AgentState,
    thetas: &[f64],
    k: usize,
    gains: &ControlGains,
) -> Result<f64> {
    let (s, c) = state.theta.sin_cos();
    let (x, y) = (state.x, state.y);
    // The projected point is r·(sin θ, −cos θ). Kept in factored form: the
    // expansion x² + y² + r² − 2r(x sin θ − y cos θ) cancels badly near the
    // orbit, and the barrier denominator amplifies that.
    let (ex, ey) = (x - r * s, y + r * c);
    let e2 = ex * ex + ey * ey;
    let margin = gains.delta * gains.delta - e2;
    if !(margin >= BARRIER_GUARD) {
        return Err(Error::BoundaryViolation {
            agent: k,
            stage: 0,
            time: f64::NAN,
            margin,
        });
    }
    let coupling = coupling_term(thetas, k, gains.k_coupling)?;
    Ok(gains.kc * (x * c + y * s) / margin + coupling)
}

/// Curve phases of every agent.
pub fn phases(orbit: &Orbit, states: &[AgentState]) -> Vec<f64> {
    states.iter().map(|s| orbit.phase(s.theta)).collect()
}

/// u_k for agent k, recomputing all curve phases from the current headings.
pub fn turn_rate(
    orbit: &Orbit,
    states: &[AgentState],
    k: usize,
    gains: &ControlGains,
) -> Result<ControlOutput> {
    let state = states.get(k).ok_or(Error::Index {
        index: k,
        len: states.len(),
    })?;
    let psis = phases(orbit, states);
    zeta(orbit, state, &psis, k, gains)
}

/// Convenience wrapper over [`turn_rate`] for a bare curve.
pub fn turn_rate_for(
    curve: &CurveSpec,
    states: &[AgentState],
    k: usize,
    gains: &ControlGains,
) -> Result<ControlOutput> {
    turn_rate(&Orbit::new(*curve), states, k, gains)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    const TWO_PI: f64 = 2.0 * PI;

    fn gains(kc: f64, k: f64, delta: f64) -> ControlGains {
        ControlGains::new(kc, k, delta).unwrap()
    }

    #[test]
    fn coupling_examples() {
        let balanced = [0.0, TWO_PI / 3.0, 2.0 * TWO_PI / 3.0];
        for k in 0..3 {
            assert!(coupling_term(&balanced, k, 2.0).unwrap().abs() < 1e-15);
            assert_eq!(coupling_term(&[0.4; 3], k, 2.0).unwrap(), 0.0);
        }
        assert!((coupling_term(&[0.0, FRAC_PI_2], 0, 1.0).unwrap() + 0.5).abs() < 1e-16);
        assert!(matches!(
            coupling_term(&[0.0, 1.0], 2, 1.0),
            Err(Error::Index { index: 2, len: 2 })
        ));
    }

    #[test]
    fn single_agent_barrier_value() {
        let orbit = Orbit::new(CurveSpec::circle(1.0).unwrap());
        let g = gains(1.0, 2.0, 1.0);
        let st = AgentState::new(0.0, 1.3, 3.0 * PI / 4.0);
        let out = turn_rate(&orbit, &[st], 0, &g).unwrap();
        // numerator 1.3·sin(3π/4), |e|² = 0.851522368914977
        assert!((out.barrier_term - 6.191_092_953_362_952).abs() < 1e-11);
        assert_eq!(out.coupling_term, 0.0);
        let closed = zeta_circle(1.0, &st, &[st.theta], 0, &g).unwrap();
        assert!((closed - out.zeta).abs() < 1e-12);
    }

    #[test]
    fn perpendicular_heading_has_no_barrier() {
        let orbit = Orbit::new(CurveSpec::circle(1.0).unwrap());
        let st = AgentState::new(1.5, 0.0, FRAC_PI_2);
        let out = turn_rate(&orbit, &[st], 0, &gains(1.0, 2.0, 1.0)).unwrap();
        assert!(out.barrier_term.abs() < 1e-15);
        assert!((out.e_norm - 0.5).abs() < 1e-15);
    }

    #[test]
    fn steady_state_turn_rates() {
        let g = gains(1.0, 2.0, 1.0);
        for &r in &[1.0, 2.0] {
            let orbit = Orbit::new(CurveSpec::circle(r).unwrap());
            let states: Vec<_> = (0..3)
                .map(|i| {
                    let t = TWO_PI * i as f64 / 3.0;
                    AgentState::new(r * t.cos(), r * t.sin(), t + FRAC_PI_2)
                })
                .collect();
            for k in 0..3 {
                let out = turn_rate(&orbit, &states, k, &g).unwrap();
                assert!(out.zeta.abs() < 1e-12);
                assert!((out.u - 1.0 / r).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn ellipse_major_vertex_turn_rate() {
        let spec = CurveSpec::ellipse(2.0, 1.0).unwrap();
        let st = AgentState::new(2.0, 0.0, FRAC_PI_2);
        let out = turn_rate_for(&spec, &[st], 0, &gains(1.0, 2.0, 1.0)).unwrap();
        assert!((out.u - 2.0).abs() < 1e-12);
    }

    #[test]
    fn guard_trips_before_non_finite() {
        let orbit = Orbit::new(CurveSpec::circle(1.0).unwrap());
        let g = gains(1.0, 2.0, 1.0);
        for &gap in &[1e-6_f64, 1e-9, 1e-12] {
            // |e|² = 1 − gap, heading not perpendicular to e.
            let e = (1.0 - gap).sqrt();
            let theta = FRAC_PI_2 + 0.3;
            let (px, py) = curve::point_on_curve(orbit.spec(), curve::project(orbit.spec(), theta));
            let st = AgentState::new(px + e * 0.6, py + e * 0.8, theta);
            let (ex, ey) = curve::position_error(orbit.spec(), &st);
            let actual_gap = 1.0 - (ex * ex + ey * ey);
            match turn_rate(&orbit, &[st], 0, &g) {
                Ok(out) => {
                    assert!(actual_gap >= BARRIER_GUARD);
                    assert!(out.u.is_finite() && out.barrier_term.abs() > 1e3);
                }
                Err(Error::BoundaryViolation { margin, .. }) => {
                    assert!(margin < BARRIER_GUARD);
                }
                Err(e) => panic!("unexpected {e}"),
            }
        }
    }

    #[test]
    fn gains_validation() {
        assert!(ControlGains::new(1.0, 2.0, 0.0).is_err());
        assert!(ControlGains::new(-1.0, 2.0, 1.0).is_err());
        assert!(ControlGains::new(1.0, f64::NAN, 1.0).is_err());
        let msg = ControlGains::new(1.0, 2.0, 0.0).unwrap_err().to_string();
        assert!(msg.contains("gains.delta must be > 0"), "{msg}");
    }
}
