//! Long-horizon behaviour of the four shipped scenarios.

use std::path::Path;

use phasebal::scenario::ScenarioFile;
use phasebal::sim::{self, Scenario, Simulator};

const SHIPPED: [&str; 4] = ["fig1a", "fig1b", "exp-circle", "exp-ellipse"];

fn load(name: &str) -> Scenario {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("scenarios")
        .join(format!("{name}.json"));
    ScenarioFile::from_json(&std::fs::read_to_string(path).unwrap())
        .unwrap()
        .to_scenario()
        .unwrap()
}

#[test]
fn shipped_scenarios_converge_and_balance() {
    for name in SHIPPED {
        let sc = load(name);
        let log = sim::run(&sc).unwrap();
        let st = &log.stats;
        assert!(log.is_complete(), "{name}: {:?}", log.failure);
        assert!(st.max_e_norm < sc.gains.delta, "{name}: max |e| {}", st.max_e_norm);
        assert!(st.final_max_e_norm < 0.01, "{name}: final |e| {}", st.final_max_e_norm);
        assert!(st.final_order_parameter < 0.01, "{name}: order {}", st.final_order_parameter);
        for sep in sim::pairwise_separations(&st.final_psis) {
            assert!((sep - 2.0 * std::f64::consts::PI / 3.0).abs() < 0.05, "{name}: separation {sep}");
        }
        assert!(st.max_abs_zeta_tail < 0.02, "{name}: tail |zeta| {}", st.max_abs_zeta_tail);
    }
}

#[test]
fn circle_settles_to_unit_turn_rate() {
    for name in ["fig1a", "exp-circle"] {
        let log = sim::run(&load(name)).unwrap();
        for u in &log.stats.mean_u_tail {
            assert!((u - 1.0).abs() < 0.02, "{name}: mean u {u}");
        }
    }
}

#[test]
fn agents_move_at_unit_speed() {
    for name in SHIPPED {
        let sc = load(name);
        let sim = Simulator::for_scenario(&sc).unwrap();
        let mut states = sc.agents.clone();
        let mut worst: f64 = 0.0;
        for i in 0..20_000 {
            let next = sim.step(&states, i as f64 * sc.dt, sc.dt).unwrap();
            for (a, b) in states.iter().zip(&next) {
                let v = (b.x - a.x).hypot(b.y - a.y) / sc.dt;
                worst = worst.max((v - 1.0).abs());
            }
            states = next;
        }
        assert!(worst <= 1e-6, "{name}: |speed - 1| up to {worst:e}");
    }
}

#[test]
fn runs_are_deterministic() {
    let sc = load("exp-ellipse");
    assert_eq!(sim::run(&sc).unwrap(), sim::run(&sc).unwrap());
}

#[test]
fn interpolated_mode_tracks_direct_mode() {
    let mut sc = load("fig1b");
    sc.t_final = 20.0;
    let direct = sim::run(&sc).unwrap();
    sc.sigma_mode = sim::SigmaMode::Interpolated;
    let fast = sim::run(&sc).unwrap();
    let gap = direct
        .rows
        .iter()
        .zip(&fast.rows)
        .map(|(a, b)| (a.x - b.x).abs().max((a.y - b.y).abs()))
        .fold(0.0, f64::max);
    assert!(gap < 1e-6, "position gap {gap:e}");
}
