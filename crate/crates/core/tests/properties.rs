use std::f64::consts::PI;

use cylsep::decomposer::{all_separable, decompose, default_lp_eps, default_radius_bracket, min_output_radius, SearchOptions};
use cylsep::growth::lambda_of_phi;
use cylsep::oracle::{exact_distribution, OracleCaps};
use cylsep::pauli::{apply_gate, product_matrix, BlochOp};
use cylsep::sampler::{
    empirical_distribution, tv_distance, EdgeSpec, GraphSpec, MeasurementProgram, NodeSpec, SamplerConfig, Simulator, Step,
};
use cylsep::state_spaces::{cylinder_extremals, spindle_extremals, Discretization};
use cylsep::{BlochOp32, Discretization32};
use proptest::prelude::*;

fn unstructured(d: &Discretization<f64>) -> Discretization<f64> {
    Discretization::from_points(d.points().to_vec())
}

#[test]
fn orbit_reduction_matches_full_enumeration() {
    let input = spindle_extremals(0.3, 0.9, 8, 0.0).unwrap();
    for &(phi, scale) in &[(PI, 1.9), (PI, 2.2), (1.0, 1.2), (2.5, 1.6)] {
        let out = cylinder_extremals(0.3 * scale, 8, 0.0).unwrap();
        let reduced = all_separable(&input, &input, &out, &out, phi, 1e-9).unwrap();
        // stripping the symmetry data forces every input pair to be solved
        let full = all_separable(&unstructured(&input), &unstructured(&input), &out, &out, phi, 1e-9).unwrap();
        assert_eq!(reduced, full, "phi={phi} scale={scale}");
    }
}

#[test]
fn cylinder_gap_shrinks_with_angles() {
    let r = 0.1;
    let gaps: Vec<f64> = [20, 40, 80]
        .iter()
        .map(|&n| {
            let input = cylinder_extremals(r, n, 0.0).unwrap();
            let opts = SearchOptions { n_angles: n, tol: 1e-8, ..Default::default() };
            min_output_radius(&input, &input, PI, default_radius_bracket(r, PI), &opts).unwrap() / (lambda_of_phi(PI) * r) - 1.0
        })
        .collect();
    assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2] && gaps[2] > -1e-6, "{gaps:?}");
}

#[test]
fn spindle_beats_lambda() {
    let r = 0.11;
    let input = spindle_extremals(r, (1.0f64 - r * r).sqrt(), 40, 0.0).unwrap();
    let got = min_output_radius(&input, &input, PI, default_radius_bracket(r, PI), &SearchOptions::default()).unwrap();
    assert!(got < lambda_of_phi(PI) * r, "{got}");
}

#[test]
fn single_precision_decomposition() {
    let r = 0.1f32;
    let lam = lambda_of_phi(std::f32::consts::PI);
    let a = BlochOp32::new(r, 0.0, 1.0).unwrap();
    let target = apply_gate(std::f32::consts::PI, &product_matrix(&a, &a));
    let out: Discretization32 = cylinder_extremals(lam * r * 1.01, 24, 0.0).unwrap();
    let d = decompose(&target, &out, &out, default_lp_eps::<f32>()).unwrap().feasible().unwrap();
    d.verify().unwrap();
    assert!(d.residual < 1e-4);
}

fn path3(phi: f64) -> GraphSpec {
    GraphSpec {
        nodes: (0..3).map(|i| NodeSpec::pure(i, 0.1f64.asin(), 0.5 * i as f64)).collect(),
        edges: vec![EdgeSpec::canonical(0, 1, phi), EdgeSpec::canonical(1, 2, phi)],
    }
}

#[test]
fn edge_order_invariance() {
    let g = path3(PI);
    let prog = MeasurementProgram { steps: (0..3).map(|q| Step::xy(q, 0.2 * q as f64, vec![])).collect() };
    let fwd = Simulator::new(&g, &prog, SamplerConfig::default()).unwrap();
    let rev = Simulator::new(&g, &prog, SamplerConfig { reverse_edges: true, ..Default::default() }).unwrap();
    let a = empirical_distribution(&fwd.run_batch(40_000, 5).unwrap());
    let b = empirical_distribution(&rev.run_batch(40_000, 6).unwrap());
    // 3·√(2^k / n) statistical allowance
    assert!(tv_distance(&a, &b) <= 3.0 * (8.0f64 / 40_000.0).sqrt());
}

#[test]
fn adaptive_flip_matches_oracle() {
    let g = path3(PI / 2.0);
    let prog = MeasurementProgram {
        steps: vec![Step::xy(0, 0.3, vec![]), Step::xy(1, 1.2, vec![0]), Step::xy(2, 0.0, vec![0, 1])],
    };
    let sim = Simulator::new(&g, &prog, SamplerConfig::default()).unwrap();
    let n = 50_000u64;
    let emp = empirical_distribution(&sim.run_batch(n, 8).unwrap());
    let exact = exact_distribution(&g, &prog, OracleCaps::default()).unwrap();
    let bound = 3.0 * (8.0 / n as f64).sqrt() + 10.0 * 1e-3;
    assert!(tv_distance(&emp, &exact) <= bound);
}

#[test]
fn thermal_instance_matches_oracle() {
    let mut g = path3(PI);
    for n in &mut g.nodes {
        n.temperature = Some(0.3);
    }
    let prog = MeasurementProgram { steps: vec![Step::z(1), Step::xy(0, 0.0, vec![0]), Step::xy(2, 0.7, vec![])] };
    let sim = Simulator::new(&g, &prog, SamplerConfig::default()).unwrap();
    let emp = empirical_distribution(&sim.run_batch(50_000, 2).unwrap());
    let exact = exact_distribution(&g, &prog, OracleCaps::default()).unwrap();
    assert!(tv_distance(&emp, &exact) <= 0.02);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn born_probabilities_stay_in_range(phi in 0.2..6.0f64, theta in 0.0..0.2f64, az in 0.0..6.0f64, a0 in 0.0..6.3f64, seed in any::<u64>()) {
        let g = GraphSpec {
            nodes: (0..3).map(|i| NodeSpec::pure(i, theta, az * i as f64)).collect(),
            edges: vec![EdgeSpec::canonical(0, 1, phi), EdgeSpec::canonical(1, 2, phi), EdgeSpec::canonical(0, 2, phi)],
        };
        let prog = MeasurementProgram { steps: vec![Step::xy(0, a0, vec![]), Step::xy(1, a0, vec![0]), Step::z(2)] };
        match Simulator::new(&g, &prog, SamplerConfig::default()) {
            // run_shot errors if any outcome probability leaves [0, 1]
            Ok(sim) => { sim.run_batch(50, seed).unwrap(); }
            Err(cylsep::Error::Rejected(_)) => {}
            Err(e) => panic!("{e}"),
        }
    }

    #[test]
    fn outputs_lie_in_grown_cylinders(phi in 0.1..6.2f64, za in -1.0..1.0f64, zb in -1.0..1.0f64, ra in 0.0..0.3f64, rb in 0.0..0.3f64) {
        let a = BlochOp::new(ra, 0.0, za).unwrap();
        let b = BlochOp::new(rb, 0.0, zb).unwrap();
        let lam = lambda_of_phi(phi) * 1.001;
        let (oa, ob) = (cylinder_extremals(lam * ra.max(1e-6), 40, 0.0).unwrap(), cylinder_extremals(lam * rb.max(1e-6), 40, 0.0).unwrap());
        let d = decompose(&apply_gate(phi, &product_matrix(&a, &b)), &oa, &ob, 1e-9).unwrap().feasible();
        prop_assert!(d.is_some());
        for t in d.unwrap().terms {
            prop_assert!(t.a.radius() <= lam * ra.max(1e-6) + 1e-12 && t.b.radius() <= lam * rb.max(1e-6) + 1e-12);
        }
    }
}
