use dessin::catalog::fixture;
use dessin::shabat::{
    identify_tree, solve_passport, solve_tree, zapponi_normalize, ResidualSystem, ShabatError,
    SolveConfig,
};
use dessin::{Passport, Poly};

mod common;
use common::*;

fn passport(s: &str) -> Passport {
    s.parse().unwrap()
}

#[test]
fn system_rejects_single_edge() {
    assert!(matches!(
        ResidualSystem::new(&passport("1|1")),
        Err(ShabatError::TooFewEdges(1))
    ));
}

#[test]
fn system_dimension_counts_vertices() {
    let sys = ResidualSystem::new(&passport("2,2,1|2,2,1")).unwrap();
    assert_eq!(sys.dim(), 7);
    let u = vec![r(0.0); 7];
    assert_eq!(sys.residual(&u).len(), 7);
}

#[test]
fn residual_vanishes_at_path_solution() {
    // p(2 cos t) = cos 5t: whites at t = 0, 2pi/5, 4pi/5 and blacks at t = pi/5, 3pi/5, pi.
    let pi = std::f64::consts::PI;
    let z = |t: f64| r(2.0 * t.cos());
    let u = vec![
        z(2.0 * pi / 5.0),
        z(4.0 * pi / 5.0),
        z(0.0),
        z(pi / 5.0),
        z(3.0 * pi / 5.0),
        z(pi),
        r(0.5),
    ];
    let sys = ResidualSystem::new(&passport("2,2,1|2,2,1")).unwrap();
    assert!(sys.residual_norm(&u) < 1e-10, "{}", sys.residual_norm(&u));
    assert_close(&sys.polynomial(&u), &five_edge_5(), 1e-12);
}

#[test]
fn passport_solutions_match_closed_forms() {
    let cfg = SolveConfig::default();
    let sols = solve_passport::<f64>(&passport("4,1|2,1,1,1"), &cfg).unwrap();
    assert_eq!(sols.len(), 1);
    assert_close(&sols[0].poly, &five_edge_1(), 1e-6);
    assert!(sols[0].residual < 1e-9);

    let sols = solve_passport::<f64>(&passport("3,2|2,1,1,1"), &cfg).unwrap();
    assert_eq!(sols.len(), 1);
    assert_close(&sols[0].poly, &five_edge_2(), 1e-6);
}

#[test]
fn star_has_no_zapponi_form() {
    let err = solve_passport::<f64>(&passport("5|1,1,1,1,1"), &SolveConfig::default()).unwrap_err();
    assert!(matches!(err, ShabatError::NoZapponiForm(_)), "{err:?}");
    let star = dessin::plane_tree::parse_plane_code("W()()()()()").unwrap();
    let err = solve_tree::<f64>(&star, &SolveConfig::default()).unwrap_err();
    assert!(matches!(err, ShabatError::NoZapponiForm(_)), "{err:?}");
}

#[test]
fn normalization_is_idempotent() {
    let sz = zapponi_normalize(&five_edge_2(), 1e-9).unwrap();
    assert_close(&sz.poly, &five_edge_2(), 1e-9);
}

#[test]
fn normalization_undoes_affine_changes() {
    for (alpha, beta) in [(c(0.7, 0.3), c(-0.2, 0.5)), (c(-1.9, 0.0), c(3.0, -1.0)), (c(0.0, 0.4), c(0.1, 0.1))] {
        let q = five_edge_1().compose_affine(alpha, beta);
        let sz = zapponi_normalize(&q, 1e-9).unwrap();
        assert_close(&sz.poly, &five_edge_1(), 1e-6);
    }
}

#[test]
fn symmetric_path_has_no_zapponi_form() {
    let cheb = Poly::from_real(&[1.0, 0.0, -8.0, 0.0, 8.0]);
    assert!(matches!(zapponi_normalize(&cheb, 1e-9), Err(ShabatError::NoZapponiForm(_))));
}

#[test]
fn identifies_the_three_vertex_path() {
    let t = identify_tree(&Poly::from_real(&[-1.0, 0.0, 2.0])).unwrap();
    assert_eq!(t.plane_code(), "W(())");
}

#[test]
fn identifies_five_edge_one() {
    let t = identify_tree(&five_edge_1()).unwrap();
    assert_eq!(t.plane_code(), fixture("five-edge-1").unwrap().plane_code());
}

#[test]
fn trees_solve_to_closed_forms() {
    assert_close(&solve("five-edge-5").poly, &five_edge_5(), 1e-6);
    assert_close(&solve("six-edge").poly, &six_edge(), 1e-6);
    assert_close(&solve("four-edge").poly, &four_edge(), 1e-6);
}

#[test]
fn solutions_satisfy_zapponi_identities() {
    for id in ["four-edge", "five-edge-1", "five-edge-3", "six-edge", "seven-edge-11"] {
        let d = solve(id).defects();
        assert!(d.max() < 1e-8, "{id}: {d:?}");
    }
}

#[test]
fn seed_does_not_change_the_answer() {
    let tree = fixture("seven-edge-9").unwrap();
    let base = solve_tree::<f64>(&tree, &SolveConfig::default()).unwrap();
    for seed in [1, 17, 12345] {
        let cfg = SolveConfig {
            rng_seed: seed,
            ..SolveConfig::default()
        };
        let other = solve_tree::<f64>(&tree, &cfg).unwrap();
        assert_close(&other.poly, &base.poly, 1e-6);
    }
}

#[test]
fn pcf_forms_fix_plus_and_minus_one() {
    for id in ["four-edge", "five-edge-3", "six-edge", "seven-edge-12"] {
        let sz = solve(id);
        let mut tried = 0;
        for (i, w) in sz.white.iter().enumerate() {
            for (j, b) in sz.black.iter().enumerate() {
                if w.multiplicity < 2 || b.multiplicity < 2 {
                    assert!(sz.pcf_form(i, j).is_err());
                    continue;
                }
                tried += 1;
                let q = sz.pcf_form(i, j).unwrap();
                assert!((q.eval(r(1.0)) - r(1.0)).norm() < 1e-9);
                assert!((q.eval(r(-1.0)) - r(-1.0)).norm() < 1e-9);
                for cp in q.critical_data(1e-6).unwrap() {
                    let v = cp.value;
                    let fixed = (v - r(1.0)).norm() < 1e-6 || (v + r(1.0)).norm() < 1e-6;
                    assert!(fixed, "{id}: critical value {v}");
                    assert!((q.eval(v) - v).norm() < 1e-6, "{id}: {v} is not fixed");
                }
            }
        }
        assert!(tried > 0, "{id} has no admissible vertex pair");
    }
}

#[test]
fn misplaced_pcf_is_not_shabat() {
    let candidate = factored(-3.0 / 8.0, &[(-1.0, 3), (8.0 / 3.0, 1)], -1.0);
    assert!((candidate.eval(r(1.0)) - r(4.0)).norm() < 1e-12);
    assert!(!candidate.is_shabat(1e-6));
    let values: Vec<f64> = candidate
        .critical_data(1e-6)
        .unwrap()
        .iter()
        .map(|cp| cp.value.re)
        .collect();
    assert!(values.iter().any(|v| (v - 6.15).abs() < 0.01), "{values:?}");

    let sz = solve("four-edge");
    let w = sz.white.iter().position(|c| c.multiplicity == 3).unwrap();
    let b = sz.black.iter().position(|c| c.multiplicity == 2).unwrap();
    let q = sz.pcf_form(w, b).unwrap();
    assert!(q.is_shabat(1e-8));
    assert!(q.max_coeff_distance(&candidate) > 0.1);
}

#[test]
fn color_inversion_negates_the_polynomial() {
    for id in ["four-edge", "five-edge-1", "six-edge"] {
        let tree = fixture(id).unwrap();
        let inv = solve_tree::<f64>(&tree.invert_colors(), &SolveConfig::default()).unwrap();
        assert_close(&inv.poly, &solve(id).poly.conjugate_by_negation(), 1e-6);
    }
}
