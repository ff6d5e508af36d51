use std::collections::BTreeSet;

use dessin::catalog::fixture;
use dessin::plane_tree::{enumerate_colored_trees, enumerate_trees, parse_plane_code, TreeError};
use dessin::{Color, Passport, PlaneTree};

mod common;
use common::oracle;

#[test]
fn enumeration_matches_brute_force_oracle() {
    for n in 1..=7 {
        let (plain, colored) = oracle::classes(n);
        let trees = enumerate_trees(n);
        assert_eq!(trees.len(), plain.len(), "uncolored count at n = {n}");
        let keys: BTreeSet<String> = trees
            .iter()
            .map(|t| {
                let (adj, par) = oracle::adj_of(t);
                oracle::key(&adj, &par, &[false, true])
            })
            .collect();
        assert_eq!(keys, plain, "uncolored classes at n = {n}");

        let colored_trees = enumerate_colored_trees(n);
        let ckeys: BTreeSet<String> = colored_trees
            .iter()
            .map(|t| {
                let (adj, par) = oracle::adj_of(t);
                oracle::key(&adj, &par, &[false])
            })
            .collect();
        assert_eq!(ckeys.len(), colored_trees.len(), "colored duplicates at n = {n}");
        assert_eq!(ckeys, colored, "colored classes at n = {n}");
    }
}

#[test]
fn small_counts() {
    assert_eq!(enumerate_trees(1).len(), 1);
    assert_eq!(enumerate_trees(2).len(), 1);
}

#[test]
fn five_edge_passports() {
    let got: BTreeSet<String> = enumerate_trees(5)
        .iter()
        .map(|t| t.passport().0.to_string())
        .collect();
    let want: BTreeSet<String> = [
        "4,1|2,1,1,1",
        "3,2|2,1,1,1",
        "3,1,1|3,1,1",
        "3,1,1|2,2,1",
        "2,2,1|2,2,1",
        "5|1,1,1,1,1",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    assert_eq!(got, want);
}

#[test]
fn enumerated_trees_are_valid_and_distinct() {
    for n in 1..=8 {
        let trees = enumerate_trees(n);
        let codes: BTreeSet<String> = trees.iter().map(|t| t.plane_code()).collect();
        assert_eq!(codes.len(), trees.len());
        let mut sorted = trees.iter().map(|t| t.plane_code()).collect::<Vec<_>>();
        sorted.sort();
        assert_eq!(sorted, trees.iter().map(|t| t.plane_code()).collect::<Vec<_>>());
        for t in &trees {
            assert_eq!(t.vertex_count(), n + 1);
            for (v, vert) in t.vertices().iter().enumerate() {
                for &u in &vert.neighbors {
                    assert_ne!(t.color(u), t.color(v));
                }
            }
            let inv = t.invert_colors().plane_code();
            assert!(inv == t.plane_code() || !codes.contains(&inv), "{t:?} and its inversion");
        }
    }
}

#[test]
fn single_edge() {
    let t = parse_plane_code("W()").unwrap();
    assert_eq!(t.edge_count(), 1);
    assert_eq!(t.plane_code(), "W()");
    assert_eq!(t.passport().0.to_string(), "1|1");
    assert_eq!(t.invert_colors().plane_code(), "W()");
}

#[test]
fn white_star_of_three() {
    let t = parse_plane_code("W()()()").unwrap();
    let p = t.colored_passport();
    assert_eq!(p.white, vec![3]);
    assert_eq!(p.black, vec![1, 1, 1]);
}

#[test]
fn three_vertex_path_code_ignores_root_choice() {
    // W - B - W rooted at either white leaf.
    let t = PlaneTree::from_embedding(
        &[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)],
        &[Color::White, Color::Black, Color::White],
        &[(0, 1), (1, 2)],
    )
    .unwrap();
    let relabeled = PlaneTree::from_embedding(
        &[(2.0, 0.0), (1.0, 0.0), (0.0, 0.0)],
        &[Color::White, Color::Black, Color::White],
        &[(0, 1), (1, 2)],
    )
    .unwrap();
    assert_eq!(t.plane_code(), relabeled.plane_code());
    assert_eq!(t.plane_code(), "W(())");
}

#[test]
fn seven_edge_nine_and_ten_differ() {
    let a = fixture("seven-edge-9").unwrap();
    let b = fixture("seven-edge-10").unwrap();
    assert_eq!(a.passport().0, b.passport().0);
    assert_eq!(a.passport().0.to_string(), "3,2,2|2,2,1,1,1");
    assert_ne!(a.plane_code(), b.plane_code());
}

#[test]
fn fixture_passports() {
    let p = |id: &str| fixture(id).unwrap().passport().0.to_string();
    assert_eq!(p("five-edge-1"), "4,1|2,1,1,1");
    assert_eq!(p("five-edge-5"), "2,2,1|2,2,1");
    assert_eq!(p("four-edge"), "3,1|2,1,1");
    assert_eq!(p("seven-edge-11"), "3,2,1,1|3,2,1,1");
    assert_eq!(p("seven-edge-12"), "3,2,1,1|2,2,2,1");
}

#[test]
fn reparse_of_five_edge_one_code() {
    let code = fixture("five-edge-1").unwrap().plane_code();
    let t = parse_plane_code(&code).unwrap();
    assert_eq!(t.passport().0, "4,1|2,1,1,1".parse::<Passport>().unwrap());
    assert_eq!(t.plane_code(), code);
}

#[test]
fn symmetry_examples() {
    let star = parse_plane_code("W()()()()()").unwrap();
    assert!(star.symmetry_flags().rotational);
    let path2 = parse_plane_code("W()()").unwrap();
    assert!(path2.symmetry_flags().rotational);
    let chiral = fixture("eight-edge-special-3").unwrap();
    assert!(!chiral.symmetry_flags().mirror);
    assert!(!chiral.symmetry_flags().rotational);
    assert!(fixture("five-edge-5").unwrap().symmetry_flags().mirror);
}

#[test]
fn parse_errors_carry_position() {
    match parse_plane_code("W(()") {
        Err(TreeError::Parse { position, .. }) => assert!(position <= 4),
        other => panic!("expected a parse error, got {other:?}"),
    }
    assert!(parse_plane_code("X()").is_err());
    assert!(parse_plane_code("W())").is_err());
}
