//! Named reference trees and the caterpillar families.

use crate::plane_tree::PlaneTree;

const REFERENCE_TREES: &str = include_str!("../../data/reference_trees.txt");

/// `(id, tree)` for every bundled reference tree, in file order.
pub fn reference_trees() -> Vec<(&'static str, PlaneTree)> {
    REFERENCE_TREES
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            let (id, code) = l.split_once(char::is_whitespace).expect("id and code");
            let tree = code.trim().parse().expect("bundled codes parse");
            (id, tree)
        })
        .collect()
}

pub fn fixture(id: &str) -> Option<PlaneTree> {
    reference_trees()
        .into_iter()
        .find(|(name, _)| *name == id)
        .map(|(_, t)| t)
}

/// Fixture ids starting with `prefix`, in file order.
pub fn fixtures_with_prefix(prefix: &str) -> Vec<(&'static str, PlaneTree)> {
    reference_trees()
        .into_iter()
        .filter(|(id, _)| id.starts_with(prefix))
        .collect()
}

/// The tree with passport `<n, m | 2, 1, ..., 1>`: a white vertex of degree `m` joined
/// through a black vertex of degree two to a white vertex of degree `n`.
pub fn caterpillar(n: usize, m: usize) -> PlaneTree {
    assert!(n >= 1 && m >= 1, "degrees must be positive");
    let code = format!("W(({})){}", "()".repeat(n - 1), "()".repeat(m - 1));
    code.parse().expect("caterpillar code parses")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn caterpillar_passport() {
        let t = caterpillar(5, 3);
        let p = t.colored_passport();
        assert_eq!(p.white, vec![5, 3]);
        assert_eq!(p.black, vec![2, 1, 1, 1, 1, 1, 1]);
    }

    #[test]
    fn fixtures_are_canonical_and_sized() {
        let all = reference_trees();
        assert_eq!(all.len(), 36);
        for (id, t) in &all {
            assert_eq!(t.plane_code(), t.canonical().plane_code(), "{id}");
        }
        assert_eq!(fixture("six-edge").unwrap().edge_count(), 6);
        assert_eq!(fixtures_with_prefix("seven-edge-").len(), 12);
        assert!(fixture("nope").is_none());
    }
}
