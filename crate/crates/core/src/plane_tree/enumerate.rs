//! Exhaustive enumeration of plane bipartite trees by edge count.

use std::collections::BTreeSet;

use super::code::parse;
use super::PlaneTree;

/// Calls `visit` with every Dyck word of the given semilength.
fn for_each_dyck_word(pairs: usize, visit: &mut impl FnMut(&[u8])) {
    fn rec(buf: &mut Vec<u8>, open: usize, close: usize, pairs: usize, visit: &mut impl FnMut(&[u8])) {
        if close == pairs {
            visit(buf);
            return;
        }
        if open < pairs {
            buf.push(b'(');
            rec(buf, open + 1, close, pairs, visit);
            buf.pop();
        }
        if close < open {
            buf.push(b')');
            rec(buf, open, close + 1, pairs, visit);
            buf.pop();
        }
    }
    let mut buf = Vec::with_capacity(2 * pairs + 1);
    buf.push(b'W');
    rec(&mut buf, 0, 0, pairs, visit);
}

/// Canonical codes of all colored plane trees with `edges` edges (colorings distinguished).
pub fn colored_codes(edges: usize) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    if edges == 0 {
        return out;
    }
    for_each_dyck_word(edges, &mut |word| {
        let text = std::str::from_utf8(word).expect("ascii");
        let tree = parse(text).expect("Dyck words parse");
        // Every white dart produces some word; keep each class once, at its minimum.
        if tree.plane_code() == text {
            out.insert(text.to_string());
        }
    });
    out
}

/// All colored plane trees with `edges` edges, one per isomorphism class, sorted by code.
pub fn enumerate_colored_trees(edges: usize) -> Vec<PlaneTree> {
    colored_codes(edges)
        .into_iter()
        .map(|c| parse(&c).expect("canonical code"))
        .collect()
}

/// One tree per class, further identifying each tree with its color inversion. The kept
/// member has a normalized passport; for color-symmetric passports the smaller code wins.
pub fn enumerate_trees(edges: usize) -> Vec<PlaneTree> {
    enumerate_colored_trees(edges)
        .into_iter()
        .filter(|t| {
            let (passport, swapped) = t.passport();
            if swapped {
                return false;
            }
            if passport.is_color_symmetric() {
                return t.plane_code() <= t.invert_colors().plane_code();
            }
            true
        })
        .collect()
}
