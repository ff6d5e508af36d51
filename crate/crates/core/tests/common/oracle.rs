//! Independent oracle: rooted plane trees from Dyck words, deduplicated by a minimal
//! walk code computed from scratch over every vertex and starting neighbour.

use std::collections::BTreeSet;

/// Counterclockwise neighbour lists; vertex 0 is the root.
pub type Adj = Vec<Vec<usize>>;

pub fn dyck_words(n: usize) -> Vec<Vec<bool>> {
    fn go(open: usize, close: usize, n: usize, cur: &mut Vec<bool>, out: &mut Vec<Vec<bool>>) {
        if cur.len() == 2 * n {
            out.push(cur.clone());
            return;
        }
        if open < n {
            cur.push(true);
            go(open + 1, close, n, cur, out);
            cur.pop();
        }
        if close < open {
            cur.push(false);
            go(open, close + 1, n, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, 0, n, &mut Vec::new(), &mut out);
    out
}

pub fn tree_of(word: &[bool]) -> Adj {
    let mut adj: Adj = vec![Vec::new()];
    let mut stack = vec![0usize];
    for &up in word {
        if up {
            let parent = *stack.last().unwrap();
            let child = adj.len();
            adj.push(vec![parent]);
            adj[parent].push(child);
            stack.push(child);
        } else {
            stack.pop();
        }
    }
    adj
}

fn walk(adj: &Adj, v: usize, from: usize, out: &mut String) {
    let k = adj[v].len();
    let pos = adj[v].iter().position(|&u| u == from).unwrap();
    for i in 1..k {
        let u = adj[v][(pos + i) % k];
        out.push('(');
        walk(adj, u, v, out);
        out.push(')');
    }
}

fn rooted(adj: &Adj, v: usize, start: usize) -> String {
    let mut s = String::new();
    let k = adj[v].len();
    for i in 0..k {
        let u = adj[v][(start + i) % k];
        s.push('(');
        walk(adj, u, v, &mut s);
        s.push(')');
    }
    s
}

/// Minimal code over roots whose depth parity is in `parities`.
pub fn key(adj: &Adj, parity: &[bool], parities: &[bool]) -> String {
    (0..adj.len())
        .filter(|&v| parities.contains(&parity[v]))
        .flat_map(|v| (0..adj[v].len()).map(move |s| (v, s)))
        .map(|(v, s)| rooted(adj, v, s))
        .min()
        .unwrap()
}

pub fn parity(adj: &Adj) -> Vec<bool> {
    let mut p = vec![false; adj.len()];
    let mut seen = vec![false; adj.len()];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for &u in &adj[v] {
            if !seen[u] {
                seen[u] = true;
                p[u] = !p[v];
                stack.push(u);
            }
        }
    }
    p
}

/// `(uncolored classes, colored classes)` for `n` edges.
pub fn classes(n: usize) -> (BTreeSet<String>, BTreeSet<String>) {
    let mut plain = BTreeSet::new();
    let mut colored = BTreeSet::new();
    for w in dyck_words(n) {
        let adj = tree_of(&w);
        let par = parity(&adj);
        plain.insert(key(&adj, &par, &[false, true]));
        colored.insert(key(&adj, &par, &[false]));
        colored.insert(format!("swap:{}", key(&adj, &par, &[true])));
    }
    // Rooting at a black vertex gives the white-rooted code of the inverted tree.
    let normalized: BTreeSet<String> = colored
        .into_iter()
        .map(|s| s.trim_start_matches("swap:").to_string())
        .collect();
    (plain, normalized)
}

pub fn adj_of(t: &dessin::PlaneTree) -> (Adj, Vec<bool>) {
    let adj: Adj = t.vertices().iter().map(|v| v.neighbors.clone()).collect();
    let odd: Vec<bool> = t
        .vertices()
        .iter()
        .map(|v| v.color == dessin::Color::Black)
        .collect();
    (adj, odd)
}
