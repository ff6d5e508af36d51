//! Balanced-parenthesis walk codes.

use super::{Color, PlaneTree, TreeError, Vertex};

pub(super) fn write_rooted(tree: &PlaneTree, root: usize, start: usize, out: &mut Vec<u8>) {
    out.push(tree.color(root).letter() as u8);
    let nbrs = &tree.vertices[root].neighbors;
    let deg = nbrs.len();
    for k in 0..deg {
        write_subtree(tree, nbrs[(start + k) % deg], root, out);
    }
}

fn write_subtree(tree: &PlaneTree, v: usize, parent: usize, out: &mut Vec<u8>) {
    out.push(b'(');
    let nbrs = &tree.vertices[v].neighbors;
    let deg = nbrs.len();
    let q = nbrs
        .iter()
        .position(|&u| u == parent)
        .expect("parent is a neighbor");
    for k in 1..deg {
        write_subtree(tree, nbrs[(q + k) % deg], v, out);
    }
    out.push(b')');
}

/// Minimal code over white darts, and how many darts attain it.
pub(super) fn canonical(tree: &PlaneTree) -> (String, usize) {
    let mut best: Option<Vec<u8>> = None;
    let mut ties = 0;
    let mut buf = Vec::with_capacity(2 * tree.vertex_count() + 1);
    for v in tree.vertices_of(Color::White) {
        for start in 0..tree.degree(v) {
            buf.clear();
            write_rooted(tree, v, start, &mut buf);
            match &best {
                Some(b) if buf.as_slice() > b.as_slice() => {}
                Some(b) if buf.as_slice() == b.as_slice() => ties += 1,
                _ => {
                    best = Some(buf.clone());
                    ties = 1;
                }
            }
        }
    }
    let code = String::from_utf8(best.expect("tree has a white vertex")).expect("ascii");
    (code, ties)
}

pub(super) fn parse(text: &str) -> Result<PlaneTree, TreeError> {
    let err = |position: usize, message: &str| TreeError::Parse {
        position,
        message: message.to_string(),
    };
    let bytes = text.as_bytes();
    let root_color = match bytes.first() {
        Some(b'W') => Color::White,
        Some(b'B') => Color::Black,
        _ => return Err(err(0, "expected root color `W` or `B`")),
    };
    let mut vertices = vec![Vertex {
        color: root_color,
        neighbors: Vec::new(),
    }];
    let mut stack = vec![0usize];
    for (i, &ch) in bytes.iter().enumerate().skip(1) {
        match ch {
            b'(' => {
                let parent = *stack.last().expect("stack holds the root");
                let id = vertices.len();
                vertices.push(Vertex {
                    color: vertices[parent].color.flip(),
                    neighbors: vec![parent],
                });
                vertices[parent].neighbors.push(id);
                stack.push(id);
            }
            b')' => {
                if stack.len() == 1 {
                    return Err(err(i, "unmatched `)`"));
                }
                stack.pop();
            }
            _ => return Err(err(i, "unexpected character")),
        }
    }
    if stack.len() != 1 {
        return Err(err(bytes.len(), "unclosed `(`"));
    }
    if vertices.len() == 1 {
        return Err(err(1, "expected at least one edge"));
    }
    PlaneTree::from_vertices(vertices)
}
