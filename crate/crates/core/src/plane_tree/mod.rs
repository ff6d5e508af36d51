//! Plane bipartite trees: trees with a proper two-coloring and a counterclockwise
//! cyclic order of edges at every vertex.

mod code;
mod enumerate;
mod passport;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use enumerate::{enumerate_colored_trees, enumerate_trees};
pub use passport::{Passport, PassportError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Color {
    White,
    Black,
}

impl Color {
    pub fn flip(self) -> Self {
        match self {
            Color::White => Color::Black,
            Color::Black => Color::White,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Color::White => 'W',
            Color::Black => 'B',
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub color: Color,
    /// Neighbor ids in counterclockwise order.
    pub neighbors: Vec<usize>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("plane code parse error at byte {position}: {message}")]
    Parse { position: usize, message: String },
    #[error("invalid tree: {0}")]
    Invalid(String),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymmetryFlags {
    /// A nontrivial color-preserving rotation about a vertex exists.
    pub rotational: bool,
    /// The tree is isomorphic to its reflection.
    pub mirror: bool,
}

#[derive(Clone, PartialEq, Eq)]
pub struct PlaneTree {
    vertices: Vec<Vertex>,
}

impl PlaneTree {
    /// Validates connectivity, acyclicity, the proper coloring and neighbor symmetry.
    pub fn from_vertices(vertices: Vec<Vertex>) -> Result<Self, TreeError> {
        let n = vertices.len();
        if n < 2 {
            return Err(TreeError::Invalid("a tree needs at least one edge".into()));
        }
        let mut degree_sum = 0;
        for (id, v) in vertices.iter().enumerate() {
            degree_sum += v.neighbors.len();
            for &u in &v.neighbors {
                if u >= n || u == id {
                    return Err(TreeError::Invalid(format!("vertex {id} has bad neighbor {u}")));
                }
                if vertices[u].color == v.color {
                    return Err(TreeError::Invalid(format!("edge {id}-{u} joins equal colors")));
                }
                let back = vertices[u].neighbors.iter().filter(|&&w| w == id).count();
                let forth = v.neighbors.iter().filter(|&&w| w == u).count();
                if back != 1 || forth != 1 {
                    return Err(TreeError::Invalid(format!("edge {id}-{u} is not listed once at both ends")));
                }
            }
        }
        if degree_sum != 2 * (n - 1) {
            return Err(TreeError::Invalid(format!(
                "{} vertices but {} edges",
                n,
                degree_sum / 2
            )));
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &u in &vertices[v].neighbors {
                if !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(TreeError::Invalid("graph is disconnected".into()));
        }
        Ok(Self { vertices })
    }

    /// Builds a tree from planar coordinates; the cyclic order at each vertex is the
    /// counterclockwise order of its edges' directions.
    pub fn from_embedding(
        points: &[(f64, f64)],
        colors: &[Color],
        edges: &[(usize, usize)],
    ) -> Result<Self, TreeError> {
        if points.len() != colors.len() {
            return Err(TreeError::Invalid("points and colors differ in length".into()));
        }
        let mut neighbors: Vec<Vec<usize>> = vec![Vec::new(); points.len()];
        for &(a, b) in edges {
            if a >= points.len() || b >= points.len() {
                return Err(TreeError::Invalid(format!("edge {a}-{b} out of range")));
            }
            neighbors[a].push(b);
            neighbors[b].push(a);
        }
        for (v, list) in neighbors.iter_mut().enumerate() {
            let (x0, y0) = points[v];
            list.sort_by(|&a, &b| {
                let ta = (points[a].1 - y0).atan2(points[a].0 - x0);
                let tb = (points[b].1 - y0).atan2(points[b].0 - x0);
                ta.total_cmp(&tb)
            });
        }
        Self::from_vertices(
            colors
                .iter()
                .zip(neighbors)
                .map(|(&color, neighbors)| Vertex { color, neighbors })
                .collect(),
        )
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn degree(&self, v: usize) -> usize {
        self.vertices[v].neighbors.len()
    }

    pub fn color(&self, v: usize) -> Color {
        self.vertices[v].color
    }

    /// Ids of vertices with the given color.
    pub fn vertices_of(&self, color: Color) -> impl Iterator<Item = usize> + '_ {
        (0..self.vertices.len()).filter(move |&v| self.vertices[v].color == color)
    }

    /// Degree lists of this coloring, without normalization.
    pub fn colored_passport(&self) -> Passport {
        let degrees = |c| self.vertices_of(c).map(|v| self.degree(v)).collect();
        Passport::new(degrees(Color::White), degrees(Color::Black))
            .expect("a valid tree has a valid passport")
    }

    /// Normalized passport, and whether the colors had to be swapped to normalize it.
    pub fn passport(&self) -> (Passport, bool) {
        self.colored_passport().normalized()
    }

    /// Same embedding, colors exchanged.
    pub fn invert_colors(&self) -> Self {
        Self {
            vertices: self
                .vertices
                .iter()
                .map(|v| Vertex {
                    color: v.color.flip(),
                    neighbors: v.neighbors.clone(),
                })
                .collect(),
        }
    }

    /// Reflection: every cyclic order reversed.
    pub fn mirror(&self) -> Self {
        Self {
            vertices: self
                .vertices
                .iter()
                .map(|v| Vertex {
                    color: v.color,
                    neighbors: v.neighbors.iter().rev().copied().collect(),
                })
                .collect(),
        }
    }

    /// Canonical code: smallest walk code over white roots and starting edges.
    pub fn plane_code(&self) -> String {
        code::canonical(self).0
    }

    /// Order of the color-preserving automorphism group.
    pub fn automorphism_count(&self) -> usize {
        code::canonical(self).1
    }

    pub fn symmetry_flags(&self) -> SymmetryFlags {
        let (code, autos) = code::canonical(self);
        SymmetryFlags {
            rotational: autos > 1,
            mirror: self.mirror().plane_code() == code,
        }
    }

    /// Canonical representative of this tree's isomorphism class.
    pub fn canonical(&self) -> Self {
        parse_plane_code(&self.plane_code()).expect("canonical codes parse")
    }

    /// Walk code rooted at `root`, children listed starting from `neighbors[start]`.
    pub fn rooted_code(&self, root: usize, start: usize) -> String {
        let mut out = Vec::with_capacity(2 * self.vertices.len() + 1);
        code::write_rooted(self, root, start, &mut out);
        String::from_utf8(out).expect("ascii")
    }
}

/// Parses the `W(()())()` text format.
pub fn parse_plane_code(text: &str) -> Result<PlaneTree, TreeError> {
    code::parse(text)
}

impl FromStr for PlaneTree {
    type Err = TreeError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_plane_code(s)
    }
}

impl fmt::Display for PlaneTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.plane_code())
    }
}

impl fmt::Debug for PlaneTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PlaneTree({})", self.plane_code())
    }
}


#[cfg(test)]
mod tests {
    use super::test_trees::*;
    use super::*;

    #[test]
    fn single_edge_code() {
        let t = parse_plane_code("W()").unwrap();
        assert_eq!(t.edge_count(), 1);
        assert_eq!(t.plane_code(), "W()");
        assert_eq!(parse_plane_code("B()").unwrap().plane_code(), "W()");
    }

    #[test]
    fn star_code() {
        let t = parse_plane_code("W()()()").unwrap();
        assert_eq!(t.vertex_count(), 4);
        assert_eq!(t.degree(0), 3);
        assert_eq!(t.plane_code(), "W()()()");
    }

    #[test]
    fn path_code_independent_of_leaf() {
        let a = parse_plane_code("W(())").unwrap();
        let b = parse_plane_code("B()()").unwrap();
        assert_eq!(a.plane_code(), b.plane_code());
        let path4 = parse_plane_code("W((()))").unwrap();
        assert_eq!(path4.plane_code(), path4.rooted_code(0, 0));
    }

    #[test]
    fn four_edge_tree_passport() {
        let t = four_edge_tree();
        let (pp, swapped) = t.passport();
        assert!(!swapped);
        assert_eq!(pp.white, vec![3, 1]);
        assert_eq!(pp.black, vec![2, 1, 1]);
        assert_eq!(t.plane_code(), "W((()()))");
    }

    #[test]
    fn passports_of_small_trees() {
        let (pp, _) = parse_plane_code("W()").unwrap().passport();
        assert_eq!((pp.white, pp.black), (vec![1], vec![1]));
        let path5 = parse_plane_code("W((((()))))").unwrap();
        assert_eq!(path5.edge_count(), 5);
        let (pp, _) = path5.passport();
        assert_eq!((pp.white.clone(), pp.black.clone()), (vec![2, 2, 1], vec![2, 2, 1]));
    }

    #[test]
    fn parse_errors_carry_positions() {
        for (text, pos) in [("W(()", 4), ("X()", 0), ("W())", 3), ("W", 1), ("W()x", 3)] {
            match parse_plane_code(text) {
                Err(TreeError::Parse { position, .. }) => assert_eq!(position, pos, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn color_inversion_is_involutive() {
        let t = four_edge_tree();
        assert_eq!(t.invert_colors().invert_colors().plane_code(), t.plane_code());
        assert_ne!(t.invert_colors().plane_code(), t.plane_code());
        let e = parse_plane_code("W()").unwrap();
        assert_eq!(e.invert_colors().plane_code(), e.plane_code());
    }

    #[test]
    fn symmetry_of_stars_and_paths() {
        let star = parse_plane_code("W()()()()()").unwrap();
        assert!(star.symmetry_flags().rotational);
        assert_eq!(star.automorphism_count(), 5);
        let path2 = parse_plane_code("W(())").unwrap();
        assert!(path2.symmetry_flags().rotational);
        let path3 = parse_plane_code("W((()))").unwrap();
        assert!(!path3.symmetry_flags().rotational);
        assert!(!four_edge_tree().symmetry_flags().rotational);
    }

    #[test]
    fn chiral_eight_edge_tree_is_not_mirror_symmetric() {
        let t = eight_edge_chiral();
        assert_eq!(t.edge_count(), 8);
        let flags = t.symmetry_flags();
        assert!(!flags.mirror);
        assert!(!flags.rotational);
        assert!(four_edge_tree().symmetry_flags().mirror);
    }

    #[test]
    fn embedding_validation() {
        let err = PlaneTree::from_embedding(
            &[(0.0, 0.0), (1.0, 0.0)],
            &[Color::White, Color::White],
            &[(0, 1)],
        );
        assert!(matches!(err, Err(TreeError::Invalid(_))));
        let cycle = PlaneTree::from_vertices(vec![
            Vertex { color: Color::White, neighbors: vec![1, 3] },
            Vertex { color: Color::Black, neighbors: vec![0, 2] },
            Vertex { color: Color::White, neighbors: vec![1, 3] },
            Vertex { color: Color::Black, neighbors: vec![2, 0] },
        ]);
        assert!(cycle.is_err());
    }
}
