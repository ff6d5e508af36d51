//! Plane bipartite trees, their Shabat polynomials in Zapponi normalization, and the
//! dynamics of those polynomials.
//!
//! The numerical modules are generic over [`Real`]; the aliases below fix the scalar to
//! `f64`, which is what the catalog and the command-line tool use.

pub mod catalog;
pub mod dynamics;
pub mod fractal;
pub mod linalg;
pub mod plane_tree;
pub mod polynomial;
pub mod record;
pub mod scalar;
pub mod shabat;

pub use plane_tree::{Color, Passport, PlaneTree, SymmetryFlags};
pub use scalar::Real;

pub type Complex64 = num_complex::Complex<f64>;
pub type Poly = polynomial::ComplexPoly<f64>;
pub type Cluster = polynomial::RootCluster<f64>;
