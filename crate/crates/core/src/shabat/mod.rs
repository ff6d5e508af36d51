//! Shabat polynomials in Zapponi form.
//!
//! A Shabat polynomial has critical values `+1` and `-1` only; the preimage of the
//! segment between them is a plane tree whose white vertices map to `1` and black
//! vertices to `-1`. Zapponi form fixes the affine freedom by requiring the white
//! coordinates to sum to `1` and the black ones to `-1`.

mod identify;
mod seed;
mod solve;
mod system;

use num_complex::Complex;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::polynomial::{ComplexPoly, RootCluster, RootError, DEFAULT_CLUSTER_TOL};
use crate::scalar::Real;

pub use identify::{identify_embedding, identify_tree, Embedding};
pub use seed::{conformal_layout, layout, random_unknowns, unknowns_from_layout};
pub use solve::{count_trees_with_passport, solve_passport, solve_tree, SolveConfig};
pub use system::{NewtonRun, Normalization, ResidualSystem};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ShabatError {
    #[error("passport {0} does not describe a tree")]
    NotTreePassport(String),
    #[error("a Shabat polynomial needs at least two edges, got {0}")]
    TooFewEdges(usize),
    #[error("no Zapponi form: {0}")]
    NoZapponiForm(String),
    #[error("solver exhausted its budget of {restarts} restarts; best residuals {best_residuals:?}")]
    Exhausted {
        restarts: usize,
        best_residuals: Vec<f64>,
    },
    #[error("not a Shabat polynomial: {0}")]
    NotShabat(String),
    #[error("path lifting stalled on germ {germ} of white vertex {white}")]
    Stalled { white: usize, germ: usize },
    #[error("vertex {0} has degree one; pick a vertex of degree at least two")]
    LeafVertex(usize),
    #[error("vertex index {0} out of range")]
    NoSuchVertex(usize),
    #[error("root finding failed: {0}")]
    Roots(String),
}

impl<T: Real> From<RootError<T>> for ShabatError {
    fn from(e: RootError<T>) -> Self {
        ShabatError::Roots(e.to_string())
    }
}

/// A Shabat polynomial in Zapponi form with its vertex coordinates.
#[derive(Clone, Debug)]
pub struct SZSolution<T: Real> {
    pub poly: ComplexPoly<T>,
    /// Preimages of `1` with multiplicities (white vertices).
    pub white: Vec<RootCluster<T>>,
    /// Preimages of `-1` with multiplicities (black vertices).
    pub black: Vec<RootCluster<T>>,
    pub leading: Complex<T>,
    pub residual: T,
}

/// Deviations from the Zapponi identities.
#[derive(Clone, Copy, Debug)]
pub struct ZapponiDefects<T: Real> {
    /// `|a_{n-1} / a_n|`
    pub subleading: T,
    /// `|sum x_i - 1|`
    pub white_sum: T,
    /// `|sum y_j + 1|`
    pub black_sum: T,
    /// `|sum k_i x_i - sum l_j y_j|`
    pub weighted: T,
}

impl<T: Real> ZapponiDefects<T> {
    pub fn max(&self) -> T {
        self.subleading
            .max(self.white_sum)
            .max(self.black_sum)
            .max(self.weighted)
    }
}

impl<T: Real> SZSolution<T> {
    pub fn degree(&self) -> usize {
        self.poly.degree()
    }

    pub fn defects(&self) -> ZapponiDefects<T> {
        let n = self.poly.degree();
        let sum = |v: &[RootCluster<T>]| v.iter().fold(Complex::<T>::zero(), |a, c| a + c.location);
        let weighted = |v: &[RootCluster<T>]| {
            v.iter().fold(Complex::zero(), |a: Complex<T>, c| {
                a + c.location * T::from_usize(c.multiplicity)
            })
        };
        ZapponiDefects {
            subleading: (self.poly.coeff(n - 1) / self.poly.leading()).norm(),
            white_sum: (sum(&self.white) - Complex::one()).norm(),
            black_sum: (sum(&self.black) + Complex::one()).norm(),
            weighted: (weighted(&self.white) - weighted(&self.black)).norm(),
        }
    }

    /// The solution of the color-inverted tree: `-p(-z)`, vertices negated and recolored.
    pub fn color_inverted(&self) -> Self {
        let neg = |v: &[RootCluster<T>]| {
            v.iter()
                .map(|c| RootCluster {
                    location: -c.location,
                    ..c.clone()
                })
                .collect()
        };
        let poly = self.poly.conjugate_by_negation();
        Self {
            leading: poly.leading(),
            poly,
            white: neg(&self.black),
            black: neg(&self.white),
            residual: self.residual,
        }
    }

    /// Coordinates are real up to `tol`.
    pub fn is_real(&self, tol: T) -> bool {
        self.poly.coeffs().iter().all(|a| a.im.abs() <= tol)
    }

    /// The postcritically finite form `q(z) = p(alpha z + beta)` sending `1` to the
    /// chosen white vertex and `-1` to the chosen black vertex; both must have degree > 1.
    pub fn pcf_form(&self, white: usize, black: usize) -> Result<ComplexPoly<T>, ShabatError> {
        let w = self.white.get(white).ok_or(ShabatError::NoSuchVertex(white))?;
        let b = self.black.get(black).ok_or(ShabatError::NoSuchVertex(black))?;
        if w.multiplicity < 2 {
            return Err(ShabatError::LeafVertex(white));
        }
        if b.multiplicity < 2 {
            return Err(ShabatError::LeafVertex(black));
        }
        let half = T::lit(0.5);
        let alpha = (w.location - b.location) * half;
        let beta = (w.location + b.location) * half;
        Ok(self.poly.compose_affine(alpha, beta))
    }
}

/// Brings any Shabat polynomial to Zapponi form: shift to kill the `z^{n-1}` coefficient,
/// then rescale so the white vertices sum to `1`.
pub fn zapponi_normalize<T: Real>(p: &ComplexPoly<T>, tol: T) -> Result<SZSolution<T>, ShabatError> {
    if !p.is_shabat(T::lit(1e-6)) {
        return Err(ShabatError::NotShabat("critical values are not +-1".into()));
    }
    let n = p.degree();
    let shift = -p.coeff(n - 1) / (p.leading() * T::from_usize(n));
    let cluster_tol = T::lit(DEFAULT_CLUSTER_TOL);
    // Cluster in the input's own coordinates; an intermediate composition would add
    // coefficient noise that splits multiple roots.
    let white = p.preimages(Complex::one(), cluster_tol)?;
    let x_sum = white
        .iter()
        .fold(Complex::zero(), |a, c| a + (c.location - shift));
    if x_sum.norm() <= tol * (T::one() + shift.norm()) {
        return Err(ShabatError::NoZapponiForm(
            "white vertices sum to zero after centering".into(),
        ));
    }
    from_polynomial(p.compose_affine(x_sum, shift))
}

/// Packages a polynomial already in Zapponi form, recomputing its vertex clusters.
pub fn from_polynomial<T: Real>(poly: ComplexPoly<T>) -> Result<SZSolution<T>, ShabatError> {
    let cluster_tol = T::lit(DEFAULT_CLUSTER_TOL);
    let one = Complex::<T>::one();
    let white = poly.preimages(one, cluster_tol)?;
    let black = poly.preimages(-one, cluster_tol)?;
    let residual = white
        .iter()
        .chain(black.iter())
        .map(|c| c.residual)
        .fold(T::zero(), T::max);
    Ok(SZSolution {
        leading: poly.leading(),
        poly,
        white,
        black,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    type P = ComplexPoly<f64>;

    fn four_one() -> P {
        P::from_roots(
            c(243.0 / 128.0, 0.0),
            &[(c(-1.0 / 3.0, 0.0), 4), (c(4.0 / 3.0, 0.0), 1)],
        )
        .add_constant(c(1.0, 0.0))
    }

    fn three_two() -> P {
        P::from_roots(c(-1.0 / 54.0, 0.0), &[(c(-2.0, 0.0), 3), (c(3.0, 0.0), 2)])
            .add_constant(c(1.0, 0.0))
    }

    #[test]
    fn normalization_is_idempotent() {
        let p = three_two();
        let sz = zapponi_normalize(&p, 1e-9).unwrap();
        assert!(sz.poly.max_coeff_distance(&p) < 1e-9);
        assert!(sz.defects().max() < 1e-8);
    }

    #[test]
    fn normalization_undoes_affine_changes() {
        let p = four_one();
        for (alpha, beta) in [(c(0.7, 0.4), c(-0.3, 1.1)), (c(-2.0, 0.0), c(0.5, 0.0))] {
            let q = p.compose_affine(alpha, beta);
            let sz = zapponi_normalize(&q, 1e-9).unwrap();
            assert!(sz.poly.max_coeff_distance(&p) < 1e-8, "{}", sz.poly);
        }
    }

    #[test]
    fn symmetric_path_has_no_zapponi_form() {
        let t4 = P::from_real(&[1.0, 0.0, -8.0, 0.0, 8.0]);
        assert!(matches!(
            zapponi_normalize(&t4, 1e-9),
            Err(ShabatError::NoZapponiForm(_))
        ));
    }

    #[test]
    fn pcf_form_fixes_plus_and_minus_one() {
        let sz = from_polynomial(four_one()).unwrap();
        let w = sz.white.iter().position(|c| c.multiplicity > 1).unwrap();
        let b = sz.black.iter().position(|c| c.multiplicity > 1).unwrap();
        let q = sz.pcf_form(w, b).unwrap();
        assert!((q.eval(c(1.0, 0.0)) - c(1.0, 0.0)).norm() < 1e-10);
        assert!((q.eval(c(-1.0, 0.0)) - c(-1.0, 0.0)).norm() < 1e-10);
        for cp in q.critical_data(1e-6).unwrap() {
            let image = q.eval(cp.point);
            assert!((image - c(1.0, 0.0)).norm() < 1e-7 || (image + c(1.0, 0.0)).norm() < 1e-7);
            assert!((q.eval(image) - image).norm() < 1e-7);
        }
        let leaf = sz.black.iter().position(|c| c.multiplicity == 1).unwrap();
        assert!(matches!(sz.pcf_form(w, leaf), Err(ShabatError::LeafVertex(_))));
    }
}
