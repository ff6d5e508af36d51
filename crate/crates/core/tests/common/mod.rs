//! Closed-form Shabat polynomials and small helpers shared by the integration tests.

#![allow(dead_code)]

use dessin::catalog::fixture;
use dessin::shabat::{solve_tree, SZSolution, SolveConfig};
use dessin::{Complex64, Poly};

pub mod oracle;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn r(x: f64) -> Complex64 {
    c(x, 0.0)
}

/// `lead * prod (z - r)^m + shift` for real roots.
pub fn factored(lead: f64, roots: &[(f64, usize)], shift: f64) -> Poly {
    let roots: Vec<_> = roots.iter().map(|&(x, m)| (r(x), m)).collect();
    Poly::from_roots(r(lead), &roots).add_constant(r(shift))
}

pub fn scaled(coeffs: &[f64], s: f64) -> Poly {
    Poly::from_real(&coeffs.iter().map(|x| x * s).collect::<Vec<_>>())
}

/// `(3z+1)^4 (3z-4) / 128 + 1`
pub fn five_edge_1() -> Poly {
    factored(243.0 / 128.0, &[(-1.0 / 3.0, 4), (4.0 / 3.0, 1)], 1.0)
}

/// `-(z+2)^3 (z-3)^2 / 54 + 1`
pub fn five_edge_2() -> Poly {
    factored(-1.0 / 54.0, &[(-2.0, 3), (3.0, 2)], 1.0)
}

/// `-12z^5 + 10z^3 - 15z/4`
pub fn five_edge_3() -> Poly {
    Poly::from_real(&[0.0, -3.75, 0.0, 10.0, 0.0, -12.0])
}

/// `(2z+1)^3 (2z^2 - 3z + 18) / 432 + 1`
pub fn five_edge_4() -> Poly {
    let cube = factored(8.0, &[(-0.5, 3)], 0.0);
    let quad = Poly::from_real(&[18.0, -3.0, 2.0]);
    let prod: Vec<Complex64> = {
        let (a, b) = (cube.coeffs(), quad.coeffs());
        let mut out = vec![r(0.0); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y / 432.0;
            }
        }
        out
    };
    Poly::new(prod).add_constant(r(1.0))
}

/// `(z^5 - 5z^3 + 5z) / 2`
pub fn five_edge_5() -> Poly {
    scaled(&[0.0, 5.0, 0.0, -5.0, 0.0, 1.0], 0.5)
}

/// `(-z^6 + 6z^4 + 4z^3 - 9z^2 - 12z + 4) / 8`
pub fn six_edge() -> Poly {
    scaled(&[4.0, -12.0, -9.0, 4.0, 6.0, 0.0, -1.0], 1.0 / 8.0)
}

/// `2(2z+1)^3 (2z-3) / 27 + 1`
pub fn four_edge() -> Poly {
    factored(32.0 / 27.0, &[(-0.5, 3), (1.5, 1)], 1.0)
}

pub fn square() -> Poly {
    Poly::from_real(&[0.0, 0.0, 1.0])
}

pub fn solve(id: &str) -> SZSolution<f64> {
    let tree = fixture(id).unwrap_or_else(|| panic!("no fixture {id}"));
    solve_tree(&tree, &SolveConfig::default()).unwrap_or_else(|e| panic!("{id}: {e}"))
}

pub fn assert_close(a: &Poly, b: &Poly, tol: f64) {
    let d = a.max_coeff_distance(b);
    assert!(d < tol, "coefficients differ by {d}: {:?} vs {:?}", a.coeffs(), b.coeffs());
}
