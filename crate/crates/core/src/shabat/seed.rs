//! Starting points for the Newton solver.

use num_complex::Complex;
use num_traits::Zero;
use rand::Rng;

use super::system::{Normalization, ResidualSystem};
use crate::linalg::SquareMatrix;
use crate::plane_tree::{Color, PlaneTree};
use crate::scalar::{from_c64, Real};

const RELAX_ROUNDS: usize = 50;

/// Radial layout rooted at `root`, each subtree in an angular wedge proportional to its
/// leaf count and children placed in counterclockwise order, then internal vertices
/// relaxed toward the centroid of their neighbors.
pub fn layout(tree: &PlaneTree, root: usize) -> Vec<Complex<f64>> {
    let n = tree.vertex_count();
    let mut leaves = vec![0usize; n];
    fn count(tree: &PlaneTree, v: usize, parent: Option<usize>, leaves: &mut [usize]) -> usize {
        let mut total = 0;
        for &u in &tree.vertices()[v].neighbors {
            if Some(u) != parent {
                total += count(tree, u, Some(v), leaves);
            }
        }
        leaves[v] = total.max(1);
        leaves[v]
    }
    count(tree, root, None, &mut leaves);

    let mut pos = vec![Complex::zero(); n];
    // (vertex, parent, wedge start, wedge width, depth)
    let mut stack = vec![(root, None::<usize>, 0.0f64, std::f64::consts::TAU, 0usize)];
    while let Some((v, parent, start, width, depth)) = stack.pop() {
        let nbrs = &tree.vertices()[v].neighbors;
        let deg = nbrs.len();
        let first = match parent {
            Some(p) => nbrs.iter().position(|&u| u == p).unwrap() + 1,
            None => 0,
        };
        let children: Vec<usize> = (0..deg)
            .map(|k| nbrs[(first + k) % deg])
            .filter(|&u| Some(u) != parent)
            .collect();
        let total: usize = children.iter().map(|&u| leaves[u]).sum();
        let mut angle = start;
        for &u in &children {
            let w = width * leaves[u] as f64 / total as f64;
            let mid = angle + w / 2.0;
            pos[u] = Complex::from_polar((depth + 1) as f64, mid);
            stack.push((u, Some(v), angle, w, depth + 1));
            angle += w;
        }
    }
    for _ in 0..RELAX_ROUNDS {
        let prev = pos.clone();
        for v in 0..n {
            let nbrs = &tree.vertices()[v].neighbors;
            if nbrs.len() > 1 {
                let sum = nbrs.iter().fold(Complex::zero(), |acc, &u| acc + prev[u]);
                pos[v] = sum / nbrs.len() as f64;
            }
        }
    }
    pos
}

/// Maps tree positions onto the unknown layout of `sys`: vertices of each color sorted by
/// degree, matching the non-increasing passport order.
pub fn unknowns_from_layout<T: Real>(
    sys: &ResidualSystem,
    tree: &PlaneTree,
    positions: &[Complex<f64>],
) -> Vec<Complex<T>> {
    let sorted = |color: Color| {
        let mut ids: Vec<usize> = tree.vertices_of(color).collect();
        ids.sort_by_key(|&v| std::cmp::Reverse(tree.degree(v)));
        ids.into_iter().map(|v| positions[v]).collect::<Vec<_>>()
    };
    normalized_unknowns::<T>(sys, sorted(Color::White), sorted(Color::Black))
}

/// Uniform random vertices in the disk `|z| <= 2`.
pub fn random_unknowns<T: Real>(sys: &ResidualSystem, rng: &mut impl Rng) -> Vec<Complex<T>> {
    let mut draw = |k: usize| -> Vec<Complex<f64>> {
        (0..k)
            .map(|_| {
                let r = 2.0 * rng.gen::<f64>().sqrt();
                Complex::from_polar(r, rng.gen::<f64>() * std::f64::consts::TAU)
            })
            .collect()
    };
    let whites = draw(sys.white_count());
    let blacks = draw(sys.black_count());
    normalized_unknowns::<T>(sys, whites, blacks)
}

/// Applies the affine change satisfying the system's normalization equations, then picks
/// the leading coefficient by least squares against the constant-difference equations.
fn normalized_unknowns<T: Real>(
    sys: &ResidualSystem,
    mut whites: Vec<Complex<f64>>,
    mut blacks: Vec<Complex<f64>>,
) -> Vec<Complex<T>> {
    let one = Complex::new(1.0, 0.0);
    let (alpha, beta) = match sys.normalization() {
        Normalization::Zapponi => {
            let (s, t) = (whites.len() as f64, blacks.len() as f64);
            let sx: Complex<f64> = whites.iter().sum();
            let sy: Complex<f64> = blacks.iter().sum();
            // alpha * sx + s beta = 1, alpha * sy + t beta = -1
            let det = sx * t - sy * s;
            if det.norm() > 1e-9 {
                ((t + s) / det, (-sx - sy) / det)
            } else {
                (one, -(sx + sy) / (s + t))
            }
        }
        Normalization::Anchored => {
            let p = sys.passport();
            let gap = whites[0] - blacks[0];
            let alpha = if gap.norm() > 1e-12 { gap.inv() } else { one };
            let center = whites
                .iter()
                .zip(&p.white)
                .map(|(&x, &k)| x * k as f64)
                .sum::<Complex<f64>>()
                / sys.edges() as f64;
            (alpha, -alpha * center)
        }
    };
    for z in whites.iter_mut().chain(blacks.iter_mut()) {
        *z = alpha * *z + beta;
    }
    let mut u: Vec<Complex<T>> = whites
        .iter()
        .chain(blacks.iter())
        .map(|&z| from_c64(z))
        .collect();
    u.push(Complex::new(T::one(), T::zero()));
    // With a = 1 the residual is a (P_y - P_x) - 2 e_0, linear in a.
    let r = sys.residual(&u);
    let n = sys.edges();
    let two = T::lit(2.0);
    let mut num = Complex::zero();
    let mut den = T::zero();
    for (m, &rm) in r.iter().take(n).enumerate() {
        let v = if m == n - 1 { rm + two } else { rm };
        let e = if m == n - 1 { Complex::new(two, T::zero()) } else { Complex::zero() };
        num += v.conj() * e;
        den += v.norm_sqr();
    }
    if den > T::zero() {
        let a = num / den;
        if a.norm() > T::zero() && a.norm().is_finite() {
            *u.last_mut().unwrap() = a;
        }
    }
    u
}

/// Vertex positions from a truncated exterior conformal map of the tree.
///
/// Walking around the tree visits `2n` corners; corner `k` is sent to the point
/// `exp(i pi k / n)` of the unit circle, which is where `p(psi(zeta)) = (zeta^n + zeta^-n)/2`
/// takes the values `+-1`. A map `psi(zeta) = zeta + sum_j c_j zeta^-j` with
/// `terms` negative powers is fitted so that all corners of each vertex land on one point;
/// among the solutions the one minimizing `sum_j j^weight |c_j|^2` is taken.
pub fn conformal_layout(tree: &PlaneTree, terms: usize, weight: f64) -> Option<Vec<Complex<f64>>> {
    let n = tree.edge_count();
    let verts = tree.vertices();
    let white = tree.vertices_of(Color::White).next()?;
    // Contour walk on darts (tail, head), turning to the neighbor after `tail` around
    // `head`.
    let mut corners = Vec::with_capacity(2 * n);
    let (mut tail, mut head) = (white, verts[white].neighbors[0]);
    for _ in 0..2 * n {
        corners.push(tail);
        let nbrs = &verts[head].neighbors;
        let i = nbrs.iter().position(|&u| u == tail)?;
        let next = nbrs[(i + 1) % nbrs.len()];
        tail = head;
        head = next;
    }
    let point = |k: usize| Complex::from_polar(1.0, std::f64::consts::PI * k as f64 / n as f64);
    let mut first_corner = vec![usize::MAX; verts.len()];
    let mut rows: Vec<(usize, usize)> = Vec::with_capacity(n - 1);
    for (k, &v) in corners.iter().enumerate() {
        if first_corner[v] == usize::MAX {
            first_corner[v] = k;
        } else {
            rows.push((first_corner[v], k));
        }
    }
    let m = rows.len();
    if m == 0 || terms < m {
        return None;
    }
    // Constraints A c = b; weighted minimum norm c = W^-1 A^H (A W^-1 A^H)^-1 b.
    let mut a = vec![vec![Complex::zero(); terms]; m];
    let mut rhs = Vec::with_capacity(m);
    for (r, &(ia, ib)) in rows.iter().enumerate() {
        let (za, zb) = (point(ia), point(ib));
        for (j, entry) in a[r].iter_mut().enumerate() {
            let e = -((j + 1) as i32);
            *entry = za.powi(e) - zb.powi(e);
        }
        rhs.push(zb - za);
    }
    let winv: Vec<f64> = (0..terms).map(|j| ((j + 1) as f64).powf(-weight)).collect();
    let mut gram = SquareMatrix::<f64>::zeros(m);
    for r in 0..m {
        for q in 0..m {
            let entry = (0..terms).fold(Complex::zero(), |acc, j| {
                acc + a[r][j] * a[q][j].conj() * winv[j]
            });
            gram.set(r, q, entry);
        }
    }
    let lambda = gram.solve(&rhs)?;
    let coeffs: Vec<Complex<f64>> = (0..terms)
        .map(|j| {
            (0..m).fold(Complex::zero(), |acc, r| acc + a[r][j].conj() * lambda[r]) * winv[j]
        })
        .collect();
    let psi = |z: Complex<f64>| {
        coeffs
            .iter()
            .enumerate()
            .fold(z, |acc, (j, &c)| acc + c * z.powi(-((j + 1) as i32)))
    };
    Some(first_corner.iter().map(|&k| psi(point(k))).collect())
}
