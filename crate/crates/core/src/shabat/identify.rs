//! Recovering the plane tree `p^{-1}[-1, 1]` of a Shabat polynomial by lifting the
//! segment from every white vertex.

use num_complex::Complex;
use num_traits::{One, Zero};

use super::ShabatError;
use crate::plane_tree::{Color, PlaneTree, Vertex};
use crate::polynomial::{ComplexPoly, RootCluster, DEFAULT_CLUSTER_TOL};
use crate::scalar::Real;

const MAX_GERM_EPS: f64 = 1e-3;
const GERM_FRACTION: f64 = 0.02;
const CAPTURE_FRACTION: f64 = 0.05;
const STEP_FRACTION: f64 = 0.2;
const MAX_LOCAL_FRACTION: f64 = 0.3;
/// Smallest distance of a germ or capture value from the critical value.
const VALUE_NOISE_FLOOR: f64 = 1e-9;
const MAX_STEPS: usize = 200_000;

/// The tree of a Shabat polynomial with vertex ids aligned to the root clusters:
/// ids `0..white.len()` are the white clusters, the rest the black ones.
#[derive(Clone, Debug)]
pub struct Embedding<T: Real> {
    pub tree: PlaneTree,
    pub white: Vec<RootCluster<T>>,
    pub black: Vec<RootCluster<T>>,
}

/// Canonical plane tree of a Shabat polynomial.
pub fn identify_tree<T: Real>(p: &ComplexPoly<T>) -> Result<PlaneTree, ShabatError> {
    identify_embedding(p).map(|e| e.tree.canonical())
}

/// Works on `p(c + r w)` with `c` the root centroid and `r` a root radius bound, so
/// tolerances see vertices of unit size; locations are mapped back afterwards.
pub fn identify_embedding<T: Real>(p: &ComplexPoly<T>) -> Result<Embedding<T>, ShabatError> {
    let n = p.degree();
    if n < 1 {
        return Err(ShabatError::NotShabat("constant polynomial".into()));
    }
    let center = -p.coeff(n - 1) / (p.leading() * T::from_usize(n));
    let centered = p.compose_affine(Complex::one(), center);
    let radius = (0..n)
        .filter_map(|k| {
            let r = (centered.coeff(k) / centered.leading()).norm();
            (r > T::zero()).then(|| r.powf(T::one() / T::from_usize(n - k)))
        })
        .fold(T::zero(), T::max);
    let radius = if radius > T::zero() && radius.is_finite() { radius } else { T::one() };
    let alpha = Complex::new(radius, T::zero());
    let mut e = embed(&p.compose_affine(alpha, center))?;
    for c in e.white.iter_mut().chain(e.black.iter_mut()) {
        c.location = center + c.location * radius;
    }
    let one = Complex::<T>::one();
    for c in e.white.iter_mut() {
        c.residual = (p.eval(c.location) - one).norm();
    }
    for c in e.black.iter_mut() {
        c.residual = (p.eval(c.location) + one).norm();
    }
    Ok(e)
}

fn embed<T: Real>(p: &ComplexPoly<T>) -> Result<Embedding<T>, ShabatError> {
    let n = p.degree();
    let tol = T::lit(DEFAULT_CLUSTER_TOL);
    let one = Complex::<T>::one();
    let white = p.preimages(one, tol)?;
    let black = p.preimages(-one, tol)?;
    let (s, t) = (white.len(), black.len());
    if s + t != n + 1 {
        return Err(ShabatError::NotShabat(format!(
            "{s} white and {t} black vertices for degree {n}"
        )));
    }
    let points: Vec<Complex<T>> = white
        .iter()
        .chain(black.iter())
        .map(|c| c.location)
        .collect();
    let spacing: Vec<T> = (0..points.len())
        .map(|i| {
            (0..points.len())
                .filter(|&j| j != i)
                .map(|j| (points[i] - points[j]).norm())
                .fold(T::infinity(), T::min)
        })
        .collect();
    let deriv = p.derivative();
    let nearest = |z: Complex<T>| {
        points
            .iter()
            .map(|&v| (z - v).norm())
            .fold(T::infinity(), T::min)
    };

    let mut capture = Vec::with_capacity(t);
    for (bj, cluster) in black.iter().enumerate() {
        let l = cluster.multiplicity;
        let lead = p.taylor_at(cluster.location).get(l).copied().unwrap_or_else(Complex::zero);
        if lead.is_zero() {
            return Err(ShabatError::NotShabat("degenerate black vertex".into()));
        }
        capture.push(local_radius(lead.norm(), l, spacing[s + bj], CAPTURE_FRACTION));
    }

    let mut white_edges: Vec<Vec<(T, usize)>> = vec![Vec::new(); s];
    let mut black_edges: Vec<Vec<(T, usize)>> = vec![Vec::new(); t];
    for (wi, cluster) in white.iter().enumerate() {
        let x = cluster.location;
        let k = cluster.multiplicity;
        let taylor = p.taylor_at(x);
        let lead = taylor.get(k).copied().unwrap_or_else(Complex::zero);
        if lead.is_zero() {
            return Err(ShabatError::NotShabat("degenerate white vertex".into()));
        }
        let radius = local_radius(lead.norm(), k, spacing[wi], GERM_FRACTION);
        let eps = T::lit(MAX_GERM_EPS).min(lead.norm() * radius.powi(k as i32));
        let t0 = T::one() - eps;
        // The k solutions of p = t0 closest to the vertex start its k edges.
        let mut germs = p.add_constant(Complex::new(-t0, T::zero())).raw_roots()?;
        germs.sort_by(|a, b| (*a - x).norm().partial_cmp(&(*b - x).norm()).unwrap());
        for (g, &z) in germs.iter().take(k).enumerate() {
            let departure = normalize_angle((z - x).arg());
            let (bj, arrival) = lift(p, &deriv, z, t0, &black, &capture, &nearest)
                .ok_or(ShabatError::Stalled { white: wi, germ: g })?;
            white_edges[wi].push((departure, bj));
            black_edges[bj].push((arrival, wi));
        }
    }
    for (bj, cluster) in black.iter().enumerate() {
        if black_edges[bj].len() != cluster.multiplicity {
            return Err(ShabatError::NotShabat(format!(
                "black vertex {bj} of degree {} received {} edges",
                cluster.multiplicity,
                black_edges[bj].len()
            )));
        }
    }
    let mut vertices = Vec::with_capacity(s + t);
    for mut list in white_edges {
        list.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        vertices.push(Vertex {
            color: Color::White,
            neighbors: list.into_iter().map(|(_, b)| s + b).collect(),
        });
    }
    for mut list in black_edges {
        list.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        vertices.push(Vertex {
            color: Color::Black,
            neighbors: list.into_iter().map(|(_, w)| w).collect(),
        });
    }
    let tree = PlaneTree::from_vertices(vertices)
        .map_err(|e| ShabatError::NotShabat(format!("lifted graph is not a tree: {e}")))?;
    Ok(Embedding { tree, white, black })
}

/// Radius around a vertex of local degree `k` with leading Taylor coefficient `lead`:
/// `fraction` of the spacing, enlarged until `lead r^k` clears the noise floor, and never
/// beyond `MAX_LOCAL_FRACTION` of the spacing.
fn local_radius<T: Real>(lead: T, k: usize, spacing: T, fraction: f64) -> T {
    let r = spacing * T::lit(fraction);
    let floor = (T::lit(VALUE_NOISE_FLOOR) / lead).powf(T::one() / T::from_usize(k));
    r.max(floor).min(spacing * T::lit(MAX_LOCAL_FRACTION))
}

fn normalize_angle<T: Real>(a: T) -> T {
    if a < T::zero() {
        a + T::TAU()
    } else {
        a
    }
}

/// Follows `p(z(t)) = t` downward from `t0` until `z` enters the capture disk of a black
/// vertex. Returns that vertex and the arrival angle.
fn lift<T: Real>(
    p: &ComplexPoly<T>,
    deriv: &ComplexPoly<T>,
    start: Complex<T>,
    t0: T,
    black: &[RootCluster<T>],
    capture: &[T],
    nearest: &impl Fn(Complex<T>) -> T,
) -> Option<(usize, T)> {
    let mut z = start;
    let mut t = t0;
    let mut dt = -(T::one() - t0);
    let floor = -T::one();
    for _ in 0..MAX_STEPS {
        for (j, b) in black.iter().enumerate() {
            if (z - b.location).norm() < capture[j] {
                return Some((j, normalize_angle((z - b.location).arg())));
            }
        }
        if dt.abs() < T::lit(1e-18) {
            return None;
        }
        let t_next = (t + dt).max(floor);
        let step = t_next - t;
        let dp = deriv.eval(z);
        if dp.is_zero() {
            return None;
        }
        let dz = Complex::new(step, T::zero()) / dp;
        if dz.norm() > T::lit(STEP_FRACTION) * nearest(z) {
            dt *= T::lit(0.5);
            continue;
        }
        let predicted = z + dz;
        let target = Complex::new(t_next, T::zero());
        let mut w = predicted;
        let mut converged = false;
        for _ in 0..8 {
            let (v, dv) = p.eval_with_derivative(w);
            if dv.is_zero() {
                break;
            }
            let delta = (v - target) / dv;
            // Near a vertex p' is small and the update bottoms out at rounding noise, so
            // a residual at the rounding level also counts.
            let noise = p.rounding_bound(w) * T::lit(32.0);
            w -= delta;
            if delta.norm() <= T::lit(1e-13) * (T::one() + w.norm())
                || (v - target).norm() <= noise
                || delta.norm() <= T::lit(1e-6) * dz.norm()
            {
                converged = true;
                break;
            }
        }
        if !converged || (w - predicted).norm() > T::lit(0.25) * dz.norm() + T::lit(1e-13) {
            dt *= T::lit(0.5);
            continue;
        }
        z = w;
        t = t_next;
        if t <= floor {
            // Reached -1 without capture: take the nearest black vertex.
            let (j, b) = black.iter().enumerate().min_by(|a, b| {
                (z - a.1.location)
                    .norm()
                    .partial_cmp(&(z - b.1.location).norm())
                    .unwrap()
            })?;
            return Some((j, normalize_angle((z - b.location).arg())));
        }
        dt *= T::lit(2.0);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plane_tree::parse_plane_code;

    #[test]
    fn chebyshev_two_is_a_path() {
        let p = ComplexPoly::<f64>::from_real(&[-1.0, 0.0, 2.0]);
        let t = identify_tree(&p).unwrap();
        assert_eq!(t.plane_code(), parse_plane_code("W(())").unwrap().plane_code());
    }

    #[test]
    fn path_of_five_edges() {
        let p = ComplexPoly::<f64>::from_real(&[0.0, 2.5, 0.0, -2.5, 0.0, 0.5]);
        let t = identify_tree(&p).unwrap();
        assert_eq!(t.plane_code(), "W((((()))))");
    }

    #[test]
    fn four_one_tree_from_polynomial() {
        let p = ComplexPoly::<f64>::from_roots(
            Complex::new(243.0 / 128.0, 0.0),
            &[(Complex::new(-1.0 / 3.0, 0.0), 4), (Complex::new(4.0 / 3.0, 0.0), 1)],
        )
        .add_constant(Complex::new(1.0, 0.0));
        let t = identify_tree(&p).unwrap();
        let (pp, swapped) = t.passport();
        assert!(!swapped);
        assert_eq!(pp.to_string(), "4,1|2,1,1,1");
        assert_eq!(t.plane_code(), "W((()()()))");
    }

    #[test]
    fn non_shabat_input_is_rejected() {
        let p = ComplexPoly::<f64>::from_real(&[0.3, 0.0, 0.0, 1.0]);
        assert!(identify_tree(&p).is_err());
    }
}
