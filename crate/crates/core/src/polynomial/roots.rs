//! Simultaneous root finding (Aberth–Ehrlich) with multiplicity clustering.

use num_complex::Complex;
use num_traits::{One, Zero};
use thiserror::Error;

use super::ComplexPoly;
use crate::scalar::Real;

pub const DEFAULT_CLUSTER_TOL: f64 = 1e-6;

const MAX_SWEEPS: usize = 2000;
/// Inflation of the Horner bound when sizing inclusion disks for clustering.
const ROUNDING_SAFETY: f64 = 16.0;

/// Horner rounding bound for coefficients of the given magnitudes.
fn magnitude_bound<T: Real>(scale: &[T], z: Complex<T>) -> T {
    let r = z.norm();
    let acc = scale.iter().rev().fold(T::zero(), |acc, &a| acc * r + a);
    acc * T::epsilon() * T::from_usize(2 * scale.len())
}

/// A group of numerically coincident roots.
#[derive(Clone, Debug, PartialEq)]
pub struct RootCluster<T: Real> {
    pub location: Complex<T>,
    pub multiplicity: usize,
    /// `|p(location)|` after polishing.
    pub residual: T,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RootError<T: Real> {
    #[error("polynomial has degree zero")]
    Constant,
    #[error("polynomial has non-finite coefficients")]
    NonFinite,
    #[error("root iteration did not converge after {sweeps} sweeps")]
    NoConvergence {
        sweeps: usize,
        best: Vec<Complex<T>>,
    },
}

impl<T: Real> ComplexPoly<T> {
    /// All roots by Aberth iteration, grouped into clusters of coincident roots.
    pub fn roots(&self, cluster_tol: T) -> Result<Vec<RootCluster<T>>, RootError<T>> {
        let raw = self.raw_roots()?;
        let scale: Vec<T> = self.coeffs.iter().map(|c| c.norm()).collect();
        Ok(self.cluster(&raw, cluster_tol, &scale))
    }

    /// Clustered solutions of `p(z) = w`.
    ///
    /// Differs from `(p - w).roots` in the noise model: the rounding level is that of
    /// `p` itself, so cancellation in the constant term does not make a multiple root
    /// look like several simple ones.
    pub fn preimages(&self, w: Complex<T>, cluster_tol: T) -> Result<Vec<RootCluster<T>>, RootError<T>> {
        let q = self.add_constant(-w);
        let raw = q.raw_roots()?;
        let mut scale: Vec<T> = self.coeffs.iter().map(|c| c.norm()).collect();
        scale[0] += w.norm();
        Ok(q.cluster(&raw, cluster_tol, &scale))
    }

    /// Unclustered root approximations, one per degree.
    pub fn raw_roots(&self) -> Result<Vec<Complex<T>>, RootError<T>> {
        if !self.is_finite() {
            return Err(RootError::NonFinite);
        }
        let n = self.degree();
        if n == 0 {
            return Err(RootError::Constant);
        }
        let lead = self.leading();
        if n == 1 {
            return Ok(vec![-self.coeffs[0] / lead]);
        }
        let mut z = initial_guesses(self);
        aberth(self, &mut z).map(|_| z)
    }

    fn cluster(&self, raw: &[Complex<T>], cluster_tol: T, scale: &[T]) -> Vec<RootCluster<T>> {
        let n = self.degree() as f64;
        let deriv = self.derivative();
        // Inclusion radius for each approximation: a disk of radius n |p/p'| holds a root.
        // |p| is inflated by the Horner rounding bound so that exact-looking zeros of a
        // multiple root still see their siblings.
        let radius: Vec<T> = raw
            .iter()
            .map(|&z| {
                let dp = deriv.eval(z);
                let rounding = magnitude_bound(scale, z) * T::lit(ROUNDING_SAFETY);
                let r = if dp.is_zero() {
                    T::infinity()
                } else {
                    (self.eval(z).norm() + rounding) / dp.norm() * T::lit(n)
                };
                r.min(T::lit(0.1))
            })
            .collect();
        let mut parent: Vec<usize> = (0..raw.len()).collect();
        fn find(parent: &mut [usize], i: usize) -> usize {
            let mut r = i;
            while parent[r] != r {
                r = parent[r];
            }
            let mut j = i;
            while parent[j] != r {
                let next = parent[j];
                parent[j] = r;
                j = next;
            }
            r
        }
        for i in 0..raw.len() {
            for j in i + 1..raw.len() {
                let d = (raw[i] - raw[j]).norm();
                if d <= cluster_tol + radius[i] + radius[j] {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    if a != b {
                        parent[b] = a;
                    }
                }
            }
        }
        let mut groups: Vec<(usize, Vec<Complex<T>>)> = Vec::new();
        for i in 0..raw.len() {
            let r = find(&mut parent, i);
            match groups.iter_mut().find(|(root, _)| *root == r) {
                Some((_, members)) => members.push(raw[i]),
                None => groups.push((r, vec![raw[i]])),
            }
        }
        groups
            .into_iter()
            .map(|(_, members)| {
                let m = members.len();
                let centroid = members.iter().fold(Complex::zero(), |acc, &z| acc + z)
                    / T::from_usize(m);
                let location = self.polish(centroid, m);
                RootCluster {
                    location,
                    multiplicity: m,
                    residual: self.eval(location).norm(),
                }
            })
            .collect()
    }

    /// Bound on the rounding error of Horner evaluation at `z`.
    pub(crate) fn rounding_bound(&self, z: Complex<T>) -> T {
        let scale: Vec<T> = self.coeffs.iter().map(|c| c.norm()).collect();
        magnitude_bound(&scale, z)
    }

    /// Newton on `p^(m-1)`, whose zero at an `m`-fold root of `p` is simple.
    /// Keeps the input when polishing does not reduce the residual.
    fn polish(&self, start: Complex<T>, multiplicity: usize) -> Complex<T> {
        let g = self.nth_derivative(multiplicity - 1);
        let dg = g.derivative();
        let mut z = start;
        let mut best = (z, g.eval(z).norm());
        for _ in 0..8 {
            let (v, dv) = (g.eval(z), dg.eval(z));
            if dv.is_zero() {
                break;
            }
            let step = v / dv;
            if step.norm() > T::lit(1e-3) * (T::one() + z.norm()) {
                break;
            }
            z -= step;
            let r = g.eval(z).norm();
            if !(r < best.1) {
                break;
            }
            best = (z, r);
        }
        best.0
    }
}

fn initial_guesses<T: Real>(p: &ComplexPoly<T>) -> Vec<Complex<T>> {
    let n = p.degree();
    let lead = p.leading().norm();
    // Fujiwara-type radius bound, then spread on a slightly rotated circle.
    let mut radius = T::zero();
    for k in 0..n {
        let a = p.coeffs[k].norm() / lead;
        if a > T::zero() {
            let root = a.powf(T::one() / T::from_usize(n - k));
            radius = radius.max(root);
        }
    }
    let radius = if radius > T::zero() { radius } else { T::one() };
    let centroid = -p.coeffs[n - 1] / (p.leading() * T::from_usize(n));
    let two_pi = T::TAU();
    (0..n)
        .map(|k| {
            let theta = two_pi * T::from_usize(k) / T::from_usize(n) + T::lit(0.4);
            centroid + Complex::from_polar(radius, theta)
        })
        .collect()
}

fn aberth<T: Real>(p: &ComplexPoly<T>, z: &mut [Complex<T>]) -> Result<(), RootError<T>> {
    let n = z.len();
    let eps = T::epsilon() * T::lit(4.0);
    let mut done = vec![false; n];
    for _sweep in 0..MAX_SWEEPS {
        let mut all_done = true;
        for i in 0..n {
            if done[i] {
                continue;
            }
            let (v, dv) = p.eval_with_derivative(z[i]);
            if v.is_zero() {
                done[i] = true;
                continue;
            }
            let ratio = v / dv;
            let mut repulsion = Complex::<T>::zero();
            for j in 0..n {
                if j != i {
                    let d = z[i] - z[j];
                    if !d.is_zero() {
                        repulsion += d.inv();
                    }
                }
            }
            let denom = Complex::<T>::one() - ratio * repulsion;
            let step = if denom.is_zero() || !crate::scalar::is_finite(ratio) {
                // Nudge away from a critical point of p.
                Complex::new(eps.sqrt(), eps.sqrt()) * (T::one() + z[i].norm())
            } else {
                ratio / denom
            };
            z[i] -= step;
            if step.norm() <= eps * (T::one() + z[i].norm()) {
                done[i] = true;
            } else {
                all_done = false;
            }
        }
        if all_done {
            return Ok(());
        }
    }
    // Stagnation at limiting accuracy is normal for multiple roots; accept when the
    // residual is at rounding level.
    let scale = p
        .coeffs
        .iter()
        .map(|a| a.norm())
        .fold(T::zero(), T::max);
    let ok = z.iter().all(|&zi| {
        let mag = T::one().max(zi.norm()).powi(p.degree() as i32);
        p.eval(zi).norm() <= T::lit(1e3) * T::epsilon() * scale * mag * T::from_usize(p.degree())
    });
    if ok {
        Ok(())
    } else {
        Err(RootError::NoConvergence {
            sweeps: MAX_SWEEPS,
            best: z.to_vec(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    type P = ComplexPoly<f64>;

    fn sorted(mut v: Vec<RootCluster<f64>>) -> Vec<RootCluster<f64>> {
        v.sort_by(|a, b| a.location.re.partial_cmp(&b.location.re).unwrap());
        v
    }

    #[test]
    fn two_simple_roots() {
        let r = sorted(P::from_real(&[-1.0, 0.0, 1.0]).roots(1e-6).unwrap());
        assert_eq!(r.len(), 2);
        assert!((r[0].location - c(-1.0, 0.0)).norm() < 1e-12);
        assert!((r[1].location - c(1.0, 0.0)).norm() < 1e-12);
        assert!(r.iter().all(|c| c.multiplicity == 1));
    }

    #[test]
    fn triple_root_is_one_cluster() {
        let p = P::from_roots(c(1.0, 0.0), &[(c(2.0, 0.0), 3)]);
        let r = p.roots(1e-6).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].multiplicity, 3);
        assert!((r[0].location - c(2.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn four_one_tree_white_vertices() {
        // (3z+1)^4 (3z-4) / 128, which is p_T - 1 for the <4,1|2,1,1,1> tree.
        let p = P::from_roots(
            c(243.0 / 128.0, 0.0),
            &[(c(-1.0 / 3.0, 0.0), 4), (c(4.0 / 3.0, 0.0), 1)],
        );
        let r = sorted(p.roots(1e-6).unwrap());
        assert_eq!(r.len(), 2);
        assert_eq!(r[0].multiplicity, 4);
        assert!((r[0].location - c(-1.0 / 3.0, 0.0)).norm() < 1e-9);
        assert_eq!(r[1].multiplicity, 1);
        assert!((r[1].location - c(4.0 / 3.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn high_degree_distinct_roots() {
        // z^12 - 1
        let mut coeffs = vec![0.0; 13];
        coeffs[0] = -1.0;
        coeffs[12] = 1.0;
        let r = P::from_real(&coeffs).roots(1e-6).unwrap();
        assert_eq!(r.len(), 12);
        for cl in r {
            assert!((cl.location.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_is_rejected() {
        assert!(matches!(P::from_real(&[3.0]).roots(1e-6), Err(RootError::Constant)));
    }
}
