//! The polynomial system whose solutions are Shabat polynomials in Zapponi form.
//!
//! Unknowns are the white vertices `x_1..x_s`, the black vertices `y_1..y_t` and the
//! leading coefficient `a`, with `p - 1 = a prod (z - x_i)^k_i` and
//! `p + 1 = a prod (z - y_j)^l_j`. The equations say that the difference of the two
//! products is the constant 2, and that the vertex sums are `1` and `-1`.
//!
//! The anchored variant replaces the two sum conditions by `sum k_i x_i = 0` and
//! `x_1 - y_1 = 1`. It describes every Shabat polynomial of the passport, including
//! those whose centered white sum vanishes and which therefore have no Zapponi form.

use num_complex::Complex;
use num_traits::{One, Zero};

use super::ShabatError;
use crate::linalg::SquareMatrix;
use crate::plane_tree::Passport;
use crate::polynomial::ComplexPoly;
use crate::scalar::Real;

/// The two affine normalization equations closing the system.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Normalization {
    /// `sum x_i = 1`, `sum y_j = -1`.
    Zapponi,
    /// `sum k_i x_i = 0`, `x_1 - y_1 = 1`.
    Anchored,
}

#[derive(Clone, Debug)]
pub struct ResidualSystem {
    passport: Passport,
    normalization: Normalization,
}

/// Result of one damped Newton run.
#[derive(Clone, Debug)]
pub struct NewtonRun<T: Real> {
    pub unknowns: Vec<Complex<T>>,
    pub residual: T,
    pub steps: usize,
}

/// `prod (z - r_i)^m_i` with one factor's exponent lowered by one, if `skip` is given.
fn product<T: Real>(roots: &[Complex<T>], mults: &[usize], skip: Option<usize>) -> Vec<Complex<T>> {
    let mut coeffs = vec![Complex::one()];
    for (i, (&r, &m)) in roots.iter().zip(mults).enumerate() {
        let m = if skip == Some(i) { m - 1 } else { m };
        for _ in 0..m {
            let mut next = vec![Complex::zero(); coeffs.len() + 1];
            for (k, &c) in coeffs.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= c * r;
            }
            coeffs = next;
        }
    }
    coeffs
}

impl ResidualSystem {
    /// Rejects passports that do not describe a tree, and single edges.
    pub fn new(passport: &Passport) -> Result<Self, ShabatError> {
        Self::with_normalization(passport, Normalization::Zapponi)
    }

    pub fn with_normalization(
        passport: &Passport,
        normalization: Normalization,
    ) -> Result<Self, ShabatError> {
        if !passport.is_tree_passport() {
            return Err(ShabatError::NotTreePassport(passport.to_string()));
        }
        if passport.edge_count() < 2 {
            return Err(ShabatError::TooFewEdges(passport.edge_count()));
        }
        Ok(Self {
            passport: passport.clone(),
            normalization,
        })
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn passport(&self) -> &Passport {
        &self.passport
    }

    pub fn edges(&self) -> usize {
        self.passport.edge_count()
    }

    pub fn white_count(&self) -> usize {
        self.passport.white.len()
    }

    pub fn black_count(&self) -> usize {
        self.passport.black.len()
    }

    /// Number of unknowns, which equals the number of equations.
    pub fn dim(&self) -> usize {
        self.white_count() + self.black_count() + 1
    }

    pub fn split<'a, T: Real>(
        &self,
        u: &'a [Complex<T>],
    ) -> (&'a [Complex<T>], &'a [Complex<T>], Complex<T>) {
        let s = self.white_count();
        let t = self.black_count();
        (&u[..s], &u[s..s + t], u[s + t])
    }

    /// The Shabat polynomial `1 + a prod (z - x_i)^k_i` encoded by `u`.
    pub fn polynomial<T: Real>(&self, u: &[Complex<T>]) -> ComplexPoly<T> {
        let (xs, _, a) = self.split(u);
        let px = product(xs, &self.passport.white, None);
        ComplexPoly::new(px.into_iter().map(|c| c * a).collect()).add_constant(Complex::one())
    }

    pub fn residual<T: Real>(&self, u: &[Complex<T>]) -> Vec<Complex<T>> {
        let (xs, ys, a) = self.split(u);
        let n = self.edges();
        let px = product(xs, &self.passport.white, None);
        let py = product(ys, &self.passport.black, None);
        let mut out = Vec::with_capacity(self.dim());
        for m in 1..n {
            out.push(a * (py[m] - px[m]));
        }
        out.push(a * (py[0] - px[0]) - Complex::new(T::lit(2.0), T::zero()));
        match self.normalization {
            Normalization::Zapponi => {
                out.push(xs.iter().fold(Complex::<T>::zero(), |acc, &x| acc + x) - Complex::one());
                out.push(ys.iter().fold(Complex::<T>::zero(), |acc, &y| acc + y) + Complex::one());
            }
            Normalization::Anchored => {
                let weighted = xs
                    .iter()
                    .zip(&self.passport.white)
                    .fold(Complex::<T>::zero(), |acc, (&x, &k)| acc + x * T::from_usize(k));
                out.push(weighted);
                out.push(xs[0] - ys[0] - Complex::one());
            }
        }
        out
    }

    pub fn residual_norm<T: Real>(&self, u: &[Complex<T>]) -> T {
        self.residual(u)
            .iter()
            .map(|r| r.norm())
            .fold(T::zero(), |m, r| if r.is_nan() { T::infinity() } else { m.max(r) })
    }

    /// Largest coefficient modulus of `p`, at least one; the natural scale of the residual.
    pub fn coefficient_scale<T: Real>(&self, u: &[Complex<T>]) -> T {
        let (xs, _, a) = self.split(u);
        product(xs, &self.passport.white, None)
            .iter()
            .map(|c| (*c * a).norm())
            .fold(T::one(), T::max)
    }

    /// Analytic Jacobian; rows follow the residual order.
    pub fn jacobian<T: Real>(&self, u: &[Complex<T>]) -> SquareMatrix<T> {
        let (xs, ys, a) = self.split(u);
        let (s, t, n) = (xs.len(), ys.len(), self.edges());
        let mut jac = SquareMatrix::zeros(self.dim());
        let row_of = |m: usize| if m == 0 { n - 1 } else { m - 1 };
        for i in 0..s {
            let k = T::from_usize(self.passport.white[i]);
            let q = product(xs, &self.passport.white, Some(i));
            for (m, &c) in q.iter().enumerate().take(n) {
                jac.set(row_of(m), i, a * k * c);
            }
            let entry = match self.normalization {
                Normalization::Zapponi => Complex::one(),
                Normalization::Anchored => Complex::new(k, T::zero()),
            };
            jac.set(n, i, entry);
        }
        for j in 0..t {
            let l = T::from_usize(self.passport.black[j]);
            let q = product(ys, &self.passport.black, Some(j));
            for (m, &c) in q.iter().enumerate().take(n) {
                jac.set(row_of(m), s + j, -(a * l * c));
            }
            if self.normalization == Normalization::Zapponi {
                jac.set(n + 1, s + j, Complex::one());
            }
        }
        if self.normalization == Normalization::Anchored {
            jac.set(n + 1, 0, Complex::one());
            jac.set(n + 1, s, -Complex::<T>::one());
        }
        let px = product(xs, &self.passport.white, None);
        let py = product(ys, &self.passport.black, None);
        for m in 0..n {
            jac.set(row_of(m), s + t, py[m] - px[m]);
        }
        jac
    }

    /// Damped Newton: the step is halved until the residual norm decreases.
    pub fn newton<T: Real>(&self, start: Vec<Complex<T>>, max_steps: usize) -> NewtonRun<T> {
        let mut u = start;
        let mut norm = self.residual_norm(&u);
        let target = T::lit(1e-14);
        let mut steps = 0;
        while steps < max_steps && norm > target && norm.is_finite() {
            steps += 1;
            let rhs: Vec<Complex<T>> = self.residual(&u).into_iter().map(|r| -r).collect();
            let Some(delta) = self.jacobian(&u).solve(&rhs) else {
                break;
            };
            let mut lambda = T::one();
            let mut accepted = false;
            for _ in 0..30 {
                let trial: Vec<Complex<T>> =
                    u.iter().zip(&delta).map(|(&x, &d)| x + d * lambda).collect();
                let trial_norm = self.residual_norm(&trial);
                if trial_norm < norm {
                    u = trial;
                    norm = trial_norm;
                    accepted = true;
                    break;
                }
                lambda *= T::lit(0.5);
            }
            if !accepted {
                break;
            }
        }
        NewtonRun {
            unknowns: u,
            residual: norm,
            steps,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    fn path5_exact() -> Vec<Complex<f64>> {
        // (z^5 - 5z^3 + 5z)/2 = T_5(z)/... with p - 1 and p + 1 roots at cos(k pi/5).
        let cos = |k: f64| 2.0 * (k * std::f64::consts::PI / 5.0).cos();
        // p = T5(z/2); vertices at 2cos(k pi/5), colored by the value of p.
        let p = ComplexPoly::<f64>::from_real(&[0.0, 2.5, 0.0, -2.5, 0.0, 0.5]);
        let mut whites = Vec::new();
        let mut blacks = Vec::new();
        for k in 0..=5 {
            let z = c(cos(k as f64), 0.0);
            if (p.eval(z) - c(1.0, 0.0)).norm() < 1e-9 {
                whites.push(z);
            } else {
                blacks.push(z);
            }
        }
        // Doubles first; the endpoints +-2 are leaves.
        let key = |z: &Complex<f64>| if (z.re.abs() - 2.0).abs() < 1e-9 { 1 } else { 0 };
        whites.sort_by_key(key);
        blacks.sort_by_key(key);
        let mut u = whites;
        u.extend(blacks);
        u.push(c(0.5, 0.0));
        u
    }

    #[test]
    fn rejects_non_tree_passports() {
        let single = Passport::new(vec![1], vec![1]).unwrap();
        assert!(matches!(ResidualSystem::new(&single), Err(ShabatError::TooFewEdges(1))));
        let cyc = Passport::new(vec![2, 2], vec![2, 2]).unwrap();
        assert!(matches!(ResidualSystem::new(&cyc), Err(ShabatError::NotTreePassport(_))));
    }

    #[test]
    fn counts_unknowns() {
        let p = Passport::new(vec![2, 2, 1], vec![2, 2, 1]).unwrap();
        let sys = ResidualSystem::new(&p).unwrap();
        assert_eq!(sys.dim(), 7);
        assert_eq!(sys.residual(&[c::<f64>(0.1, 0.0); 7]).len(), 7);
    }

    #[test]
    fn exact_path_solution_has_zero_residual() {
        let p = Passport::new(vec![2, 2, 1], vec![2, 2, 1]).unwrap();
        let sys = ResidualSystem::new(&p).unwrap();
        let mut u = path5_exact();
        *u.last_mut().unwrap() = c(0.5, 0.0);
        assert!(sys.residual_norm(&u) < 1e-10, "{}", sys.residual_norm(&u));
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let p = Passport::new(vec![3, 2], vec![2, 1, 1, 1]).unwrap();
        for norm in [Normalization::Zapponi, Normalization::Anchored] {
            let sys = ResidualSystem::with_normalization(&p, norm).unwrap();
            let u: Vec<Complex<f64>> = (0..sys.dim())
                .map(|k| c(0.3 * k as f64 - 0.5, 0.2 + 0.1 * (k * k) as f64))
                .collect();
            let jac = sys.jacobian(&u);
            let h = 1e-6;
            let f0 = sys.residual(&u);
            for col in 0..sys.dim() {
                let mut up = u.clone();
                up[col] += c(h, 0.0);
                let f1 = sys.residual(&up);
                for row in 0..sys.dim() {
                    let fd = (f1[row] - f0[row]) / h;
                    let an = jac.get(row, col);
                    assert!(
                        (fd - an).norm() < 1e-4 * (1.0 + an.norm()),
                        "{norm:?} ({row},{col}) {fd} vs {an}"
                    );
                }
            }
        }
    }
}
