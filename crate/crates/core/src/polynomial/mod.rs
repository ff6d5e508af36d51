//! Dense complex polynomials.
//!
//! Coefficients are stored in ascending degree order, `a_0, a_1, ..., a_n`.

mod parse;
mod roots;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::scalar::Real;

pub use parse::ParsePolyError;
pub use roots::{RootCluster, RootError, DEFAULT_CLUSTER_TOL};

/// A critical point of a polynomial together with its image and local degree.
#[derive(Clone, Debug, PartialEq)]
pub struct CriticalPoint<T: Real> {
    pub point: Complex<T>,
    pub value: Complex<T>,
    /// Multiplicity of the zero of `p'` plus one.
    pub local_degree: usize,
}

#[derive(Clone, PartialEq)]
pub struct ComplexPoly<T: Real> {
    coeffs: Vec<Complex<T>>,
}

impl<T: Real> ComplexPoly<T> {
    /// Builds a polynomial from ascending coefficients, dropping exact trailing zeros.
    pub fn new(mut coeffs: Vec<Complex<T>>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(Complex::zero());
        }
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(
            coeffs
                .iter()
                .map(|&x| Complex::new(T::lit(x), T::zero()))
                .collect(),
        )
    }

    pub fn constant(c: Complex<T>) -> Self {
        Self::new(vec![c])
    }

    /// The identity polynomial `z`.
    pub fn identity() -> Self {
        Self::new(vec![Complex::zero(), Complex::one()])
    }

    /// `lead * prod (z - r)^m` over the given roots.
    pub fn from_roots(lead: Complex<T>, roots: &[(Complex<T>, usize)]) -> Self {
        let mut coeffs = vec![lead];
        for &(r, m) in roots {
            for _ in 0..m {
                coeffs = mul_linear(&coeffs, r);
            }
        }
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex<T>> {
        self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> Complex<T> {
        self.coeffs[self.coeffs.len() - 1]
    }

    /// Coefficient of `z^k`, zero beyond the degree.
    pub fn coeff(&self, k: usize) -> Complex<T> {
        self.coeffs.get(k).copied().unwrap_or_else(Complex::zero)
    }

    /// Horner evaluation.
    pub fn eval(&self, z: Complex<T>) -> Complex<T> {
        let mut acc = Complex::zero();
        for &a in self.coeffs.iter().rev() {
            acc = acc * z + a;
        }
        acc
    }

    /// Value and first derivative in one Horner pass.
    pub fn eval_with_derivative(&self, z: Complex<T>) -> (Complex<T>, Complex<T>) {
        let mut p = Complex::zero();
        let mut dp = Complex::zero();
        for &a in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + a;
        }
        (p, dp)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::constant(Complex::zero());
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &a)| a * T::from_usize(k))
                .collect(),
        )
    }

    pub fn nth_derivative(&self, order: usize) -> Self {
        (0..order).fold(self.clone(), |p, _| p.derivative())
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self::new(self.coeffs.iter().map(|&a| a * s).collect())
    }

    /// `p + c` for a constant `c`.
    pub fn add_constant(&self, c: Complex<T>) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs[0] += c;
        Self::new(coeffs)
    }

    /// Taylor coefficients at `center`: the ascending coefficients of `p(center + w)` in `w`.
    pub fn taylor_at(&self, center: Complex<T>) -> Vec<Complex<T>> {
        let mut b = self.coeffs.clone();
        let n = b.len();
        for i in 0..n {
            for j in (i..n - 1).rev() {
                let next = b[j + 1];
                b[j] += center * next;
            }
        }
        b
    }

    /// `q(z) = p(alpha z + beta)`.
    pub fn compose_affine(&self, alpha: Complex<T>, beta: Complex<T>) -> Self {
        let shifted = self.taylor_at(beta);
        let mut pow = Complex::one();
        let coeffs = shifted
            .into_iter()
            .map(|b| {
                let out = b * pow;
                pow *= alpha;
                out
            })
            .collect();
        Self::new(coeffs)
    }

    /// `-p(-z)`, the polynomial of the color-inverted tree.
    pub fn conjugate_by_negation(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, &a)| if k % 2 == 0 { -a } else { a })
                .collect(),
        )
    }

    /// Coefficients complex-conjugated.
    pub fn conj(&self) -> Self {
        Self::new(self.coeffs.iter().map(|a| a.conj()).collect())
    }

    /// Largest coefficient-wise distance, padding the shorter polynomial with zeros.
    pub fn max_coeff_distance(&self, other: &Self) -> T {
        let n = self.coeffs.len().max(other.coeffs.len());
        (0..n)
            .map(|k| (self.coeff(k) - other.coeff(k)).norm())
            .fold(T::zero(), T::max)
    }

    /// Same polynomial divided by its leading coefficient.
    pub fn monic(&self) -> Self {
        let lead = self.leading();
        Self::new(self.coeffs.iter().map(|&a| a / lead).collect())
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|&a| crate::scalar::is_finite(a))
    }

    /// Zeros of `p'` clustered, with the image and local degree of each.
    pub fn critical_data(&self, tol: T) -> Result<Vec<CriticalPoint<T>>, RootError<T>> {
        let d = self.derivative();
        let clusters = d.roots(tol)?;
        Ok(clusters
            .into_iter()
            .map(|c| CriticalPoint {
                point: c.location,
                value: self.eval(c.location),
                local_degree: c.multiplicity + 1,
            })
            .collect())
    }

    /// `true` iff every finite critical value is within `tol` of `+1` or `-1` and both occur.
    pub fn is_shabat(&self, tol: T) -> bool {
        if self.degree() < 2 {
            return false;
        }
        let cluster_tol = T::lit(DEFAULT_CLUSTER_TOL);
        let Ok(crit) = self.critical_data(cluster_tol) else {
            return false;
        };
        let one = Complex::<T>::one();
        let mut plus = false;
        let mut minus = false;
        for cp in &crit {
            if (cp.value - one).norm() <= tol {
                plus = true;
            } else if (cp.value + one).norm() <= tol {
                minus = true;
            } else {
                return false;
            }
        }
        plus && minus
    }
}

fn mul_linear<T: Real>(coeffs: &[Complex<T>], root: Complex<T>) -> Vec<Complex<T>> {
    let mut out = vec![Complex::zero(); coeffs.len() + 1];
    for (k, &a) in coeffs.iter().enumerate() {
        out[k + 1] += a;
        out[k] -= a * root;
    }
    out
}

impl<T: Real> Add for &ComplexPoly<T> {
    type Output = ComplexPoly<T>;
    fn add(self, rhs: Self) -> ComplexPoly<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        ComplexPoly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl<T: Real> Sub for &ComplexPoly<T> {
    type Output = ComplexPoly<T>;
    fn sub(self, rhs: Self) -> ComplexPoly<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        ComplexPoly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl<T: Real> Mul for &ComplexPoly<T> {
    type Output = ComplexPoly<T>;
    fn mul(self, rhs: Self) -> ComplexPoly<T> {
        let mut out = vec![Complex::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        ComplexPoly::new(out)
    }
}

impl<T: Real> Neg for &ComplexPoly<T> {
    type Output = ComplexPoly<T>;
    fn neg(self) -> ComplexPoly<T> {
        ComplexPoly::new(self.coeffs.iter().map(|&a| -a).collect())
    }
}

impl<T: Real> fmt::Debug for ComplexPoly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexPoly({self})")
    }
}

/// Writes the comma-separated ascending format accepted by [`ComplexPoly::from_str`].
impl<T: Real> fmt::Display for ComplexPoly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prec = f.precision().unwrap_or(12);
        for (k, a) in self.coeffs.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write_complex(f, *a, prec)?;
        }
        Ok(())
    }
}

pub(crate) fn write_complex<T: Real>(
    f: &mut impl fmt::Write,
    z: Complex<T>,
    prec: usize,
) -> fmt::Result {
    let re = z.re.to_f64_lossy();
    let im = z.im.to_f64_lossy();
    let re = if re == 0.0 { 0.0 } else { re };
    if im == 0.0 {
        write!(f, "{re:.prec$}")
    } else if im < 0.0 {
        write!(f, "{re:.prec$}-{:.prec$}i", -im)
    } else {
        write!(f, "{re:.prec$}+{im:.prec$}i")
    }
}
