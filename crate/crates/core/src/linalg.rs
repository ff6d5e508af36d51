//! Small dense complex linear solves.

use num_complex::Complex;
use num_traits::Zero;

use crate::scalar::Real;

/// Row-major square complex matrix.
#[derive(Clone, Debug)]
pub struct SquareMatrix<T: Real> {
    n: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> SquareMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Complex::zero(); n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> Complex<T> {
        self.data[row * self.n + col]
    }

    pub fn set(&mut self, row: usize, col: usize, v: Complex<T>) {
        self.data[row * self.n + col] = v;
    }

    /// Solves `A x = b` by Gaussian elimination with partial pivoting.
    /// Returns `None` when a pivot vanishes.
    pub fn solve(mut self, b: &[Complex<T>]) -> Option<Vec<Complex<T>>> {
        let n = self.n;
        assert_eq!(b.len(), n);
        let mut x = b.to_vec();
        for k in 0..n {
            let (piv, mag) = (k..n)
                .map(|r| (r, self.get(r, k).norm()))
                .fold((k, T::zero()), |best, cur| if cur.1 > best.1 { cur } else { best });
            if !(mag > T::zero()) || !mag.is_finite() {
                return None;
            }
            if piv != k {
                for c in 0..n {
                    self.data.swap(k * n + c, piv * n + c);
                }
                x.swap(k, piv);
            }
            let pivot = self.get(k, k);
            for r in k + 1..n {
                let f = self.get(r, k) / pivot;
                if f.is_zero() {
                    continue;
                }
                for c in k..n {
                    let v = self.get(r, c) - f * self.get(k, c);
                    self.set(r, c, v);
                }
                let xk = x[k];
                x[r] -= f * xk;
            }
        }
        for k in (0..n).rev() {
            let mut acc = x[k];
            for c in k + 1..n {
                acc -= self.get(k, c) * x[c];
            }
            x[k] = acc / self.get(k, k);
        }
        Some(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    #[test]
    fn solves_complex_system() {
        let mut a = SquareMatrix::<f64>::zeros(2);
        a.set(0, 0, c(0.0, 0.0));
        a.set(0, 1, c(1.0, 1.0));
        a.set(1, 0, c(2.0, 0.0));
        a.set(1, 1, c(0.0, -1.0));
        let x = a.clone().solve(&[c(2.0, 0.0), c(1.0, 0.0)]).unwrap();
        let r0 = a.get(0, 0) * x[0] + a.get(0, 1) * x[1];
        let r1 = a.get(1, 0) * x[0] + a.get(1, 1) * x[1];
        assert!((r0 - c(2.0, 0.0)).norm() < 1e-14);
        assert!((r1 - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn singular_returns_none() {
        let a = SquareMatrix::<f64>::zeros(3);
        assert!(a.solve(&[c(1.0, 0.0); 3]).is_none());
    }
}
