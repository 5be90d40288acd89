use num_complex::Complex;
use num_traits::{One, Zero};

use super::CMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// LU factorization with partial pivoting, `P M = L U`.
#[derive(Clone, Debug)]
pub struct LuFactor<T> {
    lu: CMatrix<T>,
    perm: Vec<usize>,
}

impl<T: Real> LuFactor<T> {
    /// Factors `m`; a pivot below `pivot_tolerance * max|m_ij|` is reported as singular.
    pub fn new(m: &CMatrix<T>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "LU of a {}x{} matrix",
                m.rows(),
                m.cols()
            )));
        }
        let n = m.rows();
        let threshold = T::pivot_tolerance() * m.max_abs();
        let mut lu = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, pivot) = (k..n)
                .map(|i| (i, lu[(i, k)].norm()))
                .fold((k, T::zero()), |best, cur| if cur.1 > best.1 { cur } else { best });
            if !(pivot > threshold) || pivot.is_zero() {
                return Err(Error::SingularMatrix {
                    pivot: pivot.as_f64(),
                    threshold: threshold.as_f64(),
                });
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
            }
            let inv = Complex::<T>::one() / lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] * inv;
                lu[(i, k)] = f;
                if f.is_zero() {
                    continue;
                }
                for j in k + 1..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= f * u;
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn dim(&self) -> usize {
        self.lu.rows()
    }

    /// Solves `M X = rhs`.
    pub fn solve(&self, rhs: &CMatrix<T>) -> Result<CMatrix<T>> {
        let n = self.dim();
        if rhs.rows() != n {
            return Err(Error::DimensionMismatch(format!(
                "rhs has {} rows, expected {n}",
                rhs.rows()
            )));
        }
        let m = rhs.cols();
        let mut x = CMatrix::zeros(n, m);
        for (i, &p) in self.perm.iter().enumerate() {
            x.row_mut(i).copy_from_slice(rhs.row(p));
        }
        for i in 0..n {
            for k in 0..i {
                let l = self.lu[(i, k)];
                if l.is_zero() {
                    continue;
                }
                for j in 0..m {
                    let v = x[(k, j)];
                    x[(i, j)] -= l * v;
                }
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let u = self.lu[(i, k)];
                if u.is_zero() {
                    continue;
                }
                for j in 0..m {
                    let v = x[(k, j)];
                    x[(i, j)] -= u * v;
                }
            }
            let inv = Complex::<T>::one() / self.lu[(i, i)];
            for j in 0..m {
                x[(i, j)] *= inv;
            }
        }
        Ok(x)
    }

    /// Solves `M^T X = rhs` (plain transpose, no conjugation).
    pub fn solve_transpose(&self, rhs: &CMatrix<T>) -> Result<CMatrix<T>> {
        let n = self.dim();
        if rhs.rows() != n {
            return Err(Error::DimensionMismatch(format!(
                "rhs has {} rows, expected {n}",
                rhs.rows()
            )));
        }
        let m = rhs.cols();
        // M^T = U^T L^T P, so solve U^T z = rhs, L^T w = z, then x = P^T w.
        let mut z = rhs.clone();
        for i in 0..n {
            for k in 0..i {
                let u = self.lu[(k, i)];
                if u.is_zero() {
                    continue;
                }
                for j in 0..m {
                    let v = z[(k, j)];
                    z[(i, j)] -= u * v;
                }
            }
            let inv = Complex::<T>::one() / self.lu[(i, i)];
            for j in 0..m {
                z[(i, j)] *= inv;
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let l = self.lu[(k, i)];
                if l.is_zero() {
                    continue;
                }
                for j in 0..m {
                    let v = z[(k, j)];
                    z[(i, j)] -= l * v;
                }
            }
        }
        let mut x = CMatrix::zeros(n, m);
        for (i, &p) in self.perm.iter().enumerate() {
            x.row_mut(p).copy_from_slice(z.row(i));
        }
        Ok(x)
    }
}

/// Solves `m X = rhs` by pivoted LU.
pub fn solve_dense<T: Real>(m: &CMatrix<T>, rhs: &CMatrix<T>) -> Result<CMatrix<T>> {
    LuFactor::new(m)?.solve(rhs)
}
