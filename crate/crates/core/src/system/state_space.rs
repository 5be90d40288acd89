use num_complex::Complex;

use super::IoSystem;
use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, induced_norm, CMatrix, LuFactor, NormKind};
use crate::scalar::Real;

/// Dense state-space triple `x' = A x + B u`, `y = C x`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateSpace<T> {
    a: CMatrix<T>,
    b: CMatrix<T>,
    c: CMatrix<T>,
}

impl<T: Real> StateSpace<T> {
    pub fn new(a: CMatrix<T>, b: CMatrix<T>, c: CMatrix<T>) -> Result<Self> {
        let n = a.rows();
        if !a.is_square() {
            return Err(Error::DimensionMismatch(format!("A is {}x{}", a.rows(), a.cols())));
        }
        if b.rows() != n {
            return Err(Error::DimensionMismatch(format!(
                "B has {} rows, A is {n}x{n}",
                b.rows()
            )));
        }
        if c.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "C has {} columns, A is {n}x{n}",
                c.cols()
            )));
        }
        Ok(Self { a, b, c })
    }

    /// Builds from real row-major entries.
    pub fn from_real(n: usize, p: usize, q: usize, a: &[T], b: &[T], c: &[T]) -> Result<Self> {
        Self::new(
            CMatrix::from_real(n, n, a)?,
            CMatrix::from_real(n, p, b)?,
            CMatrix::from_real(q, n, c)?,
        )
    }

    pub fn a(&self) -> &CMatrix<T> {
        &self.a
    }

    pub fn b(&self) -> &CMatrix<T> {
        &self.b
    }

    pub fn c(&self) -> &CMatrix<T> {
        &self.c
    }

    /// Same `A` and `C` with a different input matrix.
    pub fn with_input(&self, b: CMatrix<T>) -> Result<Self> {
        Self::new(self.a.clone(), b, self.c.clone())
    }

    /// `(sI - A)^{-1}` applied to `rhs`.
    pub fn resolvent_solve(&self, s: Complex<T>, rhs: &CMatrix<T>) -> Result<CMatrix<T>> {
        LuFactor::new(&self.a.shifted_negation(s))?.solve(rhs)
    }

    pub fn eigenvalues(&self) -> Result<Vec<Complex<T>>> {
        eigenvalues(&self.a)
    }
}

impl<T: Real> IoSystem<T> for StateSpace<T> {
    fn state_dim(&self) -> usize {
        self.a.rows()
    }

    fn input_dim(&self) -> usize {
        self.b.cols()
    }

    fn output_dim(&self) -> usize {
        self.c.rows()
    }

    fn transfer(&self, s: Complex<T>) -> Result<CMatrix<T>> {
        let lu = LuFactor::new(&self.a.shifted_negation(s))?;
        if self.b.cols() <= self.c.rows() {
            Ok(self.c.matmul(&lu.solve(&self.b)?))
        } else {
            // C (sI - A)^{-1} = ((sI - A)^{-T} C^T)^T
            let left = lu.solve_transpose(&self.c.transpose())?.transpose();
            Ok(left.matmul(&self.b))
        }
    }

    fn a_norm(&self, kind: NormKind) -> T {
        induced_norm(&self.a, kind)
    }

    fn b_norm(&self, kind: NormKind) -> T {
        induced_norm(&self.b, kind)
    }

    fn c_norm(&self, kind: NormKind) -> T {
        induced_norm(&self.c, kind)
    }

    fn is_real(&self) -> bool {
        self.a.is_real() && self.b.is_real() && self.c.is_real()
    }

    fn dense(&self) -> Option<StateSpace<T>> {
        Some(self.clone())
    }

    /// Eigenvalues of `A` near which the transfer matrix blows up; modes
    /// cancelled by `B` or `C` are dropped.
    fn poles(&self) -> Option<Vec<Complex<T>>> {
        let eig = self.eigenvalues().ok()?;
        let scale = self.a.max_abs().max(T::one());
        let dir = Complex::new(T::of(0.6), T::of(0.8));
        Some(
            eig.into_iter()
                .filter(|&lambda| {
                    let delta = dir * (scale * T::of(1e-4));
                    let near = self.transfer_norm(lambda + delta / T::of(10.0), NormKind::P2);
                    let far = self.transfer_norm(lambda + delta, NormKind::P2);
                    match (near, far) {
                        (Err(_), _) => true,
                        (Ok(a), Ok(b)) => a > T::of(3.0) * b,
                        (Ok(_), Err(_)) => false,
                    }
                })
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example1() -> StateSpace<f64> {
        StateSpace::from_real(2, 1, 1, &[0., 1., -1., -2.], &[0., 1.], &[1., 0.]).unwrap()
    }

    #[test]
    fn example_transfer_values() {
        let sys = example1();
        // 1 / (s + 1)^2
        for s in [Complex::new(0.0, 0.0), Complex::new(1.0, 2.0), Complex::new(-3.0, 0.5)] {
            let g = sys.transfer(s).unwrap()[(0, 0)];
            let want = Complex::new(1.0, 0.0) / ((s + 1.0) * (s + 1.0));
            assert!((g - want).norm() < 1e-14);
        }
    }

    #[test]
    fn left_and_right_paths_agree() {
        let a = CMatrix::<f64>::from_real(3, 3, &[-1., 2., 0., 0., -3., 1., 1., 0., -2.]).unwrap();
        let wide = StateSpace::new(
            a.clone(),
            CMatrix::identity(3),
            CMatrix::from_real(1, 3, &[1., 0., 2.]).unwrap(),
        )
        .unwrap();
        let s = Complex::new(0.3, -0.7);
        let g1 = wide.transfer(s).unwrap();
        let x = wide.resolvent_solve(s, &CMatrix::identity(3)).unwrap();
        let g2 = wide.c().matmul(&x);
        assert!(g1.sub(&g2).max_abs() < 1e-14);
    }

    #[test]
    fn pole_is_singular() {
        let sys = example1();
        assert!(matches!(
            sys.transfer(Complex::new(-1.0, 0.0)),
            Err(Error::SingularMatrix { .. })
        ));
    }

    #[test]
    fn cancelled_mode_is_not_a_pole() {
        // diag(-1, -2) with the second mode unobservable
        let sys = StateSpace::from_real(2, 1, 1, &[-1., 0., 0., -2.], &[1., 1.], &[1., 0.]).unwrap();
        let p = sys.poles().unwrap();
        assert_eq!(p.len(), 1);
        assert!((p[0] + 1.0).norm() < 1e-12);
        assert_eq!(example1().poles().unwrap().len(), 2);
    }

    #[test]
    fn dimension_checks() {
        let a = CMatrix::<f64>::identity(2);
        assert!(StateSpace::new(a.clone(), CMatrix::zeros(3, 1), CMatrix::zeros(1, 2)).is_err());
        assert!(StateSpace::new(a, CMatrix::zeros(2, 1), CMatrix::zeros(1, 3)).is_err());
    }
}
