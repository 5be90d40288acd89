use num_complex::Complex;
use num_traits::One;

use super::StateSpace;
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, LuFactor};
use crate::scalar::Real;

/// Order-`l` matrix differential equation
/// `x^(l) + A_{l-1} x^(l-1) + ... + A_0 x = B u`, `y = C (x, x', ..., x^(l-1))`.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixPolynomial<T> {
    coefficients: Vec<CMatrix<T>>,
    b: CMatrix<T>,
    c: CMatrix<T>,
}

impl<T: Real> MatrixPolynomial<T> {
    /// `coefficients[k]` multiplies the `k`-th derivative.
    pub fn new(coefficients: Vec<CMatrix<T>>, b: CMatrix<T>, c: CMatrix<T>) -> Result<Self> {
        let first = coefficients
            .first()
            .ok_or_else(|| Error::InvalidSpec("order must be at least 1".into()))?;
        let n = first.rows();
        if coefficients.iter().any(|a| a.rows() != n || a.cols() != n) {
            return Err(Error::DimensionMismatch(
                "coefficients must be square and of equal size".into(),
            ));
        }
        if b.rows() != n {
            return Err(Error::DimensionMismatch(format!(
                "B has {} rows, expected {n}",
                b.rows()
            )));
        }
        let nl = n * coefficients.len();
        if c.cols() != nl {
            return Err(Error::DimensionMismatch(format!(
                "C has {} columns, expected {nl}",
                c.cols()
            )));
        }
        Ok(Self { coefficients, b, c })
    }

    pub fn order(&self) -> usize {
        self.coefficients.len()
    }

    /// Size `n` of each coefficient block.
    pub fn block_size(&self) -> usize {
        self.coefficients[0].rows()
    }

    pub fn coefficients(&self) -> &[CMatrix<T>] {
        &self.coefficients
    }

    /// `P(s) = s^l I + sum_k s^k A_k`.
    pub fn evaluate(&self, s: Complex<T>) -> CMatrix<T> {
        let n = self.block_size();
        // Horner: ((I s + A_{l-1}) s + A_{l-2}) s + ...
        let mut p = CMatrix::identity(n);
        for a in self.coefficients.iter().rev() {
            p = p.scale(s).add(a);
        }
        p
    }

    /// `sum_k C_k s^k P(s)^{-1} B`, with `C_k` the `k`-th column block of `C`.
    pub fn transfer(&self, s: Complex<T>) -> Result<CMatrix<T>> {
        let n = self.block_size();
        let x = LuFactor::new(&self.evaluate(s))?.solve(&self.b)?;
        let mut out = CMatrix::zeros(self.c.rows(), self.b.cols());
        let mut power = Complex::<T>::one();
        for k in 0..self.order() {
            let ck = self.c.block(0, k * n, self.c.rows(), n);
            out = out.add(&ck.matmul(&x).scale(power));
            power *= s;
        }
        Ok(out)
    }
}

/// First-order block-companion realization: identity blocks on the
/// superdiagonal, `(-A_0, ..., -A_{l-1})` as the last block row, and `B`
/// entering the last block.
pub fn companion_embed<T: Real>(sys: &MatrixPolynomial<T>) -> StateSpace<T> {
    let n = sys.block_size();
    let l = sys.order();
    let mut a = CMatrix::zeros(n * l, n * l);
    for k in 0..l.saturating_sub(1) {
        a.set_block(k * n, (k + 1) * n, &CMatrix::identity(n));
    }
    for (k, ak) in sys.coefficients.iter().enumerate() {
        a.set_block((l - 1) * n, k * n, &ak.scale_real(-T::one()));
    }
    let mut b = CMatrix::zeros(n * l, sys.b.cols());
    b.set_block((l - 1) * n, 0, &sys.b);
    StateSpace::new(a, b, sys.c.clone()).expect("companion dimensions are consistent")
}
