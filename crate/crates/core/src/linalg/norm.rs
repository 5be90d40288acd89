use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use num_traits::Zero;

use super::CMatrix;
use crate::error::Error;
use crate::scalar::Real;

/// Induced matrix p-norm.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NormKind {
    P1,
    P2,
    PInf,
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NormKind::P1 => "1",
            NormKind::P2 => "2",
            NormKind::PInf => "inf",
        })
    }
}

impl FromStr for NormKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "1" => Ok(NormKind::P1),
            "2" => Ok(NormKind::P2),
            "inf" | "Inf" | "INF" => Ok(NormKind::PInf),
            other => Err(Error::Parse(format!("unknown norm `{other}`"))),
        }
    }
}

/// Largest dimension for which the 2-norm goes through the full SVD.
pub const SVD_DIM_LIMIT: usize = 512;

/// `sup_{||x|| = 1} ||M x||` for the requested p-norm. Empty matrices have norm 0.
pub fn induced_norm<T: Real>(m: &CMatrix<T>, kind: NormKind) -> T {
    if m.rows() == 0 || m.cols() == 0 {
        return T::zero();
    }
    match kind {
        NormKind::P1 => {
            let mut sums = vec![T::zero(); m.cols()];
            for i in 0..m.rows() {
                for (s, z) in sums.iter_mut().zip(m.row(i)) {
                    *s += z.norm();
                }
            }
            sums.into_iter().fold(T::zero(), T::max)
        }
        NormKind::PInf => (0..m.rows())
            .map(|i| m.row(i).iter().map(|z| z.norm()).sum::<T>())
            .fold(T::zero(), T::max),
        NormKind::P2 => {
            if m.rows().min(m.cols()) <= SVD_DIM_LIMIT {
                singular_values(m).into_iter().fold(T::zero(), T::max)
            } else {
                spectral_norm_power(m, T::of(1e-12), 10_000)
            }
        }
    }
}

/// Singular values by one-sided Jacobi rotations, in no particular order.
pub fn singular_values<T: Real>(m: &CMatrix<T>) -> Vec<T> {
    // Work on the orientation with fewer columns; columns are stored contiguously.
    let work = if m.rows() >= m.cols() { m.clone() } else { m.adjoint() };
    let (rows, cols) = work.shape();
    let mut colv: Vec<Vec<Complex<T>>> = (0..cols).map(|j| work.column(j)).collect();
    let eps = T::epsilon();
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let (alpha, beta, gamma) = {
                    let (a, b) = (&colv[p], &colv[q]);
                    let alpha: T = a.iter().map(|z| z.norm_sqr()).sum();
                    let beta: T = b.iter().map(|z| z.norm_sqr()).sum();
                    let gamma = a
                        .iter()
                        .zip(b)
                        .fold(Complex::<T>::zero(), |acc, (x, y)| acc + x.conj() * y);
                    (alpha, beta, gamma)
                };
                let g = gamma.norm();
                if g.is_zero() || g <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (T::of(2.0) * g);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                let (left, right) = colv.split_at_mut(q);
                let (a, b) = (&mut left[p], &mut right[0]);
                for i in 0..rows {
                    let x = a[i];
                    let y = b[i] * phase.conj();
                    a[i] = x * c - y * s;
                    b[i] = (x * s + y * c) * phase;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    colv.iter()
        .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt())
        .collect()
}

/// Largest singular value by power iteration on `M^H M`.
pub fn spectral_norm_power<T: Real>(m: &CMatrix<T>, tol: T, max_iter: usize) -> T {
    let n = m.cols();
    if n == 0 || m.rows() == 0 {
        return T::zero();
    }
    let adj = m.adjoint();
    let mut x: Vec<Complex<T>> = (0..n)
        .map(|j| Complex::new(T::one() + T::of_usize(j % 7) / T::of(13.0), T::zero()))
        .collect();
    normalize(&mut x);
    let mut sigma = T::zero();
    for _ in 0..max_iter {
        let y = m.matvec(&x);
        let next_sigma = l2(&y);
        let mut z = adj.matvec(&y);
        if l2(&z).is_zero() {
            return next_sigma;
        }
        normalize(&mut z);
        x = z;
        if (next_sigma - sigma).abs() <= tol * next_sigma {
            return next_sigma;
        }
        sigma = next_sigma;
    }
    sigma
}

/// Largest eigenvalue of a Hermitian operator on `C^dim` by Lanczos with
/// full reorthogonalization.
///
/// `apply(x, y)` writes the operator applied to `x` into `y`. Iteration stops
/// once the leading Ritz value moves by at most `tol` relative on two
/// consecutive steps, or when the Krylov space is exhausted, where it is exact.
pub fn largest_eigenvalue_lanczos<T, F>(dim: usize, mut apply: F, tol: T) -> T
where
    T: Real,
    F: FnMut(&[Complex<T>], &mut [Complex<T>]),
{
    if dim == 0 {
        return T::zero();
    }
    // Quasi-random phases keep the start vector off any structured subspace.
    let golden = T::of(0.618_033_988_749_894_9);
    let mut v: Vec<Complex<T>> = (0..dim)
        .map(|i| Complex::from_polar(T::one(), T::TAU() * (T::of_usize(i + 1) * golden).fract()))
        .collect();
    normalize(&mut v);
    let mut basis: Vec<Vec<Complex<T>>> = Vec::new();
    let (mut alpha, mut beta) = (Vec::new(), Vec::<T>::new());
    let mut w = vec![Complex::zero(); dim];
    let (mut theta, mut settled) = (T::neg_infinity(), 0);
    loop {
        apply(&v, &mut w);
        let a = dot(&v, &w).re;
        basis.push(v);
        // Two passes of classical Gram-Schmidt against the whole basis.
        for _ in 0..2 {
            for q in &basis {
                let c = dot(q, &w);
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= *qi * c;
                }
            }
        }
        alpha.push(a);
        let b = l2(&w);
        let next = tridiagonal_max_eigenvalue(&alpha, &beta);
        let scale = next.abs().max(a.abs());
        if (next - theta).abs() <= tol * scale {
            settled += 1;
        } else {
            settled = 0;
        }
        theta = next;
        if settled >= 2 || basis.len() == dim || b <= T::epsilon() * scale || b.is_zero() {
            return theta;
        }
        beta.push(b);
        v = w.iter().map(|z| *z / b).collect();
    }
}

/// `x^H y`.
fn dot<T: Real>(x: &[Complex<T>], y: &[Complex<T>]) -> Complex<T> {
    x.iter().zip(y).fold(Complex::zero(), |acc, (a, b)| acc + a.conj() * b)
}

/// Largest eigenvalue of the symmetric tridiagonal matrix with diagonal
/// `diag` and off-diagonal `off`, by Sturm-count bisection.
fn tridiagonal_max_eigenvalue<T: Real>(diag: &[T], off: &[T]) -> T {
    let k = diag.len();
    let radius = |i: usize| {
        let left = if i > 0 { off[i - 1].abs() } else { T::zero() };
        let right = if i + 1 < k { off[i].abs() } else { T::zero() };
        left + right
    };
    let mut lo = (0..k).map(|i| diag[i] - radius(i)).fold(T::infinity(), T::min);
    let mut hi = (0..k).map(|i| diag[i] + radius(i)).fold(T::neg_infinity(), T::max);
    let tiny = T::min_positive_value();
    // Number of eigenvalues below `x`.
    let below = |x: T| {
        let mut count = 0;
        let mut d = T::one();
        for i in 0..k {
            let coupling = if i > 0 { off[i - 1] * off[i - 1] / d } else { T::zero() };
            d = diag[i] - x - coupling;
            if d.abs() < tiny {
                d = -tiny;
            }
            if d < T::zero() {
                count += 1;
            }
        }
        count
    };
    for _ in 0..200 {
        let mid = (lo + hi) / T::of(2.0);
        if mid <= lo || mid >= hi || hi - lo <= T::epsilon() * lo.abs().max(hi.abs()) {
            break;
        }
        if below(mid) == k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

fn l2<T: Real>(v: &[Complex<T>]) -> T {
    v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
}

fn normalize<T: Real>(v: &mut [Complex<T>]) {
    let n = l2(v);
    if n > T::zero() {
        for z in v.iter_mut() {
            *z = *z / n;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_has_unit_norm() {
        let i3 = CMatrix::<f64>::identity(3);
        for k in [NormKind::P1, NormKind::P2, NormKind::PInf] {
            assert!((induced_norm(&i3, k) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn example_matrix_inf_norm() {
        let a = CMatrix::<f64>::from_real(2, 2, &[0., 1., -1., -2.]).unwrap();
        assert_eq!(induced_norm(&a, NormKind::PInf), 3.0);
        assert_eq!(induced_norm(&a, NormKind::P1), 3.0);
    }

    #[test]
    fn lanczos_matches_svd_on_a_gram_matrix() {
        let m = CMatrix::<f64>::from_fn(30, 12, |i, j| {
            Complex::new(((i * 7 + j * 3) % 11) as f64 - 5.0, ((i + 2 * j) % 5) as f64)
        });
        let gram = m.adjoint().matmul(&m);
        let top = largest_eigenvalue_lanczos(12, |x, y| y.copy_from_slice(&gram.matvec(x)), 1e-14);
        let sigma = singular_values(&m).into_iter().fold(0.0, f64::max);
        assert!((top.sqrt() - sigma).abs() < 1e-10 * sigma);
    }

    #[test]
    fn tridiagonal_bisection() {
        // Eigenvalues of tridiag(-1, 2, -1) of size 4 are 2 - 2 cos(k pi / 5).
        let top = tridiagonal_max_eigenvalue(&[2.0; 4], &[-1.0; 3]);
        assert!((top - (2.0 - 2.0 * (4.0 * std::f64::consts::PI / 5.0).cos())).abs() < 1e-14);
    }

    #[test]
    fn empty_matrix_is_zero() {
        let e = CMatrix::<f64>::zeros(0, 3);
        assert_eq!(induced_norm(&e, NormKind::P2), 0.0);
    }

    #[test]
    fn singular_values_of_diagonal() {
        let d =
            CMatrix::<f64>::from_diagonal(&[Complex::new(3.0, 0.0), Complex::new(0.0, -5.0), Complex::new(1.0, 1.0)]);
        let mut sv = singular_values(&d);
        sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
        assert!((sv[0] - 5.0).abs() < 1e-14);
        assert!((sv[1] - 3.0).abs() < 1e-14);
        assert!((sv[2] - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn wide_matrix_uses_adjoint() {
        // [1 1 1] has the single singular value sqrt(3).
        let m = CMatrix::<f64>::from_real(1, 3, &[1., 1., 1.]).unwrap();
        assert!((induced_norm(&m, NormKind::P2) - 3f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn parses_norm_names() {
        assert_eq!("inf".parse::<NormKind>().unwrap(), NormKind::PInf);
        assert_eq!("2".parse::<NormKind>().unwrap(), NormKind::P2);
        assert!("3".parse::<NormKind>().is_err());
    }
}
