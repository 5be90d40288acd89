use num_complex::Complex;
use num_traits::Zero;

use super::CMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Eigenvalues of a square matrix: Householder reduction to Hessenberg form
/// followed by shifted complex QR with deflation.
pub fn eigenvalues<T: Real>(m: &CMatrix<T>) -> Result<Vec<Complex<T>>> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch("eigenvalues of a non-square matrix".into()));
    }
    let n = m.rows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut h = hessenberg(m);
    let mut eig = vec![Complex::zero(); n];
    let eps = T::epsilon();
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    loop {
        if hi == 0 {
            eig[0] = h[(0, 0)];
            break;
        }
        let mut l = hi;
        while l > 0 {
            let sub = h[(l, l - 1)].norm();
            let scale = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            if sub <= eps * scale || sub < T::min_positive_value() {
                h[(l, l - 1)] = Complex::zero();
                break;
            }
            l -= 1;
        }
        if l == hi {
            eig[hi] = h[(hi, hi)];
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > 60 * n {
            return Err(Error::EigenNotConverged);
        }
        let shift = if iter.is_multiple_of(11) {
            // exceptional shift to break cycles
            h[(hi, hi)] + Complex::new(h[(hi, hi - 1)].norm() * T::of(0.75), T::zero())
        } else {
            wilkinson(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };
        qr_step(&mut h, l, hi, shift);
    }
    Ok(eig)
}

fn wilkinson<T: Real>(a: Complex<T>, b: Complex<T>, c: Complex<T>, d: Complex<T>) -> Complex<T> {
    let two = T::of(2.0);
    let half = (a - d) / two;
    let disc = (half * half + b * c).sqrt();
    let m1 = (a + d) / two + disc;
    let m2 = (a + d) / two - disc;
    if (m1 - d).norm() <= (m2 - d).norm() {
        m1
    } else {
        m2
    }
}

/// Explicitly shifted QR sweep on the active window `lo..=hi` via Givens rotations.
fn qr_step<T: Real>(h: &mut CMatrix<T>, lo: usize, hi: usize, mu: Complex<T>) {
    for k in lo..=hi {
        h[(k, k)] -= mu;
    }
    let mut rots = Vec::with_capacity(hi - lo);
    for k in lo..hi {
        let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
        for j in k..=hi {
            let x = h[(k, j)];
            let y = h[(k + 1, j)];
            h[(k, j)] = x * c + s * y;
            h[(k + 1, j)] = -s.conj() * x + y * c;
        }
        rots.push((c, s));
    }
    for (idx, &(c, s)) in rots.iter().enumerate() {
        let k = lo + idx;
        for i in lo..=(k + 1).min(hi) {
            let x = h[(i, k)];
            let y = h[(i, k + 1)];
            h[(i, k)] = x * c + y * s.conj();
            h[(i, k + 1)] = -x * s + y * c;
        }
    }
    for k in lo..=hi {
        h[(k, k)] += mu;
    }
}

fn givens<T: Real>(x: Complex<T>, y: Complex<T>) -> (T, Complex<T>) {
    let ax = x.norm();
    let r = (ax * ax + y.norm_sqr()).sqrt();
    if r.is_zero() {
        return (T::one(), Complex::zero());
    }
    if ax.is_zero() {
        return (T::zero(), Complex::new(T::one(), T::zero()));
    }
    let c = ax / r;
    let s = (x / ax) * y.conj() / r;
    (c, s)
}

fn hessenberg<T: Real>(m: &CMatrix<T>) -> CMatrix<T> {
    let n = m.rows();
    let mut h = m.clone();
    for k in 0..n.saturating_sub(2) {
        let alpha_norm = (k + 1..n).map(|i| h[(i, k)].norm_sqr()).sum::<T>().sqrt();
        if alpha_norm.is_zero() {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let phase = if x0.norm().is_zero() {
            Complex::new(T::one(), T::zero())
        } else {
            x0 / x0.norm()
        };
        let mut v: Vec<Complex<T>> = (k + 1..n).map(|i| h[(i, k)]).collect();
        v[0] += phase * alpha_norm;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        if vnorm.is_zero() {
            continue;
        }
        for z in v.iter_mut() {
            *z = *z / vnorm;
        }
        // H <- (I - 2 v v^H) H (I - 2 v v^H)
        for j in 0..n {
            let dot = v
                .iter()
                .enumerate()
                .fold(Complex::zero(), |acc, (t, vi)| acc + vi.conj() * h[(k + 1 + t, j)]);
            let two_dot = dot * T::of(2.0);
            for (t, vi) in v.iter().enumerate() {
                h[(k + 1 + t, j)] -= *vi * two_dot;
            }
        }
        for i in 0..n {
            let dot = v
                .iter()
                .enumerate()
                .fold(Complex::zero(), |acc, (t, vi)| acc + h[(i, k + 1 + t)] * *vi);
            let two_dot = dot * T::of(2.0);
            for (t, vi) in v.iter().enumerate() {
                h[(i, k + 1 + t)] -= two_dot * vi.conj();
            }
        }
        for i in k + 2..n {
            h[(i, k)] = Complex::zero();
        }
    }
    h
}

/// Largest real part over the spectrum.
pub fn spectral_abscissa<T: Real>(m: &CMatrix<T>) -> Result<T> {
    Ok(eigenvalues(m)?
        .into_iter()
        .fold(T::neg_infinity(), |acc, z| acc.max(z.re)))
}
