//! Matrix exponential by scaling and squaring with diagonal Padé approximants
//! (degrees 3, 5, 7, 9 and 13, chosen from the 1-norm of the argument).

use num_complex::Complex;

use super::{induced_norm, solve_dense, CMatrix, NormKind};
use crate::error::{Error, Result};
use crate::scalar::Real;

const THETA: [(usize, f64); 4] = [
    (3, 1.495585217958292e-2),
    (5, 2.53939833006323e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068e0),
];
const THETA_13: f64 = 5.371920351148152e0;

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0];
const B9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// `e^M` for a square matrix `M`.
pub fn matrix_exponential<T: Real>(m: &CMatrix<T>) -> Result<CMatrix<T>> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch("exponential of a non-square matrix".into()));
    }
    if !m.is_finite() {
        return Err(Error::Overflow);
    }
    let n = m.rows();
    if n == 0 {
        return Ok(CMatrix::zeros(0, 0));
    }
    let norm = induced_norm(m, NormKind::P1).as_f64();
    for &(deg, theta) in THETA.iter() {
        if norm <= theta {
            let coeffs: &[f64] = match deg {
                3 => &B3,
                5 => &B5,
                7 => &B7,
                _ => &B9,
            };
            return pade_low(m, coeffs);
        }
    }
    let squarings = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    let scaled = m.scale_real(T::of(2f64.powi(-squarings)));
    let mut e = pade13(&scaled)?;
    for _ in 0..squarings {
        e = e.matmul(&e);
        if !e.is_finite() {
            return Err(Error::Overflow);
        }
    }
    Ok(e)
}

fn axpy_identity<T: Real>(m: &mut CMatrix<T>, c: f64) {
    for i in 0..m.rows() {
        m[(i, i)] += Complex::new(T::of(c), T::zero());
    }
}

fn lin<T: Real>(terms: &[(f64, &CMatrix<T>)], n: usize) -> CMatrix<T> {
    let mut out = CMatrix::zeros(n, n);
    for (c, m) in terms {
        let c = Complex::new(T::of(*c), T::zero());
        for (o, &v) in out.as_mut_slice().iter_mut().zip(m.as_slice()) {
            *o += c * v;
        }
    }
    out
}

fn finish<T: Real>(u: &CMatrix<T>, v: &CMatrix<T>) -> Result<CMatrix<T>> {
    let p = v.add(u);
    let q = v.sub(u);
    let r = solve_dense(&q, &p).map_err(|_| Error::Overflow)?;
    if !r.is_finite() {
        return Err(Error::Overflow);
    }
    Ok(r)
}

fn pade_low<T: Real>(a: &CMatrix<T>, b: &[f64]) -> Result<CMatrix<T>> {
    let n = a.rows();
    let a2 = a.matmul(a);
    let mut powers = vec![a2.clone()];
    while powers.len() < (b.len() - 1) / 2 {
        let next = powers.last().expect("nonempty").matmul(&a2);
        powers.push(next);
    }
    // U = A (b1 I + b3 A^2 + ...), V = b0 I + b2 A^2 + ...
    let odd: Vec<(f64, &CMatrix<T>)> = b
        .iter()
        .skip(3)
        .step_by(2)
        .zip(powers.iter())
        .map(|(&c, p)| (c, p))
        .collect();
    let even: Vec<(f64, &CMatrix<T>)> = b
        .iter()
        .skip(2)
        .step_by(2)
        .zip(powers.iter())
        .map(|(&c, p)| (c, p))
        .collect();
    let mut inner = lin(&odd, n);
    axpy_identity(&mut inner, b[1]);
    let u = a.matmul(&inner);
    let mut v = lin(&even, n);
    axpy_identity(&mut v, b[0]);
    finish(&u, &v)
}

fn pade13<T: Real>(a: &CMatrix<T>) -> Result<CMatrix<T>> {
    let n = a.rows();
    let b = &B13;
    let a2 = a.matmul(a);
    let a4 = a2.matmul(&a2);
    let a6 = a4.matmul(&a2);
    let w1 = lin(&[(b[13], &a6), (b[11], &a4), (b[9], &a2)], n);
    let mut w2 = lin(&[(b[7], &a6), (b[5], &a4), (b[3], &a2)], n);
    axpy_identity(&mut w2, b[1]);
    let u = a.matmul(&a6.matmul(&w1).add(&w2));
    let z1 = lin(&[(b[12], &a6), (b[10], &a4), (b[8], &a2)], n);
    let mut z2 = lin(&[(b[6], &a6), (b[4], &a4), (b[2], &a2)], n);
    axpy_identity(&mut z2, b[0]);
    let v = a6.matmul(&z1).add(&z2);
    finish(&u, &v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gives_identity() {
        let e = matrix_exponential(&CMatrix::<f64>::zeros(3, 3)).unwrap();
        assert_eq!(e, CMatrix::identity(3));
    }

    #[test]
    fn scalar_minus_one() {
        let m = CMatrix::<f64>::from_real(1, 1, &[-1.0]).unwrap();
        let e = matrix_exponential(&m).unwrap();
        assert!((e[(0, 0)].re - (-1f64).exp()).abs() < 1e-13);
        assert!(e[(0, 0)].im.abs() < 1e-16);
    }

    #[test]
    fn every_pade_degree_matches_scalar_exp() {
        for &x in &[1e-3, 0.1, 0.5, 1.5, 3.0, 20.0, -40.0] {
            let m = CMatrix::<f64>::from_real(1, 1, &[x]).unwrap();
            let e = matrix_exponential(&m).unwrap()[(0, 0)].re;
            assert!(((e - x.exp()) / x.exp()).abs() < 1e-13, "x = {x}");
        }
    }

    #[test]
    fn rotation_generator() {
        // exp([[0, t], [-t, 0]]) is a rotation by t.
        let t = 2.3;
        let m = CMatrix::<f64>::from_real(2, 2, &[0., t, -t, 0.]).unwrap();
        let e = matrix_exponential(&m).unwrap();
        assert!((e[(0, 0)].re - t.cos()).abs() < 1e-13);
        assert!((e[(0, 1)].re - t.sin()).abs() < 1e-13);
    }

    #[test]
    fn nilpotent_is_exact() {
        let m = CMatrix::<f64>::from_real(2, 2, &[0., 5., 0., 0.]).unwrap();
        let e = matrix_exponential(&m).unwrap();
        assert!((e[(0, 1)].re - 5.0).abs() < 1e-13);
    }

    #[test]
    fn overflow_is_reported() {
        let m = CMatrix::<f64>::from_real(1, 1, &[1000.0]).unwrap();
        assert_eq!(matrix_exponential(&m), Err(Error::Overflow));
    }
}
