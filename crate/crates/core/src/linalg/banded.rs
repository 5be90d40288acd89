use num_complex::Complex;
use num_traits::{One, Zero};

use super::CMatrix;
use crate::error::{Error, Result};
use crate::scalar::{flush_subnormal, Real};

/// Square banded matrix stored by diagonals.
///
/// Diagonal `d` (offset `d - kl`, from `-kl` up to `+ku`) occupies
/// `data[d * n .. (d + 1) * n]`, indexed by row. Slots whose column falls
/// outside `0..n` are padding and always zero.
#[derive(Clone, Debug, PartialEq)]
pub struct BandedMatrix<T> {
    n: usize,
    kl: usize,
    ku: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> BandedMatrix<T> {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Result<Self> {
        if n > 0 && (kl >= n || ku >= n) {
            return Err(Error::InvalidSpec(format!(
                "bandwidths ({kl}, {ku}) must be below the size {n}"
            )));
        }
        Ok(Self {
            n,
            kl,
            ku,
            data: vec![Complex::zero(); (kl + ku + 1) * n],
        })
    }

    /// Builds from explicit diagonals, lowest first: `diags[k]` holds offset
    /// `k - kl` and has length `n - |k - kl|`.
    pub fn from_diagonals(n: usize, kl: usize, ku: usize, diags: &[Vec<Complex<T>>]) -> Result<Self> {
        let mut m = Self::zeros(n, kl, ku)?;
        if diags.len() != kl + ku + 1 {
            return Err(Error::DimensionMismatch(format!(
                "{} diagonals for bandwidths ({kl}, {ku})",
                diags.len()
            )));
        }
        for (k, d) in diags.iter().enumerate() {
            let off = k as isize - kl as isize;
            let len = n - off.unsigned_abs();
            if d.len() != len {
                return Err(Error::DimensionMismatch(format!(
                    "diagonal {off} has {} entries, expected {len}",
                    d.len()
                )));
            }
            for (t, &v) in d.iter().enumerate() {
                let (i, j) = if off >= 0 {
                    (t, t + off as usize)
                } else {
                    (t + off.unsigned_abs(), t)
                };
                if v.re.is_nan() || v.im.is_nan() {
                    return Err(Error::NonFinite);
                }
                m.set(i, j, v);
            }
        }
        Ok(m)
    }

    /// Extracts the band of a dense matrix using the tightest bandwidths that
    /// cover its nonzero pattern.
    pub fn from_dense(m: &CMatrix<T>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch("banded matrix must be square".into()));
        }
        let (kl, ku) = bandwidths(m);
        let mut b = Self::zeros(m.rows(), kl, ku)?;
        for i in 0..m.rows() {
            for j in i.saturating_sub(kl)..(i + ku + 1).min(m.cols()) {
                b.set(i, j, m[(i, j)]);
            }
        }
        Ok(b)
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn lower_bandwidth(&self) -> usize {
        self.kl
    }

    #[inline]
    pub fn upper_bandwidth(&self) -> usize {
        self.ku
    }

    #[inline]
    pub fn in_band(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && j + self.kl >= i && j <= i + self.ku
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> usize {
        (j + self.kl - i) * self.n + i
    }

    /// Entry `(i, j)`; zero outside the band.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        if self.in_band(i, j) {
            self.data[self.slot(i, j)]
        } else {
            Complex::zero()
        }
    }

    /// Sets entry `(i, j)`. Panics outside the band.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex<T>) {
        assert!(self.in_band(i, j), "({i}, {j}) outside the band");
        let k = self.slot(i, j);
        self.data[k] = v;
    }

    /// Column range of the band in row `i`.
    #[inline]
    pub fn row_span(&self, i: usize) -> std::ops::Range<usize> {
        i.saturating_sub(self.kl)..(i + self.ku + 1).min(self.n)
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut t = Self::zeros(n, self.ku, self.kl).expect("same bandwidths");
        // Offset `o` of `self` becomes offset `-o` of `t`, shifted by `o` rows.
        for d in 0..=self.kl + self.ku {
            let src = &self.data[d * n..(d + 1) * n];
            let td = self.kl + self.ku - d;
            let dst = &mut t.data[td * n..(td + 1) * n];
            if d >= self.kl {
                let o = d - self.kl;
                dst[o..].copy_from_slice(&src[..n - o]);
            } else {
                let o = self.kl - d;
                dst[..n - o].copy_from_slice(&src[o..]);
            }
        }
        t
    }

    /// `M^T X` for an `n x k` matrix `X`.
    pub fn transpose_matmul(&self, x: &CMatrix<T>) -> CMatrix<T> {
        let (n, k) = (self.n, x.cols());
        assert_eq!(x.rows(), n);
        let mut out = CMatrix::zeros(n, k);
        for d in 0..=self.kl + self.ku {
            // Entry (i, i + d - kl) feeds row i + d - kl of the product.
            for (i, &v) in self.data[d * n..(d + 1) * n].iter().enumerate() {
                let j = i + d;
                if v.is_zero() || j < self.kl || j - self.kl >= n {
                    continue;
                }
                let j = j - self.kl;
                for c in 0..k {
                    out[(j, c)] += v * x[(i, c)];
                }
            }
        }
        out
    }

    pub fn to_dense(&self) -> CMatrix<T> {
        CMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    pub fn matvec(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|i| {
                self.row_span(i)
                    .fold(Complex::zero(), |acc, j| acc + self.get(i, j) * x[j])
            })
            .collect()
    }

    /// `sum_k coeffs[k] * mats[k] + shift * I`, with bandwidths the union of the inputs.
    pub fn combine(mats: &[(&Self, Complex<T>)], shift: Complex<T>) -> Self {
        let n = mats.first().map(|(m, _)| m.n).unwrap_or(0);
        let kl = mats.iter().map(|(m, _)| m.kl).max().unwrap_or(0);
        let ku = mats.iter().map(|(m, _)| m.ku).max().unwrap_or(0);
        let mut out = Self::zeros(n, kl, ku).expect("inputs valid");
        for (m, c) in mats {
            assert_eq!(m.n, n, "combine: size mismatch");
            // Padding slots are zero in both, so whole diagonals add directly.
            for d in 0..=m.kl + m.ku {
                let od = d + kl - m.kl;
                let src = &m.data[d * n..(d + 1) * n];
                for (o, &v) in out.data[od * n..(od + 1) * n].iter_mut().zip(src) {
                    *o += *c * v;
                }
            }
        }
        for v in &mut out.data[kl * n..(kl + 1) * n] {
            *v += shift;
        }
        out
    }

    pub fn max_abs(&self) -> T {
        let sq = self.data.iter().fold(T::zero(), |m, z| m.max(z.norm_sqr()));
        if sq.is_finite() && sq >= T::min_positive_value() {
            sq.sqrt()
        } else {
            self.data.iter().fold(T::zero(), |m, z| m.max(z.norm()))
        }
    }

    pub fn is_real(&self) -> bool {
        self.data.iter().all(|z| z.im.is_zero())
    }

    /// Absolute row sums.
    pub fn row_abs_sums(&self) -> Vec<T> {
        (0..self.n)
            .map(|i| self.row_span(i).map(|j| self.get(i, j).norm()).sum())
            .collect()
    }

    /// Absolute column sums.
    pub fn col_abs_sums(&self) -> Vec<T> {
        let mut s = vec![T::zero(); self.n];
        for i in 0..self.n {
            for j in self.row_span(i) {
                s[j] += self.get(i, j).norm();
            }
        }
        s
    }
}

fn bandwidths<T: Real>(m: &CMatrix<T>) -> (usize, usize) {
    let (mut kl, mut ku) = (0, 0);
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            if !m[(i, j)].is_zero() {
                if i > j {
                    kl = kl.max(i - j);
                } else {
                    ku = ku.max(j - i);
                }
            }
        }
    }
    (kl, ku)
}

/// Banded LU with partial pivoting in LAPACK `gbtrf` layout.
///
/// Row interchanges widen the upper band of `U` to `kl + ku`; the factor
/// therefore keeps `2 kl + ku + 1` stored diagonals.
#[derive(Clone, Debug)]
pub struct BandedLu<T> {
    n: usize,
    kl: usize,
    ku: usize,
    ld: usize,
    ab: Vec<Complex<T>>,
    piv: Vec<usize>,
}

impl<T: Real> BandedLu<T> {
    pub fn new(m: &BandedMatrix<T>) -> Result<Self> {
        let (n, kl, ku) = (m.n, m.kl, m.ku);
        let ld = 2 * kl + ku + 1;
        let threshold = T::pivot_tolerance() * m.max_abs();
        let mut f = Self {
            n,
            kl,
            ku,
            ld,
            ab: vec![Complex::zero(); ld * n],
            piv: vec![0; n],
        };
        for d in 0..=kl + ku {
            for (i, &v) in m.data[d * n..(d + 1) * n].iter().enumerate() {
                let j = i + d;
                if j >= kl && j - kl < n {
                    let k = f.at(i, j - kl);
                    f.ab[k] = v;
                }
            }
        }
        let kv = kl + ku;
        for j in 0..n {
            let km = kl.min(n - 1 - j);
            // Pivot choice by |re| + |im|, as in LAPACK.
            let (mut p, mut best) = (j, T::zero());
            for i in j..=j + km {
                let z = f.ab[f.at(i, j)];
                let v = z.re.abs() + z.im.abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            let best = f.ab[f.at(p, j)].norm();
            if !(best > threshold) || best.is_zero() {
                return Err(Error::SingularMatrix {
                    pivot: best.as_f64(),
                    threshold: threshold.as_f64(),
                });
            }
            f.piv[j] = p;
            let last = (j + kv).min(n - 1);
            if p != j {
                for c in j..=last {
                    let (a, b) = (f.at(j, c), f.at(p, c));
                    f.ab.swap(a, b);
                }
            }
            let inv = Complex::<T>::one() / f.ab[f.at(j, j)];
            for i in j + 1..=j + km {
                let k = f.at(i, j);
                f.ab[k] *= inv;
            }
            for c in j + 1..=last {
                let u = f.ab[f.at(j, c)];
                if u.is_zero() {
                    continue;
                }
                for i in j + 1..=j + km {
                    let l = f.ab[f.at(i, j)];
                    let k = f.at(i, c);
                    f.ab[k] -= l * u;
                }
            }
        }
        Ok(f)
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> usize {
        // Column-major band storage: row index kl + ku + i - j within column j.
        j * self.ld + (self.kl + self.ku + i - j)
    }

    /// Solves `M X = rhs` in place; `rhs` is `n x m`.
    pub fn solve_in_place(&self, x: &mut CMatrix<T>) -> Result<()> {
        let n = self.n;
        if x.rows() != n {
            return Err(Error::DimensionMismatch(format!(
                "rhs has {} rows, expected {n}",
                x.rows()
            )));
        }
        let m = x.cols();
        for j in 0..n {
            let p = self.piv[j];
            if p != j {
                let (a, b) = if p > j { (j, p) } else { (p, j) };
                let data = x.as_mut_slice();
                let (lo, hi) = data.split_at_mut(b * m);
                lo[a * m..a * m + m].swap_with_slice(&mut hi[..m]);
            }
            x.row_mut(j).iter_mut().for_each(flush_subnormal);
            let km = self.kl.min(n - 1 - j);
            for i in j + 1..=j + km {
                let l = self.ab[self.at(i, j)];
                if l.is_zero() {
                    continue;
                }
                let data = x.as_mut_slice();
                let (lo, hi) = data.split_at_mut(i * m);
                let src = &lo[j * m..j * m + m];
                for (d, &s) in hi[..m].iter_mut().zip(src) {
                    *d -= l * s;
                }
            }
        }
        let kv = self.kl + self.ku;
        for j in (0..n).rev() {
            let inv = Complex::<T>::one() / self.ab[self.at(j, j)];
            for v in x.row_mut(j) {
                *v *= inv;
                flush_subnormal(v);
            }
            for i in j.saturating_sub(kv)..j {
                let u = self.ab[self.at(i, j)];
                if u.is_zero() {
                    continue;
                }
                let data = x.as_mut_slice();
                let (lo, hi) = data.split_at_mut(j * m);
                let src = &hi[..m];
                for (d, &s) in lo[i * m..i * m + m].iter_mut().zip(src) {
                    *d -= u * s;
                }
            }
        }
        Ok(())
    }

    pub fn solve(&self, rhs: &CMatrix<T>) -> Result<CMatrix<T>> {
        let mut x = rhs.clone();
        self.solve_in_place(&mut x)?;
        Ok(x)
    }
}

/// Solves `m X = rhs` by banded LU; cost is linear in the size for fixed bandwidths.
pub fn solve_banded<T: Real>(m: &BandedMatrix<T>, rhs: &CMatrix<T>) -> Result<CMatrix<T>> {
    BandedLu::new(m)?.solve(rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::solve_dense;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn tridiagonal_identity_leaves_rhs() {
        let n = 6;
        let id = BandedMatrix::<f64>::from_diagonals(
            n,
            1,
            1,
            &[vec![c(0., 0.); n - 1], vec![c(1., 0.); n], vec![c(0., 0.); n - 1]],
        )
        .unwrap();
        let rhs = CMatrix::from_fn(n, 2, |i, j| c(i as f64, j as f64));
        assert_eq!(solve_banded(&id, &rhs).unwrap(), rhs);
    }

    #[test]
    fn invalid_bandwidth_rejected() {
        assert!(BandedMatrix::<f64>::zeros(3, 3, 0).is_err());
        assert!(BandedMatrix::<f64>::zeros(3, 2, 2).is_ok());
    }

    #[test]
    fn pivoting_case_matches_dense() {
        // Zero leading diagonal forces a row interchange.
        let dense =
            CMatrix::<f64>::from_real(4, 4, &[0., 1., 0., 0., 2., 0., 1., 0., 0., 3., 0., 1., 0., 0., 4., 1.]).unwrap();
        let b = BandedMatrix::from_dense(&dense).unwrap();
        assert_eq!((b.lower_bandwidth(), b.upper_bandwidth()), (1, 1));
        let rhs = CMatrix::from_fn(4, 3, |i, j| c(1.0 + i as f64, j as f64 - 1.0));
        let x = solve_banded(&b, &rhs).unwrap();
        let y = solve_dense(&dense, &rhs).unwrap();
        assert!(x.sub(&y).max_abs() < 1e-13);
    }

    #[test]
    fn singular_band_detected() {
        let b =
            BandedMatrix::<f64>::from_diagonals(3, 1, 0, &[vec![c(1., 0.); 2], vec![c(1., 0.), c(0., 0.), c(1., 0.)]])
                .unwrap();
        assert!(matches!(
            solve_banded(&b, &CMatrix::identity(3)),
            Err(Error::SingularMatrix { .. })
        ));
    }

    #[test]
    fn transpose_and_dense_agree() {
        let dense = CMatrix::<f64>::from_real(3, 3, &[1., 2., 0., 3., 4., 5., 0., 6., 7.]).unwrap();
        let b = BandedMatrix::from_dense(&dense).unwrap();
        assert_eq!(b.transpose().to_dense(), dense.transpose());
        assert_eq!(b.get(0, 2), c(0., 0.));
    }
}
