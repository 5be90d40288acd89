use std::collections::BTreeMap;

use num_complex::Complex;
use num_traits::{One, Zero};

use super::{IoSystem, StateSpace};
use crate::error::{Error, Result};
use crate::linalg::{
    induced_norm, largest_eigenvalue_lanczos, singular_values, BandedLu, BandedMatrix, CMatrix, NormKind,
};
use crate::scalar::{modulus, Real};

/// Largest state dimension for which a dense realization is formed.
pub const DENSE_LIMIT: usize = 2000;

/// Output counts up to which the 2-norm goes through an explicit Gram matrix.
const GRAM_LIMIT: usize = 32;

/// State dimensions up to which `||A||_2` uses Lanczos, which stores its
/// whole basis; power iteration takes over above.
const LANCZOS_LIMIT: usize = 1 << 15;

/// Output rows over the position coordinates, stored sparsely as
/// `(vehicle index, weight)` pairs with 0-based indices.
#[derive(Clone, Debug, PartialEq)]
pub struct OutputSelector<T> {
    rows: Vec<Vec<(usize, T)>>,
}

impl<T: Real> OutputSelector<T> {
    pub fn new(rows: Vec<Vec<(usize, T)>>) -> Self {
        Self { rows }
    }

    /// Rows `x_i - x_{i+1}` for each 0-based `i`.
    pub fn gaps(first: &[usize]) -> Self {
        Self::new(first.iter().map(|&i| vec![(i, T::one()), (i + 1, -T::one())]).collect())
    }

    pub fn rows(&self) -> &[Vec<(usize, T)>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// `C x` for a position vector `x`.
    pub fn apply(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        self.rows
            .iter()
            .map(|r| r.iter().fold(Complex::zero(), |acc, &(j, w)| acc + x[j] * w))
            .collect()
    }

    /// Dense `q x n` position block.
    pub fn to_dense(&self, n: usize) -> CMatrix<T> {
        let mut c = CMatrix::zeros(self.rows.len(), n);
        for (i, r) in self.rows.iter().enumerate() {
            for &(j, w) in r {
                c[(i, j)] += Complex::new(w, T::zero());
            }
        }
        c
    }

    fn norm(&self, kind: NormKind) -> T {
        match kind {
            NormKind::PInf => self
                .rows
                .iter()
                .map(|r| r.iter().map(|&(_, w)| w.abs()).sum::<T>())
                .fold(T::zero(), T::max),
            NormKind::P1 => {
                let mut cols: BTreeMap<usize, T> = BTreeMap::new();
                for r in &self.rows {
                    for &(j, w) in r {
                        *cols.entry(j).or_insert_with(T::zero) += w.abs();
                    }
                }
                cols.values().copied().fold(T::zero(), T::max)
            }
            NormKind::P2 => {
                let q = self.rows.len();
                let dense: Vec<BTreeMap<usize, T>> = self
                    .rows
                    .iter()
                    .map(|r| {
                        let mut m = BTreeMap::new();
                        for &(j, w) in r {
                            *m.entry(j).or_insert_with(T::zero) += w;
                        }
                        m
                    })
                    .collect();
                let gram = CMatrix::from_fn(q, q, |a, b| {
                    let v: T = dense[a]
                        .iter()
                        .filter_map(|(j, w)| dense[b].get(j).map(|u| *w * *u))
                        .sum();
                    Complex::new(v, T::zero())
                });
                largest_eigenvalue_psd(&gram).sqrt()
            }
        }
    }
}

fn largest_eigenvalue_psd<T: Real>(gram: &CMatrix<T>) -> T {
    singular_values(gram).into_iter().fold(T::zero(), T::max)
}

/// Second-order network `x'' + (Ld + alpha I) x' + Lp x = u` with outputs
/// taken over the positions, realized as the companion matrix
/// `A = [0 I; -Lp -(Ld + alpha I)]` on the state `(x, x')`.
#[derive(Clone, Debug, PartialEq)]
pub struct Network<T> {
    lp: BandedMatrix<T>,
    ld: BandedMatrix<T>,
    alpha: T,
    selector: OutputSelector<T>,
    damping: BandedMatrix<T>,
}

impl<T: Real> Network<T> {
    pub fn new(lp: BandedMatrix<T>, ld: BandedMatrix<T>, alpha: T, selector: OutputSelector<T>) -> Result<Self> {
        let n = lp.size();
        if ld.size() != n {
            return Err(Error::DimensionMismatch(format!(
                "Lp is {n}x{n} but Ld is {0}x{0}",
                ld.size()
            )));
        }
        if !(alpha >= T::zero()) {
            return Err(Error::InvalidSpec(format!("alpha must be nonnegative, got {alpha}")));
        }
        if let Some(j) = selector.rows().iter().flatten().map(|&(j, _)| j).find(|&j| j >= n) {
            return Err(Error::DimensionMismatch(format!(
                "output selector references position {j} of {n}"
            )));
        }
        let damping = BandedMatrix::combine(&[(&ld, Complex::one())], Complex::new(alpha, T::zero()));
        Ok(Self {
            lp,
            ld,
            alpha,
            selector,
            damping,
        })
    }

    /// Number of agents `n`; the state dimension is `2n`.
    pub fn size(&self) -> usize {
        self.lp.size()
    }

    pub fn lp(&self) -> &BandedMatrix<T> {
        &self.lp
    }

    pub fn ld(&self) -> &BandedMatrix<T> {
        &self.ld
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn selector(&self) -> &OutputSelector<T> {
        &self.selector
    }

    /// `Ld + alpha I`.
    pub fn damping(&self) -> &BandedMatrix<T> {
        &self.damping
    }

    /// `Q(s) = s^2 I + s (Ld + alpha I) + Lp`.
    pub fn quadratic(&self, s: Complex<T>) -> BandedMatrix<T> {
        BandedMatrix::combine(&[(&self.lp, Complex::one()), (&self.damping, s)], s * s)
    }

    /// `(sI - A)^{-1} rhs` for a `2n x k` right-hand side, through banded
    /// solves with `Q(s)`.
    pub fn resolvent_solve(&self, s: Complex<T>, rhs: &CMatrix<T>) -> Result<CMatrix<T>> {
        let n = self.size();
        if rhs.rows() != 2 * n {
            return Err(Error::DimensionMismatch(format!(
                "rhs has {} rows, expected {}",
                rhs.rows(),
                2 * n
            )));
        }
        let k = rhs.cols();
        let b1 = rhs.block(0, 0, n, k);
        let b2 = rhs.block(n, 0, n, k);
        let lu = BandedLu::new(&self.quadratic(s))?;
        // x = Q^{-1} (D(s) b1 + b2), D(s) = sI + Ld + alpha I
        let mut x = b2;
        for c in 0..k {
            let col = b1.column(c);
            let db = self.damping.matvec(&col);
            for i in 0..n {
                x[(i, c)] += db[i] + s * col[i];
            }
        }
        lu.solve_in_place(&mut x)?;
        let mut out = CMatrix::zeros(2 * n, k);
        for i in 0..n {
            for c in 0..k {
                let xi = x[(i, c)];
                out[(i, c)] = xi;
                out[(n + i, c)] = s * xi - b1[(i, c)];
            }
        }
        Ok(out)
    }

    /// `C (sI - A)^{-1} rhs`.
    pub fn resolvent_apply(&self, s: Complex<T>, rhs: &CMatrix<T>) -> Result<CMatrix<T>> {
        let n = self.size();
        let full = self.resolvent_solve(s, rhs)?;
        let q = self.selector.len();
        let mut out = CMatrix::zeros(q, rhs.cols());
        for c in 0..rhs.cols() {
            let x: Vec<Complex<T>> = (0..n).map(|i| full[(i, c)]).collect();
            for (r, v) in self.selector.apply(&x).into_iter().enumerate() {
                out[(r, c)] = v;
            }
        }
        Ok(out)
    }

    /// Velocity blocks `y2` of the output rows of `C (sI - A)^{-1}`, one per
    /// column: `Q(s)^T y2 = c`. The position blocks are `y1 = D(s)^T y2`.
    fn output_velocity_blocks(&self, s: Complex<T>) -> Result<CMatrix<T>> {
        let n = self.size();
        let q = self.selector.len();
        let mut y = CMatrix::zeros(n, q);
        for (r, row) in self.selector.rows().iter().enumerate() {
            for &(j, w) in row {
                y[(j, r)] += Complex::new(w, T::zero());
            }
        }
        BandedLu::new(&self.quadratic(s).transpose())?.solve_in_place(&mut y)?;
        Ok(y)
    }

    /// `y1 = D(s)^T y2` for every column of `y2`.
    fn position_blocks(&self, s: Complex<T>, y2: &CMatrix<T>) -> CMatrix<T> {
        let mut y1 = self.damping.transpose_matmul(y2);
        for (a, &b) in y1.as_mut_slice().iter_mut().zip(y2.as_slice()) {
            *a += s * b;
        }
        y1
    }

    /// `C (sI - A)^{-1}` as a `q x 2n` matrix.
    pub fn output_resolvent(&self, s: Complex<T>) -> Result<CMatrix<T>> {
        let n = self.size();
        let y2 = self.output_velocity_blocks(s)?;
        let y1 = self.position_blocks(s, &y2);
        let q = y2.cols();
        Ok(CMatrix::from_fn(q, 2 * n, |r, j| {
            if j < n {
                y1[(j, r)]
            } else {
                y2[(j - n, r)]
            }
        }))
    }

    /// `||C (sI - A)^{-1}||` without forming the `q x 2n` matrix.
    pub fn output_resolvent_norm(&self, s: Complex<T>, kind: NormKind) -> Result<T> {
        let y2 = self.output_velocity_blocks(s)?;
        let y1 = self.position_blocks(s, &y2);
        let q = y2.cols();
        let n = self.size();
        Ok(match kind {
            NormKind::PInf => (0..q)
                .map(|c| (0..n).map(|i| modulus(y1[(i, c)]) + modulus(y2[(i, c)])).sum::<T>())
                .fold(T::zero(), T::max),
            NormKind::P1 => {
                let mut best = T::zero();
                for block in [&y1, &y2] {
                    for i in 0..n {
                        let s: T = block.row(i).iter().map(|z| z.norm()).sum();
                        best = best.max(s);
                    }
                }
                best
            }
            NormKind::P2 if q <= GRAM_LIMIT => {
                let mut gram = CMatrix::<T>::zeros(q, q);
                for block in [&y1, &y2] {
                    for i in 0..n {
                        let row = block.row(i);
                        for a in 0..q {
                            for b in 0..q {
                                gram[(a, b)] += row[a] * row[b].conj();
                            }
                        }
                    }
                }
                largest_eigenvalue_psd(&gram).sqrt()
            }
            NormKind::P2 => {
                // G G^H v = sum over rows r of [y1; y2] of r (r^H v).
                let apply = |v: &[Complex<T>], out: &mut [Complex<T>]| {
                    out.iter_mut().for_each(|z| *z = Complex::zero());
                    for block in [&y1, &y2] {
                        for i in 0..n {
                            let row = block.row(i);
                            let c = row
                                .iter()
                                .zip(v)
                                .fold(Complex::zero(), |acc, (r, x)| acc + r.conj() * x);
                            for (o, r) in out.iter_mut().zip(row) {
                                *o += *r * c;
                            }
                        }
                    }
                };
                largest_eigenvalue_lanczos(q, apply, T::of(1e-13)).max(T::zero()).sqrt()
            }
        })
    }

    /// `||A||` of the companion matrix.
    pub fn a_norm(&self, kind: NormKind) -> T {
        let n = self.size();
        match kind {
            NormKind::PInf => {
                let lp = self.lp.row_abs_sums();
                let d = self.damping.row_abs_sums();
                lp.iter()
                    .zip(&d)
                    .map(|(a, b)| *a + *b)
                    .fold(if n > 0 { T::one() } else { T::zero() }, T::max)
            }
            NormKind::P1 => {
                let lp = self.lp.col_abs_sums();
                let d = self.damping.col_abs_sums();
                let pos = lp.into_iter().fold(T::zero(), T::max);
                let vel = d.into_iter().map(|v| v + T::one()).fold(T::zero(), T::max);
                pos.max(vel)
            }
            NormKind::P2 => {
                if 2 * n <= crate::linalg::SVD_DIM_LIMIT {
                    induced_norm(&self.companion(), NormKind::P2)
                } else {
                    self.companion_spectral_norm()
                }
            }
        }
    }

    /// `A x` for the companion matrix.
    fn companion_matvec(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        let n = self.size();
        let (pos, vel) = x.split_at(n);
        let lp = self.lp.matvec(pos);
        let d = self.damping.matvec(vel);
        let mut out = vel.to_vec();
        out.extend(lp.iter().zip(&d).map(|(a, b)| -(*a + *b)));
        out
    }

    /// `A^H y` for the companion matrix.
    fn companion_adjoint_matvec(
        &self,
        lp_h: &BandedMatrix<T>,
        d_h: &BandedMatrix<T>,
        y: &[Complex<T>],
    ) -> Vec<Complex<T>> {
        let n = self.size();
        let (top, bottom) = y.split_at(n);
        let mut out: Vec<Complex<T>> = lp_h.matvec(bottom).into_iter().map(|v| -v).collect();
        let d = d_h.matvec(bottom);
        out.extend(top.iter().zip(&d).map(|(a, b)| *a - *b));
        out
    }

    fn companion_spectral_norm(&self) -> T {
        let conj_t = |m: &BandedMatrix<T>| {
            let t = m.transpose();
            let mut c = t.clone();
            for i in 0..t.size() {
                for j in t.row_span(i) {
                    c.set(i, j, t.get(i, j).conj());
                }
            }
            c
        };
        let lp_h = conj_t(&self.lp);
        let d_h = conj_t(&self.damping);
        let dim = 2 * self.size();
        if dim <= LANCZOS_LIMIT {
            let apply = |x: &[Complex<T>], out: &mut [Complex<T>]| {
                let y = self.companion_matvec(x);
                out.copy_from_slice(&self.companion_adjoint_matvec(&lp_h, &d_h, &y));
            };
            return largest_eigenvalue_lanczos(dim, apply, T::of(1e-13))
                .max(T::zero())
                .sqrt();
        }
        let mut x: Vec<Complex<T>> = (0..dim)
            .map(|j| Complex::new(T::one() + T::of_usize(j % 7) / T::of(13.0), T::zero()))
            .collect();
        let l2 = |v: &[Complex<T>]| v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        let mut sigma = T::zero();
        for _ in 0..10_000 {
            let nx = l2(&x);
            x.iter_mut().for_each(|z| *z = *z / nx);
            let y = self.companion_matvec(&x);
            let next = l2(&y);
            x = self.companion_adjoint_matvec(&lp_h, &d_h, &y);
            if (next - sigma).abs() <= T::of(1e-12) * next {
                return next;
            }
            sigma = next;
        }
        sigma
    }

    /// Dense companion matrix `[0 I; -Lp -(Ld + alpha I)]`.
    pub fn companion(&self) -> CMatrix<T> {
        let n = self.size();
        let mut a = CMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            a[(i, n + i)] = Complex::one();
            for j in self.lp.row_span(i) {
                a[(n + i, j)] = -self.lp.get(i, j);
            }
            for j in self.damping.row_span(i) {
                a[(n + i, n + j)] = -self.damping.get(i, j);
            }
        }
        a
    }

    /// Dense output matrix `[C_x 0]`.
    pub fn output_matrix(&self) -> CMatrix<T> {
        let n = self.size();
        let mut c = CMatrix::zeros(self.selector.len(), 2 * n);
        c.set_block(0, 0, &self.selector.to_dense(n));
        c
    }

    /// Reference-tracking input `B = [0; alpha 1]`.
    pub fn reference_input(&self) -> CMatrix<T> {
        let n = self.size();
        CMatrix::from_fn(2 * n, 1, |i, _| {
            if i >= n {
                Complex::new(self.alpha, T::zero())
            } else {
                Complex::zero()
            }
        })
    }

    pub fn is_real(&self) -> bool {
        self.lp.is_real() && self.damping.is_real()
    }
}

/// Input matrix of a network system.
#[derive(Clone, Debug, PartialEq)]
pub enum NetworkInput<T> {
    /// `B = I_{2n}`: response to an arbitrary initial condition.
    Identity,
    /// Explicit `2n x p` input matrix.
    Dense(CMatrix<T>),
}

/// A second-order network together with its input matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct NetworkSystem<T> {
    network: Network<T>,
    input: NetworkInput<T>,
}

impl<T: Real> NetworkSystem<T> {
    pub fn new(network: Network<T>, input: NetworkInput<T>) -> Result<Self> {
        if let NetworkInput::Dense(b) = &input {
            if b.rows() != 2 * network.size() {
                return Err(Error::DimensionMismatch(format!(
                    "B has {} rows, expected {}",
                    b.rows(),
                    2 * network.size()
                )));
            }
        }
        Ok(Self { network, input })
    }

    pub fn network(&self) -> &Network<T> {
        &self.network
    }

    pub fn input(&self) -> &NetworkInput<T> {
        &self.input
    }

    pub fn with_input(&self, input: NetworkInput<T>) -> Result<Self> {
        Self::new(self.network.clone(), input)
    }

    /// Dense input matrix.
    pub fn input_matrix(&self) -> CMatrix<T> {
        match &self.input {
            NetworkInput::Identity => CMatrix::identity(2 * self.network.size()),
            NetworkInput::Dense(b) => b.clone(),
        }
    }
}

impl<T: Real> IoSystem<T> for NetworkSystem<T> {
    fn state_dim(&self) -> usize {
        2 * self.network.size()
    }

    fn input_dim(&self) -> usize {
        match &self.input {
            NetworkInput::Identity => self.state_dim(),
            NetworkInput::Dense(b) => b.cols(),
        }
    }

    fn output_dim(&self) -> usize {
        self.network.selector.len()
    }

    fn transfer(&self, s: Complex<T>) -> Result<CMatrix<T>> {
        match &self.input {
            NetworkInput::Identity => self.network.output_resolvent(s),
            NetworkInput::Dense(b) if b.cols() <= self.output_dim() => self.network.resolvent_apply(s, b),
            NetworkInput::Dense(b) => Ok(self.network.output_resolvent(s)?.matmul(b)),
        }
    }

    fn transfer_norm(&self, s: Complex<T>, kind: NormKind) -> Result<T> {
        match &self.input {
            NetworkInput::Identity => self.network.output_resolvent_norm(s, kind),
            NetworkInput::Dense(_) => Ok(induced_norm(&self.transfer(s)?, kind)),
        }
    }

    fn a_norm(&self, kind: NormKind) -> T {
        self.network.a_norm(kind)
    }

    fn b_norm(&self, kind: NormKind) -> T {
        match &self.input {
            NetworkInput::Identity => T::one(),
            NetworkInput::Dense(b) => induced_norm(b, kind),
        }
    }

    fn c_norm(&self, kind: NormKind) -> T {
        self.network.selector.norm(kind)
    }

    fn is_real(&self) -> bool {
        self.network.is_real()
            && match &self.input {
                NetworkInput::Identity => true,
                NetworkInput::Dense(b) => b.is_real(),
            }
    }

    fn dense(&self) -> Option<StateSpace<T>> {
        if self.state_dim() > DENSE_LIMIT {
            return None;
        }
        StateSpace::new(
            self.network.companion(),
            self.input_matrix(),
            self.network.output_matrix(),
        )
        .ok()
    }
}
