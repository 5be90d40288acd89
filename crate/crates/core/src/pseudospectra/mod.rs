//! Input-output pseudospectra: resolvent-norm grids, level curves and the
//! pseudospectral abscissa.

mod abscissa;
mod contour;
mod output;

pub use abscissa::{pseudo_abscissa, AbscissaConfig};
pub(crate) use contour::outside_all;
pub use contour::{circle_contour, convex_hull, extract_level_curves, hull_of_curves, LevelCurve};
pub use output::{write_curves_csv, write_grid_csv, write_svg};

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::NormKind;
use crate::scalar::Real;
use crate::system::IoSystem;

/// `log10` value stored for grid points on the spectrum.
pub const POLE_LOG10: f64 = 308.0;

/// Rectangle `[re0, re1] x [im0, im1]` sampled at `n_re x n_im` points,
/// endpoints included.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec<T> {
    pub re: (T, T),
    pub im: (T, T),
    pub resolution: (usize, usize),
    pub norm: NormKind,
}

impl<T: Real> Default for GridSpec<T> {
    fn default() -> Self {
        Self {
            re: (T::of(-2.5), T::of(0.5)),
            im: (T::of(-3.0), T::of(3.0)),
            resolution: (600, 600),
            norm: NormKind::P2,
        }
    }
}

impl<T: Real> GridSpec<T> {
    pub fn new(re: (T, T), im: (T, T), resolution: (usize, usize), norm: NormKind) -> Result<Self> {
        let spec = Self {
            re,
            im,
            resolution,
            norm,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.re.0, self.re.1, self.im.0, self.im.1]
            .iter()
            .all(|v| v.is_finite());
        if !finite || !(self.re.0 < self.re.1) || !(self.im.0 < self.im.1) {
            return Err(Error::InvalidSpec("grid window must be a nonempty rectangle".into()));
        }
        if self.resolution.0 < 2 || self.resolution.1 < 2 {
            return Err(Error::InvalidSpec("grid resolution must be at least 2 x 2".into()));
        }
        Ok(())
    }

    pub fn re_at(&self, i: usize) -> T {
        lerp(self.re, i, self.resolution.0)
    }

    pub fn im_at(&self, j: usize) -> T {
        lerp(self.im, j, self.resolution.1)
    }

    pub fn point(&self, i: usize, j: usize) -> Complex<T> {
        Complex::new(self.re_at(i), self.im_at(j))
    }
}

fn lerp<T: Real>((a, b): (T, T), i: usize, n: usize) -> T {
    if i + 1 == n {
        b
    } else {
        a + (b - a) * T::of_usize(i) / T::of_usize(n - 1)
    }
}

/// `||C (sI - A)^{-1} B||`; infinite where the solve is singular.
pub fn resolvent_norm_at<T: Real, S: IoSystem<T> + ?Sized>(sys: &S, s: Complex<T>, norm: NormKind) -> T {
    match sys.transfer_norm(s, norm) {
        Ok(v) if v.is_finite() => v,
        _ => T::infinity(),
    }
}

/// Resolvent norms on a [`GridSpec`], stored as `log10` with poles at
/// [`POLE_LOG10`]. Point `(i, j)` (real index `i`, imaginary index `j`) sits at
/// `i * n_im + j`.
#[derive(Clone, Debug, PartialEq)]
pub struct ResolventGrid<T> {
    spec: GridSpec<T>,
    log10: Vec<T>,
}

impl<T: Real> ResolventGrid<T> {
    /// Builds from `log10` values laid out as described on the type.
    pub fn from_log10(spec: GridSpec<T>, log10: Vec<T>) -> Result<Self> {
        spec.validate()?;
        if log10.len() != spec.resolution.0 * spec.resolution.1 {
            return Err(Error::DimensionMismatch(format!(
                "{} values for a {}x{} grid",
                log10.len(),
                spec.resolution.0,
                spec.resolution.1
            )));
        }
        if log10.iter().any(|v| v.is_nan()) {
            return Err(Error::NonFinite);
        }
        let cap = T::of(POLE_LOG10);
        let log10 = log10.into_iter().map(|v| v.max(-cap).min(cap)).collect();
        Ok(Self { spec, log10 })
    }

    pub fn spec(&self) -> &GridSpec<T> {
        &self.spec
    }

    #[inline]
    pub fn log10(&self, i: usize, j: usize) -> T {
        self.log10[i * self.spec.resolution.1 + j]
    }

    pub fn log10_values(&self) -> &[T] {
        &self.log10
    }

    #[inline]
    pub fn is_pole(&self, i: usize, j: usize) -> bool {
        self.log10(i, j) >= T::of(POLE_LOG10)
    }

    /// Norm at `(i, j)`; infinite at poles.
    pub fn value(&self, i: usize, j: usize) -> T {
        if self.is_pole(i, j) {
            T::infinity()
        } else {
            T::of(10.0).powf(self.log10(i, j))
        }
    }

    /// Grid point with the largest finite value.
    pub fn argmax(&self) -> Option<(usize, usize)> {
        let n_im = self.spec.resolution.1;
        self.log10
            .iter()
            .enumerate()
            .filter(|(_, v)| **v < T::of(POLE_LOG10))
            .max_by(|a, b| a.1.partial_cmp(b.1).expect("no NaN").then(b.0.cmp(&a.0)))
            .map(|(k, _)| (k / n_im, k % n_im))
    }
}

/// Evaluates the resolvent norm at every grid point in parallel; assembly
/// order is fixed by the grid layout.
pub fn evaluate_grid<T: Real, S: IoSystem<T> + ?Sized>(sys: &S, spec: &GridSpec<T>) -> Result<ResolventGrid<T>> {
    spec.validate()?;
    let (n_re, n_im) = spec.resolution;
    let cap = T::of(POLE_LOG10);
    let log10: Vec<T> = (0..n_re * n_im)
        .into_par_iter()
        .map(|k| {
            let v = resolvent_norm_at(sys, spec.point(k / n_im, k % n_im), spec.norm);
            if v.is_infinite() {
                cap
            } else if v.is_zero() {
                -cap
            } else {
                v.log10()
            }
        })
        .collect();
    ResolventGrid::from_log10(*spec, log10)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::StateSpace;

    pub(crate) fn example1() -> StateSpace<f64> {
        StateSpace::from_real(2, 1, 1, &[0., 1., -1., -2.], &[0., 1.], &[1., 0.]).unwrap()
    }

    pub(crate) fn example2() -> StateSpace<f64> {
        StateSpace::from_real(2, 1, 1, &[0., 1., -1., -2.], &[1., 0.], &[1., 0.]).unwrap()
    }

    #[test]
    fn pointwise_values() {
        let c0 = Complex::new(0.0, 0.0);
        assert!((resolvent_norm_at(&example1(), c0, NormKind::P2) - 1.0).abs() < 1e-14);
        assert!((resolvent_norm_at(&example2(), c0, NormKind::P2) - 2.0).abs() < 1e-14);
        assert!(resolvent_norm_at(&example1(), Complex::new(-1.0, 0.0), NormKind::P2).is_infinite());
    }

    #[test]
    fn corners_match_pointwise_calls() {
        let spec = GridSpec::new((0.0, 1.0), (0.0, 1.0), (2, 2), NormKind::P2).unwrap();
        let g = evaluate_grid(&example1(), &spec).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let direct = resolvent_norm_at(&example1(), spec.point(i, j), NormKind::P2);
                assert!((g.value(i, j) - direct).abs() < 1e-12 * direct);
            }
        }
    }

    #[test]
    fn grows_toward_pole() {
        let spec = GridSpec::new((-0.99, 1.0), (-0.5, 0.5), (200, 3), NormKind::P2).unwrap();
        let g = evaluate_grid(&example1(), &spec).unwrap();
        for i in 1..200 {
            assert!(g.log10(i, 1) < g.log10(i - 1, 1));
        }
    }

    #[test]
    fn pole_is_marked() {
        let spec = GridSpec::new((-2.0, 0.0), (-1.0, 1.0), (3, 3), NormKind::P2).unwrap();
        let g = evaluate_grid(&example1(), &spec).unwrap();
        assert!(g.is_pole(1, 1));
        assert!(g.value(1, 1).is_infinite());
        assert_ne!(g.argmax(), Some((1, 1)));
    }

    #[test]
    fn invalid_specs() {
        assert!(GridSpec::new((1.0, 0.0), (0.0, 1.0), (4, 4), NormKind::P2).is_err());
        assert!(GridSpec::new((0.0, 1.0), (0.0, 1.0), (1, 4), NormKind::P2).is_err());
    }
}
