//! Brute-force transient response `t -> ||C e^{tA} B||` of dense systems.

use std::io::{self, Write};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{induced_norm, matrix_exponential, spectral_abscissa, CMatrix, NormKind};
use crate::quadrature::{integrate_vec, QuadratureConfig};
use crate::scalar::{fmt17, Real};
use crate::system::{IoSystem, StateSpace};

/// Largest state dimension the oracle accepts.
pub const ORACLE_LIMIT: usize = 2000;

/// Largest state dimension for the Laplace-identity check.
pub const LAPLACE_LIMIT: usize = 50;

/// Coarse steps are widened so a trace never exceeds this many.
const MAX_STEPS: usize = 200_000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HorizonConfig<T> {
    /// Final time; defaults to 50 time constants of the slowest pole.
    pub horizon: Option<T>,
    /// Coarse step; defaults to `0.01 / ||A||`.
    pub step: Option<T>,
    /// Refinement stops once a trisection round improves the peak by less
    /// than this relative amount.
    pub rel_tol: T,
}

impl<T: Real> Default for HorizonConfig<T> {
    fn default() -> Self {
        Self {
            horizon: None,
            step: None,
            rel_tol: T::of(1e-4),
        }
    }
}

/// Sampled response. Invariants: `times` strictly increasing, `sup_value`
/// is the largest entry of `values` and sits at `sup_time`.
#[derive(Clone, Debug, PartialEq)]
pub struct TransientTrace<T> {
    pub times: Vec<T>,
    pub values: Vec<T>,
    pub sup_value: T,
    pub sup_time: T,
    /// The tail envelope is decreasing and below a tenth of the peak.
    pub converged: bool,
}

impl<T: Real> TransientTrace<T> {
    /// `t,value` rows.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "t,value")?;
        for (t, v) in self.times.iter().zip(&self.values) {
            writeln!(out, "{},{}", fmt17(*t), fmt17(*v))?;
        }
        Ok(())
    }
}

fn dense_of<T: Real, S: IoSystem<T> + ?Sized>(sys: &S, limit: usize) -> Result<StateSpace<T>> {
    if sys.state_dim() > limit {
        return Err(Error::TooLarge(sys.state_dim()));
    }
    sys.dense().ok_or(Error::TooLarge(sys.state_dim()))
}

/// Largest real part among the transfer poles, falling back to the spectrum.
fn decay_abscissa<T: Real, S: IoSystem<T> + ?Sized>(sys: &S, dense: &StateSpace<T>) -> Result<T> {
    match sys.poles() {
        Some(p) if !p.is_empty() => Ok(p.iter().fold(T::neg_infinity(), |m, z| m.max(z.re))),
        _ => spectral_abscissa(dense.a()),
    }
}

/// Largest values over the final tenth of the samples and over the tenth
/// before it; oscillating responses decay in this envelope even when the last
/// two samples rise.
fn tail_envelopes<T: Real>(values: &[T]) -> (T, T) {
    let n = values.len();
    let w = (n / 10).max(1);
    let max = |s: &[T]| s.iter().copied().fold(T::neg_infinity(), T::max);
    let last = max(&values[n - w..]);
    let previous = if n > w {
        max(&values[n.saturating_sub(2 * w)..n - w])
    } else {
        T::neg_infinity()
    };
    (last, previous)
}

/// Samples `||C e^{tA} B||` on `0, d, 2d, ...` up to the horizon by
/// propagating `C e^{kdA}` with one exponential, then trisects around the
/// coarse maximum.
///
/// Errors with `NotConverged` when the response still grows at the horizon.
pub fn transient_sup<T: Real, S: IoSystem<T> + ?Sized>(
    sys: &S,
    norm: NormKind,
    cfg: &HorizonConfig<T>,
) -> Result<TransientTrace<T>> {
    let dense = dense_of(sys, ORACLE_LIMIT)?;
    let (a, b, c) = (dense.a(), dense.b(), dense.c());
    let a_norm = induced_norm(a, norm).max(T::of(1e-12));
    let horizon = match cfg.horizon {
        Some(h) if h > T::zero() => h,
        Some(h) => return Err(Error::InvalidSpec(format!("horizon must be positive, got {h}"))),
        None => {
            let rate = -decay_abscissa(sys, &dense)?;
            T::of(50.0) / rate.max(a_norm * T::of(1e-3))
        }
    };
    let mut step = cfg.step.unwrap_or(T::of(0.01) / a_norm);
    if !(step > T::zero()) {
        return Err(Error::InvalidSpec("time step must be positive".into()));
    }
    step = step.max(horizon / T::of_usize(MAX_STEPS));
    let steps = (horizon / step).ceil().as_f64() as usize;

    let propagator = matrix_exponential(&a.scale_real(step))?;
    let value = |y: &CMatrix<T>| induced_norm(&y.matmul(b), norm);
    let mut y = c.clone();
    let mut times = Vec::with_capacity(steps + 1);
    let mut values = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        let v = value(&y);
        if !v.is_finite() {
            return Err(Error::Overflow);
        }
        times.push(step * T::of_usize(k));
        values.push(v);
        y = y.matmul(&propagator);
    }
    let n = values.len();
    let (last, previous) = tail_envelopes(&values);
    if last >= previous && last > T::zero() {
        return Err(Error::NotConverged(times[n - 1].as_f64()));
    }

    let argmax = (0..n).fold(0, |best, k| if values[k] > values[best] { k } else { best });
    let exact = |t: T| -> Result<T> { Ok(value(&c.matmul(&matrix_exponential(&a.scale_real(t))?))) };
    let mut extra: Vec<(T, T)> = Vec::new();
    let (mut lo, mut hi) = (times[argmax.saturating_sub(1)], times[(argmax + 1).min(n - 1)]);
    let mut best = values[argmax];
    while hi - lo > step * T::of(1e-6) {
        let t1 = lo + (hi - lo) / T::of(3.0);
        let t2 = hi - (hi - lo) / T::of(3.0);
        let (v1, v2) = (exact(t1)?, exact(t2)?);
        extra.push((t1, v1));
        extra.push((t2, v2));
        if v1 < v2 {
            lo = t1;
        } else {
            hi = t2;
        }
        let round = v1.max(v2);
        let improved = round > best && (round - best) > cfg.rel_tol * best;
        best = best.max(round);
        if !improved && hi - lo < step {
            break;
        }
    }

    let mut samples: Vec<(T, T)> = times.into_iter().zip(values).chain(extra).collect();
    samples.sort_by(|x, y| x.0.partial_cmp(&y.0).expect("finite times"));
    samples.dedup_by(|x, y| x.0 == y.0);
    let (times, values): (Vec<T>, Vec<T>) = samples.into_iter().unzip();
    let k = (0..values.len()).fold(0, |best, k| if values[k] > values[best] { k } else { best });
    let (sup_value, sup_time) = (values[k], times[k]);
    let converged = last < previous && last < sup_value / T::of(10.0);
    Ok(TransientTrace {
        times,
        values,
        sup_value,
        sup_time,
        converged,
    })
}

/// Entry-wise largest deviation between `C (sI - A)^{-1} B` and the
/// quadrature of `int_0^T e^{-st} C e^{tA} B dt`.
///
/// The horizon defaults to 40 decay times of `e^{-st} e^{tA}`; errors with
/// `HorizonTooShort` when the integrand at the horizon still exceeds
/// `quad.abs_tol`.
pub fn check_laplace_identity<T: Real, S: IoSystem<T> + ?Sized>(
    sys: &S,
    s: Complex<T>,
    horizon: Option<T>,
    quad: &QuadratureConfig<T>,
) -> Result<T> {
    let dense = dense_of(sys, LAPLACE_LIMIT)?;
    let (a, b, c) = (dense.a(), dense.b(), dense.c());
    let horizon = match horizon {
        Some(h) => h,
        None => {
            let rate = s.re - spectral_abscissa(a)?;
            if rate > T::zero() {
                T::of(40.0) / rate
            } else {
                T::of(50.0)
            }
        }
    };
    if !(horizon > T::zero()) {
        return Err(Error::InvalidSpec(format!("horizon must be positive, got {horizon}")));
    }
    let integrand = |t: T| -> Result<CMatrix<T>> {
        let decay = Complex::new(T::zero(), -s.im * t).exp() * (-s.re * t).exp();
        Ok(c.matmul(&matrix_exponential(&a.scale_real(t))?).matmul(b).scale(decay))
    };
    let tail = integrand(horizon)?.max_abs();
    if !(tail <= quad.abs_tol) {
        return Err(Error::HorizonTooShort(tail.as_f64()));
    }
    let split = |x: CMatrix<T>| -> Vec<T> { x.as_slice().iter().flat_map(|z| [z.re, z.im]).collect() };
    let mut points: Vec<T> = (1..=20).map(|k| horizon * T::of(2f64.powi(-k))).collect();
    points.push(T::zero());
    points.push(horizon);
    points.sort_by(|x, y| x.partial_cmp(y).expect("finite"));
    let integral = integrate_vec(|t| integrand(t).map(split), &points, quad)?;
    let direct = split(sys.transfer(s)?);
    Ok(direct
        .iter()
        .zip(&integral.value)
        .fold(T::zero(), |m, (d, i)| m.max((*d - *i).abs())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example(b: [f64; 2]) -> StateSpace<f64> {
        StateSpace::from_real(2, 1, 1, &[0., 1., -1., -2.], &b, &[1., 0.]).unwrap()
    }

    #[test]
    fn example_one_peak() {
        let t = transient_sup(&example([0.0, 1.0]), NormKind::P2, &HorizonConfig::default()).unwrap();
        assert!((t.sup_value - (-1.0f64).exp()).abs() < 1e-6, "{}", t.sup_value);
        assert!((t.sup_time - 1.0).abs() < 1e-2);
        assert!(t.converged);
        assert!(t.times.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn decaying_identity() {
        let a = CMatrix::<f64>::from_real(2, 2, &[-1., 0., 0., -3.]).unwrap();
        let sys = StateSpace::new(a, CMatrix::identity(2), CMatrix::identity(2)).unwrap();
        let t = transient_sup(&sys, NormKind::P2, &HorizonConfig::default()).unwrap();
        assert!((t.sup_value - 1.0).abs() < 1e-12 && t.sup_time == 0.0);
    }

    #[test]
    fn growing_response() {
        let sys = StateSpace::<f64>::from_real(1, 1, 1, &[0.2], &[1.0], &[1.0]).unwrap();
        let cfg = HorizonConfig {
            horizon: Some(5.0),
            ..HorizonConfig::default()
        };
        assert!(matches!(
            transient_sup(&sys, NormKind::P2, &cfg),
            Err(Error::NotConverged(_))
        ));
    }

    #[test]
    fn laplace_identity() {
        let q = QuadratureConfig {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            ..QuadratureConfig::default()
        };
        let sys = example([0.0, 1.0]);
        for s in [Complex::new(1.0, 0.0), Complex::new(2.0, 1.0)] {
            assert!(check_laplace_identity(&sys, s, None, &q).unwrap() < 1e-6);
        }
        assert!(check_laplace_identity(&sys, Complex::new(10.0, 0.0), None, &q).unwrap() < 1e-9);
        assert!(matches!(
            check_laplace_identity(&sys, Complex::new(-1.5, 0.0), Some(30.0), &q),
            Err(Error::HorizonTooShort(_))
        ));
    }

    #[test]
    fn csv_layout() {
        let t = transient_sup(&example([0.0, 1.0]), NormKind::P2, &HorizonConfig::default()).unwrap();
        let mut out = Vec::new();
        t.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with("t,value\n0.0000000000000000e0,"));
    }
}
