//! Upper bounds from integrals of the frequency response along the
//! imaginary axis.

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::NormKind;
use crate::optimize::golden_section;
use crate::quadrature::{integrate, integrate_cumulative, QuadratureConfig};
use crate::scalar::Real;
use crate::system::IoSystem;

/// Fixed breakpoints where platoon responses peak sharply.
const PEAK_SPLITS: [f64; 4] = [0.5, 0.9, 1.1, 2.0];

/// Decades below the truncation radius that start their own panel.
const LOG_SPLITS: i32 = 14;

/// Range and grid of the `a` search.
pub const A_RANGE: (f64, f64) = (1.05, 20.0);
pub const A_GRID: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AChoice<T> {
    Fixed(T),
    /// Grid over [`A_RANGE`] then golden-section refinement.
    Optimize,
}

/// `(1/2pi) int_{-R}^{R} ||G(i w)|| dw + ||C|| ||B|| / (2 - 2/a)` with `R = a ||A||`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SemicircleBound<T> {
    pub a: T,
    pub radius: T,
    pub axis_integral: T,
    pub arc_term: T,
    pub value: T,
}

/// `||G(s)|| <= M |s|^{-beta}` for `|s| >= cutoff`, fitted on probe frequencies.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecayEstimate<T> {
    /// Fitted constant with a 10% margin.
    pub m: T,
    /// Largest `||G(i w)|| w^beta` over the probes, without margin.
    pub m_fit: T,
    /// Integer decay exponent.
    pub beta: T,
    /// Least-squares slope of `-log ||G||` against `log w`.
    pub beta_fit: T,
    pub cutoff: T,
}

/// Axis integral truncated at `truncation` plus the analytic tail.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AxisBound<T> {
    pub m: T,
    pub beta: T,
    pub cutoff: T,
    pub truncation: T,
    pub axis_integral: T,
    pub tail: T,
    pub value: T,
}

/// Errors with `NotInputOutputStable` when a known pole has nonnegative real part.
fn require_stable<T: Real, S: IoSystem<T> + ?Sized>(sys: &S) -> Result<()> {
    let scale = sys.a_norm(NormKind::P1).max(T::one());
    if let Some(poles) = sys.poles() {
        if let Some(p) = poles.iter().find(|p| p.re > -T::of(1e-10) * scale) {
            return Err(Error::NotInputOutputStable(p.re.as_f64()));
        }
    }
    Ok(())
}

/// `||G(i w)||`, averaged with `||G(-i w)||` for complex systems, so the
/// full-axis integral is `2 int_0^R`. A singular sample is retried once at
/// a nudged frequency.
fn axis_norm<T: Real, S: IoSystem<T> + ?Sized>(sys: &S, norm: NormKind, scale: T, w: T) -> Result<T> {
    let eval = |w: T| -> Result<T> {
        let at = |w: T| {
            sys.transfer_norm(Complex::new(T::zero(), w), norm)
                .ok()
                .filter(|v| v.is_finite())
        };
        let v = if sys.is_real() {
            at(w)
        } else {
            at(w).zip(at(-w)).map(|(p, m)| (p + m) / T::of(2.0))
        };
        v.ok_or(Error::NotInputOutputStable(w.as_f64()))
    };
    eval(w).or_else(|_| eval(w + scale * T::of(1e-9)))
}

/// Panel boundaries on `[0, r]`: logarithmic near the origin, the fixed
/// peak splits, and `extra`.
fn split_points<T: Real>(r: T, extra: &[T]) -> Vec<T> {
    let mut pts = vec![T::zero(), r];
    pts.extend((1..=LOG_SPLITS).map(|k| r * T::of(10f64.powi(-k))));
    pts.extend(PEAK_SPLITS.iter().map(|&p| T::of(p)).filter(|&p| p < r));
    pts.extend(extra.iter().copied().filter(|&p| p > T::zero() && p < r));
    pts.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    pts.dedup();
    pts
}

fn scale_of<T: Real, S: IoSystem<T> + ?Sized>(sys: &S, norm: NormKind) -> T {
    sys.a_norm(norm).max(T::of(1e-12))
}

/// Semicircle bound for a fixed or optimized `a`; `R = a ||A||` with `||A||`
/// in the same norm as the response.
pub fn upper_bound_semicircle<T: Real, S: IoSystem<T> + ?Sized>(
    sys: &S,
    a: AChoice<T>,
    norm: NormKind,
    quad: &QuadratureConfig<T>,
) -> Result<SemicircleBound<T>> {
    if let AChoice::Fixed(a) = a {
        if !(a > T::one()) {
            return Err(Error::InvalidA(a.as_f64()));
        }
    }
    quad.validate()?;
    require_stable(sys)?;
    let a_norm = scale_of(sys, norm);
    let cb = sys.c_norm(norm) * sys.b_norm(norm);
    let arc = |a: T| cb / (T::of(2.0) - T::of(2.0) / a);
    let f = |w: T| axis_norm(sys, norm, a_norm, w);
    let finish = |a: T, integral: T| {
        let axis_integral = integral / T::PI();
        let arc_term = arc(a);
        SemicircleBound {
            a,
            radius: a * a_norm,
            axis_integral,
            arc_term,
            value: axis_integral + arc_term,
        }
    };
    match a {
        AChoice::Fixed(a) => {
            let r = a * a_norm;
            let res = integrate(f, &split_points(r, &[]), quad)?;
            Ok(finish(a, res.value))
        }
        AChoice::Optimize => {
            let (lo, hi) = (T::of(A_RANGE.0), T::of(A_RANGE.1));
            let grid: Vec<T> = (0..A_GRID)
                .map(|k| lo * (hi / lo).powf(T::of_usize(k) / T::of_usize(A_GRID - 1)))
                .collect();
            let radii: Vec<T> = grid.iter().map(|&a| a * a_norm).collect();
            let (_, cum) = integrate_cumulative(f, &split_points(hi * a_norm, &radii), quad)?;
            // running integral up to any radius: nearest knot below plus a short remainder
            let integral_to = |r: T| -> Result<T> {
                let k = cum.partition_point(|&(x, _)| x <= r).max(1) - 1;
                let (x, base) = cum[k];
                if r <= x {
                    return Ok(base);
                }
                Ok(base + integrate(f, &[x, r], quad)?.value)
            };
            let values: Vec<T> = radii.par_iter().map(|&r| integral_to(r)).collect::<Result<Vec<T>>>()?;
            let objective = |k: usize| values[k] / T::PI() + arc(grid[k]);
            let best = (0..A_GRID)
                .min_by(|&i, &j| objective(i).partial_cmp(&objective(j)).expect("finite"))
                .expect("nonempty grid");
            let (ga, gb) = (grid[best.saturating_sub(1)], grid[(best + 1).min(A_GRID - 1)]);
            let mut failure = None;
            let refined = golden_section(
                |a: T| match integral_to(a * a_norm) {
                    Ok(v) => v / T::PI() + arc(a),
                    Err(e) => {
                        failure.get_or_insert(e);
                        T::infinity()
                    }
                },
                ga,
                gb,
                T::of(1e-4),
                60,
            );
            if let Some(e) = failure {
                return Err(e);
            }
            if refined.value < objective(best) {
                let a = refined.x;
                Ok(finish(a, integral_to(a * a_norm)?))
            } else {
                Ok(finish(grid[best], values[best]))
            }
        }
    }
}

/// Fits the high-frequency decay of `||G(i w)||` on the probes (default
/// `2 ||A|| 2^k`, `k = 0..6`). `beta` is the fitted slope rounded down to an
/// integer unless within 0.25 of the next one.
pub fn estimate_decay<T: Real, S: IoSystem<T> + ?Sized>(
    sys: &S,
    norm: NormKind,
    probes: Option<&[T]>,
) -> Result<DecayEstimate<T>> {
    let scale = scale_of(sys, norm);
    let probes: Vec<T> = match probes {
        Some(p) => p.to_vec(),
        None => (0..7).map(|k| T::of(2.0) * scale * T::of(2f64.powi(k))).collect(),
    };
    if probes.len() < 2 || probes.iter().any(|&w| !(w > T::zero())) {
        return Err(Error::InvalidSpec(
            "decay probes must be at least two positive frequencies".into(),
        ));
    }
    let values: Vec<T> = probes
        .iter()
        .map(|&w| axis_norm(sys, norm, scale, w))
        .collect::<Result<_>>()?;
    if values.iter().any(|v| !(*v > T::zero())) {
        return Err(Error::NonFinite);
    }
    let xs: Vec<T> = probes.iter().map(|w| w.ln()).collect();
    let ys: Vec<T> = values.iter().map(|v| v.ln()).collect();
    let n = T::of_usize(xs.len());
    let mx = xs.iter().fold(T::zero(), |a, &x| a + x) / n;
    let my = ys.iter().fold(T::zero(), |a, &y| a + y) / n;
    let (sxy, sxx) = xs.iter().zip(&ys).fold((T::zero(), T::zero()), |(sxy, sxx), (&x, &y)| {
        (sxy + (x - mx) * (y - my), sxx + (x - mx) * (x - mx))
    });
    let beta_fit = -sxy / sxx;
    let beta = (beta_fit + T::of(0.25)).floor().max(T::zero());
    let m_fit = probes
        .iter()
        .zip(&values)
        .fold(T::zero(), |m, (&w, &v)| m.max(v * w.powf(beta)));
    Ok(DecayEstimate {
        m: m_fit * T::of(1.1),
        m_fit,
        beta,
        beta_fit,
        cutoff: probes.iter().copied().fold(T::infinity(), T::min),
    })
}

/// Full-axis integral bound; needs `beta > 1`. The truncation radius is the
/// smallest `Omega >= cutoff` whose analytic tail
/// `M Omega^{1-beta} / (pi (beta - 1))` is within `quad.abs_tol`.
pub fn upper_bound_axis<T: Real, S: IoSystem<T> + ?Sized>(
    sys: &S,
    decay: &DecayEstimate<T>,
    norm: NormKind,
    quad: &QuadratureConfig<T>,
) -> Result<AxisBound<T>> {
    let beta = decay.beta;
    if !(beta > T::one()) {
        return Err(Error::DecayTooSlow(beta.as_f64()));
    }
    quad.validate()?;
    require_stable(sys)?;
    let scale = scale_of(sys, norm);
    let b1 = beta - T::one();
    let m = decay.m;
    let omega = decay
        .cutoff
        .max((m / (T::PI() * quad.abs_tol * b1)).powf(T::one() / b1));
    let res = integrate(
        |w| axis_norm(sys, norm, scale, w),
        &split_points(omega, &[decay.cutoff]),
        quad,
    )?;
    let axis_integral = res.value / T::PI();
    let tail = m * omega.powf(-b1) / (T::PI() * b1);
    Ok(AxisBound {
        m,
        beta,
        cutoff: decay.cutoff,
        truncation: omega,
        axis_integral,
        tail,
        value: axis_integral + tail,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::StateSpace;

    fn example(b: [f64; 2]) -> StateSpace<f64> {
        StateSpace::from_real(2, 1, 1, &[0., 1., -1., -2.], &b, &[1., 0.]).unwrap()
    }

    #[test]
    fn example_two_semicircle() {
        let sys = example([1.0, 0.0]);
        let q = QuadratureConfig::default();
        let fixed = upper_bound_semicircle(&sys, AChoice::Fixed(3.0), NormKind::PInf, &q).unwrap();
        assert!((fixed.radius - 9.0).abs() < 1e-12);
        assert!(fixed.value > 2.0 && fixed.value < 2.05, "{}", fixed.value);
        let opt = upper_bound_semicircle(&sys, AChoice::Optimize, NormKind::PInf, &q).unwrap();
        assert!(opt.value <= fixed.value + 1e-9 && opt.value <= 2.03, "{}", opt.value);
        assert_eq!(
            upper_bound_semicircle(&sys, AChoice::Fixed(1.0), NormKind::PInf, &q),
            Err(Error::InvalidA(1.0))
        );
    }

    #[test]
    fn example_one_axis() {
        let sys = example([0.0, 1.0]);
        let d = estimate_decay(&sys, NormKind::P2, None).unwrap();
        assert_eq!(d.beta, 2.0);
        assert!((d.m_fit - 1.0).abs() < 0.05, "{}", d.m_fit);
        let b = upper_bound_axis(&sys, &d, NormKind::P2, &QuadratureConfig::default()).unwrap();
        assert!((b.value - 0.5).abs() < 1e-4, "{}", b.value);
    }

    #[test]
    fn example_two_decays_too_slowly() {
        let sys = example([1.0, 0.0]);
        let d = estimate_decay(&sys, NormKind::P2, None).unwrap();
        assert_eq!(d.beta, 1.0);
        assert_eq!(
            upper_bound_axis(&sys, &d, NormKind::P2, &QuadratureConfig::default()),
            Err(Error::DecayTooSlow(1.0))
        );
    }

    #[test]
    fn unstable_is_rejected() {
        let sys = StateSpace::<f64>::from_real(1, 1, 1, &[0.5], &[1.0], &[1.0]).unwrap();
        assert!(matches!(
            upper_bound_semicircle(&sys, AChoice::Fixed(2.0), NormKind::P2, &QuadratureConfig::default()),
            Err(Error::NotInputOutputStable(_))
        ));
    }
}
