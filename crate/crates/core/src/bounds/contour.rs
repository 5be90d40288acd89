use crate::error::{Error, Result};
use crate::pseudospectra::{hull_of_curves, LevelCurve};
use crate::scalar::Real;
use crate::system::IoSystem;

/// Exponents at or below this count as nonpositive, so the bound is read as
/// uniform in `t`.
pub const UNIFORM_ALPHA_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ContourOptions<T> {
    /// Replace the curves by the convex hull of all their vertices.
    pub hull: bool,
    /// Exponential rate to use instead of the rightmost vertex real part,
    /// typically a pseudospectral abscissa.
    pub alpha: Option<T>,
}

/// `||C e^{tA} B|| <= L e^{t alpha} / (2 pi epsilon)` from a closed contour on
/// which the resolvent norm is at most `1/epsilon`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContourBound<T> {
    pub epsilon: T,
    pub arc_length: T,
    pub alpha: T,
    /// Bound at `t = 0`; the supremum over `t` when `uniform`.
    pub value: T,
    pub uniform: bool,
}

impl<T: Real> ContourBound<T> {
    pub fn value_at(&self, t: T) -> T {
        self.value * (t * self.alpha).exp()
    }
}

/// Contour bound over the closed components `curves` of one level set.
///
/// Every curve must be closed and every known pole must lie inside one of
/// them. Lengths of disjoint components add; the exponent is the largest
/// real part among them.
pub fn upper_bound_contour<T: Real, S: IoSystem<T> + ?Sized>(
    sys: &S,
    curves: &[LevelCurve<T>],
    opts: &ContourOptions<T>,
) -> Result<ContourBound<T>> {
    let first = curves.first().ok_or(Error::EmptyLevel)?;
    if curves.iter().any(|c| !c.is_closed()) {
        return Err(Error::CurveOpen);
    }
    let epsilon = first.epsilon();
    if curves.iter().any(|c| c.epsilon() != epsilon) {
        return Err(Error::InvalidSpec("contour components must share one epsilon".into()));
    }
    let hull;
    let curves = if opts.hull {
        hull = [hull_of_curves(curves)?];
        &hull[..]
    } else {
        curves
    };
    if let Some(poles) = sys.poles() {
        if let Some(p) = crate::pseudospectra::outside_all(curves, &poles).first() {
            return Err(Error::NotEnclosing {
                re: p.re.as_f64(),
                im: p.im.as_f64(),
            });
        }
    }
    let arc_length = curves.iter().fold(T::zero(), |acc, c| acc + c.arc_length());
    let alpha = opts
        .alpha
        .unwrap_or_else(|| curves.iter().map(|c| c.max_real()).fold(T::neg_infinity(), T::max));
    Ok(ContourBound {
        epsilon,
        arc_length,
        alpha,
        value: arc_length / (T::TAU() * epsilon),
        uniform: alpha <= T::of(UNIFORM_ALPHA_TOL),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::StateSpace;
    use num_complex::Complex;

    fn example1() -> StateSpace<f64> {
        StateSpace::from_real(2, 1, 1, &[0., 1., -1., -2.], &[0., 1.], &[1., 0.]).unwrap()
    }

    fn circle(eps: f64, r: f64, n: usize) -> LevelCurve<f64> {
        let v = (0..n)
            .map(|k| {
                let t = std::f64::consts::TAU * k as f64 / n as f64;
                Complex::new(r * t.cos() - 1.0, r * t.sin())
            })
            .collect();
        LevelCurve::new(eps, v, true).unwrap()
    }

    #[test]
    fn unit_circle_gives_one() {
        let b = upper_bound_contour(&example1(), &[circle(1.0, 1.0, 20000)], &ContourOptions::default()).unwrap();
        assert!((b.value - 1.0).abs() < 1e-6);
        assert!(b.uniform);
    }

    #[test]
    fn quarter_level_decays() {
        let b = upper_bound_contour(&example1(), &[circle(0.25, 0.5, 20000)], &ContourOptions::default()).unwrap();
        assert!((b.value - 2.0).abs() < 1e-6);
        assert!((b.alpha + 0.5).abs() < 1e-9);
        assert!((b.value_at(2.0) - 2.0 * (-1.0f64).exp()).abs() < 1e-6);
    }

    #[test]
    fn open_and_missing_poles() {
        let open = LevelCurve::new(1.0, vec![Complex::new(0.0, 0.0), Complex::new(1.0, 0.0)], false).unwrap();
        assert_eq!(
            upper_bound_contour(&example1(), &[open], &ContourOptions::default()),
            Err(Error::CurveOpen)
        );
        let shifted: Vec<_> = circle(1.0, 0.5, 64).vertices().iter().map(|z| z + 3.0).collect();
        let away = LevelCurve::new(1.0, shifted, true).unwrap();
        assert!(matches!(
            upper_bound_contour(&example1(), &[away], &ContourOptions::default()),
            Err(Error::NotEnclosing { .. })
        ));
    }

    #[test]
    fn positive_alpha_is_not_uniform() {
        let opts = ContourOptions {
            hull: true,
            alpha: Some(0.1),
        };
        let b = upper_bound_contour(&example1(), &[circle(1.0, 1.0, 256)], &opts).unwrap();
        assert!(!b.uniform);
    }
}
