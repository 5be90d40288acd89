//! Globally adaptive Simpson quadrature.
//!
//! Panels live in a max-heap keyed by their error estimate; the worst panels
//! are bisected until the summed estimate meets the tolerance. Each panel keeps
//! five equispaced samples, so one bisection costs four new evaluations.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Panels bisected per refinement round; fixed so results do not depend on
/// the thread count.
const BATCH: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureConfig<T> {
    pub abs_tol: T,
    pub rel_tol: T,
    pub max_panels: usize,
}

impl<T: Real> Default for QuadratureConfig<T> {
    fn default() -> Self {
        Self {
            abs_tol: T::of(1e-6),
            rel_tol: T::of(1e-6),
            max_panels: 1 << 20,
        }
    }
}

impl<T: Real> QuadratureConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > T::zero()) || !(self.rel_tol > T::zero()) || self.max_panels == 0 {
            return Err(Error::InvalidSpec("quadrature tolerances must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureResult<V> {
    pub value: V,
    pub error: f64,
    pub panels: usize,
    pub evaluations: usize,
}

/// `(point, integral from the first point)` pairs.
pub type RunningIntegral<T> = Vec<(T, T)>;

/// Integral together with the final panels sorted by abscissa.
type Refined<T> = (QuadratureResult<Vec<T>>, Vec<Panel<T>>);

#[derive(Clone, Debug)]
struct Panel<T> {
    a: T,
    b: T,
    /// Samples at `a`, `a + h/4`, `a + h/2`, `a + 3h/4`, `b`.
    f: [Vec<T>; 5],
    value: Vec<T>,
    error: f64,
}

impl<T: Real> Panel<T> {
    fn new(a: T, b: T, f: [Vec<T>; 5]) -> Self {
        let h = b - a;
        let dim = f[0].len();
        let six = T::of(6.0);
        let twelve = T::of(12.0);
        let four = T::of(4.0);
        let mut error = 0.0f64;
        let value = (0..dim)
            .map(|k| {
                let [f0, f1, f2, f3, f4] = [f[0][k], f[1][k], f[2][k], f[3][k], f[4][k]];
                let coarse = h / six * (f0 + four * f2 + f4);
                let fine = h / twelve * (f0 + four * f1 + T::of(2.0) * f2 + four * f3 + f4);
                let diff = (fine - coarse) / T::of(15.0);
                error = error.max(diff.abs().as_f64());
                fine + diff
            })
            .collect();
        Self { a, b, f, value, error }
    }
}

struct Keyed<T>(Panel<T>);

impl<T: Real> PartialEq for Keyed<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<T: Real> Eq for Keyed<T> {}

impl<T: Real> PartialOrd for Keyed<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Real> Ord for Keyed<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .error
            .total_cmp(&other.0.error)
            .then_with(|| other.0.a.as_f64().total_cmp(&self.0.a.as_f64()))
    }
}

/// Integrates a vector-valued `f` over `[points[0], points[last]]`, with the
/// interior `points` as initial panel boundaries. The tolerance applies to
/// the largest component: `err <= max(abs_tol, rel_tol * max_k |I_k|)`.
pub fn integrate_vec<T, F>(f: F, points: &[T], cfg: &QuadratureConfig<T>) -> Result<QuadratureResult<Vec<T>>>
where
    T: Real,
    F: Fn(T) -> Result<Vec<T>> + Sync,
{
    adaptive(f, points, cfg).map(|(r, _)| r)
}

/// Scalar integral over `[points[0], points[last]]` together with the running
/// integral from `points[0]` to every sorted, deduplicated point; panels never
/// straddle a point.
pub fn integrate_cumulative<T, F>(
    f: F,
    points: &[T],
    cfg: &QuadratureConfig<T>,
) -> Result<(QuadratureResult<T>, RunningIntegral<T>)>
where
    T: Real,
    F: Fn(T) -> Result<T> + Sync,
{
    let (r, panels) = adaptive(|x| f(x).map(|v| vec![v]), points, cfg)?;
    let mut knots: Vec<T> = points.to_vec();
    knots.sort_by(|x, y| x.partial_cmp(y).expect("finite"));
    knots.dedup();
    let mut running = T::zero();
    let mut out = Vec::with_capacity(knots.len());
    let mut it = panels.iter().peekable();
    for &k in &knots {
        while let Some(p) = it.peek() {
            if p.b <= k {
                running += p.value[0];
                it.next();
            } else {
                break;
            }
        }
        out.push((k, running));
    }
    Ok((
        QuadratureResult {
            value: r.value[0],
            error: r.error,
            panels: r.panels,
            evaluations: r.evaluations,
        },
        out,
    ))
}

/// Runs the refinement loop; returns the panels sorted by abscissa.
fn adaptive<T, F>(f: F, points: &[T], cfg: &QuadratureConfig<T>) -> Result<Refined<T>>
where
    T: Real,
    F: Fn(T) -> Result<Vec<T>> + Sync,
{
    cfg.validate()?;
    let mut knots: Vec<T> = points.iter().copied().filter(|x| x.is_finite()).collect();
    if knots.len() != points.len() || knots.len() < 2 {
        return Err(Error::InvalidSpec("integration needs finite endpoints".into()));
    }
    knots.sort_by(|x, y| x.partial_cmp(y).expect("finite"));
    knots.dedup();
    if knots.len() < 2 {
        let dim = f(knots[0])?.len();
        return Ok((
            QuadratureResult {
                value: vec![T::zero(); dim],
                error: 0.0,
                panels: 0,
                evaluations: 1,
            },
            Vec::new(),
        ));
    }
    let quarter = T::of(0.25);
    let abscissae: Vec<T> = knots
        .windows(2)
        .flat_map(|w| {
            let h = w[1] - w[0];
            (0..4).map(move |k| w[0] + h * quarter * T::of_usize(k))
        })
        .chain(std::iter::once(*knots.last().expect("nonempty")))
        .collect();
    let samples: Vec<Vec<T>> = abscissae.par_iter().map(|&x| f(x)).collect::<Result<_>>()?;
    let dim = samples[0].len();
    if samples.iter().any(|v| v.len() != dim) {
        return Err(Error::DimensionMismatch("integrand changed dimension".into()));
    }
    let mut evaluations = samples.len();
    let mut heap = BinaryHeap::new();
    for (p, w) in knots.windows(2).enumerate() {
        let s = |k: usize| samples[4 * p + k].clone();
        heap.push(Keyed(Panel::new(w[0], w[1], [s(0), s(1), s(2), s(3), s(4)])));
    }
    // Running sums drive the stopping test; the reported value is re-summed in
    // abscissa order.
    let (mut total, mut err) = totals(&heap, dim);
    loop {
        let scale = total.iter().fold(T::zero(), |m, v| m.max(v.abs())).as_f64();
        let target = cfg.abs_tol.as_f64().max(cfg.rel_tol.as_f64() * scale);
        if err <= target {
            let exact = totals(&heap, dim);
            total = exact.0;
            err = exact.1;
        }
        let scale = total.iter().fold(T::zero(), |m, v| m.max(v.abs())).as_f64();
        let target = cfg.abs_tol.as_f64().max(cfg.rel_tol.as_f64() * scale);
        if err <= target {
            let panels = heap.len();
            let mut sorted: Vec<Panel<T>> = heap.into_iter().map(|k| k.0).collect();
            sorted.sort_by(|x, y| x.a.as_f64().total_cmp(&y.a.as_f64()));
            return Ok((
                QuadratureResult {
                    value: total,
                    error: err,
                    panels,
                    evaluations,
                },
                sorted,
            ));
        }
        if heap.len() >= cfg.max_panels {
            return Err(Error::QuadratureFail(heap.len()));
        }
        let take = BATCH.min(cfg.max_panels - heap.len()).max(1);
        let worst: Vec<Panel<T>> = (0..take).filter_map(|_| heap.pop().map(|k| k.0)).collect();
        let children: Vec<[Panel<T>; 2]> = worst.par_iter().map(|p| bisect(p, &f)).collect::<Result<_>>()?;
        evaluations += 4 * children.len();
        for p in &worst {
            err -= p.error;
            for (t, v) in total.iter_mut().zip(&p.value) {
                *t -= *v;
            }
        }
        for [l, r] in &children {
            err += l.error + r.error;
            for ((t, a), b) in total.iter_mut().zip(&l.value).zip(&r.value) {
                *t += *a + *b;
            }
        }
        err = err.max(0.0);
        for [l, r] in children {
            if l.b <= l.a || r.b <= r.a {
                return Err(Error::QuadratureFail(heap.len()));
            }
            heap.push(Keyed(l));
            heap.push(Keyed(r));
        }
    }
}

/// Scalar version of [`integrate_vec`].
pub fn integrate<T, F>(f: F, points: &[T], cfg: &QuadratureConfig<T>) -> Result<QuadratureResult<T>>
where
    T: Real,
    F: Fn(T) -> Result<T> + Sync,
{
    let r = integrate_vec(|x| f(x).map(|v| vec![v]), points, cfg)?;
    Ok(QuadratureResult {
        value: r.value[0],
        error: r.error,
        panels: r.panels,
        evaluations: r.evaluations,
    })
}

fn totals<T: Real>(heap: &BinaryHeap<Keyed<T>>, dim: usize) -> (Vec<T>, f64) {
    // Sum in abscissa order so the result does not depend on heap layout.
    let mut panels: Vec<&Panel<T>> = heap.iter().map(|k| &k.0).collect();
    panels.sort_by(|x, y| x.a.as_f64().total_cmp(&y.a.as_f64()));
    let mut total = vec![T::zero(); dim];
    let mut err = 0.0;
    for p in panels {
        for (t, v) in total.iter_mut().zip(&p.value) {
            *t += *v;
        }
        err += p.error;
    }
    (total, err)
}

fn bisect<T, F>(p: &Panel<T>, f: &F) -> Result<[Panel<T>; 2]>
where
    T: Real,
    F: Fn(T) -> Result<Vec<T>>,
{
    let h = p.b - p.a;
    let eighth = h / T::of(8.0);
    let m = p.a + h / T::of(2.0);
    let l1 = f(p.a + eighth)?;
    let l3 = f(p.a + eighth * T::of(3.0))?;
    let r1 = f(m + eighth)?;
    let r3 = f(m + eighth * T::of(3.0))?;
    let left = Panel::new(p.a, m, [p.f[0].clone(), l1, p.f[1].clone(), l3, p.f[2].clone()]);
    let right = Panel::new(m, p.b, [p.f[2].clone(), r1, p.f[3].clone(), r3, p.f[4].clone()]);
    Ok([left, right])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(
            |x: f64| Ok(x * x * x - 2.0 * x),
            &[0.0, 2.0],
            &QuadratureConfig::default(),
        )
        .unwrap();
        assert!((r.value - 0.0).abs() < 1e-14);
    }

    #[test]
    fn lorentzian_to_arctan() {
        let cfg = QuadratureConfig {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_panels: 1 << 16,
        };
        let r = integrate(|w: f64| Ok(1.0 / (1.0 + w * w)), &[0.0, 1e3], &cfg).unwrap();
        assert!((r.value - 1e3f64.atan()).abs() < 1e-9);
    }

    #[test]
    fn sharp_peak_is_resolved() {
        let cfg = QuadratureConfig {
            abs_tol: 1e-9,
            rel_tol: 1e-9,
            max_panels: 1 << 18,
        };
        let eps = 1e-4;
        let r = integrate(
            |x: f64| Ok(eps / ((x - 1.0).powi(2) + eps * eps)),
            &[0.0, 0.9, 1.1, 2.0],
            &cfg,
        )
        .unwrap();
        let exact = 2.0 * (1.0 / eps).atan();
        assert!((r.value - exact).abs() < 1e-7 * exact, "{} vs {exact}", r.value);
    }

    #[test]
    fn vector_components_integrate_independently() {
        let r = integrate_vec(
            |x: f64| Ok(vec![x.sin(), x.cos()]),
            &[0.0, std::f64::consts::PI],
            &QuadratureConfig::default(),
        )
        .unwrap();
        assert!((r.value[0] - 2.0).abs() < 1e-7);
        assert!(r.value[1].abs() < 1e-7);
    }

    #[test]
    fn cumulative_values_at_knots() {
        let cfg = QuadratureConfig {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            max_panels: 1 << 16,
        };
        let (total, cum) = integrate_cumulative(|x: f64| Ok(x.exp()), &[0.0, 2.0, 0.5, 1.0], &cfg).unwrap();
        assert!((total.value - (2f64.exp() - 1.0)).abs() < 1e-11);
        let knots: Vec<f64> = cum.iter().map(|c| c.0).collect();
        assert_eq!(knots, vec![0.0, 0.5, 1.0, 2.0]);
        for (x, v) in cum {
            assert!((v - (x.exp() - 1.0)).abs() < 1e-11);
        }
    }

    #[test]
    fn panel_budget_is_enforced() {
        let cfg = QuadratureConfig {
            abs_tol: 1e-14,
            rel_tol: 1e-14,
            max_panels: 4,
        };
        let r = integrate(|x: f64| Ok(x.abs().sqrt()), &[-1.0, 1.0], &cfg);
        assert!(matches!(r, Err(Error::QuadratureFail(_))));
    }

    #[test]
    fn integrand_errors_propagate() {
        let r = integrate(
            |_x: f64| Err(Error::NonFinite),
            &[0.0, 1.0],
            &QuadratureConfig::default(),
        );
        assert_eq!(r.unwrap_err(), Error::NonFinite);
    }

    #[test]
    fn single_precision_works() {
        let r = integrate(|x: f32| Ok(x.exp()), &[0.0f32, 1.0], &QuadratureConfig::default()).unwrap();
        assert!((r.value - (1f32.exp() - 1.0)).abs() < 1e-5);
    }
}
