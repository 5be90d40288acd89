//! Derivative-free minimizers used by the bound searches.

use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq)]
pub struct Minimum<T, X> {
    pub x: X,
    pub value: T,
    pub iterations: usize,
}

/// Golden-section search for a minimizer of a unimodal `f` on `[lo, hi]`.
pub fn golden_section<T, F>(mut f: F, lo: T, hi: T, tol: T, max_iter: usize) -> Minimum<T, T>
where
    T: Real,
    F: FnMut(T) -> T,
{
    let inv_phi = (T::of(5.0).sqrt() - T::one()) / T::of(2.0);
    let (mut a, mut b) = (lo.min(hi), lo.max(hi));
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    let mut iterations = 0;
    while b - a > tol && iterations < max_iter {
        iterations += 1;
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        Minimum {
            x: c,
            value: fc,
            iterations,
        }
    } else {
        Minimum {
            x: d,
            value: fd,
            iterations,
        }
    }
}

/// Nelder–Mead simplex minimization in `n` dimensions.
///
/// `step[k]` sizes the initial simplex along axis `k`. Stops when the spread of
/// simplex values falls below `tol * (1 + |best|)` and the simplex diameter
/// below `x_tol`, or after `max_iter` iterations.
pub fn nelder_mead<T, F>(mut f: F, x0: &[T], step: &[T], tol: T, x_tol: T, max_iter: usize) -> Minimum<T, Vec<T>>
where
    T: Real,
    F: FnMut(&[T]) -> T,
{
    let n = x0.len();
    let mut eval = |x: &[T]| {
        let v = f(x);
        if v.is_nan() {
            T::infinity()
        } else {
            v
        }
    };
    let mut simplex: Vec<(Vec<T>, T)> = Vec::with_capacity(n + 1);
    simplex.push((x0.to_vec(), eval(x0)));
    for k in 0..n {
        let mut x = x0.to_vec();
        x[k] += step[k];
        let v = eval(&x);
        simplex.push((x, v));
    }
    let half = T::of(0.5);
    let two = T::of(2.0);
    let mut iterations = 0;
    while iterations < max_iter {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
        let best = simplex[0].1;
        let worst = simplex[n].1;
        let spread = (worst - best).abs();
        let diameter = simplex[1..]
            .iter()
            .flat_map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (*a - *b).abs()))
            .fold(T::zero(), T::max);
        if spread <= tol * (T::one() + best.abs()) && diameter <= x_tol {
            break;
        }
        iterations += 1;
        let centroid: Vec<T> = (0..n)
            .map(|k| simplex[..n].iter().map(|(x, _)| x[k]).sum::<T>() / T::of_usize(n))
            .collect();
        let along = |t: T| -> Vec<T> {
            centroid
                .iter()
                .zip(&simplex[n].0)
                .map(|(c, w)| *c + t * (*c - *w))
                .collect()
        };
        let xr = along(T::one());
        let fr = eval(&xr);
        if fr < simplex[0].1 {
            let xe = along(two);
            let fe = eval(&xe);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
        } else {
            let (xc, fc) = if fr < simplex[n].1 {
                let xc = along(half);
                let fc = eval(&xc);
                (xc, fc)
            } else {
                let xc = along(-half);
                let fc = eval(&xc);
                (xc, fc)
            };
            if fc < simplex[n].1.min(fr) {
                simplex[n] = (xc, fc);
            } else {
                let x_best = simplex[0].0.clone();
                for (x, v) in simplex.iter_mut().skip(1) {
                    for (xi, bi) in x.iter_mut().zip(&x_best) {
                        *xi = *bi + half * (*xi - *bi);
                    }
                    *v = eval(x);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
    let (x, value) = simplex.swap_remove(0);
    Minimum { x, value, iterations }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_parabola_vertex() {
        let m = golden_section(|x: f64| (x - 1.3).powi(2) + 2.0, 0.0, 5.0, 1e-10, 200);
        assert!((m.x - 1.3).abs() < 1e-7);
        assert!((m.value - 2.0).abs() < 1e-15);
    }

    #[test]
    fn nelder_mead_rosenbrock() {
        let rosen = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let m = nelder_mead(rosen, &[-1.2, 1.0], &[0.5, 0.5], 1e-14, 1e-10, 5000);
        assert!((m.x[0] - 1.0).abs() < 1e-6 && (m.x[1] - 1.0).abs() < 1e-6, "{:?}", m.x);
    }

    #[test]
    fn nelder_mead_ignores_nan_regions() {
        let f = |x: &[f64]| if x[0] < 0.0 { f64::NAN } else { (x[0] - 2.0).powi(2) };
        let m = nelder_mead(f, &[1.0], &[0.5], 1e-14, 1e-10, 500);
        assert!((m.x[0] - 2.0).abs() < 1e-6);
    }
}
