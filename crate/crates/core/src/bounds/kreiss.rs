use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, NormKind};
use crate::optimize::{golden_section, nelder_mead};
use crate::pseudospectra::resolvent_norm_at;
use crate::scalar::Real;
use crate::system::{IoSystem, StateSpace};

/// Values of `Re(s) ||G(s)||` above this are reported as `Unbounded`.
const UNBOUNDED: f64 = 1e300;

/// Largest dense system whose poles are checked before the search.
const POLE_CHECK_LIMIT: usize = 500;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchConfig<T> {
    pub norm: NormKind,
    /// Frequencies sampled on the imaginary axis.
    pub axis_samples: usize,
    /// Axis maxima used as line-search seeds (the origin is always added).
    pub seeds: usize,
    /// Real-part samples per line search.
    pub line_samples: usize,
    /// Relative spread of simplex values that ends the 2-D refinement.
    pub tol: T,
    pub max_iter: usize,
}

impl<T: Real> Default for SearchConfig<T> {
    fn default() -> Self {
        Self {
            norm: NormKind::P2,
            axis_samples: 800,
            seeds: 6,
            line_samples: 80,
            tol: T::of(1e-12),
            max_iter: 2000,
        }
    }
}

/// Maximum of `Re(s) ||C (sI - A)^{-1} B||` over the open right half-plane
/// and the point where it is attained.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KreissEstimate<T> {
    pub value: T,
    pub argmax: Complex<T>,
}

/// `log10(x ||G(x + i omega)||)`; `-inf` where the solve is singular, so
/// isolated singular samples (cancelled modes) never win the search.
fn log_objective<T: Real, S: IoSystem<T> + ?Sized>(sys: &S, norm: NormKind, x: T, omega: T) -> T {
    let v = resolvent_norm_at(sys, Complex::new(x, omega), norm);
    if v.is_infinite() || v.is_zero() {
        T::neg_infinity()
    } else {
        x.log10() + v.log10()
    }
}

fn check_bounded<T: Real>(log_value: T) -> Result<()> {
    if log_value > T::of(UNBOUNDED.log10()) {
        return Err(Error::Unbounded(T::of(10.0).powf(log_value).as_f64()));
    }
    Ok(())
}

/// Kreiss constant of the triple: seeds at the largest resolvent norms along
/// the imaginary axis, line searches into the right half-plane from each
/// seed, then Nelder–Mead refinement in `(log Re s, Im s)`.
pub fn kreiss_constant<T: Real, S: IoSystem<T> + ?Sized>(sys: &S, cfg: &SearchConfig<T>) -> Result<KreissEstimate<T>> {
    if sys.state_dim() <= POLE_CHECK_LIMIT {
        if let Some(poles) = sys.poles() {
            let scale = sys.a_norm(NormKind::P1).max(T::one());
            if let Some(p) = poles.iter().find(|p| p.re > T::of(1e-10) * scale) {
                return Err(Error::Unbounded(p.re.as_f64()));
            }
        }
    }
    let norm = cfg.norm;
    let scale = sys.a_norm(norm).max(T::of(1e-3));
    let real = sys.is_real();

    // imaginary-axis scan on a log ladder plus a linear ladder up to 4 ||A||
    let n_log = cfg.axis_samples / 2;
    let n_lin = cfg.axis_samples - n_log;
    let lo = (scale * T::of(1e-6)).ln();
    let hi = (scale * T::of(10.0)).ln();
    let mut omegas: Vec<T> = (0..n_log)
        .map(|k| (lo + (hi - lo) * T::of_usize(k) / T::of_usize(n_log.max(2) - 1)).exp())
        .chain((1..=n_lin).map(|k| scale * T::of(4.0) * T::of_usize(k) / T::of_usize(n_lin)))
        .collect();
    if !real {
        let neg: Vec<T> = omegas.iter().map(|w| -*w).collect();
        omegas.extend(neg);
    }
    omegas.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let axis: Vec<T> = omegas
        .par_iter()
        .map(|&w| {
            let v = resolvent_norm_at(sys, Complex::new(T::zero(), w), norm);
            if v.is_finite() {
                v
            } else {
                T::zero()
            }
        })
        .collect();
    let mut peaks: Vec<usize> = (0..omegas.len())
        .filter(|&k| {
            let left = if k > 0 { axis[k - 1] } else { T::neg_infinity() };
            let right = if k + 1 < axis.len() {
                axis[k + 1]
            } else {
                T::neg_infinity()
            };
            axis[k] >= left && axis[k] >= right
        })
        .collect();
    peaks.sort_by(|&a, &b| axis[b].partial_cmp(&axis[a]).expect("finite").then(a.cmp(&b)));
    let mut seeds: Vec<T> = vec![T::zero()];
    seeds.extend(peaks.iter().take(cfg.seeds).map(|&k| omegas[k]));

    // line search in log x along each seed frequency
    let x_lo = (scale * T::of(1e-9)).ln();
    let x_hi = (scale * T::of(1e9)).ln();
    let m = cfg.line_samples.max(8);
    let lines: Vec<Result<(T, T, T)>> = seeds
        .par_iter()
        .map(|&w| {
            let f = |lx: T| log_objective(sys, norm, lx.exp(), w);
            let step = (x_hi - x_lo) / T::of_usize(m - 1);
            let (mut best_k, mut best) = (0, T::neg_infinity());
            for k in 0..m {
                let lx = x_lo + step * T::of_usize(k);
                let v = f(lx);
                check_bounded(v)?;
                if v > best {
                    best = v;
                    best_k = k;
                }
            }
            let a = x_lo + step * T::of_usize(best_k.saturating_sub(1));
            let b = x_lo + step * T::of_usize((best_k + 1).min(m - 1));
            let g = golden_section(|lx| -f(lx), a, b, T::of(1e-10), 200);
            let (lx, v) = if -g.value > best {
                (g.x, -g.value)
            } else {
                (x_lo + step * T::of_usize(best_k), best)
            };
            check_bounded(v)?;
            Ok((v, lx, w))
        })
        .collect();
    let mut starts = Vec::with_capacity(lines.len());
    for l in lines {
        starts.push(l?);
    }
    starts.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite"));

    // local 2-D refinement from the best line-search results
    let refine = |&(v0, lx0, w0): &(T, T, T)| -> Result<(T, T, T)> {
        let dw = (w0.abs() * T::of(1e-3)).max(lx0.exp() * T::of(0.5)).max(T::of(1e-8));
        let mut peak = T::neg_infinity();
        let r = nelder_mead(
            |p: &[T]| {
                let v = log_objective(sys, norm, p[0].exp(), p[1]);
                peak = peak.max(v);
                -v
            },
            &[lx0, w0],
            &[T::of(0.5), dw],
            cfg.tol,
            T::of(1e-10),
            cfg.max_iter,
        );
        check_bounded(peak)?;
        let v = -r.value;
        Ok(if v > v0 { (v, r.x[0], r.x[1]) } else { (v0, lx0, w0) })
    };
    let refined: Vec<Result<(T, T, T)>> = starts[..starts.len().min(3)].par_iter().map(refine).collect();
    let mut best = starts[0];
    for r in refined {
        let r = r?;
        if r.0 > best.0 {
            best = r;
        }
    }
    let (v, lx, w) = best;
    let w = if real { w.abs() } else { w };
    Ok(KreissEstimate {
        value: if v.is_finite() { T::of(10.0).powf(v) } else { T::zero() },
        argmax: Complex::new(lx.exp(), w),
    })
}

/// Transient lower bound `sup_t ||C e^{tA} B|| >= sup_{Re s > 0} Re(s) ||G(s)||`;
/// the same computation as [`kreiss_constant`].
pub fn lower_bound<T: Real, S: IoSystem<T> + ?Sized>(sys: &S, cfg: &SearchConfig<T>) -> Result<KreissEstimate<T>> {
    kreiss_constant(sys, cfg)
}

/// Kreiss-matrix-theorem interval `K(A) <= sup_t ||e^{tA}|| <= e N K(A)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassicKreiss<T> {
    pub lower: T,
    pub upper: T,
}

pub fn classic_kreiss_bounds<T: Real>(a: &CMatrix<T>, cfg: &SearchConfig<T>) -> Result<ClassicKreiss<T>> {
    let n = a.rows();
    let sys = StateSpace::new(a.clone(), CMatrix::identity(n), CMatrix::identity(n))?;
    let k = kreiss_constant(&sys, cfg)?.value;
    Ok(ClassicKreiss {
        lower: k,
        upper: T::E() * T::of_usize(n) * k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_first_order() {
        let sys = StateSpace::<f64>::from_real(1, 1, 1, &[-1.0], &[1.0], &[1.0]).unwrap();
        let k = kreiss_constant(&sys, &SearchConfig::default()).unwrap();
        assert!((k.value - 1.0).abs() < 1e-4, "{}", k.value);
    }

    #[test]
    fn example_one_quarter() {
        let sys = StateSpace::<f64>::from_real(2, 1, 1, &[0., 1., -1., -2.], &[0., 1.], &[1., 0.]).unwrap();
        let k = kreiss_constant(&sys, &SearchConfig::default()).unwrap();
        assert!((k.value - 0.25).abs() < 1e-8, "{}", k.value);
        assert!((k.argmax.re - 1.0).abs() < 1e-3 && k.argmax.im.abs() < 1e-3);
    }

    #[test]
    fn right_half_plane_pole() {
        let sys = StateSpace::<f64>::from_real(1, 1, 1, &[1.0], &[1.0], &[1.0]).unwrap();
        assert!(matches!(
            kreiss_constant(&sys, &SearchConfig::default()),
            Err(Error::Unbounded(_))
        ));
    }

    #[test]
    fn classic_interval_for_minus_identity() {
        let a = CMatrix::<f64>::from_real(2, 2, &[-1., 0., 0., -1.]).unwrap();
        let k = classic_kreiss_bounds(&a, &SearchConfig::default()).unwrap();
        assert!((k.lower - 1.0).abs() < 1e-4);
        assert!((k.upper - 2.0 * std::f64::consts::E).abs() < 1e-3);
    }
}
