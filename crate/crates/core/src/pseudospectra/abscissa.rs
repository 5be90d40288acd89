use num_complex::Complex;
use rayon::prelude::*;

use super::resolvent_norm_at;
use crate::error::{Error, Result};
use crate::linalg::NormKind;
use crate::optimize::golden_section;
use crate::scalar::Real;
use crate::system::IoSystem;

/// Search window and tolerances for [`pseudo_abscissa`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AbscissaConfig<T> {
    pub re: (T, T),
    pub im: (T, T),
    /// Imaginary-axis samples per vertical scan.
    pub im_samples: usize,
    /// Coarse real-axis steps used to find a bracket.
    pub re_samples: usize,
    pub tol: T,
    pub norm: NormKind,
}

impl<T: Real> Default for AbscissaConfig<T> {
    fn default() -> Self {
        Self {
            re: (T::of(-2.5), T::of(0.5)),
            im: (T::of(-3.0), T::of(3.0)),
            im_samples: 601,
            re_samples: 200,
            tol: T::of(1e-6),
            norm: NormKind::P2,
        }
    }
}

/// Largest `log10` norm along the vertical line `Re s = x`: a sampled scan
/// followed by golden-section refinement around the best sample.
fn column_peak<T: Real, S: IoSystem<T> + ?Sized>(sys: &S, x: T, extra: &[T], cfg: &AbscissaConfig<T>) -> T {
    let n = cfg.im_samples.max(2);
    let (y0, y1) = cfg.im;
    let dy = (y1 - y0) / T::of_usize(n - 1);
    let log_norm = |y: T| {
        let v = resolvent_norm_at(sys, Complex::new(x, y), cfg.norm);
        if v.is_infinite() {
            T::infinity()
        } else {
            v.log10()
        }
    };
    let (mut best_y, mut best) = (y0, T::neg_infinity());
    for y in (0..n).map(|k| y0 + dy * T::of_usize(k)).chain(extra.iter().copied()) {
        let v = log_norm(y);
        if v > best {
            best = v;
            best_y = y;
        }
    }
    if best.is_infinite() {
        return best;
    }
    let lo = (best_y - dy).max(y0);
    let hi = (best_y + dy).min(y1);
    let refined = golden_section(|y| -log_norm(y), lo, hi, dy * T::of(1e-6), 100);
    best.max(-refined.value)
}

/// Rightmost real part at which the resolvent norm reaches `1/epsilon` inside
/// the window.
///
/// The window's right edge must lie outside the pseudospectrum and some
/// vertical line inside the window must meet it; otherwise `NotBracketed`.
/// Known poles seed the bracket, so pseudospectra thinner than the coarse
/// scan are still found.
pub fn pseudo_abscissa<T: Real, S: IoSystem<T> + ?Sized>(sys: &S, epsilon: T, cfg: &AbscissaConfig<T>) -> Result<T> {
    if !(epsilon > T::zero()) {
        return Err(Error::InvalidSpec(format!("epsilon must be positive, got {epsilon}")));
    }
    if !(cfg.re.0 < cfg.re.1) || !(cfg.im.0 <= cfg.im.1) || cfg.re_samples < 2 {
        return Err(Error::InvalidSpec("abscissa window must be nonempty".into()));
    }
    let level = -epsilon.log10();
    let (x0, x1) = cfg.re;
    let poles: Vec<Complex<T>> = sys
        .poles()
        .unwrap_or_default()
        .into_iter()
        .filter(|z| z.re >= x0 && z.re <= x1 && z.im >= cfg.im.0 && z.im <= cfg.im.1)
        .collect();
    let pole_ims: Vec<T> = poles.iter().map(|z| z.im).collect();
    let inside = |x: T| column_peak(sys, x, &pole_ims, cfg) > level;
    if inside(x1) {
        return Err(Error::NotBracketed);
    }
    let m = cfg.re_samples;
    let step = (x1 - x0) / T::of_usize(m - 1);
    let xs: Vec<T> = (0..m).map(|k| x0 + step * T::of_usize(k)).collect();
    let flags: Vec<bool> = xs.par_iter().map(|&x| inside(x)).collect();
    let scanned = flags.iter().rposition(|&f| f).map(|k| xs[k]);
    let from_poles = poles
        .iter()
        .map(|z| z.re)
        .fold(None, |m: Option<T>, x| Some(m.map_or(x, |m| m.max(x))));
    let mut lo = match (scanned, from_poles) {
        (Some(a), Some(b)) => a.max(b),
        (Some(a), None) | (None, Some(a)) => a,
        (None, None) => return Err(Error::NotBracketed),
    };
    let mut hi = xs.iter().copied().find(|&x| x > lo).unwrap_or(x1);
    while hi - lo > cfg.tol {
        let mid = (lo + hi) / T::of(2.0);
        if inside(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo + hi) / T::of(2.0))
}
