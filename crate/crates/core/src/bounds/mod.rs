//! Lower and upper bounds on the transient peak `sup_t ||C e^{tA} B||`.

mod contour;
mod frequency;
mod kreiss;

pub use contour::{upper_bound_contour, ContourBound, ContourOptions, UNIFORM_ALPHA_TOL};
pub use frequency::{
    estimate_decay, upper_bound_axis, upper_bound_semicircle, AChoice, AxisBound, DecayEstimate, SemicircleBound,
    A_GRID, A_RANGE,
};
pub use kreiss::{classic_kreiss_bounds, kreiss_constant, lower_bound, ClassicKreiss, KreissEstimate, SearchConfig};

use std::fmt::Write as _;
use std::io::{self, Write};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::NormKind;
use crate::pseudospectra::{
    circle_contour, evaluate_grid, extract_level_curves, pseudo_abscissa, AbscissaConfig, GridSpec,
};
use crate::quadrature::QuadratureConfig;
use crate::scalar::{fmt17, Real};
use crate::system::IoSystem;

/// Where the closed contours for the contour bound come from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ContourSource<T> {
    /// Level curves of a resolvent grid, one bound per ladder entry.
    Grid(GridSpec<T>),
    /// A sampled circle whose level is the largest norm on it.
    Circle {
        center: Complex<T>,
        radius: T,
        samples: usize,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReportConfig<T> {
    pub norm: NormKind,
    pub search: SearchConfig<T>,
    pub quad: QuadratureConfig<T>,
    pub a: AChoice<T>,
    /// Level ladder for the contour bound; empty skips it for grid sources.
    pub epsilons: Vec<T>,
    pub contour: Option<ContourSource<T>>,
    pub hull: bool,
}

impl<T: Real> Default for ReportConfig<T> {
    fn default() -> Self {
        Self {
            norm: NormKind::P2,
            search: SearchConfig::default(),
            quad: QuadratureConfig::default(),
            a: AChoice::Optimize,
            epsilons: Vec::new(),
            contour: None,
            hull: false,
        }
    }
}

/// All bounds computed for one system, scenario and norm.
///
/// Invariant (checked by [`BoundReport::check`]): `lower` does not exceed
/// any uniform upper bound.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport<T> {
    pub norm: NormKind,
    pub lower: KreissEstimate<T>,
    pub contour: Option<ContourBound<T>>,
    pub semicircle: Option<SemicircleBound<T>>,
    pub decay: Option<DecayEstimate<T>>,
    pub axis: Option<AxisBound<T>>,
    pub notes: Vec<String>,
}

const CSV_COLUMNS: &str = "system,norm,lower,lower_re,lower_im,\
contour_epsilon,contour_length,contour_alpha,contour_value,contour_uniform,\
semicircle_a,semicircle_radius,semicircle_integral,semicircle_arc,semicircle_value,\
decay_m,decay_beta,decay_cutoff,axis_truncation,axis_integral,axis_tail,axis_value,upper";

impl<T: Real> BoundReport<T> {
    /// Uniform upper bounds by name.
    pub fn uppers(&self) -> Vec<(&'static str, T)> {
        let mut out = Vec::new();
        if let Some(c) = self.contour.filter(|c| c.uniform) {
            out.push(("contour", c.value));
        }
        if let Some(s) = self.semicircle {
            out.push(("semicircle", s.value));
        }
        if let Some(a) = self.axis {
            out.push(("axis", a.value));
        }
        out
    }

    /// Smallest uniform upper bound.
    pub fn upper(&self) -> Option<T> {
        self.uppers().into_iter().map(|(_, v)| v).reduce(T::min)
    }

    pub fn check(&self) -> Result<()> {
        let lower = self.lower.value;
        for (which, upper) in self.uppers() {
            if !(lower >= T::zero() && upper >= T::zero()) {
                return Err(Error::NonFinite);
            }
            if lower > upper * (T::one() + T::of(1e-9)) {
                return Err(Error::Inconsistent {
                    lower: lower.as_f64(),
                    upper: upper.as_f64(),
                    which,
                });
            }
        }
        Ok(())
    }

    /// Flat `key = value` report, one entry per line.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("norm", self.norm.to_string());
        kv("lower", fmt17(self.lower.value));
        kv("lower.argmax.re", fmt17(self.lower.argmax.re));
        kv("lower.argmax.im", fmt17(self.lower.argmax.im));
        if let Some(c) = &self.contour {
            kv("contour.epsilon", fmt17(c.epsilon));
            kv("contour.length", fmt17(c.arc_length));
            kv("contour.alpha", fmt17(c.alpha));
            kv("contour.value", fmt17(c.value));
            kv("contour.uniform", c.uniform.to_string());
        }
        if let Some(d) = &self.decay {
            kv("decay.m", fmt17(d.m));
            kv("decay.beta", fmt17(d.beta));
            kv("decay.beta_fit", fmt17(d.beta_fit));
            kv("decay.cutoff", fmt17(d.cutoff));
        }
        if let Some(b) = &self.semicircle {
            kv("semicircle.a", fmt17(b.a));
            kv("semicircle.radius", fmt17(b.radius));
            kv("semicircle.integral", fmt17(b.axis_integral));
            kv("semicircle.arc", fmt17(b.arc_term));
            kv("semicircle.value", fmt17(b.value));
        }
        if let Some(b) = &self.axis {
            kv("axis.truncation", fmt17(b.truncation));
            kv("axis.integral", fmt17(b.axis_integral));
            kv("axis.tail", fmt17(b.tail));
            kv("axis.value", fmt17(b.value));
        }
        if let Some(u) = self.upper() {
            kv("upper", fmt17(u));
        }
        for n in &self.notes {
            kv("note", n.clone());
        }
        s
    }

    pub fn csv_header() -> &'static str {
        CSV_COLUMNS
    }

    /// One CSV row matching [`BoundReport::csv_header`]; absent bounds leave
    /// their fields empty.
    pub fn csv_row(&self, system: &str) -> String {
        let opt = |v: Option<T>| v.map(fmt17).unwrap_or_default();
        let c = self.contour;
        let s = self.semicircle;
        let d = self.decay;
        let a = self.axis;
        [
            system.replace(',', ";"),
            self.norm.to_string(),
            fmt17(self.lower.value),
            fmt17(self.lower.argmax.re),
            fmt17(self.lower.argmax.im),
            opt(c.map(|c| c.epsilon)),
            opt(c.map(|c| c.arc_length)),
            opt(c.map(|c| c.alpha)),
            opt(c.map(|c| c.value)),
            c.map(|c| c.uniform.to_string()).unwrap_or_default(),
            opt(s.map(|s| s.a)),
            opt(s.map(|s| s.radius)),
            opt(s.map(|s| s.axis_integral)),
            opt(s.map(|s| s.arc_term)),
            opt(s.map(|s| s.value)),
            opt(d.map(|d| d.m)),
            opt(d.map(|d| d.beta)),
            opt(d.map(|d| d.cutoff)),
            opt(a.map(|a| a.truncation)),
            opt(a.map(|a| a.axis_integral)),
            opt(a.map(|a| a.tail)),
            opt(a.map(|a| a.value)),
            opt(self.upper()),
        ]
        .join(",")
    }

    pub fn write_text<W: Write>(&self, out: &mut W) -> io::Result<()> {
        out.write_all(self.to_text().as_bytes())
    }
}

/// Contour bound with the smallest `t = 0` value over the ladder, preferring
/// uniform ones. Ladder entries whose level set is unusable are noted.
fn best_contour<T: Real, S: IoSystem<T> + ?Sized>(
    sys: &S,
    cfg: &ReportConfig<T>,
    notes: &mut Vec<String>,
) -> Result<Option<ContourBound<T>>> {
    let opts = ContourOptions {
        hull: cfg.hull,
        alpha: None,
    };
    let mut found: Vec<ContourBound<T>> = Vec::new();
    match cfg.contour {
        None => return Ok(None),
        Some(ContourSource::Circle {
            center,
            radius,
            samples,
        }) => {
            let curve = circle_contour(sys, center, radius, samples, cfg.norm)?;
            found.push(upper_bound_contour(sys, &[curve], &opts)?);
        }
        Some(ContourSource::Grid(spec)) => {
            if cfg.epsilons.is_empty() {
                return Ok(None);
            }
            let spec = GridSpec { norm: cfg.norm, ..spec };
            let grid = evaluate_grid(sys, &spec)?;
            let abscissa = AbscissaConfig {
                re: spec.re,
                im: spec.im,
                norm: cfg.norm,
                ..AbscissaConfig::default()
            };
            for &eps in &cfg.epsilons {
                let attempt = extract_level_curves(&grid, eps).and_then(|curves| {
                    let alpha = pseudo_abscissa(sys, eps, &abscissa).ok();
                    upper_bound_contour(sys, &curves, &ContourOptions { alpha, ..opts })
                });
                match attempt {
                    Ok(b) => found.push(b),
                    Err(e) => notes.push(format!("contour at epsilon {}: {e}", fmt17(eps))),
                }
            }
        }
    }
    let key = |b: &ContourBound<T>| (!b.uniform, b.value);
    Ok(found
        .into_iter()
        .min_by(|x, y| key(x).partial_cmp(&key(y)).unwrap_or(std::cmp::Ordering::Equal)))
}

/// Lower bound, the contour bound when configured, and the axis bound when
/// the fitted decay exceeds `|s|^{-1}`, otherwise the semicircle bound.
pub fn compute_report<T: Real, S: IoSystem<T> + ?Sized>(sys: &S, cfg: &ReportConfig<T>) -> Result<BoundReport<T>> {
    let search = SearchConfig {
        norm: cfg.norm,
        ..cfg.search
    };
    let lower = lower_bound(sys, &search)?;
    let mut notes = Vec::new();
    let contour = best_contour(sys, cfg, &mut notes)?;
    let decay = estimate_decay(sys, cfg.norm, None)?;
    let (axis, semicircle) = if decay.beta > T::one() {
        (Some(upper_bound_axis(sys, &decay, cfg.norm, &cfg.quad)?), None)
    } else {
        (None, Some(upper_bound_semicircle(sys, cfg.a, cfg.norm, &cfg.quad)?))
    };
    let report = BoundReport {
        norm: cfg.norm,
        lower,
        contour,
        semicircle,
        decay: Some(decay),
        axis,
        notes,
    };
    report.check()?;
    Ok(report)
}
