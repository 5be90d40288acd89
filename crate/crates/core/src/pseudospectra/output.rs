use std::io::{self, Write};

use num_complex::Complex;

use super::{LevelCurve, ResolventGrid};
use crate::scalar::{fmt17, Real};

/// `re,im,value_log10`, real index outer; poles print as `inf`.
pub fn write_grid_csv<T: Real, W: Write>(grid: &ResolventGrid<T>, out: &mut W) -> io::Result<()> {
    writeln!(out, "re,im,value_log10")?;
    let spec = grid.spec();
    for i in 0..spec.resolution.0 {
        for j in 0..spec.resolution.1 {
            let v = if grid.is_pole(i, j) {
                T::infinity()
            } else {
                grid.log10(i, j)
            };
            writeln!(out, "{},{},{}", fmt17(spec.re_at(i)), fmt17(spec.im_at(j)), fmt17(v))?;
        }
    }
    Ok(())
}

/// `epsilon,curve_id,vertex_index,re,im`.
pub fn write_curves_csv<T: Real, W: Write>(curves: &[LevelCurve<T>], out: &mut W) -> io::Result<()> {
    writeln!(out, "epsilon,curve_id,vertex_index,re,im")?;
    for (id, c) in curves.iter().enumerate() {
        for (k, z) in c.vertices().iter().enumerate() {
            writeln!(out, "{},{id},{k},{},{}", fmt17(c.epsilon()), fmt17(z.re), fmt17(z.im))?;
        }
    }
    Ok(())
}

/// Level curves as polylines and eigenvalues as dots over the window
/// `[re0, re1] x [im0, im1]`.
pub fn write_svg<T: Real, W: Write>(
    curves: &[LevelCurve<T>],
    eigenvalues: &[Complex<T>],
    window: ((T, T), (T, T)),
    out: &mut W,
) -> io::Result<()> {
    let ((x0, x1), (y0, y1)) = window;
    let (x0, x1, y0, y1) = (x0.as_f64(), x1.as_f64(), y0.as_f64(), y1.as_f64());
    let width = 600.0;
    let height = width * (y1 - y0) / (x1 - x0);
    let px = |z: Complex<T>| {
        (
            (z.re.as_f64() - x0) / (x1 - x0) * width,
            (y1 - z.im.as_f64()) / (y1 - y0) * height,
        )
    };
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.3} {height:.3}">"#
    )?;
    writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#)?;
    let mut eps: Vec<f64> = curves.iter().map(|c| c.epsilon().as_f64()).collect();
    eps.sort_by(f64::total_cmp);
    eps.dedup();
    for c in curves {
        let rank = eps.iter().position(|e| *e == c.epsilon().as_f64()).unwrap_or(0);
        let shade = if eps.len() > 1 { 200 * rank / (eps.len() - 1) } else { 0 };
        let pts: Vec<String> = c
            .vertices()
            .iter()
            .map(|&z| {
                let (x, y) = px(z);
                format!("{x:.3},{y:.3}")
            })
            .collect();
        let tag = if c.is_closed() { "polygon" } else { "polyline" };
        writeln!(
            out,
            r#"<{tag} points="{}" fill="none" stroke="rgb({shade},{shade},255)" stroke-width="1"/>"#,
            pts.join(" ")
        )?;
    }
    for &z in eigenvalues {
        let (x, y) = px(z);
        writeln!(out, r#"<circle cx="{x:.3}" cy="{y:.3}" r="2.5" fill="black"/>"#)?;
    }
    writeln!(out, "</svg>")
}
