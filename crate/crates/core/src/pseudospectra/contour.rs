use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex;

use super::{resolvent_norm_at, ResolventGrid};
use crate::error::{Error, Result};
use crate::linalg::NormKind;
use crate::scalar::Real;
use crate::system::IoSystem;

/// Polyline approximating the boundary `||C (sI - A)^{-1} B|| = 1/epsilon`.
///
/// Closed curves do not repeat their first vertex; the closing segment counts
/// toward the arc length.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelCurve<T> {
    epsilon: T,
    vertices: Vec<Complex<T>>,
    closed: bool,
    arc_length: T,
    max_real: T,
}

impl<T: Real> LevelCurve<T> {
    pub fn new(epsilon: T, vertices: Vec<Complex<T>>, closed: bool) -> Result<Self> {
        if !(epsilon > T::zero()) {
            return Err(Error::InvalidSpec(format!("epsilon must be positive, got {epsilon}")));
        }
        if closed && vertices.len() < 3 {
            return Err(Error::DegenerateCurve);
        }
        let mut arc_length: T = vertices.windows(2).map(|w| (w[1] - w[0]).norm()).sum();
        if closed {
            arc_length += (vertices[0] - vertices[vertices.len() - 1]).norm();
        }
        let max_real = vertices.iter().fold(T::neg_infinity(), |m, z| m.max(z.re));
        Ok(Self {
            epsilon,
            vertices,
            closed,
            arc_length,
            max_real,
        })
    }

    pub fn epsilon(&self) -> T {
        self.epsilon
    }

    pub fn vertices(&self) -> &[Complex<T>] {
        &self.vertices
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn arc_length(&self) -> T {
        self.arc_length
    }

    /// Largest real part over the vertices.
    pub fn max_real(&self) -> T {
        self.max_real
    }

    /// Signed enclosed area (positive for counter-clockwise orientation).
    pub fn signed_area(&self) -> T {
        let n = self.vertices.len();
        let twice: T = (0..n)
            .map(|k| {
                let (p, q) = (self.vertices[k], self.vertices[(k + 1) % n]);
                p.re * q.im - q.re * p.im
            })
            .sum();
        twice / T::of(2.0)
    }

    /// Area centroid for closed curves, vertex mean otherwise.
    pub fn centroid(&self) -> Complex<T> {
        let n = self.vertices.len();
        let mean = self
            .vertices
            .iter()
            .fold(Complex::new(T::zero(), T::zero()), |a, z| a + z)
            / T::of_usize(n.max(1));
        let area = self.signed_area();
        if !self.closed || area.abs() <= T::epsilon() * self.arc_length * self.arc_length {
            return mean;
        }
        let (mut cx, mut cy) = (T::zero(), T::zero());
        for k in 0..n {
            let (p, q) = (self.vertices[k], self.vertices[(k + 1) % n]);
            let cross = p.re * q.im - q.re * p.im;
            cx += (p.re + q.re) * cross;
            cy += (p.im + q.im) * cross;
        }
        let six_a = T::of(6.0) * area;
        Complex::new(cx / six_a, cy / six_a)
    }

    /// Winding-number test for a point strictly inside a closed curve.
    pub fn encloses(&self, z: Complex<T>) -> bool {
        if !self.closed {
            return false;
        }
        let n = self.vertices.len();
        let mut inside = false;
        for k in 0..n {
            let (p, q) = (self.vertices[k], self.vertices[(k + 1) % n]);
            if (p.im > z.im) != (q.im > z.im) {
                let x = p.re + (z.im - p.im) * (q.re - p.re) / (q.im - p.im);
                if z.re < x {
                    inside = !inside;
                }
            }
        }
        inside
    }
}

/// Location of an isoline crossing: the horizontal edge `(i, j)-(i+1, j)` or
/// the vertical edge `(i, j)-(i, j+1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Edge {
    H(usize, usize),
    V(usize, usize),
}

/// Marching-squares isolines of the grid at `||.|| = 1/epsilon`.
///
/// Crossings are placed by linear interpolation of `log10` values. Saddle cells
/// are resolved by the mean of the four corners; cells touching a pole are
/// skipped. Curves that end on the grid border or at a skipped cell are open.
pub fn extract_level_curves<T: Real>(grid: &ResolventGrid<T>, epsilon: T) -> Result<Vec<LevelCurve<T>>> {
    if !(epsilon > T::zero()) || !epsilon.is_finite() {
        return Err(Error::InvalidSpec(format!("epsilon must be positive, got {epsilon}")));
    }
    let level = -epsilon.log10();
    let (n_re, n_im) = grid.spec().resolution;
    let above = |i: usize, j: usize| grid.log10(i, j) > level;
    let crossing = |e: Edge| -> Complex<T> {
        let ((i0, j0), (i1, j1)) = match e {
            Edge::H(i, j) => ((i, j), (i + 1, j)),
            Edge::V(i, j) => ((i, j), (i, j + 1)),
        };
        let (v0, v1) = (grid.log10(i0, j0), grid.log10(i1, j1));
        let t = ((level - v0) / (v1 - v0)).max(T::zero()).min(T::one());
        let (p0, p1) = (grid.spec().point(i0, j0), grid.spec().point(i1, j1));
        p0 + (p1 - p0) * t
    };

    let mut segments: Vec<(Edge, Edge)> = Vec::new();
    for i in 0..n_re - 1 {
        for j in 0..n_im - 1 {
            if grid.is_pole(i, j) || grid.is_pole(i + 1, j) || grid.is_pole(i, j + 1) || grid.is_pole(i + 1, j + 1) {
                continue;
            }
            // corners counter-clockwise from (i, j)
            let c = [above(i, j), above(i + 1, j), above(i + 1, j + 1), above(i, j + 1)];
            let sides = [Edge::H(i, j), Edge::V(i + 1, j), Edge::H(i, j + 1), Edge::V(i, j)];
            let cut: Vec<usize> = (0..4).filter(|&k| c[k] != c[(k + 1) % 4]).collect();
            match cut.len() {
                0 => {}
                2 => segments.push((sides[cut[0]], sides[cut[1]])),
                4 => {
                    let center =
                        (grid.log10(i, j) + grid.log10(i + 1, j) + grid.log10(i + 1, j + 1) + grid.log10(i, j + 1))
                            / T::of(4.0);
                    // Joined corners: the high pair when the center is high, else the low pair.
                    let join_high = center > level;
                    if c[0] == join_high {
                        // corners 0 and 2 are joined; cut around corners 1 and 3
                        segments.push((sides[0], sides[1]));
                        segments.push((sides[2], sides[3]));
                    } else {
                        segments.push((sides[3], sides[0]));
                        segments.push((sides[1], sides[2]));
                    }
                }
                _ => unreachable!("a square has an even number of sign changes"),
            }
        }
    }
    if segments.is_empty() {
        return Err(Error::EmptyLevel);
    }

    let mut incident: BTreeMap<Edge, Vec<usize>> = BTreeMap::new();
    for (k, (a, b)) in segments.iter().enumerate() {
        incident.entry(*a).or_default().push(k);
        incident.entry(*b).or_default().push(k);
    }
    let mut used = vec![false; segments.len()];
    let mut chains: Vec<(Vec<Edge>, bool)> = Vec::new();
    let ends: Vec<Edge> = incident
        .iter()
        .filter(|(_, segs)| segs.len() == 1)
        .map(|(e, _)| *e)
        .collect();
    let walk = |start: Edge, first: usize, used: &mut Vec<bool>| -> Vec<Edge> {
        let mut chain = vec![start];
        let mut at = start;
        let mut seg = Some(first);
        while let Some(k) = seg {
            used[k] = true;
            let (a, b) = segments[k];
            let next = if a == at { b } else { a };
            chain.push(next);
            at = next;
            seg = incident[&at].iter().copied().find(|&s| !used[s]);
        }
        chain
    };
    for e in ends {
        let k = incident[&e][0];
        if !used[k] {
            chains.push((walk(e, k, &mut used), false));
        }
    }
    for k in 0..segments.len() {
        if !used[k] {
            let mut chain = walk(segments[k].0, k, &mut used);
            let closed = chain.first() == chain.last();
            if closed {
                chain.pop();
            }
            chains.push((chain, closed));
        }
    }

    let mut curves = Vec::with_capacity(chains.len());
    for (chain, closed) in chains {
        let mut vertices: Vec<Complex<T>> = chain.into_iter().map(crossing).collect();
        vertices.dedup();
        if closed && vertices.len() > 1 && vertices.first() == vertices.last() {
            vertices.pop();
        }
        let closed = closed && vertices.len() >= 3;
        curves.push(LevelCurve::new(epsilon, vertices, closed)?);
    }
    Ok(curves)
}

/// Convex hull (Andrew's monotone chain), counter-clockwise.
pub fn convex_hull<T: Real>(curve: &LevelCurve<T>) -> Result<LevelCurve<T>> {
    hull_points(curve.epsilon, curve.vertices.iter().copied())
}

/// Single convex hull of the vertices of every curve.
pub fn hull_of_curves<T: Real>(curves: &[LevelCurve<T>]) -> Result<LevelCurve<T>> {
    let epsilon = curves.first().ok_or(Error::DegenerateCurve)?.epsilon;
    hull_points(epsilon, curves.iter().flat_map(|c| c.vertices.iter().copied()))
}

fn hull_points<T: Real>(epsilon: T, pts: impl Iterator<Item = Complex<T>>) -> Result<LevelCurve<T>> {
    let mut pts: Vec<Complex<T>> = pts.collect();
    pts.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .expect("finite")
            .then(a.im.partial_cmp(&b.im).expect("finite"))
    });
    pts.dedup();
    if pts.len() < 3 {
        return Err(Error::DegenerateCurve);
    }
    let cross =
        |o: Complex<T>, a: Complex<T>, b: Complex<T>| (a.re - o.re) * (b.im - o.im) - (a.im - o.im) * (b.re - o.re);
    let mut lower: Vec<Complex<T>> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= T::zero() {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Complex<T>> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= T::zero() {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.len() < 3 {
        return Err(Error::DegenerateCurve);
    }
    LevelCurve::new(epsilon, lower, true)
}

/// Circle `|s - center| = radius` sampled at `samples` points, tagged with
/// `epsilon = 1 / max` of the sampled resolvent norms, so the norm stays at or
/// below `1/epsilon` on the polyline vertices.
pub fn circle_contour<T: Real, S: IoSystem<T> + ?Sized>(
    sys: &S,
    center: Complex<T>,
    radius: T,
    samples: usize,
    norm: NormKind,
) -> Result<LevelCurve<T>> {
    if !(radius > T::zero()) || samples < 3 {
        return Err(Error::InvalidSpec(
            "circle needs a positive radius and 3 samples".into(),
        ));
    }
    let vertices: Vec<Complex<T>> = (0..samples)
        .map(|k| {
            let theta = T::TAU() * T::of_usize(k) / T::of_usize(samples);
            center + Complex::new(theta.cos(), theta.sin()) * radius
        })
        .collect();
    let peak = vertices
        .iter()
        .map(|&z| resolvent_norm_at(sys, z, norm))
        .fold(T::zero(), T::max);
    if !peak.is_finite() {
        return Err(Error::NotEnclosing {
            re: center.re.as_f64(),
            im: center.im.as_f64(),
        });
    }
    if peak.is_zero() {
        return Err(Error::EmptyLevel);
    }
    LevelCurve::new(T::one() / peak, vertices, true)
}

/// Points of `pts` that lie outside every closed curve.
pub(crate) fn outside_all<T: Real>(curves: &[LevelCurve<T>], pts: &[Complex<T>]) -> Vec<Complex<T>> {
    let closed: BTreeSet<usize> = (0..curves.len()).filter(|&k| curves[k].closed).collect();
    pts.iter()
        .copied()
        .filter(|&z| !closed.iter().any(|&k| curves[k].encloses(z)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pseudospectra::{evaluate_grid, GridSpec};
    use crate::system::StateSpace;

    fn example1() -> StateSpace<f64> {
        StateSpace::from_real(2, 1, 1, &[0., 1., -1., -2.], &[0., 1.], &[1., 0.]).unwrap()
    }

    fn circle(n: usize, r: f64) -> LevelCurve<f64> {
        let v = (0..n)
            .map(|k| {
                let t = std::f64::consts::TAU * k as f64 / n as f64;
                Complex::new(r * t.cos() - 1.0, r * t.sin())
            })
            .collect();
        LevelCurve::new(1.0, v, true).unwrap()
    }

    #[test]
    fn unit_circle_level() {
        let spec = GridSpec::new((-2.5, 0.5), (-1.5, 1.5), (400, 400), NormKind::P2).unwrap();
        let g = evaluate_grid(&example1(), &spec).unwrap();
        let curves = extract_level_curves(&g, 1.0).unwrap();
        assert_eq!(curves.len(), 1);
        let c = &curves[0];
        assert!(c.is_closed());
        assert!((c.arc_length() - std::f64::consts::TAU).abs() < 0.01 * std::f64::consts::TAU);
        assert!((c.centroid() - Complex::new(-1.0, 0.0)).norm() < 1e-3);
        assert!(c.encloses(Complex::new(-1.0, 0.0)));
    }

    #[test]
    fn constant_grid_is_empty() {
        let spec = GridSpec::new((0.0, 1.0), (0.0, 1.0), (5, 5), NormKind::P2).unwrap();
        let g = ResolventGrid::from_log10(spec, vec![0.5; 25]).unwrap();
        assert_eq!(extract_level_curves(&g, 1.0), Err(Error::EmptyLevel));
    }

    #[test]
    fn curve_crossing_border_is_open() {
        let spec = GridSpec::new((-1.5, 0.5), (0.0, 1.5), (100, 100), NormKind::P2).unwrap();
        let g = evaluate_grid(&example1(), &spec).unwrap();
        let curves = extract_level_curves(&g, 1.0).unwrap();
        assert!(curves.iter().all(|c| !c.is_closed()));
    }

    #[test]
    fn saddle_uses_center_rule() {
        // high corners at (0,0) and (1,1)
        let spec = GridSpec::new((0.0, 1.0), (0.0, 1.0), (2, 2), NormKind::P2).unwrap();
        let high = ResolventGrid::from_log10(spec, vec![2.0, -1.5, -1.5, 2.0]).unwrap();
        let low = ResolventGrid::from_log10(spec, vec![1.0, -2.0, -2.0, 1.0]).unwrap();
        let a = extract_level_curves(&high, 1.0).unwrap();
        let b = extract_level_curves(&low, 1.0).unwrap();
        assert_eq!(a.len(), 2);
        assert_eq!(b.len(), 2);
        // center above: the high diagonal is connected, so the cuts isolate the low corners
        let near = |cs: &[LevelCurve<f64>], z: Complex<f64>| {
            cs.iter().any(|c| c.vertices().iter().all(|v| (v - z).norm() < 0.71))
        };
        assert!(near(&a, Complex::new(1.0, 0.0)) && near(&a, Complex::new(0.0, 1.0)));
        assert!(near(&b, Complex::new(0.0, 0.0)) && near(&b, Complex::new(1.0, 1.0)));
    }

    #[test]
    fn hull_of_circle_is_itself() {
        let c = circle(64, 1.0);
        let h = convex_hull(&c).unwrap();
        assert_eq!(h.vertices().len(), 64);
        assert!((h.arc_length() - c.arc_length()).abs() < 1e-12);
    }

    #[test]
    fn hull_of_star_is_shorter() {
        let v: Vec<Complex<f64>> = (0..10)
            .map(|k| {
                let t = std::f64::consts::TAU * k as f64 / 10.0;
                let r = if k % 2 == 0 { 1.0 } else { 0.4 };
                Complex::new(r * t.cos(), r * t.sin())
            })
            .collect();
        let star = LevelCurve::new(1.0, v, true).unwrap();
        let h = convex_hull(&star).unwrap();
        assert!(h.arc_length() < star.arc_length());
        assert_eq!(h.vertices().len(), 5);
    }

    #[test]
    fn degenerate_hulls() {
        let two = LevelCurve::new(1.0, vec![Complex::new(0.0, 0.0), Complex::new(1.0, 0.0)], false).unwrap();
        assert_eq!(convex_hull(&two), Err(Error::DegenerateCurve));
        let line = LevelCurve::new(
            1.0,
            (0..5).map(|k| Complex::new(k as f64, 2.0 * k as f64)).collect(),
            false,
        )
        .unwrap();
        assert_eq!(convex_hull(&line), Err(Error::DegenerateCurve));
    }

    #[test]
    fn circle_contour_on_example_two() {
        let sys = StateSpace::from_real(2, 1, 1, &[0., 1., -1., -2.], &[1., 0.], &[1., 0.]).unwrap();
        let c: LevelCurve<f64> = circle_contour(&sys, Complex::new(-1.0, 0.0), 1.0, 4096, NormKind::P2).unwrap();
        assert!((c.epsilon() - 0.5).abs() < 1e-12);
        assert!(c.max_real().abs() < 1e-12);
    }
}
