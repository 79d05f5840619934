//! Geometric quantities of the computational domain: boundary distance,
//! directional exit distance, harmonic mean distance, boundary-layer volumes
//! and interior Minkowski-dimension fits.
//!
//! Domains are either an open interval (0, a) or an open simple polygon with
//! counterclockwise vertices. Discs, sectors and other smooth shapes are
//! represented by fine polygonal approximations.

pub mod polygon;

use crate::error::{Error, Result};
use polygon::{
    is_simple, line_segment_hits, point_in_polygon, polygon_distance, signed_area2, Point,
};
use rayon::prelude::*;

/// Default number of quadrature directions for the mean distance.
pub const DEFAULT_N_DIRS: usize = 360;

#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    /// The open interval (0, length).
    Interval { length: f64 },
    /// An open simple polygon, vertices in counterclockwise order.
    Polygon { vertices: Vec<Point> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    label: String,
    shape: Shape,
}

/// Directional and harmonic-mean distances at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanDistanceResult {
    pub point: Point,
    /// Distance to the boundary.
    pub d: f64,
    /// Harmonic mean distance; always ≥ `d`.
    pub m: f64,
    pub n_dirs: usize,
}

/// Result of a boundary-layer power-law fit.
#[derive(Debug, Clone)]
pub struct MinkowskiFit {
    /// Interior Minkowski dimension estimate of the boundary.
    pub alpha: f64,
    pub k1: f64,
    pub k2: f64,
    /// (eps, layer volume) samples that entered the fit.
    pub volumes: Vec<(f64, f64)>,
}

impl Domain {
    pub fn interval(length: f64) -> Result<Domain> {
        if !(length > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "interval length must be positive, got {length}"
            )));
        }
        Ok(Domain {
            label: format!("interval({length})"),
            shape: Shape::Interval { length },
        })
    }

    pub fn polygon(label: impl Into<String>, vertices: Vec<Point>) -> Result<Domain> {
        if vertices.len() < 3 {
            return Err(Error::InvalidArgument(
                "polygon needs at least 3 vertices".into(),
            ));
        }
        if signed_area2(&vertices) <= 0.0 {
            return Err(Error::InvalidArgument(
                "polygon vertices must be counterclockwise with positive area".into(),
            ));
        }
        if !is_simple(&vertices) {
            return Err(Error::InvalidArgument("polygon is self-intersecting".into()));
        }
        Ok(Domain {
            label: label.into(),
            shape: Shape::Polygon { vertices },
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    /// Space dimension: 1 for intervals, 2 for polygons.
    pub fn dim(&self) -> usize {
        match self.shape {
            Shape::Interval { .. } => 1,
            Shape::Polygon { .. } => 2,
        }
    }

    /// Lebesgue measure (length or area).
    pub fn volume(&self) -> f64 {
        match &self.shape {
            Shape::Interval { length } => *length,
            Shape::Polygon { vertices } => 0.5 * signed_area2(vertices),
        }
    }

    /// Axis-aligned bounding box `[xmin, ymin, xmax, ymax]` (1D uses y = 0).
    pub fn bounding_box(&self) -> [f64; 4] {
        match &self.shape {
            Shape::Interval { length } => [0.0, 0.0, *length, 0.0],
            Shape::Polygon { vertices } => {
                let mut bb = [f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY];
                for v in vertices {
                    bb[0] = bb[0].min(v[0]);
                    bb[1] = bb[1].min(v[1]);
                    bb[2] = bb[2].max(v[0]);
                    bb[3] = bb[3].max(v[1]);
                }
                bb
            }
        }
    }

    pub fn diameter(&self) -> f64 {
        let bb = self.bounding_box();
        ((bb[2] - bb[0]).powi(2) + (bb[3] - bb[1]).powi(2)).sqrt()
    }

    fn boundary_tolerance(&self) -> f64 {
        1e-9 * self.diameter().max(1.0)
    }

    /// Unsigned distance to the boundary, defined for any point.
    pub fn boundary_distance(&self, p: Point) -> f64 {
        match &self.shape {
            Shape::Interval { length } => p[0].abs().min((length - p[0]).abs()),
            Shape::Polygon { vertices } => polygon_distance(p, vertices),
        }
    }

    /// Membership in the open domain. Boundary points are not interior.
    pub fn is_interior(&self, p: Point) -> bool {
        match &self.shape {
            Shape::Interval { length } => {
                p[1] == 0.0
                    && p[0] > self.boundary_tolerance()
                    && p[0] < length - self.boundary_tolerance()
            }
            Shape::Polygon { vertices } => {
                point_in_polygon(p, vertices) && polygon_distance(p, vertices) > self.boundary_tolerance()
            }
        }
    }

    fn require_interior(&self, p: Point) -> Result<()> {
        if self.is_interior(p) {
            Ok(())
        } else {
            Err(Error::DomainMembership(p[0], p[1]))
        }
    }
}

/// Distance from an interior point to the boundary.
pub fn distance_to_boundary(domain: &Domain, p: Point) -> Result<f64> {
    domain.require_interior(p)?;
    Ok(domain.boundary_distance(p))
}

/// Exit distance along the line through `p` with direction `u`: the smallest
/// |t| (both signs) with `p + t u` outside the domain.
pub fn directional_distance(domain: &Domain, p: Point, u: Point) -> Result<f64> {
    domain.require_interior(p)?;
    let norm = (u[0] * u[0] + u[1] * u[1]).sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "direction must be a unit vector, |u| = {norm}"
        )));
    }
    match &domain.shape {
        Shape::Interval { length } => {
            if u[1].abs() > 1e-12 {
                return Err(Error::InvalidArgument(
                    "interval directions must be [±1, 0]".into(),
                ));
            }
            Ok(p[0].min(length - p[0]))
        }
        Shape::Polygon { vertices } => Ok(line_exit_distance(p, u, vertices)),
    }
}

fn line_exit_distance(p: Point, u: Point, vertices: &[Point]) -> f64 {
    let n = vertices.len();
    let mut hits = Vec::new();
    for i in 0..n {
        line_segment_hits(p, u, vertices[i], vertices[(i + 1) % n], &mut hits);
    }
    let mut best = f64::INFINITY;
    for t in hits {
        let at = t.abs();
        if at > 1e-14 && at < best {
            best = at;
        }
    }
    best
}

/// Harmonic mean distance (Eq.-(2)-style inverse-square average of the
/// directional exit distances).
///
/// In 1D the sphere S⁰ has two directions and the average uses the one-sided
/// exit distances, `m(x)⁻² = (x⁻² + (a−x)⁻²)/2`. In 2D the quadrature runs
/// over `n_dirs` uniform angles; directions come in ± pairs, and each line
/// contributes the two-sided exit distance.
pub fn mean_distance(domain: &Domain, p: Point, n_dirs: usize) -> Result<MeanDistanceResult> {
    domain.require_interior(p)?;
    let d = domain.boundary_distance(p);
    match &domain.shape {
        Shape::Interval { length } => {
            let x = p[0];
            let inv2 = 0.5 * (x.powi(-2) + (length - x).powi(-2));
            Ok(MeanDistanceResult {
                point: p,
                d,
                m: inv2.powf(-0.5),
                n_dirs: 2,
            })
        }
        Shape::Polygon { vertices } => {
            if n_dirs < 4 || n_dirs % 2 != 0 {
                return Err(Error::InvalidArgument(format!(
                    "n_dirs must be even and ≥ 4, got {n_dirs}"
                )));
            }
            // u and −u share one line; each line is scanned once.
            let half = n_dirs / 2;
            let mut acc = 0.0;
            for k in 0..half {
                let theta = 2.0 * std::f64::consts::PI * (k as f64) / (n_dirs as f64);
                let u = [theta.cos(), theta.sin()];
                let du = line_exit_distance(p, u, vertices);
                acc += 2.0 * du.powi(-2);
            }
            let inv2 = acc / (n_dirs as f64);
            Ok(MeanDistanceResult {
                point: p,
                d,
                m: inv2.powf(-0.5),
                n_dirs,
            })
        }
    }
}

/// Interior lattice points `k·h` of the domain, in row-major order.
pub(crate) fn lattice_interior(domain: &Domain, h: f64) -> Vec<[i64; 2]> {
    let bb = domain.bounding_box();
    match domain.shape {
        Shape::Interval { .. } => {
            let i1 = (bb[2] / h).ceil() as i64 + 1;
            (0..=i1)
                .filter(|&i| domain.is_interior([i as f64 * h, 0.0]))
                .map(|i| [i, 0])
                .collect()
        }
        Shape::Polygon { .. } => {
            let i0 = (bb[0] / h).floor() as i64 - 1;
            let i1 = (bb[2] / h).ceil() as i64 + 1;
            let j0 = (bb[1] / h).floor() as i64 - 1;
            let j1 = (bb[3] / h).ceil() as i64 + 1;
            let rows: Vec<Vec<[i64; 2]>> = (j0..=j1)
                .into_par_iter()
                .map(|j| {
                    (i0..=i1)
                        .filter(|&i| domain.is_interior([i as f64 * h, j as f64 * h]))
                        .map(|i| [i, j])
                        .collect()
                })
                .collect();
            rows.into_iter().flatten().collect()
        }
    }
}

/// Supremum of the mean distance over the grid of spacing `grid_h`
/// (the quasi-inradius μ).
pub fn quasi_inradius(domain: &Domain, grid_h: f64, n_dirs: usize) -> Result<f64> {
    scan_mean_distance(domain, grid_h, n_dirs, |r| r.m)
}

/// Supremum of m(x)/d(x) over the grid; always ≥ 1.
pub fn mean_to_boundary_ratio(domain: &Domain, grid_h: f64, n_dirs: usize) -> Result<f64> {
    scan_mean_distance(domain, grid_h, n_dirs, |r| r.m / r.d)
}

fn scan_mean_distance(
    domain: &Domain,
    grid_h: f64,
    n_dirs: usize,
    value: impl Fn(&MeanDistanceResult) -> f64 + Sync,
) -> Result<f64> {
    if !(grid_h > 0.0) {
        return Err(Error::InvalidArgument("grid_h must be positive".into()));
    }
    let nodes = lattice_interior(domain, grid_h);
    if nodes.is_empty() {
        return Err(Error::Resolution(format!(
            "no interior lattice points at h = {grid_h}"
        )));
    }
    let vals: Vec<f64> = nodes
        .par_iter()
        .map(|&[i, j]| {
            let p = [i as f64 * grid_h, j as f64 * grid_h];
            value(&mean_distance(domain, p, n_dirs).expect("lattice point is interior"))
        })
        .collect();
    // deterministic sequential reduction
    Ok(vals.into_iter().fold(f64::NEG_INFINITY, f64::max))
}

/// Midpoint-rule measure of the boundary layer {x ∈ U : d(x) < eps}.
pub fn boundary_layer_volume(domain: &Domain, eps: f64, quad_h: f64) -> Result<f64> {
    if !(eps > 0.0) || !(quad_h > 0.0) {
        return Err(Error::InvalidArgument(
            "eps and quad_h must be positive".into(),
        ));
    }
    let bb = domain.bounding_box();
    match domain.shape {
        Shape::Interval { .. } => {
            let n = ((bb[2] - bb[0]) / quad_h).ceil() as i64 + 1;
            let count = (0..n)
                .filter(|&i| {
                    let x = (i as f64 + 0.5) * quad_h;
                    let p = [x, 0.0];
                    domain.is_interior(p) && domain.boundary_distance(p) < eps
                })
                .count();
            Ok(count as f64 * quad_h)
        }
        Shape::Polygon { .. } => {
            let i0 = (bb[0] / quad_h).floor() as i64 - 1;
            let i1 = (bb[2] / quad_h).ceil() as i64 + 1;
            let j0 = (bb[1] / quad_h).floor() as i64 - 1;
            let j1 = (bb[3] / quad_h).ceil() as i64 + 1;
            let counts: Vec<usize> = (j0..=j1)
                .into_par_iter()
                .map(|j| {
                    (i0..=i1)
                        .filter(|&i| {
                            let p = [(i as f64 + 0.5) * quad_h, (j as f64 + 0.5) * quad_h];
                            domain.is_interior(p) && domain.boundary_distance(p) < eps
                        })
                        .count()
                })
                .collect();
            Ok(counts.into_iter().sum::<usize>() as f64 * quad_h * quad_h)
        }
    }
}

/// Fits `volume ≈ k·eps^(N−α)` over the series and returns the dimension
/// estimate α with the enclosing constants.
pub fn minkowski_fit(domain: &Domain, eps_series: &[f64], quad_h: f64) -> Result<MinkowskiFit> {
    if eps_series.len() < 4 {
        return Err(Error::InvalidArgument(
            "eps_series needs at least 4 values".into(),
        ));
    }
    for w in eps_series.windows(2) {
        if w[1] >= w[0] {
            return Err(Error::InvalidArgument("eps_series must decrease".into()));
        }
    }
    if eps_series.last().copied().unwrap_or(0.0) <= quad_h {
        return Err(Error::InvalidArgument(
            "all eps values must exceed quad_h".into(),
        ));
    }
    let mut volumes = Vec::with_capacity(eps_series.len());
    for &eps in eps_series {
        let v = boundary_layer_volume(domain, eps, quad_h)?;
        if !(v > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "layer volume vanished at eps = {eps}"
            )));
        }
        volumes.push((eps, v));
    }
    let xs: Vec<f64> = volumes.iter().map(|(e, _)| e.ln()).collect();
    let ys: Vec<f64> = volumes.iter().map(|(_, v)| v.ln()).collect();
    let (slope, _) = crate::fit::linear_fit(&xs, &ys)?;
    let n = domain.dim() as f64;
    let alpha = n - slope;
    let mut k1 = f64::INFINITY;
    let mut k2 = f64::NEG_INFINITY;
    for &(eps, v) in &volumes {
        let k = v / eps.powf(n - alpha);
        k1 = k1.min(k);
        k2 = k2.max(k);
    }
    Ok(MinkowskiFit { alpha, k1, k2, volumes })
}

// ---- built-in domains ----

pub fn unit_interval() -> Domain {
    let mut d = Domain::interval(1.0).unwrap();
    d.label = "unit_interval".into();
    d
}

pub fn unit_square() -> Domain {
    let mut d = rectangle(1.0, 1.0).unwrap();
    d.label = "unit_square".into();
    d
}

pub fn rectangle(a: f64, b: f64) -> Result<Domain> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::InvalidArgument("rectangle sides must be positive".into()));
    }
    Domain::polygon(
        format!("rectangle({a},{b})"),
        vec![[0.0, 0.0], [a, 0.0], [a, b], [0.0, b]],
    )
}

/// Regular k-gon with circumradius 1 centred at the origin.
pub fn regular_polygon(k: usize) -> Result<Domain> {
    if k < 3 {
        return Err(Error::InvalidArgument("regular polygon needs k ≥ 3".into()));
    }
    let verts = (0..k)
        .map(|i| {
            let t = 2.0 * std::f64::consts::PI * (i as f64) / (k as f64);
            [t.cos(), t.sin()]
        })
        .collect();
    Domain::polygon(format!("regular_polygon({k})"), verts)
}

/// Polygonal approximation of the unit disc.
pub fn disc(k_vertices: usize) -> Result<Domain> {
    let mut d = regular_polygon(k_vertices)?;
    d.label = format!("disc({k_vertices})");
    Ok(d)
}

/// Unit square with the upper-right quadrant removed.
pub fn l_shape() -> Domain {
    Domain::polygon(
        "l_shape",
        vec![
            [0.0, 0.0],
            [1.0, 0.0],
            [1.0, 0.5],
            [0.5, 0.5],
            [0.5, 1.0],
            [0.0, 1.0],
        ],
    )
    .unwrap()
}

/// Circular sector {r e^{iθ} : 0 < r < 1, 0 < θ < beta} with the arc replaced
/// by chords of length at most `max_chord`. The corner at the origin is exact.
pub fn sector(beta: f64, max_chord: f64) -> Result<Domain> {
    if !(beta > 0.0 && beta <= 2.0 * std::f64::consts::PI - 0.01) {
        return Err(Error::InvalidArgument(format!(
            "sector angle must lie in (0, 2π − 0.01], got {beta}"
        )));
    }
    if !(max_chord > 0.0) {
        return Err(Error::InvalidArgument("max_chord must be positive".into()));
    }
    let n_arc = ((beta / max_chord).ceil() as usize).max(8);
    let mut verts = Vec::with_capacity(n_arc + 2);
    verts.push([0.0, 0.0]);
    for k in 0..=n_arc {
        let t = beta * (k as f64) / (n_arc as f64);
        verts.push([t.cos(), t.sin()]);
    }
    let mut d = Domain::polygon(format!("sector({beta})"), verts)?;
    d.label = format!("sector({beta})");
    Ok(d)
}

/// Koch-snowflake prefractal of the given level built on an equilateral
/// triangle of unit side; level 0 is the triangle itself.
pub fn koch(level: usize) -> Result<Domain> {
    if level > 7 {
        return Err(Error::InvalidArgument(
            "koch level above 7 is not supported".into(),
        ));
    }
    let s3 = 3.0f64.sqrt();
    let mut pts: Vec<Point> = vec![[0.0, 0.0], [1.0, 0.0], [0.5, 0.5 * s3]];
    for _ in 0..level {
        let mut out = Vec::with_capacity(pts.len() * 4);
        let n = pts.len();
        for i in 0..n {
            let a = pts[i];
            let b = pts[(i + 1) % n];
            let v = [b[0] - a[0], b[1] - a[1]];
            // outward bump: normal to the right of travel for a CCW polygon
            let peak = [
                a[0] + 0.5 * v[0] + v[1] * s3 / 6.0,
                a[1] + 0.5 * v[1] - v[0] * s3 / 6.0,
            ];
            out.push(a);
            out.push([a[0] + v[0] / 3.0, a[1] + v[1] / 3.0]);
            out.push(peak);
            out.push([a[0] + 2.0 * v[0] / 3.0, a[1] + 2.0 * v[1] / 3.0]);
        }
        pts = out;
    }
    Domain::polygon(format!("koch({level})"), pts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};

    #[test]
    fn distance_examples() {
        let sq = unit_square();
        assert_relative_eq!(distance_to_boundary(&sq, [0.5, 0.5]).unwrap(), 0.5);
        assert_relative_eq!(distance_to_boundary(&sq, [0.1, 0.3]).unwrap(), 0.1);
        let iv = unit_interval();
        assert_relative_eq!(distance_to_boundary(&iv, [0.75, 0.0]).unwrap(), 0.25);
    }

    #[test]
    fn distance_rejects_exterior_and_boundary() {
        let sq = unit_square();
        assert!(distance_to_boundary(&sq, [1.5, 0.5]).is_err());
        assert!(distance_to_boundary(&sq, [0.0, 0.5]).is_err());
        assert!(distance_to_boundary(&sq, [1.0, 1.0]).is_err());
    }

    #[test]
    fn directional_distance_examples() {
        let sq = unit_square();
        assert_relative_eq!(
            directional_distance(&sq, [0.5, 0.5], [1.0, 0.0]).unwrap(),
            0.5,
            epsilon = 1e-12
        );
        let r = 0.5f64.sqrt();
        assert_relative_eq!(
            directional_distance(&sq, [0.5, 0.5], [r, r]).unwrap(),
            std::f64::consts::SQRT_2 / 2.0,
            epsilon = 1e-9
        );
        // two-sided minimum: 0.1 to the left, 0.9 to the right
        assert_relative_eq!(
            directional_distance(&sq, [0.1, 0.5], [-1.0, 0.0]).unwrap(),
            0.1,
            epsilon = 1e-12
        );
    }

    #[test]
    fn directional_distance_rejects_nonunit() {
        let sq = unit_square();
        assert!(directional_distance(&sq, [0.5, 0.5], [1.0, 1.0]).is_err());
    }

    #[test]
    fn mean_distance_disc_center() {
        let dc = disc(256).unwrap();
        let r = mean_distance(&dc, [0.0, 0.0], 360).unwrap();
        assert_relative_eq!(r.m, 1.0, epsilon = 2e-3); // polygonal error only
        assert!(r.d <= r.m);
    }

    #[test]
    fn mean_distance_half_plane_profile() {
        // tall box stands in for the half-plane near its bottom edge
        let tall = rectangle(400.0, 200.0).unwrap();
        let r = mean_distance(&tall, [200.0, 1.0], 720).unwrap();
        assert_relative_eq!(r.m, std::f64::consts::SQRT_2, epsilon = 2e-3);
    }

    #[test]
    fn mean_distance_square_center() {
        // closed form: m⁻² = 4(1/2 + 1/π)
        let sq = unit_square();
        let r = mean_distance(&sq, [0.5, 0.5], 360).unwrap();
        let exact = (2.0 + 4.0 / std::f64::consts::PI).powf(-0.5);
        assert_relative_eq!(r.m, exact, epsilon = 1e-4);
        assert_relative_eq!(r.m, 0.5528, epsilon = 1e-4);
    }

    #[test]
    fn mean_distance_1d_closed_form() {
        let iv = unit_interval();
        let r = mean_distance(&iv, [0.25, 0.0], 2).unwrap();
        let exact = (0.5 * (0.25f64.powi(-2) + 0.75f64.powi(-2))).powf(-0.5);
        assert_relative_eq!(r.m, exact, epsilon = 1e-14);
        assert!(r.d <= r.m);
    }

    #[test]
    fn quasi_inradius_examples() {
        let sq = unit_square();
        let mu = quasi_inradius(&sq, 1.0 / 16.0, 128).unwrap();
        assert_relative_eq!(mu, 0.5528, epsilon = 2e-3);

        let dc = disc(256).unwrap();
        let mu = quasi_inradius(&dc, 0.125, 128).unwrap();
        assert_relative_eq!(mu, 1.0, epsilon = 5e-3);

        // 1D closed form maximised at the midpoint: μ = a/2
        let iv = unit_interval();
        let mu = quasi_inradius(&iv, 1.0 / 64.0, 2).unwrap();
        assert_relative_eq!(mu, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn ratio_is_at_least_one_and_center_value() {
        let sq = unit_square();
        let ratio = mean_to_boundary_ratio(&sq, 1.0 / 32.0, 128).unwrap();
        assert!(ratio >= 1.1054, "ratio {ratio}");
        let dc = disc(128).unwrap();
        let ratio = mean_to_boundary_ratio(&dc, 0.25, 64).unwrap();
        assert!(ratio >= 1.0);
    }

    #[test]
    fn layer_volume_examples() {
        let sq = unit_square();
        let v = boundary_layer_volume(&sq, 0.1, 0.01).unwrap();
        assert_relative_eq!(v, 0.36, epsilon = 1e-6);
        let v = boundary_layer_volume(&sq, 0.5, 0.01).unwrap();
        assert_relative_eq!(v, 1.0, epsilon = 1e-6);
        let iv = unit_interval();
        let v = boundary_layer_volume(&iv, 0.2, 0.01).unwrap();
        assert_relative_eq!(v, 0.4, epsilon = 1e-6);
    }

    #[test]
    fn layer_volume_monotone_in_eps() {
        let dom = l_shape();
        let mut prev = 0.0;
        for k in 1..8 {
            let v = boundary_layer_volume(&dom, 0.05 * k as f64, 0.005).unwrap();
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn minkowski_square_and_interval() {
        let sq = unit_square();
        let eps: Vec<f64> = vec![0.05, 0.025, 0.0125, 0.00625];
        let fit = minkowski_fit(&sq, &eps, 0.000625).unwrap();
        assert!((fit.alpha - 1.0).abs() < 0.05, "alpha = {}", fit.alpha);
        assert!(fit.k1 <= fit.k2);

        let iv = unit_interval();
        let fit = minkowski_fit(&iv, &eps, 0.000625).unwrap();
        assert!(fit.alpha.abs() < 0.05, "alpha = {}", fit.alpha);
    }

    #[test]
    fn minkowski_rejects_bad_series() {
        let sq = unit_square();
        assert!(minkowski_fit(&sq, &[0.1, 0.2, 0.05, 0.02], 0.001).is_err());
        assert!(minkowski_fit(&sq, &[0.1, 0.05], 0.001).is_err());
    }

    #[test]
    fn d_le_du_and_d_le_m_at_random_points() {
        let dom = l_shape();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut checked = 0;
        while checked < 200 {
            let p = [rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)];
            if !dom.is_interior(p) {
                continue;
            }
            checked += 1;
            let d = distance_to_boundary(&dom, p).unwrap();
            let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let du = directional_distance(&dom, p, [theta.cos(), theta.sin()]).unwrap();
            assert!(d <= du + 1e-12, "d = {d}, d_u = {du} at {p:?}");
            let m = mean_distance(&dom, p, 64).unwrap();
            assert!(d <= m.m + 1e-12);
        }
    }

    #[test]
    fn distance_is_one_lipschitz() {
        let dom = koch(2).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut checked = 0;
        while checked < 200 {
            let p = [rng.gen_range(-0.3..1.3), rng.gen_range(-0.4..1.2)];
            let q = [rng.gen_range(-0.3..1.3), rng.gen_range(-0.4..1.2)];
            if !dom.is_interior(p) || !dom.is_interior(q) {
                continue;
            }
            checked += 1;
            let dp = dom.boundary_distance(p);
            let dq = dom.boundary_distance(q);
            let dist = ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt();
            assert!((dp - dq).abs() <= dist + 1e-12);
        }
    }

    #[test]
    fn mean_distance_quadrature_refinement() {
        // doubling n_dirs moves m by less than the coarse-level change
        let dom = l_shape();
        let p = [0.3, 0.2];
        let m1 = mean_distance(&dom, p, 90).unwrap().m;
        let m2 = mean_distance(&dom, p, 180).unwrap().m;
        let m3 = mean_distance(&dom, p, 360).unwrap().m;
        assert!((m3 - m2).abs() <= (m2 - m1).abs() + 1e-12);
        assert!((m3 - m2).abs() < 1e-3);
    }

    #[test]
    fn koch_level_zero_is_triangle() {
        let k0 = koch(0).unwrap();
        assert_eq!(match k0.shape() { Shape::Polygon { vertices } => vertices.len(), _ => 0 }, 3);
        assert_relative_eq!(k0.volume(), 3.0f64.sqrt() / 4.0, epsilon = 1e-12);
    }

    #[test]
    fn koch_area_grows_toward_limit() {
        // area of the level-l prefractal: A_l = A_0 (1 + (3/5)(1 - (4/9)^l))
        let a0 = 3.0f64.sqrt() / 4.0;
        for l in 0..5 {
            let k = koch(l).unwrap();
            let expected = a0 * (1.0 + 0.6 * (1.0 - (4.0f64 / 9.0).powi(l as i32)));
            assert_relative_eq!(k.volume(), expected, epsilon = 1e-12);
        }
    }

    #[test]
    fn sector_polygon_sane() {
        let s = sector(6.0, 1.0 / 64.0).unwrap();
        assert!(s.is_interior([0.5, 0.1]));
        assert!(!s.is_interior([0.5, -0.1]));
        // area approaches beta/2
        assert_relative_eq!(s.volume(), 3.0, epsilon = 2e-3);
        assert!(sector(6.3, 0.01).is_err());
    }
}
