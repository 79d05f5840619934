//! Low-level planar primitives: point/segment distance, parity membership
//! tests and line/segment intersection parameters.

pub type Point = [f64; 2];

#[inline]
pub fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
pub fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

#[inline]
pub fn cross(a: Point, b: Point) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

#[inline]
pub fn norm(a: Point) -> f64 {
    dot(a, a).sqrt()
}

/// Euclidean distance from `p` to the closed segment `[a, b]`.
pub fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = sub(b, a);
    let ap = sub(p, a);
    let len2 = dot(ab, ab);
    if len2 == 0.0 {
        return norm(ap);
    }
    let t = (dot(ap, ab) / len2).clamp(0.0, 1.0);
    let proj = [a[0] + t * ab[0], a[1] + t * ab[1]];
    norm(sub(p, proj))
}

/// Distance from `p` to the boundary of the polygon with the given vertices.
pub fn polygon_distance(p: Point, verts: &[Point]) -> f64 {
    let n = verts.len();
    let mut best = f64::INFINITY;
    for i in 0..n {
        let d = point_segment_distance(p, verts[i], verts[(i + 1) % n]);
        if d < best {
            best = d;
        }
    }
    best
}

/// Crossing-parity membership test. Points coinciding with the boundary may
/// be classified either way; callers resolve them through the distance test.
pub fn point_in_polygon(p: Point, verts: &[Point]) -> bool {
    let n = verts.len();
    let mut inside = false;
    let [px, py] = p;
    for i in 0..n {
        let [x1, y1] = verts[i];
        let [x2, y2] = verts[(i + 1) % n];
        if (y1 > py) != (y2 > py) {
            let x_int = x1 + (py - y1) * (x2 - x1) / (y2 - y1);
            if px < x_int {
                inside = !inside;
            }
        }
    }
    inside
}

/// Twice the signed area of the polygon; positive for counterclockwise order.
pub fn signed_area2(verts: &[Point]) -> f64 {
    let n = verts.len();
    let mut acc = 0.0;
    for i in 0..n {
        let a = verts[i];
        let b = verts[(i + 1) % n];
        acc += cross(a, b);
    }
    acc
}

/// Line parameters `t` where `p + t u` meets the segment `[a, b]`.
/// Both signs of `t` are reported; `u` need not be normalized.
pub fn line_segment_hits(p: Point, u: Point, a: Point, b: Point, out: &mut Vec<f64>) {
    let ab = sub(b, a);
    let denom = cross(u, ab);
    let ap = sub(a, p);
    if denom.abs() < 1e-300 {
        // parallel; collinear overlaps contribute through the segment endpoints
        if cross(ap, u).abs() < 1e-14 * (norm(ap) + norm(ab)).max(1.0) {
            let uu = dot(u, u);
            out.push(dot(ap, u) / uu);
            out.push(dot(sub(b, p), u) / uu);
        }
        return;
    }
    let s = cross(ap, u) / -denom; // position along [a,b]
    if (-1e-12..=1.0 + 1e-12).contains(&s) {
        let t = cross(ap, ab) / -denom;
        out.push(t);
    }
}

/// Checks that no two non-adjacent edges intersect. O(n²); used once per
/// polygon construction.
pub fn is_simple(verts: &[Point]) -> bool {
    let n = verts.len();
    if n < 3 {
        return false;
    }
    let seg = |i: usize| (verts[i], verts[(i + 1) % n]);
    for i in 0..n {
        for j in (i + 1)..n {
            // skip adjacent edges (they share a vertex)
            if j == i || (j + 1) % n == i || (i + 1) % n == j {
                continue;
            }
            let (a, b) = seg(i);
            let (c, d) = seg(j);
            if segments_intersect(a, b, c, d) {
                return false;
            }
        }
    }
    true
}

fn segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool {
    let d1 = cross(sub(b, a), sub(c, a));
    let d2 = cross(sub(b, a), sub(d, a));
    let d3 = cross(sub(d, c), sub(a, c));
    let d4 = cross(sub(d, c), sub(b, c));
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQUARE: [Point; 4] = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];

    #[test]
    fn segment_distance_basic() {
        assert!((point_segment_distance([0.5, 1.0], [0.0, 0.0], [1.0, 0.0]) - 1.0).abs() < 1e-15);
        assert!((point_segment_distance([2.0, 0.0], [0.0, 0.0], [1.0, 0.0]) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn square_membership() {
        assert!(point_in_polygon([0.5, 0.5], &SQUARE));
        assert!(!point_in_polygon([1.5, 0.5], &SQUARE));
        assert!(!point_in_polygon([-0.1, 0.5], &SQUARE));
    }

    #[test]
    fn square_is_simple_and_ccw() {
        assert!(is_simple(&SQUARE));
        assert!(signed_area2(&SQUARE) > 0.0);
    }

    #[test]
    fn bowtie_is_not_simple() {
        let bowtie: [Point; 4] = [[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]];
        assert!(!is_simple(&bowtie));
    }

    #[test]
    fn line_hits_square_edge() {
        let mut ts = Vec::new();
        line_segment_hits([0.5, 0.5], [1.0, 0.0], [1.0, 0.0], [1.0, 1.0], &mut ts);
        assert_eq!(ts.len(), 1);
        assert!((ts[0] - 0.5).abs() < 1e-15);
    }
}
