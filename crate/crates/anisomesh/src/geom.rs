//! Small planar vector helpers shared across the crate.

/// A point or vector in the plane.
pub type Pt = [f64; 2];

pub fn sub(a: Pt, b: Pt) -> Pt {
    [a[0] - b[0], a[1] - b[1]]
}

pub fn add(a: Pt, b: Pt) -> Pt {
    [a[0] + b[0], a[1] + b[1]]
}

pub fn scale(a: Pt, s: f64) -> Pt {
    [a[0] * s, a[1] * s]
}

pub fn lerp(a: Pt, b: Pt, t: f64) -> Pt {
    [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
}

pub fn dot(a: Pt, b: Pt) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// Scalar cross product a × b.
pub fn cross(a: Pt, b: Pt) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

pub fn norm(a: Pt) -> f64 {
    a[0].hypot(a[1])
}

pub fn dist(a: Pt, b: Pt) -> f64 {
    norm(sub(a, b))
}

/// Signed area of the triangle (a, b, c), positive for counterclockwise order.
pub fn signed_area(a: Pt, b: Pt, c: Pt) -> f64 {
    0.5 * cross(sub(b, a), sub(c, a))
}

/// Barycentric coordinates of `p` with respect to the triangle (a, b, c).
///
/// The coordinates sum to one for any non-degenerate triangle; each one is
/// the signed sub-triangle area opposite the corresponding vertex divided by
/// the full area.
pub fn barycentric(p: Pt, a: Pt, b: Pt, c: Pt) -> [f64; 3] {
    let full = signed_area(a, b, c);
    [
        signed_area(p, b, c) / full,
        signed_area(a, p, c) / full,
        signed_area(a, b, p) / full,
    ]
}

/// Closest point to `p` on the segment [a, b].
pub fn project_to_segment(p: Pt, a: Pt, b: Pt) -> Pt {
    let ab = sub(b, a);
    let len2 = dot(ab, ab);
    if len2 == 0.0 {
        return a;
    }
    let t = (dot(sub(p, a), ab) / len2).clamp(0.0, 1.0);
    lerp(a, b, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn signed_area_orientation() {
        let a = [0.0, 0.0];
        let b = [1.0, 0.0];
        let c = [0.0, 1.0];
        assert_relative_eq!(signed_area(a, b, c), 0.5);
        assert_relative_eq!(signed_area(a, c, b), -0.5);
    }

    #[test]
    fn barycentric_partition_of_unity() {
        let (a, b, c) = ([0.2, -0.1], [1.4, 0.3], [0.5, 2.0]);
        let p = [0.6, 0.5];
        let l = barycentric(p, a, b, c);
        assert_relative_eq!(l[0] + l[1] + l[2], 1.0, epsilon = 1e-14);
        let rec = [
            l[0] * a[0] + l[1] * b[0] + l[2] * c[0],
            l[0] * a[1] + l[1] * b[1] + l[2] * c[1],
        ];
        assert_relative_eq!(rec[0], p[0], epsilon = 1e-14);
        assert_relative_eq!(rec[1], p[1], epsilon = 1e-14);
    }

    #[test]
    fn segment_projection_clamps_to_endpoints() {
        let a = [0.0, 0.0];
        let b = [1.0, 0.0];
        assert_eq!(project_to_segment([-2.0, 1.0], a, b), a);
        assert_eq!(project_to_segment([3.0, -1.0], a, b), b);
        let mid = project_to_segment([0.5, 0.7], a, b);
        assert_relative_eq!(mid[0], 0.5);
        assert_relative_eq!(mid[1], 0.0);
    }
}
