use serde::{Deserialize, Serialize};

use super::vector::{det3, Point3, Vec3};

/// Degeneracy tolerance: `rel` is dimensionless, `scale` the characteristic
/// length (bounding-box diagonal of the knot) that turns it into a distance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub rel: f64,
    pub scale: f64,
}

impl Tolerance {
    pub const DEFAULT_REL: f64 = 1e-9;

    pub fn new(rel: f64, scale: f64) -> Self {
        Tolerance { rel, scale }
    }

    pub fn unit() -> Self {
        Tolerance::new(Self::DEFAULT_REL, 1.0)
    }

    /// Absolute length below which two points are considered coincident.
    pub fn length(&self) -> f64 {
        self.rel * self.scale
    }

    pub fn with_scale(self, scale: f64) -> Self {
        Tolerance { scale, ..self }
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance::unit()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Orientation {
    Negative,
    Degenerate,
    Positive,
}

impl Orientation {
    pub fn as_i8(self) -> i8 {
        match self {
            Orientation::Negative => -1,
            Orientation::Degenerate => 0,
            Orientation::Positive => 1,
        }
    }

    fn of(value: f64, threshold: f64) -> Orientation {
        if value.abs() <= threshold || value.is_nan() {
            Orientation::Degenerate
        } else if value > 0.0 {
            Orientation::Positive
        } else {
            Orientation::Negative
        }
    }
}

/// Sign of `det[b-a, c-a, d-a]`.
///
/// Degenerate when the determinant is within `tol.rel` of the product of the
/// three edge lengths, i.e. when the tetrahedron is flat relative to its size.
pub fn orient3(a: Point3, b: Point3, c: Point3, d: Point3, tol: &Tolerance) -> Orientation {
    let (u, v, w) = (b - a, c - a, d - a);
    let det = det3(u, v, w);
    Orientation::of(det, tol.rel * u.norm() * v.norm() * w.norm())
}

/// Sign of the 2D cross product `u x v`, with the same relative convention.
pub fn orient2(u: [f64; 2], v: [f64; 2], rel: f64) -> Orientation {
    let c = u[0] * v[1] - u[1] * v[0];
    let scale = (u[0].hypot(u[1])) * (v[0].hypot(v[1]));
    Orientation::of(c, rel * scale)
}

/// Closest points between segments `[p0,p1]` and `[q0,q1]`.
/// Returns `(s, t, distance)` with `s, t` in `[0, 1]`.
pub fn segment_closest(p0: Point3, p1: Point3, q0: Point3, q1: Point3) -> (f64, f64, f64) {
    let d1 = p1 - p0;
    let d2 = q1 - q0;
    let r = p0 - q0;
    let a = d1.norm_sq();
    let e = d2.norm_sq();
    let f = d2.dot(r);
    let (s, t);
    if a <= f64::MIN_POSITIVE && e <= f64::MIN_POSITIVE {
        return (0.0, 0.0, r.norm());
    }
    if a <= f64::MIN_POSITIVE {
        s = 0.0;
        t = (f / e).clamp(0.0, 1.0);
    } else {
        let c = d1.dot(r);
        if e <= f64::MIN_POSITIVE {
            t = 0.0;
            s = (-c / a).clamp(0.0, 1.0);
        } else {
            let b = d1.dot(d2);
            let denom = a * e - b * b;
            let mut s0 = if denom > 0.0 {
                ((b * f - c * e) / denom).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let mut t0 = (b * s0 + f) / e;
            if t0 < 0.0 {
                t0 = 0.0;
                s0 = (-c / a).clamp(0.0, 1.0);
            } else if t0 > 1.0 {
                t0 = 1.0;
                s0 = ((b - c) / a).clamp(0.0, 1.0);
            }
            s = s0;
            t = t0;
        }
    }
    let dist = ((p0 + d1 * s) - (q0 + d2 * t)).norm();
    (s, t, dist)
}

/// Distance from `p` to segment `[a,b]`.
pub fn point_segment_distance(p: Point3, a: Point3, b: Point3) -> f64 {
    let d = b - a;
    let l2 = d.norm_sq();
    if l2 == 0.0 {
        return p.distance(a);
    }
    let t = ((p - a).dot(d) / l2).clamp(0.0, 1.0);
    p.distance(a + d * t)
}

/// Signed offset of `p` from the plane through `a` with unit normal `n`.
pub fn plane_offset(p: Point3, a: Point3, n: Vec3) -> f64 {
    (p - a).dot(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orient_signs() {
        let t = Tolerance::unit();
        let o = Vec3::ZERO;
        assert_eq!(
            orient3(o, Vec3::X, Vec3::Y, Vec3::Z, &t),
            Orientation::Positive
        );
        assert_eq!(
            orient3(o, Vec3::Y, Vec3::X, Vec3::Z, &t),
            Orientation::Negative
        );
        assert_eq!(
            orient3(o, Vec3::X, Vec3::Y, Vec3::new(1.0, 1.0, 0.0), &t),
            Orientation::Degenerate
        );
    }

    #[test]
    fn segment_distance_cases() {
        let (s, t, d) = segment_closest(
            Vec3::new(-1.0, 0.0, 0.0),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(0.0, -1.0, 1.0),
            Vec3::new(0.0, 1.0, 1.0),
        );
        assert!((s - 0.5).abs() < 1e-15 && (t - 0.5).abs() < 1e-15 && (d - 1.0).abs() < 1e-15);
        // parallel segments
        let (_, _, d) = segment_closest(
            Vec3::ZERO,
            Vec3::X,
            Vec3::new(2.0, 1.0, 0.0),
            Vec3::new(3.0, 1.0, 0.0),
        );
        assert!((d - 2f64.sqrt()).abs() < 1e-15);
    }
}
