use serde::{Deserialize, Serialize};

use super::predicates::Tolerance;
use super::vector::{Mat3, Point3, Vec3};
use crate::error::{Error, Result};

/// The line `point + t * dir`. `dir` is non-zero but not necessarily unit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Line {
    pub point: Point3,
    pub dir: Vec3,
}

impl Line {
    pub fn new(point: Point3, dir: Vec3) -> Self {
        Line { point, dir }
    }

    pub fn through(a: Point3, b: Point3) -> Self {
        Line::new(a, b - a)
    }

    pub fn at(&self, t: f64) -> Point3 {
        self.point + self.dir * t
    }

    pub fn unit_dir(&self) -> Vec3 {
        self.dir.normalized().unwrap_or(Vec3::ZERO)
    }

    /// Parameter of the point on `self` closest to `p`.
    pub fn project_param(&self, p: Point3) -> f64 {
        (p - self.point).dot(self.dir) / self.dir.norm_sq()
    }

    pub fn distance_to_point(&self, p: Point3) -> f64 {
        p.distance(self.at(self.project_param(p)))
    }

    /// Parameter on `self` of the point closest to `other` (`None` if parallel).
    pub fn closest_param_to_line(&self, other: &Line) -> Option<f64> {
        let w = self.point - other.point;
        let a = self.dir.norm_sq();
        let b = self.dir.dot(other.dir);
        let c = other.dir.norm_sq();
        let d = self.dir.dot(w);
        let e = other.dir.dot(w);
        let denom = a * c - b * b;
        if denom <= 1e-300 || denom <= 1e-24 * a * c {
            return None;
        }
        Some((b * e - c * d) / denom)
    }

    pub fn distance_to_line(&self, other: &Line) -> f64 {
        let n = self.dir.cross(other.dir);
        let w = other.point - self.point;
        let nn = n.norm();
        if nn <= 1e-15 * self.dir.norm() * other.dir.norm() {
            return self.distance_to_point(other.point);
        }
        w.dot(n).abs() / nn
    }

    pub fn is_parallel(&self, other: &Line, tol: &Tolerance) -> bool {
        let s = self.unit_dir().cross(other.unit_dir()).norm();
        s <= tol.rel
    }

    /// Whether the lines meet (and are not parallel) within the length tolerance.
    pub fn meets(&self, other: &Line, tol: &Tolerance) -> bool {
        !self.is_parallel(other, tol) && self.distance_to_line(other) <= tol.length()
    }

    /// Midpoint of the common perpendicular; the intersection point for meeting lines.
    pub fn meeting_point(&self, other: &Line) -> Option<Point3> {
        let s = self.closest_param_to_line(other)?;
        let t = other.closest_param_to_line(self)?;
        Some(self.at(s).lerp(other.at(t), 0.5))
    }
}

/// A knot edge: `start + u * (end - start)`, `u in [0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub start: Point3,
    pub end: Point3,
}

impl Segment {
    pub fn new(start: Point3, end: Point3) -> Self {
        Segment { start, end }
    }

    pub fn line(&self) -> Line {
        Line::through(self.start, self.end)
    }

    pub fn at(&self, u: f64) -> Point3 {
        self.start.lerp(self.end, u)
    }

    pub fn vector(&self) -> Vec3 {
        self.end - self.start
    }

    pub fn length(&self) -> f64 {
        self.vector().norm()
    }
}

/// `x -> linear * x + translation`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineMap {
    pub linear: Mat3,
    pub translation: Vec3,
}

impl AffineMap {
    pub const IDENTITY: AffineMap = AffineMap {
        linear: Mat3::IDENTITY,
        translation: Vec3::ZERO,
    };

    pub fn new(linear: Mat3, translation: Vec3) -> Self {
        AffineMap {
            linear,
            translation,
        }
    }

    pub fn apply(&self, p: Point3) -> Point3 {
        self.linear.mul_vec(p) + self.translation
    }

    pub fn apply_vector(&self, v: Vec3) -> Vec3 {
        self.linear.mul_vec(v)
    }

    pub fn apply_line(&self, l: &Line) -> Line {
        Line::new(self.apply(l.point), self.apply_vector(l.dir))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &AffineMap) -> AffineMap {
        AffineMap::new(
            self.linear.mul_mat(&other.linear),
            self.apply(other.translation),
        )
    }

    pub fn inverse(&self) -> Option<AffineMap> {
        let inv = self.linear.inverse()?;
        Some(AffineMap::new(inv, -inv.mul_vec(self.translation)))
    }
}

/// Configuration type of three pairwise non-parallel lines.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ThreeLineCase {
    /// Pairwise skew.
    Disjoint,
    /// Exactly one pair meets; that pair comes first in the canonical order.
    OneIntersection,
    /// Two pairs meet; the shared line is in the middle of the canonical order.
    Chain,
}

impl ThreeLineCase {
    /// Preference when choosing a base triple for the four-line solver.
    pub fn rank(self) -> u8 {
        match self {
            ThreeLineCase::Disjoint => 0,
            ThreeLineCase::OneIntersection => 1,
            ThreeLineCase::Chain => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThreeLineClass {
    pub case: ThreeLineCase,
    /// Indices into the input arranged in canonical order.
    pub order: [usize; 3],
}

/// Classify three lines. Fails on parallel pairs, concurrent or coplanar
/// triples, and linearly dependent direction triples.
pub fn classify_three_lines(lines: &[Line; 3], tol: &Tolerance) -> Result<ThreeLineClass> {
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        if lines[i].is_parallel(&lines[j], tol) {
            return Err(Error::DegenerateConfiguration(format!(
                "lines {i} and {j} are parallel"
            )));
        }
    }
    let dets = Mat3::from_cols(
        lines[0].unit_dir(),
        lines[1].unit_dir(),
        lines[2].unit_dir(),
    )
    .det();
    if dets.abs() <= tol.rel {
        return Err(Error::DegenerateConfiguration(
            "line directions are linearly dependent".into(),
        ));
    }
    let m01 = lines[0].meets(&lines[1], tol);
    let m02 = lines[0].meets(&lines[2], tol);
    let m12 = lines[1].meets(&lines[2], tol);
    let class = match (m01, m02, m12) {
        (false, false, false) => ThreeLineClass {
            case: ThreeLineCase::Disjoint,
            order: [0, 1, 2],
        },
        (true, false, false) => one(0, 1, 2),
        (false, true, false) => one(0, 2, 1),
        (false, false, true) => one(1, 2, 0),
        (true, true, false) => chain(1, 0, 2),
        (true, false, true) => chain(0, 1, 2),
        (false, true, true) => chain(0, 2, 1),
        (true, true, true) => {
            return Err(Error::DegenerateConfiguration(
                "three pairwise meeting lines are concurrent or coplanar".into(),
            ))
        }
    };
    Ok(class)
}

fn one(a: usize, b: usize, c: usize) -> ThreeLineClass {
    ThreeLineClass {
        case: ThreeLineCase::OneIntersection,
        order: [a, b, c],
    }
}

fn chain(a: usize, mid: usize, b: usize) -> ThreeLineClass {
    ThreeLineClass {
        case: ThreeLineCase::Chain,
        order: [a, mid, b],
    }
}

/// The canonical three lines of each configuration.
pub fn canonical_lines(case: ThreeLineCase) -> [Line; 3] {
    let x = Line::new(Vec3::ZERO, Vec3::X);
    match case {
        ThreeLineCase::Disjoint => [
            x,
            Line::new(Vec3::Z, Vec3::Y),
            Line::new(Vec3::new(1.0, 1.0, 0.0), Vec3::Z),
        ],
        ThreeLineCase::OneIntersection => [
            x,
            Line::new(Vec3::ZERO, Vec3::Y),
            Line::new(Vec3::new(1.0, 1.0, 0.0), Vec3::Z),
        ],
        ThreeLineCase::Chain => [
            x,
            Line::new(Vec3::ZERO, Vec3::Y),
            Line::new(Vec3::Y, Vec3::Z),
        ],
    }
}

/// Affine map taking three lines, already in canonical order for `case`, onto
/// the canonical lines of that case (line i onto canonical line i).
///
/// Works in the basis of the line directions: with `a = D^-1 p` each target
/// coordinate depends on a single `a_k`, so the map is diagonal there.
pub fn normalize_three_lines(
    lines: &[Line; 3],
    case: ThreeLineCase,
    tol: &Tolerance,
) -> Result<AffineMap> {
    let d = Mat3::from_cols(lines[0].dir, lines[1].dir, lines[2].dir);
    let dinv = d.inverse().ok_or_else(|| {
        Error::DegenerateConfiguration("line directions are linearly dependent".into())
    })?;
    let a = |p: Point3| dinv.mul_vec(p);
    let recip = |v: f64, what: &str| -> Result<f64> {
        let r = 1.0 / v;
        if !r.is_finite() || v.abs() <= tol.rel * 1e-3 {
            Err(Error::DegenerateConfiguration(format!(
                "normalization is singular ({what})"
            )))
        } else {
            Ok(r)
        }
    };
    let meet = |i: usize, j: usize| -> Result<Point3> {
        lines[i].meeting_point(&lines[j]).ok_or_else(|| {
            Error::DegenerateConfiguration(format!("lines {i} and {j} are parallel"))
        })
    };
    let (lambda, c) = match case {
        ThreeLineCase::Disjoint => {
            let (a1, a2, a3) = (a(lines[0].point), a(lines[1].point), a(lines[2].point));
            let l1 = recip(a3.x - a2.x, "x")?;
            let l2 = recip(a3.y - a1.y, "y")?;
            let l3 = recip(a2.z - a1.z, "z")?;
            (
                Vec3::new(l1, l2, l3),
                Vec3::new(-l1 * a2.x, -l2 * a1.y, -l3 * a1.z),
            )
        }
        ThreeLineCase::OneIntersection => {
            let x = a(meet(0, 1)?);
            let a3 = a(lines[2].point);
            let l1 = recip(a3.x - x.x, "x")?;
            let l2 = recip(a3.y - x.y, "y")?;
            let l3 = (l1 * l2).abs().sqrt();
            (
                Vec3::new(l1, l2, l3),
                Vec3::new(-l1 * x.x, -l2 * x.y, -l3 * x.z),
            )
        }
        ThreeLineCase::Chain => {
            let x12 = a(meet(0, 1)?);
            let x23 = a(meet(1, 2)?);
            let l2 = recip(x23.y - x12.y, "y")?;
            let l1 = l2.abs();
            let l3 = l2.abs();
            (
                Vec3::new(l1, l2, l3),
                Vec3::new(-l1 * x23.x, -l2 * x12.y, -l3 * x12.z),
            )
        }
    };
    Ok(AffineMap::new(Mat3::diag(lambda).mul_mat(&dinv), c))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_map(seed: u64) -> AffineMap {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        loop {
            let mut m = [[0.0; 3]; 3];
            for row in m.iter_mut() {
                for c in row.iter_mut() {
                    *c = rng.gen_range(-2.0..2.0);
                }
            }
            let lin = Mat3 { m };
            if lin.det().abs() > 0.2 {
                let t = Vec3::new(
                    rng.gen_range(-3.0..3.0),
                    rng.gen_range(-3.0..3.0),
                    rng.gen_range(-3.0..3.0),
                );
                return AffineMap::new(lin, t);
            }
        }
    }

    #[test]
    fn classify_canonical() {
        let t = Tolerance::unit();
        for case in [
            ThreeLineCase::Disjoint,
            ThreeLineCase::OneIntersection,
            ThreeLineCase::Chain,
        ] {
            let c = classify_three_lines(&canonical_lines(case), &t).unwrap();
            assert_eq!(c.case, case);
            assert_eq!(c.order, [0, 1, 2]);
        }
    }

    #[test]
    fn classify_rejects_parallel_and_concurrent() {
        let t = Tolerance::unit();
        let par = [
            Line::new(Vec3::ZERO, Vec3::X),
            Line::new(Vec3::Y, Vec3::X * 2.0),
            Line::new(Vec3::Z, Vec3::Z),
        ];
        assert!(matches!(
            classify_three_lines(&par, &t),
            Err(Error::DegenerateConfiguration(_))
        ));
        let conc = [
            Line::new(Vec3::ZERO, Vec3::X),
            Line::new(Vec3::ZERO, Vec3::Y),
            Line::new(Vec3::ZERO, Vec3::Z),
        ];
        assert!(classify_three_lines(&conc, &t).is_err());
    }

    #[test]
    fn normalization_inverts_random_maps() {
        let t = Tolerance::unit();
        for seed in 0..50 {
            let m = random_map(seed);
            for case in [
                ThreeLineCase::Disjoint,
                ThreeLineCase::OneIntersection,
                ThreeLineCase::Chain,
            ] {
                let src = canonical_lines(case).map(|l| m.apply_line(&l));
                let class = classify_three_lines(&src, &t).unwrap();
                assert_eq!(class.case, case);
                let ordered = class.order.map(|i| src[i]);
                let n = normalize_three_lines(&ordered, case, &t).unwrap();
                let canon = canonical_lines(case);
                for (l, c) in ordered.iter().zip(canon.iter()) {
                    let img = n.apply_line(l);
                    for s in [-1.5, 0.0, 2.0] {
                        assert!(c.distance_to_point(img.at(s)) < 1e-9);
                    }
                }
                if case == ThreeLineCase::Disjoint {
                    let id = n.compose(&m);
                    assert!(id.linear.mul_mat(&Mat3::IDENTITY).m.iter().enumerate().all(
                        |(i, r)| r
                            .iter()
                            .enumerate()
                            .all(|(j, v)| (v - if i == j { 1.0 } else { 0.0 }).abs() < 1e-9)
                    ));
                    assert!(id.translation.max_abs() < 1e-9);
                }
            }
        }
    }
}
