//! Lines meeting four given lines or segments.
//!
//! Three of the lines are mapped to a canonical position where the lines
//! meeting all three form an explicit variety; the fourth line is then
//! intersected with that variety.

use serde::{Deserialize, Serialize};

use super::lines::{
    classify_three_lines, normalize_three_lines, Line, Segment, ThreeLineCase, ThreeLineClass,
};
use super::predicates::Tolerance;
use super::vector::{Point3, Vec3};
use crate::error::{Error, Result};

/// Relative size of the discriminant below which a root of the fourth line
/// counts as a double root. Roots closer than about the square root of this
/// are kept as two candidates and must polish to distinct lines.
const DOUBLE_ROOT_REL: f64 = 1e-13;

/// Multiple of the length tolerance used to screen unpolished candidates.
const COARSE: f64 = 1e3;

/// A transversal found by the solver, before it is checked against windows.
#[derive(Clone, Copy, Debug)]
struct Candidate {
    line: Line,
    /// From a (near) double root of the restricted quadric.
    tangent: bool,
}

/// A line meeting four segments at interior points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SegmentTransversal {
    pub line: Line,
    /// Parameter of the hit on each input segment, in `(0, 1)`.
    pub params: [f64; 4],
    pub points: [Point3; 4],
}

/// All lines meeting the four given lines at four pairwise distinct points.
///
/// Lines through the meeting point of two of the inputs are excluded. At most
/// two lines are returned; a double root is reported as [`Error::TangencyAmbiguity`].
pub fn transversals_of_four_lines(lines: &[Line; 4], tol: &Tolerance) -> Result<Vec<Line>> {
    let cands = candidates(lines, tol)?;
    let mut out = Vec::new();
    for c in cands {
        if distinct_hits(&c.line, lines, COARSE * tol.length()).is_none() {
            continue;
        }
        if c.tangent {
            return Err(Error::TangencyAmbiguity(
                "fourth line is tangent to the transversal variety".into(),
            ));
        }
        let line = refine(&c.line, lines, tol)?;
        if distinct_hits(&line, lines, 10.0 * tol.length()).is_some() {
            if out.iter().any(|o| coincide(o, &line, lines, tol)) {
                return Err(Error::TangencyAmbiguity(
                    "two roots of the fourth line give the same transversal".into(),
                ));
            }
            out.push(line);
        }
    }
    Ok(out)
}

/// Lines meeting the four segments at interior points.
///
/// A transversal whose hit lands within tolerance of a segment endpoint, or a
/// tangential transversal whose hits all lie on the segments, is reported as
/// [`Error::TangencyAmbiguity`]; callers perturb and retry.
pub fn transversals_of_four_segments(
    segs: &[Segment; 4],
    tol: &Tolerance,
) -> Result<Vec<SegmentTransversal>> {
    let lines = segs.map(|s| s.line());
    let cands = candidates(&lines, tol)?;
    let mut out = Vec::new();
    for c in cands {
        // cheap rejection before polishing: hits that coincide or land well
        // outside a segment
        let Some(rough) = distinct_hits(&c.line, &lines, COARSE * tol.length()) else {
            continue;
        };
        let outside = rough.iter().zip(segs.iter()).any(|(u, s)| {
            let pad = COARSE * tol.length() / s.length();
            *u < -pad || *u > 1.0 + pad
        });
        if outside {
            continue;
        }
        let line = refine(&c.line, &lines, tol)?;
        let c = Candidate { line, tangent: c.tangent };
        let Some(params) = distinct_hits(&c.line, &lines, 10.0 * tol.length()) else {
            continue;
        };
        let mut inside = true;
        let mut boundary = false;
        for (u, s) in params.iter().zip(segs.iter()) {
            let pad = tol.length() / s.length();
            if *u < -pad || *u > 1.0 + pad {
                inside = false;
            } else if *u <= pad || *u >= 1.0 - pad {
                boundary = true;
            }
        }
        if !inside {
            continue;
        }
        if c.tangent {
            return Err(Error::TangencyAmbiguity(
                "transversal of four segments is a double root".into(),
            ));
        }
        if boundary {
            return Err(Error::TangencyAmbiguity(
                "transversal passes within tolerance of a segment endpoint".into(),
            ));
        }
        let points = [0, 1, 2, 3].map(|i| lines[i].at(params[i]));
        if out.iter().any(|o: &SegmentTransversal| coincide(&o.line, &c.line, &lines, tol)) {
            return Err(Error::TangencyAmbiguity(
                "two roots of the fourth segment give the same transversal".into(),
            ));
        }
        out.push(SegmentTransversal {
            line: c.line,
            params,
            points,
        });
    }
    Ok(out)
}

/// Whether two transversals hit every input line at the same point.
fn coincide(s: &Line, t: &Line, lines: &[Line; 4], tol: &Tolerance) -> bool {
    lines.iter().all(|l| {
        match (l.closest_param_to_line(s), l.closest_param_to_line(t)) {
            (Some(a), Some(b)) => l.at(a).distance(l.at(b)) <= 10.0 * tol.length(),
            _ => false,
        }
    })
}

/// Parameters of the hits of `t` on each line, or `None` if two hits coincide.
fn distinct_hits(t: &Line, lines: &[Line; 4], min_sep: f64) -> Option<[f64; 4]> {
    let params = lines.map(|l| l.closest_param_to_line(t).unwrap_or(f64::NAN));
    if params.iter().any(|p| !p.is_finite()) {
        return None;
    }
    let pts = [0, 1, 2, 3].map(|i| lines[i].at(params[i]));
    for i in 0..4 {
        for j in i + 1..4 {
            if pts[i].distance(pts[j]) <= min_sep {
                return None;
            }
        }
    }
    Some(params)
}

/// Pick the base triple: simplest configuration, best conditioned.
fn choose_triple(lines: &[Line; 4], tol: &Tolerance) -> Result<([usize; 4], ThreeLineClass)> {
    let mut best: Option<(u8, f64, [usize; 4], ThreeLineClass)> = None;
    let mut last_err = None;
    for rest in 0..4 {
        let idx: Vec<usize> = (0..4).filter(|&i| i != rest).collect();
        let triple = [lines[idx[0]], lines[idx[1]], lines[idx[2]]];
        match classify_three_lines(&triple, tol) {
            Ok(class) => {
                let cond = triple[0]
                    .unit_dir()
                    .dot(triple[1].unit_dir().cross(triple[2].unit_dir()))
                    .abs();
                let key = (class.case.rank(), cond);
                let better = match &best {
                    None => true,
                    Some((r, c, _, _)) => key.0 < *r || (key.0 == *r && key.1 > *c),
                };
                if better {
                    let order = [idx[0], idx[1], idx[2], rest];
                    best = Some((key.0, key.1, order, class));
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    match best {
        Some((_, _, order, class)) => Ok((order, class)),
        None => Err(last_err.unwrap_or_else(|| {
            Error::DegenerateConfiguration("no admissible base triple".into())
        })),
    }
}

fn candidates(lines: &[Line; 4], tol: &Tolerance) -> Result<Vec<Candidate>> {
    for i in 0..4 {
        if lines[i].dir.norm() == 0.0 || !lines[i].dir.is_finite() {
            return Err(Error::DegenerateConfiguration(format!(
                "line {i} has no direction"
            )));
        }
    }
    let (order, class) = choose_triple(lines, tol)?;
    let triple = [0, 1, 2].map(|k| lines[order[class.order[k]]]);
    let l4 = lines[order[3]];
    let map = normalize_three_lines(&triple, class.case, tol)?;
    let inv = map
        .inverse()
        .ok_or_else(|| Error::DegenerateConfiguration("singular normalization".into()))?;
    let a = map.apply(l4.point);
    let b = map.apply_vector(l4.dir);

    let mut out = Vec::new();
    match class.case {
        ThreeLineCase::Disjoint => {
            for (t, tangent) in disjoint_roots(a, b, tol)? {
                let p = a + b * t;
                if let Some(line) = line_through_canonical_disjoint(p) {
                    out.push(Candidate {
                        line: inv.apply_line(&line),
                        tangent,
                    });
                }
            }
        }
        ThreeLineCase::OneIntersection => {
            // The x = y component consists of lines through the meeting point
            // of the first two lines; only the plane z = 0 contributes.
            let scale = 1.0 + a.norm();
            if b.z.abs() <= tol.rel * b.norm() {
                if a.z.abs() <= tol.rel * scale {
                    return Err(Error::InfiniteFamily(
                        "fourth line lies in the plane of the meeting pair".into(),
                    ));
                }
            } else {
                let t = -a.z / b.z;
                let p = a + b * t;
                let q = Vec3::new(1.0, 1.0, 0.0);
                if p.distance(q) > tol.rel * scale {
                    out.push(Candidate {
                        line: inv.apply_line(&Line::through(p, q)),
                        tangent: false,
                    });
                }
            }
        }
        ThreeLineCase::Chain => {
            // Both components consist of lines through a meeting point.
        }
    }
    Ok(out)
}

/// Roots of the restriction of `(x + z - 1) y = x z` to `a + t b`.
fn disjoint_roots(a: Vec3, b: Vec3, tol: &Tolerance) -> Result<Vec<(f64, bool)>> {
    let (u0, u1) = (a.x + a.z - 1.0, b.x + b.z);
    let ca = u1 * b.y - b.x * b.z;
    let cb = u0 * b.y + u1 * a.y - a.x * b.z - b.x * a.z;
    let cc = u0 * a.y - a.x * a.z;
    let sa = (u1 * b.y).abs() + (b.x * b.z).abs();
    let sb = (u0 * b.y).abs() + (u1 * a.y).abs() + (a.x * b.z).abs() + (b.x * a.z).abs();
    let sc = (u0 * a.y).abs() + (a.x * a.z).abs();
    let zero = |v: f64, sv: f64| v.abs() <= tol.rel * sv;
    let mut roots = Vec::new();
    if zero(ca, sa) {
        if zero(cb, sb) {
            if zero(cc, sc) {
                return Err(Error::InfiniteFamily(
                    "fourth line lies on the transversal quadric".into(),
                ));
            }
            return Ok(roots);
        }
        roots.push((-cc / cb, false));
        return Ok(roots);
    }
    let disc = cb * cb - 4.0 * ca * cc;
    let dscale = cb * cb + 4.0 * (ca * cc).abs();
    if disc.abs() <= DOUBLE_ROOT_REL * dscale {
        roots.push((-cb / (2.0 * ca), true));
    } else if disc > 0.0 {
        let q = -0.5 * (cb + cb.signum() * disc.sqrt());
        let q = if q == 0.0 { -0.5 * disc.sqrt() } else { q };
        roots.push((q / ca, false));
        roots.push((cc / q, false));
    }
    Ok(roots)
}

/// Line through `p` meeting the first two canonical disjoint lines.
///
/// Returns `None` if `p` lies on one of the three canonical lines.
fn line_through_canonical_disjoint(p: Point3) -> Option<Line> {
    let l1 = (Vec3::ZERO, Vec3::X);
    let l2 = (Vec3::Z, Vec3::Y);
    let l3 = (Vec3::new(1.0, 1.0, 0.0), Vec3::Z);
    let scale = 1.0 + p.norm();
    for (q, d) in [l1, l2, l3] {
        if d.cross(p - q).norm() <= 1e-10 * scale {
            return None;
        }
    }
    let n1 = l1.1.cross(p - l1.0);
    let n2 = l2.1.cross(p - l2.0);
    let dir = n1.cross(n2);
    if dir.norm() <= 1e-12 * n1.norm() * n2.norm() {
        return None;
    }
    Some(Line::new(p, dir))
}

/// Signed distance between lines `t` and `l` along their common normal.
fn line_gap(t: &Line, l: &Line) -> f64 {
    let n = t.dir.cross(l.dir);
    let nn = n.norm();
    if nn == 0.0 {
        return t.distance_to_point(l.point);
    }
    (l.point - t.point).dot(n) / nn
}

/// Newton polish of a transversal in the original coordinates, then verify.
///
/// The line is carried by its points on two of the inputs; the residuals are
/// the gaps to the other two.
fn refine(t: &Line, lines: &[Line; 4], tol: &Tolerance) -> Result<Line> {
    let params = lines.map(|l| l.closest_param_to_line(t).unwrap_or(f64::NAN));
    if params.iter().any(|p| !p.is_finite()) {
        return Err(Error::DegenerateConfiguration(
            "transversal parallel to an input line".into(),
        ));
    }
    let pts = [0, 1, 2, 3].map(|i| lines[i].at(params[i]));
    // carry the line by the two hits furthest apart
    let mut best = (0, 1, -1.0);
    for i in 0..4 {
        for j in i + 1..4 {
            let d = pts[i].distance(pts[j]);
            if d > best.2 {
                best = (i, j, d);
            }
        }
    }
    let (ia, ib, _) = best;
    let others: Vec<usize> = (0..4).filter(|&k| k != ia && k != ib).collect();
    let (la, lb) = (lines[ia], lines[ib]);
    let (lc, ld) = (lines[others[0]], lines[others[1]]);
    let build = |s: f64, u: f64| Line::through(la.at(s), lb.at(u));
    let resid = |s: f64, u: f64| {
        let l = build(s, u);
        [line_gap(&l, &lc), line_gap(&l, &ld)]
    };
    let (mut s, mut u) = (params[ia], params[ib]);
    let mut r = resid(s, u);
    for _ in 0..4 {
        let hs = 1e-7 * (1.0 + s.abs());
        let hu = 1e-7 * (1.0 + u.abs());
        let rs = resid(s + hs, u);
        let ru = resid(s, u + hu);
        let j = [
            [(rs[0] - r[0]) / hs, (ru[0] - r[0]) / hu],
            [(rs[1] - r[1]) / hs, (ru[1] - r[1]) / hu],
        ];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det == 0.0 || !det.is_finite() {
            break;
        }
        let ds = (r[0] * j[1][1] - r[1] * j[0][1]) / det;
        let du = (j[0][0] * r[1] - j[1][0] * r[0]) / det;
        let (ns, nu) = (s - ds, u - du);
        let nr = resid(ns, nu);
        if nr[0].abs().max(nr[1].abs()) < r[0].abs().max(r[1].abs()) {
            s = ns;
            u = nu;
            r = nr;
        } else {
            break;
        }
    }
    let line = build(s, u);
    let scale = tol.scale;
    let worst = lines
        .iter()
        .map(|l| line.distance_to_line(l))
        .fold(0.0f64, f64::max);
    if worst <= 1e-7 * scale {
        Ok(line)
    } else {
        Err(Error::DegenerateConfiguration(format!(
            "transversal verification failed (gap {worst:.3e})"
        )))
    }
}
