//! Linking number of Co1 and Co3 by signed crossings in a projection.

use serde::{Deserialize, Serialize};

use super::residual::{equations, tangent, Label, System, FD_STEP};
use super::trace::CollinearityCurve;
use crate::error::{Error, Result};
use crate::geom::{Point3, Tolerance, Vec3};
use crate::knotmodel::SmoothKnot;
use crate::quadrisecant::{sign_epsilon, Permutation};

/// Coordinate forgotten by the projection of the simplex to a triangle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Projection {
    /// Project to `(t2, t3)`; Co3 is over where its `t1` is larger.
    ForgetT1,
    /// Project to `(t1, t2)`; Co3 is over where its `t3` is larger.
    ForgetT3,
}

impl Projection {
    fn plane(self, t: [f64; 3]) -> [f64; 2] {
        match self {
            Projection::ForgetT1 => [t[1], t[2]],
            Projection::ForgetT3 => [t[0], t[1]],
        }
    }

    fn height_index(self) -> usize {
        match self {
            Projection::ForgetT1 => 0,
            Projection::ForgetT3 => 2,
        }
    }

    /// The triple with height `h` over the projected point `p`.
    fn lift(self, p: [f64; 2], h: f64) -> [f64; 3] {
        match self {
            Projection::ForgetT1 => [h, p[0], p[1]],
            Projection::ForgetT3 => [p[0], p[1], h],
        }
    }
}

/// A crossing of a Co3 strand with a Co1 strand in the projection, i.e. a
/// four-point collinearity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TracerCrossing {
    /// Parameters of the four collinear points in increasing order.
    pub params: [f64; 4],
    /// Co3 strand above the Co1 strand.
    pub over: bool,
    /// Type of the quadrisecant, labels in parameter order read along the line.
    pub sigma: Permutation,
    pub epsilon: i8,
    /// Crossing sign from the curve orientations, `sign(over x under)`.
    pub crossing_sign: i8,
    /// Indices `(co1, co3)` of the two strands in the curve list.
    pub curves: (usize, usize),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinkingNumber {
    pub projection: Projection,
    /// Sum of `epsilon` over Co3-over-Co1 crossings.
    pub value: i64,
    pub crossings: Vec<TracerCrossing>,
    /// `epsilon * crossing_sign` of the first over-crossing.
    pub kappa: Option<i8>,
    /// Whether every over-crossing has the same `epsilon * crossing_sign`.
    pub kappa_consistent: bool,
}

impl LinkingNumber {
    pub fn over_crossings(&self) -> impl Iterator<Item = &TracerCrossing> {
        self.crossings.iter().filter(|c| c.over)
    }
}

fn cross2(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

/// Intersection parameters of two planar segments, half-open at the end.
fn segment_hit(p0: [f64; 2], p1: [f64; 2], q0: [f64; 2], q1: [f64; 2]) -> Option<(f64, f64)> {
    let r = [p1[0] - p0[0], p1[1] - p0[1]];
    let s = [q1[0] - q0[0], q1[1] - q0[1]];
    let den = cross2(r, s);
    if den == 0.0 {
        return None;
    }
    let w = [q0[0] - p0[0], q0[1] - p0[1]];
    let a = cross2(w, s) / den;
    let b = cross2(w, r) / den;
    ((0.0..1.0).contains(&a) && (0.0..1.0).contains(&b)).then_some((a, b))
}

/// Solve a 4x4 system by Gaussian elimination with partial pivoting.
fn solve4(mut m: [[f64; 4]; 4], mut rhs: [f64; 4]) -> Option<[f64; 4]> {
    for col in 0..4 {
        let piv = (col..4).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        if m[piv][col] == 0.0 {
            return None;
        }
        m.swap(col, piv);
        rhs.swap(col, piv);
        for row in col + 1..4 {
            let k = m[row][col] / m[col][col];
            for c in col..4 {
                m[row][c] -= k * m[col][c];
            }
            rhs[row] -= k * rhs[col];
        }
    }
    let mut x = [0.0; 4];
    for row in (0..4).rev() {
        let mut s = rhs[row];
        for c in row + 1..4 {
            s -= m[row][c] * x[c];
        }
        x[row] = s / m[row][row];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// Newton refinement of a crossing: unknowns are the projected point and
/// the two heights, equations the collinearity of both lifted triples.
fn refine_crossing(
    f: &SmoothKnot,
    proj: Projection,
    p: [f64; 2],
    h1: f64,
    h3: f64,
) -> Option<([f64; 2], f64, f64)> {
    let mut x = [p[0], p[1], h1, h3];
    let lifts = |x: &[f64; 4]| (proj.lift([x[0], x[1]], x[2]), proj.lift([x[0], x[1]], x[3]));
    for it in 0..30 {
        let (ta, tb) = lifts(&x);
        let (sa, sb) = (System::at(f, ta), System::at(f, tb));
        let (fa, fb) = (sa.frame(), sb.frame());
        let g = |x: &[f64; 4]| {
            let (ta, tb) = lifts(x);
            let a = equations(f, ta, &fa);
            let b = equations(f, tb, &fb);
            [a[0], a[1], b[0], b[1]]
        };
        let g0 = g(&x);
        let na = g0[0].hypot(g0[1]) / sa.scale();
        let nb = g0[2].hypot(g0[3]) / sb.scale();
        if it > 0 && na <= 1e-12 && nb <= 1e-12 {
            return Some(([x[0], x[1]], x[2], x[3]));
        }
        let mut jac = [[0.0; 4]; 4];
        for k in 0..4 {
            let mut xp = x;
            let mut xm = x;
            xp[k] += FD_STEP;
            xm[k] -= FD_STEP;
            let (gp, gm) = (g(&xp), g(&xm));
            for row in 0..4 {
                jac[row][k] = (gp[row] - gm[row]) / (2.0 * FD_STEP);
            }
        }
        let dx = solve4(jac, g0.map(|v| -v))?;
        for k in 0..4 {
            x[k] += dx[k];
        }
        if dx.iter().map(|v| v.abs()).fold(0.0, f64::max) > 0.05 {
            return None;
        }
    }
    None
}

/// Labels (1-based, parameter order) of four collinear points read along
/// the line oriented from the first point to the second.
fn line_type(pts: &[Point3; 4]) -> Permutation {
    let dir = pts[1] - pts[0];
    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&a, &b| (pts[a] - pts[0]).dot(dir).total_cmp(&(pts[b] - pts[0]).dot(dir)));
    Permutation(order.map(|k| k as u8 + 1))
}

/// Signed count of Co3-over-Co1 crossings, each signed by the quadrisecant
/// sign of its four-point collinearity.
///
/// Under-crossings are reported but not counted. A crossing involving a
/// closed component aborts with [`Error::NonGenericProjection`].
pub fn linking_number(
    f: &SmoothKnot,
    curves: &[CollinearityCurve],
    proj: Projection,
) -> Result<LinkingNumber> {
    let tol = Tolerance::new(1e-9, f.diagonal());
    let hi = proj.height_index();
    let mut crossings: Vec<TracerCrossing> = Vec::new();
    let mut raw: Vec<([f64; 4], usize, usize)> = Vec::new();
    for (i1, c1) in curves.iter().enumerate().filter(|(_, c)| c.label == Label::Co1) {
        for (i3, c3) in curves.iter().enumerate().filter(|(_, c)| c.label == Label::Co3) {
            for (a0, a1) in c1.segments() {
                let (pa0, pa1) = (proj.plane(a0), proj.plane(a1));
                let (lo_x, hi_x) = (pa0[0].min(pa1[0]), pa0[0].max(pa1[0]));
                let (lo_y, hi_y) = (pa0[1].min(pa1[1]), pa0[1].max(pa1[1]));
                for (b0, b1) in c3.segments() {
                    let (pb0, pb1) = (proj.plane(b0), proj.plane(b1));
                    if pb0[0].max(pb1[0]) < lo_x
                        || pb0[0].min(pb1[0]) > hi_x
                        || pb0[1].max(pb1[1]) < lo_y
                        || pb0[1].min(pb1[1]) > hi_y
                    {
                        continue;
                    }
                    let Some((s, u)) = segment_hit(pa0, pa1, pb0, pb1) else {
                        continue;
                    };
                    if c1.is_closed() || c3.is_closed() {
                        return Err(Error::NonGenericProjection(
                            "a closed collinearity component crosses another curve".into(),
                        ));
                    }
                    let p = [pa0[0] + s * (pa1[0] - pa0[0]), pa0[1] + s * (pa1[1] - pa0[1])];
                    let h1 = a0[hi] + s * (a1[hi] - a0[hi]);
                    let h3 = b0[hi] + u * (b1[hi] - b0[hi]);
                    let (q, r1, r3) = refine_crossing(f, proj, p, h1, h3).ok_or_else(|| {
                        Error::NonGenericProjection(format!(
                            "crossing near {p:?} did not refine"
                        ))
                    })?;
                    raw.push(([q[0], q[1], r1, r3], i1, i3));
                }
            }
        }
    }
    for (x, i1, i3) in raw {
        let dup = crossings.iter().any(|c| {
            let mut ps = [x[0], x[1], x[2], x[3]];
            ps.sort_by(f64::total_cmp);
            c.curves == (i1, i3) && ps.iter().zip(c.params.iter()).all(|(a, b)| (a - b).abs() < 1e-8)
        });
        if dup {
            continue;
        }
        let (p, h1, h3) = ([x[0], x[1]], x[2], x[3]);
        let (t1, t3) = (proj.lift(p, h1), proj.lift(p, h3));
        let over = h3 > h1;
        let mut params = match proj {
            Projection::ForgetT1 => [h1, h3, p[0], p[1]],
            Projection::ForgetT3 => [p[0], p[1], h1, h3],
        };
        params.sort_by(f64::total_cmp);
        let pts = params.map(|s| f.point(s));
        let tangents: [Vec3; 4] = params.map(|s| f.derivative(s, 1));
        let sigma = line_type(&pts);
        let epsilon = sign_epsilon(&pts, &tangents, &tol)?;
        let (Some(d1), Some(d3)) = (tangent(f, t1), tangent(f, t3)) else {
            return Err(Error::NonGenericProjection("singular curve at a crossing".into()));
        };
        let (u1, u3) = (proj.plane(d1.to_array()), proj.plane(d3.to_array()));
        let cr = cross2(u3, u1);
        if cr.abs() <= 1e-9 * (u1[0].hypot(u1[1]) * u3[0].hypot(u3[1])) {
            return Err(Error::NonGenericProjection(format!(
                "tangential crossing at {params:?}"
            )));
        }
        crossings.push(TracerCrossing {
            params,
            over,
            sigma,
            epsilon,
            crossing_sign: if cr > 0.0 { 1 } else { -1 },
            curves: (i1, i3),
        });
    }
    crossings.sort_by(|a, b| {
        a.params
            .iter()
            .zip(b.params.iter())
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let value = crossings.iter().filter(|c| c.over).map(|c| c.epsilon as i64).sum();
    let kappas: Vec<i8> = crossings
        .iter()
        .filter(|c| c.over)
        .map(|c| c.epsilon * c.crossing_sign)
        .collect();
    let kappa = kappas.first().copied();
    let kappa_consistent = kappas.iter().all(|&x| Some(x) == kappa);
    Ok(LinkingNumber {
        projection: proj,
        value,
        crossings,
        kappa,
        kappa_consistent,
    })
}
