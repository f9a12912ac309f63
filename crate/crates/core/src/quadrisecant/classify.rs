use serde::{Deserialize, Serialize};

use super::enumerate::{Hit, Quadrisecant};
use crate::error::{Error, Result};
use crate::geom::{det3, Point3, Tolerance, Vec3};
use crate::knotmodel::ExtremalSet;

/// Sign of a quadrisecant with points `f` and tangents `d` labelled in knot order.
///
/// With `v = f2 - f1` this is the sign of
/// ```text
/// | |f3-f2| det[v,d1,d3]   |f3-f1| det[v,d2,d3] |
/// | |f4-f2| det[v,d4,d1]   |f4-f1| det[v,d2,d4] |
/// ```
pub fn sign_epsilon(f: &[Point3; 4], d: &[Vec3; 4], tol: &Tolerance) -> Result<i8> {
    let v = f[1] - f[0];
    let m00 = f[2].distance(f[1]) * det3(v, d[0], d[2]);
    let m01 = f[2].distance(f[0]) * det3(v, d[1], d[2]);
    let m10 = f[3].distance(f[1]) * det3(v, d[3], d[0]);
    let m11 = f[3].distance(f[0]) * det3(v, d[1], d[3]);
    let det = m00 * m11 - m01 * m10;
    let scale = (m00 * m11).abs() + (m01 * m10).abs();
    if !det.is_finite() || det.abs() <= tol.rel * scale || scale == 0.0 {
        return Err(Error::NonTransverse(format!(
            "sign matrix determinant {det:.3e} (scale {scale:.3e})"
        )));
    }
    Ok(if det > 0.0 { 1 } else { -1 })
}

/// Whether knot-consecutive hits (cyclically) alternate sides of the
/// midpoint of the two middle hits along the line. Closed knots only.
pub fn is_alternating(q: &Quadrisecant, tol: &Tolerance) -> Result<bool> {
    let c = q.line_coordinates();
    let mid = 0.5 * (c[q.line_order[1]] + c[q.line_order[2]]);
    let side: Vec<f64> = c.iter().map(|x| x - mid).collect();
    if side.iter().any(|s| s.abs() <= tol.length()) {
        return Err(Error::DegenerateConfiguration(
            "hit at the midpoint of the middle pair".into(),
        ));
    }
    Ok((0..4).all(|i| side[i] * side[(i + 1) % 4] < 0.0))
}

/// Cyclic labels of a closed-knot quadrisecant: `p_k = hits[(rot + k) % 4]`,
/// rooted so the middle component runs from `p_3` forward to `p_0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosedLabels {
    pub rot: usize,
}

impl ClosedLabels {
    pub fn hit<'a>(&self, q: &'a Quadrisecant, k: usize) -> &'a Hit {
        &q.hits[(self.rot + k) % 4]
    }

    /// The sign with the cyclic labelling `p_0..p_3`.
    pub fn epsilon(&self, q: &Quadrisecant, tol: &Tolerance) -> Result<i8> {
        let pts = [0, 1, 2, 3].map(|k| self.hit(q, k).point);
        let tan = [0, 1, 2, 3].map(|k| self.hit(q, k).tangent);
        sign_epsilon(&pts, &tan, tol)
    }
}

/// Labels for an alternating quadrisecant; `None` if the two middle hits along
/// the line are not knot-adjacent (never the case for alternating ones).
pub fn closed_labels(q: &Quadrisecant) -> Option<ClosedLabels> {
    let a = q.line_order[1];
    let b = q.line_order[2];
    if (b + 4 - a) % 4 == 1 {
        Some(ClosedLabels { rot: b })
    } else if (a + 4 - b) % 4 == 1 {
        Some(ClosedLabels { rot: a })
    } else {
        None
    }
}

/// Knot arc from `p_3` forward to `p_0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MiddleArc {
    pub from_edge: usize,
    pub from_param: f64,
    pub to_edge: usize,
    pub to_param: f64,
}

impl MiddleArc {
    /// Whether vertex `v` of an `n`-vertex closed knot lies on the arc.
    pub fn contains_vertex(&self, v: usize, n: usize) -> bool {
        // vertices from_edge+1 ..= to_edge, cyclically
        let first = (self.from_edge + 1) % n;
        let span = (self.to_edge + n - self.from_edge) % n;
        let off = (v + n - first) % n;
        off < span
    }
}

pub fn middle_arc(q: &Quadrisecant) -> Option<MiddleArc> {
    let l = closed_labels(q)?;
    let (p3, p0) = (l.hit(q, 3), l.hit(q, 0));
    Some(MiddleArc {
        from_edge: p3.edge,
        from_param: p3.param,
        to_edge: p0.edge,
        to_param: p0.param,
    })
}

/// Number of extremal components inside the middle component.
pub fn n_l(q: &Quadrisecant, ext: &ExtremalSet, vertex_count: usize) -> Option<usize> {
    let arc = middle_arc(q)?;
    Some(
        ext.components
            .iter()
            .filter(|c| c.whole || arc.contains_vertex(c.vertices[0], vertex_count))
            .count(),
    )
}
