//! Planar projections of polygonal knots and links.

use serde::{Deserialize, Serialize};

use super::knot::PLKnot;
use super::open::closing_path;
use crate::error::{Error, Result};
use crate::geom::{Point3, Tolerance, Vec3};

/// Orthonormal `(a, b)` with `a x b = d` (`d` unit): the picture plane as seen
/// from `+infinity * d`.
pub fn picture_frame(d: Vec3) -> (Vec3, Vec3) {
    let a = d.any_orthogonal();
    (a, d.cross(a))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    /// Component and position (`edge + param`) of the over strand.
    pub over_component: usize,
    pub over: f64,
    pub under_component: usize,
    pub under: f64,
    /// `+1` for a right-handed crossing.
    pub sign: i8,
    pub point: [f64; 2],
}

/// Crossings of a set of closed polygons projected along `direction`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinkDiagram {
    pub direction: Vec3,
    /// Edge count of each component: positions run over `[0, len)`.
    pub lengths: Vec<usize>,
    pub crossings: Vec<Crossing>,
}

/// Projection of a knot. Long knots are closed up outside their hull first;
/// `basepoint` then lies on the closing path.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KnotDiagram {
    pub direction: Vec3,
    pub length: usize,
    pub basepoint: f64,
    pub crossings: Vec<Crossing>,
}

impl KnotDiagram {
    pub fn writhe(&self) -> i64 {
        self.crossings.iter().map(|c| c.sign as i64).sum()
    }
}

struct Edge2 {
    comp: usize,
    index: usize,
    a: [f64; 2],
    b: [f64; 2],
    za: f64,
    zb: f64,
}

fn cross2(u: [f64; 2], v: [f64; 2]) -> f64 {
    u[0] * v[1] - u[1] * v[0]
}

fn sub2(u: [f64; 2], v: [f64; 2]) -> [f64; 2] {
    [u[0] - v[0], u[1] - v[1]]
}

fn dist_point_seg2(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let d = sub2(b, a);
    let l2 = d[0] * d[0] + d[1] * d[1];
    let t = if l2 == 0.0 {
        0.0
    } else {
        ((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / l2
    }
    .clamp(0.0, 1.0);
    let q = [a[0] + t * d[0], a[1] + t * d[1]];
    (p[0] - q[0]).hypot(p[1] - q[1])
}

/// Project closed polygons along `direction`, checking the projection is
/// generic: no vertex over another edge, transverse double points only.
pub fn project_polygons(polys: &[Vec<Point3>], direction: Vec3, tol: &Tolerance) -> Result<LinkDiagram> {
    let d = direction
        .normalized()
        .ok_or_else(|| Error::NonGenericProjection("zero projection direction".into()))?;
    let (fa, fb) = picture_frame(d);
    let eps = tol.length();
    let mut edges = Vec::new();
    for (c, poly) in polys.iter().enumerate() {
        let n = poly.len();
        for i in 0..n {
            let p = poly[i];
            let q = poly[(i + 1) % n];
            edges.push(Edge2 {
                comp: c,
                index: i,
                a: [p.dot(fa), p.dot(fb)],
                b: [q.dot(fa), q.dot(fb)],
                za: p.dot(d),
                zb: q.dot(d),
            });
        }
    }
    let adjacent = |e: &Edge2, f: &Edge2| {
        if e.comp != f.comp {
            return false;
        }
        let n = polys[e.comp].len();
        e.index == f.index || (e.index + 1) % n == f.index || (f.index + 1) % n == e.index
    };
    let mut crossings = Vec::new();
    for i in 0..edges.len() {
        let e = &edges[i];
        let u = sub2(e.b, e.a);
        let lu = u[0].hypot(u[1]);
        if lu <= eps {
            return Err(Error::NonGenericProjection(format!(
                "edge {} projects to a point",
                e.index
            )));
        }
        for f in edges.iter().skip(i + 1) {
            if adjacent(e, f) {
                // adjacent edges may only meet at their shared vertex
                let v = sub2(f.b, f.a);
                if cross2(u, v).abs() <= tol.rel * lu * v[0].hypot(v[1]) {
                    let shared_back = u[0] * v[0] + u[1] * v[1] < 0.0;
                    if shared_back {
                        return Err(Error::NonGenericProjection(
                            "adjacent edges overlap in projection".into(),
                        ));
                    }
                }
                continue;
            }
            let v = sub2(f.b, f.a);
            let lv = v[0].hypot(v[1]);
            // vertices over other edges
            for p in [e.a, e.b] {
                if dist_point_seg2(p, f.a, f.b) <= eps {
                    return Err(Error::NonGenericProjection("vertex projects onto an edge".into()));
                }
            }
            for p in [f.a, f.b] {
                if dist_point_seg2(p, e.a, e.b) <= eps {
                    return Err(Error::NonGenericProjection("vertex projects onto an edge".into()));
                }
            }
            let den = cross2(u, v);
            if den.abs() <= tol.rel * lu * lv {
                // parallel; overlap would have tripped the vertex test
                continue;
            }
            let w = sub2(f.a, e.a);
            let s = cross2(w, v) / den;
            let t = cross2(w, u) / den;
            if !(0.0..=1.0).contains(&s) || !(0.0..=1.0).contains(&t) {
                continue;
            }
            let ze = e.za + s * (e.zb - e.za);
            let zf = f.za + t * (f.zb - f.za);
            if (ze - zf).abs() <= eps {
                return Err(Error::NonGenericProjection(
                    "edges meet in space at a crossing".into(),
                ));
            }
            let point = [e.a[0] + s * u[0], e.a[1] + s * u[1]];
            let (over, under, ov, uv, ps, pt) = if ze > zf {
                (e, f, u, v, s, t)
            } else {
                (f, e, v, u, t, s)
            };
            let c = cross2(ov, uv);
            crossings.push(Crossing {
                over_component: over.comp,
                over: over.index as f64 + ps,
                under_component: under.comp,
                under: under.index as f64 + pt,
                sign: if c > 0.0 { 1 } else { -1 },
                point,
            });
        }
    }
    // no two crossings at the same picture point
    for i in 0..crossings.len() {
        for j in i + 1..crossings.len() {
            let (p, q) = (crossings[i].point, crossings[j].point);
            if (p[0] - q[0]).hypot(p[1] - q[1]) <= eps {
                return Err(Error::NonGenericProjection("triple point in projection".into()));
            }
        }
    }
    crossings.sort_by(|a, b| {
        (a.over_component, a.over)
            .partial_cmp(&(b.over_component, b.over))
            .unwrap()
    });
    Ok(LinkDiagram {
        direction: d,
        lengths: polys.iter().map(|p| p.len()).collect(),
        crossings,
    })
}

/// Diagram of a knot projected along `direction`.
pub fn project_to_diagram(knot: &PLKnot, direction: Vec3, rel: f64) -> Result<KnotDiagram> {
    let (poly, basepoint) = if knot.is_closed() {
        (knot.vertices().to_vec(), 0.0)
    } else {
        let mut v = knot.vertices().to_vec();
        let base = knot.edge_count() as f64 + 0.5;
        v.extend(closing_path(knot, rel)?);
        (v, base)
    };
    let scale = {
        let k = PLKnot::new_unchecked(poly.clone(), super::knot::Topology::Closed);
        k.diagonal()
    };
    let link = project_polygons(&[poly], direction, &Tolerance::new(rel, scale))?;
    Ok(KnotDiagram {
        direction: link.direction,
        length: link.lengths[0],
        basepoint,
        crossings: link.crossings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frame_is_right_handed() {
        for d in [Vec3::X, Vec3::Z, Vec3::new(1.0, 2.0, -0.5).normalized().unwrap()] {
            let (a, b) = picture_frame(d);
            assert!((a.cross(b) - d).norm() < 1e-14);
        }
    }

    #[test]
    fn hopf_link_signs() {
        // two unit squares linked through each other
        let a = vec![
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(2.0, 0.0, 0.0),
            Vec3::new(2.0, 2.0, 0.0),
            Vec3::new(0.0, 2.0, 0.0),
        ];
        let b = vec![
            Vec3::new(1.0, 1.0, -1.0),
            Vec3::new(1.0, 1.0, 1.0),
            Vec3::new(1.0, 3.0, 1.0),
            Vec3::new(1.0, 3.0, -1.0),
        ];
        let d = Vec3::new(0.3, 0.2, 1.0);
        let link = project_polygons(&[a, b], d, &Tolerance::new(1e-9, 4.0)).unwrap();
        let s: i64 = link
            .crossings
            .iter()
            .filter(|c| c.over_component != c.under_component)
            .map(|c| c.sign as i64)
            .sum();
        assert_eq!(s.abs(), 2);
    }
}
