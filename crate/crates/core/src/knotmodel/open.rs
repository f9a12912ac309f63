//! Opening closed knots at extremal points, normalising long knots, and
//! closing long knots up outside their hull.

use super::hull::{extremal_set, ConvexHull};
use super::knot::{PLKnot, Topology};
use crate::error::{Error, Result};
use crate::geom::{Point3, Vec3};

/// Offset of the two new endpoints from the cut vertex, relative to the diagonal.
pub const OPENING_OFFSET_REL: f64 = 1e-5;

/// Length of the vertical legs added to long knots whose endpoints are not
/// the lowest and highest points, relative to the diagonal.
const LEG_REL: f64 = 0.05;

/// Cut a closed knot at a vertex of extremal component `component`.
///
/// The vertex is replaced by two endpoints pushed outward along the hull
/// normal and separated sideways, so both are extremal in the long knot.
pub fn open_at_extremal(knot: &PLKnot, component: usize, rel: f64) -> Result<PLKnot> {
    if !knot.is_closed() {
        return Err(Error::Unsupported("open_at_extremal needs a closed knot".into()));
    }
    let ext = extremal_set(knot, rel)?;
    let comp = ext.components.get(component).ok_or_else(|| {
        Error::Unsupported(format!(
            "extremal component {component} out of range ({} components)",
            ext.components.len()
        ))
    })?;
    open_at_vertex(knot, comp.vertices[0], rel)
}

/// Cut a closed knot at extremal vertex `k`.
pub fn open_at_vertex(knot: &PLKnot, k: usize, rel: f64) -> Result<PLKnot> {
    if !knot.is_closed() {
        return Err(Error::Unsupported("open_at_vertex needs a closed knot".into()));
    }
    let ext = extremal_set(knot, rel)?;
    if ext.component_of_vertex(k).is_none() {
        return Err(Error::Unsupported(format!("vertex {k} is not extremal")));
    }
    let verts = knot.vertices();
    let n = verts.len();
    let p = verts[k];
    let normal = if ext.hull.planar {
        ext.hull.facets[0].normal
    } else {
        ext.hull
            .outward_normal(p, ext.eps)
            .ok_or_else(|| Error::DegenerateHull("extremal vertex has no supporting facet".into()))?
    };
    // start leans towards the next vertex and end towards the previous one,
    // so the two new edges cannot cross near p
    let chord = verts[(k + 1) % n] - verts[(k + n - 1) % n];
    let side = (chord - normal * chord.dot(normal))
        .normalized()
        .unwrap_or_else(|| normal.any_orthogonal());
    let delta = OPENING_OFFSET_REL * knot.diagonal();
    let start = p + (normal + side) * delta;
    let end = p + (normal - side) * delta;
    let mut out = Vec::with_capacity(n + 1);
    out.push(start);
    for i in 1..n {
        out.push(verts[(k + i) % n]);
    }
    out.push(end);
    PLKnot::new(out, Topology::Long)
}

/// Bring a long knot read from a file into standard position.
///
/// The knot is closed by a ray down from its first vertex and a ray up from
/// its last. Vertical legs are added where an endpoint is not the strict
/// lowest (highest) point, then each axis is mapped affinely into the unit
/// box so the endpoints lie on the bottom and top faces.
pub fn normalize_long(vertices: Vec<Point3>) -> Result<PLKnot> {
    let pre = PLKnot::new(vertices, Topology::Long)?;
    let mut v = pre.vertices().to_vec();
    let diag = pre.diagonal();
    let margin = 1e-6 * diag;
    let n = v.len();
    let zmin_rest = v[1..].iter().map(|p| p.z).fold(f64::INFINITY, f64::min);
    let zmax_rest = v[..n - 1].iter().map(|p| p.z).fold(f64::NEG_INFINITY, f64::max);
    if v[0].z > zmin_rest - margin {
        let low = v.iter().map(|p| p.z).fold(f64::INFINITY, f64::min) - LEG_REL * diag;
        v.insert(0, Vec3::new(v[0].x, v[0].y, low));
    }
    let last = *v.last().unwrap();
    if last.z < zmax_rest + margin {
        let high = v.iter().map(|p| p.z).fold(f64::NEG_INFINITY, f64::max) + LEG_REL * diag;
        v.push(Vec3::new(last.x, last.y, high));
    }
    let mut lo = v[0];
    let mut hi = v[0];
    for p in &v {
        lo = lo.component_min(*p);
        hi = hi.component_max(*p);
    }
    let ext = hi - lo;
    let map = |x: f64, l: f64, e: f64, pad: f64| {
        if e <= 0.0 {
            0.5
        } else {
            pad + (1.0 - 2.0 * pad) * (x - l) / e
        }
    };
    let out: Vec<Point3> = v
        .iter()
        .map(|p| {
            Vec3::new(
                map(p.x, lo.x, ext.x, 0.05),
                map(p.y, lo.y, ext.y, 0.05),
                map(p.z, lo.z, ext.z, 0.0),
            )
        })
        .collect();
    PLKnot::new(out, Topology::Long)
}

/// Whether both endpoints of a long knot are on its convex hull.
pub fn endpoints_extremal(knot: &PLKnot, rel: f64) -> Result<bool> {
    let eps = rel * knot.diagonal();
    let hull = ConvexHull::build(knot.vertices(), eps)?;
    let v = knot.vertices();
    Ok(!hull.supporting_facets(v[0], eps).is_empty()
        && !hull.supporting_facets(v[v.len() - 1], eps).is_empty())
}

/// Vertices of a closing path from the last vertex of a long knot back to its
/// first, running outside the convex hull (endpoints excluded).
///
/// Leaves each endpoint along its outward normal, then follows a great arc on
/// a sphere enclosing the knot.
pub fn closing_path(knot: &PLKnot, rel: f64) -> Result<Vec<Point3>> {
    let eps = rel * knot.diagonal();
    let v = knot.vertices();
    let hull = ConvexHull::build(v, eps)?;
    let diag = knot.diagonal();
    let first = v[0];
    let last = v[v.len() - 1];
    let normal_at = |p: Point3| -> Result<Vec3> {
        if hull.planar {
            return Ok(hull.facets[0].normal);
        }
        hull.outward_normal(p, eps).ok_or_else(|| {
            Error::GenericityFailure("long knot endpoint is not extremal".into())
        })
    };
    let (ns, ne) = (normal_at(first)?, normal_at(last)?);
    let centre = v.iter().fold(Vec3::ZERO, |a, b| a + *b) / v.len() as f64;
    let reach = 2.0 * diag;
    let radius = 4.0 * diag + v.iter().map(|p| p.distance(centre)).fold(0.0, f64::max);
    let a = last + ne * reach;
    let b = first + ns * reach;
    let ua = (a - centre).normalized().unwrap_or(Vec3::Z);
    let ub = (b - centre).normalized().unwrap_or(-Vec3::Z);
    let mut path = vec![a, centre + ua * radius];
    // great arc from ua to ub; pick a pole when they are (nearly) antipodal
    let axis_seed = ua.cross(ub);
    let mid = if axis_seed.norm() < 1e-6 {
        ua.any_orthogonal()
    } else {
        (ua + ub).normalized().unwrap_or(ua.any_orthogonal())
    };
    let steps = 24;
    for leg in [(ua, mid), (mid, ub)] {
        for i in 1..=steps / 2 {
            let t = i as f64 / (steps / 2) as f64;
            let u = slerp(leg.0, leg.1, t);
            path.push(centre + u * radius);
        }
    }
    path.push(b);
    Ok(path)
}

fn slerp(a: Vec3, b: Vec3, t: f64) -> Vec3 {
    let c = a.dot(b).clamp(-1.0, 1.0);
    let om = c.acos();
    if om < 1e-12 {
        return a;
    }
    let s = om.sin();
    (a * ((1.0 - t) * om).sin() + b * (t * om).sin()) / s
}

/// The closed knot obtained from a long knot by its outside closing path.
pub fn close_long(knot: &PLKnot, rel: f64) -> Result<PLKnot> {
    let mut v = knot.vertices().to_vec();
    v.extend(closing_path(knot, rel)?);
    PLKnot::new(v, Topology::Closed)
}
