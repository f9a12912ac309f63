use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{segment_closest, AffineMap, Point3, Segment, Tolerance, Vec3};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Topology {
    /// The last vertex joins back to the first.
    Closed,
    /// An arc whose endpoints are closed up outside the convex hull.
    Long,
}

/// A polygonal knot. Edge `i` runs from vertex `i` to vertex `i + 1`
/// (cyclically for closed knots).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PLKnot {
    vertices: Vec<Point3>,
    topology: Topology,
}

/// A point on a knot addressed by edge and edge parameter.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KnotPoint {
    pub edge: usize,
    pub param: f64,
}

impl KnotPoint {
    /// Scalar position along the knot, `edge + param`.
    pub fn position(&self) -> f64 {
        self.edge as f64 + self.param
    }
}

impl PLKnot {
    /// Validates vertex count, repeated vertices, folded-back edges and
    /// self-intersections.
    pub fn new(vertices: Vec<Point3>, topology: Topology) -> Result<PLKnot> {
        let knot = PLKnot::new_unchecked(vertices, topology);
        knot.validate()?;
        Ok(knot)
    }

    pub(crate) fn new_unchecked(vertices: Vec<Point3>, topology: Topology) -> PLKnot {
        PLKnot { vertices, topology }
    }

    pub fn closed(vertices: Vec<Point3>) -> Result<PLKnot> {
        PLKnot::new(vertices, Topology::Closed)
    }

    pub fn long(vertices: Vec<Point3>) -> Result<PLKnot> {
        PLKnot::new(vertices, Topology::Long)
    }

    pub fn vertices(&self) -> &[Point3] {
        &self.vertices
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn is_closed(&self) -> bool {
        self.topology == Topology::Closed
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        match self.topology {
            Topology::Closed => self.vertices.len(),
            Topology::Long => self.vertices.len() - 1,
        }
    }

    pub fn edge(&self, i: usize) -> Segment {
        let n = self.vertices.len();
        Segment::new(self.vertices[i], self.vertices[(i + 1) % n])
    }

    pub fn edges(&self) -> impl Iterator<Item = Segment> + '_ {
        (0..self.edge_count()).map(move |i| self.edge(i))
    }

    pub fn point(&self, p: KnotPoint) -> Point3 {
        self.edge(p.edge).at(p.param)
    }

    /// Unit tangent on the interior of an edge.
    pub fn tangent(&self, edge: usize) -> Vec3 {
        self.edge(edge).vector().normalized().unwrap_or(Vec3::ZERO)
    }

    pub fn bounding_box(&self) -> (Point3, Point3) {
        let mut lo = self.vertices[0];
        let mut hi = self.vertices[0];
        for v in &self.vertices {
            lo = lo.component_min(*v);
            hi = hi.component_max(*v);
        }
        (lo, hi)
    }

    /// Length of the bounding-box diagonal: the length scale for tolerances.
    pub fn diagonal(&self) -> f64 {
        let (lo, hi) = self.bounding_box();
        (hi - lo).norm()
    }

    pub fn tolerance(&self, rel: f64) -> Tolerance {
        Tolerance::new(rel, self.diagonal())
    }

    /// Whether edges `i` and `j` share a vertex.
    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        if i == j {
            return true;
        }
        let e = self.edge_count();
        let (a, b) = (i.min(j), i.max(j));
        b == a + 1 || (self.is_closed() && a == 0 && b == e - 1)
    }

    pub fn transformed(&self, map: &AffineMap) -> PLKnot {
        PLKnot::new_unchecked(
            self.vertices.iter().map(|v| map.apply(*v)).collect(),
            self.topology,
        )
    }

    pub fn mirrored(&self) -> PLKnot {
        PLKnot::new_unchecked(
            self.vertices
                .iter()
                .map(|v| Vec3::new(v.x, v.y, -v.z))
                .collect(),
            self.topology,
        )
    }

    pub fn reversed(&self) -> PLKnot {
        let mut v = self.vertices.clone();
        v.reverse();
        PLKnot::new_unchecked(v, self.topology)
    }

    /// Closed knot with vertex `k` moved to index 0.
    pub fn rerooted(&self, k: usize) -> PLKnot {
        let n = self.vertices.len();
        PLKnot::new_unchecked(
            (0..n).map(|i| self.vertices[(i + k) % n]).collect(),
            self.topology,
        )
    }

    pub fn with_vertices(&self, vertices: Vec<Point3>) -> Result<PLKnot> {
        PLKnot::new(vertices, self.topology)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.vertices.len();
        if n < 3 {
            return Err(Error::InvalidKnot(format!(
                "need at least 3 vertices, got {n}"
            )));
        }
        if self.vertices.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidKnot("non-finite coordinate".into()));
        }
        let tol = self.tolerance(Tolerance::DEFAULT_REL);
        let e = self.edge_count();
        for i in 0..e {
            let s = self.edge(i);
            if s.length() <= tol.length() {
                return Err(Error::InvalidKnot(format!(
                    "vertices {i} and {} coincide",
                    (i + 1) % n
                )));
            }
        }
        for i in 0..e {
            let nxt = if self.is_closed() { Some((i + 1) % e) } else if i + 1 < e { Some(i + 1) } else { None };
            if let Some(j) = nxt {
                let a = self.tangent(i);
                let b = self.tangent(j);
                if a.dot(b) <= -1.0 + 1e-12 {
                    return Err(Error::InvalidKnot(format!(
                        "edges {i} and {j} fold back onto each other"
                    )));
                }
            }
        }
        for i in 0..e {
            for j in i + 1..e {
                if self.adjacent(i, j) {
                    continue;
                }
                let (a, b) = (self.edge(i), self.edge(j));
                let (_, _, d) = segment_closest(a.start, a.end, b.start, b.end);
                if d <= tol.length() {
                    return Err(Error::InvalidKnot(format!(
                        "edges {i} and {j} intersect"
                    )));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_polygons() {
        let v = |x: f64, y: f64, z: f64| Vec3::new(x, y, z);
        assert!(PLKnot::closed(vec![v(0., 0., 0.), v(1., 0., 0.)]).is_err());
        assert!(PLKnot::closed(vec![v(0., 0., 0.), v(1., 0., 0.), v(1., 0., 0.), v(0., 1., 0.)]).is_err());
        // bow tie: edges 0 and 2 cross
        assert!(PLKnot::closed(vec![v(0., 0., 0.), v(1., 1., 0.), v(1., 0., 0.), v(0., 1., 0.)]).is_err());
        assert!(PLKnot::closed(vec![v(0., 0., 0.), v(1., 0., 0.), v(0., 1., 0.)]).is_ok());
    }

    #[test]
    fn adjacency() {
        let k = PLKnot::new_unchecked(vec![Vec3::ZERO; 5], Topology::Closed);
        assert!(k.adjacent(0, 4));
        assert!(!k.adjacent(0, 2));
        let l = PLKnot::new_unchecked(vec![Vec3::ZERO; 5], Topology::Long);
        assert!(!l.adjacent(0, 3));
        assert_eq!(l.edge_count(), 4);
    }
}
