//! Incremental 3D convex hull and the extremal components of a polygon.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::knot::PLKnot;
use crate::error::{Error, Result};
use crate::geom::{Point3, Vec3};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Facet {
    pub vertices: [usize; 3],
    /// Outward unit normal.
    pub normal: Vec3,
    pub offset: f64,
}

impl Facet {
    pub fn signed_distance(&self, p: Point3) -> f64 {
        self.normal.dot(p) - self.offset
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvexHull {
    pub facets: Vec<Facet>,
    /// Set when all points are within tolerance of one plane; `facets` then
    /// holds the two sides of that plane as a single facet each.
    pub planar: bool,
}

fn facet(points: &[Point3], a: usize, b: usize, c: usize) -> Option<Facet> {
    let n = (points[b] - points[a]).cross(points[c] - points[a]).normalized()?;
    Some(Facet {
        vertices: [a, b, c],
        normal: n,
        offset: n.dot(points[a]),
    })
}

impl ConvexHull {
    /// Hull of `points`; `eps` is the absolute coplanarity tolerance.
    pub fn build(points: &[Point3], eps: f64) -> Result<ConvexHull> {
        if points.len() < 3 {
            return Err(Error::DegenerateHull("fewer than three points".into()));
        }
        // initial simplex: two far points, the point furthest from their line,
        // the point furthest from that plane
        let p0 = 0;
        let p1 = (0..points.len())
            .max_by(|&i, &j| {
                points[i]
                    .distance(points[p0])
                    .total_cmp(&points[j].distance(points[p0]))
            })
            .unwrap();
        let p1b = (0..points.len())
            .max_by(|&i, &j| {
                points[i]
                    .distance(points[p1])
                    .total_cmp(&points[j].distance(points[p1]))
            })
            .unwrap();
        let (a, b) = (p1, p1b);
        let ab = points[b] - points[a];
        if ab.norm() <= eps {
            return Err(Error::DegenerateHull("all points coincide".into()));
        }
        let line_dist = |i: usize| ab.cross(points[i] - points[a]).norm() / ab.norm();
        let c = (0..points.len())
            .max_by(|&i, &j| line_dist(i).total_cmp(&line_dist(j)))
            .unwrap();
        if line_dist(c) <= eps {
            return Err(Error::DegenerateHull("points are collinear".into()));
        }
        let base = facet(points, a, b, c).unwrap();
        let d = (0..points.len())
            .max_by(|&i, &j| {
                base.signed_distance(points[i])
                    .abs()
                    .total_cmp(&base.signed_distance(points[j]).abs())
            })
            .unwrap();
        if base.signed_distance(points[d]).abs() <= eps {
            let mut flip = base;
            flip.normal = -base.normal;
            flip.offset = -base.offset;
            flip.vertices = [a, c, b];
            return Ok(ConvexHull {
                facets: vec![base, flip],
                planar: true,
            });
        }
        let mut facets: Vec<Facet> = Vec::new();
        let (b, c) = if base.signed_distance(points[d]) > 0.0 {
            (c, b)
        } else {
            (b, c)
        };
        for tri in [[a, b, c], [a, d, b], [b, d, c], [c, d, a]] {
            facets.push(facet(points, tri[0], tri[1], tri[2]).unwrap());
        }
        let used: HashSet<usize> = [a, b, c, d].into_iter().collect();
        for (i, p) in points.iter().enumerate() {
            if used.contains(&i) {
                continue;
            }
            let visible: Vec<bool> = facets
                .iter()
                .map(|f| f.signed_distance(*p) > eps)
                .collect();
            if !visible.iter().any(|&v| v) {
                continue;
            }
            let mut edges: HashSet<(usize, usize)> = HashSet::new();
            for (f, _) in facets.iter().zip(&visible).filter(|(_, &v)| v) {
                let [x, y, z] = f.vertices;
                for e in [(x, y), (y, z), (z, x)] {
                    edges.insert(e);
                }
            }
            let mut next: Vec<Facet> = facets
                .iter()
                .zip(&visible)
                .filter(|(_, &v)| !v)
                .map(|(f, _)| *f)
                .collect();
            let mut horizon: Vec<(usize, usize)> = edges
                .iter()
                .filter(|(x, y)| !edges.contains(&(*y, *x)))
                .copied()
                .collect();
            horizon.sort_unstable();
            for (x, y) in horizon {
                if let Some(f) = facet(points, x, y, i) {
                    next.push(f);
                }
            }
            facets = next;
        }
        Ok(ConvexHull {
            facets,
            planar: false,
        })
    }

    /// Indices of the facets whose supporting plane passes within `eps` of `p`.
    pub fn supporting_facets(&self, p: Point3, eps: f64) -> Vec<usize> {
        self.facets
            .iter()
            .enumerate()
            .filter(|(_, f)| f.signed_distance(p).abs() <= eps)
            .map(|(i, _)| i)
            .collect()
    }

    /// Whether `p` lies inside the hull (within `eps`).
    pub fn contains(&self, p: Point3, eps: f64) -> bool {
        if self.planar {
            return self.facets[0].signed_distance(p).abs() <= eps;
        }
        self.facets.iter().all(|f| f.signed_distance(p) <= eps)
    }

    /// Average outward normal of the facets supporting `p`.
    pub fn outward_normal(&self, p: Point3, eps: f64) -> Option<Vec3> {
        let fs = self.supporting_facets(p, eps);
        if fs.is_empty() {
            return None;
        }
        let mut n = Vec3::ZERO;
        for i in fs {
            n += self.facets[i].normal;
        }
        n.normalized().or(Some(self.facets[0].normal))
    }
}

/// A maximal run of consecutive extremal vertices joined by extremal edges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtremalComponent {
    /// Vertex indices in knot order.
    pub vertices: Vec<usize>,
    /// Indices of the hull-lying edges between them.
    pub edges: Vec<usize>,
    /// The component is the whole (planar) knot.
    pub whole: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtremalSet {
    pub hull: ConvexHull,
    pub components: Vec<ExtremalComponent>,
    pub eps: f64,
}

impl ExtremalSet {
    /// Component index containing vertex `v`, if any.
    pub fn component_of_vertex(&self, v: usize) -> Option<usize> {
        self.components.iter().position(|c| c.vertices.contains(&v))
    }
}

/// Extremal components of a closed knot, with `rel` the relative tolerance.
pub fn extremal_set(knot: &PLKnot, rel: f64) -> Result<ExtremalSet> {
    let eps = rel * knot.diagonal();
    let pts = knot.vertices();
    let hull = ConvexHull::build(pts, eps)?;
    let n = pts.len();
    let support: Vec<Vec<usize>> = pts.iter().map(|p| hull.supporting_facets(*p, eps)).collect();
    let on_vertex: Vec<bool> = support.iter().map(|s| !s.is_empty()).collect();
    let e = knot.edge_count();
    let on_edge: Vec<bool> = (0..e)
        .map(|i| {
            let j = (i + 1) % n;
            support[i].iter().any(|f| support[j].contains(f))
        })
        .collect();
    if on_vertex.iter().all(|&v| v) && on_edge.iter().all(|&v| v) && knot.is_closed() {
        return Ok(ExtremalSet {
            hull,
            components: vec![ExtremalComponent {
                vertices: (0..n).collect(),
                edges: (0..e).collect(),
                whole: true,
            }],
            eps,
        });
    }
    // start scanning just after a break so no run wraps around the start
    let start = if knot.is_closed() {
        (0..n)
            .find(|&i| !on_vertex[i] || !on_edge[(i + n - 1) % n])
            .unwrap_or(0)
    } else {
        0
    };
    let mut comps: Vec<ExtremalComponent> = Vec::new();
    let mut current: Option<ExtremalComponent> = None;
    for k in 0..n {
        let i = (start + k) % n;
        if !on_vertex[i] {
            if let Some(c) = current.take() {
                comps.push(c);
            }
            continue;
        }
        let prev_edge = if knot.is_closed() {
            Some((i + n - 1) % n)
        } else if i > 0 {
            Some(i - 1)
        } else {
            None
        };
        let joined = current.is_some() && prev_edge.is_some_and(|pe| on_edge[pe]);
        if joined {
            let c = current.as_mut().unwrap();
            c.edges.push(prev_edge.unwrap());
            c.vertices.push(i);
        } else {
            if let Some(c) = current.take() {
                comps.push(c);
            }
            current = Some(ExtremalComponent {
                vertices: vec![i],
                edges: vec![],
                whole: false,
            });
        }
    }
    if let Some(c) = current.take() {
        comps.push(c);
    }
    comps.sort_by_key(|c| c.vertices[0]);
    Ok(ExtremalSet {
        hull,
        components: comps,
        eps,
    })
}
