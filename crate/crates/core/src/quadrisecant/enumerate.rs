use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::classify::sign_epsilon;
use crate::error::{Error, Result};
use crate::geom::{segment_closest, transversals_of_four_segments, Line, Point3, Segment, Tolerance, Vec3};
use crate::knotmodel::PLKnot;

/// A quadrisecant hit point, interior to an edge.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hit {
    pub edge: usize,
    pub param: f64,
    pub point: Point3,
    /// Unit direction of the edge.
    pub tangent: Vec3,
}

impl Hit {
    /// Position along the knot, `edge + param`.
    pub fn position(&self) -> f64 {
        self.edge as f64 + self.param
    }
}

/// `sigma[k]` is the knot-order label (1-based) of the `k`-th point along
/// the line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Permutation(pub [u8; 4]);

impl Permutation {
    /// The type counted by the long-knot formula, `(1342)` in cycle notation.
    pub const COUNTED: Permutation = Permutation([3, 1, 4, 2]);

    /// Admissible: label 1 comes before label 2 along the line.
    pub fn is_admissible(&self) -> bool {
        let pos = |l: u8| self.0.iter().position(|&x| x == l).unwrap();
        pos(1) < pos(2)
    }

    /// All 12 admissible permutations.
    pub fn admissible() -> Vec<Permutation> {
        let mut out = Vec::new();
        for a in 1..=4u8 {
            for b in 1..=4u8 {
                for c in 1..=4u8 {
                    for d in 1..=4u8 {
                        let p = [a, b, c, d];
                        let mut s = p;
                        s.sort_unstable();
                        if s == [1, 2, 3, 4] && Permutation(p).is_admissible() {
                            out.push(Permutation(p));
                        }
                    }
                }
            }
        }
        out
    }

    /// Cycle notation of `k -> sigma[k-1]`, fixed points omitted.
    pub fn cycles(&self) -> String {
        let mut seen = [false; 4];
        let mut out = String::new();
        for start in 1..=4u8 {
            if seen[start as usize - 1] || self.0[start as usize - 1] == start {
                continue;
            }
            out.push('(');
            let mut k = start;
            while !seen[k as usize - 1] {
                seen[k as usize - 1] = true;
                out.push(char::from(b'0' + k));
                k = self.0[k as usize - 1];
            }
            out.push(')');
        }
        if out.is_empty() {
            out.push_str("()");
        }
        out
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.cycles())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Quadrisecant {
    /// Oriented so the first knot-order hit precedes the second.
    pub line: Line,
    /// Hits in knot order (linear order of `edge + param`).
    pub hits: [Hit; 4],
    /// Knot-order indices of the hits sorted along the line.
    pub line_order: [usize; 4],
    pub sigma: Permutation,
    /// Sign with the knot-order labelling.
    pub epsilon: i8,
}

impl Quadrisecant {
    /// Build a quadrisecant from four collinear hits given in any order.
    pub fn from_hits(mut hits: [Hit; 4], tol: &Tolerance) -> Result<Quadrisecant> {
        hits.sort_by(|a, b| a.position().total_cmp(&b.position()));
        let dir = (hits[1].point - hits[0].point)
            .normalized()
            .ok_or_else(|| Error::DegenerateConfiguration("coincident hits".into()))?;
        let line = Line::new(hits[0].point, dir);
        let coord = hits.map(|h| (h.point - hits[0].point).dot(dir));
        let mut line_order = [0usize, 1, 2, 3];
        line_order.sort_by(|&a, &b| coord[a].total_cmp(&coord[b]));
        let mut sigma = [0u8; 4];
        for (k, &i) in line_order.iter().enumerate() {
            sigma[k] = i as u8 + 1;
        }
        let epsilon = sign_epsilon(&hits.map(|h| h.point), &hits.map(|h| h.tangent), tol)?;
        Ok(Quadrisecant {
            line,
            hits,
            line_order,
            sigma: Permutation(sigma),
            epsilon,
        })
    }

    /// Coordinate of each knot-order hit along the oriented line.
    pub fn line_coordinates(&self) -> [f64; 4] {
        self.hits
            .map(|h| (h.point - self.line.point).dot(self.line.dir))
    }

    pub fn edges(&self) -> [usize; 4] {
        self.hits.map(|h| h.edge)
    }
}

fn line_segment_distance(line: &Line, a: Point3, b: Point3, reach: f64) -> f64 {
    let p0 = line.point - line.dir * reach;
    let p1 = line.point + line.dir * reach;
    segment_closest(p0, p1, a, b).2
}

/// Quadrisecants whose lowest edge index is `i`.
fn quadrisecants_from(knot: &PLKnot, segs: &[Segment], i: usize, tol: &Tolerance) -> Result<Vec<Quadrisecant>> {
    let e = segs.len();
    let mut out = Vec::new();
    for j in i + 1..e {
        for k in j + 1..e {
            for l in k + 1..e {
                let quad = [segs[i], segs[j], segs[k], segs[l]];
                let ts = transversals_of_four_segments(&quad, tol).map_err(|err| {
                    Error::GenericityFailure(format!("edges ({i},{j},{k},{l}): {err}"))
                })?;
                for t in ts {
                    let edges = [i, j, k, l];
                    let hits = [0, 1, 2, 3].map(|m| Hit {
                        edge: edges[m],
                        param: t.params[m],
                        point: t.points[m],
                        tangent: knot.tangent(edges[m]),
                    });
                    let q = Quadrisecant::from_hits(hits, tol).map_err(|err| {
                        Error::GenericityFailure(format!("edges ({i},{j},{k},{l}): {err}"))
                    })?;
                    out.push(q);
                }
            }
        }
    }
    Ok(out)
}

/// Fifth-edge check and the canonical sort.
fn finish(knot: &PLKnot, segs: &[Segment], mut all: Vec<Quadrisecant>, tol: &Tolerance) -> Result<Vec<Quadrisecant>> {
    let reach = 4.0 * knot.diagonal();
    for q in &all {
        let used = q.edges();
        for (m, s) in segs.iter().enumerate() {
            if used.contains(&m) {
                continue;
            }
            if line_segment_distance(&q.line, s.start, s.end, reach) <= tol.length() {
                return Err(Error::GenericityFailure(format!(
                    "quadrisecant through edges {used:?} also meets edge {m}"
                )));
            }
        }
    }
    all.sort_by(|a, b| {
        a.edges().cmp(&b.edges()).then_with(|| {
            a.hits
                .map(|h| h.param)
                .partial_cmp(&b.hits.map(|h| h.param))
                .unwrap_or(std::cmp::Ordering::Equal)
        })
    });
    Ok(all)
}

/// All quadrisecants of a knot, sorted by edges then parameters.
///
/// Edge quadruples are solved in parallel; the result does not depend on
/// the iteration order or the number of threads. Any degeneracy (a hit at a
/// vertex, a tangential line, a line meeting a fifth edge, a non-transverse
/// sign matrix) is reported as [`Error::GenericityFailure`].
pub fn enumerate_quadrisecants(knot: &PLKnot, tol: &Tolerance) -> Result<Vec<Quadrisecant>> {
    let segs: Vec<Segment> = knot.edges().collect();
    let per_first: Vec<Result<Vec<Quadrisecant>>> = (0..segs.len())
        .into_par_iter()
        .map(|i| quadrisecants_from(knot, &segs, i, tol))
        .collect();
    let mut all = Vec::new();
    for r in per_first {
        all.extend(r?);
    }
    finish(knot, &segs, all, tol)
}

/// Sequential enumeration visiting lowest edge indices in the given order
/// (a permutation of `0..edge_count`). Same result as
/// [`enumerate_quadrisecants`].
pub fn enumerate_quadrisecants_in_order(knot: &PLKnot, tol: &Tolerance, order: &[usize]) -> Result<Vec<Quadrisecant>> {
    let segs: Vec<Segment> = knot.edges().collect();
    let mut seen = vec![false; segs.len()];
    for &i in order {
        if i >= segs.len() || std::mem::replace(&mut seen[i], true) {
            return Err(Error::Unsupported("order is not a permutation of the edges".into()));
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::Unsupported("order is not a permutation of the edges".into()));
    }
    let mut all = Vec::new();
    for &i in order.iter().rev() {
        let mut part = quadrisecants_from(knot, &segs, i, tol)?;
        part.reverse();
        all.extend(part);
    }
    finish(knot, &segs, all, tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn admissible_count_and_cycles() {
        let a = Permutation::admissible();
        assert_eq!(a.len(), 12);
        assert!(a.contains(&Permutation::COUNTED));
        assert_eq!(Permutation::COUNTED.cycles(), "(1342)");
        assert_eq!(Permutation([1, 2, 3, 4]).cycles(), "()");
        assert!(!Permutation([2, 1, 3, 4]).is_admissible());
    }
}
