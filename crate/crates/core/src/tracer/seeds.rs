//! Boundary points of the collinearity curves on the faces of the simplex.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::residual::{equations, Frame, Label, System, FD_STEP};
use crate::error::{Error, Result};
use crate::knotmodel::SmoothKnot;

/// A codimension-one face of `0 <= t1 <= t2 <= t3 <= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Face {
    /// `t1 = 0`
    F01,
    /// `t1 = t2`
    F12,
    /// `t2 = t3`
    F23,
    /// `t3 = 1`
    F34,
}

impl Face {
    pub const ALL: [Face; 4] = [Face::F01, Face::F12, Face::F23, Face::F34];

    /// The face point with free coordinates `a < b`.
    pub fn embed(self, a: f64, b: f64) -> [f64; 3] {
        match self {
            Face::F01 => [0.0, a, b],
            Face::F12 => [a, a, b],
            Face::F23 => [a, b, b],
            Face::F34 => [a, b, 1.0],
        }
    }

    /// Signed distance-like function, positive inside the simplex.
    pub fn gap(self, t: [f64; 3]) -> f64 {
        match self {
            Face::F01 => t[0],
            Face::F12 => t[1] - t[0],
            Face::F23 => t[2] - t[1],
            Face::F34 => 1.0 - t[2],
        }
    }

    /// Gradient of [`Face::gap`]; the inward normal.
    pub fn inward(self) -> [f64; 3] {
        match self {
            Face::F01 => [1.0, 0.0, 0.0],
            Face::F12 => [-1.0, 1.0, 0.0],
            Face::F23 => [0.0, -1.0, 1.0],
            Face::F34 => [0.0, 0.0, -1.0],
        }
    }

    /// The only label whose curves may end on this face.
    pub fn label(self) -> Label {
        match self {
            Face::F01 | Face::F23 => Label::Co3,
            Face::F12 | Face::F34 => Label::Co1,
        }
    }

    /// For tangential faces, the doubled index and the remaining one (0-based).
    pub fn tangential_indices(self) -> Option<(usize, usize)> {
        match self {
            Face::F12 => Some((0, 2)),
            Face::F23 => Some((1, 0)),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Face::F01 => "(0=1)",
            Face::F12 => "(1=2)",
            Face::F23 => "(2=3)",
            Face::F34 => "(3=4)",
        }
    }
}

/// A boundary point of a collinearity curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Seed {
    pub face: Face,
    pub t: [f64; 3],
    pub label: Label,
}

/// Outcome of the boundary scan.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SeedScan {
    pub seeds: Vec<Seed>,
    /// Solutions with the middle point between the others, which are ignored.
    pub ignored_co2: usize,
}

/// Grid and refinement parameters of the 2-d root finder.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridOptions {
    /// Cells per unit along each axis.
    pub cells: usize,
    /// Levels of cell subdivision before giving up on a cell.
    pub depth: u32,
}

impl Default for GridOptions {
    fn default() -> Self {
        GridOptions {
            cells: 200,
            depth: 4,
        }
    }
}

/// A root of a two-parameter family of the collinearity system.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Root2 {
    pub a: f64,
    pub b: f64,
}

/// Roots of `(a, b) -> equations(point(a, b))` on `[a0, a1] x [b0, b1]`.
///
/// Cells whose boundary winding number is non-zero are refined by Newton's
/// method from the centre; cells where Newton leaves the cell are split.
/// `keep(i, j)` selects the cells of the grid to scan.
pub(crate) fn roots_2d<P, K>(
    f: &SmoothKnot,
    point: P,
    range: ([f64; 2], [f64; 2]),
    cells: (usize, usize),
    depth: u32,
    keep: K,
) -> Result<Vec<Root2>>
where
    P: Fn(f64, f64) -> [f64; 3] + Sync,
    K: Fn(usize, usize) -> bool + Sync,
{
    let ([a0, a1], [b0, b1]) = range;
    let (na, nb) = cells;
    let (ha, hb) = ((a1 - a0) / na as f64, (b1 - b0) / nb as f64);
    // residual vectors on the half-cell lattice
    let (ma, mb) = (2 * na + 1, 2 * nb + 1);
    let nodes: Vec<Vec<System>> = (0..ma)
        .into_par_iter()
        .map(|i| {
            (0..mb)
                .map(|j| {
                    let a = a0 + 0.5 * ha * i as f64;
                    let b = b0 + 0.5 * hb * j as f64;
                    System::at(f, point(a, b))
                })
                .collect()
        })
        .collect();
    let candidates: Vec<(usize, usize)> = (0..na)
        .into_par_iter()
        .flat_map_iter(|i| {
            let nodes = &nodes;
            let keep = &keep;
            (0..nb).filter_map(move |j| {
                if !keep(i, j) {
                    return None;
                }
                let sys = |di: usize, dj: usize| &nodes[2 * i + di][2 * j + dj];
                let frame = sys(1, 1).frame();
                let ring: Vec<[f64; 2]> = RING.iter().map(|&(di, dj)| frame.project(sys(di, dj).r)).collect();
                (winding(&ring) != 0).then_some((i, j))
            })
        })
        .collect();
    let found: Vec<Result<Vec<Root2>>> = candidates
        .par_iter()
        .map(|&(i, j)| {
            let lo = [a0 + ha * i as f64, b0 + hb * j as f64];
            resolve_cell(f, &point, lo, [ha, hb], depth, true)
        })
        .collect();
    let mut roots: Vec<Root2> = Vec::new();
    for r in found {
        for root in r? {
            let dup = roots
                .iter()
                .any(|q| (q.a - root.a).abs() < 1e-9 && (q.b - root.b).abs() < 1e-9);
            if !dup {
                roots.push(root);
            }
        }
    }
    roots.sort_by(|p, q| p.a.total_cmp(&q.a).then(p.b.total_cmp(&q.b)));
    Ok(roots)
}

/// Boundary of a cell on the half-cell lattice, counter-clockwise.
const RING: [(usize, usize); 8] = [(0, 0), (1, 0), (2, 0), (2, 1), (2, 2), (1, 2), (0, 2), (0, 1)];

fn winding(ring: &[[f64; 2]]) -> i32 {
    if ring.iter().any(|v| v[0] == 0.0 && v[1] == 0.0) {
        return 1;
    }
    let mut total = 0.0;
    for k in 0..ring.len() {
        let p = ring[k];
        let q = ring[(k + 1) % ring.len()];
        let mut d = q[1].atan2(q[0]) - p[1].atan2(p[0]);
        while d > std::f64::consts::PI {
            d -= std::f64::consts::TAU;
        }
        while d < -std::f64::consts::PI {
            d += std::f64::consts::TAU;
        }
        total += d;
    }
    (total / std::f64::consts::TAU).round() as i32
}

fn resolve_cell<P>(
    f: &SmoothKnot,
    point: &P,
    lo: [f64; 2],
    h: [f64; 2],
    depth: u32,
    top: bool,
) -> Result<Vec<Root2>>
where
    P: Fn(f64, f64) -> [f64; 3] + Sync,
{
    if !top {
        let centre = System::at(f, point(lo[0] + 0.5 * h[0], lo[1] + 0.5 * h[1]));
        let frame = centre.frame();
        let ring: Vec<[f64; 2]> = RING
            .iter()
            .map(|&(di, dj)| {
                let a = lo[0] + 0.5 * h[0] * di as f64;
                let b = lo[1] + 0.5 * h[1] * dj as f64;
                frame.project(System::at(f, point(a, b)).r)
            })
            .collect();
        if winding(&ring) == 0 {
            return Ok(Vec::new());
        }
    }
    let start = [lo[0] + 0.5 * h[0], lo[1] + 0.5 * h[1]];
    if let Some(r) = newton_2d(f, point, start) {
        let inside = r.a >= lo[0] - 0.5 * h[0]
            && r.a <= lo[0] + 1.5 * h[0]
            && r.b >= lo[1] - 0.5 * h[1]
            && r.b <= lo[1] + 1.5 * h[1];
        if inside {
            return Ok(vec![r]);
        }
    }
    if depth == 0 {
        return Err(Error::SeedResolutionFailure(format!(
            "no root found in cell at ({:.6}, {:.6}) with non-zero winding",
            lo[0], lo[1]
        )));
    }
    let half = [0.5 * h[0], 0.5 * h[1]];
    let mut out = Vec::new();
    for (di, dj) in [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)] {
        let sub = [lo[0] + di * half[0], lo[1] + dj * half[1]];
        out.extend(resolve_cell(f, point, sub, half, depth - 1, false)?);
    }
    if out.is_empty() {
        return Err(Error::SeedResolutionFailure(format!(
            "cell at ({:.6}, {:.6}) has non-zero winding but its subcells do not",
            lo[0], lo[1]
        )));
    }
    Ok(out)
}

/// Damped Newton iteration for the two equations along a 2-d family.
pub(crate) fn newton_2d<P>(f: &SmoothKnot, point: &P, start: [f64; 2]) -> Option<Root2>
where
    P: Fn(f64, f64) -> [f64; 3],
{
    let (mut a, mut b) = (start[0], start[1]);
    for _ in 0..40 {
        let sys = System::at(f, point(a, b));
        let frame: Frame = sys.frame();
        let g = frame.project(sys.r);
        let gn = g[0].hypot(g[1]);
        if gn <= 1e-13 * sys.scale() {
            return Some(Root2 { a, b });
        }
        let ga_p = equations(f, point(a + FD_STEP, b), &frame);
        let ga_m = equations(f, point(a - FD_STEP, b), &frame);
        let gb_p = equations(f, point(a, b + FD_STEP), &frame);
        let gb_m = equations(f, point(a, b - FD_STEP), &frame);
        let j = [
            [(ga_p[0] - ga_m[0]) / (2.0 * FD_STEP), (gb_p[0] - gb_m[0]) / (2.0 * FD_STEP)],
            [(ga_p[1] - ga_m[1]) / (2.0 * FD_STEP), (gb_p[1] - gb_m[1]) / (2.0 * FD_STEP)],
        ];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let da = (g[0] * j[1][1] - g[1] * j[0][1]) / det;
        let db = (j[0][0] * g[1] - j[1][0] * g[0]) / det;
        let mut lambda = 1.0;
        let mut moved = false;
        for _ in 0..12 {
            let (na, nb) = (a - lambda * da, b - lambda * db);
            let ng = equations(f, point(na, nb), &frame);
            if ng[0].hypot(ng[1]) < gn {
                a = na;
                b = nb;
                moved = true;
                break;
            }
            lambda *= 0.5;
        }
        if !moved || !a.is_finite() || !b.is_finite() {
            return None;
        }
    }
    let sys = System::at(f, point(a, b));
    let g = sys.frame().project(sys.r);
    (g[0].hypot(g[1]) <= 1e-11 * sys.scale()).then_some(Root2 { a, b })
}

/// Boundary points of the Co1 and Co3 curves on all four faces.
///
/// Solutions of type Co2 are counted and dropped. A Co1 solution on a face
/// reserved for Co3 (or vice versa) means the knot is not in long position
/// and is reported as [`Error::SeedResolutionFailure`].
pub fn find_boundary_seeds(f: &SmoothKnot, grid: &GridOptions) -> Result<SeedScan> {
    let n = grid.cells;
    let mut scan = SeedScan::default();
    for face in Face::ALL {
        let keep = |i: usize, j: usize| {
            let min_gap = match face {
                Face::F12 | Face::F23 => 2,
                _ => 1,
            };
            if j < i + min_gap {
                return false;
            }
            // f(0) = f(1) for opened closed knots makes the edge t1 = 0,
            // t3 = 1 degenerate
            if f.opened && ((face == Face::F01 && j + 1 == n) || (face == Face::F34 && i == 0)) {
                return false;
            }
            true
        };
        let roots = roots_2d(
            f,
            |a, b| face.embed(a, b),
            ([0.0, 1.0], [0.0, 1.0]),
            (n, n),
            grid.depth,
            keep,
        )?;
        for r in roots {
            if !(r.a > 0.0 && r.b > r.a && r.b < 1.0) {
                continue;
            }
            let t = face.embed(r.a, r.b);
            let label = System::at(f, t).label();
            if label == Label::Co2 {
                scan.ignored_co2 += 1;
            } else if label == face.label() {
                scan.seeds.push(Seed { face, t, label });
            } else {
                return Err(Error::SeedResolutionFailure(format!(
                    "{label:?} solution on face {} at {t:?}",
                    face.name()
                )));
            }
        }
    }
    Ok(scan)
}
