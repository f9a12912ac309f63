//! Pseudo-arclength continuation of the collinearity curves.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::residual::{jacobian, tangent, Label, System};
use super::seeds::{newton_2d, roots_2d, Face, GridOptions, SeedScan};
use crate::error::{Error, Result};
use crate::geom::{Mat3, Vec3};
use crate::knotmodel::SmoothKnot;

/// Step control of the continuation, in parameter units.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuationOptions {
    pub initial_step: f64,
    pub min_step: f64,
    pub max_step: f64,
    pub max_steps: usize,
}

impl Default for ContinuationOptions {
    fn default() -> Self {
        ContinuationOptions {
            initial_step: 1e-3,
            min_step: 1e-8,
            max_step: 4e-3,
            max_steps: 400_000,
        }
    }
}

/// A traced component of Co1 or Co3, as a polyline in `(t1, t2, t3)`.
///
/// Points run in the direction of the curve's orientation: the tangent is
/// `grad F1 x grad F2` for the two collinearity equations written in a frame
/// `(e1, e2)` with `e1 x e2` along `f(t3) - f(t1)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CollinearityCurve {
    pub label: Label,
    pub points: Vec<[f64; 3]>,
    /// Faces of the first and last point; `None` for a closed component.
    pub ends: Option<[Face; 2]>,
    /// Indices of the seeds at the first and last point.
    pub seeds: Option<[usize; 2]>,
}

impl CollinearityCurve {
    pub fn is_closed(&self) -> bool {
        self.ends.is_none()
    }

    /// Segments of the polyline, including the closing one for loops.
    pub fn segments(&self) -> impl Iterator<Item = ([f64; 3], [f64; 3])> + '_ {
        let n = self.points.len();
        let count = if self.is_closed() { n } else { n.saturating_sub(1) };
        (0..count).map(move |i| (self.points[i], self.points[(i + 1) % n]))
    }
}

fn v(t: [f64; 3]) -> Vec3 {
    Vec3::from(t)
}

/// Solve `rows x = rhs` for a 3x3 system.
fn solve3(rows: [[f64; 3]; 3], rhs: [f64; 3]) -> Option<[f64; 3]> {
    let m = Mat3::from_rows(v(rows[0]), v(rows[1]), v(rows[2]));
    let inv = m.inverse()?;
    let x = inv.mul_vec(v(rhs));
    x.is_finite().then_some(x.to_array())
}

/// Newton correction onto the curve with one extra linear or face equation.
///
/// `extra(t)` returns the value and gradient of the third equation.
fn correct<E>(f: &SmoothKnot, start: [f64; 3], extra: E) -> Option<([f64; 3], usize)>
where
    E: Fn([f64; 3]) -> (f64, [f64; 3]),
{
    let mut z = start;
    for it in 0..12 {
        let sys = System::at(f, z);
        let frame = sys.frame();
        let g = frame.project(sys.r);
        let (c, grad) = extra(z);
        let gn = g[0].hypot(g[1]) / sys.scale();
        if it > 0 && gn <= 1e-12 && c.abs() <= 1e-13 {
            return Some((z, it));
        }
        let j = jacobian(f, z, &frame);
        let dz = solve3([j[0], j[1], grad], [-g[0], -g[1], -c])?;
        for k in 0..3 {
            z[k] += dz[k];
        }
        if v(dz).norm() > 0.1 {
            return None;
        }
    }
    None
}

/// Result of one continuation run.
struct Walk {
    points: Vec<[f64; 3]>,
    /// Face reached, or `None` when the walk closed up on itself.
    end: Option<Face>,
}

fn walk(
    f: &SmoothKnot,
    start: [f64; 3],
    dir0: Vec3,
    label: Label,
    closed: bool,
    opts: &ContinuationOptions,
) -> Result<Walk> {
    let mut x = start;
    let mut dir = dir0;
    let mut h = opts.initial_step;
    let mut points = vec![x];
    let mut travelled = 0.0;
    for _ in 0..opts.max_steps {
        let y = [x[0] + h * dir.x, x[1] + h * dir.y, x[2] + h * dir.z];
        let step = correct(f, y, |t| {
            let c = (v(t) - v(y)).dot(dir);
            (c, dir.to_array())
        })
        .and_then(|(z, iters)| {
            let dz = v(z) - v(x);
            if dz.norm() > 2.0 * h || dz.dot(dir) <= 0.0 {
                return None;
            }
            let tz = tangent(f, z)?;
            let tz = if tz.dot(dir) < 0.0 { -tz } else { tz };
            (tz.dot(dir) >= 0.995).then_some((z, tz, iters))
        });
        let Some((z, tz, iters)) = step else {
            h *= 0.5;
            if h < opts.min_step {
                return Err(Error::ContinuationStall(format!(
                    "step underflow at t = ({:.6}, {:.6}, {:.6})",
                    x[0], x[1], x[2]
                )));
            }
            continue;
        };
        // first face crossed on the way from x to z
        let exit = Face::ALL
            .iter()
            .filter(|fc| fc.gap(z) < 0.0)
            .map(|&fc| {
                let (gx, gz) = (fc.gap(x), fc.gap(z));
                (fc, gx / (gx - gz))
            })
            .min_by(|p, q| p.1.total_cmp(&q.1));
        if let Some((face, s)) = exit {
            let guess = (v(x) + (v(z) - v(x)) * s).to_array();
            let normal = face.inward();
            let (b, _) = correct(f, guess, |t| (face.gap(t), normal)).ok_or_else(|| {
                Error::ContinuationStall(format!(
                    "could not land on face {} near {guess:?}",
                    face.name()
                ))
            })?;
            points.push(b);
            return Ok(Walk {
                points,
                end: Some(face),
            });
        }
        if System::at(f, z).label() != label {
            return Err(Error::ContinuationStall(format!(
                "curve changed type at t = {z:?}"
            )));
        }
        travelled += (v(z) - v(x)).norm();
        points.push(z);
        if closed && travelled > 10.0 * opts.max_step && v(z).distance(v(start)) < 1.5 * h {
            return Ok(Walk { points, end: None });
        }
        x = z;
        dir = tz;
        if iters <= 3 {
            h = (1.5 * h).min(opts.max_step);
        }
    }
    Err(Error::ContinuationStall(format!(
        "no boundary reached within {} steps",
        opts.max_steps
    )))
}

/// Trace a curve from every seed and pair the seeds up.
///
/// Each curve is traced from both of its ends; the two runs must land on
/// each other's seed, so every seed is consumed exactly once.
pub fn trace_curves(
    f: &SmoothKnot,
    scan: &SeedScan,
    opts: &ContinuationOptions,
) -> Result<Vec<CollinearityCurve>> {
    let seeds = &scan.seeds;
    let runs: Vec<Result<(usize, Walk, bool)>> = seeds
        .par_iter()
        .map(|seed| {
            let tan = tangent(f, seed.t).ok_or_else(|| {
                Error::SeedResolutionFailure(format!("singular collinearity system at {:?}", seed.t))
            })?;
            let inward = seed.face.inward();
            let s = tan.dot(v(inward)) / v(inward).norm();
            if s.abs() < 1e-6 {
                return Err(Error::SeedResolutionFailure(format!(
                    "curve tangent to face {} at {:?}",
                    seed.face.name(),
                    seed.t
                )));
            }
            let forward = s > 0.0;
            let dir = if forward { tan } else { -tan };
            let w = walk(f, seed.t, dir, seed.label, false, opts)?;
            let end = *w.points.last().unwrap();
            let face = w.end.unwrap();
            let partner = seeds.iter().position(|q| {
                q.face == face && q.label == seed.label && v(q.t).distance(v(end)) < 1e-6
            });
            let partner = partner.ok_or_else(|| {
                Error::UnconsumedSeed(format!(
                    "curve from {:?} reached face {} at {end:?} where no seed was found",
                    seed.t,
                    face.name()
                ))
            })?;
            Ok((partner, w, forward))
        })
        .collect();
    let mut done = Vec::with_capacity(runs.len());
    for r in runs {
        done.push(r?);
    }
    let mut curves = Vec::new();
    for (i, (j, w, forward)) in done.iter().enumerate() {
        let j = *j;
        if j == i || done[j].0 != i {
            return Err(Error::UnconsumedSeed(format!(
                "seed {i} pairs with {j}, which pairs with {}",
                done[j].0
            )));
        }
        if i > j {
            continue;
        }
        let mut points = w.points.clone();
        let mut ends = [seeds[i].face, seeds[j].face];
        let mut ids = [i, j];
        if !forward {
            points.reverse();
            ends.swap(0, 1);
            ids.swap(0, 1);
        }
        curves.push(CollinearityCurve {
            label: seeds[i].label,
            points,
            ends: Some(ends),
            seeds: Some(ids),
        });
    }
    Ok(curves)
}

/// Where the polyline of `curve` crosses the plane `t2 = c`.
fn slice_crossings(curve: &CollinearityCurve, c: f64) -> Vec<[f64; 3]> {
    let mut out = Vec::new();
    for (p, q) in curve.segments() {
        let (gp, gq) = (p[1] - c, q[1] - c);
        if (gp < 0.0) != (gq < 0.0) {
            let s = gp / (gp - gq);
            out.push((v(p) + (v(q) - v(p)) * s).to_array());
        }
    }
    out
}

/// Search slices `t2 = const` for collinear triples not on any traced curve
/// and trace the closed components through them.
pub fn scan_closed_components(
    f: &SmoothKnot,
    curves: &[CollinearityCurve],
    slices: usize,
    grid: &GridOptions,
    opts: &ContinuationOptions,
) -> Result<Vec<CollinearityCurve>> {
    let n = grid.cells.max(8) / 2;
    let mut loops: Vec<CollinearityCurve> = Vec::new();
    for k in 1..=slices {
        let c = k as f64 / (slices + 1) as f64;
        let point = |x: f64, y: f64| [c * x, c, c + (1.0 - c) * y];
        // the corner x = 1, y = 0 is t1 = t2 = t3, where the system vanishes
        let keep = |i: usize, j: usize| !(i + 1 == n && j == 0) && !(f.opened && i == 0 && j + 1 == n);
        let roots = roots_2d(f, point, ([0.0, 1.0], [0.0, 1.0]), (n, n), grid.depth, keep)?;
        // exact slice points of the curves known so far
        let mut known: Vec<(Label, [f64; 2])> = Vec::new();
        for curve in curves.iter().chain(loops.iter()) {
            for p in slice_crossings(curve, c) {
                let guess = [p[0] / c, (p[2] - c) / (1.0 - c)];
                if let Some(r) = newton_2d(f, &point, guess) {
                    known.push((curve.label, [r.a, r.b]));
                }
            }
        }
        for r in roots {
            if !(r.a > 0.0 && r.a < 1.0 && r.b > 0.0 && r.b < 1.0) {
                continue;
            }
            let t = point(r.a, r.b);
            let label = System::at(f, t).label();
            if label == Label::Co2 {
                continue;
            }
            let on_curve = known
                .iter()
                .any(|(l, q)| *l == label && (q[0] - r.a).abs() < 1e-7 && (q[1] - r.b).abs() < 1e-7);
            if on_curve {
                continue;
            }
            let tan = tangent(f, t).ok_or_else(|| {
                Error::ContinuationStall(format!("singular collinearity system at {t:?}"))
            })?;
            let w = walk(f, t, tan, label, true, opts)?;
            if w.end.is_some() {
                return Err(Error::UnconsumedSeed(format!(
                    "curve through {t:?} reaches the boundary away from every seed"
                )));
            }
            let lp = CollinearityCurve {
                label,
                points: w.points,
                ends: None,
                seeds: None,
            };
            for p in slice_crossings(&lp, c) {
                let guess = [p[0] / c, (p[2] - c) / (1.0 - c)];
                if let Some(q) = newton_2d(f, &point, guess) {
                    known.push((label, [q.a, q.b]));
                }
            }
            loops.push(lp);
        }
    }
    Ok(loops)
}
