//! Crossing changes realised as local strand swaps, oriented resolutions,
//! and the identities they satisfy.

use serde::{Deserialize, Serialize};

use super::{nu2, EvalOptions};
use crate::error::{Error, Result};
use crate::geom::{Point3, Vec3};
use crate::knotmodel::{picture_frame, project_to_diagram, PLKnot};
use crate::oracle::linking_oracle;

/// A crossing of a diagram, located on the knot.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossingSite {
    pub direction: Vec3,
    pub over_edge: usize,
    pub over_param: f64,
    pub under_edge: usize,
    pub under_param: f64,
    pub sign: i8,
    pub point: [f64; 2],
    /// Half-length, in the picture plane, of the neighbourhood that is modified.
    pub reach: f64,
}

/// Crossings of the projection of a knot along `direction` whose strands
/// both belong to the knot (not to the closing arc of a long knot).
pub fn crossing_sites(knot: &PLKnot, direction: Vec3, rel: f64) -> Result<Vec<CrossingSite>> {
    let diagram = project_to_diagram(knot, direction, rel)?;
    let e = knot.edge_count();
    let d = diagram.direction;
    let (fa, fb) = picture_frame(d);
    let proj = |p: Point3| [p.dot(fa), p.dot(fb)];
    let segs: Vec<([f64; 2], [f64; 2])> = knot
        .edges()
        .map(|s| (proj(s.start), proj(s.end)))
        .collect();
    let mut out = Vec::new();
    for c in &diagram.crossings {
        let (oe, ue) = (c.over.floor() as usize, c.under.floor() as usize);
        if oe >= e || ue >= e {
            continue;
        }
        let (op, up) = (c.over - oe as f64, c.under - ue as f64);
        // clearance from every other projected edge and every other crossing
        let mut clear = f64::INFINITY;
        for (i, (a, b)) in segs.iter().enumerate() {
            if i == oe || i == ue {
                continue;
            }
            clear = clear.min(dist_point_seg(c.point, *a, *b));
        }
        for o in &diagram.crossings {
            if o.point != c.point {
                clear = clear.min((o.point[0] - c.point[0]).hypot(o.point[1] - c.point[1]));
            }
        }
        let len = |i: usize| {
            let (a, b) = segs[i];
            (b[0] - a[0]).hypot(b[1] - a[1])
        };
        let reach = (0.25 * clear)
            .min(0.25 * op.min(1.0 - op) * len(oe))
            .min(0.25 * up.min(1.0 - up) * len(ue));
        out.push(CrossingSite {
            direction: d,
            over_edge: oe,
            over_param: op,
            under_edge: ue,
            under_param: up,
            sign: c.sign,
            point: c.point,
            reach,
        });
    }
    Ok(out)
}

fn dist_point_seg(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let l2 = d[0] * d[0] + d[1] * d[1];
    let t = if l2 == 0.0 {
        0.0
    } else {
        (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / l2).clamp(0.0, 1.0)
    };
    (p[0] - a[0] - t * d[0]).hypot(p[1] - a[1] - t * d[1])
}

/// The three vertices replacing the over strand near a crossing: it dips
/// straight down the viewing direction to pass below the under strand.
fn detour(knot: &PLKnot, s: &CrossingSite) -> (f64, [Point3; 3]) {
    let ea = knot.edge(s.over_edge);
    let eb = knot.edge(s.under_edge);
    let (fa, fb) = picture_frame(s.direction);
    let v = ea.vector();
    let len2 = v.dot(fa).hypot(v.dot(fb));
    let du = s.reach / len2;
    let pa = ea.at(s.over_param);
    let pb = eb.at(s.under_param);
    let gap = (pa - pb).dot(s.direction);
    let a2 = pa - s.direction * (1.25 * gap);
    (
        s.over_param,
        [ea.at(s.over_param - du), a2, ea.at(s.over_param + du)],
    )
}

fn ball_of(knot: &PLKnot, s: &CrossingSite) -> Ball {
    let (_, pts) = detour(knot, s);
    let pb = knot.edge(s.under_edge).at(s.under_param);
    let all = [pts[0], pts[1], pts[2], pb];
    let mut lo = all[0];
    let mut hi = all[0];
    for p in &all {
        lo = lo.component_min(*p);
        hi = hi.component_max(*p);
    }
    let center = (lo + hi) * 0.5;
    let radius = all.iter().map(|p| p.distance(center)).fold(0.0, f64::max) * 1.01;
    Ball { center, radius }
}

/// Swap over and under at each site (all sites refer to `knot`).
pub fn apply_crossing_changes(knot: &PLKnot, sites: &[CrossingSite]) -> Result<PLKnot> {
    let mut inserts: Vec<Vec<(f64, [Point3; 3])>> = vec![Vec::new(); knot.edge_count()];
    for s in sites {
        inserts[s.over_edge].push(detour(knot, s));
    }
    let mut verts = Vec::new();
    for (i, v) in knot.vertices().iter().enumerate() {
        verts.push(*v);
        if i < inserts.len() {
            let mut list = inserts[i].clone();
            list.sort_by(|a, b| a.0.total_cmp(&b.0));
            for (_, pts) in list {
                verts.extend_from_slice(&pts);
            }
        }
    }
    PLKnot::new(verts, knot.topology())
}

/// The oriented resolution of a closed knot at a crossing: two closed polygons.
pub fn resolve_crossing(knot: &PLKnot, s: &CrossingSite) -> Result<(Vec<Point3>, Vec<Point3>)> {
    if !knot.is_closed() {
        return Err(Error::Unsupported("resolution needs a closed knot".into()));
    }
    let (fa, fb) = picture_frame(s.direction);
    let n = knot.vertex_count();
    let ends = |edge: usize, param: f64| {
        let e = knot.edge(edge);
        let v = e.vector();
        let du = s.reach / v.dot(fa).hypot(v.dot(fb));
        (e.at(param - du), e.at(param + du))
    };
    let (a_minus, a_plus) = ends(s.over_edge, s.over_param);
    let (b_minus, b_plus) = ends(s.under_edge, s.under_param);
    let v = knot.vertices();
    let arc = |from_edge: usize, to_edge: usize| -> Vec<Point3> {
        let mut out = Vec::new();
        let mut i = (from_edge + 1) % n;
        loop {
            out.push(v[i]);
            if i == to_edge {
                break;
            }
            i = (i + 1) % n;
        }
        out
    };
    let mut c1 = vec![a_plus];
    c1.extend(arc(s.over_edge, s.under_edge));
    c1.push(b_minus);
    let mut c2 = vec![b_plus];
    c2.extend(arc(s.under_edge, s.over_edge));
    c2.push(a_minus);
    PLKnot::closed(c1.clone())?;
    PLKnot::closed(c2.clone())?;
    Ok((c1, c2))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Point3,
    pub radius: f64,
}

/// Conservative test: `false` only when no straight line meets all three
/// balls. A line meeting the first two at `q1 != q2` meets the third at
/// `q1 + t (q2 - q1)`, which forces
/// `|c3 - c1 - t (c2 - c1)| <= r3 + |1 - t| r1 + |t| r2` for some real `t`.
pub fn balls_admit_common_line(b: &[Ball; 3]) -> bool {
    for (i, j, k) in [(0, 1, 2), (0, 2, 1), (1, 2, 0)] {
        let (b1, b2, b3) = (b[i], b[j], b[k]);
        let w = b2.center - b1.center;
        let wn = w.norm();
        if wn <= b1.radius + b2.radius {
            return true;
        }
        let u = b3.center - b1.center;
        let g = |t: f64| (u - w * t).norm() - (b3.radius + (1.0 - t).abs() * b1.radius + t.abs() * b2.radius);
        let big = (u.norm() + b3.radius + b1.radius) / (wn - b1.radius - b2.radius) + 1.0;
        let lip = wn + b1.radius + b2.radius;
        let steps = 20_000;
        let h = 2.0 * big / steps as f64;
        let mut min = f64::INFINITY;
        for s in 0..=steps {
            min = min.min(g(-big + h * s as f64));
        }
        if min <= lip * h {
            return true;
        }
    }
    false
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TypeTwoResult {
    /// `nu2(K_sigma)` indexed by the bit mask of applied changes.
    pub values: [i64; 8],
    pub alternating_sum: i64,
    /// Whether the balls were certified to admit no common line.
    pub balls_separated: bool,
}

/// Alternating sum of `nu2` over the eight knots obtained by applying subsets
/// of three crossing changes.
pub fn type_two_check(knot: &PLKnot, sites: &[CrossingSite; 3], opts: &EvalOptions) -> Result<TypeTwoResult> {
    let balls = sites.map(|s| ball_of(knot, &s));
    let separated = !balls_admit_common_line(&balls);
    let mut values = [0i64; 8];
    for (mask, val) in values.iter_mut().enumerate() {
        let chosen: Vec<CrossingSite> = (0..3).filter(|b| mask >> b & 1 == 1).map(|b| sites[b]).collect();
        let k = apply_crossing_changes(knot, &chosen)?;
        *val = nu2(&k, opts)?.value;
    }
    let sum = values
        .iter()
        .enumerate()
        .map(|(m, v)| if (m as u32).count_ones() % 2 == 0 { *v } else { -*v })
        .sum();
    Ok(TypeTwoResult {
        values,
        alternating_sum: sum,
        balls_separated: separated,
    })
}

pub fn crossing_balls(knot: &PLKnot, sites: &[CrossingSite; 3]) -> [Ball; 3] {
    sites.map(|s| ball_of(knot, &s))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivativeCheck {
    pub nu2_plus: i64,
    pub nu2_minus: i64,
    pub linking: i64,
    pub holds: bool,
}

/// `nu2(K+) - nu2(K-) = lk(L0)` at one crossing of a closed knot.
pub fn crossing_change_derivative(knot: &PLKnot, site: &CrossingSite, opts: &EvalOptions) -> Result<DerivativeCheck> {
    let changed = apply_crossing_changes(knot, std::slice::from_ref(site))?;
    let (plus, minus) = if site.sign > 0 {
        (knot.clone(), changed)
    } else {
        (changed, knot.clone())
    };
    let (c1, c2) = resolve_crossing(knot, site)?;
    let lk = linking_oracle(&c1, &c2, opts.seed, opts.tolerance)?.value;
    let np = nu2(&plus, opts)?.value;
    let nm = nu2(&minus, opts)?.value;
    Ok(DerivativeCheck {
        nu2_plus: np,
        nu2_minus: nm,
        linking: lk,
        holds: np - nm == lk,
    })
}
