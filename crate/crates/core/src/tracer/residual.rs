//! The collinearity system on the parameter simplex.
//!
//! Collinearity of `f(t1), f(t2), f(t3)` is written as `D12 x D23 = 0` with
//! divided differences `Dij = (f(tj) - f(ti)) / (tj - ti)`, which stays
//! regular on the faces `t1 = t2` and `t2 = t3` where it becomes the
//! tangent-line condition.

use serde::{Deserialize, Serialize};

use crate::geom::{det3, Vec3};
use crate::knotmodel::SmoothKnot;

/// Parameter gap below which divided differences use the Taylor series.
const TAYLOR_GAP: f64 = 1e-3;

/// Finite-difference step for Jacobians, in parameter units.
pub(crate) const FD_STEP: f64 = 1e-7;

/// `(f(b) - f(a)) / (b - a)`, equal to `f'(a)` when `a = b`.
pub fn divided_difference(f: &SmoothKnot, a: f64, b: f64) -> Vec3 {
    let d = b - a;
    if d.abs() < TAYLOR_GAP {
        let m = 0.5 * (a + b);
        let d2 = d * d;
        f.derivative(m, 1) + f.derivative(m, 3) * (d2 / 24.0) + f.derivative(m, 5) * (d2 * d2 / 1920.0)
    } else {
        (f.point(b) - f.point(a)) / d
    }
}

/// Which Co component a collinear triple belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    Co1,
    Co2,
    Co3,
}

impl Label {
    pub fn between_index(self) -> usize {
        match self {
            Label::Co1 => 1,
            Label::Co2 => 2,
            Label::Co3 => 3,
        }
    }
}

/// The collinearity system at one parameter triple.
#[derive(Clone, Copy, Debug)]
pub struct System {
    pub d12: Vec3,
    pub d23: Vec3,
    /// `D12 x D23`; orthogonal to `u`.
    pub r: Vec3,
    /// Unit direction from `f(t1)` to `f(t3)`.
    pub u: Vec3,
}

impl System {
    pub fn at(f: &SmoothKnot, t: [f64; 3]) -> System {
        let d12 = divided_difference(f, t[0], t[1]);
        let d23 = divided_difference(f, t[1], t[2]);
        let chord = f.point(t[2]) - f.point(t[0]);
        let scale = d12.norm().max(d23.norm());
        // the chord vanishes only where f(t1) = f(t3), i.e. at the cut point
        // of an opened closed knot
        let u = if chord.norm() > 1e-9 * scale * (t[2] - t[0]).abs() && chord.norm() > 0.0 {
            chord / chord.norm()
        } else {
            (d12 + d23).normalized().or(d12.normalized()).unwrap_or(Vec3::Z)
        };
        System {
            d12,
            d23,
            r: d12.cross(d23),
            u,
        }
    }

    /// Normalisation for residual tests: `|D12| |D23|`.
    pub fn scale(&self) -> f64 {
        (self.d12.norm() * self.d23.norm()).max(f64::MIN_POSITIVE)
    }

    /// The frame `(e1, e2)` with `e1 x e2 = u`.
    pub fn frame(&self) -> Frame {
        Frame::new(self.u)
    }

    /// Which point is between the other two, read along `u`.
    pub fn label(&self) -> Label {
        if self.d12.dot(self.u) < 0.0 {
            Label::Co1
        } else if self.d23.dot(self.u) < 0.0 {
            Label::Co3
        } else {
            Label::Co2
        }
    }
}

/// Right-handed frame of the plane orthogonal to a chord direction.
#[derive(Clone, Copy, Debug)]
pub struct Frame {
    pub e1: Vec3,
    pub e2: Vec3,
}

impl Frame {
    pub fn new(u: Vec3) -> Frame {
        let e1 = u.any_orthogonal();
        Frame { e1, e2: u.cross(e1) }
    }

    pub fn project(&self, r: Vec3) -> [f64; 2] {
        [r.dot(self.e1), r.dot(self.e2)]
    }
}

/// The two equations in a fixed frame.
pub fn equations(f: &SmoothKnot, t: [f64; 3], frame: &Frame) -> [f64; 2] {
    frame.project(System::at(f, t).r)
}

/// Jacobian of [`equations`] by central differences, with the frame held fixed.
pub fn jacobian(f: &SmoothKnot, t: [f64; 3], frame: &Frame) -> [[f64; 3]; 2] {
    let mut j = [[0.0; 3]; 2];
    for k in 0..3 {
        let mut tp = t;
        let mut tm = t;
        tp[k] += FD_STEP;
        tm[k] -= FD_STEP;
        let p = equations(f, tp, frame);
        let m = equations(f, tm, frame);
        for row in 0..2 {
            j[row][k] = (p[row] - m[row]) / (2.0 * FD_STEP);
        }
    }
    j
}

/// Oriented unit tangent of the solution curve: the cross product of the two
/// equation gradients in a frame with `e1 x e2 = u`.
pub fn tangent(f: &SmoothKnot, t: [f64; 3]) -> Option<Vec3> {
    let frame = System::at(f, t).frame();
    let j = jacobian(f, t, &frame);
    let g1 = Vec3::new(j[0][0], j[0][1], j[0][2]);
    let g2 = Vec3::new(j[1][0], j[1][1], j[1][2]);
    let n = g1.cross(g2);
    let size = g1.norm() * g2.norm();
    if n.norm() <= 1e-10 * size || size == 0.0 {
        return None;
    }
    n.normalized()
}

/// Residual of a parameter triple.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    /// Components of `(f(t2) - f(t1)) x (f(t3) - f(t1))` in a frame
    /// orthogonal to the chord.
    pub value: [f64; 2],
    /// 1-based index of the point lying between the other two along the chord.
    pub between: usize,
    /// Distance of that point from the line through the other two.
    pub distance: f64,
}

pub fn collinearity_residual(f: &SmoothKnot, t: [f64; 3]) -> Residual {
    let p = t.map(|s| f.point(s));
    let sys = System::at(f, t);
    let c = (p[1] - p[0]).cross(p[2] - p[0]);
    let value = sys.frame().project(c);
    let label = sys.label();
    let between = label.between_index();
    let (m, a, b) = match label {
        Label::Co1 => (p[0], p[1], p[2]),
        Label::Co2 => (p[1], p[0], p[2]),
        Label::Co3 => (p[2], p[0], p[1]),
    };
    let ab = b - a;
    let distance = if ab.norm() > 0.0 {
        ab.cross(m - a).norm() / ab.norm()
    } else {
        m.distance(a)
    };
    Residual {
        value,
        between,
        distance,
    }
}

/// Sign of `det[f(t_i) - f(t_k), f''(t_i), f'(t_k)]` at a boundary point on
/// a tangential face, `i` being the doubled index (0-based into `t`).
pub fn strand_boundary_orientation(
    f: &SmoothKnot,
    t: [f64; 3],
    i: usize,
    k: usize,
) -> crate::Result<i8> {
    let (ti, tk) = (t[i], t[k]);
    let chord = f.point(ti) - f.point(tk);
    let dd = f.derivative(ti, 2);
    let d1 = f.derivative(tk, 1);
    let speed = f.derivative(ti, 1).norm();
    if dd.norm() <= 1e-9 * speed * speed / f.diagonal().max(f64::MIN_POSITIVE) {
        return Err(crate::Error::ZeroCurvature(format!(
            "second derivative vanishes at t = {ti:.6}"
        )));
    }
    let det = det3(chord, dd, d1);
    if det.abs() <= 1e-9 * chord.norm() * dd.norm() * d1.norm() {
        return Err(crate::Error::ZeroCurvature(format!(
            "osculating plane contains the chord at t = {ti:.6}"
        )));
    }
    Ok(if det > 0.0 { 1 } else { -1 })
}
