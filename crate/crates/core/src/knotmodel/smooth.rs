//! Smooth parametrised knots with closed-form derivatives.

use serde::{Deserialize, Serialize};

use super::knot::{PLKnot, Topology};
use crate::error::{Error, Result};
use crate::geom::{Mat3, Point3, Vec3};

/// A curve with derivatives of every order; `derivative(t, 0)` is the point.
pub trait Curve: Send + Sync {
    fn derivative(&self, t: f64, order: u32) -> Vec3;

    fn point(&self, t: f64) -> Point3 {
        self.derivative(t, 0)
    }
}

/// One term `a cos(k θ) + b sin(k θ)` per coordinate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Harmonic {
    pub k: u32,
    /// `[cos, sin]` coefficients.
    pub x: [f64; 2],
    pub y: [f64; 2],
    pub z: [f64; 2],
}

/// A closed curve given by a finite Fourier series in `θ ∈ [0, 2π)`, followed
/// by a fixed linear map (used to put the curve in general position).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrigCurve {
    pub harmonics: Vec<Harmonic>,
    #[serde(default = "identity")]
    pub transform: Mat3,
}

fn identity() -> Mat3 {
    Mat3::IDENTITY
}

impl TrigCurve {
    pub fn new(harmonics: Vec<Harmonic>) -> Self {
        TrigCurve {
            harmonics,
            transform: Mat3::IDENTITY,
        }
    }

    pub fn with_transform(mut self, m: Mat3) -> Self {
        self.transform = m.mul_mat(&self.transform);
        self
    }

    /// The same curve run backwards, `θ -> -θ`.
    pub fn reversed(mut self) -> Self {
        for h in &mut self.harmonics {
            h.x[1] = -h.x[1];
            h.y[1] = -h.y[1];
            h.z[1] = -h.z[1];
        }
        self
    }
}

impl Curve for TrigCurve {
    fn derivative(&self, theta: f64, order: u32) -> Vec3 {
        let mut out = Vec3::ZERO;
        let shift = order as f64 * std::f64::consts::FRAC_PI_2;
        for h in &self.harmonics {
            let k = h.k as f64;
            if h.k == 0 {
                if order == 0 {
                    out += Vec3::new(h.x[0], h.y[0], h.z[0]);
                }
                continue;
            }
            let f = k.powi(order as i32);
            let (s, c) = (k * theta + shift).sin_cos();
            out += Vec3::new(
                h.x[0] * c + h.x[1] * s,
                h.y[0] * c + h.y[1] * s,
                h.z[0] * c + h.z[1] * s,
            ) * f;
        }
        self.transform.mul_vec(out)
    }
}

/// A polynomial curve; coefficients in increasing degree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyCurve {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
}

fn poly_derivative(c: &[f64], t: f64, order: u32) -> f64 {
    let m = order as usize;
    if m >= c.len() {
        return 0.0;
    }
    // Horner on the m-th derivative's coefficients
    let mut acc = 0.0;
    for i in (m..c.len()).rev() {
        let mut f = 1.0;
        for j in 0..m {
            f *= (i - j) as f64;
        }
        acc = acc * t + c[i] * f;
    }
    acc
}

impl PolyCurve {
    pub fn degree(&self) -> usize {
        let deg = |c: &[f64]| c.iter().rposition(|&v| v != 0.0).unwrap_or(0);
        deg(&self.x).max(deg(&self.y)).max(deg(&self.z))
    }

    /// Each coordinate's leading non-zero coefficient is 1 and the largest
    /// degree is `n`.
    pub fn check_monic(&self, n: usize) -> Result<()> {
        for (name, c) in [("x", &self.x), ("y", &self.y), ("z", &self.z)] {
            match c.iter().rposition(|&v| v != 0.0) {
                None => {
                    return Err(Error::Parse(format!("coordinate {name} is identically zero")))
                }
                Some(d) if c[d] != 1.0 => {
                    return Err(Error::Parse(format!(
                        "coordinate {name} is not monic (leading coefficient {})",
                        c[d]
                    )))
                }
                _ => {}
            }
        }
        if self.degree() != n {
            return Err(Error::Parse(format!(
                "declared degree {n} but the curve has degree {}",
                self.degree()
            )));
        }
        Ok(())
    }

    /// Radius beyond which every coordinate is monotone and the curve is
    /// unknotted: a bound on the real roots of all the derivatives
    /// (Cauchy bound of the derivative polynomials).
    pub fn tame_radius(&self) -> f64 {
        let mut r: f64 = 1.0;
        for c in [&self.x, &self.y, &self.z] {
            let d = match c.iter().rposition(|&v| v != 0.0) {
                Some(d) if d >= 2 => d,
                _ => continue,
            };
            // derivative coefficients
            let dc: Vec<f64> = (1..=d).map(|i| c[i] * i as f64).collect();
            let lead = dc[dc.len() - 1].abs();
            let bound = 1.0
                + dc[..dc.len() - 1]
                    .iter()
                    .map(|v| v.abs() / lead)
                    .fold(0.0, f64::max);
            r = r.max(bound);
        }
        r
    }
}

impl Curve for PolyCurve {
    fn derivative(&self, t: f64, order: u32) -> Vec3 {
        Vec3::new(
            poly_derivative(&self.x, t, order),
            poly_derivative(&self.y, t, order),
            poly_derivative(&self.z, t, order),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SmoothCurve {
    Trig(TrigCurve),
    Poly(PolyCurve),
}

impl Curve for SmoothCurve {
    fn derivative(&self, t: f64, order: u32) -> Vec3 {
        match self {
            SmoothCurve::Trig(c) => c.derivative(t, order),
            SmoothCurve::Poly(c) => c.derivative(t, order),
        }
    }
}

/// Position, first and second derivative at a grid parameter.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub point: Point3,
    pub d1: Vec3,
    pub d2: Vec3,
}

/// A smooth long knot `f: [0, 1] -> R^3`, the reparametrisation
/// `f(t) = curve(start + span * t)` of an underlying curve.
///
/// Closed trigonometric knots are opened at their lowest point, so `f(0)` and
/// `f(1)` coincide there and `f(t)` for `t` outside `[0, 1]` continues periodically.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothKnot {
    pub curve: SmoothCurve,
    pub start: f64,
    pub span: f64,
    /// Closed knot opened at a point, rather than a long knot.
    pub opened: bool,
    pub grid: Vec<f64>,
    pub samples: Vec<Sample>,
}

impl SmoothKnot {
    fn build(curve: SmoothCurve, start: f64, span: f64, opened: bool, samples: usize) -> Self {
        let mut k = SmoothKnot {
            curve,
            start,
            span,
            opened,
            grid: Vec::new(),
            samples: Vec::new(),
        };
        let n = samples.max(2);
        k.grid = (0..=n).map(|i| i as f64 / n as f64).collect();
        k.samples = k
            .grid
            .iter()
            .map(|&t| Sample {
                t,
                point: k.derivative(t, 0),
                d1: k.derivative(t, 1),
                d2: k.derivative(t, 2),
            })
            .collect();
        k
    }

    /// Open a closed trigonometric curve at its unique lowest point.
    pub fn opened_trig(curve: TrigCurve, samples: usize) -> Result<SmoothKnot> {
        let theta0 = extremum(&curve, -1.0)?;
        Ok(SmoothKnot::build(
            SmoothCurve::Trig(curve),
            theta0,
            std::f64::consts::TAU,
            true,
            samples,
        ))
    }

    /// The arc of a closed trigonometric curve from its unique lowest point
    /// to its unique highest point, as a long knot. `forward` follows the
    /// curve's own direction, otherwise the arc runs backwards.
    pub fn trig_arc(curve: TrigCurve, forward: bool, samples: usize) -> Result<SmoothKnot> {
        let tau = std::f64::consts::TAU;
        let lo = extremum(&curve, -1.0)?;
        let hi = extremum(&curve, 1.0)?;
        let fwd = (hi - lo).rem_euclid(tau);
        let span = if forward { fwd } else { fwd - tau };
        Ok(SmoothKnot::build(SmoothCurve::Trig(curve), lo, span, false, samples))
    }

    /// A polynomial long knot on `[-radius, radius]` (tame radius by default).
    pub fn long_poly(curve: PolyCurve, radius: Option<f64>, samples: usize) -> SmoothKnot {
        let r = radius.unwrap_or_else(|| curve.tame_radius());
        SmoothKnot::build(SmoothCurve::Poly(curve), -r, 2.0 * r, false, samples)
    }

    pub fn derivative(&self, t: f64, order: u32) -> Vec3 {
        self.curve.derivative(self.start + self.span * t, order) * self.span.powi(order as i32)
    }

    pub fn point(&self, t: f64) -> Point3 {
        self.derivative(t, 0)
    }

    /// Polygonal approximation with `n` edges: a closed polygon for opened
    /// closed curves, a long polygon otherwise.
    pub fn to_pl(&self, n: usize) -> Result<PLKnot> {
        if self.opened {
            let verts = (0..n).map(|i| self.point(i as f64 / n as f64)).collect();
            PLKnot::new(verts, Topology::Closed)
        } else {
            let verts = (0..=n).map(|i| self.point(i as f64 / n as f64)).collect();
            PLKnot::new(verts, Topology::Long)
        }
    }

    /// Length scale: diagonal of the bounding box of the samples.
    pub fn diagonal(&self) -> f64 {
        let mut lo = self.samples[0].point;
        let mut hi = lo;
        for s in &self.samples {
            lo = lo.component_min(s.point);
            hi = hi.component_max(s.point);
        }
        (hi - lo).norm()
    }
}

/// Parameter of the unique minimum (`sign = -1`) or maximum (`sign = 1`) of
/// `z` on a closed trigonometric curve.
fn extremum(curve: &TrigCurve, sign: f64) -> Result<f64> {
    let n = 4096;
    let tau = std::f64::consts::TAU;
    let zs: Vec<f64> = (0..n)
        .map(|i| -sign * curve.point(tau * i as f64 / n as f64).z)
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| zs[a].total_cmp(&zs[b]));
    let best = order[0];
    let zmin = zs[best];
    let zmax = zs.iter().cloned().fold(f64::MIN, f64::max);
    let gap = 1e-6 * (zmax - zmin).max(1e-300);
    // another local minimum nearly as low elsewhere means a tie
    for &i in &order[1..] {
        if zs[i] > zmin + gap {
            break;
        }
        let d = (i as i64 - best as i64).rem_euclid(n as i64);
        let d = d.min(n as i64 - d);
        if d > 4 {
            return Err(Error::GenericityFailure(
                "extremal point of the curve is not unique".into(),
            ));
        }
    }
    // Newton on z'(θ) = 0
    let mut th = tau * best as f64 / n as f64;
    for _ in 0..50 {
        let d1 = -sign * curve.derivative(th, 1).z;
        let d2 = -sign * curve.derivative(th, 2).z;
        if d2 <= 0.0 {
            return Err(Error::ZeroCurvature(
                "height function is not strictly convex at its extremum".into(),
            ));
        }
        let step = d1 / d2;
        th -= step;
        if step.abs() < 1e-15 {
            break;
        }
    }
    Ok(th.rem_euclid(tau))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle() -> TrigCurve {
        TrigCurve::new(vec![Harmonic {
            k: 1,
            x: [1.0, 0.0],
            y: [0.0, 1.0],
            z: [0.0, -0.5],
        }])
    }

    #[test]
    fn trig_derivatives_match_finite_differences() {
        let c = circle().with_transform(Mat3::rotation(Vec3::new(1.0, 2.0, 3.0), 0.4));
        let t = 0.37;
        for order in 0..4 {
            let h = 1e-5;
            let fd = (c.derivative(t + h, order) - c.derivative(t - h, order)) / (2.0 * h);
            assert!((fd - c.derivative(t, order + 1)).norm() < 1e-8);
        }
    }

    #[test]
    fn poly_derivatives() {
        let p = PolyCurve {
            x: vec![0.0, -3.0, 0.0, 1.0],
            y: vec![0.0, 0.0, -4.0, 0.0, 1.0],
            z: vec![0.0, -10.0, 0.0, 0.0, 0.0, 1.0],
        };
        let t = 1.3;
        assert!((p.derivative(t, 1).x - (3.0 * t * t - 3.0)).abs() < 1e-12);
        assert!((p.derivative(t, 2).z - 20.0 * t * t * t).abs() < 1e-9);
        assert_eq!(p.derivative(t, 6), Vec3::ZERO);
        assert_eq!(p.degree(), 5);
        p.check_monic(5).unwrap();
        assert!(p.check_monic(4).is_err());
    }

    #[test]
    fn opened_at_minimum() {
        let k = SmoothKnot::opened_trig(circle(), 64).unwrap();
        let p0 = k.point(0.0);
        for i in 1..100 {
            assert!(k.point(i as f64 / 100.0).z >= p0.z);
        }
        assert!(k.derivative(0.0, 1).z.abs() < 1e-9);
    }
}
