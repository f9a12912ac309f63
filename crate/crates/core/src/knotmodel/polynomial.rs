use serde::{Deserialize, Serialize};

use super::knot::PLKnot;
use super::open::normalize_long;
use super::smooth::{Curve, PolyCurve};
use crate::error::{Error, Result};

/// A monic polynomial long knot of degree `n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolynomialKnot {
    pub degree: usize,
    pub curve: PolyCurve,
}

impl PolynomialKnot {
    pub fn new(degree: usize, curve: PolyCurve) -> Result<Self> {
        curve.check_monic(degree)?;
        Ok(PolynomialKnot { degree, curve })
    }

    /// Half-width of a parameter window outside of which the curve is
    /// monotone in every coordinate and runs below (above) the whole window
    /// in the height coordinate.
    pub fn window(&self) -> Result<f64> {
        let mut r = self.curve.tame_radius();
        let zdeg = self.curve.z.iter().rposition(|&v| v != 0.0).unwrap_or(0);
        if zdeg % 2 == 0 {
            return Err(Error::Unsupported(
                "height coordinate must have odd degree for a long knot".into(),
            ));
        }
        for _ in 0..60 {
            let n = 2000;
            let zs: Vec<f64> = (0..=n)
                .map(|i| self.curve.point(-r + 2.0 * r * i as f64 / n as f64).z)
                .collect();
            let inner_max = zs[..n].iter().cloned().fold(f64::MIN, f64::max);
            let inner_min = zs[1..].iter().cloned().fold(f64::MAX, f64::min);
            if zs[0] < inner_min && zs[n] > inner_max {
                return Ok(r);
            }
            r *= 1.25;
        }
        Err(Error::Unsupported("could not find a tame window".into()))
    }
}

/// Polygon through `edges + 1` equally spaced parameter values of the tame
/// window, normalised as a long knot.
pub fn sample_polynomial(p: &PolynomialKnot, edges: usize) -> Result<PLKnot> {
    if edges < 3 {
        return Err(Error::InvalidKnot("need at least 3 edges".into()));
    }
    let r = p.window()?;
    let verts = (0..=edges)
        .map(|i| p.curve.point(-r + 2.0 * r * i as f64 / edges as f64))
        .collect();
    normalize_long(verts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trefoil_window_and_sampling() {
        let p = PolynomialKnot::new(
            5,
            PolyCurve {
                x: vec![0.0, -3.0, 0.0, 1.0],
                y: vec![0.0, 0.0, -4.0, 0.0, 1.0],
                z: vec![0.0, -10.0, 0.0, 0.0, 0.0, 1.0],
            },
        )
        .unwrap();
        let r = p.window().unwrap();
        assert!(r >= 2.0);
        let k = sample_polynomial(&p, 40).unwrap();
        assert_eq!(k.vertex_count(), 41);
        assert_eq!(k.vertices()[0].z, 0.0);
    }

    #[test]
    fn moment_curve_is_accepted() {
        let p = PolynomialKnot::new(
            3,
            PolyCurve {
                x: vec![0.0, 1.0],
                y: vec![0.0, 0.0, 1.0],
                z: vec![0.0, 0.0, 0.0, 1.0],
            },
        );
        assert!(p.is_ok());
    }
}
