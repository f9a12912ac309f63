//! The invariant of a smooth knot as the linking number of its collinearity
//! curves Co1 and Co3 in the parameter simplex.
//!
//! Boundary points are found face by face, the curves are traced between
//! them, and the linking number is read off a projection that forgets one
//! coordinate.

mod linking;
mod residual;
mod seeds;
mod trace;

use serde::{Deserialize, Serialize};

pub use linking::{linking_number, LinkingNumber, Projection, TracerCrossing};
pub use residual::{
    collinearity_residual, divided_difference, equations, strand_boundary_orientation, tangent, Label,
    Residual, System,
};
pub use seeds::{find_boundary_seeds, Face, GridOptions, Seed, SeedScan};
pub use trace::{scan_closed_components, trace_curves, CollinearityCurve, ContinuationOptions};

use crate::error::{Error, Result};
use crate::knotmodel::SmoothKnot;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TracerOptions {
    pub grid: GridOptions,
    pub continuation: ContinuationOptions,
    /// Number of slices `t2 = const` searched for closed components.
    pub slices: usize,
}

impl Default for TracerOptions {
    fn default() -> Self {
        TracerOptions {
            grid: GridOptions::default(),
            continuation: ContinuationOptions::default(),
            slices: 24,
        }
    }
}

/// Orientation data at a curve end on a tangential face.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryOrientation {
    pub face: Face,
    pub label: Label,
    pub t: [f64; 3],
    /// Sign of the boundary determinant.
    pub determinant: i8,
    /// The curve's orientation leaves the face here (the curve starts here).
    pub outgoing: bool,
}

impl BoundaryOrientation {
    /// `determinant` times `+1` for a start point, `-1` for an end point.
    pub fn relation(&self) -> i8 {
        if self.outgoing {
            self.determinant
        } else {
            -self.determinant
        }
    }
}

/// Everything the tracer computed for one knot.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TracerReport {
    pub value: i64,
    pub seeds: SeedScan,
    pub curves: Vec<CollinearityCurve>,
    /// Closed components found by the slice scan (they have no crossings).
    pub closed_components: usize,
    pub linking: LinkingNumber,
    /// The same count in the complementary projection.
    pub check: LinkingNumber,
    pub boundary: Vec<BoundaryOrientation>,
    /// Largest distance of a curve point from collinearity.
    pub max_residual: f64,
}

impl TracerReport {
    pub fn count(&self, label: Label) -> usize {
        self.curves
            .iter()
            .filter(|c| c.label == label && !c.is_closed())
            .count()
    }
}

/// Compute the invariant of a smooth long (or opened closed) knot by tracing.
pub fn nu2_tracer(f: &SmoothKnot, opts: &TracerOptions) -> Result<TracerReport> {
    let seeds = find_boundary_seeds(f, &opts.grid)?;
    for label in [Label::Co1, Label::Co3] {
        let n = seeds.seeds.iter().filter(|s| s.label == label).count();
        if n % 2 != 0 {
            return Err(Error::UnconsumedSeed(format!(
                "odd number ({n}) of {label:?} boundary points"
            )));
        }
    }
    let mut curves = trace_curves(f, &seeds, &opts.continuation)?;
    let loops = scan_closed_components(f, &curves, opts.slices, &opts.grid, &opts.continuation)?;
    let closed_components = loops.len();
    curves.extend(loops);
    let linking = linking_number(f, &curves, Projection::ForgetT1)?;
    let check = linking_number(f, &curves, Projection::ForgetT3)?;
    if linking.value != check.value {
        return Err(Error::Disagreement(format!(
            "projections disagree: forgetting t1 gives {}, forgetting t3 gives {}",
            linking.value, check.value
        )));
    }
    let mut boundary = Vec::new();
    for c in &curves {
        let (Some(ends), false) = (c.ends, c.points.is_empty()) else {
            continue;
        };
        for (k, face) in ends.iter().enumerate() {
            let Some((i, j)) = face.tangential_indices() else {
                continue;
            };
            let t = if k == 0 { c.points[0] } else { *c.points.last().unwrap() };
            boundary.push(BoundaryOrientation {
                face: *face,
                label: c.label,
                t,
                determinant: strand_boundary_orientation(f, t, i, j)?,
                outgoing: k == 0,
            });
        }
    }
    let max_residual = curves
        .iter()
        .flat_map(|c| c.points.iter())
        .map(|&t| collinearity_residual(f, t).distance)
        .fold(0.0, f64::max);
    Ok(TracerReport {
        value: linking.value,
        seeds,
        curves,
        closed_components,
        linking,
        check,
        boundary,
        max_residual,
    })
}
