//! The degree-two invariant from quadrisecants, and the geometric bounds.

mod bounds;
mod crossing;

use serde::{Deserialize, Serialize};

pub use bounds::{binomial, check_polynomial_bound, check_stick_bound, BoundCheck};
pub use crossing::{
    apply_crossing_changes, balls_admit_common_line, crossing_balls, crossing_change_derivative, crossing_sites,
    resolve_crossing, type_two_check, Ball, CrossingSite, DerivativeCheck, TypeTwoResult,
};

use crate::error::{Error, Result};
use crate::geom::Tolerance;
use crate::knotmodel::{derived_seed, endpoints_extremal, extremal_set, perturb, PLKnot, MAX_PERTURB_REL};
use crate::quadrisecant::{closed_labels, enumerate_quadrisecants, is_alternating, n_l, Permutation, Quadrisecant};

/// Default seed for every seeded choice (perturbations, projection directions).
pub const DEFAULT_SEED: u64 = 0x5EED_C2C2;

/// Factor between the magnitudes of successive perturbed attempts.
pub const PERTURB_GROWTH: f64 = 4.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalOptions {
    /// Relative degeneracy tolerance.
    pub tolerance: f64,
    pub seed: u64,
    /// Relative perturbation magnitude of the first retry; later retries
    /// grow it by [`PERTURB_GROWTH`] up to half the perturbation limit.
    pub perturb: f64,
    /// Attempts including the unperturbed one.
    pub max_attempts: u32,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            tolerance: Tolerance::DEFAULT_REL,
            seed: DEFAULT_SEED,
            perturb: 1e-6,
            max_attempts: 8,
        }
    }
}

impl EvalOptions {
    /// Perturbation magnitude of attempt `attempt` (attempt 0 is unperturbed).
    pub fn retry_magnitude(&self, attempt: u32) -> f64 {
        if attempt == 0 {
            return 0.0;
        }
        (self.perturb * PERTURB_GROWTH.powi(attempt as i32 - 1)).min(0.5 * MAX_PERTURB_REL)
    }
}

/// Run `f` on the knot, then on seeded perturbations while it keeps failing
/// with a genericity-class error. Returns the result, the knot it was
/// computed on, and the number of attempts used.
pub fn with_perturbation<T>(
    knot: &PLKnot,
    opts: &EvalOptions,
    f: impl Fn(&PLKnot) -> Result<T>,
) -> Result<(T, PLKnot, u32)> {
    let mut last = None;
    for attempt in 0..opts.max_attempts.max(1) {
        let candidate = if attempt == 0 {
            match perturb(knot, opts.seed, 0.0) {
                Ok(k) => k,
                Err(e) => {
                    last = Some(e);
                    continue;
                }
            }
        } else {
            perturb(knot, derived_seed(opts.seed, attempt), opts.retry_magnitude(attempt))?
        };
        match f(&candidate) {
            Ok(v) => return Ok((v, candidate, attempt + 1)),
            Err(e) if e.is_genericity() => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    let msg = last.map(|e| e.to_string()).unwrap_or_default();
    Err(Error::GenericityFailure(format!(
        "still degenerate after {} attempts: {msg}",
        opts.max_attempts
    )))
}

/// One quadrisecant's share of a sum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Contribution {
    pub edges: [usize; 4],
    pub params: [f64; 4],
    pub sigma: String,
    pub epsilon: i8,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_l: Option<usize>,
}

impl Contribution {
    fn of(q: &Quadrisecant, epsilon: i8, n_l: Option<usize>) -> Self {
        Contribution {
            edges: q.edges(),
            params: q.hits.map(|h| h.param),
            sigma: q.sigma.cycles(),
            epsilon,
            n_l,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub value: i64,
    pub quadrisecant_count: usize,
    pub contributions: Vec<Contribution>,
    /// Closed formula only: sum of `n_L * epsilon` and the extremal count.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub raw_sum: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extremal_count: Option<usize>,
    pub attempts: u32,
}

fn long_sum(knot: &PLKnot, tol: &Tolerance) -> Result<Evaluation> {
    let qs = enumerate_quadrisecants(knot, tol)?;
    let mut value = 0i64;
    let mut contributions = Vec::new();
    for q in &qs {
        if q.sigma == Permutation::COUNTED {
            value += q.epsilon as i64;
            contributions.push(Contribution::of(q, q.epsilon, None));
        }
    }
    Ok(Evaluation {
        value,
        quadrisecant_count: qs.len(),
        contributions,
        raw_sum: None,
        extremal_count: None,
        attempts: 1,
    })
}

/// Sum of the signs of the `(1342)` quadrisecants of a long knot.
pub fn nu2_long(knot: &PLKnot, opts: &EvalOptions) -> Result<Evaluation> {
    if knot.is_closed() {
        return Err(Error::Unsupported("nu2_long needs a long knot".into()));
    }
    if !endpoints_extremal(knot, opts.tolerance)? {
        return Err(Error::InvalidKnot(
            "long knot endpoints must lie on the convex hull".into(),
        ));
    }
    let (mut ev, _, attempts) = with_perturbation(knot, opts, |k| {
        long_sum(k, &k.tolerance(opts.tolerance))
    })?;
    ev.attempts = attempts;
    Ok(ev)
}

/// Checked division of the closed-formula sum by the extremal count.
pub fn closed_value(raw: i64, count: usize) -> Result<i64> {
    let n = count as i64;
    if n == 0 || raw % n != 0 {
        return Err(Error::NonIntegralSum {
            numerator: raw,
            denominator: n,
        });
    }
    Ok(raw / n)
}

fn closed_sum(knot: &PLKnot, tol: &Tolerance) -> Result<Evaluation> {
    let qs = enumerate_quadrisecants(knot, tol)?;
    let ext = extremal_set(knot, tol.rel)?;
    let mut raw = 0i64;
    let mut contributions = Vec::new();
    for q in &qs {
        if !is_alternating(q, tol)? {
            continue;
        }
        let labels = closed_labels(q).ok_or_else(|| {
            Error::GenericityFailure("alternating quadrisecant without adjacent middle pair".into())
        })?;
        let eps = labels.epsilon(q, tol)?;
        let nl = n_l(q, &ext, knot.vertex_count()).unwrap_or(0);
        raw += nl as i64 * eps as i64;
        contributions.push(Contribution::of(q, eps, Some(nl)));
    }
    let n = ext.components.len();
    let value = closed_value(raw, n)?;
    Ok(Evaluation {
        value,
        quadrisecant_count: qs.len(),
        contributions,
        raw_sum: Some(raw),
        extremal_count: Some(n),
        attempts: 1,
    })
}

/// The closed-knot formula over alternating quadrisecants weighted by the
/// number of extremal components in their middle component.
pub fn c2_closed(knot: &PLKnot, opts: &EvalOptions) -> Result<Evaluation> {
    if !knot.is_closed() {
        return Err(Error::Unsupported("c2_closed needs a closed knot".into()));
    }
    let (mut ev, _, attempts) = with_perturbation(knot, opts, |k| {
        closed_sum(k, &k.tolerance(opts.tolerance))
    })?;
    ev.attempts = attempts;
    Ok(ev)
}

/// `c2` by whichever quadrisecant formula fits the topology.
pub fn nu2(knot: &PLKnot, opts: &EvalOptions) -> Result<Evaluation> {
    if knot.is_closed() {
        c2_closed(knot, opts)
    } else {
        nu2_long(knot, opts)
    }
}
