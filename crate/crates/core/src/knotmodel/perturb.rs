use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::knot::PLKnot;
use crate::error::{Error, Result};
use crate::geom::Vec3;

/// Perturbations larger than this fraction of the diagonal are refused.
pub const MAX_PERTURB_REL: f64 = 1e-3;

/// Smallest sine of the angle between two edges that counts as non-parallel.
const PARALLEL_SIN: f64 = 1e-7;

/// Seed of retry attempt `attempt` derived from a base seed.
pub fn derived_seed(seed: u64, attempt: u32) -> u64 {
    // splitmix64 step
    let mut z = seed.wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(attempt as u64 + 1));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Cheap genericity checks: valid polygon and pairwise non-parallel edges.
///
/// Degeneracies that need the full transversal computation (quadrisecants
/// through vertices, tangencies) are detected by the enumeration itself.
pub fn check_generic(knot: &PLKnot) -> Result<()> {
    knot.validate()
        .map_err(|e| Error::GenericityFailure(e.to_string()))?;
    let e = knot.edge_count();
    let t: Vec<Vec3> = (0..e).map(|i| knot.tangent(i)).collect();
    for i in 0..e {
        for j in i + 1..e {
            if t[i].cross(t[j]).norm() <= PARALLEL_SIN {
                return Err(Error::GenericityFailure(format!(
                    "edges {i} and {j} are parallel"
                )));
            }
        }
    }
    Ok(())
}

/// Move every vertex by a seeded uniform offset of size at most
/// `magnitude * diagonal` per coordinate.
///
/// `magnitude == 0` returns the knot unchanged if it is already generic.
/// Long knots keep their first and last vertex in place horizontally and
/// vertically so the endpoints stay extremal.
pub fn perturb(knot: &PLKnot, seed: u64, magnitude: f64) -> Result<PLKnot> {
    if !(0.0..MAX_PERTURB_REL).contains(&magnitude) {
        return Err(Error::GenericityFailure(format!(
            "perturbation magnitude {magnitude} outside [0, {MAX_PERTURB_REL})"
        )));
    }
    if magnitude == 0.0 {
        check_generic(knot)?;
        return Ok(knot.clone());
    }
    let scale = magnitude * knot.diagonal();
    let n = knot.vertex_count();
    for attempt in 0..8 {
        let mut rng = ChaCha8Rng::seed_from_u64(derived_seed(seed, attempt));
        let verts: Vec<Vec3> = knot
            .vertices()
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let d = Vec3::new(
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                ) * scale;
                if !knot.is_closed() && (i == 0 || i == n - 1) {
                    *v
                } else {
                    *v + d
                }
            })
            .collect();
        let candidate = PLKnot::new_unchecked(verts, knot.topology());
        if check_generic(&candidate).is_ok() {
            return Ok(candidate);
        }
    }
    Err(Error::GenericityFailure(
        "no generic perturbation found".into(),
    ))
}
