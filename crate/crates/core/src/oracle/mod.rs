//! Independent reference values from knot diagrams: Gauss-diagram c2 and
//! crossing-count linking numbers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{Point3, Tolerance, Vec3};
use crate::knotmodel::{derived_seed, project_polygons, project_to_diagram, KnotDiagram, PLKnot};

/// How many random projection directions to try before giving up.
const DIRECTION_ATTEMPTS: u32 = 32;

/// A crossing as a chord of the Gauss diagram; positions are measured from
/// the basepoint.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussChord {
    pub over: f64,
    pub under: f64,
    pub sign: i8,
}

pub fn gauss_diagram(d: &KnotDiagram) -> Vec<GaussChord> {
    let len = d.length as f64;
    let rel = |x: f64| (x - d.basepoint).rem_euclid(len);
    let mut chords: Vec<GaussChord> = d
        .crossings
        .iter()
        .map(|c| GaussChord {
            over: rel(c.over),
            under: rel(c.under),
            sign: c.sign,
        })
        .collect();
    chords.sort_by(|a, b| a.over.min(a.under).total_cmp(&b.over.min(b.under)));
    chords
}

/// c2 as the signed count of chord pairs met in the order
/// under(1), over(2), over(1), under(2) from the basepoint.
pub fn c2_from_chords(chords: &[GaussChord]) -> i64 {
    let mut total = 0i64;
    for a in chords {
        if a.under >= a.over {
            continue;
        }
        for b in chords {
            if b.over >= b.under {
                continue;
            }
            if a.under < b.over && b.over < a.over && a.over < b.under {
                total += (a.sign as i64) * (b.sign as i64);
            }
        }
    }
    total
}

pub fn c2_from_diagram(d: &KnotDiagram) -> i64 {
    c2_from_chords(&gauss_diagram(d))
}

/// A unit direction drawn from a seeded generator.
pub fn random_direction(seed: u64) -> Vec3 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let v = Vec3::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        let n = v.norm();
        if n > 0.1 && n <= 1.0 {
            return v / n;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagramValue {
    pub value: i64,
    pub direction: Vec3,
    pub crossings: usize,
    pub writhe: i64,
    pub attempts: u32,
}

/// c2 of a knot from a generic projection; long knots are closed outside
/// their hull and read from a basepoint on the closing arc.
pub fn c2_oracle(knot: &PLKnot, seed: u64, rel: f64) -> Result<DiagramValue> {
    let mut last = None;
    for attempt in 0..DIRECTION_ATTEMPTS {
        let dir = random_direction(derived_seed(seed, attempt));
        match project_to_diagram(knot, dir, rel) {
            Ok(d) => {
                return Ok(DiagramValue {
                    value: c2_from_diagram(&d),
                    direction: d.direction,
                    crossings: d.crossings.len(),
                    writhe: d.writhe(),
                    attempts: attempt + 1,
                })
            }
            Err(e) if e.is_genericity() => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap_or_else(|| Error::NonGenericProjection("no generic direction".into())))
}

/// Linking number of two closed polygons seen along `direction`.
pub fn linking_number_along(a: &[Point3], b: &[Point3], direction: Vec3, tol: &Tolerance) -> Result<i64> {
    let link = project_polygons(&[a.to_vec(), b.to_vec()], direction, tol)?;
    let s: i64 = link
        .crossings
        .iter()
        .filter(|c| c.over_component != c.under_component)
        .map(|c| c.sign as i64)
        .sum();
    if s % 2 != 0 {
        return Err(Error::NonGenericProjection(format!(
            "odd inter-component crossing sum {s}"
        )));
    }
    Ok(s / 2)
}

/// Linking number of two closed polygons from a seeded generic projection.
pub fn linking_oracle(a: &[Point3], b: &[Point3], seed: u64, rel: f64) -> Result<DiagramValue> {
    let mut lo = a[0];
    let mut hi = a[0];
    for p in a.iter().chain(b) {
        lo = lo.component_min(*p);
        hi = hi.component_max(*p);
    }
    let tol = Tolerance::new(rel, (hi - lo).norm());
    let mut last = None;
    for attempt in 0..DIRECTION_ATTEMPTS {
        let dir = random_direction(derived_seed(seed, attempt));
        match linking_number_along(a, b, dir, &tol) {
            Ok(v) => {
                return Ok(DiagramValue {
                    value: v,
                    direction: dir,
                    crossings: 0,
                    writhe: 0,
                    attempts: attempt + 1,
                })
            }
            Err(e) if e.is_genericity() => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap_or_else(|| Error::NonGenericProjection("no generic direction".into())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chord(over: f64, under: f64, sign: i8) -> GaussChord {
        GaussChord { over, under, sign }
    }

    #[test]
    fn trefoil_gauss_code() {
        // O1 U2 O3 U1 O2 U3, all signs equal
        for s in [1i8, -1] {
            let c = [chord(0.0, 3.0, s), chord(4.0, 1.0, s), chord(2.0, 5.0, s)];
            // rotate the basepoint through every arc
            for shift in 0..6 {
                let rot: Vec<GaussChord> = c
                    .iter()
                    .map(|x| chord((x.over - shift as f64 - 0.5).rem_euclid(6.0), (x.under - shift as f64 - 0.5).rem_euclid(6.0), x.sign))
                    .collect();
                assert_eq!(c2_from_chords(&rot), 1);
            }
        }
    }

    #[test]
    fn figure_eight_gauss_code() {
        // O1 U2 O3 U4 O2 U1 O4 U3 with signs (+,+,-,-)
        let c = [
            chord(0.0, 5.0, 1),
            chord(4.0, 1.0, 1),
            chord(2.0, 7.0, -1),
            chord(6.0, 3.0, -1),
        ];
        for shift in 0..8 {
            let rot: Vec<GaussChord> = c
                .iter()
                .map(|x| chord((x.over - shift as f64 - 0.5).rem_euclid(8.0), (x.under - shift as f64 - 0.5).rem_euclid(8.0), x.sign))
                .collect();
            assert_eq!(c2_from_chords(&rot), -1);
        }
    }

    #[test]
    fn unknot_diagram_with_crossings() {
        // a single kink: O1 U1
        assert_eq!(c2_from_chords(&[chord(0.0, 1.0, 1)]), 0);
        // two kinks
        assert_eq!(c2_from_chords(&[chord(0.0, 1.0, 1), chord(3.0, 2.0, -1)]), 0);
    }
}
