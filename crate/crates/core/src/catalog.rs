//! Standard test knots.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::geom::{Mat3, Point3, Vec3};
use crate::knotmodel::{
    check_generic, normalize_long, open_at_vertex, Harmonic, PLKnot, PolyCurve,
    PolynomialKnot, TrigCurve,
};

/// Generic rotation applied to the symmetric trigonometric knots so that the
/// lowest point is unique.
pub fn tilt() -> Mat3 {
    Mat3::rotation(Vec3::new(0.8, 0.3, 0.1), 0.6)
}

fn harmonic(k: u32, x: [f64; 2], y: [f64; 2], z: [f64; 2]) -> Harmonic {
    Harmonic { k, x, y, z }
}

/// `(sin t + 2 sin 2t, cos t - 2 cos 2t, -sin 3t)`.
pub fn trefoil_curve() -> TrigCurve {
    TrigCurve::new(vec![
        harmonic(1, [0.0, 1.0], [1.0, 0.0], [0.0, 0.0]),
        harmonic(2, [0.0, 2.0], [-2.0, 0.0], [0.0, 0.0]),
        harmonic(3, [0.0, 0.0], [0.0, 0.0], [0.0, -1.0]),
    ])
    .with_transform(tilt())
}

/// The trefoil curve reversed and turned so that the arc from its lowest to
/// its highest point (see [`SmoothKnot::trig_arc`]) is a long trefoil.
///
/// [`SmoothKnot::trig_arc`]: crate::knotmodel::SmoothKnot::trig_arc
pub fn long_trefoil_curve() -> TrigCurve {
    let mut c = trefoil_curve().reversed();
    c.transform = Mat3::rotation(Vec3::new(0.24, 0.04, -0.98), 0.75);
    c
}

/// `((2 + cos 2t) cos 3t, (2 + cos 2t) sin 3t, sin 4t)`.
pub fn figure_eight_curve() -> TrigCurve {
    TrigCurve::new(vec![
        harmonic(1, [0.5, 0.0], [0.0, 0.5], [0.0, 0.0]),
        harmonic(3, [2.0, 0.0], [0.0, 2.0], [0.0, 0.0]),
        harmonic(4, [0.0, 0.0], [0.0, 0.0], [0.0, 1.0]),
        harmonic(5, [0.5, 0.0], [0.0, 0.5], [0.0, 0.0]),
    ])
    .with_transform(tilt())
}

/// A round unknot with a small wobble.
pub fn unknot_curve() -> TrigCurve {
    TrigCurve::new(vec![
        harmonic(1, [1.0, 0.0], [0.0, 1.0], [0.0, 0.0]),
        harmonic(2, [0.0, 0.0], [0.0, 0.0], [0.0, 0.3]),
    ])
    .with_transform(tilt())
}

/// Closed polygon through `n` equally spaced points of a closed curve.
pub fn sample_trig(curve: &TrigCurve, n: usize) -> Result<PLKnot> {
    use crate::knotmodel::Curve;
    let tau = std::f64::consts::TAU;
    PLKnot::closed((0..n).map(|i| curve.point(tau * i as f64 / n as f64)).collect())
}

pub fn trefoil(n: usize) -> PLKnot {
    sample_trig(&trefoil_curve(), n).expect("trefoil polygon")
}

pub fn figure_eight(n: usize) -> PLKnot {
    sample_trig(&figure_eight_curve(), n).expect("figure-eight polygon")
}

pub fn unknot(n: usize) -> PLKnot {
    sample_trig(&unknot_curve(), n).expect("unknot polygon")
}

pub fn triangle() -> PLKnot {
    PLKnot::closed(vec![
        Vec3::new(0.0, 0.0, 0.0),
        Vec3::new(1.0, 0.0, 0.0),
        Vec3::new(0.3, 0.8, 0.0),
    ])
    .expect("triangle")
}

/// A trefoil with six edges.
pub fn six_stick_trefoil() -> PLKnot {
    PLKnot::closed(
        SIX_STICK
            .iter()
            .map(|p| Vec3::new(p[0], p[1], p[2]))
            .collect(),
    )
    .expect("six-stick trefoil")
}

const SIX_STICK: [[f64; 3]; 6] = [
    [-3.0, -2.0, 2.0],
    [3.0, 2.0, 1.0],
    [3.0, -3.0, 1.0],
    [1.0, 3.0, -1.0],
    [-1.0, 1.0, 3.0],
    [3.0, -1.0, 0.0],
];

/// `x = t^3 - 3t, y = t^4 - 4t^2, z = t^5 - 10t`.
pub fn polynomial_trefoil() -> PolynomialKnot {
    PolynomialKnot::new(
        5,
        PolyCurve {
            x: vec![0.0, -3.0, 0.0, 1.0],
            y: vec![0.0, 0.0, -4.0, 0.0, 1.0],
            z: vec![0.0, -10.0, 0.0, 0.0, 0.0, 1.0],
        },
    )
    .expect("monic")
}

/// The moment curve `(t, t^2, t^3)`, an unknot.
pub fn moment_curve() -> PolynomialKnot {
    PolynomialKnot::new(
        3,
        PolyCurve {
            x: vec![0.0, 1.0],
            y: vec![0.0, 0.0, 1.0],
            z: vec![0.0, 0.0, 0.0, 1.0],
        },
    )
    .expect("monic")
}

/// A closed polygon with `n` vertices drawn uniformly from the unit cube,
/// redrawn until it is a valid generic knot.
pub fn random_polygon(seed: u64, n: usize) -> PLKnot {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let v: Vec<Point3> = (0..n)
            .map(|_| Vec3::new(rng.gen(), rng.gen(), rng.gen()))
            .collect();
        if let Ok(k) = PLKnot::closed(v) {
            if check_generic(&k).is_ok() {
                return k;
            }
        }
    }
}

/// A long knot with the knot type of a closed knot: cut at the extremal
/// vertex of component 0, with the end led around the outside of the hull
/// to a point above it, then normalised.
pub fn long_from_closed(knot: &PLKnot, rel: f64) -> Result<PLKnot> {
    let low = (0..knot.vertex_count())
        .min_by(|&a, &b| knot.vertices()[a].z.total_cmp(&knot.vertices()[b].z))
        .unwrap();
    let rooted = knot.rerooted(low);
    let opened = open_at_vertex(&rooted, 0, rel)?;
    let v = opened.vertices();
    let diag = knot.diagonal();
    let (lo, hi) = knot.bounding_box();
    let end = v[v.len() - 1];
    let start = v[0];
    let away = Vec3::new(end.x - start.x, end.y - start.y, 0.0)
        .normalized()
        .unwrap_or(Vec3::X);
    let far = end + away * (2.0 * diag);
    let top = hi.z + 0.5 * diag;
    let mut out = v.to_vec();
    out.push(far);
    out.push(Vec3::new(far.x, far.y, top));
    out.push(Vec3::new(0.5 * (lo.x + hi.x), 0.5 * (lo.y + hi.y), top + 0.1 * diag));
    normalize_long(out)
}
