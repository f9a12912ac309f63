use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use selflink::catalog::{figure_eight, long_from_closed, random_polygon, trefoil, triangle};
use selflink::geom::{AffineMap, Mat3, Point3, Tolerance, Vec3};
use selflink::invariant::{binomial, nu2_long, with_perturbation, EvalOptions};
use selflink::knotmodel::PLKnot;
use selflink::quadrisecant::{
    closed_labels, enumerate_quadrisecants, enumerate_quadrisecants_in_order, is_alternating, sign_epsilon, Hit,
    Permutation, Quadrisecant,
};

const REL: f64 = 1e-9;

/// The perturbed copy the evaluator would use, with its quadrisecants.
fn generic(k: &PLKnot) -> (PLKnot, Vec<Quadrisecant>) {
    let (qs, g, _) = with_perturbation(k, &EvalOptions::default(), |k| enumerate_quadrisecants(k, &k.tolerance(REL))).unwrap();
    (g, qs)
}

/// Each hit lies interior to its edge and all four are on one line.
fn check_hits(k: &PLKnot, q: &Quadrisecant) {
    let scale = 1e-8 * k.diagonal();
    let mut edges = q.edges();
    edges.sort_unstable();
    assert!(edges.windows(2).all(|w| w[0] < w[1]), "edges {edges:?}");
    for h in &q.hits {
        assert!(h.param > 0.0 && h.param < 1.0, "param {}", h.param);
        let e = k.edge(h.edge);
        assert!(e.at(h.param).distance(h.point) < scale);
    }
    let a = q.hits[0].point;
    let u = (q.hits[1].point - a).normalized().unwrap();
    for h in &q.hits[2..] {
        let w = h.point - a;
        assert!((w - u * w.dot(u)).norm() < scale, "hit off the line");
    }
    let pos: Vec<f64> = q.hits.iter().map(|h| h.position()).collect();
    assert!(pos.windows(2).all(|w| w[0] < w[1]));
    // line oriented so knot-order label 1 precedes label 2
    let c = q.line_coordinates();
    assert!(c[0] < c[1]);
    assert!(q.sigma.is_admissible());
}

#[test]
fn triangle_has_none() {
    assert!(enumerate_quadrisecants(&triangle(), &triangle().tolerance(REL)).unwrap().is_empty());
}

#[test]
fn hits_are_collinear_and_interior() {
    for k in [trefoil(24), figure_eight(32), random_polygon(5, 14)] {
        let (g, qs) = generic(&k);
        for q in &qs {
            check_hits(&g, q);
        }
    }
}

#[test]
fn count_is_bounded_by_quadruples() {
    for k in [trefoil(24), figure_eight(32), random_polygon(6, 12), random_polygon(7, 16)] {
        let (_, qs) = generic(&k);
        let e = k.edge_count() as u64;
        assert!(qs.len() as u128 <= 2 * binomial(e, 4), "{} on {e} edges", qs.len());
    }
}

#[test]
fn knotted_curves_have_alternating_quadrisecants() {
    for k in [trefoil(24), figure_eight(32)] {
        let (g, qs) = generic(&k);
        let tol = g.tolerance(REL);
        let alt: Vec<&Quadrisecant> = qs.iter().filter(|q| is_alternating(q, &tol).unwrap()).collect();
        assert!(!alt.is_empty());
        for q in alt {
            assert!(closed_labels(q).is_some());
        }
    }
}

fn hit(edge: usize, point: Point3, tangent: Vec3) -> Hit {
    Hit {
        edge,
        param: 0.5,
        point,
        tangent: tangent.normalized().unwrap(),
    }
}

/// Hits on the x axis at `xs[i]` for knot-order label `i + 1`.
fn on_axis(xs: [f64; 4]) -> [Hit; 4] {
    let tangents = [
        Vec3::new(0.1, 1.0, 0.3),
        Vec3::new(-0.2, 0.4, 1.0),
        Vec3::new(0.3, -1.0, 0.5),
        Vec3::new(0.0, 0.7, -1.0),
    ];
    [0, 1, 2, 3].map(|i| hit(2 * i, Vec3::new(xs[i], 0.0, 0.0), tangents[i]))
}

#[test]
fn permutation_from_line_order() {
    let tol = Tolerance::unit();
    let same = Quadrisecant::from_hits(on_axis([0.0, 1.0, 2.0, 3.0]), &tol).unwrap();
    assert_eq!(same.sigma, Permutation([1, 2, 3, 4]));
    assert_eq!(same.sigma.cycles(), "()");
    // labels along the line: 3, 1, 4, 2
    let counted = Quadrisecant::from_hits(on_axis([1.0, 3.0, 0.0, 2.0]), &tol).unwrap();
    assert_eq!(counted.sigma, Permutation::COUNTED);
    assert_eq!(counted.sigma.cycles(), "(1342)");
    // hits given out of order are sorted into knot order first
    let mut shuffled = on_axis([1.0, 3.0, 0.0, 2.0]);
    shuffled.reverse();
    assert_eq!(Quadrisecant::from_hits(shuffled, &tol).unwrap(), counted);
    // the line is flipped when label 2 would precede label 1
    let flipped = Quadrisecant::from_hits(on_axis([3.0, 2.0, 1.0, 0.0]), &tol).unwrap();
    assert_eq!(flipped.sigma, Permutation([1, 2, 3, 4]));
    assert!(flipped.line.dir.x < 0.0);
}

#[test]
fn alternating_examples() {
    let tol = Tolerance::unit();
    let q = |xs| Quadrisecant::from_hits(on_axis(xs), &tol).unwrap();
    assert!(is_alternating(&q([0.0, 2.0, 1.0, 3.0]), &tol).unwrap());
    assert!(!is_alternating(&q([0.0, 1.0, 2.0, 3.0]), &tol).unwrap());
    assert!(!is_alternating(&q([0.0, 1.0, 3.0, 2.0]), &tol).unwrap());
    // the counted long-knot type also alternates once the knot is closed up
    assert!(is_alternating(&q([1.0, 3.0, 0.0, 2.0]), &tol).unwrap());
    assert_eq!(closed_labels(&q([0.0, 2.0, 1.0, 3.0])).map(|l| l.rot), Some(2));
    assert_eq!(closed_labels(&q([1.0, 3.0, 0.0, 2.0])).map(|l| l.rot), Some(0));
}

#[test]
fn long_trefoil_counts_one_quadrisecant_type() {
    let long = long_from_closed(&trefoil(24), REL).unwrap();
    let ev = nu2_long(&long, &EvalOptions::default()).unwrap();
    assert!(!ev.contributions.is_empty());
    assert!(ev.contributions.iter().all(|c| c.sigma == "(1342)"));
    let sum: i64 = ev.contributions.iter().map(|c| c.epsilon as i64).sum();
    assert_eq!((sum, ev.value), (1, 1));
    assert!(ev.quadrisecant_count >= ev.contributions.len());
}

fn random_unit(rng: &mut ChaCha8Rng) -> Vec3 {
    loop {
        let v = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        if let Some(u) = v.normalized() {
            return u;
        }
    }
}

#[test]
fn sign_is_invariant_under_rigid_motions_and_reflections() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let tol = Tolerance::new(1e-12, 1.0);
    let mut checked = 0;
    for _ in 0..200 {
        let p = Vec3::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let u = random_unit(&mut rng);
        let f = [0, 1, 2, 3].map(|_| p + u * rng.gen_range(-3.0..3.0));
        let d = [0, 1, 2, 3].map(|_| random_unit(&mut rng));
        let Ok(s) = sign_epsilon(&f, &d, &tol) else {
            continue;
        };
        let rot = Mat3::rotation(random_unit(&mut rng), rng.gen_range(0.0..6.3));
        let shift = Vec3::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
        for linear in [rot, rot.mul_mat(&Mat3::diag(Vec3::new(1.0, -1.0, 1.0)))] {
            let m = AffineMap::new(linear, shift);
            let moved = sign_epsilon(&f.map(|x| m.apply(x)), &d.map(|x| m.apply_vector(x)), &tol).unwrap();
            assert_eq!(moved, s);
        }
        checked += 1;
    }
    assert!(checked >= 100, "{checked} trials");
}

#[test]
fn sign_is_unchanged_by_the_mirror_image() {
    for k in [trefoil(24), figure_eight(32)] {
        let (g, qs) = generic(&k);
        let m = g.mirrored();
        let mq = enumerate_quadrisecants(&m, &m.tolerance(REL)).unwrap();
        assert_eq!(qs.len(), mq.len());
        for (a, b) in qs.iter().zip(&mq) {
            assert_eq!(a.edges(), b.edges());
            assert_eq!((a.sigma, a.epsilon), (b.sigma, b.epsilon));
        }
    }
}

#[test]
fn independent_of_enumeration_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for k in [trefoil(24), random_polygon(8, 15)] {
        let (g, qs) = generic(&k);
        let tol = g.tolerance(REL);
        for _ in 0..4 {
            let mut order: Vec<usize> = (0..g.edge_count()).collect();
            order.shuffle(&mut rng);
            assert_eq!(enumerate_quadrisecants_in_order(&g, &tol, &order).unwrap(), qs);
        }
        assert!(enumerate_quadrisecants_in_order(&g, &tol, &[0, 0, 1]).is_err());
    }
}
