use selflink::catalog::{figure_eight, long_from_closed, random_polygon, six_stick_trefoil, trefoil, triangle, unknot};
use selflink::geom::{Point3, Vec3};
use selflink::invariant::{nu2_long, EvalOptions};
use selflink::knotmodel::{picture_frame, project_to_diagram, PLKnot};
use selflink::oracle::{c2_from_diagram, c2_oracle, gauss_diagram, linking_oracle, random_direction};

const REL: f64 = 1e-9;

/// Crossings of a closed polygon seen along `dir`, found by brute force over
/// edge pairs: (over position, under position, sign).
fn brute_crossings(k: &PLKnot, dir: Vec3) -> Vec<(f64, f64, i8)> {
    let (e1, e2) = picture_frame(dir);
    let p2 = |p: Point3| [p.dot(e1), p.dot(e2)];
    let n = k.edge_count();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if k.adjacent(i, j) {
                continue;
            }
            let (a, b) = (k.edge(i), k.edge(j));
            let (a0, a1, b0, b1) = (p2(a.start), p2(a.end), p2(b.start), p2(b.end));
            let da = [a1[0] - a0[0], a1[1] - a0[1]];
            let db = [b1[0] - b0[0], b1[1] - b0[1]];
            let den = da[0] * db[1] - da[1] * db[0];
            if den == 0.0 {
                continue;
            }
            let w = [b0[0] - a0[0], b0[1] - a0[1]];
            let s = (w[0] * db[1] - w[1] * db[0]) / den;
            let t = (w[0] * da[1] - w[1] * da[0]) / den;
            if !(0.0..1.0).contains(&s) || !(0.0..1.0).contains(&t) {
                continue;
            }
            let (ha, hb) = (a.at(s).dot(dir), b.at(t).dot(dir));
            let (over, under, uo, uu) = if ha > hb {
                (i as f64 + s, j as f64 + t, a.vector(), b.vector())
            } else {
                (j as f64 + t, i as f64 + s, b.vector(), a.vector())
            };
            let sign = if dir.dot(uo.cross(uu)) > 0.0 { 1 } else { -1 };
            out.push((over, under, sign));
        }
    }
    out
}

/// c2 from the other degree-two arrow pattern: over(a), under(b), under(a),
/// over(b) from the basepoint.
fn c2_other_pattern(chords: &[(f64, f64, i8)]) -> i64 {
    let mut total = 0;
    for a in chords {
        for b in chords {
            if a.0 < b.1 && b.1 < a.1 && a.1 < b.0 {
                total += (a.2 * b.2) as i64;
            }
        }
    }
    total
}

fn writhe(chords: &[(f64, f64, i8)]) -> i64 {
    chords.iter().map(|c| c.2 as i64).sum()
}

#[test]
fn known_diagram_values() {
    let d = project_to_diagram(&triangle(), Vec3::new(0.1, 0.2, 1.0).normalized().unwrap(), REL).unwrap();
    assert!(d.crossings.is_empty());
    assert_eq!(c2_from_diagram(&d), 0);
    for (name, k, want) in [
        ("six-stick trefoil", six_stick_trefoil(), 1),
        ("trefoil", trefoil(24), 1),
        ("figure-eight", figure_eight(32), -1),
        ("unknot", unknot(16), 0),
    ] {
        let v = c2_oracle(&k, 3, REL).unwrap();
        assert_eq!(v.value, want, "{name}");
    }
}

#[test]
fn six_stick_trefoil_has_three_like_crossings() {
    let k = six_stick_trefoil();
    for seed in 0..5 {
        let dir = random_direction(seed);
        let brute = brute_crossings(&k, dir);
        let d = project_to_diagram(&k, dir, REL).unwrap();
        assert_eq!(d.crossings.len(), brute.len());
        assert_eq!(d.writhe(), writhe(&brute));
        if brute.len() == 3 {
            assert_eq!(writhe(&brute).abs(), 3);
        }
    }
}

#[test]
fn agrees_with_brute_force_diagram() {
    let mut knots = vec![trefoil(24), figure_eight(32), six_stick_trefoil(), unknot(16)];
    knots.extend((0..20).map(|i| random_polygon(900 + i, 6 + (i as usize * 3) % 20)));
    for (n, k) in knots.iter().enumerate() {
        let dir = random_direction(40 + n as u64);
        let Ok(d) = project_to_diagram(k, dir, REL) else {
            continue;
        };
        let brute = brute_crossings(k, dir);
        assert_eq!(d.crossings.len(), brute.len(), "knot {n}");
        assert_eq!(d.writhe(), writhe(&brute), "knot {n}");
        assert_eq!(c2_from_diagram(&d), c2_other_pattern(&brute), "knot {n}");
    }
}

#[test]
fn independent_of_projection_direction() {
    for (name, k) in [("trefoil", trefoil(24)), ("figure-eight", figure_eight(32)), ("random", random_polygon(77, 20))] {
        let values: Vec<i64> = (0..24).map(|s| c2_oracle(&k, 100 + s, REL).unwrap().value).collect();
        assert!(values.windows(2).all(|w| w[0] == w[1]), "{name}: {values:?}");
    }
}

#[test]
fn independent_of_basepoint() {
    for k in [trefoil(24), figure_eight(32), random_polygon(78, 18)] {
        let d = project_to_diagram(&k, random_direction(5), REL).unwrap();
        let base = c2_from_diagram(&d);
        for step in 0..d.length {
            let mut moved = d.clone();
            moved.basepoint = step as f64 + 0.37;
            assert_eq!(c2_from_diagram(&moved), base, "basepoint {}", moved.basepoint);
            assert_eq!(gauss_diagram(&moved).len(), d.crossings.len());
        }
    }
}

/// Stack `b` on top of `a`; both are long knots in the unit box.
fn connected_sum(a: &PLKnot, b: &PLKnot) -> PLKnot {
    let top = *a.vertices().last().unwrap();
    let start = b.vertices()[0];
    let shift = top - start + Vec3::new(0.0, 0.0, 0.1);
    let mut v = a.vertices().to_vec();
    v.extend(b.vertices().iter().map(|p| *p + shift));
    PLKnot::long(v).unwrap()
}

#[test]
fn connected_sums_add() {
    let t = long_from_closed(&trefoil(24), REL).unwrap();
    let f = long_from_closed(&figure_eight(32), REL).unwrap();
    let opts = EvalOptions::default();
    for (name, k, want) in [("trefoil # trefoil", connected_sum(&t, &t), 2), ("trefoil # figure-eight", connected_sum(&t, &f), 0)] {
        k.validate().unwrap();
        assert_eq!(c2_oracle(&k, 9, REL).unwrap().value, want, "{name} oracle");
        assert_eq!(nu2_long(&k, &opts).unwrap().value, want, "{name} quadrisecants");
    }
}

fn square(centre: Point3, a: Vec3, b: Vec3) -> Vec<Point3> {
    vec![centre + a + b, centre - a + b, centre - a - b, centre + a - b]
}

#[test]
fn link_values() {
    let x = Vec3::X;
    let y = Vec3::Y;
    let z = Vec3::Z;
    // split: far apart
    let a = square(Vec3::ZERO, x, y);
    let b = square(Vec3::new(5.0, 0.3, 0.2), x, z);
    assert_eq!(linking_oracle(&a, &b, 1, REL).unwrap().value, 0);
    // Hopf: the second square threads the first
    let h = square(Vec3::new(1.0, 0.0, 0.05), x * 1.1, z);
    let lk = linking_oracle(&a, &h, 1, REL).unwrap().value;
    assert_eq!(lk.abs(), 1);
    let mut back = h.clone();
    back.reverse();
    assert_eq!(linking_oracle(&a, &back, 2, REL).unwrap().value, -lk);
    assert_eq!(linking_oracle(&h, &a, 3, REL).unwrap().value, lk);
    for seed in 0..20 {
        assert_eq!(linking_oracle(&a, &h, 10 + seed, REL).unwrap().value, lk);
    }
}
