use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn data(name: &str) -> String {
    format!("{}/../../data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn selflink(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_selflink"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("report is JSON")
}

fn values(r: &Value) -> Vec<(String, i64)> {
    r["methods"]
        .as_array()
        .unwrap()
        .iter()
        .map(|m| (m["name"].as_str().unwrap().to_string(), m["value"].as_i64().unwrap()))
        .collect()
}

#[test]
fn closed_trefoil_quadrisecant() {
    let f = data("trefoil.json");
    let out = selflink(&["--method", "quadrisecant", "--topology", "closed", &f]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["schema"], 1);
    assert_eq!(r["agree"], true);
    assert_eq!(r["input"]["topology"], "closed");
    assert_eq!(values(&r), vec![("quadrisecant".into(), 1)]);
    assert_eq!(r["methods"][0]["details"]["extremal_count"], 3);
}

#[test]
fn long_figure_eight_two_methods() {
    let f = data("figure-eight-long.json");
    let out = selflink(&["--method", "quadrisecant,gauss", "--topology", "long", "--input", &f]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["agree"], true);
    assert_eq!(values(&r), vec![("quadrisecant".into(), -1), ("gauss".into(), -1)]);
}

#[test]
fn self_intersecting_input_is_invalid() {
    let out = selflink(&["--method", "quadrisecant", &data("self-intersecting.json")]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("invalid knot"));
    assert!(out.stdout.is_empty());
}

#[test]
fn every_method_on_smooth_inputs() {
    for (file, topology, expected) in [
        ("trefoil-trig.json", "closed", 1),
        ("trefoil-long-trig.json", "long", 1),
        ("trefoil-poly.json", "long", 1),
        ("figure-eight-trig.json", "closed", -1),
    ] {
        let out = selflink(&["--method", "all", "--topology", topology, &data(file)]);
        assert_eq!(out.status.code(), Some(0), "{file}");
        let r = report(&out);
        let v = values(&r);
        assert_eq!(v.len(), 3, "{file}");
        assert!(v.iter().all(|(_, x)| *x == expected), "{file}: {v:?}");
    }
}

#[test]
fn all_skips_linking_for_polygons() {
    let out = selflink(&["--method", "all", &data("triangle.csv")]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["input"]["format"], "csv");
    assert_eq!(values(&r), vec![("quadrisecant".into(), 0), ("gauss".into(), 0)]);
}

#[test]
fn linking_on_polygon_is_unsupported() {
    let out = selflink(&["--method", "linking", &data("triangle.csv")]);
    assert_eq!(out.status.code(), Some(17));
}

#[test]
fn disagreement_exits_nonzero() {
    // five samples of the trefoil curve make an unknotted pentagon
    let out = selflink(&[
        "--method",
        "quadrisecant,linking",
        "--samples",
        "5",
        &data("trefoil-trig.json"),
    ]);
    assert_eq!(out.status.code(), Some(18));
    let r = report(&out);
    assert_eq!(r["agree"], false);
    assert_eq!(values(&r), vec![("quadrisecant".into(), 0), ("linking".into(), 1)]);
}

#[test]
fn parse_and_io_errors() {
    let dir = tempdir();
    let bad = dir.join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    assert_eq!(selflink(&[bad.to_str().unwrap()]).status.code(), Some(2));
    let missing = dir.join("missing.json");
    assert_eq!(selflink(&[missing.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(selflink(&[]).status.code(), Some(1));
    assert_eq!(selflink(&["--method", "nonsense", &data("trefoil.json")]).status.code(), Some(1));
}

#[test]
fn reads_stdin() {
    let text = std::fs::read(data("six-stick-trefoil.json")).unwrap();
    let mut child = Command::new(env!("CARGO_BIN_EXE_selflink"))
        .args(["--method", "quadrisecant,gauss", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(&text).unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(values(&report(&out)), vec![("quadrisecant".into(), 1), ("gauss".into(), 1)]);
}

#[test]
fn reports_are_byte_identical() {
    let dir = tempdir();
    let files: Vec<_> = (0..2).map(|i| dir.join(format!("r{i}.json"))).collect();
    let dumps: Vec<_> = (0..2).map(|i| dir.join(format!("d{i}.json"))).collect();
    for (r, d) in files.iter().zip(&dumps) {
        let out = selflink(&[
            "--method",
            "quadrisecant,gauss",
            "--seed",
            "17",
            "--report",
            r.to_str().unwrap(),
            "--dump-quadrisecants",
            d.to_str().unwrap(),
            &data("figure-eight.json"),
        ]);
        assert_eq!(out.status.code(), Some(0));
        assert!(out.stdout.is_empty());
    }
    assert_eq!(std::fs::read(&files[0]).unwrap(), std::fs::read(&files[1]).unwrap());
    assert_eq!(std::fs::read(&dumps[0]).unwrap(), std::fs::read(&dumps[1]).unwrap());
}

fn dump(file: &str) -> Value {
    let dir = tempdir();
    let d = dir.join("dump.json");
    let out = selflink(&["--dump-quadrisecants", d.to_str().unwrap(), &data(file)]);
    assert_eq!(out.status.code(), Some(0));
    serde_json::from_slice(&std::fs::read(d).unwrap()).unwrap()
}

#[test]
fn dump_closed_trefoil() {
    let d = dump("trefoil.json");
    assert_eq!(d["extremal_count"], 3);
    let alt: Vec<&Value> = d["quadrisecants"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|q| q["alternating"] == true)
        .collect();
    assert_eq!(alt.len(), 3);
    for q in alt {
        assert_eq!(q["epsilon"], 1);
        assert_eq!(q["n_l"], 1);
        assert_eq!(q["points"].as_array().unwrap().len(), 4);
    }
}

#[test]
fn dump_long_trefoil_and_triangle() {
    let d = dump("trefoil-long.json");
    let counted: Vec<&Value> = d["quadrisecants"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|q| q["counted"] == true)
        .collect();
    assert_eq!(counted.len(), 1);
    assert_eq!(counted[0]["sigma"], "(1342)");
    assert_eq!(counted[0]["line_order"], serde_json::json!([3, 1, 4, 2]));
    let t = dump("triangle.csv");
    assert!(t["quadrisecants"].as_array().unwrap().is_empty());
}

/// A fresh scratch directory under the target directory.
fn tempdir() -> std::path::PathBuf {
    use std::sync::atomic::{AtomicUsize, Ordering};
    static NEXT: AtomicUsize = AtomicUsize::new(0);
    let d = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join(format!(
        "cli-{}-{}",
        std::process::id(),
        NEXT.fetch_add(1, Ordering::Relaxed)
    ));
    std::fs::create_dir_all(&d).unwrap();
    d
}
