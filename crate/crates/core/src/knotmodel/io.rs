//! Reading knots from JSON and CSV.

use std::io::Read;

use serde::{Deserialize, Serialize};

use super::knot::{PLKnot, Topology};
use super::open::normalize_long;
use super::polynomial::PolynomialKnot;
use super::smooth::{PolyCurve, TrigCurve};
use crate::error::{Error, Result};
use crate::geom::{Mat3, Point3};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputFormat {
    Json,
    Csv,
    Poly,
    Trig,
}

/// Any knot the tools accept.
#[derive(Clone, Debug, PartialEq)]
pub enum KnotInput {
    Polygon(PLKnot),
    Polynomial(PolynomialKnot),
    Trig(TrigCurve),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum PolygonFile {
    Tagged {
        #[serde(default)]
        topology: Option<Topology>,
        vertices: Vec<Point3>,
    },
    Bare(Vec<Point3>),
}

#[derive(Deserialize)]
struct PolyFile {
    degree: usize,
    x: Vec<f64>,
    y: Vec<f64>,
    z: Vec<f64>,
}

#[derive(Deserialize)]
struct TrigFile {
    harmonics: Vec<super::smooth::Harmonic>,
    #[serde(default)]
    transform: Option<Mat3>,
}

fn parse_err(e: impl std::fmt::Display) -> Error {
    Error::Parse(e.to_string())
}

/// Build a polygon knot, normalising long knots into the unit box.
pub fn polygon(vertices: Vec<Point3>, topology: Topology) -> Result<PLKnot> {
    match topology {
        Topology::Closed => PLKnot::new(vertices, Topology::Closed),
        Topology::Long => normalize_long(vertices),
    }
}

/// Parse a knot. `topology` overrides (JSON) or supplies (CSV) the topology.
pub fn parse_knot(text: &str, format: InputFormat, topology: Option<Topology>) -> Result<KnotInput> {
    match format {
        InputFormat::Json => {
            let f: PolygonFile = serde_json::from_str(text).map_err(parse_err)?;
            let (top, verts) = match f {
                PolygonFile::Tagged { topology: t, vertices } => (t, vertices),
                PolygonFile::Bare(v) => (None, v),
            };
            let top = topology.or(top).unwrap_or(Topology::Closed);
            Ok(KnotInput::Polygon(polygon(verts, top)?))
        }
        InputFormat::Csv => {
            let verts = parse_csv(text)?;
            Ok(KnotInput::Polygon(polygon(verts, topology.unwrap_or(Topology::Closed))?))
        }
        InputFormat::Poly => {
            let f: PolyFile = serde_json::from_str(text).map_err(parse_err)?;
            let p = PolynomialKnot::new(
                f.degree,
                PolyCurve {
                    x: f.x,
                    y: f.y,
                    z: f.z,
                },
            )?;
            Ok(KnotInput::Polynomial(p))
        }
        InputFormat::Trig => {
            let f: TrigFile = serde_json::from_str(text).map_err(parse_err)?;
            let mut c = TrigCurve::new(f.harmonics);
            if let Some(m) = f.transform {
                c = c.with_transform(m);
            }
            if c.harmonics.is_empty() {
                return Err(Error::Parse("no harmonics".into()));
            }
            Ok(KnotInput::Trig(c))
        }
    }
}

/// Guess the format of an input: `.csv` files are CSV, JSON objects with
/// `harmonics` or `degree` keys are trigonometric or polynomial curves, and
/// anything else is a polygon.
pub fn detect_format(path: &str, text: &str) -> InputFormat {
    if path.to_ascii_lowercase().ends_with(".csv") {
        return InputFormat::Csv;
    }
    match serde_json::from_str::<serde_json::Value>(text) {
        Ok(serde_json::Value::Object(m)) if m.contains_key("harmonics") => InputFormat::Trig,
        Ok(serde_json::Value::Object(m)) if m.contains_key("degree") => InputFormat::Poly,
        _ => InputFormat::Json,
    }
}

pub fn read_knot<R: Read>(mut r: R, format: InputFormat, topology: Option<Topology>) -> Result<KnotInput> {
    let mut s = String::new();
    r.read_to_string(&mut s).map_err(parse_err)?;
    parse_knot(&s, format, topology)
}

/// `x,y,z` rows; a first row that does not parse as numbers is a header.
fn parse_csv(text: &str) -> Result<Vec<Point3>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(parse_err)?;
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        if rec.len() != 3 {
            return Err(Error::Parse(format!(
                "row {}: expected 3 fields, got {}",
                i + 1,
                rec.len()
            )));
        }
        let nums: std::result::Result<Vec<f64>, _> = rec.iter().map(|f| f.parse::<f64>()).collect();
        match nums {
            Ok(v) => out.push(Point3::new(v[0], v[1], v[2])),
            Err(e) if i == 0 => {
                let _ = e;
                continue;
            }
            Err(e) => return Err(Error::Parse(format!("row {}: {e}", i + 1))),
        }
    }
    Ok(out)
}

/// Serialise a polygon knot in the JSON input format.
pub fn knot_to_json(knot: &PLKnot) -> String {
    serde_json::to_string_pretty(knot).expect("knot serialises")
}
