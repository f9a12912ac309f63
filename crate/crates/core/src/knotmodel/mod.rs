//! Polygonal, polynomial and smooth knots; hulls, perturbation, projection.

mod diagram;
mod hull;
mod io;
mod knot;
mod open;
mod perturb;
mod polynomial;
mod smooth;

pub use diagram::{picture_frame, project_polygons, project_to_diagram, Crossing, KnotDiagram, LinkDiagram};
pub use hull::{extremal_set, ConvexHull, ExtremalComponent, ExtremalSet, Facet};
pub use io::{detect_format, knot_to_json, parse_knot, polygon, read_knot, InputFormat, KnotInput};
pub use knot::{KnotPoint, PLKnot, Topology};
pub use open::{close_long, closing_path, endpoints_extremal, normalize_long, open_at_extremal, open_at_vertex, OPENING_OFFSET_REL};
pub use perturb::{check_generic, derived_seed, perturb, MAX_PERTURB_REL};
pub use polynomial::{sample_polynomial, PolynomialKnot};
pub use smooth::{Curve, Harmonic, PolyCurve, Sample, SmoothCurve, SmoothKnot, TrigCurve};
