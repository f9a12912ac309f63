//! Vectors, robust predicates, lines and four-line transversals.

mod lines;
mod predicates;
mod transversal;
mod vector;

pub use lines::{
    canonical_lines, classify_three_lines, normalize_three_lines, AffineMap, Line, Segment,
    ThreeLineCase, ThreeLineClass,
};
pub use predicates::{
    orient2, orient3, plane_offset, point_segment_distance, segment_closest, Orientation,
    Tolerance,
};
pub use transversal::{transversals_of_four_lines, transversals_of_four_segments, SegmentTransversal};
pub use vector::{det3, Mat3, Point3, Vec3};
