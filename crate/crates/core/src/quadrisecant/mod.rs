//! Quadrisecants of polygonal knots: enumeration, permutation type, sign.

mod classify;
mod enumerate;

pub use classify::{closed_labels, is_alternating, middle_arc, n_l, sign_epsilon, ClosedLabels, MiddleArc};
pub use enumerate::{enumerate_quadrisecants, enumerate_quadrisecants_in_order, Hit, Permutation, Quadrisecant};
