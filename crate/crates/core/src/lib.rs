//! Degree-two Vassiliev invariant of knots from their quadrisecants.

pub mod catalog;
pub mod error;
pub mod geom;
pub mod invariant;
pub mod knotmodel;
pub mod oracle;
pub mod quadrisecant;
pub mod report;
pub mod tracer;

pub use error::{Error, Result};
