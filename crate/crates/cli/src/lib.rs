//! Library side of the command-line front end: parameter handling and the
//! benchmark suites. The acceptance test suite drives these entry points
//! directly.

pub mod params;
pub mod suites;
