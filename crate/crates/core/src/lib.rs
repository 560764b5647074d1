//! Dehn p-colorings of knot diagrams, R-palette graphs, and the minimum
//! number of colors.

#![allow(clippy::needless_range_loop)]

pub mod catalog;
pub mod certificates;
pub mod cli;
pub mod coloring;
pub mod diagram;
pub mod enumerate;
pub mod exactalg;
pub mod palette;

pub use coloring::{DehnColoring, FoxColoring};
pub use diagram::{Diagram, PdCode};
pub use exactalg::{IntMatrix, ModVector};
