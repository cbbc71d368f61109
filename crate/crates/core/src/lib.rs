//! Exact Euclidean Steiner trees for small terminal sets, and the
//! self-similar "ladder" inputs whose minimal trees are infinite.
//!
//! * [`geom`]: points, equilateral points, Fermat points, hexagonal frames.
//! * [`topology`]: full topologies and block decompositions.
//! * [`melzak`]: realisation of full topologies and the exhaustive solver.
//! * [`ladder`]: the ladder inputs, closed-form lengths, explicit trees.
//! * [`analysis`]: Maxwell's length identity, classification, validation.
//! * [`dynamics`]: the interval map behind the long edges of a ladder tree.
//! * [`io`] and [`svg`]: file formats.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod analysis;
pub mod dynamics;
pub mod error;
pub mod geom;
pub mod io;
pub mod ladder;
pub mod melzak;
pub mod selftest;
pub mod svg;
pub mod topology;
pub mod tree;

pub use error::{Error, Result};
pub use geom::{HexCoord, HexFrame, Point};
pub use tree::{EmbeddedTree, Role, Terminal, TerminalSet, Vertex};
