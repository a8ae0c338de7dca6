//! Edge colorings of complete graphs that are *good* with respect to a
//! mandatory set of triangle types: every triangle type that is allowed on an
//! edge must actually be witnessed by some third vertex, no forbidden
//! triangle may occur, and every color must appear at every vertex.
//!
//! The centerpiece is a deterministic 3-color (red, two shades of blue)
//! coloring of the complete graph on the 3432 seven-element subsets of a
//! 14-point ground set. Edge colors are decided by intersection size, with
//! 2-point intersections deferred to a two-shaded *splitting graph* on the
//! ground points. The crate provides:
//!
//! - [`points`] / [`bitrow`] — subset bitmasks, the canonical vertex order,
//!   combinatorial ranking, and the bit-vector rows the verifier runs on;
//! - [`splitgraph`] — two-shaded complete graphs on ground points and the
//!   monochromatic K4 / K4,3 / K5,2 freeness checks the construction needs;
//! - [`mandate`] — label sets and mandatory triple sets, including the
//!   red/blue families and the all-distinct-or-constant family;
//! - [`construct`] — the 3432-vertex coloring plus cyclic-difference and
//!   affine-plane colorings;
//! - [`verify`] — the parallel bit-row verifier for the three goodness
//!   conditions and the relation-composition atom check;
//! - [`replay`] — the case-by-case witness-family check that re-derives the
//!   goodness of the 3432-vertex coloring from the splitting-graph
//!   properties alone;
//! - [`search`] — sum-free difference sets and a seeded hill-climbing search
//!   for shade splits of cyclic colorings;
//! - [`oracle`] — an independent brute-force verifier used to validate the
//!   fast one;
//! - [`format`] — the binary coloring file and the JSON spec files consumed
//!   by the CLI.

pub mod bitrow;
pub mod construct;
pub mod format;
pub mod mandate;
pub mod oracle;
pub mod points;
pub mod replay;
pub mod search;
pub mod splitgraph;
pub mod verify;

pub use bitrow::BitRow;
pub use construct::{
    base_color, build_affine_coloring, build_cyclic_coloring, build_m2_coloring, EdgeColoring,
};
pub use mandate::{ColorTriple, Label, MandatorySet, Need};
pub use points::{enumerate_vertices, intersection_size, vertex_at, vertex_index, PointSet, VertexIndex};
pub use splitgraph::{build_cyclic_splitting, BlueShade, SplittingGraph, SplittingReport};
pub use verify::{check_atom_property, color_rows, verify_good, witness_set, VerificationReport, VerifyOptions};
