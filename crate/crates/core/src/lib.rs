//! Combinatorial complexes of Morse functions on closed orientable surfaces
//! with a fixed set of numbered critical points.
//!
//! A Morse function with `p` minima, `q` saddles and `r` maxima on the
//! surface of genus `g = (2 - p + q - r) / 2` is encoded, up to fiberwise
//! equivalence, by a *framed numbered molecule*: a leveled collection of
//! ribbon-graph atoms joined by annuli. The classes form the cells of a
//! polyhedral complex `K` whose cells are indexed by ordered set partitions
//! of the saddle set, i.e. by faces of the permutohedron. This crate builds
//! `K`, checks that the natural projection to the permutohedron is a
//! dimension-preserving branched covering, computes the integer homology and
//! fundamental group of `K` from its order complex, and evaluates
//! winding-number invariants of Dehn-twist words about level circles.

pub mod cells;
pub mod molecule;
pub mod permutohedron;
pub mod schema;
pub mod topology;
pub mod winding;

pub use cells::{build_complex, Cell, CellId, ComplexPoset};
pub use molecule::{Atom, BoundaryCircle, FramedMolecule, SectorKind};
pub use permutohedron::{enumerate_faces, OrderedPartition, PermutohedronFace};
pub use topology::{homology, order_complex, pi1, rank_report, SimplicialComplex};
pub use winding::{CriticalSetup, SeparatingCurve, TwistWord};
