//! Construction and Tanner-graph optimization of non-binary spatially-coupled
//! quasi-cyclic LDPC codes with column weight three.
//!
//! The design flow has three stages:
//!
//! 1. [`overlap_opt`] picks the partition of the underlying block code whose
//!    coupled binary protograph has the fewest 6-cycles, using a closed-form
//!    count in terms of the partition's row overlaps.
//! 2. [`cpo`] re-assigns circulant powers so that as few of those protograph
//!    cycles as possible lift to 6-cycles of the coupled code.
//! 3. [`gast_tools`] finds absorbing-set configurations in the labeled graph and
//!    removes them by changing edge weights, checked with an exhaustive oracle.
//!
//! [`pipeline`] chains the stages; [`baselines`] provides the cutting-vector and
//! minimum-overlap partitions used for comparison.

pub mod baselines;
pub mod cpo;
pub mod cycle_analysis;
pub mod error;
pub mod gast_tools;
pub mod gf;
pub mod graph;
pub mod io;
pub mod overlap_opt;
pub mod pipeline;
pub mod qc_codes;

pub use error::{Error, Result};
pub use gf::{FieldGf, Symbol};
pub use graph::{Edge, TannerGraph};
pub use overlap_opt::{CycleCensus, OverlapVector};
pub use qc_codes::{EdgeChange, PartitionMask, ProtoMatrix, SCCode};
