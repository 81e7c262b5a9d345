//! Exact solver for multiple-choice vector bin packing (MVBP).
//!
//! Items come in types with demands and one or more incarnations
//! (alternative weight vectors); bins come in types with capacity vectors
//! and costs.  The solver builds, per bin type, a DAG whose source-target
//! paths are exactly the valid packing patterns, stitches the per-type
//! graphs under a super source and target, compresses the result by
//! longest-path relabeling, solves the induced integer flow model, and
//! decomposes the optimal flow back into bins.

pub mod bench;
pub mod error;
pub mod graph;
pub mod instance;
pub mod model;
pub mod pipeline;
pub mod solution;
pub mod solve;

pub use error::{Error, Result};
