//! Soft-thresholding estimators over redundant frames, extreme-value
//! thresholds, and a seeded Monte Carlo harness for their distributional
//! properties.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod error;
pub mod evt;
pub mod frame;
pub mod gram;
pub mod io;
pub mod norms;
pub mod numeric;
pub mod shrink;
pub mod signal;
pub mod simulate;
pub mod transforms;

pub use error::{Error, Result};
pub use frame::{
    analyze, atom, dual_synthesize, frame_bounds, frame_operator, ExplicitFrame, Frame,
    FrameBounds, FrameStructure, Subspace,
};
pub use gram::{gram_coherence_counts, GramSummary, GramView};
pub use signal::{CoefficientVector, FrameIndex, IndexLayout, Signal};
