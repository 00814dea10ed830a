//! Concrete frames: periodic wavelet bases, cycle spinning, the
//! translation-invariant wavelet frame and oversampled sine frames.

pub mod cyclespin;
pub mod dwt;
pub mod filters;
pub mod sine;
pub mod spec;
pub mod ti;

pub use cyclespin::{cs_analyze, cs_distinct_count, shift_signal, unshift_signal, CycleSpinFrame};
pub use dwt::{dwt_forward, dwt_inverse, WaveletBasis};
pub use filters::{Filter, WaveletFilterPair};
pub use sine::SineFrame;
pub use spec::FrameSpec;
pub use ti::{ti_analyze, ti_translation_atom, TIWaveletFrame};
