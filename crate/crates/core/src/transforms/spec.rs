use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::frame::{ExplicitFrame, Frame};
use crate::io::read_matrix_csv;

use super::{CycleSpinFrame, SineFrame, TIWaveletFrame, WaveletBasis, WaveletFilterPair};

fn default_filters() -> String {
    "haar".to_string()
}

fn default_oversample() -> usize {
    1
}

/// JSON description of a frame, e.g. `{"type": "cyclespin", "n": 1024, "M": 4}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum FrameSpec {
    Wavelet {
        n: usize,
        #[serde(default = "default_filters")]
        filters: String,
        #[serde(default)]
        coarsest_level: u32,
    },
    Cyclespin {
        n: usize,
        #[serde(default = "default_filters")]
        filters: String,
        #[serde(default)]
        coarsest_level: u32,
        #[serde(rename = "M")]
        shifts: usize,
    },
    Ti {
        n: usize,
        #[serde(default = "default_filters")]
        filters: String,
        #[serde(default)]
        coarsest_level: u32,
    },
    Sine {
        n: usize,
        #[serde(default = "default_oversample")]
        oversample: usize,
    },
    Explicit {
        matrix_path: PathBuf,
        /// Rescale rows to unit norm instead of rejecting them.
        #[serde(default)]
        normalize: bool,
    },
}

impl FrameSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| crate::error::Error::Parse(e.to_string()))
    }

    pub fn signal_len(&self) -> Option<usize> {
        match self {
            FrameSpec::Wavelet { n, .. }
            | FrameSpec::Cyclespin { n, .. }
            | FrameSpec::Ti { n, .. }
            | FrameSpec::Sine { n, .. } => Some(*n),
            FrameSpec::Explicit { .. } => None,
        }
    }

    /// Same construction at another signal length.
    pub fn with_len(&self, len: usize) -> Result<Self> {
        let mut spec = self.clone();
        match &mut spec {
            FrameSpec::Wavelet { n, .. }
            | FrameSpec::Cyclespin { n, .. }
            | FrameSpec::Ti { n, .. }
            | FrameSpec::Sine { n, .. } => *n = len,
            FrameSpec::Explicit { .. } => {
                return Err(invalid("n", "explicit frames have a fixed size"));
            }
        }
        Ok(spec)
    }

    pub fn build(&self) -> Result<Box<dyn Frame>> {
        Ok(match self {
            FrameSpec::Wavelet { .. } => Box::new(self.build_basis()?),
            FrameSpec::Cyclespin { shifts, .. } => {
                Box::new(CycleSpinFrame::new(self.build_basis()?, *shifts)?)
            }
            FrameSpec::Ti { .. } => Box::new(TIWaveletFrame::new(self.build_basis()?)?),
            FrameSpec::Sine { n, oversample } => Box::new(SineFrame::new(*n, *oversample)?),
            FrameSpec::Explicit {
                matrix_path,
                normalize,
            } => {
                let rows = read_matrix_csv(matrix_path)?;
                if *normalize {
                    Box::new(ExplicitFrame::normalized(rows)?)
                } else {
                    Box::new(ExplicitFrame::new(rows)?)
                }
            }
        })
    }

    /// The underlying wavelet basis of wavelet, cycle-spin and TI specs.
    pub fn build_basis(&self) -> Result<WaveletBasis> {
        match self {
            FrameSpec::Wavelet {
                n,
                filters,
                coarsest_level,
            }
            | FrameSpec::Cyclespin {
                n,
                filters,
                coarsest_level,
                ..
            }
            | FrameSpec::Ti {
                n,
                filters,
                coarsest_level,
            } => WaveletBasis::new(WaveletFilterPair::by_name(filters)?, *n, *coarsest_level),
            _ => Err(invalid("type", "not a wavelet-based frame")),
        }
    }

    pub fn build_ti(&self) -> Result<TIWaveletFrame> {
        match self {
            FrameSpec::Ti { .. } => TIWaveletFrame::new(self.build_basis()?),
            _ => Err(invalid("type", "expected a `ti` frame spec")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_builds() {
        let spec =
            FrameSpec::from_json(r#"{"type":"cyclespin","n":16,"M":4,"filters":"d4"}"#).unwrap();
        let f = spec.build().unwrap();
        assert_eq!(f.atom_count(), 64);
        let back: FrameSpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(back, spec);
        assert!(FrameSpec::from_json(r#"{"type":"sine","n":8,"bogus":1}"#).is_err());
        assert_eq!(
            FrameSpec::from_json(r#"{"type":"sine","n":8}"#).unwrap(),
            FrameSpec::Sine {
                n: 8,
                oversample: 1
            }
        );
    }
}
