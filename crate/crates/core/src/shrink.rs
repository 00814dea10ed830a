//! Coefficientwise shrinkage and the frame thresholding estimator
//! `û = Φ⁺ S(Φ v, T)`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::evt::ThresholdSpec;
use crate::frame::{analyze, dual_synthesize, Frame, Subspace};
use crate::signal::{CoefficientVector, Signal};
use crate::transforms::{shift_signal, unshift_signal, WaveletBasis};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShrinkageRule {
    #[default]
    Soft,
    Hard,
    Garrote,
}

impl ShrinkageRule {
    /// `|F(y ± T, T)| <= |y|` for all `y`. Only the soft rule has it: hard
    /// thresholding and the garrote both exceed `|y|` at `y = 0.5`, `T = 1`.
    pub fn satisfies_shrinkage_property(self) -> bool {
        matches!(self, ShrinkageRule::Soft)
    }
}

impl std::str::FromStr for ShrinkageRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "soft" => Ok(Self::Soft),
            "hard" => Ok(Self::Hard),
            "garrote" => Ok(Self::Garrote),
            other => Err(invalid("rule", format!("unknown rule `{other}`"))),
        }
    }
}

/// Soft: `sign(y)(|y| - T)₊`; hard: `y 1{|y| >= T}`; garrote: `y (1 - T²/y²)₊`.
pub fn shrink_value(y: f64, t: f64, rule: ShrinkageRule) -> f64 {
    match rule {
        ShrinkageRule::Soft => {
            let mag = y.abs() - t;
            if mag > 0.0 {
                mag.copysign(y)
            } else {
                0.0
            }
        }
        ShrinkageRule::Hard => {
            if y.abs() >= t {
                y
            } else {
                0.0
            }
        }
        ShrinkageRule::Garrote => {
            if y == 0.0 {
                0.0
            } else {
                y * (1.0 - t * t / (y * y)).max(0.0)
            }
        }
    }
}

/// Shrinks the coefficients selected by `subspace`; the rest pass through.
/// Returns the number of selected coefficients left nonzero.
pub fn shrink_in_place(
    coeffs: &mut CoefficientVector,
    t: f64,
    rule: ShrinkageRule,
    subspace: Subspace,
) -> usize {
    let layout = std::sync::Arc::clone(coeffs.layout());
    let mut kept = 0;
    for (v, s) in coeffs.values_mut().iter_mut().zip(layout.scaling_mask()) {
        if subspace.includes(*s) {
            *v = shrink_value(*v, t, rule);
            kept += usize::from(*v != 0.0);
        }
    }
    kept
}

#[derive(Debug, Clone)]
pub struct DenoiseResult {
    pub estimate: Signal,
    pub thresholded_coeffs: CoefficientVector,
    pub threshold_used: f64,
    pub kept_count: usize,
}

/// Thresholding estimator with the threshold resolved from `spec`, acting on
/// every coefficient.
pub fn denoise<F: Frame + ?Sized>(
    frame: &F,
    data: &Signal,
    spec: &ThresholdSpec,
    rule: ShrinkageRule,
) -> Result<DenoiseResult> {
    denoise_with_threshold(frame, data, spec.resolve()?, rule, Subspace::Full)
}

pub fn denoise_with_threshold<F: Frame + ?Sized>(
    frame: &F,
    data: &Signal,
    t: f64,
    rule: ShrinkageRule,
    subspace: Subspace,
) -> Result<DenoiseResult> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(invalid("T", format!("{t} must be finite and >= 0")));
    }
    let mut coeffs = analyze(frame, data)?;
    let kept_count = shrink_in_place(&mut coeffs, t, rule, subspace);
    let estimate = dual_synthesize(frame, &coeffs)?;
    Ok(DenoiseResult {
        estimate,
        thresholded_coeffs: coeffs,
        threshold_used: t,
        kept_count,
    })
}

/// `‖candidate - center‖_∞ <= T`.
pub fn confidence_region_contains(
    center: &CoefficientVector,
    t: f64,
    candidate: &CoefficientVector,
) -> Result<bool> {
    if !center.same_index_set(candidate) {
        return Err(Error::IndexMismatch);
    }
    Ok(center
        .values()
        .iter()
        .zip(candidate.values())
        .all(|(a, b)| (a - b).abs() <= t))
}

/// Cycle spinning as an average: threshold the basis coefficients of each of
/// the `M` shifted data vectors, reconstruct, shift back, and average.
pub fn cycle_spin_average(
    basis: &WaveletBasis,
    data: &Signal,
    shifts: usize,
    t: f64,
    rule: ShrinkageRule,
    subspace: Subspace,
) -> Result<Signal> {
    if shifts == 0 {
        return Err(invalid("M", "must be positive"));
    }
    let n = data.len();
    let mut total = vec![0.0; n];
    let mut shifted = vec![0.0; n];
    let mut back = vec![0.0; n];
    for m in 0..shifts {
        shift_signal(data.samples(), m, &mut shifted);
        let part =
            denoise_with_threshold(basis, &Signal::new(shifted.clone())?, t, rule, subspace)?;
        unshift_signal(part.estimate.samples(), m, &mut back);
        total.iter_mut().zip(&back).for_each(|(s, b)| *s += b);
    }
    total.iter_mut().for_each(|v| *v /= shifts as f64);
    Signal::new(total)
}
