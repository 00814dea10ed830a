//! Gumbel limit law, normalizing constants for maxima of Gaussian
//! coefficients, and the threshold catalogue built from them.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::frame::{Frame, Subspace};
use crate::numeric::exact_log2;
use crate::transforms::{WaveletBasis, WaveletFilterPair};

/// Gumbel distribution function `exp(-e^{-z})`.
pub fn gumbel_cdf(z: f64) -> f64 {
    (-(-z).exp()).exp()
}

/// Upper `α` quantile `z(α) = -log log(1 / (1 - α))`, so `gumbel_cdf(z(α)) = 1 - α`.
pub fn gumbel_quantile(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(-(-(-alpha).ln_1p()).ln())
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(invalid("alpha", format!("{alpha} is outside (0, 1)")))
    }
}

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma > 0.0 && sigma.is_finite() {
        Ok(())
    } else {
        Err(invalid("sigma", format!("{sigma} must be positive")))
    }
}

fn check_count(m: usize) -> Result<()> {
    if m >= 2 {
        Ok(())
    } else {
        Err(invalid("m", format!("{m} must be at least 2")))
    }
}

/// Whether the maximum is taken over absolute values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flavor {
    /// `max |X_i|`.
    Chi,
    /// `max X_i`.
    Normal,
}

/// Constants with `(max - b) / a` converging to the standard Gumbel law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GumbelNorms {
    pub a: f64,
    pub b: f64,
    pub flavor: Flavor,
    pub m: usize,
}

impl GumbelNorms {
    /// `σ (a z + b)`.
    pub fn threshold(&self, sigma: f64, z: f64) -> f64 {
        sigma * (self.a * z + self.b)
    }
}

fn norms(m: usize, flavor: Flavor) -> Result<GumbelNorms> {
    check_count(m)?;
    let log_m = (m as f64).ln();
    let root = (2.0 * log_m).sqrt();
    let constant = match flavor {
        Flavor::Chi => PI.ln(),
        Flavor::Normal => (4.0 * PI).ln(),
    };
    Ok(GumbelNorms {
        a: 1.0 / root,
        b: root - (log_m.ln() + constant) / (2.0 * root),
        flavor,
        m,
    })
}

/// Normalizers for the maximum of `m` absolute standard normals.
pub fn norms_chi(m: usize) -> Result<GumbelNorms> {
    norms(m, Flavor::Chi)
}

/// Normalizers for the maximum of `m` standard normals.
pub fn norms_normal(m: usize) -> Result<GumbelNorms> {
    norms(m, Flavor::Normal)
}

/// `σ √(2 log m)`.
pub fn universal_threshold(sigma: f64, m: usize) -> Result<f64> {
    check_sigma(sigma)?;
    check_count(m)?;
    Ok(sigma * (2.0 * (m as f64).ln()).sqrt())
}

/// `σ √(2 log m) + σ (2z - log log m - log π) / (2 √(2 log m))`.
pub fn threshold_from_zn(sigma: f64, m: usize, z: f64) -> Result<f64> {
    check_sigma(sigma)?;
    Ok(norms_chi(m)?.threshold(sigma, z))
}

/// Extreme value threshold `σ (a z(α) + b)` with chi normalizers.
pub fn evt_threshold(sigma: f64, alpha: f64, m: usize) -> Result<f64> {
    threshold_from_zn(sigma, m, gumbel_quantile(alpha)?)
}

/// Location constant for `M` cycle-spin shifts of an `n`-point basis:
/// `√(2 log n) + (2 log log2 M - log log n - log π) / (2 √(2 log n))`.
pub fn cyclespin_location(n: usize, shifts: usize) -> Result<f64> {
    let log2_shifts = exact_log2(shifts)
        .ok_or_else(|| invalid("M", format!("{shifts} is not a power of two")))?;
    if shifts < 2 {
        return Err(invalid(
            "M",
            "a single shift is the basis itself; use the extreme value threshold",
        ));
    }
    if shifts > n {
        return Err(invalid("M", format!("{shifts} exceeds n = {n}")));
    }
    let base = norms_chi(n)?;
    let root = (2.0 * (n as f64).ln()).sqrt();
    Ok(base.b + (log2_shifts as f64).ln() / root)
}

/// `σ (a(n) z(α) + b_M(n))`.
pub fn cyclespin_threshold(sigma: f64, alpha: f64, n: usize, shifts: usize) -> Result<f64> {
    check_sigma(sigma)?;
    let z = gumbel_quantile(alpha)?;
    let a = norms_chi(n)?.a;
    Ok(sigma * (a * z + cyclespin_location(n, shifts)?))
}

/// `σ [√(2 log n) + (z + log(c/π)) / √(2 log n)]`.
pub fn ti_threshold_from_z(sigma: f64, z: f64, n: usize, c: f64) -> Result<f64> {
    check_sigma(sigma)?;
    if n < 4 {
        return Err(invalid("n", format!("{n} must be at least 4")));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(invalid("c", format!("{c} must be positive")));
    }
    let root = (2.0 * (n as f64).ln()).sqrt();
    Ok(sigma * (root + (z + (c / PI).ln()) / root))
}

/// TI threshold at the Gumbel quantile `z(α)`.
pub fn ti_threshold(sigma: f64, alpha: f64, n: usize, c: f64) -> Result<f64> {
    ti_threshold_from_z(sigma, gumbel_quantile(alpha)?, n, c)
}

/// Samples per unit length below which [`ti_constant_c`] refuses to run.
pub const MIN_TI_GRID: usize = 1 << 12;

/// Largest relative change of `c` under grid halving accepted as convergence.
pub const TI_GRID_TOLERANCE: f64 = 0.25;

/// Curvature constant of a wavelet autocorrelation, `κ(t) = 1 - c² t² / 2 + o(t²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TiConstant {
    pub c: f64,
    /// Grid step `1 / grid_size` of the central difference.
    pub grid_step: f64,
    /// Estimate on the grid with twice the step.
    pub coarse_c: f64,
}

/// Unit-norm samples of the analysis mother wavelet, `grid_size` samples per
/// unit length, on a periodic window of 16 units.
#[derive(Debug, Clone)]
pub struct SampledWavelet {
    samples: Vec<f64>,
    grid_size: usize,
}

impl SampledWavelet {
    pub fn new(filters: &WaveletFilterPair, grid_size: usize) -> Result<Self> {
        let refine = exact_log2(grid_size)
            .ok_or_else(|| invalid("grid_size", format!("{grid_size} is not a power of two")))?;
        const WINDOW_LOG2: u32 = 4;
        let n = grid_size << WINDOW_LOG2;
        // the scale-4 atom of an n-point basis samples ψ(16 t) at step 1/n
        let basis = WaveletBasis::new(filters.clone(), n, WINDOW_LOG2)?;
        debug_assert_eq!(basis.levels(), refine + WINDOW_LOG2);
        Ok(Self {
            samples: basis.base_atom(Some(WINDOW_LOG2)).to_vec(),
            grid_size,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// Periodic autocorrelation `κ` at a lag of `lag` grid steps.
    pub fn autocorrelation(&self, lag: isize) -> f64 {
        let n = self.samples.len() as isize;
        self.samples
            .iter()
            .enumerate()
            .map(|(t, v)| v * self.samples[(t as isize + lag).rem_euclid(n) as usize])
            .sum()
    }

    /// `√(2 (κ(0) - κ(h)) / h²)` with `h` one grid step.
    pub fn curvature_constant(&self) -> Result<f64> {
        let h = 1.0 / self.grid_size as f64;
        let drop = self.autocorrelation(0) - self.autocorrelation(1);
        if drop <= 0.0 {
            return Err(Error::NotDifferentiable(format!(
                "autocorrelation curvature estimate {:e} is not negative",
                -drop
            )));
        }
        Ok((2.0 * drop).sqrt() / h)
    }
}

/// Computes `c` for the analysis wavelet of `filters` by central differences
/// of its autocorrelation, and rejects wavelets whose estimate does not settle
/// when the grid is refined.
pub fn ti_constant_c(filters: &WaveletFilterPair, grid_size: usize) -> Result<TiConstant> {
    if grid_size < MIN_TI_GRID {
        return Err(invalid(
            "grid_size",
            format!("{grid_size} is below the minimum {MIN_TI_GRID}"),
        ));
    }
    let fine = SampledWavelet::new(filters, grid_size)?.curvature_constant()?;
    let coarse = SampledWavelet::new(filters, grid_size / 2)?.curvature_constant()?;
    if ((fine - coarse) / fine).abs() > TI_GRID_TOLERANCE {
        return Err(Error::NotDifferentiable(format!(
            "{}: curvature estimate moves from {coarse:.4} to {fine:.4} under grid refinement",
            filters.name
        )));
    }
    Ok(TiConstant {
        c: fine,
        grid_step: 1.0 / grid_size as f64,
        coarse_c: coarse,
    })
}

/// How the threshold value is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum ThresholdRule {
    Universal,
    Evt {
        alpha: f64,
    },
    FromZn {
        z: f64,
    },
    /// `m` is the basis size `n`.
    Cyclespin {
        alpha: f64,
        #[serde(rename = "M")]
        shifts: usize,
    },
    /// `m` is the signal length `n`.
    Ti {
        alpha: f64,
        c: f64,
    },
    Fixed {
        value: f64,
    },
}

impl ThresholdRule {
    /// Significance level of the rules that have one.
    pub fn alpha(&self) -> Option<f64> {
        match *self {
            ThresholdRule::Evt { alpha }
            | ThresholdRule::Cyclespin { alpha, .. }
            | ThresholdRule::Ti { alpha, .. } => Some(alpha),
            _ => None,
        }
    }
}

/// A threshold rule with the noise level and the count it is evaluated at.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSpec {
    #[serde(flatten)]
    pub rule: ThresholdRule,
    pub sigma: f64,
    pub m: usize,
}

impl ThresholdSpec {
    pub fn new(rule: ThresholdRule, sigma: f64, m: usize) -> Self {
        Self { rule, sigma, m }
    }

    /// Picks `m` from the frame: the signal length for cycle-spin and TI
    /// rules, the distinct atom count of `subspace` otherwise.
    pub fn for_frame<F: Frame + ?Sized>(
        rule: ThresholdRule,
        sigma: f64,
        frame: &F,
        subspace: Subspace,
    ) -> Self {
        let m = match rule {
            ThresholdRule::Cyclespin { .. } | ThresholdRule::Ti { .. } => frame.signal_len(),
            _ => frame.effective_count(subspace),
        };
        Self { rule, sigma, m }
    }

    pub fn resolve(&self) -> Result<f64> {
        let t = match self.rule {
            ThresholdRule::Universal => universal_threshold(self.sigma, self.m)?,
            ThresholdRule::Evt { alpha } => evt_threshold(self.sigma, alpha, self.m)?,
            ThresholdRule::FromZn { z } => threshold_from_zn(self.sigma, self.m, z)?,
            ThresholdRule::Cyclespin { alpha, shifts } => {
                cyclespin_threshold(self.sigma, alpha, self.m, shifts)?
            }
            ThresholdRule::Ti { alpha, c } => ti_threshold(self.sigma, alpha, self.m, c)?,
            ThresholdRule::Fixed { value } => {
                if !(value >= 0.0 && value.is_finite()) {
                    return Err(invalid("T", format!("{value} must be finite and >= 0")));
                }
                value
            }
        };
        if !(t.is_finite() && t >= 0.0)
            || (t == 0.0 && !matches!(self.rule, ThresholdRule::Fixed { .. }))
        {
            return Err(invalid("threshold", format!("resolved to {t}")));
        }
        Ok(t)
    }
}
