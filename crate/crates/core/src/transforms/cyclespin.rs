//! Cycle spinning: a wavelet basis applied to `M` circular shifts of the signal.

use std::collections::HashSet;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::frame::{analyze, Frame, FrameStructure};
use crate::signal::{CoefficientVector, FrameIndex, IndexLayout, Signal};

use super::dwt::{roll_into, translation_period, WaveletBasis};

/// `(T_m u)(k) = u(k - m)`.
pub fn shift_signal(u: &[f64], m: usize, out: &mut [f64]) {
    roll_into(u, m, out);
}

/// `(T_m^* v)(k) = v(k + m)`.
pub fn unshift_signal(v: &[f64], m: usize, out: &mut [f64]) {
    let n = v.len();
    roll_into(v, (n - m % n) % n, out);
}

/// The stacked frame `{T_m^* φ_ω : ω ∈ Ω, 0 <= m < M}`; coefficients are
/// ordered shift-major, each block in the basis layout.
#[derive(Debug, Clone)]
pub struct CycleSpinFrame {
    basis: WaveletBasis,
    shifts: usize,
    layout: Arc<IndexLayout>,
}

impl CycleSpinFrame {
    pub fn new(basis: WaveletBasis, shifts: usize) -> Result<Self> {
        let n = basis.signal_len();
        if !shifts.is_power_of_two() {
            return Err(invalid("M", format!("{shifts} is not a power of two")));
        }
        if shifts > n {
            return Err(invalid("M", format!("{shifts} exceeds n = {n}")));
        }
        let mut indices = Vec::with_capacity(shifts * n);
        for m in 0..shifts {
            indices.extend(basis.layout().indices().iter().map(|idx| match *idx {
                FrameIndex::Scaling { k } => FrameIndex::ShiftedScaling { k, m },
                FrameIndex::Wavelet { j, k } => FrameIndex::Shifted { j, k, m },
                other => unreachable!("basis index {other}"),
            }));
        }
        let layout = Arc::new(IndexLayout::new(indices)?);
        Ok(Self {
            basis,
            shifts,
            layout,
        })
    }

    pub fn basis(&self) -> &WaveletBasis {
        &self.basis
    }

    pub fn shifts(&self) -> usize {
        self.shifts
    }

    /// Distinct translations in one index group of the basis.
    fn group_distinct(&self, group: usize) -> usize {
        let n = self.basis.signal_len();
        let period = translation_period(self.basis.group_atom(group));
        let stride = self.basis.group_stride(group);
        let count = n / stride;
        let mut seen = HashSet::new();
        for k in 0..count {
            for m in 0..self.shifts {
                seen.insert((k * stride + n - m) % n % period);
            }
        }
        seen.len()
    }
}

impl Frame for CycleSpinFrame {
    fn name(&self) -> String {
        format!("cyclespin({}, M={})", self.basis.name(), self.shifts)
    }

    fn signal_len(&self) -> usize {
        self.basis.signal_len()
    }

    fn layout(&self) -> &Arc<IndexLayout> {
        &self.layout
    }

    fn structure(&self) -> FrameStructure {
        match self.basis.structure() {
            FrameStructure::Orthonormal => FrameStructure::Tight {
                bound: self.shifts as f64,
            },
            _ => FrameStructure::General,
        }
    }

    fn analyze_into(&self, signal: &[f64], out: &mut [f64]) {
        let n = self.signal_len();
        out.par_chunks_mut(n).enumerate().for_each_init(
            || vec![0.0; n],
            |shifted, (m, block)| {
                shift_signal(signal, m, shifted);
                self.basis.analyze_into(shifted, block);
            },
        );
    }

    fn adjoint_into(&self, coeffs: &[f64], out: &mut [f64]) {
        let n = self.signal_len();
        let parts: Vec<Vec<f64>> = coeffs
            .par_chunks(n)
            .enumerate()
            .map(|(m, block)| {
                let mut v = vec![0.0; n];
                self.basis.adjoint_into(block, &mut v);
                let mut back = vec![0.0; n];
                unshift_signal(&v, m, &mut back);
                back
            })
            .collect();
        out.iter_mut().for_each(|v| *v = 0.0);
        for part in parts {
            out.iter_mut().zip(part).for_each(|(o, p)| *o += p);
        }
    }

    fn atom_into(&self, pos: usize, out: &mut [f64]) {
        let n = self.signal_len();
        let (m, q) = (pos / n, pos % n);
        let (group, shift) = self.basis.atom_location(q);
        roll_into(self.basis.group_atom(group), (shift + n - m) % n, out);
    }

    fn distinct_count(&self) -> usize {
        (0..self.basis.group_count())
            .map(|g| self.group_distinct(g))
            .sum()
    }

    fn distinct_detail_count(&self) -> usize {
        (1..self.basis.group_count())
            .map(|g| self.group_distinct(g))
            .sum()
    }
}

/// Stacked coefficients `W T_m u`, `m = 0..M-1`.
pub fn cs_analyze(frame: &CycleSpinFrame, signal: &Signal) -> Result<CoefficientVector> {
    analyze(frame, signal)
}

/// Number of distinct wavelet atoms among `M` shifts of an `n`-point basis
/// decomposed to level 0: `n ⌊log2 M⌋ + M (2^⌈log2(n/M)⌉ - 1)`.
pub fn cs_distinct_count(n: usize, shifts: usize) -> Result<usize> {
    if shifts == 0 || n == 0 {
        return Err(invalid("M", "n and M must be positive"));
    }
    if shifts > n {
        return Err(Error::InvalidParameter {
            name: "M",
            reason: format!("{shifts} exceeds n = {n}"),
        });
    }
    let floor_log = (usize::BITS - 1 - shifts.leading_zeros()) as usize;
    let mut ceil_exp = 0;
    while shifts << ceil_exp < n {
        ceil_exp += 1;
    }
    Ok(n * floor_log + shifts * ((1usize << ceil_exp) - 1))
}
