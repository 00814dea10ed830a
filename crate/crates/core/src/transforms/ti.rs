//! Translation-invariant wavelet frame: every circular shift at every scale.
//!
//! The frame is the cycle-spin multiset with `M = n` (`n²` coefficients). Its
//! distinct values are computed by the undecimated (à trous) filter bank in
//! `O(n log n)` and expanded on demand.

use std::sync::Arc;

use crate::error::Result;
use crate::frame::{check_len, Frame, FrameStructure, Subspace};
use crate::signal::{CoefficientVector, FrameIndex, IndexLayout, Signal};

use super::cyclespin::CycleSpinFrame;
use super::dwt::{roll_into, translation_period, WaveletBasis};
use super::filters::Filter;

#[derive(Debug, Clone)]
pub struct TIWaveletFrame {
    spin: CycleSpinFrame,
    /// Layout of the distinct values: scaling shifts, then scale-major,
    /// shift-minor detail values.
    translation_layout: Arc<IndexLayout>,
}

impl TIWaveletFrame {
    pub fn new(basis: WaveletBasis) -> Result<Self> {
        let n = basis.signal_len();
        let mut indices: Vec<FrameIndex> = (0..n)
            .map(|shift| FrameIndex::TranslatedScaling { shift })
            .collect();
        for j in basis.coarsest_level()..basis.levels() {
            indices.extend((0..n).map(|shift| FrameIndex::Translated { j, shift }));
        }
        let translation_layout = Arc::new(IndexLayout::new(indices)?);
        let spin = CycleSpinFrame::new(basis, n)?;
        Ok(Self {
            spin,
            translation_layout,
        })
    }

    pub fn basis(&self) -> &WaveletBasis {
        self.spin.basis()
    }

    pub fn translation_layout(&self) -> &Arc<IndexLayout> {
        &self.translation_layout
    }

    fn n(&self) -> usize {
        self.spin.signal_len()
    }

    /// Normalized coefficients of all translations, in the translation layout.
    pub fn translation_coefficients(&self, signal: &[f64], out: &mut [f64]) {
        let basis = self.basis();
        let n = self.n();
        let depth = basis.group_count() - 1;
        let lo = &basis.filters().analysis_lowpass;
        let hi = &basis.filters().analysis_highpass;
        let mut approx = signal.to_vec();
        let mut next = vec![0.0; n];
        for level in 1..=depth {
            let dilation = 1usize << (level - 1);
            // level `level` produces scale J - level, stored in group depth - level + 1
            let group = depth - level + 1;
            let detail = &mut out[group * n..(group + 1) * n];
            dilated_correlate(hi, dilation, &approx, detail);
            dilated_correlate(lo, dilation, &approx, &mut next);
            std::mem::swap(&mut approx, &mut next);
            let norm = basis.group_norm(group);
            detail.iter_mut().for_each(|v| *v /= norm);
        }
        let norm = basis.group_norm(0);
        for (o, a) in out[..n].iter_mut().zip(&approx) {
            *o = a / norm;
        }
    }

    /// Transpose of [`Self::translation_coefficients`].
    pub fn translation_adjoint(&self, weights: &[f64], out: &mut [f64]) {
        let basis = self.basis();
        let n = self.n();
        let depth = basis.group_count() - 1;
        let lo = &basis.filters().analysis_lowpass;
        let hi = &basis.filters().analysis_highpass;
        let norm = basis.group_norm(0);
        let mut approx: Vec<f64> = weights[..n].iter().map(|w| w / norm).collect();
        let mut prev = vec![0.0; n];
        for level in (1..=depth).rev() {
            let dilation = 1usize << (level - 1);
            let group = depth - level + 1;
            let norm = basis.group_norm(group);
            let detail: Vec<f64> = weights[group * n..(group + 1) * n]
                .iter()
                .map(|w| w / norm)
                .collect();
            prev.iter_mut().for_each(|v| *v = 0.0);
            dilated_scatter(lo, dilation, &approx, &mut prev);
            dilated_scatter(hi, dilation, &detail, &mut prev);
            std::mem::swap(&mut approx, &mut prev);
        }
        out.copy_from_slice(&approx);
    }

    /// Translation-layout position of multiset position `pos`.
    fn translation_position(&self, pos: usize) -> usize {
        let n = self.n();
        let (m, q) = (pos / n, pos % n);
        let (group, shift) = self.basis().atom_location(q);
        group * n + (shift + n - m) % n
    }
}

/// `out[s] = Σ_i f[i] x[s + dilation (off + i)]`, periodic.
fn dilated_correlate(f: &Filter, dilation: usize, x: &[f64], out: &mut [f64]) {
    let n = x.len() as isize;
    let d = dilation as isize;
    for (s, o) in out.iter_mut().enumerate() {
        *o = f
            .taps
            .iter()
            .enumerate()
            .map(|(i, t)| t * x[(s as isize + d * (f.offset + i as isize)).rem_euclid(n) as usize])
            .sum();
    }
}

fn dilated_scatter(f: &Filter, dilation: usize, c: &[f64], out: &mut [f64]) {
    let n = out.len() as isize;
    let d = dilation as isize;
    for (s, v) in c.iter().enumerate() {
        for (i, t) in f.taps.iter().enumerate() {
            out[(s as isize + d * (f.offset + i as isize)).rem_euclid(n) as usize] += t * v;
        }
    }
}

impl Frame for TIWaveletFrame {
    fn name(&self) -> String {
        format!("ti({})", self.basis().name())
    }

    fn signal_len(&self) -> usize {
        self.n()
    }

    fn layout(&self) -> &Arc<IndexLayout> {
        self.spin.layout()
    }

    fn structure(&self) -> FrameStructure {
        self.spin.structure()
    }

    fn analyze_into(&self, signal: &[f64], out: &mut [f64]) {
        let mut values = vec![0.0; self.translation_layout.len()];
        self.translation_coefficients(signal, &mut values);
        for (pos, o) in out.iter_mut().enumerate() {
            *o = values[self.translation_position(pos)];
        }
    }

    fn adjoint_into(&self, coeffs: &[f64], out: &mut [f64]) {
        let mut weights = vec![0.0; self.translation_layout.len()];
        for (pos, c) in coeffs.iter().enumerate() {
            weights[self.translation_position(pos)] += c;
        }
        self.translation_adjoint(&weights, out);
    }

    fn atom_into(&self, pos: usize, out: &mut [f64]) {
        self.spin.atom_into(pos, out);
    }

    fn distinct_count(&self) -> usize {
        let basis = self.basis();
        (0..basis.group_count())
            .map(|g| translation_period(basis.group_atom(g)))
            .sum()
    }

    fn distinct_detail_count(&self) -> usize {
        let basis = self.basis();
        (1..basis.group_count())
            .map(|g| translation_period(basis.group_atom(g)))
            .sum()
    }

    fn max_abs_coefficient(&self, signal: &[f64], subspace: Subspace) -> f64 {
        let n = self.n();
        let mut values = vec![0.0; self.translation_layout.len()];
        self.translation_coefficients(signal, &mut values);
        let from = match subspace {
            Subspace::Full => 0,
            Subspace::Detail => n,
        };
        values[from..]
            .iter()
            .fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }
}

/// All translations at every scale, in the translation layout
/// (scaling shifts first, then scale-major, shift-minor).
pub fn ti_analyze(frame: &TIWaveletFrame, signal: &Signal) -> Result<CoefficientVector> {
    check_len(frame.signal_len(), signal.len())?;
    let mut values = vec![0.0; frame.translation_layout.len()];
    frame.translation_coefficients(signal.samples(), &mut values);
    CoefficientVector::new(values, Arc::clone(&frame.translation_layout))
}

/// Atom of the translation layout at `pos`.
pub fn ti_translation_atom(frame: &TIWaveletFrame, pos: usize) -> Vec<f64> {
    let n = frame.n();
    let mut out = vec![0.0; n];
    roll_into(frame.basis().group_atom(pos / n), pos % n, &mut out);
    out
}
