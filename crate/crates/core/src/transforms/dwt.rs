//! Periodic discrete wavelet transform through the multiresolution filter bank.

use std::sync::Arc;

use crate::error::{invalid, Error, Result};
use crate::frame::{check_len, Frame, FrameStructure};
use crate::numeric::exact_log2;
use crate::signal::{CoefficientVector, FrameIndex, IndexLayout, Signal};

use super::filters::{Filter, WaveletFilterPair};

/// Correlates `x` with `f` at even positions: `out[k] = Σ_i f[i] x[2k + off + i]`.
fn correlate_down(f: &Filter, x: &[f64], out: &mut [f64]) {
    let len = x.len() as isize;
    for (k, o) in out.iter_mut().enumerate() {
        let base = 2 * k as isize + f.offset;
        *o = f
            .taps
            .iter()
            .enumerate()
            .map(|(i, t)| t * x[(base + i as isize).rem_euclid(len) as usize])
            .sum();
    }
}

/// Transpose of [`correlate_down`], accumulated into `out`.
fn scatter_up(f: &Filter, c: &[f64], out: &mut [f64]) {
    let len = out.len() as isize;
    for (k, v) in c.iter().enumerate() {
        let base = 2 * k as isize + f.offset;
        for (i, t) in f.taps.iter().enumerate() {
            out[(base + i as isize).rem_euclid(len) as usize] += t * v;
        }
    }
}

/// One decomposition level on `x`, writing `[approx | detail]` into `out`.
pub(crate) fn split_level(lo: &Filter, hi: &Filter, x: &[f64], out: &mut [f64]) {
    let half = x.len() / 2;
    let (a, d) = out.split_at_mut(half);
    correlate_down(lo, x, a);
    correlate_down(hi, x, d);
}

/// Scatters `[approx | detail]` from `c` back to length `out.len()`.
pub(crate) fn merge_level(lo: &Filter, hi: &Filter, c: &[f64], out: &mut [f64]) {
    let half = c.len() / 2;
    out.iter_mut().for_each(|v| *v = 0.0);
    scatter_up(lo, &c[..half], out);
    scatter_up(hi, &c[half..], out);
}

pub(crate) fn roll_into(base: &[f64], shift: usize, out: &mut [f64]) {
    let n = base.len();
    let s = shift % n;
    out[s..].copy_from_slice(&base[..n - s]);
    out[..s].copy_from_slice(&base[n - s..]);
}

/// Smallest `p` dividing `n` with `atom` invariant under translation by `p`.
pub(crate) fn translation_period(atom: &[f64]) -> usize {
    let n = atom.len();
    (1..=n)
        .filter(|p| n.is_multiple_of(*p))
        .find(|&p| (0..n).all(|t| (atom[t] - atom[(t + p) % n]).abs() <= 1e-12))
        .unwrap_or(n)
}

/// A periodic biorthogonal wavelet basis of `R^n`, `n = 2^J`, decomposed down to
/// `coarsest_level` and with every analysis atom normalized to unit norm.
///
/// Layout: `Scaling { k }` for `k < 2^L` first, then `Wavelet { j, k }` at
/// position `2^j + k` for `L <= j < J`.
#[derive(Debug, Clone)]
pub struct WaveletBasis {
    filters: WaveletFilterPair,
    n: usize,
    levels: u32,
    coarsest_level: u32,
    layout: Arc<IndexLayout>,
    /// Norm of the raw analysis atoms, indexed like `base_atoms`.
    raw_norms: Vec<f64>,
    /// Normalized atoms at location 0: scaling first, then one per scale.
    base_atoms: Vec<Vec<f64>>,
}

impl WaveletBasis {
    pub fn new(filters: WaveletFilterPair, n: usize, coarsest_level: u32) -> Result<Self> {
        let levels = exact_log2(n).ok_or(Error::NotPowerOfTwo(n))?;
        if levels <= coarsest_level {
            return Err(invalid(
                "coarsest_level",
                format!("{coarsest_level} must be below log2(n) = {levels}"),
            ));
        }
        let mut indices: Vec<FrameIndex> = (0..1usize << coarsest_level)
            .map(|k| FrameIndex::Scaling { k })
            .collect();
        for j in coarsest_level..levels {
            indices.extend((0..1usize << j).map(|k| FrameIndex::Wavelet { j, k }));
        }
        let layout = Arc::new(IndexLayout::new(indices)?);

        let mut basis = Self {
            filters,
            n,
            levels,
            coarsest_level,
            layout,
            raw_norms: Vec::new(),
            base_atoms: Vec::new(),
        };
        let mut raw_atoms = Vec::new();
        for group in 0..=(levels - coarsest_level) as usize {
            let mut unit = vec![0.0; n];
            unit[basis.group_start(group)] = 1.0;
            let mut atom = vec![0.0; n];
            basis.raw_adjoint(&unit, &mut atom);
            raw_atoms.push(atom);
        }
        basis.raw_norms = raw_atoms
            .iter()
            .map(|a| a.iter().map(|v| v * v).sum::<f64>().sqrt())
            .collect();
        basis.base_atoms = raw_atoms
            .into_iter()
            .zip(&basis.raw_norms)
            .map(|(a, norm)| a.into_iter().map(|v| v / norm).collect())
            .collect();
        Ok(basis)
    }

    pub fn filters(&self) -> &WaveletFilterPair {
        &self.filters
    }

    pub fn levels(&self) -> u32 {
        self.levels
    }

    pub fn coarsest_level(&self) -> u32 {
        self.coarsest_level
    }

    /// Number of index groups: the scaling group plus one per detail scale.
    pub(crate) fn group_count(&self) -> usize {
        (self.levels - self.coarsest_level) as usize + 1
    }

    /// Group 0 holds the scaling coefficients, group `g >= 1` scale `L + g - 1`.
    pub(crate) fn group_start(&self, group: usize) -> usize {
        if group == 0 {
            0
        } else {
            1 << (self.coarsest_level as usize + group - 1)
        }
    }

    pub(crate) fn group_of(&self, pos: usize) -> usize {
        let l = self.coarsest_level as usize;
        if pos < 1 << l {
            0
        } else {
            (usize::BITS - 1 - pos.leading_zeros()) as usize - l + 1
        }
    }

    /// Sample spacing between consecutive atoms of a group.
    pub(crate) fn group_stride(&self, group: usize) -> usize {
        let j = if group == 0 {
            self.coarsest_level as usize
        } else {
            self.coarsest_level as usize + group - 1
        };
        self.n >> j
    }

    /// Group and circular translation of the atom at `pos`.
    pub(crate) fn atom_location(&self, pos: usize) -> (usize, usize) {
        let group = self.group_of(pos);
        let k = pos - self.group_start(group);
        (group, k * self.group_stride(group))
    }

    pub(crate) fn group_atom(&self, group: usize) -> &[f64] {
        &self.base_atoms[group]
    }

    pub(crate) fn group_norm(&self, group: usize) -> f64 {
        self.raw_norms[group]
    }

    /// Normalized atom at location 0 for scale `j` (`None` = scaling atom).
    pub fn base_atom(&self, scale: Option<u32>) -> &[f64] {
        match scale {
            None => &self.base_atoms[0],
            Some(j) => &self.base_atoms[(j - self.coarsest_level) as usize + 1],
        }
    }

    /// Norms of the unnormalized analysis atoms, scaling first then by scale.
    pub fn raw_atom_norms(&self) -> &[f64] {
        &self.raw_norms
    }

    fn norm_at(&self, pos: usize) -> f64 {
        self.raw_norms[self.group_of(pos)]
    }

    fn raw_forward(&self, x: &[f64], out: &mut [f64]) {
        let lo = &self.filters.analysis_lowpass;
        let hi = &self.filters.analysis_highpass;
        out.copy_from_slice(x);
        let mut tmp = vec![0.0; self.n];
        let mut len = self.n;
        while len > 1 << self.coarsest_level {
            split_level(lo, hi, &out[..len], &mut tmp[..len]);
            out[..len].copy_from_slice(&tmp[..len]);
            len /= 2;
        }
    }

    /// Transpose of the raw analysis operator.
    fn raw_adjoint(&self, c: &[f64], out: &mut [f64]) {
        let lo = &self.filters.analysis_lowpass;
        let hi = &self.filters.analysis_highpass;
        self.raw_merge(lo, hi, c, out);
    }

    fn raw_inverse(&self, c: &[f64], out: &mut [f64]) {
        let lo = &self.filters.synthesis_lowpass;
        let hi = &self.filters.synthesis_highpass;
        self.raw_merge(lo, hi, c, out);
    }

    fn raw_merge(&self, lo: &Filter, hi: &Filter, c: &[f64], out: &mut [f64]) {
        out.copy_from_slice(c);
        let mut tmp = vec![0.0; self.n];
        let mut len = 2usize << self.coarsest_level;
        while len <= self.n {
            merge_level(lo, hi, &out[..len], &mut tmp[..len]);
            out[..len].copy_from_slice(&tmp[..len]);
            len *= 2;
        }
    }
}

impl Frame for WaveletBasis {
    fn name(&self) -> String {
        format!("wavelet({}, n={})", self.filters.name, self.n)
    }

    fn signal_len(&self) -> usize {
        self.n
    }

    fn layout(&self) -> &Arc<IndexLayout> {
        &self.layout
    }

    fn structure(&self) -> FrameStructure {
        if self.filters.is_orthonormal() {
            FrameStructure::Orthonormal
        } else {
            FrameStructure::Basis
        }
    }

    fn analyze_into(&self, signal: &[f64], out: &mut [f64]) {
        self.raw_forward(signal, out);
        for (pos, v) in out.iter_mut().enumerate() {
            *v /= self.norm_at(pos);
        }
    }

    fn adjoint_into(&self, coeffs: &[f64], out: &mut [f64]) {
        let scaled: Vec<f64> = coeffs
            .iter()
            .enumerate()
            .map(|(pos, v)| v / self.norm_at(pos))
            .collect();
        self.raw_adjoint(&scaled, out);
    }

    fn inverse_into(&self, coeffs: &[f64], out: &mut [f64]) -> Result<()> {
        let scaled: Vec<f64> = coeffs
            .iter()
            .enumerate()
            .map(|(pos, v)| v * self.norm_at(pos))
            .collect();
        self.raw_inverse(&scaled, out);
        Ok(())
    }

    fn atom_into(&self, pos: usize, out: &mut [f64]) {
        let (group, shift) = self.atom_location(pos);
        roll_into(&self.base_atoms[group], shift, out);
    }

    fn distinct_detail_count(&self) -> usize {
        self.n - (1 << self.coarsest_level)
    }
}

/// Normalized wavelet coefficients of `signal`.
pub fn dwt_forward(basis: &WaveletBasis, signal: &Signal) -> Result<CoefficientVector> {
    crate::frame::analyze(basis, signal)
}

/// Exact inverse of [`dwt_forward`].
pub fn dwt_inverse(basis: &WaveletBasis, coeffs: &CoefficientVector) -> Result<Signal> {
    check_len(basis.atom_count(), coeffs.count())?;
    if **coeffs.layout() != **basis.layout() {
        return Err(Error::IndexMismatch);
    }
    let mut out = vec![0.0; basis.n];
    basis.inverse_into(coeffs.values(), &mut out)?;
    Signal::new(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::atom;

    fn haar(n: usize) -> WaveletBasis {
        WaveletBasis::new(WaveletFilterPair::haar(), n, 0).unwrap()
    }

    #[test]
    fn haar_constant_pair() {
        let b = haar(2);
        let c = dwt_forward(&b, &Signal::new(vec![1.0, 1.0]).unwrap()).unwrap();
        assert!((c.get(&FrameIndex::Scaling { k: 0 }).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert!(c.get(&FrameIndex::Wavelet { j: 0, k: 0 }).unwrap().abs() < 1e-15);
    }

    #[test]
    fn haar_spike_matches_dense_matrix() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        // rows: scaling, (0,0), (1,0), (1,1)
        let h = [
            [0.5, 0.5, 0.5, 0.5],
            [0.5, 0.5, -0.5, -0.5],
            [s, -s, 0.0, 0.0],
            [0.0, 0.0, s, -s],
        ];
        let b = haar(4);
        let c = dwt_forward(&b, &Signal::new(vec![1.0, 0.0, 0.0, 0.0]).unwrap()).unwrap();
        for (row, v) in h.iter().zip(c.values()) {
            assert!((row[0] - v).abs() < 1e-15);
        }
    }

    #[test]
    fn atoms_are_unit_norm_and_match_analysis() {
        for filters in [WaveletFilterPair::daubechies4(), WaveletFilterPair::cdf97()] {
            let b = WaveletBasis::new(filters, 32, 1).unwrap();
            let x: Vec<f64> = (0..32).map(|t| ((t * 13) % 7) as f64 - 3.0).collect();
            let mut c = vec![0.0; 32];
            b.analyze_into(&x, &mut c);
            for (pos, coeff) in c.iter().enumerate() {
                let a = atom(&b, pos);
                let norm: f64 = a.iter().map(|v| v * v).sum::<f64>().sqrt();
                assert!((norm - 1.0).abs() < 1e-10);
                let ip: f64 = a.iter().zip(&x).map(|(p, q)| p * q).sum();
                assert!((ip - coeff).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn rejects_bad_sizes() {
        assert_eq!(
            WaveletBasis::new(WaveletFilterPair::haar(), 12, 0).unwrap_err(),
            Error::NotPowerOfTwo(12)
        );
        assert!(WaveletBasis::new(WaveletFilterPair::haar(), 8, 3).is_err());
    }
}
