//! Oversampled sine frames with atoms `sin(π ω k / n)` on the frequency grid
//! `ω ∈ {1/r, 2/r, ...}`.
//!
//! Every sine vanishes at `k = 0`, so the unit impulse at 0 completes the
//! family to a frame of `R^n`. The frequency `ω = n` gives the zero vector and
//! is excluded.

use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{invalid, Result};
use crate::frame::{Frame, FrameStructure};
use crate::numeric::CompensatedSum;
use crate::signal::IndexLayout;

pub struct SineFrame {
    n: usize,
    oversample: usize,
    layout: Arc<IndexLayout>,
    norms: Vec<f64>,
    excluded: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for SineFrame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SineFrame")
            .field("n", &self.n)
            .field("oversample", &self.oversample)
            .field("excluded", &self.excluded)
            .finish()
    }
}

impl SineFrame {
    pub fn new(n: usize, oversample: usize) -> Result<Self> {
        if oversample == 0 {
            return Err(invalid("oversample", "must be at least 1"));
        }
        if n < 2 {
            return Err(invalid("n", "sine frames need n >= 2"));
        }
        let grid = oversample * n;
        let mut norms = Vec::with_capacity(grid - 1);
        let mut excluded = Vec::new();
        for q in 1..=grid {
            let theta = std::f64::consts::PI * q as f64 / grid as f64;
            let energy: CompensatedSum = (0..n).map(|k| (theta * k as f64).sin().powi(2)).collect();
            let norm = energy.value().sqrt();
            if q == grid || norm < 1e-8 {
                excluded.push(q as f64 / oversample as f64);
            } else {
                norms.push(norm);
            }
        }
        debug_assert_eq!(norms.len(), grid - 1);
        let len = 2 * grid;
        let mut planner = FftPlanner::new();
        Ok(Self {
            n,
            oversample,
            layout: Arc::new(IndexLayout::flat(grid)),
            norms,
            excluded,
            forward: planner.plan_fft_forward(len),
            inverse: planner.plan_fft_inverse(len),
        })
    }

    pub fn oversample(&self) -> usize {
        self.oversample
    }

    /// Frequencies whose candidate atoms vanish identically.
    pub fn excluded_frequencies(&self) -> &[f64] {
        &self.excluded
    }

    /// Frequency `ω` of the atom at `pos`; `None` for the impulse at 0.
    pub fn frequency(&self, pos: usize) -> Option<f64> {
        (pos < self.norms.len()).then(|| (pos + 1) as f64 / self.oversample as f64)
    }

    /// Position of the sine atom with frequency `ω`, if `ω` is on the grid.
    pub fn position_of(&self, frequency: f64) -> Option<usize> {
        let q = frequency * self.oversample as f64;
        let rounded = q.round();
        ((q - rounded).abs() < 1e-9 && rounded >= 1.0 && (rounded as usize) <= self.norms.len())
            .then(|| rounded as usize - 1)
    }

    fn impulse_position(&self) -> usize {
        self.norms.len()
    }
}

impl Frame for SineFrame {
    fn name(&self) -> String {
        format!("sine(n={}, r={})", self.n, self.oversample)
    }

    fn signal_len(&self) -> usize {
        self.n
    }

    fn layout(&self) -> &Arc<IndexLayout> {
        &self.layout
    }

    fn structure(&self) -> FrameStructure {
        if self.oversample == 1 {
            FrameStructure::Orthonormal
        } else {
            FrameStructure::General
        }
    }

    fn analyze_into(&self, signal: &[f64], out: &mut [f64]) {
        let len = 2 * self.oversample * self.n;
        let mut buf = vec![Complex::new(0.0, 0.0); len];
        for (b, x) in buf.iter_mut().zip(signal) {
            b.re = *x;
        }
        self.forward.process(&mut buf);
        for (q, (o, norm)) in out.iter_mut().zip(&self.norms).enumerate() {
            *o = -buf[q + 1].im / norm;
        }
        out[self.impulse_position()] = signal[0];
    }

    fn adjoint_into(&self, coeffs: &[f64], out: &mut [f64]) {
        let len = 2 * self.oversample * self.n;
        let mut buf = vec![Complex::new(0.0, 0.0); len];
        for (q, (c, norm)) in coeffs.iter().zip(&self.norms).enumerate() {
            buf[q + 1].re = c / norm;
        }
        self.inverse.process(&mut buf);
        for (o, b) in out.iter_mut().zip(&buf) {
            *o = b.im;
        }
        out[0] += coeffs[self.impulse_position()];
    }

    fn atom_into(&self, pos: usize, out: &mut [f64]) {
        if pos == self.impulse_position() {
            out.iter_mut().for_each(|v| *v = 0.0);
            out[0] = 1.0;
            return;
        }
        let theta = std::f64::consts::PI * (pos + 1) as f64 / (self.oversample * self.n) as f64;
        let norm = self.norms[pos];
        for (k, o) in out.iter_mut().enumerate() {
            *o = (theta * k as f64).sin() / norm;
        }
    }
}
