//! Blocked scans over the Gram matrix `<φ_ω, φ_ω'>` of a frame.
//!
//! Atoms are materialized lazily, [`GRAM_BLOCK`] at a time. Row blocks are
//! processed in parallel and their partial results combined in block order,
//! so every reduction is independent of the thread count.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::{Hash, Hasher};

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::frame::{frame_bounds, Frame, FrameBounds};

pub const GRAM_BLOCK: usize = 256;

/// Magnitudes within this distance below a threshold still count as reaching it.
pub const COHERENCE_TOLERANCE: f64 = 1e-12;

/// Anything whose upper-triangular Gram entries can be reduced block by block.
pub trait GramEntries: Sync {
    /// Number of atoms (rows of the Gram matrix).
    fn dim(&self) -> usize;

    /// Visits every entry `(r, c, κ)` with `r <= c` and combines per-row-block
    /// accumulators in block order.
    fn reduce_upper<A, V, C>(&self, init: impl Fn() -> A + Sync, visit: V, combine: C) -> A
    where
        A: Send,
        V: Fn(&mut A, usize, usize, f64) + Sync,
        C: Fn(&mut A, A);
}

impl GramEntries for DMatrix<f64> {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn reduce_upper<A, V, C>(&self, init: impl Fn() -> A + Sync, visit: V, combine: C) -> A
    where
        A: Send,
        V: Fn(&mut A, usize, usize, f64) + Sync,
        C: Fn(&mut A, A),
    {
        let m = self.nrows();
        let partials: Vec<A> = (0..m.div_ceil(GRAM_BLOCK))
            .into_par_iter()
            .map(|b| {
                let mut acc = init();
                for r in b * GRAM_BLOCK..((b + 1) * GRAM_BLOCK).min(m) {
                    for c in r..m {
                        visit(&mut acc, r, c, self[(r, c)]);
                    }
                }
                acc
            })
            .collect();
        let mut total = init();
        for p in partials {
            combine(&mut total, p);
        }
        total
    }
}

/// A selection of atoms of a frame whose pairwise inner products can be scanned.
pub struct GramView<'a, F: ?Sized> {
    frame: &'a F,
    positions: Vec<usize>,
}

impl<'a, F: Frame + ?Sized> GramView<'a, F> {
    /// All atoms, duplicates included.
    pub fn new(frame: &'a F) -> Self {
        let positions = (0..frame.atom_count()).collect();
        Self { frame, positions }
    }

    /// One representative per distinct atom (first occurrence).
    pub fn deduplicated(frame: &'a F) -> Self {
        Self {
            frame,
            positions: distinct_positions(frame),
        }
    }

    pub fn with_positions(frame: &'a F, positions: Vec<usize>) -> Self {
        Self { frame, positions }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[usize] {
        &self.positions
    }

    fn block_count(&self) -> usize {
        self.positions.len().div_ceil(GRAM_BLOCK)
    }

    fn block_range(&self, b: usize) -> std::ops::Range<usize> {
        let start = b * GRAM_BLOCK;
        start..(start + GRAM_BLOCK).min(self.positions.len())
    }

    /// Atoms of block `b` as columns of an `n × len` matrix.
    fn block_atoms(&self, b: usize) -> DMatrix<f64> {
        let range = self.block_range(b);
        let n = self.frame.signal_len();
        let mut atoms = DMatrix::zeros(n, range.len());
        let mut buf = vec![0.0; n];
        for (col, view_pos) in range.enumerate() {
            self.frame.atom_into(self.positions[view_pos], &mut buf);
            atoms.column_mut(col).copy_from_slice(&buf);
        }
        atoms
    }

    /// Dense Gram matrix; intended for small views only.
    pub fn dense(&self) -> DMatrix<f64> {
        let m = self.len();
        let mut g = DMatrix::zeros(m, m);
        let blocks: Vec<DMatrix<f64>> = (0..self.block_count())
            .into_par_iter()
            .map(|b| self.block_atoms(b))
            .collect();
        for (bi, a) in blocks.iter().enumerate() {
            for (bj, b) in blocks.iter().enumerate() {
                let block = a.tr_mul(b);
                g.view_mut((bi * GRAM_BLOCK, bj * GRAM_BLOCK), block.shape())
                    .copy_from(&block);
            }
        }
        g
    }
}

impl<F: Frame + ?Sized> GramEntries for GramView<'_, F> {
    fn dim(&self) -> usize {
        self.len()
    }

    fn reduce_upper<A, V, C>(&self, init: impl Fn() -> A + Sync, visit: V, combine: C) -> A
    where
        A: Send,
        V: Fn(&mut A, usize, usize, f64) + Sync,
        C: Fn(&mut A, A),
    {
        let partials: Vec<A> = (0..self.block_count())
            .into_par_iter()
            .map(|bi| {
                let mut acc = init();
                let rows = self.block_atoms(bi);
                let row_start = bi * GRAM_BLOCK;
                for bj in bi..self.block_count() {
                    let cols = if bj == bi {
                        rows.clone()
                    } else {
                        self.block_atoms(bj)
                    };
                    let col_start = bj * GRAM_BLOCK;
                    let gram = rows.tr_mul(&cols);
                    for r in 0..gram.nrows() {
                        let c_from = if bj == bi { r } else { 0 };
                        for c in c_from..gram.ncols() {
                            visit(&mut acc, row_start + r, col_start + c, gram[(r, c)]);
                        }
                    }
                }
                acc
            })
            .collect();
        let mut total = init();
        for p in partials {
            combine(&mut total, p);
        }
        total
    }
}

/// Positions of the first occurrence of every distinct atom.
///
/// Atoms are bucketed by a hash of their values rounded to `1e-9` and then
/// compared exactly (within `1e-9`) inside each bucket.
pub fn distinct_positions<F: Frame + ?Sized>(frame: &F) -> Vec<usize> {
    let n = frame.signal_len();
    let count = frame.atom_count();
    let hashes: Vec<u64> = (0..count)
        .into_par_iter()
        .map_init(
            || vec![0.0; n],
            |buf, pos| {
                frame.atom_into(pos, buf);
                atom_hash(buf)
            },
        )
        .collect();

    let mut buckets: HashMap<u64, Vec<usize>> = HashMap::new();
    let mut keep = Vec::new();
    let mut a = vec![0.0; n];
    let mut b = vec![0.0; n];
    for (pos, h) in hashes.into_iter().enumerate() {
        let bucket = buckets.entry(h).or_default();
        frame.atom_into(pos, &mut a);
        let duplicate = bucket.iter().any(|&other| {
            frame.atom_into(other, &mut b);
            a.iter().zip(&b).all(|(x, y)| (x - y).abs() <= 1e-9)
        });
        if !duplicate {
            bucket.push(pos);
            keep.push(pos);
        }
    }
    keep
}

fn atom_hash(atom: &[f64]) -> u64 {
    let mut h = DefaultHasher::new();
    for x in atom {
        ((x * 1e9).round() as i64).hash(&mut h);
    }
    h.finish()
}

/// Number of off-diagonal ordered pairs with `|κ| >= δ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherenceCount {
    pub delta: f64,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GramSummary {
    pub frame_bounds: FrameBounds,
    pub coherence_counts: Vec<CoherenceCount>,
    pub max_offdiag: f64,
}

/// Off-diagonal ordered-pair counts for each threshold in `deltas`,
/// and the largest off-diagonal magnitude.
pub fn offdiag_counts<G: GramEntries + ?Sized>(view: &G, deltas: &[f64]) -> (Vec<u64>, f64) {
    let k = deltas.len();
    let (counts, max) = view.reduce_upper(
        || (vec![0u64; k], 0.0_f64),
        |acc, r, c, kappa| {
            if r == c {
                return;
            }
            let mag = kappa.abs();
            acc.1 = acc.1.max(mag);
            for (slot, d) in acc.0.iter_mut().zip(deltas) {
                if mag >= d - COHERENCE_TOLERANCE {
                    *slot += 2;
                }
            }
        },
        |total, part| {
            for (t, p) in total.0.iter_mut().zip(part.0) {
                *t += p;
            }
            total.1 = total.1.max(part.1);
        },
    );
    (counts, max.min(1.0))
}

/// Frame bounds and coherence census over all atoms (duplicates included).
pub fn gram_coherence_counts<F: Frame + ?Sized>(frame: &F, deltas: &[f64]) -> Result<GramSummary> {
    if let Some(d) = deltas.iter().find(|d| !(**d > 0.0 && **d <= 1.0)) {
        return Err(invalid("delta", format!("{d} is outside (0, 1]")));
    }
    let bounds = frame_bounds(frame)?;
    let (counts, max_offdiag) = offdiag_counts(&GramView::new(frame), deltas);
    Ok(GramSummary {
        frame_bounds: bounds,
        coherence_counts: deltas
            .iter()
            .zip(counts)
            .map(|(&delta, count)| CoherenceCount { delta, count })
            .collect(),
        max_offdiag,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::ExplicitFrame;

    #[test]
    fn duplicate_atom_counts_both_orders() {
        let f = ExplicitFrame::new(vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let (counts, max) = offdiag_counts(&GramView::new(&f), &[1.0, 0.5]);
        assert_eq!(counts, vec![2, 2]);
        assert_eq!(max, 1.0);
        assert_eq!(distinct_positions(&f), vec![0, 1]);
    }

    #[test]
    fn blocked_scan_matches_dense_across_block_edges() {
        // 300 atoms spans two blocks
        let n = 5;
        let rows: Vec<Vec<f64>> = (0..300)
            .map(|i| {
                (0..n)
                    .map(|t| ((i * 31 + t * 7) % 11) as f64 - 5.0 + 0.1)
                    .collect()
            })
            .collect();
        let f = ExplicitFrame::normalized(rows).unwrap();
        let view = GramView::new(&f);
        let dense = view.dense();
        let delta = 0.6;
        let mut expected = 0;
        for r in 0..300 {
            for c in 0..300 {
                if r != c && dense[(r, c)].abs() >= delta - COHERENCE_TOLERANCE {
                    expected += 1;
                }
            }
        }
        let (counts, _) = offdiag_counts(&view, &[delta]);
        assert_eq!(counts[0], expected);
    }

    #[test]
    fn rejects_bad_delta() {
        let f = ExplicitFrame::new(vec![vec![1.0]]).unwrap();
        assert!(gram_coherence_counts(&f, &[0.0]).is_err());
        assert!(gram_coherence_counts(&f, &[1.5]).is_err());
    }
}
