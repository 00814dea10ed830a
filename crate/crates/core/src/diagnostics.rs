//! Checks of the dependence hypotheses behind the Gumbel limits: the
//! stability census, the remainder sum `R` and its split, and the normal
//! comparison bounds.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::evt::Flavor;
use crate::frame::{frame_bounds, Frame};
use crate::gram::{GramEntries, GramView, COHERENCE_TOLERANCE};
use crate::numeric::CompensatedSum;

/// Largest deviation of a diagonal Gram entry from one.
pub const DIAGONAL_TOLERANCE: f64 = 1e-9;

/// Log-log growth rate of `b_n` in `n` above which `b_n` is considered unbounded.
pub const BOUND_GROWTH_LIMIT: f64 = 0.25;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityRow {
    pub n: usize,
    /// Atoms in the census (distinct atoms when de-duplicated).
    pub atom_count: usize,
    /// Ordered pairs `ω ≠ ω'` with `|κ| >= ρ`.
    pub count_geq_rho: u64,
    /// Same count with the diagonal pairs `ω = ω'` included.
    pub count_with_diagonal: u64,
    /// `count_geq_rho · √(log |Ω|) / |Ω|`.
    pub ratio: f64,
    pub lower_frame_bound: f64,
    pub upper_frame_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityVerdict {
    /// Ratios do not increase with `n` (finite-n evidence that strong correlations are rare).
    pub ratio_non_increasing: bool,
    /// Least-squares slope of `log b_n` against `log n`.
    pub upper_bound_growth: f64,
    pub sup_upper_bound: f64,
    /// Growth slope below [`BOUND_GROWTH_LIMIT`] (evidence that `b_n` stays bounded).
    pub upper_bound_bounded: bool,
    pub stable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub rho: f64,
    pub deduplicated: bool,
    pub rows: Vec<StabilityRow>,
    /// Present when at least three sizes were examined.
    pub verdict: Option<StabilityVerdict>,
}

/// Minimum number of sizes for a trend verdict.
pub const MIN_VERDICT_SIZES: usize = 3;

/// Census of strongly correlated pairs and frame bounds over a family of
/// frames of increasing size. `b_n` always refers to the frame as given;
/// `deduplicate` only affects the pair census.
pub fn stability_check(
    family: &[&dyn Frame],
    rho: f64,
    deduplicate: bool,
) -> Result<StabilityReport> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(invalid("rho", format!("{rho} is outside (0, 1)")));
    }
    if family.is_empty() {
        return Err(invalid("n-list", "no frames to examine"));
    }
    let mut rows = Vec::with_capacity(family.len());
    for frame in family {
        let view = if deduplicate {
            GramView::deduplicated(*frame)
        } else {
            GramView::new(*frame)
        };
        let (counts, _) = crate::gram::offdiag_counts(&view, &[rho]);
        let atom_count = view.len();
        let bounds = frame_bounds(*frame)?;
        let count = counts[0];
        let log_m = (atom_count as f64).ln().max(0.0);
        rows.push(StabilityRow {
            n: frame.signal_len(),
            atom_count,
            count_geq_rho: count,
            count_with_diagonal: count + atom_count as u64,
            ratio: count as f64 * log_m.sqrt() / atom_count as f64,
            lower_frame_bound: bounds.lower,
            upper_frame_bound: bounds.upper,
        });
    }
    let verdict = (rows.len() >= MIN_VERDICT_SIZES).then(|| verdict(&rows));
    Ok(StabilityReport {
        rho,
        deduplicated: deduplicate,
        rows,
        verdict,
    })
}

fn verdict(rows: &[StabilityRow]) -> StabilityVerdict {
    let ratio_non_increasing = rows.windows(2).all(|w| w[1].ratio <= w[0].ratio + 1e-12);
    let xs: Vec<f64> = rows.iter().map(|r| (r.n as f64).ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.upper_frame_bound.ln()).collect();
    let mx = xs.iter().sum::<f64>() / xs.len() as f64;
    let my = ys.iter().sum::<f64>() / ys.len() as f64;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let sup = rows
        .iter()
        .map(|r| r.upper_frame_bound)
        .fold(f64::NEG_INFINITY, f64::max);
    let bounded = slope < BOUND_GROWTH_LIMIT;
    StabilityVerdict {
        ratio_non_increasing,
        upper_bound_growth: slope,
        sup_upper_bound: sup,
        upper_bound_bounded: bounded,
        stable: ratio_non_increasing && bounded,
    }
}

/// Per-block accumulator that also records the first malformed entry.
struct Partial<T> {
    value: T,
    defect: Option<String>,
}

fn check_entry(r: usize, c: usize, kappa: f64) -> Option<String> {
    if r == c {
        ((kappa - 1.0).abs() > DIAGONAL_TOLERANCE)
            .then(|| format!("diagonal entry {r} is {kappa}, expected 1"))
    } else {
        (!(kappa.abs() <= 1.0 + DIAGONAL_TOLERANCE))
            .then(|| format!("entry ({r}, {c}) = {kappa} is not a correlation"))
    }
}

/// Reduces `f(|κ|)` over off-diagonal entries into `K` compensated sums
/// selected by `slot(|κ|)`. Each unordered pair contributes twice.
fn reduce_offdiag<G, const K: usize>(
    gram: &G,
    slot: impl Fn(f64) -> usize + Sync,
    term: impl Fn(f64) -> f64 + Sync,
) -> Result<([f64; K], [u64; K], f64)>
where
    G: GramEntries + ?Sized,
{
    type Acc<const K: usize> = Partial<([CompensatedSum; K], [u64; K], f64)>;
    let total: Acc<K> = gram.reduce_upper(
        || Partial {
            value: ([CompensatedSum::new(); K], [0u64; K], 0.0),
            defect: None,
        },
        |acc: &mut Acc<K>, r, c, kappa| {
            if let Some(d) = check_entry(r, c, kappa) {
                acc.defect.get_or_insert(d);
            }
            if r == c {
                return;
            }
            let mag = kappa.abs().min(1.0);
            // rounding noise from orthogonal atoms
            let mag = if mag <= COHERENCE_TOLERANCE { 0.0 } else { mag };
            let s = slot(mag);
            let t = term(mag);
            acc.value.0[s].add(t);
            acc.value.1[s] += 2;
            acc.value.2 = acc.value.2.max(t);
        },
        |total, part| {
            if total.defect.is_none() {
                total.defect = part.defect;
            }
            for k in 0..K {
                total.value.0[k].merge(part.value.0[k]);
                total.value.1[k] += part.value.1[k];
            }
            total.value.2 = total.value.2.max(part.value.2);
        },
    );
    if let Some(d) = total.defect {
        return Err(Error::InvalidFrame(d));
    }
    let sums = total.value.0.map(|s| 2.0 * s.value());
    Ok((sums, total.value.1, total.value.2))
}

fn rest_term(m: usize) -> Result<impl Fn(f64) -> f64 + Sync> {
    if m < 2 {
        return Err(invalid("m", format!("{m} must be at least 2")));
    }
    let log_base = ((m as f64).ln().ln()) - 2.0 * (m as f64).ln();
    Ok(move |k: f64| k * (log_base / (1.0 + k)).exp())
}

/// `R = Σ_{ω≠ω'} |κ| (log m / m²)^{1/(1+|κ|)}`.
pub fn rest_sum<G: GramEntries + ?Sized>(gram: &G, m: usize) -> Result<f64> {
    let term = rest_term(m)?;
    let ([sum], _, _) = reduce_offdiag::<G, 1>(gram, |_| 0, term)?;
    Ok(sum)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RestSplit {
    /// `|κ| >= ρ`.
    pub strong: f64,
    /// `δ <= |κ| < ρ`.
    pub moderate: f64,
    /// `|κ| < δ`.
    pub weak: f64,
    /// Ordered-pair counts of the three classes.
    pub counts: [u64; 3],
}

impl RestSplit {
    pub fn total(&self) -> f64 {
        self.strong + self.moderate + self.weak
    }
}

/// Splits [`rest_sum`] by correlation magnitude. Requires `0 < δ < 1/3` and
/// `δ < ρ < 1`.
pub fn rest_split<G: GramEntries + ?Sized>(
    gram: &G,
    m: usize,
    rho: f64,
    delta: f64,
) -> Result<RestSplit> {
    if !(delta > 0.0 && delta < 1.0 / 3.0) {
        return Err(invalid("delta", format!("{delta} is outside (0, 1/3)")));
    }
    if !(rho > delta && rho < 1.0) {
        return Err(invalid("rho", format!("{rho} is outside (delta, 1)")));
    }
    let term = rest_term(m)?;
    let slot = move |k: f64| {
        if k >= rho - COHERENCE_TOLERANCE {
            0
        } else if k >= delta - COHERENCE_TOLERANCE {
            1
        } else {
            2
        }
    };
    let (sums, counts, _) = reduce_offdiag::<G, 3>(gram, slot, term)?;
    Ok(RestSplit {
        strong: sums[0],
        moderate: sums[1],
        weak: sums[2],
        counts,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonBound {
    pub value: f64,
    pub threshold: f64,
    /// Largest single pair term `|κ| exp(-T²/(1+|κ|))`, before the prefactor.
    pub max_term: f64,
    pub flavor: Flavor,
}

/// `c Σ_{ω≠ω'} |κ| exp(-T²/(1+|κ|))` with `c = 1/4` for maxima of absolute
/// values and `c = 1/8` for plain maxima.
pub fn comparison_bound<G: GramEntries + ?Sized>(
    gram: &G,
    threshold: f64,
    flavor: Flavor,
) -> Result<ComparisonBound> {
    if !threshold.is_finite() {
        return Err(invalid("T", format!("{threshold} is not finite")));
    }
    let t2 = threshold * threshold;
    let term = move |k: f64| k * (-t2 / (1.0 + k)).exp();
    let ([sum], _, max_term) = reduce_offdiag::<G, 1>(gram, |_| 0, term)?;
    let factor = match flavor {
        Flavor::Chi => 0.25,
        Flavor::Normal => 0.125,
    };
    Ok(ComparisonBound {
        value: factor * sum,
        threshold,
        max_term,
        flavor,
    })
}
