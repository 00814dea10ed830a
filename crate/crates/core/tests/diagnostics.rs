use approx::assert_abs_diff_eq;
use framethresh::diagnostics::{comparison_bound, rest_split, rest_sum, stability_check};
use framethresh::evt::Flavor;
use framethresh::simulate::comparison_experiment;
use framethresh::transforms::{
    CycleSpinFrame, SineFrame, TIWaveletFrame, WaveletBasis, WaveletFilterPair,
};
use framethresh::{Frame, GramView};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn haar(n: usize) -> WaveletBasis {
    WaveletBasis::new(WaveletFilterPair::haar(), n, 0).unwrap()
}

fn equicorrelated(dim: usize, kappa: f64) -> DMatrix<f64> {
    DMatrix::from_fn(dim, dim, |r, c| if r == c { 1.0 } else { kappa })
}

fn rest_term(k: f64, m: usize) -> f64 {
    let m = m as f64;
    k * (m.ln() / (m * m)).powf(1.0 / (1.0 + k))
}

#[test]
fn identity_has_no_remainder() {
    let g = DMatrix::<f64>::identity(16, 16);
    assert_eq!(rest_sum(&g, 16).unwrap(), 0.0);
    let split = rest_split(&g, 16, 0.9, 0.2).unwrap();
    assert_eq!(split.total(), 0.0);
    assert_eq!(split.counts, [0, 0, 16 * 15]);
    assert_eq!(comparison_bound(&g, 1.0, Flavor::Chi).unwrap().value, 0.0);
}

#[test]
fn duplicated_pair() {
    // two identical atoms: 2 · (log 2 / 4)^{1/2}
    let g = equicorrelated(2, 1.0);
    assert_abs_diff_eq!(
        rest_sum(&g, 2).unwrap(),
        0.832_554_611_157_697_8,
        epsilon = 1e-15
    );
}

#[test]
fn orthonormal_wavelet_gram_is_clean() {
    let b = haar(256);
    assert_eq!(rest_sum(&GramView::new(&b), 256).unwrap(), 0.0);
}

#[test]
fn sine_frame_remainder_decreases() {
    let values: Vec<f64> = [64, 128, 256]
        .iter()
        .map(|&n| {
            let f = SineFrame::new(n, 2).unwrap();
            rest_sum(&GramView::new(&f), f.atom_count()).unwrap()
        })
        .collect();
    assert!(values[0] > values[1] && values[1] > values[2], "{values:?}");
}

#[test]
fn split_matches_exhaustive_classification() {
    let f = SineFrame::new(128, 2).unwrap();
    let g = GramView::new(&f).dense();
    let m = f.atom_count();
    let (rho, delta) = (0.9, 0.2);
    let split = rest_split(&g, m, rho, delta).unwrap();
    let mut sums = [0.0; 3];
    let mut counts = [0u64; 3];
    for r in 0..g.nrows() {
        for c in 0..g.ncols() {
            if r == c {
                continue;
            }
            let k = g[(r, c)].abs();
            let k = if k <= 1e-12 { 0.0 } else { k.min(1.0) };
            let slot = if k >= rho {
                0
            } else if k >= delta {
                1
            } else {
                2
            };
            sums[slot] += rest_term(k, m);
            counts[slot] += 1;
        }
    }
    assert_eq!(split.counts, counts);
    for (got, want) in [split.strong, split.moderate, split.weak].iter().zip(sums) {
        assert_abs_diff_eq!(*got, want, epsilon = 1e-10 * want.max(1.0));
    }
    assert_abs_diff_eq!(split.total(), rest_sum(&g, m).unwrap(), epsilon = 1e-10);
}

#[test]
fn comparison_bound_vanishes_for_large_thresholds() {
    let g = equicorrelated(8, 0.5);
    let values: Vec<f64> = [1.0, 3.0, 6.0, 12.0]
        .iter()
        .map(|t| comparison_bound(&g, *t, Flavor::Chi).unwrap().value)
        .collect();
    assert!(values.windows(2).all(|w| w[1] < w[0]));
    assert!(values[3] < 1e-40);
    let chi = comparison_bound(&g, 2.0, Flavor::Chi).unwrap().value;
    let normal = comparison_bound(&g, 2.0, Flavor::Normal).unwrap().value;
    assert_abs_diff_eq!(chi, 2.0 * normal, epsilon = 1e-15);
}

#[test]
fn comparison_bound_dominates_simulated_gap() {
    let g = equicorrelated(8, 0.5);
    let rows = comparison_experiment(&g, &[2.0], 200_000, 11).unwrap();
    let bound = comparison_bound(&g, 2.0, Flavor::Chi).unwrap().value;
    assert_abs_diff_eq!(rows[0].bound, bound, epsilon = 1e-15);
    assert!(rows[0].holds, "{:?}", rows[0]);
}

#[test]
fn orthonormal_family_is_stable() {
    let frames: Vec<WaveletBasis> = [64, 128, 256].iter().map(|&n| haar(n)).collect();
    let family: Vec<&dyn Frame> = frames.iter().map(|f| f as &dyn Frame).collect();
    let report = stability_check(&family, 0.5, false).unwrap();
    for row in &report.rows {
        assert_eq!(row.count_geq_rho, 0);
        assert_eq!(row.count_with_diagonal, row.atom_count as u64);
        assert_abs_diff_eq!(row.upper_frame_bound, 1.0, epsilon = 1e-9);
    }
    assert!(report.verdict.unwrap().stable);
}

#[test]
fn translation_invariant_family_has_growing_bound() {
    let frames: Vec<TIWaveletFrame> = [16, 32, 64]
        .iter()
        .map(|&n| TIWaveletFrame::new(haar(n)).unwrap())
        .collect();
    let family: Vec<&dyn Frame> = frames.iter().map(|f| f as &dyn Frame).collect();
    let report = stability_check(&family, 0.5, false).unwrap();
    for (row, n) in report.rows.iter().zip([16.0, 32.0, 64.0]) {
        assert_abs_diff_eq!(row.upper_frame_bound, n, epsilon = 1e-8 * n);
    }
    let verdict = report.verdict.unwrap();
    assert!(!verdict.upper_bound_bounded);
    assert!(!verdict.stable);
}

#[test]
fn cycle_spin_family_has_bounded_pairs_per_atom() {
    let frames: Vec<CycleSpinFrame> = [64, 128, 256]
        .iter()
        .map(|&n| CycleSpinFrame::new(haar(n), 4).unwrap())
        .collect();
    let family: Vec<&dyn Frame> = frames.iter().map(|f| f as &dyn Frame).collect();
    let report = stability_check(&family, 0.5, true).unwrap();
    for row in &report.rows {
        let per_atom = row.count_geq_rho as f64 / row.atom_count as f64;
        assert!(per_atom < 4.0, "{row:?}");
        assert!(row.upper_frame_bound <= 4.0 + 1e-9);
    }
    assert!(report.verdict.unwrap().upper_bound_bounded);
}

#[test]
fn stability_preconditions() {
    let b = haar(8);
    assert!(stability_check(&[&b], 1.0, false).is_err());
    assert!(stability_check(&[], 0.5, false).is_err());
    assert!(stability_check(&[&b], 0.5, false)
        .unwrap()
        .verdict
        .is_none());
}

fn correlation(dim: usize) -> impl Strategy<Value = DMatrix<f64>> {
    proptest::collection::vec(-1.0..1.0f64, dim * (dim - 1) / 2).prop_map(move |upper| {
        let mut g = DMatrix::identity(dim, dim);
        let mut it = upper.into_iter();
        for r in 0..dim {
            for c in r + 1..dim {
                let v = it.next().unwrap();
                g[(r, c)] = v;
                g[(c, r)] = v;
            }
        }
        g
    })
}

proptest! {
    #[test]
    fn split_is_additive(g in correlation(6), rho in 0.4..0.99f64, delta in 0.01..0.33f64) {
        let split = rest_split(&g, 6, rho, delta).unwrap();
        let total = rest_sum(&g, 6).unwrap();
        prop_assert!((split.total() - total).abs() <= 1e-12 * total.max(1.0));
        prop_assert_eq!(split.counts.iter().sum::<u64>(), 30);
    }

    #[test]
    fn remainder_grows_with_correlation(g in correlation(5), r in 0usize..5, c in 0usize..5, bump in 0.0..1.0f64) {
        prop_assume!(r != c);
        let mut h = g.clone();
        let k = h[(r, c)].abs();
        let raised = k + bump * (1.0 - k);
        h[(r, c)] = raised;
        h[(c, r)] = raised;
        prop_assert!(rest_sum(&h, 5).unwrap() >= rest_sum(&g, 5).unwrap() - 1e-12);
    }
}
