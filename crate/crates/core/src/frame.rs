//! Frame abstraction: analysis, dual synthesis through the pseudoinverse of
//! the analysis operator, and frame bounds.

use std::sync::{Arc, OnceLock};

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::signal::{CoefficientVector, IndexLayout, Signal};

/// Which coefficients take part in thresholding and in maximum statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Subspace {
    /// Every frame coefficient, including scaling coefficients.
    #[default]
    Full,
    /// Only detail coefficients; scaling coefficients pass through untouched.
    Detail,
}

impl Subspace {
    pub fn includes(self, is_scaling: bool) -> bool {
        match self {
            Subspace::Full => true,
            Subspace::Detail => !is_scaling,
        }
    }
}

/// Structural knowledge about a frame that selects the dual synthesis route.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FrameStructure {
    /// Orthonormal basis: the dual is the adjoint.
    Orthonormal,
    /// Tight frame with bound `bound`: the dual is `adjoint / bound`.
    Tight { bound: f64 },
    /// Non-orthogonal basis with a fast exact inverse.
    Basis,
    /// Anything else; the dual solves the normal equations.
    General,
}

/// A finite family of unit-norm atoms in `R^n` with fast analysis and adjoint.
///
/// Implementations must be immutable after construction.
pub trait Frame: Send + Sync {
    fn name(&self) -> String;

    /// Length `n` of the signals the frame acts on.
    fn signal_len(&self) -> usize;

    fn layout(&self) -> &Arc<IndexLayout>;

    fn structure(&self) -> FrameStructure;

    /// `out[ω] = <φ_ω, signal>`.
    fn analyze_into(&self, signal: &[f64], out: &mut [f64]);

    /// `out = Σ_ω coeffs[ω] φ_ω`.
    fn adjoint_into(&self, coeffs: &[f64], out: &mut [f64]);

    /// Exact inverse of the analysis operator, for bases only.
    fn inverse_into(&self, _coeffs: &[f64], _out: &mut [f64]) -> Result<()> {
        Err(Error::Unsupported(format!(
            "{} has no direct inverse",
            self.name()
        )))
    }

    /// Applies the pseudoinverse `(Φ*Φ)^{-1} Φ*`.
    fn dual_into(&self, coeffs: &[f64], out: &mut [f64]) -> Result<()> {
        structured_dual(self, coeffs, out)
    }

    /// Writes atom `pos` into `out`.
    fn atom_into(&self, pos: usize, out: &mut [f64]) {
        let mut unit = vec![0.0; self.atom_count()];
        unit[pos] = 1.0;
        self.adjoint_into(&unit, out);
    }

    fn atom_count(&self) -> usize {
        self.layout().len()
    }

    fn redundancy(&self) -> f64 {
        self.atom_count() as f64 / self.signal_len() as f64
    }

    /// Number of distinct atoms (frames may repeat atoms).
    fn distinct_count(&self) -> usize {
        self.atom_count()
    }

    /// Number of distinct detail atoms.
    fn distinct_detail_count(&self) -> usize {
        self.layout().detail_count()
    }

    /// Count used by cardinality-sensitive threshold formulas.
    fn effective_count(&self, subspace: Subspace) -> usize {
        match subspace {
            Subspace::Full => self.distinct_count(),
            Subspace::Detail => self.distinct_detail_count(),
        }
    }

    /// `max_ω |<φ_ω, signal>|` over the coefficients selected by `subspace`.
    fn max_abs_coefficient(&self, signal: &[f64], subspace: Subspace) -> f64 {
        let mut coeffs = vec![0.0; self.atom_count()];
        self.analyze_into(signal, &mut coeffs);
        let mask = self.layout().scaling_mask();
        coeffs
            .iter()
            .zip(mask)
            .filter(|(_, s)| subspace.includes(**s))
            .fold(0.0_f64, |acc, (c, _)| acc.max(c.abs()))
    }
}

fn structured_dual<F: Frame + ?Sized>(frame: &F, coeffs: &[f64], out: &mut [f64]) -> Result<()> {
    match frame.structure() {
        FrameStructure::Orthonormal => {
            frame.adjoint_into(coeffs, out);
            Ok(())
        }
        FrameStructure::Tight { bound } => {
            frame.adjoint_into(coeffs, out);
            out.iter_mut().for_each(|v| *v /= bound);
            Ok(())
        }
        FrameStructure::Basis => frame.inverse_into(coeffs, out),
        FrameStructure::General => normal_equations_cg(frame, coeffs, out),
    }
}

/// Solves `Φ*Φ x = Φ* c` by conjugate gradients using only the fast operators.
pub fn normal_equations_cg<F: Frame + ?Sized>(
    frame: &F,
    coeffs: &[f64],
    out: &mut [f64],
) -> Result<()> {
    let n = frame.signal_len();
    let mut rhs = vec![0.0; n];
    frame.adjoint_into(coeffs, &mut rhs);
    let rhs_norm = dot(&rhs, &rhs).sqrt();
    out.iter_mut().for_each(|v| *v = 0.0);
    if rhs_norm == 0.0 {
        return Ok(());
    }

    let mut scratch = vec![0.0; frame.atom_count()];
    let mut apply = |x: &[f64], y: &mut [f64]| {
        frame.analyze_into(x, &mut scratch);
        frame.adjoint_into(&scratch, y);
    };

    let mut r = rhs.clone();
    let mut p = r.clone();
    let mut ap = vec![0.0; n];
    let mut rr = dot(&r, &r);
    let tol = 1e-14 * rhs_norm;
    let max_iter = 10 * n + 100;
    for _ in 0..max_iter {
        apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            return Err(Error::InvalidFrame("frame operator is singular".into()));
        }
        let step = rr / pap;
        for i in 0..n {
            out[i] += step * p[i];
            r[i] -= step * ap[i];
        }
        let rr_next = dot(&r, &r);
        if rr_next.sqrt() <= tol {
            return Ok(());
        }
        let beta = rr_next / rr;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
        rr = rr_next;
    }
    Err(Error::NotConverged {
        iterations: max_iter,
    })
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Coefficients `x(ω) = <φ_ω, signal>`.
pub fn analyze<F: Frame + ?Sized>(frame: &F, signal: &Signal) -> Result<CoefficientVector> {
    check_len(frame.signal_len(), signal.len())?;
    let mut values = vec![0.0; frame.atom_count()];
    frame.analyze_into(signal.samples(), &mut values);
    CoefficientVector::new(values, Arc::clone(frame.layout()))
}

/// Applies the pseudoinverse of the analysis operator to `coeffs`.
pub fn dual_synthesize<F: Frame + ?Sized>(frame: &F, coeffs: &CoefficientVector) -> Result<Signal> {
    if coeffs.count() != frame.atom_count() {
        return Err(Error::DimensionMismatch {
            expected: frame.atom_count(),
            actual: coeffs.count(),
        });
    }
    if **coeffs.layout() != **frame.layout() {
        return Err(Error::IndexMismatch);
    }
    let mut out = vec![0.0; frame.signal_len()];
    frame.dual_into(coeffs.values(), &mut out)?;
    Signal::new(out)
}

/// Materializes a single atom.
pub fn atom<F: Frame + ?Sized>(frame: &F, pos: usize) -> Vec<f64> {
    let mut out = vec![0.0; frame.signal_len()];
    frame.atom_into(pos, &mut out);
    out
}

pub(crate) fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        Err(Error::DimensionMismatch { expected, actual })
    } else {
        Ok(())
    }
}

/// Dense frame operator `Φ*Φ`, built column by column from the fast operators.
pub fn frame_operator<F: Frame + ?Sized>(frame: &F) -> DMatrix<f64> {
    let n = frame.signal_len();
    let columns: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| apply_frame_operator(frame, &unit(n, i)))
        .collect();
    let mut s = DMatrix::from_fn(n, n, |r, c| columns[c][r]);
    // exact symmetry for the eigensolver
    let t = s.transpose();
    s += t;
    s *= 0.5;
    s
}

fn unit(n: usize, i: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[i] = 1.0;
    e
}

fn apply_frame_operator<F: Frame + ?Sized>(frame: &F, x: &[f64]) -> Vec<f64> {
    let mut coeffs = vec![0.0; frame.atom_count()];
    frame.analyze_into(x, &mut coeffs);
    let mut y = vec![0.0; frame.signal_len()];
    frame.adjoint_into(&coeffs, &mut y);
    y
}

/// Optimal frame bounds `(a_n, b_n)`, the extreme eigenvalues of `Φ*Φ`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FrameBounds {
    pub lower: f64,
    pub upper: f64,
}

/// Largest signal length handled by the dense eigensolver.
pub const DENSE_BOUNDS_LIMIT: usize = 4096;

pub fn frame_bounds<F: Frame + ?Sized>(frame: &F) -> Result<FrameBounds> {
    let n = frame.signal_len();
    let (lower, upper) = if n <= DENSE_BOUNDS_LIMIT {
        let eig = SymmetricEigen::new(frame_operator(frame));
        let lower = eig
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        let upper = eig
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        (lower, upper)
    } else {
        let op = |x: &[f64]| apply_frame_operator(frame, x);
        let upper = power_iteration(n, op, 0.0)?;
        let shifted = |x: &[f64]| {
            let y = apply_frame_operator(frame, x);
            x.iter().zip(y).map(|(a, b)| upper * a - b).collect()
        };
        let gap = power_iteration(n, shifted, 0.0)?;
        (upper - gap, upper)
    };
    if lower <= 1e-12 * upper.max(1.0) {
        return Err(Error::InvalidFrame(format!(
            "frame operator is singular (smallest eigenvalue {lower:e})"
        )));
    }
    Ok(FrameBounds { lower, upper })
}

fn power_iteration(n: usize, op: impl Fn(&[f64]) -> Vec<f64>, _shift: f64) -> Result<f64> {
    const MAX_ITER: usize = 20_000;
    // deterministic, non-degenerate start vector
    let mut x: Vec<f64> = (0..n)
        .map(|i| 1.0 + ((i * 7919) % 13) as f64 / 13.0)
        .collect();
    let norm = dot(&x, &x).sqrt();
    x.iter_mut().for_each(|v| *v /= norm);
    let mut lambda = 0.0;
    for _ in 0..MAX_ITER {
        let y = op(&x);
        let next = dot(&x, &y);
        let ny = dot(&y, &y).sqrt();
        if ny == 0.0 {
            return Ok(0.0);
        }
        x = y.into_iter().map(|v| v / ny).collect();
        if (next - lambda).abs() <= 1e-12 * next.abs().max(1e-300) {
            return Ok(next);
        }
        lambda = next;
    }
    Err(Error::NotConverged {
        iterations: MAX_ITER,
    })
}

/// A frame given by an explicit `|Ω| × n` matrix of unit-norm rows.
#[derive(Debug)]
pub struct ExplicitFrame {
    rows: DMatrix<f64>,
    layout: Arc<IndexLayout>,
    factor: OnceLock<Option<Cholesky<f64, Dyn>>>,
}

impl ExplicitFrame {
    /// Rows must already have unit norm (tolerance `1e-10`).
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let matrix = rows_to_matrix(rows)?;
        for (i, row) in matrix.row_iter().enumerate() {
            let norm = row.norm();
            if (norm - 1.0).abs() > 1e-10 {
                return Err(Error::InvalidFrame(format!(
                    "atom {i} has norm {norm}, expected 1"
                )));
            }
        }
        Ok(Self::from_matrix_unchecked(matrix))
    }

    /// Normalizes every row; zero rows are rejected.
    pub fn normalized(rows: Vec<Vec<f64>>) -> Result<Self> {
        let mut matrix = rows_to_matrix(rows)?;
        for (i, mut row) in matrix.row_iter_mut().enumerate() {
            let norm = row.norm();
            if norm == 0.0 {
                return Err(Error::InvalidFrame(format!("atom {i} is zero")));
            }
            row /= norm;
        }
        Ok(Self::from_matrix_unchecked(matrix))
    }

    /// Atoms whose Gram matrix is the given correlation matrix (rows of its
    /// Cholesky factor).
    pub fn from_gram(gram: &DMatrix<f64>) -> Result<Self> {
        let chol = Cholesky::new(gram.clone())
            .ok_or_else(|| Error::InvalidFrame("Gram matrix is not positive definite".into()))?;
        let l = chol.l();
        let rows = l.row_iter().map(|r| r.iter().copied().collect()).collect();
        Self::normalized(rows)
    }

    fn from_matrix_unchecked(rows: DMatrix<f64>) -> Self {
        let layout = Arc::new(IndexLayout::flat(rows.nrows()));
        Self {
            rows,
            layout,
            factor: OnceLock::new(),
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.rows
    }

    fn factor(&self) -> Option<&Cholesky<f64, Dyn>> {
        self.factor
            .get_or_init(|| Cholesky::new(self.rows.tr_mul(&self.rows)))
            .as_ref()
    }
}

fn rows_to_matrix(rows: Vec<Vec<f64>>) -> Result<DMatrix<f64>> {
    let m = rows.len();
    let n = rows.first().map(Vec::len).unwrap_or(0);
    if m == 0 || n == 0 {
        return Err(Error::InvalidFrame("empty atom matrix".into()));
    }
    if let Some(bad) = rows.iter().find(|r| r.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: bad.len(),
        });
    }
    Ok(DMatrix::from_fn(m, n, |i, j| rows[i][j]))
}

impl Frame for ExplicitFrame {
    fn name(&self) -> String {
        format!("explicit({}x{})", self.rows.nrows(), self.rows.ncols())
    }

    fn signal_len(&self) -> usize {
        self.rows.ncols()
    }

    fn layout(&self) -> &Arc<IndexLayout> {
        &self.layout
    }

    fn structure(&self) -> FrameStructure {
        FrameStructure::General
    }

    fn analyze_into(&self, signal: &[f64], out: &mut [f64]) {
        let x = DVector::from_column_slice(signal);
        let y = &self.rows * x;
        out.copy_from_slice(y.as_slice());
    }

    fn adjoint_into(&self, coeffs: &[f64], out: &mut [f64]) {
        let c = DVector::from_column_slice(coeffs);
        let y = self.rows.tr_mul(&c);
        out.copy_from_slice(y.as_slice());
    }

    fn dual_into(&self, coeffs: &[f64], out: &mut [f64]) -> Result<()> {
        let factor = self
            .factor()
            .ok_or_else(|| Error::InvalidFrame("frame operator is singular".into()))?;
        let c = DVector::from_column_slice(coeffs);
        let rhs = self.rows.tr_mul(&c);
        let x = factor.solve(&rhs);
        out.copy_from_slice(x.as_slice());
        Ok(())
    }

    fn atom_into(&self, pos: usize, out: &mut [f64]) {
        for (o, v) in out.iter_mut().zip(self.rows.row(pos).iter()) {
            *o = *v;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn three_atoms() -> ExplicitFrame {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        ExplicitFrame::new(vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![s, s]]).unwrap()
    }

    #[test]
    fn explicit_analysis_matches_dot_products() {
        let f = three_atoms();
        let c = analyze(&f, &Signal::new(vec![1.0, 0.0]).unwrap()).unwrap();
        let first_column: Vec<f64> = f.matrix().column(0).iter().copied().collect();
        for (a, b) in c.values().iter().zip(&first_column) {
            assert_abs_diff_eq!(*a, *b, epsilon = 1e-15);
        }
        let u = [0.3, -1.7];
        let c = analyze(&f, &Signal::new(u.to_vec()).unwrap()).unwrap();
        for (i, row) in f.matrix().row_iter().enumerate() {
            let naive = row[0] * u[0] + row[1] * u[1];
            assert_abs_diff_eq!(c.values()[i], naive, epsilon = 1e-15);
        }
    }

    #[test]
    fn zero_signal_gives_zero_coefficients() {
        let f = three_atoms();
        let c = analyze(&f, &Signal::zeros(2)).unwrap();
        assert!(c.values().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn explicit_dual_matches_dense_pseudoinverse() {
        let f = three_atoms();
        // pinv = (A^T A)^{-1} A^T via an explicit 2x2 inverse
        let a = f.matrix();
        let ata = a.tr_mul(a);
        let det = ata[(0, 0)] * ata[(1, 1)] - ata[(0, 1)] * ata[(1, 0)];
        let inv = DMatrix::from_row_slice(
            2,
            2,
            &[
                ata[(1, 1)] / det,
                -ata[(0, 1)] / det,
                -ata[(1, 0)] / det,
                ata[(0, 0)] / det,
            ],
        );
        let pinv = inv * a.transpose();
        let c = [0.4, -2.0, 1.25];
        let mut out = [0.0; 2];
        f.dual_into(&c, &mut out).unwrap();
        let expected = &pinv * DVector::from_column_slice(&c);
        assert_abs_diff_eq!(out[0], expected[0], epsilon = 1e-10);
        assert_abs_diff_eq!(out[1], expected[1], epsilon = 1e-10);
    }

    #[test]
    fn explicit_requires_unit_rows() {
        assert!(ExplicitFrame::new(vec![vec![2.0, 0.0]]).is_err());
        assert!(ExplicitFrame::normalized(vec![vec![0.0, 0.0]]).is_err());
        assert!(ExplicitFrame::normalized(vec![vec![2.0, 0.0]]).is_ok());
    }

    #[test]
    fn singular_explicit_frame_is_reported() {
        let f = ExplicitFrame::new(vec![vec![1.0, 0.0], vec![1.0, 0.0]]).unwrap();
        let mut out = [0.0; 2];
        assert!(matches!(
            f.dual_into(&[1.0, 1.0], &mut out),
            Err(Error::InvalidFrame(_))
        ));
        assert!(matches!(frame_bounds(&f), Err(Error::InvalidFrame(_))));
    }

    #[test]
    fn bounds_of_three_atom_frame() {
        // A^T A = [[1.5, 0.5], [0.5, 1.5]] -> eigenvalues 1 and 2
        let b = frame_bounds(&three_atoms()).unwrap();
        assert_abs_diff_eq!(b.lower, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(b.upper, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn cg_dual_agrees_with_cholesky() {
        let f = three_atoms();
        let c = [0.4, -2.0, 1.25];
        let mut chol = [0.0; 2];
        let mut cg = [0.0; 2];
        f.dual_into(&c, &mut chol).unwrap();
        normal_equations_cg(&f, &c, &mut cg).unwrap();
        assert_abs_diff_eq!(chol[0], cg[0], epsilon = 1e-12);
        assert_abs_diff_eq!(chol[1], cg[1], epsilon = 1e-12);
    }

    #[test]
    fn from_gram_reproduces_correlations() {
        let k = DMatrix::from_fn(4, 4, |i, j| if i == j { 1.0 } else { 0.9 });
        let f = ExplicitFrame::from_gram(&k).unwrap();
        let g = f.matrix() * f.matrix().transpose();
        assert_abs_diff_eq!((g - k).abs().max(), 0.0, epsilon = 1e-12);
    }
}
