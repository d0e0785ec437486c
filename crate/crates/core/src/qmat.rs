//! Dense quaternion matrices.
//!
//! Numerics go through the complex-adjoint embedding: an entry
//! `q = a + b·j` (`a = w + i·x`, `b = y + i·z`) becomes the 2×2 block
//! `[[a, b], [−b̄, ā]]`. The embedding is an injective algebra
//! homomorphism, so inverses, ranks, Hermitian square roots and the right
//! spectrum can all be read off the complex image.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::{Complex, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quat::{ConjugacyClass, Quaternion};
use crate::series::Polynomial;
use crate::tol;

pub type C64 = Complex<f64>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMatrix")]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Quaternion>,
}

#[derive(Deserialize)]
struct RawMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Quaternion>,
}

impl TryFrom<RawMatrix> for QMatrix {
    type Error = Error;
    fn try_from(raw: RawMatrix) -> Result<Self> {
        QMatrix::new(raw.rows, raw.cols, raw.entries)
    }
}

impl QMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Quaternion>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {}x{} matrix",
                entries.len(),
                rows,
                cols
            )));
        }
        Ok(QMatrix {
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix {
            rows,
            cols,
            entries: vec![Quaternion::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        QMatrix::from_fn(n, n, |r, c| {
            if r == c {
                Quaternion::ONE
            } else {
                Quaternion::ZERO
            }
        })
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Quaternion,
    ) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                entries.push(f(r, c));
            }
        }
        QMatrix {
            rows,
            cols,
            entries,
        }
    }

    pub fn from_rows(rows: &[Vec<Quaternion>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(QMatrix {
            rows: r,
            cols: c,
            entries: rows.concat(),
        })
    }

    pub fn column(v: &[Quaternion]) -> Self {
        QMatrix {
            rows: v.len(),
            cols: 1,
            entries: v.to_vec(),
        }
    }

    pub fn row(v: &[Quaternion]) -> Self {
        QMatrix {
            rows: 1,
            cols: v.len(),
            entries: v.to_vec(),
        }
    }

    pub fn scalar(q: Quaternion) -> Self {
        QMatrix {
            rows: 1,
            cols: 1,
            entries: vec![q],
        }
    }

    pub fn diag(d: &[Quaternion]) -> Self {
        let n = d.len();
        QMatrix::from_fn(n, n, |r, c| if r == c { d[r] } else { Quaternion::ZERO })
    }

    /// Standard basis column `e_k` (zero-based) of length `n`.
    pub fn unit(n: usize, k: usize) -> Self {
        QMatrix::from_fn(n, 1, |r, _| {
            if r == k {
                Quaternion::ONE
            } else {
                Quaternion::ZERO
            }
        })
    }

    /// Shift with ones on the subdiagonal.
    pub fn shift(n: usize) -> Self {
        QMatrix::from_fn(n, n, |r, c| {
            if r == c + 1 {
                Quaternion::ONE
            } else {
                Quaternion::ZERO
            }
        })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Quaternion] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<Quaternion> {
        self.entries
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Quaternion {
        self.entries[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, q: Quaternion) {
        self.entries[r * self.cols + c] = q;
    }

    pub fn col_vec(&self, c: usize) -> Vec<Quaternion> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn row_vec(&self, r: usize) -> Vec<Quaternion> {
        self.entries[r * self.cols..(r + 1) * self.cols].to_vec()
    }

    /// Conjugate transpose `A*`.
    pub fn adjoint(&self) -> QMatrix {
        QMatrix::from_fn(self.cols, self.rows, |r, c| self.get(c, r).conj())
    }

    pub fn transpose(&self) -> QMatrix {
        QMatrix::from_fn(self.cols, self.rows, |r, c| self.get(c, r))
    }

    /// Left scalar multiple `q·A`.
    pub fn lmul(&self, q: Quaternion) -> QMatrix {
        self.map(|e| q * e)
    }

    /// Right scalar multiple `A·q`.
    pub fn rmul(&self, q: Quaternion) -> QMatrix {
        self.map(|e| e * q)
    }

    pub fn scale(&self, s: f64) -> QMatrix {
        self.map(|e| e * s)
    }

    pub fn map(&self, f: impl Fn(Quaternion) -> Quaternion) -> QMatrix {
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|&e| f(e)).collect(),
        }
    }

    pub fn try_mul(&self, other: &QMatrix) -> Result<QMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = QMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == Quaternion::ZERO {
                    continue;
                }
                for c in 0..other.cols {
                    let i = r * other.cols + c;
                    out.entries[i] += a * other.get(k, c);
                }
            }
        }
        Ok(out)
    }

    pub fn submatrix(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> QMatrix {
        QMatrix::from_fn(rows, cols, |r, c| self.get(r0 + r, c0 + c))
    }

    pub fn hstack(blocks: &[&QMatrix]) -> Result<QMatrix> {
        let rows = blocks.first().map_or(0, |b| b.rows);
        if blocks.iter().any(|b| b.rows != rows) {
            return Err(Error::DimensionMismatch("hstack row counts differ".into()));
        }
        let cols: usize = blocks.iter().map(|b| b.cols).sum();
        let mut out = QMatrix::zeros(rows, cols);
        let mut off = 0;
        for b in blocks {
            out.set_block(0, off, b);
            off += b.cols;
        }
        Ok(out)
    }

    pub fn vstack(blocks: &[&QMatrix]) -> Result<QMatrix> {
        let cols = blocks.first().map_or(0, |b| b.cols);
        if blocks.iter().any(|b| b.cols != cols) {
            return Err(Error::DimensionMismatch(
                "vstack column counts differ".into(),
            ));
        }
        let rows: usize = blocks.iter().map(|b| b.rows).sum();
        let mut out = QMatrix::zeros(rows, cols);
        let mut off = 0;
        for b in blocks {
            out.set_block(off, 0, b);
            off += b.rows;
        }
        Ok(out)
    }

    /// `[[a, b], [c, d]]` with compatible dimensions.
    pub fn block2(a: &QMatrix, b: &QMatrix, c: &QMatrix, d: &QMatrix) -> Result<QMatrix> {
        let top = QMatrix::hstack(&[a, b])?;
        let bottom = QMatrix::hstack(&[c, d])?;
        QMatrix::vstack(&[&top, &bottom])
    }

    pub fn block_diag(blocks: &[&QMatrix]) -> QMatrix {
        let rows: usize = blocks.iter().map(|b| b.rows).sum();
        let cols: usize = blocks.iter().map(|b| b.cols).sum();
        let mut out = QMatrix::zeros(rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            out.set_block(r0, c0, b);
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &QMatrix) {
        for r in 0..b.rows {
            for c in 0..b.cols {
                self.set(r0 + r, c0 + c, b.get(r, c));
            }
        }
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|e| e.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.entries.iter().map(|e| e.norm_sq()).sum::<f64>().sqrt()
    }

    /// `max |A_rc − B_rc|`, or infinity on a shape mismatch.
    pub fn max_diff(&self, other: &QMatrix) -> f64 {
        if self.shape() != other.shape() {
            return f64::INFINITY;
        }
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.dist(*b))
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().all(|e| e.is_finite())
    }

    pub fn pow(&self, k: usize) -> QMatrix {
        let mut out = QMatrix::identity(self.rows);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    pub fn trace_re(&self) -> f64 {
        (0..self.rows.min(self.cols))
            .map(|i| self.get(i, i).w)
            .sum()
    }

    // ---- complex-adjoint embedding ----

    pub fn embed(&self) -> DMatrix<C64> {
        let mut m = DMatrix::from_element(2 * self.rows, 2 * self.cols, C64::new(0.0, 0.0));
        for r in 0..self.rows {
            for c in 0..self.cols {
                let q = self.get(r, c);
                let a = C64::new(q.w, q.x);
                let b = C64::new(q.y, q.z);
                m[(2 * r, 2 * c)] = a;
                m[(2 * r, 2 * c + 1)] = b;
                m[(2 * r + 1, 2 * c)] = -b.conj();
                m[(2 * r + 1, 2 * c + 1)] = a.conj();
            }
        }
        m
    }

    /// Inverse of [`QMatrix::embed`]; projects each 2×2 block onto the
    /// quaternionic structure, so rounding noise off that subspace is dropped.
    pub fn unembed(m: &DMatrix<C64>) -> Result<QMatrix> {
        if !m.nrows().is_multiple_of(2) || !m.ncols().is_multiple_of(2) {
            return Err(Error::DimensionMismatch(format!(
                "embedded matrix has odd shape {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let (rows, cols) = (m.nrows() / 2, m.ncols() / 2);
        Ok(QMatrix::from_fn(rows, cols, |r, c| {
            let a = (m[(2 * r, 2 * c)] + m[(2 * r + 1, 2 * c + 1)].conj()) * 0.5;
            let b = (m[(2 * r, 2 * c + 1)] - m[(2 * r + 1, 2 * c)].conj()) * 0.5;
            Quaternion::new(a.re, a.im, b.re, b.im)
        }))
    }

    /// Real 4n×4n image `[[Re M, −Im M], [Im M, Re M]]` of the embedding.
    fn realify(&self) -> DMatrix<f64> {
        let m = self.embed();
        let n = m.nrows();
        let k = m.ncols();
        let mut out = DMatrix::zeros(2 * n, 2 * k);
        for r in 0..n {
            for c in 0..k {
                let z = m[(r, c)];
                out[(r, c)] = z.re;
                out[(r, c + k)] = -z.im;
                out[(r + n, c)] = z.im;
                out[(r + n, c + k)] = z.re;
            }
        }
        out
    }

    pub fn singular_values(&self) -> Vec<f64> {
        if self.rows == 0 || self.cols == 0 {
            return Vec::new();
        }
        let sv = self.embed().singular_values();
        let mut v: Vec<f64> = sv.iter().copied().collect();
        v.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
        v
    }

    /// Quaternionic rank with singular values below `rtol·σ_max` treated as zero.
    pub fn rank_tol(&self, rtol: f64) -> usize {
        let sv = self.singular_values();
        let smax = sv.first().copied().unwrap_or(0.0);
        if smax <= tol::NEAR_ZERO {
            return 0;
        }
        let count = sv.iter().filter(|&&s| s > rtol * smax).count();
        count.div_ceil(2)
    }

    pub fn rank(&self) -> usize {
        self.rank_tol(tol::RANK_RTOL)
    }

    /// 2-norm condition number; infinite for singular or non-square input.
    pub fn condition_number(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        if self.rows == 0 {
            return 1.0;
        }
        let sv = self.singular_values();
        let smin = *sv.last().unwrap();
        if smin <= 0.0 {
            f64::INFINITY
        } else {
            sv[0] / smin
        }
    }

    pub fn inverse(&self) -> Result<QMatrix> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "inverse of {}x{} matrix",
                self.rows, self.cols
            )));
        }
        if self.rows == 0 {
            return Ok(QMatrix::zeros(0, 0));
        }
        let inv = self
            .embed()
            .lu()
            .try_inverse()
            .ok_or_else(|| Error::Numerical("singular matrix in inverse".into()))?;
        let out = QMatrix::unembed(&inv)?;
        if !out.is_finite() {
            return Err(Error::Numerical("non-finite inverse".into()));
        }
        Ok(out)
    }

    /// Inverse guarded by a condition-number ceiling.
    pub fn inverse_guarded(&self, what: &str, max_cond: f64) -> Result<QMatrix> {
        let cond = self.condition_number();
        if !cond.is_finite() || cond > max_cond {
            return Err(Error::IllConditioned {
                what: what.to_string(),
                cond,
            });
        }
        self.inverse()
    }

    /// Solves `A·X = B`.
    pub fn solve(&self, b: &QMatrix) -> Result<QMatrix> {
        if !self.is_square() || self.rows != b.rows {
            return Err(Error::DimensionMismatch("solve shape".into()));
        }
        if self.rows == 0 {
            return Ok(QMatrix::zeros(0, b.cols));
        }
        let x = self
            .embed()
            .lu()
            .solve(&b.embed())
            .ok_or_else(|| Error::Numerical("singular system".into()))?;
        QMatrix::unembed(&x)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.max_diff(&self.adjoint()) <= tol
    }

    pub fn hermitian_part(&self) -> QMatrix {
        (self + &self.adjoint()).scale(0.5)
    }

    fn hermitian_eigen(&self) -> Result<nalgebra::SymmetricEigen<C64, nalgebra::Dyn>> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch(
                "hermitian eigen of non-square".into(),
            ));
        }
        let m = self.hermitian_part().embed();
        Ok(m.symmetric_eigen())
    }

    /// Eigenvalues of a Hermitian matrix, ascending, each listed once
    /// (the embedding doubles them).
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<f64>> {
        if self.rows == 0 {
            return Ok(Vec::new());
        }
        let e = self.hermitian_eigen()?;
        let mut v: Vec<f64> = e.eigenvalues.iter().copied().collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        Ok(v.into_iter().step_by(2).collect())
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self
            .hermitian_eigenvalues()?
            .first()
            .copied()
            .unwrap_or(f64::INFINITY))
    }

    /// `f(H)` for Hermitian `H` through its spectral decomposition.
    fn hermitian_fn(&self, f: impl Fn(f64) -> f64) -> Result<QMatrix> {
        if self.rows == 0 {
            return Ok(QMatrix::zeros(0, 0));
        }
        let e = self.hermitian_eigen()?;
        let d = DVector::from_iterator(
            e.eigenvalues.len(),
            e.eigenvalues.iter().map(|&l| C64::new(f(l), 0.0)),
        );
        let v = &e.eigenvectors;
        let m = v * DMatrix::from_diagonal(&d) * v.adjoint();
        QMatrix::unembed(&m)
    }

    /// Positive square root of a positive semidefinite Hermitian matrix.
    pub fn sqrt_psd(&self) -> Result<QMatrix> {
        let min = self.min_eigenvalue()?;
        if min < -tol::PSD_TOL {
            return Err(Error::NotPsd { min_eig: min });
        }
        self.hermitian_fn(|l| l.max(0.0).sqrt())
    }

    /// Inverse positive square root of a positive definite Hermitian matrix.
    pub fn inv_sqrt_pd(&self) -> Result<QMatrix> {
        let min = self.min_eigenvalue()?;
        if min <= 0.0 {
            return Err(Error::NotPsd { min_eig: min });
        }
        self.hermitian_fn(|l| 1.0 / l.sqrt())
    }

    /// Right spectrum as conjugacy classes with multiplicities.
    pub fn right_spectrum(&self) -> Result<Vec<(ConjugacyClass, usize)>> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch(
                "right spectrum of non-square".into(),
            ));
        }
        if self.rows == 0 {
            return Ok(Vec::new());
        }
        let pts = self.raw_eigenvalues()?;
        Ok(cluster_classes(&pts, SPECTRUM_CLUSTER_TOL))
    }

    /// Eigenvalues of the real image, folded to the upper half plane.
    fn raw_eigenvalues(&self) -> Result<Vec<(f64, f64)>> {
        let real = self.realify();
        let ev = real.complex_eigenvalues();
        let pts: Vec<(f64, f64)> = ev.iter().map(|z| (z.re, z.im.abs())).collect();
        if pts.iter().any(|(a, b)| !a.is_finite() || !b.is_finite()) {
            return Err(Error::Numerical(
                "eigensolver produced non-finite values".into(),
            ));
        }
        Ok(pts)
    }

    pub fn spectral_radius(&self) -> Result<f64> {
        if self.rows == 0 {
            return Ok(0.0);
        }
        Ok(self
            .raw_eigenvalues()?
            .iter()
            .map(|(a, b)| a.hypot(*b))
            .fold(0.0, f64::max))
    }

    pub fn is_stable(&self, margin: f64) -> bool {
        self.is_square()
            && self
                .spectral_radius()
                .map(|r| r < 1.0 - margin)
                .unwrap_or(false)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        let id = QMatrix::identity(self.rows);
        let adj = self.adjoint();
        (self * &adj).max_diff(&id) <= tol && (&adj * self).max_diff(&id) <= tol
    }

    /// `max(‖UU* − I‖, ‖U*U − I‖)` entrywise.
    pub fn unitarity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let id = QMatrix::identity(self.rows);
        let adj = self.adjoint();
        (self * &adj).max_diff(&id).max((&adj * self).max_diff(&id))
    }
}

/// Single-linkage clustering radius for eigenvalues of the real image;
/// defective eigenvalues split at roughly `ε^{1/m}`.
pub const SPECTRUM_CLUSTER_TOL: f64 = 1e-4;

fn cluster_classes(pts: &[(f64, f64)], tol: f64) -> Vec<(ConjugacyClass, usize)> {
    let n = pts.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn find(label: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while label[r] != r {
            r = label[r];
        }
        label[i] = r;
        r
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let d = (pts[i].0 - pts[j].0).hypot(pts[i].1 - pts[j].1);
            if d <= tol {
                let (a, b) = (find(&mut label, i), find(&mut label, j));
                if a != b {
                    label[b] = a;
                }
            }
        }
    }
    let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
    for i in 0..n {
        let root = find(&mut label, i);
        match groups.iter_mut().find(|(r, _)| *r == root) {
            Some((_, g)) => g.push(i),
            None => groups.push((root, vec![i])),
        }
    }
    let mut out: Vec<(ConjugacyClass, usize)> = groups
        .into_iter()
        .map(|(_, g)| {
            let k = g.len() as f64;
            let re = g.iter().map(|&i| pts[i].0).sum::<f64>() / k;
            let im = g.iter().map(|&i| pts[i].1).sum::<f64>() / k;
            (ConjugacyClass::new(re, im), (g.len() + 2) / 4)
        })
        .collect();
    out.sort_by(|a, b| {
        a.0.re
            .partial_cmp(&b.0.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(
                a.0.im_norm
                    .partial_cmp(&b.0.im_norm)
                    .unwrap_or(std::cmp::Ordering::Equal),
            )
    });
    out
}

impl Index<(usize, usize)> for QMatrix {
    type Output = Quaternion;
    fn index(&self, (r, c): (usize, usize)) -> &Quaternion {
        &self.entries[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for QMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Quaternion {
        &mut self.entries[r * self.cols + c]
    }
}

impl Mul for &QMatrix {
    type Output = QMatrix;
    /// Panics on a shape mismatch; use [`QMatrix::try_mul`] for a checked product.
    fn mul(self, o: &QMatrix) -> QMatrix {
        self.try_mul(o).expect("matrix product shape mismatch")
    }
}

impl Add for &QMatrix {
    type Output = QMatrix;
    fn add(self, o: &QMatrix) -> QMatrix {
        assert_eq!(self.shape(), o.shape(), "matrix sum shape mismatch");
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&o.entries)
                .map(|(a, b)| *a + *b)
                .collect(),
        }
    }
}

impl Sub for &QMatrix {
    type Output = QMatrix;
    fn sub(self, o: &QMatrix) -> QMatrix {
        assert_eq!(self.shape(), o.shape(), "matrix difference shape mismatch");
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&o.entries)
                .map(|(a, b)| *a - *b)
                .collect(),
        }
    }
}

impl Neg for &QMatrix {
    type Output = QMatrix;
    fn neg(self) -> QMatrix {
        self.map(|e| -e)
    }
}

/// Pair `(A, v)` whose controllability matrix is invertible.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ControllablePair {
    pub a: QMatrix,
    pub v: QMatrix,
}

impl ControllablePair {
    /// Validates shapes and controllability.
    pub fn new(a: QMatrix, v: QMatrix) -> Result<Self> {
        let n = a.rows();
        if !a.is_square() || v.rows() != n || v.cols() != 1 {
            return Err(Error::DimensionMismatch(format!(
                "pair needs n×n and n×1, got {}x{} and {}x{}",
                a.rows(),
                a.cols(),
                v.rows(),
                v.cols()
            )));
        }
        let rank = controllability_matrix(&a, &v)?.rank();
        if rank < n {
            return Err(Error::NotControllable { rank, n });
        }
        Ok(ControllablePair { a, v })
    }

    pub fn dim(&self) -> usize {
        self.a.rows()
    }
}

/// `[v, Av, …, A^{n−1}v]`.
pub fn controllability_matrix(a: &QMatrix, v: &QMatrix) -> Result<QMatrix> {
    let n = a.rows();
    if !a.is_square() || v.rows() != n || v.cols() != 1 {
        return Err(Error::DimensionMismatch(
            "controllability matrix shape".into(),
        ));
    }
    let mut out = QMatrix::zeros(n, n);
    let mut col = v.clone();
    for k in 0..n {
        out.set_block(0, k, &col);
        col = a * &col;
    }
    Ok(out)
}

/// Companion matrix with subdiagonal ones and last column `−p₀, …, −p_{n−1}`.
pub fn companion_matrix(p: &Polynomial) -> Result<QMatrix> {
    let n = p
        .degree()
        .ok_or_else(|| Error::InvalidInput("zero polynomial has no companion".into()))?;
    if n == 0 {
        return Err(Error::InvalidInput(
            "companion matrix needs degree ≥ 1".into(),
        ));
    }
    if p.coeffs()[n].dist(Quaternion::ONE) > tol::DEFAULT_TOL {
        return Err(Error::InvalidInput(
            "companion matrix needs a monic polynomial".into(),
        ));
    }
    let mut c = QMatrix::shift(n);
    for k in 0..n {
        c.set(k, n - 1, -p.coeffs()[k]);
    }
    Ok(c)
}

/// Solves `P − A·P·A* = v·v*` for stable `A`.
///
/// The equation is vectorized over the embedding,
/// `(I − conj(Ã) ⊗ Ã)·vec X = vec(ṽṽ*)`, then mapped back and symmetrized.
pub fn stein_solve(a: &QMatrix, v: &QMatrix) -> Result<QMatrix> {
    let n = a.rows();
    if !a.is_square() || v.rows() != n {
        return Err(Error::DimensionMismatch("stein_solve shape".into()));
    }
    if n == 0 {
        return Ok(QMatrix::zeros(0, 0));
    }
    let radius = a.spectral_radius()?;
    if radius >= 1.0 - tol::STABILITY_MARGIN {
        return Err(Error::NotStable { radius });
    }
    let q = v * &v.adjoint();
    let at = a.embed();
    let qt = q.embed();
    let m = 2 * n;
    let kron = at.conjugate().kronecker(&at);
    let sys = DMatrix::<C64>::identity(m * m, m * m) - kron;
    // column-major vec
    let rhs = DVector::from_iterator(m * m, qt.iter().copied());
    let sol = sys
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Numerical("singular Stein system".into()))?;
    let x = DMatrix::from_column_slice(m, m, sol.as_slice());
    let p = QMatrix::unembed(&x)?.hermitian_part();
    if !p.is_finite() {
        return Err(Error::Numerical("non-finite Stein solution".into()));
    }
    Ok(p)
}

/// `‖P − APA* − vv*‖_max / max(1, ‖P‖_max)`.
pub fn stein_residual(p: &QMatrix, a: &QMatrix, v: &QMatrix) -> f64 {
    let lhs = &(p - &(&(a * p) * &a.adjoint())) - &(v * &v.adjoint());
    lhs.max_abs() / p.max_abs().max(1.0)
}

/// Solves a real-linear system `L(x) = rhs` in `n` quaternion unknowns,
/// where `L` is given as a closure. The 4n×4n real matrix is assembled by
/// applying `L` to the real basis.
pub fn solve_real_linear(
    n: usize,
    op: impl Fn(&[Quaternion]) -> Vec<Quaternion>,
    rhs: &[Quaternion],
) -> Result<Vec<Quaternion>> {
    let dim = 4 * n;
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut m = DMatrix::<f64>::zeros(dim, dim);
    let mut basis = vec![Quaternion::ZERO; n];
    for col in 0..dim {
        let (slot, comp) = (col / 4, col % 4);
        let mut arr = [0.0; 4];
        arr[comp] = 1.0;
        basis[slot] = Quaternion::from_array(arr);
        let image = op(&basis);
        for (i, q) in image.iter().enumerate() {
            let a = q.to_array();
            for c in 0..4 {
                m[(4 * i + c, col)] = a[c];
            }
        }
        basis[slot] = Quaternion::ZERO;
    }
    let b = DVector::from_iterator(dim, rhs.iter().flat_map(|q| q.to_array()));
    let x = m
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::Numerical("singular real-linear system".into()))?;
    Ok((0..n)
        .map(|i| Quaternion::new(x[4 * i], x[4 * i + 1], x[4 * i + 2], x[4 * i + 3]))
        .collect())
}
