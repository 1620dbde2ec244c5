//! Dense small-dimension vectors and matrices, linear solves, deterministic
//! sampling, and the tolerance policy shared by every other module.
//!
//! Everything here targets desk-scale dimensions (n <= 16 or so); all
//! arithmetic is f64 and all sampling is a pure function of the seed and the
//! call sequence.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Conditioning threshold below which a square system is rejected as singular.
pub const RCOND_THRESHOLD: f64 = 1e-12;

/// A finite-dimensional vector with finite entries.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Vector(Vec<f64>);

impl Vector {
    /// Validating constructor; rejects NaN/Inf entries and zero length.
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::ParseError("vector must have length >= 1".into()));
        }
        if let Some(bad) = entries.iter().find(|e| !e.is_finite()) {
            return Err(Error::ParseError(format!("non-finite vector entry {bad}")));
        }
        Ok(Vector(entries))
    }

    /// Panicking constructor for internal and test use.
    pub fn from_slice(entries: &[f64]) -> Self {
        Self::new(entries.to_vec()).expect("finite non-empty vector")
    }

    pub fn zeros(n: usize) -> Self {
        Vector(vec![0.0; n])
    }

    /// Standard basis vector `e_i` in dimension `n`.
    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        Vector(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn add(&self, other: &Vector) -> Vector {
        debug_assert_eq!(self.dim(), other.dim());
        Vector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        debug_assert_eq!(self.dim(), other.dim());
        Vector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, t: f64) -> Vector {
        Vector(self.0.iter().map(|a| a * t).collect())
    }

    pub fn neg(&self) -> Vector {
        self.scale(-1.0)
    }

    /// `self + t * other`.
    pub fn axpy(&self, t: f64, other: &Vector) -> Vector {
        debug_assert_eq!(self.dim(), other.dim());
        Vector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + t * b)
                .collect(),
        )
    }

    pub fn normalized(&self) -> Vector {
        let n = self.norm();
        debug_assert!(n > 0.0, "cannot normalize the zero vector");
        self.scale(1.0 / n)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, a| m.max(a.abs()))
    }

    /// Splits `(t, x)` into the first coordinate and the remaining block.
    /// Requires dimension >= 2.
    pub fn split_head(&self) -> (f64, Vector) {
        debug_assert!(self.dim() >= 2);
        (self.0[0], Vector(self.0[1..].to_vec()))
    }

    /// Rebuilds `(t, x)` from a head coordinate and a tail block.
    pub fn from_head_tail(t: f64, tail: &Vector) -> Vector {
        let mut v = Vec::with_capacity(1 + tail.dim());
        v.push(t);
        v.extend_from_slice(tail.as_slice());
        Vector(v)
    }

    pub(crate) fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl std::ops::Index<usize> for Vector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl<'a> IntoIterator for &'a Vector {
    type Item = &'a f64;
    type IntoIter = std::slice::Iter<'a, f64>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// A dense row-major matrix with finite entries.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::ParseError("matrix dimensions must be >= 1".into()));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        if let Some(bad) = data.iter().find(|e| !e.is_finite()) {
            return Err(Error::ParseError(format!("non-finite matrix entry {bad}")));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vector]) -> Result<Self> {
        let ncols = rows.first().map(Vector::dim).unwrap_or(0);
        if rows.iter().any(|r| r.dim() != ncols) {
            return Err(Error::ParseError("ragged matrix rows".into()));
        }
        let data = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Matrix::new(rows.len(), ncols, data)
    }

    pub fn from_columns(cols: &[Vector]) -> Result<Self> {
        Ok(Matrix::from_rows(cols)?.transpose())
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Matrix {
            rows: n,
            cols: n,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> Vector {
        Vector(self.data[i * self.cols..(i + 1) * self.cols].to_vec())
    }

    pub fn col(&self, j: usize) -> Vector {
        Vector((0..self.rows).map(|i| self.get(i, j)).collect())
    }

    pub fn column_iter(&self) -> impl Iterator<Item = Vector> + '_ {
        (0..self.cols).map(|j| self.col(j))
    }

    pub fn transpose(&self) -> Matrix {
        let mut data = vec![0.0; self.data.len()];
        for i in 0..self.rows {
            for j in 0..self.cols {
                data[j * self.rows + i] = self.get(i, j);
            }
        }
        Matrix {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    pub fn matvec(&self, x: &Vector) -> Vector {
        debug_assert_eq!(self.cols, x.dim());
        Vector(
            (0..self.rows)
                .map(|i| {
                    self.data[i * self.cols..(i + 1) * self.cols]
                        .iter()
                        .zip(x.iter())
                        .map(|(a, b)| a * b)
                        .sum()
                })
                .collect(),
        )
    }

    /// `Aᵀ x` without forming the transpose.
    pub fn transpose_matvec(&self, x: &Vector) -> Vector {
        debug_assert_eq!(self.rows, x.dim());
        let mut out = vec![0.0; self.cols];
        for i in 0..self.rows {
            let xi = x[i];
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            for (o, a) in out.iter_mut().zip(row) {
                *o += a * xi;
            }
        }
        Vector(out)
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        debug_assert_eq!(self.cols, other.rows);
        let mut data = vec![0.0; self.rows * other.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.get(i, k);
                for j in 0..other.cols {
                    data[i * other.cols + j] += aik * other.get(k, j);
                }
            }
        }
        Matrix {
            rows: self.rows,
            cols: other.cols,
            data,
        }
    }

    pub fn scale(&self, t: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * t).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|a| a * a).sum::<f64>().sqrt()
    }
}

pub(crate) fn to_na_matrix(m: &Matrix) -> DMatrix<f64> {
    DMatrix::from_row_iterator(m.rows(), m.cols(), m.data.iter().copied())
}

pub(crate) fn from_na_matrix(m: &DMatrix<f64>) -> Matrix {
    Matrix {
        rows: m.nrows(),
        cols: m.ncols(),
        data: m.transpose().as_slice().to_vec(),
    }
}

pub(crate) fn to_na_vector(v: &Vector) -> DVector<f64> {
    DVector::from_column_slice(v.as_slice())
}

pub(crate) fn from_na_vector(v: &DVector<f64>) -> Vector {
    Vector(v.as_slice().to_vec())
}

/// Absolute/relative tolerances and sampling parameters shared by all
/// approximate checks. Threaded explicitly; there are no hidden globals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub membership_tol: f64,
    pub sample_count: usize,
    pub seed: u64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig {
            abs_tol: 1e-9,
            rel_tol: 1e-9,
            membership_tol: 1e-8,
            sample_count: 1000,
            seed: 42,
        }
    }
}

impl ToleranceConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0 && self.membership_tol > 0.0) {
            return Err(Error::ParseError("tolerances must be positive".into()));
        }
        if self.sample_count == 0 {
            return Err(Error::ParseError("sample_count must be >= 1".into()));
        }
        Ok(())
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_samples(mut self, samples: usize) -> Self {
        self.sample_count = samples;
        self
    }

    /// Scale-aware membership threshold: absolute near the origin, relative
    /// far from it.
    pub fn membership_margin_tol(&self, scale: f64) -> f64 {
        self.membership_tol * (1.0 + scale)
    }

    pub fn rng(&self) -> SampleRng {
        SampleRng::new(self.seed)
    }
}

/// Deterministic sampling state. All draws are a pure function of the seed
/// and the call sequence; the state is an explicit value, never shared.
#[derive(Clone, Debug)]
pub struct SampleRng {
    inner: ChaCha8Rng,
}

impl SampleRng {
    pub fn new(seed: u64) -> Self {
        SampleRng {
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Uniform draw in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    pub fn standard_normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.inner)
    }

    /// |N(0,1)| draw; used for nonnegative generator coefficients.
    pub fn half_normal(&mut self) -> f64 {
        self.standard_normal().abs()
    }

    pub fn gaussian_vector(&mut self, n: usize) -> Vector {
        Vector((0..n).map(|_| self.standard_normal()).collect())
    }

    /// Uniform point on the unit sphere in R^n.
    pub fn unit_sphere(&mut self, n: usize) -> Vector {
        loop {
            let g = self.gaussian_vector(n);
            let norm = g.norm();
            if norm > 1e-12 {
                return g.scale(1.0 / norm);
            }
        }
    }

    /// Uniform point in the closed unit ball of R^n via the
    /// normalized-Gaussian scheme: a uniform sphere direction scaled by
    /// U^(1/n).
    pub fn unit_ball(&mut self, n: usize) -> Vector {
        let dir = self.unit_sphere(n);
        let r = self.uniform().powf(1.0 / n as f64);
        dir.scale(r)
    }
}

/// Uniform sample from the closed unit ball; the sampling state is passed
/// explicitly and mutated in place.
pub fn sample_unit_ball(n: usize, rng: &mut SampleRng) -> Vector {
    assert!(n >= 1);
    rng.unit_ball(n)
}

/// Reciprocal condition number sigma_min / sigma_max (0 for a degenerate
/// matrix).
pub fn rcond(a: &Matrix) -> f64 {
    let svd = to_na_matrix(a).svd(false, false);
    let sv = &svd.singular_values;
    let smax = sv.iter().cloned().fold(0.0_f64, f64::max);
    let smin = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if smax == 0.0 {
        0.0
    } else {
        smin / smax
    }
}

/// Solves the square system `a x = b` by SVD, rejecting systems whose
/// reciprocal condition estimate falls at or below [`RCOND_THRESHOLD`].
pub fn solve(a: &Matrix, b: &Vector) -> Result<Vector> {
    if a.rows() != a.cols() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            got: a.cols(),
        });
    }
    if a.rows() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            got: b.dim(),
        });
    }
    let na = to_na_matrix(a);
    let svd = na.svd(true, true);
    let sv = &svd.singular_values;
    let smax = sv.iter().cloned().fold(0.0_f64, f64::max);
    let smin = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    let rc = if smax == 0.0 { 0.0 } else { smin / smax };
    if rc <= RCOND_THRESHOLD {
        return Err(Error::SingularMatrix {
            rcond: rc,
            threshold: RCOND_THRESHOLD,
        });
    }
    let x = svd
        .solve(&to_na_vector(b), 0.0)
        .map_err(|e| Error::InvalidConstruction(e.to_string()))?;
    Ok(from_na_vector(&x))
}

/// Minimum-norm least-squares solution of a (possibly rectangular, possibly
/// rank-deficient) system, with singular values below `1e-12 * sigma_max`
/// treated as zero.
pub fn least_squares(a: &Matrix, b: &Vector) -> Result<Vector> {
    if a.rows() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            got: b.dim(),
        });
    }
    let svd = to_na_matrix(a).svd(true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0_f64, f64::max);
    let x = svd
        .solve(&to_na_vector(b), RCOND_THRESHOLD * smax)
        .map_err(|e| Error::InvalidConstruction(e.to_string()))?;
    Ok(from_na_vector(&x))
}

/// Inverse of a square matrix, same conditioning policy as [`solve`].
pub fn invert(a: &Matrix) -> Result<Matrix> {
    if a.rows() != a.cols() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            got: a.cols(),
        });
    }
    let rc = rcond(a);
    if rc <= RCOND_THRESHOLD {
        return Err(Error::SingularMatrix {
            rcond: rc,
            threshold: RCOND_THRESHOLD,
        });
    }
    let inv = to_na_matrix(a)
        .try_inverse()
        .ok_or(Error::SingularMatrix {
            rcond: rc,
            threshold: RCOND_THRESHOLD,
        })?;
    Ok(from_na_matrix(&inv))
}

/// Numerical rank with a relative singular-value cutoff.
pub fn matrix_rank(a: &Matrix, rel_cutoff: f64) -> usize {
    let svd = to_na_matrix(a).svd(false, false);
    let sv = &svd.singular_values;
    let smax = sv.iter().cloned().fold(0.0_f64, f64::max);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|s| **s > rel_cutoff * smax).count()
}

/// Moore-Penrose pseudo-inverse of a full-column-rank matrix; `None` when the
/// columns are numerically dependent (rcond at or below [`RCOND_THRESHOLD`]).
pub fn full_rank_pseudo_inverse(a: &Matrix) -> Option<Matrix> {
    let na = to_na_matrix(a);
    let svd = na.svd(true, true);
    let sv = &svd.singular_values;
    let smax = sv.iter().cloned().fold(0.0_f64, f64::max);
    let smin = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if smax == 0.0 || smin / smax <= RCOND_THRESHOLD || sv.len() < a.cols() {
        return None;
    }
    let pinv = svd.pseudo_inverse(0.0).ok()?;
    Some(from_na_matrix(&pinv))
}

/// Unit direction minimizing `‖A v‖` (the right-singular direction of the
/// smallest singular value), computed on the Gram matrix so wide inputs are
/// handled uniformly. Useful as an unboundedness/null-space witness.
pub fn min_singular_direction(a: &Matrix) -> Vector {
    let gram = a.transpose().matmul(a);
    let svd = to_na_matrix(&gram).svd(false, true);
    let vt = svd.v_t.expect("v_t was requested");
    let mut idx = 0;
    let mut best = f64::INFINITY;
    for (i, s) in svd.singular_values.iter().enumerate() {
        if *s < best {
            best = *s;
            idx = i;
        }
    }
    let row: Vec<f64> = vt.row(idx).iter().copied().collect();
    Vector::from_slice(&row).normalized()
}

/// Orthonormal basis of R^n whose first column is `first` normalized,
/// completed deterministically from the standard basis by Gram-Schmidt.
pub fn orthonormal_basis_with_first(first: &Vector) -> Result<Matrix> {
    let n = first.dim();
    let norm = first.norm();
    if norm <= 1e-300 {
        return Err(Error::InvalidConstruction(
            "cannot build a frame from the zero vector".into(),
        ));
    }
    let mut basis: Vec<Vector> = vec![first.scale(1.0 / norm)];
    for i in 0..n {
        if basis.len() == n {
            break;
        }
        let mut cand = Vector::unit(n, i);
        for b in &basis {
            cand = cand.axpy(-cand.dot(b), b);
        }
        let cn = cand.norm();
        if cn > 1e-8 {
            basis.push(cand.scale(1.0 / cn));
        }
    }
    debug_assert_eq!(basis.len(), n);
    Matrix::from_columns(&basis)
}
