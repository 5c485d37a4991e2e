//! Dense complex matrices with subsystem bookkeeping.
//!
//! Composite indices are row-major: for subsystems `(S0, S1, ..., Sk)` the
//! leftmost subsystem is the most significant digit. Every other module in
//! the crate relies on this single convention.

use std::collections::HashSet;
use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Tolerance for algebraic identities on small matrices; relaxed for large ones.
pub fn identity_tolerance(size: usize) -> f64 {
    if size > 16 {
        1e-10
    } else {
        1e-12
    }
}

/// A dense complex matrix whose rows and columns carry tensor-factor dimensions.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    data: DMatrix<C64>,
    row_dims: Vec<usize>,
    col_dims: Vec<usize>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {:?} x {:?}", self.row_dims, self.col_dims)?;
        for i in 0..self.rows() {
            let row: Vec<String> = (0..self.cols())
                .map(|j| {
                    let z = self.data[(i, j)];
                    format!("{:+.4}{:+.4}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

fn product(dims: &[usize]) -> usize {
    dims.iter().product()
}

impl ComplexMatrix {
    pub fn new(data: DMatrix<C64>, row_dims: Vec<usize>, col_dims: Vec<usize>) -> Result<Self> {
        if row_dims.iter().chain(col_dims.iter()).any(|&d| d == 0) {
            return Err(Error::DimensionMismatch("subsystem dimensions must be >= 1".into()));
        }
        if product(&row_dims) != data.nrows() || product(&col_dims) != data.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "dims {:?} x {:?} do not match a {}x{} matrix",
                row_dims,
                col_dims,
                data.nrows(),
                data.ncols()
            )));
        }
        Ok(Self { data, row_dims, col_dims })
    }

    /// Square matrix with the same subsystem structure on rows and columns.
    pub fn square(data: DMatrix<C64>, dims: Vec<usize>) -> Result<Self> {
        Self::new(data, dims.clone(), dims)
    }

    /// Square matrix treated as a single subsystem.
    pub fn from_dmatrix(data: DMatrix<C64>) -> Self {
        let (r, c) = data.shape();
        Self { data, row_dims: vec![r], col_dims: vec![c] }
    }

    pub fn from_fn(dims: &[usize], f: impl Fn(usize, usize) -> C64) -> Self {
        let n = product(dims);
        Self {
            data: DMatrix::from_fn(n, n, f),
            row_dims: dims.to_vec(),
            col_dims: dims.to_vec(),
        }
    }

    /// Builds a square matrix from real row-major rows.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let n = rows.len();
        let data = DMatrix::from_fn(n, n, |i, j| C64::new(rows[i][j], 0.0));
        Self::from_dmatrix(data)
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let n = rows.len();
        let m = rows.first().map_or(0, |r| r.len());
        Self::from_dmatrix(DMatrix::from_fn(n, m, |i, j| rows[i][j]))
    }

    pub fn zeros(dims: &[usize]) -> Self {
        let n = product(dims);
        Self { data: DMatrix::zeros(n, n), row_dims: dims.to_vec(), col_dims: dims.to_vec() }
    }

    pub fn identity(dims: &[usize]) -> Self {
        let n = product(dims);
        Self { data: DMatrix::identity(n, n), row_dims: dims.to_vec(), col_dims: dims.to_vec() }
    }

    pub fn ones(dims: &[usize]) -> Self {
        let n = product(dims);
        Self {
            data: DMatrix::from_element(n, n, ONE),
            row_dims: dims.to_vec(),
            col_dims: dims.to_vec(),
        }
    }

    pub fn diagonal(values: &[C64], dims: &[usize]) -> Result<Self> {
        let n = values.len();
        let mut data = DMatrix::zeros(n, n);
        for (i, v) in values.iter().enumerate() {
            data[(i, i)] = *v;
        }
        Self::square(data, dims.to_vec())
    }

    /// Column vector `|index>` in the composite basis of `dims`.
    pub fn basis_ket(dims: &[usize], index: usize) -> Self {
        let n = product(dims);
        let mut data = DMatrix::zeros(n, 1);
        data[(index, 0)] = ONE;
        Self { data, row_dims: dims.to_vec(), col_dims: vec![1] }
    }

    /// Column vector from amplitudes.
    pub fn ket(amplitudes: &[C64], dims: &[usize]) -> Result<Self> {
        let data = DMatrix::from_column_slice(amplitudes.len(), 1, amplitudes);
        Self::new(data, dims.to_vec(), vec![1])
    }

    /// `|v><v|` for a column vector.
    pub fn projector(ket: &ComplexMatrix) -> Self {
        let data = &ket.data * ket.data.adjoint();
        Self { data, row_dims: ket.row_dims.clone(), col_dims: ket.row_dims.clone() }
    }

    /// `|index><index|` in the composite basis of `dims`.
    pub fn basis_projector(dims: &[usize], index: usize) -> Self {
        let mut m = Self::zeros(dims);
        m.data[(index, index)] = ONE;
        m
    }

    /// `|i><j|` in the composite basis of `dims`.
    pub fn matrix_unit(dims: &[usize], i: usize, j: usize) -> Self {
        let mut m = Self::zeros(dims);
        m.data[(i, j)] = ONE;
        m
    }

    pub fn data(&self) -> &DMatrix<C64> {
        &self.data
    }

    pub fn into_data(self) -> DMatrix<C64> {
        self.data
    }

    pub fn rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn cols(&self) -> usize {
        self.data.ncols()
    }

    pub fn dims(&self) -> &[usize] {
        &self.row_dims
    }

    pub fn col_dims(&self) -> &[usize] {
        &self.col_dims
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[(i, j)] = v;
    }

    /// Replaces the subsystem metadata while keeping the entries.
    pub fn with_dims(mut self, row_dims: Vec<usize>, col_dims: Vec<usize>) -> Result<Self> {
        if product(&row_dims) != self.rows() || product(&col_dims) != self.cols() {
            return Err(Error::DimensionMismatch(format!(
                "cannot view a {}x{} matrix as {:?} x {:?}",
                self.rows(),
                self.cols(),
                row_dims,
                col_dims
            )));
        }
        self.row_dims = row_dims;
        self.col_dims = col_dims;
        Ok(self)
    }

    pub fn with_square_dims(self, dims: Vec<usize>) -> Result<Self> {
        self.with_dims(dims.clone(), dims)
    }

    pub fn trace(&self) -> C64 {
        self.data.trace()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            data: self.data.adjoint(),
            row_dims: self.col_dims.clone(),
            col_dims: self.row_dims.clone(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self {
            data: self.data.transpose(),
            row_dims: self.col_dims.clone(),
            col_dims: self.row_dims.clone(),
        }
    }

    pub fn conj(&self) -> Self {
        Self { data: self.data.map(|z| z.conj()), ..self.clone() }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { data: &self.data * s, ..self.clone() }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> Result<Self> {
        if self.cols() != other.rows() {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows(),
                self.cols(),
                other.rows(),
                other.cols()
            )));
        }
        Ok(Self {
            data: &self.data * &other.data,
            row_dims: self.row_dims.clone(),
            col_dims: other.col_dims.clone(),
        })
    }

    /// `U M U†`.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Result<Self> {
        u.matmul(self)?.matmul(&u.adjoint())
    }

    /// Entrywise max-norm of `self - other`; infinite on shape mismatch.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        if self.data.shape() != other.data.shape() {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn hermiticity_error(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.data[(i, j)] - self.data[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
    }

    /// `(M + M†)/2`.
    pub fn hermitian_part(&self) -> Self {
        Self { data: (&self.data + self.data.adjoint()) * C64::new(0.5, 0.0), ..self.clone() }
    }

    /// Smallest eigenvalue of a Hermitian matrix.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        let (vals, _) = herm_eig(self)?;
        Ok(vals.first().copied().unwrap_or(0.0))
    }

    /// Real parts of the diagonal.
    pub fn diagonal_real(&self) -> Vec<f64> {
        (0..self.rows().min(self.cols())).map(|i| self.data[(i, i)].re).collect()
    }

    /// Keeps only the diagonal.
    pub fn diagonal_part(&self) -> Self {
        let mut out = Self { data: DMatrix::zeros(self.rows(), self.cols()), ..self.clone() };
        for i in 0..self.rows().min(self.cols()) {
            out.data[(i, i)] = self.data[(i, i)];
        }
        out
    }

    pub fn inner(&self, other: &ComplexMatrix) -> C64 {
        // Tr(self† other)
        self.data.iter().zip(other.data.iter()).map(|(a, b)| a.conj() * b).sum()
    }

    /// `Tr(self · other)` without forming the product.
    pub fn trace_product(&self, other: &ComplexMatrix) -> C64 {
        let mut acc = ZERO;
        for i in 0..self.rows() {
            for k in 0..self.cols() {
                acc += self.data[(i, k)] * other.data[(k, i)];
            }
        }
        acc
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.data.shape(), rhs.data.shape(), "shape mismatch in addition");
        ComplexMatrix { data: &self.data + &rhs.data, ..self.clone() }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.data.shape(), rhs.data.shape(), "shape mismatch in subtraction");
        ComplexMatrix { data: &self.data - &rhs.data, ..self.clone() }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("shape mismatch in product")
    }
}

/// Ordered subsystem labels with their dimensions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsystemIndex {
    systems: Vec<(String, usize)>,
}

impl SubsystemIndex {
    pub fn new(systems: &[(&str, usize)]) -> Result<Self> {
        let mut seen = HashSet::new();
        for (label, dim) in systems {
            if !seen.insert(*label) {
                return Err(Error::DuplicateLabel(label.to_string()));
            }
            if *dim == 0 {
                return Err(Error::DimensionMismatch(format!("subsystem {label} has dimension 0")));
            }
        }
        Ok(Self { systems: systems.iter().map(|(l, d)| (l.to_string(), *d)).collect() })
    }

    pub fn dims(&self) -> Vec<usize> {
        self.systems.iter().map(|(_, d)| *d).collect()
    }

    pub fn labels(&self) -> Vec<&str> {
        self.systems.iter().map(|(l, _)| l.as_str()).collect()
    }

    pub fn len(&self) -> usize {
        self.systems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.systems.is_empty()
    }

    pub fn total_dim(&self) -> usize {
        product(&self.dims())
    }

    pub fn position(&self, label: &str) -> Result<usize> {
        self.systems
            .iter()
            .position(|(l, _)| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn positions(&self, labels: &[&str]) -> Result<Vec<usize>> {
        labels.iter().map(|l| self.position(l)).collect()
    }

    pub fn dim(&self, label: &str) -> Result<usize> {
        Ok(self.systems[self.position(label)?].1)
    }

    /// Index restricted to the given labels, in this index's order.
    pub fn restrict(&self, keep: &[&str]) -> Result<Self> {
        let pos = self.positions(keep)?;
        let mut sorted = pos.clone();
        sorted.sort_unstable();
        Ok(Self { systems: sorted.into_iter().map(|p| self.systems[p].clone()).collect() })
    }
}

/// Splits a composite index into subsystem digits.
pub fn split_index(mut index: usize, dims: &[usize]) -> Vec<usize> {
    let mut digits = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        digits[k] = index % dims[k];
        index /= dims[k];
    }
    digits
}

/// Inverse of [`split_index`].
pub fn join_index(digits: &[usize], dims: &[usize]) -> usize {
    digits.iter().zip(dims).fold(0, |acc, (&d, &n)| acc * n + d)
}

/// Kronecker product; subsystem lists are concatenated.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let data = a.data.kronecker(&b.data);
    let row_dims = a.row_dims.iter().chain(&b.row_dims).copied().collect();
    let col_dims = a.col_dims.iter().chain(&b.col_dims).copied().collect();
    ComplexMatrix { data, row_dims, col_dims }
}

/// Kronecker product of a list, left to right.
pub fn kron_all(factors: &[&ComplexMatrix]) -> ComplexMatrix {
    let mut iter = factors.iter();
    let first = (*iter.next().expect("kron_all needs at least one factor")).clone();
    iter.fold(first, |acc, m| kron(&acc, m))
}

fn check_square_positions(m: &ComplexMatrix, positions: &[usize]) -> Result<()> {
    if !m.is_square() || m.row_dims != m.col_dims {
        return Err(Error::DimensionMismatch(
            "operation requires a square matrix with matching row and column subsystems".into(),
        ));
    }
    if let Some(&p) = positions.iter().find(|&&p| p >= m.row_dims.len()) {
        return Err(Error::UnknownLabel(format!("subsystem position {p}")));
    }
    Ok(())
}

/// Traces out every subsystem not listed in `keep` (positions into `m.dims()`).
pub fn partial_trace(m: &ComplexMatrix, keep: &[usize]) -> Result<ComplexMatrix> {
    check_square_positions(m, keep)?;
    let dims = &m.row_dims;
    let keep_set: HashSet<usize> = keep.iter().copied().collect();
    let kept: Vec<usize> = (0..dims.len()).filter(|p| keep_set.contains(p)).collect();
    let traced: Vec<usize> = (0..dims.len()).filter(|p| !keep_set.contains(p)).collect();
    let kept_dims: Vec<usize> = kept.iter().map(|&p| dims[p]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&p| dims[p]).collect();

    let n = m.rows();
    let mut kidx = vec![0usize; n];
    let mut tidx = vec![0usize; n];
    for i in 0..n {
        let digits = split_index(i, dims);
        kidx[i] = join_index(&kept.iter().map(|&p| digits[p]).collect::<Vec<_>>(), &kept_dims);
        tidx[i] = join_index(&traced.iter().map(|&p| digits[p]).collect::<Vec<_>>(), &traced_dims);
    }
    let out_n = product(&kept_dims);
    let mut out = DMatrix::zeros(out_n, out_n);
    for j in 0..n {
        for i in 0..n {
            if tidx[i] == tidx[j] {
                out[(kidx[i], kidx[j])] += m.data[(i, j)];
            }
        }
    }
    let dims = if kept_dims.is_empty() { vec![1] } else { kept_dims };
    ComplexMatrix::square(out, dims)
}

/// Label-based partial trace.
pub fn partial_trace_labels(
    m: &ComplexMatrix,
    index: &SubsystemIndex,
    keep: &[&str],
) -> Result<ComplexMatrix> {
    if index.dims() != m.row_dims {
        return Err(Error::DimensionMismatch(format!(
            "index dims {:?} do not match matrix dims {:?}",
            index.dims(),
            m.row_dims
        )));
    }
    partial_trace(m, &index.positions(keep)?)
}

/// Transposes the indices of the listed subsystems only.
pub fn partial_transpose(m: &ComplexMatrix, over: &[usize]) -> Result<ComplexMatrix> {
    check_square_positions(m, over)?;
    let dims = &m.row_dims;
    let n = m.rows();
    let digits: Vec<Vec<usize>> = (0..n).map(|i| split_index(i, dims)).collect();
    let mut out = DMatrix::zeros(n, n);
    let mut di = vec![0; dims.len()];
    let mut dj = vec![0; dims.len()];
    for i in 0..n {
        for j in 0..n {
            di.copy_from_slice(&digits[i]);
            dj.copy_from_slice(&digits[j]);
            for &p in over {
                std::mem::swap(&mut di[p], &mut dj[p]);
            }
            out[(join_index(&di, dims), join_index(&dj, dims))] = m.data[(i, j)];
        }
    }
    ComplexMatrix::square(out, dims.clone())
}

pub fn partial_transpose_labels(
    m: &ComplexMatrix,
    index: &SubsystemIndex,
    over: &[&str],
) -> Result<ComplexMatrix> {
    if index.dims() != m.row_dims {
        return Err(Error::DimensionMismatch("index does not match matrix".into()));
    }
    partial_transpose(m, &index.positions(over)?)
}

/// Reorders subsystems: subsystem `k` of the result is subsystem `perm[k]` of `m`.
/// Applies to rows, and to columns as well when the column structure matches.
pub fn permute_subsystems(m: &ComplexMatrix, perm: &[usize]) -> Result<ComplexMatrix> {
    let row_perm = permutation_map(&m.row_dims, perm)?;
    let col_perm = if m.col_dims == m.row_dims {
        Some(row_perm.clone())
    } else if m.cols() == 1 {
        None
    } else {
        return Err(Error::DimensionMismatch(
            "permutation needs matching row/column subsystems or a column vector".into(),
        ));
    };
    let (n_r, n_c) = m.data.shape();
    let mut out = DMatrix::zeros(n_r, n_c);
    for i in 0..n_r {
        for j in 0..n_c {
            let jj = col_perm.as_ref().map_or(j, |c| c[j]);
            out[(row_perm[i], jj)] = m.data[(i, j)];
        }
    }
    let new_dims: Vec<usize> = perm.iter().map(|&p| m.row_dims[p]).collect();
    let col_dims = if col_perm.is_some() { new_dims.clone() } else { m.col_dims.clone() };
    ComplexMatrix::new(out, new_dims, col_dims)
}

/// For each old composite index, the new composite index under `perm`.
fn permutation_map(dims: &[usize], perm: &[usize]) -> Result<Vec<usize>> {
    let mut check: Vec<usize> = perm.to_vec();
    check.sort_unstable();
    if check != (0..dims.len()).collect::<Vec<_>>() {
        return Err(Error::DimensionMismatch(format!(
            "{perm:?} is not a permutation of {} subsystems",
            dims.len()
        )));
    }
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let n = product(dims);
    Ok((0..n)
        .map(|i| {
            let d = split_index(i, dims);
            let nd: Vec<usize> = perm.iter().map(|&p| d[p]).collect();
            join_index(&nd, &new_dims)
        })
        .collect())
}

/// Entrywise (Schur/Hadamard) product.
pub fn schur(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.data.shape() != b.data.shape() {
        return Err(Error::DimensionMismatch(format!(
            "Schur product of {:?} and {:?}",
            a.data.shape(),
            b.data.shape()
        )));
    }
    Ok(ComplexMatrix { data: a.data.component_mul(&b.data), ..a.clone() })
}

/// Eigen-decomposition of a Hermitian matrix; eigenvalues ascending, eigenvectors
/// as the matching columns.
pub fn herm_eig(m: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    let err = m.hermiticity_error();
    if err > 1e-10 * (1.0 + m.max_abs()) {
        return Err(Error::NotHermitian(err));
    }
    let h = m.hermitian_part();
    let eig = h.data.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let n = m.rows();
    let vectors = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok((values, ComplexMatrix { data: vectors, row_dims: m.row_dims.clone(), col_dims: vec![n] }))
}

/// Completes an isometry (orthonormal columns) to a unitary. The given columns
/// come first; each further column is the canonical basis vector with the largest
/// residual after projecting out the columns so far (smallest index on ties),
/// orthonormalised.
pub fn unitary_completion(iso: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (n, k) = iso.data.shape();
    if k > n {
        return Err(Error::NotIsometry(f64::INFINITY));
    }
    let gram = iso.data.adjoint() * &iso.data;
    let dev = (gram - DMatrix::<C64>::identity(k, k))
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if dev > 1e-10 {
        return Err(Error::NotIsometry(dev));
    }
    let mut cols: Vec<nalgebra::DVector<C64>> = (0..k).map(|j| iso.data.column(j).into_owned()).collect();
    while cols.len() < n {
        let mut best: Option<(usize, nalgebra::DVector<C64>, f64)> = None;
        for e in 0..n {
            let mut v = nalgebra::DVector::<C64>::zeros(n);
            v[e] = ONE;
            // two passes of classical Gram-Schmidt
            for _ in 0..2 {
                for c in &cols {
                    let proj = c.dotc(&v);
                    v -= c * proj;
                }
            }
            let norm = v.norm();
            let better = match &best {
                None => true,
                Some((_, _, bn)) => norm > *bn + 1e-12,
            };
            if better {
                best = Some((e, v, norm));
            }
        }
        let (_, v, norm) = best.expect("dimension is positive");
        cols.push(v / C64::new(norm, 0.0));
    }
    let data = DMatrix::from_columns(&cols);
    ComplexMatrix::new(data, iso.row_dims.clone(), iso.row_dims.clone())
}

/// Pauli and related single-qubit constants.
pub mod gates {
    use super::*;

    pub fn pauli_x() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
    }

    pub fn pauli_y() -> ComplexMatrix {
        ComplexMatrix::from_rows(&[vec![ZERO, -I], vec![I, ZERO]])
    }

    pub fn pauli_z() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]])
    }

    pub fn hadamard() -> ComplexMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        ComplexMatrix::from_real_rows(&[&[s, s], &[s, -s]])
    }

    pub fn identity2() -> ComplexMatrix {
        ComplexMatrix::identity(&[2])
    }

    /// `|+>` as a column vector.
    pub fn plus_ket() -> ComplexMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        ComplexMatrix::ket(&[C64::new(s, 0.0), C64::new(s, 0.0)], &[2]).unwrap()
    }

    /// Two-qubit C-NOT with the first qubit as control.
    pub fn cnot() -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(&[2, 2]);
        for (i, j) in [(0, 0), (1, 1), (2, 3), (3, 2)] {
            m.set(i, j, ONE);
        }
        m
    }

    /// `(|00> + |11>)/sqrt(2)`.
    pub fn phi_plus() -> ComplexMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        ComplexMatrix::ket(&[C64::new(s, 0.0), ZERO, ZERO, C64::new(s, 0.0)], &[2, 2]).unwrap()
    }
}
