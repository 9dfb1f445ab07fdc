//! Dense complex matrix algebra over tensor-product spaces.
//!
//! Subsystem index 0 is the leftmost (most significant) tensor factor: the row
//! or column index of a full matrix is the mixed-radix encoding of the
//! per-subsystem digits, `index = sum_k digit_k * prod_{j>k} d_j`.

use std::fmt;
use std::ops::{Add, Index, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for accepting a matrix as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-9;

/// Largest matrix order the toolkit will build.
pub const MAX_ORDER: usize = 1024;

/// Dense square matrix of complex entries, stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "matrix order must be positive");
        Self {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| {
            if i == j {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    /// `I / dim`, the maximally mixed state of the given order.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self::identity(dim).scale(1.0 / dim as f64)
    }

    /// Builds a matrix entry by entry. Panics if `f` produces a non-finite entry.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        assert!(dim > 0, "matrix order must be positive");
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self::from_data(dim, data).expect("from_fn produced a non-finite entry")
    }

    /// Wraps a row-major buffer, checking shape and finiteness.
    pub fn from_data(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Dimension("matrix order must be positive".into()));
        }
        if data.len() != dim * dim {
            return Err(Error::Dimension(format!(
                "expected {} entries for order {dim}, got {}",
                dim * dim,
                data.len()
            )));
        }
        if let Some(pos) = data
            .iter()
            .position(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(Error::NonFinite {
                row: pos / dim,
                col: pos % dim,
            });
        }
        Ok(Self { dim, data })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        Self::from_fn(diag.len(), |i, j| {
            if i == j {
                Complex64::new(diag[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    /// Outer product `|v><v|`.
    pub fn outer(v: &[Complex64]) -> Self {
        Self::from_fn(v.len(), |i, j| v[i] * v[j].conj())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn scale_complex(&self, factor: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i).conj())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Frobenius norm `sqrt(sum |a_ij|^2)`.
    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `max |a[i,j] - conj(a[j,i])|`.
    pub fn hermiticity_deviation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    pub fn check_hermitian(&self) -> Result<()> {
        let deviation = self.hermiticity_deviation();
        if deviation > HERMITIAN_TOL {
            Err(Error::Hermiticity { deviation })
        } else {
            Ok(())
        }
    }

    fn check_same_order(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::Dimension(format!(
                "orders differ: {} vs {}",
                self.dim, other.dim
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same_order(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_same_order(other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_same_order(other)?;
        let n = self.dim;
        let mut out = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let row = &other.data[k * n..(k + 1) * n];
                for (o, b) in out[i * n..(i + 1) * n].iter_mut().zip(row) {
                    *o += a * b;
                }
            }
        }
        Ok(Self { dim: n, data: out })
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        }
    }

    /// Hilbert–Schmidt inner product `Tr(a^dagger b)`.
    pub fn hs_inner(&self, other: &Self) -> Result<Complex64> {
        self.check_same_order(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `Tr(a^2)`; equals the purity for density matrices.
    pub fn purity(&self) -> f64 {
        // Tr(A A) = sum_ij A_ij A_ji
        let n = self.dim;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                acc += self.get(i, j) * self.get(j, i);
            }
        }
        acc.re
    }

    /// Kronecker product; entry `(i*db + k, j*db + l)` is `a[i,j] * b[k,l]`.
    pub fn kron(&self, other: &Self) -> Self {
        let db = other.dim;
        Self::from_fn(self.dim * db, |r, c| {
            self.get(r / db, c / db) * other.get(r % db, c % db)
        })
    }

    /// Traces out the subsystems listed in `traced`.
    ///
    /// The result lives on the remaining subsystems in their original order.
    /// Tracing every subsystem is rejected; use [`ComplexMatrix::trace`].
    pub fn partial_trace(&self, dims: &SubsystemDims, traced: &[usize]) -> Result<Self> {
        dims.check_order(self.dim)?;
        let traced = dims.normalize_set(traced)?;
        if traced.len() == dims.len() {
            return Err(Error::InvalidPartition(
                "cannot trace out every subsystem; use trace()".into(),
            ));
        }
        let kept: Vec<usize> = (0..dims.len()).filter(|k| !traced.contains(k)).collect();
        let kept_dims: Vec<usize> = kept.iter().map(|&k| dims.0[k]).collect();
        let traced_dims: Vec<usize> = traced.iter().map(|&k| dims.0[k]).collect();
        let out_dim: usize = kept_dims.iter().product();

        // split every full index into (kept index, traced index)
        let split: Vec<(usize, usize)> = (0..self.dim)
            .map(|idx| {
                let digits = dims.digits(idx);
                let k = encode(&kept_dims, kept.iter().map(|&s| digits[s]));
                let t = encode(&traced_dims, traced.iter().map(|&s| digits[s]));
                (k, t)
            })
            .collect();

        let mut out = vec![Complex64::new(0.0, 0.0); out_dim * out_dim];
        for (i, &(ki, ti)) in split.iter().enumerate() {
            for (j, &(kj, tj)) in split.iter().enumerate() {
                if ti == tj {
                    out[ki * out_dim + kj] += self.get(i, j);
                }
            }
        }
        Self::from_data(out_dim, out)
    }

    /// Transposes the row and column digits of the listed subsystems.
    pub fn partial_transpose(&self, dims: &SubsystemDims, transposed: &[usize]) -> Result<Self> {
        dims.check_order(self.dim)?;
        let set = dims.normalize_set(transposed)?;
        let n = self.dim;
        let digits: Vec<Vec<usize>> = (0..n).map(|i| dims.digits(i)).collect();
        let mut out = vec![Complex64::new(0.0, 0.0); n * n];
        let (mut ri, mut cj) = (vec![0; dims.len()], vec![0; dims.len()]);
        for i in 0..n {
            for j in 0..n {
                ri.copy_from_slice(&digits[i]);
                cj.copy_from_slice(&digits[j]);
                for &s in &set {
                    std::mem::swap(&mut ri[s], &mut cj[s]);
                }
                out[dims.encode(&ri) * n + dims.encode(&cj)] = self.get(i, j);
            }
        }
        Self::from_data(n, out)
    }

    /// Reorders tensor factors: subsystem `k` of the result is subsystem
    /// `order[k]` of `self`. Returns the permuted matrix and its dims.
    pub fn permute_subsystems(
        &self,
        dims: &SubsystemDims,
        order: &[usize],
    ) -> Result<(Self, SubsystemDims)> {
        dims.check_order(self.dim)?;
        let mut seen = vec![false; dims.len()];
        if order.len() != dims.len()
            || order
                .iter()
                .any(|&k| k >= dims.len() || std::mem::replace(&mut seen[k], true))
        {
            return Err(Error::InvalidPartition(format!(
                "{order:?} is not a permutation of 0..{}",
                dims.len()
            )));
        }
        let new_dims = SubsystemDims(order.iter().map(|&k| dims.0[k]).collect());
        let map: Vec<usize> = (0..self.dim)
            .map(|idx| {
                let digits = dims.digits(idx);
                new_dims.encode(&order.iter().map(|&k| digits[k]).collect::<Vec<_>>())
            })
            .collect();
        let n = self.dim;
        let mut out = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                out[map[i] * n + map[j]] = self.get(i, j);
            }
        }
        Ok((Self::from_data(n, out)?, new_dims))
    }

    fn to_nalgebra_hermitian(&self) -> DMatrix<Complex64> {
        // average with the adjoint so the solver sees an exactly Hermitian input
        DMatrix::from_fn(self.dim, self.dim, |i, j| {
            (self.get(i, j) + self.get(j, i).conj()) * 0.5
        })
    }

    /// Real eigenvalues of a Hermitian matrix, ascending.
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<f64>> {
        self.check_hermitian()?;
        let eig = self.to_nalgebra_hermitian().symmetric_eigen();
        let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        values.sort_by(f64::total_cmp);
        Ok(values)
    }

    /// Eigenpairs of a Hermitian matrix, ascending by eigenvalue. Each
    /// eigenvector is a unit-norm column.
    pub fn hermitian_eigen(&self) -> Result<Vec<(f64, Vec<Complex64>)>> {
        self.check_hermitian()?;
        let eig = self.to_nalgebra_hermitian().symmetric_eigen();
        let mut pairs: Vec<(f64, Vec<Complex64>)> = eig
            .eigenvalues
            .iter()
            .enumerate()
            .map(|(k, &l)| (l, eig.eigenvectors.column(k).iter().copied().collect()))
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(pairs)
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim, "vector length must match matrix order");
        (0..self.dim)
            .map(|i| {
                self.data[i * self.dim..(i + 1) * self.dim]
                    .iter()
                    .zip(v)
                    .map(|(a, x)| a * x)
                    .sum()
            })
            .collect()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (row, col): (usize, usize)) -> &Complex64 {
        &self.data[row * self.dim + col]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_add(rhs).expect("matrix orders differ")
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_sub(rhs).expect("matrix orders differ")
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_mul(rhs).expect("matrix orders differ")
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{}) [", self.dim, self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for j in 0..self.dim {
                let z = self.get(i, j);
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Hilbert–Schmidt distance `sqrt(Tr((a - b)^2))` between Hermitian matrices.
pub fn hs_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    a.check_hermitian()?;
    b.check_hermitian()?;
    // for Hermitian a - b, Tr((a-b)^2) is the squared Frobenius norm
    Ok(a.try_sub(b)?.frobenius_norm())
}

/// Ordered local dimensions of a tensor-product space.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct SubsystemDims(Vec<usize>);

impl SubsystemDims {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::Dimension(
                "at least one subsystem is required".into(),
            ));
        }
        if let Some(&d) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::Dimension(format!(
                "local dimensions must be at least 2, got {d}"
            )));
        }
        let total = dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .ok_or_else(|| Error::Size(format!("product of {dims:?} overflows")))?;
        if total > MAX_ORDER {
            return Err(Error::Size(format!(
                "total dimension {total} exceeds {MAX_ORDER}"
            )));
        }
        Ok(Self(dims))
    }

    /// `n` copies of local dimension `d`.
    pub fn uniform(n: usize, d: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Dimension(
                "at least one subsystem is required".into(),
            ));
        }
        if d < 2 {
            return Err(Error::Dimension(format!(
                "local dimensions must be at least 2, got {d}"
            )));
        }
        match (d as u64).checked_pow(n as u32) {
            Some(total) if total <= MAX_ORDER as u64 => Self::new(vec![d; n]),
            _ => Err(Error::Size(format!("{d}^{n} exceeds {MAX_ORDER}"))),
        }
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Product of the local dimensions.
    pub fn total(&self) -> usize {
        self.0.iter().product()
    }

    /// Product of the local dimensions of the listed subsystems.
    pub fn total_of(&self, subsystems: &[usize]) -> usize {
        subsystems.iter().map(|&k| self.0[k]).product()
    }

    /// Dims of the listed subsystems, in the given order.
    pub fn select(&self, subsystems: &[usize]) -> Result<Self> {
        Self::new(subsystems.iter().map(|&k| self.0[k]).collect())
    }

    pub fn concat(&self, other: &Self) -> Result<Self> {
        let mut dims = self.0.clone();
        dims.extend_from_slice(&other.0);
        Self::new(dims)
    }

    /// The common local dimension, if every subsystem has the same one.
    pub fn uniform_local_dim(&self) -> Option<usize> {
        let d = self.0[0];
        self.0.iter().all(|&x| x == d).then_some(d)
    }

    pub(crate) fn check_order(&self, order: usize) -> Result<()> {
        if self.total() != order {
            return Err(Error::Dimension(format!(
                "dims {:?} multiply to {}, matrix order is {order}",
                self.0,
                self.total()
            )));
        }
        Ok(())
    }

    /// Sorted, deduplicated copy of a subsystem index set, range-checked.
    pub(crate) fn normalize_set(&self, set: &[usize]) -> Result<Vec<usize>> {
        let mut out = set.to_vec();
        out.sort_unstable();
        out.dedup();
        if let Some(&bad) = out.iter().find(|&&k| k >= self.len()) {
            return Err(Error::InvalidPartition(format!(
                "subsystem index {bad} out of range for {} subsystems",
                self.len()
            )));
        }
        Ok(out)
    }

    /// Mixed-radix digits of a full index, most significant first.
    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut digits = vec![0; self.0.len()];
        for (slot, &d) in digits.iter_mut().zip(&self.0).rev() {
            *slot = index % d;
            index /= d;
        }
        digits
    }

    pub fn encode(&self, digits: &[usize]) -> usize {
        encode(&self.0, digits.iter().copied())
    }
}

fn encode(dims: &[usize], digits: impl Iterator<Item = usize>) -> usize {
    dims.iter().zip(digits).fold(0, |acc, (&d, x)| acc * d + x)
}

impl TryFrom<Vec<usize>> for SubsystemDims {
    type Error = Error;

    fn try_from(dims: Vec<usize>) -> Result<Self> {
        Self::new(dims)
    }
}

impl From<SubsystemDims> for Vec<usize> {
    fn from(dims: SubsystemDims) -> Self {
        dims.0
    }
}

/// On-disk matrix format: `{"dim", "dims"?, "re", "im"}`, rows outermost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixRecord {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dims: Option<Vec<usize>>,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixRecord {
    pub fn from_matrix(m: &ComplexMatrix, dims: Option<&SubsystemDims>) -> Self {
        let rows = |f: fn(&Complex64) -> f64| -> Vec<Vec<f64>> {
            (0..m.dim)
                .map(|i| (0..m.dim).map(|j| f(&m.get(i, j))).collect())
                .collect()
        };
        Self {
            dim: m.dim,
            dims: dims.map(|d| d.0.clone()),
            re: rows(|z| z.re),
            im: rows(|z| z.im),
        }
    }

    /// Checks shape consistency and returns the matrix plus optional dims.
    pub fn into_matrix(self) -> Result<(ComplexMatrix, Option<SubsystemDims>)> {
        let n = self.dim;
        if n == 0 {
            return Err(Error::Format("dim must be positive".into()));
        }
        for (name, part) in [("re", &self.re), ("im", &self.im)] {
            if part.len() != n || part.iter().any(|row| row.len() != n) {
                return Err(Error::Format(format!("\"{name}\" must be a {n}x{n} array")));
            }
        }
        let data = self
            .re
            .iter()
            .flatten()
            .zip(self.im.iter().flatten())
            .map(|(&re, &im)| Complex64::new(re, im))
            .collect();
        let matrix = ComplexMatrix::from_data(n, data)?;
        let dims = match self.dims {
            Some(d) => {
                let dims = SubsystemDims::new(d)?;
                dims.check_order(n)?;
                Some(dims)
            }
            None => None,
        };
        Ok((matrix, dims))
    }
}

/// Serializes a matrix in the JSON wire format.
pub fn matrix_to_json(m: &ComplexMatrix, dims: Option<&SubsystemDims>) -> String {
    serde_json::to_string(&MatrixRecord::from_matrix(m, dims)).expect("matrix record serializes")
}

/// Parses the JSON wire format.
pub fn matrix_from_json(text: &str) -> Result<(ComplexMatrix, Option<SubsystemDims>)> {
    let record: MatrixRecord =
        serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    record.into_matrix()
}
