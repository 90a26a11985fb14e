use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::{cr, Real, C};

/// Dense square complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct Matrix<T: Real = f64> {
    dim: usize,
    data: Vec<C<T>>,
}

impl<T: Real> Matrix<T> {
    /// Builds a matrix from row-major entries, checking shape and finiteness.
    pub fn from_vec(dim: usize, data: Vec<C<T>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidMatrix("dimension must be positive".into()));
        }
        if data.len() != dim * dim {
            return Err(Error::InvalidMatrix(format!(
                "{} entries for dimension {dim}",
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidMatrix("non-finite entry".into()));
        }
        Ok(Self { dim, data })
    }

    pub(crate) fn from_vec_unchecked(dim: usize, data: Vec<C<T>>) -> Self {
        debug_assert_eq!(data.len(), dim * dim);
        Self { dim, data }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![C::zero(); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_diag(&vec![C::one(); dim])
    }

    pub fn from_diag(diag: &[C<T>]) -> Self {
        let dim = diag.len();
        let mut m = Self::zeros(dim);
        for (i, &z) in diag.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    /// Real matrix from nested rows, e.g. `&[&[0.0, 1.0], &[1.0, 0.0]]`.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::InvalidMatrix("rows must form a square".into()));
            }
            data.extend(row.iter().map(|&x| cr(T::lit(x))));
        }
        Self::from_vec(dim, data)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn as_slice(&self) -> &[C<T>] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [C<T>] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<C<T>> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[C<T>] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn column(&self, j: usize) -> Vec<C<T>> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: C<T>) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|&z| z * s).collect() }
    }

    pub fn scale_real(&self, s: T) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|&z| z * s).collect() }
    }

    /// `self += s * other`.
    pub fn axpy(&mut self, s: C<T>, other: &Self) {
        assert_eq!(self.dim, other.dim, "axpy dimension mismatch");
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "matmul dimension mismatch");
        let n = self.dim;
        let mut out = vec![C::zero(); n * n];
        for i in 0..n {
            let orow = &mut out[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                let brow = &other.data[k * n..(k + 1) * n];
                for (o, &b) in orow.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        Self { dim: n, data: out }
    }

    pub fn matvec(&self, v: &[C<T>]) -> Vec<C<T>> {
        assert_eq!(self.dim, v.len());
        (0..self.dim)
            .map(|i| self.row(i).iter().zip(v).fold(C::zero(), |acc, (&a, &b)| acc + a * b))
            .collect()
    }

    pub fn trace(&self) -> C<T> {
        (0..self.dim).fold(C::zero(), |acc, i| acc + self[(i, i)])
    }

    /// `(1/dim) Σ m[i][i]`.
    pub fn normalized_trace(&self) -> C<T> {
        self.trace() / T::from_usize_lossy(self.dim)
    }

    /// Frobenius (Hilbert–Schmidt) norm.
    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    /// `τ(m* m)^{1/2}` for the normalized trace τ; Frobenius norm over `sqrt(dim)`.
    pub fn trace_norm(&self) -> T {
        self.frobenius_norm() / T::from_usize_lossy(self.dim).sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    /// Hilbert–Schmidt inner product `Σ conj(a_ij) b_ij`, conjugate-linear in `self`.
    pub fn hs_inner(&self, other: &Self) -> C<T> {
        hs_dot(&self.data, &other.data)
    }

    /// Operator norm: the largest singular value.
    pub fn operator_norm(&self) -> T {
        let gram = self.adjoint().matmul(self);
        let evals = super::decomp::hermitian_eigenvalues(&gram);
        evals.last().copied().unwrap_or_else(T::zero).max(T::zero()).sqrt()
    }

    pub fn distance(&self, other: &Self) -> T {
        (self - other).operator_norm()
    }

    /// Square block `(bi, bj)` of side `size` in a block partition of the matrix.
    pub fn block(&self, bi: usize, bj: usize, size: usize) -> Self {
        assert!(size > 0 && self.dim.is_multiple_of(size) && (bi + 1) * size <= self.dim && (bj + 1) * size <= self.dim);
        Self::from_fn(size, |i, j| self[(bi * size + i, bj * size + j)])
    }

    pub fn set_block(&mut self, bi: usize, bj: usize, block: &Self) {
        let size = block.dim;
        for i in 0..size {
            for j in 0..size {
                self[(bi * size + i, bj * size + j)] = block[(i, j)];
            }
        }
    }

    /// View `self` as an `outer × outer` block matrix and apply `f` to every block.
    ///
    /// All blocks must map to matrices of one common side length. Used to push a
    /// map `N → N'` through the left tensor factor of `M_outer ⊗ N`.
    pub fn map_blocks(&self, outer: usize, mut f: impl FnMut(&Self) -> Self) -> Self {
        assert!(outer > 0 && self.dim.is_multiple_of(outer), "outer size must divide dim");
        let inner = self.dim / outer;
        let mut out: Option<Self> = None;
        for bi in 0..outer {
            for bj in 0..outer {
                let mapped = f(&self.block(bi, bj, inner));
                let target = out.get_or_insert_with(|| Self::zeros(outer * mapped.dim));
                assert_eq!(target.dim, outer * mapped.dim, "block images must share a size");
                target.set_block(bi, bj, &mapped);
            }
        }
        out.expect("outer > 0")
    }

    /// Largest entrywise deviation from the identity.
    pub fn identity_defect(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.dim {
            for j in 0..self.dim {
                let target = if i == j { C::one() } else { C::zero() };
                worst = worst.max((self[(i, j)] - target).norm());
            }
        }
        worst
    }

    pub fn cast<U: Real>(&self) -> Matrix<U> {
        Matrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .map(|z| Complex::new(U::lit(z.re.to_f64_lossy()), U::lit(z.im.to_f64_lossy())))
                .collect(),
        }
    }
}

/// `Σ conj(a_i) b_i`, unrolled so the compiler can keep four accumulators busy.
#[inline]
pub(crate) fn hs_dot<T: Real>(a: &[C<T>], b: &[C<T>]) -> C<T> {
    debug_assert_eq!(a.len(), b.len());
    let (mut r0, mut r1, mut i0, mut i1) = (T::zero(), T::zero(), T::zero(), T::zero());
    let mut ca = a.chunks_exact(2);
    let mut cb = b.chunks_exact(2);
    for (x, y) in (&mut ca).zip(&mut cb) {
        r0 += x[0].re * y[0].re + x[0].im * y[0].im;
        i0 += x[0].re * y[0].im - x[0].im * y[0].re;
        r1 += x[1].re * y[1].re + x[1].im * y[1].im;
        i1 += x[1].re * y[1].im - x[1].im * y[1].re;
    }
    for (x, y) in ca.remainder().iter().zip(cb.remainder()) {
        r0 += x.re * y.re + x.im * y.im;
        i0 += x.re * y.im - x.im * y.re;
    }
    Complex::new(r0 + r1, i0 + i1)
}

/// `y += s * x`.
#[inline]
pub(crate) fn axpy_slice<T: Real>(y: &mut [C<T>], s: C<T>, x: &[C<T>]) {
    for (a, &b) in y.iter_mut().zip(x) {
        *a += s * b;
    }
}

/// `tr(a b) = Σ_ij a_ij b_ji` without forming the product.
pub fn trace_of_product<T: Real>(a: &Matrix<T>, b: &Matrix<T>) -> C<T> {
    assert_eq!(a.dim, b.dim, "trace_of_product dimension mismatch");
    let n = a.dim;
    let mut acc = C::zero();
    for i in 0..n {
        let arow = a.row(i);
        for (j, &x) in arow.iter().enumerate() {
            acc += x * b.data[j * n + i];
        }
    }
    acc
}

impl<T: Real> Index<(usize, usize)> for Matrix<T> {
    type Output = C<T>;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C<T> {
        &self.data[i * self.dim + j]
    }
}

impl<T: Real> IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C<T> {
        &mut self.data[i * self.dim + j]
    }
}

impl<T: Real> Add for &Matrix<T> {
    type Output = Matrix<T>;
    fn add(self, rhs: Self) -> Matrix<T> {
        assert_eq!(self.dim, rhs.dim, "add dimension mismatch");
        Matrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a + b).collect(),
        }
    }
}

impl<T: Real> Sub for &Matrix<T> {
    type Output = Matrix<T>;
    fn sub(self, rhs: Self) -> Matrix<T> {
        assert_eq!(self.dim, rhs.dim, "sub dimension mismatch");
        Matrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a - b).collect(),
        }
    }
}

impl<T: Real> Mul for &Matrix<T> {
    type Output = Matrix<T>;
    fn mul(self, rhs: Self) -> Matrix<T> {
        self.matmul(rhs)
    }
}

impl<T: Real> Neg for &Matrix<T> {
    type Output = Matrix<T>;
    fn neg(self) -> Matrix<T> {
        Matrix { dim: self.dim, data: self.data.iter().map(|&z| -z).collect() }
    }
}

impl<T: Real> Add for Matrix<T> {
    type Output = Matrix<T>;
    fn add(self, rhs: Self) -> Matrix<T> {
        &self + &rhs
    }
}

impl<T: Real> Sub for Matrix<T> {
    type Output = Matrix<T>;
    fn sub(self, rhs: Self) -> Matrix<T> {
        &self - &rhs
    }
}

impl<T: Real> Mul for Matrix<T> {
    type Output = Matrix<T>;
    fn mul(self, rhs: Self) -> Matrix<T> {
        self.matmul(&rhs)
    }
}

impl<T: Real> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = self
                .row(i)
                .iter()
                .map(|z| format!("{:+.4}{:+.4}i", z.re, z.im))
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr<T> {
    dim: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> Serialize for Matrix<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Ref<'a, T> {
            dim: usize,
            data: &'a [Complex<T>],
        }
        Ref { dim: self.dim, data: &self.data }.serialize(serializer)
    }
}

impl<'de, T: Real> Deserialize<'de> for Matrix<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = MatrixRepr::<T>::deserialize(deserializer)?;
        Matrix::from_vec(repr.dim, repr.data).map_err(D::Error::custom)
    }
}
