//! Dense complex matrices, the structured matrices used by the constructions,
//! norms, structure predicates and seeded random unitaries.

mod decomp;
mod matrix;
mod random;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

pub use decomp::{eigenvalues, exp_i_hermitian, hermitian_eigen, hermitian_eigenvalues, qr};
pub(crate) use matrix::{axpy_slice, hs_dot};
pub use matrix::{trace_of_product, Matrix};
pub use random::{ginibre, haar_unitary, perturb_unitary, random_hermitian, rng_from_seed};

use crate::error::{Error, Result};
use crate::scalar::{Real, C};

/// Numerical thresholds for structural checks and rank decisions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Tolerance<T: Real = f64> {
    pub structural: T,
    pub rank: T,
}

impl<T: Real> Default for Tolerance<T> {
    /// 1e-9 for both thresholds in double precision. Single precision cannot
    /// resolve that, so the default there is a thousand machine epsilons.
    fn default() -> Self {
        let v = T::lit(1e-9).max(T::epsilon() * T::lit(1e3));
        Self { structural: v, rank: v }
    }
}

impl<T: Real> Tolerance<T> {
    pub fn new(structural: T, rank: T) -> Result<Self> {
        let t = Self { structural, rank };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        let hi = T::lit(1e-2);
        for (name, v) in [("structural", self.structural), ("rank", self.rank)] {
            if !(v >= T::zero() && v <= hi) {
                return Err(Error::InvalidTolerance(format!("{name} = {v} outside [0, 1e-2]")));
            }
        }
        Ok(())
    }
}

/// The 0/1 matrices used by the generator lemma and the matrix-unit constructions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StandardKind {
    /// `E_ij`, 1-based.
    Unit(usize, usize),
    /// The cyclic permutation `C_n` sending basis vector `e_j` to `e_{j+1}`.
    Cycle,
    /// `U_{k,n} = I_k ⊕ C_{n-k}`.
    UBlock(usize),
    /// `V_{k,n} = C_k ⊕ I_{n-k}`.
    VBlock(usize),
    Identity,
}

fn cycle<T: Real>(n: usize) -> Matrix<T> {
    Matrix::from_fn(n, |i, j| if i == (j + 1) % n { C::one() } else { C::zero() })
}

pub fn standard_matrix<T: Real>(kind: StandardKind, n: usize) -> Result<Matrix<T>> {
    if n == 0 {
        return Err(Error::IndexOutOfRange("n must be at least 1".into()));
    }
    let m = match kind {
        StandardKind::Identity => Matrix::identity(n),
        StandardKind::Cycle => cycle(n),
        StandardKind::Unit(i, j) => {
            if i == 0 || j == 0 || i > n || j > n {
                return Err(Error::IndexOutOfRange(format!("unit({i},{j}) with n = {n}")));
            }
            unit(n, i - 1, j - 1)
        }
        StandardKind::UBlock(k) | StandardKind::VBlock(k) => {
            if k > n {
                return Err(Error::IndexOutOfRange(format!("block index {k} with n = {n}")));
            }
            let mut blocks = Vec::with_capacity(2);
            let (cyc, id) = match kind {
                StandardKind::UBlock(_) => (n - k, k),
                _ => (k, n - k),
            };
            let cyc_block = (cyc > 0).then(|| cycle::<T>(cyc));
            let id_block = (id > 0).then(|| Matrix::<T>::identity(id));
            if matches!(kind, StandardKind::UBlock(_)) {
                blocks.extend(id_block);
                blocks.extend(cyc_block);
            } else {
                blocks.extend(cyc_block);
                blocks.extend(id_block);
            }
            direct_sum(&blocks)?
        }
    };
    Ok(m)
}

/// `E_ij` in `M_n` with 0-based indices.
pub fn unit<T: Real>(n: usize, i: usize, j: usize) -> Matrix<T> {
    let mut m = Matrix::zeros(n);
    m[(i, j)] = C::one();
    m
}

/// Kronecker product; `a`'s index is the outer one.
pub fn tensor<T: Real>(a: &Matrix<T>, b: &Matrix<T>) -> Matrix<T> {
    let (p, q) = (a.dim(), b.dim());
    let n = p * q;
    let mut out = Matrix::zeros(n);
    let data = out.as_mut_slice();
    for ai in 0..p {
        for aj in 0..p {
            let x = a[(ai, aj)];
            if x.is_zero() {
                continue;
            }
            for bi in 0..q {
                let row = (ai * q + bi) * n + aj * q;
                for (bj, &y) in b.row(bi).iter().enumerate() {
                    data[row + bj] = x * y;
                }
            }
        }
    }
    out
}

/// Tensor product of several factors, left to right.
pub fn tensor_all<T: Real>(factors: &[&Matrix<T>]) -> Result<Matrix<T>> {
    let (first, rest) = factors.split_first().ok_or(Error::Empty("tensor factors"))?;
    Ok(rest.iter().fold((*first).clone(), |acc, f| tensor(&acc, f)))
}

/// Block-diagonal matrix with the given blocks.
pub fn direct_sum<T: Real>(blocks: &[Matrix<T>]) -> Result<Matrix<T>> {
    if blocks.is_empty() {
        return Err(Error::Empty("direct_sum blocks"));
    }
    let n: usize = blocks.iter().map(Matrix::dim).sum();
    let mut out = Matrix::zeros(n);
    let mut offset = 0;
    for b in blocks {
        for i in 0..b.dim() {
            for j in 0..b.dim() {
                out[(offset + i, offset + j)] = b[(i, j)];
            }
        }
        offset += b.dim();
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Structure {
    Unitary,
    Projection,
    PartialIsometry,
    Hermitian,
}

/// Largest operator-norm defect among the identities defining `kind`.
pub fn structure_defect<T: Real>(m: &Matrix<T>, kind: Structure) -> T {
    let id = Matrix::identity(m.dim());
    match kind {
        Structure::Unitary => {
            let a = (&m.adjoint().matmul(m) - &id).operator_norm();
            let b = (&m.matmul(&m.adjoint()) - &id).operator_norm();
            a.max(b)
        }
        Structure::Projection => {
            let sq = (&m.matmul(m) - m).operator_norm();
            sq.max((&m.adjoint() - m).operator_norm())
        }
        Structure::PartialIsometry => (&m.matmul(&m.adjoint()).matmul(m) - m).operator_norm(),
        Structure::Hermitian => (&m.adjoint() - m).operator_norm(),
    }
}

pub fn check_structure<T: Real>(m: &Matrix<T>, kind: Structure, tol: &Tolerance<T>) -> bool {
    structure_defect(m, kind) <= tol.structural
}

/// Error unless `m` is unitary within the structural tolerance.
pub(crate) fn require_unitary<T: Real>(m: &Matrix<T>, tol: &Tolerance<T>) -> Result<()> {
    let defect = structure_defect(m, Structure::Unitary);
    if defect <= tol.structural {
        Ok(())
    } else {
        Err(Error::NotUnitary { defect: defect.to_f64_lossy() })
    }
}

pub(crate) fn require_same_dim<T: Real>(ms: &[Matrix<T>]) -> Result<usize> {
    let first = ms.first().ok_or(Error::Empty("matrix list"))?.dim();
    for m in ms {
        if m.dim() != first {
            return Err(Error::DimensionMismatch { expected: first, found: m.dim() });
        }
    }
    Ok(first)
}

/// Orthonormal basis of the column space of `m` by column-pivoted Gram–Schmidt.
///
/// At each step the column with the largest remaining component is taken, ties
/// going to the lowest index, so an already-diagonal projection yields standard
/// basis vectors in their natural order. Stops once no column has a remaining
/// component above `threshold`.
pub fn range_basis<T: Real>(m: &Matrix<T>, threshold: T) -> Vec<Vec<C<T>>> {
    let k = m.dim();
    let mut cols: Vec<Vec<C<T>>> = (0..k).map(|j| m.column(j)).collect();
    let mut basis: Vec<Vec<C<T>>> = Vec::new();
    let mut used = vec![false; k];
    loop {
        let mut best: Option<(usize, T)> = None;
        for (j, c) in cols.iter().enumerate() {
            if used[j] {
                continue;
            }
            let nrm = c.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
            if best.is_none_or(|(_, b)| nrm > b) {
                best = Some((j, nrm));
            }
        }
        let Some((j, nrm)) = best else { break };
        if nrm <= threshold {
            break;
        }
        used[j] = true;
        let mut q = cols[j].clone();
        for b in &basis {
            let c = hs_dot(b, &q);
            axpy_slice(&mut q, -c, b);
        }
        let r = q.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        for z in q.iter_mut() {
            *z /= r;
        }
        for (jj, c) in cols.iter_mut().enumerate() {
            if !used[jj] {
                let coef = hs_dot(&q, c);
                axpy_slice(c, -coef, &q);
            }
        }
        basis.push(q);
    }
    basis
}
