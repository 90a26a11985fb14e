//! Closure relative to a system of matrix units.
//!
//! If the generators include matrix units `e_ij` (`n × n` of them, summing to the
//! identity) then the generated algebra is `A = Σ e_i1 B e_1j ≅ M_n(B)`, where
//! the corner `B = e_11 A e_11` is generated by the compressions
//! `e_1i g e_j1` of the generators. Working in the corner divides the vector
//! length by `n²` and the basis size by `n²`, which is what makes ambient
//! dimensions in the low hundreds tractable.

use serde::Serialize;

use super::{close_with_letters, AlgebraBasis, Ortho};
use crate::error::{Error, Result};
use crate::linalg::{range_basis, Matrix, Tolerance};
use crate::scalar::{Real, C};

/// A generated algebra stored through its corner.
#[derive(Debug, Clone, Serialize)]
#[serde(bound = "")]
pub struct ReducedAlgebra<T: Real = f64> {
    /// Size of the matrix-unit system.
    pub n: usize,
    pub ambient_dim: usize,
    /// The corner algebra inside `M_{k/n}`, in the coordinates of `range(e_11)`.
    pub corner: AlgebraBasis<T>,
    /// Name of each corner generator, `[e.1.i g e.j.1]`.
    pub corner_letters: Vec<String>,
    #[serde(skip)]
    unit_labels: Vec<String>,
    /// `W_i = e_i1 V` as `k × d` row-major blocks, `V` an orthonormal basis of `range(e_11)`.
    #[serde(skip)]
    frames: Vec<Vec<C<T>>>,
}

impl<T: Real> ReducedAlgebra<T> {
    pub fn corner_dim(&self) -> usize {
        self.ambient_dim / self.n
    }

    pub fn dim(&self) -> usize {
        self.n * self.n * self.corner.dim()
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient_dim * self.ambient_dim
    }

    /// `V* e_1i x e_j1 V`.
    pub fn compress(&self, x: &Matrix<T>, i: usize, j: usize) -> Matrix<T> {
        compress(x, &self.frames[i], &self.frames[j], self.ambient_dim, self.corner_dim())
    }

    /// Frobenius distance from `x` to the algebra.
    ///
    /// `x ↦ (V* e_1i x e_j1 V)_ij` is a unitary change of coordinates, so the
    /// squared distance is the sum of the blockwise squared distances to the corner.
    pub fn membership_residual(&self, x: &Matrix<T>) -> T {
        let mut acc = T::zero();
        for i in 0..self.n {
            for j in 0..self.n {
                let r = self.corner.membership_residual(&self.compress(x, i, j));
                acc += r * r;
            }
        }
        acc.sqrt()
    }

    /// Monomials whose evaluations form a basis of the full algebra:
    /// `e_a1 · w · e_1b` for each corner word `w`.
    pub fn certificate(&self) -> Vec<String> {
        let n = self.n;
        let mut out = Vec::with_capacity(self.dim());
        for a in 0..n {
            for b in 0..n {
                for w in &self.corner.certificate {
                    out.push(format!("{} {} {}", self.unit_labels[a * n], w, self.unit_labels[b]));
                }
            }
        }
        out
    }
}

fn compress<T: Real>(x: &Matrix<T>, wi: &[C<T>], wj: &[C<T>], k: usize, d: usize) -> Matrix<T> {
    // y = x · W_j  (k × d)
    let mut y = vec![C::new(T::zero(), T::zero()); k * d];
    for r in 0..k {
        let xrow = x.row(r);
        let yrow = &mut y[r * d..(r + 1) * d];
        for (s, &a) in xrow.iter().enumerate() {
            if a.re == T::zero() && a.im == T::zero() {
                continue;
            }
            for (yy, &w) in yrow.iter_mut().zip(&wj[s * d..(s + 1) * d]) {
                *yy += a * w;
            }
        }
    }
    // W_i* · y  (d × d)
    let mut out = Matrix::zeros(d);
    for r in 0..k {
        let wrow = &wi[r * d..(r + 1) * d];
        let yrow = &y[r * d..(r + 1) * d];
        for (a, &w) in wrow.iter().enumerate() {
            let wc = w.conj();
            if wc.re == T::zero() && wc.im == T::zero() {
                continue;
            }
            for (b, &yy) in yrow.iter().enumerate() {
                out[(a, b)] += wc * yy;
            }
        }
    }
    out
}

/// Algebra generated by `gens` together with the matrix units `units`
/// (row-major `e_ij`, `n²` entries), computed through the corner of `e_11`.
///
/// `unit_labels` names the units in certificates. The units must form a
/// matrix-unit system; only `Σ e_ii = I` and the rank of `e_11` are checked here.
pub fn generated_algebra_reduced<T: Real>(
    units: &[Matrix<T>],
    unit_labels: &[String],
    gens: &[(String, Matrix<T>)],
    tol: &Tolerance<T>,
) -> Result<ReducedAlgebra<T>> {
    tol.validate()?;
    let n = (units.len() as f64).sqrt().round() as usize;
    if n == 0 || n * n != units.len() || unit_labels.len() != units.len() {
        return Err(Error::NotMatrixUnits("expected n² units with n² labels".into()));
    }
    let k = units[0].dim();
    if !k.is_multiple_of(n) {
        return Err(Error::NotMatrixUnits(format!("dimension {k} not divisible by {n}")));
    }
    let d = k / n;
    for (_, g) in gens {
        if g.dim() != k {
            return Err(Error::DimensionMismatch { expected: k, found: g.dim() });
        }
    }
    let mut diag_sum = Matrix::<T>::zeros(k);
    for i in 0..n {
        diag_sum = &diag_sum + &units[i * n + i];
    }
    let defect = diag_sum.identity_defect();
    if defect > tol.structural * T::from_usize_lossy(k).max(T::one()) {
        return Err(Error::NotMatrixUnits(format!("sum of diagonal units deviates by {defect:e}")));
    }

    let v = range_basis(&units[0], T::lit(0.5));
    if v.len() != d {
        return Err(Error::RankMismatch { expected: d, found: v.len() });
    }
    let frames: Vec<Vec<C<T>>> = (0..n)
        .map(|i| {
            let ei1 = &units[i * n];
            let mut w = vec![C::new(T::zero(), T::zero()); k * d];
            for (b, vb) in v.iter().enumerate() {
                let col = ei1.matvec(vb);
                for r in 0..k {
                    w[r * d + b] = col[r];
                }
            }
            w
        })
        .collect();

    // Compressions of every generator and of its adjoint; keep a linearly
    // independent subset (together with the identity) as corner letters.
    let mut seen = Ortho::new(d * d, tol.rank);
    seen.try_add(Matrix::<T>::identity(d).as_slice());
    let mut letters: Vec<(String, Matrix<T>)> = Vec::new();
    for (name, g) in gens {
        for i in 0..n {
            for j in 0..n {
                let c = compress(g, &frames[i], &frames[j], k, d);
                let label = format!("[{} {} {}]", unit_labels[i], name, unit_labels[j * n]);
                if seen.try_add(c.as_slice()) {
                    letters.push((label.clone(), c.clone()));
                }
                let ca = c.adjoint();
                if seen.try_add(ca.as_slice()) {
                    letters.push((format!("{label}*"), ca));
                }
            }
        }
    }
    let corner = close_with_letters(d, &letters, tol)?;
    Ok(ReducedAlgebra {
        n,
        ambient_dim: k,
        corner,
        corner_letters: letters.into_iter().map(|(name, _)| name).collect(),
        unit_labels: unit_labels.to_vec(),
        frames,
    })
}
