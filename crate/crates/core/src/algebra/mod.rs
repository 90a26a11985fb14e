//! Unital *-algebras generated by finite sets of matrices: closure, commutant,
//! center, and the surjectivity and factoriality tests built on them.

mod closure;
mod reduced;

use serde::Serialize;

pub use closure::{close_with_letters, Ortho};
pub use reduced::{generated_algebra_reduced, ReducedAlgebra};

use crate::error::Result;
use crate::linalg::{hermitian_eigen, require_same_dim, tensor, Matrix, Tolerance};
use crate::scalar::{Real, C};

/// Closure passes allowed before giving up. Closure needs at most `k²` accepted
/// elements, and in practice a handful of passes, so hitting this bound means
/// the tolerances are misconfigured.
pub const MAX_PASSES: usize = 50;

/// Orthonormal (Hilbert–Schmidt) basis of a subspace of `M_k`.
#[derive(Debug, Clone, Serialize)]
#[serde(bound = "")]
pub struct AlgebraBasis<T: Real = f64> {
    pub ambient_dim: usize,
    pub basis: Vec<Matrix<T>>,
    /// For generated algebras, the monomial whose evaluation produced each basis
    /// direction, in discovery order (`g2*.g1` is `g2* · g1`, `I` the unit).
    /// Empty for commutants and centers.
    pub certificate: Vec<String>,
    pub passes: usize,
}

impl<T: Real> AlgebraBasis<T> {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient_dim * self.ambient_dim
    }

    /// Orthogonal projection onto the span.
    pub fn project(&self, x: &Matrix<T>) -> Matrix<T> {
        let mut out = Matrix::zeros(self.ambient_dim);
        for b in &self.basis {
            out.axpy(b.hs_inner(x), b);
        }
        out
    }

    /// Frobenius distance from `x` to the span.
    pub fn membership_residual(&self, x: &Matrix<T>) -> T {
        (x - &self.project(x)).frobenius_norm()
    }

    /// Largest deviation of the basis Gram matrix from the identity.
    pub fn gram_defect(&self) -> T {
        let mut worst = T::zero();
        for (i, a) in self.basis.iter().enumerate() {
            for (j, b) in self.basis.iter().enumerate() {
                let target = if i == j { T::one() } else { T::zero() };
                worst = worst.max((a.hs_inner(b) - C::new(target, T::zero())).norm());
            }
        }
        worst
    }
}

/// Generator letters for closure: each matrix, then its adjoint unless the
/// matrix is Hermitian within `tol.structural` (Frobenius).
pub(crate) fn letters_with_adjoints<T: Real>(
    gens: &[(String, Matrix<T>)],
    tol: &Tolerance<T>,
) -> Vec<(String, Matrix<T>)> {
    let mut out = Vec::with_capacity(2 * gens.len());
    for (name, g) in gens {
        out.push((name.clone(), g.clone()));
        let adj = g.adjoint();
        if (&adj - g).frobenius_norm() > tol.structural {
            out.push((format!("{name}*"), adj));
        }
    }
    out
}

fn labelled<T: Real>(gens: &[Matrix<T>]) -> Vec<(String, Matrix<T>)> {
    gens.iter().enumerate().map(|(i, g)| (format!("g{}", i + 1), g.clone())).collect()
}

/// Smallest unital *-algebra containing `gens`.
///
/// Seeds with the identity, then repeatedly left-multiplies the monomials found
/// in the previous pass by every generator and adjoint, keeping products that
/// are new directions. Stops when a pass adds nothing or the dimension reaches
/// `k²`.
pub fn generated_algebra<T: Real>(gens: &[Matrix<T>], tol: &Tolerance<T>) -> Result<AlgebraBasis<T>> {
    tol.validate()?;
    let k = require_same_dim(gens)?;
    let letters = letters_with_adjoints(&labelled(gens), tol);
    close_with_letters(k, &letters, tol)
}

/// Result of [`is_surjective`].
#[derive(Debug, Clone, Serialize)]
pub struct Surjectivity {
    pub surjective: bool,
    pub algebra_dim: usize,
    pub ambient_dim: usize,
    /// `k²` monomials with linearly independent evaluations, when surjective.
    pub certificate: Option<Vec<String>>,
}

/// Whether `gens` generate all of `M_k`, with a basis certificate when they do.
pub fn is_surjective<T: Real>(gens: &[Matrix<T>], tol: &Tolerance<T>) -> Result<Surjectivity> {
    let alg = generated_algebra(gens, tol)?;
    Ok(surjectivity_of(alg))
}

pub(crate) fn surjectivity_of<T: Real>(alg: AlgebraBasis<T>) -> Surjectivity {
    let surjective = alg.is_full();
    Surjectivity {
        surjective,
        algebra_dim: alg.dim(),
        ambient_dim: alg.ambient_dim,
        certificate: surjective.then_some(alg.certificate),
    }
}

/// `Σ_g ad_g* ad_g` on row-major vectorized `k × k` matrices, `ad_g X = gX − Xg`.
///
/// With `vec(gX) = (g ⊗ I) vec X` and `vec(Xg) = (I ⊗ gᵀ) vec X` this expands to
/// `Σ_g (g*g) ⊗ I + I ⊗ (gg*)ᵀ − g* ⊗ gᵀ − g ⊗ ḡ`.
fn commutator_gram<T: Real>(k: usize, gens: &[Matrix<T>]) -> Matrix<T> {
    let mut s1 = Matrix::<T>::zeros(k);
    let mut s2 = Matrix::<T>::zeros(k);
    let mut cross = Matrix::<T>::zeros(k * k);
    let minus = C::new(-T::one(), T::zero());
    for g in gens {
        let ga = g.adjoint();
        s1 = &s1 + &ga.matmul(g);
        s2 = &s2 + &g.matmul(&ga);
        cross.axpy(minus, &tensor(&ga, &g.transpose()));
        cross.axpy(minus, &tensor(g, &g.adjoint().transpose()));
    }
    let id = Matrix::identity(k);
    let mut l = tensor(&s1, &id);
    l = &l + &tensor(&id, &s2.transpose());
    &l + &cross
}

/// Commutant of `gens ∪ gens*` as the numerical kernel of the commutator map.
///
/// An eigenvector of `Σ ad_g* ad_g` belongs to the kernel when its eigenvalue is
/// at most `tol.rank · max(1, λ_max)`.
pub fn commutant<T: Real>(gens: &[Matrix<T>], tol: &Tolerance<T>) -> Result<AlgebraBasis<T>> {
    tol.validate()?;
    let k = require_same_dim(gens)?;
    let l = commutator_gram(k, gens);
    let (values, vectors) = hermitian_eigen(&l);
    let lmax = values.last().copied().unwrap_or(T::zero()).max(T::one());
    let cutoff = tol.rank * lmax;
    let mut basis = Vec::new();
    for (idx, &v) in values.iter().enumerate() {
        if v > cutoff {
            break;
        }
        basis.push(Matrix::from_vec_unchecked(k, vectors.column(idx)));
    }
    Ok(AlgebraBasis { ambient_dim: k, basis, certificate: Vec::new(), passes: 0 })
}

/// Commutant of `gens` and center of the algebra they generate.
///
/// The center `A ∩ A'` is computed as the commutant of `A ∪ A'`. When `A` is
/// all of `M_k` the center is the scalars and the `k⁴`-sized kernel problem
/// is skipped.
pub fn commutant_and_center<T: Real>(
    gens: &[Matrix<T>],
    tol: &Tolerance<T>,
) -> Result<(AlgebraBasis<T>, AlgebraBasis<T>)> {
    let comm = commutant(gens, tol)?;
    let alg = generated_algebra(gens, tol)?;
    let center = center_of(&alg, &comm, tol)?;
    Ok((comm, center))
}

fn center_of<T: Real>(alg: &AlgebraBasis<T>, comm: &AlgebraBasis<T>, tol: &Tolerance<T>) -> Result<AlgebraBasis<T>> {
    let k = alg.ambient_dim;
    if alg.is_full() || comm.dim() == 1 {
        return Ok(scalars(k));
    }
    let mut all: Vec<Matrix<T>> = alg.basis.clone();
    all.extend(comm.basis.iter().cloned());
    commutant(&all, tol)
}

fn scalars<T: Real>(k: usize) -> AlgebraBasis<T> {
    let unit = Matrix::identity(k).scale_real(T::one() / T::from_usize_lossy(k).sqrt());
    AlgebraBasis { ambient_dim: k, basis: vec![unit], certificate: Vec::new(), passes: 0 }
}

/// Center of the algebra generated by `gens`.
pub fn center<T: Real>(gens: &[Matrix<T>], tol: &Tolerance<T>) -> Result<AlgebraBasis<T>> {
    Ok(commutant_and_center(gens, tol)?.1)
}

/// Whether the generated algebra has trivial center.
pub fn is_factor<T: Real>(gens: &[Matrix<T>], tol: &Tolerance<T>) -> Result<bool> {
    Ok(center(gens, tol)?.dim() == 1)
}

/// Whether two bases span the same subspace: each basis lies in the other's
/// span within `tol` (Frobenius residual).
pub fn same_span<T: Real>(a: &AlgebraBasis<T>, b: &AlgebraBasis<T>, tol: T) -> bool {
    a.dim() == b.dim()
        && a.basis.iter().all(|x| b.membership_residual(x) <= tol)
        && b.basis.iter().all(|x| a.membership_residual(x) <= tol)
}

#[cfg(test)]
mod tests;
