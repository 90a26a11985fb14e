use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::decomp::{exp_i_hermitian, hermitian_eigenvalues, qr};
use super::{require_unitary, Matrix, Tolerance};
use crate::error::Result;
use crate::scalar::Real;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Matrix of i.i.d. standard complex Gaussians, `(N + iN)/√2`.
pub fn ginibre<T: Real>(k: usize, rng: &mut ChaCha8Rng) -> Matrix<T> {
    let s = T::lit(std::f64::consts::FRAC_1_SQRT_2);
    Matrix::from_fn(k, |_, _| Complex::new(T::standard_normal(rng) * s, T::standard_normal(rng) * s))
}

/// Haar-distributed unitary: QR of a Ginibre sample with the phases of `diag(R)`
/// moved into `Q`.
pub fn haar_unitary<T: Real>(k: usize, seed: u64) -> Matrix<T> {
    let mut rng = rng_from_seed(seed);
    let g = ginibre::<T>(k, &mut rng);
    let (mut q, r) = qr(&g);
    for j in 0..k {
        let d = r[(j, j)];
        let phase = if d.norm() == T::zero() { Complex::new(T::one(), T::zero()) } else { d / d.norm() };
        for i in 0..k {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Seeded random Hermitian matrix of operator norm one (zero for `k = 1` is
/// impossible: a 1×1 sample is normalized to `±1`).
pub fn random_hermitian<T: Real>(k: usize, seed: u64) -> Matrix<T> {
    let mut rng = rng_from_seed(seed);
    let g = ginibre::<T>(k, &mut rng);
    let h = (&g + &g.adjoint()).scale_real(T::lit(0.5));
    let evals = hermitian_eigenvalues(&h);
    let norm = evals.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    if norm == T::zero() {
        return Matrix::identity(k);
    }
    h.scale_real(T::one() / norm)
}

/// `u·exp(i·eps·H)` for a seeded Hermitian `H` with `‖H‖ = 1`, so the result is
/// unitary and within `eps` of `u` in operator norm.
pub fn perturb_unitary<T: Real>(u: &Matrix<T>, eps: T, seed: u64) -> Result<Matrix<T>> {
    require_unitary(u, &Tolerance::default())?;
    if eps == T::zero() {
        return Ok(u.clone());
    }
    let h = random_hermitian::<T>(u.dim(), seed);
    Ok(u.matmul(&exp_i_hermitian(&h, eps)))
}
