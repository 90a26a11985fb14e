//! Finite instances of the two generation lemmas behind the perturbation.

use crate::algebra::{generated_algebra, AlgebraBasis};
use crate::error::{Error, Result};
use crate::linalg::{tensor, unit, Matrix, Tolerance};
use crate::scalar::Real;

/// Algebra generated by the corner `q M_k q` (rank-`q_rank` diagonal `q`)
/// together with a partial isometry `v`, `v*v = 1 − q`, `vv* ≤ q`.
///
/// Needs `k − q_rank ≤ q_rank`; the result is all of `M_k`.
pub fn corner_with_isometry_algebra<T: Real>(k: usize, q_rank: usize, tol: &Tolerance<T>) -> Result<AlgebraBasis<T>> {
    if q_rank == 0 || q_rank > k || 2 * q_rank < k {
        return Err(Error::Unsupported(format!("need k/2 <= rank(q) <= k, got k = {k}, rank = {q_rank}")));
    }
    let mut gens = Vec::new();
    for i in 0..q_rank {
        for j in 0..q_rank {
            gens.push(unit::<T>(k, i, j));
        }
    }
    let mut v = Matrix::<T>::zeros(k);
    for s in 0..k - q_rank {
        v = &v + &unit(k, s, q_rank + s);
    }
    gens.push(v);
    generated_algebra(&gens, tol)
}

/// Algebra generated by `M_a ⊗ 1` and `E_11 ⊗ M_b` inside `M_a ⊗ M_b`; the
/// result is all of `M_{ab}`.
pub fn tensor_corner_algebra<T: Real>(a: usize, b: usize, tol: &Tolerance<T>) -> Result<AlgebraBasis<T>> {
    if a == 0 || b == 0 {
        return Err(Error::Empty("tensor factor"));
    }
    let ib = Matrix::<T>::identity(b);
    let p = unit::<T>(a, 0, 0);
    let mut gens = Vec::new();
    for i in 0..a {
        for j in 0..a {
            gens.push(tensor(&unit(a, i, j), &ib));
        }
    }
    for i in 0..b {
        for j in 0..b {
            gens.push(tensor(&p, &unit(b, i, j)));
        }
    }
    generated_algebra(&gens, tol)
}
