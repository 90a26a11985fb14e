//! Finite-dimensional approximation: conjugate the f-family by a unitary close
//! to the identity until the representation generates `M_k`.

use rand::RngCore;
use serde::Serialize;

use super::MnMnRep;
use crate::error::{Error, Result};
use crate::freegroup::PerturbOptions;
use crate::linalg::{perturb_unitary, rng_from_seed, Matrix};
use crate::scalar::Real;
use crate::words::{monomial_ball, MomentReport};

#[derive(Debug, Clone, Serialize)]
#[serde(bound = "")]
pub struct FdApproxReport<T: Real = f64> {
    pub eps: T,
    /// Amplification factor applied before perturbing (1 if none).
    pub amplification: usize,
    /// Largest operator-norm distance between a perturbed and an original f-unit.
    pub achieved_generator_distance: T,
    pub surjective: bool,
    pub algebra_dim: usize,
    pub ambient_dim: usize,
    pub tries_used: usize,
    pub seed_used: u64,
    /// Perturbed against unperturbed, over monomials of length at most `radius`.
    pub moment_report: MomentReport<T>,
}

/// Replace `f_ij` by `U f_ij U*` with `‖U − I‖ ≤ eps` (seeded) until the
/// representation is surjective. Each f-unit moves by at most `2 eps`, so a
/// monomial with `m` f-letters moves by at most `2 m eps`.
///
/// Exhausting the attempts returns the last candidate with `surjective = false`.
pub fn perturb_f_to_surjective<T: Real>(
    rep: &MnMnRep<T>,
    eps: T,
    seed: u64,
    opts: &PerturbOptions<T>,
) -> Result<(MnMnRep<T>, FdApproxReport<T>)> {
    if !(eps >= T::zero()) {
        return Err(Error::Unsupported(format!("eps must be nonnegative, got {eps}")));
    }
    if opts.max_tries == 0 {
        return Err(Error::Unsupported("max_tries must be positive".into()));
    }
    let k = rep.k();
    let n = rep.n();
    let mut seeds = rng_from_seed(seed);
    let mut last = None;
    for attempt in 1..=opts.max_tries {
        let try_seed = seeds.next_u64();
        let u = perturb_unitary(&Matrix::<T>::identity(k), eps, try_seed)?;
        let ua = u.adjoint();
        let f = rep.f_units().iter().map(|x| u.matmul(x).matmul(&ua)).collect();
        let candidate = MnMnRep::from_parts(n, rep.e_units().to_vec(), f)?;
        let alg = candidate.generated_algebra(&opts.tol)?;
        let done = alg.is_full();
        last = Some((candidate, alg.dim(), attempt, try_seed));
        if done {
            break;
        }
    }
    let (out, algebra_dim, tries_used, seed_used) = last.expect("max_tries >= 1");
    let mut achieved = T::zero();
    let mut dists = Vec::new();
    for j in 0..n {
        let (a, b) = (out.f(0, j), rep.f(0, j));
        achieved = achieved.max(a.distance(b));
        if j > 0 {
            dists.push((a - b).trace_norm());
        }
    }
    let words = monomial_ball(n, opts.radius);
    let moment_report = MomentReport::compare(&out, rep, &words, dists)?;
    let report = FdApproxReport {
        eps,
        amplification: 1,
        achieved_generator_distance: achieved,
        surjective: algebra_dim == k * k,
        algebra_dim,
        ambient_dim: k,
        tries_used,
        seed_used,
        moment_report,
    };
    Ok((out, report))
}

/// Amplify `x ↦ x ⊗ I_m`, then perturb to a surjective representation.
///
/// The moment report compares with the unamplified input, whose trace is the
/// same as that of the amplification.
pub fn amplify_and_perturb<T: Real>(
    rep: &MnMnRep<T>,
    m: usize,
    eps: T,
    seed: u64,
    opts: &PerturbOptions<T>,
) -> Result<(MnMnRep<T>, FdApproxReport<T>)> {
    let big = rep.amplify(m)?;
    let (out, mut report) = perturb_f_to_surjective(&big, eps, seed, opts)?;
    report.amplification = m;
    Ok((out, report))
}
