//! Finite-dimensional unitary representations of free groups, their direct
//! sums, and the midpoint approximation by surjective (factor) representations.

use num_integer::Integer;
use rand::RngCore;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra::{is_factor, is_surjective};
use crate::error::{Error, Result};
use crate::linalg::{direct_sum, perturb_unitary, require_unitary, rng_from_seed, Matrix, Tolerance};
use crate::scalar::{Real, C};
use crate::words::{ball, moment_vector, GroupWord, Letter, MomentReport, Representation};

/// Default word length for free-group moment comparisons.
pub const DEFAULT_RADIUS: usize = 4;
/// Default number of perturbation attempts before reporting failure.
pub const DEFAULT_MAX_TRIES: usize = 32;

/// `d` unitaries of a common dimension `k`: a representation of `F_d`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryTuple<T: Real = f64> {
    unitaries: Vec<Matrix<T>>,
    adjoints: Vec<Matrix<T>>,
}

impl<T: Real> UnitaryTuple<T> {
    pub fn new(unitaries: Vec<Matrix<T>>, tol: &Tolerance<T>) -> Result<Self> {
        let first = unitaries.first().ok_or(Error::Empty("unitary tuple"))?.dim();
        for u in &unitaries {
            if u.dim() != first {
                return Err(Error::DimensionMismatch { expected: first, found: u.dim() });
            }
            require_unitary(u, tol)?;
        }
        Ok(Self::new_unchecked(unitaries))
    }

    pub(crate) fn new_unchecked(unitaries: Vec<Matrix<T>>) -> Self {
        let adjoints = unitaries.iter().map(Matrix::adjoint).collect();
        Self { unitaries, adjoints }
    }

    /// `d` independent Haar unitaries of dimension `k`, seeded from `seed`.
    pub fn haar(d: usize, k: usize, seed: u64) -> Self {
        let mut rng = rng_from_seed(seed);
        Self::new_unchecked((0..d).map(|_| crate::linalg::haar_unitary(k, rng.next_u64())).collect())
    }

    /// The trivial representation `u_j = I_k`.
    pub fn trivial(d: usize, k: usize) -> Self {
        Self::new_unchecked(vec![Matrix::identity(k); d])
    }

    pub fn d(&self) -> usize {
        self.unitaries.len()
    }

    pub fn k(&self) -> usize {
        self.unitaries[0].dim()
    }

    pub fn unitaries(&self) -> &[Matrix<T>] {
        &self.unitaries
    }

    pub fn moments(&self, words: &[GroupWord]) -> Result<Vec<C<T>>> {
        moment_vector(self, words)
    }
}

impl<T: Real> Representation<T> for UnitaryTuple<T> {
    type Letter = Letter;

    fn dim(&self) -> usize {
        self.k()
    }

    fn letter(&self, l: &Letter) -> Result<&Matrix<T>> {
        let set = if l.inverse { &self.adjoints } else { &self.unitaries };
        set.get(l.generator).ok_or_else(|| {
            Error::IndexOutOfRange(format!("generator {} of {}", l.generator + 1, self.d()))
        })
    }
}

impl<T: Real> Serialize for UnitaryTuple<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        #[serde(bound = "")]
        struct Repr<'a, T: Real> {
            d: usize,
            k: usize,
            unitaries: &'a [Matrix<T>],
        }
        Repr { d: self.d(), k: self.k(), unitaries: &self.unitaries }.serialize(serializer)
    }
}

impl<'de, T: Real> Deserialize<'de> for UnitaryTuple<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(bound = "")]
        struct Repr<T: Real> {
            d: usize,
            k: usize,
            unitaries: Vec<Matrix<T>>,
        }
        let r = Repr::<T>::deserialize(deserializer)?;
        if r.unitaries.len() != r.d {
            return Err(D::Error::custom(format!("d = {} but {} unitaries", r.d, r.unitaries.len())));
        }
        let t = UnitaryTuple::new(r.unitaries, &Tolerance::default()).map_err(D::Error::custom)?;
        if t.k() != r.k {
            return Err(D::Error::custom(format!("k = {} but matrices have dimension {}", r.k, t.k())));
        }
        Ok(t)
    }
}

fn require_same_rank<T: Real>(reps: &[&UnitaryTuple<T>]) -> Result<usize> {
    let d = reps.first().ok_or(Error::Empty("representation list"))?.d();
    for r in reps {
        if r.d() != d {
            return Err(Error::DimensionMismatch { expected: d, found: r.d() });
        }
    }
    Ok(d)
}

/// Generator-wise direct sum, representation `i` repeated `multiplicities[i]` times.
///
/// The moments of the result are the average of the inputs' moments weighted by
/// `m_i k_i / Σ m_j k_j`.
pub fn mix_reps<T: Real>(reps: &[&UnitaryTuple<T>], multiplicities: &[usize]) -> Result<UnitaryTuple<T>> {
    let d = require_same_rank(reps)?;
    if multiplicities.len() != reps.len() {
        return Err(Error::DimensionMismatch { expected: reps.len(), found: multiplicities.len() });
    }
    if multiplicities.iter().all(|&m| m == 0) {
        return Err(Error::Empty("all multiplicities are zero"));
    }
    let unitaries = (0..d)
        .map(|g| {
            let blocks: Vec<Matrix<T>> = reps
                .iter()
                .zip(multiplicities)
                .flat_map(|(r, &m)| std::iter::repeat_n(r.unitaries[g].clone(), m))
                .collect();
            direct_sum(&blocks)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(UnitaryTuple::new_unchecked(unitaries))
}

/// `x ↦ x ⊕ … ⊕ x` (`m` copies); moments are unchanged.
pub fn amplify<T: Real>(rep: &UnitaryTuple<T>, m: usize) -> Result<UnitaryTuple<T>> {
    mix_reps(&[rep], &[m])
}

/// Direct sum realizing the convex combination with weights `w_i / Σ w`.
///
/// Multiplicities are `w_i · L / k_i` with `L = lcm(k_i)`, so the weights are exact
/// for any rational input; dyadic weights are the case used for iterated midpoints.
pub fn convex_mix<T: Real>(reps: &[&UnitaryTuple<T>], weights: &[usize]) -> Result<UnitaryTuple<T>> {
    if weights.len() != reps.len() {
        return Err(Error::DimensionMismatch { expected: reps.len(), found: weights.len() });
    }
    let l = reps.iter().fold(1usize, |acc, r| acc.lcm(&r.k()));
    let mult: Vec<usize> = reps.iter().zip(weights).map(|(r, &w)| w * (l / r.k())).collect();
    mix_reps(reps, &mult)
}

/// Two-block representation with unequal block multiplicities on some generators.
///
/// Requires `rep1`, `rep2` of the same dimension. Every generator acts as
/// `rep1^{⊕m} ⊕ rep2^{⊕m}`, except those listed in `shifted`, which act as
/// `rep1^{⊕(m+1)} ⊕ rep2^{⊕(m−1)}`. Moments differ from the symmetric mix by at
/// most `1/m` on any word of unitaries, since only one of the `2m` blocks changes.
pub fn desymmetrized_mix<T: Real>(
    rep1: &UnitaryTuple<T>,
    rep2: &UnitaryTuple<T>,
    m: usize,
    shifted: &[usize],
) -> Result<UnitaryTuple<T>> {
    let d = require_same_rank(&[rep1, rep2])?;
    if rep1.k() != rep2.k() {
        return Err(Error::DimensionMismatch { expected: rep1.k(), found: rep2.k() });
    }
    if m == 0 {
        return Err(Error::Unsupported("block multiplicity m must be at least 1".into()));
    }
    if let Some(&g) = shifted.iter().find(|&&g| g >= d) {
        return Err(Error::IndexOutOfRange(format!("generator {} of {d}", g + 1)));
    }
    let unitaries = (0..d)
        .map(|g| {
            let (m1, m2) = if shifted.contains(&g) { (m + 1, m - 1) } else { (m, m) };
            let mut blocks = vec![rep1.unitaries[g].clone(); m1];
            blocks.extend(std::iter::repeat_n(rep2.unitaries[g].clone(), m2));
            direct_sum(&blocks)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(UnitaryTuple::new_unchecked(unitaries))
}

/// Outcome of a perturbation towards a surjective representation.
#[derive(Debug, Clone, Serialize)]
#[serde(bound = "")]
pub struct ApproxReport<T: Real = f64> {
    pub eps: T,
    /// Largest operator-norm distance between a perturbed and an original generator.
    pub achieved_generator_distance: T,
    pub surjective: bool,
    pub moment_report: MomentReport<T>,
    pub tries_used: usize,
    /// Seed of the successful (or last) attempt.
    pub seed_used: u64,
    pub algebra_dim: usize,
    pub certificate: Option<Vec<String>>,
    pub warnings: Vec<String>,
}

/// Options shared by the perturbation routines.
#[derive(Debug, Clone, Copy)]
pub struct PerturbOptions<T: Real = f64> {
    pub max_tries: usize,
    pub radius: usize,
    pub tol: Tolerance<T>,
}

impl<T: Real> Default for PerturbOptions<T> {
    fn default() -> Self {
        Self { max_tries: DEFAULT_MAX_TRIES, radius: DEFAULT_RADIUS, tol: Tolerance::default() }
    }
}

/// Replace each generator by a seeded perturbation of size `eps` until the
/// tuple generates `M_k`.
///
/// Exhausting `max_tries` is not an error: the last attempt is returned with
/// `surjective = false`. The moment report compares against the input over
/// `ball(d, opts.radius)`.
pub fn perturb_to_surjective<T: Real>(
    rep: &UnitaryTuple<T>,
    eps: T,
    seed: u64,
    opts: &PerturbOptions<T>,
) -> Result<(UnitaryTuple<T>, ApproxReport<T>)> {
    if rep.d() < 2 {
        return Err(Error::Unsupported("perturbation needs at least two generators".into()));
    }
    if !(eps >= T::zero()) {
        return Err(Error::Unsupported(format!("eps must be nonnegative, got {eps}")));
    }
    if opts.max_tries == 0 {
        return Err(Error::Unsupported("max_tries must be positive".into()));
    }
    let mut seeds = rng_from_seed(seed);
    let mut last = None;
    for attempt in 1..=opts.max_tries {
        let try_seed = seeds.next_u64();
        let mut gen_seeds = rng_from_seed(try_seed);
        let unitaries = rep
            .unitaries
            .iter()
            .map(|u| perturb_unitary(u, eps, gen_seeds.next_u64()))
            .collect::<Result<Vec<_>>>()?;
        let candidate = UnitaryTuple::new_unchecked(unitaries);
        let surj = is_surjective(candidate.unitaries(), &opts.tol)?;
        let done = surj.surjective;
        last = Some((candidate, surj, attempt, try_seed));
        if done {
            break;
        }
    }
    let (out, surj, tries_used, seed_used) = last.expect("max_tries >= 1");
    let achieved = out
        .unitaries
        .iter()
        .zip(&rep.unitaries)
        .map(|(a, b)| a.distance(b))
        .fold(T::zero(), T::max);
    let dists = out.unitaries.iter().zip(&rep.unitaries).map(|(a, b)| (a - b).trace_norm()).collect();
    let words = ball(rep.d(), opts.radius);
    let moment_report = MomentReport::compare(&out, rep, &words, dists)?;
    let report = ApproxReport {
        eps,
        achieved_generator_distance: achieved,
        surjective: surj.surjective,
        moment_report,
        tries_used,
        seed_used,
        algebra_dim: surj.algebra_dim,
        certificate: surj.certificate,
        warnings: Vec::new(),
    };
    Ok((out, report))
}

/// Approximate the midpoint `½(φ₁ + φ₂)` of two representations' traces by a
/// surjective representation.
///
/// The two inputs are mixed with multiplicities `k₂/g` and `k₁/g`
/// (`g = gcd(k₁, k₂)`), so both carry equal mass, then perturbed by
/// [`perturb_to_surjective`]. The moment report compares the output with the
/// exact midpoint computed from the inputs separately; on success
/// `sup_delta ≤ radius · eps` up to roundoff, because each letter of a word
/// moves by at most `eps` in operator norm.
pub fn approx_midpoint_fd<T: Real>(
    rep1: &UnitaryTuple<T>,
    rep2: &UnitaryTuple<T>,
    eps: T,
    seed: u64,
    opts: &PerturbOptions<T>,
) -> Result<(UnitaryTuple<T>, ApproxReport<T>)> {
    let d = require_same_rank(&[rep1, rep2])?;
    let mut warnings = Vec::new();
    for (name, r) in [("rep1", rep1), ("rep2", rep2)] {
        if !is_factor(r.unitaries(), &opts.tol)? {
            warnings.push(format!("{name} does not generate a factor; its trace is not extreme"));
        }
    }
    let g = rep1.k().gcd(&rep2.k());
    let mix = mix_reps(&[rep1, rep2], &[rep2.k() / g, rep1.k() / g])?;
    let (out, mut report) = perturb_to_surjective(&mix, eps, seed, opts)?;

    let words = ball(d, opts.radius);
    let half = T::lit(0.5);
    let m1 = rep1.moments(&words)?;
    let m2 = rep2.moments(&words)?;
    let midpoint: Vec<C<T>> = m1.iter().zip(&m2).map(|(a, b)| (a + b) * half).collect();
    let values = out.moments(&words)?;
    let dists = report.moment_report.generator_trace_distances.clone();
    report.moment_report =
        MomentReport::new(words.iter().map(GroupWord::to_string).collect(), values, midpoint, dists)?;
    report.warnings = warnings;
    Ok((out, report))
}

#[cfg(test)]
mod tests;
