//! The corner-amplification perturbation of a joint representation.
//!
//! Given standardized `π₁, π₂` with common corner size `d`, each `N_i = M_d`
//! is enlarged to `Ñ_i = M_t`, `t = d + r`, with `N_i` sitting in the top-left
//! corner. On `M̃ = M_n ⊗ Ñ₁ ⊗ Ñ₂ ⊗ M_2` the perturbed representation `π̃`
//! agrees with the joint representation `π` away from a projection of trace
//! at most `2r/t`, and the extra pieces (`p`, `r`, `v`, `λ₁`, `λ₂`) are chosen
//! so that `π̃` generates all of `M̃`.

use serde::Serialize;

use super::{equalize, lift_first, lift_second, standardize, units_from_first_row, MnMnRep};
use crate::error::{Error, Result};
use crate::gate::{all_pass, Gate};
use crate::linalg::{direct_sum, eigenvalues, tensor, unit, Matrix, Tolerance};
use crate::scalar::{unimodular, Real, C};
use crate::words::{moment_vector, monomial_ball, MomentReport, Representation, StarMonomial, Symbol};

/// Number of equally spaced points on the unit circle scanned for `λ₁, λ₂`.
pub const LAMBDA_POINTS: usize = 360;
/// Minimal distance from `λ_i` to the spectra of `π_i(a)`.
pub const LAMBDA_MARGIN: f64 = 1e-6;

/// Projections and partial isometry of the enlarged corner `M_t ⊃ M_d`.
#[derive(Debug, Clone, Serialize)]
#[serde(bound = "")]
pub struct AmplificationData<T: Real = f64> {
    pub d: usize,
    pub r: usize,
    pub t: usize,
    /// `1_N = diag(I_d, 0)`.
    pub q: Matrix<T>,
    /// `1 − 1_N = diag(0, I_r)`.
    pub p: Matrix<T>,
    /// Rank-`r` projection inside `1_N` (its first `r` coordinates).
    pub r_proj: Matrix<T>,
    /// `v = Σ_s E_{s, d+s}`, so `v v* = r_proj` and `v* v = p`.
    pub v: Matrix<T>,
}

/// Build the enlarged corner for `N = M_d` and a rank-`r` projection, `1 ≤ r ≤ d`.
pub fn corner_amplification<T: Real>(d: usize, r: usize) -> Result<AmplificationData<T>> {
    if d == 0 || r == 0 || r > d {
        return Err(Error::Unsupported(format!("need 1 <= r <= d, got d = {d}, r = {r}")));
    }
    let t = d + r;
    let diag = |lo: usize, hi: usize| {
        let mut m = Matrix::<T>::zeros(t);
        for s in lo..hi {
            m[(s, s)] = C::new(T::one(), T::zero());
        }
        m
    };
    let mut v = Matrix::<T>::zeros(t);
    for s in 0..r {
        v[(s, d + s)] = C::new(T::one(), T::zero());
    }
    Ok(AmplificationData { d, r, t, q: diag(0, d), p: diag(d, t), r_proj: diag(0, r), v })
}

/// Sizes involved in a perturbation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BundleDims {
    pub n: usize,
    /// Corner sizes of the inputs before equalization.
    pub d1: usize,
    pub d2: usize,
    /// Common corner size after amplifying by `m1`, `m2`.
    pub d: usize,
    pub m1: usize,
    pub m2: usize,
    pub r: usize,
    pub t: usize,
    /// `2 n d²`.
    pub k: usize,
    /// `2 n t²`.
    pub k_tilde: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct PerturbOptions {
    /// Rank of `r_i`; the smallest admissible rank (1) when unset.
    pub r_rank: Option<usize>,
    pub lambda_points: usize,
}

impl Default for PerturbOptions {
    fn default() -> Self {
        Self { r_rank: None, lambda_points: LAMBDA_POINTS }
    }
}

/// Everything produced by [`perturbed_rep`].
#[derive(Debug, Clone)]
pub struct PerturbationBundle<T: Real = f64> {
    pub eps: T,
    pub dims: BundleDims,
    /// Standardized, equalized inputs.
    pub rep1: MnMnRep<T>,
    pub rep2: MnMnRep<T>,
    /// The joint representation `π` in `M_{2nd²}`.
    pub base: MnMnRep<T>,
    /// The perturbed representation `π̃` in `M_{2nt²}`.
    pub perturbed: MnMnRep<T>,
    pub amplification: AmplificationData<T>,
    pub lambda1: C<T>,
    pub lambda2: C<T>,
    /// Spectra of `π₁(a)` and `π₂(a)` for `a = e_14 f_41 e_11`.
    pub spectrum1: Vec<C<T>>,
    pub spectrum2: Vec<C<T>>,
}

impl<T: Real> PerturbationBundle<T> {
    /// The non-unital embedding `M → M̃` (corner of `1_N₁ ⊗ 1_N₂`).
    pub fn embed(&self, x: &Matrix<T>) -> Matrix<T> {
        let BundleDims { n, d, t, k_tilde, .. } = self.dims;
        let index = |flat: usize| {
            let c = flat % 2;
            let b = (flat / 2) % d;
            let a = (flat / (2 * d)) % d;
            let i = flat / (2 * d * d);
            ((i * t + a) * t + b) * 2 + c
        };
        let k = 2 * n * d * d;
        let mut out = Matrix::zeros(k_tilde);
        for r in 0..k {
            let rr = index(r);
            for (s, &z) in x.row(r).iter().enumerate() {
                out[(rr, index(s))] = z;
            }
        }
        out
    }

    /// `τ̃(ι(1)) = (d/t)²`.
    pub fn embedding_weight(&self) -> T {
        let ratio = T::from_usize_lossy(self.dims.d) / T::from_usize_lossy(self.dims.t);
        ratio * ratio
    }

    /// `ι ∘ π` as a (non-unital) representation into `M̃`.
    pub fn embedded_base(&self) -> Result<MnMnRep<T>> {
        self.base.map(|x| self.embed(x))
    }
}

fn embed_corner<T: Real>(x: &Matrix<T>, r: usize) -> Matrix<T> {
    direct_sum(&[x.clone(), Matrix::zeros(r)]).expect("two blocks")
}

/// `σ₁(x) = x ⊗ 1 ⊗ E_11`, `σ₂(x) = 1 ⊗ x ⊗ E_22` on `Ñ₁ ⊗ Ñ₂ ⊗ M_2`.
fn sigma<T: Real>(which: usize, x: &Matrix<T>, t: usize) -> Matrix<T> {
    let id = Matrix::identity(t);
    if which == 1 {
        tensor(x, &tensor(&id, &unit(2, 0, 0)))
    } else {
        tensor(&id, &tensor(x, &unit(2, 1, 1)))
    }
}

/// Pick `λ₁ ≠ λ₂` on a grid of the unit circle, both at distance at least
/// [`LAMBDA_MARGIN`] from the union of the spectra, maximizing `|λ₁ − λ₂|`
/// (first maximizing pair in scan order).
fn choose_lambdas<T: Real>(spectra: &[C<T>], points: usize) -> Result<(C<T>, C<T>)> {
    let margin = T::lit(LAMBDA_MARGIN);
    let admissible: Vec<C<T>> = (0..points)
        .map(|m| unimodular(T::TAU() * T::from_usize_lossy(m) / T::from_usize_lossy(points)))
        .filter(|z| spectra.iter().all(|s| (s - z).norm() >= margin))
        .collect();
    let mut best: Option<(T, C<T>, C<T>)> = None;
    for (i, &a) in admissible.iter().enumerate() {
        for &b in &admissible[i + 1..] {
            let dist = (a - b).norm();
            if best.is_none_or(|(bd, _, _)| dist > bd + T::lit(1e-12)) {
                best = Some((dist, a, b));
            }
        }
    }
    best.map(|(_, a, b)| (a, b)).ok_or(Error::LambdaSearch)
}

/// Construct `π̃` from two representations whose traces should be averaged.
///
/// Requires `n ≥ 4`. Inputs are standardized; if their corner sizes differ
/// both are amplified to the least common multiple. The rank `r` must satisfy
/// `r < d` and `r/d < eps`.
pub fn perturbed_rep<T: Real>(
    rep1: &MnMnRep<T>,
    rep2: &MnMnRep<T>,
    eps: T,
    tol: &Tolerance<T>,
    opts: &PerturbOptions,
) -> Result<PerturbationBundle<T>> {
    let n = rep1.n();
    if rep2.n() != n {
        return Err(Error::DimensionMismatch { expected: n, found: rep2.n() });
    }
    if n < 4 {
        return Err(Error::Unsupported(format!(
            "the perturbation uses e_12, e_13 and e_14 and needs n >= 4, got n = {n}"
        )));
    }
    if !(eps > T::zero()) {
        return Err(Error::Unsupported(format!("eps must be positive, got {eps}")));
    }
    let (d1, d2) = (rep1.d(), rep2.d());
    let (s1, _) = standardize(rep1, tol)?;
    let (s2, _) = standardize(rep2, tol)?;
    let (s1, s2, m1, m2) = equalize(s1, s2)?;
    let d = s1.d();
    let admissible = |r: usize| r >= 1 && r < d && T::from_usize_lossy(r) < eps * T::from_usize_lossy(d);
    let r = match opts.r_rank {
        Some(r) if admissible(r) => r,
        Some(_) => return Err(Error::NoAdmissibleRank { d, eps: eps.to_f64_lossy() }),
        None if admissible(1) => 1,
        None => return Err(Error::NoAdmissibleRank { d, eps: eps.to_f64_lossy() }),
    };
    let amp = corner_amplification::<T>(d, r)?;
    let t = amp.t;
    let dims = BundleDims { n, d1, d2, d, m1, m2, r, t, k: 2 * n * d * d, k_tilde: 2 * n * t * t };

    // a = e_14 f_41 e_11 in each input.
    let spectrum = |s: &MnMnRep<T>| -> Result<Vec<C<T>>> {
        let a = s.e(0, 3).matmul(s.f(3, 0)).matmul(s.e(0, 0));
        eigenvalues(&a)
    };
    let spectrum1 = spectrum(&s1)?;
    let spectrum2 = spectrum(&s2)?;
    let union: Vec<C<T>> = spectrum1.iter().chain(&spectrum2).copied().collect();
    let (lambda1, lambda2) = choose_lambdas(&union, opts.lambda_points)?;

    let big = |y: &Matrix<T>| y.map_blocks(n, |b| embed_corner(b, r));
    let id_t = Matrix::<T>::identity(t);
    let f_row: Vec<Matrix<T>> = (1..n)
        .map(|j| {
            let e1j = unit::<T>(n, 0, j);
            let corner = tensor(&e1j, &amp.p);
            let x1 = &corner + &big(s1.f(0, j));
            let x2 = &corner + &big(s2.f(0, j));
            &lift_first(&x1, t) + &lift_second(n, &x2, t)
        })
        .collect();

    let swap = &amp.v + &amp.v.adjoint();
    let u = &(&(&id_t - &amp.p) - &amp.r_proj) + &swap;
    let e12_inner = &sigma(1, &u, t) + &sigma(2, &u, t);
    let pp = {
        let a = tensor(&amp.p, &id_t);
        let b = tensor(&id_t, &amp.p);
        &(&a + &b) - &tensor(&amp.p, &amp.p)
    };
    let id_n = Matrix::<T>::identity(t * t);
    let flip = &unit::<T>(2, 0, 1) + &unit(2, 1, 0);
    let e13_inner = &tensor(&(&id_n - &pp), &Matrix::identity(2)) + &tensor(&pp, &flip);
    let with_lambda = |lam: C<T>| {
        let mut m = amp.q.clone();
        m.axpy(lam, &amp.p);
        m
    };
    let e14_inner = &sigma(1, &with_lambda(lambda1), t) + &sigma(2, &with_lambda(lambda2), t);
    let e_row: Vec<Matrix<T>> = (1..n)
        .map(|j| {
            let e1j = unit::<T>(n, 0, j);
            match j {
                1 => tensor(&e1j, &e12_inner),
                2 => tensor(&e1j, &e13_inner),
                3 => tensor(&e1j, &e14_inner),
                _ => tensor(&e1j, &Matrix::identity(2 * t * t)),
            }
        })
        .collect();

    let k_tilde = dims.k_tilde;
    let e = units_from_first_row(n, k_tilde, &e_row)?;
    let f = units_from_first_row(n, k_tilde, &f_row)?;
    let perturbed = MnMnRep::new(n, e, f, tol)?;
    let base = super::joint_rep(&s1, &s2, tol)?;
    Ok(PerturbationBundle {
        eps,
        dims,
        rep1: s1,
        rep2: s2,
        base,
        perturbed,
        amplification: amp,
        lambda1,
        lambda2,
        spectrum1,
        spectrum2,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions<T: Real = f64> {
    /// Maximal length of the monomials in the moment report.
    pub radius: usize,
    pub tol: Tolerance<T>,
    /// Relative membership threshold for the structural elements.
    pub membership_threshold: T,
    /// Compute the structural membership residuals.
    pub diagnostics: bool,
}

impl<T: Real> Default for VerifyOptions<T> {
    fn default() -> Self {
        Self { radius: 3, tol: Tolerance::default(), membership_threshold: T::lit(1e-7), diagnostics: false }
    }
}

/// Checks run on a [`PerturbationBundle`].
#[derive(Debug, Clone, Serialize)]
#[serde(bound = "")]
pub struct PerturbationReport<T: Real = f64> {
    pub dims: BundleDims,
    pub eps: T,
    pub lambda1: C<T>,
    pub lambda2: C<T>,
    /// Distance from `{λ₁, λ₂}` to the spectra of `π_i(a)`.
    pub lambda_margin: T,
    pub unit_residual_e: T,
    pub unit_residual_f: T,
    /// `‖π̃(x) − ι(π(x))‖₂` (normalized trace norm on `M̃`) for `x` in the generating set.
    pub generator_distances: Vec<(String, T)>,
    pub surjective: bool,
    pub algebra_dim: usize,
    pub ambient_dim: usize,
    pub certificate_size: usize,
    /// `values_a` from `π̃`, `values_b` from `π` (through the embedding, divided by its weight).
    pub moment_report: MomentReport<T>,
    pub embedding_weight: T,
    /// Relative distance to `π̃(A)` of the elements the generation argument produces.
    pub structural_residuals: Vec<(String, T)>,
    pub gates: Vec<Gate>,
}

impl<T: Real> PerturbationReport<T> {
    pub fn passed(&self) -> bool {
        all_pass(&self.gates)
    }
}

/// Residuals, distances, generation and moments of a perturbation.
pub fn verify_perturbation<T: Real>(b: &PerturbationBundle<T>, opts: &VerifyOptions<T>) -> Result<PerturbationReport<T>> {
    let BundleDims { n, k_tilde, t, .. } = b.dims;
    let pt = &b.perturbed;
    let res_e = super::unit_residual(n, pt.e_units());
    let res_f = super::unit_residual(n, pt.f_units());
    let res_bound = T::lit(1e-9) * T::from_usize_lossy(k_tilde);

    let embedded = b.embedded_base()?;
    let mut generator_distances = Vec::new();
    for j in 1..n {
        for s in [Symbol::e(0, j), Symbol::f(0, j)] {
            let dist = (pt.letter(&s)? - embedded.letter(&s)?).trace_norm();
            generator_distances.push((s.to_string(), dist));
        }
    }
    generator_distances.sort_by(|a, b| a.0.cmp(&b.0));
    let max_dist = generator_distances.iter().map(|x| x.1).fold(T::zero(), T::max);

    let alg = pt.generated_algebra(&opts.tol)?;

    let words = monomial_ball(n, opts.radius);
    let weight = b.embedding_weight();
    let values_a = moment_vector(pt, &words)?;
    let values_b: Vec<C<T>> = moment_vector(&embedded, &words)?.into_iter().map(|z| z / weight).collect();
    let dists = generator_distances.iter().map(|x| x.1).collect();
    let moment_report =
        MomentReport::new(words.iter().map(StarMonomial::to_string).collect(), values_a, values_b, dists)?;

    let lambda_margin = b
        .spectrum1
        .iter()
        .chain(&b.spectrum2)
        .flat_map(|s| [(s - b.lambda1).norm(), (s - b.lambda2).norm()])
        .fold(T::infinity(), T::min);

    let mut structural_residuals = Vec::new();
    if opts.diagnostics {
        let amp = &b.amplification;
        let id_t = Matrix::<T>::identity(t);
        let pp = &(&tensor(&amp.p, &id_t) + &tensor(&id_t, &amp.p)) - &tensor(&amp.p, &amp.p);
        let mut elements: Vec<(String, Matrix<T>)> = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let eij = unit::<T>(n, i, j);
                let (a, c) = (i + 1, j + 1);
                elements.push((format!("E{a}{c} (x) s1(p1)"), tensor(&eij, &sigma(1, &amp.p, t))));
                elements.push((format!("E{a}{c} (x) s2(p2)"), tensor(&eij, &sigma(2, &amp.p, t))));
                elements.push((format!("E{a}{c} (x) 1"), tensor(&eij, &Matrix::identity(2 * t * t))));
            }
        }
        let e12 = unit::<T>(n, 0, 1);
        elements.push(("E12 (x) s1(v1)".into(), tensor(&e12, &sigma(1, &amp.v, t))));
        elements.push(("E12 (x) s2(v2)".into(), tensor(&e12, &sigma(2, &amp.v, t))));
        elements.push(("E11 (x) p (x) E11".into(), tensor(&unit(n, 0, 0), &tensor(&pp, &unit(2, 0, 0)))));
        for (name, x) in elements {
            let rel = alg.membership_residual(&x) / x.frobenius_norm();
            structural_residuals.push((name, rel));
        }
    }

    let radius = T::from_usize_lossy(opts.radius.max(1));
    let mut gates = vec![
        Gate::at_most("unit_residual_e", res_e, res_bound),
        Gate::at_most("unit_residual_f", res_f, res_bound),
        Gate::at_most("generator_distance", max_dist, T::lit(4.0) * b.eps),
        Gate::at_least("lambda_margin", lambda_margin, T::lit(LAMBDA_MARGIN)),
        Gate::holds("surjective", alg.is_full()),
        Gate::at_most("moment_sup_delta", moment_report.sup_delta, T::lit(10.0) * radius * b.eps),
    ];
    if opts.diagnostics {
        let worst = structural_residuals.iter().map(|x| x.1).fold(T::zero(), T::max);
        gates.push(Gate::at_most("structural_membership", worst, opts.membership_threshold));
    }
    Ok(PerturbationReport {
        dims: b.dims,
        eps: b.eps,
        lambda1: b.lambda1,
        lambda2: b.lambda2,
        lambda_margin,
        unit_residual_e: res_e,
        unit_residual_f: res_f,
        generator_distances,
        surjective: alg.is_full(),
        algebra_dim: alg.dim(),
        ambient_dim: k_tilde,
        certificate_size: if alg.is_full() { alg.dim() } else { 0 },
        moment_report,
        embedding_weight: weight,
        structural_residuals,
        gates,
    })
}
