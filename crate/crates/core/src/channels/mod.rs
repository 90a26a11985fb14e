//! Factorizable channels `T = β* ∘ α` on `M_n` induced by representations of
//! `M_n * M_n`, with `α` the e-family and `β` the f-family.
//!
//! The adjoint of `β` for the normalized trace inner products gives
//! `T(E_ij)_kl = n · tr(f_lk e_ij)`.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::freegroup::PerturbOptions as FdOptions;
use crate::gate::{all_pass, Gate};
use crate::linalg::{hermitian_eigenvalues, unit, Matrix, Tolerance};
use crate::matprod::{
    joint_rep, perturb_f_to_surjective, perturbed_rep, standardize, verify_perturbation, FdApproxReport, MnMnRep,
    PerturbOptions, PerturbationReport, VerifyOptions,
};
use crate::scalar::{Real, C};

/// Largest ambient dimension for which the corner-amplification route is
/// attempted by [`midpoint_channel`].
pub const AMBIENT_BUDGET: usize = 128;

/// A linear map on `M_n`, stored by its values on matrix units.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferChannel<T: Real = f64> {
    n: usize,
    values: Vec<Matrix<T>>,
    choi: Matrix<T>,
}

impl<T: Real> TransferChannel<T> {
    /// `values[i * n + j] = T(E_ij)`.
    pub fn new(n: usize, values: Vec<Matrix<T>>) -> Result<Self> {
        if n == 0 || values.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, found: values.len() });
        }
        for v in &values {
            if v.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, found: v.dim() });
            }
        }
        let mut choi = Matrix::zeros(n * n);
        for i in 0..n {
            for j in 0..n {
                choi.set_block(i, j, &values[i * n + j]);
            }
        }
        Ok(Self { n, values, choi })
    }

    pub fn identity(n: usize) -> Self {
        let values = (0..n * n).map(|idx| unit(n, idx / n, idx % n)).collect();
        Self::new(n, values).expect("n x n units")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `T(E_ij)`, 0-based.
    pub fn value(&self, i: usize, j: usize) -> &Matrix<T> {
        &self.values[i * self.n + j]
    }

    pub fn values(&self) -> &[Matrix<T>] {
        &self.values
    }

    /// `Σ E_ij ⊗ T(E_ij)`.
    pub fn choi(&self) -> &Matrix<T> {
        &self.choi
    }

    /// `T(x)` by linearity.
    pub fn apply(&self, x: &Matrix<T>) -> Result<Matrix<T>> {
        if x.dim() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: x.dim() });
        }
        let mut out = Matrix::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                out.axpy(x[(i, j)], self.value(i, j));
            }
        }
        Ok(out)
    }

    /// `Σ w_i T_i`.
    pub fn combine(channels: &[&Self], weights: &[T]) -> Result<Self> {
        let first = channels.first().ok_or(Error::Empty("channel list"))?;
        if weights.len() != channels.len() {
            return Err(Error::DimensionMismatch { expected: channels.len(), found: weights.len() });
        }
        let n = first.n;
        let mut values = vec![Matrix::zeros(n); n * n];
        for (ch, &w) in channels.iter().zip(weights) {
            if ch.n != n {
                return Err(Error::DimensionMismatch { expected: n, found: ch.n });
            }
            for (acc, v) in values.iter_mut().zip(&ch.values) {
                acc.axpy(C::new(w, T::zero()), v);
            }
        }
        Self::new(n, values)
    }

    /// Largest entrywise modulus of `T(E_ij) − S(E_ij)` over all units.
    pub fn entrywise_distance(&self, other: &Self) -> Result<T> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: other.n });
        }
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| (a - b).max_abs()).fold(T::zero(), T::max))
    }
}

impl<T: Real> Serialize for TransferChannel<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        #[serde(bound = "")]
        struct Repr<'a, T: Real> {
            n: usize,
            values: Vec<Vec<&'a Matrix<T>>>,
        }
        let n = self.n;
        let values = (0..n).map(|i| (0..n).map(|j| self.value(i, j)).collect()).collect();
        Repr { n, values }.serialize(serializer)
    }
}

impl<'de, T: Real> Deserialize<'de> for TransferChannel<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(bound = "")]
        struct Repr<T: Real> {
            n: usize,
            values: Vec<Vec<Matrix<T>>>,
        }
        let r = Repr::<T>::deserialize(deserializer)?;
        if r.values.len() != r.n || r.values.iter().any(|row| row.len() != r.n) {
            return Err(D::Error::custom(format!("values must be {n} x {n}", n = r.n)));
        }
        TransferChannel::new(r.n, r.values.into_iter().flatten().collect()).map_err(D::Error::custom)
    }
}

/// The mixed moments `φ(f_lk e_ij)` of a representation, indexed by `(i, j, k, l)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct MomentTable<T: Real = f64> {
    pub n: usize,
    /// Flat, index `((i n + j) n + k) n + l`.
    pub values: Vec<C<T>>,
}

impl<T: Real> MomentTable<T> {
    pub fn new(n: usize, values: Vec<C<T>>) -> Result<Self> {
        if values.len() != n * n * n * n {
            return Err(Error::DimensionMismatch { expected: n * n * n * n, found: values.len() });
        }
        Ok(Self { n, values })
    }

    pub fn from_rep(rep: &MnMnRep<T>) -> Self {
        let n = rep.n();
        let mut values = Vec::with_capacity(n * n * n * n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        values.push(rep.f(l, k).matmul(rep.e(i, j)).normalized_trace());
                    }
                }
            }
        }
        Self { n, values }
    }

    /// `φ(f_lk e_ij)`, 0-based.
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> C<T> {
        let n = self.n;
        self.values[((i * n + j) * n + k) * n + l]
    }

    /// `Σ w_i t_i`.
    pub fn combine(tables: &[&Self], weights: &[T]) -> Result<Self> {
        let first = tables.first().ok_or(Error::Empty("moment table list"))?;
        if weights.len() != tables.len() {
            return Err(Error::DimensionMismatch { expected: tables.len(), found: weights.len() });
        }
        let mut values = vec![C::new(T::zero(), T::zero()); first.values.len()];
        for (t, &w) in tables.iter().zip(weights) {
            if t.n != first.n {
                return Err(Error::DimensionMismatch { expected: first.n, found: t.n });
            }
            for (acc, v) in values.iter_mut().zip(&t.values) {
                *acc += v * w;
            }
        }
        Self::new(first.n, values)
    }
}

/// `T(E_ij)_kl = n · φ(f_lk e_ij)`.
pub fn channel_from_moments<T: Real>(table: &MomentTable<T>) -> Result<TransferChannel<T>> {
    let n = table.n;
    if table.values.len() != n * n * n * n {
        return Err(Error::DimensionMismatch { expected: n * n * n * n, found: table.values.len() });
    }
    let nn = T::from_usize_lossy(n);
    let mut values = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            values.push(Matrix::from_fn(n, |k, l| table.get(i, j, k, l) * nn));
        }
    }
    TransferChannel::new(n, values)
}

pub fn channel_from_rep<T: Real>(rep: &MnMnRep<T>) -> Result<TransferChannel<T>> {
    channel_from_moments(&MomentTable::from_rep(rep))
}

/// Unital / trace-preserving / completely positive checks.
#[derive(Debug, Clone, Serialize)]
#[serde(bound = "")]
pub struct ChannelReport<T: Real = f64> {
    pub unital: bool,
    pub trace_preserving: bool,
    pub choi_psd: bool,
    pub min_choi_eigenvalue: T,
    /// `‖T(I) − I‖_F`.
    pub unital_defect: T,
    /// `max |tr T(E_ij) − δ_ij|`.
    pub trace_defect: T,
    pub gates: Vec<Gate>,
}

impl<T: Real> ChannelReport<T> {
    pub fn passed(&self) -> bool {
        all_pass(&self.gates)
    }
}

pub fn verify_channel<T: Real>(ch: &TransferChannel<T>, tol: T) -> ChannelReport<T> {
    let n = ch.n;
    let mut t_of_id = Matrix::<T>::zeros(n);
    let mut trace_defect = T::zero();
    for i in 0..n {
        t_of_id = &t_of_id + ch.value(i, i);
        for j in 0..n {
            let target = if i == j { T::one() } else { T::zero() };
            trace_defect = trace_defect.max((ch.value(i, j).trace() - C::new(target, T::zero())).norm());
        }
    }
    let unital_defect = t_of_id.identity_defect();
    let min_eig = hermitian_eigenvalues(&hermitian_part(&ch.choi)).into_iter().fold(T::infinity(), T::min);
    let gates = vec![
        Gate::at_most("unital", unital_defect, tol),
        Gate::at_most("trace_preserving", trace_defect, tol),
        Gate::at_least("choi_psd", min_eig, -tol),
    ];
    ChannelReport {
        unital: gates[0].pass,
        trace_preserving: gates[1].pass,
        choi_psd: gates[2].pass,
        min_choi_eigenvalue: min_eig,
        unital_defect,
        trace_defect,
        gates,
    }
}

/// `(x + x*)/2`. A non-Hermitian Choi matrix (a map that is not
/// Hermiticity-preserving) is judged by its Hermitian part; the
/// anti-Hermitian part is reported through `choi_hermitian_defect`.
fn hermitian_part<T: Real>(x: &Matrix<T>) -> Matrix<T> {
    (x + &x.adjoint()).scale_real(T::lit(0.5))
}

/// `‖Choi − Choi*‖_F`.
pub fn choi_hermitian_defect<T: Real>(ch: &TransferChannel<T>) -> T {
    (ch.choi() - &ch.choi().adjoint()).frobenius_norm()
}

/// How [`midpoint_channel`] produced its surjective representation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MidpointRoute {
    /// The corner-amplification perturbation of the joint representation.
    CornerAmplification,
    /// Conjugating the f-family of the joint representation by a unitary near `I`.
    FiniteDimensional,
}

#[derive(Debug, Clone, Copy)]
pub struct MidpointChannelOptions<T: Real = f64> {
    pub radius: usize,
    pub tol: Tolerance<T>,
    pub max_tries: usize,
    /// Largest ambient dimension for the corner-amplification route.
    pub ambient_budget: usize,
    pub diagnostics: bool,
}

impl<T: Real> Default for MidpointChannelOptions<T> {
    fn default() -> Self {
        Self {
            radius: 3,
            tol: Tolerance::default(),
            max_tries: crate::freegroup::DEFAULT_MAX_TRIES,
            ambient_budget: AMBIENT_BUDGET,
            diagnostics: false,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(bound = "")]
pub struct MidpointChannelReport<T: Real = f64> {
    pub route: MidpointRoute,
    pub eps: T,
    /// `½(T₁ + T₂)`.
    pub midpoint: TransferChannel<T>,
    /// Entrywise distance from the output channel to the midpoint.
    pub distance: T,
    pub surjective: bool,
    pub algebra_dim: usize,
    pub ambient_dim: usize,
    pub channel_check: ChannelReport<T>,
    pub perturbation: Option<PerturbationReport<T>>,
    pub finite_dimensional: Option<FdApproxReport<T>>,
    pub gates: Vec<Gate>,
}

impl<T: Real> MidpointChannelReport<T> {
    pub fn passed(&self) -> bool {
        all_pass(&self.gates)
    }
}

/// Approximate `½(T₁ + T₂)` by the channel of a surjective representation.
///
/// The corner-amplification perturbation is used when a rank-one corner is
/// admissible (`1/d < eps`) within `ambient_budget`; otherwise the joint
/// representation's f-family is conjugated by a seeded unitary with
/// `‖U − I‖ ≤ eps`. On the second route each entry moves by at most `2 eps`.
pub fn midpoint_channel<T: Real>(
    rep1: &MnMnRep<T>,
    rep2: &MnMnRep<T>,
    eps: T,
    seed: u64,
    opts: &MidpointChannelOptions<T>,
) -> Result<(TransferChannel<T>, MidpointChannelReport<T>)> {
    let t1 = channel_from_rep(rep1)?;
    let t2 = channel_from_rep(rep2)?;
    let half = T::lit(0.5);
    let midpoint = TransferChannel::combine(&[&t1, &t2], &[half, half])?;

    let (s1, _) = standardize(rep1, &opts.tol)?;
    let (s2, _) = standardize(rep2, &opts.tol)?;
    let d = num_integer::lcm(s1.d(), s2.d());
    let n = s1.n();
    let corner_ok =
        n >= 4 && d > 1 && T::one() < eps * T::from_usize_lossy(d) && 2 * n * (d + 1) * (d + 1) <= opts.ambient_budget;

    let (rep, route, perturbation, finite_dimensional, surjective, algebra_dim, ambient_dim);
    if corner_ok {
        let bundle = perturbed_rep(&s1, &s2, eps, &opts.tol, &PerturbOptions::default())?;
        let vopts = VerifyOptions { radius: opts.radius, tol: opts.tol, diagnostics: opts.diagnostics, ..Default::default() };
        let report = verify_perturbation(&bundle, &vopts)?;
        route = MidpointRoute::CornerAmplification;
        surjective = report.surjective;
        algebra_dim = report.algebra_dim;
        ambient_dim = report.ambient_dim;
        perturbation = Some(report);
        finite_dimensional = None;
        rep = bundle.perturbed;
    } else {
        let joint = joint_rep(&s1, &s2, &opts.tol)?;
        let fd_opts = FdOptions { max_tries: opts.max_tries, radius: opts.radius, tol: opts.tol };
        let (out, report) = perturb_f_to_surjective(&joint, eps, seed, &fd_opts)?;
        route = MidpointRoute::FiniteDimensional;
        surjective = report.surjective;
        algebra_dim = report.algebra_dim;
        ambient_dim = report.ambient_dim;
        perturbation = None;
        finite_dimensional = Some(report);
        rep = out;
    }
    let channel = channel_from_rep(&rep)?;
    let distance = channel.entrywise_distance(&midpoint)?;
    let channel_check = verify_channel(&channel, T::lit(1e-9));
    let mut gates = vec![Gate::holds("surjective", surjective)];
    gates.extend(channel_check.gates.iter().cloned());
    if let Some(p) = &perturbation {
        gates.extend(p.gates.iter().filter(|g| g.name != "surjective").map(|g| Gate {
            name: format!("perturbation.{}", g.name),
            ..g.clone()
        }));
    }
    let report = MidpointChannelReport {
        route,
        eps,
        midpoint,
        distance,
        surjective,
        algebra_dim,
        ambient_dim,
        channel_check,
        perturbation,
        finite_dimensional,
        gates,
    };
    Ok((channel, report))
}
