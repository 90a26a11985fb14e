//! Representations of `M_n * M_n` as two systems of matrix units in `M_k`.
//!
//! Layout convention: `M_k = M_n ⊗ N` with the `M_n` index outermost, so a
//! standard unit `e_ij = E_ij ⊗ I_d` is the `(i, j)` block of size `d = k/n`,
//! and `f_1j = E_1j ⊗ u_j` carries `u_j` in block `(1, j)`.

mod corner;
mod fd;
mod perturb;

use num_integer::Integer;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub use corner::{corner_with_isometry_algebra, tensor_corner_algebra};
pub use fd::{amplify_and_perturb, perturb_f_to_surjective, FdApproxReport};
pub use perturb::{
    corner_amplification, perturbed_rep, verify_perturbation, AmplificationData, BundleDims,
    PerturbOptions, PerturbationBundle, PerturbationReport, VerifyOptions, LAMBDA_MARGIN, LAMBDA_POINTS,
};

use crate::algebra::{generated_algebra_reduced, ReducedAlgebra};
use crate::error::{Error, Result};
use crate::linalg::{range_basis, require_unitary, tensor, unit, Matrix, Tolerance};
use crate::scalar::Real;
use crate::words::{Family, Representation, Symbol};

/// Two families of `n × n` matrix units in `M_k`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct MnMnRep<T: Real = f64> {
    n: usize,
    e: Vec<Matrix<T>>,
    f: Vec<Matrix<T>>,
}

/// Largest entrywise violation of `x_ij x_lm = δ_jl x_im`, `x_ij* = x_ji` and
/// `Σ x_ii = I` over one family.
pub fn unit_residual<T: Real>(n: usize, x: &[Matrix<T>]) -> T {
    let k = x[0].dim();
    let mut worst = T::zero();
    let zero = Matrix::<T>::zeros(k);
    for i in 0..n {
        for j in 0..n {
            let xij = &x[i * n + j];
            worst = worst.max((&xij.adjoint() - &x[j * n + i]).max_abs());
            for l in 0..n {
                for m in 0..n {
                    let prod = xij.matmul(&x[l * n + m]);
                    let target = if j == l { &x[i * n + m] } else { &zero };
                    worst = worst.max((&prod - target).max_abs());
                }
            }
        }
    }
    let mut sum = Matrix::<T>::zeros(k);
    for i in 0..n {
        sum = &sum + &x[i * n + i];
    }
    worst.max(sum.identity_defect())
}

/// Complete a family of matrix units from its first row `x_12, …, x_1n`:
/// `x_11 = x_12 x_12*`, `x_j1 = x_1j*`, `x_ij = x_i1 x_1j`.
pub fn units_from_first_row<T: Real>(n: usize, k: usize, row: &[Matrix<T>]) -> Result<Vec<Matrix<T>>> {
    if row.len() + 1 != n {
        return Err(Error::DimensionMismatch { expected: n - 1, found: row.len() });
    }
    if n == 1 {
        return Ok(vec![Matrix::identity(k)]);
    }
    let x11 = row[0].matmul(&row[0].adjoint());
    let mut first = Vec::with_capacity(n);
    first.push(x11);
    first.extend(row.iter().cloned());
    let col: Vec<Matrix<T>> = first.iter().map(Matrix::adjoint).collect();
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            out.push(match (i, j) {
                (0, _) => first[j].clone(),
                (_, 0) => col[i].clone(),
                _ => col[i].matmul(&first[j]),
            });
        }
    }
    Ok(out)
}

/// `E_ij ⊗ I_d` for all `i, j`.
pub fn standard_units<T: Real>(n: usize, d: usize) -> Vec<Matrix<T>> {
    let id = Matrix::identity(d);
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            out.push(tensor(&unit(n, i, j), &id));
        }
    }
    out
}

impl<T: Real> MnMnRep<T> {
    /// Validates both families: relations within `tol.structural · k`, and
    /// `k` divisible by `n`.
    pub fn new(n: usize, e: Vec<Matrix<T>>, f: Vec<Matrix<T>>, tol: &Tolerance<T>) -> Result<Self> {
        let rep = Self::from_parts(n, e, f)?;
        let bound = tol.structural * T::from_usize_lossy(rep.k());
        for (name, fam) in [("e", &rep.e), ("f", &rep.f)] {
            let r = unit_residual(n, fam);
            if !(r <= bound) {
                return Err(Error::NotMatrixUnits(format!("{name}-family residual {r:e} exceeds {bound:e}")));
            }
        }
        Ok(rep)
    }

    pub(crate) fn from_parts(n: usize, e: Vec<Matrix<T>>, f: Vec<Matrix<T>>) -> Result<Self> {
        if n == 0 || e.len() != n * n || f.len() != n * n {
            return Err(Error::NotMatrixUnits(format!("expected {} units per family", n * n)));
        }
        let k = e[0].dim();
        for m in e.iter().chain(&f) {
            if m.dim() != k {
                return Err(Error::DimensionMismatch { expected: k, found: m.dim() });
            }
        }
        if !k.is_multiple_of(n) {
            return Err(Error::NotMatrixUnits(format!("k = {k} is not a multiple of n = {n}")));
        }
        Ok(Self { n, e, f })
    }

    /// Build from the first rows `e_12..e_1n` and `f_12..f_1n`.
    pub fn from_first_rows(n: usize, e_row: &[Matrix<T>], f_row: &[Matrix<T>], tol: &Tolerance<T>) -> Result<Self> {
        let k = e_row.first().or(f_row.first()).map_or(1, Matrix::dim);
        let e = units_from_first_row(n, k, e_row)?;
        let f = units_from_first_row(n, k, f_row)?;
        Self::new(n, e, f, tol)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.e[0].dim()
    }

    /// `k / n`.
    pub fn d(&self) -> usize {
        self.k() / self.n
    }

    /// `e_ij`, 0-based.
    pub fn e(&self, i: usize, j: usize) -> &Matrix<T> {
        &self.e[i * self.n + j]
    }

    pub fn f(&self, i: usize, j: usize) -> &Matrix<T> {
        &self.f[i * self.n + j]
    }

    pub fn e_units(&self) -> &[Matrix<T>] {
        &self.e
    }

    pub fn f_units(&self) -> &[Matrix<T>] {
        &self.f
    }

    /// Largest matrix-unit residual over both families.
    pub fn residual(&self) -> T {
        unit_residual(self.n, &self.e).max(unit_residual(self.n, &self.f))
    }

    /// Whether `e_ij = E_ij ⊗ I_d` within `tol` (entrywise).
    pub fn is_standard(&self, tol: T) -> bool {
        let std = standard_units::<T>(self.n, self.d());
        self.e.iter().zip(&std).all(|(a, b)| (a - b).max_abs() <= tol)
    }

    /// Apply `x ↦ φ(x)` to every unit of both families.
    pub fn map(&self, mut phi: impl FnMut(&Matrix<T>) -> Matrix<T>) -> Result<Self> {
        let e = self.e.iter().map(&mut phi).collect();
        let f = self.f.iter().map(&mut phi).collect();
        Self::from_parts(self.n, e, f)
    }

    /// `x ↦ x ⊗ I_m`; the trace is unchanged and a standard rep stays standard.
    pub fn amplify(&self, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::Unsupported("amplification factor must be positive".into()));
        }
        let id = Matrix::identity(m);
        self.map(|x| tensor(x, &id))
    }

    /// Labelled list of all units, e-family first.
    pub fn labelled_units(&self) -> Vec<(String, Matrix<T>)> {
        let mut out = Vec::with_capacity(2 * self.n * self.n);
        for (fam, units) in [(Family::E, &self.e), (Family::F, &self.f)] {
            for i in 0..self.n {
                for j in 0..self.n {
                    out.push((Symbol { family: fam, i, j }.to_string(), units[i * self.n + j].clone()));
                }
            }
        }
        out
    }

    /// Algebra generated by both families, computed in the corner of `e_11`.
    pub fn generated_algebra(&self, tol: &Tolerance<T>) -> Result<ReducedAlgebra<T>> {
        let labels: Vec<String> =
            (0..self.n * self.n).map(|idx| Symbol::e(idx / self.n, idx % self.n).to_string()).collect();
        generated_algebra_reduced(&self.e, &labels, &self.labelled_units(), tol)
    }
}

impl<T: Real> Representation<T> for MnMnRep<T> {
    type Letter = Symbol;

    fn dim(&self) -> usize {
        self.k()
    }

    fn letter(&self, s: &Symbol) -> Result<&Matrix<T>> {
        if s.i >= self.n || s.j >= self.n {
            return Err(Error::IndexOutOfRange(format!("{s} with n = {}", self.n)));
        }
        Ok(match s.family {
            Family::E => self.e(s.i, s.j),
            Family::F => self.f(s.i, s.j),
        })
    }
}

fn nested<T: Real>(n: usize, units: &[Matrix<T>]) -> Vec<Vec<&Matrix<T>>> {
    (0..n).map(|i| (0..n).map(|j| &units[i * n + j]).collect()).collect()
}

impl<T: Real> Serialize for MnMnRep<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        #[serde(bound = "")]
        struct Repr<'a, T: Real> {
            n: usize,
            k: usize,
            e: Vec<Vec<&'a Matrix<T>>>,
            f: Vec<Vec<&'a Matrix<T>>>,
        }
        Repr { n: self.n, k: self.k(), e: nested(self.n, &self.e), f: nested(self.n, &self.f) }.serialize(serializer)
    }
}

impl<'de, T: Real> Deserialize<'de> for MnMnRep<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(bound = "")]
        struct Repr<T: Real> {
            n: usize,
            k: usize,
            e: Vec<Vec<Matrix<T>>>,
            f: Vec<Vec<Matrix<T>>>,
        }
        let r = Repr::<T>::deserialize(deserializer)?;
        let flat = |rows: Vec<Vec<Matrix<T>>>| -> std::result::Result<Vec<Matrix<T>>, D::Error> {
            if rows.len() != r.n || rows.iter().any(|row| row.len() != r.n) {
                return Err(D::Error::custom(format!("unit arrays must be {n} x {n}", n = r.n)));
            }
            Ok(rows.into_iter().flatten().collect())
        };
        let (e, f) = (flat(r.e)?, flat(r.f)?);
        let rep = MnMnRep::new(r.n, e, f, &Tolerance::default()).map_err(D::Error::custom)?;
        if rep.k() != r.k {
            return Err(D::Error::custom(format!("k = {} but units have dimension {}", r.k, rep.k())));
        }
        Ok(rep)
    }
}

/// Standard representation built from unitaries: `e_ij = E_ij ⊗ I_d`,
/// `f_ij = E_ij ⊗ u_i* u_j` with `u_1 = I_d`.
pub fn mn_rep_from_unitaries<T: Real>(n: usize, us: &[Matrix<T>], tol: &Tolerance<T>) -> Result<MnMnRep<T>> {
    if n < 2 {
        return Err(Error::Unsupported("n must be at least 2".into()));
    }
    if us.len() + 1 != n {
        return Err(Error::DimensionMismatch { expected: n - 1, found: us.len() });
    }
    let d = us[0].dim();
    for u in us {
        if u.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, found: u.dim() });
        }
        require_unitary(u, tol)?;
    }
    let mut all = Vec::with_capacity(n);
    all.push(Matrix::identity(d));
    all.extend(us.iter().cloned());
    let adj: Vec<Matrix<T>> = all.iter().map(Matrix::adjoint).collect();
    let mut f = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            f.push(tensor(&unit(n, i, j), &adj[i].matmul(&all[j])));
        }
    }
    MnMnRep::from_parts(n, standard_units(n, d), f)
}

/// Conjugate so that the e-family becomes exactly `E_ij ⊗ I_d`.
///
/// `W` has block columns `e_i1 V` where `V` is an orthonormal basis of
/// `range(e_11)`; then `W* e_ij W = E_ij ⊗ I_d`. Returns the conjugated rep and
/// `W`. For an already standard rep `W = I`.
pub fn standardize<T: Real>(rep: &MnMnRep<T>, tol: &Tolerance<T>) -> Result<(MnMnRep<T>, Matrix<T>)> {
    let (n, k, d) = (rep.n, rep.k(), rep.d());
    let v = range_basis(rep.e(0, 0), T::lit(0.5));
    if v.len() != d {
        return Err(Error::RankMismatch { expected: d, found: v.len() });
    }
    let mut w = Matrix::<T>::zeros(k);
    for i in 0..n {
        for (b, vb) in v.iter().enumerate() {
            let col = rep.e(i, 0).matvec(vb);
            for (r, z) in col.into_iter().enumerate() {
                w[(r, i * d + b)] = z;
            }
        }
    }
    let wa = w.adjoint();
    let conj = |x: &Matrix<T>| wa.matmul(x).matmul(&w);
    let std = standard_units::<T>(n, d);
    let bound = tol.structural * T::from_usize_lossy(k);
    for (x, s) in rep.e.iter().zip(&std) {
        let r = (&conj(x) - s).max_abs();
        if !(r <= bound) {
            return Err(Error::NotMatrixUnits(format!("e-family does not standardize (residual {r:e})")));
        }
    }
    let f = rep.f.iter().map(conj).collect();
    Ok((MnMnRep::from_parts(n, std, f)?, w))
}

/// Read `u_j` from block `(1, j)` of `f_1j` in a standardized rep whose
/// diagonal units agree, `e_ii = f_ii`.
pub fn extract_unitaries<T: Real>(rep: &MnMnRep<T>, tol: &Tolerance<T>) -> Result<Vec<Matrix<T>>> {
    let (n, d) = (rep.n, rep.d());
    if !rep.is_standard(tol.structural) {
        return Err(Error::NotMatrixUnits("e-family is not standardized".into()));
    }
    let mut worst = T::zero();
    for i in 0..n {
        worst = worst.max((rep.e(i, i) - rep.f(i, i)).frobenius_norm());
    }
    if worst > tol.structural {
        return Err(Error::DiagonalMismatch { residual: worst.to_f64_lossy() });
    }
    (1..n)
        .map(|j| {
            let u = rep.f(0, j).block(0, j, d);
            require_unitary(&u, tol)?;
            Ok(u)
        })
        .collect()
}

/// `π(x) = π₁(x) ⊗ 1 ⊗ E_11 + π₂(x) ⊗ 1 ⊗ E_22` in `M_n ⊗ N₁ ⊗ N₂ ⊗ M_2`.
///
/// Both inputs are standardized first. The result has `k = 2 n d₁ d₂`, a
/// standard e-family, and trace `½(φ₁ + φ₂)`.
pub fn joint_rep<T: Real>(rep1: &MnMnRep<T>, rep2: &MnMnRep<T>, tol: &Tolerance<T>) -> Result<MnMnRep<T>> {
    if rep1.n != rep2.n {
        return Err(Error::DimensionMismatch { expected: rep1.n, found: rep2.n });
    }
    let (s1, _) = standardize(rep1, tol)?;
    let (s2, _) = standardize(rep2, tol)?;
    let n = s1.n;
    let (d1, d2) = (s1.d(), s2.d());
    let lift = |x1: &Matrix<T>, x2: &Matrix<T>| -> Matrix<T> {
        let a = lift_first(x1, d2);
        let b = lift_second(n, x2, d1);
        &a + &b
    };
    let e = s1.e.iter().zip(&s2.e).map(|(a, b)| lift(a, b)).collect();
    let f = s1.f.iter().zip(&s2.f).map(|(a, b)| lift(a, b)).collect();
    MnMnRep::from_parts(n, e, f)
}

/// `y ∈ M_n ⊗ N₁ ↦ y ⊗ I_{d₂} ⊗ E_11`.
pub(crate) fn lift_first<T: Real>(y: &Matrix<T>, d2: usize) -> Matrix<T> {
    tensor(y, &tensor(&Matrix::identity(d2), &unit(2, 0, 0)))
}

/// `y = Σ E_ij ⊗ y_ij ∈ M_n ⊗ N₂ ↦ Σ E_ij ⊗ I_{d₁} ⊗ y_ij ⊗ E_22`.
pub(crate) fn lift_second<T: Real>(n: usize, y: &Matrix<T>, d1: usize) -> Matrix<T> {
    let id = Matrix::identity(d1);
    let e22 = unit(2, 1, 1);
    y.map_blocks(n, |b| tensor(&id, &tensor(b, &e22)))
}

/// Amplify two standardized reps to the common corner dimension `lcm(d₁, d₂)`.
pub(crate) fn equalize<T: Real>(s1: MnMnRep<T>, s2: MnMnRep<T>) -> Result<(MnMnRep<T>, MnMnRep<T>, usize, usize)> {
    let l = s1.d().lcm(&s2.d());
    let (m1, m2) = (l / s1.d(), l / s2.d());
    let a1 = if m1 == 1 { s1 } else { s1.amplify(m1)? };
    let a2 = if m2 == 1 { s2 } else { s2.amplify(m2)? };
    Ok((a1, a2, m1, m2))
}
