//! Isolation of the trivial character of a finite group and the weight bound
//! it implies for traces close to the trivial one.

use rand::Rng;
use rand_distr::Exp1;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};
use crate::linalg::rng_from_seed;
use crate::scalar::{unimodular, Real, C};

/// Slack allowed when comparing a weight with a bound.
pub const BOUND_SLACK: f64 = 1e-9;

const BUNDLED: [(&str, &str); 5] = [
    ("z2", include_str!("../../data/tables/z2.json")),
    ("z3", include_str!("../../data/tables/z3.json")),
    ("z4", include_str!("../../data/tables/z4.json")),
    ("z6", include_str!("../../data/tables/z6.json")),
    ("s3", include_str!("../../data/tables/s3.json")),
];

/// Character table: one row per irreducible character, one column per
/// conjugacy class. The first class is the identity, the first row trivial.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "")]
pub struct CharacterTable<T: Real = f64> {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
    pub class_sizes: Vec<usize>,
    pub characters: Vec<Vec<C<T>>>,
}

impl<'de, T: Real> Deserialize<'de> for CharacterTable<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(bound = "")]
        struct Repr<T: Real> {
            name: Option<String>,
            provenance: Option<String>,
            class_sizes: Vec<usize>,
            characters: Vec<Vec<C<T>>>,
        }
        let r = Repr::<T>::deserialize(deserializer)?;
        CharacterTable::new(r.class_sizes, r.characters)
            .map(|t| CharacterTable { name: r.name, provenance: r.provenance, ..t })
            .map_err(D::Error::custom)
    }
}

impl<T: Real> CharacterTable<T> {
    /// Validates shape, trivial first row and row orthogonality (to `1e-9`).
    pub fn new(class_sizes: Vec<usize>, characters: Vec<Vec<C<T>>>) -> Result<Self> {
        let table = Self { name: None, provenance: None, class_sizes, characters };
        table.validate()?;
        Ok(table)
    }

    fn validate(&self) -> Result<()> {
        let m = self.class_sizes.len();
        let bad = |msg: String| Err(Error::Parse(format!("character table: {msg}")));
        if m == 0 || self.characters.is_empty() {
            return bad("empty".into());
        }
        if self.class_sizes[0] != 1 || self.class_sizes.contains(&0) {
            return bad("first class must be the identity and sizes positive".into());
        }
        if self.characters.iter().any(|row| row.len() != m) {
            return bad(format!("every row needs {m} values"));
        }
        let tol = T::lit(1e-9);
        if self.characters[0].iter().any(|z| (z - C::new(T::one(), T::zero())).norm() > tol) {
            return bad("first row must be the trivial character".into());
        }
        for (i, a) in self.characters.iter().enumerate() {
            for (j, b) in self.characters.iter().enumerate() {
                let ip = self.inner(a, b);
                let target = if i == j { T::one() } else { T::zero() };
                if (ip - C::new(target, T::zero())).norm() > tol {
                    return Err(Error::InvalidTable(format!("rows {i} and {j} are not orthonormal")));
                }
            }
        }
        Ok(())
    }

    pub fn order(&self) -> usize {
        self.class_sizes.iter().sum()
    }

    pub fn num_classes(&self) -> usize {
        self.class_sizes.len()
    }

    /// `χ(e)` per row.
    pub fn degrees(&self) -> Vec<T> {
        self.characters.iter().map(|row| row[0].re).collect()
    }

    /// `(1/|G|) Σ_c |c| a(c) conj(b(c))`.
    pub fn inner(&self, a: &[C<T>], b: &[C<T>]) -> C<T> {
        let mut acc = C::new(T::zero(), T::zero());
        for ((&s, x), y) in self.class_sizes.iter().zip(a).zip(b) {
            acc += x * y.conj() * T::from_usize_lossy(s);
        }
        acc / T::from_usize_lossy(self.order())
    }

    /// Row `i` divided by its degree.
    pub fn normalized(&self, i: usize) -> Vec<C<T>> {
        let deg = self.characters[i][0];
        self.characters[i].iter().map(|z| z / deg).collect()
    }

    /// Table of `Z/n`: `χ_j(g^m) = exp(2πi jm/n)`.
    pub fn cyclic(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Empty("cyclic group"));
        }
        let rows = (0..n)
            .map(|j| {
                (0..n)
                    .map(|m| unimodular(T::TAU() * T::from_usize_lossy((j * m) % n) / T::from_usize_lossy(n)))
                    .collect()
            })
            .collect();
        let mut t = Self::new(vec![1; n], rows)?;
        t.name = Some(format!("Z{n}"));
        Ok(t)
    }

    /// One of the tables shipped with the crate: `z2`, `z3`, `z4`, `z6`, `s3`.
    pub fn bundled(name: &str) -> Result<Self> {
        let key = name.to_ascii_lowercase();
        let (_, text) = BUNDLED
            .iter()
            .find(|(n, _)| *n == key)
            .ok_or_else(|| Error::Unsupported(format!("no bundled table named {name}")))?;
        Ok(serde_json::from_str(text)?)
    }

    pub fn bundled_names() -> Vec<&'static str> {
        BUNDLED.iter().map(|(n, _)| *n).collect()
    }
}

/// A function on conjugacy classes; a trace when positive definite with value 1 at `e`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ClassFunction<T: Real = f64> {
    pub values: Vec<C<T>>,
}

impl<T: Real> ClassFunction<T> {
    pub fn new(values: Vec<C<T>>) -> Self {
        Self { values }
    }

    /// `Σ c_i χ_i/χ_i(e)`.
    pub fn mix(table: &CharacterTable<T>, weights: &[T]) -> Result<Self> {
        if weights.len() != table.characters.len() {
            return Err(Error::DimensionMismatch { expected: table.characters.len(), found: weights.len() });
        }
        let mut values = vec![C::new(T::zero(), T::zero()); table.num_classes()];
        for (i, &w) in weights.iter().enumerate() {
            for (acc, z) in values.iter_mut().zip(table.normalized(i)) {
                *acc += z * w;
            }
        }
        Ok(Self { values })
    }
}

/// `min_{χ ≠ 1} max_c (1 − Re χ(c)/χ(e))`.
pub fn isolation_gap<T: Real>(table: &CharacterTable<T>) -> Result<T> {
    if table.characters.len() < 2 {
        return Err(Error::Unsupported("the trivial group has no nontrivial character".into()));
    }
    Ok((1..table.characters.len())
        .map(|i| table.normalized(i).iter().map(|z| T::one() - z.re).fold(T::neg_infinity(), T::max))
        .fold(T::infinity(), T::min))
}

fn require_normalized<T: Real>(table: &CharacterTable<T>, phi: &ClassFunction<T>) -> Result<()> {
    if phi.values.len() != table.num_classes() {
        return Err(Error::DimensionMismatch { expected: table.num_classes(), found: phi.values.len() });
    }
    let defect = (phi.values[0] - C::new(T::one(), T::zero())).norm();
    if defect > T::lit(1e-9) {
        return Err(Error::NotNormalized(format!("phi(e) differs from 1 by {defect:e}")));
    }
    Ok(())
}

/// Weights `c_χ = ⟨φ, χ⟩ χ(e)` in `φ = Σ c_χ χ/χ(e)`.
///
/// They sum to 1 for a normalized class function; a weight below `−1e-9`
/// means `φ` is not positive definite.
pub fn decompose_trace<T: Real>(table: &CharacterTable<T>, phi: &ClassFunction<T>) -> Result<Vec<T>> {
    require_normalized(table, phi)?;
    Ok(table
        .characters
        .iter()
        .map(|row| (table.inner(&phi.values, row) * row[0].re).re)
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "")]
pub struct WeightBound<T: Real = f64> {
    pub gap: T,
    /// `max_c |1 − φ(c)|`.
    pub sup_dev: T,
    /// `1 − sup_dev/gap`.
    pub bound: T,
    pub actual_trivial_weight: T,
    /// `actual ≥ bound − 1e-9`.
    pub holds: bool,
    /// `1 − Σ_{c ≠ e} (1 − Re φ(c)) / gap`, which follows from summing the
    /// gap inequality over the nontrivial classes.
    pub summed_bound: T,
    pub summed_holds: bool,
}

/// Compare the trivial weight of `φ` with the bounds derived from the gap.
///
/// `bound` uses a single worst class and can exceed the actual weight when
/// several nontrivial characters share the mass (for instance the uniform mix
/// of the nontrivial characters of `Z/4`); `summed_bound` always holds.
pub fn weight_bound_check<T: Real>(table: &CharacterTable<T>, phi: &ClassFunction<T>) -> Result<WeightBound<T>> {
    let gap = isolation_gap(table)?;
    let weights = decompose_trace(table, phi)?;
    let sup_dev = phi.values.iter().map(|z| (C::new(T::one(), T::zero()) - z).norm()).fold(T::zero(), T::max);
    let bound = T::one() - sup_dev / gap;
    let summed: T = phi.values[1..].iter().map(|z| T::one() - z.re).sum();
    let summed_bound = T::one() - summed / gap;
    let actual = weights[0];
    let slack = T::lit(BOUND_SLACK);
    Ok(WeightBound {
        gap,
        sup_dev,
        bound,
        actual_trivial_weight: actual,
        holds: actual >= bound - slack,
        summed_bound,
        summed_holds: actual >= summed_bound - slack,
    })
}

/// A random trace: weights drawn uniformly from the simplex (normalized
/// exponentials), mixed over the normalized characters.
pub fn random_trace<T: Real>(table: &CharacterTable<T>, seed: u64) -> (Vec<T>, ClassFunction<T>) {
    let mut rng = rng_from_seed(seed);
    let raw: Vec<f64> = (0..table.characters.len()).map(|_| rng.sample(Exp1)).collect();
    let total: f64 = raw.iter().sum();
    let weights: Vec<T> = raw.iter().map(|x| T::lit(x / total)).collect();
    let phi = ClassFunction::mix(table, &weights).expect("one weight per row");
    (weights, phi)
}
