use super::{AlgebraBasis, MAX_PASSES};
use crate::error::{Error, Result};
use crate::linalg::{axpy_slice, hs_dot, Matrix, Tolerance};
use crate::scalar::{Real, C};

/// Incremental orthonormal basis of flattened vectors.
///
/// A candidate is orthogonalized by modified Gram–Schmidt; if the residual
/// clears the acceptance threshold, a second pass removes the components lost
/// to cancellation before the final decision.
#[derive(Debug, Clone)]
pub struct Ortho<T: Real = f64> {
    len: usize,
    basis: Vec<Vec<C<T>>>,
    rank_tol: T,
}

impl<T: Real> Ortho<T> {
    pub fn new(len: usize, rank_tol: T) -> Self {
        Self { len, basis: Vec::new(), rank_tol }
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn vectors(&self) -> &[Vec<C<T>>] {
        &self.basis
    }

    fn sweep(&self, v: &mut [C<T>]) {
        for q in &self.basis {
            let c = hs_dot(q, v);
            axpy_slice(v, -c, q);
        }
    }

    /// Acceptance threshold `rank_tol · (1 + max |entry|)` of the raw candidate.
    pub fn threshold(&self, candidate: &[C<T>]) -> T {
        let max = candidate.iter().map(|z| z.norm()).fold(T::zero(), T::max);
        self.rank_tol * (T::one() + max)
    }

    /// Norm of the component of `candidate` orthogonal to the current span.
    pub fn residual(&self, candidate: &[C<T>]) -> T {
        let mut v = candidate.to_vec();
        self.sweep(&mut v);
        self.sweep(&mut v);
        norm(&v)
    }

    /// Adds the new direction of `candidate`, if any. Returns whether it was added.
    pub fn try_add(&mut self, candidate: &[C<T>]) -> bool {
        assert_eq!(candidate.len(), self.len, "candidate length");
        if self.basis.len() >= self.len {
            return false;
        }
        let threshold = self.threshold(candidate);
        let mut v = candidate.to_vec();
        self.sweep(&mut v);
        if norm(&v) <= threshold {
            return false;
        }
        self.sweep(&mut v);
        let r = norm(&v);
        if r <= threshold {
            return false;
        }
        self.push_normalized(v, r);
        true
    }

    fn push_normalized(&mut self, mut v: Vec<C<T>>, r: T) {
        let inv = T::one() / r;
        for z in v.iter_mut() {
            *z *= inv;
        }
        self.basis.push(v);
    }

    /// Same decisions as calling [`Ortho::try_add`] on each candidate in turn.
    ///
    /// The first sweep against the basis present on entry is done for the whole
    /// batch at once, so each basis vector is read from memory once per batch
    /// instead of once per candidate.
    pub fn try_add_batch(&mut self, candidates: &[&[C<T>]]) -> Vec<bool> {
        let start = self.basis.len();
        let thresholds: Vec<T> = candidates.iter().map(|c| self.threshold(c)).collect();
        let mut work: Vec<Vec<C<T>>> = candidates
            .iter()
            .map(|c| {
                assert_eq!(c.len(), self.len, "candidate length");
                c.to_vec()
            })
            .collect();
        if start < self.len {
            for q in &self.basis {
                for v in work.iter_mut() {
                    let c = hs_dot(q, v);
                    axpy_slice(v, -c, q);
                }
            }
        }
        work.into_iter()
            .zip(thresholds)
            .map(|(mut v, threshold)| {
                if self.basis.len() >= self.len {
                    return false;
                }
                for q in &self.basis[start..] {
                    let c = hs_dot(q, &v);
                    axpy_slice(&mut v, -c, q);
                }
                if norm(&v) <= threshold {
                    return false;
                }
                self.sweep(&mut v);
                let r = norm(&v);
                if r <= threshold {
                    return false;
                }
                self.push_normalized(v, r);
                true
            })
            .collect()
    }
}

/// Candidates orthogonalized together by [`close_with_letters`].
const BATCH: usize = 32;

fn norm<T: Real>(v: &[C<T>]) -> T {
    v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
}

/// Breadth-first closure of the identity under left multiplication by `letters`.
///
/// The letters must already contain the adjoints needed for *-closure.
pub fn close_with_letters<T: Real>(
    k: usize,
    letters: &[(String, Matrix<T>)],
    tol: &Tolerance<T>,
) -> Result<AlgebraBasis<T>> {
    let full = k * k;
    let mut ortho = Ortho::new(full, tol.rank);
    let mut raw: Vec<Matrix<T>> = Vec::new();
    let mut words: Vec<Vec<usize>> = Vec::new();

    let id = Matrix::identity(k);
    ortho.try_add(id.as_slice());
    raw.push(id);
    words.push(Vec::new());

    let mut frontier = vec![0usize];
    let mut passes = 0;
    'outer: while !frontier.is_empty() && ortho.len() < full {
        if passes == MAX_PASSES {
            return Err(Error::ClosureCap(MAX_PASSES));
        }
        passes += 1;
        let mut next = Vec::new();
        for &idx in &frontier {
            for (chunk_no, chunk) in letters.chunks(BATCH).enumerate() {
                let cands: Vec<Matrix<T>> = chunk.iter().map(|(_, g)| g.matmul(&raw[idx])).collect();
                let slices: Vec<&[C<T>]> = cands.iter().map(Matrix::as_slice).collect();
                let added = ortho.try_add_batch(&slices);
                for (offset, (cand, ok)) in cands.into_iter().zip(added).enumerate() {
                    if !ok {
                        continue;
                    }
                    let mut w = Vec::with_capacity(words[idx].len() + 1);
                    w.push(chunk_no * BATCH + offset);
                    w.extend_from_slice(&words[idx]);
                    raw.push(cand);
                    words.push(w);
                    next.push(raw.len() - 1);
                }
                if ortho.len() == full {
                    break 'outer;
                }
            }
        }
        frontier = next;
    }

    let certificate = words
        .iter()
        .map(|w| {
            if w.is_empty() {
                "I".to_string()
            } else {
                w.iter().map(|&li| letters[li].0.as_str()).collect::<Vec<_>>().join(".")
            }
        })
        .collect();
    let basis = ortho
        .basis
        .into_iter()
        .map(|v| Matrix::from_vec_unchecked(k, v))
        .collect();
    Ok(AlgebraBasis { ambient_dim: k, basis, certificate, passes })
}
