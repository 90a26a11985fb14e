//! Eigen and QR decompositions on [`Matrix`], written directly against [`Real`].

use num_complex::Complex;
use num_traits::{One, Zero};

use super::matrix::Matrix;
use crate::error::{Error, Result};
use crate::scalar::{cr, Real, C};

const MAX_SWEEPS: usize = 60;

/// Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// Returns eigenvalues in ascending order and the matching eigenvectors as the
/// columns of a unitary matrix. Only the Hermitian part of `h` is used.
pub fn hermitian_eigen<T: Real>(h: &Matrix<T>) -> (Vec<T>, Matrix<T>) {
    let n = h.dim();
    let mut a = hermitian_part(h);
    let mut v = Matrix::<T>::identity(n);
    jacobi(&mut a, Some(&mut v));
    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<T> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&x, &y| diag[x].partial_cmp(&diag[y]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = Matrix::from_fn(n, |r, c| v[(r, order[c])]);
    (values, vectors)
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues<T: Real>(h: &Matrix<T>) -> Vec<T> {
    let mut a = hermitian_part(h);
    jacobi(&mut a, None);
    let mut values: Vec<T> = (0..a.dim()).map(|i| a[(i, i)].re).collect();
    values.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    values
}

fn hermitian_part<T: Real>(h: &Matrix<T>) -> Matrix<T> {
    let half = T::lit(0.5);
    Matrix::from_fn(h.dim(), |i, j| (h[(i, j)] + h[(j, i)].conj()) * half)
}

fn jacobi<T: Real>(a: &mut Matrix<T>, mut v: Option<&mut Matrix<T>>) {
    let n = a.dim();
    if n < 2 {
        return;
    }
    let eps = T::epsilon();
    let scale = a.frobenius_norm();
    if scale == T::zero() {
        return;
    }
    for _ in 0..MAX_SWEEPS {
        let mut off = T::zero();
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= eps * scale * T::lit(1e-2) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= eps * T::lit(1e-3) * scale {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (T::lit(2.0) * mag);
                let t = {
                    let s = if theta >= T::zero() { T::one() } else { -T::one() };
                    s / (theta.abs() + (theta * theta + T::one()).sqrt())
                };
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                // G = diag(1, e^{-iα}) · [[c, s], [-s, c]] with α = arg(a_pq).
                let phase = apq / mag;
                let g_pp = cr(c);
                let g_pq = cr(s);
                let g_qp = phase.conj() * (-s);
                let g_qq = phase.conj() * c;
                rotate_columns(a, p, q, g_pp, g_pq, g_qp, g_qq);
                rotate_rows(a, p, q, g_pp, g_pq, g_qp, g_qq);
                a[(p, q)] = C::zero();
                a[(q, p)] = C::zero();
                a[(p, p)] = cr(a[(p, p)].re);
                a[(q, q)] = cr(a[(q, q)].re);
                if let Some(v) = v.as_deref_mut() {
                    rotate_columns(v, p, q, g_pp, g_pq, g_qp, g_qq);
                }
            }
        }
    }
}

/// `m ← m·G` restricted to columns `p`, `q`.
#[inline]
fn rotate_columns<T: Real>(m: &mut Matrix<T>, p: usize, q: usize, g_pp: C<T>, g_pq: C<T>, g_qp: C<T>, g_qq: C<T>) {
    for k in 0..m.dim() {
        let xp = m[(k, p)];
        let xq = m[(k, q)];
        m[(k, p)] = xp * g_pp + xq * g_qp;
        m[(k, q)] = xp * g_pq + xq * g_qq;
    }
}

/// `m ← G*·m` restricted to rows `p`, `q`.
#[inline]
fn rotate_rows<T: Real>(m: &mut Matrix<T>, p: usize, q: usize, g_pp: C<T>, g_pq: C<T>, g_qp: C<T>, g_qq: C<T>) {
    let (cpp, cpq, cqp, cqq) = (g_pp.conj(), g_pq.conj(), g_qp.conj(), g_qq.conj());
    for k in 0..m.dim() {
        let xp = m[(p, k)];
        let xq = m[(q, k)];
        m[(p, k)] = cpp * xp + cqp * xq;
        m[(q, k)] = cpq * xp + cqq * xq;
    }
}

/// Householder QR. Returns `(Q, R)` with `Q` unitary and `R` upper triangular.
pub fn qr<T: Real>(a: &Matrix<T>) -> (Matrix<T>, Matrix<T>) {
    let n = a.dim();
    let mut r = a.clone();
    let mut q = Matrix::<T>::identity(n);
    let two = T::lit(2.0);
    for k in 0..n.saturating_sub(1) {
        let norm = (k..n).map(|i| r[(i, k)].norm_sqr()).sum::<T>().sqrt();
        if norm == T::zero() {
            continue;
        }
        let x0 = r[(k, k)];
        let phase = if x0.norm() == T::zero() { C::one() } else { x0 / x0.norm() };
        let alpha = -phase * norm;
        let mut v: Vec<C<T>> = (k..n).map(|i| r[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        if vnorm == T::zero() {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vnorm;
        }
        for j in k..n {
            let mut dot = C::zero();
            for (i, vi) in v.iter().enumerate() {
                dot += vi.conj() * r[(k + i, j)];
            }
            let dot = dot * two;
            for (i, vi) in v.iter().enumerate() {
                r[(k + i, j)] -= *vi * dot;
            }
        }
        for row in 0..n {
            let mut dot = C::zero();
            for (i, vi) in v.iter().enumerate() {
                dot += q[(row, k + i)] * *vi;
            }
            let dot = dot * two;
            for (i, vi) in v.iter().enumerate() {
                q[(row, k + i)] -= dot * vi.conj();
            }
        }
        for i in (k + 1)..n {
            r[(i, k)] = C::zero();
        }
    }
    (q, r)
}

/// Eigenvalues of a general complex matrix: Householder reduction to upper
/// Hessenberg form followed by single-shift QR iteration with deflation.
pub fn eigenvalues<T: Real>(a: &Matrix<T>) -> Result<Vec<C<T>>> {
    let n = a.dim();
    let mut h = hessenberg(a);
    let mut out = vec![C::zero(); n];
    let eps = T::epsilon();
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    loop {
        if hi == 0 {
            out[0] = h[(0, 0)];
            break;
        }
        // Find the start of the active unreduced block.
        let mut l = hi;
        while l > 0 {
            let sub = h[(l, l - 1)].norm();
            let local = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            let floor = if local == T::zero() { h.max_abs() } else { local };
            if sub <= eps * floor {
                h[(l, l - 1)] = C::zero();
                break;
            }
            l -= 1;
        }
        if l == hi {
            out[hi] = h[(hi, hi)];
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > 60 * n.max(4) {
            return Err(Error::NoConvergence);
        }
        let shift = if iter % 11 == 10 {
            // Exceptional shift to break cycles.
            h[(hi, hi)] + cr(h[(hi, hi - 1)].norm() * T::lit(0.75))
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };
        qr_step(&mut h, l, hi, shift);
    }
    Ok(out)
}

fn wilkinson_shift<T: Real>(a: C<T>, b: C<T>, c: C<T>, d: C<T>) -> C<T> {
    let half = T::lit(0.5);
    let tr = (a + d) * half;
    let det = a * d - b * c;
    let disc = (tr * tr - det).sqrt();
    let l1 = tr + disc;
    let l2 = tr - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

fn qr_step<T: Real>(h: &mut Matrix<T>, l: usize, hi: usize, shift: C<T>) {
    for i in l..=hi {
        h[(i, i)] -= shift;
    }
    let mut rots: Vec<(T, C<T>)> = Vec::with_capacity(hi - l);
    for k in l..hi {
        let x = h[(k, k)];
        let y = h[(k + 1, k)];
        let (c, s) = givens(x, y);
        for j in k..=hi {
            let a = h[(k, j)];
            let b = h[(k + 1, j)];
            h[(k, j)] = a * c + s * b;
            h[(k + 1, j)] = -s.conj() * a + b * c;
        }
        rots.push((c, s));
    }
    for (idx, &(c, s)) in rots.iter().enumerate() {
        let k = l + idx;
        let top = (k + 2).min(hi);
        for i in l..=top {
            let a = h[(i, k)];
            let b = h[(i, k + 1)];
            h[(i, k)] = a * c + s.conj() * b;
            h[(i, k + 1)] = -s * a + b * c;
        }
    }
    for i in l..=hi {
        h[(i, i)] += shift;
    }
}

/// Rotation `[[c, s], [-s̄, c]]` mapping `(x, y)` to `(·, 0)`.
fn givens<T: Real>(x: C<T>, y: C<T>) -> (T, C<T>) {
    let ny = y.norm();
    if ny == T::zero() {
        return (T::one(), C::zero());
    }
    let nx = x.norm();
    if nx == T::zero() {
        return (T::zero(), y.conj() / ny);
    }
    let r = nx.hypot(ny);
    let phase = x / nx;
    (nx / r, phase * y.conj() / r)
}

fn hessenberg<T: Real>(a: &Matrix<T>) -> Matrix<T> {
    let n = a.dim();
    let mut h = a.clone();
    let two = T::lit(2.0);
    for k in 0..n.saturating_sub(2) {
        let norm = ((k + 1)..n).map(|i| h[(i, k)].norm_sqr()).sum::<T>().sqrt();
        if norm == T::zero() {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let phase = if x0.norm() == T::zero() { C::one() } else { x0 / x0.norm() };
        let mut v: Vec<C<T>> = ((k + 1)..n).map(|i| h[(i, k)]).collect();
        v[0] += phase * norm;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        if vnorm == T::zero() {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vnorm;
        }
        // Left: rows k+1.., all columns.
        for j in 0..n {
            let mut dot = C::zero();
            for (i, vi) in v.iter().enumerate() {
                dot += vi.conj() * h[(k + 1 + i, j)];
            }
            let dot = dot * two;
            for (i, vi) in v.iter().enumerate() {
                h[(k + 1 + i, j)] -= *vi * dot;
            }
        }
        // Right: all rows, columns k+1..
        for row in 0..n {
            let mut dot = C::zero();
            for (i, vi) in v.iter().enumerate() {
                dot += h[(row, k + 1 + i)] * *vi;
            }
            let dot = dot * two;
            for (i, vi) in v.iter().enumerate() {
                h[(row, k + 1 + i)] -= dot * vi.conj();
            }
        }
        for i in (k + 2)..n {
            h[(i, k)] = C::zero();
        }
    }
    h
}

/// `exp(i·t·H)` for Hermitian `H`, through its eigen-decomposition.
pub fn exp_i_hermitian<T: Real>(h: &Matrix<T>, t: T) -> Matrix<T> {
    let (values, vectors) = hermitian_eigen(h);
    let n = h.dim();
    let phases: Vec<C<T>> = values.iter().map(|&l| Complex::from_polar(T::one(), t * l)).collect();
    let mut scaled = vectors.clone();
    for i in 0..n {
        for j in 0..n {
            scaled[(i, j)] *= phases[j];
        }
    }
    scaled.matmul(&vectors.adjoint())
}
