use proptest::prelude::*;

use super::*;
use crate::freegroup::{mix_reps, UnitaryTuple};
use crate::linalg::{direct_sum, haar_unitary, hermitian_eigenvalues, standard_matrix, unit, StandardKind};
use crate::matprod::mn_rep_from_unitaries;

fn tol() -> Tolerance {
    Tolerance::default()
}

fn std(kind: StandardKind, n: usize) -> Matrix {
    standard_matrix(kind, n).unwrap()
}

fn diag_pm() -> Matrix {
    Matrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]).unwrap()
}

/// Evaluate a certificate word such as `g2*.g1` (leftmost factor first).
fn eval_certificate(word: &str, gens: &[Matrix]) -> Matrix {
    let k = gens[0].dim();
    if word == "I" {
        return Matrix::identity(k);
    }
    word.split('.').fold(Matrix::identity(k), |acc, tok| {
        let (name, star) = tok.strip_suffix('*').map_or((tok, false), |t| (t, true));
        let idx: usize = name.trim_start_matches('g').parse().unwrap();
        let g = if star { gens[idx - 1].adjoint() } else { gens[idx - 1].clone() };
        acc.matmul(&g)
    })
}

/// Smallest eigenvalue of the Gram matrix of `ms` (Hilbert–Schmidt).
fn min_gram_eigenvalue(ms: &[Matrix]) -> f64 {
    let gram = Matrix::from_fn(ms.len(), |i, j| ms[i].hs_inner(&ms[j]));
    hermitian_eigenvalues(&gram)[0]
}

#[test]
fn generated_algebra_examples() {
    let e11 = unit(2, 0, 0);
    assert_eq!(generated_algebra(&[e11, std(StandardKind::Cycle, 2)], &tol()).unwrap().dim(), 4);
    assert_eq!(generated_algebra(&[Matrix::<f64>::identity(3)], &tol()).unwrap().dim(), 1);
    assert_eq!(generated_algebra(&[diag_pm()], &tol()).unwrap().dim(), 2);
    assert!(generated_algebra::<f64>(&[], &tol()).is_err());
    assert!(generated_algebra(&[Matrix::<f64>::identity(2), Matrix::identity(3)], &tol()).is_err());
}

#[test]
fn generator_lemma_all_sizes() {
    for n in 2..=8 {
        for k in 0..n {
            let gens = [std(StandardKind::UBlock(k), n), std(StandardKind::VBlock(k + 1), n), std(StandardKind::Unit(1, 1), n)];
            let s = is_surjective(&gens, &tol()).unwrap();
            assert!(s.surjective, "n = {n}, k = {k}: dim {}", s.algebra_dim);
            assert_eq!(s.certificate.as_ref().unwrap().len(), n * n);
        }
    }
}

#[test]
fn certificate_words_are_independent() {
    let gens = [std(StandardKind::UBlock(1), 4), std(StandardKind::VBlock(2), 4), std(StandardKind::Unit(1, 1), 4)];
    let s = is_surjective(&gens, &tol()).unwrap();
    let evals: Vec<Matrix> = s.certificate.unwrap().iter().map(|w| eval_certificate(w, &gens)).collect();
    assert_eq!(evals.len(), 16);
    assert!(min_gram_eigenvalue(&evals) > 1e-6);
}

#[test]
fn surjectivity_examples() {
    let s = is_surjective(&[Matrix::<f64>::identity(2)], &tol()).unwrap();
    assert!(!s.surjective);
    assert!(s.certificate.is_none());
    for seed in 0..100u64 {
        let gens = [haar_unitary::<f64>(5, 2 * seed), haar_unitary(5, 2 * seed + 1)];
        assert!(is_surjective(&gens, &tol()).unwrap().surjective, "seed {seed}");
    }
}

#[test]
fn commutant_examples() {
    assert_eq!(commutant(&[std(StandardKind::Cycle, 3)], &tol()).unwrap().dim(), 3);
    assert_eq!(commutant(&[unit(2, 0, 0), std(StandardKind::Cycle, 2)], &tol()).unwrap().dim(), 1);
    assert_eq!(center(&[diag_pm()], &tol()).unwrap().dim(), 2);
}

#[test]
fn commutant_of_cycle_is_circulant() {
    // Circulants are polynomials in C_n, so each basis vector is constant on diagonals mod n.
    let n = 4;
    let comm = commutant(&[std(StandardKind::Cycle, n)], &tol()).unwrap();
    assert_eq!(comm.dim(), n);
    for b in &comm.basis {
        for i in 0..n {
            for j in 0..n {
                assert!((b[(i, j)] - b[((i + 1) % n, (j + 1) % n)]).norm() < 1e-10);
            }
        }
    }
}

#[test]
fn factor_examples() {
    assert!(is_factor(&[Matrix::<f64>::identity(2)], &tol()).unwrap());
    assert!(!is_factor(&[diag_pm()], &tol()).unwrap());
    assert!(is_factor(&[unit(2, 0, 0), std(StandardKind::Cycle, 2)], &tol()).unwrap());
}

#[test]
fn block_structure_dimensions() {
    // Inequivalent irreducibles of sizes 2 and 3, multiplicities 2 and 1:
    // algebra M_2 ⊕ M_3 (dim 13), commutant M_2 ⊕ C (dim 5), center C² (dim 2).
    let a = UnitaryTuple::<f64>::haar(2, 2, 4);
    let b = UnitaryTuple::<f64>::haar(2, 3, 5);
    let rep = mix_reps(&[&a, &b], &[2, 1]).unwrap();
    let (comm, cent) = commutant_and_center(rep.unitaries(), &tol()).unwrap();
    assert_eq!(generated_algebra(rep.unitaries(), &tol()).unwrap().dim(), 13);
    assert_eq!(comm.dim(), 5);
    assert_eq!(cent.dim(), 2);
    assert!(!is_factor(rep.unitaries(), &tol()).unwrap());
    // Amplification of an irreducible: M_3 ⊗ 1, still a factor.
    let amp = mix_reps(&[&b], &[2]).unwrap();
    assert!(is_factor(amp.unitaries(), &tol()).unwrap());
    assert_eq!(commutant(amp.unitaries(), &tol()).unwrap().dim(), 4);
}

#[test]
fn algebra_and_commutant_commute() {
    let a = UnitaryTuple::<f64>::haar(2, 2, 8);
    let rep = mix_reps(&[&a, &a], &[1, 1]).unwrap();
    let alg = generated_algebra(rep.unitaries(), &tol()).unwrap();
    let comm = commutant(rep.unitaries(), &tol()).unwrap();
    for x in &alg.basis {
        for y in &comm.basis {
            assert!((&x.matmul(y) - &y.matmul(x)).max_abs() < 1e-8);
        }
    }
}

#[test]
fn basis_invariants() {
    let gens = [diag_pm(), unit(2, 0, 1)];
    let alg = generated_algebra(&gens, &tol()).unwrap();
    assert!(alg.gram_defect() < 1e-9);
    assert!(alg.membership_residual(&Matrix::identity(2)) < 1e-12);
    let a = UnitaryTuple::<f64>::haar(2, 2, 1);
    let b = UnitaryTuple::<f64>::haar(2, 2, 2);
    let rep = mix_reps(&[&a, &b], &[1, 1]).unwrap();
    let alg = generated_algebra(rep.unitaries(), &tol()).unwrap();
    assert_eq!(alg.dim(), 8);
    for x in &alg.basis {
        assert!(alg.membership_residual(&x.adjoint()) < 1e-9);
        for g in rep.unitaries() {
            assert!(alg.membership_residual(&g.matmul(x)) < 1e-9);
        }
    }
    // Off-diagonal block units are not in a direct sum of inequivalent blocks.
    assert!(alg.membership_residual(&unit(4, 0, 3)) > 0.5);
}

#[test]
fn same_span_detects_equal_algebras() {
    let gens = [std(StandardKind::Cycle, 3)];
    let a = generated_algebra(&gens, &tol()).unwrap();
    let b = commutant(&gens, &tol()).unwrap();
    assert!(same_span(&a, &b, 1e-9));
    let c = generated_algebra(&[unit(3, 0, 0)], &tol()).unwrap();
    assert!(!same_span(&a, &c, 1e-9));
}

#[test]
fn reduced_closure_agrees_with_direct_closure() {
    let t = tol();
    for (n, d, seed) in [(2, 2, 1u64), (3, 2, 2), (2, 3, 3)] {
        let us: Vec<Matrix> = (0..n - 1).map(|j| haar_unitary(d, seed * 10 + j as u64)).collect();
        let rep = mn_rep_from_unitaries(n, &us, &t).unwrap();
        let units: Vec<Matrix> = rep.labelled_units().into_iter().map(|(_, m)| m).collect();
        let direct = generated_algebra(&units, &t).unwrap();
        let reduced = rep.generated_algebra(&t).unwrap();
        assert_eq!(direct.dim(), reduced.dim(), "n = {n}, d = {d}");
        for x in &direct.basis {
            assert!(reduced.membership_residual(x) < 1e-9);
        }
    }
    // A non-surjective case: u = diag(1, -1) generates only the diagonal of M_2.
    let u = diag_pm();
    let rep = mn_rep_from_unitaries(2, &[u], &t).unwrap();
    let units: Vec<Matrix> = rep.labelled_units().into_iter().map(|(_, m)| m).collect();
    let direct = generated_algebra(&units, &t).unwrap();
    let reduced = rep.generated_algebra(&t).unwrap();
    assert_eq!(direct.dim(), 8);
    assert_eq!(reduced.dim(), 8);
    for x in &direct.basis {
        assert!(reduced.membership_residual(x) < 1e-9);
    }
    let off = direct_sum(&[unit(2, 0, 1), Matrix::zeros(2)]).unwrap();
    assert!((reduced.membership_residual(&off) - direct.membership_residual(&off)).abs() < 1e-9);
}

#[test]
fn reduced_certificate_size() {
    let t = tol();
    let us: Vec<Matrix> = (0..2).map(|j| haar_unitary(2, 40 + j)).collect();
    let rep = mn_rep_from_unitaries(3, &us, &t).unwrap();
    let red = rep.generated_algebra(&t).unwrap();
    assert!(red.is_full());
    let cert = red.certificate();
    assert_eq!(cert.len(), 36);
    assert!(cert[0].starts_with("e.1.1 "));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn generic_pairs_are_surjective(seed in any::<u64>(), k in 2usize..5) {
        let gens = [haar_unitary::<f64>(k, seed), haar_unitary(k, seed.wrapping_add(1))];
        let s = is_surjective(&gens, &tol()).unwrap();
        prop_assert!(s.surjective);
        let evals: Vec<Matrix> = s.certificate.unwrap().iter().map(|w| eval_certificate(w, &gens)).collect();
        prop_assert!(min_gram_eigenvalue(&evals) > 1e-9);
    }

    #[test]
    fn conjugation_preserves_dimensions(seed in any::<u64>()) {
        let gens = [diag_pm(), unit(2, 0, 0)];
        let u = haar_unitary::<f64>(2, seed);
        let conj: Vec<Matrix> = gens.iter().map(|g| u.matmul(g).matmul(&u.adjoint())).collect();
        prop_assert_eq!(generated_algebra(&conj, &tol()).unwrap().dim(), 2);
        prop_assert_eq!(commutant(&conj, &tol()).unwrap().dim(), 2);
    }
}
