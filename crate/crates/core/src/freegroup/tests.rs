use proptest::prelude::*;

use super::*;
use crate::linalg::{haar_unitary, unit};

fn tol() -> Tolerance {
    Tolerance::default()
}

fn surjective_haar(d: usize, k: usize, seed: u64) -> UnitaryTuple {
    let rep = UnitaryTuple::<f64>::haar(d, k, seed);
    assert!(is_surjective(rep.unitaries(), &tol()).unwrap().surjective);
    rep
}

#[test]
fn construction_checks_unitarity() {
    assert!(UnitaryTuple::new(vec![unit::<f64>(2, 0, 0)], &tol()).is_err());
    assert!(UnitaryTuple::new(vec![Matrix::<f64>::identity(2), Matrix::identity(3)], &tol()).is_err());
    let t = UnitaryTuple::<f64>::trivial(3, 2);
    assert_eq!((t.d(), t.k()), (3, 2));
}

#[test]
fn serde_roundtrip() {
    let rep = UnitaryTuple::<f64>::haar(2, 3, 5);
    let text = serde_json::to_string(&rep).unwrap();
    let back: UnitaryTuple = serde_json::from_str(&text).unwrap();
    assert_eq!(back.unitaries(), rep.unitaries());
    let bad = text.replace("\"d\":2", "\"d\":3");
    assert!(serde_json::from_str::<UnitaryTuple>(&bad).is_err());
}

#[test]
fn amplification_preserves_moments_exactly() {
    let rho = UnitaryTuple::<f64>::haar(2, 3, 1);
    let words = ball(2, 4);
    let base = rho.moments(&words).unwrap();
    for m in 1..=5 {
        let amp = amplify(&rho, m).unwrap();
        let got = amp.moments(&words).unwrap();
        for (a, b) in got.iter().zip(&base) {
            assert!((a - b).norm() < 1e-12, "m = {m}");
        }
    }
}

#[test]
fn gcd_mix_is_exact_midpoint() {
    let r1 = UnitaryTuple::<f64>::haar(2, 2, 1);
    let r2 = UnitaryTuple::<f64>::haar(2, 3, 2);
    let mix = mix_reps(&[&r1, &r2], &[3, 2]).unwrap();
    let words = ball(2, 3);
    let (m1, m2, mm) = (r1.moments(&words).unwrap(), r2.moments(&words).unwrap(), mix.moments(&words).unwrap());
    for i in 0..words.len() {
        assert!(((m1[i] + m2[i]) * 0.5 - mm[i]).norm() < 1e-12);
    }
    assert!(mix_reps(&[&r1, &UnitaryTuple::<f64>::haar(3, 2, 1)], &[1, 1]).is_err());
    assert!(mix_reps(&[&r1], &[1, 1]).is_err());
}

#[test]
fn convex_mix_weights() {
    let r1 = UnitaryTuple::<f64>::haar(2, 2, 3);
    let r2 = UnitaryTuple::<f64>::haar(2, 3, 4);
    let mix = convex_mix(&[&r1, &r2], &[1, 3]).unwrap();
    let words = ball(2, 2);
    let (m1, m2, mm) = (r1.moments(&words).unwrap(), r2.moments(&words).unwrap(), mix.moments(&words).unwrap());
    for i in 0..words.len() {
        assert!((m1[i] * 0.25 + m2[i] * 0.75 - mm[i]).norm() < 1e-12);
    }
}

#[test]
fn desymmetrization_bound() {
    let r1 = UnitaryTuple::<f64>::haar(2, 2, 11);
    let r2 = UnitaryTuple::<f64>::haar(2, 2, 12);
    let words = ball(2, 3);
    for m in [2usize, 5, 10] {
        let sym = mix_reps(&[&r1, &r2], &[m, m]).unwrap();
        let shifted = desymmetrized_mix(&r1, &r2, m, &[1]).unwrap();
        let report = MomentReport::compare(&shifted, &sym, &words, vec![]).unwrap();
        assert!(report.sup_delta <= 1.0 / m as f64 + 1e-12, "m = {m}: {}", report.sup_delta);
        let plain = mix_reps(&[&r1, &r2], &[m + 1, m - 1]).unwrap();
        let report = MomentReport::compare(&plain, &sym, &words, vec![]).unwrap();
        assert!(report.sup_delta <= 1.0 / m as f64 + 1e-12);
    }
    assert!(desymmetrized_mix(&r1, &r2, 0, &[]).is_err());
    assert!(desymmetrized_mix(&r1, &r2, 2, &[5]).is_err());
}

#[test]
fn perturbation_of_surjective_rep_succeeds_first_try() {
    let rep = surjective_haar(2, 3, 7);
    let mut first = 0;
    for seed in 0..40 {
        let (_, report) = perturb_to_surjective(&rep, 0.01, seed, &PerturbOptions::default()).unwrap();
        assert!(report.surjective);
        assert!(report.achieved_generator_distance <= 0.01 + 1e-10);
        assert!(report.certificate.is_some());
        first += usize::from(report.tries_used == 1);
    }
    assert!(first >= 38);
}

#[test]
fn trivial_tuple_becomes_surjective() {
    let rep = UnitaryTuple::<f64>::trivial(2, 2);
    for seed in 0..100 {
        let (out, report) = perturb_to_surjective(&rep, 0.3, seed, &PerturbOptions::default()).unwrap();
        assert!(report.surjective && report.tries_used <= 10, "seed {seed}");
        assert!(is_surjective(out.unitaries(), &tol()).unwrap().surjective);
    }
}

#[test]
fn zero_perturbation_cannot_help() {
    let rep = UnitaryTuple::<f64>::trivial(2, 2);
    let opts = PerturbOptions { max_tries: 4, ..Default::default() };
    let (_, report) = perturb_to_surjective(&rep, 0.0, 1, &opts).unwrap();
    assert!(!report.surjective);
    assert_eq!(report.tries_used, 4);
    assert!(report.certificate.is_none());
    assert!(perturb_to_surjective(&UnitaryTuple::<f64>::trivial(1, 2), 0.1, 1, &opts).is_err());
}

#[test]
fn midpoint_of_identical_reps() {
    let rep = surjective_haar(2, 3, 21);
    let (_, report) = approx_midpoint_fd(&rep, &rep, 0.05, 3, &PerturbOptions::default()).unwrap();
    assert!(report.surjective);
    assert!(report.moment_report.sup_delta <= 4.0 * 0.05 + 1e-8);
}

#[test]
fn midpoint_of_two_haar_triples() {
    let r1 = surjective_haar(2, 3, 31);
    let r2 = surjective_haar(2, 3, 32);
    let (out, report) = approx_midpoint_fd(&r1, &r2, 0.05, 9, &PerturbOptions::default()).unwrap();
    assert!(report.surjective && report.warnings.is_empty());
    assert!(report.moment_report.sup_delta <= 0.2);
    assert!(is_factor(out.unitaries(), &tol()).unwrap());
    // Brute-force oracle for the reported values.
    let words = ball(2, 4);
    for (w, v) in words.iter().zip(&report.moment_report.values_a) {
        let direct = crate::words::evaluate(w, &out).unwrap().normalized_trace();
        assert!((direct - v).norm() < 1e-12);
    }
}

#[test]
fn midpoint_sweep_is_monotone() {
    let r1 = surjective_haar(2, 3, 41);
    let r2 = surjective_haar(2, 3, 42);
    let mut last = f64::INFINITY;
    for eps in [0.3, 0.1, 0.03] {
        let (_, report) = approx_midpoint_fd(&r1, &r2, eps, 7, &PerturbOptions::default()).unwrap();
        assert!(report.surjective);
        assert!(report.moment_report.sup_delta <= 4.0 * eps + 1e-8);
        assert!(report.moment_report.sup_delta <= last);
        last = report.moment_report.sup_delta;
    }
}

#[test]
fn midpoint_warns_on_non_factor_input() {
    let r1 = mix_reps(&[&UnitaryTuple::<f64>::haar(2, 1, 1), &UnitaryTuple::haar(2, 1, 2)], &[1, 1]).unwrap();
    let r2 = surjective_haar(2, 2, 3);
    let (_, report) = approx_midpoint_fd(&r1, &r2, 0.1, 1, &PerturbOptions::default()).unwrap();
    assert_eq!(report.warnings.len(), 1);
}

#[test]
fn seeded_runs_are_reproducible() {
    let rep = UnitaryTuple::<f64>::trivial(2, 3);
    let (a, ra) = perturb_to_surjective(&rep, 0.2, 99, &PerturbOptions::default()).unwrap();
    let (b, rb) = perturb_to_surjective(&rep, 0.2, 99, &PerturbOptions::default()).unwrap();
    assert_eq!(a.unitaries(), b.unitaries());
    assert_eq!(ra.seed_used, rb.seed_used);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn midpoint_outputs_meet_their_guarantees(seed in any::<u64>(), eps in 0.01f64..0.3) {
        let r1 = UnitaryTuple::<f64>::haar(2, 2, seed);
        let r2 = UnitaryTuple::<f64>::haar(2, 2, seed ^ 0x55);
        let opts = PerturbOptions { radius: 3, ..Default::default() };
        let (out, report) = approx_midpoint_fd(&r1, &r2, eps, seed, &opts).unwrap();
        for u in out.unitaries() {
            prop_assert!(crate::linalg::structure_defect(u, crate::linalg::Structure::Unitary) < 1e-10);
        }
        prop_assert!(report.achieved_generator_distance <= eps + 1e-10);
        if report.surjective {
            prop_assert!(report.moment_report.sup_delta <= 3.0 * eps + 1e-8);
        }
    }

    #[test]
    fn haar_pairs_are_irreducible(seed in any::<u64>()) {
        let gens = [haar_unitary::<f64>(3, seed), haar_unitary(3, seed ^ 1)];
        prop_assert!(is_factor(&gens, &tol()).unwrap());
    }
}
