use tracelab::algebra::{generated_algebra, is_factor, is_surjective};
use tracelab::channels::{channel_from_rep, verify_channel, MidpointChannelOptions};
use tracelab::freegroup::{approx_midpoint_fd, PerturbOptions};
use tracelab::io::DataFile;
use tracelab::linalg::{haar_unitary, standard_matrix, Matrix, StandardKind};
use tracelab::matprod::{extract_unitaries, joint_rep, mn_rep_from_unitaries, standardize};
use tracelab::words::{ball, monomial_ball, moment_vector};
use tracelab::{CMatrix32, MnMnRep, Tolerance, UnitaryTuple};

#[test]
fn generator_lemma_in_single_precision() {
    let tol = tracelab::linalg::Tolerance::<f32>::default();
    for n in 2..=5 {
        for k in 0..n {
            let gens: Vec<CMatrix32> = vec![
                standard_matrix(StandardKind::UBlock(k), n).unwrap(),
                standard_matrix(StandardKind::VBlock(k + 1), n).unwrap(),
                standard_matrix(StandardKind::Unit(1, 1), n).unwrap(),
            ];
            assert_eq!(generated_algebra(&gens, &tol).unwrap().dim(), n * n, "n = {n}, k = {k}");
        }
    }
}

#[test]
fn free_group_midpoint_survives_a_file_round_trip() {
    let tol = Tolerance::default();
    let r1 = UnitaryTuple::haar(2, 3, 1);
    let r2 = UnitaryTuple::haar(2, 3, 2);
    let (mid, report) = approx_midpoint_fd(&r1, &r2, 0.1, 5, &PerturbOptions::default()).unwrap();
    assert!(report.surjective);
    let text = DataFile::Unitaries(mid.clone()).to_json().unwrap();
    let DataFile::Unitaries(back) = DataFile::parse(&text).unwrap() else { panic!("wrong kind") };
    let words = ball(2, 3);
    assert_eq!(back.moments(&words).unwrap(), mid.moments(&words).unwrap());
    assert!(is_surjective(back.unitaries(), &tol).unwrap().surjective);
}

#[test]
fn unitaries_to_channel_and_back() {
    let tol = Tolerance::default();
    let us: Vec<Matrix> = (0..3).map(|s| haar_unitary(2, s)).collect();
    let rep = mn_rep_from_unitaries(4, &us, &tol).unwrap();
    let recovered = extract_unitaries(&rep, &tol).unwrap();
    for (a, b) in recovered.iter().zip(&us) {
        assert!(a.distance(b) < 1e-10);
    }
    let ch = channel_from_rep(&rep).unwrap();
    assert!(verify_channel(&ch, 1e-9).passed());
    // Haar pairs generate M_2, so the joint units generate M_8.
    let all: Vec<Matrix> = rep.e_units().iter().chain(rep.f_units()).cloned().collect();
    assert!(is_factor(&all, &tol).unwrap());
}

#[test]
fn conjugated_rep_has_the_same_channel() {
    let tol = Tolerance::default();
    let us: Vec<Matrix> = (0..3).map(|s| haar_unitary(2, 10 + s)).collect();
    let rep = mn_rep_from_unitaries(4, &us, &tol).unwrap();
    let w = haar_unitary::<f64>(8, 77);
    let moved = rep.map(|x| w.matmul(x).matmul(&w.adjoint())).unwrap();
    let a = channel_from_rep(&rep).unwrap();
    let b = channel_from_rep(&moved).unwrap();
    assert!(a.entrywise_distance(&b).unwrap() < 1e-12);
    let (std, _) = standardize(&moved, &tol).unwrap();
    assert!(std.is_standard(0.0));
}

#[test]
fn joint_rep_channel_is_the_midpoint() {
    let tol = Tolerance::default();
    let r1 = mn_rep_from_unitaries(4, &[haar_unitary(2, 1), haar_unitary(2, 2), haar_unitary(2, 3)], &tol).unwrap();
    let r2 = mn_rep_from_unitaries(4, &[haar_unitary(1, 4), haar_unitary(1, 5), haar_unitary(1, 6)], &tol).unwrap();
    let joint: MnMnRep = joint_rep(&r1, &r2, &tol).unwrap();
    let t = channel_from_rep(&joint).unwrap();
    let (_, report) = tracelab::channels::midpoint_channel(&r1, &r2, 0.05, 3, &MidpointChannelOptions::default()).unwrap();
    assert!(t.entrywise_distance(&report.midpoint).unwrap() < 1e-12);
    assert!(report.surjective && report.distance <= 0.1);
    let words = monomial_ball(4, 2);
    let m = moment_vector(&joint, &words).unwrap();
    assert_eq!(m.len(), words.len());
}
