//! Acceptance suite: one line per criterion, tolerances pinned here.
//!
//! Runs as a plain binary so the lines appear in `cargo test` output. Exits
//! nonzero when a criterion fails, except those listed in `KNOWN_FAILURES`,
//! which are still reported as FAIL.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use serde_json::Value;
use tracelab::algebra::generated_algebra;
use tracelab::channels::{
    channel_from_moments, channel_from_rep, midpoint_channel, verify_channel, MidpointChannelOptions, MomentTable,
};
use tracelab::freegroup::{approx_midpoint_fd, desymmetrized_mix, mix_reps, PerturbOptions};
use tracelab::linalg::{haar_unitary, standard_matrix, StandardKind};
use tracelab::matprod::{
    corner_with_isometry_algebra, mn_rep_from_unitaries, standard_units, tensor_corner_algebra, unit_residual,
};
use tracelab::obstructions::{decompose_trace, isolation_gap, random_trace, weight_bound_check};
use tracelab::words::{ball, MomentReport};
use tracelab::{CMatrix, CharacterTable, Complex64, MnMnRep, Result, Tolerance, TransferChannel, UnitaryTuple};

const BIN: &str = env!("CARGO_BIN_EXE_tracelab");

/// Criterion 9 asks the single-class weight bound to hold on every random
/// trace. It does not: a trace whose nontrivial mass is spread over several
/// characters can sit below `1 − sup_dev/gap` (S3 with weights
/// (0.4, 0.1, 0.5) has bound 0.5 > 0.4). The summed form of the bound is
/// checked alongside and holds.
const KNOWN_FAILURES: &[u32] = &[9];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

fn sci(xs: &[f64]) -> String {
    xs.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>().join(", ")
}

fn tol() -> Tolerance {
    Tolerance::new(1e-9, 1e-9).unwrap()
}

fn cli(dir: &Path, report: &str, args: &[&str]) -> (i32, Value, Vec<u8>) {
    let path = dir.join(report);
    let out = Command::new(BIN).args(args).arg("--out").arg(&path).output().expect("binary runs");
    let bytes = std::fs::read(&path).unwrap_or_default();
    let value = serde_json::from_slice(&bytes).unwrap_or(Value::Null);
    (out.status.code().unwrap_or(-1), value, bytes)
}

fn criterion_1() -> Result<Outcome> {
    let start = Instant::now();
    let mut bad = Vec::new();
    for n in 2..=8 {
        for k in 0..n {
            let gens: Vec<CMatrix> = vec![
                standard_matrix(StandardKind::UBlock(k), n)?,
                standard_matrix(StandardKind::VBlock(k + 1), n)?,
                standard_matrix(StandardKind::Unit(1, 1), n)?,
            ];
            let dim = generated_algebra(&gens, &tol())?.dim();
            if dim != n * n {
                bad.push(format!("n={n} k={k} dim={dim}"));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(bad.is_empty() && secs < 10.0, format!("35 cases, failures {bad:?}, {secs:.2} s (limit 10 s)"))
}

fn criterion_2() -> Result<Outcome> {
    let mut worst_res: f64 = 0.0;
    let mut worst_diag: f64 = 0.0;
    let mut failures = 0;
    for i in 0..200u64 {
        let n = 2 + (i % 4) as usize;
        let d = 1 + ((i / 4) % 4) as usize;
        let us: Vec<CMatrix> = (0..n - 1).map(|j| haar_unitary(d, 1000 * i + j as u64)).collect();
        let rep = mn_rep_from_unitaries(n, &us, &tol())?;
        let k = rep.k() as f64;
        let res = unit_residual(n, rep.e_units()).max(unit_residual(n, rep.f_units()));
        let diag = (0..n)
            .flat_map(|a| [rep.e(a, a), rep.f(a, a)])
            .map(|x| (x.normalized_trace() - Complex64::new(1.0 / n as f64, 0.0)).norm())
            .fold(0.0, f64::max);
        worst_res = worst_res.max(res / k);
        worst_diag = worst_diag.max(diag);
        if res > 1e-9 * k || diag > 1e-12 {
            failures += 1;
        }
    }
    outcome(
        failures == 0,
        format!("200 instances, worst residual/k {worst_res:.1e} (≤ 1e-9), worst |φ(e_ii) − 1/n| {worst_diag:.1e} (≤ 1e-12)"),
    )
}

fn criterion_3() -> Result<Outcome> {
    let start = Instant::now();
    let a = UnitaryTuple::haar(2, 3, 11);
    let b = UnitaryTuple::haar(2, 3, 12);
    let inputs_surjective = [&a, &b]
        .iter()
        .map(|r| tracelab::algebra::is_surjective(r.unitaries(), &tol()).map(|s| s.surjective))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .all(|x| x);
    let opts = PerturbOptions { max_tries: 32, radius: 4, tol: tol() };
    let mut sups = Vec::new();
    let mut ok = inputs_surjective;
    for eps in [0.3, 0.1, 0.03] {
        let (_, report) = approx_midpoint_fd(&a, &b, eps, 5, &opts)?;
        ok &= report.surjective && report.moment_report.sup_delta <= 4.0 * eps + 1e-8;
        sups.push(report.moment_report.sup_delta);
    }
    let monotone = sups.windows(2).all(|w| w[1] <= w[0]);
    let secs = start.elapsed().as_secs_f64();
    outcome(
        ok && monotone && secs < 30.0,
        format!("sup deltas [{}] at eps 0.3/0.1/0.03 (≤ 4 eps + 1e-8, non-increasing), {secs:.2} s", sci(&sups)),
    )
}

fn criterion_4() -> Result<Outcome> {
    let a = UnitaryTuple::haar(2, 3, 21);
    let b = UnitaryTuple::haar(2, 3, 22);
    let words = ball(2, 3);
    let mut parts = Vec::new();
    let mut ok = true;
    for m in [2usize, 5, 10] {
        let symmetric = mix_reps(&[&a, &b], &[m, m])?;
        let mut worst: f64 = 0.0;
        for shifted in [vec![0], vec![1], vec![0, 1]] {
            let tilted = desymmetrized_mix(&a, &b, m, &shifted)?;
            worst = worst.max(MomentReport::compare(&tilted, &symmetric, &words, Vec::new())?.sup_delta);
        }
        let bound = 2.0 / (2 * m) as f64;
        ok &= worst <= bound + 1e-12;
        parts.push(format!("m={m}: {worst:.3e} ≤ {bound:.3}"));
    }
    outcome(ok, format!("over ball(2, 3): {}", parts.join(", ")))
}

fn criterion_5(dir: &Path) -> Result<Outcome> {
    let start = Instant::now();
    let eps = 0.34;
    let (code, r, _) = cli(
        dir,
        "c5.json",
        &["mnmn-perturb", "--n", "4", "--d", "3", "--eps", "0.34", "--r-rank", "1", "--radius", "3", "--diagnostics"],
    );
    let res = &r["result"];
    let f = |v: &Value| v.as_f64().unwrap_or(f64::NAN);
    let k = f(&res["ambient_dim"]);
    let units = f(&res["unit_residual_e"]).max(f(&res["unit_residual_f"]));
    let dist = res["generator_distances"]
        .as_array()
        .map(|xs| xs.iter().map(|x| f(&x[1])).fold(0.0, f64::max))
        .unwrap_or(f64::NAN);
    let alg = res["algebra_dim"].as_u64().unwrap_or(0);
    let membership = res["structural_residuals"]
        .as_array()
        .map(|xs| xs.iter().map(|x| f(&x[1])).fold(0.0, f64::max))
        .unwrap_or(f64::NAN);
    let n_structural = res["structural_residuals"].as_array().map_or(0, Vec::len);
    let sup = f(&res["moment_report"]["sup_delta"]);
    let checks = [
        units <= 1e-9 * k,
        dist <= 4.0 * eps,
        alg == 128 * 128,
        n_structural > 0 && membership <= 1e-7,
        sup <= 10.0 * 3.0 * eps,
        code == 0,
    ];
    let secs = start.elapsed().as_secs_f64();
    outcome(
        checks.iter().all(|&c| c),
        format!(
            "k~={k}: unit residual {units:.1e}, max generator distance {dist:.4} (≤ {:.2}), algebra dim {alg} (= 16384), \
             max membership residual {membership:.1e} over {n_structural} elements (≤ 1e-7), sup delta {sup:.4} (≤ {:.1}), {secs:.1} s",
            4.0 * eps,
            30.0 * eps
        ),
    )
}

fn criterion_6(dir: &Path) -> Result<Outcome> {
    let mut sups = Vec::new();
    let mut ok = true;
    for eps in ["0.1", "0.03"] {
        let (code, r, _) =
            cli(dir, "c6.json", &["amplify", "--n", "4", "--d", "1", "--m", "2", "--eps", eps, "--seed", "4"]);
        let e: f64 = eps.parse().unwrap();
        let res = &r["result"];
        let sup = res["report"]["moment_report"]["sup_delta"].as_f64().unwrap_or(f64::NAN);
        ok &= code == 0 && res["k"] == 8 && res["report"]["surjective"] == true && sup <= 5.0 * e;
        sups.push(sup);
    }
    let monotone = sups[1] <= sups[0];
    outcome(ok && monotone, format!("k=4 → k=8, sup deltas [{}] at eps 0.1/0.03 (≤ 5 eps, non-increasing)", sci(&sups)))
}

fn random_rep(n: usize, d: usize, seed: u64) -> Result<MnMnRep> {
    let us: Vec<CMatrix> = (0..n - 1).map(|j| haar_unitary(d, seed * 100 + j as u64)).collect();
    mn_rep_from_unitaries(n, &us, &tol())
}

fn criterion_7() -> Result<Outcome> {
    // (a)
    let n = 4;
    let units: Vec<CMatrix> = standard_units(n, 2);
    let same = MnMnRep::new(n, units.clone(), units, &tol())?;
    let id_dist = channel_from_rep(&same)?.entrywise_distance(&TransferChannel::identity(n))?;
    let a = id_dist <= 1e-10;
    // (b)
    let mut b_pass = 0;
    for s in 0..50u64 {
        let rep = random_rep(2 + (s % 4) as usize, 1 + (s % 3) as usize, s + 1)?;
        b_pass += usize::from(verify_channel(&channel_from_rep(&rep)?, 1e-9).passed());
    }
    let b = b_pass == 50;
    // (c)
    let r1 = random_rep(4, 2, 71)?;
    let r2 = random_rep(4, 2, 72)?;
    let (ch, report) = midpoint_channel(&r1, &r2, 0.03, 9, &MidpointChannelOptions::default())?;
    let c = report.surjective && report.distance <= 0.2 && verify_channel(&ch, 1e-9).passed() && report.passed();
    // (d)
    let t1 = MomentTable::from_rep(&r1);
    let t2 = MomentTable::from_rep(&r2);
    let t3 = MomentTable::from_rep(&random_rep(4, 3, 73)?);
    let w = [0.2, 0.5, 0.3];
    let lhs = channel_from_moments(&MomentTable::combine(&[&t1, &t2, &t3], &w)?)?;
    let chans =
        [&t1, &t2, &t3].iter().map(|t| channel_from_moments(t)).collect::<Result<Vec<TransferChannel>>>()?;
    let rhs = TransferChannel::combine(&chans.iter().collect::<Vec<_>>(), &w)?;
    let affine_err = lhs.entrywise_distance(&rhs)?;
    let d = affine_err <= 1e-14;
    outcome(
        a && b && c && d,
        format!(
            "(a) identity distance {id_dist:.1e}; (b) {b_pass}/50 pass; (c) {} route, distance {:.3e} (≤ 0.2), surjective {}; \
             (d) affinity error {affine_err:.1e}",
            serde_json::to_value(report.route)?.as_str().unwrap_or("?"),
            report.distance,
            report.surjective
        ),
    )
}

fn criterion_8() -> Result<Outcome> {
    let a = corner_with_isometry_algebra(5, 3, &tol())?.dim();
    let b = tensor_corner_algebra(2, 3, &tol())?.dim();
    outcome(a == 25 && b == 36, format!("M_5 corner with isometry: {a} (= 25); M_2 ⊗ M_3: {b} (= 36)"))
}

fn criterion_9() -> Result<Outcome> {
    let mut gaps_ok = true;
    let mut gap_text = Vec::new();
    for (name, expected) in [("z2", 2.0), ("z3", 1.5), ("s3", 1.5)] {
        let g = isolation_gap(&CharacterTable::bundled(name)?)?;
        gaps_ok &= (g - expected).abs() <= 1e-12;
        gap_text.push(format!("{name} {g}"));
    }
    let mut roundtrip: f64 = 0.0;
    let mut violations = Vec::new();
    let mut summed_violations = 0;
    for name in CharacterTable::bundled_names() {
        let table = CharacterTable::bundled(name)?;
        let mut v = 0;
        for s in 0..100u64 {
            let (weights, phi) = random_trace(&table, s);
            let back = decompose_trace(&table, &phi)?;
            roundtrip = back.iter().zip(&weights).map(|(x, y)| (x - y).abs()).fold(roundtrip, f64::max);
            let check = weight_bound_check(&table, &phi)?;
            v += usize::from(!check.holds);
            summed_violations += usize::from(!check.summed_holds);
        }
        violations.push(format!("{name} {v}/100"));
    }
    let bound_ok = violations.iter().all(|s| s.ends_with(" 0/100"));
    outcome(
        gaps_ok && bound_ok && roundtrip <= 1e-10,
        format!(
            "gaps [{}]; single-class bound violations [{}]; summed bound violations {summed_violations}; \
             round trip error {roundtrip:.1e} (≤ 1e-10)",
            gap_text.join(", "),
            violations.join(", ")
        ),
    )
}

fn criterion_10(dir: &Path) -> Result<Outcome> {
    let runs: &[&[&str]] = &[
        &["gen-check", "--n", "4"],
        &["surjective-check", "--seed", "3"],
        &["factor-check", "--seed", "3"],
        &["midpoint-f2", "--eps", "0.05", "--seed", "7"],
        &["amplify", "--seed", "2"],
        &["mnmn-build", "--seed", "5"],
        &["mnmn-perturb", "--n", "4", "--d", "2", "--eps", "0.6", "--seed", "1"],
        &["channel", "--seed", "6"],
        &["midpoint-channel", "--seed", "8"],
        &["et-gap", "--table", "s3"],
        &["et-bound", "--table", "z6", "--seed", "9"],
    ];
    let mut differing = Vec::new();
    for args in runs {
        let (c1, _, b1) = cli(dir, "c10a.json", args);
        let (c2, _, b2) = cli(dir, "c10b.json", args);
        if b1.is_empty() || b1 != b2 || c1 != c2 {
            differing.push(args[0]);
        }
    }
    outcome(differing.is_empty(), format!("{} commands run twice, differing: {differing:?}", runs.len()))
}

fn main() {
    let dir = tempfile::tempdir().expect("temp dir");
    let dir = dir.path();
    type Check<'a> = Box<dyn Fn() -> Result<Outcome> + 'a>;
    let criteria: Vec<(u32, &str, Check)> = vec![
        (1, "generator lemma", Box::new(criterion_1)),
        (2, "matrix-unit suite", Box::new(criterion_2)),
        (3, "free-group midpoint", Box::new(criterion_3)),
        (4, "desymmetrization bound", Box::new(criterion_4)),
        (5, "perturbed matrix-unit construction", Box::new(|| criterion_5(dir))),
        (6, "amplification density", Box::new(|| criterion_6(dir))),
        (7, "channels", Box::new(criterion_7)),
        (8, "corner lemmas", Box::new(criterion_8)),
        (9, "obstructions", Box::new(criterion_9)),
        (10, "determinism", Box::new(|| criterion_10(dir))),
    ];
    let mut unexpected = 0;
    for (id, title, check) in &criteria {
        let o = check().unwrap_or_else(|e| Outcome { pass: false, detail: format!("error: {e}") });
        let known = KNOWN_FAILURES.contains(id);
        let tag = match (o.pass, known) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
        };
        println!("criterion {id:>2} [{tag}] {title}: {}", o.detail);
        if !o.pass && !known {
            unexpected += 1;
        }
    }
    if unexpected > 0 {
        eprintln!("{unexpected} criteria failed");
        std::process::exit(1);
    }
}
