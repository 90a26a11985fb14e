//! One function per subcommand.

use std::path::{Path, PathBuf};

use clap::Args;
use serde::Serialize;
use serde_json::{json, Value};
use tracelab::algebra::{commutant_and_center, generated_algebra, is_surjective};
use tracelab::channels::{self, channel_from_rep, verify_channel, MidpointChannelOptions, MidpointRoute};
use tracelab::freegroup::{self, approx_midpoint_fd, perturb_to_surjective, PerturbOptions as FdOptions};
use tracelab::io::{to_json, write_atomic, DataFile};
use tracelab::linalg::{standard_matrix, StandardKind};
use tracelab::matprod::{self, amplify_and_perturb, perturbed_rep, unit_residual, VerifyOptions};
use tracelab::obstructions::{decompose_trace, isolation_gap, random_trace, weight_bound_check};
use tracelab::words::{moment_vector, monomial_ball, parse_word_list, GroupWord, MomentReport, StarMonomial};
use tracelab::{Complex64, Error, Gate, MnMnRep, Result, Tolerance};

use crate::inputs::{self, haar_mnmn, SeedStream};
use crate::{Common, Outcome};

fn save<S: Serialize>(path: &Option<PathBuf>, value: &S) -> Result<()> {
    match path {
        Some(p) => write_atomic(p, to_json(value)?.as_bytes()),
        None => Ok(()),
    }
}

fn value<S: Serialize>(x: &S) -> Result<Value> {
    Ok(serde_json::to_value(x)?)
}

/// Words read from `path`, evaluated on `a` and `b`.
fn custom_moments<W, RA, RB>(path: &Option<PathBuf>, a: &RA, b: &RB) -> Result<Option<MomentReport>>
where
    W: std::str::FromStr<Err = Error> + tracelab::words::Word + std::fmt::Display,
    RA: tracelab::words::Representation<f64, Letter = W::Letter>,
    RB: tracelab::words::Representation<f64, Letter = W::Letter>,
{
    let Some(p) = path else { return Ok(None) };
    let words: Vec<W> = parse_word_list(&std::fs::read_to_string(p)?)?;
    Ok(Some(MomentReport::compare(a, b, &words, Vec::new())?))
}

fn two_reps(
    input1: &Option<PathBuf>,
    input2: &Option<PathBuf>,
    n: usize,
    d: usize,
    seed: u64,
    tol: &Tolerance,
) -> Result<(MnMnRep, MnMnRep)> {
    let mut seeds = SeedStream::new(seed);
    let r1 = match input1 {
        Some(p) => inputs::mnmn(p)?,
        None => haar_mnmn(n, d, &mut seeds, tol)?,
    };
    let r2 = match input2 {
        Some(p) => inputs::mnmn(p)?,
        None => haar_mnmn(n, d, &mut seeds, tol)?,
    };
    Ok((r1, r2))
}

// gen-check

#[derive(Args, Serialize)]
pub struct GenCheck {
    #[arg(long, default_value_t = 6)]
    pub n: usize,
    #[command(flatten)]
    pub common: Common,
}

pub fn gen_check(a: &GenCheck) -> Result<Outcome> {
    let tol = a.common.tolerance()?;
    let n = a.n;
    if n < 2 {
        return Err(Error::Unsupported(format!("n must be at least 2, got {n}")));
    }
    let mut gates = Vec::new();
    let mut rows = Vec::new();
    for k in 0..n {
        let gens = vec![
            standard_matrix(StandardKind::UBlock(k), n)?,
            standard_matrix(StandardKind::VBlock(k + 1), n)?,
            standard_matrix(StandardKind::Unit(1, 1), n)?,
        ];
        let alg = generated_algebra(&gens, &tol)?;
        gates.push(Gate::at_least(format!("dim[k={k}]"), alg.dim() as f64, (n * n) as f64));
        rows.push(json!({"k": k, "dim": alg.dim(), "passes": alg.passes}));
    }
    let ok = gates.iter().all(|g| g.pass);
    Ok(Outcome {
        gates,
        result: json!({"n": n, "ambient_dim": n * n, "cases": rows}),
        summary: format!("gen-check n={n}: {}", if ok { "all generate M_n" } else { "FAILED" }),
    })
}

// surjective-check / factor-check

#[derive(Args, Serialize)]
pub struct MatrixInput {
    /// Matrix, unitary-tuple or matrix-unit file; without it, Haar unitaries are drawn.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Number of Haar unitaries when no input is given.
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    /// Dimension of the Haar unitaries.
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    #[command(flatten)]
    pub common: Common,
}

fn matrix_input(a: &MatrixInput) -> Result<Vec<tracelab::CMatrix>> {
    match &a.input {
        Some(p) => inputs::matrices(p),
        None => {
            if a.d == 0 || a.k == 0 {
                return Err(Error::Unsupported("need d >= 1 and k >= 1".into()));
            }
            Ok(tracelab::UnitaryTuple::haar(a.d, a.k, a.common.seed).unitaries().to_vec())
        }
    }
}

pub fn surjective_check(a: &MatrixInput) -> Result<Outcome> {
    let tol = a.common.tolerance()?;
    let gens = matrix_input(a)?;
    let s = is_surjective(&gens, &tol)?;
    Ok(Outcome {
        gates: vec![Gate::holds("surjective", s.surjective)],
        summary: format!("surjective: {} (dim {} of {})", s.surjective, s.algebra_dim, s.ambient_dim * s.ambient_dim),
        result: value(&s)?,
    })
}

pub fn factor_check(a: &MatrixInput) -> Result<Outcome> {
    let tol = a.common.tolerance()?;
    let gens = matrix_input(a)?;
    let (comm, center) = commutant_and_center(&gens, &tol)?;
    let factor = center.dim() == 1;
    Ok(Outcome {
        gates: vec![Gate::holds("factor", factor)],
        summary: format!("factor: {factor} (center dim {}, commutant dim {})", center.dim(), comm.dim()),
        result: json!({
            "factor": factor,
            "ambient_dim": comm.ambient_dim,
            "commutant_dim": comm.dim(),
            "center_dim": center.dim(),
        }),
    })
}

// midpoint-f2

#[derive(Args, Serialize)]
pub struct MidpointF2 {
    /// Unitary-tuple files; Haar tuples are drawn for missing ones.
    #[arg(long)]
    pub input1: Option<PathBuf>,
    #[arg(long)]
    pub input2: Option<PathBuf>,
    /// Dimension of the drawn tuples.
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    #[arg(long, default_value_t = 0.05)]
    pub eps: f64,
    #[arg(long, default_value_t = freegroup::DEFAULT_RADIUS)]
    pub radius: usize,
    #[arg(long, default_value_t = freegroup::DEFAULT_MAX_TRIES)]
    pub tries: usize,
    /// Extra group words (one per line) to compare against the exact midpoint.
    #[arg(long)]
    pub words: Option<PathBuf>,
    /// Write the output tuple here.
    #[arg(long)]
    #[serde(skip)]
    pub save: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

pub fn midpoint_f2(a: &MidpointF2) -> Result<Outcome> {
    let tol = a.common.tolerance()?;
    let mut seeds = SeedStream::new(a.common.seed);
    let mut load = |p: &Option<PathBuf>| match p {
        Some(p) => inputs::unitaries(p),
        None => Ok(tracelab::UnitaryTuple::haar(2, a.k, seeds.next())),
    };
    let r1 = load(&a.input1)?;
    let r2 = load(&a.input2)?;
    let opts = FdOptions { max_tries: a.tries, radius: a.radius, tol };
    let (out, report) = approx_midpoint_fd(&r1, &r2, a.eps, a.common.seed, &opts)?;
    save(&a.save, &out)?;
    let bound = a.radius as f64 * a.eps + 1e-8;
    let gates = vec![
        Gate::holds("surjective", report.surjective),
        Gate::at_most("generator_distance", report.achieved_generator_distance, a.eps + 1e-10),
        Gate::at_most("moment_sup_delta", report.moment_report.sup_delta, bound),
    ];
    let custom = match &a.words {
        Some(_) => {
            let mix = freegroup::mix_reps(&[&r1, &r2], &[r2.k(), r1.k()])?;
            custom_moments::<GroupWord, _, _>(&a.words, &out, &mix)?
        }
        None => None,
    };
    let cert = report.certificate.as_ref().map_or(0, Vec::len);
    Ok(Outcome {
        gates,
        summary: format!("sup_delta = {:e}, certificate size = {cert}", report.moment_report.sup_delta),
        result: json!({"dim": out.k(), "report": value(&report)?, "custom_words": value(&custom)?}),
    })
}

// amplify

#[derive(Args, Serialize)]
pub struct Amplify {
    /// Unitary-tuple or matrix-unit file; without it a Haar matrix-unit pair is drawn.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Matrix-unit size of the drawn pair.
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    /// Corner dimension of the drawn pair.
    #[arg(long, default_value_t = 1)]
    pub d: usize,
    /// Amplification factor.
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    #[arg(long, default_value_t = 3)]
    pub radius: usize,
    #[arg(long, default_value_t = freegroup::DEFAULT_MAX_TRIES)]
    pub tries: usize,
    #[arg(long)]
    #[serde(skip)]
    pub save: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

pub fn amplify(a: &Amplify) -> Result<Outcome> {
    let tol = a.common.tolerance()?;
    let opts = FdOptions { max_tries: a.tries, radius: a.radius, tol };
    let input = match &a.input {
        Some(p) => tracelab::io::read_data_file(p)?,
        None => DataFile::MnMn(haar_mnmn(a.n, a.d, &mut SeedStream::new(a.common.seed), &tol)?),
    };
    match input {
        DataFile::MnMn(rep) => {
            let (out, report) = amplify_and_perturb(&rep, a.m, a.eps, a.common.seed, &opts)?;
            save(&a.save, &out)?;
            // Each f-unit moves by at most 2 eps; a monomial alternates families.
            let bound = 2.0 * a.eps * a.radius.div_ceil(2) as f64 + 1e-8;
            let gates = vec![
                Gate::holds("surjective", report.surjective),
                Gate::at_most("moment_sup_delta", report.moment_report.sup_delta, bound),
            ];
            Ok(Outcome {
                gates,
                summary: format!(
                    "amplified to k = {}: surjective {}, sup_delta = {:e}",
                    out.k(),
                    report.surjective,
                    report.moment_report.sup_delta
                ),
                result: json!({"kind": "mnmn-rep", "k": out.k(), "report": value(&report)?}),
            })
        }
        DataFile::Unitaries(rep) => {
            let big = freegroup::amplify(&rep, a.m)?;
            let (out, report) = perturb_to_surjective(&big, a.eps, a.common.seed, &opts)?;
            save(&a.save, &out)?;
            let bound = a.radius as f64 * a.eps + 1e-8;
            let gates = vec![
                Gate::holds("surjective", report.surjective),
                Gate::at_most("moment_sup_delta", report.moment_report.sup_delta, bound),
            ];
            Ok(Outcome {
                gates,
                summary: format!(
                    "amplified to k = {}: surjective {}, sup_delta = {:e}",
                    out.k(),
                    report.surjective,
                    report.moment_report.sup_delta
                ),
                result: json!({"kind": "unitaries", "k": out.k(), "report": value(&report)?}),
            })
        }
        other => Err(Error::Parse(format!("amplify needs unitaries or a matrix-unit pair, got {}", other.kind()))),
    }
}

// mnmn-build

#[derive(Args, Serialize)]
pub struct MnmnBuild {
    /// Unitary-tuple file with n − 1 unitaries; without it Haar unitaries are drawn.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    /// Write the matrix-unit pair here.
    #[arg(long)]
    #[serde(skip)]
    pub save_rep: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

fn rep_checks(rep: &MnMnRep) -> (Vec<Gate>, Value) {
    let (n, k) = (rep.n(), rep.k());
    let res_e = unit_residual(n, rep.e_units());
    let res_f = unit_residual(n, rep.f_units());
    let target = Complex64::new(1.0 / n as f64, 0.0);
    let diag = (0..n)
        .flat_map(|i| [rep.e(i, i), rep.f(i, i)])
        .map(|x| (x.normalized_trace() - target).norm())
        .fold(0.0, f64::max);
    let bound = 1e-9 * k as f64;
    let gates = vec![
        Gate::at_most("unit_residual_e", res_e, bound),
        Gate::at_most("unit_residual_f", res_f, bound),
        Gate::at_most("diagonal_trace", diag, 1e-12),
    ];
    let result = json!({"n": n, "k": k, "d": rep.d(), "unit_residual_e": res_e, "unit_residual_f": res_f, "diagonal_trace_defect": diag});
    (gates, result)
}

pub fn mnmn_build(a: &MnmnBuild) -> Result<Outcome> {
    let tol = a.common.tolerance()?;
    let rep = match &a.input {
        Some(p) => {
            let t = inputs::unitaries(p)?;
            matprod::mn_rep_from_unitaries(t.d() + 1, t.unitaries(), &tol)?
        }
        None => haar_mnmn(a.n, a.d, &mut SeedStream::new(a.common.seed), &tol)?,
    };
    save(&a.save_rep, &rep)?;
    let (gates, result) = rep_checks(&rep);
    Ok(Outcome { gates, summary: format!("built n = {}, k = {}", rep.n(), rep.k()), result })
}

// mnmn-perturb

#[derive(Args, Serialize)]
pub struct MnmnPerturb {
    /// Matrix-unit files; Haar pairs are drawn for missing ones.
    #[arg(long)]
    pub input1: Option<PathBuf>,
    #[arg(long)]
    pub input2: Option<PathBuf>,
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    #[arg(long, default_value_t = 3)]
    pub d: usize,
    #[arg(long, default_value_t = 0.34)]
    pub eps: f64,
    /// Rank of the added corner (smallest admissible when omitted).
    #[arg(long)]
    pub r_rank: Option<usize>,
    #[arg(long, default_value_t = 3)]
    pub radius: usize,
    /// Also compute membership residuals of the structural elements.
    #[arg(long)]
    pub diagnostics: bool,
    #[arg(long, default_value_t = 1e-7)]
    pub membership_threshold: f64,
    /// Write the perturbed pair here.
    #[arg(long)]
    #[serde(skip)]
    pub save_rep: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

pub fn mnmn_perturb(a: &MnmnPerturb) -> Result<Outcome> {
    let tol = a.common.tolerance()?;
    let (r1, r2) = two_reps(&a.input1, &a.input2, a.n, a.d, a.common.seed, &tol)?;
    let opts = matprod::PerturbOptions { r_rank: a.r_rank, ..Default::default() };
    let bundle = perturbed_rep(&r1, &r2, a.eps, &tol, &opts)?;
    save(&a.save_rep, &bundle.perturbed)?;
    let vopts =
        VerifyOptions { radius: a.radius, tol, membership_threshold: a.membership_threshold, diagnostics: a.diagnostics };
    let report = matprod::verify_perturbation(&bundle, &vopts)?;
    Ok(Outcome {
        summary: format!(
            "k~ = {}: surjective {}, max generator distance {:e}, sup_delta = {:e}",
            report.ambient_dim,
            report.surjective,
            report.generator_distances.iter().map(|x| x.1).fold(0.0, f64::max),
            report.moment_report.sup_delta
        ),
        gates: report.gates.clone(),
        result: value(&report)?,
    })
}

// mnmn-verify

#[derive(Args, Serialize)]
pub struct MnmnVerify {
    #[arg(long)]
    pub input: PathBuf,
    /// Second pair whose moments are compared with the input's.
    #[arg(long)]
    pub compare: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    pub radius: usize,
    /// Monomials (one per line) used instead of the ball of the given radius.
    #[arg(long)]
    pub words: Option<PathBuf>,
    /// Require the pair to generate the full matrix algebra.
    #[arg(long)]
    pub require_surjective: bool,
    #[command(flatten)]
    pub common: Common,
}

pub fn mnmn_verify(a: &MnmnVerify) -> Result<Outcome> {
    let tol = a.common.tolerance()?;
    let rep = inputs::mnmn(&a.input)?;
    let (mut gates, mut result) = rep_checks(&rep);
    let alg = rep.generated_algebra(&tol)?;
    if a.require_surjective {
        gates.push(Gate::holds("surjective", alg.is_full()));
    }
    result["algebra_dim"] = json!(alg.dim());
    result["surjective"] = json!(alg.is_full());
    let words: Option<Vec<StarMonomial>> = match &a.words {
        Some(p) => Some(parse_word_list(&std::fs::read_to_string(p)?)?),
        None => None,
    };
    if let Some(other) = &a.compare {
        let other = inputs::mnmn(other)?;
        let words = words.unwrap_or_else(|| monomial_ball(rep.n(), a.radius));
        result["moments"] = value(&MomentReport::compare(&rep, &other, &words, Vec::new())?)?;
    } else if let Some(words) = words {
        let values = moment_vector(&rep, &words)?;
        result["moments"] = json!(words
            .iter()
            .zip(values)
            .map(|(w, v)| json!({"word": w.to_string(), "value": [v.re, v.im]}))
            .collect::<Vec<_>>());
    }
    Ok(Outcome {
        summary: format!("n = {}, k = {}, algebra dim {}", rep.n(), rep.k(), alg.dim()),
        gates,
        result,
    })
}

// channel / channel-verify

#[derive(Args, Serialize)]
pub struct ChannelCmd {
    /// Matrix-unit file; without it a Haar pair is drawn.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    /// Write the channel here.
    #[arg(long)]
    #[serde(skip)]
    pub save: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

pub fn channel(a: &ChannelCmd) -> Result<Outcome> {
    let tol = a.common.tolerance()?;
    let rep = match &a.input {
        Some(p) => inputs::mnmn(p)?,
        None => haar_mnmn(a.n, a.d, &mut SeedStream::new(a.common.seed), &tol)?,
    };
    let ch = channel_from_rep(&rep)?;
    save(&a.save, &ch)?;
    let check = verify_channel(&ch, a.common.tol_structural);
    Ok(Outcome {
        summary: format!("channel on M_{}: min Choi eigenvalue {:e}", ch.n(), check.min_choi_eigenvalue),
        gates: check.gates.clone(),
        result: json!({"channel": value(&ch)?, "check": value(&check)?}),
    })
}

#[derive(Args, Serialize)]
pub struct ChannelVerify {
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

pub fn channel_verify(a: &ChannelVerify) -> Result<Outcome> {
    a.common.tolerance()?;
    let ch = inputs::channel(&a.input)?;
    let check = verify_channel(&ch, a.common.tol_structural);
    Ok(Outcome {
        summary: format!(
            "unital {}, trace-preserving {}, completely positive {}",
            check.unital, check.trace_preserving, check.choi_psd
        ),
        gates: check.gates.clone(),
        result: json!({"check": value(&check)?, "choi_hermitian_defect": channels::choi_hermitian_defect(&ch)}),
    })
}

// midpoint-channel

#[derive(Args, Serialize)]
pub struct MidpointChannel {
    #[arg(long)]
    pub input1: Option<PathBuf>,
    #[arg(long)]
    pub input2: Option<PathBuf>,
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    #[arg(long, default_value_t = 0.03)]
    pub eps: f64,
    #[arg(long, default_value_t = 3)]
    pub radius: usize,
    #[arg(long, default_value_t = freegroup::DEFAULT_MAX_TRIES)]
    pub tries: usize,
    /// Largest ambient dimension for the corner-amplification route.
    #[arg(long, default_value_t = channels::AMBIENT_BUDGET)]
    pub ambient_budget: usize,
    #[arg(long)]
    pub diagnostics: bool,
    #[arg(long)]
    #[serde(skip)]
    pub save: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

pub fn midpoint_channel(a: &MidpointChannel) -> Result<Outcome> {
    let tol = a.common.tolerance()?;
    let (r1, r2) = two_reps(&a.input1, &a.input2, a.n, a.d, a.common.seed, &tol)?;
    let opts = MidpointChannelOptions {
        radius: a.radius,
        tol,
        max_tries: a.tries,
        ambient_budget: a.ambient_budget,
        diagnostics: a.diagnostics,
    };
    let (ch, report) = channels::midpoint_channel(&r1, &r2, a.eps, a.common.seed, &opts)?;
    save(&a.save, &ch)?;
    let mut gates = report.gates.clone();
    if report.route == MidpointRoute::FiniteDimensional {
        gates.push(Gate::at_most("midpoint_distance", report.distance, 2.0 * a.eps + 1e-12));
    }
    Ok(Outcome {
        summary: format!(
            "route {}: surjective {}, entrywise distance to midpoint {:e}",
            value(&report.route)?.as_str().unwrap_or_default(),
            report.surjective,
            report.distance
        ),
        gates,
        result: json!({"channel": value(&ch)?, "report": value(&report)?}),
    })
}

// et-gap / et-bound

#[derive(Args, Serialize)]
pub struct EtGap {
    /// Bundled table name (z2, z3, z4, z6, s3) or a table file.
    #[arg(long)]
    pub table: String,
    #[command(flatten)]
    pub common: Common,
}

/// Rounded for display so that exact values print exactly.
fn display_number(x: f64) -> String {
    let r = (x * 1e12).round() / 1e12;
    format!("{r}")
}

pub fn et_gap(a: &EtGap) -> Result<Outcome> {
    let table = inputs::table(&a.table)?;
    let gap = isolation_gap(&table)?;
    Ok(Outcome {
        gates: vec![Gate::at_least("gap_positive", gap, 1e-12)],
        summary: display_number(gap),
        result: json!({"table": table.name, "order": table.order(), "classes": table.num_classes(), "gap": gap}),
    })
}

#[derive(Args, Serialize)]
pub struct EtBound {
    #[arg(long)]
    pub table: String,
    /// Number of random traces.
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[command(flatten)]
    pub common: Common,
}

pub fn et_bound(a: &EtBound) -> Result<Outcome> {
    let table = inputs::table(&a.table)?;
    let mut seeds = SeedStream::new(a.common.seed);
    let (mut violations, mut summed_violations) = (0usize, 0usize);
    let mut worst_roundtrip: f64 = 0.0;
    let mut worst_margin = f64::INFINITY;
    let mut first_violation = Value::Null;
    for _ in 0..a.samples {
        let s = seeds.next();
        let (weights, phi) = random_trace(&table, s);
        let back = decompose_trace(&table, &phi)?;
        worst_roundtrip = back.iter().zip(&weights).map(|(x, y)| (x - y).abs()).fold(worst_roundtrip, f64::max);
        let check = weight_bound_check(&table, &phi)?;
        worst_margin = worst_margin.min(check.actual_trivial_weight - check.bound);
        if !check.holds {
            violations += 1;
            if first_violation.is_null() {
                first_violation = json!({"seed": s, "weights": weights, "check": value(&check)?});
            }
        }
        summed_violations += usize::from(!check.summed_holds);
    }
    let gates = vec![
        Gate::at_most("decomposition_roundtrip", worst_roundtrip, 1e-10),
        Gate::at_most("bound_violations", violations as f64, 0.0),
        Gate::at_most("summed_bound_violations", summed_violations as f64, 0.0),
    ];
    Ok(Outcome {
        gates,
        summary: format!(
            "{}: {violations} of {} traces violate 1 - sup_dev/gap, {summed_violations} violate the summed bound",
            table.name.clone().unwrap_or_else(|| a.table.clone()),
            a.samples
        ),
        result: json!({
            "table": table.name,
            "gap": isolation_gap(&table)?,
            "samples": a.samples,
            "violations": violations,
            "summed_violations": summed_violations,
            "worst_margin": worst_margin,
            "worst_roundtrip_error": worst_roundtrip,
            "first_violation": first_violation,
        }),
    })
}

// roundtrip

#[derive(Args, Serialize)]
pub struct Roundtrip {
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

pub fn roundtrip(a: &Roundtrip) -> Result<Outcome> {
    let path: &Path = &a.input;
    let text = std::fs::read_to_string(path)?;
    let kind = DataFile::parse(&text)?.kind();
    let same = tracelab::io::roundtrip_text(&text)?;
    Ok(Outcome {
        gates: vec![Gate::holds("roundtrip", same)],
        summary: same.to_string(),
        result: json!({"kind": kind, "identical": same}),
    })
}
