//! `isograss`: command-line front end.
//!
//! Exit codes: 0 when the checked claim holds, 1 when it is refuted, 2 on
//! usage errors and malformed input.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use isograss::counterexamples::{self, CounterexampleReport};
use isograss::ideal_lab::{self, quadric_rank, Variety};
use isograss::igcp::{self, trial_rng};
use isograss::io::{self, LabelKind, MultiVectorJson};
use isograss::{cones, linalg, Error, MultiVector, QuadraticSpace};
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "isograss", version, about = "Exact computations with isotropic Grassmann cones")]
struct Cli {
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Report `wall_time_ms` as null so reports are byte-reproducible.
    #[arg(long, global = true)]
    omit_timing: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Test Grassmann and isotropic-cone membership of a form.
    Membership(MembershipArgs),
    /// Search for an isotropic v with Φ_v(ω) outside the isotropic cone.
    Witness(WitnessArgs),
    /// Check the main theorem on random forms and frames in std:<dim>.
    VerifyMainTheorem(VerifyArgs),
    /// Check the counterexamples in dimension 7 and 8 or the Lagrangian variant.
    Counterexample(CounterexampleArgs),
    /// Run the rank-4 quadric pipeline for iso37 or iso48_component.
    Ideal(IdealArgs),
    /// Recompute the ranks of a list of quadrics.
    Ranks(RanksArgs),
    /// Apply Φ_v maps until the ambient dimension is 7 or 8.
    Reduce(ReduceArgs),
}

#[derive(Args, Debug, Serialize)]
struct SpaceArgs {
    /// `std:<n>`, `j7` or `j8`.
    #[arg(long, conflicts_with = "gram")]
    space: Option<String>,

    /// JSON file with an n×n Gram matrix.
    #[arg(long)]
    gram: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct MembershipArgs {
    #[command(flatten)]
    #[serde(flatten)]
    space: SpaceArgs,

    /// Multivector JSON file.
    #[arg(long)]
    input: PathBuf,

    /// Required grade of the input.
    #[arg(long)]
    grade: Option<usize>,

    /// Also test membership in the isotropic cone.
    #[arg(long)]
    isotropic: bool,

    /// Claim to check: `in` or `out` of the cone tested.
    #[arg(long, value_parser = ["in", "out"])]
    expect: Option<String>,
}

#[derive(Args, Debug, Serialize)]
struct WitnessArgs {
    #[command(flatten)]
    #[serde(flatten)]
    space: SpaceArgs,

    #[arg(long)]
    input: PathBuf,

    /// Random isotropic vectors tried after the structured families.
    #[arg(long, default_value_t = 200)]
    budget: usize,

    #[arg(long)]
    seed: u64,
}

#[derive(Args, Debug, Serialize)]
struct VerifyArgs {
    #[arg(long)]
    dim: usize,

    #[arg(long, default_value_t = 100)]
    trials: usize,

    #[arg(long, default_value_t = 200)]
    budget: usize,

    #[arg(long)]
    seed: u64,
}

#[derive(Args, Debug, Serialize)]
struct CounterexampleArgs {
    /// 7 or 8.
    #[arg(long, required_unless_present = "lagrangian", conflicts_with = "lagrangian")]
    which: Option<u8>,

    /// Lagrangian example `α^m` in dimension 4m.
    #[arg(long)]
    lagrangian: Option<usize>,

    /// Random isotropic vectors checked.
    #[arg(long, default_value_t = 1000)]
    samples: usize,

    #[arg(long)]
    seed: u64,
}

#[derive(Args, Debug, Serialize)]
struct IdealArgs {
    /// `iso37` or `iso48_component`.
    #[arg(long)]
    variety: String,

    #[arg(long)]
    seed: u64,
}

#[derive(Args, Debug, Serialize)]
struct RanksArgs {
    /// Quadric list JSON, e.g. the output of `ideal`.
    #[arg(long)]
    input: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct ReduceArgs {
    #[command(flatten)]
    #[serde(flatten)]
    space: SpaceArgs,

    #[arg(long)]
    input: PathBuf,

    #[arg(long, default_value_t = 50)]
    budget: usize,

    #[arg(long)]
    seed: u64,
}

#[derive(Serialize)]
struct RunReport {
    command: &'static str,
    parameters: Value,
    outcome: Value,
    wall_time_ms: Option<u64>,
    version: &'static str,
}

/// Failure of a subcommand: usage problems exit 2, refuted claims exit 1.
enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Exhausted(_) => Failure::Runtime(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<isograss::ParseError> for Failure {
    fn from(e: isograss::ParseError) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = Result<(bool, Value), Failure>;

fn read(path: &PathBuf) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_space(args: &SpaceArgs) -> Result<QuadraticSpace, Failure> {
    match (&args.space, &args.gram) {
        (Some(spec), None) => Ok(io::parse_space(spec)?),
        (None, Some(path)) => Ok(io::parse_gram(&read(path)?)?),
        _ => Err(Failure::Usage("give exactly one of --space or --gram".into())),
    }
}

fn load_form(path: &PathBuf, space: &QuadraticSpace) -> Result<MultiVector, Failure> {
    let omega = io::parse_multivector(&read(path)?)?;
    if omega.dim() != space.dim() {
        return Err(Failure::Usage(format!(
            "input has dim {} but the space has dim {}",
            omega.dim(),
            space.dim()
        )));
    }
    Ok(omega)
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn membership(a: &MembershipArgs) -> Outcome {
    let space = load_space(&a.space)?;
    let omega = load_form(&a.input, &space)?;
    if let Some(k) = a.grade {
        if omega.grade() != k {
            return Err(Failure::Usage(format!("input has grade {}, expected {k}", omega.grade())));
        }
    }
    let grassmann = cones::in_grassmann_cone(&omega);
    let relation = igcp::relation_certificate(&space, &omega);
    let mut out = json!({ "grassmann": grassmann, "witness_relation": relation });
    let tested = if a.isotropic {
        let check = cones::isotropic_cone_check(&space, &omega);
        out["isotropic"] = json!(check.is_ok());
        out["isotropic_failure"] = to_value(&check.err());
        out["isotropic"] == json!(true)
    } else {
        grassmann
    };
    let holds = match a.expect.as_deref() {
        Some("in") => tested,
        Some("out") => !tested,
        _ => true,
    };
    Ok((holds, out))
}

/// The space in a hyperbolic basis, the change of coordinates, and its inverse.
fn hyperbolic(space: &QuadraticSpace) -> Result<(QuadraticSpace, Option<Vec<Vec<linalg::Rational>>>), Failure> {
    if space.is_hyperbolic() {
        return Ok((space.clone(), None));
    }
    let (h, matrix) = space.to_hyperbolic()?;
    Ok((h, Some(matrix)))
}

fn witness(a: &WitnessArgs) -> Outcome {
    let space = load_space(&a.space)?;
    let omega = load_form(&a.input, &space)?;
    let (h, matrix) = hyperbolic(&space)?;
    let omega_h = matrix.as_ref().map_or_else(|| omega.clone(), |m| omega.apply_linear(m));
    let search = igcp::find_witness(&h, &omega_h, a.budget, &mut trial_rng(a.seed, 0))?;
    let mut out = to_value(&search);
    out["v"] = to_value(&search.witness.as_ref().map(|w| w.v.clone()));
    if let (Some(m), Some(w)) = (&matrix, &search.witness) {
        let inv = linalg::inverse(m).expect("change of basis is invertible");
        let v: Vec<linalg::Rational> = w.v.iter().map(|s| linalg::parse_rational(s).expect("own output")).collect();
        let original: Vec<String> = linalg::mat_vec(&inv, &v).iter().map(|x| x.to_string()).collect();
        out["v_hyperbolic"] = out["v"].take();
        out["v"] = json!(original);
    }
    Ok((search.found, out))
}

fn verify(a: &VerifyArgs) -> Outcome {
    let report = igcp::verify_main_theorem(a.dim, a.trials, a.budget, a.seed)?;
    Ok((report.all_confirmed(), to_value(&report)))
}

fn counterexample_holds(r: &CounterexampleReport) -> bool {
    let dims = match r.which {
        7 => (14, 8, 6),
        _ => (21, 14, 7),
    };
    !r.in_grassmann && r.all_images_isotropic && (r.dim_g, r.dim_stab_v0, r.orbit_dim) == dims
}

fn counterexample(a: &CounterexampleArgs) -> Outcome {
    if let Some(m) = a.lagrangian {
        let (_, report) = counterexamples::lagrangian_counterexample(m, a.samples, a.seed)?;
        return Ok((report.wedge_square_nonzero && report.all_images_zero, to_value(&report)));
    }
    let which = a.which.expect("clap requires --which or --lagrangian");
    let report = counterexamples::check_counterexample(which, a.samples, a.seed)?;
    let mut out = to_value(&report);
    let mut holds = counterexample_holds(&report);
    if which == 7 {
        let fano = counterexamples::fano_change_of_basis_check();
        out["fano_change_of_basis"] = json!(fano);
        holds &= fano;
    }
    Ok((holds, out))
}

fn ideal(a: &IdealArgs) -> Outcome {
    let variety = Variety::parse(&a.variety)
        .ok_or_else(|| Failure::Usage(format!("unknown variety {:?}; use iso37 or iso48_component", a.variety)))?;
    let (_, report) = ideal_lab::run_rank4_pipeline(variety, a.seed)?;
    let mut out = to_value(&report);
    out["quadrics"] = out["generators"].take();
    out.as_object_mut().expect("object").remove("generators");
    Ok((report.certified, out))
}

fn ranks(a: &RanksArgs) -> Outcome {
    let quadrics = io::parse_quadrics(&read(&a.input)?)?;
    let rows: Vec<Value> = quadrics
        .iter()
        .enumerate()
        .map(|(index, (q, claimed))| {
            let rank = quadric_rank(q);
            json!({
                "index": index,
                "rank": rank,
                "claimed": claimed,
                "matches_claim": claimed.is_none_or(|c| c == rank),
                "at_most_4": rank <= 4,
            })
        })
        .collect();
    let all_small = rows.iter().all(|r| r["at_most_4"] == json!(true));
    let all_match = rows.iter().all(|r| r["matches_claim"] == json!(true));
    Ok((
        all_small && all_match,
        json!({ "quadrics": rows, "all_at_most_4": all_small, "claims_match": all_match }),
    ))
}

fn reduce(a: &ReduceArgs) -> Outcome {
    let space = load_space(&a.space)?;
    let omega = load_form(&a.input, &space)?;
    if !space.is_hyperbolic() {
        return Err(Failure::Usage("reduce needs a hyperbolic space (--space)".into()));
    }
    let before = cones::in_isotropic_cone(&space, &omega);
    let r = igcp::reduce_to_base(&space, &omega, a.budget, &mut trial_rng(a.seed, 0))?;
    let after = cones::in_isotropic_cone(&r.space, &r.omega);
    let chain: Vec<Vec<String>> = r
        .chain
        .iter()
        .map(|v| v.iter().map(|x| x.to_string()).collect())
        .collect();
    let out = json!({
        "input_in_isotropic_cone": before,
        "final_dim": r.space.dim(),
        "final": MultiVectorJson::from_multivector(&r.omega, LabelKind::Hyperbolic),
        "final_in_isotropic_cone": after,
        "chain": chain,
    });
    Ok((!before || after, out))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let (name, parameters, result) = match &cli.command {
        Command::Membership(a) => ("membership", to_value(a), membership(a)),
        Command::Witness(a) => ("witness", to_value(a), witness(a)),
        Command::VerifyMainTheorem(a) => ("verify-main-theorem", to_value(a), verify(a)),
        Command::Counterexample(a) => ("counterexample", to_value(a), counterexample(a)),
        Command::Ideal(a) => ("ideal", to_value(a), ideal(a)),
        Command::Ranks(a) => ("ranks", to_value(a), ranks(a)),
        Command::Reduce(a) => ("reduce", to_value(a), reduce(a)),
    };
    let (holds, outcome) = match result {
        Ok(x) => x,
        Err(Failure::Usage(msg)) => {
            eprintln!("isograss {name}: {msg}");
            return ExitCode::from(2);
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("isograss {name}: {msg}");
            return ExitCode::from(1);
        }
    };
    let report = RunReport {
        command: name,
        parameters,
        outcome,
        wall_time_ms: (!cli.omit_timing).then(|| start.elapsed().as_millis() as u64),
        version: env!("CARGO_PKG_VERSION"),
    };
    let text = serde_json::to_string_pretty(&report).expect("serializable") + "\n";
    match &cli.out {
        Some(path) => {
            if let Err(e) = fs::write(path, text) {
                eprintln!("isograss: {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(if holds { 0 } else { 1 })
}
