//! JSON command-line front end: builds magma descriptors from a small
//! construction DSL, computes and verifies witness certificates, runs the
//! column-shrinking lemma on rational matrices, and cross-checks the
//! library against its brute-force oracles.
//!
//! Exit codes are stable across commands: 0 pass, 1 semantic failure,
//! 2 input error, 3 budget exhaustion.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use duomagma::hm::SqueezeMap;
use duomagma::verify::RandomInstance;
use duomagma::*;

pub const SCHEMA_VERSION: &str = "duomagma-v1";

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Parser)]
#[command(name = "duomagma", version, about = "exact witness certificates for duoseparable enlargements")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a magma descriptor from a construction spec
    Build {
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute a witness certificate for an element and neighborhood
    Witness {
        descriptor: PathBuf,
        element: PathBuf,
        neighborhood: PathBuf,
        #[arg(long, default_value = "duo")]
        mode: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check a certificate file
    Verify { certificate: PathBuf },
    /// Shrink the first n columns of an n x 2n rational matrix
    Shrink {
        matrix: PathBuf,
        #[arg(long)]
        eps: String,
        #[arg(long, default_value = "lll")]
        strategy: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the seeded oracle cross-check suites
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, hide = true, default_value_t = false)]
        inject_fault: bool,
    },
}

pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // help/version are not input errors
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    match cli.command {
        Command::Build { spec, out } => cmd_build(&spec, &out),
        Command::Witness {
            descriptor,
            element,
            neighborhood,
            mode,
            out,
        } => cmd_witness(&descriptor, &element, &neighborhood, &mode, &out),
        Command::Verify { certificate } => cmd_verify(&certificate),
        Command::Shrink {
            matrix,
            eps,
            strategy,
            out,
        } => cmd_shrink(&matrix, &eps, &strategy, &out),
        Command::Selftest { seed, inject_fault } => cmd_selftest(seed, inject_fault),
    }
}

fn error_exit_code(e: &Error) -> i32 {
    match e {
        Error::BudgetExhausted(_) => EXIT_BUDGET,
        Error::AbsorptionFailed(_) | Error::NoInverse(_) => EXIT_FAIL,
        _ => EXIT_INPUT,
    }
}

fn fail(code: i32, msg: impl std::fmt::Display) -> i32 {
    eprintln!("error: {msg}");
    code
}

/// Compact JSON with sorted object keys, used for every emitted file.
pub fn canonical_json<T: Serialize>(value: &T) -> String {
    // serde_json's default map is ordered, so a round trip through Value
    // sorts all object keys
    let v = serde_json::to_value(value).expect("serializable");
    serde_json::to_string(&v).expect("value serializes")
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> std::result::Result<T, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn write_file(path: &Path, contents: &str) -> std::result::Result<(), String> {
    fs::write(path, contents).map_err(|e| format!("{}: {e}", path.display()))
}

// ---------------------------------------------------------------------------
// construction DSL

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstructionSpec {
    pub base: BaseSpec,
    #[serde(default)]
    pub pipeline: Vec<PipelineOp>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum BaseSpec {
    Cyclic { n: usize },
    Table {
        elements: Vec<String>,
        table: Vec<Vec<String>>,
        unit: String,
    },
    Vector { dim: usize },
    Torus { dim: usize },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PipelineOp {
    Hm0 {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        squeeze: Option<SqueezeMap>,
    },
    SemidirectZ,
    SemidirectAut { seeds: Vec<UnimodularMatrix> },
}

pub fn build_descriptor(spec: &ConstructionSpec) -> Result<MagmaDescriptor> {
    let mut current = match &spec.base {
        BaseSpec::Cyclic { n } => {
            if *n == 0 {
                return Err(Error::ShapeMismatch("cyclic order must be >= 1".into()));
            }
            mk_cyclic(*n)
        }
        BaseSpec::Table {
            elements,
            table,
            unit,
        } => mk_finite_magma(elements.clone(), table.clone(), unit.clone())?,
        BaseSpec::Vector { dim } => MagmaDescriptor::RationalVectorGroup { dim: *dim },
        BaseSpec::Torus { dim } => MagmaDescriptor::RationalTorus { dim: *dim },
    };
    for op in &spec.pipeline {
        current = match op {
            PipelineOp::Hm0 { squeeze } => {
                let s = squeeze.clone().unwrap_or_else(SqueezeMap::standard);
                s.validate()?;
                MagmaDescriptor::HM0Of {
                    base: Box::new(current),
                    squeeze: s,
                }
            }
            PipelineOp::SemidirectZ => match current {
                MagmaDescriptor::HM0Of { base, squeeze } => MagmaDescriptor::SemidirectZ {
                    base: Box::new(MagmaDescriptor::HM0Of {
                        base,
                        squeeze: squeeze.clone(),
                    }),
                    squeeze,
                },
                _ => {
                    return Err(Error::ShapeMismatch(
                        "semidirect-z applies to an hm0 stage".into(),
                    ))
                }
            },
            PipelineOp::SemidirectAut { seeds } => match current {
                MagmaDescriptor::RationalTorus { dim } => torus_duo_group(dim, seeds.clone())?,
                _ => {
                    return Err(Error::ShapeMismatch(
                        "semidirect-aut applies to a torus base".into(),
                    ))
                }
            },
        };
    }
    Ok(current)
}

// ---------------------------------------------------------------------------
// file schemas

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DescriptorFile {
    pub version: String,
    pub descriptor: MagmaDescriptor,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateFile {
    pub version: String,
    pub certificate: WitnessCertificate,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub version: String,
    pub rows: Vec<Vec<Rational>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShrinkResultFile {
    pub version: String,
    pub a: UnimodularMatrix,
    pub xa: Vec<Vec<Rational>>,
    pub det: String,
}

fn check_version(version: &str) -> std::result::Result<(), String> {
    if version == SCHEMA_VERSION {
        Ok(())
    } else {
        Err(format!("unsupported schema version `{version}`"))
    }
}

// ---------------------------------------------------------------------------
// commands

pub fn cmd_build(spec_path: &Path, out: &Path) -> i32 {
    let spec: ConstructionSpec = match read_json(spec_path) {
        Ok(s) => s,
        Err(e) => return fail(EXIT_INPUT, e),
    };
    let descriptor = match build_descriptor(&spec) {
        Ok(d) => d,
        Err(e) => return fail(EXIT_INPUT, e),
    };
    let file = DescriptorFile {
        version: SCHEMA_VERSION.to_string(),
        descriptor,
    };
    match write_file(out, &canonical_json(&file)) {
        Ok(()) => EXIT_PASS,
        Err(e) => fail(EXIT_INPUT, e),
    }
}

/// Computes a witness for `element` against `neighborhood` and writes a
/// passing certificate; pure library plumbing so the acceptance suite can
/// call it without spawning processes.
pub fn witness_certificate(
    descriptor: &MagmaDescriptor,
    element: &Element,
    neighborhood: &NeighborhoodSpec,
    mode: &str,
) -> Result<WitnessCertificate> {
    if mode != "duo" {
        return Err(Error::UnknownKind(format!("unsupported mode `{mode}`")));
    }
    neighborhood.validate()?;
    let witness = match descriptor {
        MagmaDescriptor::SemidirectZ { .. } => duo_witness_z(descriptor, element, neighborhood)?,
        MagmaDescriptor::SemidirectAut { .. } => {
            let registry = AbsorbingFamilyRegistry::for_descriptor(descriptor)?;
            duo_witness_group(descriptor, element, neighborhood, &registry)?
        }
        _ => {
            return Err(Error::ShapeMismatch(
                "witnesses are defined for semidirect constructions".into(),
            ))
        }
    };
    Ok(duo_certificate(descriptor, element, neighborhood, &witness))
}

pub fn cmd_witness(
    descriptor_path: &Path,
    element_path: &Path,
    neighborhood_path: &Path,
    mode: &str,
    out: &Path,
) -> i32 {
    let desc: DescriptorFile = match read_json(descriptor_path) {
        Ok(d) => d,
        Err(e) => return fail(EXIT_INPUT, e),
    };
    if let Err(e) = check_version(&desc.version) {
        return fail(EXIT_INPUT, e);
    }
    let element: Element = match read_json(element_path) {
        Ok(x) => x,
        Err(e) => return fail(EXIT_INPUT, e),
    };
    let neighborhood: NeighborhoodSpec = match read_json(neighborhood_path) {
        Ok(n) => n,
        Err(e) => return fail(EXIT_INPUT, e),
    };
    let certificate = match witness_certificate(&desc.descriptor, &element, &neighborhood, mode) {
        Ok(c) => c,
        Err(e) => return fail(error_exit_code(&e), e),
    };
    let file = CertificateFile {
        version: SCHEMA_VERSION.to_string(),
        certificate,
    };
    match write_file(out, &canonical_json(&file)) {
        Ok(()) => EXIT_PASS,
        Err(e) => fail(EXIT_INPUT, e),
    }
}

pub fn cmd_verify(certificate_path: &Path) -> i32 {
    let file: CertificateFile = match read_json(certificate_path) {
        Ok(c) => c,
        Err(e) => return fail(EXIT_INPUT, e),
    };
    if let Err(e) = check_version(&file.version) {
        return fail(EXIT_INPUT, e);
    }
    match check_certificate(&file.certificate) {
        Ok(verdict) => {
            println!("{}", canonical_json(&verdict));
            if verdict.is_pass() {
                EXIT_PASS
            } else {
                EXIT_FAIL
            }
        }
        Err(e) => fail(error_exit_code(&e), e),
    }
}

pub fn cmd_shrink(matrix_path: &Path, eps: &str, strategy: &str, out: &Path) -> i32 {
    let file: MatrixFile = match read_json(matrix_path) {
        Ok(m) => m,
        Err(e) => return fail(EXIT_INPUT, e),
    };
    if let Err(e) = check_version(&file.version) {
        return fail(EXIT_INPUT, e);
    }
    let eps: Rational = match eps.parse() {
        Ok(r) => r,
        Err(e) => return fail(EXIT_INPUT, format!("--eps: {e}")),
    };
    let mut budget = SearchBudget::default();
    match strategy {
        "lll" => {}
        "enumeration" => {
            budget.strategy = SearchStrategy::Enumeration;
        }
        other => return fail(EXIT_INPUT, format!("unknown strategy `{other}`")),
    }
    let x = match RationalMatrix::from_rows(file.rows) {
        Ok(x) => x,
        Err(e) => return fail(EXIT_INPUT, e),
    };
    let a = match shrink_columns(&x, &eps, &budget) {
        Ok(a) => a,
        Err(e) => return fail(error_exit_code(&e), e),
    };
    let xa = x.mul_int(a.matrix());
    let det = a.matrix().det();
    let result = ShrinkResultFile {
        version: SCHEMA_VERSION.to_string(),
        xa: (0..xa.rows).map(|i| xa.row(i)).collect(),
        a,
        det: det.to_string(),
    };
    println!("det {det}");
    match write_file(out, &canonical_json(&result)) {
        Ok(()) => EXIT_PASS,
        Err(e) => fail(EXIT_INPUT, e),
    }
}

// ---------------------------------------------------------------------------
// selftest

/// The four single-field tamperings of criterion-style tamper testing:
/// target element, each witness slot. Every returned certificate differs
/// from the input in exactly one field.
pub fn tamperings(cert: &WitnessCertificate) -> Vec<WitnessCertificate> {
    fn bump(x: &Element) -> Element {
        match x {
            Element::Pair { left, right } => match right {
                PairRight::Exponent(n) => Element::pair_z((**left).clone(), n + 1),
                PairRight::Aut(_) => Element::Pair {
                    left: Box::new(bump(left)),
                    right: right.clone(),
                },
            },
            Element::TorusPoint(cs) => {
                let mut cs = cs.clone();
                cs[0] = (&cs[0] + &Rational::new(1, 2)).mod1();
                Element::TorusPoint(cs)
            }
            other => other.clone(),
        }
    }
    let mut out = Vec::with_capacity(4);
    let mut t = cert.clone();
    t.element = bump(&t.element);
    out.push(t);
    for slot in 0..3 {
        let mut t = cert.clone();
        t.witness[slot].element = bump(&t.witness[slot].element);
        out.push(t);
    }
    out
}

struct Suite {
    name: &'static str,
    passed: bool,
    detail: String,
}

fn suite_membership_oracle(seed: u64) -> Suite {
    let mut bad = 0;
    for i in 0..100u64 {
        let Ok(RandomInstance::Step { base, f, a, b, eps }) =
            random_instance("step-function", seed.wrapping_mul(1000) + i)
        else {
            unreachable!()
        };
        let inner = NeighborhoodSpec::subset(vec![unit_of(&base)]);
        let direct = hm_nbhd_member(&base, &f, &inner, &a, &b, &eps).unwrap();
        let oracle = oracle_step_membership(&base, &f, &inner, &a, &b, &eps).unwrap();
        if direct != oracle {
            bad += 1;
        }
    }
    Suite {
        name: "membership-oracle",
        passed: bad == 0,
        detail: format!("{bad}/100 disagreements"),
    }
}

fn suite_small_combination_oracle(seed: u64) -> Suite {
    let mut bad = 0;
    let mut checked = 0;
    let k = BigInt::from(40);
    for i in 0..60u64 {
        let Ok(RandomInstance::ShrinkMatrix(m)) =
            random_instance("shrink-matrix", seed.wrapping_mul(1000) + i)
        else {
            unreachable!()
        };
        let cols = vec![vec![m.get(0, 0).clone()], vec![m.get(0, 1).clone()]];
        let eps = Rational::new(1, 3);
        if oracle_small_combination(&cols, &eps, &k).unwrap().is_some() {
            checked += 1;
            match small_combination(&cols, &eps, &SearchBudget::default()) {
                Ok(d) => {
                    let v = &cols[0][0] * &Rational::int(d[0].clone())
                        + &cols[1][0] * &Rational::int(d[1].clone());
                    if v.abs() > eps {
                        bad += 1;
                    }
                }
                Err(_) => bad += 1,
            }
        }
    }
    Suite {
        name: "small-combination-oracle",
        passed: bad == 0,
        detail: format!("{bad}/{checked} disagreements"),
    }
}

fn suite_certificate_tamper(seed: u64, inject_fault: bool) -> Suite {
    let mut passing = 0;
    let mut undetected = 0;
    for i in 0..40u64 {
        let Ok(RandomInstance::Certificate(cert)) =
            random_instance("certificate", seed.wrapping_mul(1000) + i)
        else {
            unreachable!()
        };
        if !check_certificate(&cert).unwrap().is_pass() {
            continue;
        }
        passing += 1;
        for t in tamperings(&cert) {
            if check_certificate(&t).unwrap().is_pass() {
                undetected += 1;
            }
        }
    }
    if inject_fault {
        // deliberate fault for exercising the failure path end to end
        undetected += 1;
    }
    Suite {
        name: "certificate-tamper",
        passed: undetected == 0 && passing > 0,
        detail: format!("{undetected} undetected tamperings over {passing} certificates"),
    }
}

fn suite_determinism(seed: u64) -> Suite {
    let kinds = ["step-function", "torus-point-set", "shrink-matrix", "certificate"];
    let stable = kinds
        .iter()
        .all(|k| random_instance(k, seed).unwrap() == random_instance(k, seed).unwrap());
    Suite {
        name: "determinism",
        passed: stable,
        detail: "seeded generators replayed".into(),
    }
}

pub fn cmd_selftest(seed: u64, inject_fault: bool) -> i32 {
    let suites = vec![
        suite_membership_oracle(seed),
        suite_small_combination_oracle(seed),
        suite_certificate_tamper(seed, inject_fault),
        suite_determinism(seed),
    ];
    let mut all_ok = true;
    for s in &suites {
        let status = if s.passed { "pass" } else { "FAIL" };
        println!("{:<26} {status}  ({})", s.name, s.detail);
        all_ok &= s.passed;
    }
    if all_ok {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}
