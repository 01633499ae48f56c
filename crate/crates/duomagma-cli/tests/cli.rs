//! End-to-end tests of the command-line interface: happy paths, the
//! documented exit codes, and file round-trips. Most checks run against
//! the library entry points; a handful spawn the real binary to pin down
//! process-level behavior.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use duomagma::*;
use duomagma_cli::*;

fn write(dir: &Path, name: &str, contents: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, contents).unwrap();
    p
}

fn f_c2_spec() -> &'static str {
    r#"{"base": {"kind": "cyclic", "n": 2}, "pipeline": [{"op": "hm0"}, {"op": "semidirect-z"}]}"#
}

fn i_x_element_json() -> String {
    let m = build_descriptor(&serde_json::from_str(f_c2_spec()).unwrap()).unwrap();
    let i_x = embed_into_f(&m, &Element::atom("g1")).unwrap();
    let target = match i_x {
        Element::Pair { left, .. } => Element::pair_z(*left, 3),
        _ => unreachable!(),
    };
    serde_json::to_string(&target).unwrap()
}

fn nbhd_json() -> String {
    let w = NeighborhoodSpec::product_discrete(NeighborhoodSpec::subbasic(
        NeighborhoodSpec::subset(vec![Element::atom("e")]),
        Rational::zero(),
        Rational::one(),
        Rational::new(1, 4),
    ));
    serde_json::to_string(&w).unwrap()
}

#[test]
fn build_witness_verify_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "spec.json", f_c2_spec());
    let desc = dir.path().join("desc.json");
    assert_eq!(cmd_build(&spec, &desc), EXIT_PASS);

    let element = write(dir.path(), "element.json", &i_x_element_json());
    let nbhd = write(dir.path(), "nbhd.json", &nbhd_json());
    let cert = dir.path().join("cert.json");
    assert_eq!(cmd_witness(&desc, &element, &nbhd, "duo", &cert), EXIT_PASS);
    assert_eq!(cmd_verify(&cert), EXIT_PASS);

    // the flagship factorization: s1 = (unit, -2), s2 = (unit, 5)
    let file: CertificateFile = serde_json::from_str(&fs::read_to_string(&cert).unwrap()).unwrap();
    let exps: Vec<i64> = file
        .certificate
        .witness
        .iter()
        .map(|slot| match &slot.element {
            Element::Pair {
                right: PairRight::Exponent(n),
                ..
            } => *n,
            _ => panic!("unexpected slot shape"),
        })
        .collect();
    assert_eq!(exps, vec![-2, 0, 5]);
}

#[test]
fn emitted_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "spec.json", f_c2_spec());
    let desc = dir.path().join("desc.json");
    cmd_build(&spec, &desc);
    let text = fs::read_to_string(&desc).unwrap();
    let parsed: DescriptorFile = serde_json::from_str(&text).unwrap();
    assert_eq!(canonical_json(&parsed), text);
}

#[test]
fn build_rejects_malformed_spec() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", "{not json");
    assert_eq!(cmd_build(&bad, &dir.path().join("o.json")), EXIT_INPUT);
    let unknown = write(
        dir.path(),
        "unknown.json",
        r#"{"base": {"kind": "cyclic", "n": 2}, "pipeline": [], "extra": 1}"#,
    );
    assert_eq!(cmd_build(&unknown, &dir.path().join("o.json")), EXIT_INPUT);
    let bad_pipeline = write(
        dir.path(),
        "pipe.json",
        r#"{"base": {"kind": "cyclic", "n": 2}, "pipeline": [{"op": "semidirect-z"}]}"#,
    );
    assert_eq!(cmd_build(&bad_pipeline, &dir.path().join("o.json")), EXIT_INPUT);
}

#[test]
fn build_torus_duo_group_descriptor() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(
        dir.path(),
        "spec.json",
        r#"{"base": {"kind": "torus", "dim": 2},
            "pipeline": [{"op": "semidirect-aut", "seeds": [[["5","1"],["-6","-1"]]]}]}"#,
    );
    let out = dir.path().join("desc.json");
    assert_eq!(cmd_build(&spec, &out), EXIT_PASS);
    let file: DescriptorFile = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    match file.descriptor {
        MagmaDescriptor::SemidirectAut { base, seeds, .. } => {
            assert_eq!(*base, MagmaDescriptor::RationalTorus { dim: 2 });
            assert_eq!(seeds.len(), 1);
        }
        other => panic!("unexpected descriptor {other:?}"),
    }
}

#[test]
fn witness_rejects_non_unit_neighborhood() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "spec.json", f_c2_spec());
    let desc = dir.path().join("desc.json");
    cmd_build(&spec, &desc);
    let element = write(dir.path(), "element.json", &i_x_element_json());
    // inner set without the unit: not a unit neighborhood
    let w = NeighborhoodSpec::product_discrete(NeighborhoodSpec::subbasic(
        NeighborhoodSpec::subset(vec![Element::atom("g1")]),
        Rational::zero(),
        Rational::one(),
        Rational::new(1, 4),
    ));
    let nbhd = write(dir.path(), "nbhd.json", &serde_json::to_string(&w).unwrap());
    assert_eq!(
        cmd_witness(&desc, &element, &nbhd, "duo", &dir.path().join("c.json")),
        EXIT_INPUT
    );
}

#[test]
fn witness_rejects_unknown_mode() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "spec.json", f_c2_spec());
    let desc = dir.path().join("desc.json");
    cmd_build(&spec, &desc);
    let element = write(dir.path(), "element.json", &i_x_element_json());
    let nbhd = write(dir.path(), "nbhd.json", &nbhd_json());
    assert_eq!(
        cmd_witness(&desc, &element, &nbhd, "roelcke", &dir.path().join("c.json")),
        EXIT_INPUT
    );
}

#[test]
fn verify_flags_tampered_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "spec.json", f_c2_spec());
    let desc = dir.path().join("desc.json");
    cmd_build(&spec, &desc);
    let element = write(dir.path(), "element.json", &i_x_element_json());
    let nbhd = write(dir.path(), "nbhd.json", &nbhd_json());
    let cert_path = dir.path().join("cert.json");
    cmd_witness(&desc, &element, &nbhd, "duo", &cert_path);

    let mut file: CertificateFile =
        serde_json::from_str(&fs::read_to_string(&cert_path).unwrap()).unwrap();
    // hand-edit s2 from (unit, 5) to (unit, 4)
    if let Element::Pair { right, .. } = &mut file.certificate.witness[2].element {
        *right = PairRight::Exponent(4);
    }
    let tampered = write(dir.path(), "tampered.json", &canonical_json(&file));
    assert_eq!(cmd_verify(&tampered), EXIT_FAIL);
}

#[test]
fn verify_rejects_truncated_and_wrong_version() {
    let dir = tempfile::tempdir().unwrap();
    let trunc = write(dir.path(), "trunc.json", r#"{"version": "duomagma-v1", "cert"#);
    assert_eq!(cmd_verify(&trunc), EXIT_INPUT);
    let spec = write(dir.path(), "spec.json", f_c2_spec());
    let desc = dir.path().join("desc.json");
    cmd_build(&spec, &desc);
    let element = write(dir.path(), "element.json", &i_x_element_json());
    let nbhd = write(dir.path(), "nbhd.json", &nbhd_json());
    let cert_path = dir.path().join("cert.json");
    cmd_witness(&desc, &element, &nbhd, "duo", &cert_path);
    let mut file: CertificateFile =
        serde_json::from_str(&fs::read_to_string(&cert_path).unwrap()).unwrap();
    file.version = "duomagma-v0".into();
    let wrong = write(dir.path(), "wrong.json", &canonical_json(&file));
    assert_eq!(cmd_verify(&wrong), EXIT_INPUT);
}

#[test]
fn shrink_command_examples() {
    let dir = tempfile::tempdir().unwrap();
    let mat = write(
        dir.path(),
        "mat.json",
        r#"{"version": "duomagma-v1", "rows": [["5/2", "1"]]}"#,
    );
    let out = dir.path().join("out.json");
    assert_eq!(cmd_shrink(&mat, "1/2", "lll", &out), EXIT_PASS);
    let result: ShrinkResultFile = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(result.det, "1");
    assert_eq!(
        result.a,
        UnimodularMatrix::from_i64(&[&[1, 0], &[-2, 1]]).unwrap()
    );
    for c in &result.xa[0][..1] {
        assert!(c.abs() <= Rational::new(1, 2));
    }

    // already-small input keeps the identity
    let small = write(
        dir.path(),
        "small.json",
        r#"{"version": "duomagma-v1", "rows": [["1/4", "3"]]}"#,
    );
    assert_eq!(cmd_shrink(&small, "1/2", "enumeration", &out), EXIT_PASS);
    let result: ShrinkResultFile = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(result.a, UnimodularMatrix::identity(2));

    // wrong shape
    let bad = write(
        dir.path(),
        "bad.json",
        r#"{"version": "duomagma-v1", "rows": [["1/2", "1", "2"]]}"#,
    );
    assert_eq!(cmd_shrink(&bad, "1/2", "lll", &out), EXIT_INPUT);
    // bad eps / strategy
    assert_eq!(cmd_shrink(&mat, "0.5", "lll", &out), EXIT_INPUT);
    assert_eq!(cmd_shrink(&mat, "1/2", "magic", &out), EXIT_INPUT);
}

#[test]
fn selftest_passes_and_reports_injected_fault() {
    assert_eq!(cmd_selftest(0, false), EXIT_PASS);
    assert_eq!(cmd_selftest(0, true), EXIT_FAIL);
}

// -- process-level checks ---------------------------------------------------

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_duomagma"))
}

#[test]
fn binary_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "spec.json", f_c2_spec());
    let desc = dir.path().join("desc.json");
    let status = bin().args([
        "build",
        spec.to_str().unwrap(),
        "--out",
        desc.to_str().unwrap(),
    ])
    .status()
    .unwrap();
    assert_eq!(status.code(), Some(0));

    let bad = write(dir.path(), "bad.json", "{");
    let status = bin()
        .args(["build", bad.to_str().unwrap(), "--out", desc.to_str().unwrap()])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));

    let status = bin().args(["verify", "/nonexistent/cert.json"]).status().unwrap();
    assert_eq!(status.code(), Some(2));

    let status = bin().args(["frobnicate"]).status().unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn selftest_report_is_byte_identical_across_runs() {
    let out1 = bin().args(["selftest", "--seed", "5"]).output().unwrap();
    let out2 = bin().args(["selftest", "--seed", "5"]).output().unwrap();
    assert!(out1.status.success());
    assert_eq!(out1.stdout, out2.stdout);
}
