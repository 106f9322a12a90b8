use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_rkem");

fn rkem(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("spawn rkem")
}

fn ok(args: &[&str]) -> String {
    let out = rkem(args);
    assert!(
        out.status.success(),
        "rkem {args:?} exited {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn p(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn keygen_is_byte_identical_under_seed() {
    let dir = tempfile::tempdir().unwrap();
    for tag in ["a", "b"] {
        ok(&[
            "keygen",
            "--preset",
            "rm16",
            "--seed",
            "7",
            "--out-pub",
            &p(dir.path(), &format!("{tag}.pub")),
            "--out-priv",
            &p(dir.path(), &format!("{tag}.priv")),
        ]);
    }
    for ext in ["pub", "priv"] {
        let a = fs::read(dir.path().join(format!("a.{ext}"))).unwrap();
        let b = fs::read(dir.path().join(format!("b.{ext}"))).unwrap();
        assert_eq!(a, b, "{ext}");
    }
}

#[test]
fn encap_decap_roundtrip_for_every_preset() {
    let dir = tempfile::tempdir().unwrap();
    for preset in ["toy8", "rm16", "rm32"] {
        let (pk, sk, ct) = (p(dir.path(), "pk"), p(dir.path(), "sk"), p(dir.path(), "ct"));
        ok(&[
            "keygen",
            "--preset",
            preset,
            "--seed",
            "1",
            "--out-pub",
            &pk,
            "--out-priv",
            &sk,
        ]);
        let sent = ok(&["encap", "--pub", &pk, "--ct", &ct, "--seed", "2"]);
        let got = ok(&["decap", "--priv", &sk, "--ct", &ct]);
        assert_eq!(sent, got, "{preset}");
        assert!(!sent.trim().is_empty());
    }
}

#[test]
fn common_randomness_file_roundtrip_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let (pk, sk, ct, cr) = (
        p(dir.path(), "pk"),
        p(dir.path(), "sk"),
        p(dir.path(), "ct"),
        p(dir.path(), "cr.txt"),
    );
    ok(&[
        "keygen",
        "--preset",
        "rm16",
        "--seed",
        "3",
        "--out-pub",
        &pk,
        "--out-priv",
        &sk,
        "--cr-r1",
        "10",
        "--cr-r2",
        "6",
    ]);
    fs::write(&cr, "0110100111 010110\n").unwrap();
    let sent: serde_json::Value = serde_json::from_str(&ok(&[
        "encap",
        "--pub",
        &pk,
        "--ct",
        &ct,
        "--seed",
        "4",
        "--cr-bits",
        &cr,
        "--json",
    ]))
    .unwrap();
    let got: serde_json::Value =
        serde_json::from_str(&ok(&["decap", "--priv", &sk, "--ct", &ct, "--cr-bits", &cr, "--json"])).unwrap();
    assert_eq!(got["ok"], true);
    assert_eq!(sent["key"], got["key"]);

    // Missing common randomness is a usage error.
    assert_eq!(rkem(&["decap", "--priv", &sk, "--ct", &ct]).status.code(), Some(2));
}

#[test]
fn full_mask_keys_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let (pk, sk, ct, cr) = (
        p(dir.path(), "pk"),
        p(dir.path(), "sk"),
        p(dir.path(), "ct"),
        p(dir.path(), "cr.txt"),
    );
    ok(&[
        "keygen",
        "--preset",
        "toy8",
        "--seed",
        "5",
        "--out-pub",
        &pk,
        "--out-priv",
        &sk,
        "--cr-full-mask",
    ]);
    let bits: String = (0..27).map(|i| if i % 3 == 0 { '1' } else { '0' }).collect();
    fs::write(&cr, bits).unwrap();
    let sent = ok(&[
        "encap",
        "--pub",
        &pk,
        "--ct",
        &ct,
        "--seed",
        "6",
        "--cr-bits",
        &cr,
        "--budget",
        "0",
    ]);
    assert_eq!(sent, ok(&["decap", "--priv", &sk, "--ct", &ct, "--cr-bits", &cr]));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let (pk, sk, pk2, sk2, ct) = (
        p(dir.path(), "pk"),
        p(dir.path(), "sk"),
        p(dir.path(), "pk2"),
        p(dir.path(), "sk2"),
        p(dir.path(), "ct"),
    );
    ok(&[
        "keygen",
        "--preset",
        "rm16",
        "--seed",
        "8",
        "--out-pub",
        &pk,
        "--out-priv",
        &sk,
    ]);
    ok(&[
        "keygen",
        "--preset",
        "rm16",
        "--seed",
        "9",
        "--out-pub",
        &pk2,
        "--out-priv",
        &sk2,
    ]);
    ok(&["encap", "--pub", &pk, "--ct", &ct, "--seed", "1"]);

    // wrong private key: blocks fail to decode
    let out = rkem(&["decap", "--priv", &sk2, "--ct", &ct, "--json"]);
    assert_eq!(out.status.code(), Some(3));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["ok"], false);

    // public key where a private key is expected, truncated files
    assert_eq!(rkem(&["decap", "--priv", &pk, "--ct", &ct]).status.code(), Some(4));
    let bytes = fs::read(&ct).unwrap();
    fs::write(&ct, &bytes[..bytes.len() / 2]).unwrap();
    assert_eq!(rkem(&["decap", "--priv", &sk, "--ct", &ct]).status.code(), Some(4));
    assert_eq!(
        rkem(&["decap", "--priv", &p(dir.path(), "missing"), "--ct", &ct])
            .status
            .code(),
        Some(4)
    );

    assert_eq!(
        rkem(&["encap", "--pub", &pk, "--ct", &ct, "--budget", "4"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(rkem(&["keygen", "--preset", "rm99"]).status.code(), Some(2));
    assert_eq!(rkem(&[]).status.code(), Some(2));
}

#[test]
fn missing_seed_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let out = rkem(&[
        "keygen",
        "--preset",
        "toy8",
        "--out-pub",
        &p(dir.path(), "pk"),
        "--out-priv",
        &p(dir.path(), "sk"),
    ]);
    assert!(out.status.success());
    let stderr = String::from_utf8(out.stderr).unwrap();
    let seed: u64 = stderr.trim().strip_prefix("seed: ").unwrap().parse().unwrap();
    let dir2 = tempfile::tempdir().unwrap();
    ok(&[
        "keygen",
        "--preset",
        "toy8",
        "--seed",
        &seed.to_string(),
        "--out-pub",
        &p(dir2.path(), "pk"),
        "--out-priv",
        &p(dir2.path(), "sk"),
    ]);
    assert_eq!(
        fs::read(dir.path().join("pk")).unwrap(),
        fs::read(dir2.path().join("pk")).unwrap()
    );
}

#[test]
fn analyze_reports_golden_numbers() {
    let text = ok(&["analyze", "--preset", "rm16"]);
    assert!(text.contains("788375") && text.contains(" 53 "));
    let csv = ok(&["analyze", "--csv"]);
    assert!(csv.starts_with("scheme,"));
    assert_eq!(csv.lines().count(), 4);
    let json: serde_json::Value = serde_json::from_str(&ok(&["analyze", "--json"])).unwrap();
    assert_eq!(json[1]["pk_bits"], 1_983_762);
}

#[test]
fn simulations_and_attack_are_reproducible() {
    let sweep = [
        "simulate",
        "consolidation",
        "--preset",
        "rm16",
        "--eps-sweep",
        "0:0.1:4",
        "--trials",
        "100",
        "--seed",
        "3",
    ];
    let parallel = ok(&sweep);
    assert_eq!(parallel, ok(&sweep));
    let mut sequential = sweep.to_vec();
    sequential.push("--sequential");
    assert_eq!(parallel, ok(&sequential));
    assert!(parallel.starts_with("epsilon,block_error_rate,key_failure_rate,trials\n"));
    assert_eq!(parallel.lines().count(), 5);

    let rtt = [
        "simulate",
        "rtt",
        "--packets",
        "500",
        "--seed",
        "4",
        "--jitter",
        "normal",
    ];
    let a = ok(&rtt);
    assert_eq!(a, ok(&rtt));
    assert!(a.starts_with("packet_index,rtt_a,rtt_b,bit_a,bit_b\n"));
    assert_eq!(a.lines().count(), 501);

    let attack = ["attack", "toy", "--seed", "5", "--budget", "1"];
    let a = ok(&attack);
    assert_eq!(a, ok(&attack));
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["result"]["candidates_tested"], 196);
    assert_eq!(v["true_key_accepted"], true);
}
