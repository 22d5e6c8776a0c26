//! End-to-end runs of the `mhs` binary.

use std::path::Path;
use std::process::{Command, Output};

fn mhs(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mhs"))
        .env("MHS_CACHE_DIR", cache)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn expand_prints_canonical_series() {
    let dir = tempfile::tempdir().unwrap();
    let o = mhs(dir.path(), &["expand", "apery()", "--order", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "1 + 2/3 * p^3 * H(2,1) + O(p^4)");
    let o = mhs(dir.path(), &["--order", "5", "expand", "curious(3,3)"]);
    assert_eq!(stdout(&o).trim(), "-2 * p^2 * H(2,1) + 2 * p^4 * H(4,1) + O(p^5)");
}

#[test]
fn session_expression_has_valuation_six() {
    let dir = tempfile::tempdir().unwrap();
    let o = mhs(
        dir.path(),
        &["valuation", "12 - 9*binp(2,1) + 2*binp(3,1) - 24*hp(3)", "--order", "8"],
    );
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "6");
}

#[test]
fn exit_codes_carry_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let o = mhs(dir.path(), &["prove", "p*H(1) + p^2*H(1,1) = 0 mod p^3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).trim_end().ends_with("proved"));
    let o = mhs(dir.path(), &["prove", "H(1) = 1 mod p^1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).trim_end().ends_with("unproven"));
    let o = mhs(dir.path(), &["prove", "H(1) = 1 mod p^"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("column"));
    let o = mhs(dir.path(), &["expand", "nonsense(1)"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown atom"));
    let o = mhs(dir.path(), &["--max-modulus", "4", "prove", "apery() = 1 mod p^6"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn certificates_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("cb.cert");
    let cert_s = cert.to_str().unwrap();
    let o = mhs(
        dir.path(),
        &["prove", "12 - 9*binp(2,1,1) + 2*binp(3,1,1) = 24*p^3*H(3) mod p^6", "--quiet", "--certificate", cert_s],
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let o = mhs(dir.path(), &["verify-certificate", cert_s]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("certificate valid"));

    // change one multiplier
    let text = std::fs::read_to_string(&cert).unwrap();
    let line = text.lines().find(|l| l.contains("* R[")).unwrap();
    let (m, rest) = line.split_once(" * ").unwrap();
    let tampered = text.replacen(line, &format!("{m}7 * {rest}"), 1);
    std::fs::write(&cert, tampered).unwrap();
    let o = mhs(dir.path(), &["verify-certificate", cert_s]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("MISMATCH"));
}

#[test]
fn identities_dump_and_cache() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("basis6.txt");
    let o = mhs(dir.path(), &["identities", "--modulus", "6", "--dump", dump.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("free: () (2,1) (4,1)"), "{out}");
    assert!(dir.path().join("basis-v1-n6.txt").exists());
    let text = std::fs::read_to_string(&dump).unwrap();
    assert!(text.starts_with("mhs-basis-dump v1\nmodulus: p^6\n"));
    // second run is served from the cache and agrees
    let again = mhs(dir.path(), &["identities", "--modulus", "6"]);
    assert_eq!(stdout(&again), out);
}

#[test]
fn verify_reads_statement_files() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("alt.txt");
    std::fs::write(
        &file,
        "# alternating squares against the full sum\n\
         p^-2*alt(2) = 3/4*H(2) mod p^3\n\
         p*H(1) + p^2*H(1,1) = 0 mod p^3   # Wolstenholme\n",
    )
    .unwrap();
    let o = mhs(dir.path(), &["verify", "--file", file.to_str().unwrap(), "--primes", "11..61"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(stdout(&o).matches("summary: PASS").count(), 2);
    let o = mhs(dir.path(), &["prove", "--file", file.to_str().unwrap(), "--quiet"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = mhs(dir.path(), &["verify", "H(1) = 1 mod p", "--primes", "11..31"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("summary: FAIL"));
}
