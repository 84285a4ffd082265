use std::process::{Command, Output};

use z2tower::cli::{read_report, CSV_HEADER};
use z2tower::tower::Verdict;

fn z2tower(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_z2tower"))
        .args(args)
        .env_remove("Z2TOWER_DISC_BOUND")
        .env_remove("Z2TOWER_P_MAX")
        .env_remove("Z2TOWER_Q_MAX")
        .env_remove("Z2TOWER_R_MAX")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn verify_worked_triple_json() {
    let o = z2tower(&["verify", "-p", "41", "-q", "3", "-r", "43", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["overall"], "pass");
    assert_eq!(v["structure"]["x_prime"], "Z/2Z");
    for name in ["lemma31", "prop33", "cor36", "remark42", "thm11"] {
        assert_eq!(v[name]["pass"], true, "{name}");
    }

    let rep = read_report(&o.stdout).unwrap();
    assert_eq!(rep.triple.pqr(), 41 * 3 * 43);
    assert_eq!(rep.overall, Verdict::Pass);
    let again = z2tower::cli::write_report(&rep, z2tower::cli::Format::Json).unwrap();
    assert_eq!(again, o.stdout);
}

#[test]
fn output_is_deterministic() {
    let a = z2tower(&["scan", "--p-max", "200", "--q-max", "40", "--r-max", "60", "--verify", "--format", "json", "-j", "4"]);
    let b = z2tower(&["scan", "--p-max", "200", "--q-max", "40", "--r-max", "60", "--verify", "--format", "json", "-j", "1"]);
    assert_eq!(a.status.code(), Some(0));
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn csv_header_is_fixed() {
    let o = z2tower(&["verify", "-p", "41", "-q", "3", "-r", "43", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().next().unwrap(), CSV_HEADER.join(","));
    let mut rd = csv::Reader::from_reader(&o.stdout[..]);
    let rows: Vec<csv::StringRecord> = rd.records().collect::<Result<_, _>>().unwrap();
    assert_eq!(rows.len(), 1);
    let row: Vec<&str> = rows[0].iter().collect();
    assert_eq!(row.len(), CSV_HEADER.len());
    assert_eq!(&row[..3], &["41", "3", "43"]);
    assert_eq!(row[CSV_HEADER.iter().position(|h| *h == "x_prime").unwrap()], "Z/2Z");
    assert_eq!(*row.last().unwrap(), "pass");
}

#[test]
fn output_file() {
    let path = std::env::temp_dir().join(format!("z2tower-cli-{}.json", std::process::id()));
    let o = z2tower(&["verify", "-p", "41", "-q", "3", "-r", "43", "--format", "json", "-o", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let rep = read_report(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(rep.overall, Verdict::Pass);
    std::fs::remove_file(path).unwrap();
}

#[test]
fn scan_bounds_from_environment() {
    let flags = z2tower(&["scan", "--p-max", "100", "--q-max", "20", "--r-max", "30"]);
    let env = Command::new(env!("CARGO_BIN_EXE_z2tower"))
        .arg("scan")
        .env("Z2TOWER_P_MAX", "100")
        .env("Z2TOWER_Q_MAX", "20")
        .env("Z2TOWER_R_MAX", "30")
        .output()
        .unwrap();
    assert_eq!(flags.status.code(), Some(0));
    assert_eq!(flags.stdout, env.stdout);
    let full = z2tower(&["scan"]);
    assert!(full.stdout.len() > flags.stdout.len());
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["frobnicate"][..],
        &["verify", "-p", "41"],
        &["verify", "-p", "41", "-q", "3", "-r", "11"],
        &["scan", "--p-max", "0"],
        &["symbol", "--kind", "quartic2", "43"],
    ] {
        let o = z2tower(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(o.stdout.is_empty(), "{args:?}");
        assert!(!o.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn symbols() {
    let o = z2tower(&["symbol", "--kind", "quartic2", "41"]);
    assert_eq!(stdout(&o), "-1\n");
    let o = z2tower(&["symbol", "--kind", "quartic2", "73"]);
    assert_eq!(stdout(&o), "1\n");
    let o = z2tower(&["symbol", "--kind", "legendre", "3", "7"]);
    assert_eq!(stdout(&o), "-1\n");
    let o = z2tower(&["symbol", "--kind", "hilbert-q", "-1", "-1", "inf"]);
    assert_eq!(stdout(&o), "-1\n");
}

#[test]
fn classgroup_of_small_field() {
    let o = z2tower(&["classgroup", "--disc", "12", "--narrow", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["order"], 2);
}
