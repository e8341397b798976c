use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

fn steklov(args: &[&str], out: &Path) -> (i32, String) {
    let o = Command::new(env!("CARGO_BIN_EXE_steklov"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("STEKLOV_OUT")
        .output()
        .unwrap();
    (o.status.code().unwrap(), String::from_utf8_lossy(&o.stdout).into_owned())
}

fn files(dir: &Path) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    v.sort();
    v
}

fn report(dir: &Path) -> Value {
    let json = files(dir).into_iter().find(|p| p.extension().is_some_and(|e| e == "json")).unwrap();
    serde_json::from_str(&fs::read_to_string(json).unwrap()).unwrap()
}

fn column(r: &Value, key: &str) -> Vec<f64> {
    r["rows"].as_array().unwrap().iter().map(|row| row[key].as_f64().unwrap()).collect()
}

#[test]
fn disk_fem_spectrum() {
    let d = tempfile::tempdir().unwrap();
    let (code, _) = steklov(&["spectrum", "--surface", "disk", "--method", "fem", "--count", "7"], d.path());
    assert_eq!(code, 0);
    let sigma = column(&report(d.path()), "sigma");
    for (s, e) in sigma.iter().zip([0.0, 1.0, 1.0, 2.0, 2.0, 3.0, 3.0]) {
        assert!((s - e).abs() <= 5e-3 * e.max(1.0), "{sigma:?}");
    }
}

#[test]
fn closed_form_critical_values() {
    let d = tempfile::tempdir().unwrap();
    let (code, _) = steklov(&["spectrum", "--surface", "cylinder", "--T", "2.39936"], &d.path().join("c"));
    assert_eq!(code, 0);
    let bar = column(&report(&d.path().join("c")), "sigma_bar");
    assert!((bar[1] - 10.4748).abs() < 1e-3);
    let (code, _) = steklov(&["spectrum", "--surface", "mobius", "--T", "0.65848"], &d.path().join("m"));
    assert_eq!(code, 0);
    let bar = column(&report(&d.path().join("m")), "sigma_bar");
    assert!((bar[1] - 2.0 * PI * 3f64.sqrt()).abs() < 1e-4);
}

#[test]
fn csv_spectrum_header() {
    let d = tempfile::tempdir().unwrap();
    let (code, _) = steklov(&["spectrum", "--surface", "disk", "--format", "csv", "--count", "3"], d.path());
    assert_eq!(code, 0);
    let f = files(d.path());
    assert_eq!(f.len(), 1);
    let text = fs::read_to_string(&f[0]).unwrap();
    assert_eq!(text.lines().next(), Some("k,sigma,sigma_bar,multiplicity"));
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn both_methods_report_discrepancies() {
    let d = tempfile::tempdir().unwrap();
    let args = ["spectrum", "--surface", "mobius", "--T", "1", "--method", "both", "--count", "5", "--resolution", "0.08"];
    let (code, _) = steklov(&args, d.path());
    assert_eq!(code, 0);
    let disc = column(&report(d.path()), "relative_discrepancy");
    assert_eq!(disc.len(), 5);
    assert!(disc.iter().all(|&x| x < 5e-3), "{disc:?}");
}

#[test]
fn boundary_sweep_preset() {
    let d = tempfile::tempdir().unwrap();
    let (code, stdout) = steklov(&["sweep", "--preset", "two-disks", "--k", "2"], d.path());
    assert_eq!(code, 0, "{stdout}");
    assert_eq!(files(d.path()).len(), 2);
    let r = report(d.path());
    let err = column(&r, "normalized_error");
    assert_eq!(err.len(), 4);
    assert!(err.windows(2).all(|w| w[1] < w[0]));
    assert!(column(&r, "target_sigma_bar_k").iter().all(|&t| (t - 4.0 * PI).abs() < 1e-12));
}

#[test]
fn annulus_comparison_margin() {
    let d = tempfile::tempdir().unwrap();
    let (code, _) = steklov(&["compare", "--surface", "annulus", "--k", "2"], d.path());
    assert_eq!(code, 0);
    let margin = column(&report(d.path()), "margin")[0];
    assert!((margin - 4.19).abs() < 5e-3, "{margin}");
}

#[test]
fn usage_errors_exit_two_without_output() {
    let d = tempfile::tempdir().unwrap();
    let out = d.path().join("never");
    for args in [
        vec!["spectrum", "--surface", "cylinder"],
        vec!["spectrum", "--surface", "disk", "--density", "-1"],
        vec!["sweep", "--preset", "two-disks", "--rho", "0.1,0.2"],
        vec!["sweep"],
        vec!["compare", "--surface", "disk"],
        vec!["spectrum", "--colour", "blue"],
        vec!["frobnicate"],
    ] {
        let (code, _) = steklov(&args, &out);
        assert_eq!(code, 2, "{args:?}");
        assert!(!out.exists(), "{args:?} left files behind");
    }
}

#[test]
fn environment_overrides_out() {
    let d = tempfile::tempdir().unwrap();
    let (flag, env) = (d.path().join("flag"), d.path().join("env"));
    let o = Command::new(env!("CARGO_BIN_EXE_steklov"))
        .args(["constants", "--out"])
        .arg(&flag)
        .env("STEKLOV_OUT", &env)
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(env.is_dir() && !flag.exists());
}

#[test]
fn identical_configs_give_identical_bytes() {
    let d = tempfile::tempdir().unwrap();
    let args: [&[&str]; 3] = [
        &["bounds", "--bound", "karpukhin-annulus", "--trials", "4", "--seed", "9", "--k", "3", "--resolution", "0.1"],
        &["spectrum", "--surface", "cylinder", "--T", "1.5", "--method", "both", "--resolution", "0.1"],
        &["sweep", "--preset", "catenoid-disk", "--rho", "0.2,0.1", "--resolution", "0.1"],
    ];
    for (i, a) in args.iter().enumerate() {
        let (x, y) = (d.path().join(format!("{i}x")), d.path().join(format!("{i}y")));
        steklov(a, &x);
        steklov(a, &y);
        let (fx, fy) = (files(&x), files(&y));
        assert!(!fx.is_empty());
        assert_eq!(fx.iter().map(|p| p.file_name()).collect::<Vec<_>>(), fy.iter().map(|p| p.file_name()).collect::<Vec<_>>());
        for (p, q) in fx.iter().zip(&fy) {
            assert_eq!(fs::read(p).unwrap(), fs::read(q).unwrap(), "{}", p.display());
        }
    }
}

#[test]
fn different_seeds_give_different_files() {
    let d = tempfile::tempdir().unwrap();
    let base = ["bounds", "--trials", "2", "--k", "2", "--resolution", "0.1", "--seed"];
    steklov(&[&base[..], &["1"]].concat(), &d.path().join("a"));
    steklov(&[&base[..], &["2"]].concat(), &d.path().join("b"));
    let name = |s| files(&d.path().join(s))[0].file_name().unwrap().to_owned();
    assert_ne!(name("a"), name("b"));
}

#[test]
fn verify_passes() {
    let d = tempfile::tempdir().unwrap();
    let (code, stdout) = steklov(&["verify"], d.path());
    assert_eq!(code, 0, "{stdout}");
    assert!(stdout.contains("12/12 criteria pass"));
}
