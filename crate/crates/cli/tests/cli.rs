use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use opke_cli::report::{sci, ConvergenceReport};
use tempfile::TempDir;

fn opke(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_opke")).args(args).current_dir(dir).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn workspace() -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("cheb.spec"), "family=chebyshev\n").unwrap();
    std::fs::write(dir.path().join("leg.spec"), "# uniform on [-1, 1]\nfamily=legendre\n").unwrap();
    std::fs::write(dir.path().join("jac.spec"), "family=jacobi\nalpha=0\nbeta=0\n").unwrap();
    std::fs::write(dir.path().join("tab.spec"), "family=table\nfile=weights.csv\n").unwrap();
    std::fs::write(dir.path().join("weights.csv"), "t,w\n-1,0.5\n0,1\n1,0.5\n").unwrap();
    dir
}

fn read_report(path: PathBuf) -> ConvergenceReport {
    ConvergenceReport::parse(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn recurrence_rows() {
    let dir = workspace();
    let o = opke(&["recurrence", "--spec", "cheb.spec", "--n", "3"], dir.path());
    assert!(o.status.success());
    let lines: Vec<String> = stdout(&o).lines().map(String::from).collect();
    assert_eq!(lines[0], "k,a_k,b_k,gamma_k");
    assert!(lines[1].starts_with("1,0.00000000000e0,7.07106781187e-1,"));
    assert!(lines[2].starts_with("2,0.00000000000e0,5.00000000000e-1,"));
    assert!(lines[3].starts_with("3,0.00000000000e0,5.00000000000e-1,"));

    let o = opke(&["recurrence", "--spec", "jac.spec", "--n", "1"], dir.path());
    assert!(stdout(&o).lines().nth(1).unwrap().starts_with("1,0.00000000000e0,5.77350269190e-1,"));

    let o = opke(&["recurrence", "--spec", "cheb.spec", "--n", "0"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "k,a_k,b_k,gamma_k\n");

    let o = opke(&["recurrence", "--spec", "missing.spec", "--n", "2"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("missing.spec"));
}

#[test]
fn ratio_values_and_guards() {
    let dir = workspace();
    let o = opke(&["ratio", "--spec", "cheb.spec", "--n", "1", "--alphas", "0", "--betas", "2j"], dir.path());
    assert!(o.status.success());
    assert_eq!(stdout(&o), "0.105572809000 0.000000000000\n");

    let o = opke(&["ratio", "--spec", "cheb.spec", "--n", "1", "--alphas", "0,0.5", "--betas", "1j,2j"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("1 ≤ k ≤ n"));

    let o = opke(&["ratio", "--spec", "cheb.spec", "--n", "2", "--alphas", "0", "--betas", "0.5"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("non-real"));

    let o = opke(&["ratio", "--spec", "cheb.spec", "--n", "2", "--alphas", "0", "--betas", "zz"], dir.path());
    assert_eq!(o.status.code(), Some(2));

    let o = opke(&["ratio", "--spec", "cheb.spec", "--n", "2"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn ratio_on_a_table_weight_with_negative_shifts() {
    let dir = workspace();
    let o = opke(
        &["ratio", "--spec", "tab.spec", "--n", "3", "--alphas", "\u{2212}0.2", "--betas", "-0.1-0.7j"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let v: Vec<f64> = stdout(&o).split_whitespace().map(|t| t.parse().unwrap()).collect();
    assert_eq!(v.len(), 2);
    assert!(v.iter().all(|x| x.is_finite()));
}

#[test]
fn oracle_exit_codes() {
    let dir = workspace();
    let o = opke(&["oracle", "--spec", "cheb.spec", "--n", "2", "--alphas", "0", "--betas", "1j"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("discrepancy"));

    let o = opke(&["oracle", "--spec", "cheb.spec", "--n", "4", "--alphas", "0", "--betas", "1j"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("cost guard"));

    let o = opke(
        &["oracle", "--spec", "leg.spec", "--n", "3", "--alphas", "0,0.4", "--betas", "1j,2j"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn oracle_with_metropolis_chain() {
    let dir = workspace();
    let args = [
        "oracle", "--spec", "cheb.spec", "--n", "6", "--alphas", "0", "--betas", "1j", "--steps", "50000", "--seed", "9",
    ];
    let a = opke(&args, dir.path());
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert!(stdout(&a).contains("mcmc_stderr"));
    let b = opke(&args, dir.path());
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn converge_report() {
    let dir = workspace();
    let o = opke(
        &[
            "converge", "--spec", "cheb.spec", "--x", "0", "--alphas", "0", "--betas", "1j", "--n-list", "128,16,64,32",
            "--out", "r.csv",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("final n = 128"));
    let r = read_report(dir.path().join("r.csv"));
    assert_eq!(r.meta("status"), Some("complete"));
    assert_eq!(r.meta("spec_sha256").map(str::len), Some(64));
    assert!(r.meta("timestamp").is_some() && r.meta("version").is_some() && r.meta("x") == Some("0"));
    let ns: Vec<usize> = r.rows.iter().map(|row| row.n).collect();
    assert_eq!(ns, vec![16, 32, 64, 128]);
    let limit = r.rows[0].limit;
    assert!(r.rows.iter().all(|row| row.limit == limit));
    assert!((limit.re - (-std::f64::consts::PI).exp()).abs() < 1e-11);
    assert!(r.rows[3].abs_error() <= 0.02);

    let o = opke(
        &["converge", "--spec", "cheb.spec", "--x", "0", "--alphas", "0", "--betas", "1j", "--n-list", "8", "--out", "s.csv"],
        dir.path(),
    );
    assert!(o.status.success());
    assert_eq!(read_report(dir.path().join("s.csv")).rows.len(), 1);
}

// Off the centre the error carries an O(1/n) term oscillating like
// cos(2n arccos x), so single orders can land near its zeros (n = 64 does).
// The envelope over a full period is what decays.
#[test]
fn converge_legendre_off_center() {
    let dir = workspace();
    let sweep = |spec: &str, ns: &str, out: &str| {
        let o = opke(
            &["converge", "--spec", spec, "--x", "0.3", "--alphas", "0", "--betas", "1j", "--n-list", ns, "--out", out],
            dir.path(),
        );
        assert!(o.status.success(), "{}", stderr(&o));
        read_report(dir.path().join(out)).rows
    };
    let window = |lo: usize| (lo..lo + 12).step_by(2).map(|n| n.to_string()).collect::<Vec<_>>().join(",");
    let envelope: Vec<f64> = [28, 56, 112, 224]
        .iter()
        .map(|&lo| sweep("leg.spec", &window(lo), "w.csv").iter().map(|r| r.abs_error()).fold(0.0, f64::max))
        .collect();
    assert!(envelope.windows(2).all(|w| w[1] < w[0]), "{envelope:?}");

    let catalog = sweep("leg.spec", "16,32,64,128", "r.csv");
    assert!(catalog[3].abs_error() <= 0.02);

    let grid: String = (0..=400).map(|i| format!("{},1\n", -1.0 + i as f64 / 200.0)).collect();
    std::fs::write(dir.path().join("uniform.csv"), format!("t,w\n{grid}")).unwrap();
    std::fs::write(dir.path().join("uniform.spec"), "family=table\nfile=uniform.csv\n").unwrap();
    let table = sweep("uniform.spec", "16,32,64,128", "t.csv");
    for (a, b) in catalog.iter().zip(&table) {
        assert!((a.value - b.value).norm() < 1e-9, "n = {}: {} vs {}", a.n, a.value, b.value);
    }
}

#[test]
fn report_error_column_is_self_consistent() {
    let dir = workspace();
    let o = opke(
        &[
            "cauchy-converge", "--spec", "cheb.spec", "--x", "0", "--alphas", "0,0.3", "--betas", "1j,-0.5-2j",
            "--n-list", "16,64", "--out", "c.csv",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(dir.path().join("c.csv")).unwrap();
    for line in text.lines().filter(|l| !l.starts_with('#')).skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let p = |i: usize| f[i].parse::<f64>().unwrap();
        let err = ((p(2) - p(4)).powi(2) + (p(3) - p(5)).powi(2)).sqrt();
        assert_eq!(sci(err), f[6]);
    }
    let r = read_report(dir.path().join("c.csv"));
    assert_eq!(r.rows.len(), 4);
    let last = &r.rows[2];
    assert_eq!(last.n, 64);
    assert!(last.abs_error() < 0.05);
}

#[test]
fn kernel_converge_cases() {
    let dir = workspace();
    let o = opke(
        &[
            "kernel-converge", "--spec", "cheb.spec", "--x", "0", "--pairs", "0:1,0:0,0.25:-0.25", "--n-list",
            "16,32,64,128", "--out", "k.csv",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let r = read_report(dir.path().join("k.csv"));
    for row in &r.rows {
        match row.case.as_str() {
            "0:1" if row.n == 128 => assert!(row.abs_error() <= 0.02),
            "0:0" => {
                assert_eq!(sci(row.value.re), sci(1.0));
                assert_eq!(sci(row.limit.re), sci(1.0));
            }
            "0.25:-0.25" => assert_eq!(sci(row.limit.re), "6.36619772368e-1"),
            _ => {}
        }
    }
}

#[test]
fn failed_sweep_leaves_incomplete_report() {
    let dir = workspace();
    let o = opke(
        &["converge", "--spec", "cheb.spec", "--x", "1.5", "--alphas", "0", "--betas", "1j", "--n-list", "4,8", "--out", "bad.csv"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("partial report"));
    let r = read_report(dir.path().join("bad.csv"));
    assert_eq!(r.meta("status"), Some("incomplete"));
    assert!(r.rows.is_empty());
}

#[test]
fn thread_count_does_not_change_results() {
    let dir = workspace();
    let run = |threads: &str, out: &str| {
        let o = Command::new(env!("CARGO_BIN_EXE_opke"))
            .args([
                "kernel-converge", "--spec", "leg.spec", "--x", "0.2", "--pairs", "0:1,0.3:0.1", "--n-list", "8,16,32,64",
                "--out", out,
            ])
            .env("OPKE_THREADS", threads)
            .current_dir(dir.path())
            .output()
            .unwrap();
        (o.status.code(), read_report(dir.path().join(out)).rows)
    };
    let (c1, one) = run("1", "a.csv");
    let (c4, four) = run("4", "b.csv");
    assert_eq!((c1, c4), (Some(0), Some(0)));
    assert_eq!(one, four);

    let o = Command::new(env!("CARGO_BIN_EXE_opke"))
        .args(["kernel-converge", "--spec", "leg.spec", "--x", "0", "--pairs", "0:1", "--n-list", "8", "--out", "c.csv"])
        .env("OPKE_THREADS", "zero")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn help_and_unknown_commands() {
    let dir = workspace();
    let o = opke(&["--help"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    for sub in ["recurrence", "ratio", "converge", "kernel-converge", "oracle", "cauchy-converge"] {
        assert!(stdout(&o).contains(sub), "{sub}");
    }
    assert_eq!(opke(&["frobnicate"], dir.path()).status.code(), Some(2));
}
