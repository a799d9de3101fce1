use bosegas::minimize::{beta_star, HylSolverConfig, HylSystem};
use bosegas::ModelParams;
use std::process::{Command, Output};

fn bosegas(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bosegas")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn table(s: &str) -> Vec<Vec<String>> {
    s.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn comments(s: &str) -> Vec<&str> {
    s.lines().filter(|l| l.starts_with('#')).collect()
}

const SWEEP: [&str; 10] = ["mu_eff", "pressure", "dp_dmu", "condensate", "regime", "model", "d", "beta", "a", "b"];

#[test]
fn golden_sweep_csv() {
    let golden = include_str!("golden/ideal_sweep.csv");
    let o = bosegas(&["--beta-norm", "sweep", "--start", "-1", "--stop", "0", "--count", "5"]);
    assert!(o.status.success());
    let got = stdout(&o);
    assert_eq!(comments(&got), comments(golden));
    let (g, e) = (table(&got), table(golden));
    assert_eq!(g[0], SWEEP);
    assert_eq!(g.len(), e.len());
    for (gr, er) in g.iter().zip(&e).skip(1) {
        assert_eq!(gr.len(), SWEEP.len());
        for (x, y) in gr.iter().zip(er) {
            match (x.parse::<f64>(), y.parse::<f64>()) {
                (Ok(x), Ok(y)) if x.is_finite() => assert!((x - y).abs() <= 1e-12 * y.abs().max(1.0), "{x} vs {y}"),
                _ => assert_eq!(x, y),
            }
        }
    }
    // grid order and number format
    let mus: Vec<f64> = g[1..].iter().map(|r| r[0].parse().unwrap()).collect();
    assert!(mus.windows(2).all(|w| w[0] < w[1]));
    assert!(g[1][1].contains('e') && g[1][1].split('e').next().unwrap().len() == 18);
    assert_eq!(g[5][4], "critical");
}

#[test]
fn echo_shows_defaults_and_reduction() {
    let o = bosegas(&["--beta", "1", "--mu", "0.25", "--alpha", "-0.75", "pressure"]);
    let s = stdout(&o);
    assert!(s.contains("# mu_eff: -5.0000000000000000e-1"));
    assert!(s.contains("# reduction: mu <- mu + alpha"));
    assert!(s.contains("# tol: 1.0000000000000000e-10"));
    assert!(s.contains("# k_max: ") || s.contains("mu_eff,pressure,dp_dmu"));
    let j = bosegas(&["--beta", "1", "--mu", "0.25", "--alpha", "-0.75", "--format", "json", "pressure"]);
    let v: serde_json::Value = serde_json::from_slice(&j.stdout).unwrap();
    assert_eq!(v["config"]["mu_eff"], -0.5);
    assert_eq!(v["config"]["alpha"], -0.75);
    assert_eq!(v["dp_dmu"]["kind"], "finite");
}

#[test]
fn exit_codes() {
    assert_eq!(bosegas(&["--beta", "1", "--mu", "1", "pressure"]).status.code(), Some(2));
    assert_eq!(bosegas(&["--beta", "-1", "pressure"]).status.code(), Some(2));
    assert_eq!(bosegas(&["pressure"]).status.code(), Some(2));
    assert_eq!(bosegas(&["--beta", "1", "sweep", "--start", "0", "--stop", "1", "--count", "1"]).status.code(), Some(2));
    assert_eq!(bosegas(&["verify", "--only", "nonsense"]).status.code(), Some(2));
    assert_eq!(bosegas(&["--beta", "1", "--mu", "-1", "pressure"]).status.code(), Some(0));
}

#[test]
fn sweep_keeps_failed_rows() {
    let o = bosegas(&["--beta", "1", "sweep", "--start", "-0.5", "--stop", "0.5", "--count", "3"]);
    assert!(o.status.success());
    let t = table(&stdout(&o));
    assert_eq!(t.len(), 4);
    assert_eq!(t[3][4], "error");
    assert_eq!(t[3][1], "undefined");
    assert!(!o.stderr.is_empty());
    let all_bad = bosegas(&["--beta", "1", "sweep", "--start", "0.5", "--stop", "1", "--count", "3"]);
    assert_eq!(all_bad.status.code(), Some(2));
    assert_eq!(table(&stdout(&all_bad)).len(), 4);
}

#[test]
fn cmf_zero_reports_k_and_factor() {
    let o = bosegas(&["--model", "cmf", "--beta-norm", "--mu", "-0.1", "--a", "1", "zero", "--kmax", "5"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("# K: ") && s.contains("# factor: ") && s.contains("# unique: true"));
    assert_eq!(table(&s).len(), 6);
}

#[test]
fn hyl_zero_in_the_fold_is_not_unique() {
    let bs = beta_star(3, 1.0).unwrap();
    let p = ModelParams::hyl(3, bs, 0.0, 2.0, 1.0);
    let mu_bar = HylSystem::new(&p).unwrap().mu_bar().unwrap();
    let grid: Vec<f64> = (0..=40).map(|i| 0.3 * mu_bar + 0.8 * mu_bar * i as f64 / 40.0).collect();
    let scan = bosegas::minimize::hyl_family_scan(&p, &grid, &HylSolverConfig::default()).unwrap();
    let mu = (scan.mu_lower.unwrap() + scan.mu_upper.unwrap()) / 2.0;
    let (bs, mu) = (bs.to_string(), mu.to_string());
    let o = bosegas(&["--model", "hyl", "--beta", &bs, "--mu", &mu, "--a", "2", "--b", "1", "zero", "--kmax", "8"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let s = stdout(&o);
    assert!(s.contains("# unique: false"));
    assert!(s.lines().filter(|l| l.starts_with("# solution ")).count() >= 2);
}

#[test]
fn simulate_reruns_are_byte_identical() {
    let args = [
        "--model", "pmf", "--beta-norm", "--mu", "0.5", "--a", "1", "--seed", "9", "simulate", "--kmax", "6",
        "--samples", "500", "--burn-in", "200", "--verify-zero",
    ];
    let a = bosegas(&args);
    let b = bosegas(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let s = stdout(&a);
    assert!(s.contains("# seed: 9") && s.contains("# tail_density: "));
    assert_eq!(table(&s)[0], ["k", "mean", "stderr", "variance", "target", "z"]);
    let mut one = args.to_vec();
    one.extend(["--threads", "1"]);
    let c = bosegas(&one);
    let strip = |o: &Output| stdout(o).lines().filter(|l| !l.starts_with("# threads")).collect::<Vec<_>>().join("\n");
    assert_eq!(strip(&a), strip(&c));
}

#[test]
fn verify_only_specfun() {
    let o = bosegas(&["verify", "--only", "specfun"]);
    assert_eq!(o.status.code(), Some(0));
    let t = table(&stdout(&o));
    assert_eq!(t.len(), 2);
    assert!(stdout(&o).contains(",PASS,"));
    let j = bosegas(&["verify", "--only", "1", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&j.stdout).unwrap();
    assert_eq!(v["criteria"].as_array().unwrap().len(), 1);
}

#[test]
fn specfun_values() {
    let o = bosegas(&["specfun", "--func", "zeta", "--x", "1.5"]);
    let v: f64 = table(&stdout(&o))[1][2].parse().unwrap();
    assert!((v - 2.612_375_348_685_488).abs() < 1e-14);
    let o = bosegas(&["specfun", "--func", "wm1", "--x", "-0.2"]);
    let w: f64 = table(&stdout(&o))[1][2].parse().unwrap();
    assert!((w * w.exp() + 0.2).abs() < 1e-15 && w < -1.0);
    assert_eq!(bosegas(&["specfun", "--func", "bose", "--x", "-0.5"]).status.code(), Some(2));
}

#[test]
fn out_flag_writes_a_file() {
    let path = std::env::temp_dir().join(format!("bosegas-cli-{}.json", std::process::id()));
    let o = bosegas(&["--beta", "1", "--mu", "-1", "--format", "json", "--out", path.to_str().unwrap(), "condensate"]);
    assert!(o.status.success() && o.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["condensate"]["kind"], "finite");
    std::fs::remove_file(path).unwrap();
}
