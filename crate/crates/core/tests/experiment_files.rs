use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use approx::assert_abs_diff_eq;
use siga::agents::AgentKind;
use siga::experiment::{
    read_summary, run_experiment, run_stats, ExperimentError, ExperimentSpec, METRICS_HEADER, NORMS_HEADER,
    STATS_HEADER,
};
use siga::scenario::Society;

fn spec(society: Society, kind: AgentKind, runs: usize, steps: u64) -> ExperimentSpec {
    ExperimentSpec { runs, steps, ..ExperimentSpec::new(society, kind) }
}

fn read(path: &Path) -> String {
    fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn write_summary(dir: &Path, kind: &str, values: &[f64]) {
    fs::create_dir_all(dir).unwrap();
    let mut body = String::from("run,seed,society,agent_kind,social_experience,cohesion,adoption\n");
    for (i, v) in values.iter().enumerate() {
        body += &format!("{i},{},pragmatic,{kind},{v},{v},\n", 100 + i);
    }
    fs::write(dir.join("summary.csv"), body).unwrap();
}

#[test]
fn identical_specs_give_identical_files() {
    let tmp = tempfile::tempdir().unwrap();
    let mut s = spec(Society::Mixed, AgentKind::Xsiga, 3, 600);
    s.log_interactions = true;
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    run_experiment(&s, &a).unwrap();
    s.jobs = 1;
    run_experiment(&s, &b).unwrap();
    for f in ["metrics.csv", "norms.csv", "summary.csv", "interactions_run0.jsonl", "populations_run2.txt"] {
        assert_eq!(read(&a.join(f)), read(&b.join(f)), "{f}");
    }
}

#[test]
fn smoke_run_writes_headers_and_one_row_per_hundred_steps() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("smoke");
    run_experiment(&spec(Society::Pragmatic, AgentKind::Nsiga, 1, 100), &out).unwrap();
    let metrics = read(&out.join("metrics.csv"));
    let lines: Vec<&str> = metrics.lines().collect();
    assert_eq!(lines[0], METRICS_HEADER.join(","));
    assert_eq!(lines.len(), 2);
    assert!(lines[1].starts_with("0,100,pragmatic,nsiga,"));

    let norms = read(&out.join("norms.csv"));
    assert_eq!(norms.lines().next().unwrap(), NORMS_HEADER.join(","));
    assert_eq!(norms.lines().count(), 1 + 180);
    assert_eq!(read_summary(&out).unwrap().len(), 1);
    assert!(!out.join("interactions_run0.jsonl").exists());
}

#[test]
fn interaction_log_lines_are_json() {
    let tmp = tempfile::tempdir().unwrap();
    let mut s = spec(Society::Pragmatic, AgentKind::Xsiga, 1, 200);
    s.log_interactions = true;
    run_experiment(&s, tmp.path()).unwrap();
    let log = read(&tmp.path().join("interactions_run0.jsonl"));
    assert!(log.lines().count() > 0);
    for line in log.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["verdicts"].as_array().unwrap().len(), v["neighbors"].as_array().unwrap().len());
        assert!(!v["explanation"].as_array().unwrap().is_empty());
    }
    let dump = read(&tmp.path().join("populations_run0.txt"));
    assert_eq!(dump.lines().filter(|l| l.starts_with("# agent ")).count(), 40);
    assert!(dump.lines().filter(|l| !l.starts_with('#')).all(|l| l.contains(" | p=") && l.contains(" exp=")));
}

#[test]
fn grid_of_kinds_gives_two_baselines_per_metric() {
    let tmp = tempfile::tempdir().unwrap();
    let mut dirs = Vec::new();
    for kind in AgentKind::ALL {
        let d = tmp.path().join(kind.name());
        run_experiment(&spec(Society::Pragmatic, kind, 3, 300), &d).unwrap();
        dirs.push(d);
    }
    let out = tmp.path().join("stats.csv");
    let rows = run_stats(&dirs, &out).unwrap();
    for metric in ["social_experience", "cohesion"] {
        let mut baselines: Vec<AgentKind> = rows.iter().filter(|r| r.metric == metric).map(|r| r.baseline).collect();
        baselines.sort_by_key(|k| k.name());
        assert_eq!(baselines, [AgentKind::Fixed, AgentKind::Nsiga]);
    }
    let text = read(&out);
    assert_eq!(text.lines().next().unwrap(), STATS_HEADER.join(","));
    assert_eq!(text.lines().count(), 1 + rows.len());
}

#[test]
fn xsiga_against_itself_is_null() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path().join("x");
    run_experiment(&spec(Society::Pragmatic, AgentKind::Xsiga, 3, 300), &d).unwrap();
    let rows = run_stats(&[d.clone(), d], &tmp.path().join("s.csv")).unwrap();
    assert!(!rows.is_empty());
    for r in rows {
        assert_eq!(r.p, 1.0);
        assert_eq!(r.cohens_d, Some(0.0));
    }
}

#[test]
fn fixture_statistics_match_hand_values() {
    let tmp = tempfile::tempdir().unwrap();
    let (x, f) = (tmp.path().join("x"), tmp.path().join("f"));
    write_summary(&x, "xsiga", &[1.0, 2.0, 3.0, 4.0]);
    write_summary(&f, "fixed", &[0.0, 0.0, 1.0, 1.0]);
    let rows = run_stats(&[f, x], &tmp.path().join("s.csv")).unwrap();
    // adoption is blank in the fixtures and is skipped
    assert_eq!(rows.len(), 2);
    for r in rows {
        assert_eq!(r.baseline, AgentKind::Fixed);
        assert_abs_diff_eq!(r.mean_a, 2.5);
        assert_abs_diff_eq!(r.mean_b, 0.5);
        assert_abs_diff_eq!(r.t, 24f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(r.p, 0.016_276_603_459_428_56, epsilon = 1e-9);
        assert_abs_diff_eq!(r.cohens_d.unwrap(), 2.0, epsilon = 1e-12);
    }
}

#[test]
fn mismatched_seeds_refuse_to_pair() {
    let tmp = tempfile::tempdir().unwrap();
    let x = tmp.path().join("x");
    run_experiment(&spec(Society::Pragmatic, AgentKind::Xsiga, 2, 100), &x).unwrap();
    let f = tmp.path().join("f");
    let mut s = spec(Society::Pragmatic, AgentKind::Fixed, 2, 100);
    s.base_seed = 50;
    run_experiment(&s, &f).unwrap();
    let err = run_stats(&[x, f], &tmp.path().join("s.csv")).unwrap_err();
    assert!(matches!(err, ExperimentError::Unpaired { .. }), "{err}");
}

#[test]
fn missing_summary_names_the_file() {
    let tmp = tempfile::tempdir().unwrap();
    let x = tmp.path().join("x");
    write_summary(&x, "xsiga", &[1.0, 2.0]);
    let ghost = tmp.path().join("nowhere");
    let err = run_stats(&[x, ghost.clone()], &tmp.path().join("s.csv")).unwrap_err();
    assert!(matches!(&err, ExperimentError::MissingFile(p) if *p == ghost.join("summary.csv")));
    assert!(err.to_string().contains("summary.csv"));
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_siga"))
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

#[test]
fn cli_run_then_stats() {
    let tmp = tempfile::tempdir().unwrap();
    let mut dirs = Vec::new();
    for kind in ["xsiga", "nsiga"] {
        let d = tmp.path().join(kind);
        let o = bin()
            .args(["run", "--society", "selfish", "--agents", kind, "--steps", "200", "--runs", "2", "--seed", "7"])
            .arg("--world")
            .arg(configs().join("world_default.toml"))
            .arg("--payoffs")
            .arg(configs().join("payoffs_appendix.toml"))
            .arg("--out")
            .arg(&d)
            .args(["--jobs", "2"])
            .output()
            .unwrap();
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        assert_eq!(String::from_utf8_lossy(&o.stdout).lines().count(), 2);
        let rows = read_summary(&d).unwrap();
        assert_eq!(rows.iter().map(|r| r.seed).collect::<Vec<_>>(), [7, 8]);
        dirs.push(d);
    }
    let out = tmp.path().join("stats").join("stats.csv");
    let o = bin().arg("stats").arg("--in").args(&dirs).arg("--out").arg(&out).output().unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).contains("xsiga vs nsiga"));
    assert!(out.is_file());
}

#[test]
fn cli_reports_bad_input() {
    let tmp = tempfile::tempdir().unwrap();
    let o = bin()
        .args(["run", "--society", "pragmatic", "--agents", "xsiga", "--steps", "10", "--runs", "1"])
        .arg("--payoffs")
        .arg(tmp.path().join("absent.toml"))
        .arg("--out")
        .arg(tmp.path().join("o"))
        .output()
        .unwrap();
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("absent.toml"));

    let o = bin().args(["run", "--society", "stoic", "--agents", "xsiga", "--out", "x"]).output().unwrap();
    assert!(!o.status.success());

    let o = bin().arg("stats").arg("--in").arg(tmp.path()).arg("--out").arg(tmp.path().join("s.csv")).output().unwrap();
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("summary.csv"));
}
