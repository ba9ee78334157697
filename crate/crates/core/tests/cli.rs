use std::fs;
use std::process::Command;

use kinkstat::campaign::Report;

fn kinkstat(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_kinkstat")).args(args).output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn help_documents_every_subcommand() {
    let (code, out, _) = kinkstat(&["--help"]);
    assert_eq!(code, 0);
    for sub in ["embed", "svmc", "theory", "analyze", "boltzmann-fit", "report", "campaign"] {
        assert!(out.contains(sub), "missing {sub}");
        let (code, help, _) = kinkstat(&[sub, "--help"]);
        assert_eq!(code, 0, "{sub}");
        // Every flag line is followed by a description.
        let lines: Vec<&str> = help.lines().collect();
        for (i, l) in lines.iter().enumerate() {
            if l.trim_start().starts_with("--") && !l.contains("--help") {
                let described = l.trim_start().split("  ").filter(|s| !s.is_empty()).count() > 1
                    || lines.get(i + 1).is_some_and(|n| !n.trim_start().starts_with('-') && !n.trim().is_empty());
                assert!(described, "{sub}: undocumented flag line '{l}'");
            }
        }
    }
}

#[test]
fn generate_then_analyze_then_report() {
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
    let (code, _, err) = kinkstat(&[
        "embed", "--cells", "3", "--length", "16", "--instances", "2", "--coupling", "gauge", "--seed", "4", "--out",
        &p("inst.json"),
    ]);
    assert_eq!(code, 0, "{err}");
    let (code, _, err) = kinkstat(&[
        "svmc", "--schedule", "linear", "--temp-reduced", "0.1", "--n0", "20", "--ta-prime", "1,2,4", "--samples",
        "30", "--instances", &p("inst.json"), "--seed", "3", "--out", &p("s.csv"),
    ]);
    assert_eq!(code, 0, "{err}");
    let csv = fs::read_to_string(p("s.csv")).unwrap();
    assert_eq!(csv.lines().count(), 91);
    let (code, _, err) = kinkstat(&[
        "analyze", "--in", &p("s.csv"), "--instances", &p("inst.json"), "--group-by", "anneal_time", "--bootstrap",
        "200", "--fit-range", "1:4", "--out", &p("r.json"),
    ]);
    assert_eq!(code, 0, "{err}");
    let report = Report::load(p("r.json")).unwrap();
    assert_eq!(report.points.len(), 3);
    assert!(report.provenance.generated_at.is_some());
    let (code, _, err) = kinkstat(&["report", "--in", &p("r.json"), "--format", "csv-bundle", "--out", &p("bundle")]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(fs::read_dir(p("bundle/histograms")).unwrap().count(), 3);
    let (code, out, err) = kinkstat(&["boltzmann-fit", "--in", &p("s.csv"), "--instances", &p("inst.json")]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(out.lines().count(), 4);
}

#[test]
fn theory_writes_cumulants_and_pmfs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.csv");
    let pmf = dir.path().join("pmf.csv");
    let (code, _, err) = kinkstat(&[
        "theory", "--L", "2000", "--tau-list", "100", "--out", out.to_str().unwrap(), "--pmf-out",
        pmf.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    let text = fs::read_to_string(out).unwrap();
    let row: Vec<f64> = text.lines().nth(1).unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert!((row[5] / 0.586 - 1.0).abs() < 0.01);
    assert!(fs::read_to_string(pmf).unwrap().lines().count() > 10);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.csv");
    let (code, _, _) = kinkstat(&["analyze", "--in", missing.to_str().unwrap(), "--out", "x.json"]);
    assert_eq!(code, 1);
    let (code, _, _) = kinkstat(&["no-such-command"]);
    assert_eq!(code, 1);
    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "instance_id,anneal_time,spins\na,1,+q+\n").unwrap();
    let (code, _, err) = kinkstat(&["analyze", "--in", bad.to_str().unwrap(), "--out", "x.json"]);
    assert_eq!(code, 1);
    assert!(err.contains("line 2"), "{err}");
    // Output under a regular file: runtime I/O error.
    let blocker = dir.path().join("blocker");
    fs::write(&blocker, "").unwrap();
    let report = dir.path().join("r.json");
    let mut theory = kinkstat::campaign::CampaignConfig::preset("desk-theory").unwrap();
    theory.instance.length = 40;
    theory.time_grid = vec![1.0, 2.0, 3.0];
    theory.analysis.fit_range = None;
    fs::write(&report, kinkstat::campaign::run_campaign(&theory).unwrap().to_json()).unwrap();
    let (code, _, _) = kinkstat(&[
        "report", "--in", report.to_str().unwrap(), "--out", blocker.join("sub").to_str().unwrap(),
    ]);
    assert_eq!(code, 2);
}

#[test]
fn partial_campaign_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let samples = dir.path().join("s.csv");
    let mut text = String::from("instance_id,anneal_time,spins\n");
    for i in 0..12 {
        text.push_str(&format!("a,1,{}\n", if i % 2 == 0 { "+-+-+-" } else { "+--+-+" }));
    }
    // Too few samples at t = 2 for cumulant estimates.
    text.push_str("a,2,+-+-+-\n");
    fs::write(&samples, text).unwrap();
    let config = dir.path().join("c.toml");
    fs::write(
        &config,
        format!(
            "name = \"partial\"\nmode = \"ingest\"\nseed = 1\n[ingest]\npath = {:?}\n[analysis]\nbootstrap = 100\n",
            samples
        ),
    )
    .unwrap();
    let out = dir.path().join("out");
    let (code, _, err) =
        kinkstat(&["campaign", "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code, 3, "{err}");
    let report = Report::load(out.join("report.json")).unwrap();
    assert_eq!(report.failures.len(), 1);
    assert!(out.join("report.md").exists());
    assert!(out.join("points.csv").exists());
}

#[test]
fn campaign_preset_runs_and_timestamps_only_in_provenance() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let (code, _, err) = kinkstat(&[
            "campaign", "--preset", "desk-theory", "--format", "json", "--out", out.to_str().unwrap(),
        ]);
        assert_eq!(code, 0, "{err}");
        Report::load(out.join("report.json")).unwrap()
    };
    let (a, b) = (run("a"), run("b"));
    assert!(a.provenance.generated_at.is_some());
    assert_eq!(a.without_timestamp(), b.without_timestamp());
    assert!((a.density_fit.unwrap().value("alpha") - 0.5).abs() < 0.005);
}
