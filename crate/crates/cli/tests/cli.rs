//! Command-level tests driving the compiled binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_occuforge")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).to_string()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).to_string()
}

fn write(path: &Path, content: &str) {
    std::fs::write(path, content).unwrap();
}

const SESSIONS_CSV: &str = "\
charger_id,plug_in,plug_out,energy_kwh,charger_class
CP002,2018-03-05T10:05,2018-03-05T10:33,11.2,rapid
CP001,2018-03-05T09:00,2018-03-05T09:20,7.0,rapid
CP001,2018-03-05T23:55,2018-03-06T00:15,6.0,rapid
CP001,2018-03-06T12:00,2018-03-06T12:30,9.0,rapid
CP002,2018-03-06T08:00,2018-03-06T08:40,13.0,rapid
SLOW1,2018-03-05T08:00,2018-03-05T20:00,20.0,slow
CP001,bad-timestamp,2018-03-05T10:00,1.0,rapid
CP002,2018-03-06T09:00,2018-03-06T08:00,1.0,rapid
";

fn synth_spec(dir: &Path, days: usize, out: &Path) -> PathBuf {
    let spec = dir.join("synth.spec");
    write(
        &spec,
        &format!(
            "charger_id = SYN1\nstart_date = 2018-03-05\ndays = {days}\nseed = 7\n\
             schedule_weekday = 48-96\nschedule_weekend = 24-60\nout = {}\n",
            out.display()
        ),
    );
    spec
}

fn small_config(dir: &Path, occupancy: &Path) -> PathBuf {
    let cfg = dir.join("run.cfg");
    write(
        &cfg,
        &format!(
            "output_dir = {}\noccupancy_csv = {}\nepochs = 2\nruns = 1\nk_list = 1,2\n\
             lstm_hidden = 6\nbranch = 12,6\npost_lstm = 6\nmerge = 8\nseed = 5\n",
            dir.join("out").display(),
            occupancy.display()
        ),
    );
    cfg
}

#[test]
fn ingest_writes_occupancy_rejects_and_reports_outliers() {
    let dir = tempfile::tempdir().unwrap();
    let sessions = dir.path().join("sessions.csv");
    write(&sessions, SESSIONS_CSV);
    let cfg = dir.path().join("run.cfg");
    write(
        &cfg,
        &format!(
            "sessions_csv = {}\noutput_dir = {}\n",
            sessions.display(),
            dir.path().join("out").display()
        ),
    );

    let out = run(&["ingest", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("rejected 2 rows"), "{text}");
    assert!(text.contains("outliers removed"), "{text}");
    assert!(text.contains("5 rapid sessions retained"), "{text}");

    let rejects = std::fs::read_to_string(dir.path().join("out/rejects.txt")).unwrap();
    assert!(rejects.contains("row 8:"), "{rejects}");
    assert!(rejects.contains("row 9:"), "{rejects}");

    let occupancy = std::fs::read_to_string(dir.path().join("out/occupancy.csv")).unwrap();
    let lines: Vec<&str> = occupancy.lines().collect();
    // Two rapid chargers over two days.
    assert_eq!(lines[0], "charger_id,timestamp_slot_start,state");
    assert_eq!(lines.len(), 1 + 2 * 2 * 144);
    assert!(lines[1].starts_with("CP001,2018-03-05T00:00,"));
    // The 09:00-09:20 session occupies slots 55 and 56 (1-based).
    assert_eq!(lines[1 + 54], "CP001,2018-03-05T09:00,1");
    assert_eq!(lines[1 + 55], "CP001,2018-03-05T09:10,1");
    assert_eq!(lines[1 + 56], "CP001,2018-03-05T09:20,0");
    // Midnight-crossing session marks the last slot of day 1 and first two of day 2.
    assert_eq!(lines[1 + 143], "CP001,2018-03-05T23:50,1");
    assert_eq!(lines[1 + 144], "CP001,2018-03-06T00:00,1");
    assert_eq!(lines[1 + 145], "CP001,2018-03-06T00:10,1");
}

#[test]
fn synth_then_train_then_predict_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let occupancy = dir.path().join("occupancy.csv");
    let spec = synth_spec(dir.path(), 10, &occupancy);
    let out = run(&["synth", "--spec", spec.to_str().unwrap()]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));

    let cfg = small_config(dir.path(), &occupancy);
    let out = run(&["train", "--config", cfg.to_str().unwrap(), "--charger", "SYN1", "--k", "2"]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let model = dir.path().join("out/hybrid_SYN1_k2.ofm");
    assert!(model.exists());
    let profiles = std::fs::read_to_string(dir.path().join("out/profiles_SYN1.csv")).unwrap();
    assert_eq!(profiles.lines().count(), 145);

    let out = run(&[
        "predict",
        "--config",
        cfg.to_str().unwrap(),
        "--model",
        model.to_str().unwrap(),
        "--at",
        "2018-03-12T08:00",
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("timestamp_slot_start,probability,prediction"));
    assert!(text.contains("2018-03-12T08:10,"), "{text}");

    // Off-boundary timestamp is a clean error.
    let out = run(&[
        "predict",
        "--config",
        cfg.to_str().unwrap(),
        "--model",
        model.to_str().unwrap(),
        "--at",
        "2018-03-12T08:05",
    ]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("slot boundary"));
}

#[test]
fn evaluate_and_sweep_write_tables() {
    let dir = tempfile::tempdir().unwrap();
    let occupancy = dir.path().join("occupancy.csv");
    let spec = synth_spec(dir.path(), 10, &occupancy);
    assert!(run(&["synth", "--spec", spec.to_str().unwrap()]).status.success());
    let cfg = small_config(dir.path(), &occupancy);

    let out = run(&[
        "evaluate",
        "--config",
        cfg.to_str().unwrap(),
        "--k-list",
        "1",
        "--methods",
        "hybrid,logistic",
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let report = std::fs::read_to_string(dir.path().join("out/report.csv")).unwrap();
    assert!(report.starts_with("method,charger_id,k,run,accuracy,f1"));
    assert!(report.contains("hybrid,SYN1,1,1,"));
    assert!(report.contains("logistic,SYN1,1,1,"));
    let summary = std::fs::read_to_string(dir.path().join("out/summary.txt")).unwrap();
    assert!(summary.contains("Mean window accuracy"));

    let out = run(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--param",
        "epochs",
        "--grid",
        "1,2",
        "--k",
        "1",
        "--runs",
        "1",
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let table = std::fs::read_to_string(dir.path().join("out/sweep_epochs.csv")).unwrap();
    assert_eq!(table.lines().count(), 3);
    assert!(table.starts_with("epochs,mean_accuracy"));
}

#[test]
fn errors_exit_nonzero_with_one_line_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    write(&cfg, "definitely_not_a_key = 1\n");
    let out = run(&["ingest", "--config", cfg.to_str().unwrap()]);
    assert!(!out.status.success());
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("unknown config key"));

    // Config without sessions_csv cannot ingest.
    let cfg2 = dir.path().join("empty.cfg");
    write(&cfg2, "output_dir = out\n");
    let out = run(&["ingest", "--config", cfg2.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("sessions_csv"));

    // Unknown sweep parameter.
    let out = run(&[
        "sweep",
        "--config",
        cfg2.to_str().unwrap(),
        "--param",
        "bogus",
        "--grid",
        "1",
    ]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("unknown sweep parameter"));
}
