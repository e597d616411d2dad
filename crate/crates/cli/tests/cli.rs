use std::fs;
use std::process::{Command, Output};

fn aoc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aoc"))
        .args(args)
        .output()
        .expect("run aoc")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn theory_from_inline_per() {
    let out = aoc(&["theory", "--n", "6", "--p", "0"]);
    assert!(out.status.success());
    assert_eq!(
        stdout(&out),
        "snr_db,scheme,mode,avg_aoc_ms,ci_halfwidth_ms,seed\n\
         0.00000,tdma-nr,theory,0.936000,0.00000,0\n\
         0.00000,tdma-r,theory,0.936000,0.00000,0\n\
         0.00000,fdma,theory,0.336000,0.00000,0\n"
    );
}

#[test]
fn idealized_timing_uses_device_count() {
    let out = aoc(&["theory", "--p", "0.5,0.5", "--t-td", "1", "--idealized"]);
    assert!(out.status.success());
    // FDMA: 4.5 rounds of 2 slots each
    assert!(stdout(&out).contains("fdma,theory,9.00000"));
    assert!(stdout(&out).contains("tdma-r,theory,5.50000"));
}

#[test]
fn sweep_over_table_file() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("per.csv");
    fs::write(
        &table,
        "snr_db,scheme,device_id,per\n10,tdma,1,0\n10,tdma,2,0\n10,fdma,1,0\n10,fdma,2,0\n",
    )
    .unwrap();
    let out_path = dir.path().join("rows.csv");
    let out = aoc(&[
        "sweep",
        "--per-table",
        table.to_str().unwrap(),
        "--t-td",
        "1",
        "--t-fd",
        "2",
        "--horizon",
        "1000",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(out_path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 7);
    assert!(lines[1].starts_with("10.0000,tdma-nr,theory,3.00000,"));
    assert!(lines[2].starts_with("10.0000,tdma-nr,simulation,3.00000,0.00000,"));
    assert!(lines[5].starts_with("10.0000,fdma,theory,3.00000,"));
}

#[test]
fn bad_inputs_exit_nonzero_with_one_line() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("bad.csv");
    fs::write(&table, "snr_db,scheme,device_id,per\n10,fdma,1,0.2\n10,fdma,2,1.0\n").unwrap();
    for args in [
        vec!["theory", "--per-table", table.to_str().unwrap()],
        vec!["theory", "--p", "0.3,1.0"],
        vec!["theory", "--n", "3", "--p", "0.1,0.2"],
        vec!["orders", "--p", "0.1,0.2,0.3", "--orders", "1,1,2"],
        vec!["simulate", "--p", "0.1", "--horizon", "1"],
    ] {
        let out = aoc(&args);
        assert!(!out.status.success(), "{args:?}");
        let err = String::from_utf8(out.stderr).unwrap();
        assert_eq!(err.lines().count(), 1, "{args:?}: {err}");
        assert!(err.starts_with("error: "));
    }
    let err = String::from_utf8(aoc(&["theory", "--per-table", table.to_str().unwrap()]).stderr).unwrap();
    assert!(err.contains("per out of range [0,1) at line 3"), "{err}");
}

#[test]
fn order_study_output() {
    let out = aoc(&["orders", "--p", "0.05,0.1,0.1,0.1,0.1,0.2", "--theory-only"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("snr_db,scheme,mode,avg_aoc_ms,ci_halfwidth_ms,seed,order\n"));
    assert_eq!(text.lines().count(), 7);
}

#[test]
fn timing_defaults() {
    let out = aoc(&["timing"]);
    assert!(out.status.success());
    let text = stdout(&out);
    for line in ["tdma_status,0.0480000", "tdma_ack,0.0240000", "tdma_slot,0.104000", "fdma_round,0.224000"] {
        assert!(text.contains(line), "{text}");
    }
    let out = aoc(&["timing", "--gi-ms", "0"]);
    assert!(stdout(&out).contains("tdma_slot,0.0720000"));
}
