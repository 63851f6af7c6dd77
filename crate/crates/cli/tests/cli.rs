//! End-to-end tests of the `zzvine` binary: spawn the real executable on
//! real files and check bytes and exit codes.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const FIX_A: &str = "zzf 1\na 0\nd 0\n";
const FIX_B: &str = "zzf 1\na 0\na 1\na 0 1\nd 0 1\nd 1\nd 0\n";
const FIX_C: &str = "zzf 1\na 0\na 1\na 0 1\nd 0 1\na 0 1\nd 0 1\nd 1\nd 0\n";
const FIX_D: &str = "zzf 1\na 0\na 1\na 0 1\nd 0 1\na 2\nd 2\nd 1\nd 0\n";
const FIX_E: &str = "zzf 1\na 0\na 1\nd 1\na 1\nd 1\nd 0\n";

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_zzvine"))
}

fn write(dir: &TempDir, name: &str, content: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, content).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn path_arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn barcode_reproduces_fixture_bars() {
    let dir = TempDir::new().unwrap();
    let cases = [
        (FIX_A, "0 1 1\n"),
        (FIX_B, "0 1 5\n0 2 2\n0 4 4\n"),
        (FIX_C, "0 1 7\n0 2 2\n0 4 4\n0 6 6\n"),
        (FIX_D, "0 1 7\n0 2 2\n0 4 6\n0 5 5\n"),
        (FIX_E, "0 1 5\n0 2 2\n0 4 4\n"),
    ];
    for (i, (fixture, want)) in cases.iter().enumerate() {
        let input = write(&dir, &format!("f{i}.zzf"), fixture);
        let out = run(&["barcode", "--in", path_arg(&input)]);
        assert!(out.status.success(), "case {i}: {}", stderr(&out));
        assert_eq!(stdout(&out), *want, "case {i}");
    }
}

#[test]
fn barcode_writes_pairs_and_files() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "b.zzf", FIX_B);
    let out_path = dir.path().join("b.zzb");
    let out = run(&["barcode", "--in", path_arg(&input), "--pairs", "--out", path_arg(&out_path)]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(stdout(&out), "", "silent when writing to a file");
    assert_eq!(
        std::fs::read_to_string(&out_path).unwrap(),
        "0 1 5 | +0 -0 cc\n0 2 2 | +1 +2 co\n0 4 4 | -2 -1 oc\n"
    );
}

#[test]
fn convert_lists_up_down_arrows() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "b.zzf", FIX_B);
    let out = run(&["convert", "--in", path_arg(&input)]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(
        stdout(&out),
        "asc 0 dim 0 bnd from 0\n\
         asc 1 dim 0 bnd from 1\n\
         asc 2 dim 1 bnd 0 1 from 2\n\
         desc 2 from 3\n\
         desc 1 from 4\n\
         desc 0 from 5\n"
    );

    let empty = write(&dir, "empty.zzf", "zzf 1\n");
    let out = run(&["convert", "--in", path_arg(&empty)]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "");
}

#[test]
fn malformed_input_exits_2_with_line() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "bad.zzf", "unrelated\n");
    let out = run(&["convert", "--in", path_arg(&input)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 1"), "{}", stderr(&out));

    let input = write(&dir, "bad2.zzf", "zzf 1\na 0\na 1 1\n");
    let out = run(&["barcode", "--in", path_arg(&input)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 3"), "{}", stderr(&out));

    let out = run(&["barcode", "--in", path_arg(&dir.path().join("absent.zzf"))]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn apply_merges_the_split_vertex() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "e.zzf", FIX_E);
    let ops = write(&dir, "merge.zzops", "contract-out 2\n");
    let vine = dir.path().join("merge.zzvine");
    let out = run(&[
        "apply",
        "--in",
        path_arg(&input),
        "--ops",
        path_arg(&ops),
        "--vine",
        path_arg(&vine),
        "--validate-each",
        "--oracle",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(stdout(&out), "0 1 3\n0 2 2\n");
    assert_eq!(
        std::fs::read_to_string(&vine).unwrap(),
        "step 0 pair +0,-0->id\n\
         step 0 pair +1,-1->id\n\
         step 0 pair +2,-2->destroyed\n"
    );
}

#[test]
fn apply_rejects_illegal_op_with_exit_3() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "b.zzf", FIX_B);
    // Arrows 2 and 3 delete and re-add the same simplex: not a switch.
    let ops = write(&dir, "bad.zzops", "switch 2\n");
    let out = run(&["apply", "--in", path_arg(&input), "--ops", path_arg(&ops)]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("operation 0"), "{}", stderr(&out));
}

#[test]
fn apply_round_trip_reproduces_the_barcode() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "b.zzf", FIX_B);
    let plain = run(&["barcode", "--in", path_arg(&input)]);
    let ops = write(&dir, "trip.zzops", "expand-in 2 2\ncontract-in 2\n");
    let out = run(&[
        "apply",
        "--in",
        path_arg(&input),
        "--ops",
        path_arg(&ops),
        "--validate-each",
        "--oracle",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(stdout(&out), stdout(&plain));
}

#[test]
fn validate_reports_counts() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "b.zzf", FIX_B);
    let ops = write(&dir, "s.zzops", "switch 0\nswitch 4\n");
    let out = run(&["validate", "--in", path_arg(&input), "--ops", path_arg(&ops)]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(stdout(&out), "ok: m=6 pairs=3 steps=2\n");
}

#[test]
fn compare_oracle_matches_and_respects_the_cap() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "c.zzf", FIX_C);
    let out = run(&["compare-oracle", "--in", path_arg(&input)]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(stdout(&out), "match: 4 bars\n");

    let out = run(&["compare-oracle", "--in", path_arg(&input), "--max-m", "4"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bench_emits_csv_rows_per_size_and_kind() {
    let out = run(&["bench", "--sizes", "16", "--reps", "2", "--seed", "7"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("m,op-kind,time-ns,chain-adds"));
    let mut saw_mixed = false;
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols.len(), 4, "row {line}");
        assert_eq!(cols[0], "16");
        cols[2].parse::<u64>().unwrap();
        let adds: u64 = cols[3].parse().unwrap();
        if cols[1] == "switch-mixed" {
            saw_mixed = true;
            assert_eq!(adds, 0, "mixed switches never add chains");
        }
    }
    assert!(saw_mixed);
    assert!(stderr(&out).contains("seed 7"), "seed is printed for replay");

    let empty = run(&["bench", "--sizes", ""]);
    assert!(empty.status.success());
    assert_eq!(stdout(&empty), "m,op-kind,time-ns,chain-adds\n");
}
