use std::collections::HashMap;
use std::path::Path;
use std::process::{Command, Output};

fn mbf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mbf"))
        .args(args)
        .env_remove("MBF_THREADS")
        .output()
        .expect("failed to launch mbf")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).trim().to_string()
}

fn ok(args: &[&str]) -> String {
    let out = mbf(args);
    assert!(
        out.status.success(),
        "mbf {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    stdout(&out)
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn gen_and_classes_report_counts() {
    let dir = tempfile::tempdir().unwrap();
    let d5 = dir.path().join("d5.dn");
    assert_eq!(ok(&["gen", "-n", "5", "-o", p(&d5)]), "7581");
    assert_eq!(
        std::fs::metadata(&d5).unwrap().len(),
        16 + 7581 * 8 + 8
    );
    let r6 = dir.path().join("r6.rn");
    assert_eq!(ok(&["classes", "-n", "6", "-o", p(&r6)]), "16353");
}

#[test]
fn matrix_csv_matches_known_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m2.mxm");
    let csv = dir.path().join("m2.csv");
    assert_eq!(ok(&["matrix", "-n", "2", "-o", p(&out), "--csv", p(&csv)]), "6");

    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').skip(1).collect();
    let mut table = HashMap::new();
    for line in lines {
        let mut cells = line.split(',');
        let row = cells.next().unwrap();
        for (col, v) in header.iter().zip(cells) {
            table.insert((row.to_string(), col.to_string()), v.parse::<u32>().unwrap());
        }
    }
    let labels = ["0000", "0001", "0011", "0101", "0111", "1111"];
    let expected = [
        [1, 2, 3, 3, 5, 6],
        [0, 1, 2, 2, 4, 5],
        [0, 0, 1, 0, 2, 3],
        [0, 0, 0, 1, 2, 3],
        [0, 0, 0, 0, 1, 2],
        [0, 0, 0, 0, 0, 1],
    ];
    assert_eq!(table.len(), 36);
    for (r, row) in expected.iter().enumerate() {
        for (c, &want) in row.iter().enumerate() {
            let key = (labels[r].to_string(), labels[c].to_string());
            assert_eq!(table[&key], want, "entry {key:?}");
        }
    }
}

#[test]
fn interval_queries() {
    let bottom7 = "0".repeat(128);
    assert_eq!(ok(&["interval", "--base", "5", "--from", &bottom7]), "2414682040998");
    assert_eq!(ok(&["interval", "--base", "0", "--from", "0001", "--to", "0111"]), "4");
    let x = "0001000100010001";
    assert_eq!(ok(&["interval", "--base", "2", "--from", x, "--to", x]), "1");
    assert_eq!(
        ok(&["interval", "--base", "2", "--from", "0111011101110111", "--to", x]),
        "0"
    );

    let wrong_arity = mbf(&["interval", "--base", "2", "--from", "0001"]);
    assert_eq!(wrong_arity.status.code(), Some(2));
    let not_monotone = mbf(&["interval", "--base", "2", "--from", "1000000000000000"]);
    assert_eq!(not_monotone.status.code(), Some(2));
}

#[test]
fn interval_reads_saved_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let m3 = dir.path().join("m3.mxm");
    ok(&["matrix", "-n", "3", "-o", p(&m3), "--entry-width", "2"]);
    let bottom5 = "0".repeat(32);
    assert_eq!(
        ok(&["interval", "--base", "3", "--from", &bottom5, "--matrix", p(&m3)]),
        "7581"
    );
    // A D_3 table cannot serve base 2.
    let out = mbf(&["interval", "--base", "2", "--from", "0000000000000000", "--matrix", p(&m3)]);
    assert!(!out.status.success());
}

#[test]
fn dedekind_methods_agree() {
    for method in ["direct", "sumsq", "classes"] {
        assert_eq!(ok(&["dedekind", "--method", method, "-n", "6"]), "7828354", "{method}");
    }
    assert_eq!(ok(&["dedekind", "--method", "sumsq", "-n", "7"]), "2414682040998");
    assert_eq!(
        ok(&["dedekind", "--method", "classes", "-n", "7", "--threads", "2"]),
        "2414682040998"
    );
    assert_eq!(mbf(&["dedekind", "--method", "direct", "-n", "7"]).status.code(), Some(2));
    assert_eq!(mbf(&["dedekind", "--method", "guess", "-n", "3"]).status.code(), Some(2));
}

#[test]
fn sweep_resumes_after_stop() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("m4.mxm");
    let r = dir.path().join("r6.rn");
    let ckpt = dir.path().join("sweep.ckpt");
    let out = dir.path().join("sweep.out");
    ok(&["matrix", "-n", "4", "-o", p(&m)]);
    ok(&["classes", "-n", "6", "-o", p(&r)]);

    let base = [
        "sweep", "--base", "4", "--matrix", p(&m), "--classes", p(&r), "--chunk", "100",
        "--checkpoint", p(&ckpt), "--checkpoint-every", "7", "--out", p(&out),
    ];
    let mut first = base.to_vec();
    first.extend(["--stop-after", "30", "--threads", "3"]);
    let stopped = mbf(&first);
    assert!(stopped.status.success());
    assert_eq!(stdout(&stopped), "");
    assert!(ckpt.exists());

    let mut second = base.to_vec();
    second.extend(["--threads", "1"]);
    let resumed = mbf(&second);
    assert!(resumed.status.success());
    assert_eq!(stdout(&resumed), "2414682040998");
    assert!(String::from_utf8_lossy(&resumed.stderr).contains("resumed after 28"));

    let fresh = ok(&["sweep", "--base", "4", "--matrix", p(&m), "--classes", p(&r)]);
    assert_eq!(fresh, "2414682040998");
}

#[test]
fn sweep_rejects_mismatched_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("m3.mxm");
    let r = dir.path().join("r6.rn");
    ok(&["matrix", "-n", "3", "-o", p(&m)]);
    ok(&["classes", "-n", "6", "-o", p(&r)]);
    let out = mbf(&["sweep", "--base", "4", "--matrix", p(&m), "--classes", p(&r)]);
    assert!(!out.status.success());
}

#[test]
fn bad_files_exit_with_io_code() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.mxm");
    let out = mbf(&["dedekind", "--method", "sumsq", "-n", "5", "--matrix", p(&missing)]);
    assert_eq!(out.status.code(), Some(3));

    let m = dir.path().join("m3.mxm");
    ok(&["matrix", "-n", "3", "-o", p(&m)]);
    let mut bytes = std::fs::read(&m).unwrap();
    let mid = bytes.len() / 2;
    bytes[mid] ^= 0x40;
    std::fs::write(&m, &bytes).unwrap();
    let out = mbf(&["dedekind", "--method", "sumsq", "-n", "5", "--matrix", p(&m)]);
    assert_eq!(out.status.code(), Some(3));

    let junk = dir.path().join("junk.rn");
    std::fs::write(&junk, b"not a class file").unwrap();
    let out = mbf(&["dedekind", "--method", "classes", "-n", "7", "--classes", p(&junk)]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn verify_quick_passes() {
    let out = ok(&["verify", "--level", "quick"]);
    assert!(out.lines().all(|l| !l.starts_with("FAIL")));
    assert!(out.ends_with("0 failed"));
}

#[test]
fn usage_errors() {
    assert_eq!(mbf(&[]).status.code(), Some(2));
    assert_eq!(mbf(&["matrix", "-n", "6", "-o", "/dev/null"]).status.code(), Some(2));
    assert_eq!(mbf(&["gen", "-n", "7", "-o", "/dev/null"]).status.code(), Some(2));
}
