use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn fstcascade(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fstcascade"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// t1: a -> p, b -> q; t2: p and q both -> x.
fn mergeable(dir: &Path) -> String {
    write(dir, "t1.fst", "0 1 a p\n0 1 b q\n1\n");
    write(dir, "t2.fst", "0 1 p x\n0 1 q x\n1\n");
    write(dir, "cascade.lst", "t1.fst\nt2.fst\n")
}

fn read_dir(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

#[test]
fn reduce_shrinks_pair_and_writes_report() {
    let d = TempDir::new().unwrap();
    let m = mergeable(d.path());
    let out = d.path().join("out");
    let report = d.path().join("r.tsv");
    let o = fstcascade(&[
        "reduce",
        "--cascade",
        &m,
        "--out-dir",
        p(&out),
        "--report",
        p(&report),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(
        fs::read_to_string(out.join("t2.fst")).unwrap(),
        "0 1 p x\n1\n"
    );
    assert_eq!(
        fs::read_to_string(out.join("t1.fst")).unwrap(),
        "0 1 a p\n0 1 b p\n1\n"
    );
    assert_eq!(
        fs::read_to_string(out.join("cascade.lst")).unwrap(),
        "t1.fst\nt2.fst\n"
    );
    let tsv = fs::read_to_string(&report).unwrap();
    let rows: Vec<&str> = tsv.lines().collect();
    assert!(rows[0].starts_with("fst\t"));
    assert_eq!(rows[2], "2\t2\t2\t2\t1\t2\t1\t1\t1");
    assert_eq!(rows[3], "total\t4\t4\t-\t-\t4\t3\t-\t-");
    let text = stdout(&o);
    assert!(text.contains("arcs 2 -> 1 (50.0% reduction)"), "{text}");
    assert!(
        text.contains("total: arcs 4 -> 3 (25.0% reduction)"),
        "{text}"
    );

    let v = fstcascade(&[
        "verify",
        "--before",
        &m,
        "--after",
        p(&out.join("cascade.lst")),
        "--max-len",
        "4",
        "--probe",
    ]);
    assert_eq!(code(&v), 0, "{}", stdout(&v));
}

#[test]
fn reduce_pair_writes_manifest() {
    let d = TempDir::new().unwrap();
    mergeable(d.path());
    let out = d.path().join("out");
    let o = fstcascade(&[
        "reduce",
        "--pair",
        p(&d.path().join("t1.fst")),
        p(&d.path().join("t2.fst")),
        "--out-dir",
        p(&out),
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(
        fs::read_to_string(out.join("cascade.lst")).unwrap(),
        "t1.fst\nt2.fst\n"
    );
    assert_eq!(
        fs::read_to_string(out.join("t2.fst")).unwrap(),
        "0 1 p x\n1\n"
    );
}

#[test]
fn reduce_without_merges_copies_bytes() {
    let d = TempDir::new().unwrap();
    write(d.path(), "t1.fst", "0 1 a p\n0 1 b q\n1\n");
    write(d.path(), "t2.fst", "0 1 p x\n0 1 q y\n1\n");
    let m = write(d.path(), "c.lst", "t1.fst\nt2.fst\n");
    let out = d.path().join("out");
    assert_eq!(
        code(&fstcascade(&[
            "reduce",
            "--cascade",
            &m,
            "--out-dir",
            p(&out)
        ])),
        0
    );
    for f in ["t1.fst", "t2.fst", "c.lst"] {
        assert_eq!(
            fs::read(d.path().join(f)).unwrap(),
            fs::read(out.join(f)).unwrap()
        );
    }
}

#[test]
fn missing_or_malformed_inputs_exit_2() {
    let d = TempDir::new().unwrap();
    let out = d.path().join("out");
    let missing = d.path().join("nope.lst");
    assert_eq!(
        code(&fstcascade(&[
            "reduce",
            "--cascade",
            p(&missing),
            "--out-dir",
            p(&out)
        ])),
        2
    );
    write(d.path(), "bad.fst", "0 1 a\n");
    let m = write(d.path(), "bad.lst", "bad.fst\n");
    let o = fstcascade(&["reduce", "--cascade", &m, "--out-dir", p(&out)]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 1"));
    assert_eq!(code(&fstcascade(&["reduce", "--out-dir", p(&out)])), 2);
    assert_eq!(code(&fstcascade(&["bogus"])), 2);
    assert_eq!(code(&fstcascade(&["--help"])), 0);
}

#[test]
fn apply_prints_sorted_lines() {
    let d = TempDir::new().unwrap();
    write(d.path(), "id.fst", "0 0 <unk> <unk>\n0\n");
    let id = write(d.path(), "id.lst", "id.fst\n");
    let o = fstcascade(&["apply", "--cascade", &id, "--input", "a b"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "a b\n");

    write(d.path(), "amb.fst", "0 1 a y\n0 1 a x\n1\n");
    let amb = write(d.path(), "amb.lst", "amb.fst\n");
    let o = fstcascade(&["apply", "--cascade", &amb, "--input", "a"]);
    assert_eq!(stdout(&o), "x\ny\n");

    let o = fstcascade(&["apply", "--cascade", &amb, "--input", "b"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "");

    assert_eq!(
        code(&fstcascade(&[
            "apply",
            "--cascade",
            &amb,
            "--input",
            "<eps>"
        ])),
        2
    );
}

#[test]
fn apply_warns_on_truncation() {
    let d = TempDir::new().unwrap();
    write(d.path(), "loop.fst", "0 0 <eps> y\n0\n");
    let m = write(d.path(), "c.lst", "loop.fst\n");
    let o = fstcascade(&[
        "apply",
        "--cascade",
        &m,
        "--input",
        "",
        "--epsilon-bound",
        "3",
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "\ny\ny y\ny y y\n");
    assert!(String::from_utf8_lossy(&o.stderr).contains("truncated"));
}

#[test]
fn verify_detects_corruption() {
    let d = TempDir::new().unwrap();
    let m = mergeable(d.path());
    let o = fstcascade(&["verify", "--before", &m, "--after", &m, "--max-len", "3"]);
    assert_eq!(code(&o), 0);

    // wrong representative on the upstream side only
    write(d.path(), "t2r.fst", "0 1 p x\n1\n");
    write(d.path(), "t1r.fst", "0 1 a p\n0 1 b r\n1\n");
    let bad = write(d.path(), "bad.lst", "t1r.fst\nt2r.fst\n");
    let o = fstcascade(&["verify", "--before", &m, "--after", &bad, "--max-len", "2"]);
    assert_eq!(code(&o), 1);
    assert_eq!(
        stdout(&o),
        "mismatch: input \"b\" output \"x\" only in before\n"
    );

    let o = fstcascade(&[
        "verify",
        "--before",
        &m,
        "--after",
        &bad,
        "--max-len",
        "1",
        "--vocab",
        "a",
    ]);
    assert_eq!(code(&o), 0);
}

#[test]
fn verify_reports_truncation_as_3() {
    let d = TempDir::new().unwrap();
    write(d.path(), "t1.fst", "0 1 a a\n1 1 <eps> a\n1\n");
    write(d.path(), "t2.fst", "0 0 a a\n0\n");
    let m = write(d.path(), "c.lst", "t1.fst\nt2.fst\n");
    let o = fstcascade(&["verify", "--before", &m, "--after", &m, "--max-len", "1"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn stats_rows() {
    let d = TempDir::new().unwrap();
    let f = write(d.path(), "id.fst", "0 1 a a\n1\n");
    let o = fstcascade(&["stats", "--fst", &f]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert_eq!(text.lines().nth(1).unwrap(), "1\t2\t1\t1\t1\t2\t1\t1\t1");
    let m = mergeable(d.path());
    let o = fstcascade(&["stats", "--cascade", &m]);
    assert_eq!(stdout(&o).lines().count(), 4);
}

#[test]
fn gen_is_deterministic() {
    let d = TempDir::new().unwrap();
    let (a, b) = (d.path().join("a"), d.path().join("b"));
    for dir in [&a, &b] {
        let o = fstcascade(&[
            "gen",
            "--seed",
            "11",
            "--stages",
            "3",
            "--states",
            "2-8",
            "--out-dir",
            p(dir),
        ]);
        assert_eq!(code(&o), 0);
    }
    let files = read_dir(&a);
    assert_eq!(files, read_dir(&b));
    let names: Vec<&str> = files.iter().map(|(n, _)| n.as_str()).collect();
    assert_eq!(names, ["cascade.lst", "t1.fst", "t2.fst", "t3.fst"]);

    assert_eq!(
        code(&fstcascade(&[
            "gen",
            "--seed",
            "1",
            "--stages",
            "1",
            "--out-dir",
            p(&a)
        ])),
        2
    );
    assert_eq!(
        code(&fstcascade(&[
            "gen",
            "--seed",
            "1",
            "--stages",
            "2",
            "--states",
            "x",
            "--out-dir",
            p(&a)
        ])),
        2
    );
}
