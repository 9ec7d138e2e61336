use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_meshlite"))
}

fn example(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples").join(name)
}

fn status(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn fixture_dir() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    std::fs::copy(example("fixtures/image.dat"), dir.path().join("image.dat")).unwrap();
    dir
}

#[test]
fn typecheck_statuses() {
    let ok = bin().args(["typecheck"]).arg(example("fft2d.mesh")).output().unwrap();
    assert_eq!(status(&ok), 0, "{}", stderr(&ok));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.mesh");
    std::fs::write(&bad, "var x : Int::Char;\n").unwrap();
    let o = bin().arg("typecheck").arg(&bad).output().unwrap();
    assert_eq!(status(&o), 1);
    assert!(stderr(&o).contains("bad.mesh:1:9: InvalidCombination"), "{}", stderr(&o));

    let o = bin().arg("typecheck").arg(dir.path().join("missing.mesh")).output().unwrap();
    assert_eq!(status(&o), 2);
}

#[test]
fn run_reports_rank_and_location() {
    let o = bin().args(["run", "--procs", "2"]).arg(example("listing1.mesh")).output().unwrap();
    assert_eq!(status(&o), 1);
    assert!(stderr(&o).contains("rank 0 at 2:"), "{}", stderr(&o));
}

#[test]
fn trace_file_for_listing_one() {
    let dir = tempfile::tempdir().unwrap();
    let t = dir.path().join("t.log");
    let o = bin().args(["run", "--procs", "3"]).arg(example("listing1.mesh")).arg("--trace").arg(&t).output().unwrap();
    assert_eq!(status(&o), 0, "{}", stderr(&o));
    let text = std::fs::read_to_string(&t).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines, ["kind=onesided-get src=2 dst=0 bytes=8 seq=0 tag=b"]);
}

#[test]
fn fft_run_writes_output() {
    let dir = fixture_dir();
    let o = bin().args(["run", "--procs", "4"]).arg(example("fft2d.mesh")).arg("--workdir").arg(dir.path()).output().unwrap();
    assert_eq!(status(&o), 0, "{}", stderr(&o));
    assert!(dir.path().join("image.out.dat").is_file());

    let empty = tempfile::tempdir().unwrap();
    let o = bin().args(["run", "--procs", "2"]).arg(example("fft2d.mesh")).arg("--workdir").arg(empty.path()).output().unwrap();
    assert_eq!(status(&o), 2, "missing image.dat is an I/O failure: {}", stderr(&o));
}

#[test]
fn seed_does_not_change_blocking_outputs() {
    let mut outs = Vec::new();
    for seed in ["0", "3", "99"] {
        let dir = fixture_dir();
        let t = dir.path().join("t.log");
        let o = bin()
            .args(["run", "--procs", "3", "--scheduler-seed", seed])
            .arg(example("fft2d.mesh"))
            .arg("--workdir")
            .arg(dir.path())
            .arg("--trace")
            .arg(&t)
            .output()
            .unwrap();
        assert_eq!(status(&o), 0, "{}", stderr(&o));
        outs.push((std::fs::read(dir.path().join("image.out.dat")).unwrap(), std::fs::read(&t).unwrap()));
    }
    assert!(outs.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn dump_dist_layouts() {
    let o = bin().args(["dump-dist", "--procs", "2"]).arg(example("fft2d.mesh")).output().unwrap();
    assert_eq!(status(&o), 0, "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains(
        "A [16x16]\n  0 -> owner 0 low 0 high 3\n  1 -> owner 1 low 4 high 7\n  2 -> owner 0 low 8 high 11\n  3 -> owner 1 low 12 high 15\n"
    ));
    assert!(text.contains("S [16x16]\n  0 -> owner 0 low 0 high 15\n"));
    assert!(text.contains("C [16x16] shares B\n"));

    let o = bin().args(["dump-dist", "--procs", "4"]).arg(example("fft2d_arraydist.mesh")).output().unwrap();
    let text = String::from_utf8(o.stdout).unwrap();
    for k in 0..4 {
        assert!(text.contains(&format!("  {k} -> owner {k} low {} high {}\n", 4 * k, 4 * k + 3)), "{text}");
    }
}

#[test]
fn set_overrides_extent() {
    let o = bin().args(["dump-dist", "--procs", "1", "--set", "n=8"]).arg(example("fft2d.mesh")).output().unwrap();
    assert_eq!(status(&o), 0);
    assert!(String::from_utf8(o.stdout).unwrap().contains("S [8x8]"));
}

#[test]
fn usage_errors_are_status_two() {
    assert_eq!(status(&bin().args(["run", "--procs", "0", "x.mesh"]).output().unwrap()), 2);
    assert_eq!(status(&bin().args(["frobnicate"]).output().unwrap()), 2);
    assert_eq!(status(&bin().args(["run", "--procs", "1", "--set", "n", "x.mesh"]).output().unwrap()), 2);
}

#[test]
fn corpus_statuses() {
    for (file, procs, want) in [
        ("listing1.mesh", "3", 0),
        ("listing2.mesh", "3", 0),
        ("listing2_async.mesh", "3", 0),
        ("listing2.mesh", "1", 1),
        ("fft2d.mesh", "1", 0),
        ("fft2d_arraydist.mesh", "2", 0),
    ] {
        let dir = fixture_dir();
        let o = bin().args(["run", "--procs", procs]).arg(example(file)).arg("--workdir").arg(dir.path()).output().unwrap();
        assert_eq!(status(&o), want, "{file} P={procs}: {}", stderr(&o));
    }
}

#[test]
fn make_fixtures_writes_both_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fx");
    let o = bin().args(["make-fixtures", "--n", "8", "--seed", "2", "--out"]).arg(&out).output().unwrap();
    assert_eq!(status(&o), 0, "{}", stderr(&o));
    assert!(out.join("image.dat").is_file() && out.join("image.expected.dat").is_file());
    let o = bin().args(["make-fixtures", "--n", "6", "--out"]).arg(&out).output().unwrap();
    assert_eq!(status(&o), 1);
}
