use std::path::Path;
use std::process::{Command, Output};

fn nvaw(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nvaw")).args(args).current_dir(dir).output().expect("spawn nvaw")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn registry_checks() {
    let d = tempfile::tempdir().unwrap();
    let o = nvaw(&["check", "E2", "--suite", "nva"], d.path());
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("max k = 0"));
    assert_eq!(code(&nvaw(&["check", "Z2", "--suite", "twist", "--twist", "R_sign"], d.path())), 0);
    let o = nvaw(&["check", "E1n", "--suite", "qva", "--smap", "identity"], d.path());
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("Fail [(a,n)"));
}

#[test]
fn product_check_extract() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(code(&nvaw(&["product", "Z2", "Z2", "--twist", "R_sign", "-o", "out.nva"], d.path())), 0);
    let o = nvaw(&["check", "out.nva", "--suite", "nva", "--window", "-4..4", "--kmax", "4", "--json", "r.json"], d.path());
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let rows: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d.path().join("r.json")).unwrap()).unwrap();
    let rows = rows.as_array().unwrap();
    assert!(!rows.is_empty());
    for r in rows {
        assert_eq!(r["verdict"]["kind"], "ExactPass");
        assert_eq!(r["window"], "-4..4");
        assert!(r["identity"].is_string() && r["suite"].is_string());
    }
    let o = nvaw(&["extract-twist", "out.nva", "--u", "iU", "--v", "iV", "-o", "r.nva"], d.path());
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("Z2 kernel rank 0"));
    let text = std::fs::read_to_string(d.path().join("r.nva")).unwrap();
    assert!(text.contains("r g g -> (g,g):-1"), "{text}");
    assert!(text.contains("r g one -> (one,g):1"), "{text}");
}

#[test]
fn failing_twist_writes_nothing() {
    let d = tempfile::tempdir().unwrap();
    let o = nvaw(&["product", "E1", "E1", "--twist", "R_sign", "-o", "bad.nva"], d.path());
    assert_eq!(code(&o), 1);
    assert!(!d.path().join("bad.nva").exists());
}

#[test]
fn smash_of_registry_data() {
    let d = tempfile::tempdir().unwrap();
    let o = nvaw(&["smash", "Z2-sign", "Z2-sign", "-o", "s.nva"], d.path());
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("U#V = U⊗_R V"));
    assert_eq!(code(&nvaw(&["check", "s.nva", "--suite", "smash"], d.path())), 0);
    assert_eq!(code(&nvaw(&["check", "s.nva", "--suite", "nva", "--window", "-4..4", "--kmax", "4"], d.path())), 0);
}

#[test]
fn misdeclared_embeddings_fail() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(code(&nvaw(&["extract-twist", "N4", "--u", "p", "--v", "q"], d.path())), 0);
    let o = nvaw(&["extract-twist", "N4", "--u", "q", "--v", "p"], d.path());
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("Inconsistent"));
}

#[test]
fn extract_smap_on_q() {
    let d = tempfile::tempdir().unwrap();
    let o = nvaw(&["extract-smap", "Q"], d.path());
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("smap"));
    assert_eq!(code(&nvaw(&["extract-smap", "E1"], d.path())), 1);
}

#[test]
fn usage_errors_exit_2() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(code(&nvaw(&["check", "E1", "--suite", "frob"], d.path())), 2);
    assert_eq!(code(&nvaw(&["check", "E1", "--suite", "twist"], d.path())), 2);
    assert_eq!(code(&nvaw(&["check", "nope.nva", "--suite", "nva"], d.path())), 2);
    assert_eq!(code(&nvaw(&["frobnicate"], d.path())), 2);
    std::fs::write(d.path().join("dup.nva"), "space V basis one v v\n").unwrap();
    let o = nvaw(&["check", "dup.nva", "--suite", "nva"], d.path());
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 1, column 21"));
}

#[test]
fn empty_y_block_fails_vacuum() {
    let d = tempfile::tempdir().unwrap();
    std::fs::write(d.path().join("z.nva"), "space V basis one v\nvacuum V one\n").unwrap();
    let o = nvaw(&["check", "z.nva", "--suite", "nva"], d.path());
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("Fail"));
}

#[test]
fn list_names_everything() {
    let o = nvaw(&["list"], Path::new("."));
    assert_eq!(code(&o), 0);
    for n in ["E1", "E1n", "E2", "Z2", "N4", "flip", "R_sign", "identity", "sign", "Z2-sign"] {
        assert!(stdout(&o).contains(n), "{n}");
    }
}
