use std::path::Path;
use std::process::Command;

fn read(rel: &str) -> String {
    std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join(rel)).unwrap()
}

#[test]
fn header_declares_every_export() {
    let src = read("src/lib.rs");
    let header = read("include/skforms.h");
    let names: Vec<&str> = src
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(names.len() >= 10);
    for name in names {
        assert!(header.contains(&format!(" {name}(")) || header.contains(&format!("*{name}(")), "{name} missing from header");
    }
    for ty in ["typedef struct SkExpansion SkExpansion;", "SK_STATUS_PRECISION = 3", "SK_STATUS_INVALID_ARGUMENT = 4"] {
        assert!(header.contains(ty), "{ty}");
    }
}

#[test]
fn header_compiles_as_c() {
    let Ok(cc) = which_cc() else { return };
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/skforms.h");
    let out = Command::new(cc).args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c"]).arg(&header).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

fn which_cc() -> Result<&'static str, ()> {
    ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| Command::new(c).arg("--version").output().is_ok_and(|o| o.status.success()))
        .ok_or(())
}
