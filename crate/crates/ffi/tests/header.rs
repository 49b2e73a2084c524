use std::path::Path;
use std::process::Command;

const HEADER: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/include/qsig.h");

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(HEADER).unwrap();
    let source =
        std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/src/lib.rs")).unwrap();
    let exports: Vec<&str> = source
        .split("pub unsafe extern \"C\" fn ")
        .skip(1)
        .map(|s| s.split('(').next().unwrap())
        .collect();
    assert!(exports.len() > 20);
    for name in exports {
        assert!(
            header.contains(&format!("{name}(")),
            "{name} missing from header"
        );
    }
    for ty in [
        "QsigParams",
        "QsigTrialReport",
        "QSIG_STATUS_NULL_POINTER",
        "QSIG_H",
    ] {
        assert!(header.contains(ty), "{ty}");
    }
}

#[test]
fn header_compiles_as_c() {
    let Ok(status) = Command::new("cc")
        .args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c"])
        .arg(Path::new(HEADER))
        .status()
    else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    assert!(status.success());
}
