use std::path::Path;
use std::process::Command;

// The generated header must compile as C on its own.
#[test]
fn header_compiles_as_c() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let src = std::env::temp_dir().join(format!("mps-header-{}.c", std::process::id()));
    std::fs::write(&src, "#include \"mps.h\"\nint main(void) { return mps_last_error_message() != 0; }\n").unwrap();
    let status = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(dir.join("include"))
        .arg(&src)
        .status();
    let _ = std::fs::remove_file(&src);
    match status {
        Ok(s) => assert!(s.success(), "cc rejected include/mps.h"),
        Err(e) => eprintln!("skipping: no C compiler ({e})"),
    }
}
