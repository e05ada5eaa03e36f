//! The committed header must stay a valid translation unit in both
//! languages; cbindgen regenerates it on build, so drift shows up here.

fn syntax_check(lang: &str) {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/fou.h");
    let out = match std::process::Command::new("cc")
        .args(["-fsyntax-only", "-Wall", "-Wno-pragma-once-outside-header", "-x", lang, header])
        .output()
    {
        Ok(out) => out,
        Err(_) => {
            eprintln!("no C compiler on PATH; skipping header syntax check");
            return;
        }
    };
    assert!(
        out.status.success(),
        "header fails -x {lang}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn header_parses_as_c() {
    syntax_check("c");
}

#[test]
fn header_parses_as_cpp() {
    syntax_check("c++");
}
