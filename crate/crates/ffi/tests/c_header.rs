//! Compiles a C program against the generated header and links it to the
//! static library built for this test run.

use std::path::{Path, PathBuf};
use std::process::Command;

fn static_lib() -> PathBuf {
    // Test binaries live in target/<profile>/deps next to the library.
    let deps = std::env::current_exe().unwrap().parent().unwrap().to_path_buf();
    let lib = deps.join("libltp_ffi.a");
    assert!(lib.exists(), "{} not built", lib.display());
    lib
}

#[test]
fn header_declares_api() {
    let header = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/ltp.h")).unwrap();
    for symbol in [
        "LtpStatus ltp_ols(",
        "typedef struct LtpEmbedder LtpEmbedder;",
        "typedef struct LtpFusionParams LtpFusionParams;",
        "LtpStatus ltp_evaluate_json(",
        "void ltp_string_free(char *s);",
        "LTP_STATUS_DIMENSION_MISMATCH = 4",
    ] {
        assert!(header.contains(symbol), "missing {symbol}");
    }
}

#[cfg(unix)]
#[test]
fn c_program_links_and_runs() {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let status = Command::new(std::env::var("CC").unwrap_or_else(|_| "cc".into()))
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(manifest.join("tests/c/smoke.c"))
        .arg(static_lib())
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("run C compiler");
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(
        String::from_utf8_lossy(&out.stdout),
        format!("ok {}\n", env!("CARGO_PKG_VERSION"))
    );
}
