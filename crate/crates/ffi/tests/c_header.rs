//! Compiles and runs a small C program against the generated header and
//! the static library. Skipped when no C compiler is on the path.

use std::path::{Path, PathBuf};
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "geolattice.h"

int main(void) {
    GlLattice *m3 = NULL;
    if (gl_lattice_uniform(2, 3, &m3) != GL_STATUS_OK) return 1;
    double beta[2];
    size_t len = 0;
    if (gl_jacobi_beta(m3, beta, 2, &len) != GL_STATUS_OK || len != 2) return 2;
    char *moments = NULL;
    if (gl_moments_json(m3, 2, &moments) != GL_STATUS_OK) return 3;
    int ok = strcmp(moments, "[\"1\",\"0\",\"3/4\"]") == 0;
    gl_string_free(moments);
    gl_lattice_free(m3);
    if (gl_lattice_boolean(1, NULL) != GL_STATUS_NULL_POINTER) return 4;
    printf("%.12f %.12f\n", beta[0], beta[1]);
    return ok ? 0 : 5;
}
"#;

fn static_lib() -> Option<PathBuf> {
    // tests run from target/<profile>/deps
    let exe = std::env::current_exe().ok()?;
    let lib = exe.parent()?.parent()?.join("libgeolattice_ffi.a");
    lib.exists().then_some(lib)
}

#[test]
fn c_program_links_and_runs() {
    if Command::new("cc").arg("--version").output().is_err() {
        eprintln!("no C compiler; skipping");
        return;
    }
    let Some(lib) = static_lib() else {
        eprintln!("static library not built; skipping");
        return;
    };
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    let exe = dir.path().join("main");
    std::fs::write(&src, PROGRAM).unwrap();
    let status = Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(&include)
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let out = Command::new(&exe).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "0.866025403784 1.732050807569");
}
