//! Compiles a small C program against the generated header and static library.

use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <math.h>
#include <stdio.h>
#include "gptlab.h"

int main(void) {
    GptTheory *t = NULL;
    GptMeasurement *a = NULL, *b = NULL;
    double g = 0.0, p = 0.0;
    if (gpt_theory_new(12, 0.0, &t) != GPT_STATUS_OK) return 1;
    if (gpt_measurement_vertex(t, 0, &a) != GPT_STATUS_OK) return 2;
    if (gpt_measurement_vertex(t, 3, &b) != GPT_STATUS_OK) return 3;
    if (gpt_gamma(a, b, &g) != GPT_STATUS_OK) return 4;
    if (gpt_pur_bound(g, GPT_LOG_BASE_BITS, &p) != GPT_STATUS_OK) return 5;
    if (gpt_measurement_vertex(t, 12, &a) != GPT_STATUS_INDEX_OUT_OF_RANGE) return 6;
    if (gpt_last_error_message() == NULL) return 7;
    printf("%.12g %.12g\n", g, p);
    gpt_measurement_free(a);
    gpt_measurement_free(b);
    gpt_theory_free(t);
    return 0;
}
"#;

fn target_dir() -> PathBuf {
    // tests run from <target>/<profile>/deps
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_and_runs() {
    let lib = target_dir().join("libgptlab_ffi.a");
    if !lib.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler or static library at {}", lib.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    let exe = dir.path().join("smoke");
    std::fs::write(&src, PROGRAM).unwrap();
    let include = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    let status = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-o"])
        .arg(&exe)
        .arg(&src)
        .arg("-I")
        .arg(&include)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "1.73205080757 0.415037499279\n");
}
