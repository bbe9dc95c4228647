use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use knapmatch_ffi::*;

const TWO_ITEMS: &str = r#"{"kind": "knapsack", "capacity": 10.0, "items": [
    {"id": 0, "value": 1.0, "weight": 1.0},
    {"id": 1, "value": 9.0, "weight": 10.0}]}"#;

const GRAPH: &str = r#"{"kind": "bipartite", "budget": 6.0, "right_count": 2,
    "lefts": [{"id": 0, "bid": 1.0}, {"id": 1, "bid": 2.0}, {"id": 2, "bid": 0.5}],
    "edges": [{"left": 0, "right": 0, "value": 4.0}, {"left": 1, "right": 0, "value": 5.0},
              {"left": 1, "right": 1, "value": 3.0}, {"left": 2, "right": 1, "value": 2.0}]}"#;

fn load(json: &str) -> *mut KmInstance {
    let c = CString::new(json).unwrap();
    let mut inst = ptr::null_mut();
    assert_eq!(unsafe { km_instance_from_json(c.as_ptr(), &mut inst) }, KmStatus::Ok);
    inst
}

fn last_error() -> String {
    let p = km_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn threshold_and_exact_on_two_items() {
    let inst = load(TWO_ITEMS);
    unsafe {
        assert_eq!(km_instance_left_count(inst), 2);
        assert_eq!(km_instance_right_count(inst), 2);
        assert_eq!(km_instance_edge_count(inst), 4);
        assert_eq!(km_instance_budget(inst), 10.0);

        let mut th = ptr::null_mut();
        assert_eq!(km_run(inst, KM_ALGO_THRESHOLD, ptr::null(), 0, 0, 0.5, true, &mut th), KmStatus::Ok);
        assert_eq!(km_outcome_value(th), 1.0);
        assert_eq!(km_outcome_selected_count(th), 1);
        assert_eq!(*km_outcome_selected(th), 0);
        let mut gamma = 0.0;
        assert_eq!(km_outcome_gamma(th, &mut gamma), KmStatus::Ok);
        assert!((gamma - 10.0 / 9.0).abs() < 1e-12);

        let mut ex = ptr::null_mut();
        assert_eq!(km_run(inst, KM_ALGO_EXACT, ptr::null(), 0, 0, 0.5, true, &mut ex), KmStatus::Ok);
        assert_eq!(km_outcome_value(ex), 9.0);
        assert_eq!(km_outcome_gamma(ex, &mut gamma), KmStatus::NoValue);

        km_outcome_free(th);
        km_outcome_free(ex);
        km_instance_free(inst);
    }
}

#[test]
fn truthful_run_with_explicit_order() {
    let inst = load(GRAPH);
    let order = [2usize, 0, 1];
    unsafe {
        let mut out = ptr::null_mut();
        let status = km_run(inst, KM_ALGO_ON_TRUTH, order.as_ptr(), order.len(), 3, 0.5, true, &mut out);
        assert_eq!(status, KmStatus::Ok);
        assert!(km_outcome_feasible(out));
        let n = km_outcome_selected_count(out);
        let sel = std::slice::from_raw_parts(km_outcome_selected(out), n);
        for &l in sel {
            let mut p = 0.0;
            assert_eq!(km_outcome_payment(out, l, &mut p), KmStatus::Ok);
            assert!(p >= [1.0, 2.0, 0.5][l]);
        }
        let mut p = 0.0;
        assert_eq!(km_outcome_payment(out, 3, &mut p), KmStatus::Domain);

        let mut json = ptr::null_mut();
        assert_eq!(km_outcome_to_json(out, &mut json), KmStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(CStr::from_ptr(json).to_str().unwrap()).unwrap();
        assert_eq!(v["algo"], "on-truth");
        assert_eq!(v["selected_lefts"].as_array().unwrap().len(), n);
        km_string_free(json);
        km_outcome_free(out);
        km_instance_free(inst);
    }
}

#[test]
fn seeded_runs_repeat() {
    let inst = load(GRAPH);
    let run = || unsafe {
        let mut out = ptr::null_mut();
        assert_eq!(km_run(inst, KM_ALGO_ON_TRUTH, ptr::null(), 0, 17, 0.5, true, &mut out), KmStatus::Ok);
        let mut json = ptr::null_mut();
        km_outcome_to_json(out, &mut json);
        let s = CStr::from_ptr(json).to_owned();
        km_string_free(json);
        km_outcome_free(out);
        s
    };
    assert_eq!(run(), run());
    unsafe { km_instance_free(inst) };
}

#[test]
fn errors_carry_status_and_message() {
    unsafe {
        let mut inst = ptr::null_mut();
        assert_eq!(km_instance_from_json(ptr::null(), &mut inst), KmStatus::NullPointer);
        assert!(inst.is_null());

        let bad = CString::new(r#"{"kind": "knapsack", "capacity": 1.0"#).unwrap();
        assert_eq!(km_instance_from_json(bad.as_ptr(), &mut inst), KmStatus::Json);
        assert!(last_error().contains("json"));

        let dangling = CString::new(
            r#"{"kind": "bipartite", "budget": 1.0, "right_count": 1,
               "lefts": [{"id": 0, "bid": 1.0}], "edges": [{"left": 0, "right": 4, "value": 1.0}]}"#,
        )
        .unwrap();
        assert_eq!(km_instance_from_json(dangling.as_ptr(), &mut inst), KmStatus::Json);

        let g = load(GRAPH);
        let mut out = ptr::null_mut();
        assert_eq!(km_run(g, 99, ptr::null(), 0, 0, 0.5, true, &mut out), KmStatus::Domain);
        assert!(last_error().contains("99"));
        let dup = [0usize, 0, 1];
        assert_eq!(km_run(g, KM_ALGO_ON_TRUTH, dup.as_ptr(), 3, 0, 0.5, true, &mut out), KmStatus::Structural);
        // ON needs a knapsack-class graph.
        assert_eq!(km_run(g, KM_ALGO_ON, ptr::null(), 0, 0, 0.5, true, &mut out), KmStatus::Domain);
        assert!(out.is_null());
        assert_eq!(km_run(g, KM_ALGO_GREEDY, ptr::null(), 0, 0, 0.5, true, &mut out), KmStatus::Ok);
        assert!(km_last_error_message().is_null());
        km_outcome_free(out);
        km_instance_free(g);

        assert!(km_outcome_value(ptr::null()).is_nan());
        assert_eq!(km_instance_left_count(ptr::null()), 0);
        km_instance_free(ptr::null_mut());
        km_string_free(ptr::null_mut());
    }
}

#[test]
fn version_is_the_crate_version() {
    let v = unsafe { CStr::from_ptr(km_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

/// Compile a C program against the generated header and the static library.
/// Skipped when no C compiler is on PATH.
#[test]
fn c_program_links_against_the_header() {
    let Ok(cc) = which("cc") else {
        eprintln!("no cc; skipping");
        return;
    };
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().unwrap().parent().unwrap();
    let lib = profile_dir.join("libknapmatch_ffi.a");
    if !lib.exists() {
        eprintln!("{} not built; skipping", lib.display());
        return;
    }
    let dir = tempfile_dir();
    let src = dir.join("smoke.c");
    let bin = dir.join("smoke");
    std::fs::write(
        &src,
        format!(
            r#"#include <stdio.h>
#include "knapmatch.h"
int main(void) {{
    KmInstance *inst = NULL;
    if (km_instance_from_json({json:?}, &inst) != KM_STATUS_OK) return 10;
    KmOutcome *out = NULL;
    if (km_run(inst, KM_ALGO_THRESHOLD, NULL, 0, 0, 0.5, true, &out) != KM_STATUS_OK) return 11;
    double gamma = 0.0;
    if (km_outcome_gamma(out, &gamma) != KM_STATUS_OK) return 12;
    if (km_run(inst, 42, NULL, 0, 0, 0.5, true, &out) != KM_STATUS_DOMAIN) return 13;
    printf("%g %zu %.6f\n", km_outcome_value(out), km_outcome_selected_count(out), gamma);
    km_outcome_free(out);
    km_instance_free(inst);
    return 0;
}}
"#,
            json = TWO_ITEMS.replace('\n', " ")
        ),
    )
    .unwrap();
    let status = Command::new(cc)
        .arg(&src)
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let run = Command::new(&bin).output().unwrap();
    assert_eq!(run.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "1 1 1.111111");
    let _ = std::fs::remove_dir_all(dir);
}

fn which(name: &str) -> Result<PathBuf, ()> {
    let path = std::env::var_os("PATH").ok_or(())?;
    std::env::split_paths(&path)
        .map(|d| d.join(name))
        .find(|p| p.is_file())
        .ok_or(())
}

fn tempfile_dir() -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(format!("ffi-smoke-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
