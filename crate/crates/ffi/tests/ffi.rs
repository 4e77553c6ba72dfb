use std::ffi::{CStr, CString};
use std::ptr;

use signclust_ffi::*;

fn last_error() -> String {
    let p = sc_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn build_count_free() {
    let src = [0usize, 1, 2, 0];
    let dst = [1usize, 2, 3, 3];
    let w = [1.0, -1.0, 2.0, -0.5];
    let mut g = ptr::null_mut();
    let st = unsafe { sc_graph_from_edges(4, src.as_ptr(), dst.as_ptr(), w.as_ptr(), 4, &mut g) };
    assert_eq!(st, ScStatus::Ok);
    assert!(!g.is_null());
    assert_eq!(unsafe { sc_graph_node_count(g) }, 4);
    assert_eq!(unsafe { sc_graph_edge_count(g) }, 4);
    unsafe { sc_graph_free(g) };
    unsafe { sc_graph_free(ptr::null_mut()) };
    assert_eq!(unsafe { sc_graph_node_count(ptr::null()) }, 0);
}

#[test]
fn errors_map_to_codes() {
    let mut g = ptr::null_mut();
    let (s, d, w) = ([0usize], [0usize], [1.0]);
    let st = unsafe { sc_graph_from_edges(2, s.as_ptr(), d.as_ptr(), w.as_ptr(), 1, &mut g) };
    assert_eq!(st, ScStatus::BadEdge);
    assert!(g.is_null());
    assert!(last_error().contains("self-loop"));

    let (s, d) = ([0usize], [5usize]);
    let st = unsafe { sc_graph_from_edges(2, s.as_ptr(), d.as_ptr(), w.as_ptr(), 1, &mut g) };
    assert_eq!(st, ScStatus::IndexOutOfRange);

    let st = unsafe { sc_graph_from_edges(2, ptr::null(), d.as_ptr(), w.as_ptr(), 1, &mut g) };
    assert_eq!(st, ScStatus::NullPointer);

    let st = unsafe { sc_ssbm_sample(10, 3, 2.0, 0.1, 0, &mut g, ptr::null_mut()) };
    assert_eq!(st, ScStatus::InvalidArgument);

    let name = unsafe { CStr::from_ptr(sc_status_string(ScStatus::BadEdge)) };
    assert_eq!(name.to_str().unwrap(), "bad edge");
}

#[test]
fn sample_cluster_score() {
    let n = 120;
    let mut g = ptr::null_mut();
    let mut truth = vec![0usize; n];
    assert_eq!(unsafe { sc_ssbm_sample(n, 3, 0.3, 0.0, 7, &mut g, truth.as_mut_ptr()) }, ScStatus::Ok);
    let method = CString::new("SPONGE_sym").unwrap();
    let mut labels = vec![0i64; n];
    let st = unsafe { sc_cluster(g, method.as_ptr(), 3, 1.0, 1.0, 1, labels.as_mut_ptr()) };
    assert_eq!(st, ScStatus::Ok);
    assert!(labels.iter().all(|&l| (0..3).contains(&l)));
    let pred: Vec<usize> = labels.iter().map(|&l| l as usize).collect();
    let mut score = 0.0;
    assert_eq!(unsafe { sc_ari(pred.as_ptr(), truth.as_ptr(), n, &mut score) }, ScStatus::Ok);
    assert!((score - 1.0).abs() < 1e-12);
    let mut rate = 1.0;
    assert_eq!(
        unsafe { sc_misclustering_rate(pred.as_ptr(), truth.as_ptr(), n, 3, &mut rate) },
        ScStatus::Ok
    );
    assert_eq!(rate, 0.0);

    let bad = CString::new("nope").unwrap();
    let st = unsafe { sc_cluster(g, bad.as_ptr(), 3, 1.0, 1.0, 1, labels.as_mut_ptr()) };
    assert_eq!(st, ScStatus::InvalidArgument);
    unsafe { sc_graph_free(g) };
}

#[test]
fn read_edge_list_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.txt");
    std::fs::write(&path, "# n 5\n0 1 1\n1 2 -1\n").unwrap();
    let c = CString::new(path.to_str().unwrap()).unwrap();
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { sc_graph_read_edge_list(c.as_ptr(), &mut g) }, ScStatus::Ok);
    assert_eq!(unsafe { sc_graph_node_count(g) }, 5);
    assert_eq!(unsafe { sc_graph_edge_count(g) }, 2);
    unsafe { sc_graph_free(g) };

    let missing = CString::new(dir.path().join("none.txt").to_str().unwrap()).unwrap();
    assert_eq!(unsafe { sc_graph_read_edge_list(missing.as_ptr(), &mut g) }, ScStatus::Io);
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/signclust.h")).unwrap();
    for f in [
        "sc_graph_from_edges",
        "sc_graph_read_edge_list",
        "sc_graph_free",
        "sc_graph_node_count",
        "sc_graph_edge_count",
        "sc_ssbm_sample",
        "sc_cluster",
        "sc_ari",
        "sc_misclustering_rate",
        "sc_last_error_message",
        "sc_status_string",
        "sc_version",
    ] {
        assert!(header.contains(&format!("{f}(")), "{f} missing from header");
    }
    assert!(header.contains("typedef struct ScGraph ScGraph;"));
    assert!(header.contains("SC_STATUS_OK"));
}

/// Compile and run a small C program against the static library.
#[test]
fn c_program_links() {
    let cc = match std::process::Command::new("cc").arg("--version").output() {
        Ok(o) if o.status.success() => "cc",
        _ => {
            eprintln!("no C compiler found; skipping link test");
            return;
        }
    };
    let manifest = env!("CARGO_MANIFEST_DIR");
    let target = std::path::Path::new(manifest).join("../../target/debug");
    let lib = target.join("libsignclust_ffi.a");
    if !lib.exists() {
        eprintln!("{} not built; skipping link test", lib.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    std::fs::write(
        &src,
        r#"
#include <stdio.h>
#include "signclust.h"
int main(void) {
    size_t src[] = {0, 1, 2}, dst[] = {1, 2, 0};
    double w[] = {1.0, 1.0, -1.0};
    ScGraph *g = NULL;
    if (sc_graph_from_edges(3, src, dst, w, 3, &g) != SC_STATUS_OK) return 1;
    size_t e = sc_graph_edge_count(g);
    sc_graph_free(g);
    if (sc_graph_from_edges(3, src, src, w, 1, &g) != SC_STATUS_BAD_EDGE) return 2;
    printf("%zu %s\n", e, sc_last_error_message());
    return 0;
}
"#,
    )
    .unwrap();
    let exe = dir.path().join("main");
    let status = std::process::Command::new(cc)
        .arg(&src)
        .arg(format!("-I{manifest}/include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let out = std::process::Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status);
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("3 self-loop"));
}
