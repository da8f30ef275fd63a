use std::ffi::{CStr, CString};
use std::ptr;

use pathhodge_ffi::*;

fn parse(text: &str) -> *mut PhDigraph {
    let text = CString::new(text).unwrap();
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { ph_digraph_parse(text.as_ptr(), &mut g) }, PhStatus::Ok);
    g
}

fn last_error() -> String {
    let p = ph_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn dimensions_on_the_triangle() {
    let g = parse("0 1\n1 2\n2 0\n");
    let (mut h0, mut h1, mut b1, mut om1) = (0, 0, 0, 9);
    unsafe {
        assert_eq!(ph_digraph_vertex_count(g), 3);
        assert_eq!(ph_digraph_edge_count(g), 3);
        assert_eq!(ph_cohomology_dim(g, 0, &mut h0), PhStatus::Ok);
        assert_eq!(ph_cohomology_dim(g, 1, &mut h1), PhStatus::Ok);
        assert_eq!(ph_chain_betti(g, 1, &mut b1), PhStatus::Ok);
        assert_eq!(ph_omega_dim(g, 1, &mut om1), PhStatus::Ok);
        ph_digraph_free(g);
    }
    assert_eq!((h0, h1, b1, om1), (1, 0, 1, 0));
    assert!(ph_last_error_message().is_null());
}

#[test]
fn edges_from_arrays() {
    let edges = [0usize, 1, 1, 0];
    let mut g = ptr::null_mut();
    unsafe {
        assert_eq!(ph_digraph_new(2, edges.as_ptr(), 2, &mut g), PhStatus::Ok);
        let mut count = 0;
        assert_eq!(ph_allowed_count(g, 1, &mut count), PhStatus::Ok);
        assert_eq!(count, 2);
        let mut path = [9usize; 2];
        assert_eq!(ph_allowed_path(g, 1, 0, path.as_mut_ptr()), PhStatus::Ok);
        assert_eq!(path, [0, 1]);
        assert_eq!(ph_allowed_path(g, 1, 2, path.as_mut_ptr()), PhStatus::InvalidArgument);
        ph_digraph_free(g);
    }
}

#[test]
fn eigenvalues_report_required_length() {
    let g = parse("0 1\n1 0\n");
    let mut buf = [0.0f64; 1];
    let mut len = 0;
    unsafe {
        assert_eq!(ph_laplacian_eigenvalues(g, 0, buf.as_mut_ptr(), 1, &mut len), PhStatus::BufferTooSmall);
        assert_eq!(len, 2);
        let mut full = [0.0f64; 2];
        assert_eq!(ph_laplacian_eigenvalues(g, 0, full.as_mut_ptr(), 2, &mut len), PhStatus::Ok);
        assert!(full[0].abs() < 1e-12 && (full[1] - 4.0).abs() < 1e-12);
        ph_digraph_free(g);
    }
}

#[test]
fn heat_matches_closed_form() {
    let g = parse("0 1\n1 0\n");
    let u0 = [1.0, 0.0];
    let mut out = [0.0; 2];
    let t = 0.3f64;
    unsafe {
        assert_eq!(ph_heat_apply(g, 0, t, u0.as_ptr(), 2, out.as_mut_ptr()), PhStatus::Ok);
        let e = (-4.0 * t).exp();
        assert!((out[0] - (0.5 + 0.5 * e)).abs() < 1e-12);
        assert!((out[1] - (0.5 - 0.5 * e)).abs() < 1e-12);
        assert_eq!(ph_heat_apply(g, 0, -1.0, u0.as_ptr(), 2, out.as_mut_ptr()), PhStatus::InvalidArgument);
        assert!(last_error().contains("negative time"));
        assert_eq!(ph_heat_apply(g, 0, 1.0, u0.as_ptr(), 1, out.as_mut_ptr()), PhStatus::InvalidArgument);
        ph_digraph_free(g);
    }
}

#[test]
fn walk_expectation_starts_at_the_indicator() {
    let g = parse("0 1\n1 2\n2 0\n");
    let start = [1usize, 2];
    let mut e = [0.0; 3];
    unsafe {
        assert_eq!(ph_walk_expectation(g, 1, start.as_ptr(), -1, -1.0, 0, e.as_mut_ptr(), 3), PhStatus::Ok);
        assert_eq!(e, [0.0, -1.0, 0.0]);
        assert_eq!(ph_walk_expectation(g, 1, start.as_ptr(), 1, 0.5, 50, e.as_mut_ptr(), 3), PhStatus::Ok);
        assert!(e.iter().all(|x| x.abs() < 1e-3));
        let bad = [0usize, 2];
        assert_eq!(ph_walk_expectation(g, 1, bad.as_ptr(), 1, 0.5, 1, e.as_mut_ptr(), 3), PhStatus::NotAllowed);
        assert_eq!(ph_walk_expectation(g, 1, start.as_ptr(), 2, 0.5, 1, e.as_mut_ptr(), 3), PhStatus::InvalidArgument);
        assert_eq!(ph_walk_expectation(g, 1, start.as_ptr(), 1, 1.5, 1, e.as_mut_ptr(), 3), PhStatus::InvalidArgument);
        ph_digraph_free(g);
    }
}

#[test]
fn errors_set_codes_and_messages() {
    let text = CString::new("0 1\nx 2\n").unwrap();
    let mut g = ptr::null_mut();
    unsafe {
        assert_eq!(ph_digraph_parse(text.as_ptr(), &mut g), PhStatus::Parse);
        assert!(g.is_null());
        assert!(last_error().contains("line 2"));
        assert_eq!(ph_digraph_parse(ptr::null(), &mut g), PhStatus::NullPointer);
        let mut out = 0;
        assert_eq!(ph_cohomology_dim(ptr::null(), 0, &mut out), PhStatus::NullPointer);
        let edges = [0usize, 5];
        assert_eq!(ph_digraph_new(2, edges.as_ptr(), 1, &mut g), PhStatus::InvalidArgument);
        ph_digraph_free(ptr::null_mut());
    }
    assert!(!unsafe { CStr::from_ptr(ph_version()) }.to_bytes().is_empty());
}

#[test]
fn header_declares_every_entry_point() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/pathhodge.h")).unwrap();
    for name in [
        "ph_digraph_new",
        "ph_digraph_parse",
        "ph_digraph_free",
        "ph_cohomology_dim",
        "ph_chain_betti",
        "ph_omega_dim",
        "ph_laplacian_eigenvalues",
        "ph_heat_apply",
        "ph_walk_expectation",
        "ph_last_error_message",
        "typedef struct PhDigraph PhDigraph",
        "PH_STATUS_BUFFER_TOO_SMALL",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}

/// Compiles `examples/smoke.c` against the header and static library.
#[test]
fn c_program_links_and_runs() {
    let Ok(cc) = which("cc") else {
        eprintln!("no C compiler on PATH; skipping");
        return;
    };
    let manifest = env!("CARGO_MANIFEST_DIR");
    let deps = std::env::current_exe().unwrap();
    let profile_dir = deps.parent().unwrap().parent().unwrap();
    let lib = profile_dir.join("libpathhodge_ffi.a");
    if !lib.exists() {
        eprintln!("{} not built; skipping", lib.display());
        return;
    }
    let dir = tempfile_dir();
    let exe = dir.join("smoke");
    let status = std::process::Command::new(cc)
        .args(["-std=c99", "-Wall", "-Werror", "-I"])
        .arg(format!("{manifest}/include"))
        .arg(format!("{manifest}/examples/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let out = std::process::Command::new(&exe).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("H0=1 H1=0 b1=1"), "{text}");
    assert!(text.contains("heat=1.000000 1.000000 1.000000"), "{text}");
    assert!(text.contains("E0=1.000000 0.000000 0.000000"), "{text}");
    assert!(text.contains("negative time -> 2"), "{text}");
    std::fs::remove_dir_all(dir).ok();
}

fn which(name: &str) -> Result<std::path::PathBuf, ()> {
    let path = std::env::var_os("PATH").ok_or(())?;
    std::env::split_paths(&path).map(|d| d.join(name)).find(|p| p.is_file()).ok_or(())
}

fn tempfile_dir() -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("pathhodge-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
