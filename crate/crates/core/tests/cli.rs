use std::path::Path;
use std::process::{Command, Output};

fn pathhodge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pathhodge")).args(args).output().expect("binary runs")
}

fn write_graph(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn json_doc(out: &Output) -> serde_json::Value {
    let text = String::from_utf8_lossy(&out.stdout);
    let start = text.find("\n{").map(|i| i + 1).or_else(|| text.starts_with('{').then_some(0)).expect("json document");
    serde_json::from_str(&text[start..]).expect("valid json")
}

#[test]
fn betti_on_triangle() {
    let dir = tempfile::tempdir().unwrap();
    let t3 = write_graph(dir.path(), "t3.txt", "0 1\n1 2\n2 0\n");
    let out = pathhodge(&["betti", &t3, "--max-p", "2", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = json_doc(&out);
    assert!(doc["command"].as_str().unwrap().starts_with("betti "));
    assert_eq!(doc["results"]["cohomology"], serde_json::json!([1, 0, 0]));
}

#[test]
fn quiet_json_is_the_whole_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let g = write_graph(dir.path(), "k2.txt", "0 1\n1 0\n");
    let out = pathhodge(&["hodge", &g, "--p", "0", "--format", "json", "--quiet"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(doc["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));
}

#[test]
fn usage_and_input_errors_exit_one() {
    assert_eq!(pathhodge(&["betti", "/nonexistent/graph.txt"]).status.code(), Some(1));
    assert_eq!(pathhodge(&["no-such-command"]).status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let bad = write_graph(dir.path(), "bad.txt", "0 1\n1  2\n");
    let out = pathhodge(&["parse", &bad]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
    let g = write_graph(dir.path(), "g.txt", "0 1\n1 2\n2 0\n");
    assert_eq!(pathhodge(&["heat", &g, "--t", "1,-1"]).status.code(), Some(1));
    assert_eq!(pathhodge(&["walk", &g, "--d", "1", "--lazy", "1.5"]).status.code(), Some(1));
}

#[test]
fn help_exits_zero() {
    assert_eq!(pathhodge(&["--help"]).status.code(), Some(0));
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let g = write_graph(dir.path(), "t3.txt", "0 1\n1 2\n2 0\n");
    let args = ["walk", &g, "--d", "1", "--start", "0,1", "--steps", "8", "--samples", "2000", "--both"];
    let a = pathhodge(&args);
    let b = pathhodge(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn thread_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let g = write_graph(dir.path(), "t3.txt", "0 1\n1 2\n2 0\n");
    let base = ["walk", &g, "--d", "1", "--start", "1,2", "--steps", "6", "--samples", "3000", "--mc", "--quiet"];
    let one = pathhodge(&[&base[..], &["--threads", "1"]].concat());
    let four = pathhodge(&[&base[..], &["--threads", "4"]].concat());
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn out_file_receives_the_document() {
    let dir = tempfile::tempdir().unwrap();
    let g = write_graph(dir.path(), "k2.txt", "0 1\n1 0\n");
    let target = dir.path().join("heat.csv");
    let out = pathhodge(&["heat", &g, "--p", "0", "--t", "0,1,2", "--out", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(&target).unwrap();
    assert!(csv.starts_with("t,norm,dist_to_harmonic\n"));
    assert_eq!(csv.lines().count(), 4);
}

#[test]
fn verify_passes_on_small_instances() {
    let dir = tempfile::tempdir().unwrap();
    for (name, text) in
        [("t3", "0 1\n1 2\n2 0\n"), ("sq", "0 1\n0 2\n1 3\n2 3\n"), ("k3", "0 1\n1 0\n1 2\n2 1\n0 2\n2 0\n")]
    {
        let g = write_graph(dir.path(), name, text);
        let out = pathhodge(&["verify", &g, "--max-p", "2", "--format", "json", "--quiet"]);
        assert_eq!(out.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&out.stdout));
    }
}

#[test]
fn json_input_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let g = write_graph(dir.path(), "g.json", r#"{"vertices": 3, "edges": [[0, 1], [1, 2]]}"#);
    let out = pathhodge(&["parse", &g, "--format", "json", "--quiet"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["digraph"]["vertices"], 3);
}
