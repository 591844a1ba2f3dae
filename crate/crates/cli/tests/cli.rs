use std::path::Path;
use std::process::{Command, Output};

use cutoff_core::graphlab::{load_graph, LoadedGraph};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cutoff-lab")).current_dir(dir).args(args).output().expect("spawn cutoff-lab")
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_str(&stdout(o)).expect("valid json")
}

fn write(dir: &Path, name: &str, contents: &str) {
    std::fs::write(dir.join(name), contents).unwrap();
}

const K4: &str = "graph 4 3 undirected\n0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n";
const C4: &str = "graph 4 2 undirected\n0 1\n1 2\n2 3\n3 0\n";
const PGL2_F3: &str = "gens 2 3 1\n1 1 0 1\n0 1 1 0\n2 0 0 1\n";

#[test]
fn constants_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = stdout(&run(dir.path(), &["constants", "3"]));
    assert_eq!(out.lines().next().unwrap(), "4q²−4 | 2q²+2q+2");
    let out = stdout(&run(dir.path(), &["constants", "3", "--q", "2"]));
    assert!(out.contains("E = 6/7"), "{out}");
    assert!(out.contains("sigma^2 = 104/49"), "{out}");
    assert!(out.contains("C = 7/6"), "{out}");
    let out = stdout(&run(dir.path(), &["constants", "2", "--q", "3"]));
    assert!(out.lines().any(|l| l == "C = 2"), "{out}");
    let table = stdout(&run(dir.path(), &["constants", "--table", "--max-d", "7"]));
    assert_eq!(table.lines().filter(|l| l.contains('|')).count(), 6 + 1);
}

#[test]
fn errors_have_kind_prefix_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["constants", "11"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error[domain]: "));
    let o = run(dir.path(), &["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error[usage]: "));
    write(dir.path(), "bad.txt", "graph 3 2 undirected\n0 1\n1 x\n");
    let o = run(dir.path(), &["analyze", "bad.txt"]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.starts_with("error[parse]: ") && err.contains("line 3"), "{err}");
    let o = run(dir.path(), &["analyze", "missing.txt"]);
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error[io]: "));
}

#[test]
fn sector_sim_is_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["sector-sim", "--d", "3", "--q", "3", "--horizon", "50", "--trajectories", "40", "--seed", "9"];
    let a = stdout(&run(dir.path(), &args));
    let b = stdout(&run(dir.path(), &args));
    assert_eq!(a, b);
    let other = stdout(&run(
        dir.path(),
        &["sector-sim", "--d", "3", "--q", "3", "--horizon", "50", "--trajectories", "40", "--seed", "10"],
    ));
    assert_ne!(a, other);

    let zero =
        stdout(&run(dir.path(), &["sector-sim", "--d", "4", "--q", "2", "--horizon", "0", "--trajectories", "5"]));
    let rows: Vec<&str> = zero.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    assert_eq!(rows.len(), 5);
    for r in rows {
        assert_eq!(r.split(',').nth(1), Some("0"), "{r}");
    }
}

#[test]
fn sector_exact_masses_sum_to_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = stdout(&run(dir.path(), &["sector-exact", "--d", "3", "--q", "2", "--horizon", "1"]));
    assert!(out.contains("\"(0,1)\",2,1/2,0.5"), "{out}");
    assert!(out.contains("\"(1,0)\",2,1/2,0.5"), "{out}");
}

#[test]
fn analyze_small_graphs() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "k4.txt", K4);
    write(dir.path(), "c4.txt", C4);
    write(dir.path(), "c4.col", "0 0\n1 1\n2 0\n3 1\n");

    let v = json(&run(dir.path(), &["analyze", "k4.txt", "--eps", "0.3", "--horizon", "4"]));
    let g = &v["graphs"][0];
    assert_eq!(g["t_mix"][0]["t"], 1);
    assert_eq!(g["spectral"]["is_ramanujan"], true);
    assert_eq!(g["spectral"]["lambda_nontrivial"], 1.0);

    let o = run(dir.path(), &["analyze", "c4.txt", "--coloring", "c4.col", "--horizon", "3", "--profile-dir", "prof"]);
    let v = json(&o);
    assert_eq!(v["graphs"][0]["spectral"]["trivial_count"], 2);
    let csv = std::fs::read_to_string(dir.path().join("prof/0_c4.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,tv_total,tv_trivial,tv_orth"));
    for l in lines.skip(1) {
        let f: Vec<&str> = l.split(',').collect();
        assert_eq!(f[2], "0.5", "{l}");
    }

    // opt-in eigenvalue check: K4 has second eigenvalue -1
    let o = run(dir.path(), &["analyze", "k4.txt", "--expect-triangle-q", "2"]);
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error[assertion]: "));
    stdout(&run(dir.path(), &["analyze", "k4.txt", "--expect-triangle-q", "0", "--triangle-tol", "1"]));

    let v = json(&run(dir.path(), &["analyze", "k4.txt", "c4.txt", "--lazy", "--no-spectrum", "--horizon", "10"]));
    assert_eq!(v["cutoff_ratios"].as_array().unwrap().len(), 2);
    assert!(v["graphs"][0]["spectral"].is_null());
}

#[test]
fn cayley_pgl2_f3() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "gens.txt", PGL2_F3);
    let v = json(&run(dir.path(), &["cayley", "gens.txt", "--symmetrize", "--emit", "g.txt"]));
    assert_eq!(v["order"], 24);
    assert_eq!(v["pgl_order"], "24");
    assert_eq!(v["generates_pgl"], true);
    let text = std::fs::read_to_string(dir.path().join("g.txt")).unwrap();
    match load_graph(text.as_bytes()).unwrap() {
        LoadedGraph::Undirected(g) => {
            assert_eq!(g.n(), 24);
            assert_eq!(g.k(), v["degree"].as_u64().unwrap() as usize);
        }
        LoadedGraph::Directed(_) => panic!("Cayley graph of a symmetric set is undirected"),
    }

    let o = run(dir.path(), &["cayley", "gens.txt", "--symmetrize", "--cap", "10"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error[cap]: "));
    let o = run(dir.path(), &["cayley", "gens.txt"]);
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error[domain]: "));
}

#[test]
fn predict_renderings() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(&run(dir.path(), &["predict", "--d", "3", "--q", "2", "--n", "2^20"]));
    assert_eq!(v["cutoff_coefficient"], "7/6");
    assert_eq!(v["graph_distance"]["coefficient"], "7/3");
    assert_eq!(v["renderings_agree"], true);
    assert!((v["t_cutoff"].as_f64().unwrap() - 70.0 / 3.0).abs() < 1e-9);
    let v = json(&run(dir.path(), &["predict", "--d", "2", "--q", "5", "--n", "1000000"]));
    assert_eq!(v["tree"]["coefficient"], "3/2");
    assert_eq!(v["renderings_agree"], true);
    let v = json(&run(dir.path(), &["predict", "--d", "3", "--q", "5", "--n", "25"]));
    assert_eq!(v["pre_asymptotic"], true);
}

#[test]
fn manifest_replay_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "c4.txt", C4);
    stdout(&run(
        dir.path(),
        &["--out", "r.json", "analyze", "c4.txt", "--lazy", "--horizon", "20", "--profile-dir", "prof"],
    ));
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("r.json.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["subcommand"], "analyze");
    assert_eq!(manifest["outputs"].as_array().unwrap().len(), 2);

    let out = stdout(&run(dir.path(), &["replay", "r.json.manifest.json"]));
    assert_eq!(out.lines().filter(|l| l.starts_with("identical ")).count(), 2);
    let digest = manifest["outputs"][0]["sha256"].as_str().unwrap();
    assert_eq!(digest.len(), 64);

    std::fs::write(dir.path().join("prof/0_c4.csv"), "tampered\n").unwrap();
    let o = run(dir.path(), &["replay", "r.json.manifest.json"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error[replay-mismatch]: "));
    stdout(&run(dir.path(), &["replay", "--write", "r.json.manifest.json"]));
    stdout(&run(dir.path(), &["replay", "r.json.manifest.json"]));
}

#[test]
fn stdout_runs_get_a_default_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let printed = stdout(&run(dir.path(), &["constants", "4", "--q", "3"]));
    let m: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("cutoff-lab.manifest.json")).unwrap()).unwrap();
    assert!(m["outputs"][0]["path"].is_null());
    assert_eq!(m["outputs"][0]["bytes"], printed.len());
    assert_eq!(stdout(&run(dir.path(), &["replay", "cutoff-lab.manifest.json"])), "identical <stdout>\n");

    let quiet = tempfile::tempdir().unwrap();
    stdout(&run(quiet.path(), &["--no-manifest", "constants", "4"]));
    assert_eq!(std::fs::read_dir(quiet.path()).unwrap().count(), 0);
}

#[test]
fn seeded_runs_replay_byte_identically() {
    let dir = tempfile::tempdir().unwrap();
    stdout(&run(
        dir.path(),
        &[
            "sector-sim",
            "--d",
            "3",
            "--q",
            "2",
            "--horizon",
            "30",
            "--trajectories",
            "20",
            "--seed",
            "4",
            "--out",
            "s.csv",
        ],
    ));
    let m: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("s.csv.manifest.json")).unwrap()).unwrap();
    assert_eq!(m["seed"], 4);
    stdout(&run(dir.path(), &["replay", "s.csv.manifest.json"]));
}
