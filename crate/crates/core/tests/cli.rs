use std::path::Path;
use std::process::Command;

use sha2::{Digest, Sha256};
use sfvem::harness::cli::run;
use sfvem::harness::{read_csv, CSV_HEADER};
use sfvem::polymesh::{read_mesh, Orientation};

fn sfvem(args: &[&str]) -> i32 {
    let mut v = vec!["sfvem"];
    v.extend_from_slice(args);
    run(v)
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn mesh_then_check() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("m.txt");
    assert_eq!(sfvem(&["mesh", "--family", "pentagon", "--level", "1", "--out", path_str(&m)]), 0);
    let mesh = read_mesh(&m, Orientation::Strict).unwrap();
    assert_eq!(mesh.num_vertices(), 11);
    assert_eq!(mesh.num_cells(), 4);
    assert_eq!(sfvem(&["check", "--mesh", path_str(&m), "--degree", "2"]), 0);

    let c = dir.path().join("c.txt");
    assert_eq!(sfvem(&["mesh", "--family", "cube", "--level", "2", "--out", path_str(&c)]), 0);
    for s in ["auto", "kuhn", "center"] {
        assert_eq!(sfvem(&["check", "--mesh", path_str(&c), "--degree", "3", "--strategy", s]), 0, "{s}");
    }
}

#[test]
fn invalid_meshes_fail_validation() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    // bow-tie quadrilateral
    std::fs::write(&bad, "sfvem-mesh 2 4 1\nv 0 0\nv 1 1\nv 1 0\nv 0 1\nc 0 1 2 3\n").unwrap();
    assert_eq!(sfvem(&["check", "--mesh", path_str(&bad), "--degree", "1"]), 1);
    std::fs::write(&bad, "not a mesh\n").unwrap();
    assert_eq!(sfvem(&["check", "--mesh", path_str(&bad), "--degree", "1"]), 1);
    // a triangle-only polyhedron cannot be split by kuhn
    let tet = dir.path().join("tet.txt");
    std::fs::write(
        &tet,
        "sfvem-mesh 3 4 1 4\nv 0 0 0\nv 1 0 0\nv 0 1 0\nv 0 0 1\nf 0 2 1\nf 0 1 3\nf 1 2 3\nf 0 3 2\nc +0 +1 +2 +3\n",
    )
    .unwrap();
    assert_eq!(sfvem(&["check", "--mesh", path_str(&tet), "--degree", "2", "--strategy", "kuhn"]), 1);
    assert_eq!(sfvem(&["check", "--mesh", path_str(&tet), "--degree", "2", "--strategy", "center"]), 0);
    assert_eq!(sfvem(&["check", "--mesh", path_str(&dir.path().join("missing.txt")), "--degree", "1"]), 1);
}

#[test]
fn usage_errors() {
    assert_eq!(sfvem(&[]), 2);
    assert_eq!(sfvem(&["frobnicate"]), 2);
    assert_eq!(sfvem(&["mesh", "--family", "octagon", "--level", "1", "--out", "x"]), 2);
    assert_eq!(sfvem(&["mesh", "--family", "cube", "--level", "0", "--out", "x"]), 2);
    assert_eq!(sfvem(&["check", "--mesh", "x", "--degree", "0"]), 2);
    assert_eq!(sfvem(&["check", "--mesh", "x", "--degree", "1", "--strategy", "random"]), 2);
    assert_eq!(
        sfvem(&["converge", "--family", "cube", "--degree", "1", "--levels", "3..1", "--problem", "poly3d", "--csv", "x"]),
        2
    );
    assert_eq!(
        sfvem(&["converge", "--family", "cube", "--degree", "1", "--levels", "1..2", "--problem", "sinsin2d", "--csv", "x"]),
        2
    );
    assert_eq!(sfvem(&["--help"]), 0);
}

#[test]
fn solve_writes_solution_file() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("m.txt");
    let out = dir.path().join("sol.json");
    assert_eq!(sfvem(&["mesh", "--family", "pentagon", "--level", "2", "--out", path_str(&m)]), 0);
    assert_eq!(
        sfvem(&[
            "solve", "--mesh", path_str(&m), "--degree", "2", "--problem", "sinsin2d", "--out", path_str(&out), "--errors"
        ]),
        0
    );
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let want = hex::encode(Sha256::digest(std::fs::read(&m).unwrap()));
    assert_eq!(json["mesh_sha256"], want.as_str());
    assert_eq!(json["degree"], 2);
    // 33 vertices, 48 edges with one interior value each, one moment per cell
    assert_eq!(json["dofs"].as_array().unwrap().len(), 33 + 48 + 16);
    assert_eq!(json["cell_coefficients"].as_array().unwrap().len(), 16);
    let l2 = json["errors"]["l2_error"].as_f64().unwrap();
    assert!(l2 > 0.0 && l2 < 1e-2, "{l2}");
    assert_eq!(sfvem(&["solve", "--mesh", path_str(&m), "--degree", "2", "--problem", "poly3d"]), 1);
    assert_eq!(sfvem(&["solve", "--mesh", path_str(&m), "--degree", "2", "--problem", "nope"]), 2);
}

#[test]
fn converge_cube_k1_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("out.csv");
    let code = sfvem(&[
        "converge", "--family", "cube", "--degree", "1", "--levels", "1..4", "--problem", "poly3d", "--csv", path_str(&csv),
    ]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().next().unwrap(), CSV_HEADER);
    let rows = read_csv(text.as_bytes()).unwrap();
    assert_eq!(rows.len(), 4);
    assert_eq!(rows.iter().map(|r| r.grid).collect::<Vec<_>>(), vec![1, 2, 3, 4]);
    let h1 = rows[3].h1_rate.unwrap();
    assert!((h1 - 2.0).abs() <= 0.2, "{h1}");
}

#[test]
fn binary_exit_codes_and_env_override() {
    let exe = env!("CARGO_BIN_EXE_sfvem");
    let out = Command::new(exe).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sfvem converge"));

    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("m.txt");
    let st = Command::new(exe).args(["mesh", "--family", "hexagon", "--level", "1", "--out", path_str(&m)]).status().unwrap();
    assert_eq!(st.code(), Some(0));
    let solve = |tol: &str| {
        Command::new(exe)
            .args(["solve", "--mesh", path_str(&m), "--degree", "1", "--problem", "sinsin2d"])
            .env("SFVEM_CG_TOL", tol)
            .output()
            .unwrap()
    };
    assert_eq!(solve("1e-10").status.code(), Some(0));
    assert_eq!(solve("abc").status.code(), Some(2));
}
