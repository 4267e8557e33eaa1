use std::fs;
use std::io::BufReader;
use std::process::{Command, Output};

use serde_json::Value;

fn stokesfem(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stokesfem"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

#[test]
fn family_constraint_is_enforced() {
    assert_eq!(code(&stokesfem(&["element", "info", "--r", "4", "--k", "1"])), 3);
    assert_eq!(code(&stokesfem(&["element", "info", "--r", "0", "--k", "1"])), 3);
    let out = stokesfem(&["element", "info", "--r", "3", "--k", "1"]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["dimensions"], serde_json::json!([20, 34, 16, 1]));
    assert_eq!(v["exact"], true);
}

#[test]
fn lowest_order_element_info() {
    let v = stdout_json(&stokesfem(&["element", "info", "--r", "1", "--k", "1"]));
    assert_eq!(v["dimensions"], serde_json::json!([4, 18, 16, 1]));
    assert_eq!(v["dof_counts"]["V"]["local_total"], 18);
    assert_eq!(v["exactness"]["alternating_sum"], 0);
}

#[test]
fn mesh_info_reports_euler_characteristics() {
    let out = stokesfem(&["mesh", "info", "--N", "3"]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["counts"]["cells"], 6 * 27);
    assert_eq!(v["euler_check"], true);
}

#[test]
fn mesh_export_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cube.mesh");
    let out = stokesfem(&["mesh", "export", "--N", "2", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let mesh = stokesfem::mesh::read_mesh(BufReader::new(fs::File::open(&path).unwrap())).unwrap();
    assert_eq!(mesh.counts(), stokesfem::mesh::Mesh::structured_cube(2).unwrap().counts());
}

#[test]
fn invalid_arguments_exit_3() {
    assert_eq!(code(&stokesfem(&["no-such-command"])), 3);
    assert_eq!(code(&stokesfem(&["verify", "no-such-check"])), 3);
    assert_eq!(code(&stokesfem(&["mesh", "info", "--N", "0"])), 3);
    assert_eq!(code(&stokesfem(&["verify", "exactness", "--r", "1"])), 3);
    assert_eq!(
        code(&stokesfem(&["convergence", "--levels", "0,2", "--r", "1", "--k", "1"])),
        3
    );
    assert_eq!(
        code(&stokesfem(&["solve", "quadcurl", "--N", "1", "--r", "1", "--k", "1", "--quadrature", "2"])),
        3
    );
    assert_eq!(
        code(&stokesfem(&["solve", "quadcurl", "--N", "1", "--r", "1", "--k", "1", "--preconditioner", "lu"])),
        3
    );
    assert_eq!(code(&stokesfem(&["--threads", "0", "mesh", "info", "--N", "1"])), 3);
}

#[test]
fn help_exits_0() {
    assert_eq!(code(&stokesfem(&["--help"])), 0);
}

#[test]
fn solver_failure_exits_2() {
    let out = stokesfem(&["solve", "quadcurl", "--N", "2", "--r", "1", "--k", "1", "--max-iter", "2"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("did not converge"));
}

#[test]
fn verification_exit_codes() {
    let out = stokesfem(&["verify", "bubbles", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["passed"], true);
    assert_eq!(v["claims"].as_array().unwrap().len(), 4);

    let out = stokesfem(&["verify", "exactness", "--r", "2", "--k", "1"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("exactness.r2k1  PASS"));

    // The div identity of the commuting diagram does not hold for k = 2.
    let out = stokesfem(&["verify", "commuting", "--r", "2", "--k", "2", "--N", "1", "--format", "json"]);
    assert_eq!(code(&out), 1);
    let v = stdout_json(&out);
    assert_eq!(v["passed"], false);
}

#[test]
fn convergence_csv_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, threads: &str| {
        let path = dir.path().join(name);
        let out = stokesfem(&[
            "--threads",
            threads,
            "convergence",
            "--problem",
            "quadcurl",
            "--levels",
            "1,2",
            "--r",
            "1",
            "--k",
            "1",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        fs::read(path).unwrap()
    };
    let a = run("a.csv", "1");
    let b = run("b.csv", "1");
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0], "N,dofs,l2,l2_rate,curl,curl_rate,hcurl,hcurl_rate,grad_curl,grad_curl_rate");
    assert!(lines[1].starts_with("1,"));
    assert!(lines[2].starts_with("2,"));
    let fields: Vec<&str> = lines[2].split(',').collect();
    assert_eq!(fields.len(), 10);
    assert!(fields[2].contains("e-") || fields[2].contains("e+"));
    assert_eq!(run("c.csv", "2"), b);
}

#[test]
fn config_file_supplements_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# study\nr = 4\nk = 1\nlevels = 1,2\nformat = json\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    // r = 4 from the file is invalid on its own.
    assert_eq!(code(&stokesfem(&["--config", cfg, "convergence"])), 3);
    let out = stokesfem(&["--config", cfg, "convergence", "--r", "2"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["r"], 2);
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);
    assert_eq!(code(&stokesfem(&["--config", "/nonexistent/run.cfg", "mesh", "info", "--N", "1"])), 3);
}

#[test]
fn stokes_solution_is_divergence_free() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("stokes.csv");
    let out = stokesfem(&["solve", "stokes", "--N", "2", "--k", "1", "--out", csv.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert!(v["div_norm"].as_f64().unwrap() <= 1e-9);
    let text = fs::read_to_string(csv).unwrap();
    assert!(text.starts_with("N,k,velocity_dofs,pressure_dofs,div_norm"));
}

#[test]
fn unwritable_output_exits_3() {
    let out = stokesfem(&["mesh", "export", "--N", "1", "--out", "/nonexistent/dir/m.txt"]);
    assert_eq!(code(&out), 3);
}
