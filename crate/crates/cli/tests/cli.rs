use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn scratch(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("cli").join(name);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("run.conf");
    std::fs::write(&path, body).unwrap();
    path
}

fn zetashift(args: &[&str], config: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zetashift"))
        .args(&args[..1])
        .arg("--config")
        .arg(config)
        .args(&args[1..])
        .output()
        .unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn report_envelope() {
    let dir = scratch("envelope");
    let cfg = write_config(&dir, "mode = exp-poly\ncoeffs = 1, 1\nshifts = 1, 3\nseed = 5\n");
    let out = zetashift(&["zeros"], &cfg);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["command"], "zeros");
    assert_eq!(v["config"]["coeffs"], "1, 1");
    assert_eq!(v["config"]["seed"], "5");
    assert_eq!(v["results"]["count"], 2);
    assert_eq!(v["provenance"]["seed"], 5);
    assert!(v["provenance"]["code_version"].as_str().unwrap().contains("zetashift"));
}

#[test]
fn seed_flag_overrides_config() {
    let dir = scratch("seed");
    let cfg = write_config(&dir, "mode = exp-poly\ncoeffs = 1, 1\nshifts = 1, 3\nseed = 5\n");
    let v = json(&zetashift(&["zeros", "--seed", "11"], &cfg));
    assert_eq!(v["provenance"]["seed"], 11);
    assert_eq!(v["config"]["seed"], "11");
}

#[test]
fn csv_output_and_out_file() {
    let dir = scratch("csv");
    let cfg = write_config(&dir, "primes = 2, 3\nthetas = 0, 0\nd = 0.25\nT = 1000\n");
    let target = dir.join("a.csv");
    let out = zetashift(&["adscan", "--format", "csv", "--out", target.to_str().unwrap()], &cfg);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&target).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("tau_lo,tau_hi,length"));
    let mut total = 0.0;
    for line in lines {
        let cells: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(cells.len(), 3);
        assert!(cells[0] >= 1000.0 && cells[1] <= 2000.0 && cells[0] < cells[1]);
        assert!((cells[2] - (cells[1] - cells[0])).abs() < 1e-9);
        total += cells[2];
    }
    assert!((total / 1000.0 - 0.25).abs() < 0.025);
}

#[test]
fn assignment_file_feeds_later_commands() {
    let dir = scratch("chain");
    let build = write_config(
        &dir,
        "sigma = 0.75\nt = 2\nshifts = 1, 2\ntargets = 1+1i, -1\nepsilon = 0.1\ny = 1\n",
    );
    let report = dir.join("phases.json");
    let out = zetashift(&["build-phases", "--out", report.to_str().unwrap()], &build);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let built: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(built["results"]["converged"], true);
    assert!(built["results"]["residual"].as_f64().unwrap() < 0.1);

    let scan = dir.join("scan.conf");
    std::fs::write(&scan, "assignment_file = phases.json\nd = 0.2\nT = 10000\n").unwrap();
    let out = zetashift(&["adscan"], &scan);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json(&out);
    let support = built["results"]["assignment"]["terms"].as_array().unwrap().len() as i32;
    let expected = 0.4f64.powi(support);
    assert!((v["results"]["expected"].as_f64().unwrap() - expected).abs() < 1e-12);
    assert_eq!(v["results"]["verified"], true);
}

#[test]
fn non_convergence_exits_2_with_a_report() {
    let dir = scratch("nonconv");
    let cfg = write_config(
        &dir,
        "sigma = 0.75\nt = 2\nshifts = 1, 2\ntargets = 5+5i, -5\nepsilon = 0.01\ny = 1\nbudget = 3\n",
    );
    let out = zetashift(&["build-phases"], &cfg);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["results"]["converged"], false);
    assert_eq!(v["results"]["primes_examined"], 3);
}

#[test]
fn resolution_failure_exits_3() {
    let dir = scratch("resolution");
    let cfg = write_config(
        &dir,
        "sigma = 0.8\nt = 2\nshifts = 1\nT = 100\ncutoff_X = 100\nepsilon = 0.5\nkind = good-set\ngrid_step = 0.5\n",
    );
    let out = zetashift(&["density"], &cfg);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
    assert!(stderr(&out).contains("grid"));
}

#[test]
fn budget_exhaustion_exits_4() {
    let dir = scratch("budget");
    let cfg = write_config(&dir, "mode = chen\nlambdas = 1.5\nM = 2\nT1 = 0\nT2 = 1000000000\n");
    let out = zetashift(&["kronecker"], &cfg);
    assert_eq!(out.status.code(), Some(4), "{}", stderr(&out));
}

#[test]
fn config_errors_exit_1_with_line_numbers() {
    let dir = scratch("usage");
    let cfg = write_config(&dir, "mode = chen\nlambdas = 1.5\nM two\n");
    let out = zetashift(&["kronecker"], &cfg);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("config line 3"), "{}", stderr(&out));

    let cfg = write_config(&dir, "mode = chen\nlambdas = 1.5\nM = 2\nT1 = 0\nT2 = 10\ncolour = blue\n");
    let out = zetashift(&["kronecker"], &cfg);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("config line 6") && stderr(&out).contains("colour"));

    let cfg = write_config(&dir, "mode = exp-poly\ncoeffs = 1, 1\nshifts = 3, 1\n");
    let out = zetashift(&["zeros"], &cfg);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("config line 3"), "{}", stderr(&out));
}

#[test]
fn usage_errors_exit_1() {
    let dir = scratch("flags");
    let cfg = write_config(&dir, "mode = exp-poly\ncoeffs = 1\nshifts = 1\n");
    assert_eq!(zetashift(&["zeros", "--workers", "0"], &cfg).status.code(), Some(1));
    assert_eq!(zetashift(&["zeros", "--format", "xml"], &cfg).status.code(), Some(1));
    assert_eq!(zetashift(&["zeros"], &dir.join("missing.conf")).status.code(), Some(1));
    let out = Command::new(env!("CARGO_BIN_EXE_zetashift")).arg("frobnicate").output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = Command::new(env!("CARGO_BIN_EXE_zetashift")).arg("--help").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn csv_formats_for_each_command_have_headers() {
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let cases = [
        ("build-phases", "build_phases.conf", "p,theta"),
        ("kronecker", "kronecker.conf", "t_star,objective,bound,Delta,Lambda,certified"),
        ("kronecker", "window.conf", "h,t_used,objective,target"),
        ("zeros", "zeros.conf", "count,bound_holds"),
        ("tail-energy", "tail_energy.conf", "integral,reference,ratio,y"),
    ];
    for (cmd, file, header) in cases {
        let out = zetashift(&[cmd, "--format", "csv"], &configs.join(file));
        assert_eq!(out.status.code(), Some(0), "{cmd}: {}", stderr(&out));
        let text = String::from_utf8(out.stdout).unwrap();
        assert_eq!(text.lines().next(), Some(header), "{cmd} {file}");
        assert!(text.lines().count() >= 2, "{cmd} {file}");
    }
}
