use std::path::Path;
use std::process::Command;

use sgfd::workbench::cli::main_with;
use sgfd::workbench::load_model;

const SMALL: &str = "\
grid.nx = 100
grid.nz = 90
grid.h = 10
time.dt = 0.001
time.nt = 60
source.ix = 50
source.iz = 55
receivers.positions = 40:40, 60:40
snapshots.steps = 30
";

fn sgfd(args: &[&str]) -> i32 {
    let mut full = vec!["sgfd"];
    full.extend_from_slice(args);
    main_with(full)
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("run.cfg");
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn run_writes_declared_outputs_reproducibly() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(sgfd(&["run", "--config", &cfg, "--out", a.to_str().unwrap()]), 0);
    assert_eq!(sgfd(&["run", "--config", &cfg, "--out", b.to_str().unwrap()]), 0);

    let manifest = read(&a, "manifest.txt");
    assert!(manifest.contains("config_sha256="));
    for line in manifest.lines().filter(|l| l.starts_with("output=")) {
        let name = line["output=".len()..].split(' ').next().unwrap();
        assert!(a.join(name).exists(), "{name}");
        if name.ends_with(".csv") || name.ends_with(".bin") {
            assert_eq!(std::fs::read(a.join(name)).unwrap(), std::fs::read(b.join(name)).unwrap());
        }
    }
    let csv = read(&a, "seismogram_vz.csv");
    assert!(csv.starts_with("time,vz_40_40,vz_60_40\n"));
    assert_eq!(csv.lines().count(), 61);
    let snap = read(&a, "snap_000030.hdr");
    assert!(snap.contains("nx=100\nnz=90\nh=10\ndt=0.001\nstep=30\n"));
    let raw = std::fs::read(a.join("snap_000030_txx.bin")).unwrap();
    assert_eq!(raw.len(), 100 * 90 * 4);
}

#[test]
fn config_problems_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let cfg = write_config(dir.path(), &format!("{SMALL}sorce.f0 = 14\n"));
    assert_eq!(sgfd(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]), 2);
    assert_eq!(sgfd(&["run", "--out", out.to_str().unwrap()]), 2);
    assert_eq!(sgfd(&["figures", "fig5", "--out", out.to_str().unwrap()]), 2);
    assert_eq!(sgfd(&["no-such-command"]), 2);
    let missing = dir.path().join("missing.cfg");
    assert_eq!(sgfd(&["run", "--config", missing.to_str().unwrap(), "--out", out.to_str().unwrap()]), 1);
}

#[test]
fn unstable_run_is_refused_unless_overridden() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &SMALL.replace("time.dt = 0.001", "time.dt = 0.004").replace("time.nt = 60", "time.nt = 400"));
    let out = dir.path().join("o");
    let out = out.to_str().unwrap();
    assert_eq!(sgfd(&["stability", "--config", &cfg, "--out", out]), 0);
    assert!(read(Path::new(out), "stability.txt").contains("verdict=unstable"));
    assert_eq!(sgfd(&["run", "--config", &cfg, "--out", out]), 3);
    // Allowed to run, the field overflows and the run reports a numerical abort.
    assert_eq!(sgfd(&["run", "--config", &cfg, "--override-stability", "--out", out]), 4);
    assert!(Path::new(out).join("norms.bin").exists());
}

#[test]
fn genmodel_round_trips_and_feeds_a_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(sgfd(&["genmodel", "layered", "--nx", "100", "--nz", "90", "--name", "lay", "--out", out]), 0);
    let model = load_model(dir.path().join("lay.hdr")).unwrap();
    assert_eq!(model.model.shape(), (100, 90));
    assert!(model.label.unwrap().contains("stand-in"));

    let cfg = write_config(dir.path(), &format!("{SMALL}model.header = lay.hdr\n"));
    let run_out = dir.path().join("run");
    assert_eq!(sgfd(&["run", "--config", &cfg, "--out", run_out.to_str().unwrap()]), 0);
    assert!(read(&run_out, "manifest.txt").contains("note=model: layered miniature"));
}

#[test]
fn coefficient_and_dispersion_exports() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(sgfd(&["coeffs", "--kind", "taylor", "--m", "2", "--out", out]), 0);
    assert_eq!(read(dir.path(), "coeffs.txt"), "M=2 provenance=taylor kh_max=none\n1.125\n-0.0416666667\n");
    assert_eq!(sgfd(&["coeffs", "--kind", "calibrated", "--m", "3", "--out", out]), 0);
    assert!(read(dir.path(), "manifest.txt").contains("note=calibrated kh_max="));
    assert_eq!(sgfd(&["coeffs", "--kind", "time-space-ls", "--m", "4", "--out", out]), 2);
    assert_eq!(sgfd(&["coeffs", "--kind", "time-space-ls", "--m", "4", "--courant", "0.2", "--out", out]), 0);

    assert_eq!(sgfd(&["dispersion", "--scheme", "balanced", "--kind", "taylor", "--out", out]), 0);
    let csv = read(dir.path(), "dispersion.csv");
    assert!(csv.starts_with("scheme,wave,theta,kh,delta,flag\nbalanced,P,0,"));
    assert_eq!(csv.lines().count(), 1 + 2 * 5 * 512);
}

#[test]
fn small_figures_and_bench() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(sgfd(&["figures", "fig4", "--out", out]), 0);
    assert!(read(dir.path(), "fig4.csv").starts_with("kxh,kzh,e_balanced,e_nonbalanced\n"));
    assert_eq!(sgfd(&["figures", "fig3", "--out", out]), 0);
    assert!(read(dir.path(), "fig3_coeffs.txt").starts_with("M=7 provenance=table1"));

    let cfg = write_config(dir.path(), SMALL);
    assert_eq!(sgfd(&["bench", "--config", &cfg, "--repetitions", "3", "--out", out]), 0);
    assert!(read(dir.path(), "bench.txt").contains("counter_ratio=0.571428571\n"));
    assert_eq!(sgfd(&["bench", "--config", &cfg, "--repetitions", "2", "--out", out]), 2);
}

#[test]
fn binary_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &SMALL.replace("time.dt = 0.001", "time.dt = 0.004"));
    let status = Command::new(env!("CARGO_BIN_EXE_sgfd"))
        .args(["run", "--config", &cfg, "--out"])
        .arg(dir.path().join("o"))
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&status.stderr).contains("verdict=unstable"));
    let ok = Command::new(env!("CARGO_BIN_EXE_sgfd")).arg("--help").output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
}
