use std::path::{Path, PathBuf};
use std::process::Command;

use vibro::commands::{self, Options, SolverOverrides};
use vibro::config_io::{load_config, to_toml};
use vibro::error::{EXIT_CONFIG, EXIT_VERIFICATION};
use vibro::{matrix_market, RunError};
use vibro_core::config::SolverMethod;

fn benchmark() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/fuselage_slice.cfg")
}

/// The benchmark cut down to 10–60 Hz so that every command runs quickly.
fn short_config(dir: &Path) -> PathBuf {
    let mut cfg = load_config(&benchmark()).unwrap().config;
    cfg.frequency.f_max = 60.0;
    cfg.frequency.band_edges = vec![10.0, 40.0, 60.0];
    let path = dir.join("short.cfg");
    std::fs::write(&path, to_toml(&cfg).unwrap()).unwrap();
    path
}

fn options(config: &Path, out: &Path) -> Options {
    Options { config: config.into(), out: out.into(), solver: SolverOverrides::default(), threads: 2, seed: 7 }
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

#[test]
fn sweep_is_byte_identical_across_runs_and_thread_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = short_config(tmp.path());
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    commands::run_sweep(&options(&cfg, &a)).unwrap();
    let mut o = options(&cfg, &b);
    o.threads = 1;
    commands::run_sweep(&o).unwrap();
    for name in ["frf_direct.csv", "stats_direct.csv"] {
        assert_eq!(read(&a.join(name)), read(&b.join(name)), "{name}");
    }
    let frf = read(&a.join("frf_direct.csv"));
    let mut lines = frf.lines();
    assert_eq!(lines.next().unwrap(), "f,band,level,re_p,im_p,abs_db,spl_db");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 26);
    for r in rows {
        let spl: f64 = r.rsplit(',').next().unwrap().parse().unwrap();
        assert!(spl.is_finite());
    }
    assert!(!frf.contains('\r'));
}

#[test]
fn mesh_lists_only_existing_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = short_config(tmp.path());
    let m = commands::mesh(&options(&cfg, tmp.path())).unwrap();
    assert!(m.outputs.iter().all(|p| p.exists()));
    let schedule = read(&tmp.path().join("schedule.csv"));
    assert!(schedule.starts_with("band,f_lo,f_max,level,f_switch,"));
    assert_eq!(schedule.lines().count(), 3);
    assert!(tmp.path().join("manifest_mesh.json").exists());
    assert!(read(&tmp.path().join("mortar_level0.csv")).lines().count() > 1);
}

#[test]
fn assembled_operator_round_trips_through_matrix_market() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = short_config(tmp.path());
    commands::assemble(&options(&cfg, tmp.path()), &[20.0]).unwrap();
    let (nr, nc, entries) = matrix_market::parse(&read(&tmp.path().join("A_20Hz.mtx"))).unwrap();
    assert_eq!(nr, nc);
    assert!(!entries.is_empty());
    let (n, one, load) = matrix_market::parse(&read(&tmp.path().join("f_20Hz.mtx"))).unwrap();
    assert_eq!((n, one), (nr, 1));
    assert!(!load.is_empty());
}

#[test]
fn iterative_verification_passes_and_reports() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = short_config(tmp.path());
    let mut o = options(&cfg, tmp.path());
    commands::run_sweep(&o).unwrap();
    o.solver.method = Some(SolverMethod::Gasm);
    o.solver.overlap = Some(1);
    let v = commands::verify(&o).unwrap();
    assert_eq!(v.iterative.records.len(), 10);
    assert!(v.max_error <= 1e-2);
    let rows = commands::report(tmp.path()).unwrap();
    let methods: Vec<&str> = rows.iter().map(|r| r.method.as_str()).collect();
    assert_eq!(methods, ["direct", "gasm_o1"]);
    assert!(read(&tmp.path().join("report.csv")).starts_with("method,frequencies,total_time_s"));
}

#[test]
fn verify_needs_an_iterative_solver() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = short_config(tmp.path());
    let err = commands::verify(&options(&cfg, tmp.path())).unwrap_err();
    assert_eq!(err.exit_code(), EXIT_CONFIG);
}

#[test]
fn reduced_models_round_trip_and_reject_other_configs() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = short_config(tmp.path());
    let o = options(&cfg, tmp.path());
    let (_, roms) = commands::mor_build(&o).unwrap();
    let rows = commands::mor_verify(&o).unwrap();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r.error <= 1e-2));
    let (_, sweep) = commands::mor_sweep(&o).unwrap();
    assert_eq!(sweep.records.len(), 26);
    assert_eq!(sweep.seams.len(), roms.len() - 1);
    assert!(tmp.path().join("frf_mor.csv").exists());

    // a different file invalidates the stored models
    let mut text = read(&cfg);
    text.push_str("\n# edited\n");
    std::fs::write(&cfg, text).unwrap();
    assert!(matches!(commands::mor_sweep(&o), Err(RunError::Config(_))));
}

#[test]
fn failed_reduced_model_check_exits_with_verification_code() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = short_config(tmp.path());
    let o = options(&cfg, tmp.path());
    commands::mor_build(&o).unwrap();
    // the same models judged against an impossible tolerance
    let mut c = load_config(&cfg).unwrap().config;
    c.mor.tol = 1e-14;
    let text = to_toml(&c).unwrap();
    let hash = vibro::config_io::sha256_hex(text.as_bytes());
    let roms = vibro::rom_io::load_roms(&tmp.path().join(commands::ROM_FILE), None).unwrap();
    vibro::rom_io::save_roms(&tmp.path().join(commands::ROM_FILE), &hash, &roms).unwrap();
    std::fs::write(&cfg, text).unwrap();
    let err = commands::mor_verify(&o).unwrap_err();
    assert_eq!(err.exit_code(), EXIT_VERIFICATION);
}

#[test]
fn binary_maps_errors_to_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let bin = env!("CARGO_BIN_EXE_vibro");
    let missing = Command::new(bin)
        .args(["mesh", "--config", "does/not/exist.cfg", "--out"])
        .arg(tmp.path())
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(EXIT_CONFIG));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("error"));

    let bad = tmp.path().join("bad.cfg");
    std::fs::write(&bad, "[frequency]\nf_min = 1\n").unwrap();
    let out = Command::new(bin).args(["sweep", "--config"]).arg(&bad).arg("--out").arg(tmp.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_CONFIG));

    let cfg = short_config(tmp.path());
    let ok = Command::new(bin).arg("mesh").arg("--config").arg(&cfg).arg("--out").arg(tmp.path()).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
}
