//! The work behind each subcommand, callable without the argument parser.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use vibro_core::config::{resolve_groups, SolverMethod};
use vibro_core::mor::{build_local_roms, relative_error, rom_sweep, verification_points, FullOrderModel, ReducedModel};
use vibro_core::solvers::{Clock, SolverChoice, SweepOptions, SweepResult};

use crate::clock::StdClock;
use crate::config_io::{load_config, LoadedConfig};
use crate::error::{Result, RunError};
use crate::manifest::{read_summaries, write_summary, RunManifest, RunSummary};
use crate::matrix_market;
use crate::mesh_export;
use crate::model::{sampled_points, solver_choice, sweep, Model};
use crate::output::{self, RomErrorRow};
use crate::rom_io;

/// Largest relative SPL error accepted by `verify`.
pub const VERIFY_TOLERANCE: f64 = 1e-2;
/// Frequencies compared by `verify`.
pub const VERIFY_SAMPLES: usize = 10;
pub const ROM_FILE: &str = "roms.json";

/// Command-line overrides of the `[solver]` section.
#[derive(Clone, Debug, Default)]
pub struct SolverOverrides {
    pub method: Option<SolverMethod>,
    /// groups of domain ids
    pub groups: Option<Vec<Vec<String>>>,
    pub overlap: Option<usize>,
    pub atol: Option<f64>,
    pub max_it: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct Options {
    pub config: PathBuf,
    pub out: PathBuf,
    pub solver: SolverOverrides,
    pub threads: usize,
    pub seed: u64,
}

/// A loaded, overridden and assembled model plus the run bookkeeping.
pub struct Session {
    pub model: Model,
    pub hash: String,
    pub manifest: RunManifest,
    pub clock: StdClock,
    out: PathBuf,
}

impl Session {
    pub fn open(command: &str, opts: &Options) -> Result<Self> {
        let clock = StdClock::new();
        let LoadedConfig { mut config, hash } = load_config(&opts.config)?;
        let o = &opts.solver;
        if let Some(m) = o.method {
            config.solver.method = m;
        }
        if let Some(g) = &o.groups {
            resolve_groups(&config, g).map_err(|e| RunError::Config(e.to_string()))?;
            config.solver.groups = g.clone();
        }
        if let Some(k) = o.overlap {
            config.solver.overlap = k;
        }
        if let Some(a) = o.atol {
            config.solver.atol = a;
        }
        if let Some(n) = o.max_it {
            config.solver.max_it = n;
        }
        config.validate().map_err(|e| RunError::Config(e.to_string()))?;
        std::fs::create_dir_all(&opts.out).map_err(|e| RunError::io(&opts.out, e))?;
        let model = Model::build(config)?;
        let manifest = RunManifest::new(command, &model, &hash, opts.seed, opts.threads);
        Ok(Self { model, hash, manifest, clock, out: opts.out.clone() })
    }

    pub fn path(&mut self, name: &str) -> PathBuf {
        let p = self.out.join(name);
        self.manifest.outputs.push(p.clone());
        p
    }

    pub fn finish(mut self) -> Result<RunManifest> {
        self.manifest.wall_time_s = self.clock.now();
        let name = format!("manifest_{}.json", self.manifest.command.replace(' ', "_"));
        self.manifest.write(&self.out.join(name))?;
        Ok(self.manifest)
    }
}

/// Label of a solver setting in file names and reports.
pub fn method_label(choice: &SolverChoice) -> String {
    match choice {
        SolverChoice::Direct => "direct".into(),
        SolverChoice::Iterative(it) => match it.method {
            SolverMethod::Bjacobi => "bjacobi".into(),
            SolverMethod::Gasm => format!("gasm_o{}", it.overlap),
            SolverMethod::Direct => "direct".into(),
        },
    }
}

fn summary(method: String, sweep: &SweepResult, total: f64) -> RunSummary {
    let n = sweep.records.len().max(1);
    RunSummary {
        method,
        frequencies: sweep.records.len(),
        total_time_s: total,
        solve_time_per_f_s: sweep.records.iter().map(|r| r.stats.factor_time + r.stats.solve_time).sum::<f64>() / n as f64,
        memory_bytes: sweep.records.iter().map(|r| r.stats.factor_memory).max().unwrap_or(0),
        max_relative_error: sweep.max_relative_error(),
    }
}

/// `mesh`: schedule, wavelength curves, mesh dumps and mortar audit files.
pub fn mesh(opts: &Options) -> Result<RunManifest> {
    let mut s = Session::open("mesh", opts)?;
    let p = s.path("schedule.csv");
    output::write_schedule(&p, &s.model)?;
    let p = s.path("wavelength.csv");
    output::write_wavelengths(&p, &s.model.config, &s.model.grid())?;
    for l in 0..s.model.systems.len() {
        let p = s.path(&format!("mesh_level{l}.txt"));
        mesh_export::write_mesh(&p, &s.model.config, &s.model.discretisations[l])?;
        let sys = &s.model.systems[l];
        let names: Vec<(String, &vibro_core::mortar::MortarInterface)> = sys
            .couplings
            .iter()
            .map(|c| {
                let d = &s.model.config.domains;
                (format!("{}-{}", d[c.structure].id, d[c.fluid].id), &c.interface)
            })
            .collect();
        let p = s.out.join(format!("mortar_level{l}.csv"));
        mesh_export::write_mortar_debug(&p, &names)?;
        s.manifest.outputs.push(p);
    }
    s.finish()
}

/// `assemble`: Matrix Market dumps of `A(f)` and `f(f)`.
pub fn assemble(opts: &Options, freqs: &[f64]) -> Result<RunManifest> {
    let mut s = Session::open("assemble", opts)?;
    let freqs = if freqs.is_empty() { vec![s.model.config.frequency.f_min] } else { freqs.to_vec() };
    for f in freqs {
        let (_, sys) = s.model.system_at(f);
        let a = sys.operator(f)?;
        let b = sys.load_vector(f);
        let pa = s.path(&format!("A_{f}Hz.mtx"));
        matrix_market::write_matrix(&pa, &a)?;
        let pb = s.path(&format!("f_{f}Hz.mtx"));
        matrix_market::write_vector(&pb, &b)?;
    }
    s.finish()
}

/// `sweep`: FRF, statistics and timings over the whole grid.
pub fn run_sweep(opts: &Options) -> Result<(RunManifest, SweepResult)> {
    let mut s = Session::open("sweep", opts)?;
    let choice = solver_choice(&s.model.config)?;
    let label = method_label(&choice);
    let t0 = s.clock.now();
    let res = sweep(&s.model, &s.model.grid(), &choice, &SweepOptions::default(), opts.threads, &s.clock)?;
    let total = s.clock.now() - t0;
    let p = s.path(&format!("frf_{label}.csv"));
    output::write_frf(&p, &res)?;
    let p = s.path(&format!("stats_{label}.csv"));
    output::write_stats(&p, &res)?;
    let p = s.path(&format!("timings_{label}.csv"));
    output::write_timings(&p, &res)?;
    let mut sum = summary(label, &res, total);
    if sum.max_relative_error.is_none() {
        // keep the error measured by an earlier `verify`
        sum.max_relative_error = read_summaries(&s.out)?.into_iter().find(|r| r.method == sum.method).and_then(|r| r.max_relative_error);
    }
    let p = write_summary(&s.out, &sum)?;
    s.manifest.outputs.push(p);
    if let Some(r) = res.records.iter().find(|r| !r.spl.is_finite()) {
        return Err(RunError::Verification(format!("non-finite SPL at {} Hz", r.f)));
    }
    Ok((s.finish()?, res))
}

/// Outcome of `verify`.
#[derive(Clone, Debug)]
pub struct Verification {
    pub reference: SweepResult,
    pub iterative: SweepResult,
    pub max_error: f64,
    pub rom_errors: Option<Vec<RomErrorRow>>,
}

/// `verify`: iterative against direct SPL at sampled frequencies, and
/// reduced models against full solves when a model file is present.
pub fn verify(opts: &Options) -> Result<Verification> {
    let mut s = Session::open("verify", opts)?;
    let choice = solver_choice(&s.model.config)?;
    if matches!(choice, SolverChoice::Direct) {
        return Err(RunError::Config("verify needs an iterative solver (--solver bjacobi|gasm)".into()));
    }
    let label = method_label(&choice);
    let grid = sampled_points(&s.model.grid(), VERIFY_SAMPLES);
    let reference = sweep(&s.model, &grid, &SolverChoice::Direct, &SweepOptions::default(), opts.threads, &s.clock)?;
    let t1 = s.clock.now();
    // sampled frequencies are far apart, so no warm start across them
    let cold = match choice {
        SolverChoice::Iterative(mut it) => {
            it.warm_start = false;
            SolverChoice::Iterative(it)
        }
        d => d,
    };
    let mut iterative = sweep(&s.model, &grid, &cold, &SweepOptions::default(), opts.threads, &s.clock)?;
    let t2 = s.clock.now();
    for (it, r) in iterative.records.iter_mut().zip(&reference.records) {
        it.stats.relative_error = Some(((it.spl - r.spl) / r.spl).abs());
    }
    let p = s.path(&format!("verify_{label}.csv"));
    output::write_solver_errors(&p, &reference, &iterative)?;
    let p = s.path(&format!("stats_verify_{label}.csv"));
    output::write_stats(&p, &iterative)?;
    let p = write_summary(&s.out, &summary(label, &iterative, t2 - t1))?;
    s.manifest.outputs.push(p);
    let max_error = iterative.max_relative_error().unwrap_or(0.0);

    let rom_path = s.out.join(ROM_FILE);
    let rom_errors = if rom_path.exists() {
        let roms = rom_io::load_roms(&rom_path, Some(&s.hash))?;
        let rows = rom_verification(&s.model, &roms)?;
        let p = s.path("rom_errors.csv");
        output::write_rom_errors(&p, &rows)?;
        Some(rows)
    } else {
        None
    };
    let tol = s.model.config.mor.tol;
    s.finish()?;
    if max_error > VERIFY_TOLERANCE || iterative.records.iter().any(|r| !r.stats.converged) {
        return Err(RunError::Verification(format!(
            "max SPL relative error {max_error:.3e} (limit {VERIFY_TOLERANCE:e}) or unconverged solves"
        )));
    }
    if let Some(rows) = &rom_errors {
        check_rom_rows(rows, tol)?;
    }
    Ok(Verification { reference, iterative, max_error, rom_errors })
}

fn check_rom_rows(rows: &[RomErrorRow], tol: f64) -> Result<()> {
    match rows.iter().max_by(|a, b| a.error.total_cmp(&b.error)) {
        Some(w) if w.error > tol => Err(RunError::Verification(format!(
            "reduced model error {:.3e} at {} Hz exceeds {tol:e}",
            w.error, w.f
        ))),
        _ => Ok(()),
    }
}

/// Full-solve check of every window at the verification frequencies, which
/// are disjoint from the greedy candidates.
pub fn rom_verification(model: &Model, roms: &[ReducedModel]) -> Result<Vec<RomErrorRow>> {
    let grid = model.grid();
    let stride = model.config.mor.candidate_stride;
    let mut foms: BTreeMap<usize, FullOrderModel> = BTreeMap::new();
    let mut rows = Vec::new();
    for (k, rom) in roms.iter().enumerate() {
        if !foms.contains_key(&rom.level) {
            foms.insert(rom.level, FullOrderModel::new(&model.systems[rom.level], rom.level)?);
        }
        let fom = &foms[&rom.level];
        let mut freqs = verification_points(&grid, rom.window, stride);
        // a shared edge belongs to the lower window
        freqs.retain(|&f| roms.iter().position(|r| f >= r.window[0] - 1e-9 && f <= r.window[1] + 1e-9) == Some(k));
        for f in freqs {
            let y = fom.response(f)?;
            let yr = rom.response(f)?;
            rows.push(RomErrorRow {
                f,
                window: k,
                error: relative_error(&y, &yr).value,
                spl_fom: vibro_core::math::spl(&y),
                spl_rom: vibro_core::math::spl(&yr),
            });
        }
    }
    Ok(rows)
}

/// `mor build`: greedy local reduced models over the frequency plan.
pub fn mor_build(opts: &Options) -> Result<(RunManifest, Vec<ReducedModel>)> {
    let mut s = Session::open("mor build", opts)?;
    let t0 = s.clock.now();
    let roms = build_local_roms(&s.model.systems, &s.model.schedule.band_level, &s.model.config.frequency, &s.model.config.mor)?;
    let t1 = s.clock.now();
    let p = s.path(ROM_FILE);
    rom_io::save_roms(&p, &s.hash, &roms)?;
    let p = s.path("rom_windows.csv");
    output::write_rom_windows(&p, &roms)?;
    let p = s.path("timings_mor_build.csv");
    output::write_rows(&p, &["stage", "time_s"], [vec!["build".to_string(), format!("{}", t1 - t0)]])?;
    Ok((s.finish()?, roms))
}

/// `mor sweep`: reduced-model FRF over the whole grid.
pub fn mor_sweep(opts: &Options) -> Result<(RunManifest, vibro_core::mor::RomSweep)> {
    let mut s = Session::open("mor sweep", opts)?;
    let roms = rom_io::load_roms(&s.out.join(ROM_FILE), Some(&s.hash))?;
    let freqs: Vec<f64> = s.model.grid().iter().map(|p| p.f).collect();
    let t0 = s.clock.now();
    let res = rom_sweep(&roms, &freqs, &s.clock)?;
    let total = s.clock.now() - t0;
    let p = s.path("frf_mor.csv");
    output::write_rom_frf(&p, &res)?;
    let p = s.path("seams_mor.csv");
    output::write_seams(&p, &res)?;
    let p = s.path("timings_mor.csv");
    output::write_rom_timings(&p, &res)?;
    let memory = roms.iter().map(|r| r.terms.len() * r.dim() * r.dim() * 16).max().unwrap_or(0);
    let n = res.records.len().max(1) as f64;
    let p = write_summary(
        &s.out,
        &RunSummary {
            method: "mor".into(),
            frequencies: res.records.len(),
            total_time_s: total,
            solve_time_per_f_s: res.records.iter().map(|r| r.solve_time).sum::<f64>() / n,
            memory_bytes: memory,
            max_relative_error: read_rom_error(&s.out),
        },
    )?;
    s.manifest.outputs.push(p);
    Ok((s.finish()?, res))
}

fn read_rom_error(dir: &Path) -> Option<f64> {
    let mut r = csv::Reader::from_path(dir.join("rom_errors.csv")).ok()?;
    r.records().filter_map(|x| x.ok()?.get(2)?.parse::<f64>().ok()).reduce(f64::max)
}

/// `mor verify`: reduced models against full solves on the verification grid.
pub fn mor_verify(opts: &Options) -> Result<Vec<RomErrorRow>> {
    let mut s = Session::open("mor verify", opts)?;
    let roms = rom_io::load_roms(&s.out.join(ROM_FILE), Some(&s.hash))?;
    let rows = rom_verification(&s.model, &roms)?;
    let p = s.path("rom_errors.csv");
    output::write_rom_errors(&p, &rows)?;
    let tol = s.model.config.mor.tol;
    s.finish()?;
    check_rom_rows(&rows, tol)?;
    Ok(rows)
}

/// `report`: one row per solver run found in the output directory.
pub fn report(out: &Path) -> Result<Vec<crate::manifest::RunSummary>> {
    let rows = read_summaries(out)?;
    if rows.is_empty() {
        return Err(RunError::Config(format!("no run summaries in {}", out.display())));
    }
    output::write_rows(
        &out.join("report.csv"),
        &["method", "frequencies", "total_time_s", "solve_time_per_f_s", "memory_bytes", "max_relative_error"],
        rows.iter().map(|r| {
            vec![
                r.method.clone(),
                r.frequencies.to_string(),
                format!("{}", r.total_time_s),
                format!("{}", r.solve_time_per_f_s),
                r.memory_bytes.to_string(),
                r.max_relative_error.map(|e| format!("{e}")).unwrap_or_default(),
            ]
        }),
    )?;
    Ok(rows)
}
