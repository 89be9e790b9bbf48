//! Command-line front end. Every subcommand writes its artifacts and a
//! `manifest.txt` into `--out`.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::coeffs::{
    calibrate_to_table1, solve_balanced_space_domain, solve_space_domain,
    solve_time_space_domain, table1_coefficients, taylor_coefficients, FitBand,
    StencilCoefficients, DEFAULT_SAMPLES,
};
use crate::dispersion::{figure_angles, figure_kh_grid, scan_curves, to_csv, Wave};
use crate::error::{Error, Result};
use crate::fmt::sig9;
use crate::kernel::{run_simulation, RunOptions, Scheme};
use crate::model::ElasticModel;
use crate::stability::check_config;

use super::bench::cmd_bench;
use super::config::{load_config, LoadedConfig, BALANCED_LS_KH_MAX};
use super::experiments::bench_reference;
use super::figures::{cmd_figures, FIGURE_IDS};
use super::manifest::RunManifest;
use super::modelio::{
    homogeneous_experiment_model, layered_miniature, load_model, write_f32, write_model,
    write_snapshot, LAYERED_LABEL,
};

#[derive(Debug, Parser)]
#[command(name = "sgfd", version, about = "Staggered-grid FD workbench for 2D elastic waves")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Simulation configuration file (key=value).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Run even if the stability check fails.
    #[arg(long, global = true)]
    pub override_stability: bool,
    /// Worker threads; 1 is single-threaded, 0 uses every core.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
    /// Reserved; no computation is random.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum CoeffKind {
    Taylor,
    Table1,
    SpaceLs,
    TimeSpaceLs,
    BalancedLs,
    /// Space-domain fit with the band calibrated against Table 1.
    Calibrated,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SchemeArg {
    Balanced,
    NonBalanced,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Balanced => Scheme::Balanced,
            SchemeArg::NonBalanced => Scheme::NonBalanced,
        }
    }
}

#[derive(Debug, Args)]
pub struct CoeffArgs {
    #[arg(long, value_enum, default_value = "table1")]
    pub kind: CoeffKind,
    #[arg(long, default_value_t = 7)]
    pub m: usize,
    /// Band edge for least-squares kinds (radians).
    #[arg(long)]
    pub kh_max: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    pub samples: usize,
    /// Courant number for time-space fits.
    #[arg(long)]
    pub courant: Option<f64>,
    /// Comma-separated angles in radians for time-space fits.
    #[arg(long, value_delimiter = ',', default_values_t = [0.0, std::f64::consts::FRAC_PI_8, std::f64::consts::FRAC_PI_4])]
    pub angles: Vec<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve or export stencil weights.
    Coeffs(CoeffArgs),
    /// Dispersion curves over the figure angles and kh grid.
    Dispersion {
        #[command(flatten)]
        coeffs: CoeffArgs,
        #[arg(long, value_enum, default_value = "non-balanced")]
        scheme: SchemeArg,
        #[arg(long, default_value_t = 2598.0)]
        alpha: f64,
        #[arg(long, default_value_t = 1500.0)]
        beta: f64,
        #[arg(long, default_value_t = 20.0)]
        h: f64,
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
    },
    /// Stability report for --config.
    Stability,
    /// Run the simulation described by --config.
    Run,
    /// Time both schemes on --config, or on the desk-scale reference model.
    Bench {
        #[arg(long, default_value_t = 5)]
        repetitions: usize,
    },
    /// Data for one figure, or `all`.
    Figures { id: String },
    /// Write a synthetic model.
    Genmodel {
        #[arg(value_enum)]
        kind: ModelKind,
        #[arg(long, default_value_t = 301)]
        nx: usize,
        #[arg(long, default_value_t = 301)]
        nz: usize,
        #[arg(long, default_value_t = 10.0)]
        h: f64,
        #[arg(long, default_value_t = 1732.1)]
        vp: f64,
        #[arg(long, default_value_t = 1000.0)]
        vs: f64,
        #[arg(long, default_value_t = 1000.0)]
        rho: f64,
        #[arg(long, default_value = "model")]
        name: String,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModelKind {
    Homogeneous,
    Layered,
}

fn solve(args: &CoeffArgs) -> Result<(StencilCoefficients, Option<String>)> {
    let m = args.m;
    let band = |default: f64| FitBand::space(args.kh_max.unwrap_or(default), args.samples.max(4 * m));
    Ok(match args.kind {
        CoeffKind::Taylor => (taylor_coefficients(m)?, None),
        CoeffKind::Table1 => (table1_coefficients(m)?, None),
        CoeffKind::SpaceLs => (solve_space_domain(m, &band(FitBand::default_for(m).kh_max))?, None),
        CoeffKind::BalancedLs => (solve_balanced_space_domain(m, &band(BALANCED_LS_KH_MAX))?, None),
        CoeffKind::TimeSpaceLs => {
            let r = args
                .courant
                .ok_or_else(|| Error::Config("time-space-ls needs --courant".into()))?;
            let b = band(FitBand::default_for(m).kh_max);
            let ts = FitBand::time_space(b.kh_max, b.n_samples, args.angles.clone(), r);
            (solve_time_space_domain(m, &ts)?, None)
        }
        CoeffKind::Calibrated => {
            let cal = calibrate_to_table1(m)?;
            let note = format!(
                "calibrated kh_max={} max_deviation={}",
                sig9(cal.kh_max),
                sig9(cal.max_deviation)
            );
            (cal.coeffs, Some(note))
        }
    })
}

fn write_file(out: &Path, name: &str, text: &str, kind: &str, manifest: &mut RunManifest) -> Result<()> {
    let path = out.join(name);
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    manifest.output(name, kind);
    Ok(())
}

fn require_config(global: &GlobalArgs) -> Result<LoadedConfig> {
    let path = global
        .config
        .as_ref()
        .ok_or_else(|| Error::Config("this subcommand needs --config".into()))?;
    let mut cfg = load_config(path)?;
    if global.override_stability {
        cfg.sim.override_stability = true;
    }
    Ok(cfg)
}

/// The configured model, or the homogeneous experiment model on the configured grid.
fn config_model(cfg: &LoadedConfig, manifest: &mut RunManifest) -> Result<ElasticModel> {
    let g = cfg.sim.geometry;
    match &cfg.model_header {
        Some(p) => {
            let file = load_model(p)?;
            if let Some(h) = file.h {
                if h != g.h {
                    return Err(Error::Config(format!(
                        "model header has h={h} but the config has grid.h={}",
                        g.h
                    )));
                }
            }
            if let Some(label) = file.label {
                manifest.notes.push(format!("model: {label}"));
            }
            Ok(file.model)
        }
        None => {
            manifest
                .notes
                .push("model: homogeneous vp=1732.1 vs=1000 rho=1000 (no model.header)".into());
            homogeneous_experiment_model(g.nx, g.nz)
        }
    }
}

fn options(global: &GlobalArgs) -> RunOptions {
    RunOptions {
        threads: global.threads,
        ..Default::default()
    }
}

/// Executes one parsed command line.
pub fn execute(cli: &Cli) -> Result<RunManifest> {
    let g = &cli.global;
    let out = g.out.as_path();
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let mut manifest = match &cli.command {
        Command::Coeffs(args) => {
            let mut manifest = RunManifest::new("coeffs");
            let (c, note) = solve(args)?;
            manifest.notes.extend(note);
            write_file(out, "coeffs.txt", &c.to_text(), "coefficients", &mut manifest)?;
            print!("{}", c.to_text());
            manifest
        }
        Command::Dispersion {
            coeffs,
            scheme,
            alpha,
            beta,
            h,
            dt,
        } => {
            let mut manifest = RunManifest::new("dispersion");
            let (c, note) = solve(coeffs)?;
            manifest.notes.extend(note);
            let scheme = Scheme::from(*scheme);
            let (angles, kh) = (figure_angles(), figure_kh_grid());
            let mut rows = scan_curves(&c, scheme, Wave::P, &angles, &kh, alpha * dt / h);
            rows.extend(scan_curves(&c, scheme, Wave::S, &angles, &kh, beta * dt / h));
            write_file(out, "dispersion.csv", &to_csv(&rows), "dispersion", &mut manifest)?;
            write_file(out, "coeffs.txt", &c.to_text(), "coefficients", &mut manifest)?;
            manifest
        }
        Command::Stability => {
            let cfg = require_config(g)?;
            let mut manifest = RunManifest::new("stability");
            manifest.digest = Some(cfg.digest());
            let model = config_model(&cfg, &mut manifest)?;
            let report = check_config(&cfg.sim, &model)?;
            write_file(out, "stability.txt", &report.to_text(), "stability", &mut manifest)?;
            print!("{}", report.to_text());
            manifest
        }
        Command::Run => cmd_run(g)?,
        Command::Bench { repetitions } => {
            let mut manifest = RunManifest::new("bench");
            let (sim, model) = match &g.config {
                Some(_) => {
                    let cfg = require_config(g)?;
                    manifest.digest = Some(cfg.digest());
                    let model = config_model(&cfg, &mut manifest)?;
                    (cfg.sim, model)
                }
                None => {
                    manifest.notes.push("desk-scale reference: homogeneous 400x400, 300 steps".into());
                    bench_reference()?
                }
            };
            let report = cmd_bench(&sim, &model, *repetitions, &options(g))?;
            write_file(out, "bench.txt", &report.to_text(), "bench", &mut manifest)?;
            manifest.counters.push(("balanced_terms".into(), report.balanced_terms));
            manifest.counters.push(("nonbalanced_terms".into(), report.nonbalanced_terms));
            print!("{}", report.to_text());
            manifest
        }
        Command::Figures { id } => {
            if id == "all" {
                let mut all = RunManifest::new("figures all");
                for id in FIGURE_IDS {
                    let m = cmd_figures(id, out, &options(g))?;
                    all.outputs.extend(m.outputs);
                    all.timings.extend(m.timings);
                    all.notes.extend(m.notes);
                }
                all
            } else {
                cmd_figures(id, out, &options(g))?
            }
        }
        Command::Genmodel {
            kind,
            nx,
            nz,
            h,
            vp,
            vs,
            rho,
            name,
        } => {
            let mut manifest = RunManifest::new("genmodel");
            let (model, label) = match kind {
                ModelKind::Homogeneous => (ElasticModel::homogeneous(*nx, *nz, *vp, *vs, *rho)?, None),
                ModelKind::Layered => (layered_miniature(*nx, *nz)?, Some(LAYERED_LABEL)),
            };
            write_model(out, name, &model, Some(*h), label)?;
            manifest.output(format!("{name}.hdr"), "model");
            for key in ["vp", "vs", "rho"] {
                manifest.output(format!("{name}.{key}.bin"), "model");
            }
            manifest
        }
    };
    if let Some(seed) = g.seed {
        manifest.notes.push(format!("seed={seed} (unused)"));
    }
    manifest.write(out)?;
    Ok(manifest)
}

fn cmd_run(g: &GlobalArgs) -> Result<RunManifest> {
    let out = g.out.as_path();
    let cfg = require_config(g)?;
    let mut manifest = RunManifest::new("run");
    manifest.digest = Some(cfg.digest());
    let start = Instant::now();
    let model = config_model(&cfg, &mut manifest)?;
    manifest.timing("setup", start.elapsed().as_secs_f64());

    let result = run_simulation(&cfg.sim, &model, &options(g));
    let run = match result {
        Ok(run) => run,
        Err(e @ Error::StabilityRefused { .. }) => {
            let report = check_config(&cfg.sim, &model)?;
            eprint!("{}", report.to_text());
            return Err(e);
        }
        Err(e) => return Err(e),
    };
    manifest.timing("steps", run.wall_seconds);
    manifest.counters.push(("steps".into(), run.counters.steps));
    manifest.counters.push(("weighted_terms".into(), run.counters.weighted_terms));

    write_file(out, "stability.txt", &run.stability.to_text(), "stability", &mut manifest)?;
    let seis = &run.seismograms;
    write_file(out, &format!("seismogram_{}.csv", seis.component), &seis.to_csv(), "seismogram", &mut manifest)?;
    for snap in &run.snapshots {
        for p in write_snapshot(out, snap, cfg.sim.dt)? {
            let name = p.file_name().expect("file name").to_string_lossy().into_owned();
            manifest.output(name, "snapshot");
        }
    }
    if !run.norm_history.is_empty() {
        write_f32(&out.join("norms.bin"), run.norm_history.iter().copied())?;
        manifest.output("norms.bin", "norm-history");
    }
    manifest.write(out)?;
    if let Some(step) = run.blowup_step {
        return Err(Error::NumericalAbort { step });
    }
    Ok(manifest)
}

/// Parses `args`, runs, reports errors on stderr and returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(_) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
