//! Data bundles behind each reproduced figure. Plotting is left to external tools.

use std::f64::consts::PI;
use std::path::Path;

use crate::coeffs::{
    solve_balanced_space_domain, table1_coefficients, taylor_coefficients, FitBand,
    StencilCoefficients, DEFAULT_SAMPLES,
};
use crate::dispersion::{
    figure_angles, figure_kh_grid, mixed_error_balanced, mixed_error_nonbalanced, scan_curves,
    to_csv, DispersionPoint, Wave,
};
use crate::error::{Error, Result};
use crate::fmt::sig9;
use crate::kernel::{run_simulation, RunOptions, RunOutput, Scheme, SeismogramSet};
use crate::model::Field;

use super::config::BALANCED_LS_KH_MAX;
use super::experiments::{comparison_coefficients, homogeneous_experiment, layered_experiment};
use super::manifest::RunManifest;
use super::modelio::{write_f32, write_model, LAYERED_LABEL};

pub const FIGURE_IDS: &[&str] = &["fig1", "fig2", "fig3", "fig4", "fig6", "fig8-like", "fig9-like"];

/// Velocities and sampling of the dispersion figures.
pub const FIG_ALPHA: f64 = 2598.0;
pub const FIG_BETA: f64 = 1500.0;
pub const FIG_H: f64 = 20.0;
pub const FIG_DT: f64 = 1e-3;
pub const FIG_M: usize = 7;

/// Weights and scheme drawn in figures 1 to 3.
pub fn dispersion_figure_setup(id: &str) -> Result<(Scheme, StencilCoefficients)> {
    match id {
        "fig1" => Ok((Scheme::Balanced, taylor_coefficients(FIG_M)?)),
        "fig2" => Ok((
            Scheme::Balanced,
            solve_balanced_space_domain(FIG_M, &FitBand::space(BALANCED_LS_KH_MAX, DEFAULT_SAMPLES))?,
        )),
        "fig3" => Ok((Scheme::NonBalanced, table1_coefficients(FIG_M)?)),
        _ => Err(Error::Config(format!("{id} is not a dispersion figure"))),
    }
}

/// P and S curves at the five figure angles.
pub fn dispersion_figure(id: &str) -> Result<Vec<DispersionPoint>> {
    let (scheme, coeffs) = dispersion_figure_setup(id)?;
    let (angles, kh) = (figure_angles(), figure_kh_grid());
    let mut rows = scan_curves(&coeffs, scheme, Wave::P, &angles, &kh, FIG_ALPHA * FIG_DT / FIG_H);
    rows.extend(scan_curves(&coeffs, scheme, Wave::S, &angles, &kh, FIG_BETA * FIG_DT / FIG_H));
    Ok(rows)
}

/// Both mixed-derivative error surfaces on an `n x n` grid over `(0, pi]^2`.
pub fn mixed_error_csv(n: usize) -> Result<String> {
    let bal = taylor_coefficients(FIG_M)?;
    let nb = table1_coefficients(FIG_M)?;
    let mut out = String::from("kxh,kzh,e_balanced,e_nonbalanced\n");
    for i in 1..=n {
        let kx = PI * i as f64 / n as f64;
        for j in 1..=n {
            let kz = PI * j as f64 / n as f64;
            out.push_str(&format!(
                "{},{},{},{}\n",
                sig9(kx),
                sig9(kz),
                sig9(mixed_error_balanced(&bal, kx, kz)),
                sig9(mixed_error_nonbalanced(&nb, kx, kz))
            ));
        }
    }
    Ok(out)
}

fn write(out_dir: &Path, name: &str, text: &str, kind: &str, manifest: &mut RunManifest) -> Result<()> {
    let path = out_dir.join(name);
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    manifest.output(name, kind);
    Ok(())
}

/// Side-by-side traces: `time`, then `<label>_<ix>_<iz>` for every set and receiver index.
fn overlay_csv(sets: &[(&str, &SeismogramSet)], receivers: &[usize]) -> String {
    let (_, first) = sets[0];
    let mut out = String::from("time");
    for (label, s) in sets {
        for &r in receivers {
            let (ix, iz) = s.positions[r];
            out.push_str(&format!(",{label}_{ix}_{iz}"));
        }
    }
    out.push('\n');
    for n in 0..first.nt() {
        out.push_str(&sig9((n + 1) as f64 * first.dt));
        for (_, s) in sets {
            for &r in receivers {
                out.push(',');
                out.push_str(&sig9(s.data[r][n] as f64));
            }
        }
        out.push('\n');
    }
    out
}

fn component(out: &RunOutput, c: Field) -> &SeismogramSet {
    if out.seismograms.component == c {
        &out.seismograms
    } else {
        out.extra.iter().find(|s| s.component == c).expect("component was requested")
    }
}

fn fig6(out_dir: &Path, options: &RunOptions, manifest: &mut RunManifest) -> Result<()> {
    let opts = RunOptions {
        extra_components: vec![Field::Vx],
        ..options.clone()
    };
    // Receivers 1, 3, 5, 7, 9.
    let picks = [0, 2, 4, 6, 8];
    for m in [4, 7] {
        let mut runs = Vec::new();
        for scheme in [Scheme::Balanced, Scheme::NonBalanced] {
            let (cfg, model) = homogeneous_experiment(scheme, comparison_coefficients(scheme, m)?)?;
            let out = run_simulation(&cfg, &model, &opts)?;
            manifest.timing(&format!("fig6_{}_m{m}", scheme.name()), out.wall_seconds);
            runs.push(out);
        }
        for c in [Field::Vz, Field::Vx] {
            let csv = overlay_csv(
                &[("balanced", component(&runs[0], c)), ("non_balanced", component(&runs[1], c))],
                &picks,
            );
            write(out_dir, &format!("fig6_{c}_m{m}.csv"), &csv, "seismogram", manifest)?;
        }
    }
    Ok(())
}

/// Shot gathers of the layered model for the three operators compared in
/// figures 8 and 9: balanced M=7, non-balanced M=7 and balanced M=30.
pub fn layered_runs(options: &RunOptions) -> Result<Vec<(String, RunOutput)>> {
    let opts = RunOptions {
        extra_components: vec![Field::Txx],
        ..options.clone()
    };
    let mut runs = Vec::new();
    for (label, scheme, m) in [
        ("balanced_m7", Scheme::Balanced, 7),
        ("non_balanced_m7", Scheme::NonBalanced, 7),
        ("balanced_m30", Scheme::Balanced, 30),
    ] {
        let (cfg, model) = layered_experiment(scheme, comparison_coefficients(scheme, m)?)?;
        runs.push((label.to_string(), run_simulation(&cfg, &model, &opts)?));
    }
    Ok(runs)
}

fn layered_figure(
    id: &str,
    c: Field,
    out_dir: &Path,
    options: &RunOptions,
    manifest: &mut RunManifest,
) -> Result<()> {
    let (_, model) = layered_experiment(Scheme::Balanced, taylor_coefficients(1)?)?;
    write_model(out_dir, "layered", &model, Some(10.0), Some(LAYERED_LABEL))?;
    for f in ["layered.hdr", "layered.vp.bin", "layered.vs.bin", "layered.rho.bin"] {
        manifest.output(f, "model");
    }
    manifest.notes.push(LAYERED_LABEL.to_string());
    let runs = layered_runs(options)?;
    for (label, out) in &runs {
        manifest.timing(label, out.wall_seconds);
        let set = component(out, c);
        let name = format!("{id}_{label}_{c}.bin");
        write_f32(&out_dir.join(&name), set.data.iter().flatten().copied())?;
        manifest.output(&name, "gather");
    }
    let set = component(&runs[0].1, c);
    let hdr = format!(
        "label={LAYERED_LABEL}\ncomponent={c}\nn_receivers={}\nnt={}\ndt={}\nlayout=receiver-major f32 little-endian\nreceivers={}\n",
        set.positions.len(),
        set.nt(),
        sig9(set.dt),
        set.positions.iter().map(|(x, z)| format!("{x}:{z}")).collect::<Vec<_>>().join(",")
    );
    write(out_dir, &format!("{id}.hdr"), &hdr, "gather-header", manifest)?;
    let mid = set.positions.len() / 2;
    let sets: Vec<(&str, &SeismogramSet)> = runs.iter().map(|(l, o)| (l.as_str(), component(o, c))).collect();
    write(out_dir, &format!("{id}_trace.csv"), &overlay_csv(&sets, &[mid]), "seismogram", manifest)
}

/// Writes the data behind figure `id` into `out_dir` and returns the manifest
/// (not yet written to disk).
pub fn cmd_figures(id: &str, out_dir: &Path, options: &RunOptions) -> Result<RunManifest> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut manifest = RunManifest::new(&format!("figures {id}"));
    match id {
        "fig1" | "fig2" | "fig3" => {
            let (_, coeffs) = dispersion_figure_setup(id)?;
            write(out_dir, &format!("{id}_coeffs.txt"), &coeffs.to_text(), "coefficients", &mut manifest)?;
            write(out_dir, &format!("{id}.csv"), &to_csv(&dispersion_figure(id)?), "dispersion", &mut manifest)?;
        }
        "fig4" => write(out_dir, "fig4.csv", &mixed_error_csv(64)?, "mixed-error", &mut manifest)?,
        "fig6" => fig6(out_dir, options, &mut manifest)?,
        "fig8-like" => layered_figure("fig8_like", Field::Vz, out_dir, options, &mut manifest)?,
        "fig9-like" => layered_figure("fig9_like", Field::Txx, out_dir, options, &mut manifest)?,
        other => {
            return Err(Error::Config(format!(
                "unknown figure '{other}' (expected one of {})",
                FIGURE_IDS.join(", ")
            )))
        }
    }
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dispersion_figures_have_both_waves() {
        let rows = dispersion_figure("fig1").unwrap();
        assert_eq!(rows.len(), 2 * 5 * 512);
        assert!(rows.iter().any(|r| r.wave == Wave::S));
    }

    #[test]
    fn fig4_grid() {
        let csv = mixed_error_csv(4).unwrap();
        assert_eq!(csv.lines().count(), 17);
    }

    #[test]
    fn unknown_id() {
        let dir = tempfile::tempdir().unwrap();
        let err = cmd_figures("fig5", dir.path(), &RunOptions::serial()).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
