use std::time::Instant;

use crate::coeffs::StencilCoefficients;
use crate::error::{Error, Result};
use crate::fmt::sig9;
use crate::model::{allocate_state, ElasticModel, Field, GridGeometry, WaveState};
use crate::stability::{check_config, StabilityReport, Verdict};

use super::ftz::{enable_for_thread, FlushGuard};
use super::{inject_source, Kernel, Scheme, SourceSpec, Sponge, StepCounters};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpongeSpec {
    pub width: usize,
    pub decay: f64,
}

impl Default for SpongeSpec {
    fn default() -> Self {
        SpongeSpec {
            width: 30,
            decay: 0.015,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReceiverSpec {
    pub component: Field,
    pub positions: Vec<(usize, usize)>,
}

#[derive(Debug, Clone)]
pub struct SimulationConfig {
    pub geometry: GridGeometry,
    pub dt: f64,
    pub nt: usize,
    pub scheme: Scheme,
    pub coeffs: StencilCoefficients,
    pub source: SourceSpec,
    pub receivers: ReceiverSpec,
    pub sponge: SpongeSpec,
    /// Run even when the configuration fails the stability check.
    pub override_stability: bool,
    /// `time_index` values at which to keep a copy of the wavefield.
    pub snapshot_steps: Vec<usize>,
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        let g = self.geometry;
        g.check_operator(self.coeffs.m())?;
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Config(format!("dt must be positive, got {}", self.dt)));
        }
        self.source.validate()?;
        // Sponge parameters are checked by construction.
        Sponge::new(g.nx, g.nz, self.sponge.width, self.sponge.decay)?;
        let margin = self.sponge.width.max(self.coeffs.m());
        let inside = |ix: usize, iz: usize| {
            ix >= margin && iz >= margin && ix + margin < g.nx && iz + margin < g.nz
        };
        if !inside(self.source.ix, self.source.iz) {
            return Err(Error::Config(format!(
                "source ({}, {}) must lie inside the non-sponge interior (margin {margin})",
                self.source.ix, self.source.iz
            )));
        }
        for &(ix, iz) in &self.receivers.positions {
            if !inside(ix, iz) {
                return Err(Error::Config(format!(
                    "receiver ({ix}, {iz}) must lie inside the non-sponge interior (margin {margin})"
                )));
            }
        }
        Ok(())
    }
}

/// Execution knobs that do not change the numerical result.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// 1 runs on the calling thread; 0 uses rayon's default pool size.
    pub threads: usize,
    /// Components recorded in addition to the configured one.
    pub extra_components: Vec<Field>,
    /// Record `max |field|` after every step.
    pub track_norms: bool,
}

impl RunOptions {
    pub fn serial() -> Self {
        RunOptions {
            threads: 1,
            ..Default::default()
        }
    }
}

/// Receiver traces of one component; `data[r][n]` is receiver `r` after step `n + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeismogramSet {
    pub component: Field,
    pub positions: Vec<(usize, usize)>,
    pub data: Vec<Vec<f32>>,
    pub dt: f64,
}

impl SeismogramSet {
    fn new(component: Field, positions: Vec<(usize, usize)>, dt: f64, nt: usize) -> Self {
        let data = positions.iter().map(|_| Vec::with_capacity(nt)).collect();
        SeismogramSet {
            component,
            positions,
            data,
            dt,
        }
    }

    fn record(&mut self, state: &WaveState) {
        let field = state.field(self.component);
        let nx = state.geometry.nx;
        for (trace, &(ix, iz)) in self.data.iter_mut().zip(&self.positions) {
            trace.push(field[iz * nx + ix]);
        }
    }

    pub fn nt(&self) -> usize {
        self.data.first().map_or(0, Vec::len)
    }

    /// CSV with a `time` column followed by one column per receiver.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("time");
        for &(ix, iz) in &self.positions {
            out.push_str(&format!(",{}_{ix}_{iz}", self.component));
        }
        out.push('\n');
        for n in 0..self.nt() {
            out.push_str(&sig9((n + 1) as f64 * self.dt));
            for trace in &self.data {
                out.push(',');
                out.push_str(&sig9(trace[n] as f64));
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct Snapshot {
    pub step: usize,
    pub state: WaveState,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub seismograms: SeismogramSet,
    pub extra: Vec<SeismogramSet>,
    pub snapshots: Vec<Snapshot>,
    /// `max |field|` after each step when tracked.
    pub norm_history: Vec<f32>,
    pub counters: StepCounters,
    pub stability: StabilityReport,
    pub wall_seconds: f64,
    /// First checked step with a non-finite value, when the run was allowed to continue.
    pub blowup_step: Option<usize>,
    pub final_state: WaveState,
}

/// Steps between finiteness checks when no norm history is tracked.
const CHECK_INTERVAL: usize = 10;

/// Runs `config.nt` steps: scheme step, source injection, sponge, receiver sampling.
pub fn run_simulation(
    config: &SimulationConfig,
    model: &ElasticModel,
    options: &RunOptions,
) -> Result<RunOutput> {
    config.validate()?;
    let g = config.geometry;
    if model.shape() != (g.nx, g.nz) {
        return Err(Error::Config(format!(
            "model is {:?} but the configured grid is {}x{}",
            model.shape(),
            g.nx,
            g.nz
        )));
    }
    let stability = check_config(config, model)?;
    if stability.verdict == Verdict::Unstable && !config.override_stability {
        return Err(Error::StabilityRefused {
            r_actual: stability.r_actual,
            bound: stability.bound_s,
        });
    }

    let mut kernel = Kernel::new(config.scheme, &config.coeffs, model, config.dt, g.h)?;
    let sponge = Sponge::new(g.nx, g.nz, config.sponge.width, config.sponge.decay)?;
    let mut state = allocate_state(g, config.coeffs.m())?;
    let mut seis = SeismogramSet::new(
        config.receivers.component,
        config.receivers.positions.clone(),
        config.dt,
        config.nt,
    );
    let mut extra: Vec<SeismogramSet> = options
        .extra_components
        .iter()
        .map(|&c| SeismogramSet::new(c, config.receivers.positions.clone(), config.dt, config.nt))
        .collect();
    let track = options.track_norms || config.override_stability;
    let mut norm_history = Vec::with_capacity(if track { config.nt } else { 0 });
    let mut snapshots = Vec::new();
    let mut blowup_step = None;

    let pool = if options.threads == 1 {
        None
    } else {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(options.threads)
                .start_handler(|_| enable_for_thread())
                .build()
                .map_err(|e| Error::Config(format!("thread pool: {e}")))?,
        )
    };

    let _flush = FlushGuard::new();
    let start = Instant::now();
    for n in 0..config.nt {
        match &pool {
            Some(p) => p.install(|| kernel.step_parallel(&mut state)),
            None => kernel.step(&mut state),
        }
        inject_source(&mut state, &config.source, n as f64 * config.dt, config.dt)?;
        sponge.apply(&mut state);
        seis.record(&state);
        for s in &mut extra {
            s.record(&state);
        }
        let step = n + 1;
        if track {
            let norm = state.max_abs();
            norm_history.push(norm);
            if blowup_step.is_none() && !norm.is_finite() {
                blowup_step = Some(step);
            }
        } else if (step % CHECK_INTERVAL == 0 || step == config.nt) && !state.is_finite() {
            blowup_step = Some(step);
        }
        if blowup_step.is_some() && !config.override_stability {
            return Err(Error::NumericalAbort { step });
        }
        if config.snapshot_steps.contains(&step) {
            snapshots.push(Snapshot {
                step,
                state: state.clone(),
            });
        }
    }
    let wall_seconds = start.elapsed().as_secs_f64();

    Ok(RunOutput {
        seismograms: seis,
        extra,
        snapshots,
        norm_history,
        counters: kernel.counters(),
        stability,
        wall_seconds,
        blowup_step,
        final_state: state,
    })
}
