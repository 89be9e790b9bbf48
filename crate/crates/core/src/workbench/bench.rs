use crate::error::{Error, Result};
use crate::fmt::sig9;
use crate::kernel::{run_simulation, RunOptions, Scheme, SimulationConfig};
use crate::model::ElasticModel;

#[derive(Debug, Clone)]
pub struct BenchReport {
    pub m: usize,
    pub nt: usize,
    /// Wall seconds per step, one entry per repetition.
    pub balanced: Vec<f64>,
    pub nonbalanced: Vec<f64>,
    pub balanced_terms: u64,
    pub nonbalanced_terms: u64,
}

fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

impl BenchReport {
    pub fn median_balanced(&self) -> f64 {
        median(&self.balanced)
    }

    pub fn median_nonbalanced(&self) -> f64 {
        median(&self.nonbalanced)
    }

    /// Non-balanced over balanced operator terms; exactly `(M + 1) / (2M)`.
    pub fn counter_ratio(&self) -> f64 {
        self.nonbalanced_terms as f64 / self.balanced_terms as f64
    }

    pub fn model_ratio(&self) -> f64 {
        (self.m + 1) as f64 / (2 * self.m) as f64
    }

    pub fn wall_ratio(&self) -> f64 {
        self.median_nonbalanced() / self.median_balanced()
    }

    /// Smallest and largest ratio over paired repetitions.
    pub fn wall_ratio_range(&self) -> (f64, f64) {
        self.balanced
            .iter()
            .zip(&self.nonbalanced)
            .map(|(b, n)| n / b)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r), hi.max(r)))
    }

    pub fn to_text(&self) -> String {
        let (lo, hi) = self.wall_ratio_range();
        let list = |v: &[f64]| v.iter().map(|&x| sig9(x)).collect::<Vec<_>>().join(",");
        format!(
            "M={}\nnt={}\nrepetitions={}\nbalanced_seconds_per_step={}\nnonbalanced_seconds_per_step={}\n\
             balanced_median={}\nnonbalanced_median={}\ncounter_ratio={}\nmodel_ratio={}\n\
             wall_ratio={}\nwall_ratio_min={}\nwall_ratio_max={}\n",
            self.m,
            self.nt,
            self.balanced.len(),
            list(&self.balanced),
            list(&self.nonbalanced),
            sig9(self.median_balanced()),
            sig9(self.median_nonbalanced()),
            sig9(self.counter_ratio()),
            sig9(self.model_ratio()),
            sig9(self.wall_ratio()),
            sig9(lo),
            sig9(hi),
        )
    }
}

/// Times both schemes on the same grid, model and weights. Repetitions alternate
/// between schemes so slow drift in machine load affects both alike.
pub fn cmd_bench(
    config: &SimulationConfig,
    model: &ElasticModel,
    repetitions: usize,
    options: &RunOptions,
) -> Result<BenchReport> {
    if repetitions < 3 {
        return Err(Error::Config(format!(
            "bench needs at least 3 repetitions, got {repetitions}"
        )));
    }
    let options = RunOptions {
        extra_components: Vec::new(),
        track_norms: false,
        ..options.clone()
    };
    let mut report = BenchReport {
        m: config.coeffs.m(),
        nt: config.nt,
        balanced: Vec::new(),
        nonbalanced: Vec::new(),
        balanced_terms: 0,
        nonbalanced_terms: 0,
    };
    for _ in 0..repetitions {
        for scheme in [Scheme::Balanced, Scheme::NonBalanced] {
            let cfg = SimulationConfig {
                scheme,
                override_stability: false,
                snapshot_steps: Vec::new(),
                ..config.clone()
            };
            let out = run_simulation(&cfg, model, &options)?;
            let per_step = out.wall_seconds / cfg.nt as f64;
            match scheme {
                Scheme::Balanced => {
                    report.balanced.push(per_step);
                    report.balanced_terms = out.counters.weighted_terms;
                }
                Scheme::NonBalanced => {
                    report.nonbalanced.push(per_step);
                    report.nonbalanced_terms = out.counters.weighted_terms;
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::taylor_coefficients;
    use crate::workbench::experiments::homogeneous_experiment;

    #[test]
    fn counter_ratio_is_exact() {
        let (mut cfg, model) = homogeneous_experiment(Scheme::Balanced, taylor_coefficients(7).unwrap()).unwrap();
        cfg.nt = 3;
        let r = cmd_bench(&cfg, &model, 3, &RunOptions::serial()).unwrap();
        assert_eq!(r.balanced.len(), 3);
        assert_eq!(r.nonbalanced_terms * 14, r.balanced_terms * 8);
        assert_eq!(r.counter_ratio(), 8.0 / 14.0);
        assert!(r.to_text().contains("counter_ratio=0.571428571"));
        assert!(cmd_bench(&cfg, &model, 2, &RunOptions::serial()).is_err());
    }

    #[test]
    fn median_even_and_odd() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
