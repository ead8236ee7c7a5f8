//! The success-probability experiment: a grid over measurement counts and
//! solver variants, many seeded trials per cell.
//!
//! Work is split at `(m, trial)` granularity. Each task generates its
//! instance once, estimates the step-size constant once, and reconstructs
//! with every configured variant, so variants are compared on identical
//! instances and identical step sizes. Results are merged in deterministic
//! order regardless of the worker count.

use std::time::Instant;

use ramsia_core::{
    estimate_lipschitz, solve, Lipschitz, SolverConfig, TrialReport, Variant,
};
use serde::{Deserialize, Serialize};

use crate::error::HarnessError;
use crate::gen::{generate_instance, solver_seed, GeneratorSpec};

/// Solver parameters shared by every run in a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverSettings {
    pub lambda: f64,
    pub epsilon: f64,
    pub stop_tol: f64,
    pub max_iters: usize,
    pub lipschitz: Lipschitz,
}

impl Default for SolverSettings {
    fn default() -> Self {
        let cfg = SolverConfig::default();
        SolverSettings {
            lambda: cfg.lambda,
            epsilon: cfg.epsilon,
            stop_tol: cfg.stop_tol,
            max_iters: cfg.max_iters,
            lipschitz: cfg.lipschitz,
        }
    }
}

/// One reconstruction configuration: which variant and how many of the
/// generated side informations it may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariantSpec {
    pub variant: Variant,
    pub num_sis: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub m_values: Vec<usize>,
    pub trials: u64,
    /// Relative error at or below which a trial counts as a success.
    pub success_threshold: f64,
    pub variants: Vec<VariantSpec>,
    pub solver: SolverSettings,
}

impl SweepSpec {
    pub fn validate(&self, gen: &GeneratorSpec) -> Result<(), HarnessError> {
        if self.m_values.is_empty() {
            return Err(HarnessError::InvalidSpec("m_values must be non-empty".into()));
        }
        if let Some(&m) = self.m_values.iter().find(|&&m| m == 0) {
            return Err(HarnessError::InvalidSpec(format!("m value {m} must be positive")));
        }
        if self.trials == 0 {
            return Err(HarnessError::InvalidSpec("trials must be positive".into()));
        }
        if !(self.success_threshold.is_finite() && self.success_threshold > 0.0) {
            return Err(HarnessError::InvalidSpec(
                "success threshold must be positive and finite".into(),
            ));
        }
        if self.variants.is_empty() {
            return Err(HarnessError::InvalidSpec("variants must be non-empty".into()));
        }
        let available = gen.si_diff_supports.len();
        for vs in &self.variants {
            if vs.num_sis > available {
                return Err(HarnessError::InvalidSpec(format!(
                    "variant {} asks for {} side informations, generator provides {}",
                    vs.variant, vs.num_sis, available
                )));
            }
            match vs.variant {
                Variant::PlainL1 if vs.num_sis != 0 => {
                    return Err(HarnessError::InvalidSpec(
                        "plain-l1 takes no side information".into(),
                    ));
                }
                Variant::L1L1 if vs.num_sis != 1 => {
                    return Err(HarnessError::InvalidSpec(
                        "l1-l1 takes exactly one side information".into(),
                    ));
                }
                _ => {}
            }
        }
        Ok(())
    }
}

/// Aggregate over the trials of one `(variant, m)` cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub variant: Variant,
    pub num_sis: usize,
    pub m: usize,
    pub trials: u64,
    pub successes: u64,
    pub success_probability: f64,
    pub mean_rel_err: f64,
    pub mean_iters: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub master_seed: u64,
    pub generator: GeneratorSpec,
    pub sweep: SweepSpec,
    pub version: String,
    /// Not populated by `run_sweep`: reports must be byte-reproducible from
    /// the specs alone. Callers may stamp one in before exporting.
    pub timestamp: Option<String>,
    pub redraw_policy: String,
    pub support_policy: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub metadata: RunMetadata,
    pub cells: Vec<CellSummary>,
    pub trials: Vec<TrialReport>,
}

pub fn relative_error(x_hat: &[f64], x: &[f64]) -> f64 {
    let num: f64 = x_hat.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum();
    let den: f64 = x.iter().map(|b| b * b).sum();
    num.sqrt() / den.sqrt()
}

fn run_task(
    gen: &GeneratorSpec,
    sweep: &SweepSpec,
    m: usize,
    trial: u64,
) -> Result<Vec<TrialReport>, HarnessError> {
    let inst = generate_instance(gen, m, trial)?;
    let seed = solver_seed(gen.seed, m, trial);
    let x_true = inst.x_true().expect("generated instances carry the ground truth").to_vec();

    let l = match sweep.solver.lipschitz {
        Lipschitz::Explicit(value) => value,
        Lipschitz::Estimate { iters, safety } => {
            estimate_lipschitz(inst.phi(), iters, safety, seed)?.spectral_norm_sq
        }
    };

    let mut reports = Vec::with_capacity(sweep.variants.len());
    for vs in &sweep.variants {
        let view = inst.with_side_infos_truncated(vs.num_sis)?;
        let cfg = SolverConfig {
            lambda: sweep.solver.lambda,
            epsilon: sweep.solver.epsilon,
            variant: vs.variant,
            stop_tol: sweep.solver.stop_tol,
            max_iters: sweep.solver.max_iters,
            lipschitz: Lipschitz::Explicit(l),
            rng_seed: seed,
        };
        let started = Instant::now();
        let res = solve(&view, &cfg)?;
        let rel = relative_error(&res.x_hat, &x_true);
        reports.push(TrialReport {
            m,
            trial_index: trial as usize,
            relative_error: rel,
            success: rel <= sweep.success_threshold,
            solver_variant: vs.variant,
            num_sis_used: vs.num_sis,
            iterations: res.iterations,
            wall_time: started.elapsed().as_secs_f64(),
        });
    }
    Ok(reports)
}

fn summarize(sweep: &SweepSpec, trials: &[TrialReport]) -> Vec<CellSummary> {
    let mut cells = Vec::with_capacity(sweep.variants.len() * sweep.m_values.len());
    for vs in &sweep.variants {
        for &m in &sweep.m_values {
            let rows: Vec<&TrialReport> = trials
                .iter()
                .filter(|t| {
                    t.m == m && t.solver_variant == vs.variant && t.num_sis_used == vs.num_sis
                })
                .collect();
            let count = rows.len() as u64;
            debug_assert_eq!(count, sweep.trials);
            let successes = rows.iter().filter(|t| t.success).count() as u64;
            let mean = |f: &dyn Fn(&TrialReport) -> f64| {
                rows.iter().map(|t| f(t)).sum::<f64>() / count as f64
            };
            cells.push(CellSummary {
                variant: vs.variant,
                num_sis: vs.num_sis,
                m,
                trials: count,
                successes,
                success_probability: successes as f64 / count as f64,
                mean_rel_err: mean(&|t| t.relative_error),
                mean_iters: mean(&|t| t.iterations as f64),
            });
        }
    }
    cells
}

/// Runs the full grid with `workers` threads and aggregates per-cell
/// statistics. The report is byte-reproducible from `(gen, sweep)` for any
/// worker count.
pub fn run_sweep(
    gen: &GeneratorSpec,
    sweep: &SweepSpec,
    workers: usize,
) -> Result<SweepReport, HarnessError> {
    gen.validate()?;
    sweep.validate(gen)?;
    if workers == 0 {
        return Err(HarnessError::InvalidSpec("workers must be positive".into()));
    }

    let mut tasks = Vec::with_capacity(sweep.m_values.len() * sweep.trials as usize);
    for &m in &sweep.m_values {
        for trial in 0..sweep.trials {
            tasks.push((m, trial));
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| HarnessError::InvalidSpec(format!("worker pool: {e}")))?;
    let nested: Result<Vec<Vec<TrialReport>>, HarnessError> = pool.install(|| {
        use rayon::prelude::*;
        tasks.par_iter().map(|&(m, trial)| run_task(gen, sweep, m, trial)).collect()
    });
    let trials: Vec<TrialReport> = nested?.into_iter().flatten().collect();

    let cells = summarize(sweep, &trials);
    Ok(SweepReport {
        metadata: RunMetadata {
            master_seed: gen.seed,
            generator: gen.clone(),
            sweep: sweep.clone(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: None,
            redraw_policy: "exact-zero amplitude draws are redrawn".to_string(),
            support_policy: "x and difference supports drawn independently, uniform without replacement".to_string(),
        },
        cells,
        trials,
    })
}
