//! The reconstruction loop: accelerated proximal gradient descent with
//! per-iteration adaptive reweighting.
//!
//! Each iteration takes a gradient step on the extrapolated point, applies
//! the weighted multi-reference l1 prox, then (for the adaptive variant)
//! refreshes both weight levels at the new iterate before updating the
//! momentum and extrapolation. The two baseline variants freeze their weights
//! at initialization, which turns the same loop into plain l1 FISTA
//! (`PlainL1`) or l1-l1 FISTA (`L1L1`).

use alloc::vec;
use alloc::vec::Vec;

use crate::error::CoreError;
use crate::linop;
use crate::model::{
    objective_from_applied, objective_value, Lipschitz, ProblemInstance, SolverConfig,
    SolverResult, Termination, Variant, WeightState,
};
use crate::prox;
use crate::weights;

/// Solver output plus the per-iteration weight history. Entry `k` holds the
/// weights in force when iterate `k` was produced (before that iteration's
/// refresh),aligned with `objective_trace`.
#[derive(Clone, Debug, PartialEq)]
pub struct SolverTrace {
    pub result: SolverResult,
    pub weight_history: Vec<WeightState>,
}

/// FISTA momentum step `t_{k+1} = (1 + sqrt(1 + 4 t_k^2)) / 2`.
pub(crate) fn next_momentum(t: f64) -> f64 {
    (1.0 + libm::sqrt(1.0 + 4.0 * t * t)) / 2.0
}

/// Runs the configured variant to termination.
pub fn solve(inst: &ProblemInstance, cfg: &SolverConfig) -> Result<SolverResult, CoreError> {
    run(inst, cfg, false).map(|(result, _)| result)
}

/// As [`solve`], additionally recording the weight state of every iteration.
pub fn solve_trace(inst: &ProblemInstance, cfg: &SolverConfig) -> Result<SolverTrace, CoreError> {
    run(inst, cfg, true).map(|(result, history)| SolverTrace {
        result,
        weight_history: history.unwrap_or_default(),
    })
}

fn run(
    inst: &ProblemInstance,
    cfg: &SolverConfig,
    record: bool,
) -> Result<(SolverResult, Option<Vec<WeightState>>), CoreError> {
    cfg.validate()?;
    let n = inst.n();
    let num_sis = inst.num_side_infos();

    let (mut weights_state, refresh) = match cfg.variant {
        Variant::PlainL1 => (WeightState::initial(num_sis, n), false),
        Variant::L1L1 => (WeightState::l1_l1(num_sis, n)?, false),
        Variant::Ramsia => (WeightState::initial(num_sis, n), true),
    };

    let l = match cfg.lipschitz {
        Lipschitz::Explicit(l) => l,
        Lipschitz::Estimate { iters, safety } => {
            linop::estimate_lipschitz(inst.phi(), iters, safety, cfg.rng_seed)?.spectral_norm_sq
        }
    };
    let lam_over_l = cfg.lambda / l;
    let m = inst.m();

    let mut x = vec![0.0; n];
    let mut u = vec![0.0; n];
    // Phi x and Phi u, carried across iterations. Phi u is recombined from
    // the momentum formula instead of applied directly, halving the matrix
    // work per iteration; each Phi x is a fresh product, so the recombination
    // rounding never accumulates.
    let mut fx = vec![0.0; m];
    let mut fu = vec![0.0; m];
    let mut t = 1.0_f64;

    let h0 = objective_value(inst, &weights_state, cfg, &x)?;
    let mut h_prev = h0;

    let mut trace: Vec<f64> = Vec::new();
    let mut history: Option<Vec<WeightState>> = if record { Some(Vec::new()) } else { None };
    let mut iterations = 0;
    let mut termination = Termination::MaxIters;

    for k in 1..=cfg.max_iters {
        let mut residual = Vec::with_capacity(m);
        for (fi, yi) in fu.iter().zip(inst.y()) {
            residual.push(fi - yi);
        }
        let grad = linop::apply_transpose(inst.phi(), &residual)?;
        let mut step = Vec::with_capacity(n);
        for (ui, gi) in u.iter().zip(&grad) {
            step.push(ui - gi / l);
        }
        let x_new = prox::prox_vector(&step, &weights_state, inst.side_infos(), lam_over_l)?;
        let fx_new = linop::apply(inst.phi(), &x_new)?;

        // Objective with the weights that produced this iterate; refreshing
        // first would conflate weight drift with convergence.
        let h_cur = objective_from_applied(
            &fx_new,
            inst.y(),
            &weights_state,
            inst.side_infos(),
            cfg.lambda,
            &x_new,
        );
        if !h_cur.is_finite() || h_cur > 1e6 * h0 {
            // Diverged (e.g. an underestimated step-size constant): keep the
            // previous iterate and report the stall instead of crashing.
            termination = Termination::Stalled;
            break;
        }
        trace.push(h_cur);
        if let Some(hist) = &mut history {
            hist.push(weights_state.clone());
        }

        if refresh {
            let intra = weights::update_intra(&x_new, inst.side_infos(), cfg.epsilon)?;
            let inter = weights::update_inter(&x_new, inst.side_infos(), &intra, cfg.epsilon)?;
            weights_state = WeightState { intra, inter };
        }

        let rel_var = (h_cur - h_prev).abs() / h_prev.max(1e-12);
        let t_next = next_momentum(t);
        let coeff = (t - 1.0) / t_next;
        let mut u_next = Vec::with_capacity(n);
        for (xn, xo) in x_new.iter().zip(&x) {
            u_next.push(xn + coeff * (xn - xo));
        }
        let mut fu_next = Vec::with_capacity(m);
        for (fn_, fo) in fx_new.iter().zip(&fx) {
            fu_next.push(fn_ + coeff * (fn_ - fo));
        }
        u = u_next;
        fu = fu_next;
        x = x_new;
        fx = fx_new;
        t = t_next;
        h_prev = h_cur;
        iterations = k;

        if rel_var < cfg.stop_tol {
            termination = Termination::ToleranceReached;
            break;
        }
    }

    let result = SolverResult {
        x_hat: x,
        objective_trace: trace,
        iterations,
        termination,
        final_weights: weights_state,
    };
    Ok((result, history))
}
