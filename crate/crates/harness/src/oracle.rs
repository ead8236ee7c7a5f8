//! Brute-force reference for the coordinate prox: a two-stage grid search
//! over `h(v) = sum_j c_j |v - z_j| + (v - x)^2 / 2`, used to audit the
//! closed-form minimizer on randomized cases.

use std::time::{Duration, Instant};

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha12Rng;
use ramsia_core::{prox_coordinate, ProxCoordinateInput};

use crate::error::HarnessError;

const COARSE_STEP: f64 = 1e-3;
const FINE_STEP: f64 = 1e-8;

/// One randomized coordinate prox problem.
#[derive(Debug, Clone, PartialEq)]
pub struct ProxCase {
    pub x: f64,
    /// `(z_j, c_j)` pairs; the first knot is always the zero reference.
    pub knots: Vec<(f64, f64)>,
}

/// Draws `count` cases with 0 to 3 side-information knots in `[-3, 3]`,
/// coefficients in `[0, 2]`, and evaluation points in `[-5, 5]`.
pub fn random_cases(seed: u64, count: usize) -> Vec<ProxCase> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let num_sis = rng.random_range(0..=3usize);
            let mut knots = vec![(0.0, rng.random_range(0.0..2.0))];
            for _ in 0..num_sis {
                knots.push((rng.random_range(-3.0..3.0), rng.random_range(0.0..2.0)));
            }
            ProxCase { x: rng.random_range(-5.0..5.0), knots }
        })
        .collect()
}

fn objective(case: &ProxCase, v: f64) -> f64 {
    let mut acc = 0.5 * (v - case.x) * (v - case.x);
    for &(z, c) in &case.knots {
        acc += c * (v - z).abs();
    }
    acc
}

fn scan(case: &ProxCase, lo: f64, hi: f64, step: f64) -> f64 {
    let count = ((hi - lo) / step).ceil() as usize;
    let mut best_v = lo;
    let mut best_h = objective(case, lo);
    for i in 1..=count {
        let v = lo + i as f64 * step;
        let h = objective(case, v);
        if h < best_h {
            best_h = h;
            best_v = v;
        }
    }
    best_v
}

/// Grid-search minimizer of the case objective. The envelope covers every
/// knot and the evaluation point with margin; the coarse pass is then
/// refined around its argmin. `h` is strictly convex, so the coarse argmin
/// lies within one coarse step of the true minimizer.
pub fn grid_minimize(case: &ProxCase) -> f64 {
    let mut lo = case.x;
    let mut hi = case.x;
    for &(z, _) in &case.knots {
        lo = lo.min(z);
        hi = hi.max(z);
    }
    lo -= 0.5;
    hi += 0.5;
    let coarse = scan(case, lo, hi, COARSE_STEP);
    scan(case, coarse - 1.5 * COARSE_STEP, coarse + 1.5 * COARSE_STEP, FINE_STEP)
}

/// Outcome of one oracle audit run.
#[derive(Debug, Clone, PartialEq)]
pub struct ProxCheckOutcome {
    pub cases: usize,
    pub max_deviation: f64,
    /// Case index attaining `max_deviation`.
    pub worst_case: usize,
    pub elapsed: Duration,
}

/// Compares the closed-form prox against the grid search on `count` seeded
/// cases and reports the largest disagreement.
pub fn run_prox_check(seed: u64, count: usize) -> Result<ProxCheckOutcome, HarnessError> {
    let cases = random_cases(seed, count);
    let started = Instant::now();
    let mut max_deviation = 0.0_f64;
    let mut worst_case = 0;
    for (i, case) in cases.iter().enumerate() {
        let exact = prox_coordinate(&ProxCoordinateInput { x_i: case.x, knots: &case.knots })?;
        let gridded = grid_minimize(case);
        let dev = (exact - gridded).abs();
        if dev > max_deviation {
            max_deviation = dev;
            worst_case = i;
        }
    }
    Ok(ProxCheckOutcome { cases: count, max_deviation, worst_case, elapsed: started.elapsed() })
}
