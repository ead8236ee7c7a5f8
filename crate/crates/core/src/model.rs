//! Core data model: dense matrices, problem instances, weight state, solver
//! configuration, and the objective function they define together.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::CoreError;
use crate::linop;

/// Relative residual allowed between `Phi * x_true` and `y` when a ground
/// truth is attached to an instance.
pub const CONSISTENCY_TOL: f64 = 1e-12;

/// Dense row-major matrix of `f64`.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// Builds a matrix from row-major data. `data.len()` must equal
    /// `rows * cols` and both dimensions must be positive.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, CoreError> {
        if rows == 0 || cols == 0 {
            return Err(CoreError::InvalidParameter("matrix dimensions must be positive"));
        }
        if data.len() != rows * cols {
            return Err(CoreError::DimensionMismatch {
                context: "matrix data length",
                expected: rows * cols,
                got: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from a slice of equal-length rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, CoreError> {
        let r = rows.len();
        if r == 0 {
            return Err(CoreError::InvalidParameter("matrix dimensions must be positive"));
        }
        let c = rows[0].len();
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(CoreError::DimensionMismatch {
                    context: "matrix row length",
                    expected: c,
                    got: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::new(r, c, data)
    }

    /// The `n x n` identity.
    pub fn identity(n: usize) -> Result<Self, CoreError> {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Self::new(n, n, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Row `i` as a slice of length `cols`.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Row-major backing storage.
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// True iff every entry is exactly zero.
    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&a| a == 0.0)
    }
}

/// One reconstruction problem: measurements `y = Phi x`, the measurement
/// matrix, side information vectors `z_1..z_J`, and optionally the ground
/// truth `x_true` for error reporting.
///
/// Immutable after construction; construction validates all dimensions and,
/// when `x_true` is present, that it actually reproduces `y`.
#[derive(Clone, Debug)]
pub struct ProblemInstance {
    x_true: Option<Vec<f64>>,
    phi: Matrix,
    y: Vec<f64>,
    side_infos: Vec<Vec<f64>>,
}

impl ProblemInstance {
    pub fn new(
        x_true: Option<Vec<f64>>,
        phi: Matrix,
        y: Vec<f64>,
        side_infos: Vec<Vec<f64>>,
    ) -> Result<Self, CoreError> {
        let m = phi.rows();
        let n = phi.cols();
        if y.len() != m {
            return Err(CoreError::DimensionMismatch {
                context: "measurement vector",
                expected: m,
                got: y.len(),
            });
        }
        for z in &side_infos {
            if z.len() != n {
                return Err(CoreError::DimensionMismatch {
                    context: "side information vector",
                    expected: n,
                    got: z.len(),
                });
            }
        }
        if let Some(x) = &x_true {
            if x.len() != n {
                return Err(CoreError::DimensionMismatch {
                    context: "ground truth vector",
                    expected: n,
                    got: x.len(),
                });
            }
            let fx = linop::apply(&phi, x)?;
            let mut res_sq = 0.0;
            let mut y_sq = 0.0;
            for (fi, yi) in fx.iter().zip(&y) {
                let d = fi - yi;
                res_sq += d * d;
                y_sq += yi * yi;
            }
            let denom = if y_sq > 1.0 { libm::sqrt(y_sq) } else { 1.0 };
            let residual = libm::sqrt(res_sq) / denom;
            if residual > CONSISTENCY_TOL || residual.is_nan() {
                return Err(CoreError::InconsistentInstance {
                    residual,
                    limit: CONSISTENCY_TOL,
                });
            }
        }
        Ok(Self { x_true, phi, y, side_infos })
    }

    /// Signal dimension `n`.
    pub fn n(&self) -> usize {
        self.phi.cols()
    }

    /// Measurement count `m`.
    pub fn m(&self) -> usize {
        self.phi.rows()
    }

    /// Number of side information vectors `J`.
    pub fn num_side_infos(&self) -> usize {
        self.side_infos.len()
    }

    pub fn phi(&self) -> &Matrix {
        &self.phi
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn side_infos(&self) -> &[Vec<f64>] {
        &self.side_infos
    }

    pub fn x_true(&self) -> Option<&[f64]> {
        self.x_true.as_deref()
    }

    /// A copy of this instance keeping only the first `num` side information
    /// vectors.
    pub fn with_side_infos_truncated(&self, num: usize) -> Result<Self, CoreError> {
        if num > self.side_infos.len() {
            return Err(CoreError::DimensionMismatch {
                context: "side information truncation",
                expected: self.side_infos.len(),
                got: num,
            });
        }
        Ok(Self {
            x_true: self.x_true.clone(),
            phi: self.phi.clone(),
            y: self.y.clone(),
            side_infos: self.side_infos[..num].to_vec(),
        })
    }
}

/// Two-level weights: one intra row per reference vector (row 0 belongs to the
/// implicit `z_0 = 0`, rows `1..=J` to the side information vectors) and one
/// inter scalar `beta_j` per row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightState {
    pub(crate) intra: Vec<Vec<f64>>,
    pub(crate) inter: Vec<f64>,
}

impl WeightState {
    /// Fresh state as the iteration starts: unit weights on the sparsity term
    /// (`w_0 = 1`, `beta_0 = 1`) and zero weights on every side information
    /// slot.
    pub fn initial(num_sis: usize, n: usize) -> Self {
        let mut intra = Vec::with_capacity(num_sis + 1);
        intra.push(vec![1.0; n]);
        for _ in 0..num_sis {
            intra.push(vec![0.0; n]);
        }
        let mut inter = vec![0.0; num_sis + 1];
        inter[0] = 1.0;
        Self { intra, inter }
    }

    /// Frozen l1-l1 state: unit weights and unit inter weight on `z_0` and
    /// `z_1`, zero on every further slot. Requires at least one side
    /// information vector.
    pub fn l1_l1(num_sis: usize, n: usize) -> Result<Self, CoreError> {
        if num_sis == 0 {
            return Err(CoreError::InvalidParameter(
                "l1-l1 weights require at least one side information vector",
            ));
        }
        let mut state = Self::initial(num_sis, n);
        state.intra[1] = vec![1.0; n];
        state.inter[1] = 1.0;
        Ok(state)
    }

    /// Builds a state from raw parts, validating shape and entry domains
    /// (finite, non-negative).
    pub fn from_parts(intra: Vec<Vec<f64>>, inter: Vec<f64>) -> Result<Self, CoreError> {
        if intra.is_empty() || intra.len() != inter.len() {
            return Err(CoreError::DimensionMismatch {
                context: "weight rows vs inter weights",
                expected: inter.len(),
                got: intra.len(),
            });
        }
        let n = intra[0].len();
        if n == 0 {
            return Err(CoreError::InvalidParameter("weight rows must be non-empty"));
        }
        for row in &intra {
            if row.len() != n {
                return Err(CoreError::DimensionMismatch {
                    context: "weight row length",
                    expected: n,
                    got: row.len(),
                });
            }
            if row.iter().any(|w| !w.is_finite() || *w < 0.0) {
                return Err(CoreError::NonFinite { context: "intra weights" });
            }
        }
        if inter.iter().any(|b| !b.is_finite() || *b < 0.0) {
            return Err(CoreError::NonFinite { context: "inter weights" });
        }
        Ok(Self { intra, inter })
    }

    /// Number of weight slots, `J + 1`.
    pub fn num_slots(&self) -> usize {
        self.inter.len()
    }

    /// Signal dimension the rows were built for.
    pub fn n(&self) -> usize {
        self.intra[0].len()
    }

    /// Intra rows, indexed by reference vector (row 0 is the sparsity term).
    pub fn intra(&self) -> &[Vec<f64>] {
        &self.intra
    }

    /// Inter weights `beta_0..beta_J`.
    pub fn inter(&self) -> &[f64] {
        &self.inter
    }
}

/// Solver variant selection.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    /// Plain l1 minimization: initialization weights frozen, side information
    /// ignored.
    #[serde(rename = "plain-l1")]
    PlainL1,
    /// l1-l1 minimization: unit weights on `z_0` and `z_1`, frozen.
    #[serde(rename = "l1-l1")]
    L1L1,
    /// Full adaptive reweighting over all provided side information.
    #[serde(rename = "ramsia")]
    Ramsia,
}

impl core::fmt::Display for Variant {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            Variant::PlainL1 => "plain-l1",
            Variant::L1L1 => "l1-l1",
            Variant::Ramsia => "ramsia",
        })
    }
}

impl core::str::FromStr for Variant {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self, CoreError> {
        match s {
            "plain-l1" | "plain_l1" => Ok(Variant::PlainL1),
            "l1-l1" | "l1_l1" => Ok(Variant::L1L1),
            "ramsia" => Ok(Variant::Ramsia),
            _ => Err(CoreError::InvalidParameter(
                "unknown variant (expected plain-l1, l1-l1, or ramsia)",
            )),
        }
    }
}

/// Step-size policy: either a caller-supplied Lipschitz constant of the
/// gradient, or power-iteration estimation on `Phi^T Phi`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Lipschitz {
    Explicit(f64),
    Estimate { iters: usize, safety: f64 },
}

impl Default for Lipschitz {
    fn default() -> Self {
        Lipschitz::Estimate { iters: 100, safety: 1.01 }
    }
}

/// How a solve ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    /// Relative objective variation fell below `stop_tol`.
    #[serde(rename = "tolerance-reached")]
    ToleranceReached,
    /// Iteration budget exhausted.
    #[serde(rename = "max-iters")]
    MaxIters,
    /// The objective became non-finite or grew past the divergence guard;
    /// the last finite iterate is returned.
    #[serde(rename = "stalled")]
    Stalled,
}

impl core::fmt::Display for Termination {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            Termination::ToleranceReached => "tolerance-reached",
            Termination::MaxIters => "max-iters",
            Termination::Stalled => "stalled",
        })
    }
}

/// Full solver configuration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Penalty strength lambda.
    pub lambda: f64,
    /// Weight smoothing epsilon, shared by both weight levels.
    pub epsilon: f64,
    pub variant: Variant,
    /// Threshold on the relative objective variation. Zero disables the
    /// tolerance stop, leaving `max_iters` as the only budget; useful for
    /// benchmark runs, where the objective can flatten below any tolerance
    /// while the iterate is still searching for the right support.
    pub stop_tol: f64,
    pub max_iters: usize,
    pub lipschitz: Lipschitz,
    /// Seed for the power-iteration start vector when `lipschitz` is
    /// `Estimate`; ignored otherwise.
    pub rng_seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            lambda: 1e-5,
            epsilon: 0.1,
            variant: Variant::Ramsia,
            stop_tol: 1e-8,
            max_iters: 10_000,
            lipschitz: Lipschitz::default(),
            rng_seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), CoreError> {
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(CoreError::InvalidParameter("lambda must be positive and finite"));
        }
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(CoreError::InvalidParameter("epsilon must be positive and finite"));
        }
        if !(self.stop_tol.is_finite() && self.stop_tol >= 0.0) {
            return Err(CoreError::InvalidParameter("stop_tol must be non-negative and finite"));
        }
        if self.max_iters == 0 {
            return Err(CoreError::InvalidParameter("max_iters must be at least 1"));
        }
        match self.lipschitz {
            Lipschitz::Explicit(l) => {
                if !(l.is_finite() && l > 0.0) {
                    return Err(CoreError::InvalidParameter(
                        "explicit Lipschitz constant must be positive and finite",
                    ));
                }
            }
            Lipschitz::Estimate { iters, safety } => {
                if iters == 0 {
                    return Err(CoreError::InvalidParameter(
                        "power iteration count must be at least 1",
                    ));
                }
                if !(safety.is_finite() && safety >= 1.0) {
                    return Err(CoreError::InvalidParameter("safety factor must be >= 1"));
                }
            }
        }
        Ok(())
    }
}

/// Solver output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverResult {
    pub x_hat: Vec<f64>,
    /// Objective value per completed iteration, each computed with the
    /// weights in force when that iterate was produced.
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub termination: Termination,
    /// Weight state at termination (after the last refresh for the adaptive
    /// variant).
    pub final_weights: WeightState,
}

/// Outcome of one benchmark trial.
///
/// `wall_time` is measured but excluded from serialized reports so that
/// repeated runs with identical seeds produce identical bytes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub m: usize,
    pub trial_index: usize,
    pub relative_error: f64,
    pub success: bool,
    pub solver_variant: Variant,
    pub num_sis_used: usize,
    pub iterations: usize,
    #[serde(skip)]
    pub wall_time: f64,
}

/// Evaluates the full objective
/// `1/2 ||Phi x - y||^2 + lambda * sum_j beta_j * sum_i w_ji |x_i - z_ji|`
/// with the implicit `z_0 = 0`.
///
/// Returns whatever the arithmetic produces, including non-finite values for
/// non-finite `x`; the solver relies on that for its divergence guard.
pub fn objective_value(
    inst: &ProblemInstance,
    w: &WeightState,
    cfg: &SolverConfig,
    x: &[f64],
) -> Result<f64, CoreError> {
    let n = inst.n();
    if x.len() != n {
        return Err(CoreError::DimensionMismatch {
            context: "objective argument",
            expected: n,
            got: x.len(),
        });
    }
    let slots = inst.num_side_infos() + 1;
    if w.num_slots() != slots {
        return Err(CoreError::DimensionMismatch {
            context: "objective weight slots",
            expected: slots,
            got: w.num_slots(),
        });
    }
    if w.n() != n {
        return Err(CoreError::DimensionMismatch {
            context: "objective weight length",
            expected: n,
            got: w.n(),
        });
    }

    let fx = linop::apply(inst.phi(), x)?;
    Ok(objective_from_applied(&fx, inst.y(), w, inst.side_infos(), cfg.lambda, x))
}

/// As [`objective_value`] but taking a precomputed `fx = Phi x`, so callers
/// that already hold the product pay no extra matrix application. Performs no
/// validation.
pub(crate) fn objective_from_applied(
    fx: &[f64],
    y: &[f64],
    w: &WeightState,
    side_infos: &[Vec<f64>],
    lambda: f64,
    x: &[f64],
) -> f64 {
    let mut fid = 0.0;
    for (fi, yi) in fx.iter().zip(y) {
        let d = fi - yi;
        fid += d * d;
    }

    let mut penalty = 0.0;
    for j in 0..w.num_slots() {
        let wj = &w.intra[j];
        let mut row = 0.0;
        if j == 0 {
            for (wi, xi) in wj.iter().zip(x) {
                row += wi * xi.abs();
            }
        } else {
            let zj = &side_infos[j - 1];
            for ((wi, xi), zi) in wj.iter().zip(x).zip(zj) {
                row += wi * (xi - zi).abs();
            }
        }
        penalty += w.inter[j] * row;
    }

    0.5 * fid + lambda * penalty
}
