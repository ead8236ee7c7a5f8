//! Synthetic instance generation.
//!
//! An instance is fully determined by `(GeneratorSpec, m, trial)`. The draw
//! order is fixed: first the sparse source `x` (support positions, then
//! amplitudes in ascending index order), then each difference vector `d_j`
//! the same way, then the measurement matrix row by row. Exact-zero
//! amplitude draws are rejected and redrawn so support sizes are exact.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use ramsia_core::{Matrix, ProblemInstance};
use serde::{Deserialize, Serialize};

use crate::error::HarnessError;

/// Amplitude distribution for nonzero entries of `x` and the `d_j`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AmplitudeLaw {
    #[default]
    StandardNormal,
}

/// Entry distribution for the measurement matrix.
///
/// `NormalizedGaussian` draws i.i.d. normal entries with variance `1/m`, so
/// columns have unit norm in expectation. That keeps the data-fidelity scale
/// comparable to the signal scale regardless of the measurement count, which
/// is what makes a fixed small `lambda` meaningful across a whole m-sweep.
/// `StandardGaussian` (unit variance) is available for experiments that want
/// the raw ensemble; note that the effective per-iteration shrinkage
/// `lambda / L` then collapses with growing problem size and reconstruction
/// needs far more iterations.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatrixLaw {
    #[default]
    NormalizedGaussian,
    StandardGaussian,
}

/// Everything needed to regenerate a family of instances, except the
/// measurement count `m` and the trial index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    /// Signal dimension.
    pub n: usize,
    /// Number of nonzeros in `x`.
    pub sparsity: usize,
    /// Support size of `x - z_j` for each side information vector, so
    /// `si_diff_supports.len()` is the number of SIs generated. An entry of 0
    /// produces a perfect SI with `z_j = x`.
    pub si_diff_supports: Vec<usize>,
    pub amplitude_law: AmplitudeLaw,
    #[serde(default)]
    pub matrix_law: MatrixLaw,
    /// Master seed; combined with `(m, trial)` to key each instance.
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.n == 0 {
            return Err(HarnessError::InvalidSpec("n must be positive".into()));
        }
        if self.sparsity == 0 || self.sparsity > self.n {
            return Err(HarnessError::InvalidSpec(format!(
                "sparsity must be in 1..={}, got {}",
                self.n, self.sparsity
            )));
        }
        if let Some(&d) = self.si_diff_supports.iter().find(|&&d| d > self.n) {
            return Err(HarnessError::InvalidSpec(format!(
                "si diff support {} exceeds n = {}",
                d, self.n
            )));
        }
        Ok(())
    }
}

fn seed_bytes(master: u64, purpose: u8, m: u64, trial: u64) -> [u8; 32] {
    let mut b = [0u8; 32];
    b[..8].copy_from_slice(&master.to_le_bytes());
    b[8] = purpose;
    b[9..17].copy_from_slice(&m.to_le_bytes());
    b[17..25].copy_from_slice(&trial.to_le_bytes());
    b
}

/// RNG seed for the instance drawn at `(m, trial)`. Deliberately independent
/// of the solver variant so every variant reconstructs the same instance.
pub fn instance_seed(master: u64, m: usize, trial: u64) -> [u8; 32] {
    seed_bytes(master, 0, m as u64, trial)
}

/// Solver-side seed (spectral norm estimation) for `(m, trial)`, shared by
/// all variants so they agree on the step size.
pub fn solver_seed(master: u64, m: usize, trial: u64) -> u64 {
    let mut rng = ChaCha12Rng::from_seed(seed_bytes(master, 1, m as u64, trial));
    rng.random()
}

fn nonzero_normal(rng: &mut ChaCha12Rng) -> f64 {
    loop {
        let a: f64 = StandardNormal.sample(rng);
        if a != 0.0 {
            return a;
        }
    }
}

/// Draws a vector with exactly `s` nonzeros: a partial Fisher-Yates pass
/// picks the support, and amplitudes are then assigned in ascending index
/// order so the result does not depend on the order the support came out.
fn sparse_vector(rng: &mut ChaCha12Rng, n: usize, s: usize) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..n).collect();
    for i in 0..s {
        let j = rng.random_range(i..n);
        idx.swap(i, j);
    }
    let mut support = idx[..s].to_vec();
    support.sort_unstable();
    let mut v = vec![0.0; n];
    for &i in &support {
        v[i] = nonzero_normal(rng);
    }
    v
}

/// Generates the instance keyed by `(spec.seed, m, trial)`: sparse `x`,
/// side informations `z_j = x - d_j` with exact diff supports, a dense
/// standard-normal `m x n` measurement matrix, and `y = phi x`.
pub fn generate_instance(
    spec: &GeneratorSpec,
    m: usize,
    trial: u64,
) -> Result<ProblemInstance, HarnessError> {
    spec.validate()?;
    if m == 0 {
        return Err(HarnessError::InvalidSpec("m must be positive".into()));
    }
    let AmplitudeLaw::StandardNormal = spec.amplitude_law;
    let mut rng = ChaCha12Rng::from_seed(instance_seed(spec.seed, m, trial));
    let n = spec.n;

    let x = sparse_vector(&mut rng, n, spec.sparsity);
    let mut side_infos = Vec::with_capacity(spec.si_diff_supports.len());
    for &d in &spec.si_diff_supports {
        let diff = sparse_vector(&mut rng, n, d);
        side_infos.push(x.iter().zip(&diff).map(|(a, b)| a - b).collect());
    }

    let scale = match spec.matrix_law {
        MatrixLaw::NormalizedGaussian => 1.0 / (m as f64).sqrt(),
        MatrixLaw::StandardGaussian => 1.0,
    };
    let mut data = Vec::with_capacity(m * n);
    for _ in 0..m * n {
        let e: f64 = StandardNormal.sample(&mut rng);
        data.push(scale * e);
    }
    let phi = Matrix::new(m, n, data)?;
    let y = ramsia_core::apply(&phi, &x)?;
    Ok(ProblemInstance::new(Some(x), phi, y, side_infos)?)
}
