//! Measurement-operator algebra: applications of `Phi` and `Phi^T`, the
//! gradient of the data-fidelity term, and spectral-norm estimation for the
//! step size.

use alloc::vec;
use alloc::vec::Vec;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::error::CoreError;
use crate::model::Matrix;

/// Outcome of power-iteration step-size estimation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OperatorStats {
    /// Estimate of `lambda_max(Phi^T Phi)`, already inflated by the safety
    /// factor. This is the Lipschitz constant of the data-fidelity gradient.
    pub spectral_norm_sq: f64,
    pub power_iters_used: usize,
    /// Whether successive Rayleigh quotients agreed to relative 1e-12 before
    /// the iteration budget ran out.
    pub converged: bool,
}

/// `Phi * v`.
pub fn apply(phi: &Matrix, v: &[f64]) -> Result<Vec<f64>, CoreError> {
    if v.len() != phi.cols() {
        return Err(CoreError::DimensionMismatch {
            context: "operator application",
            expected: phi.cols(),
            got: v.len(),
        });
    }
    let mut out = Vec::with_capacity(phi.rows());
    for i in 0..phi.rows() {
        let row = phi.row(i);
        let mut acc = 0.0;
        for (a, b) in row.iter().zip(v) {
            acc += a * b;
        }
        out.push(acc);
    }
    Ok(out)
}

/// `Phi^T * u`.
pub fn apply_transpose(phi: &Matrix, u: &[f64]) -> Result<Vec<f64>, CoreError> {
    if u.len() != phi.rows() {
        return Err(CoreError::DimensionMismatch {
            context: "transpose application",
            expected: phi.rows(),
            got: u.len(),
        });
    }
    let mut out = vec![0.0; phi.cols()];
    for (i, ui) in u.iter().enumerate() {
        let row = phi.row(i);
        for (o, a) in out.iter_mut().zip(row) {
            *o += ui * a;
        }
    }
    Ok(out)
}

/// Gradient of `f(u) = 1/2 ||Phi u - y||^2`, i.e. `Phi^T (Phi u - y)`.
pub fn gradient(phi: &Matrix, y: &[f64], u: &[f64]) -> Result<Vec<f64>, CoreError> {
    if y.len() != phi.rows() {
        return Err(CoreError::DimensionMismatch {
            context: "gradient measurements",
            expected: phi.rows(),
            got: y.len(),
        });
    }
    let mut residual = apply(phi, u)?;
    for (r, yi) in residual.iter_mut().zip(y) {
        *r -= yi;
    }
    apply_transpose(phi, &residual)
}

fn l2_norm(v: &[f64]) -> f64 {
    let mut acc = 0.0;
    for a in v {
        acc += a * a;
    }
    libm::sqrt(acc)
}

/// Estimates `lambda_max(Phi^T Phi)` by power iteration from a seeded random
/// start vector, returning the final Rayleigh quotient times `safety`.
///
/// Deterministic given `seed`. Stops early once successive Rayleigh quotients
/// agree to relative 1e-12; `OperatorStats::converged` records whether that
/// happened within the budget.
pub fn estimate_lipschitz(
    phi: &Matrix,
    iters: usize,
    safety: f64,
    seed: u64,
) -> Result<OperatorStats, CoreError> {
    if iters == 0 {
        return Err(CoreError::InvalidParameter("power iteration count must be at least 1"));
    }
    if !(safety.is_finite() && safety >= 1.0) {
        return Err(CoreError::InvalidParameter("safety factor must be >= 1"));
    }
    if phi.is_zero() {
        return Err(CoreError::ZeroOperator);
    }

    let n = phi.cols();
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut v: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();

    let mut rayleigh = 0.0;
    let mut prev = f64::NAN;
    let mut used = 0;
    let mut converged = false;
    // Cycled through if the iterate ever lands in the null space of Phi
    // (possible only for degenerate operators; a nonzero column then gives a
    // nonzero Rayleigh quotient again).
    let mut restart_axis = 0;

    for _ in 0..iters {
        used += 1;
        let norm = l2_norm(&v);
        if norm == 0.0 {
            v = vec![0.0; n];
            v[restart_axis % n] = 1.0;
            restart_axis += 1;
            prev = f64::NAN;
            continue;
        }
        for a in v.iter_mut() {
            *a /= norm;
        }
        let fv = apply(phi, &v)?;
        rayleigh = fv.iter().map(|a| a * a).sum();
        if rayleigh == 0.0 {
            v = vec![0.0; n];
            v[restart_axis % n] = 1.0;
            restart_axis += 1;
            prev = f64::NAN;
            continue;
        }
        if prev.is_finite() && (rayleigh - prev).abs() <= 1e-12 * rayleigh {
            converged = true;
            break;
        }
        prev = rayleigh;
        v = apply_transpose(phi, &fv)?;
    }

    if rayleigh <= 0.0 {
        return Err(CoreError::ZeroOperator);
    }
    Ok(OperatorStats {
        spectral_norm_sq: rayleigh * safety,
        power_iters_used: used,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seeded_matrix(rows: usize, cols: usize, seed: u64) -> Matrix {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let data: Vec<f64> = (0..rows * cols).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        Matrix::new(rows, cols, data).unwrap()
    }

    fn seeded_vector(len: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        (0..len).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect()
    }

    #[test]
    fn apply_identity_returns_input() {
        let phi = Matrix::identity(4).unwrap();
        let v = vec![1.0, -2.0, 0.5, 3.0];
        assert_eq!(apply(&phi, &v).unwrap(), v);
    }

    #[test]
    fn apply_matches_hand_arithmetic() {
        let phi = Matrix::new(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(apply(&phi, &[1.0, 1.0]).unwrap(), vec![3.0, 7.0]);
    }

    #[test]
    fn apply_rejects_wrong_length() {
        let phi = Matrix::identity(3).unwrap();
        assert!(apply(&phi, &[1.0, 2.0]).is_err());
        assert!(apply_transpose(&phi, &[1.0]).is_err());
        assert!(gradient(&phi, &[0.0; 2], &[0.0; 3]).is_err());
    }

    #[test]
    fn adjoint_identity_holds() {
        let phi = seeded_matrix(7, 5, 11);
        let v = seeded_vector(5, 12);
        let u = seeded_vector(7, 13);
        let lhs: f64 = apply(&phi, &v).unwrap().iter().zip(&u).map(|(a, b)| a * b).sum();
        let rhs: f64 =
            v.iter().zip(apply_transpose(&phi, &u).unwrap().iter()).map(|(a, b)| a * b).sum();
        let scale = lhs.abs().max(rhs.abs()).max(1.0);
        assert!((lhs - rhs).abs() / scale < 1e-10, "adjoint identity violated: {lhs} vs {rhs}");
    }

    #[test]
    fn gradient_vanishes_at_consistent_point() {
        let phi = seeded_matrix(4, 6, 21);
        let x = seeded_vector(6, 22);
        let y = apply(&phi, &x).unwrap();
        let g = gradient(&phi, &y, &x).unwrap();
        for gi in g {
            assert!(gi.abs() < 1e-12);
        }
    }

    #[test]
    fn gradient_of_identity_operator_is_residual() {
        let phi = Matrix::identity(3).unwrap();
        let u = [1.0, -2.0, 0.25];
        let g = gradient(&phi, &[0.0; 3], &u).unwrap();
        assert_eq!(g, u.to_vec());
    }

    #[test]
    fn gradient_matches_central_finite_differences() {
        let phi = seeded_matrix(5, 8, 31);
        let y = seeded_vector(5, 32);
        let u = seeded_vector(8, 33);
        let g = gradient(&phi, &y, &u).unwrap();

        let f = |p: &[f64]| -> f64 {
            let r = apply(&phi, p).unwrap();
            0.5 * r.iter().zip(&y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()
        };
        let h = 1e-6;
        for i in 0..u.len() {
            let mut hi = u.to_vec();
            let mut lo = u.to_vec();
            hi[i] += h;
            lo[i] -= h;
            let fd = (f(&hi) - f(&lo)) / (2.0 * h);
            assert!(
                (g[i] - fd).abs() <= 1e-5 * fd.abs().max(1.0),
                "coordinate {i}: analytic {} vs central difference {fd}",
                g[i]
            );
        }
    }

    #[test]
    fn lipschitz_of_identity_is_safety() {
        let phi = Matrix::identity(6).unwrap();
        let stats = estimate_lipschitz(&phi, 100, 1.25, 7).unwrap();
        assert!((stats.spectral_norm_sq - 1.25).abs() < 1e-8);
        assert!(stats.converged);
    }

    #[test]
    fn lipschitz_of_padded_diagonal_matches_exact_eigenvalue() {
        // diag(3, 1) with a zero padding row; lambda_max(Phi^T Phi) = 9.
        let phi = Matrix::new(3, 2, vec![3.0, 0.0, 0.0, 1.0, 0.0, 0.0]).unwrap();
        let stats = estimate_lipschitz(&phi, 100, 1.0, 3).unwrap();
        assert!((stats.spectral_norm_sq - 9.0).abs() / 9.0 < 1e-6);
    }

    #[test]
    fn lipschitz_matches_dense_eigensolver() {
        let phi = seeded_matrix(50, 100, 41);
        let stats = estimate_lipschitz(&phi, 100, 1.0, 42).unwrap();

        let gram = {
            let n = phi.cols();
            let mut g = nalgebra::DMatrix::<f64>::zeros(n, n);
            for i in 0..phi.rows() {
                let row = phi.row(i);
                for a in 0..n {
                    for b in 0..n {
                        g[(a, b)] += row[a] * row[b];
                    }
                }
            }
            g
        };
        let exact = gram
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);

        assert!(
            stats.spectral_norm_sq >= (1.0 - 1e-4) * exact,
            "estimate {} too far below exact {exact}",
            stats.spectral_norm_sq
        );
        assert!(stats.spectral_norm_sq <= exact * (1.0 + 1e-9));
    }

    #[test]
    fn rayleigh_estimates_are_monotone_in_iteration_count() {
        let phi = seeded_matrix(12, 20, 51);
        let mut last = 0.0;
        for iters in 1..=12 {
            let stats = estimate_lipschitz(&phi, iters, 1.0, 52).unwrap();
            assert!(
                stats.spectral_norm_sq >= last - 1e-12 * stats.spectral_norm_sq.max(1.0),
                "Rayleigh quotient decreased at iteration {iters}"
            );
            last = stats.spectral_norm_sq;
        }
    }

    #[test]
    fn lipschitz_rejects_zero_matrix_and_bad_parameters() {
        let zero = Matrix::new(2, 2, vec![0.0; 4]).unwrap();
        assert!(matches!(estimate_lipschitz(&zero, 10, 1.0, 0), Err(CoreError::ZeroOperator)));
        let phi = Matrix::identity(2).unwrap();
        assert!(estimate_lipschitz(&phi, 0, 1.0, 0).is_err());
        assert!(estimate_lipschitz(&phi, 10, 0.9, 0).is_err());
        assert!(estimate_lipschitz(&phi, 10, f64::NAN, 0).is_err());
    }

    #[test]
    fn lipschitz_is_deterministic_for_a_seed() {
        let phi = seeded_matrix(9, 14, 61);
        let a = estimate_lipschitz(&phi, 50, 1.01, 99).unwrap();
        let b = estimate_lipschitz(&phi, 50, 1.01, 99).unwrap();
        assert_eq!(a, b);
        let c = estimate_lipschitz(&phi, 50, 1.01, 100).unwrap();
        assert_eq!(a.spectral_norm_sq > 0.0, c.spectral_norm_sq > 0.0);
    }
}
