//! Two-level adaptive weight updates.
//!
//! Intra weights reward coordinates where a reference vector agrees with the
//! current iterate: `w_ji` is proportional to `1/(|x_i - z_ji| + eps)` and
//! each row is normalized to sum to `n`. Inter weights then reward reference
//! vectors whose *weighted* residual norm is small: `beta_j` is proportional
//! to `1/(||W_j (x - z_j)||_1 + eps)` and normalized onto the simplex. Row 0
//! always refers to the implicit `z_0 = 0`.

use alloc::vec::Vec;

use crate::error::CoreError;

fn check_epsilon(epsilon: f64) -> Result<(), CoreError> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(CoreError::InvalidParameter("epsilon must be positive and finite"));
    }
    Ok(())
}

fn check_side_infos(n: usize, z_list: &[Vec<f64>]) -> Result<(), CoreError> {
    for z in z_list {
        if z.len() != n {
            return Err(CoreError::DimensionMismatch {
                context: "weight update side information",
                expected: n,
                got: z.len(),
            });
        }
    }
    Ok(())
}

/// One normalized row from the residuals of a single reference vector.
fn intra_row(residuals: impl Iterator<Item = f64>, n: usize, epsilon: f64) -> Vec<f64> {
    let mut row: Vec<f64> = residuals.map(|r| 1.0 / (r + epsilon)).collect();
    let sum: f64 = row.iter().sum();
    let scale = n as f64 / sum;
    for w in row.iter_mut() {
        *w *= scale;
    }
    row
}

/// Computes fresh intra weights for `z_0 = 0` and every side information
/// vector, evaluated at `x`. Row `j` sums to `n` (up to rounding).
pub fn update_intra(
    x: &[f64],
    z_list: &[Vec<f64>],
    epsilon: f64,
) -> Result<Vec<Vec<f64>>, CoreError> {
    check_epsilon(epsilon)?;
    let n = x.len();
    if n == 0 {
        return Err(CoreError::InvalidParameter("weight update needs at least one coordinate"));
    }
    check_side_infos(n, z_list)?;

    let mut rows = Vec::with_capacity(z_list.len() + 1);
    rows.push(intra_row(x.iter().map(|xi| xi.abs()), n, epsilon));
    for z in z_list {
        rows.push(intra_row(x.iter().zip(z).map(|(xi, zi)| (xi - zi).abs()), n, epsilon));
    }
    Ok(rows)
}

/// Computes fresh inter weights from the intra-weighted residual norms,
/// evaluated at the same `x` the intra weights were built from. The result
/// sums to 1 (up to rounding).
pub fn update_inter(
    x: &[f64],
    z_list: &[Vec<f64>],
    intra: &[Vec<f64>],
    epsilon: f64,
) -> Result<Vec<f64>, CoreError> {
    check_epsilon(epsilon)?;
    let n = x.len();
    check_side_infos(n, z_list)?;
    if intra.len() != z_list.len() + 1 {
        return Err(CoreError::DimensionMismatch {
            context: "inter update weight rows",
            expected: z_list.len() + 1,
            got: intra.len(),
        });
    }
    for row in intra {
        if row.len() != n {
            return Err(CoreError::DimensionMismatch {
                context: "inter update weight row length",
                expected: n,
                got: row.len(),
            });
        }
    }

    let mut inter = Vec::with_capacity(intra.len());
    for (j, row) in intra.iter().enumerate() {
        let mut norm = 0.0;
        if j == 0 {
            for (w, xi) in row.iter().zip(x) {
                norm += w * xi.abs();
            }
        } else {
            for ((w, xi), zi) in row.iter().zip(x).zip(&z_list[j - 1]) {
                norm += w * (xi - zi).abs();
            }
        }
        inter.push(1.0 / (norm + epsilon));
    }
    let sum: f64 = inter.iter().sum();
    for b in inter.iter_mut() {
        *b /= sum;
    }
    Ok(inter)
}
