//! Exact proximal operator of the weighted multi-reference l1 penalty.
//!
//! The penalty is separable, so the vector prox reduces to minimizing, per
//! coordinate,
//!
//! ```text
//! h(v) = sum_j c_j |v - z_j| + 1/2 (v - x_i)^2
//! ```
//!
//! with knots `z_j` and non-negative coefficients `c_j = (lambda/L) beta_j
//! w_ji`. `h` is strictly convex and piecewise quadratic: its minimizer lies
//! either strictly inside an open interval between adjacent knots, where it is
//! `x_i` shifted by the signed coefficient sum, or exactly at a knot, where
//! the subgradient interval brackets zero. Both cases are resolved by a
//! linear scan over the sorted knots.

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::error::CoreError;
use crate::model::WeightState;

/// One coordinate's prox problem: the point `x_i` after the gradient step and
/// the `(z, coeff)` knot list, one knot per reference vector (`z_0 = 0`
/// appears explicitly here; callers assemble it).
#[derive(Clone, Copy, Debug)]
pub struct ProxCoordinateInput<'a> {
    pub x_i: f64,
    pub knots: &'a [(f64, f64)],
}

/// Returns the unique minimizer of `h(v)`.
///
/// Zero-coefficient knots do not create kinks and are dropped; if every
/// coefficient is zero the quadratic term alone decides and `x_i` is
/// returned. Errors on an empty knot list, non-finite inputs, or negative
/// coefficients.
pub fn prox_coordinate(inp: &ProxCoordinateInput) -> Result<f64, CoreError> {
    let mut scratch = Vec::with_capacity(inp.knots.len());
    prox_with_scratch(inp.x_i, inp.knots, &mut scratch)
}

pub(crate) fn prox_with_scratch(
    x: f64,
    knots: &[(f64, f64)],
    active: &mut Vec<(f64, f64)>,
) -> Result<f64, CoreError> {
    if knots.is_empty() {
        return Err(CoreError::EmptyKnots);
    }
    if !x.is_finite() {
        return Err(CoreError::NonFinite { context: "prox point" });
    }
    active.clear();
    for &(z, c) in knots {
        if !z.is_finite() || !c.is_finite() {
            return Err(CoreError::NonFinite { context: "prox knots" });
        }
        if c < 0.0 {
            return Err(CoreError::InvalidParameter("prox coefficients must be non-negative"));
        }
        if c > 0.0 {
            active.push((z, c));
        }
    }
    if active.is_empty() {
        return Ok(x);
    }
    active.sort_unstable_by(|a, b| a.0.partial_cmp(&b.0).expect("knots are finite"));

    // Merge duplicate z-values, summing their coefficients.
    let mut w = 0;
    for r in 1..active.len() {
        if active[r].0 == active[w].0 {
            active[w].1 += active[r].1;
        } else {
            w += 1;
            active[w] = active[r];
        }
    }
    active.truncate(w + 1);

    let k = active.len();
    let total: f64 = active.iter().map(|knot| knot.1).sum();

    // Interval case: within the open interval with `below` knots at or below
    // it, the kink terms differentiate to sum(c_j, z_j below) - sum(c_j, z_j
    // above), so the stationary point is x shifted by that signed sum. Accept
    // only if it actually lands strictly inside the interval.
    let mut prefix = 0.0;
    for below in 0..=k {
        let v = x - (2.0 * prefix - total);
        let left_ok = below == 0 || v > active[below - 1].0;
        let right_ok = below == k || v < active[below].0;
        if left_ok && right_ok {
            return Ok(v);
        }
        if below < k {
            prefix += active[below].1;
        }
    }

    // Knot case: the minimizer sits exactly at knot z_l when the subgradient
    // interval there brackets zero, i.e. the stationary points of the two
    // adjacent intervals bracket z_l (closed band in x).
    let mut prefix = 0.0;
    for &(z, c) in active.iter() {
        let s_left = 2.0 * prefix - total;
        let s_right = 2.0 * (prefix + c) - total;
        if z + s_left <= x && x <= z + s_right {
            return Ok(z);
        }
        prefix += c;
    }

    // Unreachable for finite inputs: adjacent interval rejections force the
    // knot band between them to hold. Kept as an error for overflow safety.
    Err(CoreError::NonFinite { context: "prox case analysis" })
}

/// Applies [`prox_coordinate`] to every coordinate, assembling the knot list
/// `(0, c_0), (z_1i, c_1), ..., (z_Ji, c_J)` with `c_j = lam_over_l * beta_j *
/// w_ji`.
pub fn prox_vector(
    x: &[f64],
    w: &WeightState,
    side_infos: &[Vec<f64>],
    lam_over_l: f64,
) -> Result<Vec<f64>, CoreError> {
    if !(lam_over_l.is_finite() && lam_over_l > 0.0) {
        return Err(CoreError::InvalidParameter("lam_over_l must be positive and finite"));
    }
    let n = x.len();
    if w.n() != n {
        return Err(CoreError::DimensionMismatch {
            context: "prox weights",
            expected: n,
            got: w.n(),
        });
    }
    if w.num_slots() != side_infos.len() + 1 {
        return Err(CoreError::DimensionMismatch {
            context: "prox weight slots",
            expected: side_infos.len() + 1,
            got: w.num_slots(),
        });
    }
    for z in side_infos {
        if z.len() != n {
            return Err(CoreError::DimensionMismatch {
                context: "prox side information",
                expected: n,
                got: z.len(),
            });
        }
    }

    let intra = w.intra();
    let inter = w.inter();
    let mut knots: Vec<(f64, f64)> = Vec::with_capacity(inter.len());
    let mut scratch: Vec<(f64, f64)> = Vec::with_capacity(inter.len());
    let mut out = Vec::with_capacity(n);
    for (i, &xi) in x.iter().enumerate() {
        knots.clear();
        knots.push((0.0, lam_over_l * inter[0] * intra[0][i]));
        for ((z, wj), bj) in side_infos.iter().zip(&intra[1..]).zip(&inter[1..]) {
            knots.push((z[i], lam_over_l * bj * wj[i]));
        }
        match prox_with_scratch(xi, &knots, &mut scratch) {
            Ok(v) => out.push(v),
            Err(source) => {
                return Err(CoreError::ProxCoordinate { index: i, source: Box::new(source) })
            }
        }
    }
    Ok(out)
}
