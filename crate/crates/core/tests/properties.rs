//! Randomized property checks for the operator algebra, the coordinate prox,
//! and the weight updates.

use approx::assert_relative_eq;
use proptest::collection::vec;
use proptest::prelude::*;
use ramsia_core::{
    apply, apply_transpose, prox_coordinate, update_inter, update_intra, Matrix,
    ProxCoordinateInput,
};

fn finite(range: std::ops::Range<f64>) -> impl Strategy<Value = f64> {
    range.prop_map(|v| if v == 0.0 { 0.0 } else { v })
}

fn matrix_and_vectors() -> impl Strategy<Value = (Matrix, Vec<f64>, Vec<f64>)> {
    (1usize..8, 1usize..8).prop_flat_map(|(m, n)| {
        (
            vec(finite(-10.0..10.0), m * n),
            vec(finite(-10.0..10.0), n),
            vec(finite(-10.0..10.0), m),
        )
            .prop_map(move |(data, v, u)| (Matrix::new(m, n, data).unwrap(), v, u))
    })
}

fn knots() -> impl Strategy<Value = Vec<(f64, f64)>> {
    vec((finite(-5.0..5.0), finite(0.0..3.0)), 1..5)
}

/// The weighted n-l1 penalty restricted to one coordinate, plus the quadratic
/// proximity term.
fn scalar_objective(v: f64, x: f64, knots: &[(f64, f64)]) -> f64 {
    let mut acc = 0.5 * (v - x) * (v - x);
    for (z, c) in knots {
        acc += c * (v - z).abs();
    }
    acc
}

proptest! {
    /// `<Phi v, u> == <v, Phi^T u>` for every matrix and vector pair.
    #[test]
    fn transpose_is_the_adjoint((phi, v, u) in matrix_and_vectors()) {
        let fv = apply(&phi, &v).unwrap();
        let ftu = apply_transpose(&phi, &u).unwrap();
        let lhs: f64 = fv.iter().zip(&u).map(|(a, b)| a * b).sum();
        let rhs: f64 = v.iter().zip(&ftu).map(|(a, b)| a * b).sum();
        let scale = 1.0 + lhs.abs().max(rhs.abs());
        prop_assert!((lhs - rhs).abs() <= 1e-9 * scale);
    }

    /// The closed-form prox is a global minimizer: no point sampled around
    /// it, near it, or at any kink does better.
    #[test]
    fn prox_minimizes_the_scalar_objective(
        x in finite(-8.0..8.0),
        knots in knots(),
    ) {
        let v = prox_coordinate(&ProxCoordinateInput { x_i: x, knots: &knots }).unwrap();
        let best = scalar_objective(v, x, &knots);
        let mut candidates: Vec<f64> = vec![x];
        for (z, _) in &knots {
            candidates.push(*z);
            candidates.push(z - 1e-6);
            candidates.push(z + 1e-6);
        }
        for step in [1e-7, 1e-3, 0.1, 1.0] {
            candidates.push(v - step);
            candidates.push(v + step);
        }
        let lo = candidates.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = candidates.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut t = lo;
        while t <= hi {
            candidates.push(t);
            t += (hi - lo) / 64.0 + 1e-12;
        }
        for c in candidates {
            prop_assert!(
                best <= scalar_objective(c, x, &knots) + 1e-12,
                "candidate {} beats prox output {}", c, v,
            );
        }
    }

    /// Proximal maps of convex functions never expand distances.
    #[test]
    fn prox_is_nonexpansive(
        a in finite(-8.0..8.0),
        b in finite(-8.0..8.0),
        knots in knots(),
    ) {
        let pa = prox_coordinate(&ProxCoordinateInput { x_i: a, knots: &knots }).unwrap();
        let pb = prox_coordinate(&ProxCoordinateInput { x_i: b, knots: &knots }).unwrap();
        prop_assert!((pa - pb).abs() <= (a - b).abs() + 1e-12);
    }

    /// With the single knot at zero the prox must reduce to classical soft
    /// thresholding.
    #[test]
    fn single_zero_knot_is_soft_thresholding(
        x in finite(-8.0..8.0),
        c in finite(0.0..3.0),
    ) {
        let v = prox_coordinate(&ProxCoordinateInput { x_i: x, knots: &[(0.0, c)] }).unwrap();
        let expected = x.signum() * (x.abs() - c).max(0.0);
        assert_relative_eq!(v, expected, epsilon = 1e-12, max_relative = 1e-12);
    }

    /// Intra rows sum to n, inter weights sum to 1, and both are ordered
    /// inversely to their residuals.
    #[test]
    fn weight_updates_normalize_and_order(
        x in vec(finite(-3.0..3.0), 4..24),
        raw_z in vec(finite(-3.0..3.0), 4..24),
        epsilon in finite(0.001..2.0),
    ) {
        let n = x.len().min(raw_z.len());
        let x = &x[..n];
        let z: Vec<f64> = raw_z[..n].to_vec();
        let z_list = vec![z.clone()];

        let intra = update_intra(x, &z_list, epsilon).unwrap();
        for row in &intra {
            let sum: f64 = row.iter().sum();
            assert_relative_eq!(sum, n as f64, max_relative = 1e-12);
            prop_assert!(row.iter().all(|w| *w >= 0.0));
        }
        for i in 0..n {
            for k in 0..n {
                if x[i].abs() < x[k].abs() {
                    prop_assert!(intra[0][i] >= intra[0][k]);
                }
                if (x[i] - z[i]).abs() < (x[k] - z[k]).abs() {
                    prop_assert!(intra[1][i] >= intra[1][k]);
                }
            }
        }

        let inter = update_inter(x, &z_list, &intra, epsilon).unwrap();
        let total: f64 = inter.iter().sum();
        assert_relative_eq!(total, 1.0, max_relative = 1e-12);
        prop_assert!(inter.iter().all(|b| *b >= 0.0));
        let r0: f64 = x.iter().zip(&intra[0]).map(|(xi, w)| w * xi.abs()).sum();
        let r1: f64 = x.iter().zip(&z).zip(&intra[1]).map(|((xi, zi), w)| w * (xi - zi).abs()).sum();
        if r0 < r1 {
            prop_assert!(inter[0] >= inter[1]);
        } else if r1 < r0 {
            prop_assert!(inter[1] >= inter[0]);
        }
    }
}
