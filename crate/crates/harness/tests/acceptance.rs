//! Acceptance suite: the checks this project must pass before shipping.
//!
//! Each test prints one `ACCEPTANCE <k> PASS/FAIL` line (visible under
//! `--nocapture`) and then asserts, so the suite both documents and enforces
//! the bar. Tests 5 and 6 share one full-scale success-probability sweep;
//! everything else runs in seconds.

use std::sync::LazyLock;
use std::time::Duration;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha12Rng;
use ramsia_core::{
    apply, apply_transpose, estimate_lipschitz, gradient, solve, update_inter, update_intra,
    Lipschitz, Matrix, SolverConfig, Variant,
};
use ramsia_harness::{
    generate_instance, run_prox_check, run_sweep, AmplitudeLaw, GeneratorSpec, MatrixLaw,
    ReportFormat, SolverSettings, SweepReport, SweepSpec, VariantSpec,
};

fn report(criterion: usize, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("ACCEPTANCE {criterion} {verdict}: {detail}");
}

/// Criterion 1: the closed-form coordinate prox agrees with a two-stage
/// grid-search minimizer on 1000 randomized cases, within 1e-6, in under 10 s.
#[test]
fn prox_agrees_with_grid_search_oracle() {
    let outcome = run_prox_check(0, 1000).unwrap();
    let pass = outcome.max_deviation <= 1e-6 && outcome.elapsed < Duration::from_secs(10);
    report(
        1,
        pass,
        &format!(
            "1000 prox cases vs grid search, max deviation {:.3e}, elapsed {:?}",
            outcome.max_deviation, outcome.elapsed
        ),
    );
    assert!(pass);
}

/// Soft thresholding, the exact prox of `tau * |v|`.
fn shrink(a: f64, tau: f64) -> f64 {
    a.signum() * (a.abs() - tau).max(0.0)
}

/// Exact prox of `tau * (|v| + |v - z|)` by case analysis on the two kinks:
/// the optimality condition `v - a + tau*s1 + tau*s2 = 0` with signs `s1, s2`
/// admits exactly one consistent case for every `a`.
fn prox_two_terms(a: f64, tau: f64, z: f64) -> f64 {
    let (k1, k2) = if z < 0.0 { (z, 0.0) } else { (0.0, z) };
    if a < k1 - 2.0 * tau {
        a + 2.0 * tau
    } else if a <= k1 {
        k1
    } else if a < k2 {
        a
    } else if a <= k2 + 2.0 * tau {
        k2
    } else {
        a - 2.0 * tau
    }
}

/// Plain FISTA for `1/2 ||Phi x - y||^2 + lambda * ||x||_1`, or with the
/// extra `lambda * ||x - z||_1` term when `z` is given. Written directly from
/// the textbook update rules, sharing nothing with the library loop.
fn reference_iterates(
    phi: &Matrix,
    y: &[f64],
    z: Option<&[f64]>,
    lambda: f64,
    l: f64,
    steps: usize,
) -> Vec<Vec<f64>> {
    let n = phi.cols();
    let tau = lambda / l;
    let mut x = vec![0.0; n];
    let mut u = x.clone();
    let mut t = 1.0_f64;
    let mut iterates = Vec::with_capacity(steps);
    for _ in 0..steps {
        let fu = apply(phi, &u).unwrap();
        let residual: Vec<f64> = fu.iter().zip(y).map(|(a, b)| a - b).collect();
        let grad = apply_transpose(phi, &residual).unwrap();
        let x_new: Vec<f64> = u
            .iter()
            .zip(&grad)
            .enumerate()
            .map(|(i, (ui, gi))| {
                let a = ui - gi / l;
                match z {
                    None => shrink(a, tau),
                    Some(z) => prox_two_terms(a, tau, z[i]),
                }
            })
            .collect();
        let t_next = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
        let coeff = (t - 1.0) / t_next;
        u = x_new.iter().zip(&x).map(|(xn, xo)| xn + coeff * (xn - xo)).collect();
        x = x_new;
        t = t_next;
        iterates.push(x.clone());
    }
    iterates
}

/// Criterion 2: with frozen unit weights the solver reproduces an independent
/// reference implementation of the two baselines step-for-step within 1e-10
/// over 50 iterations on a seeded 100-dimensional instance.
#[test]
fn frozen_variants_match_reference_baselines_step_for_step() {
    let gen = GeneratorSpec {
        n: 100,
        sparsity: 10,
        si_diff_supports: vec![30],
        amplitude_law: AmplitudeLaw::StandardNormal,
        matrix_law: MatrixLaw::NormalizedGaussian,
        seed: 77,
    };
    let inst = generate_instance(&gen, 50, 0).unwrap();
    let lambda = 1e-3;
    let l = estimate_lipschitz(inst.phi(), 500, 1.0, 7).unwrap().spectral_norm_sq;

    let mut worst = 0.0_f64;
    for (variant, num_sis) in [(Variant::PlainL1, 0), (Variant::L1L1, 1)] {
        let view = inst.with_side_infos_truncated(num_sis).unwrap();
        let z = (num_sis == 1).then(|| view.side_infos()[0].clone());
        let reference = reference_iterates(view.phi(), view.y(), z.as_deref(), lambda, l, 50);
        for (k, expected) in reference.iter().enumerate() {
            let cfg = SolverConfig {
                lambda,
                epsilon: 0.1,
                variant,
                stop_tol: 0.0,
                max_iters: k + 1,
                lipschitz: Lipschitz::Explicit(l),
                rng_seed: 0,
            };
            let res = solve(&view, &cfg).unwrap();
            assert_eq!(res.iterations, k + 1);
            for (a, b) in res.x_hat.iter().zip(expected) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    let pass = worst <= 1e-10;
    report(
        2,
        pass,
        &format!(
            "frozen-weight solver vs independent reference, 2 variants x 50 steps, \
             max coordinate deviation {worst:.3e}"
        ),
    );
    assert!(pass);
}

/// Criterion 3: over 1e4 randomized updates every intra row sums to n within
/// 1e-9 * n, every inter simplex sums to 1 within 1e-9, and both levels order
/// inversely to their residuals with zero violations.
#[test]
fn weight_updates_stay_normalized_and_ordered() {
    let mut rng = ChaCha12Rng::seed_from_u64(42);
    let n = 16;
    let mut worst_row = 0.0_f64;
    let mut worst_simplex = 0.0_f64;
    let mut violations = 0_u64;
    for round in 0..10_000 {
        let num_sis = round % 4;
        let eps = [1e-3, 0.1, 1.0][round % 3];
        let draw = |rng: &mut ChaCha12Rng| -> Vec<f64> {
            (0..n)
                .map(|_| {
                    if rng.random_bool(0.25) {
                        0.0
                    } else {
                        rng.random_range(-3.0..3.0)
                    }
                })
                .collect()
        };
        let x = draw(&mut rng);
        let z_list: Vec<Vec<f64>> = (0..num_sis).map(|_| draw(&mut rng)).collect();

        let intra = update_intra(&x, &z_list, eps).unwrap();
        let residual = |j: usize, i: usize| {
            if j == 0 {
                x[i].abs()
            } else {
                (x[i] - z_list[j - 1][i]).abs()
            }
        };
        for (j, row) in intra.iter().enumerate() {
            let sum: f64 = row.iter().sum();
            worst_row = worst_row.max((sum - n as f64).abs());
            for i in 0..n {
                for k in 0..n {
                    if residual(j, i) < residual(j, k) && row[i] < row[k] {
                        violations += 1;
                    }
                }
            }
        }

        let inter = update_inter(&x, &z_list, &intra, eps).unwrap();
        let total: f64 = inter.iter().sum();
        worst_simplex = worst_simplex.max((total - 1.0).abs());
        let norms: Vec<f64> = (0..=num_sis)
            .map(|j| (0..n).map(|i| intra[j][i] * residual(j, i)).sum::<f64>())
            .collect();
        for j in 0..=num_sis {
            for k in 0..=num_sis {
                if norms[j] < norms[k] && inter[j] < inter[k] {
                    violations += 1;
                }
            }
        }
    }
    let pass =
        worst_row <= 1e-9 * n as f64 && worst_simplex <= 1e-9 && violations == 0;
    report(
        3,
        pass,
        &format!(
            "1e4 weight updates: worst row-sum deviation {worst_row:.3e}, worst simplex \
             deviation {worst_simplex:.3e}, ordering violations {violations}"
        ),
    );
    assert!(pass);
}

/// Criterion 4: the analytic data-fidelity gradient matches central finite
/// differences within 1e-5 relative, per coordinate, on 20 seeded instances.
#[test]
fn gradient_matches_central_finite_differences() {
    let mut worst = 0.0_f64;
    for seed in 0..20 {
        let gen = GeneratorSpec {
            n: 24,
            sparsity: 6,
            si_diff_supports: vec![],
            amplitude_law: AmplitudeLaw::StandardNormal,
            matrix_law: MatrixLaw::NormalizedGaussian,
            seed,
        };
        let inst = generate_instance(&gen, 12, 0).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(seed ^ 0x5eed);
        let u: Vec<f64> = (0..24).map(|_| rng.random_range(-2.0..2.0)).collect();
        let g = gradient(inst.phi(), inst.y(), &u).unwrap();
        let f = |v: &[f64]| -> f64 {
            let fv = apply(inst.phi(), v).unwrap();
            0.5 * fv.iter().zip(inst.y()).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()
        };
        let h = 1e-6;
        for i in 0..24 {
            let mut up = u.clone();
            let mut down = u.clone();
            up[i] += h;
            down[i] -= h;
            let fd = (f(&up) - f(&down)) / (2.0 * h);
            worst = worst.max((g[i] - fd).abs() / fd.abs());
        }
    }
    let pass = worst <= 1e-5;
    report(
        4,
        pass,
        &format!("20 instances, worst per-coordinate relative deviation {worst:.3e}"),
    );
    assert!(pass);
}

/// The full-scale success-probability sweep shared by the two claims below:
/// n = 1000, 100 nonzeros, three side informations differing in 300 positions
/// (three times the signal sparsity), m from 250 to 600, 20 trials per cell.
static FULL_SWEEP: LazyLock<SweepReport> = LazyLock::new(|| {
    let gen = GeneratorSpec {
        n: 1000,
        sparsity: 100,
        si_diff_supports: vec![300, 300, 300],
        amplitude_law: AmplitudeLaw::StandardNormal,
        matrix_law: MatrixLaw::NormalizedGaussian,
        seed: 0,
    };
    let sweep = SweepSpec {
        m_values: (250..=600).step_by(50).collect(),
        trials: 20,
        success_threshold: 1e-3,
        variants: vec![
            VariantSpec { variant: Variant::PlainL1, num_sis: 0 },
            VariantSpec { variant: Variant::L1L1, num_sis: 1 },
            VariantSpec { variant: Variant::Ramsia, num_sis: 1 },
            VariantSpec { variant: Variant::Ramsia, num_sis: 2 },
            VariantSpec { variant: Variant::Ramsia, num_sis: 3 },
        ],
        // No tolerance stop: near the transition the objective flattens
        // below any tolerance while the support is still wrong, which would
        // freeze runs a factor of 2 in error above the success threshold.
        // The budget covers the slowest observed crossings (about 12.5k
        // iterations, adaptive variants at m = 250) with margin.
        solver: SolverSettings { stop_tol: 0.0, max_iters: 14_000, ..SolverSettings::default() },
    };
    run_sweep(&gen, &sweep, 1).expect("full-scale sweep failed")
});

fn successes(report: &SweepReport, variant: Variant, num_sis: usize, m: usize) -> u64 {
    report
        .cells
        .iter()
        .find(|c| c.variant == variant && c.num_sis == num_sis && c.m == m)
        .unwrap_or_else(|| panic!("missing cell {variant} ({num_sis} SIs) at m={m}"))
        .successes
}

fn sweep_table(rep: &SweepReport) -> String {
    let ms: Vec<usize> = (250..=600).step_by(50).collect();
    let mut out = String::new();
    for (variant, num_sis, label) in [
        (Variant::PlainL1, 0, "plain"),
        (Variant::L1L1, 1, "l1-l1"),
        (Variant::Ramsia, 1, "r-1si"),
        (Variant::Ramsia, 2, "r-2si"),
        (Variant::Ramsia, 3, "r-3si"),
    ] {
        let row: Vec<String> = ms
            .iter()
            .map(|&m| format!("{}", successes(rep, variant, num_sis, m)))
            .collect();
        out.push_str(&format!(" [{label}: {}]", row.join(",")));
    }
    out
}

/// Criterion 5: more side information raises the success probability. At
/// every m the three adaptive runs order by side-information count (one
/// inversion of at most one trial allowed per adjacent pair), and the
/// one-side-information run strictly beats plain l1 at three or more m.
#[test]
fn more_side_information_raises_success_probability() {
    let rep = &*FULL_SWEEP;
    let ms: Vec<usize> = (250..=600).step_by(50).collect();
    let mut pair_failures = Vec::new();
    for (hi, lo, name) in [(3, 2, "3si vs 2si"), (2, 1, "2si vs 1si")] {
        let mut inversions = 0;
        let mut too_large = 0;
        for &m in &ms {
            let a = successes(rep, Variant::Ramsia, hi, m);
            let b = successes(rep, Variant::Ramsia, lo, m);
            if a < b {
                inversions += 1;
                if b - a > 1 {
                    too_large += 1;
                }
            }
        }
        if inversions > 1 || too_large > 0 {
            pair_failures.push(format!(
                "{name}: {inversions} inversions, {too_large} beyond one trial"
            ));
        }
    }
    let strictly_better = ms
        .iter()
        .filter(|&&m| {
            successes(rep, Variant::Ramsia, 1, m) > successes(rep, Variant::PlainL1, 0, m)
        })
        .count();
    let pass = pair_failures.is_empty() && strictly_better >= 3;
    report(
        5,
        pass,
        &format!(
            "successes of 20 at m=250..600:{} ; adaptive 1-SI strictly above plain at \
             {strictly_better}/8 m values{}{}",
            sweep_table(rep),
            if pair_failures.is_empty() { "" } else { "; ordering failures: " },
            pair_failures.join("; "),
        ),
    );
    assert!(pass);
}

/// Criterion 6: a side information differing in three times the signal's
/// support drags the fixed-weight baseline down to plain l1 or below at
/// mid-range m, while the adaptive weights shrug the same vector off: never
/// more than one trial below plain, and strictly above it at two or more m.
#[test]
fn poor_side_information_does_not_poison_adaptive_weights() {
    let rep = &*FULL_SWEEP;
    let ms: Vec<usize> = (250..=600).step_by(50).collect();
    let mid: Vec<usize> = vec![350, 400, 450, 500];

    let l1l1_not_better = mid.iter().all(|&m| {
        successes(rep, Variant::L1L1, 1, m) <= successes(rep, Variant::PlainL1, 0, m) + 1
    });
    let adaptive_never_hurt = ms.iter().all(|&m| {
        successes(rep, Variant::Ramsia, 1, m) + 1 >= successes(rep, Variant::PlainL1, 0, m)
    });
    let strictly_better = ms
        .iter()
        .filter(|&&m| {
            successes(rep, Variant::Ramsia, 1, m) > successes(rep, Variant::PlainL1, 0, m)
        })
        .count();
    let pass = l1l1_not_better && adaptive_never_hurt && strictly_better >= 2;
    report(
        6,
        pass,
        &format!(
            "fixed-weight baseline within one trial of plain at mid-range m: {}; adaptive \
             1-SI never more than one trial below plain: {}; strictly above at \
             {strictly_better}/8 m values",
            l1l1_not_better, adaptive_never_hurt,
        ),
    );
    assert!(pass);
}

/// Criterion 7: with a perfect side information (z = x) the adaptive solver
/// recovers the signal from one-tenth as many measurements as dimensions on
/// at least 19 of 20 seeded trials.
#[test]
fn perfect_side_information_recovers_at_one_tenth_measurements() {
    let gen = GeneratorSpec {
        n: 500,
        sparsity: 25,
        si_diff_supports: vec![0],
        amplitude_law: AmplitudeLaw::StandardNormal,
        matrix_law: MatrixLaw::NormalizedGaussian,
        seed: 0,
    };
    let sweep = SweepSpec {
        m_values: vec![50],
        trials: 20,
        success_threshold: 1e-3,
        variants: vec![VariantSpec { variant: Variant::Ramsia, num_sis: 1 }],
        solver: SolverSettings {
            lambda: 1e-3,
            max_iters: 20_000,
            ..SolverSettings::default()
        },
    };
    let rep = run_sweep(&gen, &sweep, 1).unwrap();
    let got = successes(&rep, Variant::Ramsia, 1, 50);
    let pass = got >= 19;
    report(7, pass, &format!("n=500, m=50, perfect side information: {got}/20 recoveries"));
    assert!(pass);
}

/// Criterion 8: identical seeds give byte-identical exported reports, for
/// worker counts 1 and 8.
#[test]
fn reports_are_byte_identical_across_worker_counts() {
    let gen = GeneratorSpec {
        n: 200,
        sparsity: 20,
        si_diff_supports: vec![60, 60, 60],
        amplitude_law: AmplitudeLaw::StandardNormal,
        matrix_law: MatrixLaw::NormalizedGaussian,
        seed: 3,
    };
    let sweep = SweepSpec {
        m_values: vec![80, 100],
        trials: 3,
        success_threshold: 1e-3,
        variants: ramsia_harness::standard_variants(),
        solver: SolverSettings { max_iters: 3000, ..SolverSettings::default() },
    };
    let dir = tempfile::tempdir().unwrap();
    let mut bytes = Vec::new();
    for (idx, workers) in [1usize, 8].iter().enumerate() {
        let rep = run_sweep(&gen, &sweep, *workers).unwrap();
        let json = dir.path().join(format!("report-{idx}.json"));
        let csv = dir.path().join(format!("report-{idx}.csv"));
        ramsia_harness::export_report(&rep, &json, ReportFormat::Json).unwrap();
        ramsia_harness::export_report(&rep, &csv, ReportFormat::Csv).unwrap();
        bytes.push((std::fs::read(json).unwrap(), std::fs::read(csv).unwrap()));
    }
    let pass = bytes[0] == bytes[1];
    report(
        8,
        pass,
        &format!(
            "workers 1 vs 8: JSON {} bytes vs {} bytes, {}",
            bytes[0].0.len(),
            bytes[1].0.len(),
            if pass { "identical" } else { "DIFFER" },
        ),
    );
    assert!(pass);
}
