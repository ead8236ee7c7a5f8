use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ramsia_core::{solve, Lipschitz, SolverConfig, Variant};
use ramsia_harness::{
    export_report, generate_instance, read_instance, relative_error, report_csv, run_prox_check,
    run_sweep, solver_seed, write_instance, GeneratorSpec, HarnessError, InstanceManifest, Preset,
    ReportFormat, SolverSettings, SweepSpec, VariantSpec,
};

#[derive(Parser)]
#[command(
    name = "ramsia",
    version,
    about = "Sparse reconstruction with side information: instance generation, \
             single reconstructions, and success-probability benchmarks."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PresetArg {
    /// n = 1000, 100 nonzeros, 3 side informations, 100 trials per cell.
    Paper,
    /// n = 200, 20 nonzeros, 3 side informations, 20 trials per cell.
    Desk,
}

impl From<PresetArg> for Preset {
    fn from(p: PresetArg) -> Preset {
        match p {
            PresetArg::Paper => Preset::Paper,
            PresetArg::Desk => Preset::Desk,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    /// Plain l1 minimization, no side information.
    PlainL1,
    /// Fixed unit weights on the zero prior and one side information.
    L1L1,
    /// Adaptive two-level weights over all given side informations.
    Ramsia,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Variant {
        match v {
            VariantArg::PlainL1 => Variant::PlainL1,
            VariantArg::L1L1 => Variant::L1L1,
            VariantArg::Ramsia => Variant::Ramsia,
        }
    }
}

fn default_num_sis(variant: Variant, available: usize) -> usize {
    match variant {
        Variant::PlainL1 => 0,
        Variant::L1L1 => 1,
        Variant::Ramsia => available,
    }
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic instance bundle (phi, y, side informations,
    /// ground truth, manifest) to a directory.
    Generate(GenerateArgs),
    /// Solve one instance bundle and print the reconstruction error.
    Reconstruct(ReconstructArgs),
    /// Run a success-probability sweep and export report.csv/report.json.
    Benchmark(BenchmarkArgs),
    /// Audit the closed-form prox against a grid-search oracle.
    ProxCheck(ProxCheckArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Output directory for the bundle.
    #[arg(long, default_value = "instance")]
    out: PathBuf,
    /// Start from a named profile; explicit flags below override its fields.
    #[arg(long, value_enum)]
    preset: Option<PresetArg>,
    /// Signal dimension [default: 200, or the preset's].
    #[arg(long)]
    n: Option<usize>,
    /// Number of nonzeros in the signal [default: 20, or the preset's].
    #[arg(long)]
    sparsity: Option<usize>,
    /// Diff support per side information, comma separated
    /// [default: 60,60,60, or the preset's].
    #[arg(long, value_delimiter = ',')]
    si_diffs: Option<Vec<usize>>,
    /// Measurement count.
    #[arg(long, default_value_t = 100)]
    m: usize,
    /// Trial index within the seeded family.
    #[arg(long, default_value_t = 0)]
    trial: u64,
    /// Master seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Regularization weight recorded in the manifest.
    #[arg(long, default_value_t = 1e-5)]
    lambda: f64,
    /// Weight smoothing constant recorded in the manifest.
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
}

#[derive(Args)]
struct ReconstructArgs {
    /// Instance bundle directory (as written by `generate`).
    dir: PathBuf,
    #[arg(long, value_enum, default_value_t = VariantArg::Ramsia)]
    variant: VariantArg,
    /// Side informations to use [default: all in the bundle for ramsia,
    /// 1 for l1-l1, 0 for plain-l1].
    #[arg(long)]
    num_sis: Option<usize>,
    /// Regularization weight [default: the manifest's].
    #[arg(long)]
    lambda: Option<f64>,
    /// Weight smoothing constant [default: the manifest's].
    #[arg(long)]
    epsilon: Option<f64>,
    /// Relative objective variation below which to stop; 0 disables the
    /// tolerance stop and runs the full iteration budget.
    #[arg(long, default_value_t = 1e-8)]
    stop_tol: f64,
    #[arg(long, default_value_t = 10_000)]
    max_iters: usize,
    /// Seed for the step-size estimation [default: derived from the
    /// manifest seeds].
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct BenchmarkArgs {
    /// Start from a named profile; explicit flags below override its fields.
    #[arg(long, value_enum)]
    preset: Option<PresetArg>,
    /// Signal dimension [default: 200, or the preset's].
    #[arg(long)]
    n: Option<usize>,
    /// Number of nonzeros in the signal [default: 20, or the preset's].
    #[arg(long)]
    sparsity: Option<usize>,
    /// Diff support per side information, comma separated
    /// [default: 60,60,60, or the preset's].
    #[arg(long, value_delimiter = ',')]
    si_diffs: Option<Vec<usize>>,
    /// Measurement counts to sweep, comma separated
    /// [default: 50,60,...,120, or the preset's].
    #[arg(long, value_delimiter = ',')]
    m_list: Option<Vec<usize>>,
    /// Trials per cell [default: 20, or the preset's].
    #[arg(long)]
    trials: Option<u64>,
    /// Success threshold on the relative error [default: 0.001].
    #[arg(long)]
    threshold: Option<f64>,
    /// Regularization weight [default: 0.00001].
    #[arg(long)]
    lambda: Option<f64>,
    /// Weight smoothing constant [default: 0.1].
    #[arg(long)]
    epsilon: Option<f64>,
    /// Relative objective variation below which to stop; 0 disables the
    /// tolerance stop [default: 0, the full iteration budget].
    #[arg(long)]
    stop_tol: Option<f64>,
    /// Iteration budget per reconstruction [default: 20000].
    #[arg(long)]
    max_iters: Option<usize>,
    /// Restrict the run to a single variant
    /// [default: plain-l1, l1-l1, and ramsia with 1, 2, and 3 side informations].
    #[arg(long, value_enum)]
    variant: Option<VariantArg>,
    /// Side informations for --variant [default: variant-dependent].
    #[arg(long, requires = "variant")]
    num_sis: Option<usize>,
    /// Master seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads. The report is identical for any worker count.
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Directory for report.csv and report.json.
    #[arg(long, default_value = "reports")]
    out: PathBuf,
}

#[derive(Args)]
struct ProxCheckArgs {
    /// Number of randomized cases.
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Largest allowed disagreement with the grid search.
    #[arg(long, default_value_t = 1e-6)]
    tolerance: f64,
}

fn resolve_generator(
    preset: Option<PresetArg>,
    n: Option<usize>,
    sparsity: Option<usize>,
    si_diffs: Option<Vec<usize>>,
    seed: u64,
) -> GeneratorSpec {
    let mut gen = Preset::from(preset.unwrap_or(PresetArg::Desk)).generator(seed);
    if let Some(n) = n {
        gen.n = n;
    }
    if let Some(s) = sparsity {
        gen.sparsity = s;
    }
    if let Some(d) = si_diffs {
        gen.si_diff_supports = d;
    }
    gen
}

fn generate(args: GenerateArgs) -> Result<(), HarnessError> {
    let gen = resolve_generator(args.preset, args.n, args.sparsity, args.si_diffs, args.seed);
    let inst = generate_instance(&gen, args.m, args.trial)?;
    let manifest = InstanceManifest {
        n: inst.n(),
        m: inst.m(),
        num_side_infos: inst.num_side_infos(),
        seed: args.seed,
        trial: args.trial,
        lambda: args.lambda,
        epsilon: args.epsilon,
        has_x_true: true,
    };
    write_instance(&args.out, &inst, &manifest)?;
    println!(
        "wrote {} (n={}, m={}, side informations={})",
        args.out.display(),
        inst.n(),
        inst.m(),
        inst.num_side_infos()
    );
    Ok(())
}

fn reconstruct(args: ReconstructArgs) -> Result<(), HarnessError> {
    let (inst, manifest) = read_instance(&args.dir)?;
    let variant = Variant::from(args.variant);
    let num_sis =
        args.num_sis.unwrap_or_else(|| default_num_sis(variant, inst.num_side_infos()));
    let view = inst.with_side_infos_truncated(num_sis)?;
    let cfg = SolverConfig {
        lambda: args.lambda.unwrap_or(manifest.lambda),
        epsilon: args.epsilon.unwrap_or(manifest.epsilon),
        variant,
        stop_tol: args.stop_tol,
        max_iters: args.max_iters,
        lipschitz: Lipschitz::default(),
        rng_seed: args
            .seed
            .unwrap_or_else(|| solver_seed(manifest.seed, manifest.m, manifest.trial)),
    };
    let res = solve(&view, &cfg)?;
    println!("variant = {variant} with {num_sis} side informations");
    println!("iterations = {} ({})", res.iterations, res.termination);
    if let Some(h) = res.objective_trace.last() {
        println!("objective = {h}");
    }
    match inst.x_true() {
        Some(x) => println!("relative_error = {}", relative_error(&res.x_hat, x)),
        None => println!("relative_error = unknown (bundle has no ground truth)"),
    }
    Ok(())
}

fn benchmark(args: BenchmarkArgs) -> Result<(), HarnessError> {
    let gen = resolve_generator(args.preset, args.n, args.sparsity, args.si_diffs, args.seed);
    let mut sweep: SweepSpec = Preset::from(args.preset.unwrap_or(PresetArg::Desk)).sweep();
    if let Some(m) = args.m_list {
        sweep.m_values = m;
    }
    if let Some(t) = args.trials {
        sweep.trials = t;
    }
    if let Some(t) = args.threshold {
        sweep.success_threshold = t;
    }
    let base = sweep.solver.clone();
    sweep.solver = SolverSettings {
        lambda: args.lambda.unwrap_or(base.lambda),
        epsilon: args.epsilon.unwrap_or(base.epsilon),
        stop_tol: args.stop_tol.unwrap_or(base.stop_tol),
        max_iters: args.max_iters.unwrap_or(base.max_iters),
        lipschitz: base.lipschitz,
    };
    if let Some(v) = args.variant {
        let variant = Variant::from(v);
        let num_sis = args
            .num_sis
            .unwrap_or_else(|| default_num_sis(variant, gen.si_diff_supports.len()));
        sweep.variants = vec![VariantSpec { variant, num_sis }];
    }

    let report = run_sweep(&gen, &sweep, args.workers)?;
    std::fs::create_dir_all(&args.out).map_err(|e| HarnessError::Io {
        path: args.out.clone(),
        source: e,
    })?;
    let csv_path = args.out.join("report.csv");
    let json_path = args.out.join("report.json");
    export_report(&report, &csv_path, ReportFormat::Csv)?;
    export_report(&report, &json_path, ReportFormat::Json)?;
    print!("{}", report_csv(&report));
    println!("wrote {} and {}", csv_path.display(), json_path.display());
    Ok(())
}

fn prox_check(args: ProxCheckArgs) -> Result<(), HarnessError> {
    let outcome = run_prox_check(args.seed, args.trials)?;
    println!(
        "cases = {}, max deviation = {:.3e} (case {}), elapsed = {:?}",
        outcome.cases, outcome.max_deviation, outcome.worst_case, outcome.elapsed
    );
    if outcome.max_deviation > args.tolerance {
        eprintln!("FAIL: deviation exceeds tolerance {:.3e}", args.tolerance);
        std::process::exit(1);
    }
    println!("PASS (tolerance {:.3e})", args.tolerance);
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(args) => generate(args),
        Command::Reconstruct(args) => reconstruct(args),
        Command::Benchmark(args) => benchmark(args),
        Command::ProxCheck(args) => prox_check(args),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        let mut source = std::error::Error::source(&e);
        while let Some(s) = source {
            eprintln!("  caused by: {s}");
            source = s.source();
        }
        std::process::exit(1);
    }
}
