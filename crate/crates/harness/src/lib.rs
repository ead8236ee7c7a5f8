//! Benchmark harness for the `ramsia-core` reconstruction library: seeded
//! instance generation, success-probability sweeps over the measurement
//! count, file formats for instances and reports, and a brute-force prox
//! oracle.
//!
//! Everything is deterministic: an instance is a pure function of
//! `(GeneratorSpec, m, trial)`, and a [`sweep::SweepReport`] is
//! byte-reproducible from its specs for any worker count.

pub mod error;
pub mod gen;
pub mod io;
pub mod oracle;
pub mod presets;
pub mod sweep;

pub use error::HarnessError;
pub use gen::{generate_instance, instance_seed, solver_seed, AmplitudeLaw, GeneratorSpec, MatrixLaw};
pub use io::{
    export_report, parse_vectors, read_instance, read_vectors, report_csv, write_instance,
    write_vectors, InstanceManifest, ReportFormat,
};
pub use oracle::{grid_minimize, random_cases, run_prox_check, ProxCase, ProxCheckOutcome};
pub use presets::{standard_variants, Preset};
pub use sweep::{
    relative_error, run_sweep, CellSummary, RunMetadata, SolverSettings, SweepReport, SweepSpec,
    VariantSpec,
};
