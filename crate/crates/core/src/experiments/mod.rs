//! Replicated experiments and the statistics that judge them.

pub mod coupling;
pub mod diagnostics;
pub mod ensemble;
pub mod existence;
pub mod frontier;
pub mod kappa;
pub mod stats;

pub use coupling::{coupling_test, CouplingReport};
pub use diagnostics::{boundary_classified_fires, maxima_diagnostics, MaximaDiagnostic};
pub use ensemble::{
    run_ensemble, EnsembleOutcome, EnsembleSpec, ExperimentError, ExperimentKind, FailureEntry, Provenance,
    Runner, StatResult,
};
pub use existence::{dichotomy_experiment, existence_experiment, DichotomyReport, ExistenceReport};
pub use frontier::{burn_ratio_experiment, jump_law_experiment, stop_rate_experiment};
pub use kappa::{kappa_experiment, m1_law_experiment};
