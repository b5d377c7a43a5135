//! Error norms, observed orders and convergence studies.

mod cache;
mod eoc;
mod norms;
mod study;

pub use cache::{
    reference_key, spec_digest, CachedReference, EntryInfo, EntryStatus, ReferenceCache, CACHE_DIR_ENV,
};
pub use eoc::eoc;
pub use norms::{weighted_error, Field, NormEvaluator, NormRoute};
pub use study::{
    convergence_study, error_set, optimality_check, ConvergenceReport, ErrorSet, OptimalityCheck, OrderSet,
    StudyFailure, StudyRow,
};
