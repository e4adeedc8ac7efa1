//! Multi-scale diagnostics: scales, Green functions, classifications,
//! dominated functions, sparseness scans, localization and correlators.

mod classify;
mod correlator;
mod dominated;
mod entropy;
mod green;
mod localization;
mod refine;
mod scales;
mod sparseness;

pub use classify::{classify_resonant, classify_singular, singular_threshold, ResonanceClass, SingularityClass};
pub use correlator::{correlator_report, envelope, functional, propagator, CorrelatorReport};
pub use dominated::{dominated_bound, dominated_check, random_dominated, DominationCheck};
pub use entropy::{entropy_bound, equivalence_entropy_check, EntropyCount};
pub use green::{gre_defect, gre_eigenfunction_defect, green, resolvent, Gre, GreDefect, GreenData, Resolvent};
pub use localization::{distance_table, localization_report, EigenLocalization, LocalizationReport};
pub use refine::refine_localized;
pub use scales::{gamma, ScaleLevel, ScaleSequence};
pub use sparseness::{sparseness_scan, SparsenessReport, Violation, ViolationKind};
