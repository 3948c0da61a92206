//! Group invariance: deciders for equiregularity and near-properness, the
//! invariant star-refinement, exhaustion pieces, and the metrization pipelines.

mod checks;
mod exhaustion;
mod pipeline;
mod refine;

pub use checks::{
    equireg_search, equiregularity_check, is_invariant_cover, is_invariant_gauge, near_properness_check,
    near_properness_horizon, saturate_cover, translates_meeting, EquiregEntry, EquiregResult, EquiregSearch,
    EquiregWitness, Growth, HorizonNearProper,
};
pub use exhaustion::{exhaustion_decomposition, proper_invariant_cover, Decomposition, DecompositionChecks, ProperCover};
pub use pipeline::{
    default_exhaustion, default_targets, metrize, near_properness_from_gauge, proper_metrize, proper_metrize_horizon, single_metrize, Metrization, PipelineTrace,
    ProperMetrization, SingleMetrization, TargetOutcome, TraceStep, DEFAULT_DEPTH,
};
pub use refine::{refine_chain, stone_star_refine, verify_refinement, RefineTrace, StoneRefinement};
