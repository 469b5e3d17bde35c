//! Følner sets, sofic completions, Benjamini-Schramm statistics,
//! hyperfinite decompositions, doubling maps and Property A witnesses.

mod bs;
mod doubling;
mod folner;
mod hyperfinite;
mod property_a;

use thiserror::Error;

use crate::graph::GraphError;

pub use bs::{
    bs_distance, bs_histogram, parse_histogram, reference_codes, write_histogram,
    z_vertex_fraction, BsHistogram, ReferenceCodes,
};
pub use doubling::{doubling_maps, doubling_maps_on, verify_violator, DoublingOutcome};
pub use folner::{
    boundary_ratio, complete_to_schreier, folner_search, Completion, FolnerReport, FolnerStrategy,
};
pub use hyperfinite::{hyperfinite_decompose, DecomposeMode, Decomposition};
pub use property_a::{
    ball_defect_bound, property_a_ball_witness, property_a_ray_witness, BallWitnessReport,
    PairDefect, PropertyAWitness,
};

#[derive(Debug, Error)]
pub enum SoficError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("radius mismatch: {0} vs {1}")]
    RadiusMismatch(u32, u32),
    #[error("generator sets differ")]
    GeneratorMismatch,
    #[error("no set with ratio at most {eps} found; best ratio {best}")]
    FolnerBudget { eps: f64, best: f64 },
    #[error("{0}")]
    Invalid(String),
    #[error("malformed histogram at line {line}: {message}")]
    Parse { line: usize, message: String },
}
