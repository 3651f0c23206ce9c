//! Dense and tailed operators, projection pairs and their invariants.

mod completion;
mod pair;
mod tail;
mod tailed;

pub use completion::{complete_to_isometry, Completion};
pub use pair::{HalmosForm, IntersectionDims, InvertibilityReport, ProjectionPair};
pub use tail::{Cycle, TailPattern};
pub(crate) use tail::{bit_from, TailDoc};
pub use tailed::{
    restricted_index, validate_projection, DenseProjection, FredholmData, TailedOperator,
    TailedProjection, ValidationReport, PROJECTION_TOL,
};
