pub mod analysis;
pub mod code;
mod enumerate;
pub mod error;
pub mod field;
pub mod geometry;
pub mod linalg;
pub mod matrix;
pub mod reproduce;
pub mod subspace;
pub mod suites;

pub use code::{
    code_from_system, direct_sum, BlockSpec, CodeSpec, GeometricBlock, random_block_code, random_gl, random_gl_qm, rank_weight, support, CodeRecord, Decomposition,
    EquivalenceMap, RankCode, Support, WeightDistribution,
};
pub use enumerate::message;
pub use error::{Error, Result};
pub use field::{ContextDescriptor, FieldContext, FieldElement, FieldPoly, FqBasis};
pub use geometry::{System, SystemRecord};
pub use subspace::{Ctx, Subspace, SubspaceRecord};

/// Default limit on enumerated messages.
pub const DEFAULT_ENUM_CAP: u64 = 1 << 24;
/// Default limit on enumerated projective points.
pub const DEFAULT_PROJ_CAP: u64 = 1 << 16;
