//! The contraction pipeline on a concrete coloring.
//!
//! A grid coloring is transferred to a shifted partition of the cube in which
//! at most `d + 1` closed cells meet at any point. Monochromatic connected
//! unions of cells (parts) cover the cube; the nerve of that covering, the
//! face chains `C(σ)` on its simplices, and a contraction family `F` built
//! with the filling operator give cycles `X_i = C_i - Σ_j F(i, j)` with
//! `Σ X_i = [Q]`. Since `[Q]` is not a boundary, some `X_i` has volume at
//! least one, which is what forces a large part.

mod audit;
mod contraction;
mod nerve;
mod partition;
mod parts;
mod skeleton;

pub use audit::{
    assemble_and_audit, certify, AuditReport, CertifyOptions, CertifyJson, IdentityFlags,
    RecursionCheck, SkeletonCheck,
};
pub use contraction::{contraction, ContractionFamily};
pub use nerve::{face_chains, nerve, FaceChains, Nerve, Simplex};
pub use partition::{build_shifted_partition, default_delta, ShiftedCell, ShiftedPartition};
pub use parts::{mono_parts, Part, Parts};
pub use skeleton::{cube_face_volume_direct, skeleton_volume};

use thiserror::Error;

use crate::chains::{ChainError, FillError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NerveError {
    #[error("dimension and grid size must be positive")]
    EmptyParameter,
    #[error("shift {delta} must lie strictly between 0 and 1/(4n)")]
    DeltaOutOfRange { delta: String },
    #[error("shifted cells do not tile the cube: {0}")]
    NotTiling(String),
    #[error("{multiplicity} closed cells meet at one point; at most {limit} allowed")]
    NotSimple { multiplicity: usize, limit: usize },
    #[error("coloring is on a {found_d}-dimensional grid of side {found_n}, partition is {d}-dimensional of side {n}")]
    GridMismatch {
        d: usize,
        n: usize,
        found_d: usize,
        found_n: usize,
    },
    #[error("nerve has a simplex {simplex:?} of dimension {dim}, above the allowed {max}")]
    DimensionExceeded {
        simplex: Vec<usize>,
        dim: usize,
        max: usize,
    },
    #[error("intersection pieces of {simplex:?} overlap; the partition is not generic there")]
    OverlappingPieces { simplex: Vec<usize> },
    #[error("identity {identity} fails at simplex {simplex:?}")]
    IdentityFailed {
        identity: &'static str,
        simplex: Vec<usize>,
    },
    #[error("filling failed at simplex {simplex:?}: {source}")]
    Fill {
        simplex: Vec<usize>,
        source: FillError,
    },
    #[error(transparent)]
    Chain(#[from] ChainError),
}
