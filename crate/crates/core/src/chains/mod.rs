//! Exact rectilinear chains in the cube `Q = [0,1]^d`.
//!
//! A chain is a finite sum of axis-aligned boxes with coefficients in `Z/2`
//! or `Z`. Chains are always kept in a canonical form: coplanar overlapping
//! boxes are refined and merged, so two chains are equal as piecewise-constant
//! coefficient functions exactly when their term maps are equal.
//!
//! Relative classes modulo the boundary `∂Q` are handled by dropping every
//! cell that lies in a facet of the cube ([`RectChain::reduce_rel`]).

mod cell;
mod chain;
mod dump;
mod fill;

pub use cell::{fmt_rational, parse_rational, BoxCell, Extent};
pub use chain::{RectChain, Ring};
pub use dump::{dump_chain, parse_chain_dump};
pub use fill::{
    cone_project, extrude, fill, fill_with, random_relative_cycle, section_and_split,
    section_profile, AxisRule, FillOptions, Section, Side, Slab,
};

use thiserror::Error;

pub type Rational = num_rational::Ratio<i128>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChainError {
    #[error("interval on axis {axis} is empty or reversed")]
    EmptyInterval { axis: usize },
    #[error("cell leaves the unit cube on axis {axis}")]
    OutOfCube { axis: usize },
    #[error("cell has ambient dimension {found}, expected {expected}")]
    AmbientMismatch { expected: usize, found: usize },
    #[error("cell has dimension {found}, expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("0-chains have no boundary in this complex")]
    PointBoundary,
    #[error("malformed chain dump on line {line}: {reason}")]
    Dump { line: usize, reason: String },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FillError {
    #[error("chain of dimension {k} cannot be filled in a cube of dimension {d}")]
    DimensionTooHigh { k: usize, d: usize },
    #[error("chain is not a relative cycle: its boundary leaves the cube boundary")]
    NotRelativeCycle,
    #[error("section value {t} on axis {axis} is not generic")]
    NonGenericSection { axis: usize, t: String },
    #[error("section of a 0-chain is empty-dimensional")]
    PointSection,
    #[error("cone toward side {side:?} on axis {axis}: a cell touches the opposite facet")]
    TouchesOppositeFacet { axis: usize, side: Side },
    #[error("axis {axis} out of range for dimension {d}")]
    BadAxis { axis: usize, d: usize },
    #[error(transparent)]
    Chain(#[from] ChainError),
}
