//! A workbench for finite nonpositively curved cube complexes.
//!
//! The crate is organized around a handful of combinatorial kernels:
//! cube complexes with explicit face maps ([`complex`]), hyperplanes and
//! midcube complexes ([`hyperplane`]), cubical maps and local isometries
//! ([`cmap`]), universal-cover developments ([`develop`]), fiber products
//! ([`fiber`]), piece enumeration and C'(α) certificates ([`smallcancel`]),
//! Stallings graphs over a bouquet ([`freegroup`]), the quotient pipeline
//! ([`pipeline`]), wallspace structures and B(6) certificates
//! ([`wallspace`]), and dual cube complexes of finite wallspaces ([`dual`]).
//!
//! Every checker returns a [`cert::Certificate`]: pass, fail with a
//! re-checkable witness, or inconclusive with the exhausted bound.

pub mod cert;
pub mod cmap;
pub mod complex;
pub mod develop;
pub mod dual;
pub mod fiber;
pub mod fixtures;
pub mod freegroup;
pub mod hyperplane;
pub mod io;
pub mod pipeline;
pub mod smallcancel;
pub mod wallspace;

mod unionfind;

pub use cert::{Certificate, Status};
pub use cmap::CubicalMap;
pub use complex::CubeComplex;

/// Errors shared across the crate. Checkers that can "fail honestly"
/// return a fail [`Certificate`] instead; `Error` is for inputs that are
/// structurally unusable.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("dangling face: dimension {dim} cube {cube} face slot {face}")]
    DanglingFace { dim: usize, cube: u32, face: usize },
    #[error("incompatible faces on dimension {dim} cube {cube}, coordinates {i} and {j}")]
    IncompatibleFaces { dim: usize, cube: u32, i: usize, j: usize },
    #[error("malformed cube: dimension {dim} cube {cube}: {reason}")]
    MalformedCube { dim: usize, cube: u32, reason: String },
    #[error("unknown vertex {0}")]
    UnknownVertex(u32),
    #[error("unknown cell: dimension {dim} id {id}")]
    UnknownCell { dim: usize, id: u32 },
    #[error("complex is not connected")]
    NotConnected,
    #[error("complex is not nonpositively curved")]
    NotNpc,
    #[error("map is not a valid cubical map: {0}")]
    MalformedMap(String),
    #[error("map is not a local isometry")]
    NotLocalIsometry,
    #[error("maps have different targets")]
    TargetMismatch,
    #[error("hull touches the frontier of the developed ball; enlarge the radius")]
    FrontierContamination,
    #[error("hyperplanes are not disjoint")]
    NotDisjoint,
    #[error("degenerate parameters: {0}")]
    DegenerateParameters(String),
    #[error("the wedge does not immerse in the bouquet")]
    NotImmersedWedge,
    #[error("constraint graph has finite index (covers the bouquet); no avoider exists")]
    FiniteIndexConstraint,
    #[error("pseudograph rank too low (need rank >= 2)")]
    RankTooLow,
    #[error("search budget exhausted after {0} candidates")]
    BudgetExhausted(u64),
    #[error("development guard exhausted")]
    GuardExhausted,
    #[error("not a homomorphism: {0}")]
    NotAHomomorphism(String),
    #[error("decomposition invalid: {0}")]
    DecompositionInvalid(String),
    #[error("sigma is not a systolic geodesic: {0}")]
    NotSystolic(String),
    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
