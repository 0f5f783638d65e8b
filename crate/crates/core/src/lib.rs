//! Exact combinatorics of finite subsets of integer lattices.
//!
//! The crate covers Minkowski sumsets and doubling constants, coordinate
//! compressions and down-sets, generalized arithmetic progressions and
//! Freiman dimension, exact checkers for the classical sumset inequalities
//! built on these, and a constructive pipeline that covers a set of small
//! doubling by translates of a low-dimensional progression.
//!
//! All arithmetic is exact: coordinates are arbitrary-precision integers and
//! ratios are reduced rationals. Nothing on a verdict path uses floating
//! point.

pub mod compress;
pub mod cover;
pub mod error;
pub mod linalg;
pub mod oracles;
pub mod par;
pub mod progression;
pub mod report;
pub mod sets;
pub mod sweep;
pub mod verify;

pub use compress::{compress, cube_sum_identity, down_closure, is_down_set, is_i_down_set, GridBox};
pub use cover::{cover_box, fibre_decomposition, freiman_bilu_cover, verify_fibre_inequality, Cover, CoverOutcome};
pub use error::{Error, Result};
pub use progression::{Correspondence, Progression};
pub use report::{ParamValue, Verdict, VerificationReport};
pub use sets::{LatticePoint, PointSet, Rational};

/// Limits on exhaustive work. Exceeding one is an error, never a truncation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Points enumerated from a progression, and quadruple-search steps.
    pub max_enum: u64,
    /// Largest set whose subsets are enumerated exhaustively.
    pub max_subset: usize,
    /// Largest host set for parallelepiped search.
    pub max_parallelepiped_points: usize,
    /// Largest parallelepiped dimension searched.
    pub max_parallelepiped_dim: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_enum: 10_000_000,
            max_subset: 18,
            max_parallelepiped_points: 64,
            max_parallelepiped_dim: 4,
        }
    }
}
