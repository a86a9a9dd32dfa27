//! Closed-form barriers and winner prediction for three-dimensional
//! reach-avoid games: an evader tries to reach a target plane, equal-speed
//! pursuers try to capture it first.
//!
//! Positions are taken in the canonical frame (target plane `z = 0`, play
//! subspace `z > 0`); [`geometry::canonical_frame`] maps a general plane there.

// NaN-rejecting `!(x > 0.0)` checks are deliberate.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod barrier;
pub mod coalition;
pub mod error;
pub mod evasion;
pub mod geometry;
pub mod io;
pub mod pair;
pub mod par;
pub mod sim;
pub mod triple;

pub use barrier::{ArcPiece, BarrierPiece, CapPiece, PointPiece};
pub use coalition::{
    active_pursuers, active_triples, classify_initial_state, classify_initial_state_with_band,
    multi_barrier, Analysis, Coalition, CoalitionSet, GameConfig, Verdict, VerdictKind,
    DEFAULT_BAND,
};
pub use error::{Error, Result};
pub use evasion::{escape_margin, escape_margin_supremum, MarginReport, OracleParams, EPS_MARGIN};
pub use geometry::{canonical_frame, CanonicalFrame, Point3, TargetPlaneSpec, EPS_GEO};
pub use par::Exec;
pub use sim::{
    run_straight_line_escape, step, validate_verdict, SimState, SimStatus, ValidationOutcome,
    ValidationReport,
};
