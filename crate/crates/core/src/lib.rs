//! Bellman functions of the dyadic martingale transform.
//!
//! The extremal averages `B_max` / `B_min` of `<|g|^p>` over admissible
//! pairs with prescribed `(<f>, <g>, <|f|^p>)` solve a pair of implicit
//! equations built from a two-branch kernel `f_p`; this crate evaluates
//! them exactly (binary64), exposes the supporting special functions and
//! extremal-trajectory machinery, simulates dyadic martingale transforms
//! against the bounds, and computes zigzag-concave envelopes on grids as
//! an independent oracle for the reduced functions.
//!
//! Modules:
//!
//! - [`special`]: exponent constants and the named scalar functions.
//! - [`solver`]: `B_max` / `B_min`, bounds, sharp-constant scans.
//! - [`trajectories`]: coordinate change, chords, case identities,
//!   finite-difference Hessian checks.
//! - [`martingale`]: dyadic step functions, Haar analysis, admissible
//!   pairs, counterexample constructions.
//! - [`extremal`]: the self-similar pair attaining the Bellman value.
//! - [`envelope`]: grid envelopes and the critical-constant search.
//! - [`verify`]: the named verification suites behind the CLI.
//! - [`report`]: fixed-format CSV/JSON rendering.

pub mod envelope;
pub mod error;
pub mod extremal;
pub mod martingale;
pub mod report;
pub mod rng;
pub mod solver;
pub mod special;
pub mod trajectories;
pub mod verify;

pub use error::{Error, Result};
pub use solver::{
    b_from_phi, bellman_max, bellman_min, sharp_constant_scan, sharp_constant_scan_in,
    solution_bounds, BellmanSolution, OmegaPoint, ScanRegion, Sector, Which,
};
pub use special::{
    exponent_params, f_p, f_p_partials, g_p, h_c, lambda_p, phi_max, phi_min, u_p, ExponentParams,
    PlanePoint,
};
