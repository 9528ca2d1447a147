//! Equilibrium construction for the two-exponential (overlapping
//! generations) discount kernel.
//!
//! An equilibrium converging to `k̄` is built from the value pair `(v, w)`:
//! `v` is the planner's value and `w` the part owed to the unborn. The pair
//! solves a first-order system in `k` that is singular at `k̄`, so the
//! solution is started from an expansion at `k̄` and continued by
//! integration on each side.

mod branch;
mod crosscheck;
mod error;
mod interval;
mod seed;
mod solve;
mod stability;
mod system;

pub use branch::{branch_slope, branch_solve_x, Branch, MU_NOISE};
pub use crosscheck::{solve_desingularized, CrossCheckOptions, DesingularizedOrbit};
pub use error::OgError;
pub use interval::{steady_state_interval, SteadyStateInterval};
pub use seed::{stability_closed_form, taylor_seed, SeriesExpansion, TaylorSeed};
pub use solve::{
    solve_value_pair, welfare_split, Equilibrium, LeftStart, OmegaRequest, SolveOptions, SolveReport, ValuePair,
};
pub use stability::{stability_test, StabilityReport, STABILITY_AGREEMENT};
pub use system::{d_function, desingularized_rhs, mu, point_state, value_rhs, PointState, Rates};
