//! Checking and finding equilibria: residual-based verification of dependency,
//! conditional-independence and Nash equilibria, an exact two-stage solver for
//! three players with one edge, multi-start Newton for everything else, and
//! the worked examples as fixtures.

mod fixtures;
mod newton;
mod solve;
mod verify;

pub use fixtures::{fixture, fixtures, Family, Fixture, FIXTURE_IDS};
pub use newton::{newton_solve, NewtonOptions};
pub use solve::{
    profile_of, sigma_index, solve_one_edge_3player, solve_one_edge_exact, solve_one_edge_f64, AffineFamily, Backend,
    Method, SolveResult, SolveStatus, Solved,
};
pub use verify::{verify_ci_equilibrium, verify_nash, Residual, VerificationReport, DEFAULT_TOL};
