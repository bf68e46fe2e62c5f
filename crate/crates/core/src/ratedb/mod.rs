//! Database of simulated logical error rates over the `(d, r0, r1, p2)` grid,
//! where `r0 = p0 / p2` and `r1 = p1 / p2` at balanced noise.

mod db;
mod generate;
mod grid;
mod ladder;

pub use db::{DbEntry, DbKey, RateDatabase, HEADER};
pub use generate::{generate, point_seed, simulate_point, GenerateOptions};
pub use grid::{GridPoint, GridSpec, DISTANCES};
pub use ladder::{ladder_neighbors, Axis, Bracket, Ladder};
