//! Extremal copula mass of the endograph `{(x, y) : y <= T(x)}` of a measurable
//! transformation `T` of the unit interval.
//!
//! The crate computes
//!
//! * the distribution function `F_T` of the push-forward of Lebesgue measure under `T`,
//!   the nondecreasing rearrangement `T*` and a measure-preserving `phi` with `T* . phi = T`
//!   ([`pushforward`]);
//! * the maximal and minimal mass any copula can put on the endograph,
//!   `1 + min_x (x - F_T(x))` and `max_x (x - F_T(x-))`, together with completely
//!   dependent maps attaining (or approaching) them ([`endograph`]);
//! * the translation to random variables with continuous marginals, where the maximal
//!   probability of `Y <= S(X)` is the maximal endograph mass of `T = G . S . F^-`
//!   ([`sklar`]);
//! * an independent check via a discretized assignment problem and Monte Carlo ([`oracle`]).

pub mod endograph;
pub mod error;
pub mod oracle;
pub mod pushforward;
pub mod quadrature;
pub mod sklar;
pub mod transform;

pub use endograph::{
    achieved_mass, epsilon_min_map, max_endograph_mass, max_graph_mass_monotone,
    min_endograph_mass, monotone_max, optimal_map, EndographReport, MassEstimate,
    MonotoneOptimum,
};
pub use error::{Error, Result};
pub use pushforward::{
    cdf_of, cdf_of_grid, rearrange, verify_measure_preserving, Cdf, MeasurePreservingMap, Method,
    Rearrangement,
};
pub use sklar::{CdfKernel, LinkFunction, Marginal};
pub use transform::{Knot, Monotonicity, UnitFunction};

/// Number of cells used whenever a computation falls back to a uniform grid.
pub const DEFAULT_GRID: usize = 10_000;
