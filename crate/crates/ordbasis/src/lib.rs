//! Exact construction of order-complete bases for spaces of modular
//! functions with a pole only at `i∞`.
//!
//! Given two functions `t`, `f` with coprime pole orders (as q-series
//! recipes), the pipeline is:
//!
//! 1. [`relation`]: find the irreducible relation `p(x, y)` with `p(t, f) = 0`
//!    by an Ansatz on q-expansions.
//! 2. [`funcfield`]: arithmetic in `K = ℚ(x)[y]/(p)` with evaluation back
//!    into q-series via `x ↦ t`, `y ↦ f`.
//! 3. [`intbasis`]: integral bases of `O_K` (over `ℚ[x]`) and of `O_∞`
//!    (over the rational functions regular at `x = ∞`).
//! 4. [`normalize`]: normalization of the global basis at infinity,
//!    producing exponents `d_i`.
//! 5. [`basis_rr`]: the Riemann-Roch style bases `B_d` and their
//!    reduced-echelon q-expansion form, which is order complete.
//! 6. [`reduce`]: greedy reduction of a target series against an
//!    order-complete basis, closed forms in `t` and `f`, and partition
//!    congruence checks.
//!
//! All arithmetic is exact: arbitrary-precision rationals, dense
//! polynomials over ℚ, and truncated Laurent series with absolute
//! precision tracking.

pub mod basis_rr;
pub mod cli;
pub mod error;
pub mod exact;
pub mod funcfield;
pub mod intbasis;
pub mod normalize;
pub mod qseries;
pub mod reduce;
pub mod relation;

pub use error::Error;
pub use exact::{Poly, QMatrix, QRat, RatFunc};
pub use qseries::{LaurentSeries, SeriesRecipe};
