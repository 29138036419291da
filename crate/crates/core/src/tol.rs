//! Tolerance tiers shared by the library and its tests.

/// Exact algebraic identities evaluated in floating point.
pub const TIGHT: f64 = 1e-12;

/// Results mediated by an eigendecomposition.
pub const EIG: f64 = 1e-10;

/// Iterated products and accumulated evolutions.
pub const LOOSE: f64 = 1e-8;

/// Allowed negative slack for inequality certificates.
pub const SLACK: f64 = 1e-15;
