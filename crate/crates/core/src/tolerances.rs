use serde::Serialize;

use crate::scalar::{lit, Real};

/// Numerical tolerances shared by the solvers.
///
/// Defaults are the `f64` values; for `f32` each relative tolerance is
/// floored at a small multiple of machine epsilon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances<T> {
    /// Allowed deviation of total mass from 1 when validating measures.
    pub tol_mass: T,
    /// Relative error target of adaptive quadrature.
    pub tol_quad: T,
    /// Tail mass discarded when truncating unbounded closed-form families.
    pub tol_tail: T,
    /// Relative residual target of the scalar root solvers.
    pub tol_root: T,
    /// Allowed deviation of a density curve's integral from 1.
    pub tol_int: T,
    /// Hysteresis level (relative to the curve maximum) for mode counting.
    pub hysteresis: T,
    pub max_quad_depth: usize,
    pub max_bracket_expansions: usize,
    pub max_boundary_iterations: usize,
}

impl<T: Real> Default for Tolerances<T> {
    fn default() -> Self {
        let eps = T::epsilon();
        let floor = |v: f64, k: f64| lit::<T>(v).max(eps * lit(k));
        Self {
            tol_mass: floor(1e-6, 100.0),
            tol_quad: floor(1e-9, 64.0),
            tol_tail: lit(1e-12),
            tol_root: floor(1e-10, 16.0),
            tol_int: floor(1e-4, 100.0),
            hysteresis: floor(1e-4, 100.0),
            max_quad_depth: 48,
            max_bracket_expansions: 200,
            max_boundary_iterations: 200,
        }
    }
}
