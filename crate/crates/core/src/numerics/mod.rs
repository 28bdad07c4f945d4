//! Numerical kernels shared by the kinetics, slot-design and capacity code.

mod lambert;
mod ode;
mod quadrature;
mod roots;

pub use lambert::{lambert_w0, lambert_w0_exp, lambert_w_large_approx};
pub use ode::{ode_solve, OdeSolution};
pub use quadrature::integrate;
pub use roots::find_root;

use crate::error::{Error, Result};

/// Convergence controls for the iterative kernels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_iterations: usize,
}

impl ToleranceConfig {
    pub fn new(rel_tol: f64, abs_tol: f64, max_iterations: usize) -> Result<Self> {
        if !(rel_tol > 0.0 && rel_tol.is_finite()) {
            return Err(Error::invalid("rel_tol", format!("must be positive, got {rel_tol}")));
        }
        if !(abs_tol > 0.0 && abs_tol.is_finite()) {
            return Err(Error::invalid("abs_tol", format!("must be positive, got {abs_tol}")));
        }
        if max_iterations == 0 {
            return Err(Error::invalid("max_iterations", "must be at least 1"));
        }
        Ok(Self {
            rel_tol,
            abs_tol,
            max_iterations,
        })
    }

    /// Defaults for the root finder: 200 iterations.
    pub fn root_default() -> Self {
        Self {
            max_iterations: 200,
            ..Self::default()
        }
    }
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            max_iterations: 100_000,
        }
    }
}
