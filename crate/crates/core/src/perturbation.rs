//! Transmission-slot design under a bound on substrate depletion.
//!
//! A slot lasts until the substrate has dropped by `delta`; the enzyme is
//! then removed and the product flushed, so every slot starts from `S0`.

use crate::error::{Error, Result};
use crate::kinetics::{pss_product, pss_substrate, KineticParams};
use crate::numerics::{find_root, ToleranceConfig};

/// Slack applied before flooring `V * p_max`, absorbing quadrature error.
const MOLECULE_COUNT_SLACK: f64 = 1e-6;

/// Maximum tolerated depletion `S0 - S(T) <= delta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbationBudget {
    delta: f64,
}

impl PerturbationBudget {
    pub fn new(delta: f64) -> Result<Self> {
        if delta > 0.0 && delta.is_finite() {
            Ok(Self { delta })
        } else {
            Err(Error::invalid("delta", format!("must be positive and finite, got {delta}")))
        }
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    fn check_feasible(&self, s0: f64) -> Result<()> {
        if self.delta < s0 {
            Ok(())
        } else {
            Err(Error::InfeasibleBudget { delta: self.delta, s0 })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlotDesign {
    /// Slot duration `T = t*`.
    pub t_star: f64,
    /// Product concentration at `t*`.
    pub p_max: f64,
    pub volume: f64,
    /// Largest molecule count per slot, `floor(volume * p_max)`.
    pub n_max: usize,
}

impl SlotDesign {
    pub fn has_zero_capacity(&self) -> bool {
        self.n_max == 0
    }
}

fn slot_tolerance() -> ToleranceConfig {
    ToleranceConfig {
        rel_tol: 1e-14,
        abs_tol: 1e-300,
        max_iterations: 200,
    }
}

/// Latest time `t*` with `S0 - S(t*) <= delta`, found by root finding on the
/// PSS substrate curve.
///
/// Since `|dS/dt| <= Vmax`, `S(delta / Vmax) >= S0 - delta`, so the search
/// starts there and doubles the upper end until the sign changes.
pub fn slot_time(params: &KineticParams, s0: f64, budget: &PerturbationBudget) -> Result<f64> {
    budget.check_feasible(s0)?;
    let target = s0 - budget.delta;
    let residual = |t: f64| pss_substrate(t, params, s0).map(|s| s - target).unwrap_or(f64::NAN);

    let mut lo = 0.0;
    let mut hi = budget.delta / params.vmax();
    let mut f_hi = residual(hi);
    while f_hi > 0.0 {
        if !hi.is_finite() || hi > 1e300 {
            return Err(Error::NonConvergence {
                method: "slot time bracketing",
                iterations: 0,
            });
        }
        lo = hi;
        hi *= 2.0;
        f_hi = residual(hi);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    find_root(residual, lo, hi, &slot_tolerance())
}

/// `[P](t*)` by quadrature of the PSS product rate over `[0, t*]`.
pub fn max_product(params: &KineticParams, s0: f64, budget: &PerturbationBudget) -> Result<f64> {
    let t_star = slot_time(params, s0, budget)?;
    pss_product(t_star, params, s0, &ToleranceConfig::default())
}

/// Small-`Km` closed form `[P](t*) ~ delta`.
pub fn max_product_approx(budget: &PerturbationBudget) -> f64 {
    budget.delta
}

pub fn design_slot(
    params: &KineticParams,
    s0: f64,
    budget: &PerturbationBudget,
    volume: f64,
) -> Result<SlotDesign> {
    if !(volume > 0.0 && volume.is_finite()) {
        return Err(Error::invalid("volume", format!("must be positive and finite, got {volume}")));
    }
    let t_star = slot_time(params, s0, budget)?;
    let p_max = pss_product(t_star, params, s0, &ToleranceConfig::default())?;
    let molecules = volume * p_max;
    let n_max = (molecules + MOLECULE_COUNT_SLACK * molecules.max(1.0)).floor().max(0.0) as usize;
    let design = SlotDesign {
        t_star,
        p_max,
        volume,
        n_max,
    };
    if design.has_zero_capacity() {
        log::warn!(
            "slot admits no molecules: volume {volume} x p_max {p_max} < 1, capacity is zero"
        );
    }
    Ok(design)
}
