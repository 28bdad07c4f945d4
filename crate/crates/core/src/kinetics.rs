//! Michaelis-Menten kinetics for `E + S <-> ES -> E + P`.
//!
//! Two descriptions are provided: the full mass-action system in the four
//! concentrations `[S], [E], [ES], [P]`, and the pseudo-steady-state (PSS)
//! reduction `dS/dt = -Vmax S / (Km + S)` whose solution is
//! `S(t) = Km * W0(F(t))` with `F(t) = (S0/Km) exp((S0 - Vmax t)/Km)`.

use crate::error::{Error, Result};
use crate::numerics::{integrate, lambert_w0, lambert_w0_exp, ode_solve, ToleranceConfig};

/// Above this value of `ln F(t)` the Lambert argument is handled in log space.
const LOG_SPACE_THRESHOLD: f64 = 500.0;

pub const PSS_VALID_THRESHOLD: f64 = 0.01;
pub const PSS_MARGINAL_THRESHOLD: f64 = 0.1;

/// Elementary rate constants of the enzyme reaction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementaryRates {
    /// Binding, 1/(concentration * time).
    pub k1: f64,
    /// Unbinding, 1/time.
    pub k_minus1: f64,
    /// Catalysis, 1/time.
    pub k2: f64,
}

impl ElementaryRates {
    pub fn new(k1: f64, k_minus1: f64, k2: f64) -> Result<Self> {
        positive("k1", k1)?;
        positive("k_minus1", k_minus1)?;
        positive("k2", k2)?;
        Ok(Self { k1, k_minus1, k2 })
    }

    pub fn michaelis_constant(&self) -> f64 {
        (self.k_minus1 + self.k2) / self.k1
    }

    /// Mass-action rates `(dS, dE, dES, dP)`.
    ///
    /// The product equation `dP/dt = k2 [ES]` closes the system so that both
    /// `E + ES` and `S + ES + P` are conserved exactly.
    pub fn mass_action_rhs(&self, state: &SystemState) -> [f64; 4] {
        let binding = self.k1 * state.e * state.s;
        let release = self.k_minus1 * state.es;
        let catalysis = self.k2 * state.es;
        [
            -binding + release,
            -binding + release + catalysis,
            binding - release - catalysis,
            catalysis,
        ]
    }
}

/// Kinetic parameters with derived `Km` and `Vmax`.
///
/// Built either from elementary rates (enabling the full ODE model) or
/// directly from `Km` and `Vmax`, which is all the PSS model needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KineticParams {
    km: f64,
    vmax: f64,
    e_total: Option<f64>,
    rates: Option<ElementaryRates>,
}

impl KineticParams {
    pub fn from_rates(k1: f64, k_minus1: f64, k2: f64, e_total: f64) -> Result<Self> {
        let rates = ElementaryRates::new(k1, k_minus1, k2)?;
        positive("e_total", e_total)?;
        Ok(Self {
            km: rates.michaelis_constant(),
            vmax: k2 * e_total,
            e_total: Some(e_total),
            rates: Some(rates),
        })
    }

    pub fn from_michaelis(km: f64, vmax: f64, e_total: Option<f64>) -> Result<Self> {
        positive("km", km)?;
        positive("vmax", vmax)?;
        if let Some(e) = e_total {
            positive("e_total", e)?;
        }
        Ok(Self {
            km,
            vmax,
            e_total,
            rates: None,
        })
    }

    pub fn km(&self) -> f64 {
        self.km
    }

    pub fn vmax(&self) -> f64 {
        self.vmax
    }

    pub fn e_total(&self) -> Option<f64> {
        self.e_total
    }

    pub fn rates(&self) -> Option<&ElementaryRates> {
        self.rates.as_ref()
    }
}

/// Concentrations at `t = 0`. The product always starts at zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialState {
    pub s0: f64,
    pub e0: f64,
    pub es0: f64,
}

impl InitialState {
    pub fn new(s0: f64, e0: f64, es0: f64) -> Result<Self> {
        positive("s0", s0)?;
        non_negative("e0", e0)?;
        non_negative("es0", es0)?;
        Ok(Self { s0, e0, es0 })
    }

    /// All enzyme free at `t = 0`; uses `E_T` from `params` when known.
    pub fn free_enzyme(s0: f64, params: &KineticParams) -> Result<Self> {
        Self::new(s0, params.e_total().unwrap_or(0.0), 0.0)
    }

    pub fn enzyme_total(&self) -> f64 {
        self.e0 + self.es0
    }

    pub fn substrate_moiety(&self) -> f64 {
        self.s0 + self.es0
    }

    fn state(&self) -> SystemState {
        SystemState {
            t: 0.0,
            s: self.s0,
            e: self.e0,
            es: self.es0,
            p: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemState {
    pub t: f64,
    pub s: f64,
    pub e: f64,
    pub es: f64,
    pub p: f64,
}

/// Time-ordered samples of the full model.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    samples: Vec<SystemState>,
    enzyme_total: f64,
    substrate_moiety: f64,
}

impl Trajectory {
    pub fn samples(&self) -> &[SystemState] {
        &self.samples
    }

    pub fn last(&self) -> &SystemState {
        self.samples.last().expect("trajectory is never empty")
    }

    /// `max |E + ES - E_T| / E_T` over all samples (absolute when `E_T = 0`).
    pub fn enzyme_conservation_error(&self) -> f64 {
        let scale = if self.enzyme_total > 0.0 { self.enzyme_total } else { 1.0 };
        self.samples
            .iter()
            .map(|s| (s.e + s.es - self.enzyme_total).abs() / scale)
            .fold(0.0, f64::max)
    }

    /// `max |S + ES + P - (S0 + ES0)| / (S0 + ES0)` over all samples.
    pub fn substrate_conservation_error(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| (s.s + s.es + s.p - self.substrate_moiety).abs() / self.substrate_moiety)
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PssValidityReport {
    pub enzyme_ratio: f64,
    pub valid: bool,
    pub marginal: bool,
}

impl PssValidityReport {
    pub fn verdict(&self) -> &'static str {
        if self.valid {
            "valid"
        } else if self.marginal {
            "marginal"
        } else {
            "invalid"
        }
    }
}

pub fn mass_action_rhs(state: &SystemState, rates: &ElementaryRates) -> [f64; 4] {
    rates.mass_action_rhs(state)
}

/// Integrates the full mass-action model on `[0, t_end]`.
///
/// Rates come from `params`; enzyme amounts come from `init`, and the
/// conservation diagnostics on the returned [`Trajectory`] are measured
/// against `init`.
pub fn simulate_full(
    params: &KineticParams,
    init: &InitialState,
    t_end: f64,
    tol: &ToleranceConfig,
) -> Result<Trajectory> {
    let rates = *params.rates().ok_or(Error::MissingRates)?;
    let rhs = move |t: f64, y: &[f64], dy: &mut [f64]| {
        let state = SystemState {
            t,
            s: y[0],
            e: y[1],
            es: y[2],
            p: y[3],
        };
        dy.copy_from_slice(&rates.mass_action_rhs(&state));
    };
    let start = init.state();
    let sol = ode_solve(rhs, &[start.s, start.e, start.es, start.p], t_end, tol)?;
    let samples = sol
        .times
        .iter()
        .zip(&sol.states)
        .map(|(&t, y)| SystemState {
            t,
            s: y[0],
            e: y[1],
            es: y[2],
            p: y[3],
        })
        .collect();
    Ok(Trajectory {
        samples,
        enzyme_total: init.enzyme_total(),
        substrate_moiety: init.substrate_moiety(),
    })
}

/// PSS substrate concentration `Km * W0(F(t))`.
pub fn pss_substrate(t: f64, params: &KineticParams, s0: f64) -> Result<f64> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::invalid("t", format!("must be finite and >= 0, got {t}")));
    }
    positive("s0", s0)?;
    substrate_at(t, params.km, params.vmax, s0)
}

fn substrate_at(t: f64, km: f64, vmax: f64, s0: f64) -> Result<f64> {
    let log_f = (s0 / km).ln() + (s0 - vmax * t) / km;
    let w = if log_f > LOG_SPACE_THRESHOLD {
        lambert_w0_exp(log_f)?
    } else {
        lambert_w0(log_f.exp())?
    };
    Ok((km * w).min(s0))
}

/// PSS product concentration `int_0^t Vmax S / (Km + S) dtau` by quadrature.
pub fn pss_product(t: f64, params: &KineticParams, s0: f64, tol: &ToleranceConfig) -> Result<f64> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::invalid("t", format!("must be finite and >= 0, got {t}")));
    }
    positive("s0", s0)?;
    let (km, vmax) = (params.km, params.vmax);
    let rate = |tau: f64| match substrate_at(tau, km, vmax, s0) {
        Ok(s) => vmax * s / (km + s),
        Err(_) => f64::NAN,
    };
    integrate(rate, 0.0, t, tol)
}

pub fn pss_validity(params: &KineticParams, init: &InitialState) -> PssValidityReport {
    let enzyme_ratio = init.e0 / (params.km + init.s0);
    PssValidityReport {
        enzyme_ratio,
        valid: enzyme_ratio <= PSS_VALID_THRESHOLD,
        marginal: enzyme_ratio <= PSS_MARGINAL_THRESHOLD,
    }
}

/// Largest `|S_full(t) - S_pss(t)| / S0` over the trajectory samples with `t <= horizon`.
pub fn pss_deviation(trajectory: &Trajectory, params: &KineticParams, s0: f64, horizon: f64) -> Result<f64> {
    let mut worst = 0.0_f64;
    for sample in trajectory.samples().iter().filter(|s| s.t <= horizon) {
        let pss = pss_substrate(sample.t, params, s0)?;
        worst = worst.max((sample.s - pss).abs() / s0);
    }
    Ok(worst)
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be positive and finite, got {v}")))
    }
}

fn non_negative(name: &'static str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be non-negative and finite, got {v}")))
    }
}
