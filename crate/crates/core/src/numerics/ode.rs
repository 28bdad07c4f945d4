use super::ToleranceConfig;
use crate::error::{Error, Result};

const INITIAL_STEPS: usize = 16;

/// Fixed-step samples from [`ode_solve`], including the initial point.
#[derive(Debug, Clone, PartialEq)]
pub struct OdeSolution {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
}

impl OdeSolution {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> &[f64] {
        self.states.last().map(Vec::as_slice).unwrap_or(&[])
    }

    /// Number of RK4 steps in the accepted grid.
    pub fn steps(&self) -> usize {
        self.times.len().saturating_sub(1)
    }
}

/// Integrates `y' = rhs(t, y)` on `[0, t_end]` with classical RK4.
///
/// The step count starts at 16 and doubles until the final states of two
/// successive grids agree: `max|y_n - y_2n| <= rel_tol * max|y_2n| + abs_tol`.
/// A grid whose integration blows up is treated as unresolved and refined;
/// the run fails once the step count would exceed `max_iterations`.
pub fn ode_solve<F>(rhs: F, y0: &[f64], t_end: f64, tol: &ToleranceConfig) -> Result<OdeSolution>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::invalid("t_end", format!("must be positive and finite, got {t_end}")));
    }
    if y0.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteState { t: 0.0 });
    }
    let mut probe = vec![0.0; y0.len()];
    rhs(0.0, y0, &mut probe);
    if probe.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteState { t: 0.0 });
    }

    let mut steps = INITIAL_STEPS;
    let mut coarse = integrate_fixed(&rhs, y0, t_end, steps);
    loop {
        if steps * 2 > tol.max_iterations {
            return Err(match coarse {
                Err(t) => Error::NonFiniteState { t },
                Ok(_) => Error::NonConvergence {
                    method: "RK4 step doubling",
                    iterations: steps,
                },
            });
        }
        steps *= 2;
        let fine = integrate_fixed(&rhs, y0, t_end, steps);
        if let (Ok(a), Ok(b)) = (&coarse, &fine) {
            let ya = a.final_state();
            let yb = b.final_state();
            let scale = yb.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            let diff = ya
                .iter()
                .zip(yb)
                .fold(0.0_f64, |m, (u, v)| m.max((u - v).abs()));
            if diff <= tol.rel_tol * scale + tol.abs_tol {
                return fine.map_err(|t| Error::NonFiniteState { t });
            }
        }
        coarse = fine;
    }
}

/// One pass of `steps` RK4 steps. `Err(t)` reports where the state went non-finite.
fn integrate_fixed<F>(rhs: &F, y0: &[f64], t_end: f64, steps: usize) -> std::result::Result<OdeSolution, f64>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    let dim = y0.len();
    let h = t_end / steps as f64;
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    times.push(0.0);
    states.push(y0.to_vec());

    let mut y = y0.to_vec();
    let mut k1 = vec![0.0; dim];
    let mut k2 = vec![0.0; dim];
    let mut k3 = vec![0.0; dim];
    let mut k4 = vec![0.0; dim];
    let mut tmp = vec![0.0; dim];

    for i in 0..steps {
        let t = i as f64 * h;
        rhs(t, &y, &mut k1);
        for j in 0..dim {
            tmp[j] = y[j] + 0.5 * h * k1[j];
        }
        rhs(t + 0.5 * h, &tmp, &mut k2);
        for j in 0..dim {
            tmp[j] = y[j] + 0.5 * h * k2[j];
        }
        rhs(t + 0.5 * h, &tmp, &mut k3);
        for j in 0..dim {
            tmp[j] = y[j] + h * k3[j];
        }
        rhs(t + h, &tmp, &mut k4);
        for j in 0..dim {
            y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        let t_next = if i + 1 == steps { t_end } else { (i + 1) as f64 * h };
        if y.iter().any(|v| !v.is_finite()) {
            return Err(t_next);
        }
        times.push(t_next);
        states.push(y.clone());
    }
    Ok(OdeSolution { times, states })
}
