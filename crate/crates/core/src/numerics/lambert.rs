//! Principal branch of the Lambert W function.
//!
//! `W0(x)` solves `w * exp(w) = x` for `x >= -1/e`, `w >= -1`. The direct
//! solver uses Halley iteration on `w * exp(w) - x`. When only `ln x` is
//! representable (the pseudo-steady-state argument overflows `f64` for
//! `S0 / Km` in the hundreds), [`lambert_w0_exp`] solves `w + ln w = g`
//! instead.

use std::f64::consts::E;

use crate::error::{Error, Result};

const BRANCH_POINT: f64 = -1.0 / E;
const REL_TOL: f64 = 1e-12;
const MAX_ITER: usize = 64;

/// `W0(x)`, the principal real branch.
pub fn lambert_w0(x: f64) -> Result<f64> {
    if x.is_nan() || x < BRANCH_POINT {
        return Err(Error::LambertDomain(x));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == f64::INFINITY {
        return Ok(f64::INFINITY);
    }

    // p -> 0 at the branch point; the series is exact to O(p^6) there.
    let p = (2.0 * (E * x + 1.0)).max(0.0).sqrt();
    if p < 1e-4 {
        return Ok(branch_series(p));
    }

    let mut w = if x < -0.32 {
        branch_series(p)
    } else if x < E {
        let l = x.ln_1p();
        l * (1.0 - (1.0 + l).ln() / (2.0 + l))
    } else {
        let l1 = x.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    };

    for _ in 0..MAX_ITER {
        let ew = w.exp();
        let f = w * ew - x;
        if f == 0.0 {
            return Ok(w);
        }
        let wp1 = w + 1.0;
        let step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
        w -= step;
        if step.abs() <= REL_TOL * w.abs() || step.abs() < f64::MIN_POSITIVE {
            return Ok(w.max(-1.0));
        }
    }
    Err(Error::NonConvergence {
        method: "Lambert W0 Halley iteration",
        iterations: MAX_ITER,
    })
}

/// `W0(exp(g))`, computed without forming `exp(g)` when it would overflow.
///
/// Solves `w + ln w = g` by Halley iteration for `g > 1`; smaller arguments
/// are delegated to [`lambert_w0`].
pub fn lambert_w0_exp(g: f64) -> Result<f64> {
    if g.is_nan() {
        return Err(Error::LambertDomain(g));
    }
    if g == f64::INFINITY {
        return Ok(f64::INFINITY);
    }
    if g <= 1.0 {
        return lambert_w0(g.exp());
    }

    let mut w = g - g.ln();
    for _ in 0..MAX_ITER {
        let h = w + w.ln() - g;
        if h == 0.0 {
            return Ok(w);
        }
        let dh = 1.0 + 1.0 / w;
        let d2h = -1.0 / (w * w);
        let step = 2.0 * h * dh / (2.0 * dh * dh - h * d2h);
        w -= step;
        if step.abs() <= REL_TOL * w {
            return Ok(w);
        }
    }
    Err(Error::NonConvergence {
        method: "Lambert W0 log-space iteration",
        iterations: MAX_ITER,
    })
}

/// Asymptotic approximation `W(exp(x + a)) ~ x * (1 - (ln x - a) / (x + 1))`,
/// accurate for `x >> a`.
pub fn lambert_w_large_approx(x: f64, a: f64) -> Result<f64> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::invalid("x", format!("must be positive and finite, got {x}")));
    }
    if !a.is_finite() {
        return Err(Error::invalid("a", format!("must be finite, got {a}")));
    }
    Ok(x * (1.0 - (x.ln() - a) / (x + 1.0)))
}

fn branch_series(p: f64) -> f64 {
    -1.0 + p * (1.0
        + p * (-1.0 / 3.0 + p * (11.0 / 72.0 + p * (-43.0 / 540.0 + p * (769.0 / 17280.0)))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Omega constant by the contraction w <- exp(-w).
    fn omega_by_fixed_point() -> f64 {
        let mut w = 0.5_f64;
        for _ in 0..200 {
            w = (-w).exp();
        }
        w
    }

    #[test]
    fn trivial_values() {
        assert_eq!(lambert_w0(0.0).unwrap(), 0.0);
        assert_relative_eq!(lambert_w0(E).unwrap(), 1.0, epsilon = 1e-14);
        assert_relative_eq!(lambert_w0(BRANCH_POINT).unwrap(), -1.0, epsilon = 1e-12);
    }

    #[test]
    fn omega_constant() {
        let oracle = omega_by_fixed_point();
        assert_relative_eq!(oracle, 0.5671432904, epsilon = 1e-10);
        assert_relative_eq!(lambert_w0(1.0).unwrap(), oracle, epsilon = 1e-14);
    }

    #[test]
    fn rejects_below_branch_point() {
        assert!(matches!(lambert_w0(-0.4), Err(Error::LambertDomain(_))));
        assert!(matches!(lambert_w0(f64::NAN), Err(Error::LambertDomain(_))));
    }

    #[test]
    fn residual_on_log_grid() {
        let mut prev = f64::NEG_INFINITY;
        let lo = BRANCH_POINT + 1e-6;
        // negative side, then positive decades up to 1e6
        let mut xs: Vec<f64> = (0..200)
            .map(|i| lo * (1.0 - i as f64 / 200.0))
            .collect();
        xs.extend((0..=240).map(|i| 10f64.powf(-12.0 + 18.0 * i as f64 / 240.0)));
        for x in xs {
            let w = lambert_w0(x).unwrap();
            assert!(w >= -1.0);
            let back = w * w.exp();
            assert!(
                (back - x).abs() <= 1e-10 * x.abs(),
                "x = {x}, w = {w}, back = {back}"
            );
            assert!(w >= prev, "not monotone at x = {x}");
            prev = w;
        }
    }

    #[test]
    fn log_space_matches_direct() {
        for g in [-5.0, 0.0, 0.5, 1.5, 3.0, 10.0, 100.0, 600.0] {
            let w = lambert_w0_exp(g).unwrap();
            assert_relative_eq!(w + w.ln(), g, max_relative = 1e-13, epsilon = 1e-13);
            if g < 700.0 {
                assert_relative_eq!(w, lambert_w0(f64::exp(g)).unwrap(), max_relative = 1e-12);
            }
        }
        // exp(3000) overflows; identity still holds.
        let w = lambert_w0_exp(3000.0).unwrap();
        assert_relative_eq!(w + w.ln(), 3000.0, max_relative = 1e-14);
    }

    #[test]
    fn large_approx_examples() {
        assert_eq!(lambert_w_large_approx(1.0, 0.0).unwrap(), 1.0);
        // 10 * (1 - (ln 10 - 1) / 11)
        let expected = 10.0 * (1.0 - (10f64.ln() - 1.0) / 11.0);
        assert_relative_eq!(lambert_w_large_approx(10.0, 1.0).unwrap(), expected, epsilon = 1e-14);
        assert_relative_eq!(expected, 8.815831, epsilon = 1e-6);

        let exact = lambert_w0_exp(100.0).unwrap();
        let approx = lambert_w_large_approx(100.0, 0.0).unwrap();
        assert!((approx - exact).abs() / exact < 0.01);
        assert!(lambert_w_large_approx(0.0, 0.0).is_err());
        assert!(lambert_w_large_approx(-1.0, 0.0).is_err());
    }
}
