use super::ToleranceConfig;
use crate::error::{Error, Result};

/// Brent's method: inverse quadratic / secant steps safeguarded by bisection.
///
/// Requires a sign change on `[lo, hi]`. Terminates once the bracket half-width
/// drops below `(rel_tol * |r| + abs_tol) / 2`.
pub fn find_root<F>(f: F, lo: f64, hi: f64, tol: &ToleranceConfig) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::invalid("bracket", format!("need finite lo < hi, got [{lo}, {hi}]")));
    }

    let mut xpre = lo;
    let mut xcur = hi;
    let mut fpre = f(xpre);
    let mut fcur = f(xcur);
    if fpre.is_nan() || fcur.is_nan() {
        return Err(Error::invalid("f", "function is NaN at a bracket endpoint"));
    }
    if fpre == 0.0 {
        return Ok(xpre);
    }
    if fcur == 0.0 {
        return Ok(xcur);
    }
    if fpre.signum() == fcur.signum() {
        return Err(Error::NoSignChange {
            lo,
            hi,
            f_lo: fpre,
            f_hi: fcur,
        });
    }

    let mut xblk = 0.0;
    let mut fblk = 0.0;
    let mut spre = 0.0;
    let mut scur = 0.0;

    for _ in 0..tol.max_iterations {
        if fpre != 0.0 && fcur != 0.0 && fpre.signum() != fcur.signum() {
            xblk = xpre;
            fblk = fpre;
            spre = xcur - xpre;
            scur = spre;
        }
        if fblk.abs() < fcur.abs() {
            xpre = xcur;
            xcur = xblk;
            xblk = xpre;
            fpre = fcur;
            fcur = fblk;
            fblk = fpre;
        }

        let delta = (tol.abs_tol + tol.rel_tol * xcur.abs()) / 2.0;
        let sbis = (xblk - xcur) / 2.0;
        if fcur == 0.0 || sbis.abs() < delta {
            return Ok(xcur);
        }

        if spre.abs() > delta && fcur.abs() < fpre.abs() {
            let stry = if xpre == xblk {
                // secant
                -fcur * (xcur - xpre) / (fcur - fpre)
            } else {
                // inverse quadratic interpolation
                let dpre = (fpre - fcur) / (xpre - xcur);
                let dblk = (fblk - fcur) / (xblk - xcur);
                -fcur * (fblk * dblk - fpre * dpre) / (dblk * dpre * (fblk - fpre))
            };
            if 2.0 * stry.abs() < spre.abs().min(3.0 * sbis.abs() - delta) {
                spre = scur;
                scur = stry;
            } else {
                spre = sbis;
                scur = sbis;
            }
        } else {
            spre = sbis;
            scur = sbis;
        }

        xpre = xcur;
        fpre = fcur;
        xcur += if scur.abs() > delta {
            scur
        } else if sbis > 0.0 {
            delta
        } else {
            -delta
        };
        fcur = f(xcur);
        if fcur.is_nan() {
            return Err(Error::invalid("f", format!("function is NaN at x = {xcur}")));
        }
    }

    Err(Error::NonConvergence {
        method: "Brent root finder",
        iterations: tol.max_iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_2;

    fn tol() -> ToleranceConfig {
        ToleranceConfig::root_default()
    }

    #[test]
    fn analytic_roots() {
        assert_abs_diff_eq!(find_root(|t| t - 2.0, 0.0, 5.0, &tol()).unwrap(), 2.0, epsilon = 1e-9);
        assert_abs_diff_eq!(
            find_root(|t| t * t - 2.0, 0.0, 2.0, &tol()).unwrap(),
            2f64.sqrt(),
            epsilon = 1e-9
        );
        assert_abs_diff_eq!(
            find_root(f64::cos, 1.0, 2.0, &tol()).unwrap(),
            FRAC_PI_2,
            epsilon = 1e-9
        );
    }

    #[test]
    fn endpoint_root() {
        assert_eq!(find_root(|t| t, 0.0, 1.0, &tol()).unwrap(), 0.0);
    }

    #[test]
    fn no_sign_change() {
        let err = find_root(|t| t * t + 1.0, -1.0, 1.0, &tol()).unwrap_err();
        assert!(matches!(err, Error::NoSignChange { .. }));
    }

    #[test]
    fn bad_bracket() {
        assert!(find_root(|t| t, 1.0, 0.0, &tol()).is_err());
    }

    #[test]
    fn iteration_cap() {
        let tight = ToleranceConfig::new(1e-15, 1e-300, 2).unwrap();
        let err = find_root(|t| t.powi(3) - 0.3, 0.0, 10.0, &tight).unwrap_err();
        assert!(matches!(err, Error::NonConvergence { .. }));
    }
}
