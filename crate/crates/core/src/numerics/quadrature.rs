use super::ToleranceConfig;
use crate::error::{Error, Result};

const MAX_DEPTH: u32 = 50;

struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    eps: f64,
    depth: u32,
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

/// Adaptive Simpson quadrature of `f` over `[lo, hi]`.
///
/// The error budget is `max(abs_tol, rel_tol * |I0|)` where `I0` is the
/// single-panel estimate; each bisection halves the budget. Panels are
/// accepted with the Richardson-corrected sum. Fails once a panel needs
/// more than 50 bisections or `max_iterations` function evaluations are
/// spent.
pub fn integrate<F>(f: F, lo: f64, hi: f64, tol: &ToleranceConfig) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::invalid("interval", format!("need finite lo <= hi, got [{lo}, {hi}]")));
    }
    if lo == hi {
        return Ok(0.0);
    }

    let eval = |x: f64| -> Result<f64> {
        let y = f(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(Error::invalid("f", format!("integrand is not finite at x = {x}")))
        }
    };

    let fa = eval(lo)?;
    let fb = eval(hi)?;
    let m = 0.5 * (lo + hi);
    let fm = eval(m)?;
    let mut evaluations = 3usize;
    let whole = simpson(lo, hi, fa, fm, fb);
    let eps = tol.abs_tol.max(tol.rel_tol * whole.abs());

    let mut total = 0.0;
    let mut stack = vec![Panel {
        a: lo,
        b: hi,
        fa,
        fm,
        fb,
        whole,
        eps,
        depth: 0,
    }];

    while let Some(p) = stack.pop() {
        let m = 0.5 * (p.a + p.b);
        let lm = 0.5 * (p.a + m);
        let rm = 0.5 * (m + p.b);
        let flm = eval(lm)?;
        let frm = eval(rm)?;
        evaluations += 2;

        let left = simpson(p.a, m, p.fa, flm, p.fm);
        let right = simpson(m, p.b, p.fm, frm, p.fb);
        let diff = left + right - p.whole;

        if diff.abs() <= 15.0 * p.eps {
            total += left + right + diff / 15.0;
            continue;
        }
        if p.depth >= MAX_DEPTH || evaluations >= tol.max_iterations {
            return Err(Error::NonConvergence {
                method: "adaptive Simpson quadrature",
                iterations: evaluations,
            });
        }
        let eps = 0.5 * p.eps;
        let depth = p.depth + 1;
        stack.push(Panel {
            a: m,
            b: p.b,
            fa: p.fm,
            fm: frm,
            fb: p.fb,
            whole: right,
            eps,
            depth,
        });
        stack.push(Panel {
            a: p.a,
            b: m,
            fa: p.fa,
            fm: flm,
            fb: p.fm,
            whole: left,
            eps,
            depth,
        });
    }
    Ok(total)
}
