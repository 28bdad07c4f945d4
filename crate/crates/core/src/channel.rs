//! Membrane channel: each of `n` emitted molecules crosses independently
//! with probability `q`, so the received count is `Binomial(n, q)`.

use crate::error::{Error, Result};

/// Binomial count channel on inputs and outputs `{0, ..., n_max}`.
#[derive(Debug, Clone, PartialEq)]
pub struct MembraneChannel {
    q: f64,
    n_max: usize,
    /// Row-major `(n_max + 1)^2`; entry `[n][y] = P(Y = y | N = n)`.
    transition: Vec<f64>,
}

impl MembraneChannel {
    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Alphabet size `n_max + 1` (same for input and output).
    pub fn size(&self) -> usize {
        self.n_max + 1
    }

    pub fn row(&self, n: usize) -> &[f64] {
        let k = self.size();
        &self.transition[n * k..(n + 1) * k]
    }

    pub fn prob(&self, n: usize, y: usize) -> f64 {
        self.transition[n * self.size() + y]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.transition.chunks_exact(self.size())
    }
}

/// Moments of the normal approximation to the received count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianApproxParams {
    pub mu: f64,
    pub sigma_sq: f64,
}

/// Builds the binomial transition matrix, evaluating each pmf in log space
/// from a table of `ln k!`.
pub fn build_channel(q: f64, n_max: usize) -> Result<MembraneChannel> {
    check_probability(q)?;
    let k = n_max + 1;
    let mut transition = vec![0.0; k * k];

    if q == 0.0 || q == 1.0 {
        for n in 0..k {
            let y = if q == 1.0 { n } else { 0 };
            transition[n * k + y] = 1.0;
        }
        return Ok(MembraneChannel { q, n_max, transition });
    }

    let mut ln_fact = vec![0.0_f64; k];
    for i in 1..k {
        ln_fact[i] = ln_fact[i - 1] + (i as f64).ln();
    }
    let ln_q = q.ln();
    let ln_1mq = (-q).ln_1p();
    for n in 0..k {
        let row = &mut transition[n * k..=n * k + n];
        for (y, entry) in row.iter_mut().enumerate() {
            let ln_pmf = ln_fact[n] - ln_fact[y] - ln_fact[n - y]
                + y as f64 * ln_q
                + (n - y) as f64 * ln_1mq;
            *entry = ln_pmf.exp();
        }
        // log-space rounding grows with ln n!; renormalise
        let total: f64 = row.iter().sum();
        row.iter_mut().for_each(|w| *w /= total);
    }
    Ok(MembraneChannel { q, n_max, transition })
}

/// Normal approximation with `mu = n q` and `sigma^2 = n^2 q^2 (1 - q)^2`.
///
/// Note `sigma^2` is not the binomial variance `n q (1 - q)`. Diagnostic only,
/// capacity never uses it.
pub fn gaussian_approx(n: usize, q: f64) -> Result<GaussianApproxParams> {
    check_probability(q)?;
    let n = n as f64;
    Ok(GaussianApproxParams {
        mu: n * q,
        sigma_sq: n * n * q * q * (1.0 - q) * (1.0 - q),
    })
}

fn check_probability(q: f64) -> Result<()> {
    if (0.0..=1.0).contains(&q) {
        Ok(())
    } else {
        Err(Error::invalid("q", format!("must lie in [0, 1], got {q}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn lossless_membrane_is_identity() {
        let ch = build_channel(1.0, 4).unwrap();
        for n in 0..5 {
            for y in 0..5 {
                assert_eq!(ch.prob(n, y), if n == y { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn opaque_membrane_erases_everything() {
        let ch = build_channel(0.0, 4).unwrap();
        for row in ch.rows() {
            assert_eq!(row[0], 1.0);
            assert!(row[1..].iter().all(|&p| p == 0.0));
        }
    }

    #[test]
    fn half_row_two() {
        let ch = build_channel(0.5, 3).unwrap();
        let row = ch.row(2);
        assert_abs_diff_eq!(row[0], 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(row[1], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(row[2], 0.25, epsilon = 1e-15);
        assert_eq!(row[3], 0.0);
    }

    #[test]
    fn large_alphabet_is_stochastic() {
        let ch = build_channel(0.37, 400).unwrap();
        for (n, row) in ch.rows().enumerate() {
            assert_abs_diff_eq!(row.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
            assert!(row[n + 1..].iter().all(|&p| p == 0.0));
        }
    }

    #[test]
    fn rejects_bad_probability() {
        assert!(build_channel(-0.1, 3).is_err());
        assert!(build_channel(1.5, 3).is_err());
        assert!(build_channel(f64::NAN, 3).is_err());
        assert!(gaussian_approx(3, 2.0).is_err());
    }

    #[test]
    fn gaussian_examples() {
        assert_eq!(gaussian_approx(0, 0.3).unwrap(), GaussianApproxParams { mu: 0.0, sigma_sq: 0.0 });
        assert_eq!(gaussian_approx(10, 0.5).unwrap(), GaussianApproxParams { mu: 5.0, sigma_sq: 6.25 });
        assert_eq!(gaussian_approx(10, 1.0).unwrap(), GaussianApproxParams { mu: 10.0, sigma_sq: 0.0 });
    }
}
