//! Newton refinement of a Blahut-Arimoto iterate on its apparent support.
//!
//! A capacity-achieving input `p` with output `r = p W` satisfies
//! `D(W_n || r) = C` for every `n` in its support and `D(W_n || r) <= C`
//! elsewhere. Given a support guess, the equalities plus `sum p = 1` form a
//! square system in `(p_S, C)` solved here by Newton's method, with inputs
//! dropped when Newton drives them negative and re-added when they violate
//! the inequality.

use nalgebra::{DMatrix, DVector};

use crate::channel::MembraneChannel;

const SUPPORT_THRESHOLD: f64 = 1e-6;
const NEWTON_MAX_ITER: usize = 60;
const RESIDUAL_TOL: f64 = 1e-14;
const KKT_SLACK: f64 = 1e-11;

enum Newton {
    Converged { capacity: f64 },
    /// Position in the support vector of the input to drop.
    Infeasible(usize),
    Failed,
}

/// Returns a full-length input distribution that satisfies the optimality
/// conditions to working precision, or `None` when no consistent support is
/// found. The caller certifies the result with the capacity bracket.
pub(super) fn refine_support(channel: &MembraneChannel, input: &[f64]) -> Option<Vec<f64>> {
    let k = channel.size();
    let peak = input.iter().cloned().fold(0.0, f64::max);
    let mut support: Vec<usize> = (0..k).filter(|&n| input[n] > SUPPORT_THRESHOLD * peak).collect();
    let mut p: Vec<f64> = support.iter().map(|&n| input[n]).collect();

    for _ in 0..4 * k + 8 {
        if support.is_empty() {
            return None;
        }
        normalise(&mut p);
        match newton(channel, &support, &mut p) {
            Newton::Converged { capacity } => {
                let full = scatter(k, &support, &p);
                let output = output_marginal(channel, &full);
                let violator = (0..k)
                    .filter(|n| !support.contains(n))
                    .map(|n| (n, divergence(channel.row(n), &output)))
                    .filter(|&(_, d)| d > capacity + KKT_SLACK)
                    .max_by(|a, b| a.1.total_cmp(&b.1));
                match violator {
                    None => return Some(full),
                    Some((n, _)) => {
                        let at = support.partition_point(|&s| s < n);
                        support.insert(at, n);
                        p.insert(at, 1e-3 / k as f64);
                    }
                }
            }
            Newton::Infeasible(at) => {
                support.remove(at);
                p.remove(at);
            }
            Newton::Failed => return None,
        }
    }
    None
}

fn newton(channel: &MembraneChannel, support: &[usize], p: &mut [f64]) -> Newton {
    let m = support.len();
    let k = channel.size();
    let mut full = scatter(k, support, p);
    let output = output_marginal(channel, &full);
    let mut capacity: f64 = support
        .iter()
        .zip(p.iter())
        .map(|(&n, &pn)| pn * divergence(channel.row(n), &output))
        .sum();

    let dim = m + 1;
    let mut jac = vec![0.0; dim * dim];
    let mut rhs = vec![0.0; dim];

    for _ in 0..NEWTON_MAX_ITER {
        full.fill(0.0);
        for (&n, &pn) in support.iter().zip(p.iter()) {
            full[n] = pn;
        }
        let output = output_marginal(channel, &full);

        let mut worst = 0.0_f64;
        for (i, &n) in support.iter().enumerate() {
            let f = divergence(channel.row(n), &output) - capacity;
            rhs[i] = -f;
            worst = worst.max(f.abs());
        }
        let mass: f64 = p.iter().sum();
        rhs[m] = 1.0 - mass;
        worst = worst.max((mass - 1.0).abs());
        if worst <= RESIDUAL_TOL {
            return Newton::Converged { capacity };
        }

        jac.fill(0.0);
        for (i, &a) in support.iter().enumerate() {
            let row_a = channel.row(a);
            for (j, &b) in support.iter().enumerate().skip(i) {
                let row_b = channel.row(b);
                let top = a.min(b);
                let v: f64 = (0..=top)
                    .filter(|&y| output[y] > 0.0)
                    .map(|y| row_a[y] * row_b[y] / output[y])
                    .sum();
                jac[i * dim + j] = -v;
                jac[j * dim + i] = -v;
            }
            jac[i * dim + m] = -1.0;
            jac[m * dim + i] = 1.0;
        }

        let Some(step) = solve_dense(&jac, &rhs, dim) else {
            return Newton::Failed;
        };

        let mut most_negative = None;
        for i in 0..m {
            let next = p[i] + step[i];
            if next <= 0.0 && most_negative.map_or(true, |(_, v)| next < v) {
                most_negative = Some((i, next));
            }
        }
        if let Some((i, _)) = most_negative {
            return Newton::Infeasible(i);
        }
        for i in 0..m {
            p[i] += step[i];
        }
        capacity += step[m];
        if step.iter().all(|s| s.abs() <= 1e-16) {
            return Newton::Converged { capacity };
        }
    }
    Newton::Failed
}

fn scatter(k: usize, support: &[usize], p: &[f64]) -> Vec<f64> {
    let mut full = vec![0.0; k];
    for (&n, &pn) in support.iter().zip(p) {
        full[n] = pn;
    }
    full
}

fn normalise(p: &mut [f64]) {
    let total: f64 = p.iter().sum();
    p.iter_mut().for_each(|v| *v /= total);
}

fn output_marginal(channel: &MembraneChannel, input: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; channel.size()];
    for (n, &pn) in input.iter().enumerate() {
        if pn > 0.0 {
            for (r, &w) in out.iter_mut().zip(&channel.row(n)[..=n]) {
                *r += pn * w;
            }
        }
    }
    out
}

/// `D(W_n || r)` in nats; infinite when `r` misses part of the row's support.
fn divergence(row: &[f64], output: &[f64]) -> f64 {
    row.iter()
        .zip(output)
        .filter(|(&w, _)| w > 0.0)
        .map(|(&w, &r)| if r > 0.0 { w * (w / r).ln() } else { f64::INFINITY })
        .sum()
}

/// Solves the row-major `n x n` system `a x = b` by LU with partial pivoting.
fn solve_dense(a: &[f64], b: &[f64], n: usize) -> Option<Vec<f64>> {
    let lu = DMatrix::from_row_slice(n, n, a).lu();
    let x = lu.solve(&DVector::from_column_slice(b))?;
    x.iter().all(|v| v.is_finite()).then(|| x.as_slice().to_vec())
}
