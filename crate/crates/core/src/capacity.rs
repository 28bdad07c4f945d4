//! Capacity of the membrane channel.
//!
//! [`blahut_arimoto`] is the production solver. It carries a certified
//! bracket on the capacity at every iteration: with `c_n = exp(D(W_n || r))`
//! for the current output marginal `r`,
//! `ln sum_n p_n c_n <= C <= max_n ln c_n`.
//! [`capacity_grid_oracle`] is an independent check for tiny alphabets.

use std::f64::consts::LN_2;

use crate::channel::MembraneChannel;
use crate::error::{Error, Result};

mod polish;

pub const DEFAULT_TOL_BITS: f64 = 1e-9;
pub const DEFAULT_MAX_ITER: usize = 100_000;

/// Probability vector over molecule counts `{0, ..., n_max}`.
#[derive(Debug, Clone, PartialEq)]
pub struct InputDistribution(Vec<f64>);

impl InputDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::invalid("input", "distribution must be non-empty"));
        }
        if probs.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
            return Err(Error::invalid("input", "probabilities must be finite and non-negative"));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::invalid("input", format!("probabilities sum to {total}, not 1")));
        }
        Ok(Self(probs))
    }

    pub fn uniform(size: usize) -> Self {
        Self(vec![1.0 / size as f64; size])
    }

    pub fn point_mass(size: usize, at: usize) -> Self {
        let mut p = vec![0.0; size];
        p[at] = 1.0;
        Self(p)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CapacityResult {
    pub capacity_bits: f64,
    pub optimal_input: InputDistribution,
    pub iterations: usize,
    /// Final `upper - lower` bracket width.
    pub gap_bits: f64,
}

/// Capacity bracket evaluated at one iterate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationBounds {
    pub lower_bits: f64,
    pub upper_bits: f64,
}

impl IterationBounds {
    pub fn gap_bits(&self) -> f64 {
        self.upper_bits - self.lower_bits
    }
}

/// Blahut-Arimoto iteration state for one channel.
#[derive(Debug, Clone)]
pub struct BlahutArimoto<'a> {
    channel: &'a MembraneChannel,
    input: Vec<f64>,
    /// `sum_y W log W` per input row, in nats.
    neg_entropy: Vec<f64>,
    output: Vec<f64>,
    log_output: Vec<f64>,
    /// `D(W_n || r)` in nats at the last evaluation.
    divergence: Vec<f64>,
}

impl<'a> BlahutArimoto<'a> {
    /// Starts from the uniform input distribution.
    pub fn new(channel: &'a MembraneChannel) -> Self {
        let k = channel.size();
        Self::with_input(channel, vec![1.0 / k as f64; k])
    }

    fn with_input(channel: &'a MembraneChannel, input: Vec<f64>) -> Self {
        let k = channel.size();
        let neg_entropy = channel
            .rows()
            .map(|row| row.iter().filter(|&&w| w > 0.0).map(|&w| w * w.ln()).sum())
            .collect();
        Self {
            channel,
            input,
            neg_entropy,
            output: vec![0.0; k],
            log_output: vec![0.0; k],
            divergence: vec![0.0; k],
        }
    }

    pub fn input(&self) -> &[f64] {
        &self.input
    }

    /// Capacity bracket at the current input, in nats: `(lower, upper)`.
    fn evaluate(&mut self) -> (f64, f64) {
        let k = self.channel.size();

        // Row n of a binomial channel is supported on y <= n.
        self.output.fill(0.0);
        for (n, &p) in self.input.iter().enumerate() {
            if p > 0.0 {
                let row = &self.channel.row(n)[..=n];
                for (r, &w) in self.output.iter_mut().zip(row) {
                    *r += p * w;
                }
            }
        }
        for (l, &r) in self.log_output.iter_mut().zip(&self.output) {
            *l = if r > 0.0 { r.ln() } else { f64::NEG_INFINITY };
        }

        let mut upper = f64::NEG_INFINITY;
        for n in 0..k {
            let row = &self.channel.row(n)[..=n];
            let cross: f64 = row
                .iter()
                .zip(&self.log_output)
                .filter(|(&w, _)| w > 0.0)
                .map(|(&w, &l)| w * l)
                .sum();
            let d = self.neg_entropy[n] - cross;
            self.divergence[n] = d;
            upper = upper.max(d);
        }

        // Shift by the maximum before exponentiating.
        let total: f64 = self
            .input
            .iter()
            .zip(&self.divergence)
            .filter(|(&p, _)| p > 0.0)
            .map(|(&p, &d)| p * (d - upper).exp())
            .sum();
        (upper + total.ln(), upper)
    }

    /// Evaluates the bracket at the current input, then applies the
    /// multiplicative update `p_n <- p_n c_n / sum_m p_m c_m`.
    pub fn step(&mut self) -> IterationBounds {
        let (lower, upper) = self.evaluate();
        let mut total = 0.0;
        for (p, &d) in self.input.iter_mut().zip(&self.divergence) {
            if *p > 0.0 {
                *p *= (d - upper).exp();
                total += *p;
            }
        }
        for p in self.input.iter_mut() {
            *p /= total;
        }
        IterationBounds {
            lower_bits: lower / LN_2,
            upper_bits: upper / LN_2,
        }
    }
}

/// Iteration counts at which a support refinement is attempted.
fn polish_due(iteration: usize) -> bool {
    iteration >= 32 && (iteration.is_power_of_two() || iteration % 1024 == 0)
}

/// Channel capacity in bits.
///
/// Runs Blahut-Arimoto from the uniform input until the certified bracket is
/// narrower than `tol_bits`, reporting the lower end as the capacity together
/// with the updated input distribution (whose mutual information lies inside
/// the bracket).
///
/// When the optimal input leaves some counts unused, the multiplicative
/// update drains their mass only geometrically and the bracket closes
/// slowly. At iterations 32, 64, 128, ... (and every 1024 thereafter) the
/// current iterate's support is refined by Newton's method on the
/// equal-divergence conditions; the refined input is accepted only if the
/// full-alphabet bracket evaluated at it is within `tol_bits`.
pub fn blahut_arimoto(channel: &MembraneChannel, tol_bits: f64, max_iter: usize) -> Result<CapacityResult> {
    if !(tol_bits > 0.0 && tol_bits.is_finite()) {
        return Err(Error::invalid("tol_bits", format!("must be positive, got {tol_bits}")));
    }
    if max_iter == 0 {
        return Err(Error::invalid("max_iter", "must be at least 1"));
    }
    let ceiling = (channel.size() as f64).log2();
    let finish = |input: Vec<f64>, lower: f64, gap: f64, iterations: usize| CapacityResult {
        capacity_bits: lower.clamp(0.0, ceiling),
        optimal_input: InputDistribution(input),
        iterations,
        gap_bits: gap,
    };

    let mut solver = BlahutArimoto::new(channel);
    let mut last = None;
    for iteration in 1..=max_iter {
        let bounds = solver.step();
        let gap = bounds.gap_bits().max(0.0);
        if gap <= tol_bits {
            return Ok(finish(solver.input, bounds.lower_bits, gap, iteration));
        }
        last = Some(bounds);

        if polish_due(iteration) {
            if let Some(refined) = polish::refine_support(channel, solver.input()) {
                let mut check = BlahutArimoto::with_input(channel, refined);
                let (lower, upper) = check.evaluate();
                let gap = ((upper - lower) / LN_2).max(0.0);
                if gap <= tol_bits {
                    return Ok(finish(check.input, lower / LN_2, gap, iteration));
                }
            }
        }
    }
    let last = last.expect("max_iter >= 1");
    Err(Error::CapacityNotConverged {
        iterations: max_iter,
        lower_bits: last.lower_bits,
        upper_bits: last.upper_bits,
    })
}

/// `I(X; Y)` in bits, with `0 log 0 = 0`.
pub fn mutual_information(input: &InputDistribution, channel: &MembraneChannel) -> Result<f64> {
    if input.len() != channel.size() {
        return Err(Error::DimensionMismatch {
            input: input.len(),
            channel: channel.size(),
        });
    }
    Ok(mi_bits(input.as_slice(), channel))
}

fn mi_bits(p: &[f64], channel: &MembraneChannel) -> f64 {
    let k = channel.size();
    let mut output = vec![0.0; k];
    for (row, &pn) in channel.rows().zip(p) {
        for (r, &w) in output.iter_mut().zip(row) {
            *r += pn * w;
        }
    }
    let mut info = 0.0;
    for (row, &pn) in channel.rows().zip(p) {
        if pn == 0.0 {
            continue;
        }
        for (&w, &r) in row.iter().zip(&output) {
            if w > 0.0 {
                info += pn * w * (w / r).log2();
            }
        }
    }
    info
}

/// Best mutual information over the simplex grid with spacing `1 / grid_steps`.
///
/// For `n_max = 1` every grid point is evaluated. For `n_max = 2` each line
/// of constant `p_0` is searched by discrete ternary search, which finds the
/// exact grid maximum on that line because mutual information is concave in
/// the input distribution.
pub fn capacity_grid_oracle(channel: &MembraneChannel, grid_steps: usize) -> Result<f64> {
    if grid_steps == 0 {
        return Err(Error::invalid("grid_steps", "must be at least 1"));
    }
    let s = grid_steps as f64;
    match channel.n_max() {
        0 => Ok(0.0),
        1 => Ok((0..=grid_steps)
            .map(|i| {
                let a = i as f64 / s;
                mi_bits(&[a, 1.0 - a], channel)
            })
            .fold(0.0, f64::max)),
        2 => {
            let mut best = 0.0_f64;
            for i in 0..=grid_steps {
                let rest = grid_steps - i;
                let at = |j: usize| {
                    let p = [i as f64 / s, j as f64 / s, (rest - j) as f64 / s];
                    mi_bits(&p, channel)
                };
                let (mut lo, mut hi) = (0usize, rest);
                while hi - lo > 2 {
                    let m1 = lo + (hi - lo) / 3;
                    let m2 = hi - (hi - lo) / 3;
                    if at(m1) < at(m2) {
                        lo = m1 + 1;
                    } else {
                        hi = m2;
                    }
                }
                for j in lo..=hi {
                    best = best.max(at(j));
                }
            }
            Ok(best)
        }
        n => Err(Error::OracleDimension(n)),
    }
}
