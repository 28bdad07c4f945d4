//! Experiment runners behind the `table2`, `fig2`, `point` and `validate` subcommands.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;

use crate::capacity::{blahut_arimoto, CapacityResult, DEFAULT_MAX_ITER};
use crate::channel::build_channel;
use crate::error::{Error, Result};
use crate::kinetics::{
    pss_deviation, pss_validity, simulate_full, InitialState, KineticParams, PssValidityReport,
};
use crate::numerics::ToleranceConfig;
use crate::perturbation::{design_slot, max_product_approx, slot_time, PerturbationBudget, SlotDesign};

use super::config::ExperimentConfig;
use super::format::{format_sig, render_csv, Cell};

pub const TABLE2_HEADER: [&str; 4] = ["delta", "t_star", "p_max_quadrature", "p_max_approx"];
pub const FIG2_HEADER: [&str; 8] = [
    "delta",
    "q",
    "t_star",
    "p_max",
    "n_max",
    "capacity_bits",
    "ba_iterations",
    "ba_gap_bits",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Table2Row {
    pub delta: f64,
    pub t_star: f64,
    pub p_max_quadrature: f64,
    pub p_max_approx: f64,
}

/// One `(delta, q)` point of the capacity sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub delta: f64,
    pub q: f64,
    pub t_star: f64,
    pub p_max: f64,
    pub n_max: usize,
    pub capacity_bits: f64,
    pub ba_iterations: usize,
    pub ba_gap_bits: f64,
}

fn michaelis(config: &ExperimentConfig) -> Result<KineticParams> {
    KineticParams::from_michaelis(config.km, config.vmax, None)
}

pub fn table2_rows(config: &ExperimentConfig) -> Result<Vec<Table2Row>> {
    config.validate()?;
    let params = michaelis(config)?;
    config
        .delta_list
        .iter()
        .map(|&delta| {
            let budget = PerturbationBudget::new(delta)?;
            let design = design_slot(&params, config.s0, &budget, config.volume)?;
            Ok(Table2Row {
                delta,
                t_star: design.t_star,
                p_max_quadrature: design.p_max,
                p_max_approx: max_product_approx(&budget),
            })
        })
        .collect()
}

pub fn render_table2(config: &ExperimentConfig, rows: &[Table2Row]) -> String {
    let cells: Vec<Vec<Cell>> = rows
        .iter()
        .map(|r| {
            vec![
                Cell::Real(r.delta),
                Cell::Real(r.t_star),
                Cell::Real(r.p_max_quadrature),
                Cell::Real(r.p_max_approx),
            ]
        })
        .collect();
    render_csv("mmlink table2", &config.describe(), &TABLE2_HEADER, &cells)
}

pub fn run_table2(config: &ExperimentConfig) -> Result<String> {
    Ok(render_table2(config, &table2_rows(config)?))
}

fn sweep_point(design: &SlotDesign, delta: f64, q: f64, tol_bits: f64) -> Result<SweepRow> {
    let channel = build_channel(q, design.n_max)?;
    let cap = blahut_arimoto(&channel, tol_bits, DEFAULT_MAX_ITER)?;
    Ok(SweepRow {
        delta,
        q,
        t_star: design.t_star,
        p_max: design.p_max,
        n_max: design.n_max,
        capacity_bits: cap.capacity_bits,
        ba_iterations: cap.iterations,
        ba_gap_bits: cap.gap_bits,
    })
}

/// Evaluates every `(delta, q)` pair in parallel; rows come back sorted by `(delta, q)`.
pub fn fig2_rows(config: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    config.validate()?;
    let params = michaelis(config)?;
    let designs: Vec<(f64, SlotDesign)> = config
        .delta_list
        .par_iter()
        .map(|&delta| {
            let budget = PerturbationBudget::new(delta)?;
            Ok((delta, design_slot(&params, config.s0, &budget, config.volume)?))
        })
        .collect::<Result<_>>()?;
    let points: Vec<(f64, SlotDesign, f64)> = designs
        .iter()
        .flat_map(|&(delta, design)| config.q_list.iter().map(move |&q| (delta, design, q)))
        .collect();
    let mut rows: Vec<SweepRow> = points
        .par_iter()
        .map(|&(delta, design, q)| sweep_point(&design, delta, q, config.tol_bits))
        .collect::<Result<_>>()?;
    rows.sort_by(|a, b| a.delta.total_cmp(&b.delta).then(a.q.total_cmp(&b.q)));
    Ok(rows)
}

pub fn render_fig2(config: &ExperimentConfig, rows: &[SweepRow]) -> String {
    let cells: Vec<Vec<Cell>> = rows
        .iter()
        .map(|r| {
            vec![
                Cell::Real(r.delta),
                Cell::Real(r.q),
                Cell::Real(r.t_star),
                Cell::Real(r.p_max),
                Cell::Count(r.n_max),
                Cell::Real(r.capacity_bits),
                Cell::Count(r.ba_iterations),
                Cell::Real(r.ba_gap_bits),
            ]
        })
        .collect();
    render_csv("mmlink fig2", &config.describe(), &FIG2_HEADER, &cells)
}

pub fn run_fig2(config: &ExperimentConfig) -> Result<String> {
    Ok(render_fig2(config, &fig2_rows(config)?))
}

/// Gnuplot script drawing capacity against delta, one curve per `q`, from `csv_path`.
pub fn render_plot_script(config: &ExperimentConfig, csv_path: &Path) -> String {
    let data = csv_path.display().to_string().replace('\'', "''");
    let mut out = String::new();
    writeln!(out, "# capacity vs perturbation budget").unwrap();
    writeln!(out, "set datafile separator ','").unwrap();
    writeln!(out, "set datafile commentschars '#d'").unwrap();
    writeln!(out, "set xlabel 'perturbation budget delta'").unwrap();
    writeln!(out, "set ylabel 'capacity (bits per slot)'").unwrap();
    writeln!(out, "set key left top").unwrap();
    writeln!(out, "set grid").unwrap();
    let curves: Vec<String> = config
        .q_list
        .iter()
        .map(|&q| {
            let q = format_sig(q);
            format!("'{data}' using 1:($2=={q} ? $6 : NaN) with linespoints title 'q = {q}'")
        })
        .collect();
    writeln!(out, "plot {}", curves.join(", \\\n     ")).unwrap();
    out
}

/// Slot design and capacity for a single `(delta, q)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointReport {
    pub design: SlotDesign,
    pub q: f64,
    pub delta: f64,
    pub capacity: CapacityResult,
}

pub fn point(config: &ExperimentConfig) -> Result<PointReport> {
    config.validate()?;
    let [delta] = config.delta_list[..] else {
        return Err(Error::config("delta", format!("point needs exactly one value, got {}", config.delta_list.len())));
    };
    let [q] = config.q_list[..] else {
        return Err(Error::config("q", format!("point needs exactly one value, got {}", config.q_list.len())));
    };
    let params = michaelis(config)?;
    let design = design_slot(&params, config.s0, &PerturbationBudget::new(delta)?, config.volume)?;
    let channel = build_channel(q, design.n_max)?;
    let capacity = blahut_arimoto(&channel, config.tol_bits, DEFAULT_MAX_ITER)?;
    Ok(PointReport {
        design,
        q,
        delta,
        capacity,
    })
}

pub fn render_point(report: &PointReport) -> String {
    let d = &report.design;
    let c = &report.capacity;
    let mut out = String::new();
    writeln!(out, "perturbation budget  delta   = {} (concentration)", format_sig(report.delta)).unwrap();
    writeln!(out, "membrane crossing    q       = {}", format_sig(report.q)).unwrap();
    writeln!(out, "slot duration        t_star  = {} (time)", format_sig(d.t_star)).unwrap();
    writeln!(out, "peak product         p_max   = {} (concentration)", format_sig(d.p_max)).unwrap();
    writeln!(out, "volume               V       = {}", format_sig(d.volume)).unwrap();
    writeln!(out, "max molecules        n_max   = {} (molecules)", d.n_max).unwrap();
    writeln!(out, "capacity             C       = {} (bits per slot)", format_sig(c.capacity_bits)).unwrap();
    writeln!(out, "bound gap                    = {} (bits)", format_sig(c.gap_bits)).unwrap();
    writeln!(out, "iterations                   = {}", c.iterations).unwrap();
    let support: Vec<String> = c
        .optimal_input
        .as_slice()
        .iter()
        .enumerate()
        .filter(|(_, &p)| p > 1e-9)
        .map(|(n, &p)| format!("{n}:{}", format_sig(p)))
        .collect();
    writeln!(out, "optimal input (n:p)          = {}", support.join(" ")).unwrap();
    out
}

pub fn run_point(config: &ExperimentConfig) -> Result<String> {
    Ok(render_point(&point(config)?))
}

/// PSS validity check, with an optional comparison against the full model.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub km: f64,
    pub s0: f64,
    pub e0: f64,
    pub validity: PssValidityReport,
    pub comparison: Option<OdeComparison>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeComparison {
    pub delta: f64,
    pub t_star: f64,
    /// `max |S_full - S_pss| / S0` on `[0, t_star]`.
    pub max_deviation: f64,
    pub enzyme_conservation_error: f64,
    pub substrate_conservation_error: f64,
}

fn elementary_rates(config: &ExperimentConfig) -> Result<Option<(f64, f64, f64)>> {
    match (config.k1, config.k_minus1, config.k2) {
        (Some(k1), Some(km1), Some(k2)) => Ok(Some((k1, km1, k2))),
        (None, None, None) => Ok(None),
        (k1, km1, _) => {
            let missing = if k1.is_none() {
                "k1"
            } else if km1.is_none() {
                "k-minus1"
            } else {
                "k2"
            };
            Err(Error::config(missing, "elementary rates must be given together"))
        }
    }
}

/// Without `e0`, the enzyme total defaults to `Vmax / k2` when rates are given.
pub fn validate(config: &ExperimentConfig) -> Result<ValidationReport> {
    config.validate()?;
    let rates = elementary_rates(config)?;
    if config.full_ode && rates.is_none() {
        return Err(Error::MissingRates);
    }
    let e0 = match (config.e0, rates) {
        (Some(e0), _) => e0,
        (None, Some((_, _, k2))) => config.vmax / k2,
        (None, None) => return Err(Error::config("e0", "required unless elementary rates are given")),
    };
    let km = match rates {
        Some((k1, km1, k2)) => (km1 + k2) / k1,
        None => config.km,
    };
    let init = InitialState::new(config.s0, e0, 0.0)?;
    let shape = KineticParams::from_michaelis(km, config.vmax, None)?;
    let validity = pss_validity(&shape, &init);

    let delta = config.delta_list.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let comparison = match rates {
        None => None,
        Some(_) if e0 == 0.0 => Some(OdeComparison {
            delta,
            t_star: f64::INFINITY,
            max_deviation: 0.0,
            enzyme_conservation_error: 0.0,
            substrate_conservation_error: 0.0,
        }),
        Some((k1, km1, k2)) => {
            let params = KineticParams::from_rates(k1, km1, k2, e0)?;
            let t_star = slot_time(&params, config.s0, &PerturbationBudget::new(delta)?)?;
            let tol = ToleranceConfig {
                rel_tol: 1e-8,
                abs_tol: 1e-12,
                max_iterations: 1 << 22,
            };
            let traj = simulate_full(&params, &init, t_star, &tol)?;
            Some(OdeComparison {
                delta,
                t_star,
                max_deviation: pss_deviation(&traj, &params, config.s0, t_star)?,
                enzyme_conservation_error: traj.enzyme_conservation_error(),
                substrate_conservation_error: traj.substrate_conservation_error(),
            })
        }
    };
    Ok(ValidationReport {
        km,
        s0: config.s0,
        e0,
        validity,
        comparison,
    })
}

pub fn render_validation(report: &ValidationReport) -> String {
    let mut out = String::new();
    writeln!(out, "km = {}, s0 = {}, e0 = {}", format_sig(report.km), format_sig(report.s0), format_sig(report.e0))
        .unwrap();
    writeln!(out, "enzyme_ratio = {}", format_sig(report.validity.enzyme_ratio)).unwrap();
    writeln!(out, "verdict = {}", report.validity.verdict()).unwrap();
    if let Some(c) = &report.comparison {
        writeln!(out, "delta = {}, t_star = {}", format_sig(c.delta), format_sig(c.t_star)).unwrap();
        writeln!(out, "max_deviation = {} (fraction of s0)", format_sig(c.max_deviation)).unwrap();
        writeln!(out, "enzyme_conservation_error = {}", format_sig(c.enzyme_conservation_error)).unwrap();
        writeln!(out, "substrate_conservation_error = {}", format_sig(c.substrate_conservation_error)).unwrap();
    }
    out
}

pub fn run_validate(config: &ExperimentConfig) -> Result<String> {
    Ok(render_validation(&validate(config)?))
}
