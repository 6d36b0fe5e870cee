//! Experiment drivers behind the `drocc` command line.
//!
//! Each driver turns an [`ExperimentConfig`] into a [`Table`] whose rows are
//! sorted by their key columns, so identical configs give identical CSV
//! bytes regardless of the order in which parallel cells finish.

pub mod config;

use std::io::Write;

use rayon::prelude::*;
use thiserror::Error;

use crate::bounds::{independent_candidate, lower_bound, upper_bound};
use crate::error::Error;
use crate::geometry::{covering_radius, quantize_greedy, sample_uniform, GenerationMode, SampleSet, SupportBox};
use crate::solver::{
    reference_value, solve_sampled_model_with, theoretical_gap_bound, SolveOptions, REFERENCE_POOL_FACTOR,
};

pub use config::{Command, ExperimentConfig, InstanceConfig};

/// Sample count of the fine reference solve used by `converge` and `coverage`.
pub const REFERENCE_COUNT: usize = 4096;
/// Seed of the reference quantizer pool.
pub const REFERENCE_SEED: u64 = 0x5EED;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Solver(#[from] Error),
    #[error("i/o error: {0}")]
    Io(String),
}

impl ExperimentError {
    /// Process exit code: 2 for configuration problems, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            ExperimentError::Config(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Int(u64),
    Float(f64),
    Text(String),
    Empty,
}

impl Field {
    fn render(&self) -> String {
        match self {
            Field::Int(v) => v.to_string(),
            Field::Float(v) => format!("{v:.16e}"),
            Field::Text(s) => s.clone(),
            Field::Empty => String::new(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Field::Int(v) => Some(*v as f64),
            Field::Float(v) => Some(*v),
            _ => None,
        }
    }
}

impl From<Option<f64>> for Field {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Field::Empty, Field::Float)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Field>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| *h == name)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), ExperimentError> {
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        let io = |e: csv::Error| ExperimentError::Io(e.to_string());
        writer.write_record(&self.header).map_err(io)?;
        for row in &self.rows {
            writer.write_record(row.iter().map(Field::render)).map_err(io)?;
        }
        writer.flush().map_err(|e| ExperimentError::Io(e.to_string()))
    }

    pub fn to_csv_string(&self) -> Result<String, ExperimentError> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| ExperimentError::Io(e.to_string()))
    }
}

fn draw(support: &SupportBox<f64>, mode: GenerationMode, count: usize, seed: u64) -> Result<SampleSet<f64>, Error> {
    match mode {
        GenerationMode::GreedyQuantizer => quantize_greedy(support, count, REFERENCE_POOL_FACTOR * count, seed),
        _ => sample_uniform(support, count, seed),
    }
}

fn cells(config: &ExperimentConfig) -> Vec<(usize, u64)> {
    let mut cells: Vec<(usize, u64)> = config
        .omega_sizes
        .iter()
        .flat_map(|&n| config.seeds.iter().map(move |&s| (n, s)))
        .collect();
    cells.sort_unstable();
    cells.dedup();
    cells
}

/// Runs the driver named by `config.command`.
pub fn run(config: &ExperimentConfig) -> Result<Table, ExperimentError> {
    match config.command {
        Command::Solve => run_solve(config),
        Command::Bounds => run_bounds(config),
        Command::Converge => run_converge(config),
        Command::BetaStudy => run_beta_study(config),
        Command::Coverage => run_coverage(config),
    }
}

/// One sampled solve per (omega_size, seed).
pub fn run_solve(config: &ExperimentConfig) -> Result<Table, ExperimentError> {
    let instance = config.instance.build()?;
    let mode = config.instance.sampling()?[0];
    let opts = SolveOptions {
        grid_per_dim: config.grid_per_dim,
    };
    let rows = cells(config)
        .into_par_iter()
        .map(|(n, seed)| {
            let samples = draw(&instance.support, mode, n, seed)?;
            let r = solve_sampled_model_with(&instance, &config.spec, &samples, &opts)?;
            let x_hat = r
                .x_hat
                .iter()
                .map(|v| format!("{v:.16e}"))
                .collect::<Vec<_>>()
                .join(";");
            Ok(vec![
                Field::Int(n as u64),
                Field::Int(seed),
                Field::Float(r.v_hat),
                Field::Int(r.x_index as u64),
                Field::Text(x_hat),
                Field::Int(r.infeasible_candidates as u64),
                r.beta.into(),
                r.theoretical_gap.into(),
            ])
        })
        .collect::<Result<Vec<_>, Error>>()?;
    Ok(Table {
        header: vec![
            "omega_size",
            "seed",
            "v_hat",
            "x_index",
            "x_hat",
            "infeasible_candidates",
            "beta",
            "theoretical_gap",
        ],
        rows,
    })
}

/// Lower and upper confidence bounds per (omega_size, master seed).
pub fn run_bounds(config: &ExperimentConfig) -> Result<Table, ExperimentError> {
    let instance = config.instance.build()?;
    let rows = cells(config)
        .into_par_iter()
        .map(|(n, seed)| {
            let x_bar = independent_candidate(&instance, &config.spec, n, seed)?;
            let lo = lower_bound(&instance, &config.spec, n, config.m_prime, config.alpha, seed)?;
            let up = upper_bound(&instance, &config.spec, &x_bar, n, config.m, config.alpha, seed)?;
            Ok(vec![
                Field::Int(n as u64),
                Field::Int(seed),
                Field::Float(lo.bound),
                Field::Float(up.bound),
                Field::Float(lo.mean),
                Field::Float(up.mean),
                Field::Float(lo.sigma_hat),
                Field::Float(up.sigma_hat),
                Field::Int(lo.skipped_replicates as u64),
                Field::Int(up.skipped_replicates as u64),
            ])
        })
        .collect::<Result<Vec<_>, Error>>()?;
    Ok(Table {
        header: vec![
            "omega_size",
            "seed",
            "lower",
            "upper",
            "lower_mean",
            "upper_mean",
            "lower_sigma",
            "upper_sigma",
            "lower_skipped",
            "upper_skipped",
        ],
        rows,
    })
}

/// Gap between the sampled value and a fine reference per (omega_size, seed).
pub fn run_converge(config: &ExperimentConfig) -> Result<Table, ExperimentError> {
    let instance = config.instance.build()?;
    let mode = config.instance.sampling()?[0];
    let reference = reference_value(&instance, &config.spec, REFERENCE_COUNT, REFERENCE_SEED)?.value;
    let opts = SolveOptions {
        grid_per_dim: config.grid_per_dim,
    };
    let rows = cells(config)
        .into_par_iter()
        .map(|(n, seed)| {
            let samples = draw(&instance.support, mode, n, seed)?;
            let r = solve_sampled_model_with(&instance, &config.spec, &samples, &opts)?;
            let beta = match r.beta {
                Some(b) => b,
                None => covering_radius(&instance.support, &samples, config.grid_per_dim)?,
            };
            let bound = theoretical_gap_bound(&instance, &config.spec, beta).ok();
            Ok(vec![
                Field::Int(n as u64),
                Field::Int(seed),
                Field::Float(r.v_hat),
                Field::Float(reference),
                Field::Float((r.v_hat - reference).abs()),
                Field::Float(beta),
                bound.into(),
            ])
        })
        .collect::<Result<Vec<_>, Error>>()?;
    Ok(Table {
        header: vec![
            "omega_size",
            "seed",
            "v_hat",
            "reference",
            "gap",
            "beta",
            "theoretical_bound",
        ],
        rows,
    })
}

/// `(n (2 beta)^d - ln n) / ln ln n`, undefined for `n <= 2`.
pub fn scaled_stat(n: usize, beta: f64, d: usize) -> Option<f64> {
    if n <= 2 {
        return None;
    }
    let nf = n as f64;
    Some((nf * (2.0 * beta).powi(d as i32) - nf.ln()) / nf.ln().ln())
}

/// Covering radius of each requested sampling mode per (omega_size, seed).
pub fn run_beta_study(config: &ExperimentConfig) -> Result<Table, ExperimentError> {
    let support = config.instance.support()?;
    let modes = config.instance.sampling()?;
    let mut jobs: Vec<(usize, u64, GenerationMode)> = cells(config)
        .into_iter()
        .flat_map(|(n, s)| modes.iter().map(move |&m| (n, s, m)))
        .collect();
    jobs.sort_by_key(|&(n, s, m)| (n, s, m.label()));
    jobs.dedup();
    let rows = jobs
        .into_par_iter()
        .map(|(n, seed, mode)| {
            let samples = draw(&support, mode, n, seed)?;
            let beta = covering_radius(&support, &samples, config.grid_per_dim)?;
            Ok(vec![
                Field::Int(n as u64),
                Field::Int(seed),
                Field::Text(mode.label().into()),
                Field::Float(beta),
                scaled_stat(n, beta, support.dim()).into(),
            ])
        })
        .collect::<Result<Vec<_>, Error>>()?;
    Ok(Table {
        header: vec!["omega_size", "seed", "mode", "beta", "scaled_stat"],
        rows,
    })
}

/// One lower/upper bound pair per master seed, checked against a fine
/// reference, plus a summary row of coverage fractions.
pub fn run_coverage(config: &ExperimentConfig) -> Result<Table, ExperimentError> {
    let instance = config.instance.build()?;
    let n = config.omega_sizes[0];
    let reference = reference_value(&instance, &config.spec, REFERENCE_COUNT, REFERENCE_SEED)?.value;
    let mut seeds = config.seeds.clone();
    seeds.sort_unstable();
    seeds.dedup();
    let trials = seeds
        .par_iter()
        .map(|&seed| {
            let x_bar = independent_candidate(&instance, &config.spec, n, seed)?;
            let lo = lower_bound(&instance, &config.spec, n, config.m_prime, config.alpha, seed)?;
            let up = upper_bound(&instance, &config.spec, &x_bar, n, config.m, config.alpha, seed)?;
            Ok((seed, lo.bound, up.bound))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let flag = |b: bool| Field::Int(u64::from(b));
    let mut rows: Vec<Vec<Field>> = trials
        .iter()
        .map(|&(seed, lo, up)| {
            vec![
                Field::Text(seed.to_string()),
                Field::Float(lo),
                Field::Float(up),
                Field::Float(reference),
                flag(lo <= reference),
                flag(up >= reference),
            ]
        })
        .collect();
    let count = trials.len() as f64;
    let covered_lower = trials.iter().filter(|t| t.1 <= reference).count() as f64 / count;
    let covered_upper = trials.iter().filter(|t| t.2 >= reference).count() as f64 / count;
    rows.push(vec![
        Field::Text("summary".into()),
        Field::Empty,
        Field::Empty,
        Field::Float(reference),
        Field::Float(covered_lower),
        Field::Float(covered_upper),
    ]);
    Ok(Table {
        header: vec!["trial", "lower", "upper", "reference", "covered_lower", "covered_upper"],
        rows,
    })
}
