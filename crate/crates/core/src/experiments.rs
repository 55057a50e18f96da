//! Monte Carlo harness and sweep drivers.
//!
//! A trial draws a pooling matrix (fresh per trial by default, so the
//! measured event matches the probabilistic-design analysis), draws or
//! reuses a defective set, pushes it through the erasure channel and checks
//! whether the distance decoder returns exactly the true support. Trials
//! run in parallel; every trial derives its own seeds from the master seed
//! via [`seed::derive`], so the report is identical regardless of thread
//! count or scheduling.
//!
//! Sweep drivers evaluate the design solver over grids of failure targets
//! (tests versus failure probability) or of (alpha, activation) cells (the
//! design surface), and CSV emitters serialize the results; column schemas
//! are documented in `FORMATS.md`.

use std::io::Write;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::{end_to_end_measure, ChannelParams};
use crate::construction::{sample_contact_matrix, ConstructionParams};
use crate::decoder::distance_decode;
use crate::design::{solve_alpha, DesignResult, DesignSpec};
use crate::error::{Error, Result};
use crate::model::{ContactMatrix, SupportSet};
use crate::seed;

const MATRIX_STREAM: u64 = 1;
const SUPPORT_STREAM: u64 = 2;
const CHANNEL_STREAM: u64 = 3;

/// Where each trial's defective set comes from.
#[derive(Clone, Debug)]
pub enum SupportMode {
    /// Uniform K-subset drawn fresh per trial.
    RandomPerTrial,
    /// The same support in every trial.
    Fixed(SupportSet),
}

/// Where each trial's pooling matrix comes from.
#[derive(Clone, Debug)]
pub enum MatrixMode {
    /// Redraw with density `alpha / K` each trial.
    FreshPerTrial,
    /// Reuse one matrix across all trials.
    Fixed(ContactMatrix),
}

/// Monte Carlo configuration.
#[derive(Clone, Debug)]
pub struct TrialConfig {
    pub population: usize,
    pub sparsity: usize,
    pub activation: f64,
    pub tests: usize,
    pub alpha: f64,
    pub decoder_threshold: usize,
    pub trials: usize,
    pub master_seed: u64,
    pub support_mode: SupportMode,
    pub matrix_mode: MatrixMode,
}

impl TrialConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidParameter {
                name: "trials",
                value: 0.0,
                requirement: "trials >= 1",
            });
        }
        if self.sparsity == 0 || self.sparsity >= self.population {
            return Err(Error::InvalidParameter {
                name: "sparsity",
                value: self.sparsity as f64,
                requirement: "1 <= K < N",
            });
        }
        if !(self.activation > 0.0 && self.activation <= 1.0) {
            return Err(Error::InvalidParameter {
                name: "activation",
                value: self.activation,
                requirement: "0 < p <= 1",
            });
        }
        if self.tests == 0 {
            return Err(Error::InvalidParameter {
                name: "tests",
                value: 0.0,
                requirement: "tests >= 1",
            });
        }
        let q = self.alpha / self.sparsity as f64;
        if let MatrixMode::FreshPerTrial = self.matrix_mode {
            if !(q > 0.0 && q <= 1.0) {
                return Err(Error::InvalidParameter {
                    name: "alpha",
                    value: self.alpha,
                    requirement: "0 < alpha/K <= 1",
                });
            }
        }
        if let MatrixMode::Fixed(m) = &self.matrix_mode {
            if m.rows() != self.tests {
                return Err(Error::DimensionMismatch {
                    context: "fixed matrix rows",
                    expected: self.tests,
                    got: m.rows(),
                });
            }
            if m.cols() != self.population {
                return Err(Error::DimensionMismatch {
                    context: "fixed matrix cols",
                    expected: self.population,
                    got: m.cols(),
                });
            }
        }
        if let SupportMode::Fixed(s) = &self.support_mode {
            if s.indices().iter().any(|&i| i >= self.population) {
                return Err(Error::InvalidSupport(
                    "fixed support exceeds the population".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Aggregated Monte Carlo results.
#[derive(Clone, Debug)]
pub struct TrialReport {
    pub trials: usize,
    pub successes: usize,
    pub success_rate: f64,
    /// 95% Wilson score interval for the success rate.
    pub ci_low: f64,
    pub ci_high: f64,
    /// Total defective items the decoder missed, over all failed trials.
    pub missed_items: usize,
    /// Total non-defective items the decoder reported, over all failed trials.
    pub extra_items: usize,
    pub wall: Duration,
}

#[derive(Default)]
struct Tally {
    successes: usize,
    missed: usize,
    extra: usize,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        self.successes += other.successes;
        self.missed += other.missed;
        self.extra += other.extra;
        self
    }
}

/// Uniform random K-subset of the population (partial Fisher-Yates over a
/// rank mapping is overkill at these sparsities; rejection is cheap).
fn random_support(population: usize, sparsity: usize, seed: u64) -> SupportSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = Vec::with_capacity(sparsity);
    while picked.len() < sparsity {
        let item = rng.random_range(0..population);
        if !picked.contains(&item) {
            picked.push(item);
        }
    }
    SupportSet::new(picked, sparsity).expect("rejection sampling yields distinct items")
}

fn run_one(cfg: &TrialConfig, trial: u64) -> Result<Tally> {
    let fresh_matrix;
    let matrix = match &cfg.matrix_mode {
        MatrixMode::Fixed(m) => m,
        MatrixMode::FreshPerTrial => {
            fresh_matrix = sample_contact_matrix(&ConstructionParams {
                rows: cfg.tests,
                cols: cfg.population,
                density: cfg.alpha / cfg.sparsity as f64,
                seed: seed::derive(cfg.master_seed, MATRIX_STREAM, trial),
            })?;
            &fresh_matrix
        }
    };
    let fresh_support;
    let support = match &cfg.support_mode {
        SupportMode::Fixed(s) => s,
        SupportMode::RandomPerTrial => {
            fresh_support = random_support(
                cfg.population,
                cfg.sparsity,
                seed::derive(cfg.master_seed, SUPPORT_STREAM, trial),
            );
            &fresh_support
        }
    };

    let channel = ChannelParams::new(
        cfg.activation,
        seed::derive(cfg.master_seed, CHANNEL_STREAM, trial),
    )?;
    let outcome = end_to_end_measure(matrix, support, &channel)?;
    let decoded = distance_decode(matrix, &outcome, cfg.decoder_threshold)?;

    if decoded.matches(support.indices()) {
        Ok(Tally {
            successes: 1,
            ..Tally::default()
        })
    } else {
        let missed = support
            .indices()
            .iter()
            .filter(|i| !decoded.detected.contains(i))
            .count();
        let extra = decoded
            .detected
            .iter()
            .filter(|i| !support.contains(**i))
            .count();
        Ok(Tally {
            successes: 0,
            missed,
            extra,
        })
    }
}

/// Run the configured trials. Success is exact support recovery; an
/// oversized detection therefore counts as failure.
pub fn run_trials(cfg: &TrialConfig) -> Result<TrialReport> {
    cfg.validate()?;
    let start = Instant::now();
    let tally = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|trial| run_one(cfg, trial))
        .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))?;

    let rate = tally.successes as f64 / cfg.trials as f64;
    let (ci_low, ci_high) = wilson_interval(tally.successes, cfg.trials);
    Ok(TrialReport {
        trials: cfg.trials,
        successes: tally.successes,
        success_rate: rate,
        ci_low,
        ci_high,
        missed_items: tally.missed,
        extra_items: tally.extra,
        wall: start.elapsed(),
    })
}

/// 95% Wilson score interval for a binomial proportion.
fn wilson_interval(successes: usize, trials: usize) -> (f64, f64) {
    let n = trials as f64;
    let p = successes as f64 / n;
    let z = 1.959_963_984_540_054_f64;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// One row of the tests-versus-failure sweep.
#[derive(Clone, Debug)]
pub struct FailureSweepRow {
    pub target: f64,
    pub result: Option<DesignResult>,
}

/// Evaluate the design solver across failure targets, setting both budgets
/// to the same target value.
pub fn sweep_tests_vs_failure(base: &DesignSpec, targets: &[f64]) -> Result<Vec<FailureSweepRow>> {
    let mut rows = Vec::with_capacity(targets.len());
    for &target in targets {
        let mut spec = base.clone();
        spec.pf1_target = target;
        spec.pf2_target = target;
        let report = crate::design::design(&spec)?;
        rows.push(FailureSweepRow {
            target,
            result: report.chosen,
        });
    }
    Ok(rows)
}

/// One cell of the (alpha, activation) design surface.
#[derive(Clone, Debug)]
pub struct SurfaceCell {
    pub alpha: f64,
    pub activation: f64,
    pub result: Option<DesignResult>,
}

/// Evaluate every (alpha, activation) cell of the design surface.
pub fn sweep_design_surface(base: &DesignSpec, activations: &[f64]) -> Result<Vec<SurfaceCell>> {
    base.validate()?;
    let alphas = base.sweep.alphas();
    let mut cells = Vec::with_capacity(alphas.len() * activations.len());
    for &p in activations {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::InvalidParameter {
                name: "activation",
                value: p,
                requirement: "0 < p <= 1",
            });
        }
        let mut spec = base.clone();
        spec.activation = p;
        for &alpha in &alphas {
            let outcome = solve_alpha(&spec, alpha);
            cells.push(SurfaceCell {
                alpha,
                activation: p,
                result: outcome.result.ok(),
            });
        }
    }
    Ok(cells)
}

/// For each activation value, the cell minimizing the test count (ties
/// toward smaller alpha), i.e. the valley floor of the surface.
pub fn minima_locus(cells: &[SurfaceCell]) -> Vec<&SurfaceCell> {
    let mut per_p: Vec<&SurfaceCell> = Vec::new();
    for cell in cells {
        if cell.result.is_none() {
            continue;
        }
        match per_p
            .iter_mut()
            .find(|best| best.activation == cell.activation)
        {
            None => per_p.push(cell),
            Some(best) => {
                let best_tests = best.result.as_ref().unwrap().tests;
                let tests = cell.result.as_ref().unwrap().tests;
                if tests < best_tests {
                    *best = cell;
                }
            }
        }
    }
    per_p
}

fn csv_design_fields(result: &Option<DesignResult>) -> String {
    match result {
        Some(r) => format!(
            "{},{:.6},{:.4},{:.6e},{:.6e},true",
            r.tests, r.delta, r.error_param, r.predicted_pf1, r.predicted_pf2
        ),
        None => ",,,,,false".to_string(),
    }
}

/// CSV schema: `target,m,alpha,delta,e,pf1,pf2,feasible`.
pub fn write_failure_sweep_csv<W: Write>(out: &mut W, rows: &[FailureSweepRow]) -> Result<()> {
    writeln!(out, "target,m,alpha,delta,e,pf1,pf2,feasible")?;
    for row in rows {
        match &row.result {
            Some(r) => writeln!(
                out,
                "{:.6e},{},{:.4},{:.6},{:.4},{:.6e},{:.6e},true",
                row.target, r.tests, r.alpha, r.delta, r.error_param, r.predicted_pf1,
                r.predicted_pf2
            )?,
            None => writeln!(out, "{:.6e},,,,,,,false", row.target)?,
        }
    }
    Ok(())
}

/// CSV schema: `alpha,p,m,delta,e,pf1,pf2,feasible`.
pub fn write_surface_csv<W: Write>(out: &mut W, cells: &[SurfaceCell]) -> Result<()> {
    writeln!(out, "alpha,p,m,delta,e,pf1,pf2,feasible")?;
    for cell in cells {
        writeln!(
            out,
            "{:.4},{:.4},{}",
            cell.alpha,
            cell.activation,
            csv_design_fields(&cell.result)
        )?;
    }
    Ok(())
}

/// CSV schema: one row per run,
/// `n,k,p,m,alpha,e,trials,seed,successes,success_rate,ci_low,ci_high,missed_items,extra_items,wall_secs`.
pub fn write_bench_csv<W: Write>(
    out: &mut W,
    cfg: &TrialConfig,
    report: &TrialReport,
) -> Result<()> {
    writeln!(
        out,
        "n,k,p,m,alpha,e,trials,seed,successes,success_rate,ci_low,ci_high,missed_items,extra_items,wall_secs"
    )?;
    writeln!(
        out,
        "{},{},{:.4},{},{:.4},{},{},{},{},{:.6},{:.6},{:.6},{},{},{:.3}",
        cfg.population,
        cfg.sparsity,
        cfg.activation,
        cfg.tests,
        cfg.alpha,
        cfg.decoder_threshold,
        report.trials,
        cfg.master_seed,
        report.successes,
        report.success_rate,
        report.ci_low,
        report.ci_high,
        report.missed_items,
        report.extra_items,
        report.wall.as_secs_f64()
    )?;
    Ok(())
}
