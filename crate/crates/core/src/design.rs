//! System-design solver: given the population size, sparsity bound,
//! activation probability and two failure budgets, find the cheapest test
//! count together with the matrix density and decoder threshold.
//!
//! Two failure events must both stay below their budgets:
//!
//! * *flip overflow* (`pf1`): some defective item's column loses more than
//!   `e` entries to the channel, where `e = (1+delta)(1-p) q M` is the
//!   decoder threshold with Chernoff slack `delta`;
//! * *disjunctness failure* (`pf2`): some non-defective column survives the
//!   deficit test. Its probability decays as `exp(-M * eta)` per column with
//!
//!   ```text
//!   eta = q * ((1-q)^K - (1-p)(1+delta))^2 / (2 (1-q)^K)
//!   ```
//!
//! The exponent is positive only while `(1+delta)(1-p) < (1-q)^K`, i.e.
//! while the expected perturbed column weight stays below the expected
//! number of private rows; the largest usable slack is
//! `delta_max = (1-q)^K / (1-p) - 1`.
//!
//! For a fixed density parameter `alpha` (with `q = alpha/K`), the solver
//! scans `delta` upward from zero in small steps: each step determines the
//! test count `M` that meets the `pf2` budget, and the first `delta` whose
//! flip-overflow bound meets the `pf1` budget wins. The outer loop sweeps
//! `alpha` over a grid and keeps the cheapest feasible design. All
//! logarithms are natural.

use crate::error::{Error, Result};

/// Whether the design must hold for one fixed support or all of them.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// One a-priori fixed defective set; union bound over columns only.
    PerInstance,
    /// All defective sets at once; union bound over columns and supports.
    Universal,
}

impl Strategy {
    /// How many columns the flip-overflow event ranges over.
    fn overflow_columns(self, population: usize, sparsity: usize) -> usize {
        match self {
            Strategy::PerInstance => sparsity,
            Strategy::Universal => population,
        }
    }
}

/// Which Chernoff tail expression bounds the per-column flip overflow.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ChernoffForm {
    /// `(1+delta) ln(1+delta) - delta`, the exact exponent.
    #[default]
    Exact,
    /// `delta^2 / (2+delta)`, the weaker closed form used in asymptotic
    /// analysis; exposed for reproducing those calculations.
    Simplified,
}

/// Grid for the (alpha, delta) sweep.
#[derive(Clone, Copy, Debug)]
pub struct SweepGrid {
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub alpha_step: f64,
    pub delta_step: f64,
}

impl Default for SweepGrid {
    fn default() -> Self {
        Self {
            alpha_min: 0.01,
            alpha_max: 2.0,
            alpha_step: 0.01,
            delta_step: 1e-3,
        }
    }
}

impl SweepGrid {
    fn validate(&self) -> Result<()> {
        let min_ok = self.alpha_min > 0.0;
        if !min_ok {
            return Err(Error::InvalidParameter {
                name: "alpha_min",
                value: self.alpha_min,
                requirement: "alpha_min > 0",
            });
        }
        let max_ok = self.alpha_max >= self.alpha_min;
        if !max_ok {
            return Err(Error::InvalidParameter {
                name: "alpha_max",
                value: self.alpha_max,
                requirement: "alpha_max >= alpha_min",
            });
        }
        let step_ok = self.alpha_step > 0.0;
        if !step_ok {
            return Err(Error::InvalidParameter {
                name: "alpha_step",
                value: self.alpha_step,
                requirement: "alpha_step > 0",
            });
        }
        let delta_ok = self.delta_step > 0.0;
        if !delta_ok {
            return Err(Error::InvalidParameter {
                name: "delta_step",
                value: self.delta_step,
                requirement: "delta_step > 0",
            });
        }
        Ok(())
    }

    /// The alpha grid points, inclusive of both ends (up to rounding).
    pub fn alphas(&self) -> Vec<f64> {
        let mut out = Vec::new();
        let mut i = 0u64;
        loop {
            let alpha = self.alpha_min + i as f64 * self.alpha_step;
            if alpha > self.alpha_max + 1e-12 {
                break;
            }
            out.push(alpha);
            i += 1;
        }
        out
    }
}

/// Inputs to the design procedure.
#[derive(Clone, Debug)]
pub struct DesignSpec {
    pub population: usize,
    pub sparsity: usize,
    pub activation: f64,
    /// Budget for the flip-overflow failure probability.
    pub pf1_target: f64,
    /// Budget for the disjunctness failure probability.
    pub pf2_target: f64,
    pub strategy: Strategy,
    pub sweep: SweepGrid,
    pub chernoff: ChernoffForm,
}

impl DesignSpec {
    pub fn new(
        population: usize,
        sparsity: usize,
        activation: f64,
        pf1_target: f64,
        pf2_target: f64,
        strategy: Strategy,
    ) -> Self {
        Self {
            population,
            sparsity,
            activation,
            pf1_target,
            pf2_target,
            strategy,
            sweep: SweepGrid::default(),
            chernoff: ChernoffForm::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
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
        for (name, value) in [("pf1", self.pf1_target), ("pf2", self.pf2_target)] {
            if !(value > 0.0 && value < 1.0) {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    requirement: "0 < target < 1",
                });
            }
        }
        self.sweep.validate()
    }
}

/// A feasible operating point.
#[derive(Clone, Debug, PartialEq)]
pub struct DesignResult {
    /// Number of tests, ceiled to an integer.
    pub tests: u64,
    /// The pre-ceiling value `M = ln(.)/eta` the scan produced.
    pub tests_real: f64,
    pub alpha: f64,
    /// Matrix density `alpha / K`.
    pub q: f64,
    /// Chosen Chernoff slack.
    pub delta: f64,
    /// Decoder error budget `e = (1+delta)(1-p) q M`, recomputed from the
    /// ceiled test count.
    pub error_param: f64,
    /// `floor(error_param)`: deficits are integers, so flooring is the
    /// conservative reading of the decoder's `<= e` rule.
    pub decoder_threshold: u64,
    /// Flip-overflow bound re-evaluated at the ceiled test count.
    pub predicted_pf1: f64,
    /// Disjunctness-failure bound re-evaluated at the ceiled test count.
    pub predicted_pf2: f64,
}

/// Why a given alpha produced no operating point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlphaFailure {
    /// `q = alpha/K` exceeds one.
    DensityOutOfRange,
    /// `delta_max <= 0`: even zero slack leaves the erasures overwhelming
    /// the private rows.
    NoSlackRoom,
    /// The scan exhausted `delta < delta_max` without meeting the pf1 budget.
    OverflowTargetUnreached,
}

/// Outcome of the delta scan for one alpha grid point.
#[derive(Clone, Debug)]
pub struct AlphaOutcome {
    pub alpha: f64,
    pub result: std::result::Result<DesignResult, AlphaFailure>,
}

/// Full sweep output: the winning point (if any) plus one entry per alpha.
#[derive(Clone, Debug)]
pub struct DesignReport {
    pub feasible: bool,
    pub chosen: Option<DesignResult>,
    pub alpha_scan: Vec<AlphaOutcome>,
}

/// Exponent rate of the per-column disjunctness-failure bound
/// `exp(-M * eta)`. Fails if the slack is infeasible for these parameters,
/// i.e. unless `(1+delta)(1-p) < (1-q)^K`.
pub fn disjunctness_exponent(q: f64, sparsity: usize, p: f64, delta: f64) -> Result<f64> {
    let private_rate = (1.0 - q).powi(sparsity as i32);
    let perturbed = (1.0 - p) * (1.0 + delta);
    let margin = private_rate - perturbed;
    if margin <= 0.0 {
        return Err(Error::InfeasibleDesign(format!(
            "slack {delta} is not below delta_max = {}",
            max_slack(q, sparsity, p)
        )));
    }
    Ok(q * margin * margin / (2.0 * private_rate))
}

/// Largest usable Chernoff slack, `(1-q)^K / (1-p) - 1`; infinite in the
/// noiseless case. For every `delta < delta_max` the expected decoder
/// budget stays below the expected private-row count (`e < mu`).
pub fn max_slack(q: f64, sparsity: usize, p: f64) -> f64 {
    if p >= 1.0 {
        return f64::INFINITY;
    }
    (1.0 - q).powi(sparsity as i32) / (1.0 - p) - 1.0
}

/// `ln C(n, k)` by summing logarithms; safe for populations far beyond
/// integer range.
pub fn ln_binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let k = k.min(n - k);
    (0..k)
        .map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln())
        .sum()
}

/// Real-valued number of tests meeting the disjunctness budget for a given
/// exponent rate: `ln(N/pf2) / eta` per-instance, with an extra
/// `ln C(N,K)` term for the universal union bound.
pub fn tests_required_real(
    exponent: f64,
    population: usize,
    sparsity: usize,
    pf2_target: f64,
    strategy: Strategy,
) -> Result<f64> {
    let rate_ok = exponent > 0.0;
    if !rate_ok {
        return Err(Error::InfeasibleDesign(format!(
            "nonpositive exponent rate {exponent}"
        )));
    }
    let n = population as f64;
    let ln_term = match strategy {
        Strategy::PerInstance => (n / pf2_target).ln(),
        Strategy::Universal => {
            n.ln() + ln_binomial(population, sparsity) + (1.0 / pf2_target).ln()
        }
    };
    Ok(ln_term / exponent)
}

/// Integer number of tests (ceiling of [`tests_required_real`]).
pub fn tests_required(
    exponent: f64,
    population: usize,
    sparsity: usize,
    pf2_target: f64,
    strategy: Strategy,
) -> Result<u64> {
    Ok(tests_required_real(exponent, population, sparsity, pf2_target, strategy)?.ceil() as u64)
}

/// Probability bound for the flip-overflow event over `columns` columns:
/// `1 - [1 - exp(-(1-p) q M * tail(delta))]^columns`. Exact by column
/// independence (no union bound). In the noiseless case no flip can occur
/// and the bound is zero.
pub fn flip_overflow_bound(
    q: f64,
    p: f64,
    delta: f64,
    tests: f64,
    columns: usize,
    form: ChernoffForm,
) -> f64 {
    if 1.0 - p <= 0.0 {
        return 0.0;
    }
    let tail = match form {
        ChernoffForm::Exact => (1.0 + delta) * delta.ln_1p() - delta,
        ChernoffForm::Simplified => delta * delta / (2.0 + delta),
    };
    let exponent = (1.0 - p) * q * tests * tail;
    let per_column = (-exponent).exp();
    if per_column >= 1.0 {
        return 1.0;
    }
    // 1 - (1 - z)^c, evaluated stably for tiny and near-one z.
    -f64::exp_m1(columns as f64 * f64::ln_1p(-per_column))
}

/// The pair `(alpha, delta) = (p/8, p/2)` used by the asymptotic analysis;
/// a documented preset, not an optimized operating point.
pub fn asymptotic_preset(p: f64) -> (f64, f64) {
    (p / 8.0, p / 2.0)
}

/// Evaluate one fixed `(alpha, delta)` cell: the test count meeting the
/// pf2 budget and both predicted bounds at that count.
pub fn evaluate_point(spec: &DesignSpec, alpha: f64, delta: f64) -> Result<DesignResult> {
    spec.validate()?;
    let q = alpha / spec.sparsity as f64;
    if !(q > 0.0 && q <= 1.0) {
        return Err(Error::InvalidParameter {
            name: "alpha",
            value: alpha,
            requirement: "0 < alpha/K <= 1",
        });
    }
    let exponent = disjunctness_exponent(q, spec.sparsity, spec.activation, delta)?;
    let tests_real = tests_required_real(
        exponent,
        spec.population,
        spec.sparsity,
        spec.pf2_target,
        spec.strategy,
    )?;
    Ok(finish_point(spec, alpha, q, delta, exponent, tests_real))
}

/// Ceil the test count and re-evaluate the outputs at the integer count.
fn finish_point(
    spec: &DesignSpec,
    alpha: f64,
    q: f64,
    delta: f64,
    exponent: f64,
    tests_real: f64,
) -> DesignResult {
    let tests = tests_real.ceil() as u64;
    let m = tests as f64;
    let error_param = (1.0 + delta) * (1.0 - spec.activation) * q * m;
    let columns = spec.strategy.overflow_columns(spec.population, spec.sparsity);
    let predicted_pf1 =
        flip_overflow_bound(q, spec.activation, delta, m, columns, spec.chernoff);
    let ln_pf2 = match spec.strategy {
        Strategy::PerInstance => (spec.population as f64).ln() - m * exponent,
        Strategy::Universal => {
            (spec.population as f64).ln() + ln_binomial(spec.population, spec.sparsity)
                - m * exponent
        }
    };
    DesignResult {
        tests,
        tests_real,
        alpha,
        q,
        delta,
        error_param,
        decoder_threshold: error_param.floor() as u64,
        predicted_pf1,
        predicted_pf2: ln_pf2.exp().min(1.0),
    }
}

/// Scan `delta` upward from zero for one alpha: each step sizes the test
/// count from the pf2 budget, and the first step whose flip-overflow bound
/// meets the pf1 budget wins.
pub fn solve_alpha(spec: &DesignSpec, alpha: f64) -> AlphaOutcome {
    let q = alpha / spec.sparsity as f64;
    if !(q > 0.0 && q <= 1.0) {
        return AlphaOutcome {
            alpha,
            result: Err(AlphaFailure::DensityOutOfRange),
        };
    }
    let delta_max = max_slack(q, spec.sparsity, spec.activation);
    if delta_max <= 0.0 {
        return AlphaOutcome {
            alpha,
            result: Err(AlphaFailure::NoSlackRoom),
        };
    }
    let columns = spec.strategy.overflow_columns(spec.population, spec.sparsity);

    let mut step = 0u64;
    loop {
        let delta = step as f64 * spec.sweep.delta_step;
        if delta >= delta_max {
            return AlphaOutcome {
                alpha,
                result: Err(AlphaFailure::OverflowTargetUnreached),
            };
        }
        step += 1;

        // Safe: delta < delta_max keeps the exponent positive.
        let exponent =
            disjunctness_exponent(q, spec.sparsity, spec.activation, delta).expect("delta in range");
        let tests_real = tests_required_real(
            exponent,
            spec.population,
            spec.sparsity,
            spec.pf2_target,
            spec.strategy,
        )
        .expect("positive exponent");
        let pf1 = flip_overflow_bound(
            q,
            spec.activation,
            delta,
            tests_real,
            columns,
            spec.chernoff,
        );
        if pf1 <= spec.pf1_target {
            return AlphaOutcome {
                alpha,
                result: Ok(finish_point(spec, alpha, q, delta, exponent, tests_real)),
            };
        }
    }
}

/// Sweep the alpha grid and keep the feasible point with the fewest tests;
/// ties break toward smaller alpha.
pub fn design(spec: &DesignSpec) -> Result<DesignReport> {
    spec.validate()?;
    let alphas = spec.sweep.alphas();
    if alphas.is_empty() {
        return Err(Error::InfeasibleDesign("empty alpha grid".into()));
    }

    let mut chosen: Option<DesignResult> = None;
    let mut alpha_scan = Vec::with_capacity(alphas.len());
    for alpha in alphas {
        let outcome = solve_alpha(spec, alpha);
        if let Ok(point) = &outcome.result {
            let better = chosen
                .as_ref()
                .is_none_or(|best| point.tests < best.tests);
            if better {
                chosen = Some(point.clone());
            }
        }
        alpha_scan.push(outcome);
    }
    Ok(DesignReport {
        feasible: chosen.is_some(),
        chosen,
        alpha_scan,
    })
}
