//! Command-line front end: matrix generation, disjunctness checking,
//! channel simulation, decoding, system design and Monte Carlo benchmarks.
//!
//! File formats and CSV schemas are documented in FORMATS.md. Item and row
//! indices are one-based in human-readable output, zero-based in files.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use grouptest::design::{self, ChernoffForm, DesignSpec, SweepGrid};
use grouptest::experiments::{
    self, MatrixMode, SupportMode, TrialConfig, TrialReport,
};
use grouptest::{
    boolean_measure, column_deficits, distance_decode, is_disjunct_with_guard, read_matrix,
    read_support, sample_contact_matrix, write_matrix, z_channel_sample, ChannelParams,
    ConstructionParams, DisjunctGuard, TestOutcome,
};

#[derive(Parser)]
#[command(
    name = "grouptest",
    about = "Design, simulate and decode non-adaptive group tests with unreliable activation",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum StrategyArg {
    PerInstance,
    Universal,
}

impl From<StrategyArg> for design::Strategy {
    fn from(value: StrategyArg) -> Self {
        match value {
            StrategyArg::PerInstance => design::Strategy::PerInstance,
            StrategyArg::Universal => design::Strategy::Universal,
        }
    }
}

#[derive(Args)]
struct GridArgs {
    /// Smallest alpha in the sweep
    #[arg(long, default_value_t = 0.01)]
    alpha_min: f64,
    /// Largest alpha in the sweep
    #[arg(long, default_value_t = 2.0)]
    alpha_max: f64,
    /// Alpha grid step
    #[arg(long, default_value_t = 0.01)]
    alpha_step: f64,
    /// Delta scan step
    #[arg(long, default_value_t = 1e-3)]
    delta_step: f64,
}

impl GridArgs {
    fn grid(&self) -> SweepGrid {
        SweepGrid {
            alpha_min: self.alpha_min,
            alpha_max: self.alpha_max,
            alpha_step: self.alpha_step,
            delta_step: self.delta_step,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random pooling matrix with i.i.d. Bernoulli entries
    GenMatrix {
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
        /// Per-entry inclusion probability in (0, 1]
        #[arg(long)]
        density: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },

    /// Exhaustively check the disjunctness property of a small matrix
    VerifyDisjunct {
        #[arg(long)]
        matrix: PathBuf,
        /// Subset size bound K
        #[arg(long)]
        k: usize,
        /// Error threshold e
        #[arg(long)]
        e: usize,
        /// Ignore the instance-size guard
        #[arg(long)]
        force: bool,
    },

    /// Push a support set through a fresh channel realization
    Simulate {
        #[arg(long)]
        matrix: PathBuf,
        /// Support-set file, one zero-based index per line
        #[arg(long)]
        support: PathBuf,
        /// Activation probability in (0, 1]
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write the realized sampling matrix here
        #[arg(long)]
        emit_sampling: Option<PathBuf>,
    },

    /// Run the distance decoder on an outcome
    Decode {
        #[arg(long)]
        matrix: PathBuf,
        /// 0/1 outcome string, or a path to a file holding one
        #[arg(long)]
        outcome: String,
        /// Decoder threshold e
        #[arg(long)]
        e: usize,
        /// Write per-column deficits to this CSV
        #[arg(long)]
        diagnostics: Option<PathBuf>,
        /// Sparsity bound; exit code 2 if more items are detected
        #[arg(long)]
        k: Option<usize>,
    },

    /// Compute the number of tests for target failure probabilities
    Design {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        /// Activation probability in (0, 1]
        #[arg(long)]
        p: f64,
        /// Flip-overflow failure budget
        #[arg(long)]
        pf1: f64,
        /// Disjunctness failure budget
        #[arg(long)]
        pf2: f64,
        #[arg(long, value_enum, default_value_t = StrategyArg::PerInstance)]
        strategy: StrategyArg,
        #[command(flatten)]
        grid: GridArgs,
        /// Use the weaker delta^2/(2+delta) Chernoff tail
        #[arg(long)]
        simplified_chernoff: bool,
        /// Emit the (alpha, p) design surface over a default p grid
        #[arg(long)]
        emit_surface: Option<PathBuf>,
    },

    /// Monte Carlo estimate of the exact-recovery rate
    #[command(after_help = "CSV columns: n,k,p,m,alpha,e,trials,seed,successes,success_rate,\
                            ci_low,ci_high,missed_items,extra_items,wall_secs (see FORMATS.md)")]
    Bench {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        /// Activation probability in (0, 1]
        #[arg(long)]
        p: f64,
        /// Number of tests (matrix rows)
        #[arg(long)]
        m: usize,
        /// Density parameter; per-trial matrices use q = alpha/K
        #[arg(long)]
        alpha: f64,
        /// Decoder threshold
        #[arg(long)]
        e: usize,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Reuse this matrix for every trial instead of redrawing
        #[arg(long)]
        fixed_matrix: Option<PathBuf>,
        /// Fix the defective set instead of redrawing it per trial
        #[arg(long)]
        support: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Designed test count across a grid of failure targets
    #[command(after_help = "CSV columns: target,m,alpha,delta,e,pf1,pf2,feasible (see FORMATS.md)")]
    SweepFailure {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        /// Activation probability in (0, 1]
        #[arg(long)]
        p: f64,
        #[arg(long, value_enum, default_value_t = StrategyArg::PerInstance)]
        strategy: StrategyArg,
        /// Smallest failure target (log-spaced grid)
        #[arg(long, default_value_t = 1e-3)]
        target_min: f64,
        /// Largest failure target
        #[arg(long, default_value_t = 0.5)]
        target_max: f64,
        /// Number of grid points
        #[arg(long, default_value_t = 20)]
        points: usize,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        out: PathBuf,
    },

    /// Designed test count over the full (alpha, p) surface
    #[command(after_help = "CSV columns: alpha,p,m,delta,e,pf1,pf2,feasible (see FORMATS.md)")]
    Surface {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        pf1: f64,
        #[arg(long)]
        pf2: f64,
        #[arg(long, value_enum, default_value_t = StrategyArg::PerInstance)]
        strategy: StrategyArg,
        #[arg(long, default_value_t = 0.05)]
        p_min: f64,
        #[arg(long, default_value_t = 1.0)]
        p_max: f64,
        #[arg(long, default_value_t = 0.05)]
        p_step: f64,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::GenMatrix {
            rows,
            cols,
            density,
            seed,
            out,
        } => {
            let matrix = sample_contact_matrix(&ConstructionParams {
                rows,
                cols,
                density,
                seed,
            })?;
            write_matrix(&matrix, &out)
                .with_context(|| format!("writing {}", out.display()))?;
            println!(
                "wrote {}x{} matrix with {} ones to {}",
                rows,
                cols,
                matrix.total_ones(),
                out.display()
            );
            Ok(ExitCode::SUCCESS)
        }

        Command::VerifyDisjunct {
            matrix,
            k,
            e,
            force,
        } => {
            let m = read_matrix(&matrix)
                .with_context(|| format!("reading {}", matrix.display()))?;
            let guard = if force {
                DisjunctGuard::unlimited()
            } else {
                DisjunctGuard::default()
            };
            let report = is_disjunct_with_guard(&m, k, e, guard)?;
            match report.witness {
                None => {
                    println!("disjunct: every column keeps more than {e} private rows");
                    Ok(ExitCode::SUCCESS)
                }
                Some(witness) => {
                    let subset = if witness.subset.is_empty() {
                        "(none)".to_string()
                    } else {
                        witness
                            .subset
                            .iter()
                            .map(|j| (j + 1).to_string())
                            .collect::<Vec<_>>()
                            .join(",")
                    };
                    println!("violated: column {}; subset {}", witness.column + 1, subset);
                    Ok(ExitCode::from(1))
                }
            }
        }

        Command::Simulate {
            matrix,
            support,
            p,
            seed,
            emit_sampling,
        } => {
            let m = read_matrix(&matrix)
                .with_context(|| format!("reading {}", matrix.display()))?;
            let x = read_support(&support, m.cols())
                .with_context(|| format!("reading {}", support.display()))?;
            let params = ChannelParams::new(p, seed)?;
            let outcome = match emit_sampling {
                None => grouptest::end_to_end_measure(&m, &x, &params)?,
                Some(path) => {
                    // Materialize so the emitted matrix is exactly the one
                    // that produced the printed outcome.
                    let sampled = z_channel_sample(&m, &params)?;
                    write_matrix(sampled.matrix(), &path)
                        .with_context(|| format!("writing {}", path.display()))?;
                    boolean_measure(&sampled, &x)?
                }
            };
            println!("{outcome}");
            Ok(ExitCode::SUCCESS)
        }

        Command::Decode {
            matrix,
            outcome,
            e,
            diagnostics,
            k,
        } => {
            let m = read_matrix(&matrix)
                .with_context(|| format!("reading {}", matrix.display()))?;
            let y = outcome_from_arg(&outcome)?;
            let result = distance_decode(&m, &y, e)?;
            if let Some(path) = diagnostics {
                let deficits = column_deficits(&m, &y)?;
                let mut csv = String::from("column,deficit,detected\n");
                for (i, d) in deficits.iter().enumerate() {
                    csv.push_str(&format!(
                        "{},{},{}\n",
                        i + 1,
                        d,
                        result.detected.contains(&i)
                    ));
                }
                std::fs::write(&path, csv)
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            for item in &result.detected {
                println!("{}", item + 1);
            }
            match k {
                Some(bound) if result.oversize(bound) => {
                    eprintln!(
                        "{} items detected, more than the sparsity bound {bound}",
                        result.detected.len()
                    );
                    Ok(ExitCode::from(2))
                }
                _ => Ok(ExitCode::SUCCESS),
            }
        }

        Command::Design {
            n,
            k,
            p,
            pf1,
            pf2,
            strategy,
            grid,
            simplified_chernoff,
            emit_surface,
        } => {
            let mut spec = DesignSpec::new(n, k, p, pf1, pf2, strategy.into());
            spec.sweep = grid.grid();
            if simplified_chernoff {
                spec.chernoff = ChernoffForm::Simplified;
            }
            let report = design::design(&spec)?;
            print_design(&report);

            if let Some(path) = emit_surface {
                let activations: Vec<f64> = (1..=20).map(|i| i as f64 * 0.05).collect();
                let cells = experiments::sweep_design_surface(&spec, &activations)?;
                let mut file = std::fs::File::create(&path)
                    .with_context(|| format!("writing {}", path.display()))?;
                experiments::write_surface_csv(&mut file, &cells)?;
                println!("surface CSV written to {}", path.display());
            }
            Ok(if report.feasible {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }

        Command::Bench {
            n,
            k,
            p,
            m,
            alpha,
            e,
            trials,
            seed,
            fixed_matrix,
            support,
            out,
        } => {
            let matrix_mode = match fixed_matrix {
                None => MatrixMode::FreshPerTrial,
                Some(path) => MatrixMode::Fixed(
                    read_matrix(&path).with_context(|| format!("reading {}", path.display()))?,
                ),
            };
            let support_mode = match support {
                None => SupportMode::RandomPerTrial,
                Some(path) => SupportMode::Fixed(
                    read_support(&path, k)
                        .with_context(|| format!("reading {}", path.display()))?,
                ),
            };
            let cfg = TrialConfig {
                population: n,
                sparsity: k,
                activation: p,
                tests: m,
                alpha,
                decoder_threshold: e,
                trials,
                master_seed: seed,
                support_mode,
                matrix_mode,
            };
            let report = experiments::run_trials(&cfg)?;
            print_bench(&report);
            if let Some(path) = out {
                let mut file = std::fs::File::create(&path)
                    .with_context(|| format!("writing {}", path.display()))?;
                experiments::write_bench_csv(&mut file, &cfg, &report)?;
                println!("CSV written to {}", path.display());
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::SweepFailure {
            n,
            k,
            p,
            strategy,
            target_min,
            target_max,
            points,
            grid,
            out,
        } => {
            if !(target_min > 0.0 && target_min <= target_max && target_max < 1.0) {
                bail!("targets must satisfy 0 < target-min <= target-max < 1");
            }
            if points < 2 {
                bail!("need at least 2 grid points");
            }
            let ratio = (target_max / target_min).ln();
            let targets: Vec<f64> = (0..points)
                .map(|i| target_min * (ratio * i as f64 / (points - 1) as f64).exp())
                .collect();
            let mut spec = DesignSpec::new(n, k, p, 0.5, 0.5, strategy.into());
            spec.sweep = grid.grid();
            let rows = experiments::sweep_tests_vs_failure(&spec, &targets)?;
            let mut file = std::fs::File::create(&out)
                .with_context(|| format!("writing {}", out.display()))?;
            experiments::write_failure_sweep_csv(&mut file, &rows)?;
            let feasible = rows.iter().filter(|r| r.result.is_some()).count();
            println!(
                "{} targets evaluated ({} feasible), CSV written to {}",
                rows.len(),
                feasible,
                out.display()
            );
            Ok(ExitCode::SUCCESS)
        }

        Command::Surface {
            n,
            k,
            pf1,
            pf2,
            strategy,
            p_min,
            p_max,
            p_step,
            grid,
            out,
        } => {
            if !(p_min > 0.0 && p_min <= p_max && p_max <= 1.0 && p_step > 0.0) {
                bail!("p grid must satisfy 0 < p-min <= p-max <= 1 with a positive step");
            }
            let mut activations = Vec::new();
            let mut i = 0u64;
            loop {
                let p = p_min + i as f64 * p_step;
                if p > p_max + 1e-12 {
                    break;
                }
                activations.push(p.min(1.0));
                i += 1;
            }
            // Any p works for the base spec; each cell overrides it.
            let mut spec = DesignSpec::new(n, k, p_max, pf1, pf2, strategy.into());
            spec.sweep = grid.grid();
            let cells = experiments::sweep_design_surface(&spec, &activations)?;
            let mut file = std::fs::File::create(&out)
                .with_context(|| format!("writing {}", out.display()))?;
            experiments::write_surface_csv(&mut file, &cells)?;

            println!("minimum tests per activation probability:");
            for cell in experiments::minima_locus(&cells) {
                let r = cell.result.as_ref().unwrap();
                println!(
                    "  p={:.2}: M={} at alpha={:.2} (e={:.1})",
                    cell.activation, r.tests, r.alpha, r.error_param
                );
            }
            println!("surface CSV written to {}", out.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}

/// `--outcome` accepts a literal 0/1 string or a path to a file holding one.
fn outcome_from_arg(arg: &str) -> Result<TestOutcome> {
    if !arg.is_empty() && arg.chars().all(|c| c == '0' || c == '1') {
        return Ok(TestOutcome::parse(arg)?);
    }
    let text = std::fs::read_to_string(Path::new(arg))
        .with_context(|| format!("reading outcome file {arg}"))?;
    Ok(TestOutcome::parse(text.lines().next().unwrap_or("").trim())?)
}

fn print_design(report: &design::DesignReport) {
    match &report.chosen {
        Some(point) => {
            println!("feasible design:");
            println!("  tests (M):           {}", point.tests);
            println!("  alpha:                {:.4}", point.alpha);
            println!("  density (q = a/K):    {:.6}", point.q);
            println!("  slack (delta):        {:.4}", point.delta);
            println!(
                "  decoder budget (e):   {:.2} (threshold {})",
                point.error_param, point.decoder_threshold
            );
            println!("  predicted pf1:        {:.3e}", point.predicted_pf1);
            println!("  predicted pf2:        {:.3e}", point.predicted_pf2);
        }
        None => {
            let (no_room, unreached) = report.alpha_scan.iter().fold((0, 0), |acc, o| {
                match o.result {
                    Err(design::AlphaFailure::NoSlackRoom) => (acc.0 + 1, acc.1),
                    Err(design::AlphaFailure::OverflowTargetUnreached) => (acc.0, acc.1 + 1),
                    _ => acc,
                }
            });
            println!(
                "infeasible: no (alpha, delta) met both budgets \
                 ({no_room} alphas without slack room, {unreached} with the \
                 overflow budget unreached)"
            );
        }
    }
}

fn print_bench(report: &TrialReport) {
    println!(
        "{} / {} exact recoveries ({:.1}%), 95% CI [{:.3}, {:.3}]",
        report.successes,
        report.trials,
        100.0 * report.success_rate,
        report.ci_low,
        report.ci_high
    );
    println!(
        "failed trials missed {} items and reported {} extras; wall time {:.2}s",
        report.missed_items,
        report.extra_items,
        report.wall.as_secs_f64()
    );
}
