//! `turf` — fit, evaluate, and benchmark piecewise-polynomial density
//! estimates.
//!
//! Exit codes: 0 on success, 1 on input errors (bad flags, unreadable or
//! malformed files, violated preconditions), 2 on numeric failures.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use turf::bench::{self, ExperimentSpec};
use turf::check;
use turf::error::Error;
use turf::estimator::{
    turf as turf_fit, EstimateDoc, EstimatorConfig, PartitionerKind,
};
use turf::fit::{node_spec, optimize_nodes};
use turf::measure::EmpiricalMeasure;
use turf::model::{l1_vs_model, ModelSpec};
use turf::select::cv_turf;

#[derive(Parser)]
#[command(name = "turf", version, about = "Piecewise-polynomial density estimation")]
struct Cli {
    /// Worker threads (TURF_THREADS overrides).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct FitOptions {
    /// Polynomial degree (0..=8).
    #[arg(long, default_value_t = 1)]
    d: usize,
    /// Fixed piece count; omit to select t by cross-validation.
    #[arg(long)]
    t: Option<usize>,
    /// Bias slack in (0, 1).
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    /// Single-piece bias slack in (0, 1).
    #[arg(long, default_value_t = 0.5)]
    gamma: f64,
    /// Histogram-distance constant (1 = practical, 3764 = theory).
    #[arg(long, default_value_t = 1.0)]
    c1: f64,
    /// Cross-validation failure budget.
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    /// Clip negatives and renormalize the output.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    normalize: bool,
    /// Interval partitioner.
    #[arg(long, value_parser = ["merge", "stitch"], default_value = "merge")]
    partitioner: String,
}

impl FitOptions {
    fn config(&self) -> EstimatorConfig {
        EstimatorConfig {
            alpha: self.alpha,
            gamma: self.gamma,
            c1: self.c1,
            delta: self.delta,
            normalize_output: self.normalize,
            partitioner: if self.partitioner == "stitch" {
                PartitionerKind::Stitch
            } else {
                PartitionerKind::GreedyMerge
            },
            ..EstimatorConfig::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Fit an estimate from a samples file (one decimal per line).
    Fit {
        /// Input samples file.
        #[arg(long)]
        samples: PathBuf,
        /// Output estimate JSON path.
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        opts: FitOptions,
    },
    /// Measure the l1 distance between an estimate and an analytic model.
    Eval {
        /// Estimate JSON produced by `fit`.
        #[arg(long)]
        estimate: PathBuf,
        /// Model spec JSON ({"components": [...], "perturb": ...}).
        #[arg(long)]
        model: PathBuf,
        /// Quadrature tolerance.
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
    },
    /// Run an experiment spec: CSV table and SVG chart.
    Experiment {
        /// Experiment spec JSON.
        #[arg(long)]
        spec: PathBuf,
        /// Output directory for default csv/svg names.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the Monte-Carlo verification suites and emit CSV reports.
    Verify {
        /// Output directory for report CSVs; stdout summary either way.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Trials per inequality sweep.
        #[arg(long, default_value_t = 1000)]
        trials: usize,
    },
    /// Print (or recompute) the interpolation-node table.
    Nodes {
        /// Single degree to print; all of 0..=8 otherwise.
        #[arg(long)]
        d: Option<usize>,
        /// Re-derive node positions by direct search (d <= 3).
        #[arg(long)]
        recompute: bool,
        /// Emit the table as JSON.
        #[arg(long)]
        json: bool,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // clap help/version are not errors.
            use clap::error::ErrorKind;
            if matches!(err.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = err.print();
                return ExitCode::SUCCESS;
            }
            let _ = err.print();
            return ExitCode::from(1);
        }
    };

    let threads = std::env::var("TURF_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .or(cli.threads);
    if let Some(t) = threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }

    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            let code = match err {
                Error::InvalidInput(_) | Error::Io(_) => 1,
                Error::Numeric { .. } | Error::Singular(_) => 2,
            };
            ExitCode::from(code)
        }
    }
}

fn dispatch(cmd: Command) -> Result<(), Error> {
    match cmd {
        Command::Fit { samples, out, opts } => {
            let xs = bench::read_samples(&samples)?;
            let e = EmpiricalMeasure::from_values(xs)?;
            let cfg = opts.config();
            let (estimate, t_used) = match opts.t {
                Some(t) => (turf_fit(&e, t, opts.d, cfg.alpha, &cfg)?, t),
                None => {
                    let cv = cv_turf(&e, opts.d, cfg.alpha, 0.5, cfg.delta, &cfg)?;
                    ((*cv.estimate).clone(), cv.t_hat)
                }
            };
            let doc = EstimateDoc::from_estimate(&estimate, opts.d, Some(t_used), &cfg);
            let text = serde_json::to_string_pretty(&doc)
                .map_err(|e| Error::Io(format!("estimate encode: {e}")))?;
            std::fs::write(&out, text)?;
            println!(
                "fit: n={} d={} t={} pieces={} -> {}",
                e.n(),
                opts.d,
                t_used,
                estimate.num_pieces(),
                out.display()
            );
            Ok(())
        }
        Command::Eval {
            estimate,
            model,
            tol,
        } => {
            let doc: EstimateDoc = serde_json::from_str(&std::fs::read_to_string(&estimate)?)
                .map_err(|e| Error::invalid(format!("estimate parse: {e}")))?;
            let spec: ModelSpec = serde_json::from_str(&std::fs::read_to_string(&model)?)
                .map_err(|e| Error::invalid(format!("model parse: {e}")))?;
            let est = doc.to_estimate()?;
            let m = spec.build()?;
            let l1 = l1_vs_model(&est, &m, tol)?;
            println!("{l1}");
            Ok(())
        }
        Command::Experiment { spec, out } => {
            let mut parsed: ExperimentSpec =
                serde_json::from_str(&std::fs::read_to_string(&spec)?)
                    .map_err(|e| Error::invalid(format!("spec parse: {e}")))?;
            if let Some(dir) = out {
                std::fs::create_dir_all(&dir)?;
                if parsed.out_csv.is_none() {
                    parsed.out_csv = Some(dir.join("results.csv"));
                }
                if parsed.out_svg.is_none() {
                    parsed.out_svg = Some(dir.join("results.svg"));
                }
            }
            let run = bench::run(&parsed)?;
            let finished = run
                .rows
                .iter()
                .filter(|r| r.l1_error.is_finite())
                .count();
            println!("experiment: {} rows ({} ok)", run.rows.len(), finished);
            if let Some(p) = run.csv_path {
                println!("csv: {}", p.display());
            }
            if let Some(p) = run.svg_path {
                println!("svg: {}", p.display());
            }
            Ok(())
        }
        Command::Verify { out, seed, trials } => {
            let mut reports = Vec::new();
            for d in 0..=8 {
                reports.push((
                    format!("poly_inequality_d{d}"),
                    check::check_poly_inequality(d, &[0.0, 0.5, 0.9, 0.99], trials, seed)?,
                ));
            }
            reports.push((
                "beta_concentration".to_string(),
                check::check_beta_concentration(
                    256,
                    &[0.1, 0.2, 0.4],
                    trials.max(10_000),
                    seed,
                )?,
            ));
            reports.push((
                "partition_count".to_string(),
                check::check_partition_count(&[0, 1, 2, 3, 4], &[64, 128, 512])?,
            ));
            reports.push((
                "histogram_distance".to_string(),
                check::check_histogram_distance(&[0, 1, 2, 3], &[64, 128, 512], 200, seed)?,
            ));
            let mut all_ok = true;
            for (name, report) in &reports {
                let ok = report.all_pass();
                all_ok &= ok;
                println!(
                    "{name}: {} ({} rows)",
                    if ok { "pass" } else { "FAIL" },
                    report.rows.len()
                );
                for row in report.rows.iter().filter(|r| !r.pass) {
                    println!(
                        "  FAIL {} observed={} bound={}",
                        row.case, row.observed, row.bound
                    );
                }
                if let Some(dir) = &out {
                    std::fs::create_dir_all(dir)?;
                    let file = std::fs::File::create(dir.join(format!("{name}.csv")))?;
                    report.write_csv(file)?;
                }
            }
            if all_ok {
                Ok(())
            } else {
                Err(Error::numeric("verification found violated bounds"))
            }
        }
        Command::Nodes { d, recompute, json } => {
            let degrees: Vec<usize> = match d {
                Some(d) if d <= 8 => vec![d],
                Some(d) => return Err(Error::invalid(format!("degree {d} exceeds 8"))),
                None => (0..=8).collect(),
            };
            let mut specs = Vec::new();
            for &deg in &degrees {
                let spec = if recompute && deg <= 3 {
                    optimize_nodes(deg, 1e-3)?
                } else {
                    node_spec(deg)?.clone()
                };
                specs.push(spec);
            }
            if json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&specs)
                        .map_err(|e| Error::Io(format!("node table encode: {e}")))?
                );
            } else {
                for spec in &specs {
                    let nodes: Vec<String> =
                        spec.nodes.iter().map(|x| format!("{x:.4}")).collect();
                    println!(
                        "d={} ratio={:.6}{} nodes=({})",
                        spec.d,
                        spec.ratio,
                        if spec.computed { " (computed)" } else { "" },
                        nodes.join(", ")
                    );
                }
            }
            Ok(())
        }
    }
}
