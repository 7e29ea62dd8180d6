use clap::{Args, Parser, Subcommand};
use geosep::harness::{
    bound_fuzz, cross_scale_zero, emit_plot_data, frame_exactness, materialized_consistency,
    parse_scales, run_experiment, simulate, summary, verify_suite, Check, ExperimentConfig,
    RunOutput,
};
use geosep::separation::{one_step_threshold, separation_error};
use geosep::{Error, Result};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "geosep",
    version,
    about = "Point/curve separation by one pass of wavelet and curvelet thresholding"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Args)]
struct Opts {
    /// TOML experiment config; built-in defaults otherwise.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Scale range, e.g. 5..10.
    #[arg(long, global = true, value_name = "J_MIN..J_MAX")]
    scales: Option<String>,
    /// Threshold exponent epsilon.
    #[arg(long, global = true)]
    epsilon: Option<f64>,
    /// Spatial period factor of the frequency grid.
    #[arg(long, global = true)]
    oversample: Option<usize>,
    /// Seed for probe placement.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory for reports and plot data.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Run the scales concurrently.
    #[arg(long, global = true)]
    parallel: bool,
    /// Accept an epsilon outside the admissible range.
    #[arg(long, global = true)]
    override_epsilon: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Window identities, reconstruction and cross-scale support checks.
    FramesCheck,
    /// Build the filtered pieces P_j and C_j and report their norms.
    Simulate,
    /// One pass of thresholding per scale; thresholds, set sizes and ratio.
    Separate,
    /// Cluster coherence and relative sparsity per scale.
    Coherence,
    /// Phase-space distances and wavefront containment per scale.
    Phasespace,
    /// Error-bound fuzz on random frame pairs and the explicit-matrix comparison.
    AbstractVerify,
    /// Every acceptance check; exits nonzero on any failure.
    Verify,
    /// Run the experiment and write point clouds and the ratio table.
    PlotData,
}

fn config(opts: &Opts) -> Result<ExperimentConfig> {
    let mut cfg = match &opts.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = &opts.scales {
        let (lo, hi) = parse_scales(s)?;
        cfg.grids.j_min = lo;
        cfg.grids.j_max = hi;
    }
    if let Some(e) = opts.epsilon {
        cfg.algorithm.epsilon = e;
    }
    if let Some(o) = opts.oversample {
        cfg.grids.oversample = o;
    }
    if let Some(s) = opts.seed {
        cfg.algorithm.seed = s;
    }
    if let Some(d) = &opts.out {
        cfg.outputs.dir = Some(d.clone());
    }
    cfg.outputs.parallel |= opts.parallel;
    cfg.algorithm.override_epsilon |= opts.override_epsilon;
    cfg.validate()?;
    Ok(cfg)
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.4}")).unwrap_or_else(|| "-".into())
}

fn report_checks(checks: &[Check]) -> ExitCode {
    let (text, ok) = summary(checks);
    print!("{text}");
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn run(cli: &Cli) -> Result<ExitCode> {
    let cfg = config(&cli.opts)?;
    let experiment = || -> Result<RunOutput> {
        let out = run_experiment(&cfg)?;
        if let Some(d) = &cfg.outputs.dir {
            eprintln!("report written to {}", d.display());
        }
        Ok(out)
    };
    match cli.command {
        Command::FramesCheck => {
            let frames = cfg.frames();
            let mut checks = frame_exactness(&frames, cfg.grids.j_min.max(6), 10)?;
            checks.push(cross_scale_zero(&frames)?);
            return Ok(report_checks(&checks));
        }
        Command::Simulate => {
            println!("{:>3} {:>12} {:>12}", "j", "|P_j|", "|C_j|");
            for (j, p, c) in simulate(&cfg)? {
                println!("{j:>3} {:>12.4} {:>12.4}", p.norm(), c.norm());
            }
        }
        Command::Separate => {
            let frames = cfg.frames();
            let scene = cfg.build_scene()?;
            let params = cfg.threshold_params();
            println!(
                "{:>3} {:>10} {:>10} {:>7} {:>7} {:>8}",
                "j", "t1", "t2", "|T1|", "|T2|", "ratio"
            );
            for j in cfg.scales() {
                let (p, c) = scene.pieces(&frames, j)?;
                let out = one_step_threshold(&p.add(&c), j, &params, &frames)?;
                let ratio = separation_error(&out, &p, &c)?;
                println!(
                    "{j:>3} {:>10.4} {:>10.4} {:>7} {:>7} {ratio:>8.4}",
                    out.t1,
                    out.t2,
                    out.t1_set.len(),
                    out.t2_set.len()
                );
            }
        }
        Command::Coherence => {
            let out = experiment()?;
            println!(
                "{:>3} {:>9} {:>11} {:>11} {:>11}",
                "j", "mu_c", "delta1", "delta2", "T1 l1 of C"
            );
            for r in &out.report.records {
                println!(
                    "{:>3} {:>9.4} {:>11.3} {:>11.3} {:>11.4}",
                    r.j, r.mu_c, r.delta1, r.delta2, r.cross_l1
                );
            }
        }
        Command::Phasespace => {
            let out = experiment()?;
            println!(
                "{:>3} {:>9} {:>9} {:>8} {:>8}",
                "j", "dPS(T1)", "dPS(T2)", "WF(P)", "WF(C)"
            );
            for r in &out.report.records {
                println!(
                    "{:>3} {:>9} {:>9} {:>8} {:>8}",
                    r.j,
                    opt(r.d_ps_points),
                    opt(r.d_ps_curve),
                    opt(r.wf_point_hits),
                    opt(r.wf_curve_hits)
                );
            }
        }
        Command::AbstractVerify => {
            let checks = vec![
                bound_fuzz(200, cfg.algorithm.seed)?,
                materialized_consistency(20, cfg.algorithm.seed)?,
            ];
            return Ok(report_checks(&checks));
        }
        Command::Verify => return Ok(report_checks(&verify_suite(&cfg)?)),
        Command::PlotData => {
            let dir = cfg
                .outputs
                .dir
                .clone()
                .ok_or_else(|| Error::InvalidInput("plot-data needs --out DIR".into()))?;
            let mut plain = cfg.clone();
            plain.outputs.dir = None;
            let out = run_experiment(&plain)?;
            for p in emit_plot_data(&out, &dir)? {
                println!("{}", p.display());
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
