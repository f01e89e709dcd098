//! Command-line front end.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;

use pointset_qubo::basis::RotationBasis;
use pointset_qubo::bench::{
    self, gap_summary_csv, misaligned_instance_with, sweep_csv, trace_snapshots_csv, ExperimentConfig, Mode,
};
use pointset_qubo::geometry::{center, knn_links, load_point_set, random_rotation, rotation_matrix_2d, PointSet};
use pointset_qubo::pipeline::{Instance, Sampler};
use pointset_qubo::quantum::{annealing_rate_bound, build_hi, build_hp, evolve, gap_curve, suggested_steps};
use pointset_qubo::qubo::IsingProblem;
use pointset_qubo::report::{
    csv_string, fmt_f64, p_coo_text, p_dense_csv, p_labels, spectrum_csv, trace_csv, write_text, BuildSidecar,
    SolveReport,
};
use pointset_qubo::rng::seeded_rng;
use pointset_qubo::samplers::{solve_exhaustive, SaSchedule};
use pointset_qubo::Error;

#[derive(Parser)]
#[command(name = "pointset-qubo", version, about = "Point-set alignment as QUBO")]
struct Cli {
    /// Master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Point-set file or bundled dataset name (fish, ring, grid, blobs).
    #[arg(long, global = true)]
    dataset: Option<PathBuf>,
    /// JSON experiment configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build P for one instance and write it with a JSON sidecar.
    Build {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long, value_enum, default_value = "dense")]
        format: PFormat,
    },
    /// Minimize one instance and print the decoded transformation.
    Solve {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long, value_enum)]
        sampler: Option<SamplerKind>,
        #[arg(long)]
        sweeps: Option<usize>,
        #[arg(long)]
        restarts: Option<usize>,
        /// Write the annealing trace to this CSV file.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Lowest energy levels of one instance by enumeration.
    Spectrum {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long, default_value_t = 10)]
        levels: usize,
    },
    /// Accuracy benchmarks.
    Bench {
        #[arg(value_enum)]
        kind: BenchKind,
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Annealing traces and spectral gaps at fixed misalignments.
    GapStudy,
    /// Dense P with labels and its zero-block report.
    PExport {
        #[command(flatten)]
        instance: InstanceArgs,
    },
    /// Decoded map size with local versus full linking.
    Shrinkage {
        #[arg(long)]
        theta: Option<f64>,
    },
    /// Gap curve, rate bound and anneal overlaps for a small Ising problem.
    AnnealSim(AnnealArgs),
    /// Print the additive basis.
    Basis {
        #[arg(long, default_value_t = 2)]
        dim: usize,
        /// One JSON object per element.
        #[arg(long)]
        dump: bool,
    },
}

#[derive(Args, Default)]
struct InstanceArgs {
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Link degree.
    #[arg(long)]
    k: Option<usize>,
    /// Misalignment angle applied to the dataset (2D).
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<f64>,
    /// Uniform outlier ratio added to the template.
    #[arg(long)]
    noise: Option<f64>,
    /// Template file; replaces the rotated dataset.
    #[arg(long)]
    template: Option<PathBuf>,
}

#[derive(Args)]
struct AnnealArgs {
    /// Random instance size when no Ising file is given.
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long, default_value_t = 1.0)]
    bx: f64,
    /// Ising file with lines `h i value` and `J i j value`.
    #[arg(long)]
    ising: Option<PathBuf>,
    #[arg(long, default_value_t = 101)]
    grid: usize,
    /// Anneal times; defaults to multiples of the rate bound.
    #[arg(long, value_delimiter = ',')]
    time: Vec<f64>,
    /// Time steps per anneal; chosen from the time and operator norms when
    /// absent.
    #[arg(long)]
    steps: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Te,
    Psr,
}

#[derive(Clone, Copy, ValueEnum)]
enum PFormat {
    Dense,
    Coo,
}

#[derive(Clone, Copy, ValueEnum)]
enum SamplerKind {
    Exhaustive,
    Sa,
}

#[derive(Clone, Copy, ValueEnum)]
enum BenchKind {
    Misalign,
    Theta,
    Noise,
}

enum Failure {
    Input(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Csv(_) => Failure::Internal(e.to_string()),
            e => Failure::Input(e.to_string()),
        }
    }
}

type CliResult<T> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Internal(m)) => {
            eprintln!("internal error: {m}");
            ExitCode::from(2)
        }
    }
}

fn load_config(cli: &Cli) -> CliResult<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
            serde_json::from_str(&text).map_err(Error::from)?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(o) = &cli.out {
        cfg.out = o.clone();
    }
    if let Some(d) = &cli.dataset {
        cfg.dataset = Some(d.clone());
    }
    Ok(cfg)
}

fn apply_instance_args(cfg: &mut ExperimentConfig, a: &InstanceArgs) {
    if let Some(m) = a.mode {
        cfg.mode = match m {
            ModeArg::Te => Mode::Te,
            ModeArg::Psr => Mode::Psr,
        };
    }
    if let Some(k) = a.k {
        cfg.link_degree = k;
    }
    if let Some(t) = a.theta {
        cfg.theta = t;
    }
    if let Some(r) = a.noise {
        cfg.noise_ratio = r;
    }
}

/// The instance described by the config, with the clean template when the
/// ground truth is known.
fn build_instance(cfg: &ExperimentConfig, template: Option<&Path>) -> CliResult<(Instance, Option<PointSet>)> {
    cfg.validate()?;
    let x = cfg.load_dataset()?;
    if let Some(path) = template {
        let y = load_point_set(path)?;
        let inst = match cfg.mode {
            Mode::Te => Instance::te(&x, &y)?,
            Mode::Psr => {
                let (xc, _) = center(&x);
                let (yc, _) = center(&y);
                Instance::psr(&x, &y, knn_links(&xc, &yc, cfg.link_degree)?)?
            }
        };
        return Ok((inst, None));
    }
    if cfg.mode == Mode::Te && (cfg.link_degree != 1 || cfg.noise_ratio != 0.0) {
        return Err(Failure::Input(
            "te mode uses index correspondences: k must be 1 and noise 0".into(),
        ));
    }
    let (xc, _) = center(&x);
    let rotation = match x.dim() {
        2 => rotation_matrix_2d(cfg.theta),
        d => random_rotation(d, cfg.seed)?.rotation,
    };
    let (inst, clean) = misaligned_instance_with(
        &xc,
        &rotation,
        cfg.link_degree,
        cfg.noise_ratio,
        cfg.seed,
        cfg.link_frame,
    )?;
    Ok((inst, Some(clean)))
}

fn write(path: &Path, text: &str) -> CliResult<()> {
    write_text(path, text)?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn run(cli: Cli) -> CliResult<()> {
    let mut cfg = load_config(&cli)?;
    match cli.command {
        Command::Build { instance, format } => {
            apply_instance_args(&mut cfg, &instance);
            let (inst, _) = build_instance(&cfg, instance.template.as_deref())?;
            let p = &inst.problem;
            match format {
                PFormat::Dense => write(&cfg.out.join("P.csv"), &p_dense_csv(p, &p_labels(&inst.basis))?)?,
                PFormat::Coo => write(&cfg.out.join("P.coo"), &p_coo_text(p))?,
            }
            let sidecar = BuildSidecar {
                dim: p.dim(),
                basis_size: p.basis_size(),
                n: inst.reference.len(),
                m: inst.template.len(),
                link_degree: inst.links.iter().map(<[usize]>::len).max().unwrap_or(0),
                clamped_bit: p.clamped_bit(),
            };
            write(
                &cfg.out.join("P.json"),
                &serde_json::to_string_pretty(&sidecar).map_err(Error::from)?,
            )?;
        }
        Command::Solve {
            instance,
            sampler,
            sweeps,
            restarts,
            trace,
        } => {
            apply_instance_args(&mut cfg, &instance);
            if let Some(kind) = sampler {
                cfg.sampler = match kind {
                    SamplerKind::Exhaustive => Sampler::Exhaustive,
                    SamplerKind::Sa => Sampler::Sa(SaSchedule::default()),
                };
            }
            if sweeps.is_some() || restarts.is_some() {
                let Sampler::Sa(s) = &mut cfg.sampler else {
                    return Err(Failure::Input("--sweeps and --restarts need --sampler sa".into()));
                };
                s.sweeps = sweeps.unwrap_or(s.sweeps);
                s.restarts = restarts.unwrap_or(s.restarts);
            }
            let (inst, truth) = build_instance(&cfg, instance.template.as_deref())?;
            let (decoded, tr) = inst.solve(&cfg.sampler, cfg.seed)?;
            let eval = inst.evaluate(&decoded, truth.as_ref())?;
            if !eval.is_consistent() {
                return Err(Failure::Internal(format!(
                    "QUBO energy {} disagrees with residual {}",
                    eval.qubo_energy, eval.residual_energy
                )));
            }
            let report = SolveReport::new(&decoded.solution, &decoded.transform, &decoded.projection);
            let json = serde_json::to_string_pretty(&report).map_err(Error::from)?;
            println!("{json}");
            if decoded.projection.degenerate {
                eprintln!("warning: decoded map is degenerate; the projected rotation is not unique");
            }
            write(&cfg.out.join("solution.json"), &json)?;
            write(
                &cfg.out.join("eval.json"),
                &serde_json::to_string_pretty(&eval).map_err(Error::from)?,
            )?;
            if let Some(path) = trace {
                write(&path, &trace_csv(&tr)?)?;
            }
        }
        Command::Spectrum { instance, levels } => {
            apply_instance_args(&mut cfg, &instance);
            let (inst, _) = build_instance(&cfg, instance.template.as_deref())?;
            let (_, spectrum) = solve_exhaustive(&inst.reduced)?;
            let csv = spectrum_csv(&spectrum, levels)?;
            print!("{csv}");
            write(&cfg.out.join("spectrum.csv"), &csv)?;
        }
        Command::Bench { kind, trials } => {
            if let Some(t) = trials {
                cfg.trials = t;
                cfg.noise_trials = t;
            }
            match kind {
                BenchKind::Misalign => {
                    let res = bench::run_misalignment_bench(&cfg)?;
                    print!("{}", res.rows_csv()?);
                    write(&cfg.out.join("bench_misalign.csv"), &res.rows_csv()?)?;
                    write(&cfg.out.join("bench_misalign_trials.csv"), &res.trials_csv()?)?;
                }
                BenchKind::Noise => {
                    let res = bench::run_noise_sweep(&cfg)?;
                    print!("{}", res.rows_csv()?);
                    write(&cfg.out.join("bench_noise.csv"), &res.rows_csv()?)?;
                    write(&cfg.out.join("bench_noise_trials.csv"), &res.trials_csv()?)?;
                }
                BenchKind::Theta => {
                    let rows = bench::run_theta_sweep(&cfg)?;
                    write(&cfg.out.join("bench_theta.csv"), &sweep_csv(&rows)?)?;
                }
            }
        }
        Command::GapStudy => {
            let cases = bench::run_gap_study(&cfg)?;
            let summary = gap_summary_csv(&cases)?;
            print!("{summary}");
            write(&cfg.out.join("gap_study.csv"), &summary)?;
            for c in &cases {
                let name = format!("trace_theta{:.4}_k{}.csv", c.theta, c.k);
                write(&cfg.out.join(name), &trace_snapshots_csv(&c.trace)?)?;
            }
        }
        Command::PExport { instance } => {
            apply_instance_args(&mut cfg, &instance);
            let export = bench::export_p_heatmap_data(&cfg)?;
            write(&cfg.out.join("P_heatmap.csv"), &export.csv)?;
            let blocks = serde_json::to_string_pretty(&serde_json::json!({
                "blocks": export.blocks,
                "minDiagonal": export.min_diagonal,
            }))
            .map_err(Error::from)?;
            println!("{blocks}");
            write(&cfg.out.join("P_blocks.json"), &blocks)?;
        }
        Command::Shrinkage { theta } => {
            cfg.theta = theta.unwrap_or(cfg.theta);
            let report = bench::run_shrinkage_demo(&cfg)?;
            let json = serde_json::to_string_pretty(&report).map_err(Error::from)?;
            println!("{json}");
            write(&cfg.out.join("shrinkage.json"), &json)?;
            if !report.shrinks() {
                return Err(Failure::Internal(format!(
                    "full linking did not shrink the map: {} >= {}",
                    report.full.sigma_max, report.local.sigma_max
                )));
            }
        }
        Command::AnnealSim(args) => anneal_sim(&cfg, &args)?,
        Command::Basis { dim, dump } => {
            let basis = RotationBasis::for_dim(dim)?;
            for e in basis.elements() {
                if dump {
                    println!("{}", serde_json::to_string(e).map_err(Error::from)?);
                } else {
                    println!("{}", e.label());
                }
            }
        }
    }
    Ok(())
}

fn random_ising(n: usize, seed: u64) -> IsingProblem {
    let mut rng = seeded_rng(seed, 0);
    let mut ising = IsingProblem::new((0..n).map(|_| rng.random_range(-1.0..1.0)).collect());
    for a in 0..n {
        for b in (a + 1)..n {
            ising
                .add_coupling(a, b, rng.random_range(-1.0..1.0))
                .expect("indices are in range");
        }
    }
    ising
}

fn anneal_sim(cfg: &ExperimentConfig, args: &AnnealArgs) -> CliResult<()> {
    let ising = match &args.ising {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
            IsingProblem::parse(&text, None)?
        }
        None => random_ising(args.n, cfg.seed),
    };
    let n = ising.len();
    let hp = build_hp(&ising)?;
    let hi = build_hi(n, args.bx)?;
    let curve = gap_curve(&hi, &hp, args.grid)?;
    let gap_csv = csv_string(
        &["s", "gap", "ground_energy"],
        curve
            .samples
            .iter()
            .map(|g| vec![fmt_f64(g.s), fmt_f64(g.gap), fmt_f64(g.ground_energy)]),
    )?;
    write(&cfg.out.join("gap_curve.csv"), &gap_csv)?;

    let bound = annealing_rate_bound(&hi, &hp, args.grid)?;
    let times = if args.time.is_empty() {
        [1.0, 10.0, 50.0].iter().map(|m| m * bound.t_min).collect()
    } else {
        args.time.clone()
    };
    let mut rows = Vec::new();
    for &t in &times {
        let steps = args.steps.unwrap_or_else(|| suggested_steps(&hi, &hp, t));
        let ev = evolve(&hi, &hp, t, steps)?;
        rows.push(vec![
            fmt_f64(t),
            steps.to_string(),
            fmt_f64(ev.ground_overlap),
            fmt_f64(bound.t_min),
        ]);
    }
    let csv = csv_string(&["time", "steps", "ground_overlap", "rate_bound"], rows)?;
    print!("{csv}");
    write(&cfg.out.join("anneal.csv"), &csv)?;
    Ok(())
}
