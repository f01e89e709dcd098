//! Experiment protocols: random-misalignment accuracy, angle sweeps, outlier
//! sweeps, sampler traces, `P` structure export and the shrinkage demo.
//!
//! Every trial draws its own seed from the master seed, so results do not
//! depend on thread scheduling and trial `i` sees the same rotation for
//! every link degree.

use std::f64::consts::{PI, TAU};
use std::path::PathBuf;

use nalgebra::DMatrix;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::{Family, RotationBasis};
use crate::datasets::{by_name, fish};
use crate::error::{Error, Result};
use crate::geometry::{
    add_uniform_outliers, center, knn_links, load_point_set, rotation_2d, rotation_matrix_2d, LinkSet, PointSet,
    RigidTransform,
};
use crate::metrics::{alignment_error, transformation_discrepancy};
use crate::pipeline::{Instance, Sampler};
use crate::qubo::QuboProblem;
use crate::report::{csv_string, fmt_f64, p_dense_csv, p_labels};
use crate::rng::{derive_seed, seeded_rng};
use crate::samplers::{bits_to_hex, solve_exhaustive, solve_sa, spectrum_slice, SaSchedule, Solution};
use crate::unembed::max_singular_value;

/// QUBO construction mode for single-instance commands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Te,
    Psr,
}

/// Frame in which nearest-neighbour links are searched.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum LinkFrame {
    /// Template mapped back by the ground-truth rotation.
    #[default]
    Aligned,
    /// Template as observed.
    Observed,
}

/// Half-open angle range `[start, end)` sampled every `step`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaSweep {
    pub start: f64,
    pub end: f64,
    pub step: f64,
}

impl Default for ThetaSweep {
    fn default() -> Self {
        Self {
            start: 0.0,
            end: TAU,
            step: PI / 36.0,
        }
    }
}

impl ThetaSweep {
    pub fn points(&self) -> Vec<f64> {
        let count = ((self.end - self.start) / self.step - 1e-9).ceil().max(0.0) as usize;
        (0..count).map(|i| self.start + i as f64 * self.step).collect()
    }
}

/// Settings shared by all commands; deserializable from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "camelCase", deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Point-set file or bundled dataset name; the bundled fish when absent.
    pub dataset: Option<PathBuf>,
    pub mode: Mode,
    /// Link degree for single-instance commands.
    pub link_degree: usize,
    /// Link degrees compared by the benches.
    pub link_degrees: Vec<usize>,
    pub trials: usize,
    pub noise_trials: usize,
    /// Misalignment angle for single-instance commands.
    pub theta: f64,
    pub theta_sweep: ThetaSweep,
    /// Outlier ratio for single-instance commands.
    pub noise_ratio: f64,
    pub noise_ratios: Vec<f64>,
    pub link_frame: LinkFrame,
    pub sampler: Sampler,
    pub seed: u64,
    pub out: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            dataset: None,
            mode: Mode::Te,
            link_degree: 1,
            link_degrees: vec![1, 10, 20, 30],
            trials: 100,
            noise_trials: 50,
            theta: PI / 4.0,
            theta_sweep: ThetaSweep::default(),
            noise_ratio: 0.0,
            noise_ratios: vec![0.0, 0.1, 0.2, 0.3, 0.4, 0.5],
            link_frame: LinkFrame::Aligned,
            sampler: Sampler::Exhaustive,
            seed: 0,
            out: PathBuf::from("out"),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.trials == 0 || self.noise_trials == 0 {
            return bad("trials must be >= 1".into());
        }
        let s = &self.theta_sweep;
        if !(s.step > 0.0 && s.step.is_finite() && s.start.is_finite() && s.end.is_finite()) {
            return bad(format!("invalid theta sweep step {}", s.step));
        }
        if let Some(r) = self
            .noise_ratios
            .iter()
            .chain([&self.noise_ratio])
            .find(|r| !(0.0..=0.5).contains(*r))
        {
            return Err(Error::InvalidRatio(*r));
        }
        if self.link_degree == 0 || self.link_degrees.contains(&0) {
            return bad("link degrees must be >= 1".into());
        }
        if let Sampler::Sa(schedule) = &self.sampler {
            if schedule.restarts == 0 || schedule.sweeps == 0 {
                return Err(Error::InvalidSchedule("restarts and sweeps must be >= 1".into()));
            }
        }
        Ok(())
    }

    /// The configured point set. A dataset that is not an existing file
    /// may name a bundled set (`fish`, `ring`, `grid`, `blobs`).
    pub fn load_dataset(&self) -> Result<PointSet> {
        match &self.dataset {
            None => Ok(fish()),
            Some(path) if !path.exists() => path.to_str().and_then(by_name).map_or_else(|| load_point_set(path), Ok),
            Some(path) => load_point_set(path),
        }
    }

    /// The dataset, validated as 2D and centered.
    fn centered_2d(&self) -> Result<PointSet> {
        self.validate()?;
        let x = self.load_dataset()?;
        if x.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: x.dim(),
            });
        }
        Ok(center(&x).0)
    }
}

/// Seeds for trial `i`: rotation angle, outliers, sampler.
#[derive(Debug, Clone, Copy)]
struct TrialSeeds {
    theta: f64,
    outliers: u64,
    sampler: u64,
}

fn trial_seeds(master: u64, trial: usize) -> TrialSeeds {
    let s = derive_seed(master, trial as u64);
    TrialSeeds {
        theta: seeded_rng(s, 0).random_range(0.0..TAU),
        outliers: derive_seed(s, 1),
        sampler: derive_seed(s, 2),
    }
}

/// A misaligned problem: the centered reference `x`, the template
/// `Rot(θ)·x` with optional uniform outliers, and links of degree `k`.
/// `k = 1` without outliers uses index correspondences.
pub fn misaligned_instance(
    x: &PointSet,
    theta: f64,
    k: usize,
    ratio: f64,
    outlier_seed: u64,
    frame: LinkFrame,
) -> Result<(Instance, PointSet)> {
    misaligned_instance_with(x, &rotation_matrix_2d(theta), k, ratio, outlier_seed, frame)
}

/// [`misaligned_instance`] for an arbitrary ground-truth rotation.
pub fn misaligned_instance_with(
    x: &PointSet,
    rotation: &DMatrix<f64>,
    k: usize,
    ratio: f64,
    outlier_seed: u64,
    frame: LinkFrame,
) -> Result<(Instance, PointSet)> {
    let clean = x.transformed(&RigidTransform::from_rotation(rotation.clone()));
    if k == 1 && ratio == 0.0 {
        return Ok((Instance::te(x, &clean)?, clean));
    }
    let observed = add_uniform_outliers(&clean, ratio, outlier_seed)?;
    let search = match frame {
        LinkFrame::Aligned => observed.transformed(&RigidTransform::from_rotation(rotation.transpose())),
        LinkFrame::Observed => observed.clone(),
    };
    let links = knn_links(x, &search, k)?;
    Ok((Instance::psr(x, &observed, links)?, clean))
}

/// Outcome of one trial.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub k: usize,
    pub trial: usize,
    pub theta: f64,
    pub ratio: f64,
    pub e2d: f64,
    pub e_r: f64,
    pub energy: f64,
}

fn run_one(
    x: &PointSet,
    cfg: &ExperimentConfig,
    k: usize,
    trial: usize,
    theta: Option<f64>,
    ratio: f64,
) -> Result<TrialRecord> {
    let seeds = trial_seeds(cfg.seed, trial);
    let theta = theta.unwrap_or(seeds.theta);
    let (inst, clean) = misaligned_instance(x, theta, k, ratio, seeds.outliers, cfg.link_frame)?;
    let (decoded, _) = inst.solve(&cfg.sampler, seeds.sampler)?;
    let r = &decoded.transform.rotation;
    Ok(TrialRecord {
        k,
        trial,
        theta,
        ratio,
        e2d: alignment_error(r, &inst.reference, &clean)?,
        e_r: transformation_discrepancy(r),
        energy: decoded.solution.energy,
    })
}

/// Aggregated accuracy for one condition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub k: usize,
    pub theta: Option<f64>,
    pub ratio: Option<f64>,
    pub mean_e2d: f64,
    pub sd_e2d: f64,
    pub mean_er: f64,
    pub sd_er: f64,
    pub trials: usize,
}

/// Mean and sample standard deviation (zero for a single value).
pub fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

impl BenchRow {
    fn from_records(k: usize, theta: Option<f64>, ratio: Option<f64>, records: &[TrialRecord]) -> Self {
        let e2d: Vec<f64> = records.iter().map(|r| r.e2d).collect();
        let er: Vec<f64> = records.iter().map(|r| r.e_r).collect();
        let (mean_e2d, sd_e2d) = mean_sd(&e2d);
        let (mean_er, sd_er) = mean_sd(&er);
        Self {
            k,
            theta,
            ratio,
            mean_e2d,
            sd_e2d,
            mean_er,
            sd_er,
            trials: records.len(),
        }
    }
}

/// Aggregated rows plus every trial behind them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchResult {
    pub rows: Vec<BenchRow>,
    pub trials: Vec<TrialRecord>,
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

impl BenchResult {
    pub fn rows_csv(&self) -> Result<String> {
        csv_string(
            &[
                "k", "theta", "ratio", "trials", "mean_e2d", "sd_e2d", "mean_er", "sd_er",
            ],
            self.rows.iter().map(|r| {
                vec![
                    r.k.to_string(),
                    opt(r.theta),
                    opt(r.ratio),
                    r.trials.to_string(),
                    fmt_f64(r.mean_e2d),
                    fmt_f64(r.sd_e2d),
                    fmt_f64(r.mean_er),
                    fmt_f64(r.sd_er),
                ]
            }),
        )
    }

    pub fn trials_csv(&self) -> Result<String> {
        csv_string(
            &["k", "trial", "theta", "ratio", "e2d", "er", "energy"],
            self.trials.iter().map(|t| {
                vec![
                    t.k.to_string(),
                    t.trial.to_string(),
                    fmt_f64(t.theta),
                    fmt_f64(t.ratio),
                    fmt_f64(t.e2d),
                    fmt_f64(t.e_r),
                    fmt_f64(t.energy),
                ]
            }),
        )
    }
}

/// Run `trials` trials for each `(ratio, k)` condition, in parallel.
fn run_conditions(
    x: &PointSet,
    cfg: &ExperimentConfig,
    conditions: &[(f64, usize)],
    trials: usize,
    label_ratio: bool,
) -> Result<BenchResult> {
    let jobs: Vec<(f64, usize, usize)> = conditions
        .iter()
        .flat_map(|&(ratio, k)| (0..trials).map(move |t| (ratio, k, t)))
        .collect();
    let records: Vec<TrialRecord> = jobs
        .par_iter()
        .map(|&(ratio, k, t)| run_one(x, cfg, k, t, None, ratio))
        .collect::<Result<_>>()?;
    let rows = records
        .chunks(trials)
        .zip(conditions)
        .map(|(chunk, &(ratio, k))| BenchRow::from_records(k, None, label_ratio.then_some(ratio), chunk))
        .collect();
    Ok(BenchResult { rows, trials: records })
}

/// Random misalignments `θ ~ U[0, 2π)` for every configured link degree.
pub fn run_misalignment_bench(cfg: &ExperimentConfig) -> Result<BenchResult> {
    let x = cfg.centered_2d()?;
    let conditions: Vec<(f64, usize)> = cfg.link_degrees.iter().map(|&k| (0.0, k)).collect();
    run_conditions(&x, cfg, &conditions, cfg.trials, false)
}

/// Uniform outliers at every configured ratio and link degree, with
/// `noise_trials` random misalignments each.
pub fn run_noise_sweep(cfg: &ExperimentConfig) -> Result<BenchResult> {
    let x = cfg.centered_2d()?;
    let conditions: Vec<(f64, usize)> = cfg
        .noise_ratios
        .iter()
        .flat_map(|&r| cfg.link_degrees.iter().map(move |&k| (r, k)))
        .collect();
    run_conditions(&x, cfg, &conditions, cfg.noise_trials, true)
}

/// One point of an angle sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub theta: f64,
    pub k: usize,
    pub e2d: f64,
    pub e_r: f64,
}

/// Fixed misalignment angles on the configured grid, for every link degree.
pub fn run_theta_sweep(cfg: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    let x = cfg.centered_2d()?;
    let jobs: Vec<(f64, usize, usize)> = cfg
        .theta_sweep
        .points()
        .into_iter()
        .enumerate()
        .flat_map(|(i, th)| cfg.link_degrees.iter().map(move |&k| (th, k, i)))
        .collect();
    jobs.par_iter()
        .map(|&(theta, k, i)| {
            let r = run_one(&x, cfg, k, i, Some(theta), 0.0)?;
            Ok(SweepRow {
                theta,
                k,
                e2d: r.e2d,
                e_r: r.e_r,
            })
        })
        .collect()
}

pub fn sweep_csv(rows: &[SweepRow]) -> Result<String> {
    csv_string(
        &["theta", "k", "e2d", "er"],
        rows.iter()
            .map(|r| vec![fmt_f64(r.theta), r.k.to_string(), fmt_f64(r.e2d), fmt_f64(r.e_r)]),
    )
}

/// Bits selecting `−R` instead of `R`: every selected element is swapped
/// for its oppositely signed partner of equal weight. `None` when some
/// selected element has no partner.
pub fn opposite_bits(basis: &RotationBasis, free: &[bool]) -> Option<Vec<bool>> {
    let group = basis.len() / crate::basis::WEIGHTS.len();
    let elements = basis.elements();
    let mut out = vec![false; free.len()];
    for (k, _) in free.iter().enumerate().filter(|(_, &b)| b) {
        let g = k / group * group;
        let partner = (g..g + group).find(|&j| {
            elements[j].generator.generator == elements[k].generator.generator
                && elements[j].generator.negated != elements[k].generator.negated
        })?;
        out[partner] = true;
    }
    Some(out)
}

/// A sampler trace event with its decoded alignment error.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceSnapshot {
    pub step: u64,
    pub energy: f64,
    pub bitstring: String,
    pub e2d: f64,
}

/// Sampler trace and exhaustive spectrum summary for one instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapCase {
    pub theta: f64,
    pub k: usize,
    pub ground_energy: f64,
    /// Distance between the two lowest distinct energy levels.
    pub gap: f64,
    /// The two lowest states (possibly degenerate) and their errors.
    pub lowest_energies: [f64; 2],
    pub lowest_e2d: [f64; 2],
    pub sa_energy: f64,
    pub trace: Vec<TraceSnapshot>,
}

/// Angles and link degrees examined by [`run_gap_study`].
pub const GAP_STUDY_THETAS: [f64; 3] = [PI / 8.0, PI / 4.0, PI / 2.0];
pub const GAP_STUDY_DEGREES: [usize; 2] = [1, 30];

/// Traced simulated annealing plus exhaustive spectra on fixed
/// misalignments. The sampler schedule comes from the config when it
/// selects annealing, otherwise the default schedule is used.
pub fn run_gap_study(cfg: &ExperimentConfig) -> Result<Vec<GapCase>> {
    let x = cfg.centered_2d()?;
    let schedule = match cfg.sampler {
        Sampler::Sa(s) => s,
        Sampler::Exhaustive => SaSchedule::default(),
    };
    let mut cases = Vec::new();
    for (i, &theta) in GAP_STUDY_THETAS.iter().enumerate() {
        for &k in &GAP_STUDY_DEGREES {
            let k = k.min(x.len());
            let (inst, clean) = misaligned_instance(&x, theta, k, 0.0, 0, cfg.link_frame)?;
            let e2d_of = |bits: &[bool]| -> Result<f64> {
                let r = inst.basis.assemble(bits)?;
                alignment_error(&r, &inst.reference, &clean)
            };
            let (sa, trace) = solve_sa(&inst.reduced, &schedule, derive_seed(cfg.seed, i as u64))?;
            let (ground, spectrum) = solve_exhaustive(&inst.reduced)?;
            let lowest = spectrum_slice(&inst.reduced, 2)?;
            let trace = trace
                .events
                .iter()
                .map(|e| {
                    Ok(TraceSnapshot {
                        step: e.step,
                        energy: e.energy,
                        bitstring: bits_to_hex(&e.bits),
                        e2d: e2d_of(&e.bits[1..])?,
                    })
                })
                .collect::<Result<_>>()?;
            cases.push(GapCase {
                theta,
                k,
                ground_energy: ground.energy,
                gap: spectrum.gap,
                lowest_energies: [lowest[0].0, lowest[1].0],
                lowest_e2d: [e2d_of(&lowest[0].1)?, e2d_of(&lowest[1].1)?],
                sa_energy: sa.energy,
                trace,
            });
        }
    }
    Ok(cases)
}

pub fn gap_summary_csv(cases: &[GapCase]) -> Result<String> {
    csv_string(
        &[
            "theta",
            "k",
            "ground_energy",
            "gap",
            "second_energy",
            "e2d_0",
            "e2d_1",
            "sa_energy",
        ],
        cases.iter().map(|c| {
            vec![
                fmt_f64(c.theta),
                c.k.to_string(),
                fmt_f64(c.ground_energy),
                fmt_f64(c.gap),
                fmt_f64(c.lowest_energies[1]),
                fmt_f64(c.lowest_e2d[0]),
                fmt_f64(c.lowest_e2d[1]),
                fmt_f64(c.sa_energy),
            ]
        }),
    )
}

pub fn trace_snapshots_csv(trace: &[TraceSnapshot]) -> Result<String> {
    csv_string(
        &["step", "energy", "bitstring", "e2d"],
        trace.iter().map(|t| {
            vec![
                t.step.to_string(),
                fmt_f64(t.energy),
                t.bitstring.clone(),
                fmt_f64(t.e2d),
            ]
        }),
    )
}

/// Largest absolute entry of `P` between two generator families.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockReport {
    pub rows: Family,
    pub cols: Family,
    pub max_abs: f64,
    pub zero: bool,
}

/// Absolute threshold for a block to count as zero.
pub const ZERO_BLOCK_TOLERANCE: f64 = 1e-12;

/// Block-wise maxima of `P` over every pair of generator families present
/// in the basis (the clamped row and column are excluded).
pub fn block_structure(p: &QuboProblem, basis: &RotationBasis) -> Vec<BlockReport> {
    let mut families: Vec<Family> = basis.elements().iter().map(|e| e.family()).collect();
    families.sort();
    families.dedup();
    let m = p.matrix();
    let mut out = Vec::new();
    for &a in &families {
        for &b in &families {
            let mut max_abs: f64 = 0.0;
            for (i, _) in basis.elements().iter().enumerate().filter(|(_, e)| e.family() == a) {
                for (j, _) in basis.elements().iter().enumerate().filter(|(_, e)| e.family() == b) {
                    max_abs = max_abs.max(m[(i + 1, j + 1)].abs());
                }
            }
            out.push(BlockReport {
                rows: a,
                cols: b,
                max_abs,
                zero: max_abs <= ZERO_BLOCK_TOLERANCE,
            });
        }
    }
    out
}

/// `P` with labels and its block-zero report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PExport {
    pub labels: Vec<String>,
    pub csv: String,
    pub blocks: Vec<BlockReport>,
    pub min_diagonal: f64,
}

/// Dense `P` for the configured instance (angle, link degree, outlier
/// ratio).
pub fn export_p_heatmap_data(cfg: &ExperimentConfig) -> Result<PExport> {
    let x = cfg.centered_2d()?;
    let k = cfg.link_degree.min(x.len());
    let (inst, _) = misaligned_instance(&x, cfg.theta, k, cfg.noise_ratio, cfg.seed, cfg.link_frame)?;
    let labels = p_labels(&inst.basis);
    Ok(PExport {
        csv: p_dense_csv(&inst.problem, &labels)?,
        blocks: block_structure(&inst.problem, &inst.basis),
        min_diagonal: inst.problem.matrix().diagonal().min(),
        labels,
    })
}

/// Decoded map for one link setting of the shrinkage demo.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShrinkCase {
    pub k: usize,
    pub sigma_max: f64,
    pub degenerate: bool,
    pub energy: f64,
    pub bitstring: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShrinkageReport {
    pub theta: f64,
    pub local: ShrinkCase,
    pub full: ShrinkCase,
}

impl ShrinkageReport {
    /// Whether full linking shrank the decoded map.
    pub fn shrinks(&self) -> bool {
        self.full.sigma_max < self.local.sigma_max
    }
}

/// Ground states with index links (`k = 1`) and with every reference point
/// linked to every template point (`k = M`).
pub fn run_shrinkage_demo(cfg: &ExperimentConfig) -> Result<ShrinkageReport> {
    let x = cfg.centered_2d()?;
    let clean = x.transformed(&rotation_2d(cfg.theta));
    let case = |inst: Instance, k: usize| -> Result<ShrinkCase> {
        let (d, _) = inst.solve(&cfg.sampler, cfg.seed)?;
        Ok(ShrinkCase {
            k,
            sigma_max: max_singular_value(&d.transform.rotation),
            degenerate: d.projection.degenerate,
            energy: d.solution.energy,
            bitstring: d.solution.hex(),
        })
    };
    let m = clean.len();
    Ok(ShrinkageReport {
        theta: cfg.theta,
        local: case(Instance::te(&x, &clean)?, 1)?,
        full: case(Instance::psr(&x, &clean, LinkSet::global(x.len(), m))?, m)?,
    })
}

/// Solution whose free bits select `−R` for the instance's ground state,
/// re-evaluated on the instance.
pub fn misaligned_solution(inst: &Instance, ground: &Solution) -> Option<Solution> {
    opposite_bits(&inst.basis, ground.free_bits()).map(|bits| Solution::from_free_bits(&inst.reduced, &bits))
}
