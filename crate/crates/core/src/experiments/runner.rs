//! Seeded trial runner and CSV emission.

use std::io::Write;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::generator::{add_noise, make_ground_truth};
use super::metrics::{match_and_score, s_error, Scores};
use crate::atds::{self, Branch};
use crate::cadzow::CadzowConfig;
use crate::error::{Error, Result};
use crate::shrt;
use crate::tuple::DEFAULT_SD_TOL;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Atds,
    Shrt,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Atds => "atds",
            Algorithm::Shrt => "shrt",
        }
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "atds" => Ok(Algorithm::Atds),
            "shrt" | "sh-rt" => Ok(Algorithm::Shrt),
            other => Err(Error::InvalidArgument(format!(
                "unknown algorithm '{other}'"
            ))),
        }
    }
}

pub const DEFAULT_THRESHOLDS: [f64; 3] = [1e-2, 1e-3, 1e-4];

/// One point of the experiment grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialConfig {
    pub n: usize,
    pub k: usize,
    pub snr_db: f64,
    pub kappa: f64,
    pub seed: u64,
    pub algorithm: Algorithm,
    /// Relative S-error targets, decreasing.
    pub thresholds: Vec<f64>,
    pub cadzow: CadzowConfig,
    pub tol: f64,
    pub shrt_max_updates: usize,
    pub shrt_rel_tol: f64,
    /// When false, every wall-clock field is written as 0 so output is reproducible byte for byte.
    pub record_timing: bool,
}

impl Default for TrialConfig {
    fn default() -> Self {
        Self {
            n: 5,
            k: 20,
            snr_db: 50.0,
            kappa: 5.0,
            seed: 0,
            algorithm: Algorithm::Atds,
            thresholds: DEFAULT_THRESHOLDS.to_vec(),
            cadzow: CadzowConfig::default(),
            tol: DEFAULT_SD_TOL,
            shrt_max_updates: shrt::DEFAULT_MAX_UPDATES,
            shrt_rel_tol: shrt::DEFAULT_REL_TOL,
            record_timing: true,
        }
    }
}

impl TrialConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 || self.k < 1 {
            return Err(Error::InvalidArgument("need n >= 2 and K >= 1".into()));
        }
        if !(self.kappa > 1.0) {
            return Err(Error::InvalidArgument(format!(
                "kappa must exceed 1, got {}",
                self.kappa
            )));
        }
        if self.snr_db.is_nan() {
            return Err(Error::InvalidArgument("snr_db is NaN".into()));
        }
        if self.thresholds.iter().any(|&t| !(t > 0.0))
            || self.thresholds.windows(2).any(|w| w[1] >= w[0])
        {
            return Err(Error::InvalidArgument(
                "thresholds must be positive and decreasing".into(),
            ));
        }
        Ok(())
    }
}

/// Whether and when a trial first met one S-error threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reach {
    pub threshold: f64,
    pub iterations: Option<usize>,
    pub wall_ms: Option<f64>,
}

impl Reach {
    pub fn reached(&self) -> bool {
        self.iterations.is_some()
    }
}

/// Outcome of one seeded trial.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    pub trial_id: usize,
    pub config: TrialConfig,
    pub branch: Option<Branch>,
    pub t_end: usize,
    pub final_scores: Option<Scores>,
    pub reach: Vec<Reach>,
    pub wall_ms: f64,
    /// Cadzow residual increases beyond `1e-12 * residual(0)` (ATDS only).
    pub cadzow_violations: usize,
    pub error: Option<String>,
}

impl ExperimentRecord {
    pub fn reach_for(&self, threshold: f64) -> Option<&Reach> {
        self.reach.iter().find(|r| r.threshold == threshold)
    }
}

/// Per-threshold aggregate over a batch.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdSummary {
    pub threshold: f64,
    pub success_rate: f64,
    pub mean_iterations: Option<f64>,
    pub median_iterations: Option<f64>,
    pub mean_wall_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchSummary {
    pub trials: usize,
    pub failed: usize,
    pub thresholds: Vec<ThresholdSummary>,
    pub mean_err_s: f64,
    pub mean_err_lambda: f64,
    pub mean_err_a: f64,
}

impl BatchSummary {
    pub fn for_threshold(&self, threshold: f64) -> Option<&ThresholdSummary> {
        self.thresholds.iter().find(|t| t.threshold == threshold)
    }
}

#[derive(Debug, Clone)]
pub struct TrialBatch {
    pub config: TrialConfig,
    pub records: Vec<ExperimentRecord>,
    pub summary: BatchSummary,
}

/// Per-trial generator: the master seed picks the key, the trial index picks the stream.
pub fn trial_rng(seed: u64, trial_id: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial_id as u64);
    rng
}

/// Stopwatch that excludes time spent scoring.
struct SolverClock {
    start: Instant,
    excluded: Duration,
    enabled: bool,
}

impl SolverClock {
    fn new(enabled: bool) -> Self {
        Self {
            start: Instant::now(),
            excluded: Duration::ZERO,
            enabled,
        }
    }

    fn exclude<T>(&mut self, f: impl FnOnce() -> T) -> T {
        let t0 = Instant::now();
        let out = f();
        self.excluded += t0.elapsed();
        out
    }

    fn ms(&self) -> f64 {
        if self.enabled {
            (self.start.elapsed().saturating_sub(self.excluded)).as_secs_f64() * 1e3
        } else {
            0.0
        }
    }
}

struct ReachTracker {
    reach: Vec<Reach>,
}

impl ReachTracker {
    fn new(thresholds: &[f64]) -> Self {
        Self {
            reach: thresholds
                .iter()
                .map(|&threshold| Reach {
                    threshold,
                    iterations: None,
                    wall_ms: None,
                })
                .collect(),
        }
    }

    fn done(&self) -> bool {
        self.reach.iter().all(Reach::reached)
    }

    fn update(&mut self, t: usize, err: f64, wall_ms: f64) {
        for r in &mut self.reach {
            if r.iterations.is_none() && err <= r.threshold {
                r.iterations = Some(t);
                r.wall_ms = Some(wall_ms);
            }
        }
    }
}

/// Runs trial `trial_id` of `cfg`.
pub fn run_trial(cfg: &TrialConfig, trial_id: usize) -> ExperimentRecord {
    let mut record = ExperimentRecord {
        trial_id,
        config: cfg.clone(),
        branch: None,
        t_end: 0,
        final_scores: None,
        reach: ReachTracker::new(&cfg.thresholds).reach,
        wall_ms: 0.0,
        cadzow_violations: 0,
        error: None,
    };
    if let Err(e) = run_trial_inner(cfg, trial_id, &mut record) {
        record.error = Some(e.to_string());
    }
    record
}

fn run_trial_inner(
    cfg: &TrialConfig,
    trial_id: usize,
    record: &mut ExperimentRecord,
) -> Result<()> {
    cfg.validate()?;
    let mut rng = trial_rng(cfg.seed, trial_id);
    let truth = make_ground_truth(cfg.n, cfg.k, cfg.kappa, &mut rng)?;
    let a = add_noise(&truth.a_star, cfg.snr_db, &mut rng)?;
    let mut tracker = ReachTracker::new(&cfg.thresholds);
    let mut clock = SolverClock::new(cfg.record_timing);

    match cfg.algorithm {
        Algorithm::Atds => {
            let outcome = atds::atds_solve_observed(&a, &cfg.cadzow, cfg.tol, |t, h| {
                if tracker.done() {
                    return;
                }
                if let Ok(est) = atds::estimate_from_iterate(&a, h, cfg.tol) {
                    let err = clock.exclude(|| s_error(&truth.s_star, &est.diagonalizer.s));
                    if let Some(err) = err {
                        tracker.update(t, err, clock.ms());
                    }
                }
            })?;
            record.wall_ms = clock.ms();
            record.branch = Some(outcome.branch);
            record.t_end = outcome.cadzow_trace.t_end;
            record.cadzow_violations = outcome.cadzow_trace.monotonicity_violations(1e-12).len();
            let (scores, _) = match_and_score(
                &truth.s_star,
                &outcome.s,
                &truth.lambdas_star,
                &outcome.lambdas,
                &a,
                &outcome.a_tilde,
            )?;
            record.final_scores = Some(scores);
        }
        Algorithm::Shrt => {
            let run =
                shrt::shrt_run_observed(&a, cfg.shrt_max_updates, cfg.shrt_rel_tol, |state| {
                    if tracker.done() {
                        return;
                    }
                    let s = state.s_complex();
                    let err = clock.exclude(|| s_error(&truth.s_star, &s));
                    if let Some(err) = err {
                        tracker.update(state.iteration, err, clock.ms());
                    }
                })?;
            record.wall_ms = clock.ms();
            record.t_end = run.updates;
            let a_tilde = run.result.reconstruct()?;
            let (scores, _) = match_and_score(
                &truth.s_star,
                &run.result.s,
                &truth.lambdas_star,
                &run.result.lambdas,
                &a,
                &a_tilde,
            )?;
            record.final_scores = Some(scores);
        }
    }
    record.reach = tracker.reach;
    Ok(())
}

fn mean(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

fn median(v: &[f64]) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let m = s.len() / 2;
    Some(if s.len() % 2 == 1 {
        s[m]
    } else {
        0.5 * (s[m - 1] + s[m])
    })
}

pub fn summarize(cfg: &TrialConfig, records: &[ExperimentRecord]) -> BatchSummary {
    let trials = records.len();
    let thresholds = cfg
        .thresholds
        .iter()
        .map(|&threshold| {
            let hits: Vec<&Reach> = records
                .iter()
                .filter_map(|r| r.reach_for(threshold))
                .filter(|r| r.reached())
                .collect();
            let iters: Vec<f64> = hits.iter().map(|r| r.iterations.unwrap() as f64).collect();
            let walls: Vec<f64> = hits.iter().filter_map(|r| r.wall_ms).collect();
            ThresholdSummary {
                threshold,
                success_rate: if trials == 0 {
                    0.0
                } else {
                    hits.len() as f64 / trials as f64
                },
                mean_iterations: mean(&iters),
                median_iterations: median(&iters),
                mean_wall_ms: mean(&walls),
            }
        })
        .collect();
    let scores: Vec<Scores> = records.iter().filter_map(|r| r.final_scores).collect();
    let avg =
        |f: fn(&Scores) -> f64| mean(&scores.iter().map(f).collect::<Vec<_>>()).unwrap_or(f64::NAN);
    BatchSummary {
        trials,
        failed: records.iter().filter(|r| r.error.is_some()).count(),
        thresholds,
        mean_err_s: avg(|s| s.err_s),
        mean_err_lambda: avg(|s| s.err_lambda),
        mean_err_a: avg(|s| s.err_a),
    }
}

/// Runs `n_trials` independent trials (in parallel) and aggregates them.
pub fn run_trials(cfg: &TrialConfig, n_trials: usize) -> Result<TrialBatch> {
    cfg.validate()?;
    if n_trials == 0 {
        return Err(Error::InvalidArgument("need at least one trial".into()));
    }
    let records: Vec<ExperimentRecord> = (0..n_trials)
        .into_par_iter()
        .map(|i| run_trial(cfg, i))
        .collect();
    let summary = summarize(cfg, &records);
    Ok(TrialBatch {
        config: cfg.clone(),
        records,
        summary,
    })
}

/// Grid over SNR x kappa x algorithm, all other fields taken from `base`.
pub fn sweep(
    base: &TrialConfig,
    snrs: &[f64],
    kappas: &[f64],
    algorithms: &[Algorithm],
    n_trials: usize,
) -> Result<Vec<TrialBatch>> {
    let mut out = Vec::new();
    for &kappa in kappas {
        for &snr_db in snrs {
            for &algorithm in algorithms {
                let cfg = TrialConfig {
                    snr_db,
                    kappa,
                    algorithm,
                    ..base.clone()
                };
                out.push(run_trials(&cfg, n_trials)?);
            }
        }
    }
    Ok(out)
}

/// Column label for a threshold: `1e-3` becomes `1e3`.
pub fn threshold_label(t: f64) -> String {
    let e = -t.log10();
    if (e - e.round()).abs() < 1e-9 {
        format!("1e{}", e.round() as i64)
    } else {
        format!("{t:e}")
    }
}

fn fmt_opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes the per-trial rows of every batch, then one `#summary` row per batch and threshold.
pub fn write_csv<W: Write>(out: W, batches: &[TrialBatch]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(out);
    let thresholds = batches
        .first()
        .map(|b| b.config.thresholds.clone())
        .unwrap_or_else(|| DEFAULT_THRESHOLDS.to_vec());
    let mut header: Vec<String> = [
        "trial_id",
        "algorithm",
        "n",
        "K",
        "snr_db",
        "kappa",
        "seed",
        "branch",
        "t_end",
        "err_S_final",
        "err_Lambda_final",
        "err_A_final",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    header.extend(
        thresholds
            .iter()
            .map(|&t| format!("reach_{}_iter", threshold_label(t))),
    );
    header.extend(
        thresholds
            .iter()
            .map(|&t| format!("reach_{}", threshold_label(t))),
    );
    header.push("wall_ms".into());
    w.write_record(&header).map_err(csv_err)?;

    for batch in batches {
        let c = &batch.config;
        for r in &batch.records {
            let branch = match (&r.error, r.branch) {
                (Some(_), _) => "error".to_string(),
                (None, Some(b)) => b.as_str().to_string(),
                (None, None) => String::new(),
            };
            let (es, el, ea) = r
                .final_scores
                .map(|s| {
                    (
                        s.err_s.to_string(),
                        s.err_lambda.to_string(),
                        s.err_a.to_string(),
                    )
                })
                .unwrap_or_default();
            let mut row = vec![
                r.trial_id.to_string(),
                c.algorithm.as_str().to_string(),
                c.n.to_string(),
                c.k.to_string(),
                c.snr_db.to_string(),
                c.kappa.to_string(),
                c.seed.to_string(),
                branch,
                r.t_end.to_string(),
                es,
                el,
                ea,
            ];
            row.extend(r.reach.iter().map(|x| fmt_opt(x.iterations)));
            row.extend(r.reach.iter().map(|x| (x.reached() as u8).to_string()));
            row.push(r.wall_ms.to_string());
            w.write_record(&row).map_err(csv_err)?;
        }
    }
    w.write_record([
        "#summary",
        "algorithm",
        "n",
        "K",
        "snr_db",
        "kappa",
        "trials",
        "threshold",
        "success_rate",
        "mean_iter",
        "median_iter",
        "mean_wall_ms",
        "mean_err_S_final",
        "mean_err_Lambda_final",
        "mean_err_A_final",
    ])
    .map_err(csv_err)?;
    for batch in batches {
        let c = &batch.config;
        let s = &batch.summary;
        for t in &s.thresholds {
            w.write_record([
                "#summary".to_string(),
                c.algorithm.as_str().to_string(),
                c.n.to_string(),
                c.k.to_string(),
                c.snr_db.to_string(),
                c.kappa.to_string(),
                s.trials.to_string(),
                t.threshold.to_string(),
                t.success_rate.to_string(),
                fmt_opt(t.mean_iterations),
                fmt_opt(t.median_iterations),
                fmt_opt(t.mean_wall_ms),
                s.mean_err_s.to_string(),
                s.mean_err_lambda.to_string(),
                s.mean_err_a.to_string(),
            ])
            .map_err(csv_err)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}
