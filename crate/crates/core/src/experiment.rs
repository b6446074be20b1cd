//! Experiment plumbing: build instances, run protocols, check them against
//! the sequential skyline and format metric rows.

use std::fmt::{self, Write as _};
use std::path::PathBuf;
use std::str::FromStr;

use rayon::prelude::*;

use crate::baselines::{run_agids, run_fds, FdsParams};
use crate::coordsim::{Outcome, Transcript};
use crate::datagen::{gen_synthetic, ingest_csv, partition, CsvSpec, Distribution, GenSpec, PartitionScheme};
use crate::error::{Error, Result};
use crate::horizontal::{run_naive, run_optimal, run_sorted, run_tradeoff, TradeoffParams};
use crate::point::{skyline, Point, PointId};
use crate::vertical::{run_prune, run_vertical_naive, PruneParams, VerticalInstance};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Naive,
    Optimal,
    Tradeoff,
    Sorted,
    Prune,
    VerticalNaive,
    Agids,
    Fds,
}

impl Algorithm {
    pub const ALL: [Algorithm; 8] = [
        Algorithm::Naive,
        Algorithm::Optimal,
        Algorithm::Tradeoff,
        Algorithm::Sorted,
        Algorithm::Prune,
        Algorithm::VerticalNaive,
        Algorithm::Agids,
        Algorithm::Fds,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Naive => "naive",
            Algorithm::Optimal => "optimal",
            Algorithm::Tradeoff => "tradeoff",
            Algorithm::Sorted => "sorted",
            Algorithm::Prune => "prune",
            Algorithm::VerticalNaive => "vertical-naive",
            Algorithm::Agids => "agids",
            Algorithm::Fds => "fds",
        }
    }

    pub fn is_vertical(self) -> bool {
        matches!(self, Algorithm::Prune | Algorithm::VerticalNaive)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::parameter(format!("unknown algorithm {s:?}")))
    }
}

/// Protocol knobs. `rounds` defaults to 3 for the trade-off protocol and 8
/// for interactive pruning.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AlgParams {
    pub rounds: Option<usize>,
    pub rho: usize,
    pub grid: usize,
    pub kappa: usize,
    pub ell: usize,
    pub known_k: Option<usize>,
}

impl Default for AlgParams {
    fn default() -> Self {
        AlgParams { rounds: None, rho: 500, grid: 20, kappa: 1, ell: 1, known_k: None }
    }
}

impl AlgParams {
    fn tradeoff_rounds(&self) -> usize {
        self.rounds.unwrap_or(3)
    }

    fn prune_rounds(&self) -> usize {
        self.rounds.unwrap_or(8)
    }

    /// The `param` column for `alg`.
    pub fn describe(&self, alg: Algorithm) -> String {
        match alg {
            Algorithm::Tradeoff => match self.known_k {
                Some(k) => format!("r={};k={k}", self.tradeoff_rounds()),
                None => format!("r={}", self.tradeoff_rounds()),
            },
            Algorithm::Prune => format!("rho={};r={}", self.rho, self.prune_rounds()),
            Algorithm::Agids => format!("g={}", self.grid),
            Algorithm::Fds => format!("kappa={};ell={}", self.kappa, self.ell),
            Algorithm::Naive | Algorithm::Optimal | Algorithm::Sorted | Algorithm::VerticalNaive => "-".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum DataSource {
    Synthetic { kind: Distribution, n: usize },
    Csv { path: PathBuf, spec: CsvSpec },
}

impl DataSource {
    /// Generated points for `seed`; CSV data ignores the seed.
    pub fn load(&self, seed: u64) -> Result<Vec<Point>> {
        match self {
            DataSource::Synthetic { kind, n } => gen_synthetic(&GenSpec::new(*kind, *n, seed)),
            DataSource::Csv { path, spec } => Ok(ingest_csv(path, spec)?.points),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub data: DataSource,
    pub partition: PartitionScheme,
    pub s: usize,
    pub algorithms: Vec<Algorithm>,
    pub params: AlgParams,
    pub seed: u64,
    pub repeat: usize,
    /// Largest instance checked against the sequential skyline.
    pub verify_cap: usize,
    /// Report wall-clock times; otherwise the time columns are 0.
    pub timings: bool,
    pub keep_transcripts: bool,
}

impl RunConfig {
    pub fn new(data: DataSource, algorithms: Vec<Algorithm>) -> Self {
        RunConfig {
            data,
            partition: PartitionScheme::Random,
            s: 20,
            algorithms,
            params: AlgParams::default(),
            seed: 1,
            repeat: 1,
            verify_cap: 100_000,
            timings: false,
            keep_transcripts: false,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.algorithms.is_empty() {
            return Err(Error::parameter("no algorithm selected"));
        }
        if self.repeat == 0 {
            return Err(Error::parameter("repeat must be at least 1"));
        }
        if self.s == 0 {
            return Err(Error::parameter("s must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verified {
    Yes,
    No,
    Skipped,
}

impl fmt::Display for Verified {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verified::Yes => "true",
            Verified::No => "false",
            Verified::Skipped => "skipped",
        })
    }
}

/// One output line. Numeric columns are means over the repeats.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricRow {
    pub alg: Algorithm,
    pub param: String,
    pub words: f64,
    pub messages: f64,
    pub rounds: f64,
    pub recovered: f64,
    pub k: f64,
    pub coord_ms: f64,
    pub site_ms: f64,
    pub verified: Verified,
    pub words_max: u64,
    pub rounds_max: usize,
    /// `s · k · (n/s)^{1/⌈r/2⌉}` for trade-off sweeps.
    pub bound: Option<f64>,
}

impl MetricRow {
    pub fn bits(&self) -> f64 {
        self.words * 64.0
    }
}

/// An output that disagrees with the sequential skyline.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mismatch {
    pub alg: Algorithm,
    pub param: String,
    pub seed: u64,
    pub missing: Vec<PointId>,
    pub extra: Vec<PointId>,
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} ({}) seed {}: missing ids {:?}, unexpected ids {:?}",
            self.alg, self.param, self.seed, self.missing, self.extra
        )
    }
}

#[derive(Clone, Debug, Default)]
pub struct Experiment {
    pub rows: Vec<MetricRow>,
    pub mismatches: Vec<Mismatch>,
    /// `(label, transcript)` of the first repeat, when requested.
    pub transcripts: Vec<(String, Transcript)>,
    /// Instance size of the first repeat.
    pub n: usize,
    /// Rows average several seeded runs.
    pub repeated: bool,
}

impl Experiment {
    pub fn all_verified(&self) -> bool {
        self.mismatches.is_empty()
    }

    /// Comma-separated table with a header line.
    pub fn to_csv(&self) -> String {
        format_table(&self.rows, self.repeated)
    }
}

/// Runs one protocol on `points`.
pub fn run_algorithm(
    points: &[Point],
    alg: Algorithm,
    params: &AlgParams,
    scheme: PartitionScheme,
    s: usize,
    seed: u64,
) -> Result<Outcome> {
    if alg.is_vertical() {
        let instance = VerticalInstance::from_points(points)?;
        return match alg {
            Algorithm::Prune => run_prune(&instance, PruneParams::new(params.rho, params.prune_rounds())),
            _ => run_vertical_naive(&instance),
        };
    }
    let instance = partition(points, scheme, s, seed)?;
    match alg {
        Algorithm::Naive => run_naive(&instance),
        Algorithm::Optimal => run_optimal(&instance),
        Algorithm::Tradeoff => {
            let mut p = TradeoffParams::new(params.tradeoff_rounds());
            p.known_k = params.known_k;
            run_tradeoff(&instance, p)
        }
        Algorithm::Sorted => run_sorted(&instance),
        Algorithm::Agids => run_agids(&instance, params.grid),
        Algorithm::Fds => run_fds(&instance, FdsParams::new(params.kappa, params.ell)),
        Algorithm::Prune | Algorithm::VerticalNaive => unreachable!("handled above"),
    }
}

struct Sample {
    outcome: Outcome,
    mismatch: Option<(Vec<PointId>, Vec<PointId>)>,
    verified: Verified,
}

fn sample(
    points: &[Point],
    truth: Option<&[PointId]>,
    alg: Algorithm,
    cfg: &RunConfig,
    params: &AlgParams,
    s: usize,
    seed: u64,
) -> Result<Sample> {
    let outcome = run_algorithm(points, alg, params, cfg.partition, s, seed)?;
    let (verified, mismatch) = match truth {
        None => (Verified::Skipped, None),
        Some(truth) => {
            let got = outcome.skyline.ids();
            if got == truth {
                (Verified::Yes, None)
            } else {
                let missing = truth.iter().copied().filter(|id| got.binary_search(id).is_err()).collect();
                let extra = got.iter().copied().filter(|id| truth.binary_search(id).is_err()).collect();
                (Verified::No, Some((missing, extra)))
            }
        }
    };
    Ok(Sample { outcome, mismatch, verified })
}

/// A parameter that can be swept.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepParam {
    Rounds,
    Rho,
    Grid,
    Kappa,
    Ell,
    Sites,
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "r" | "rounds" => Ok(SweepParam::Rounds),
            "rho" => Ok(SweepParam::Rho),
            "grid" | "g" => Ok(SweepParam::Grid),
            "kappa" => Ok(SweepParam::Kappa),
            "ell" => Ok(SweepParam::Ell),
            "s" | "sites" => Ok(SweepParam::Sites),
            other => Err(Error::parameter(format!("cannot sweep {other:?}"))),
        }
    }
}

impl SweepParam {
    fn applies_to(self, alg: Algorithm) -> bool {
        match self {
            SweepParam::Rounds => matches!(alg, Algorithm::Tradeoff | Algorithm::Prune),
            SweepParam::Rho => alg == Algorithm::Prune,
            SweepParam::Grid => alg == Algorithm::Agids,
            SweepParam::Kappa | SweepParam::Ell => alg == Algorithm::Fds,
            SweepParam::Sites => !alg.is_vertical(),
        }
    }

    fn apply(self, params: &mut AlgParams, s: &mut usize, value: usize) {
        match self {
            SweepParam::Rounds => params.rounds = Some(value),
            SweepParam::Rho => params.rho = value,
            SweepParam::Grid => params.grid = value,
            SweepParam::Kappa => params.kappa = value,
            SweepParam::Ell => params.ell = value,
            SweepParam::Sites => *s = value,
        }
    }
}

type JobResult = (MetricRow, Vec<Mismatch>, Option<(String, Transcript)>);

struct Job {
    alg: Algorithm,
    params: AlgParams,
    s: usize,
    label: String,
    bound_r: Option<usize>,
}

fn execute(cfg: &RunConfig, jobs: Vec<Job>) -> Result<Experiment> {
    cfg.validate()?;
    let seeds: Vec<u64> = (0..cfg.repeat as u64).map(|i| cfg.seed.wrapping_add(i)).collect();
    let data: Vec<(Vec<Point>, Option<Vec<PointId>>)> = seeds
        .iter()
        .map(|&seed| {
            let points = cfg.data.load(seed)?;
            let truth = (points.len() <= cfg.verify_cap).then(|| skyline(&points).map(|s| s.ids())).transpose()?;
            Ok((points, truth))
        })
        .collect::<Result<_>>()?;
    let n = data[0].0.len();

    let results: Vec<Result<JobResult>> = jobs
        .par_iter()
        .map(|pt| {
            let mut samples = Vec::with_capacity(seeds.len());
            for (&seed, (points, truth)) in seeds.iter().zip(&data) {
                samples.push(sample(points, truth.as_deref(), pt.alg, cfg, &pt.params, pt.s, seed)?);
            }
            let count = samples.len() as f64;
            let mean = |f: &dyn Fn(&Sample) -> f64| samples.iter().map(f).sum::<f64>() / count;
            let ms = |d: std::time::Duration| if cfg.timings { d.as_secs_f64() * 1e3 } else { 0.0 };
            let verified = if samples.iter().any(|s| s.verified == Verified::No) {
                Verified::No
            } else if samples.iter().all(|s| s.verified == Verified::Yes) {
                Verified::Yes
            } else {
                Verified::Skipped
            };
            let k = mean(&|s| s.outcome.skyline.len() as f64);
            let row = MetricRow {
                alg: pt.alg,
                param: pt.label.clone(),
                words: mean(&|s| s.outcome.report.total_words as f64),
                messages: mean(&|s| s.outcome.report.total_messages as f64),
                rounds: mean(&|s| s.outcome.report.rounds as f64),
                recovered: mean(&|s| s.outcome.report.recovered_points as f64),
                k,
                coord_ms: mean(&|s| ms(s.outcome.report.coordinator_time)),
                site_ms: mean(&|s| ms(s.outcome.report.max_site_time)),
                verified,
                words_max: samples.iter().map(|s| s.outcome.report.total_words).max().unwrap_or(0),
                rounds_max: samples.iter().map(|s| s.outcome.report.rounds).max().unwrap_or(0),
                bound: pt.bound_r.map(|r| tradeoff_bound(pt.s, k, n, r)),
            };
            let mismatches = samples
                .iter()
                .zip(&seeds)
                .filter_map(|(s, &seed)| {
                    s.mismatch.clone().map(|(missing, extra)| Mismatch {
                        alg: pt.alg,
                        param: pt.label.clone(),
                        seed,
                        missing,
                        extra,
                    })
                })
                .collect();
            let transcript = cfg.keep_transcripts.then(|| {
                let label = if pt.label == "-" { pt.alg.to_string() } else { format!("{}-{}", pt.alg, pt.label) };
                (label, samples[0].outcome.transcript.clone())
            });
            Ok((row, mismatches, transcript))
        })
        .collect();

    let mut exp = Experiment { n, ..Default::default() };
    for r in results {
        let (row, mismatches, transcript) = r?;
        exp.rows.push(row);
        exp.mismatches.extend(mismatches);
        exp.transcripts.extend(transcript);
    }
    exp.repeated = cfg.repeat > 1;
    Ok(exp)
}

/// `s · k · (n/s)^{1/⌈r/2⌉}`.
pub fn tradeoff_bound(s: usize, k: f64, n: usize, r: usize) -> f64 {
    let s = s.max(1) as f64;
    s * k * (n as f64 / s).powf(1.0 / r.div_ceil(2).max(1) as f64)
}

/// One row per selected algorithm.
pub fn run_experiment(cfg: &RunConfig) -> Result<Experiment> {
    let jobs = cfg
        .algorithms
        .iter()
        .map(|&alg| Job { alg, params: cfg.params, s: cfg.s, label: cfg.params.describe(alg), bound_r: None })
        .collect();
    execute(cfg, jobs)
}

/// One row per `(algorithm, value)` for every selected algorithm the
/// parameter applies to.
pub fn sweep(cfg: &RunConfig, param: SweepParam, values: &[usize]) -> Result<Experiment> {
    if values.is_empty() {
        return Err(Error::parameter("a sweep needs at least one value"));
    }
    let mut jobs = Vec::new();
    for &alg in &cfg.algorithms {
        if !param.applies_to(alg) {
            return Err(Error::parameter(format!("{param:?} does not apply to {alg}")));
        }
        for &v in values {
            let mut params = cfg.params;
            let mut s = cfg.s;
            param.apply(&mut params, &mut s, v);
            let mut label = params.describe(alg);
            if param == SweepParam::Sites {
                label = if label == "-" { format!("s={s}") } else { format!("{label};s={s}") };
            }
            let bound_r = (alg == Algorithm::Tradeoff).then(|| params.tradeoff_rounds());
            jobs.push(Job { alg, params, s, label, bound_r });
        }
    }
    execute(cfg, jobs)
}

pub const HEADER: &str = "alg,param,words,bits,messages,rounds,recovered,k,coord_ms,site_ms,verified";

fn num(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v:.3}")
    }
}

/// Renders rows as comma-separated text. `repeats` adds the max columns; the
/// bound column appears when any row has a bound.
pub fn format_table(rows: &[MetricRow], repeats: bool) -> String {
    let bounds = rows.iter().any(|r| r.bound.is_some());
    let mut out = String::from(HEADER);
    if repeats {
        out.push_str(",words_max,rounds_max");
    }
    if bounds {
        out.push_str(",bound");
    }
    out.push('\n');
    for r in rows {
        let _ = write!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.alg,
            r.param,
            num(r.words),
            num(r.bits()),
            num(r.messages),
            num(r.rounds),
            num(r.recovered),
            num(r.k),
            num(r.coord_ms),
            num(r.site_ms),
            r.verified
        );
        if repeats {
            let _ = write!(out, ",{},{}", r.words_max, r.rounds_max);
        }
        if bounds {
            let _ = write!(out, ",{}", r.bound.map_or(String::new(), |b| format!("{b:.1}")));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(algs: &[Algorithm]) -> RunConfig {
        let mut cfg = RunConfig::new(DataSource::Synthetic { kind: Distribution::Indi, n: 2000 }, algs.to_vec());
        cfg.s = 5;
        cfg.params.rho = 50;
        cfg
    }

    #[test]
    fn every_algorithm_verifies() {
        let mut cfg = config(&[
            Algorithm::Naive,
            Algorithm::Optimal,
            Algorithm::Tradeoff,
            Algorithm::Prune,
            Algorithm::VerticalNaive,
            Algorithm::Agids,
            Algorithm::Fds,
        ]);
        cfg.keep_transcripts = true;
        let exp = run_experiment(&cfg).unwrap();
        assert!(exp.all_verified());
        assert!(exp.rows.iter().all(|r| r.verified == Verified::Yes));
        assert_eq!(exp.transcripts.len(), 7);
        assert_eq!(exp.transcripts[2].0, "tradeoff-r=3");
        let csv = exp.to_csv();
        assert!(csv.starts_with(HEADER));
        assert_eq!(csv.lines().count(), 8);
        assert!(csv.lines().nth(1).unwrap().ends_with(",0,0,true"));
    }

    #[test]
    fn sorted_needs_sorted_partition() {
        let mut cfg = config(&[Algorithm::Sorted]);
        assert!(matches!(run_experiment(&cfg), Err(Error::Precondition(_))));
        cfg.partition = PartitionScheme::Sorted;
        assert!(run_experiment(&cfg).unwrap().all_verified());
    }

    #[test]
    fn rows_are_deterministic() {
        let mut cfg = config(&[Algorithm::Tradeoff, Algorithm::Fds]);
        cfg.repeat = 3;
        let a = run_experiment(&cfg).unwrap().to_csv();
        let b = run_experiment(&cfg).unwrap().to_csv();
        assert_eq!(a, b);
        assert!(a.lines().next().unwrap().ends_with(",words_max,rounds_max"));
    }

    #[test]
    fn single_value_sweep_matches_run() {
        let mut cfg = config(&[Algorithm::Tradeoff]);
        cfg.params.rounds = Some(5);
        let run = run_experiment(&cfg).unwrap();
        let swept = sweep(&cfg, SweepParam::Rounds, &[5]).unwrap();
        let (a, b) = (&run.rows[0], &swept.rows[0]);
        assert_eq!((a.words, a.rounds, &a.param), (b.words, b.rounds, &b.param));
        assert!(b.bound.is_some());
        assert!(swept.to_csv().lines().next().unwrap().ends_with(",bound"));
    }

    #[test]
    fn sweep_rejects_unrelated_parameter() {
        let cfg = config(&[Algorithm::Naive]);
        assert!(sweep(&cfg, SweepParam::Rho, &[10]).is_err());
        assert!(sweep(&cfg, SweepParam::Sites, &[]).is_err());
        assert_eq!(sweep(&cfg, SweepParam::Sites, &[2, 4]).unwrap().rows[1].param, "s=4");
    }

    #[test]
    fn verification_cap() {
        let mut cfg = config(&[Algorithm::Naive]);
        cfg.verify_cap = 10;
        assert_eq!(run_experiment(&cfg).unwrap().rows[0].verified, Verified::Skipped);
    }

    #[test]
    fn names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
        assert!("bnl".parse::<Algorithm>().is_err());
        assert_eq!("rho".parse::<SweepParam>().unwrap(), SweepParam::Rho);
    }

    #[test]
    fn bound_formula() {
        // s k (n/s)^(1/2) with s = 4, k = 2, n = 400.
        assert!((tradeoff_bound(4, 2.0, 400, 3) - 80.0).abs() < 1e-9);
    }
}
