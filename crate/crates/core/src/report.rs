//! Run configuration, report rendering, and the commands behind `tsvf-lab`.

use std::fmt::Write as _;
use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hilbert::StateVector;
use crate::measurement::{
    post_selected_frequencies, run_trials, MeasurementChain, ProjectiveMeasurement, RngStream,
};
use crate::random::{random_hermitian, random_measurement, random_state};
use crate::scenarios::{
    binomial_tolerance, catalog, find, CheckKind, Quantity, ScenarioConfig, ScenarioResult,
};
use crate::tsvf::{
    abl_distribution, decomposition_check, time_reverse, weak_value, TwoStateVector,
};

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "TSVF_LAB_THREADS";
pub const MIN_TRIALS: u64 = 100;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Text,
    Json,
    Csv,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    /// Scenario names; empty or `["all"]` selects the whole catalog.
    pub scenarios: Vec<String>,
    pub trials: u64,
    pub seed: u64,
    pub format: Format,
    pub sigma: f64,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let s = ScenarioConfig::default();
        Self {
            scenarios: vec!["all".to_string()],
            trials: s.trials,
            seed: s.seed,
            format: Format::Text,
            sigma: s.sigma,
            out: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials < MIN_TRIALS {
            return Err(Error::InvalidConfig(format!(
                "trials must be at least {MIN_TRIALS}, got {}",
                self.trials
            )));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "sigma must be positive, got {}",
                self.sigma
            )));
        }
        Ok(())
    }

    /// Catalog names this configuration selects, in the order given.
    pub fn resolved_names(&self) -> Result<Vec<&'static str>> {
        if self.scenarios.is_empty() || self.scenarios.iter().any(|s| s == "all") {
            return Ok(catalog().iter().map(|e| e.name).collect());
        }
        self.scenarios
            .iter()
            .map(|s| find(s).map(|e| e.name))
            .collect()
    }

    pub fn scenario_config(&self) -> ScenarioConfig {
        ScenarioConfig {
            trials: self.trials,
            seed: self.seed,
            sigma: self.sigma,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub version: &'static str,
    pub config: RunConfig,
    pub results: Vec<ScenarioResult>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.results.iter().all(ScenarioResult::passed)
    }

    pub fn check_count(&self) -> (usize, usize) {
        let total = self.results.iter().map(|r| r.checks.len()).sum();
        let passed = self
            .results
            .iter()
            .flat_map(|r| &r.checks)
            .filter(|c| c.passed)
            .count();
        (passed, total)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.results {
            let _ = writeln!(
                out,
                "== {} [{}]  trials={} seed={}",
                r.name,
                verdict(r.passed()),
                r.trials,
                r.seed
            );
            let _ = writeln!(out, "   {}", r.anchor);
            for c in &r.checks {
                let _ = write!(
                    out,
                    "  {}  {}: analytic={}",
                    verdict(c.passed),
                    c.description,
                    fmt_quantity(c.analytic)
                );
                if let Some(e) = c.estimate {
                    let _ = write!(out, " estimate={} tol={:.2e}", fmt_quantity(e), c.tolerance);
                }
                if let Some(n) = c.retained {
                    let _ = write!(out, " n={n}");
                }
                if c.kind == CheckKind::Note {
                    out.push_str(" (note)");
                }
                out.push('\n');
            }
        }
        let (passed, total) = self.check_count();
        let _ = writeln!(
            out,
            "{passed}/{total} checks passed: {}",
            verdict(self.passed())
        );
        out
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.results {
            for c in &r.checks {
                let (are, aim) = parts(c.analytic);
                let (ere, eim) = c.estimate.map_or((None, None), |e| {
                    let (re, im) = parts(e);
                    (Some(re), Some(im))
                });
                w.serialize(CsvRow {
                    scenario: &r.name,
                    description: &c.description,
                    kind: c.kind,
                    analytic_re: are,
                    analytic_im: aim,
                    estimate_re: ere,
                    estimate_im: eim,
                    tolerance: c.tolerance,
                    passed: c.passed,
                    trials: c.trials,
                    retained: c.retained,
                    seed: c.seed,
                    anchor: &c.anchor,
                })
                .map_err(|e| Error::Io(e.to_string()))?;
            }
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Text => Ok(self.to_text()),
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
        }
    }
}

#[derive(Serialize)]
struct CsvRow<'a> {
    scenario: &'a str,
    description: &'a str,
    kind: CheckKind,
    analytic_re: f64,
    analytic_im: f64,
    estimate_re: Option<f64>,
    estimate_im: Option<f64>,
    tolerance: f64,
    passed: bool,
    trials: u64,
    retained: Option<usize>,
    seed: u64,
    anchor: &'a str,
}

fn verdict(passed: bool) -> &'static str {
    if passed {
        "PASS"
    } else {
        "FAIL"
    }
}

fn parts(q: Quantity) -> (f64, f64) {
    match q {
        Quantity::Real(x) => (x, 0.0),
        Quantity::Complex { re, im } => (re, im),
    }
}

fn fmt_quantity(q: Quantity) -> String {
    match q {
        Quantity::Real(x) => format!("{x:.6}"),
        Quantity::Complex { re, im: 0.0 } => format!("{re:.6}"),
        Quantity::Complex { re, im } => format!("{re:.6}{im:+.6}i"),
    }
}

/// Runs `f` on a pool capped by [`THREADS_ENV`], or on the global pool.
fn with_pool<T: Send>(f: impl FnOnce() -> T + Send) -> Result<T> {
    match std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
    {
        Some(n) if n > 0 => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::InvalidConfig(e.to_string()))?;
            Ok(pool.install(f))
        }
        _ => Ok(f()),
    }
}

/// Runs the selected scenarios in parallel and assembles the report in catalog order.
pub fn execute(cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    let names = cfg.resolved_names()?;
    let scfg = cfg.scenario_config();
    let results = with_pool(|| {
        names
            .par_iter()
            .map(|name| (find(name)?.run)(&scfg))
            .collect::<Result<Vec<_>>>()
    })??;
    Ok(Report {
        version: env!("CARGO_PKG_VERSION"),
        config: RunConfig {
            scenarios: names.iter().map(|s| s.to_string()).collect(),
            ..cfg.clone()
        },
        results,
    })
}

/// What `tsvf-lab run` produced.
#[derive(Debug)]
pub struct RunOutcome {
    pub report: Report,
    pub rendered: String,
}

impl RunOutcome {
    /// 0 when every check passed, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        u8::from(!self.report.passed())
    }
}

/// Runs, renders, and writes to `cfg.out` when set.
pub fn cmd_run(cfg: &RunConfig) -> Result<RunOutcome> {
    let report = execute(cfg)?;
    let rendered = report.render(cfg.format)?;
    if let Some(path) = &cfg.out {
        std::fs::write(path, &rendered)
            .map_err(|e| Error::Io(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(RunOutcome { report, rendered })
}

pub fn cmd_list() -> String {
    let width = catalog().iter().map(|e| e.name.len()).max().unwrap_or(0);
    let mut out = String::new();
    for e in catalog() {
        let _ = writeln!(out, "{:width$}  {}", e.name, e.description);
        let _ = writeln!(out, "{:width$}  [{}]", "", e.anchor);
    }
    out
}

/// ABL implementation under test; swapped out to check the selftest catches mistakes.
pub type AblFn = fn(&TwoStateVector, &ProjectiveMeasurement) -> Result<Vec<f64>>;

pub const SELFTEST_TRIALS: u64 = 20_000;
pub const SELFTEST_SIGMA: f64 = 4.0;
const SWAP_TOL: f64 = 1e-12;
const DECOMPOSITION_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteResult {
    pub name: &'static str,
    pub instances: usize,
    pub failures: usize,
    /// Largest deviation seen, in units of the suite's tolerance.
    pub worst_ratio: f64,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub suites: Vec<SuiteResult>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(SuiteResult::passed)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for s in &self.suites {
            let _ = writeln!(
                out,
                "{}  {:<26} {} instances, {} failures, worst deviation {:.3} x tolerance",
                verdict(s.passed()),
                s.name,
                s.instances,
                s.failures,
                s.worst_ratio
            );
        }
        let _ = writeln!(
            out,
            "selftest seed={}: {}",
            self.seed,
            verdict(self.passed())
        );
        out
    }
}

struct Tally {
    name: &'static str,
    instances: usize,
    failures: usize,
    worst: f64,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            instances: 0,
            failures: 0,
            worst: 0.0,
        }
    }

    fn observe(&mut self, deviation: f64, tolerance: f64) {
        let ratio = deviation / tolerance;
        if ratio.is_nan() || ratio > 1.0 {
            self.failures += 1;
        }
        self.worst = self
            .worst
            .max(if ratio.is_nan() { f64::INFINITY } else { ratio });
    }

    fn done(self) -> SuiteResult {
        SuiteResult {
            name: self.name,
            instances: self.instances,
            failures: self.failures,
            worst_ratio: self.worst,
        }
    }
}

fn suite_rng(seed: u64, tag: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(RngStream::derive_seed(seed, tag))
}

fn random_instance(rng: &mut ChaCha8Rng) -> (usize, StateVector, StateVector) {
    use rand::Rng;
    let dim = rng.random_range(2..=4);
    (dim, random_state(rng, dim), random_state(rng, dim))
}

fn random_levels(rng: &mut ChaCha8Rng, dim: usize) -> usize {
    use rand::Rng;
    rng.random_range(2..=dim)
}

fn oracle_suite(seed: u64, abl: AblFn) -> Result<SuiteResult> {
    let mut rng = suite_rng(seed, 1);
    let mut t = Tally::new("oracle equivalence");
    for i in 0..50 {
        let (dim, pre, post) = random_instance(&mut rng);
        let levels = random_levels(&mut rng, dim);
        let m = random_measurement(&mut rng, "m", dim, levels);
        let tsv = TwoStateVector::new(pre.clone(), post.clone())?;
        let table = abl(&tsv, &m)?;
        let fin = ProjectiveMeasurement::onto_state("post", &post, "yes", "no")?;
        let chain = MeasurementChain::new(pre, vec![m.clone(), fin])?;
        let records = run_trials(
            &chain,
            RngStream::derive_seed(seed, 1000 + i),
            SELFTEST_TRIALS,
        )?;
        let f = post_selected_frequencies(&records, 1, "yes", 0)?;
        t.instances += 1;
        for (o, p) in m.outcomes().iter().zip(&table) {
            let tol = binomial_tolerance(*p, f.retained, SELFTEST_SIGMA);
            t.observe((f.frequency(&o.label) - p).abs(), tol);
        }
    }
    Ok(t.done())
}

fn decomposition_suite(seed: u64) -> Result<SuiteResult> {
    let mut rng = suite_rng(seed, 2);
    let mut t = Tally::new("decomposition identity");
    for _ in 0..100 {
        let (dim, pre, _) = random_instance(&mut rng);
        let (l1, l2) = (random_levels(&mut rng, dim), random_levels(&mut rng, dim));
        let mid = random_measurement(&mut rng, "mid", dim, l1);
        let fin = random_measurement(&mut rng, "fin", dim, l2);
        let label = mid.outcomes()[0].label.clone();
        let d = decomposition_check(&pre, &mid, &fin, &label)?;
        t.instances += 1;
        t.observe((d.lhs - d.rhs).abs(), DECOMPOSITION_TOL);
    }
    Ok(t.done())
}

fn swap_suite(seed: u64, abl: AblFn) -> Result<SuiteResult> {
    let mut rng = suite_rng(seed, 3);
    let mut t = Tally::new("swap symmetry");
    for _ in 0..50 {
        let (dim, pre, post) = random_instance(&mut rng);
        let levels = random_levels(&mut rng, dim);
        let m = random_measurement(&mut rng, "m", dim, levels);
        let a = random_hermitian(&mut rng, dim);
        let tsv = TwoStateVector::new(pre, post)?;
        let rev = time_reverse(&tsv);
        t.instances += 1;
        for (p, q) in abl(&tsv, &m)?.iter().zip(abl(&rev, &m)?) {
            t.observe((p - q).abs(), SWAP_TOL);
        }
        let (w, wr) = (weak_value(&tsv, &a)?.value(), weak_value(&rev, &a)?.value());
        t.observe((w - wr.conj()).norm(), SWAP_TOL * w.norm().max(1.0));
    }
    Ok(t.done())
}

fn linearity_suite(seed: u64) -> Result<SuiteResult> {
    let mut rng = suite_rng(seed, 4);
    let mut t = Tally::new("weak-value linearity");
    for _ in 0..50 {
        let (dim, pre, post) = random_instance(&mut rng);
        let tsv = TwoStateVector::new(pre, post)?;
        let (a, b) = (
            random_hermitian(&mut rng, dim),
            random_hermitian(&mut rng, dim),
        );
        let (wa, wb, wab) = (
            weak_value(&tsv, &a)?.value(),
            weak_value(&tsv, &b)?.value(),
            weak_value(&tsv, &(&a + &b))?.value(),
        );
        t.instances += 1;
        t.observe(
            (wab - wa - wb).norm(),
            SWAP_TOL * (wa.norm() + wb.norm()).max(1.0),
        );
    }
    Ok(t.done())
}

/// Property suites over random instances of dimension 2 to 4, with `abl` as the ABL rule.
pub fn selftest_with(seed: u64, abl: AblFn) -> Result<SelftestReport> {
    Ok(SelftestReport {
        seed,
        suites: vec![
            oracle_suite(seed, abl)?,
            decomposition_suite(seed)?,
            swap_suite(seed, abl)?,
            linearity_suite(seed)?,
        ],
    })
}

pub fn cmd_selftest(seed: u64) -> Result<SelftestReport> {
    with_pool(|| selftest_with(seed, abl_distribution))?
}
