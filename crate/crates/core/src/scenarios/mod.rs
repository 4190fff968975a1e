//! Executable catalog of worked examples. Every scenario returns analytic
//! values, Monte Carlo estimates from the measurement-chain oracle, and a
//! pass/fail verdict per check.

mod erasure;
mod ghz;
mod singlet;
mod spin;
mod three_box;

pub use erasure::{scenario_erasure, ERASURE_XI_DIRECTIONS};
pub use ghz::{ghz_classical_bound, ghz_state, scenario_ghz, ClassicalBound};
pub use singlet::{
    scenario_elements_of_reality_note, scenario_singlet_product_rule, scenario_two_time,
    singlet_state,
};
pub use spin::{
    scenario_sharp_shanks, scenario_xi_spin, sharp_shanks_closed_form, SharpShanksClosedForm,
    SHARP_SHANKS_CATALOG_ANGLES, XI_SPIN_CATALOG_ANGLES,
};
pub use three_box::{scenario_three_box, three_box_tsv};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hilbert::{Observable, StateVector};
use crate::measurement::{
    run_trials, ChainRecord, MeasurementChain, ProjectiveMeasurement, RngStream,
};
use crate::tsvf::{abl_distribution, weak_value, TwoStateVector};

/// Tolerance for checks that compare two analytic quantities.
pub const ANALYTIC_TOL: f64 = 1e-12;
/// Tolerance for weak value = certain eigenvalue.
pub const CERTAINTY_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub trials: u64,
    pub seed: u64,
    pub sigma: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            trials: 100_000,
            seed: 42,
            sigma: 4.0,
        }
    }
}

/// `sigma·sqrt(p(1−p)/n)`, floored at `5/n` so certainty claims keep a nonzero width.
pub fn binomial_tolerance(p: f64, n: usize, sigma: f64) -> f64 {
    let n = n as f64;
    let p = p.clamp(0.0, 1.0);
    (sigma * (p * (1.0 - p) / n).sqrt()).max(5.0 / n)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Quantity {
    Real(f64),
    Complex { re: f64, im: f64 },
}

impl Quantity {
    fn as_complex(self) -> Complex64 {
        match self {
            Quantity::Real(x) => Complex64::new(x, 0.0),
            Quantity::Complex { re, im } => Complex64::new(re, im),
        }
    }

    pub fn distance(self, other: Quantity) -> f64 {
        (self.as_complex() - other.as_complex()).norm()
    }
}

impl From<f64> for Quantity {
    fn from(x: f64) -> Self {
        Quantity::Real(x)
    }
}

impl From<Complex64> for Quantity {
    fn from(z: Complex64) -> Self {
        Quantity::Complex { re: z.re, im: z.im }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    /// Two analytic quantities compared at a fixed tolerance.
    Analytic,
    /// Analytic probability against a Monte Carlo frequency.
    MonteCarlo,
    /// Result of an exhaustive enumeration.
    Exhaustive,
    /// Recorded, never fails.
    Note,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub description: String,
    pub kind: CheckKind,
    pub analytic: Quantity,
    pub estimate: Option<Quantity>,
    pub tolerance: f64,
    pub passed: bool,
    /// Monte Carlo trials behind the estimate (0 for analytic checks).
    pub trials: u64,
    /// Samples the frequency was computed from, after post-selection.
    pub retained: Option<usize>,
    pub seed: u64,
    pub anchor: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScenarioResult {
    pub name: String,
    pub anchor: String,
    pub trials: u64,
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl ScenarioResult {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, description_prefix: &str) -> Option<&Check> {
        self.checks
            .iter()
            .find(|c| c.description.starts_with(description_prefix))
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Accumulates checks for one scenario and hands out Monte Carlo seeds.
pub(crate) struct Recorder {
    cfg: ScenarioConfig,
    result: ScenarioResult,
    runs: u64,
}

impl Recorder {
    pub(crate) fn new(name: &str, anchor: &str, cfg: &ScenarioConfig) -> Self {
        Self {
            cfg: *cfg,
            result: ScenarioResult {
                name: name.to_string(),
                anchor: anchor.to_string(),
                trials: cfg.trials,
                seed: cfg.seed,
                checks: Vec::new(),
            },
            runs: 0,
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn push(
        &mut self,
        description: String,
        kind: CheckKind,
        analytic: Quantity,
        estimate: Option<Quantity>,
        tolerance: f64,
        passed: bool,
        trials: u64,
        retained: Option<usize>,
    ) {
        self.result.checks.push(Check {
            description,
            kind,
            analytic,
            estimate,
            tolerance,
            passed,
            trials,
            retained,
            seed: self.cfg.seed,
            anchor: self.result.anchor.clone(),
        });
    }

    pub(crate) fn analytic(
        &mut self,
        description: impl Into<String>,
        expected: impl Into<Quantity>,
        computed: impl Into<Quantity>,
        tolerance: f64,
    ) {
        let (a, e) = (expected.into(), computed.into());
        let passed = a.distance(e) <= tolerance;
        self.push(
            description.into(),
            CheckKind::Analytic,
            a,
            Some(e),
            tolerance,
            passed,
            0,
            None,
        );
    }

    /// Frequency `count/n` against probability `p` at the configured sigma.
    pub(crate) fn monte_carlo(
        &mut self,
        description: impl Into<String>,
        p: f64,
        count: usize,
        n: usize,
    ) {
        let freq = count as f64 / n as f64;
        let tol = binomial_tolerance(p, n, self.cfg.sigma);
        let passed = (p - freq).abs() <= tol;
        let trials = self.cfg.trials;
        self.push(
            description.into(),
            CheckKind::MonteCarlo,
            p.into(),
            Some(freq.into()),
            tol,
            passed,
            trials,
            Some(n),
        );
    }

    /// A property that must hold in every one of `n` records.
    pub(crate) fn every_record(&mut self, description: impl Into<String>, hits: usize, n: usize) {
        let freq = hits as f64 / n as f64;
        let trials = self.cfg.trials;
        self.push(
            description.into(),
            CheckKind::MonteCarlo,
            1.0.into(),
            Some(freq.into()),
            0.0,
            hits == n && n > 0,
            trials,
            Some(n),
        );
    }

    pub(crate) fn exhaustive(&mut self, description: impl Into<String>, expected: f64, found: f64) {
        self.push(
            description.into(),
            CheckKind::Exhaustive,
            expected.into(),
            Some(found.into()),
            0.0,
            expected == found,
            0,
            None,
        );
    }

    pub(crate) fn note(&mut self, description: impl Into<String>, value: f64) {
        self.push(
            description.into(),
            CheckKind::Note,
            value.into(),
            None,
            0.0,
            true,
            0,
            None,
        );
    }

    /// Runs a chain on the next derived seed.
    pub(crate) fn run(&mut self, chain: &MeasurementChain) -> Result<Vec<ChainRecord>> {
        let seed = RngStream::derive_seed(self.cfg.seed, self.runs);
        self.runs += 1;
        run_trials(chain, seed, self.cfg.trials)
    }

    pub(crate) fn finish(self) -> ScenarioResult {
        self.result
    }
}

pub(crate) fn sigma(obs: &Observable, label: &str) -> Result<ProjectiveMeasurement> {
    ProjectiveMeasurement::from_observable(label, obs)
}

/// `+1`/`-1` labels as numbers.
pub(crate) fn sign_of(label: &str) -> i32 {
    match label {
        "+1" => 1,
        "-1" => -1,
        other => panic!("not a ±1 outcome label: {other}"),
    }
}

pub(crate) fn up_z() -> StateVector {
    StateVector::basis(2, 0)
}

/// ABL probability at or above this counts as certain.
pub(crate) const CERTAIN: f64 = 1.0 - 1e-12;

/// For every outcome of `m` that ABL makes certain, checks that the weak
/// value of the measured observable equals its eigenvalue.
pub(crate) fn certainty_into(
    rec: &mut Recorder,
    tsv: &TwoStateVector,
    m: &ProjectiveMeasurement,
) -> Result<()> {
    let table = abl_distribution(tsv, m)?;
    for (o, &p) in m.outcomes().iter().zip(&table) {
        if p >= CERTAIN {
            let wv = weak_value(tsv, &m.observable())?;
            rec.analytic(
                format!(
                    "certainty theorem: ({})_w equals certain value {}",
                    m.label(),
                    o.label
                ),
                Complex64::new(o.eigenvalue, 0.0),
                wv.value(),
                CERTAINTY_TOL,
            );
        }
    }
    Ok(())
}

/// Catalog entry: a stable snake_case name and the function that runs it.
pub struct CatalogEntry {
    pub name: &'static str,
    pub description: &'static str,
    pub anchor: &'static str,
    pub run: fn(&ScenarioConfig) -> Result<ScenarioResult>,
}

static CATALOG: &[CatalogEntry] = &[
    CatalogEntry {
        name: "ghz_classical_bound",
        description: "exhaustive search over the 64 deterministic answer tables of the GHZ game",
        anchor: ghz::CLASSICAL_ANCHOR,
        run: |cfg| Ok(ghz_classical_bound(cfg)),
    },
    CatalogEntry {
        name: "scenario_elements_of_reality_note",
        description:
            "grid search for a post-selection certifying sigma_x, sigma_y, sigma_z at once",
        anchor: singlet::ELEMENTS_ANCHOR,
        run: scenario_elements_of_reality_note,
    },
    CatalogEntry {
        name: "scenario_erasure",
        description:
            "Bell-measurement erasure of the past restores prediction/retrodiction symmetry",
        anchor: erasure::ANCHOR,
        run: scenario_erasure,
    },
    CatalogEntry {
        name: "scenario_ghz",
        description: "quantum strategy wins every allowed GHZ question set",
        anchor: ghz::QUANTUM_ANCHOR,
        run: scenario_ghz,
    },
    CatalogEntry {
        name: "scenario_sharp_shanks",
        description: "three consecutive spin measurements: decomposition over final outcomes",
        anchor: spin::SHARP_SHANKS_ANCHOR,
        run: spin::sharp_shanks_catalog,
    },
    CatalogEntry {
        name: "scenario_singlet_product_rule",
        description:
            "singlet post-selected on |up_x>|up_y>: certain values violate the product rule",
        anchor: singlet::PRODUCT_RULE_ANCHOR,
        run: scenario_singlet_product_rule,
    },
    CatalogEntry {
        name: "scenario_three_box",
        description: "three-box paradox: certain openings, weak values, pointer convergence",
        anchor: three_box::ANCHOR,
        run: scenario_three_box,
    },
    CatalogEntry {
        name: "scenario_two_time",
        description: "singlet sum relations and two-time counterfactual statements",
        anchor: singlet::TWO_TIME_ANCHOR,
        run: scenario_two_time,
    },
    CatalogEntry {
        name: "scenario_xi_spin",
        description: "tilted spin between identical pre- and post-selection: Born vs ABL",
        anchor: spin::XI_SPIN_ANCHOR,
        run: spin::xi_spin_catalog,
    },
];

/// All scenarios, alphabetical by name.
pub fn catalog() -> &'static [CatalogEntry] {
    CATALOG
}

pub fn scenario_names() -> Vec<&'static str> {
    CATALOG.iter().map(|e| e.name).collect()
}

pub fn find(name: &str) -> Result<&'static CatalogEntry> {
    CATALOG
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::UnknownScenario {
            name: name.to_string(),
            valid: scenario_names().join(", "),
        })
}

pub fn run_scenario(name: &str, cfg: &ScenarioConfig) -> Result<ScenarioResult> {
    (find(name)?.run)(cfg)
}
