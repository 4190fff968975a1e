use num_complex::Complex64;

use super::{sign_of, Recorder, ScenarioConfig, ScenarioResult, ANALYTIC_TOL};
use crate::error::Result;
use crate::hilbert::{Observable, StateVector};
use crate::measurement::{event_frequencies, MeasurementChain, ProjectiveMeasurement};

pub(super) const QUANTUM_ANCHOR: &str =
    "three-player game: local spin measurements on a correlated state always win";
pub(super) const CLASSICAL_ANCHOR: &str =
    "three-player game: no fixed answer table satisfies all four constraints";

/// Allowed question sets (one letter per player) and the product that wins.
pub const QUESTION_SETS: [(&str, i32); 4] = [("XXX", -1), ("XYY", 1), ("YXY", 1), ("YYX", 1)];

/// `(|↑↑↑⟩ − |↓↓↓⟩)/√2`, built by direct amplitude assignment.
pub fn ghz_state() -> StateVector {
    let mut amps = vec![Complex64::new(0.0, 0.0); 8];
    amps[0] = Complex64::new(1.0, 0.0);
    amps[7] = Complex64::new(-1.0, 0.0);
    StateVector::new(amps).expect("nonzero amplitudes")
}

fn local(question: char) -> Observable {
    match question {
        'X' => Observable::pauli_x(),
        'Y' => Observable::pauli_y(),
        other => unreachable!("question {other}"),
    }
}

fn product_observable(questions: &str) -> Observable {
    let mut chars = questions.chars();
    let first = local(chars.next().expect("three questions"));
    chars.fold(first, |acc, q| crate::hilbert::tensor_op(&acc, &local(q)))
}

pub fn scenario_ghz(cfg: &ScenarioConfig) -> Result<ScenarioResult> {
    let mut rec = Recorder::new("scenario_ghz", QUANTUM_ANCHOR, cfg);
    let psi = ghz_state();

    for (questions, target) in QUESTION_SETS {
        let op = product_observable(questions);
        let image = op.apply(&psi)?;
        let deviation = image
            .iter()
            .zip(psi.amplitudes())
            .map(|(a, b)| (a - b * target as f64).norm_sqr())
            .sum::<f64>()
            .sqrt();
        rec.analytic(
            format!("{questions}: state is a {target:+} eigenstate (residual norm)"),
            0.0,
            deviation,
            ANALYTIC_TOL,
        );

        let events = questions
            .chars()
            .enumerate()
            .map(|(site, q)| {
                let obs = local(q).embed(site, &[2, 2, 2])?;
                ProjectiveMeasurement::from_observable(format!("{q}_{site}"), &obs)
            })
            .collect::<Result<Vec<_>>>()?;
        let records = rec.run(&MeasurementChain::new(psi.clone(), events)?)?;
        let wins = records
            .iter()
            .filter(|r| r.outcomes.iter().map(|o| sign_of(o)).product::<i32>() == target)
            .count();
        rec.every_record(
            format!("{questions}: product of local answers is {target:+} in every record"),
            wins,
            records.len(),
        );
        if questions == "XXX" {
            let a = event_frequencies(&records, 0)?;
            rec.monte_carlo(
                "XXX: player A answers +1 half the time",
                0.5,
                a.count("+1"),
                a.retained,
            );
        }
    }
    Ok(rec.finish())
}

/// Exhaustive search over deterministic answer tables.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassicalBound {
    pub assignments: usize,
    pub max_satisfied: usize,
    /// Number of tables satisfying all four constraints.
    pub perfect: usize,
    /// Best win probability with the four question sets equally likely.
    pub max_win_probability: f64,
}

impl ClassicalBound {
    pub fn enumerate() -> Self {
        let mut max_satisfied = 0;
        let mut perfect = 0;
        for bits in 0u32..64 {
            // answers[player][0] = X answer, answers[player][1] = Y answer
            let answer = |player: usize, q: char| -> i32 {
                let bit = 2 * player + usize::from(q == 'Y');
                if bits >> bit & 1 == 1 {
                    -1
                } else {
                    1
                }
            };
            let satisfied = QUESTION_SETS
                .iter()
                .filter(|(qs, target)| {
                    qs.chars()
                        .enumerate()
                        .map(|(p, q)| answer(p, q))
                        .product::<i32>()
                        == *target
                })
                .count();
            max_satisfied = max_satisfied.max(satisfied);
            perfect += usize::from(satisfied == QUESTION_SETS.len());
        }
        Self {
            assignments: 64,
            max_satisfied,
            perfect,
            max_win_probability: max_satisfied as f64 / QUESTION_SETS.len() as f64,
        }
    }
}

pub fn ghz_classical_bound(cfg: &ScenarioConfig) -> ScenarioResult {
    let mut rec = Recorder::new("ghz_classical_bound", CLASSICAL_ANCHOR, cfg);
    let b = ClassicalBound::enumerate();
    rec.exhaustive("answer tables enumerated", 64.0, b.assignments as f64);
    rec.exhaustive(
        "tables satisfying all four constraints",
        0.0,
        b.perfect as f64,
    );
    rec.exhaustive("max constraints satisfied", 3.0, b.max_satisfied as f64);
    rec.exhaustive(
        "max win probability (uniform questions)",
        0.75,
        b.max_win_probability,
    );
    rec.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ghz_amplitudes() {
        let a = ghz_state();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((a.amplitudes()[0].re - h).abs() < 1e-15);
        assert!((a.amplitudes()[7].re + h).abs() < 1e-15);
    }

    #[test]
    fn classical_bound_matches_parity_argument() {
        // Product of all four left sides is a product of squares, the right sides multiply to -1.
        assert_eq!(QUESTION_SETS.iter().map(|q| q.1).product::<i32>(), -1);
        let b = ClassicalBound::enumerate();
        assert_eq!(b.perfect, 0);
        assert_eq!(b.max_satisfied, 3);
        assert_eq!(b.max_win_probability, 0.75);
    }

    #[test]
    fn quantum_strategy_always_wins() {
        let cfg = ScenarioConfig {
            trials: 10_000,
            ..ScenarioConfig::default()
        };
        let r = scenario_ghz(&cfg).unwrap();
        assert!(r.passed(), "{:#?}", r.failures().collect::<Vec<_>>());
        assert_eq!(
            r.checks
                .iter()
                .filter(|c| c.description.contains("every record"))
                .count(),
            4
        );
    }
}
