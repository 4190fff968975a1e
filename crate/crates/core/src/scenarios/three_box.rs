use num_complex::Complex64;

use super::{certainty_into, Recorder, ScenarioConfig, ScenarioResult, ANALYTIC_TOL};
use crate::error::Result;
use crate::hilbert::{Matrix, Observable, StateVector};
use crate::measurement::{post_selected_frequencies, MeasurementChain, ProjectiveMeasurement};
use crate::tsvf::{abl_distribution, abl_prob, weak_value, TwoStateVector};
use crate::weakpointer::{
    weak_convergence_report, PointerModel, DEFAULT_G0_OVER_WIDTH, DEFAULT_HALVINGS,
};

pub(super) const ANCHOR: &str =
    "particle in three boxes: certain openings of A and B, negative weak value in C";

const BOXES: [&str; 3] = ["A", "B", "C"];
/// Trapezoid-rule accuracy of the pointer mean on the default grid.
const QUADRATURE_TOL: f64 = 1e-8;

/// Pre-selected in `(|A⟩ + |B⟩ + |C⟩)/√3`, post-selected in `(|A⟩ + |B⟩ − |C⟩)/√3`.
pub fn three_box_tsv() -> TwoStateVector {
    let pre = StateVector::from_real(&[1.0, 1.0, 1.0]).expect("nonzero");
    let post = StateVector::from_real(&[1.0, 1.0, -1.0]).expect("nonzero");
    TwoStateVector::new(pre, post).expect("same dimension")
}

fn box_projector(k: usize) -> Matrix {
    Matrix::outer(StateVector::basis(3, k).amplitudes())
}

fn open_box(k: usize) -> Result<ProjectiveMeasurement> {
    let name = BOXES[k];
    ProjectiveMeasurement::binary(
        format!("open {name}"),
        &box_projector(k),
        format!("in {name}"),
        format!("not {name}"),
    )
}

pub fn scenario_three_box(cfg: &ScenarioConfig) -> Result<ScenarioResult> {
    let mut rec = Recorder::new("scenario_three_box", ANCHOR, cfg);
    let tsv = three_box_tsv();
    let finale = ProjectiveMeasurement::onto_state("final", tsv.post(), "yes", "no")?;

    for (k, name) in BOXES.iter().enumerate().take(2) {
        let m = open_box(k)?;
        rec.analytic(
            format!("ABL Prob(in {name} | open {name}) = 1"),
            1.0,
            abl_prob(&tsv, &m, &format!("in {name}"))?,
            ANALYTIC_TOL,
        );
        certainty_into(&mut rec, &tsv, &m)?;

        let chain = MeasurementChain::new(tsv.pre().clone(), vec![m, finale.clone()])?;
        let records = rec.run(&chain)?;
        let f = post_selected_frequencies(&records, 1, "yes", 0)?;
        rec.every_record(
            format!("opening {name}: particle found in {name} in every post-selected record"),
            f.count(&format!("in {name}")),
            f.retained,
        );
        rec.monte_carlo(
            format!("opening {name}: post-selection yield 1/9"),
            1.0 / 9.0,
            f.retained,
            f.total,
        );
    }

    let basis: Vec<(&str, f64, StateVector)> = (0..3)
        .map(|k| (BOXES[k], k as f64, StateVector::basis(3, k)))
        .collect();
    let all = ProjectiveMeasurement::from_basis("which box", &basis)?;
    let table = abl_distribution(&tsv, &all)?;
    rec.analytic(
        "full box measurement: ABL probabilities sum to 1",
        1.0,
        table.iter().sum::<f64>(),
        ANALYTIC_TOL,
    );
    for (k, p) in table.iter().enumerate() {
        rec.analytic(
            format!("full box measurement: ABL Prob({}) = 1/3", BOXES[k]),
            1.0 / 3.0,
            *p,
            ANALYTIC_TOL,
        );
    }
    let chain = MeasurementChain::new(tsv.pre().clone(), vec![all, finale])?;
    let records = rec.run(&chain)?;
    let f = post_selected_frequencies(&records, 1, "yes", 0)?;
    for name in BOXES {
        rec.monte_carlo(
            format!("full box measurement: post-selected frequency of {name}"),
            1.0 / 3.0,
            f.count(name),
            f.retained,
        );
    }

    let p = |k: usize| Observable::new(box_projector(k)).expect("projector is Hermitian");
    let sum = &(&p(0) + &p(1)) + &p(2);
    for (obs, name, expected) in [
        (p(0), "P_A", 1.0),
        (p(1), "P_B", 1.0),
        (sum, "P_A + P_B + P_C", 1.0),
        (p(2), "P_C", -1.0),
    ] {
        rec.analytic(
            format!("weak value ({name})_w = {expected:+}"),
            Complex64::new(expected, 0.0),
            weak_value(&tsv, &obs)?.value(),
            ANALYTIC_TOL,
        );
    }

    let width = 1.0;
    let pc = p(2);
    let pm = PointerModel::for_observable(DEFAULT_G0_OVER_WIDTH * width, width, &pc)?;
    let report = weak_convergence_report(&tsv, &pc, &pm, DEFAULT_HALVINGS)?;
    let last = report.points.last().expect("at least one coupling");
    rec.analytic(
        format!(
            "pointer mean/g for P_C at g = {:.6} width approaches -1",
            last.coupling / width
        ),
        -1.0,
        last.mean_over_coupling,
        report.threshold(),
    );
    rec.exhaustive(
        "pointer error |mean/g + 1| non-increasing as g halves",
        1.0,
        f64::from(u8::from(report.is_monotone())),
    );
    // Closed form for this case: mean/g = (1 − 2E)/(5 − 4E) with E = exp(−g²/8Δ²).
    let e = (-last.coupling.powi(2) / (8.0 * width * width)).exp();
    rec.analytic(
        "pointer mean/g matches the Gaussian closed form",
        (1.0 - 2.0 * e) / (5.0 - 4.0 * e),
        last.mean_over_coupling,
        QUADRATURE_TOL,
    );
    Ok(rec.finish())
}
