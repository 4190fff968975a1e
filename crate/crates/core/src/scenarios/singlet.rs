use std::f64::consts::PI;

use super::{
    certainty_into, sigma, sign_of, Recorder, ScenarioConfig, ScenarioResult, ANALYTIC_TOL, CERTAIN,
};
use crate::error::{Error, Result};
use crate::hilbert::{tensor_op, tensor_state, Observable, StateVector};
use crate::measurement::{post_selected_frequencies, MeasurementChain, ProjectiveMeasurement};
use crate::tsvf::{abl_distribution, abl_prob, TwoStateVector};

pub(super) const PRODUCT_RULE_ANCHOR: &str =
    "singlet found in |up_x>|up_y>: certain intermediate values break the product rule";
pub(super) const TWO_TIME_ANCHOR: &str =
    "singlet sum relations, two-time counterfactuals, single spin prepared up along y";
pub(super) const ELEMENTS_ANCHOR: &str =
    "simultaneous certainty of sigma_x, sigma_y, sigma_z between two selections";

/// `(|↑↓⟩ − |↓↑⟩)/√2`.
pub fn singlet_state() -> StateVector {
    StateVector::from_real(&[0.0, 1.0, -1.0, 0.0]).expect("nonzero amplitudes")
}

fn up_x() -> StateVector {
    StateVector::spin_up(PI / 2.0, 0.0)
}

fn up_y() -> StateVector {
    StateVector::spin_up(PI / 2.0, PI / 2.0)
}

fn on_site(obs: &Observable, site: usize) -> Result<Observable> {
    obs.embed(site, &[2, 2])
}

pub fn scenario_singlet_product_rule(cfg: &ScenarioConfig) -> Result<ScenarioResult> {
    let mut rec = Recorder::new("scenario_singlet_product_rule", PRODUCT_RULE_ANCHOR, cfg);
    let post = tensor_state(&up_x(), &up_y());
    let tsv = TwoStateVector::new(singlet_state(), post.clone())?;

    let s1y = sigma(&on_site(&Observable::pauli_y(), 0)?, "sigma_1y")?;
    let s2x = sigma(&on_site(&Observable::pauli_x(), 1)?, "sigma_2x")?;
    let prod = sigma(
        &tensor_op(&Observable::pauli_y(), &Observable::pauli_x()),
        "sigma_1y sigma_2x",
    )?;

    rec.analytic(
        "ABL Prob(sigma_1y = -1) = 1",
        1.0,
        abl_prob(&tsv, &s1y, "-1")?,
        ANALYTIC_TOL,
    );
    rec.analytic(
        "ABL Prob(sigma_2x = -1) = 1",
        1.0,
        abl_prob(&tsv, &s2x, "-1")?,
        ANALYTIC_TOL,
    );
    rec.analytic(
        "ABL Prob(sigma_1y sigma_2x = -1) = 1",
        1.0,
        abl_prob(&tsv, &prod, "-1")?,
        ANALYTIC_TOL,
    );

    for m in [&s1y, &s2x, &prod] {
        certainty_into(&mut rec, &tsv, m)?;
    }

    let certain = |m: &ProjectiveMeasurement| -> Result<f64> {
        let table = abl_distribution(&tsv, m)?;
        let i = table
            .iter()
            .position(|&p| p >= CERTAIN)
            .ok_or_else(|| Error::InvalidConfig(format!("{} has no certain outcome", m.label())))?;
        Ok(m.outcomes()[i].eigenvalue)
    };
    let (v1, v2, v12) = (certain(&s1y)?, certain(&s2x)?, certain(&prod)?);
    rec.analytic(
        "product of certain values {sigma_1y}{sigma_2x} = +1",
        1.0,
        v1 * v2,
        ANALYTIC_TOL,
    );
    rec.analytic(
        "product rule fails: {sigma_1y}{sigma_2x} - {sigma_1y sigma_2x} = 2",
        2.0,
        v1 * v2 - v12,
        ANALYTIC_TOL,
    );

    // Commuting joint measurement: rank-one projectors |a>|b>, a along y, b along x.
    let basis: Vec<(String, f64, StateVector)> = [("+1", PI / 2.0), ("-1", -PI / 2.0)]
        .iter()
        .flat_map(|&(la, pa)| {
            [("+1", 0.0), ("-1", PI)].map(move |(lb, pb)| {
                let a = StateVector::spin_up(PI / 2.0, pa);
                let b = StateVector::spin_up(PI / 2.0, pb);
                let v = f64::from(sign_of(la) * sign_of(lb));
                (format!("{la},{lb}"), v, tensor_state(&a, &b))
            })
        })
        .collect();
    let refs: Vec<(&str, f64, StateVector)> = basis
        .iter()
        .map(|(l, v, s)| (l.as_str(), *v, s.clone()))
        .collect();
    let joint = ProjectiveMeasurement::from_basis("joint sigma_1y, sigma_2x", &refs)?;
    let table = abl_distribution(&tsv, &joint)?;
    for (o, p) in joint.outcomes().iter().zip(&table) {
        rec.analytic(
            format!("joint ABL Prob({}) = 1/4", o.label),
            0.25,
            *p,
            ANALYTIC_TOL,
        );
    }
    let p_minus: f64 = joint
        .outcomes()
        .iter()
        .zip(&table)
        .filter(|(o, _)| o.eigenvalue < 0.0)
        .map(|(_, p)| p)
        .sum();
    rec.analytic(
        "joint measurement: Prob(product = -1) = 1/2",
        0.5,
        p_minus,
        ANALYTIC_TOL,
    );
    rec.exhaustive(
        "joint measurement: product is not certain (0 < Prob < 1)",
        1.0,
        f64::from(u8::from(p_minus > 1e-9 && p_minus < 1.0 - 1e-9)),
    );

    let finale = ProjectiveMeasurement::onto_state("final |up_x>|up_y>", &post, "yes", "no")?;
    for (m, name) in [
        (&s1y, "sigma_1y"),
        (&s2x, "sigma_2x"),
        (&prod, "sigma_1y sigma_2x"),
    ] {
        let chain = MeasurementChain::new(singlet_state(), vec![m.clone(), finale.clone()])?;
        let records = rec.run(&chain)?;
        let f = post_selected_frequencies(&records, 1, "yes", 0)?;
        rec.every_record(
            format!("{name} = -1 in every post-selected record"),
            f.count("-1"),
            f.retained,
        );
    }
    let chain = MeasurementChain::new(singlet_state(), vec![joint.clone(), finale])?;
    let records = rec.run(&chain)?;
    let f = post_selected_frequencies(&records, 1, "yes", 0)?;
    let minus = f.count("+1,-1") + f.count("-1,+1");
    rec.monte_carlo(
        "joint measurement: post-selected frequency of product -1",
        0.5,
        minus,
        f.retained,
    );
    Ok(rec.finish())
}

fn zero_sum_into(
    rec: &mut Recorder,
    first: (&str, Observable, usize),
    second: (&str, Observable, usize),
) -> Result<()> {
    let a = sigma(&on_site(&first.1, first.2)?, first.0)?;
    let b = sigma(&on_site(&second.1, second.2)?, second.0)?;
    let records = rec.run(&MeasurementChain::new(singlet_state(), vec![a, b])?)?;
    let zero = records
        .iter()
        .filter(|r| sign_of(&r.outcomes[0]) + sign_of(&r.outcomes[1]) == 0)
        .count();
    rec.every_record(
        format!(
            "singlet: {} then {} sum to 0 in every record",
            first.0, second.0
        ),
        zero,
        records.len(),
    );
    Ok(())
}

pub fn scenario_two_time(cfg: &ScenarioConfig) -> Result<ScenarioResult> {
    let mut rec = Recorder::new("scenario_two_time", TWO_TIME_ANCHOR, cfg);
    let psi = singlet_state();

    let sum_x = &on_site(&Observable::pauli_x(), 0)? + &on_site(&Observable::pauli_x(), 1)?;
    let sum_y = &on_site(&Observable::pauli_y(), 0)? + &on_site(&Observable::pauli_y(), 1)?;
    for (obs, name) in [
        (&sum_x, "sigma_1x + sigma_2x"),
        (&sum_y, "sigma_1y + sigma_2y"),
    ] {
        let image = obs.apply(&psi)?;
        let residual = image.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        rec.analytic(
            format!("singlet is a 0-eigenstate of {name} (residual norm)"),
            0.0,
            residual,
            ANALYTIC_TOL,
        );
    }

    zero_sum_into(
        &mut rec,
        ("sigma_1x", Observable::pauli_x(), 0),
        ("sigma_2x", Observable::pauli_x(), 1),
    )?;
    zero_sum_into(
        &mut rec,
        ("sigma_2y", Observable::pauli_y(), 1),
        ("sigma_1y", Observable::pauli_y(), 0),
    )?;

    let mx = sigma(&sum_x, "sigma_1x + sigma_2x")?;
    let my = sigma(&sum_y, "sigma_1y + sigma_2y")?;
    let records = rec.run(&MeasurementChain::new(psi, vec![mx, my])?)?;
    let both_zero = records
        .iter()
        .filter(|r| r.outcomes.iter().all(|o| o == "0"))
        .count();
    rec.every_record(
        "sequential sum-observable measurements return (0, 0) in every record",
        both_zero,
        records.len(),
    );

    let x = sigma(&Observable::pauli_x(), "sigma_x")?;
    let y = sigma(&Observable::pauli_y(), "sigma_y")?;
    let records = rec.run(&MeasurementChain::new(up_y(), vec![x.clone(), x])?)?;
    let equal = records
        .iter()
        .filter(|r| r.outcomes[0] == r.outcomes[1])
        .count();
    rec.every_record(
        "|up_y>: sigma_x(t1) and sigma_x(t3) agree in every record",
        equal,
        records.len(),
    );
    let records = rec.run(&MeasurementChain::new(up_y(), vec![y])?)?;
    let up = records.iter().filter(|r| r.outcomes[0] == "+1").count();
    rec.every_record(
        "|up_y>: sigma_y(t2) = +1 in every record",
        up,
        records.len(),
    );
    Ok(rec.finish())
}

/// The 26 directions of the cube `{−1, 0, 1}³ \ {0}` as `(θ, φ)`.
pub fn cube_directions() -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(26);
    for x in -1i32..=1 {
        for y in -1i32..=1 {
            for z in -1i32..=1 {
                if (x, y, z) == (0, 0, 0) {
                    continue;
                }
                let (x, y, z) = (f64::from(x), f64::from(y), f64::from(z));
                let r = (x * x + y * y + z * z).sqrt();
                out.push(((z / r).acos(), y.atan2(x)));
            }
        }
    }
    out
}

/// Best number of particle-1 components `σ_x, σ_y, σ_z` made simultaneously
/// certain by a product post-selection on the grid, with a witness.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSearch {
    pub pairs: usize,
    pub best: usize,
    pub witness: Option<((f64, f64), (f64, f64))>,
    pub certain_values: Vec<f64>,
}

pub fn elements_of_reality_search(pre: &StateVector) -> Result<GridSearch> {
    let ms = [
        Observable::pauli_x(),
        Observable::pauli_y(),
        Observable::pauli_z(),
    ]
    .iter()
    .map(|o| sigma(&on_site(o, 0)?, "sigma_1"))
    .collect::<Result<Vec<_>>>()?;
    let dirs = cube_directions();
    let mut search = GridSearch {
        pairs: 0,
        best: 0,
        witness: None,
        certain_values: Vec::new(),
    };
    for &d1 in &dirs {
        for &d2 in &dirs {
            search.pairs += 1;
            let post = tensor_state(
                &StateVector::spin_up(d1.0, d1.1),
                &StateVector::spin_up(d2.0, d2.1),
            );
            let tsv = TwoStateVector::new(pre.clone(), post)?;
            let mut values = Vec::new();
            for m in &ms {
                match abl_distribution(&tsv, m) {
                    Ok(t) => {
                        if let Some(i) = t.iter().position(|&p| p >= CERTAIN) {
                            values.push(m.outcomes()[i].eigenvalue);
                        }
                    }
                    Err(Error::PostSelectionUnreachable) => {}
                    Err(e) => return Err(e),
                }
            }
            if values.len() > search.best {
                search.best = values.len();
                search.witness = Some((d1, d2));
                search.certain_values = values;
            }
        }
    }
    Ok(search)
}

pub fn scenario_elements_of_reality_note(cfg: &ScenarioConfig) -> Result<ScenarioResult> {
    let mut rec = Recorder::new("scenario_elements_of_reality_note", ELEMENTS_ANCHOR, cfg);
    // Maximally entangled pre-selection (|↑↑⟩ + |↓↓⟩)/√2.
    let pre = StateVector::from_real(&[1.0, 0.0, 0.0, 1.0])?;
    let s = elements_of_reality_search(&pre)?;
    rec.exhaustive(
        "product post-selections searched (26 x 26 directions)",
        676.0,
        s.pairs as f64,
    );
    if s.best == 3 {
        for (axis, v) in ["x", "y", "z"].iter().zip(&s.certain_values) {
            rec.note(format!("found on grid: certain sigma_{axis} value"), *v);
        }
    } else {
        rec.note(
            "not found on grid; most components simultaneously certain",
            s.best as f64,
        );
    }
    Ok(rec.finish())
}
