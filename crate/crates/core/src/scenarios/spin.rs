use std::f64::consts::PI;

use super::{sigma, up_z, Recorder, ScenarioConfig, ScenarioResult, ANALYTIC_TOL};
use crate::error::Result;
use crate::hilbert::{spin_observable, Observable, StateVector};
use crate::measurement::{
    born_prob, event_frequencies, post_selected_frequencies, MeasurementChain,
};
use crate::tsvf::{abl_distribution, decomposition_check, TwoStateVector};

pub(super) const XI_SPIN_ANCHOR: &str =
    "tilted spin found up along z before and after: unselected vs ABL probability";
pub(super) const SHARP_SHANKS_ANCHOR: &str =
    "three consecutive coplanar spin measurements, final probabilities conditioned on the intermediate one";

/// Angles run by the catalog entry, with display names.
pub const XI_SPIN_CATALOG_ANGLES: [(f64, &str); 4] = [
    (PI / 6.0, "pi/6"),
    (PI / 3.0, "pi/3"),
    (PI / 2.0, "pi/2"),
    (2.0 * PI / 3.0, "2pi/3"),
];

/// `(theta_ab, theta_bc)` pairs run by the catalog entry.
pub const SHARP_SHANKS_CATALOG_ANGLES: [(f64, f64); 3] =
    [(PI / 2.0, PI / 2.0), (PI / 3.0, PI / 4.0), (0.0, 1.1)];

fn abl_ratio(theta: f64) -> f64 {
    let (c4, s4) = ((theta / 2.0).cos().powi(4), (theta / 2.0).sin().powi(4));
    c4 / (c4 + s4)
}

fn xi_spin_into(rec: &mut Recorder, theta: f64, name: &str) -> Result<()> {
    let born = (theta / 2.0).cos().powi(2);
    let abl = abl_ratio(theta);

    let xi = sigma(&spin_observable(theta, 0.0), "sigma_xi")?;
    let z = sigma(&Observable::pauli_z(), "sigma_z")?;
    let up = xi.index_of("+1")?;

    let unselected = born_prob(&up_z(), &xi.outcomes()[up].projector)?;
    rec.analytic(
        format!("theta={name}: unselected Prob(up_xi) = cos^2(theta/2)"),
        born,
        unselected,
        ANALYTIC_TOL,
    );
    let tsv = TwoStateVector::new(up_z(), up_z())?;
    let table = abl_distribution(&tsv, &xi)?;
    rec.analytic(
        format!("theta={name}: ABL Prob(up_xi) = cos^4/(cos^4 + sin^4)"),
        abl,
        table[up],
        ANALYTIC_TOL,
    );
    rec.analytic(
        format!("theta={name}: ABL probabilities sum to 1"),
        1.0,
        table.iter().sum::<f64>(),
        ANALYTIC_TOL,
    );

    let chain = MeasurementChain::new(up_z(), vec![xi, z.clone()])?;
    let records = rec.run(&chain)?;
    let all = event_frequencies(&records, 0)?;
    rec.monte_carlo(
        format!("theta={name}: unselected ensemble frequency of up_xi"),
        born,
        all.count("+1"),
        all.retained,
    );
    let post = post_selected_frequencies(&records, 1, "+1", 0)?;
    rec.monte_carlo(
        format!("theta={name}: post-selected (final up_z) frequency of up_xi"),
        abl,
        post.count("+1"),
        post.retained,
    );

    // Without the intermediate measurement every pre-selected particle passes
    // the final up_z test: the pre-selected and pre+post-selected ensembles coincide.
    let bare = MeasurementChain::new(up_z(), vec![z])?;
    let bare_records = rec.run(&bare)?;
    let kept = event_frequencies(&bare_records, 0)?;
    rec.every_record(
        format!("theta={name}: retained fraction without intermediate measurement is 1"),
        kept.count("+1"),
        kept.retained,
    );
    Ok(())
}

/// Spin prepared and found up along z; intermediate `σ_ξ` at polar angle `theta`.
pub fn scenario_xi_spin(theta: f64, cfg: &ScenarioConfig) -> Result<ScenarioResult> {
    let mut rec = Recorder::new("scenario_xi_spin", XI_SPIN_ANCHOR, cfg);
    xi_spin_into(&mut rec, theta, &format!("{theta:.6}"))?;
    Ok(rec.finish())
}

pub(super) fn xi_spin_catalog(cfg: &ScenarioConfig) -> Result<ScenarioResult> {
    let mut rec = Recorder::new("scenario_xi_spin", XI_SPIN_ANCHOR, cfg);
    for (theta, name) in XI_SPIN_CATALOG_ANGLES {
        xi_spin_into(&mut rec, theta, name)?;
    }
    Ok(rec.finish())
}

/// Closed-form probabilities for spins measured along a, b, c in one plane
/// with relative angles `theta_ab`, `theta_bc`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SharpShanksClosedForm {
    /// Final result "up" along c, given that b was measured.
    pub final_up: f64,
    pub final_down: f64,
    /// ABL probability of "up" along b given final up / final down.
    pub up_given_final_up: Option<f64>,
    pub up_given_final_down: Option<f64>,
    /// Standard prediction for "up" along b: `cos²(θ_ab/2)`.
    pub born_up: f64,
}

impl SharpShanksClosedForm {
    /// `Σ_f Prob(f)·Prob(up | f)` assembled from the closed forms.
    pub fn assembled(&self) -> f64 {
        self.final_up * self.up_given_final_up.unwrap_or(0.0)
            + self.final_down * self.up_given_final_down.unwrap_or(0.0)
    }
}

pub fn sharp_shanks_closed_form(theta_ab: f64, theta_bc: f64) -> SharpShanksClosedForm {
    let cab = (theta_ab / 2.0).cos().powi(2);
    let sab = (theta_ab / 2.0).sin().powi(2);
    let cbc = (theta_bc / 2.0).cos().powi(2);
    let sbc = (theta_bc / 2.0).sin().powi(2);
    let final_up = cab * cbc + sab * sbc;
    let final_down = cab * sbc + sab * cbc;
    let cond = |num: f64, den: f64| (den > 1e-300).then(|| num / den);
    SharpShanksClosedForm {
        final_up,
        final_down,
        up_given_final_up: cond(cab * cbc, final_up),
        up_given_final_down: cond(cab * sbc, final_down),
        born_up: cab,
    }
}

fn sharp_shanks_into(rec: &mut Recorder, theta_ab: f64, theta_bc: f64) -> Result<()> {
    let tag = format!("theta_ab={theta_ab:.6}, theta_bc={theta_bc:.6}");
    let cf = sharp_shanks_closed_form(theta_ab, theta_bc);

    let pre = StateVector::spin_up(0.0, 0.0);
    let mid = sigma(&spin_observable(theta_ab, 0.0), "sigma_b")?;
    let fin = sigma(&spin_observable(theta_ab + theta_bc, 0.0), "sigma_c")?;
    let d = decomposition_check(&pre, &mid, &fin, "+1")?;
    let term = |label: &str| d.terms.iter().find(|t| t.0 == label).cloned();
    let (_, p_up, cond_up) = term("+1").expect("final measurement has a +1 outcome");
    let (_, p_down, cond_down) = term("-1").expect("final measurement has a -1 outcome");

    rec.analytic(
        format!("{tag}: Prob(final up | b measured)"),
        cf.final_up,
        p_up,
        ANALYTIC_TOL,
    );
    rec.analytic(
        format!("{tag}: Prob(final down | b measured)"),
        cf.final_down,
        p_down,
        ANALYTIC_TOL,
    );
    if let (Some(expected), Some(got)) = (cf.up_given_final_up, cond_up) {
        rec.analytic(
            format!("{tag}: ABL Prob(up_b | final up)"),
            expected,
            got,
            ANALYTIC_TOL,
        );
    }
    if let (Some(expected), Some(got)) = (cf.up_given_final_down, cond_down) {
        rec.analytic(
            format!("{tag}: ABL Prob(up_b | final down)"),
            expected,
            got,
            ANALYTIC_TOL,
        );
    }
    rec.analytic(
        format!("{tag}: decomposition assembly equals cos^2(theta_ab/2)"),
        cf.born_up,
        cf.assembled(),
        ANALYTIC_TOL,
    );
    rec.analytic(
        format!("{tag}: library decomposition lhs = rhs"),
        d.lhs,
        d.rhs,
        ANALYTIC_TOL,
    );

    let chain = MeasurementChain::new(pre, vec![mid, fin])?;
    let records = rec.run(&chain)?;
    let finals = event_frequencies(&records, 1)?;
    rec.monte_carlo(
        format!("{tag}: frequency of final up"),
        cf.final_up,
        finals.count("+1"),
        finals.retained,
    );
    let mids = event_frequencies(&records, 0)?;
    rec.monte_carlo(
        format!("{tag}: frequency of up_b"),
        cf.born_up,
        mids.count("+1"),
        mids.retained,
    );
    for (label, expected) in [("+1", cf.up_given_final_up), ("-1", cf.up_given_final_down)] {
        if let (Some(p), Ok(f)) = (expected, post_selected_frequencies(&records, 1, label, 0)) {
            rec.monte_carlo(
                format!("{tag}: frequency of up_b given final {label}"),
                p,
                f.count("+1"),
                f.retained,
            );
        }
    }
    Ok(())
}

/// Two sequential σ_x measurements on `|↑z⟩`: equal results, joint (+1, +1) with probability 1/2.
fn repeated_sigma_x_into(rec: &mut Recorder) -> Result<()> {
    let x = sigma(&Observable::pauli_x(), "sigma_x")?;
    let chain = MeasurementChain::new(up_z(), vec![x.clone(), x])?;
    let records = rec.run(&chain)?;
    let n = records.len();
    let equal = records
        .iter()
        .filter(|r| r.outcomes[0] == r.outcomes[1])
        .count();
    rec.every_record("sequential sigma_x pair on up_z: outcomes equal", equal, n);
    let both_up = records
        .iter()
        .filter(|r| r.outcomes[0] == "+1" && r.outcomes[1] == "+1")
        .count();
    rec.monte_carlo(
        "sequential sigma_x pair on up_z: joint (+1,+1) frequency is 1/2, not 1/4",
        0.5,
        both_up,
        n,
    );
    Ok(())
}

/// Prepared up along a; `σ_b` measured at angle `theta_ab`; final `σ_c` at a further `theta_bc`.
pub fn scenario_sharp_shanks(
    theta_ab: f64,
    theta_bc: f64,
    cfg: &ScenarioConfig,
) -> Result<ScenarioResult> {
    let mut rec = Recorder::new("scenario_sharp_shanks", SHARP_SHANKS_ANCHOR, cfg);
    sharp_shanks_into(&mut rec, theta_ab, theta_bc)?;
    Ok(rec.finish())
}

pub(super) fn sharp_shanks_catalog(cfg: &ScenarioConfig) -> Result<ScenarioResult> {
    let mut rec = Recorder::new("scenario_sharp_shanks", SHARP_SHANKS_ANCHOR, cfg);
    for (ab, bc) in SHARP_SHANKS_CATALOG_ANGLES {
        sharp_shanks_into(&mut rec, ab, bc)?;
    }
    repeated_sigma_x_into(&mut rec)?;
    Ok(rec.finish())
}
