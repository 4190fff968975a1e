use std::f64::consts::PI;

use super::{sigma, up_z, Recorder, ScenarioConfig, ScenarioResult};
use crate::error::Result;
use crate::hilbert::{spin_observable, tensor_state, Observable, StateVector};
use crate::measurement::{
    event_frequencies, post_selected_frequencies, MeasurementChain, ProjectiveMeasurement,
};

pub(super) const ANCHOR: &str = "erasing the past with a Bell measurement on particle and ancilla";

/// `(θ, φ)` of the sampled σ_ξ directions. All lie perpendicular to x, the
/// axis of the final post-selection.
pub const ERASURE_XI_DIRECTIONS: [(f64, f64); 3] =
    [(1.0, PI / 2.0), (2.2, PI / 2.0), (0.45, PI / 2.0)];

/// A direction with a component along x, where the retrodiction is not 1/2.
const OBLIQUE_XI: (f64, f64) = (1.0, 0.0);

fn bell_measurement() -> Result<ProjectiveMeasurement> {
    let v = |a: [f64; 4]| StateVector::from_real(&a);
    ProjectiveMeasurement::from_basis(
        "bell",
        &[
            ("phi+", 0.0, v([1.0, 0.0, 0.0, 1.0])?),
            ("phi-", 1.0, v([1.0, 0.0, 0.0, -1.0])?),
            ("psi+", 2.0, v([0.0, 1.0, 1.0, 0.0])?),
            ("psi-", 3.0, v([0.0, 1.0, -1.0, 0.0])?),
        ],
    )
}

fn particle(obs: &Observable, label: &str) -> Result<ProjectiveMeasurement> {
    sigma(&obs.embed(0, &[2, 2])?, label)
}

fn conditional_into(
    rec: &mut Recorder,
    name: &str,
    mid: &Observable,
    expected_up: f64,
) -> Result<()> {
    let pre = tensor_state(&up_z(), &up_z());
    let chain = MeasurementChain::new(
        pre,
        vec![
            bell_measurement()?,
            particle(mid, name)?,
            particle(&Observable::pauli_x(), "sigma_x")?,
        ],
    )?;
    let records = rec.run(&chain)?;
    let f = post_selected_frequencies(&records, 2, "+1", 1)?;
    for (label, p) in [("+1", expected_up), ("-1", 1.0 - expected_up)] {
        rec.monte_carlo(
            format!("after erasure: Prob({name} = {label} | sigma_x = +1)"),
            p,
            f.count(label),
            f.retained,
        );
    }
    Ok(())
}

pub fn scenario_erasure(cfg: &ScenarioConfig) -> Result<ScenarioResult> {
    let mut rec = Recorder::new("scenario_erasure", ANCHOR, cfg);

    let y = Observable::pauli_y();
    let plain = MeasurementChain::new(up_z(), vec![sigma(&y, "sigma_y")?])?;
    let records = rec.run(&plain)?;
    let f = event_frequencies(&records, 0)?;
    for label in ["+1", "-1"] {
        rec.monte_carlo(
            format!("no erasure, no post-selection: Prob(sigma_y = {label}) from |up_z>"),
            0.5,
            f.count(label),
            f.retained,
        );
    }

    conditional_into(&mut rec, "sigma_y", &y, 0.5)?;
    for (theta, phi) in ERASURE_XI_DIRECTIONS {
        let name = format!("sigma_xi(theta={theta}, phi=pi/2)");
        conditional_into(&mut rec, &name, &spin_observable(theta, phi), 0.5)?;
    }

    // The maximally mixed past gives retrodiction |<up_xi|up_x>|^2 = (1 + n_x)/2.
    let (theta, phi) = OBLIQUE_XI;
    conditional_into(
        &mut rec,
        &format!("sigma_xi(theta={theta}, phi=0)"),
        &spin_observable(theta, phi),
        (1.0 + theta.sin() * phi.cos()) / 2.0,
    )?;
    Ok(rec.finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bell_basis_is_a_measurement() {
        let m = bell_measurement().unwrap();
        assert_eq!(m.outcomes().len(), 4);
    }

    #[test]
    fn sampled_directions_are_perpendicular_to_x() {
        for (theta, phi) in ERASURE_XI_DIRECTIONS {
            assert!((theta.sin() * phi.cos()).abs() < 1e-15);
        }
    }

    #[test]
    fn erasure_scenario_passes() {
        let cfg = ScenarioConfig {
            trials: 20_000,
            ..ScenarioConfig::default()
        };
        let r = scenario_erasure(&cfg).unwrap();
        assert!(r.passed(), "{:#?}", r.failures().collect::<Vec<_>>());
    }
}
