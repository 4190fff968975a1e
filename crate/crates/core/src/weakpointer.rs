//! Gaussian pointer coupled impulsively to an observable (`H = g(t) p A`, only
//! `g = ∫g(t)dt` matters), followed by post-selection of the system.
//!
//! After the interaction and post-selection the pointer amplitude is
//!
//! ```text
//! Φ(q) = Σ_i ⟨post|P_i|pre⟩ · φ0(q − g·a_i),   φ0(q) = (2πΔ²)^(-1/4) exp(−q²/4Δ²)
//! ```
//!
//! so `|φ0|²` is a unit-mass Gaussian of standard deviation Δ centred at 0.
//! Everything is evaluated on a uniform grid with the trapezoid rule.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hilbert::{spectral_decompose, Observable, DEFAULT_DEGENERACY_TOL};
use crate::tsvf::{weak_value, TwoStateVector};

/// Gaussian tails kept on each side of the outermost peak, in units of Δ.
pub const TAIL_WIDTHS: f64 = 8.0;
/// Default grid resolution, in points per Δ.
pub const STEPS_PER_WIDTH: f64 = 50.0;
/// Default weak-coupling ladder: `g0 = 0.1Δ`, halved three times.
pub const DEFAULT_G0_OVER_WIDTH: f64 = 0.1;
pub const DEFAULT_HALVINGS: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PointerModel {
    pub coupling: f64,
    pub width: f64,
    pub grid_halfwidth: f64,
    pub grid_step: f64,
}

impl PointerModel {
    /// Default grid (`Δ/50` step, halfwidth `g·max|a| + 8Δ`) for an observable
    /// whose eigenvalues are bounded by `max_abs_eigenvalue`.
    pub fn new(coupling: f64, width: f64, max_abs_eigenvalue: f64) -> Result<Self> {
        let halfwidth = coupling.abs() * max_abs_eigenvalue.abs() + TAIL_WIDTHS * width;
        Self::with_grid(
            coupling,
            width,
            halfwidth,
            width / STEPS_PER_WIDTH,
            max_abs_eigenvalue,
        )
    }

    pub fn for_observable(coupling: f64, width: f64, obs: &Observable) -> Result<Self> {
        Self::new(coupling, width, max_abs_eigenvalue(obs)?)
    }

    pub fn with_grid(
        coupling: f64,
        width: f64,
        grid_halfwidth: f64,
        grid_step: f64,
        max_abs_eigenvalue: f64,
    ) -> Result<Self> {
        let bad = |m: &str| Err(Error::InvalidPointerModel(m.to_string()));
        if !width.is_finite() || width <= 0.0 {
            return bad("pointer width must be positive");
        }
        if !grid_step.is_finite() || grid_step <= 0.0 {
            return bad("grid step must be positive");
        }
        if !coupling.is_finite() {
            return bad("coupling must be finite");
        }
        let required = coupling.abs() * max_abs_eigenvalue.abs() + TAIL_WIDTHS * width;
        if grid_halfwidth.is_nan() || grid_halfwidth < required * (1.0 - 1e-12) {
            return Err(Error::InvalidPointerModel(format!(
                "grid halfwidth {grid_halfwidth} below required g·max|a| + 8Δ = {required}"
            )));
        }
        Ok(Self {
            coupling,
            width,
            grid_halfwidth,
            grid_step,
        })
    }

    /// Same grid policy at a different coupling.
    pub fn with_coupling(&self, coupling: f64, max_abs_eigenvalue: f64) -> Result<Self> {
        let halfwidth = coupling.abs() * max_abs_eigenvalue.abs() + TAIL_WIDTHS * self.width;
        Self::with_grid(
            coupling,
            self.width,
            halfwidth,
            self.grid_step,
            max_abs_eigenvalue,
        )
    }

    fn grid(&self) -> Vec<f64> {
        let n = (self.grid_halfwidth / self.grid_step).ceil() as i64;
        (-n..=n).map(|k| k as f64 * self.grid_step).collect()
    }
}

fn max_abs_eigenvalue(obs: &Observable) -> Result<f64> {
    let sf = spectral_decompose(obs, DEFAULT_DEGENERACY_TOL)?;
    Ok(sf.eigenvalues.iter().fold(0.0_f64, |m, v| m.max(v.abs())))
}

/// Post-selected pointer position density on a grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointerDistribution {
    pub grid: Vec<f64>,
    pub density: Vec<f64>,
    /// `∫|Φ|²` before normalization: the post-selection success probability.
    pub retained_norm: f64,
}

fn trapezoid(grid: &[f64], values: impl Iterator<Item = f64>) -> f64 {
    let values: Vec<f64> = values.collect();
    grid.windows(2)
        .zip(values.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .sum()
}

pub fn pointer_distribution(
    tsv: &TwoStateVector,
    obs: &Observable,
    pm: &PointerModel,
) -> Result<PointerDistribution> {
    let sf = spectral_decompose(obs, DEFAULT_DEGENERACY_TOL)?;
    let max_abs = sf.eigenvalues.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let required = pm.coupling.abs() * max_abs + TAIL_WIDTHS * pm.width;
    if pm.grid_halfwidth < required * (1.0 - 1e-12) {
        return Err(Error::InvalidPointerModel(format!(
            "grid halfwidth {} below required {required} for this observable",
            pm.grid_halfwidth
        )));
    }

    let peaks: Vec<(Complex64, f64)> = sf
        .eigenvalues
        .iter()
        .zip(&sf.projectors)
        .map(|(&a, p)| tsv.amplitude(p).map(|c| (c, pm.coupling * a)))
        .collect::<Result<_>>()?;
    if peaks.iter().all(|(c, _)| c.norm() == 0.0) {
        return Err(Error::PostSelectionUnreachable);
    }

    let delta = pm.width;
    let norm = (2.0 * std::f64::consts::PI * delta * delta).powf(-0.25);
    let grid = pm.grid();
    let raw: Vec<f64> = grid
        .iter()
        .map(|&q| {
            peaks
                .iter()
                .map(|&(c, centre)| {
                    let x = q - centre;
                    c * (norm * (-x * x / (4.0 * delta * delta)).exp())
                })
                .sum::<Complex64>()
                .norm_sqr()
        })
        .collect();
    let retained_norm = trapezoid(&grid, raw.iter().copied());
    if !retained_norm.is_finite() || retained_norm <= 0.0 {
        return Err(Error::PostSelectionUnreachable);
    }
    let density = raw.into_iter().map(|r| r / retained_norm).collect();
    Ok(PointerDistribution {
        grid,
        density,
        retained_norm,
    })
}

/// First moment of the density.
pub fn pointer_mean(dist: &PointerDistribution) -> f64 {
    trapezoid(
        &dist.grid,
        dist.grid.iter().zip(&dist.density).map(|(q, d)| q * d),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConvergencePoint {
    pub coupling: f64,
    pub mean_over_coupling: f64,
    /// `|mean/g − Re(A_w)|`.
    pub error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub weak_value_re: f64,
    pub points: Vec<ConvergencePoint>,
}

/// Slack allowed between successive errors before the sequence counts as
/// increasing; covers round-off when the error is already at machine level.
pub const MONOTONE_SLACK: f64 = 1e-12;

impl ConvergenceReport {
    pub fn is_monotone(&self) -> bool {
        self.points
            .windows(2)
            .all(|w| w[1].error <= w[0].error + MONOTONE_SLACK)
    }

    pub fn final_error(&self) -> f64 {
        self.points.last().map_or(f64::INFINITY, |p| p.error)
    }

    pub fn threshold(&self) -> f64 {
        0.02 * self.weak_value_re.abs().max(1.0)
    }

    /// Non-increasing errors and a final error below `0.02·max(1, |Re A_w|)`.
    pub fn converged(&self) -> bool {
        self.is_monotone() && self.final_error() < self.threshold()
    }
}

/// Evaluates `mean/g` at `g0, g0/2, …, g0/2^halvings` (with `g0 = pm_base.coupling`)
/// and compares with `Re(A_w)`.
pub fn weak_convergence_report(
    tsv: &TwoStateVector,
    obs: &Observable,
    pm_base: &PointerModel,
    halvings: usize,
) -> Result<ConvergenceReport> {
    let wv = weak_value(tsv, obs)?.re();
    let max_abs = max_abs_eigenvalue(obs)?;
    let mut points = Vec::with_capacity(halvings + 1);
    let mut g = pm_base.coupling;
    for _ in 0..=halvings {
        let pm = pm_base.with_coupling(g, max_abs)?;
        let mean = pointer_mean(&pointer_distribution(tsv, obs, &pm)?);
        let ratio = mean / g;
        points.push(ConvergencePoint {
            coupling: g,
            mean_over_coupling: ratio,
            error: (ratio - wv).abs(),
        });
        g /= 2.0;
    }
    Ok(ConvergenceReport {
        weak_value_re: wv,
        points,
    })
}
