//! Analytic quantities of the two-state vector description: ABL conditional
//! probabilities (pure and projector post-selection), the conditioned
//! decomposition identity, weak values, and time reversal.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hilbert::{check_dim, inner, Matrix, Observable, StateVector};
use crate::measurement::{born_prob, ProjectiveMeasurement};

/// ABL denominators at or below this mean the post-selection cannot follow the measurement.
pub const ABL_DENOMINATOR_MIN: f64 = 1e-30;
/// Weak values require `|⟨post|pre⟩|` strictly above this.
pub const WEAK_OVERLAP_MIN: f64 = 1e-12;

/// Pre-selected state `pre` (prepared at the earlier time) and post-selected
/// state `post` (found at the later time).
#[derive(Clone, Debug, PartialEq)]
pub struct TwoStateVector {
    pre: StateVector,
    post: StateVector,
}

impl TwoStateVector {
    pub fn new(pre: StateVector, post: StateVector) -> Result<Self> {
        check_dim(pre.dim(), post.dim())?;
        Ok(Self { pre, post })
    }

    pub fn pre(&self) -> &StateVector {
        &self.pre
    }

    pub fn post(&self) -> &StateVector {
        &self.post
    }

    pub fn dim(&self) -> usize {
        self.pre.dim()
    }

    /// `⟨post|pre⟩`.
    pub fn overlap(&self) -> Complex64 {
        inner(&self.post, &self.pre).expect("dims checked at construction")
    }

    /// `⟨post| M |pre⟩`.
    pub fn amplitude(&self, m: &Matrix) -> Result<Complex64> {
        check_dim(m.dim(), self.dim())?;
        Ok(m.sandwich(self.post.amplitudes(), self.pre.amplitudes()))
    }
}

/// Swaps the pre- and post-selected states.
pub fn time_reverse(tsv: &TwoStateVector) -> TwoStateVector {
    TwoStateVector {
        pre: tsv.post.clone(),
        post: tsv.pre.clone(),
    }
}

/// ABL probabilities for every outcome of `m`, in outcome order.
pub fn abl_distribution(tsv: &TwoStateVector, m: &ProjectiveMeasurement) -> Result<Vec<f64>> {
    check_dim(m.dim(), tsv.dim())?;
    let weights = m
        .outcomes()
        .iter()
        .map(|o| tsv.amplitude(&o.projector).map(|a| a.norm_sqr()))
        .collect::<Result<Vec<f64>>>()?;
    normalize(weights)
}

/// `|⟨post|P_i|pre⟩|² / Σ_j |⟨post|P_j|pre⟩|²` for the outcome labelled `outcome`.
pub fn abl_prob(tsv: &TwoStateVector, m: &ProjectiveMeasurement, outcome: &str) -> Result<f64> {
    let k = m.index_of(outcome)?;
    Ok(abl_distribution(tsv, m)?[k])
}

/// ABL rule for post-selection onto a subspace: `‖P₂ P_i |pre⟩‖² / Σ_j ‖P₂ P_j |pre⟩‖²`.
///
/// With `P₂ = |post⟩⟨post|` this is [`abl_distribution`]; with `P₂ = 1` it is
/// the plain Born distribution.
pub fn abl_general(
    pre: &StateVector,
    m: &ProjectiveMeasurement,
    post_projector: &Matrix,
) -> Result<Vec<f64>> {
    check_dim(m.dim(), pre.dim())?;
    check_dim(post_projector.dim(), pre.dim())?;
    let weights = m
        .outcomes()
        .iter()
        .map(|o| {
            let v = post_projector.apply(&o.projector.apply(pre.amplitudes()));
            v.iter().map(|a| a.norm_sqr()).sum()
        })
        .collect();
    normalize(weights)
}

fn normalize(weights: Vec<f64>) -> Result<Vec<f64>> {
    let total: f64 = weights.iter().sum();
    if total.is_nan() || total <= ABL_DENOMINATOR_MIN {
        return Err(Error::PostSelectionUnreachable);
    }
    Ok(weights.into_iter().map(|w| w / total).collect())
}

/// Both sides of the decomposition of an intermediate-time probability over
/// the final outcomes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Decomposition {
    /// Born probability of the outcome at the intermediate time.
    pub lhs: f64,
    /// `Σ_f Prob(f)·Prob(a_i | f)`.
    pub rhs: f64,
    /// Per final outcome: `(label, Prob(f), Prob(a_i | f))`; zero-probability
    /// final outcomes carry `None` and contribute nothing.
    pub terms: Vec<(String, f64, Option<f64>)>,
}

/// Evaluates `Prob(a_i) = Σ_f Prob(f)·Prob(a_i | f)` with `Prob(f)` computed
/// given that the intermediate measurement `m_mid` was performed, and
/// `Prob(a_i | f)` from the ABL rule with post-selection onto the final
/// outcome's subspace.
pub fn decomposition_check(
    pre: &StateVector,
    m_mid: &ProjectiveMeasurement,
    m_final: &ProjectiveMeasurement,
    outcome: &str,
) -> Result<Decomposition> {
    check_dim(m_mid.dim(), pre.dim())?;
    check_dim(m_final.dim(), pre.dim())?;
    let i = m_mid.index_of(outcome)?;
    let lhs = born_prob(pre, &m_mid.outcomes()[i].projector)?;

    let mut rhs = 0.0;
    let mut terms = Vec::with_capacity(m_final.outcomes().len());
    for f in m_final.outcomes() {
        // Prob(f | intermediate measurement performed) = Σ_j ‖P_f P_j ψ‖²
        let prob_f: f64 = m_mid
            .outcomes()
            .iter()
            .map(|o| {
                let v = f.projector.apply(&o.projector.apply(pre.amplitudes()));
                v.iter().map(|a| a.norm_sqr()).sum::<f64>()
            })
            .sum();
        match abl_general(pre, m_mid, &f.projector) {
            Ok(table) => {
                rhs += prob_f * table[i];
                terms.push((f.label.clone(), prob_f, Some(table[i])));
            }
            Err(Error::PostSelectionUnreachable) => terms.push((f.label.clone(), prob_f, None)),
            Err(e) => return Err(e),
        }
    }
    Ok(Decomposition { lhs, rhs, terms })
}

/// Complex weak value `⟨post|A|pre⟩ / ⟨post|pre⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WeakValue(pub Complex64);

impl WeakValue {
    pub fn value(self) -> Complex64 {
        self.0
    }

    pub fn re(self) -> f64 {
        self.0.re
    }

    pub fn im(self) -> f64 {
        self.0.im
    }
}

pub fn weak_value(tsv: &TwoStateVector, obs: &Observable) -> Result<WeakValue> {
    let overlap = tsv.overlap();
    if overlap.norm() <= WEAK_OVERLAP_MIN {
        return Err(Error::WeakValueUndefined);
    }
    let numerator = tsv.amplitude(obs.matrix())?;
    let value = numerator / overlap;
    if !(value.re.is_finite() && value.im.is_finite()) {
        return Err(Error::WeakValueUndefined);
    }
    Ok(WeakValue(value))
}
