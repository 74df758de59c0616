//! Classical hidden-variable realization of spin-1/2 measurements.
//!
//! The hidden variable `lambda` is uniform on the measurement diameter
//! `[-1, 1]`; the outcome is `+` iff `lambda` does not exceed the orthogonal
//! projection `cos(theta)` of the state point onto the measurement axis.
//! Composed with the cascade, the proper state of the next entity is written
//! as a uniform mixture of pure states, one of them is picked uniformly, and
//! its sphere point feeds the threshold rule.

use rand::seq::IndexedRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cascade::{decompose_density, CascadeResult, CascadeState, OutcomeDistribution, MAX_EXACT_SLOTS};
use crate::embedding::SymmetricTensorState;
use crate::spin::{BlochPoint, Label};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct HiddenVariable(f64);

impl HiddenVariable {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&lambda) {
            return Err(Error::InvalidHiddenVariable(lambda));
        }
        Ok(Self(lambda))
    }

    pub fn lambda(self) -> f64 {
        self.0
    }

    /// Uniform on `(-1, 1]`.
    pub fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let u: f64 = rng.random();
        Self(1.0 - 2.0 * u)
    }
}

/// A spin-1/2 entity represented by its sphere point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassicalSpinHalf {
    pub point: BlochPoint,
}

impl ClassicalSpinHalf {
    pub fn new(point: BlochPoint) -> Self {
        Self { point }
    }

    /// `cos` of the angle between the state point and `direction`.
    pub fn projection(&self, direction: &BlochPoint) -> f64 {
        let a = self.point.cartesian();
        let b = direction.cartesian();
        (a[0] * b[0] + a[1] * b[1] + a[2] * b[2]).clamp(-1.0, 1.0)
    }
}

pub fn aerts_decide(state: &ClassicalSpinHalf, direction: &BlochPoint, lv: HiddenVariable) -> Label {
    if lv.lambda() <= state.projection(direction) {
        Label::Plus
    } else {
        Label::Minus
    }
}

/// Lebesgue measure of `{lambda in [-1, 1] : aerts_decide = +}`, divided by 2.
pub fn aerts_plus_probability(state: &ClassicalSpinHalf, direction: &BlochPoint) -> f64 {
    let c = state.projection(direction);
    (c - (-1.0)) / 2.0
}

pub fn aerts_sample<R: Rng + ?Sized>(state: &ClassicalSpinHalf, direction: &BlochPoint, rng: &mut R) -> Label {
    aerts_decide(state, direction, HiddenVariable::sample(rng))
}

/// Outcome of one classical cascade and the number of `lambda` draws it used.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassicalRun {
    pub result: CascadeResult,
    pub lambda_draws: usize,
}

/// Classical realization of [`run_cascade`](crate::cascade::run_cascade).
pub fn classical_cascade<R: Rng + ?Sized>(
    initial: &SymmetricTensorState,
    direction: &BlochPoint,
    rng: &mut R,
) -> Result<ClassicalRun> {
    let mut state = CascadeState::new(initial, direction);
    let mut lambda_draws = 0;
    while let Some(&slot) = state.unmeasured().first() {
        let proper = state.proper_state(slot)?;
        let pure = decompose_density(&proper, state.unmeasured().len())?;
        let picked = pure.choose(rng).expect("decomposition is non-empty");
        let entity = ClassicalSpinHalf::new(picked.bloch_point()?);
        let label = aerts_sample(&entity, direction, rng);
        lambda_draws += 1;
        state = state.collapse(slot, label)?;
    }
    Ok(ClassicalRun { result: state.result()?, lambda_draws })
}

/// Exact outcome law of [`classical_cascade`] over its finite choice tree.
pub fn exact_classical_distribution(
    initial: &SymmetricTensorState,
    direction: &BlochPoint,
) -> Result<OutcomeDistribution> {
    if initial.slots() > MAX_EXACT_SLOTS {
        return Err(Error::Capacity(format!("exact enumeration of {} slots (max {MAX_EXACT_SLOTS})", initial.slots())));
    }
    let spin = initial.spin();
    let mut probs = vec![0.0; spin.dim()];
    fn walk(state: &CascadeState, direction: &BlochPoint, weight: f64, n_plus: usize, probs: &mut [f64]) -> Result<()> {
        let Some(&slot) = state.unmeasured().first() else {
            probs[n_plus] += weight;
            return Ok(());
        };
        let proper = state.proper_state(slot)?;
        let pure = decompose_density(&proper, state.unmeasured().len())?;
        let mut p_plus = 0.0;
        for q in &pure {
            p_plus += aerts_plus_probability(&ClassicalSpinHalf::new(q.bloch_point()?), direction);
        }
        p_plus /= pure.len() as f64;
        for (label, p) in [(Label::Plus, p_plus), (Label::Minus, 1.0 - p_plus)] {
            if p > 0.0 {
                match state.collapse(slot, label) {
                    Ok(next) => walk(&next, direction, weight * p, n_plus + usize::from(label == Label::Plus), probs)?,
                    // rounding-level weight on a branch the state excludes
                    Err(Error::ZeroProbabilityBranch) => {}
                    Err(e) => return Err(e),
                }
            }
        }
        Ok(())
    }
    walk(&CascadeState::new(initial, direction), direction, 1.0, 0, &mut probs)?;
    OutcomeDistribution::new(spin, probs)
}
