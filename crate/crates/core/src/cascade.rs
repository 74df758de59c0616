//! A spin-S measurement as 2S consecutive spin-1/2 measurements.
//!
//! The 2S individual entities share one symmetric tensor vector. Measuring
//! one slot along `(alpha, beta)` draws `+`/`-` with the Born weight of that
//! slot and collapses the shared vector onto the observed branch; the proper
//! states (reduced density matrices) of the not yet measured slots change
//! accordingly, as a deterministic function of the observed label. A measured
//! slot is removed from the shared vector and cannot be influenced afterwards.
//! Outcome strings with the same number of `+` labels are identified with the
//! same spin-S outcome `M' = (n_+ - n_-) / 2`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::embedding::{SymmetricTensorState, TensorVector};
use crate::spin::{
    coherent_state, coherent_transition_closed_form, transition_probability, BlochPoint, EulerAngles, Label,
    MagneticQuantumNumber, Qubit, Spin, SpinState,
};
use crate::{Error, Result};

/// Largest 2S for exhaustive enumeration of outcome strings.
pub const MAX_EXACT_SLOTS: usize = 12;

const DENSITY_TOLERANCE: f64 = 1e-12;

/// Density matrix of one spin-1/2 entity in the basis `{psi_+^0, psi_-^0}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Density2 {
    m: [[Complex64; 2]; 2],
}

impl Density2 {
    /// Validates hermiticity, unit trace and positivity to `1e-12`.
    pub fn new(m: [[Complex64; 2]; 2]) -> Result<Self> {
        let d = Self { m };
        let herm = (m[0][1] - m[1][0].conj()).norm().max(m[0][0].im.abs()).max(m[1][1].im.abs());
        let trace = (m[0][0].re + m[1][1].re - 1.0).abs();
        let (_, low) = d.eigenvalues();
        if herm > DENSITY_TOLERANCE || trace > DENSITY_TOLERANCE || low < -DENSITY_TOLERANCE {
            return Err(Error::Infeasible(0));
        }
        Ok(d)
    }

    pub fn pure(q: &Qubit) -> Result<Self> {
        let q = q.normalized()?;
        let m =
            [[q.plus * q.plus.conj(), q.plus * q.minus.conj()], [q.minus * q.plus.conj(), q.minus * q.minus.conj()]];
        Ok(Self { m })
    }

    /// Uniform mixture of pure states.
    pub fn mixture(states: &[Qubit]) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::Infeasible(0));
        }
        let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
        for q in states {
            let p = Self::pure(q)?;
            for (row, prow) in m.iter_mut().zip(p.m) {
                for (v, pv) in row.iter_mut().zip(prow) {
                    *v += pv;
                }
            }
        }
        let n = states.len() as f64;
        m.iter_mut().flatten().for_each(|v| *v /= n);
        Ok(Self { m })
    }

    pub fn entry(&self, row: Label, col: Label) -> Complex64 {
        self.m[row.bit()][col.bit()]
    }

    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        self.m
    }

    pub fn max_abs_diff(&self, other: &Density2) -> f64 {
        self.m.iter().flatten().zip(other.m.iter().flatten()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// `<q| rho |q>`.
    pub fn expectation(&self, q: &Qubit) -> f64 {
        let v = [q.plus, q.minus];
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..2 {
            for j in 0..2 {
                acc += v[i].conj() * self.m[i][j] * v[j];
            }
        }
        acc.re
    }

    /// Eigenvalues, largest first.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let (a, d) = (self.m[0][0].re, self.m[1][1].re);
        let b = self.m[0][1];
        let mean = (a + d) / 2.0;
        let r = ((a - d) / 2.0).hypot(b.norm());
        (mean + r, mean - r)
    }

    /// Orthonormal eigenvectors matching [`eigenvalues`](Self::eigenvalues).
    pub fn eigenvectors(&self) -> (Qubit, Qubit) {
        let (a, d) = (self.m[0][0].re, self.m[1][1].re);
        let b = self.m[0][1];
        let (high, _) = self.eigenvalues();
        let one = Qubit::basis(Label::Plus);
        let two = Qubit::basis(Label::Minus);
        if b.norm() == 0.0 {
            return if a >= d { (one, two) } else { (two, one) };
        }
        let e1 = Qubit::new(b, Complex64::new(high - a, 0.0)).normalized().expect("b != 0");
        let e2 = Qubit::new(-e1.minus.conj(), e1.plus.conj());
        (e1, e2)
    }

    pub fn is_pure(&self, tol: f64) -> bool {
        self.eigenvalues().1 <= tol
    }
}

/// Partial trace of a tensor vector over every slot except `slot`.
pub fn reduced_density_of(v: &TensorVector, slot: usize) -> Result<Density2> {
    let plus = v.contract_slot(slot, &Qubit::basis(Label::Plus))?;
    let minus = v.contract_slot(slot, &Qubit::basis(Label::Minus))?;
    let pp = plus.norm_sqr();
    let mm = minus.norm_sqr();
    // rho_{+-} = sum_rest psi(+, rest) conj(psi(-, rest)) = <minus|plus>
    let pm = minus.inner(&plus)?;
    let total = pp + mm;
    if total == 0.0 {
        return Err(Error::ZeroVector);
    }
    let c = |x: f64| Complex64::new(x / total, 0.0);
    Ok(Density2 { m: [[c(pp), pm / total], [pm.conj() / total, c(mm)]] })
}

/// Proper state of one slot of a symmetric tensor state.
pub fn reduced_density(state: &SymmetricTensorState, slot: usize) -> Result<Density2> {
    reduced_density_of(state.vector(), slot)
}

/// `psi = a_+ psi_+^0 (x) phi_+ + a_- psi_-^0 (x) phi_-` with unit `phi_+-`
/// (`None` when the corresponding coefficient vanishes).
#[derive(Clone, Debug, PartialEq)]
pub struct BiorthogonalSplit {
    pub a_plus: f64,
    pub a_minus: f64,
    pub phi_plus: Option<TensorVector>,
    pub phi_minus: Option<TensorVector>,
}

pub fn biorthogonal_split(state: &SymmetricTensorState, slot: usize) -> Result<BiorthogonalSplit> {
    let split = |label| -> Result<(f64, Option<TensorVector>)> {
        let v = state.vector().contract_slot(slot, &Qubit::basis(label))?;
        let a = v.norm_sqr().sqrt();
        Ok((a, if a > 0.0 { Some(v.normalized()?) } else { None }))
    };
    let (a_plus, phi_plus) = split(Label::Plus)?;
    let (a_minus, phi_minus) = split(Label::Minus)?;
    Ok(BiorthogonalSplit { a_plus, a_minus, phi_plus, phi_minus })
}

/// Shared state of the not yet measured entities during a cascade.
#[derive(Clone, Debug, PartialEq)]
pub struct CascadeState {
    spin: Spin,
    remaining: TensorVector,
    slot_ids: Vec<usize>,
    outcomes: Vec<(usize, Label)>,
    direction: BlochPoint,
}

impl CascadeState {
    pub fn new(initial: &SymmetricTensorState, direction: &BlochPoint) -> Self {
        Self {
            spin: initial.spin(),
            remaining: initial.vector().clone(),
            slot_ids: (0..initial.slots()).collect(),
            outcomes: Vec::new(),
            direction: *direction,
        }
    }

    pub fn spin(&self) -> Spin {
        self.spin
    }

    pub fn remaining(&self) -> &TensorVector {
        &self.remaining
    }

    /// Original slot indices of the unmeasured entities, in storage order.
    pub fn unmeasured(&self) -> &[usize] {
        &self.slot_ids
    }

    /// `(slot, label)` pairs in measurement order.
    pub fn outcomes(&self) -> &[(usize, Label)] {
        &self.outcomes
    }

    pub fn direction(&self) -> BlochPoint {
        self.direction
    }

    pub fn is_complete(&self) -> bool {
        self.slot_ids.is_empty()
    }

    fn position(&self, slot: usize) -> Result<usize> {
        if self.slot_ids.is_empty() {
            return Err(Error::EmptyCascade);
        }
        self.slot_ids
            .iter()
            .position(|&s| s == slot)
            .ok_or(Error::SlotOutOfRange { slot, slots: self.spin.twice() as usize })
    }

    fn outcome_vector(&self, label: Label) -> Qubit {
        Qubit::coherent(label, &self.direction)
    }

    fn branch(&self, pos: usize, label: Label) -> TensorVector {
        self.remaining.contract_slot(pos, &self.outcome_vector(label)).expect("position is valid")
    }

    /// Proper state (reduced density) of an unmeasured slot.
    pub fn proper_state(&self, slot: usize) -> Result<Density2> {
        reduced_density_of(&self.remaining, self.position(slot)?)
    }

    /// `(P(+), P(-))` for measuring `slot` along the cascade direction.
    pub fn branch_probabilities(&self, slot: usize) -> Result<(f64, f64)> {
        let pos = self.position(slot)?;
        let p = self.branch(pos, Label::Plus).norm_sqr();
        let m = self.branch(pos, Label::Minus).norm_sqr();
        let total = p + m;
        Ok((p / total, m / total))
    }

    /// Deterministic update for an observed label on `slot`.
    pub fn collapse(&self, slot: usize, label: Label) -> Result<CascadeState> {
        let pos = self.position(slot)?;
        let branch = self.branch(pos, label);
        if branch.norm_sqr() == 0.0 {
            return Err(Error::ZeroProbabilityBranch);
        }
        let mut slot_ids = self.slot_ids.clone();
        slot_ids.remove(pos);
        let mut outcomes = self.outcomes.clone();
        outcomes.push((slot, label));
        // a fully measured cascade keeps the scalar amplitude unnormalized
        let remaining = if slot_ids.is_empty() { branch } else { branch.normalized()? };
        Ok(CascadeState { spin: self.spin, remaining, slot_ids, outcomes, direction: self.direction })
    }

    pub fn result(&self) -> Result<CascadeResult> {
        if !self.is_complete() {
            return Err(Error::InvalidOrder);
        }
        CascadeResult::from_labels(self.spin, self.outcomes.iter().map(|(_, l)| *l).collect())
    }
}

/// Measures the first unmeasured slot.
pub fn measure_entity<R: Rng + ?Sized>(state: &CascadeState, rng: &mut R) -> Result<(Label, CascadeState)> {
    let slot = *state.slot_ids.first().ok_or(Error::EmptyCascade)?;
    measure_entity_at(state, slot, rng)
}

pub fn measure_entity_at<R: Rng + ?Sized>(
    state: &CascadeState,
    slot: usize,
    rng: &mut R,
) -> Result<(Label, CascadeState)> {
    let (p_plus, _) = state.branch_probabilities(slot)?;
    let u: f64 = rng.random();
    let label = if u < p_plus { Label::Plus } else { Label::Minus };
    Ok((label, state.collapse(slot, label)?))
}

/// Outcome of a full cascade.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CascadeResult {
    pub outcomes: Vec<Label>,
    pub n_plus: usize,
    pub n_minus: usize,
    #[serde(skip)]
    m_prime: Option<MagneticQuantumNumber>,
}

impl CascadeResult {
    pub fn from_labels(spin: Spin, outcomes: Vec<Label>) -> Result<Self> {
        if outcomes.len() != spin.twice() as usize {
            return Err(Error::DimensionMismatch { expected: spin.twice() as usize, actual: outcomes.len() });
        }
        let n_plus = outcomes.iter().filter(|l| **l == Label::Plus).count();
        let n_minus = outcomes.len() - n_plus;
        let m_prime = spin.m(n_plus as i32 - n_minus as i32)?;
        Ok(Self { outcomes, n_plus, n_minus, m_prime: Some(m_prime) })
    }

    pub fn m_prime(&self) -> MagneticQuantumNumber {
        self.m_prime.expect("constructed through from_labels")
    }

    pub fn outcome_string(&self) -> String {
        self.outcomes.iter().map(|l| l.symbol()).collect()
    }
}

fn check_order(slots: usize, order: &[usize]) -> Result<()> {
    let mut seen = vec![false; slots];
    if order.len() != slots {
        return Err(Error::InvalidOrder);
    }
    for &s in order {
        if s >= slots || std::mem::replace(&mut seen[s], true) {
            return Err(Error::InvalidOrder);
        }
    }
    Ok(())
}

/// Measures all 2S slots in ascending order.
pub fn run_cascade<R: Rng + ?Sized>(
    initial: &SymmetricTensorState,
    direction: &BlochPoint,
    rng: &mut R,
) -> Result<CascadeResult> {
    let order: Vec<usize> = (0..initial.slots()).collect();
    run_cascade_ordered(initial, direction, &order, rng)
}

pub fn run_cascade_ordered<R: Rng + ?Sized>(
    initial: &SymmetricTensorState,
    direction: &BlochPoint,
    order: &[usize],
    rng: &mut R,
) -> Result<CascadeResult> {
    check_order(initial.slots(), order)?;
    let mut state = CascadeState::new(initial, direction);
    for &slot in order {
        state = measure_entity_at(&state, slot, rng)?.1;
    }
    state.result()
}

/// Probability of each `M'`, ascending.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutcomeDistribution {
    spin: Spin,
    probabilities: Vec<f64>,
}

impl OutcomeDistribution {
    pub fn new(spin: Spin, probabilities: Vec<f64>) -> Result<Self> {
        if probabilities.len() != spin.dim() {
            return Err(Error::DimensionMismatch { expected: spin.dim(), actual: probabilities.len() });
        }
        Ok(Self { spin, probabilities })
    }

    pub fn spin(&self) -> Spin {
        self.spin
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn get(&self, m: MagneticQuantumNumber) -> f64 {
        self.probabilities[m.index()]
    }

    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }

    pub fn max_abs_diff(&self, other: &OutcomeDistribution) -> f64 {
        self.probabilities.iter().zip(&other.probabilities).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

/// Exact outcome law of [`run_cascade`] by enumerating all outcome strings.
pub fn exact_cascade_distribution(
    initial: &SymmetricTensorState,
    direction: &BlochPoint,
) -> Result<OutcomeDistribution> {
    let order: Vec<usize> = (0..initial.slots()).collect();
    exact_cascade_distribution_ordered(initial, direction, &order)
}

pub fn exact_cascade_distribution_ordered(
    initial: &SymmetricTensorState,
    direction: &BlochPoint,
    order: &[usize],
) -> Result<OutcomeDistribution> {
    if initial.slots() > MAX_EXACT_SLOTS {
        return Err(Error::Capacity(format!("exact enumeration of {} slots (max {MAX_EXACT_SLOTS})", initial.slots())));
    }
    check_order(initial.slots(), order)?;
    let spin = initial.spin();
    let mut probs = vec![0.0; spin.dim()];
    fn walk(state: &CascadeState, order: &[usize], weight: f64, n_plus: usize, probs: &mut [f64]) -> Result<()> {
        let Some((&slot, rest)) = order.split_first() else {
            probs[n_plus] += weight;
            return Ok(());
        };
        let (pp, pm) = state.branch_probabilities(slot)?;
        for (label, p) in [(Label::Plus, pp), (Label::Minus, pm)] {
            // zero-weight branches are skipped, never renormalized
            if p > 0.0 {
                let next = state.collapse(slot, label)?;
                walk(&next, rest, weight * p, n_plus + usize::from(label == Label::Plus), probs)?;
            }
        }
        Ok(())
    }
    walk(&CascadeState::new(initial, direction), order, 1.0, 0, &mut probs)?;
    OutcomeDistribution::new(spin, probs)
}

/// Spin-S Born law `|<psi_M'^{alpha,beta}|psi>|^2`.
pub fn born_distribution(state: &SpinState, direction: &BlochPoint) -> Result<OutcomeDistribution> {
    let spin = state.spin();
    let angles = EulerAngles::from(*direction);
    let probs = spin
        .magnetic_numbers()
        .map(|mp| transition_probability(&coherent_state(spin, mp, &angles)?, state))
        .collect::<Result<Vec<_>>>()?;
    OutcomeDistribution::new(spin, probs)
}

/// `P_{M,M'}(beta)` for all `M'` from the closed form.
pub fn coherent_distribution(m: MagneticQuantumNumber, beta: f64) -> Result<OutcomeDistribution> {
    let spin = m.spin();
    let probs = spin
        .magnetic_numbers()
        .map(|mp| coherent_transition_closed_form(spin, m, mp, beta))
        .collect::<Result<Vec<_>>>()?;
    OutcomeDistribution::new(spin, probs)
}

/// Writes `d` as the uniform mixture of `n` pure spin-1/2 states.
///
/// When `n * lambda` is an integer for the largest eigenvalue `lambda`, the
/// result is that many copies of each eigenvector; otherwise the states
/// `sqrt(l1) e1 + w^j sqrt(l2) e2` with `w = exp(2 pi i / n)`.
pub fn decompose_density(d: &Density2, n: usize) -> Result<Vec<Qubit>> {
    let (l1, l2) = d.eigenvalues();
    let (e1, e2) = d.eigenvectors();
    let l2 = l2.max(0.0);
    if n == 0 {
        return Err(Error::Infeasible(0));
    }
    if l2 <= DENSITY_TOLERANCE {
        return Ok(vec![e1; n]);
    }
    if n == 1 {
        return Err(Error::Infeasible(1));
    }
    let k = (n as f64 * l1).round();
    if (n as f64 * l1 - k).abs() < 1e-9 {
        let k = k as usize;
        let mut out = vec![e1; k];
        out.extend(std::iter::repeat_n(e2, n - k));
        return Ok(out);
    }
    let (a, b) = (l1.sqrt(), l2.sqrt());
    Ok((0..n)
        .map(|j| {
            let w = Complex64::from_polar(1.0, TAU * j as f64 / n as f64);
            Qubit::new(a * e1.plus + w * b * e2.plus, a * e1.minus + w * b * e2.minus)
        })
        .collect())
}
