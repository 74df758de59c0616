//! Embedding of spin-S states into the 2S-fold tensor product of spin-1/2 spaces.
//!
//! Tensor amplitudes are stored densely. Slot 0 is the most significant bit
//! of the amplitude index and a set bit means label `-`, so `"++...+"` is
//! index 0.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{binomial, factorial};
use crate::majorana::state_to_constellation;
use crate::spin::{
    coherent_state, transition_probability, BlochPoint, EulerAngles, Label, MagneticQuantumNumber, Qubit, Spin,
    SpinState,
};
use crate::{Error, Result};

/// Largest slot count for dense tensor vectors (2^16 amplitudes = 1 MiB).
pub const MAX_DENSE_SLOTS: usize = 16;
/// Largest slot count for symmetrizing a multiset with more than two distinct points.
pub const MAX_GENERIC_SYMMETRIZE: usize = 8;

/// A basis string of `+`/`-` labels, one per slot.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TensorIndex(pub Vec<Label>);

impl TensorIndex {
    pub fn from_index(index: usize, slots: usize) -> Self {
        Self((0..slots).map(|k| Label::from_bit(index >> (slots - 1 - k))).collect())
    }

    pub fn index(&self) -> usize {
        self.0.iter().fold(0, |acc, l| (acc << 1) | l.bit())
    }

    pub fn count(&self, label: Label) -> usize {
        self.0.iter().filter(|l| **l == label).count()
    }
}

impl fmt::Display for TensorIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|l| write!(f, "{}", l.symbol()))
    }
}

/// Dense amplitude vector over `slots` spin-1/2 tensor factors.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorVector {
    slots: usize,
    amplitudes: Vec<Complex64>,
}

impl TensorVector {
    pub fn new(slots: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        if slots > MAX_DENSE_SLOTS {
            return Err(Error::Capacity(format!("{slots} tensor slots (max {MAX_DENSE_SLOTS})")));
        }
        if amplitudes.len() != 1 << slots {
            return Err(Error::DimensionMismatch { expected: 1 << slots, actual: amplitudes.len() });
        }
        Ok(Self { slots, amplitudes })
    }

    /// Tensor product `q_0 (x) q_1 (x) ...`.
    pub fn product(qubits: &[Qubit]) -> Result<Self> {
        if qubits.len() > MAX_DENSE_SLOTS {
            return Err(Error::Capacity(format!("{} tensor slots (max {MAX_DENSE_SLOTS})", qubits.len())));
        }
        let mut amps = vec![Complex64::new(1.0, 0.0)];
        for q in qubits {
            amps = amps.iter().flat_map(|a| [a * q.plus, a * q.minus]).collect();
        }
        Ok(Self { slots: qubits.len(), amplitudes: amps })
    }

    pub fn slots(&self) -> usize {
        self.slots
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: &TensorIndex) -> Complex64 {
        self.amplitudes[index.index()]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &TensorVector) -> Result<Complex64> {
        if self.slots != other.slots {
            return Err(Error::DimensionMismatch { expected: self.slots, actual: other.slots });
        }
        Ok(self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm_sqr().sqrt();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::ZeroVector);
        }
        self.amplitudes.iter_mut().for_each(|a| *a /= n);
        Ok(self)
    }

    /// Contracts slot `slot` with `<bra|`, leaving a vector over the other slots.
    pub fn contract_slot(&self, slot: usize, bra: &Qubit) -> Result<TensorVector> {
        if slot >= self.slots {
            return Err(Error::SlotOutOfRange { slot, slots: self.slots });
        }
        let high = self.slots - 1 - slot;
        let low_mask = (1usize << high) - 1;
        let (cp, cm) = (bra.plus.conj(), bra.minus.conj());
        let amps = (0..1usize << (self.slots - 1))
            .map(|j| {
                let base = ((j & !low_mask) << 1) | (j & low_mask);
                cp * self.amplitudes[base] + cm * self.amplitudes[base | (1 << high)]
            })
            .collect();
        Ok(TensorVector { slots: self.slots - 1, amplitudes: amps })
    }

    /// Amplitude invariance under every exchange of two slots.
    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..self.amplitudes.len()).all(|idx| {
            (0..self.slots.saturating_sub(1)).all(|k| {
                let (a, b) = (self.slots - 1 - k, self.slots - 2 - k);
                let (ba, bb) = ((idx >> a) & 1, (idx >> b) & 1);
                let swapped = if ba == bb { idx } else { idx ^ (1 << a) ^ (1 << b) };
                (self.amplitudes[idx] - self.amplitudes[swapped]).norm() <= tol
            })
        })
    }
}

/// A unit vector of 2S tensor slots representing a spin-S state.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricTensorState {
    spin: Spin,
    vector: TensorVector,
    symmetric: bool,
}

impl SymmetricTensorState {
    /// Wraps a tensor vector (normalized on the way in); the symmetry flag is computed.
    pub fn from_vector(spin: Spin, vector: TensorVector) -> Result<Self> {
        if vector.slots != spin.twice() as usize {
            return Err(Error::DimensionMismatch { expected: spin.twice() as usize, actual: vector.slots });
        }
        let vector = vector.normalized()?;
        let symmetric = vector.is_symmetric(1e-12);
        Ok(Self { spin, vector, symmetric })
    }

    pub fn spin(&self) -> Spin {
        self.spin
    }

    pub fn vector(&self) -> &TensorVector {
        &self.vector
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.vector.amplitudes
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn slots(&self) -> usize {
        self.vector.slots
    }
}

fn check_count(spin: Spin, points: &[BlochPoint]) -> Result<()> {
    if points.len() != spin.twice() as usize {
        return Err(Error::DimensionMismatch { expected: spin.twice() as usize, actual: points.len() });
    }
    Ok(())
}

/// Tensor product of the coherent vectors `psi_+` of the points, in the given slot order.
pub fn product_state(spin: Spin, points: &[BlochPoint]) -> Result<SymmetricTensorState> {
    check_count(spin, points)?;
    let qubits: Vec<Qubit> = points.iter().map(|p| Qubit::coherent(Label::Plus, p)).collect();
    let vector = TensorVector::product(&qubits)?;
    let symmetric = vector.is_symmetric(1e-12);
    Ok(SymmetricTensorState { spin, vector, symmetric })
}

/// Visits every distinguishable arrangement of a multiset given as group ids.
fn for_each_arrangement(groups: &[usize], mut visit: impl FnMut(&[usize])) {
    let mut cur = groups.to_vec();
    cur.sort_unstable();
    loop {
        visit(&cur);
        // next lexicographic permutation
        let Some(i) = (1..cur.len()).rev().find(|&i| cur[i - 1] < cur[i]) else {
            return;
        };
        let j = (i..cur.len()).rev().find(|&j| cur[j] > cur[i - 1]).expect("pivot exists");
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
}

fn group_ids(points: &[BlochPoint]) -> (Vec<usize>, Vec<BlochPoint>) {
    let mut distinct: Vec<BlochPoint> = Vec::new();
    let ids = points
        .iter()
        .map(|p| match distinct.iter().position(|q| q == p) {
            Some(i) => i,
            None => {
                distinct.push(*p);
                distinct.len() - 1
            }
        })
        .collect();
    (ids, distinct)
}

/// Unnormalized sum of product states over all distinguishable orderings of the multiset,
/// together with the number of orderings.
pub fn symmetrized_sum(spin: Spin, points: &[BlochPoint]) -> Result<(TensorVector, usize)> {
    check_count(spin, points)?;
    let (ids, distinct) = group_ids(points);
    let n = points.len();
    let cap = if distinct.len() <= 2 { MAX_DENSE_SLOTS } else { MAX_GENERIC_SYMMETRIZE };
    if n > cap {
        return Err(Error::Capacity(format!(
            "symmetrizing {n} slots with {} distinct points (max {cap})",
            distinct.len()
        )));
    }
    let qubits: Vec<Qubit> = distinct.iter().map(|p| Qubit::coherent(Label::Plus, p)).collect();
    let mut acc = vec![Complex64::new(0.0, 0.0); 1 << n];
    let mut count = 0usize;
    for_each_arrangement(&ids, |order| {
        let factors: Vec<Qubit> = order.iter().map(|&g| qubits[g]).collect();
        let v = TensorVector::product(&factors).expect("size checked");
        acc.iter_mut().zip(&v.amplitudes).for_each(|(a, b)| *a += b);
        count += 1;
    });
    Ok((TensorVector { slots: n, amplitudes: acc }, count))
}

/// Normalized symmetrization of the product state of `points`.
pub fn symmetrize(spin: Spin, points: &[BlochPoint]) -> Result<SymmetricTensorState> {
    let (sum, _) = symmetrized_sum(spin, points)?;
    let vector = sum.normalized()?;
    Ok(SymmetricTensorState { spin, vector, symmetric: true })
}

/// `S+M` copies of `direction` and `S-M` copies of its antipode.
pub fn coherent_multiset(m: MagneticQuantumNumber, direction: &BlochPoint) -> Vec<BlochPoint> {
    let mut pts = vec![*direction; m.s_plus_m() as usize];
    pts.extend(std::iter::repeat_n(direction.antipode(), m.s_minus_m() as usize));
    pts
}

/// Symmetrized embedding of `psi_M^0`.
pub fn coherent_embedding(m: MagneticQuantumNumber) -> Result<SymmetricTensorState> {
    symmetrize(m.spin(), &coherent_multiset(m, &BlochPoint::NORTH))
}

/// Symmetrized embedding of an arbitrary state through its Majorana constellation.
pub fn embed_state(state: &SpinState) -> Result<SymmetricTensorState> {
    let c = state_to_constellation(state)?;
    symmetrize(state.spin(), c.points())
}

/// `N = sqrt((2S)! / ((S+M)! (S-M)!))`.
pub fn normalization_constant(spin: Spin, m: MagneticQuantumNumber) -> Result<f64> {
    if m.spin() != spin {
        return Err(Error::InvalidMagnetic { twice_s: spin.twice(), twice_m: m.twice() });
    }
    Ok((binomial(spin.twice(), m.s_plus_m()) as f64).sqrt())
}

/// Outcome subspace `H_{M'}^{alpha,beta}`: spanned by every distinguishable ordering
/// of `S+M'` factors `psi_+^{alpha,beta}` and `S-M'` factors `psi_-^{alpha,beta}`.
///
/// Basis vectors are kept as label patterns and materialized on demand.
#[derive(Clone, Debug)]
pub struct OutcomeSubspace {
    spin: Spin,
    m_prime: MagneticQuantumNumber,
    direction: BlochPoint,
    patterns: Vec<TensorIndex>,
}

impl OutcomeSubspace {
    pub fn spin(&self) -> Spin {
        self.spin
    }

    pub fn m_prime(&self) -> MagneticQuantumNumber {
        self.m_prime
    }

    pub fn direction(&self) -> BlochPoint {
        self.direction
    }

    pub fn dim(&self) -> usize {
        self.patterns.len()
    }

    pub fn patterns(&self) -> &[TensorIndex] {
        &self.patterns
    }

    pub fn basis_vector(&self, k: usize) -> TensorVector {
        let factors: Vec<Qubit> = self.patterns[k].0.iter().map(|l| Qubit::coherent(*l, &self.direction)).collect();
        TensorVector::product(&factors).expect("slot count checked at construction")
    }

    pub fn basis(&self) -> Vec<TensorVector> {
        (0..self.dim()).map(|k| self.basis_vector(k)).collect()
    }
}

pub fn outcome_subspace(spin: Spin, m_prime: MagneticQuantumNumber, direction: &BlochPoint) -> Result<OutcomeSubspace> {
    if m_prime.spin() != spin {
        return Err(Error::InvalidMagnetic { twice_s: spin.twice(), twice_m: m_prime.twice() });
    }
    let n = spin.twice() as usize;
    if n > MAX_DENSE_SLOTS {
        return Err(Error::Capacity(format!("{n} tensor slots (max {MAX_DENSE_SLOTS})")));
    }
    let mut ids = vec![0usize; m_prime.s_plus_m() as usize];
    ids.extend(std::iter::repeat_n(1usize, m_prime.s_minus_m() as usize));
    let mut patterns = Vec::new();
    for_each_arrangement(&ids, |order| {
        patterns.push(TensorIndex(order.iter().map(|&g| Label::from_bit(g)).collect()));
    });
    Ok(OutcomeSubspace { spin, m_prime, direction: *direction, patterns })
}

/// Squared norm of the orthogonal projection of `state` onto `sub`.
pub fn projection_probability(state: &SymmetricTensorState, sub: &OutcomeSubspace) -> Result<f64> {
    if state.spin != sub.spin {
        return Err(Error::DimensionMismatch { expected: sub.spin.dim(), actual: state.spin.dim() });
    }
    let mut total = 0.0;
    for k in 0..sub.dim() {
        total += sub.basis_vector(k).inner(&state.vector)?.norm_sqr();
    }
    Ok(total)
}

/// `a_k = (S+M')!/((S+M-k)!(M'-M+k)!) * (S-M')!/(k!(S-M'-k)!)`, the number of orderings
/// whose overlap with a fixed outcome product has exponents `b_{+-} = k`.
pub fn permutation_overlap_coefficient(
    spin: Spin,
    m: MagneticQuantumNumber,
    m_prime: MagneticQuantumNumber,
    k: i64,
) -> Result<u128> {
    let (lo, hi) = k_range(spin, m, m_prime)?;
    if k < lo || k > hi {
        return Err(Error::IndexOutOfRange { k, lo, hi });
    }
    let spm = m.s_plus_m() as i64;
    let spmp = m_prime.s_plus_m() as i64;
    let smmp = m_prime.s_minus_m() as i64;
    let dm = spmp - spm;
    let f = |x: i64| factorial(x as u32);
    Ok(f(spmp) / (f(spm - k) * f(dm + k)) * (f(smmp) / (f(k) * f(smmp - k))))
}

/// Admissible `k`: `max(0, M - M') <= k <= min(S - M', S + M)`.
pub fn k_range(spin: Spin, m: MagneticQuantumNumber, m_prime: MagneticQuantumNumber) -> Result<(i64, i64)> {
    for q in [m, m_prime] {
        if q.spin() != spin {
            return Err(Error::InvalidMagnetic { twice_s: spin.twice(), twice_m: q.twice() });
        }
    }
    let dm = (m_prime.twice() as i64 - m.twice() as i64) / 2;
    Ok((0.max(-dm), (m_prime.s_minus_m() as i64).min(m.s_plus_m() as i64)))
}

/// `sum_k a_k <+|+'>^{b++} <-|+'>^{b-+} <+|-'>^{b+-} <-|-'>^{b--}`: the overlap of the
/// unnormalized symmetrized `psi_M^0` with the outcome product
/// `(psi_+^{alpha,beta})^{S+M'} (psi_-^{alpha,beta})^{S-M'}`.
pub fn coefficient_overlap(
    spin: Spin,
    m: MagneticQuantumNumber,
    m_prime: MagneticQuantumNumber,
    direction: &BlochPoint,
) -> Result<Complex64> {
    let (lo, hi) = k_range(spin, m, m_prime)?;
    let up = Qubit::coherent(Label::Plus, direction);
    let down = Qubit::coherent(Label::Minus, direction);
    let spm = m.s_plus_m() as i64;
    let smmp = m_prime.s_minus_m() as i64;
    let dm = m_prime.s_plus_m() as i64 - spm;
    let mut sum = Complex64::new(0.0, 0.0);
    for k in lo..=hi {
        let a_k = permutation_overlap_coefficient(spin, m, m_prime, k)? as f64;
        let term = up.plus.powi((spm - k) as i32)
            * up.minus.powi((dm + k) as i32)
            * down.plus.powi(k as i32)
            * down.minus.powi((smmp - k) as i32);
        sum += a_k * term;
    }
    Ok(sum)
}

/// One row of the equivalence check between spin-S and tensor-product probabilities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    #[serde(rename = "S")]
    pub s: f64,
    #[serde(rename = "M")]
    pub m: f64,
    #[serde(rename = "M_prime")]
    pub m_prime: f64,
    pub alpha: f64,
    pub beta: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub delta: f64,
    pub pass: bool,
}

/// Compares `|<psi_M^0|psi_M'^{alpha,beta}>|^2` with the projection of the
/// symmetrized embedding of `psi_M^0` onto `H_{M'}^{alpha,beta}`.
pub fn verify_equivalence(
    spin: Spin,
    m: MagneticQuantumNumber,
    m_prime: MagneticQuantumNumber,
    direction: &BlochPoint,
    tol: f64,
) -> Result<EquivalenceReport> {
    let _ = k_range(spin, m, m_prime)?;
    let lhs =
        transition_probability(&SpinState::basis(m), &coherent_state(spin, m_prime, &EulerAngles::from(*direction))?)?;
    let rhs = projection_probability(&coherent_embedding(m)?, &outcome_subspace(spin, m_prime, direction)?)?;
    let delta = (lhs - rhs).abs();
    Ok(EquivalenceReport {
        s: spin.value(),
        m: m.value(),
        m_prime: m_prime.value(),
        alpha: direction.alpha(),
        beta: direction.beta(),
        lhs,
        rhs,
        delta,
        pass: delta < tol,
    })
}
