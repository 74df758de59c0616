//! Majorana stellar representation.
//!
//! A spin-S state `psi` is encoded by the polynomial
//! `K(x) = sum_i w_i psi_i x^(S-i)`. Each root `r` of `K` is one spin-1/2
//! factor `plus + minus * x` (up to scale), i.e. one point on the sphere.
//! A polynomial of formal degree 2S with degree deficiency `d` has `d` roots
//! at infinity (the north pole); `k` vanishing low-order coefficients give
//! `k` roots at zero (the south pole).
//!
//! With the weights `w_i = 1 / sqrt((S+i)!(S-i)!)` the product
//! `prod_k (plus_k + minus_k x)` of 2S identical factors reproduces the
//! coherent state of maximal spin along that point, so the map commutes
//! with rotations. The unweighted (Bacry) polynomial is kept as a separate
//! variant; its roots differ from the Majorana ones for `S >= 1`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::combinatorics::factorial_f64;
use crate::roots::{polynomial_roots, RootSet};
use crate::spin::{BlochPoint, Qubit, Spin, SpinState};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolynomialVariant {
    /// Coefficient `psi_i` at `x^(S-i)`.
    Bacry,
    /// Coefficient `psi_i / sqrt((S+i)!(S-i)!)` at `x^(S-i)`.
    Majorana,
}

impl PolynomialVariant {
    fn weight(self, spin: Spin, index: usize) -> f64 {
        match self {
            PolynomialVariant::Bacry => 1.0,
            PolynomialVariant::Majorana => {
                let plus = index as u32;
                let minus = spin.twice() - plus;
                1.0 / (factorial_f64(plus) * factorial_f64(minus)).sqrt()
            }
        }
    }
}

/// Polynomial attached to a spin state, defined up to a nonzero scalar.
///
/// `coefficients[idx]` multiplies `x^(S-i)` where `i = idx - S`, so the
/// first entry is the coefficient of `x^(2S)` and the last one the constant.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinPolynomial {
    spin: Spin,
    variant: PolynomialVariant,
    coefficients: Vec<Complex64>,
}

impl SpinPolynomial {
    pub fn new(spin: Spin, variant: PolynomialVariant, coefficients: Vec<Complex64>) -> Result<Self> {
        if coefficients.len() != spin.dim() {
            return Err(Error::DimensionMismatch { expected: spin.dim(), actual: coefficients.len() });
        }
        Ok(Self { spin, variant, coefficients })
    }

    pub fn spin(&self) -> Spin {
        self.spin
    }

    pub fn variant(&self) -> PolynomialVariant {
        self.variant
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    /// Coefficients ordered by ascending power of `x`.
    pub fn by_power(&self) -> Vec<Complex64> {
        self.coefficients.iter().rev().copied().collect()
    }

    pub fn eval(&self, x: Complex64) -> Complex64 {
        self.coefficients.iter().fold(Complex64::new(0.0, 0.0), |acc, c| acc * x + c)
    }

    /// The spin state whose polynomial this is.
    pub fn to_state(&self) -> Result<SpinState> {
        let amps =
            self.coefficients.iter().enumerate().map(|(idx, c)| c / self.variant.weight(self.spin, idx)).collect();
        SpinState::new(self.spin, amps)
    }
}

pub fn build_polynomial(s: &SpinState, variant: PolynomialVariant) -> SpinPolynomial {
    let spin = s.spin();
    let coefficients = s.amplitudes().iter().enumerate().map(|(idx, a)| a * variant.weight(spin, idx)).collect();
    SpinPolynomial { spin, variant, coefficients }
}

/// A root on the Riemann sphere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ProjectiveRoot {
    Finite(Complex64),
    Infinity,
}

/// All 2S roots of `p`, counting multiplicity, with `2S - degree` roots at infinity.
pub fn roots(p: &SpinPolynomial) -> Result<Vec<ProjectiveRoot>> {
    let mut coeffs = p.by_power();
    let top = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if top == 0.0 {
        return Err(Error::ZeroPolynomial);
    }
    coeffs.iter_mut().for_each(|c| *c /= top);
    let RootSet { finite, at_zero, at_infinity } = polynomial_roots(&coeffs)?;
    let mut out = Vec::with_capacity(p.spin.twice() as usize);
    out.extend(std::iter::repeat_n(ProjectiveRoot::Finite(Complex64::new(0.0, 0.0)), at_zero));
    out.extend(finite.into_iter().map(ProjectiveRoot::Finite));
    out.extend(std::iter::repeat_n(ProjectiveRoot::Infinity, at_infinity));
    Ok(out)
}

/// The spin-1/2 factor `plus + minus * x` (up to scale) vanishing at `r`.
pub fn factor_of_root(r: ProjectiveRoot) -> Qubit {
    match r {
        ProjectiveRoot::Finite(x) => Qubit::new(-x, Complex64::new(1.0, 0.0)),
        ProjectiveRoot::Infinity => Qubit::basis(crate::spin::Label::Plus),
    }
}

/// Root `0` is the south pole, infinity the north pole.
pub fn bloch_of_root(r: ProjectiveRoot) -> BlochPoint {
    factor_of_root(r).bloch_point().expect("factor is never zero")
}

/// Inverse of [`bloch_of_root`]: `r = -e^{-i alpha} cot(beta/2)`.
pub fn root_of_bloch(p: &BlochPoint) -> ProjectiveRoot {
    let q = Qubit::coherent(crate::spin::Label::Plus, p);
    if q.minus.norm() == 0.0 {
        ProjectiveRoot::Infinity
    } else {
        ProjectiveRoot::Finite(-q.plus / q.minus)
    }
}

/// Unordered multiset of 2S sphere points.
#[derive(Clone, Debug)]
pub struct Constellation {
    spin: Spin,
    points: Vec<BlochPoint>,
}

impl Constellation {
    pub fn new(spin: Spin, points: Vec<BlochPoint>) -> Result<Self> {
        if points.len() != spin.twice() as usize {
            return Err(Error::DimensionMismatch { expected: spin.twice() as usize, actual: points.len() });
        }
        Ok(Self { spin, points })
    }

    pub fn spin(&self) -> Spin {
        self.spin
    }

    pub fn points(&self) -> &[BlochPoint] {
        &self.points
    }

    pub fn into_points(self) -> Vec<BlochPoint> {
        self.points
    }

    /// Smallest achievable maximum angular distance over all pairings of the two multisets.
    pub fn pairing_error(&self, other: &Constellation) -> f64 {
        if self.points.len() != other.points.len() {
            return f64::INFINITY;
        }
        bottleneck_matching(&self.points, &other.points)
    }
}

impl PartialEq for Constellation {
    /// Multiset equality (exact coordinates, order-free).
    fn eq(&self, other: &Self) -> bool {
        self.spin == other.spin && self.pairing_error(other) == 0.0
    }
}

fn bottleneck_matching(a: &[BlochPoint], b: &[BlochPoint]) -> f64 {
    let n = a.len();
    if n == 0 {
        return 0.0;
    }
    let dist: Vec<Vec<f64>> = a.iter().map(|p| b.iter().map(|q| p.angular_distance(q)).collect()).collect();
    let mut thresholds: Vec<f64> = dist.iter().flatten().copied().collect();
    thresholds.sort_by(|x, y| x.total_cmp(y));
    thresholds.dedup();
    let (mut lo, mut hi) = (0, thresholds.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if perfect_matching(&dist, thresholds[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    thresholds[lo]
}

fn perfect_matching(dist: &[Vec<f64>], limit: f64) -> bool {
    let n = dist.len();
    let mut owner: Vec<Option<usize>> = vec![None; n];
    fn augment(u: usize, dist: &[Vec<f64>], limit: f64, seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for v in 0..dist.len() {
            if dist[u][v] <= limit && !seen[v] {
                seen[v] = true;
                if owner[v].is_none_or(|w| augment(w, dist, limit, seen, owner)) {
                    owner[v] = Some(u);
                    return true;
                }
            }
        }
        false
    }
    (0..n).all(|u| augment(u, dist, limit, &mut vec![false; n], &mut owner))
}

/// Constellation of `s` for the chosen polynomial variant.
pub fn constellation_of(s: &SpinState, variant: PolynomialVariant) -> Result<Constellation> {
    let points = roots(&build_polynomial(s, variant))?.into_iter().map(bloch_of_root).collect();
    Constellation::new(s.spin(), points)
}

/// Majorana constellation of `s`; invariant under a global phase of `s`.
pub fn state_to_constellation(s: &SpinState) -> Result<Constellation> {
    constellation_of(s, PolynomialVariant::Majorana)
}

/// Spin state whose polynomial (of the given variant) has the constellation's points as roots.
pub fn constellation_to_state_with(c: &Constellation, variant: PolynomialVariant) -> Result<SpinState> {
    let mut by_power = vec![Complex64::new(1.0, 0.0)];
    for p in &c.points {
        let f = Qubit::coherent(crate::spin::Label::Plus, p);
        let mut next = vec![Complex64::new(0.0, 0.0); by_power.len() + 1];
        for (k, coef) in by_power.iter().enumerate() {
            next[k] += coef * f.plus;
            next[k + 1] += coef * f.minus;
        }
        by_power = next;
    }
    by_power.reverse();
    SpinPolynomial::new(c.spin, variant, by_power)?.to_state()
}

/// Inverse of [`state_to_constellation`] up to ray equality.
pub fn constellation_to_state(c: &Constellation) -> Result<SpinState> {
    constellation_to_state_with(c, PolynomialVariant::Majorana)
}
