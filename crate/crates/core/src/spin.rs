//! Spin quantum numbers, Euler rotations and coherent spin states.
//!
//! Every amplitude vector and matrix in this crate is indexed by the
//! magnetic quantum number in ascending order, `i = -S, -S+1, ..., S`.
//! Spin-1/2 factors inside tensor products use [`Qubit`], which stores its
//! two components by label instead of by position.

use std::f64::consts::{PI, TAU};
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::combinatorics::factorial_f64;
use crate::{Error, Result};

/// Largest supported `2S`; keeps every factorial exact in `u128`.
pub const MAX_TWICE_SPIN: u32 = 20;

/// Ray-equality threshold used throughout: `|<a|b>|^2 >= 1 - RAY_TOLERANCE`.
pub const RAY_TOLERANCE: f64 = 1e-10;

const ANGLE_SLACK: f64 = 1e-12;

/// Spin quantum number `S`, stored as `2S`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Spin {
    twice_s: u32,
}

impl Spin {
    pub fn from_twice(twice_s: u32) -> Result<Self> {
        if twice_s == 0 || twice_s > MAX_TWICE_SPIN {
            return Err(Error::InvalidSpin(twice_s));
        }
        Ok(Self { twice_s })
    }

    pub fn half() -> Self {
        Self { twice_s: 1 }
    }

    pub fn twice(self) -> u32 {
        self.twice_s
    }

    pub fn value(self) -> f64 {
        self.twice_s as f64 / 2.0
    }

    /// Dimension `2S + 1` of the state space.
    pub fn dim(self) -> usize {
        self.twice_s as usize + 1
    }

    /// All magnetic quantum numbers in ascending order.
    pub fn magnetic_numbers(self) -> impl DoubleEndedIterator<Item = MagneticQuantumNumber> {
        let s = self.twice_s as i32;
        (0..=self.twice_s as i32).map(move |n| MagneticQuantumNumber { twice_s: self.twice_s, twice_m: 2 * n - s })
    }

    pub fn max_m(self) -> MagneticQuantumNumber {
        MagneticQuantumNumber { twice_s: self.twice_s, twice_m: self.twice_s as i32 }
    }

    /// Magnetic quantum number `M` from its doubled value.
    pub fn m(self, twice_m: i32) -> Result<MagneticQuantumNumber> {
        MagneticQuantumNumber::new(self, twice_m)
    }
}

impl TryFrom<u32> for Spin {
    type Error = Error;

    fn try_from(value: u32) -> Result<Self> {
        Spin::from_twice(value)
    }
}

impl From<Spin> for u32 {
    fn from(value: Spin) -> Self {
        value.twice_s
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.twice_s.is_multiple_of(2) {
            write!(f, "{}", self.twice_s / 2)
        } else {
            write!(f, "{}/2", self.twice_s)
        }
    }
}

/// Magnetic quantum number `M` of a given spin, stored as `2M`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MagneticQuantumNumber {
    twice_s: u32,
    twice_m: i32,
}

impl MagneticQuantumNumber {
    pub fn new(spin: Spin, twice_m: i32) -> Result<Self> {
        let s = spin.twice() as i32;
        if twice_m.abs() > s || (twice_m - s).rem_euclid(2) != 0 {
            return Err(Error::InvalidMagnetic { twice_s: spin.twice(), twice_m });
        }
        Ok(Self { twice_s: spin.twice(), twice_m })
    }

    pub fn twice(self) -> i32 {
        self.twice_m
    }

    pub fn value(self) -> f64 {
        self.twice_m as f64 / 2.0
    }

    pub fn spin(self) -> Spin {
        Spin { twice_s: self.twice_s }
    }

    /// `S + M`, the number of `+` factors in the Majorana picture.
    pub fn s_plus_m(self) -> u32 {
        ((self.twice_s as i32 + self.twice_m) / 2) as u32
    }

    /// `S - M`.
    pub fn s_minus_m(self) -> u32 {
        ((self.twice_s as i32 - self.twice_m) / 2) as u32
    }

    /// Position of this `M` in an ascending amplitude vector.
    pub fn index(self) -> usize {
        self.s_plus_m() as usize
    }

    pub fn negated(self) -> Self {
        Self { twice_s: self.twice_s, twice_m: -self.twice_m }
    }
}

impl fmt::Display for MagneticQuantumNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.twice_m % 2 == 0 {
            write!(f, "{}", self.twice_m / 2)
        } else {
            write!(f, "{}/2", self.twice_m)
        }
    }
}

/// Reduces an angle to `[0, 2pi)`.
pub fn normalize_angle(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

fn check_polar(beta: f64) -> Result<f64> {
    if !beta.is_finite() || !(-ANGLE_SLACK..=PI + ANGLE_SLACK).contains(&beta) {
        return Err(Error::InvalidAngle { name: "beta", value: beta });
    }
    Ok(beta.clamp(0.0, PI))
}

fn check_azimuth(name: &'static str, x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::InvalidAngle { name, value: x });
    }
    Ok(normalize_angle(x))
}

/// Euler angles of an active rotation `e^{-i alpha Jz} e^{-i beta Jy} e^{-i gamma Jz}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EulerAngles {
    alpha: f64,
    beta: f64,
    gamma: f64,
}

impl EulerAngles {
    /// `alpha` and `gamma` are reduced mod 2pi; `beta` outside `[0, pi]` is rejected.
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        Ok(Self {
            alpha: check_azimuth("alpha", alpha)?,
            beta: check_polar(beta)?,
            gamma: check_azimuth("gamma", gamma)?,
        })
    }

    pub fn direction(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(alpha, beta, 0.0)
    }

    pub fn identity() -> Self {
        Self { alpha: 0.0, beta: 0.0, gamma: 0.0 }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// 3x3 rotation matrix `Rz(alpha) Ry(beta) Rz(gamma)` acting on sphere points.
    pub fn rotation3(&self) -> [[f64; 3]; 3] {
        let (sa, ca) = self.alpha.sin_cos();
        let (sb, cb) = self.beta.sin_cos();
        let (sg, cg) = self.gamma.sin_cos();
        let rz = |s: f64, c: f64| [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]];
        let ry = [[cb, 0.0, sb], [0.0, 1.0, 0.0], [-sb, 0.0, cb]];
        mat3_mul(&mat3_mul(&rz(sa, ca), &ry), &rz(sg, cg))
    }
}

impl From<BlochPoint> for EulerAngles {
    fn from(p: BlochPoint) -> Self {
        Self { alpha: p.alpha, beta: p.beta, gamma: 0.0 }
    }
}

fn mat3_mul(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut out = [[0.0; 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

/// A point on the unit sphere in polar coordinates.
///
/// At the poles the azimuth is meaningless and is stored as `0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPoint", into = "RawPoint")]
pub struct BlochPoint {
    alpha: f64,
    beta: f64,
}

#[derive(Serialize, Deserialize)]
struct RawPoint {
    alpha: f64,
    beta: f64,
}

impl TryFrom<RawPoint> for BlochPoint {
    type Error = Error;

    fn try_from(p: RawPoint) -> Result<Self> {
        BlochPoint::new(p.alpha, p.beta)
    }
}

impl From<BlochPoint> for RawPoint {
    fn from(p: BlochPoint) -> Self {
        RawPoint { alpha: p.alpha, beta: p.beta }
    }
}

impl BlochPoint {
    pub const NORTH: BlochPoint = BlochPoint { alpha: 0.0, beta: 0.0 };
    pub const SOUTH: BlochPoint = BlochPoint { alpha: 0.0, beta: PI };

    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        let beta = check_polar(beta)?;
        let alpha = check_azimuth("alpha", alpha)?;
        Ok(Self::canonical(alpha, beta))
    }

    fn canonical(alpha: f64, beta: f64) -> Self {
        if beta == 0.0 || beta == PI {
            Self { alpha: 0.0, beta }
        } else {
            Self { alpha, beta }
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn cartesian(&self) -> [f64; 3] {
        let (sa, ca) = self.alpha.sin_cos();
        let (sb, cb) = self.beta.sin_cos();
        [ca * sb, sa * sb, cb]
    }

    /// Inverse of [`cartesian`](Self::cartesian); the input need not be normalized.
    pub fn from_cartesian(v: [f64; 3]) -> Result<Self> {
        let rho = v[0].hypot(v[1]);
        let norm = rho.hypot(v[2]);
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroVector);
        }
        let beta = rho.atan2(v[2]);
        let alpha = if rho == 0.0 { 0.0 } else { normalize_angle(v[1].atan2(v[0])) };
        Ok(Self::canonical(alpha, beta))
    }

    pub fn antipode(&self) -> Self {
        Self::canonical(normalize_angle(self.alpha + PI), PI - self.beta)
    }

    /// Great-circle distance in radians.
    pub fn angular_distance(&self, other: &BlochPoint) -> f64 {
        let a = self.cartesian();
        let b = other.cartesian();
        let dot: f64 = (0..3).map(|k| a[k] * b[k]).sum();
        let cross = [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
        let cn = (cross[0] * cross[0] + cross[1] * cross[1] + cross[2] * cross[2]).sqrt();
        cn.atan2(dot)
    }

    pub fn rotated(&self, g: &EulerAngles) -> Self {
        let r = g.rotation3();
        let v = self.cartesian();
        let w = [0, 1, 2].map(|i| (0..3).map(|k| r[i][k] * v[k]).sum());
        Self::from_cartesian(w).expect("rotation preserves norm")
    }

    /// A point uniformly distributed on the sphere.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let z: f64 = rng.random_range(-1.0..1.0);
        let alpha: f64 = rng.random_range(0.0..TAU);
        Self::canonical(alpha, z.acos())
    }
}

/// Outcome label of a spin-1/2 measurement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Label {
    pub fn symbol(self) -> char {
        match self {
            Label::Plus => '+',
            Label::Minus => '-',
        }
    }

    /// Bit used for this label in tensor indices (`+` is 0).
    pub fn bit(self) -> usize {
        match self {
            Label::Plus => 0,
            Label::Minus => 1,
        }
    }

    pub fn from_bit(bit: usize) -> Self {
        if bit & 1 == 0 {
            Label::Plus
        } else {
            Label::Minus
        }
    }
}

/// A spin-1/2 vector with components labelled `+` (m = +1/2) and `-` (m = -1/2).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Qubit {
    pub plus: Complex64,
    pub minus: Complex64,
}

impl Qubit {
    pub fn new(plus: Complex64, minus: Complex64) -> Self {
        Self { plus, minus }
    }

    /// `psi_+^0` or `psi_-^0`.
    pub fn basis(label: Label) -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        match label {
            Label::Plus => Self::new(one, zero),
            Label::Minus => Self::new(zero, one),
        }
    }

    /// Outcome vectors `psi_+^{alpha,beta} = (e^{-i alpha/2} cos(beta/2), e^{i alpha/2} sin(beta/2))`
    /// and `psi_-^{alpha,beta} = (-e^{-i alpha/2} sin(beta/2), e^{i alpha/2} cos(beta/2))`.
    pub fn coherent(label: Label, direction: &BlochPoint) -> Self {
        let (s, c) = (direction.beta / 2.0).sin_cos();
        let lo = Complex64::from_polar(1.0, -direction.alpha / 2.0);
        let hi = Complex64::from_polar(1.0, direction.alpha / 2.0);
        match label {
            Label::Plus => Self::new(lo * c, hi * s),
            Label::Minus => Self::new(-lo * s, hi * c),
        }
    }

    pub fn component(&self, label: Label) -> Complex64 {
        match label {
            Label::Plus => self.plus,
            Label::Minus => self.minus,
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.plus.norm_sqr() + self.minus.norm_sqr()
    }

    /// `<self|other>`, antilinear in `self`.
    pub fn inner(&self, other: &Qubit) -> Complex64 {
        self.plus.conj() * other.plus + self.minus.conj() * other.minus
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_sqr().sqrt();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::ZeroVector);
        }
        Ok(Self::new(self.plus / n, self.minus / n))
    }

    /// The unique sphere point whose `psi_+` is ray-equal to this vector.
    pub fn bloch_point(&self) -> Result<BlochPoint> {
        let q = self.normalized()?;
        let (a, b) = (q.plus.norm(), q.minus.norm());
        let beta = 2.0 * b.atan2(a);
        if a == 0.0 || b == 0.0 {
            return BlochPoint::new(0.0, beta);
        }
        BlochPoint::new(q.minus.arg() - q.plus.arg(), beta)
    }
}

/// A unit vector in `C^{2S+1}`, amplitudes ascending in `M`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinState {
    spin: Spin,
    amplitudes: Vec<Complex64>,
}

impl SpinState {
    /// Normalizes `amplitudes`; fails on a wrong length or a zero vector.
    pub fn new(spin: Spin, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != spin.dim() {
            return Err(Error::DimensionMismatch { expected: spin.dim(), actual: amplitudes.len() });
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroVector);
        }
        let amplitudes = amplitudes.into_iter().map(|a| a / norm).collect();
        Ok(Self { spin, amplitudes })
    }

    /// `psi_M^0`.
    pub fn basis(m: MagneticQuantumNumber) -> Self {
        let spin = m.spin();
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); spin.dim()];
        amplitudes[m.index()] = Complex64::new(1.0, 0.0);
        Self { spin, amplitudes }
    }

    /// Haar-random state (normalized complex Gaussian vector).
    pub fn random<R: Rng + ?Sized>(spin: Spin, rng: &mut R) -> Self {
        loop {
            let amps: Vec<Complex64> = (0..spin.dim())
                .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                .collect();
            if let Ok(s) = Self::new(spin, amps) {
                return s;
            }
        }
    }

    pub fn spin(&self) -> Spin {
        self.spin
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, m: MagneticQuantumNumber) -> Complex64 {
        self.amplitudes[m.index()]
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &SpinState) -> Result<Complex64> {
        if self.spin != other.spin {
            return Err(Error::DimensionMismatch { expected: self.spin.dim(), actual: other.spin.dim() });
        }
        Ok(self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum())
    }

    /// True when the two rays coincide: `|<a|b>|^2 >= 1 - tol`.
    pub fn ray_equal(&self, other: &SpinState, tol: f64) -> bool {
        matches!(transition_probability(self, other), Ok(p) if p >= 1.0 - tol)
    }

    /// The spin-1/2 components as a labelled [`Qubit`].
    pub fn as_qubit(&self) -> Result<Qubit> {
        if self.spin.twice() != 1 {
            return Err(Error::DimensionMismatch { expected: 2, actual: self.spin.dim() });
        }
        Ok(Qubit::new(self.amplitudes[1], self.amplitudes[0]))
    }

    pub fn from_qubit(q: &Qubit) -> Result<Self> {
        Self::new(Spin::half(), vec![q.minus, q.plus])
    }
}

/// Wigner small-d element `d^S_{row,col}(beta)` from the closed-form k-sum.
fn small_d(twice_s: u32, twice_row: i32, twice_col: i32, beta: f64) -> f64 {
    let s2 = twice_s as i64;
    let sp_row = (s2 + twice_row as i64) / 2;
    let sm_row = (s2 - twice_row as i64) / 2;
    let sp_col = (s2 + twice_col as i64) / 2;
    let sm_col = (s2 - twice_col as i64) / 2;
    let dm = (twice_row as i64 - twice_col as i64) / 2;
    let c = (factorial_f64(sp_row as u32)
        * factorial_f64(sm_row as u32)
        * factorial_f64(sp_col as u32)
        * factorial_f64(sm_col as u32))
    .sqrt();
    let (sh, ch) = (beta / 2.0).sin_cos();
    let k_lo = 0.max(-dm);
    let k_hi = sm_row.min(sp_col);
    let mut sum = 0.0;
    for k in k_lo..=k_hi {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let cos_pow = (s2 - dm - 2 * k) as i32;
        let sin_pow = (dm + 2 * k) as i32;
        let den = factorial_f64((sm_row - k) as u32)
            * factorial_f64((sp_col - k) as u32)
            * factorial_f64((k + dm) as u32)
            * factorial_f64(k as u32);
        sum += sign * ch.powi(cos_pow) * (-sh).powi(sin_pow) / den;
    }
    c * sum
}

/// Matrix of an active rotation on `C^{2S+1}`, ascending in `M` on both axes.
#[derive(Clone, Debug, PartialEq)]
pub struct RotationMatrix {
    spin: Spin,
    matrix: DMatrix<Complex64>,
}

impl RotationMatrix {
    pub fn spin(&self) -> Spin {
        self.spin
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.matrix
    }

    /// Element `<row| M^S |col>` addressed by magnetic quantum numbers.
    pub fn entry(&self, row: MagneticQuantumNumber, col: MagneticQuantumNumber) -> Complex64 {
        self.matrix[(row.index(), col.index())]
    }

    pub fn apply(&self, state: &SpinState) -> Result<SpinState> {
        if state.spin != self.spin {
            return Err(Error::DimensionMismatch { expected: self.spin.dim(), actual: state.spin.dim() });
        }
        let v = nalgebra::DVector::from_column_slice(&state.amplitudes);
        SpinState::new(self.spin, (&self.matrix * v).as_slice().to_vec())
    }
}

/// `M^S_{alpha,beta,gamma}` with entries `e^{-i m' alpha} d^S_{m'm}(beta) e^{-i m gamma}`.
pub fn wigner_matrix(spin: Spin, angles: &EulerAngles) -> RotationMatrix {
    let dim = spin.dim();
    let ms: Vec<_> = spin.magnetic_numbers().collect();
    let matrix = DMatrix::from_fn(dim, dim, |r, c| {
        let (row, col) = (ms[r], ms[c]);
        let phase = -(row.value() * angles.alpha + col.value() * angles.gamma);
        Complex64::from_polar(small_d(spin.twice(), row.twice(), col.twice(), angles.beta), phase)
    });
    RotationMatrix { spin, matrix }
}

/// `psi_M^{alpha,beta,gamma} = M^S psi_M^0`.
pub fn coherent_state(spin: Spin, m: MagneticQuantumNumber, angles: &EulerAngles) -> Result<SpinState> {
    if m.spin() != spin {
        return Err(Error::InvalidMagnetic { twice_s: spin.twice(), twice_m: m.twice() });
    }
    let col = m.index();
    let w = wigner_matrix(spin, angles);
    Ok(SpinState { spin, amplitudes: w.matrix.column(col).iter().copied().collect() })
}

/// `|<a|b>|^2`.
pub fn transition_probability(a: &SpinState, b: &SpinState) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr().min(1.0))
}

/// `P_{M,M'}(beta)` evaluated from the closed-form k-sum with
/// `max(0, M - M') <= k <= min(S - M', S + M)`.
pub fn coherent_transition_closed_form(
    spin: Spin,
    m: MagneticQuantumNumber,
    m_prime: MagneticQuantumNumber,
    beta: f64,
) -> Result<f64> {
    for q in [m, m_prime] {
        if q.spin() != spin {
            return Err(Error::InvalidMagnetic { twice_s: spin.twice(), twice_m: q.twice() });
        }
    }
    if !beta.is_finite() {
        return Err(Error::InvalidAngle { name: "beta", value: beta });
    }
    let s = spin.twice() as i64;
    let sp_m = m.s_plus_m() as i64;
    let sm_m = m.s_minus_m() as i64;
    let sp_mp = m_prime.s_plus_m() as i64;
    let sm_mp = m_prime.s_minus_m() as i64;
    let dm = (m_prime.twice() as i64 - m.twice() as i64) / 2;
    let c = (factorial_f64(sp_m as u32)
        * factorial_f64(sm_m as u32)
        * factorial_f64(sp_mp as u32)
        * factorial_f64(sm_mp as u32))
    .sqrt();
    let (sh, ch) = (beta / 2.0).sin_cos();
    let mut sum = 0.0;
    for k in 0.max(-dm)..=sm_mp.min(sp_m) {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let den = factorial_f64((sm_mp - k) as u32)
            * factorial_f64((sp_m - k) as u32)
            * factorial_f64((k + dm) as u32)
            * factorial_f64(k as u32);
        sum += sign * ch.powi((s - dm - 2 * k) as i32) * (-sh).powi((dm + 2 * k) as i32) / den;
    }
    Ok((c * sum).powi(2).min(1.0))
}

/// Sphere point of a spin-1/2 state.
pub fn bloch_of_state(s: &SpinState) -> Result<BlochPoint> {
    s.as_qubit()?.bloch_point()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn spin_validation() {
        assert!(Spin::from_twice(0).is_err());
        assert!(Spin::from_twice(21).is_err());
        let s = Spin::from_twice(3).unwrap();
        assert_eq!(s.dim(), 4);
        assert_eq!(s.to_string(), "3/2");
        let ms: Vec<i32> = s.magnetic_numbers().map(|m| m.twice()).collect();
        assert_eq!(ms, vec![-3, -1, 1, 3]);
        assert!(s.m(2).is_err());
        assert!(s.m(5).is_err());
        assert_eq!(s.m(-1).unwrap().index(), 1);
    }

    #[test]
    fn angle_rules() {
        assert!(EulerAngles::new(0.0, -0.1, 0.0).is_err());
        assert!(EulerAngles::new(0.0, PI + 0.1, 0.0).is_err());
        assert!(EulerAngles::new(f64::NAN, 0.0, 0.0).is_err());
        let a = EulerAngles::new(-0.5, 1.0, 7.0).unwrap();
        assert!((a.alpha() - (TAU - 0.5)).abs() < 1e-15);
        assert!((a.gamma() - (7.0 - TAU)).abs() < 1e-15);
        assert_eq!(normalize_angle(-1e-18), 0.0);
    }

    #[test]
    fn antipode_is_an_involution() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let p = BlochPoint::random(&mut rng);
            let q = p.antipode().antipode();
            assert!(p.angular_distance(&q) < 1e-12);
            assert!((p.angular_distance(&p.antipode()) - PI).abs() < 1e-7);
            let v = p.cartesian();
            assert!((v.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-12);
        }
        assert_eq!(BlochPoint::NORTH.antipode(), BlochPoint::SOUTH);
        assert_eq!(BlochPoint::SOUTH.antipode(), BlochPoint::NORTH);
    }

    #[test]
    fn zero_rotation_is_identity() {
        let w = wigner_matrix(Spin::half(), &EulerAngles::identity());
        let id = DMatrix::<Complex64>::identity(2, 2);
        assert!((w.matrix() - id).camax() < 1e-15);
    }

    #[test]
    fn spin_half_entries() {
        let (al, be, ga) = (0.4, 1.3, 2.2);
        let w = wigner_matrix(Spin::half(), &EulerAngles::new(al, be, ga).unwrap());
        let s = Spin::half();
        let (p, m) = (s.m(1).unwrap(), s.m(-1).unwrap());
        let i = c(0.0, 1.0);
        let pp = (-i * (al + ga) / 2.0).exp() * (be / 2.0).cos();
        let pm = -(-i * (al - ga) / 2.0).exp() * (be / 2.0).sin();
        let mp = (i * (al - ga) / 2.0).exp() * (be / 2.0).sin();
        let mm = (i * (al + ga) / 2.0).exp() * (be / 2.0).cos();
        assert!((w.entry(p, p) - pp).norm() < 1e-14);
        assert!((w.entry(p, m) - pm).norm() < 1e-14);
        assert!((w.entry(m, p) - mp).norm() < 1e-14);
        assert!((w.entry(m, m) - mm).norm() < 1e-14);
    }

    #[test]
    fn beta_zero_is_diagonal_phase() {
        let spin = Spin::from_twice(4).unwrap();
        let (al, ga) = (0.7, 1.9);
        let w = wigner_matrix(spin, &EulerAngles::new(al, 0.0, ga).unwrap());
        for r in spin.magnetic_numbers() {
            for col in spin.magnetic_numbers() {
                let expect = if r == col { Complex64::from_polar(1.0, -r.value() * (al + ga)) } else { c(0.0, 0.0) };
                assert!((w.entry(r, col) - expect).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn coherent_spin_half() {
        let s = Spin::half();
        let plus = s.m(1).unwrap();
        let north = coherent_state(s, plus, &EulerAngles::identity()).unwrap();
        assert_eq!(north.amplitude(plus), c(1.0, 0.0));
        assert_eq!(north.amplitude(plus.negated()), c(0.0, 0.0));

        let (al, be) = (2.1, 0.8);
        let st = coherent_state(s, plus, &EulerAngles::direction(al, be).unwrap()).unwrap();
        let i = c(0.0, 1.0);
        assert!((st.amplitude(plus) - (-i * al / 2.0).exp() * (be / 2.0).cos()).norm() < 1e-15);
        assert!((st.amplitude(plus.negated()) - (i * al / 2.0).exp() * (be / 2.0).sin()).norm() < 1e-15);
    }

    #[test]
    fn gamma_only_changes_phase() {
        let spin = Spin::from_twice(3).unwrap();
        let m = spin.m(1).unwrap();
        let a = coherent_state(spin, m, &EulerAngles::new(0.3, 1.2, 0.0).unwrap()).unwrap();
        let b = coherent_state(spin, m, &EulerAngles::new(0.3, 1.2, 2.5).unwrap()).unwrap();
        assert!(a.ray_equal(&b, 1e-12));
    }

    #[test]
    fn transition_and_errors() {
        let s = Spin::half();
        let plus = s.m(1).unwrap();
        let a = SpinState::basis(plus);
        let b = SpinState::basis(Spin::from_twice(2).unwrap().m(0).unwrap());
        assert!(matches!(transition_probability(&a, &b), Err(Error::DimensionMismatch { .. })));
        let beta = 1.1;
        let up = coherent_state(s, plus, &EulerAngles::direction(0.5, beta).unwrap()).unwrap();
        let down = coherent_state(s, plus.negated(), &EulerAngles::direction(0.5, beta).unwrap()).unwrap();
        assert!((transition_probability(&a, &up).unwrap() - (1.0 + beta.cos()) / 2.0).abs() < 1e-15);
        assert!((transition_probability(&a, &down).unwrap() - (1.0 - beta.cos()) / 2.0).abs() < 1e-15);
        assert!((transition_probability(&up, &up).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn closed_form_rejects_foreign_m() {
        let s1 = Spin::from_twice(2).unwrap();
        let s2 = Spin::from_twice(4).unwrap();
        assert!(coherent_transition_closed_form(s1, s1.m(0).unwrap(), s2.m(0).unwrap(), 0.3).is_err());
        assert!(coherent_transition_closed_form(s1, s1.m(0).unwrap(), s1.m(0).unwrap(), f64::NAN).is_err());
    }

    #[test]
    fn closed_form_at_zero_angle_is_kronecker() {
        for ts in 1..=8 {
            let spin = Spin::from_twice(ts).unwrap();
            for m in spin.magnetic_numbers() {
                for mp in spin.magnetic_numbers() {
                    let p = coherent_transition_closed_form(spin, m, mp, 0.0).unwrap();
                    assert_eq!(p, if m == mp { 1.0 } else { 0.0 });
                }
            }
        }
    }

    #[test]
    fn bloch_of_state_poles_and_errors() {
        let n = SpinState::new(Spin::half(), vec![c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert_eq!(bloch_of_state(&n).unwrap(), BlochPoint::NORTH);
        let s = SpinState::new(Spin::half(), vec![c(0.0, 1.0), c(0.0, 0.0)]).unwrap();
        assert_eq!(bloch_of_state(&s).unwrap(), BlochPoint::SOUTH);
        assert!(Qubit::new(c(0.0, 0.0), c(0.0, 0.0)).bloch_point().is_err());
        assert!(SpinState::new(Spin::half(), vec![c(0.0, 0.0); 2]).is_err());
        assert!(bloch_of_state(&SpinState::basis(Spin::from_twice(2).unwrap().m(0).unwrap())).is_err());
    }

    #[test]
    fn rotation3_moves_north_to_direction() {
        let p = BlochPoint::new(1.2, 0.6).unwrap();
        let q = BlochPoint::NORTH.rotated(&EulerAngles::from(p));
        assert!(p.angular_distance(&q) < 1e-14);
    }
}
