//! Roots of a complex polynomial given by its coefficients.
//!
//! Zero coefficients at both ends are stripped exactly. Groups of roots whose
//! magnitudes are far apart (read off the Newton polygon) are separated into
//! exact factors first. Each remaining factor is solved by companion matrix
//! eigenvalues (complex Schur form) in a variable scaling that puts its
//! geometric mean root magnitude at 1, with a backward-error certified
//! treatment of clustered (multiple) roots.

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;

use crate::{Error, Result};

/// Root multiset of `sum_p coeffs[p] x^p` seen as a polynomial of formal degree `coeffs.len() - 1`.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct RootSet {
    pub finite: Vec<Complex64>,
    pub at_zero: usize,
    pub at_infinity: usize,
}

const CLUSTER_RADII: [f64; 8] = [0.5, 0.25, 0.1, 5e-2, 2e-2, 1e-2, 1e-3, 1e-4];

/// Magnitude ratio across a Newton polygon corner above which the
/// polynomial is split into two factors.
const SPLIT_GAP: f64 = 1e2;

const SPLIT_ITERATIONS: usize = 200;

pub(crate) fn polynomial_roots(coeffs: &[Complex64]) -> Result<RootSet> {
    if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::ZeroPolynomial);
    }
    let lo = coeffs.iter().position(|c| *c != Complex64::new(0.0, 0.0)).ok_or(Error::ZeroPolynomial)?;
    let hi = coeffs.iter().rposition(|c| *c != Complex64::new(0.0, 0.0)).expect("nonzero exists");
    let core = &coeffs[lo..=hi];
    let mut set = RootSet { finite: Vec::new(), at_zero: lo, at_infinity: coeffs.len() - 1 - hi };
    if core.len() > 1 {
        let inner = split_roots(core)?;
        set.finite = inner.finite;
        set.at_zero += inner.at_zero;
        set.at_infinity += inner.at_infinity;
    }
    Ok(set)
}

/// Roots of `core` (nonzero end coefficients), splitting off groups of very
/// different magnitude as exact factors before solving each one.
fn split_roots(core: &[Complex64]) -> Result<RootSet> {
    let Some((k, ln_mid)) = widest_corner(core) else {
        return Ok(RootSet { finite: solve_single(core)?, at_zero: 0, at_infinity: 0 });
    };
    let q = rescaled(core, ln_mid);
    let Some((low, high)) = split_factor(&q, k) else {
        return Ok(RootSet { finite: solve_single(core)?, at_zero: 0, at_infinity: 0 });
    };
    let scale = ln_mid.exp();
    let mut out = RootSet { finite: Vec::new(), at_zero: 0, at_infinity: 0 };
    for factor in [low, high] {
        let part = polynomial_roots(&factor)?;
        out.finite.extend(part.finite.into_iter().map(|y| y * scale));
        // underflow in the rescaled factors
        out.at_zero += part.at_zero;
        out.at_infinity += part.at_infinity;
    }
    Ok(out)
}

/// The Newton polygon corner `k` of `ln |c_p|` with the largest jump in root
/// log-magnitude, and the log-magnitude in the middle of that jump, when the
/// jump exceeds [`SPLIT_GAP`].
fn widest_corner(core: &[Complex64]) -> Option<(usize, f64)> {
    let mut hull: Vec<(f64, f64)> = Vec::new();
    for (p, c) in core.iter().enumerate().filter(|(_, c)| c.norm() > 0.0) {
        let q = (p as f64, c.norm().ln());
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            if (b.0 - a.0) * (q.1 - a.1) - (b.1 - a.1) * (q.0 - a.0) >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(q);
    }
    let mu: Vec<f64> = hull.windows(2).map(|w| -(w[1].1 - w[0].1) / (w[1].0 - w[0].0)).collect();
    let (j, jump) = mu.windows(2).map(|w| w[1] - w[0]).enumerate().max_by(|a, b| a.1.total_cmp(&b.1))?;
    (jump > SPLIT_GAP.ln()).then(|| (hull[j + 1].0 as usize, (mu[j] + mu[j + 1]) / 2.0))
}

/// Factors `q = low * high` with `low` monic of degree `k` carrying the roots
/// inside the unit circle, by alternating division from the top (for `high`)
/// and power-series division from the bottom (for `low`).
fn split_factor(q: &[Complex64], k: usize) -> Option<(Vec<Complex64>, Vec<Complex64>)> {
    let d = q.len() - 1;
    let mut low: Vec<Complex64> = q[..=k].iter().map(|c| c / q[k]).collect();
    for _ in 0..SPLIT_ITERATIONS {
        let high = quotient(q, &low);
        if high[0].norm() == 0.0 {
            return None;
        }
        // q / high as a power series, first k + 1 terms
        let mut next = vec![Complex64::new(0.0, 0.0); k + 1];
        for j in 0..=k {
            let mut acc = q[j];
            for i in 0..j {
                if j - i <= d - k {
                    acc -= next[i] * high[j - i];
                }
            }
            next[j] = acc / high[0];
        }
        let lead = next[k];
        if lead.norm() == 0.0 || !lead.re.is_finite() || !lead.im.is_finite() {
            return None;
        }
        next.iter_mut().for_each(|c| *c /= lead);
        let change = next.iter().zip(&low).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        low = next;
        let size = low.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if change <= 4.0 * f64::EPSILON * size {
            let high = quotient(q, &low);
            return Some((low, high));
        }
    }
    None
}

/// Quotient of `q` by the monic `low`, remainder dropped.
fn quotient(q: &[Complex64], low: &[Complex64]) -> Vec<Complex64> {
    let (d, k) = (q.len() - 1, low.len() - 1);
    let mut rem = q.to_vec();
    let mut high = vec![Complex64::new(0.0, 0.0); d - k + 1];
    for i in (0..=d - k).rev() {
        let t = rem[i + k];
        high[i] = t;
        for (j, l) in low.iter().enumerate() {
            rem[i + j] -= t * l;
        }
    }
    high
}

/// Companion eigenvalues in the geometric-mean scaling, certified cluster
/// centroids for multiple roots and a Newton polish of the simple ones.
fn solve_single(core: &[Complex64]) -> Result<Vec<Complex64>> {
    let degree = core.len() - 1;
    let ln_scale = (core[0].norm().ln() - core[degree].norm().ln()) / degree as f64;
    let scaled = rescaled(core, ln_scale);
    let lead = scaled[degree];
    let monic: Vec<Complex64> = scaled.iter().map(|c| c / lead).collect();
    let mut ys = companion_eigenvalues(&monic)?;
    let fixed = merge_clusters(&monic, &mut ys);
    for (y, is_fixed) in ys.iter_mut().zip(&fixed) {
        if !is_fixed {
            *y = newton_step(&monic, *y);
        }
    }
    let scale = ln_scale.exp();
    Ok(ys.into_iter().map(|y| y * scale).collect())
}

/// `coeffs` in the variable `y = x / exp(ln_scale)`, largest coefficient of unit modulus.
fn rescaled(coeffs: &[Complex64], ln_scale: f64) -> Vec<Complex64> {
    let logs: Vec<f64> = coeffs
        .iter()
        .enumerate()
        .map(|(p, c)| if c.norm() == 0.0 { f64::NEG_INFINITY } else { c.norm().ln() + p as f64 * ln_scale })
        .collect();
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    coeffs.iter().zip(&logs).map(|(c, l)| if c.norm() == 0.0 { *c } else { c / c.norm() * (l - top).exp() }).collect()
}

/// `monic[p]` is the coefficient of `y^p`, `monic[degree] = 1`.
fn companion_eigenvalues(monic: &[Complex64]) -> Result<Vec<Complex64>> {
    let d = monic.len() - 1;
    if d == 1 {
        return Ok(vec![-monic[0]]);
    }
    let mut m = DMatrix::<Complex64>::zeros(d, d);
    for i in 1..d {
        m[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..d {
        m[(i, d - 1)] = -monic[i];
    }
    let schur = Schur::try_new(m, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Capacity("companion eigenvalue iteration did not converge".into()))?;
    let t = schur.unpack().1;
    Ok((0..d).map(|i| t[(i, i)]).collect())
}

fn eval(coeffs: &[Complex64], y: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        dp = dp * y + p;
        p = p * y + c;
    }
    (p, dp)
}

fn newton_step(coeffs: &[Complex64], y: Complex64) -> Complex64 {
    let (p, dp) = eval(coeffs, y);
    if dp.norm() == 0.0 {
        return y;
    }
    let next = y - p / dp;
    if next.re.is_finite() && next.im.is_finite() && eval(coeffs, next).0.norm() < p.norm() {
        next
    } else {
        y
    }
}

fn derivative(coeffs: &[Complex64], order: usize) -> Vec<Complex64> {
    let mut out = coeffs.to_vec();
    for _ in 0..order {
        out = out.iter().enumerate().skip(1).map(|(p, c)| c * p as f64).collect();
    }
    out
}

/// Coefficients (ascending power) of `prod_k (y - roots[k])`.
#[cfg(test)]
fn expand_monic(roots: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(1.0, 0.0)];
    for r in roots {
        let mut next = vec![Complex64::new(0.0, 0.0); out.len() + 1];
        for (p, c) in out.iter().enumerate() {
            next[p + 1] += c;
            next[p] -= c * r;
        }
        out = next;
    }
    out
}

/// Componentwise relative residual `|q(y)| / sum_p |q_p| |y|^p`.
fn relative_residual(q: &[Complex64], y: Complex64) -> f64 {
    let scale: f64 = q.iter().rev().fold(0.0, |acc, c| acc * y.norm() + c.norm());
    if scale == 0.0 {
        return 0.0;
    }
    eval(q, y).0.norm() / scale
}

/// Tolerance on the relative residuals of `p, p', ..., p^(m-1)` at a merged centroid.
const MULTIPLE_ROOT_RESIDUAL: f64 = 1e-13;

/// Replaces clusters that are numerically one multiple root by a common value.
///
/// A cluster of size `m` is replaced by the root of `p^(m-1)` near its
/// centroid, and accepted only if `p` and its first `m - 1` derivatives all
/// vanish there to rounding level. Returns flags marking the replaced roots.
fn merge_clusters(monic: &[Complex64], ys: &mut [Complex64]) -> Vec<bool> {
    let mut fixed = vec![false; ys.len()];
    let derivatives: Vec<Vec<Complex64>> = (0..ys.len()).map(|k| derivative(monic, k)).collect();
    for radius in CLUSTER_RADII {
        for cluster in single_linkage(ys, &fixed, radius).into_iter().filter(|c| c.len() >= 2) {
            let m = cluster.len();
            let mut centroid = cluster.iter().map(|&i| ys[i]).sum::<Complex64>() / m as f64;
            for _ in 0..4 {
                centroid = newton_step(&derivatives[m - 1], centroid);
            }
            if derivatives[..m].iter().all(|q| relative_residual(q, centroid) <= MULTIPLE_ROOT_RESIDUAL) {
                for &i in &cluster {
                    ys[i] = centroid;
                    fixed[i] = true;
                }
            }
        }
    }
    fixed
}

fn single_linkage(ys: &[Complex64], fixed: &[bool], radius: f64) -> Vec<Vec<usize>> {
    let free: Vec<usize> = (0..ys.len()).filter(|&i| !fixed[i]).collect();
    let mut parent: Vec<usize> = (0..ys.len()).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        parent[i] = r;
        r
    }
    for (a, &i) in free.iter().enumerate() {
        for &j in &free[a + 1..] {
            let reach = radius * 1f64.max(ys[i].norm()).max(ys[j].norm());
            if (ys[i] - ys[j]).norm() <= reach {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                parent[ri] = rj;
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for &i in &free {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    groups.into_values().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_polynomial_is_rejected() {
        assert_eq!(polynomial_roots(&[c(0.0, 0.0); 3]), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn poles_are_counted_exactly() {
        // x^2 with formal degree 3: two roots at zero, one at infinity
        let r = polynomial_roots(&[c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert_eq!((r.at_zero, r.at_infinity, r.finite.len()), (2, 1, 0));
    }

    #[test]
    fn quadratic_roots() {
        // (x - 1)(x + 2i) = x^2 + (2i - 1) x - 2i
        let r = polynomial_roots(&[c(0.0, -2.0), c(-1.0, 2.0), c(1.0, 0.0)]).unwrap();
        let mut found = r.finite.clone();
        found.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        assert!((found[0] - c(0.0, -2.0)).norm() < 1e-13);
        assert!((found[1] - c(1.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn high_multiplicity_root_is_recovered() {
        let root = c(0.3, -1.7);
        let mut roots = vec![root; 7];
        roots.push(c(-2.0, 0.5));
        let coeffs = expand_monic(&roots);
        let r = polynomial_roots(&coeffs).unwrap();
        let close = r.finite.iter().filter(|y| (*y - root).norm() < 1e-9).count();
        assert_eq!(close, 7, "{:?}", r.finite);
    }

    #[test]
    fn distinct_close_roots_are_not_merged() {
        let roots = vec![c(1.0, 0.0), c(1.0 + 1e-3, 0.0), c(-0.5, 0.2)];
        let r = polynomial_roots(&expand_monic(&roots)).unwrap();
        for want in &roots {
            assert!(r.finite.iter().any(|y| (y - want).norm() < 1e-9));
        }
    }

    #[test]
    fn roots_of_very_different_magnitude() {
        let roots = vec![c(1e-15, 2e-15), c(-3e-16, 0.0), c(2e15, -1e15), c(0.5, 0.5)];
        let r = polynomial_roots(&expand_monic(&roots)).unwrap();
        for want in &roots {
            assert!(r.finite.iter().any(|y| (y - want).norm() < 1e-12 * want.norm()), "{want} {:?}", r.finite);
        }
    }

    #[test]
    fn multiple_roots_of_very_different_magnitude() {
        let small = c(1e-4, -2e-4);
        let large = c(-3e4, 1e4);
        let mut roots = vec![small; 3];
        roots.extend(vec![large; 5]);
        let r = polynomial_roots(&expand_monic(&roots)).unwrap();
        assert_eq!(r.finite.iter().filter(|y| (*y - small).norm() < 1e-12 * small.norm()).count(), 3, "{:?}", r.finite);
        assert_eq!(r.finite.iter().filter(|y| (*y - large).norm() < 1e-12 * large.norm()).count(), 5, "{:?}", r.finite);
    }

    #[test]
    fn two_nearby_multiple_roots() {
        let (a, b) = (c(0.86, 0.58), c(0.70, 0.44));
        let mut roots = vec![a; 5];
        roots.push(b);
        roots.extend(vec![c(-1.0, 0.3); 2]);
        let r = polynomial_roots(&expand_monic(&roots)).unwrap();
        for want in &roots {
            assert!(r.finite.iter().any(|y| (y - want).norm() < 1e-10), "{want} {:?}", r.finite);
        }
    }

    #[test]
    fn degree_zero_core() {
        let r = polynomial_roots(&[c(0.0, 0.0), c(3.0, 1.0)]).unwrap();
        assert_eq!((r.at_zero, r.at_infinity, r.finite.len()), (1, 0, 0));
    }
}
