//! Exact integer factorials and binomials for the spin ranges used here.

/// `n!` for `n <= 34` (the largest factorial representable in `u128`).
pub fn factorial(n: u32) -> u128 {
    assert!(n <= 34, "factorial({n}) overflows u128");
    (1..=n as u128).product()
}

pub fn factorial_f64(n: u32) -> f64 {
    factorial(n) as f64
}

/// Binomial coefficient `C(n, k)`, zero when `k > n`.
pub fn binomial(n: u32, k: u32) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k as u128 {
        // exact: acc * (n - i) is divisible by (i + 1)
        acc = acc * (n as u128 - i) / (i + 1);
    }
    acc
}
