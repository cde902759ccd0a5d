//! Binomials, logarithms and binary entropy.
//!
//! Binomial logarithms go through exact `u128` arithmetic while the value fits
//! and fall back to log-gamma beyond that, so powers of two stay exact.

/// `C(n, k)` exactly, or `None` on overflow.
pub fn binomial(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) after the multiplication
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

/// `ln C(n, k)`; `-inf` when `k > n`.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    match binomial(n, k) {
        Some(c) => libm::log(c as f64),
        None => {
            libm::lgamma(n as f64 + 1.0)
                - libm::lgamma(k as f64 + 1.0)
                - libm::lgamma((n - k) as f64 + 1.0)
        }
    }
}

/// `log2 C(n, k)`; `-inf` when `k > n`.
pub fn log2_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    match binomial(n, k) {
        Some(c) => libm::log2(c as f64),
        None => ln_binomial(n, k) / core::f64::consts::LN_2,
    }
}

/// `H(p) = −p log2 p − (1−p) log2(1−p)` with `H(0) = H(1) = 0`.
pub fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -p * libm::log2(p) - (1.0 - p) * libm::log2(1.0 - p)
}

/// Inverse of `H` on `[0, 1/2]`, by bisection to `tol`.
///
/// `h` is clamped into `[0, 1]`.
pub fn inverse_binary_entropy(h: f64, tol: f64) -> f64 {
    if h <= 0.0 {
        return 0.0;
    }
    if h >= 1.0 {
        return 0.5;
    }
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if binary_entropy(mid) >= h {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}
