//! Binary entropy and its inverse on `[0, 1/2]`.

use crate::{Error, Result};

/// `h(p) = p log2(1/p) + (1-p) log2(1/(1-p))`, with `h(0) = h(1) = 0`.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain(format!(
            "entropy argument {p} outside [0, 1]"
        )));
    }
    Ok(entropy_term(p) + entropy_term(1.0 - p))
}

fn entropy_term(p: f64) -> f64 {
    if p == 0.0 {
        0.0
    } else {
        -p * p.log2()
    }
}

/// Left inverse of [`binary_entropy`] onto `[0, 1/2]`, by bisection down to
/// adjacent floating-point values.
pub fn entropy_inverse(y: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&y) {
        return Err(Error::domain(format!("entropy value {y} outside [0, 1]")));
    }
    if y == 0.0 {
        return Ok(0.0);
    }
    if y == 1.0 {
        return Ok(0.5);
    }
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if entropy_term(mid) + entropy_term(1.0 - mid) < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let h = |p: f64| entropy_term(p) + entropy_term(1.0 - p);
    Ok(if (h(lo) - y).abs() <= (h(hi) - y).abs() {
        lo
    } else {
        hi
    })
}
