//! Exact checks of the shell-weight monotonicity conjecture and the identities
//! the forgery bound is built on.
//!
//! `f(x, r) = (1/r) sum_{w<=r} w C(x,w) / sum_{w<=r} C(x,w)` is conjectured to
//! be decreasing in `r` on `1 <= r <= x/2`. Everything here is integer or
//! rational arithmetic; floating point only appears in the entropy-based
//! bounds of [`binomial_tail_sandwich`], which are themselves real-valued.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::entropy::binary_entropy;
use crate::{Error, Result};

/// Running ball sums `A_r = sum_{w<=r} C(x,w)` and `B_r = sum_{w<=r} w C(x,w)`.
#[derive(Debug, Clone)]
pub struct ShellSums {
    x: u64,
    r: u64,
    shell: BigUint,
    count: BigUint,
    weight: BigUint,
}

impl ShellSums {
    pub fn new(x: u64) -> Self {
        ShellSums {
            x,
            r: 0,
            shell: BigUint::one(),
            count: BigUint::one(),
            weight: BigUint::zero(),
        }
    }

    pub fn radius(&self) -> u64 {
        self.r
    }

    /// `C(x, r)`
    pub fn shell(&self) -> &BigUint {
        &self.shell
    }

    /// `A_r`
    pub fn count(&self) -> &BigUint {
        &self.count
    }

    /// `B_r`
    pub fn weight(&self) -> &BigUint {
        &self.weight
    }

    /// Advances to radius `r + 1`. Returns `false` once `r = x`.
    pub fn advance(&mut self) -> bool {
        if self.r >= self.x {
            return false;
        }
        self.shell *= self.x - self.r;
        self.shell /= self.r + 1;
        self.r += 1;
        self.count += &self.shell;
        self.weight += &self.shell * self.r;
        true
    }

    fn at(x: u64, r: u64) -> Self {
        let mut s = Self::new(x);
        while s.r < r {
            s.advance();
        }
        s
    }
}

fn big_rational(n: BigUint, d: BigUint) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn check_radius(x: u64, r: u64) -> Result<()> {
    if r == 0 {
        return Err(Error::domain("f(x, r) is undefined at r = 0"));
    }
    if 2 * r > x {
        return Err(Error::domain(format!("radius {r} exceeds x/2 for x = {x}")));
    }
    Ok(())
}

/// `f(x, r)` as an exact rational.
pub fn f_exact(x: u64, r: u64) -> Result<BigRational> {
    check_radius(x, r)?;
    let s = ShellSums::at(x, r);
    Ok(big_rational(s.weight.clone(), s.count.clone() * r))
}

/// Mean Hamming weight over the radius-`r` ball in `{0,1}^n`, with each
/// weight class counted by its size: `sum w C(n,w) / sum C(n,w)`, `w <= r`.
pub fn ball_mean_weight(n: u64, r: u64) -> Result<BigRational> {
    if 2 * r > n {
        return Err(Error::param(format!("radius {r} exceeds n/2 for n = {n}")));
    }
    let s = ShellSums::at(n, r);
    Ok(big_rational(s.weight.clone(), s.count.clone()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum Monotonicity {
    Holds,
    Counterexample {
        x: u64,
        r: u64,
        /// `f(x, r)` as `"num/den"`
        f_r: String,
        /// `f(x, r + 1)`
        f_next: String,
    },
}

/// Checks `f(x, r+1) <= f(x, r)` for all `1 <= r < x/2`.
///
/// Each step compares `r B_{r+1} A_r` with `(r+1) B_r A_{r+1}`. The leading
/// 48 bits of each factor give integer intervals that bracket both products;
/// the full big-integer products are formed only when the intervals overlap.
pub fn check_monotonic(x: u64) -> Monotonicity {
    let half = x / 2;
    if half < 2 {
        return Monotonicity::Holds;
    }
    let mut cur = ShellSums::new(x);
    cur.advance();
    while cur.r < half {
        let mut next = cur.clone();
        next.advance();
        let r = cur.r;
        if !step_holds(&cur.count, &cur.weight, &next.count, &next.weight, r) {
            let f_r = big_rational(cur.weight.clone(), cur.count.clone() * r);
            let f_next = big_rational(next.weight.clone(), next.count.clone() * (r + 1));
            return Monotonicity::Counterexample {
                x,
                r,
                f_r: f_r.to_string(),
                f_next: f_next.to_string(),
            };
        }
        cur = next;
    }
    Monotonicity::Holds
}

/// `r * B_{r+1} * A_r <= (r+1) * B_r * A_{r+1}`
fn step_holds(
    count: &BigUint,
    weight: &BigUint,
    next_count: &BigUint,
    next_weight: &BigUint,
    r: u64,
) -> bool {
    let lhs = product_interval(next_weight, count, r);
    let rhs = product_interval(weight, next_count, r + 1);
    if let (Some(l), Some(rh)) = (lhs, rhs) {
        if cmp_scaled(l.hi, l.shift, rh.lo, rh.shift) != Ordering::Greater {
            return true;
        }
        if cmp_scaled(l.lo, l.shift, rh.hi, rh.shift) == Ordering::Greater {
            return false;
        }
    }
    exact_step_holds(count, weight, next_count, next_weight, r)
}

pub(crate) fn exact_step_holds(
    count: &BigUint,
    weight: &BigUint,
    next_count: &BigUint,
    next_weight: &BigUint,
    r: u64,
) -> bool {
    next_weight * count * r <= weight * next_count * (r + 1)
}

/// `[lo, hi] * 2^shift` brackets a nonnegative integer.
#[derive(Debug, Clone, Copy)]
struct Interval {
    lo: u128,
    hi: u128,
    shift: u64,
}

const MANTISSA_BITS: u64 = 48;

fn leading_bits(x: &BigUint) -> Interval {
    let bits = x.bits();
    if bits <= MANTISSA_BITS {
        let v = x.to_u64().expect("fits in 48 bits") as u128;
        return Interval {
            lo: v,
            hi: v,
            shift: 0,
        };
    }
    let mut digits = x.iter_u64_digits().rev();
    let top = digits.next().unwrap_or(0) as u128;
    let below = digits.next().unwrap_or(0) as u128;
    let n = x.iter_u64_digits().len() as u64;
    let (window, window_shift) = if n >= 2 {
        ((top << 64) | below, 64 * (n - 2))
    } else {
        (top, 0)
    };
    let window_bits = bits - window_shift;
    let drop = window_bits - MANTISSA_BITS;
    let m = window >> drop;
    Interval {
        lo: m,
        hi: m + 1,
        shift: window_shift + drop,
    }
}

fn product_interval(a: &BigUint, b: &BigUint, scale: u64) -> Option<Interval> {
    let (ia, ib) = (leading_bits(a), leading_bits(b));
    let scale = scale as u128;
    Some(Interval {
        lo: ia.lo.checked_mul(ib.lo)?.checked_mul(scale)?,
        hi: ia.hi.checked_mul(ib.hi)?.checked_mul(scale)?,
        shift: ia.shift + ib.shift,
    })
}

/// Compares `a * 2^sa` with `b * 2^sb` exactly.
fn cmp_scaled(a: u128, sa: u64, b: u128, sb: u64) -> Ordering {
    match (a == 0, b == 0) {
        (true, true) => return Ordering::Equal,
        (true, false) => return Ordering::Less,
        (false, true) => return Ordering::Greater,
        _ => {}
    }
    let len_a = (128 - a.leading_zeros()) as u64 + sa;
    let len_b = (128 - b.leading_zeros()) as u64 + sb;
    if len_a != len_b {
        return len_a.cmp(&len_b);
    }
    // Equal total lengths, so the shifted operand still fits in 128 bits.
    if sa >= sb {
        (a << (sa - sb)).cmp(&b)
    } else {
        a.cmp(&(b << (sb - sa)))
    }
}

/// Outcome of a sweep over `2 <= x <= x_max`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RangeReport {
    pub x_max: u64,
    pub largest_checked: u64,
    pub outcome: Monotonicity,
}

/// Runs [`check_monotonic`] for every `x` in `2..=x_max` and reports the
/// counterexample with the smallest `x`, if any.
pub fn check_range(x_max: u64) -> RangeReport {
    const CHUNK: u64 = 256;
    let mut start = 2;
    while start <= x_max {
        let end = (start + CHUNK - 1).min(x_max);
        let found = (start..=end)
            .into_par_iter()
            .map(check_monotonic)
            .find_first(|m| *m != Monotonicity::Holds);
        if let Some(counterexample) = found {
            let largest = match &counterexample {
                Monotonicity::Counterexample { x, .. } => *x,
                Monotonicity::Holds => end,
            };
            return RangeReport {
                x_max,
                largest_checked: largest,
                outcome: counterexample,
            };
        }
        start = end + 1;
    }
    RangeReport {
        x_max,
        largest_checked: x_max.max(1),
        outcome: Monotonicity::Holds,
    }
}

/// `C(n, k)`
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `f(2z, z) = 1 / (1 + C(2z, z) / 2^{2z})`.
pub fn f_half_closed_form(z: u64) -> Result<BigRational> {
    if z == 0 {
        return Err(Error::domain("closed form needs z >= 1"));
    }
    let four_z = BigUint::one() << (2 * z);
    Ok(big_rational(four_z.clone(), four_z + binomial(2 * z, z)))
}

/// `f(2z, z) >= 1 / (1 + 1/sqrt(3z + 1))`, decided exactly as
/// `C(2z, z)^2 (3z + 1) <= 16^z`.
pub fn half_lower_bound_holds(z: u64) -> bool {
    let c = binomial(2 * z, z);
    &c * &c * (3 * z + 1) <= BigUint::one() << (4 * z)
}

/// Float value of `1 / (1 + 1/sqrt(3z + 1))`.
pub fn half_lower_bound(z: u64) -> f64 {
    1.0 / (1.0 + 1.0 / ((3 * z + 1) as f64).sqrt())
}

/// Both sides of the binomial ball-size bound together with the exact sum.
///
/// Values are reported as base-2 logarithms because `2^n` overflows `f64`
/// well inside the tested range.
#[derive(Debug, Clone, PartialEq)]
pub struct TailSandwich {
    pub n: u64,
    pub r: u64,
    pub exact: BigUint,
    pub log2_exact: f64,
    /// `n h(r/n) - log2 sqrt(8 r (1 - r/n))`
    pub log2_lower: f64,
    /// `n h(r/n)`
    pub log2_upper: f64,
}

impl TailSandwich {
    pub fn lower(&self) -> f64 {
        self.log2_lower.exp2()
    }

    pub fn upper(&self) -> f64 {
        self.log2_upper.exp2()
    }

    pub fn holds(&self) -> bool {
        let slack = 1e-12 * self.n as f64;
        self.log2_lower <= self.log2_exact + slack && self.log2_exact <= self.log2_upper + slack
    }
}

/// `2^{n h(r/n)} / sqrt(8 r (1 - r/n)) <= sum_{k<=r} C(n,k) <= 2^{n h(r/n)}`.
pub fn binomial_tail_sandwich(n: u64, r: u64) -> Result<TailSandwich> {
    if r == 0 || 2 * r > n {
        return Err(Error::domain(format!(
            "need 1 <= r <= n/2, got n = {n}, r = {r}"
        )));
    }
    let s = ShellSums::at(n, r);
    let ratio = r as f64 / n as f64;
    let log2_upper = n as f64 * binary_entropy(ratio)?;
    let log2_lower = log2_upper - 0.5 * (8.0 * r as f64 * (1.0 - ratio)).log2();
    let sandwich = TailSandwich {
        n,
        r,
        log2_exact: log2_big(&s.count),
        exact: s.count,
        log2_lower,
        log2_upper,
    };
    assert!(
        sandwich.holds(),
        "binomial tail bound violated at n = {n}, r = {r}"
    );
    Ok(sandwich)
}

pub(crate) fn log2_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap_or(f64::INFINITY).log2();
    }
    let shift = bits - 64;
    (x >> shift).to_f64().expect("64-bit value").log2() + shift as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn f_examples() {
        assert_eq!(f_exact(2, 1).unwrap(), q(2, 3));
        assert_eq!(f_exact(4, 1).unwrap(), q(4, 5));
        assert_eq!(f_exact(4, 2).unwrap(), q(8, 11));
        assert!(f_exact(4, 0).is_err());
        assert!(f_exact(4, 3).is_err());
    }

    #[test]
    fn ball_mean_examples() {
        assert_eq!(ball_mean_weight(5, 0).unwrap(), q(0, 1));
        assert_eq!(ball_mean_weight(2, 1).unwrap(), q(2, 3));
        assert_eq!(ball_mean_weight(4, 2).unwrap(), q(16, 11));
        assert!(ball_mean_weight(4, 3).is_err());
    }

    #[test]
    fn monotonic_small() {
        assert_eq!(check_monotonic(4), Monotonicity::Holds);
        assert_eq!(check_monotonic(2), Monotonicity::Holds);
        assert_eq!(check_monotonic(3), Monotonicity::Holds);
        assert!(f_exact(4, 1).unwrap() >= f_exact(4, 2).unwrap());
    }

    #[test]
    fn filter_agrees_with_full_products() {
        for x in 2..400u64 {
            let mut cur = ShellSums::new(x);
            cur.advance();
            while cur.r < x / 2 {
                let mut next = cur.clone();
                next.advance();
                assert_eq!(
                    step_holds(&cur.count, &cur.weight, &next.count, &next.weight, cur.r),
                    exact_step_holds(&cur.count, &cur.weight, &next.count, &next.weight, cur.r),
                    "x={x} r={}",
                    cur.r
                );
                cur = next;
            }
        }
    }

    #[test]
    fn filter_detects_violations() {
        let p = BigUint::one() << 400;
        assert!(!step_holds(&p, &p, &p, &(&p * 3u32), 1));
        assert!(step_holds(&p, &p, &p, &(&p * 2u32), 1));
        assert!(!step_holds(&p, &p, &p, &(&p * 2u32 + 1u32), 1));
        let a = BigUint::from(3u32) << 500;
        let b = BigUint::from(7u32) << 300;
        // Exact tie: r*B'*A = 1*(a)*(b) vs 2*B*A' = 2*(a/2)*(b).
        let half_a = &a >> 1;
        assert!(step_holds(&b, &half_a, &b, &a, 1));
        assert!(!step_holds(&b, &half_a, &b, &(&a + 1u32), 1));
    }

    #[test]
    fn cmp_scaled_cases() {
        assert_eq!(cmp_scaled(1, 10, 1024, 0), Ordering::Equal);
        assert_eq!(cmp_scaled(3, 10, 1024, 1), Ordering::Greater);
        assert_eq!(cmp_scaled(0, 10, 1, 0), Ordering::Less);
        assert_eq!(cmp_scaled(u128::MAX, 0, 1, 128), Ordering::Less);
    }

    #[test]
    fn closed_form_identity() {
        assert_eq!(f_half_closed_form(1).unwrap(), q(2, 3));
        assert_eq!(f_half_closed_form(2).unwrap(), q(8, 11));
        for z in 1..=64 {
            assert_eq!(f_half_closed_form(z).unwrap(), f_exact(2 * z, z).unwrap());
            assert!(half_lower_bound_holds(z));
        }
        assert_eq!(
            f_half_closed_form(1).unwrap().to_f64().unwrap(),
            half_lower_bound(1)
        );
    }

    #[test]
    fn sandwich_examples() {
        let s = binomial_tail_sandwich(4, 2).unwrap();
        assert_eq!(s.exact, BigUint::from(11u32));
        assert!((s.upper() - 16.0).abs() < 1e-9);
        assert!((s.lower() - 16.0 / 8f64.sqrt()).abs() < 1e-9);

        let s = binomial_tail_sandwich(20, 5).unwrap();
        assert_eq!(s.exact, BigUint::from(21_700u32));
        let upper = (20.0 * crate::analysis::binary_entropy(0.25).unwrap()).exp2();
        assert!((s.upper() / upper - 1.0).abs() < 1e-12);
        assert!((s.lower() / (upper / 30f64.sqrt()) - 1.0).abs() < 1e-12);
        assert!((s.upper() / 76_650.0 - 1.0).abs() < 1e-3);
        assert!((s.lower() / 13_994.0 - 1.0).abs() < 1e-3);
        assert!(binomial_tail_sandwich(20, 11).is_err());
        assert!(binomial_tail_sandwich(20, 0).is_err());
    }

    #[test]
    fn range_check_small() {
        let report = check_range(300);
        assert_eq!(report.outcome, Monotonicity::Holds);
        assert_eq!(report.largest_checked, 300);
    }
}
