//! Chernoff bounds and accurate binomial tails.

use crate::{Error, Result};

/// `Pr[X >= mu (1 + delta)] <= exp(-delta^2 mu / (2 + delta))`.
pub fn chernoff_upper(mu: f64, delta: f64) -> Result<f64> {
    check_chernoff(mu, delta)?;
    Ok((-delta * delta * mu / (2.0 + delta)).exp())
}

/// `Pr[X <= mu (1 - delta)] <= exp(-delta^2 mu / 2)`.
pub fn chernoff_lower(mu: f64, delta: f64) -> Result<f64> {
    check_chernoff(mu, delta)?;
    Ok((-delta * delta * mu / 2.0).exp())
}

fn check_chernoff(mu: f64, delta: f64) -> Result<()> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::domain(format!(
            "Chernoff mean must be positive, got {mu}"
        )));
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::domain(format!(
            "Chernoff deviation must be positive, got {delta}"
        )));
    }
    Ok(())
}

/// Probability that a genuine signature is 1-accepted:
/// `sum_{z <= z_acc} C(N, z) G^z (1 - G)^{N - z}`.
pub fn genuine_accept_probability(n: u64, g: f64, z_acc: u64) -> Result<f64> {
    binomial_cdf(n, g, z_acc)
}

/// `Pr[Z <= k]` for `Z ~ Binomial(n, p)`.
///
/// Sums whichever tail lies away from the mode, term by term, with each term
/// evaluated by the saddle-point form of the binomial pmf so that relative
/// accuracy does not degrade with `n`.
pub fn binomial_cdf(n: u64, p: f64, k: u64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain(format!("probability {p} outside [0, 1]")));
    }
    if k > n {
        return Err(Error::domain(format!("threshold {k} exceeds N = {n}")));
    }
    if k == n || p == 0.0 {
        return Ok(1.0);
    }
    if p == 1.0 {
        return Ok(0.0);
    }
    let mode = ((n as f64 + 1.0) * p).floor() as u64;
    if k >= mode {
        Ok((1.0 - sum_terms(n, p, k + 1, n, true)).clamp(0.0, 1.0))
    } else {
        Ok(sum_terms(n, p, 0, k, false).clamp(0.0, 1.0))
    }
}

/// `Pr[Z >= k]` for `Z ~ Binomial(n, p)`.
pub fn binomial_sf(n: u64, p: f64, k: u64) -> Result<f64> {
    if k == 0 {
        return Ok(1.0);
    }
    if k > n {
        return Ok(0.0);
    }
    binomial_cdf(n, p, k - 1).map(|c| 1.0 - c)
}

/// Sums pmf terms over `[from, to]`, walking away from the mode: upward when
/// `upward`, otherwise downward from `to`. Stops once terms no longer matter.
fn sum_terms(n: u64, p: f64, from: u64, to: u64, upward: bool) -> f64 {
    let q = 1.0 - p;
    let mut sum = Neumaier::default();
    let mut z = if upward { from } else { to };
    loop {
        let term = binomial_pmf_raw(z, n, p, q);
        sum.add(term);
        if term == 0.0 || term < sum.value() * 1e-20 {
            break;
        }
        if upward {
            if z == to {
                break;
            }
            z += 1;
        } else {
            if z == from {
                break;
            }
            z -= 1;
        }
    }
    sum.value()
}

#[derive(Default)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Binomial pmf `C(n, x) p^x q^(n-x)`.
pub fn binomial_pmf(x: u64, n: u64, p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain(format!("probability {p} outside [0, 1]")));
    }
    if x > n {
        return Ok(0.0);
    }
    Ok(binomial_pmf_raw(x, n, p, 1.0 - p))
}

const LN_2PI: f64 = 1.837_877_066_409_345_5;

fn binomial_pmf_raw(x: u64, n: u64, p: f64, q: f64) -> f64 {
    if p == 0.0 {
        return if x == 0 { 1.0 } else { 0.0 };
    }
    if q == 0.0 {
        return if x == n { 1.0 } else { 0.0 };
    }
    let nf = n as f64;
    if x == 0 {
        if n == 0 {
            return 1.0;
        }
        let lc = if p < 0.1 {
            -bd0(nf, nf * q) - nf * p
        } else {
            nf * q.ln()
        };
        return lc.exp();
    }
    if x == n {
        let lc = if q < 0.1 {
            -bd0(nf, nf * p) - nf * q
        } else {
            nf * p.ln()
        };
        return lc.exp();
    }
    let xf = x as f64;
    let lc = stirlerr(n) - stirlerr(x) - stirlerr(n - x) - bd0(xf, nf * p) - bd0(nf - xf, nf * q);
    let lf = LN_2PI + xf.ln() + (-xf / nf).ln_1p();
    (lc - 0.5 * lf).exp()
}

/// `ln(n!) - ln(sqrt(2 pi n) (n/e)^n)`.
fn stirlerr(n: u64) -> f64 {
    #[allow(clippy::excessive_precision)]
    const TABLE: [f64; 16] = [
        0.0,
        0.081_061_466_795_327_258_22,
        0.041_340_695_955_409_294_09,
        0.027_677_925_684_998_339_15,
        0.020_790_672_103_765_093_11,
        0.016_644_691_189_821_192_16,
        0.013_876_128_823_070_747_99,
        0.011_896_709_945_891_770_10,
        0.010_411_265_261_972_096_50,
        0.009_255_462_182_712_732_918,
        0.008_330_563_433_362_871_256,
        0.007_573_675_487_951_840_795,
        0.006_942_840_107_209_529_866,
        0.006_408_994_188_004_207_068,
        0.005_951_370_112_758_847_736,
        0.005_554_733_551_962_801_371,
    ];
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;
    if n < 16 {
        return TABLE[n as usize];
    }
    let nf = n as f64;
    let nn = nf * nf;
    if n > 500 {
        (S0 - S1 / nn) / nf
    } else if n > 80 {
        (S0 - (S1 - S2 / nn) / nn) / nf
    } else if n > 35 {
        (S0 - (S1 - (S2 - S3 / nn) / nn) / nn) / nf
    } else {
        (S0 - (S1 - (S2 - (S3 - S4 / nn) / nn) / nn) / nn) / nf
    }
}

/// Deviance term `x ln(x/np) + np - x`, computed without cancellation.
fn bd0(x: f64, np: f64) -> f64 {
    if (x - np).abs() < 0.1 * (x + np) {
        let mut v = (x - np) / (x + np);
        let mut s = (x - np) * v;
        let mut ej = 2.0 * x * v;
        v *= v;
        for j in 1..1000 {
            ej *= v;
            let s1 = s + ej / (2 * j + 1) as f64;
            if s1 == s {
                return s1;
            }
            s = s1;
        }
        s
    } else {
        x * (x / np).ln() + np - x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::{One, ToPrimitive, Zero};

    /// Exact `Pr[Z <= k]` for rational `p = a/b`.
    fn exact_cdf(n: u64, a: u64, b: u64, k: u64) -> f64 {
        let p = BigRational::new(BigInt::from(a), BigInt::from(b));
        let q = BigRational::one() - &p;
        let mut total = BigRational::zero();
        let mut binom = BigInt::one();
        for z in 0..=k {
            if z > 0 {
                binom = binom * (n - z + 1) / z;
            }
            let term = BigRational::from_integer(binom.clone())
                * num_traits::pow(p.clone(), z as usize)
                * num_traits::pow(q.clone(), (n - z) as usize);
            total += term;
        }
        total.to_f64().unwrap()
    }

    #[test]
    fn chernoff_values() {
        assert!((chernoff_upper(100.0, 0.1).unwrap() - (-1.0f64 / 2.1).exp()).abs() < 1e-15);
        assert!((chernoff_upper(100.0, 0.1).unwrap() - 0.6213).abs() < 5e-4);
        assert!((chernoff_lower(100.0, 0.1).unwrap() - 0.6065).abs() < 1e-4);
        assert!(chernoff_upper(100.0, 1e-12).unwrap() >= 1.0 - 1e-15);
        assert!(chernoff_lower(100.0, 1e-12).unwrap() >= 1.0 - 1e-15);
        assert!(chernoff_upper(100.0, 0.0).is_err());
        assert!(chernoff_lower(100.0, -1.0).is_err());
        assert!(chernoff_lower(0.0, 1.0).is_err());
    }

    #[test]
    fn accept_probability_small_cases() {
        assert_eq!(genuine_accept_probability(2, 0.5, 1).unwrap(), 0.75);
        assert_eq!(genuine_accept_probability(10, 0.3, 10).unwrap(), 1.0);
        assert_eq!(genuine_accept_probability(10, 0.0, 0).unwrap(), 1.0);
        assert_eq!(genuine_accept_probability(10, 1.0, 9).unwrap(), 0.0);
        assert!(genuine_accept_probability(10, 0.3, 11).is_err());
        assert!(genuine_accept_probability(10, 1.3, 1).is_err());
    }

    #[test]
    fn matches_exact_rational_sums() {
        for &(n, a, b) in &[
            (1u64, 1u64, 2u64),
            (7, 1, 3),
            (40, 1, 4),
            (150, 1, 10),
            (300, 2, 5),
            (600, 1, 100),
        ] {
            for k in (0..=n).step_by((n as usize / 25).max(1)) {
                let got = binomial_cdf(n, a as f64 / b as f64, k).unwrap();
                let want = exact_cdf(n, a, b, k);
                assert!(
                    (got - want).abs() <= 1e-12,
                    "n={n} p={a}/{b} k={k}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn pmf_sums_to_one_at_scale() {
        let n = 5_000_000u64;
        let p = 0.01;
        let mean = n as f64 * p;
        let sd = (mean * (1.0 - p)).sqrt();
        let lo = (mean - 12.0 * sd) as u64;
        let hi = (mean + 12.0 * sd) as u64;
        let mut s = Neumaier::default();
        for x in lo..=hi {
            s.add(binomial_pmf(x, n, p).unwrap());
        }
        assert!((s.value() - 1.0).abs() < 1e-12, "{}", s.value());
    }

    #[test]
    fn sf_complements_cdf() {
        let n = 1000;
        for k in [0, 1, 100, 250, 999, 1000] {
            let c = binomial_cdf(n, 0.25, k.min(n)).unwrap();
            let s = binomial_sf(n, 0.25, k + 1).unwrap();
            assert!((c + s - 1.0).abs() < 1e-14);
        }
    }
}
