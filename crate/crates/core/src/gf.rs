//! Finite fields GF(p^m) with table-based multiplication.
//!
//! Elements are the integers `0..q`; the base-`p` digits of an element are
//! the coefficients of its polynomial representative. Multiplication goes
//! through exp/log tables generated by a primitive polynomial found by
//! exhaustive search, so any prime power up to [`MAX_ORDER`] is supported.

use crate::{Error, Result};

pub const MAX_ORDER: u32 = 1 << 16;

#[derive(Debug, Clone)]
pub struct GaloisField {
    order: u32,
    characteristic: u32,
    degree: u32,
    exp: Vec<u32>,
    log: Vec<u32>,
}

/// Returns `(p, m)` with `q = p^m`, or `None` when `q` is not a prime power.
pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|f| q % f == 0)?;
    let mut rest = q;
    let mut m = 0;
    while rest % p == 0 {
        rest /= p;
        m += 1;
    }
    (rest == 1).then_some((p, m))
}

impl GaloisField {
    pub fn new(order: u32) -> Result<Self> {
        let (p, m) = prime_power(order)
            .ok_or_else(|| Error::param(format!("alphabet size {order} is not a prime power")))?;
        if order > MAX_ORDER {
            return Err(Error::param(format!(
                "field order {order} exceeds {MAX_ORDER}"
            )));
        }
        let mut field = GaloisField {
            order,
            characteristic: p,
            degree: m,
            exp: Vec::new(),
            log: Vec::new(),
        };
        field.build_tables()?;
        Ok(field)
    }

    fn build_tables(&mut self) -> Result<()> {
        let (p, m, q) = (self.characteristic, self.degree, self.order);
        // Candidate reduction polynomials x^m + c_{m-1}x^{m-1} + ... + c_0,
        // indexed by the integer with digits c_0..c_{m-1}; c_0 = 0 is reducible.
        for tail in 1..q {
            // For m = 1 the generator is the constant -c_0 instead of x.
            let generator = if m == 1 { (p - tail) % p } else { p };
            if m == 1 && generator < 2 && q > 2 {
                continue;
            }
            let mut exp = Vec::with_capacity(q as usize - 1);
            let mut x = 1u32;
            let mut primitive = true;
            for i in 0..q - 1 {
                if i > 0 && x == 1 {
                    primitive = false;
                    break;
                }
                exp.push(x);
                x = self.times_generator(x, tail);
                if x == 0 {
                    primitive = false;
                    break;
                }
            }
            if primitive && x == 1 {
                let mut log = vec![0; q as usize];
                for (i, &e) in exp.iter().enumerate() {
                    log[e as usize] = i as u32;
                }
                self.exp = exp;
                self.log = log;
                return Ok(());
            }
        }
        Err(Error::param(format!(
            "no primitive polynomial found for GF({q})"
        )))
    }

    /// Multiplies `x` by the generator defined by the reduction tail.
    fn times_generator(&self, x: u32, tail: u32) -> u32 {
        let (p, m) = (self.characteristic, self.degree);
        if m == 1 {
            return (x as u64 * ((p - tail) % p) as u64 % p as u64) as u32;
        }
        let mut digits = self.digits(x);
        let top = digits[m as usize - 1];
        for i in (1..m as usize).rev() {
            digits[i] = digits[i - 1];
        }
        digits[0] = 0;
        // x^m = -(c_{m-1} x^{m-1} + ... + c_0)
        let tail_digits = self.digits(tail);
        for i in 0..m as usize {
            digits[i] = (digits[i] + (p - tail_digits[i]) * top) % p;
        }
        self.compose_digits(&digits)
    }

    fn digits(&self, mut x: u32) -> Vec<u32> {
        let p = self.characteristic;
        (0..self.degree)
            .map(|_| {
                let d = x % p;
                x /= p;
                d
            })
            .collect()
    }

    fn compose_digits(&self, digits: &[u32]) -> u32 {
        digits
            .iter()
            .rev()
            .fold(0, |acc, &d| acc * self.characteristic + d)
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn characteristic(&self) -> u32 {
        self.characteristic
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        let p = self.characteristic;
        if p == 2 {
            return a ^ b;
        }
        if self.degree == 1 {
            return (a + b) % p;
        }
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        let mut scale = 1;
        for _ in 0..self.degree {
            out += (a % p + b % p) % p * scale;
            a /= p;
            b /= p;
            scale *= p;
        }
        out
    }

    pub fn neg(&self, a: u32) -> u32 {
        let p = self.characteristic;
        if p == 2 {
            return a;
        }
        let digits: Vec<u32> = self.digits(a).into_iter().map(|d| (p - d) % p).collect();
        self.compose_digits(&digits)
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let n = self.order - 1;
        let i = (self.log[a as usize] + self.log[b as usize]) % n;
        self.exp[i as usize]
    }

    pub fn inv(&self, a: u32) -> Option<u32> {
        if a == 0 {
            return None;
        }
        let n = self.order - 1;
        Some(self.exp[((n - self.log[a as usize]) % n) as usize])
    }

    /// `g^i` for the primitive element `g`.
    pub fn primitive_power(&self, i: u64) -> u32 {
        self.exp[(i % (self.order as u64 - 1)) as usize]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_powers() {
        assert_eq!(prime_power(16), Some((2, 4)));
        assert_eq!(prime_power(9), Some((3, 2)));
        assert_eq!(prime_power(7), Some((7, 1)));
        assert_eq!(prime_power(12), None);
        assert_eq!(prime_power(1), None);
        assert!(matches!(GaloisField::new(10), Err(Error::Parameter(_))));
    }

    #[test]
    fn field_axioms_small_orders() {
        for q in [2, 3, 4, 5, 7, 8, 9, 16, 25, 27, 32, 49, 64] {
            let f = GaloisField::new(q).unwrap();
            for a in 0..q {
                assert_eq!(f.add(a, 0), a);
                assert_eq!(f.mul(a, 1), a);
                assert_eq!(f.add(a, f.neg(a)), 0, "q={q} a={a}");
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), 1, "q={q} a={a}");
                }
                for b in 0..q {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for c in [0, 1, q - 1, q / 2] {
                        assert_eq!(
                            f.mul(a, f.add(b, c)),
                            f.add(f.mul(a, b), f.mul(a, c)),
                            "distributivity q={q}"
                        );
                    }
                }
            }
            let mut seen = vec![false; q as usize];
            for i in 0..q as u64 - 1 {
                let e = f.primitive_power(i);
                assert!(!seen[e as usize]);
                seen[e as usize] = true;
            }
        }
    }
}
