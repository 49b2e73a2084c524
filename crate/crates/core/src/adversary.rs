//! Forgery models and the single-qudit forgery bound.
//!
//! An attacker holding `T` copies of a public key learns at most `T log2 d`
//! bits about the `d - l` hidden key bits. Under that min-entropy constraint
//! the acceptance probability of a forged symbol is maximized by spreading
//! the guess uniformly over a Hamming ball around the most likely hidden
//! string; [`ForgeryModel::ball`] realizes that attacker.

use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::distr::weighted::WeightedIndex;
use rand::seq::index::sample;
use rand::Rng;
use rand_distr::Distribution;
use serde::Serialize;

use crate::analysis::entropy::entropy_inverse;
use crate::conjecture;
use crate::fingerprint::BitString;
use crate::rng::{self, Purpose};
use crate::{Error, Result};

/// `S = 1/alpha`, which must be an integer.
pub fn alphabet_size(alpha: f64) -> Result<u64> {
    if !(alpha > 0.0 && alpha <= 0.5) {
        return Err(Error::param(format!("alpha = {alpha} outside (0, 1/2]")));
    }
    let s = (1.0 / alpha).round();
    if (s * alpha - 1.0).abs() > 1e-9 {
        return Err(Error::param(format!(
            "1/alpha = {} is not an integer; S must be an integer dividing d",
            1.0 / alpha
        )));
    }
    Ok(s as u64)
}

/// `d - l = d / S`.
pub fn hidden_length(alpha: f64, d: u64) -> Result<u64> {
    let s = alphabet_size(alpha)?;
    if d == 0 || d % s != 0 {
        return Err(Error::param(format!(
            "S must be an integer dividing d (S = {s}, d = {d})"
        )));
    }
    Ok(d / s)
}

/// Information leaked per hidden position scale: `phi = T log2(d) / d`.
pub fn leakage(d: u64, verifiers: u32) -> f64 {
    verifiers as f64 * (d as f64).log2() / d as f64
}

fn check_leakage(alpha: f64, d: u64, verifiers: u32) -> Result<f64> {
    let phi = leakage(d, verifiers);
    if phi >= alpha {
        return Err(Error::InsecureParameters(format!(
            "T log2(d) / d = {phi} is not below alpha = {alpha}: the attacker can learn the whole hidden substring"
        )));
    }
    Ok(phi)
}

/// Radius of the extremal guessing ball: `ceil((d - l) h_inv(1 - phi/alpha))`,
/// clamped to `[0, (d - l)/2]`.
pub fn optimal_radius(alpha: f64, d: u64, verifiers: u32) -> Result<u64> {
    let hidden = hidden_length(alpha, d)?;
    let phi = check_leakage(alpha, d, verifiers)?;
    let r = (hidden as f64 * entropy_inverse(1.0 - phi / alpha)?).ceil();
    Ok((r.max(0.0) as u64).min(hidden / 2))
}

/// Exact `E_W` for `W` distributed over the radius-`r` ball in proportion to
/// the shell sizes `C(n, w)`.
pub fn expected_w_ball(hidden_len: u64, r: u64) -> Result<BigRational> {
    conjecture::ball_mean_weight(hidden_len, r)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ForgeryBound {
    pub p1: f64,
    /// `1 - p1 - alpha`
    pub gap: f64,
}

/// Upper bound `p1` on the acceptance probability of a forged symbol:
/// `(1-alpha) [ (1 - (alpha/(1-alpha)) 2 h_inv(1 - phi/alpha))^2 + sqrt(8/3) sqrt(d-l)/l ]`.
pub fn p1_bound(alpha: f64, d: u64, verifiers: u32) -> Result<ForgeryBound> {
    p1_bound_with(alpha, d, verifiers, true)
}

/// [`p1_bound`] with the finite-size `sqrt(d-l)/l` term optionally dropped.
pub fn p1_bound_with(
    alpha: f64,
    d: u64,
    verifiers: u32,
    finite_size_term: bool,
) -> Result<ForgeryBound> {
    let hidden = hidden_length(alpha, d)? as f64;
    let phi = check_leakage(alpha, d, verifiers)?;
    let revealed = d as f64 - hidden;
    let h = entropy_inverse(1.0 - phi / alpha)?;
    let lead = (1.0 - alpha / (1.0 - alpha) * 2.0 * h).powi(2);
    let correction = if finite_size_term {
        (8.0f64 / 3.0).sqrt() * hidden.sqrt() / revealed
    } else {
        0.0
    };
    let p1 = (1.0 - alpha) * (lead + correction);
    assert!(
        p1 > 1.0 - 3.0 * alpha,
        "p1 = {p1} violates p1 > 1 - 3 alpha"
    );
    Ok(ForgeryBound {
        p1,
        gap: 1.0 - p1 - alpha,
    })
}

/// Attacker who guesses the hidden substring with a uniformly random error
/// pattern drawn from a Hamming ball.
#[derive(Debug, Clone)]
pub struct ForgeryModel {
    pub radius: u64,
    pub hidden_len: u64,
    /// `Pr[W = w]` for `w = 0..=radius`, proportional to `C(hidden_len, w)`.
    pub w_distribution: Vec<f64>,
    sampler: WeightedIndex<f64>,
}

impl ForgeryModel {
    pub fn ball(hidden_len: u64, radius: u64) -> Result<Self> {
        if 2 * radius > hidden_len {
            return Err(Error::param(format!(
                "radius {radius} exceeds half the hidden length {hidden_len}"
            )));
        }
        // Shell sizes relative to C(n, r), the largest one inside the ball.
        let mut rel = vec![0.0; radius as usize + 1];
        rel[radius as usize] = 1.0;
        for w in (0..radius).rev() {
            rel[w as usize] = rel[w as usize + 1] * (w + 1) as f64 / (hidden_len - w) as f64;
        }
        let total: f64 = rel.iter().sum();
        let w_distribution: Vec<f64> = rel.into_iter().map(|p| p / total).collect();
        Ok(ForgeryModel {
            radius,
            hidden_len,
            sampler: WeightedIndex::new(&w_distribution).expect("ball weights are positive"),
            w_distribution,
        })
    }

    /// The extremal attacker for `(alpha, d, T)`.
    pub fn for_scheme(alpha: f64, d: u64, verifiers: u32) -> Result<Self> {
        Self::ball(
            hidden_length(alpha, d)?,
            optimal_radius(alpha, d, verifiers)?,
        )
    }

    /// Exact `E_W` as a float.
    pub fn mean_w(&self) -> Result<f64> {
        Ok(expected_w_ball(self.hidden_len, self.radius)?
            .to_f64()
            .unwrap_or(f64::NAN))
    }

    /// `(1 - alpha) E_W (1 - 2W/l)^2`: the single-qudit acceptance
    /// probability of a forged symbol, with `l = revealed`, `d = revealed + hidden`.
    pub fn accept_probability(&self, revealed: u64) -> f64 {
        let d = (revealed + self.hidden_len) as f64;
        let l = revealed as f64;
        self.w_distribution
            .iter()
            .enumerate()
            .map(|(w, p)| p * (l - 2.0 * w as f64).powi(2) / (l * d))
            .sum()
    }

    pub fn sample_w<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        self.sampler.sample(rng) as u64
    }

    pub(crate) fn sampler(&self) -> &WeightedIndex<f64> {
        &self.sampler
    }
}

/// The attacker's guess for `true_hidden`: `W` drawn from the ball
/// distribution and `W` uniformly chosen positions flipped.
pub fn forge_attempt(
    true_hidden: &BitString,
    model: &ForgeryModel,
    seed: u64,
) -> Result<(BitString, u64)> {
    let mut rng = rng::stream(seed, Purpose::Forge, 0);
    forge_with(true_hidden, model, &mut rng)
}

pub(crate) fn forge_with<R: Rng + ?Sized>(
    true_hidden: &BitString,
    model: &ForgeryModel,
    rng: &mut R,
) -> Result<(BitString, u64)> {
    if true_hidden.len() as u64 != model.hidden_len {
        return Err(Error::param(format!(
            "hidden substring has length {}, model expects {}",
            true_hidden.len(),
            model.hidden_len
        )));
    }
    let w = model.sample_w(rng);
    let mut guess = true_hidden.clone();
    for pos in sample(rng, true_hidden.len(), w as usize).iter() {
        guess.flip(pos);
    }
    Ok((guess, w))
}
