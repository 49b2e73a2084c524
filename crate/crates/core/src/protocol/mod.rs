//! Signer and verifier of the scheme.
//!
//! Public keys never exist as vectors. Each verifier holds its own copy of
//! `|mu(k^i)>` and measures it with a single binary projector, so its outcome
//! is an independent Bernoulli draw with the exact probability from
//! [`fingerprint::accept_probability`](crate::fingerprint::accept_probability).

mod params;
pub mod trials;

pub use params::SchemeParams;
pub use trials::{run_trials, Engine, Estimate, Scenario, TrialReport, VerdictCounts};

use rand::Rng;
use serde::Serialize;

use crate::coding::{Code, SymbolString};
use crate::fingerprint::{accept_probability, index_set, BitString};
use crate::rng::{self, Purpose};
use crate::{Error, Result};

/// Upper limit on the total number of key bits materialized by [`keygen`].
pub const MAX_KEY_BITS: u64 = 1 << 32;

/// The `N` private keys, one per codeword position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeySet {
    pub keys: Vec<BitString>,
}

/// The revealed substrings `kappa_i`, one per codeword position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    pub revealed: Vec<BitString>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Rej,
    Acc0,
    Acc1,
}

impl Verdict {
    /// ACC1 if `z <= z_acc`, REJ if `z >= z_rej`, ACC0 in between.
    pub fn classify(z: u64, z_acc: u64, z_rej: u64) -> Verdict {
        if z <= z_acc {
            Verdict::Acc1
        } else if z >= z_rej {
            Verdict::Rej
        } else {
            Verdict::Acc0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct VerifyOutcome {
    /// Number of failed projections.
    pub tally: u64,
    pub verdict: Verdict,
}

/// Draws `N` independent uniform `d`-bit keys; key `i` comes from substream
/// `(KeyGen, i)` of `seed`.
pub fn keygen(params: &SchemeParams, seed: u64) -> Result<KeySet> {
    let n = params.codeword_len();
    if n.saturating_mul(params.d) > MAX_KEY_BITS {
        return Err(Error::Resource(format!(
            "N d = {} key bits exceeds {MAX_KEY_BITS}",
            n as u128 * params.d as u128
        )));
    }
    if params.alphabet_size * params.hidden() != params.d {
        return Err(Error::param(format!(
            "S must be an integer dividing d (S = {}, d = {})",
            params.alphabet_size, params.d
        )));
    }
    let keys = (0..n)
        .map(|i| {
            BitString::random(
                params.d as usize,
                &mut rng::stream(seed, Purpose::KeyGen, i),
            )
        })
        .collect();
    Ok(KeySet { keys })
}

/// Encodes `message` and reveals each key outside the block selected by its
/// codeword symbol.
pub fn sign(keys: &KeySet, message: &SymbolString, params: &SchemeParams) -> Result<Signature> {
    let codeword = Code::new(params.code.clone())?.encode(message)?;
    sign_codeword(keys, &codeword, params)
}

pub fn sign_codeword(
    keys: &KeySet,
    codeword: &SymbolString,
    params: &SchemeParams,
) -> Result<Signature> {
    check_key_count(keys, codeword, params)?;
    let revealed = keys
        .keys
        .iter()
        .zip(codeword.as_slice())
        .map(|(key, &c)| {
            let hidden = index_set(c as usize, params.d as usize, params.revealed as usize)?;
            key.restrict(&hidden.complement())
        })
        .collect::<Result<_>>()?;
    Ok(Signature { revealed })
}

/// Re-encodes `message` and measures every position once; the tally counts
/// failed projections.
pub fn verify_simulate(
    keys: &KeySet,
    message: &SymbolString,
    signature: &Signature,
    params: &SchemeParams,
    seed: u64,
) -> Result<VerifyOutcome> {
    let codeword = Code::new(params.code.clone())?.encode(message)?;
    verify_codeword(
        keys,
        &codeword,
        signature,
        params,
        &mut rng::stream(seed, Purpose::Verify, 0),
    )
}

/// Verification against an already encoded codeword.
pub fn verify_codeword<R: Rng + ?Sized>(
    keys: &KeySet,
    codeword: &SymbolString,
    signature: &Signature,
    params: &SchemeParams,
    rng: &mut R,
) -> Result<VerifyOutcome> {
    check_key_count(keys, codeword, params)?;
    if signature.revealed.len() != keys.keys.len() {
        return Err(Error::param(format!(
            "signature has {} entries, expected N = {}",
            signature.revealed.len(),
            keys.keys.len()
        )));
    }
    let mut tally = 0;
    for ((key, &c), kappa) in keys
        .keys
        .iter()
        .zip(codeword.as_slice())
        .zip(&signature.revealed)
    {
        if kappa.len() as u64 != params.revealed {
            return Err(Error::param(format!(
                "revealed substring has length {}, expected l = {}",
                kappa.len(),
                params.revealed
            )));
        }
        let hidden = index_set(c as usize, params.d as usize, params.revealed as usize)?;
        let p = accept_probability(key, &hidden, kappa)?;
        if rng.random::<f64>() >= p {
            tally += 1;
        }
    }
    Ok(VerifyOutcome {
        tally,
        verdict: Verdict::classify(tally, params.z_acc, params.z_rej),
    })
}

fn check_key_count(keys: &KeySet, codeword: &SymbolString, params: &SchemeParams) -> Result<()> {
    if keys.keys.len() != codeword.len() || codeword.len() as u64 != params.codeword_len() {
        return Err(Error::param(format!(
            "{} keys for a codeword of length {} (N = {})",
            keys.keys.len(),
            codeword.len(),
            params.codeword_len()
        )));
    }
    if let Some(k) = keys.keys.iter().find(|k| k.len() as u64 != params.d) {
        return Err(Error::param(format!(
            "key of length {}, expected d = {}",
            k.len(),
            params.d
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coding::CodeSpec;

    fn small_params() -> SchemeParams {
        // d = 8, S = 4, l = 6; Reed-Solomon over GF(4) with N = 3, K = 1.
        let code = CodeSpec::reed_solomon(4, 3, 1).unwrap();
        SchemeParams::custom(8, 0.25, 1, code, 1, 2).unwrap()
    }

    fn synthetic_params(n: usize, d: u64, alpha: f64) -> SchemeParams {
        let s = (1.0 / alpha).round() as u32;
        let code = CodeSpec::synthetic(s, n, 0.2, 9).unwrap();
        SchemeParams::custom(d, alpha, 1, code, (n / 3) as u64, (n / 2) as u64).unwrap()
    }

    #[test]
    fn verdict_partition() {
        assert_eq!(Verdict::classify(3, 3, 7), Verdict::Acc1);
        assert_eq!(Verdict::classify(4, 3, 7), Verdict::Acc0);
        assert_eq!(Verdict::classify(6, 3, 7), Verdict::Acc0);
        assert_eq!(Verdict::classify(7, 3, 7), Verdict::Rej);
        let mut last = Verdict::Acc1;
        for z in 0..20 {
            let v = Verdict::classify(z, 5, 9);
            assert!(v <= last);
            last = v;
        }
        for z in 0..=10 {
            assert_eq!(Verdict::classify(z, 10, 11), Verdict::Acc1);
        }
    }

    #[test]
    fn keygen_is_reproducible() {
        let p = synthetic_params(100, 1024, 0.25);
        let a = keygen(&p, 1).unwrap();
        assert_eq!(a, keygen(&p, 1).unwrap());
        assert_ne!(a, keygen(&p, 2).unwrap());
        let mean = a.keys.iter().map(|k| k.weight() as f64).sum::<f64>() / 100.0;
        // Mean of 100 keys has standard deviation 16 / 10.
        assert!((mean - 512.0).abs() < 4.0 * 1.6, "{mean}");
        for k in &a.keys {
            assert!((k.weight() as f64 - 512.0).abs() < 6.0 * 16.0);
        }
    }

    #[test]
    fn keygen_resource_limit() {
        let code = CodeSpec::synthetic(4, 1 << 20, 0.2, 0).unwrap();
        let p = SchemeParams::custom(1 << 14, 0.25, 1, code, 10, 20).unwrap();
        assert!(matches!(keygen(&p, 0), Err(Error::Resource(_))));
    }

    #[test]
    fn sign_reveals_complement_of_block() {
        let p = small_params();
        let keys = keygen(&p, 5).unwrap();
        // Codeword of message (0) is all zeros; message (3) is all threes.
        let sig = sign(&keys, &SymbolString::zeros(1), &p).unwrap();
        for (k, kappa) in keys.keys.iter().zip(&sig.revealed) {
            let want: Vec<bool> = (2..8).map(|j| k.get(j)).collect();
            assert_eq!(kappa.iter().collect::<Vec<_>>(), want);
        }
        let three = SymbolString::new(vec![3], 4).unwrap();
        let codeword = Code::new(p.code.clone()).unwrap().encode(&three).unwrap();
        assert!(codeword.as_slice().iter().all(|&c| c == 3));
        let sig = sign(&keys, &three, &p).unwrap();
        for (k, kappa) in keys.keys.iter().zip(&sig.revealed) {
            let want: Vec<bool> = (0..6).map(|j| k.get(j)).collect();
            assert_eq!(kappa.iter().collect::<Vec<_>>(), want);
        }
        assert!(sign(&keys, &SymbolString::zeros(2), &p).is_err());
    }

    #[test]
    fn honest_run_has_zero_distance() {
        let p = synthetic_params(200, 64, 0.25);
        let keys = keygen(&p, 3).unwrap();
        let msg = SymbolString::random(
            p.code.message_len,
            4,
            &mut rng::stream(3, Purpose::Message, 0),
        );
        let sig = sign(&keys, &msg, &p).unwrap();
        let c = Code::new(p.code.clone()).unwrap().encode(&msg).unwrap();
        for ((k, &ci), kappa) in keys.keys.iter().zip(c.as_slice()).zip(&sig.revealed) {
            let hidden = index_set(ci as usize, 64, 48).unwrap();
            assert_eq!(k.restrict(&hidden.complement()).unwrap(), *kappa);
            assert_eq!(accept_probability(k, &hidden, kappa).unwrap(), 0.75);
        }
    }

    #[test]
    fn zero_overlap_always_fails() {
        let p = synthetic_params(50, 16, 0.25);
        let keys = keygen(&p, 4).unwrap();
        let msg = SymbolString::zeros(p.code.message_len);
        let mut sig = sign(&keys, &msg, &p).unwrap();
        // Flip half of every revealed substring: W = l/2.
        for kappa in &mut sig.revealed {
            for j in 0..6 {
                kappa.flip(j);
            }
        }
        for seed in 0..20 {
            let out = verify_simulate(&keys, &msg, &sig, &p, seed).unwrap();
            assert_eq!(out.tally, 50);
            assert_eq!(out.verdict, Verdict::Rej);
        }
    }

    #[test]
    fn wrong_message_length_is_rejected() {
        let p = synthetic_params(50, 16, 0.25);
        let keys = keygen(&p, 4).unwrap();
        let msg = SymbolString::zeros(p.code.message_len);
        let sig = sign(&keys, &msg, &p).unwrap();
        let long = SymbolString::zeros(p.code.message_len + 1);
        assert!(matches!(
            verify_simulate(&keys, &long, &sig, &p, 0),
            Err(Error::Parameter(_))
        ));
    }
}
