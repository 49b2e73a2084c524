//! Message codes over the signing alphabet.
//!
//! Two backends share one [`CodeSpec`]:
//!
//! * Reed-Solomon over GF(S), for alphabets that are prime powers. The
//!   codeword is the message polynomial evaluated at `g^0, ..., g^{N-1}`, so
//!   `N <= S - 1` and the minimum distance is `N - K + 1`.
//! * A synthetic model that only carries `(N, theta)`. Its encoder is a
//!   systematic pseudo-random linear map over `Z_S` (deterministic per code
//!   seed) and its forgery model flips exactly `round(2 theta N)` symbols.
//!
//! Nothing is ever decoded: the verifier re-encodes the received message.

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::entropy::binary_entropy;
use crate::gf::GaloisField;
use crate::rng::{self, Purpose};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum CodeBackend {
    ReedSolomon,
    Synthetic { seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodeSpec {
    pub alphabet_size: u32,
    pub message_len: usize,
    pub codeword_len: usize,
    /// Correctable symbol error rate.
    pub theta: f64,
    pub backend: CodeBackend,
}

impl CodeSpec {
    pub fn reed_solomon(
        alphabet_size: u32,
        codeword_len: usize,
        message_len: usize,
    ) -> Result<Self> {
        if crate::gf::prime_power(alphabet_size).is_none() {
            return Err(Error::param(format!(
                "Reed-Solomon needs a prime-power alphabet, got {alphabet_size}"
            )));
        }
        if codeword_len == 0 || codeword_len as u64 > alphabet_size as u64 - 1 {
            return Err(Error::param(format!(
                "Reed-Solomon over GF({alphabet_size}) needs 1 <= N <= {}, got N = {codeword_len}",
                alphabet_size - 1
            )));
        }
        if message_len == 0 || message_len > codeword_len {
            return Err(Error::param(format!(
                "message length K = {message_len} must satisfy 1 <= K <= N = {codeword_len}"
            )));
        }
        Ok(CodeSpec {
            alphabet_size,
            message_len,
            codeword_len,
            theta: (codeword_len - message_len) as f64 / (2 * codeword_len) as f64,
            backend: CodeBackend::ReedSolomon,
        })
    }

    /// Synthetic code with the asymptotic rate `K = round(N (1 - h(theta)))`.
    pub fn synthetic(
        alphabet_size: u32,
        codeword_len: usize,
        theta: f64,
        seed: u64,
    ) -> Result<Self> {
        if !(0.0..0.5).contains(&theta) {
            return Err(Error::param(format!("theta = {theta} outside [0, 1/2)")));
        }
        let rate = 1.0 - binary_entropy(theta)?;
        let message_len = ((codeword_len as f64) * rate).round().max(1.0) as usize;
        Self::synthetic_with_len(alphabet_size, codeword_len, message_len, theta, seed)
    }

    pub fn synthetic_with_len(
        alphabet_size: u32,
        codeword_len: usize,
        message_len: usize,
        theta: f64,
        seed: u64,
    ) -> Result<Self> {
        if alphabet_size < 2 {
            return Err(Error::param("alphabet size must be at least 2"));
        }
        if codeword_len == 0 || message_len == 0 || message_len > codeword_len {
            return Err(Error::param(format!(
                "need 1 <= K <= N, got K = {message_len}, N = {codeword_len}"
            )));
        }
        if !(0.0..0.5).contains(&theta) {
            return Err(Error::param(format!("theta = {theta} outside [0, 1/2)")));
        }
        Ok(CodeSpec {
            alphabet_size,
            message_len,
            codeword_len,
            theta,
            backend: CodeBackend::Synthetic { seed },
        })
    }

    /// Number of codeword symbols a minimal message change alters, `round(2 theta N)`.
    pub fn forgery_distance(&self) -> usize {
        (2.0 * self.theta * self.codeword_len as f64).round() as usize
    }
}

/// String over `{0, ..., S-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SymbolString(Vec<u32>);

impl SymbolString {
    pub fn new(symbols: Vec<u32>, alphabet_size: u32) -> Result<Self> {
        if let Some(bad) = symbols.iter().find(|&&s| s >= alphabet_size) {
            return Err(Error::param(format!(
                "symbol {bad} outside alphabet of size {alphabet_size}"
            )));
        }
        Ok(SymbolString(symbols))
    }

    pub fn zeros(len: usize) -> Self {
        SymbolString(vec![0; len])
    }

    pub fn random<R: Rng + ?Sized>(len: usize, alphabet_size: u32, rng: &mut R) -> Self {
        SymbolString(
            (0..len)
                .map(|_| rng.random_range(0..alphabet_size))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn distance(&self, other: &SymbolString) -> usize {
        self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count()
    }
}

/// Encoder built from a [`CodeSpec`].
#[derive(Debug, Clone)]
pub struct Code {
    spec: CodeSpec,
    field: Option<GaloisField>,
}

impl Code {
    pub fn new(spec: CodeSpec) -> Result<Self> {
        let field = match spec.backend {
            CodeBackend::ReedSolomon => {
                let spec = CodeSpec::reed_solomon(
                    spec.alphabet_size,
                    spec.codeword_len,
                    spec.message_len,
                )?;
                Some(GaloisField::new(spec.alphabet_size)?)
            }
            CodeBackend::Synthetic { .. } => None,
        };
        Ok(Code { spec, field })
    }

    pub fn spec(&self) -> &CodeSpec {
        &self.spec
    }

    pub fn encode(&self, message: &SymbolString) -> Result<SymbolString> {
        let spec = &self.spec;
        if message.len() != spec.message_len {
            return Err(Error::param(format!(
                "message has length {}, code expects K = {}",
                message.len(),
                spec.message_len
            )));
        }
        if let Some(bad) = message.0.iter().find(|&&s| s >= spec.alphabet_size) {
            return Err(Error::param(format!(
                "symbol {bad} outside alphabet of size {}",
                spec.alphabet_size
            )));
        }
        let symbols = match (&self.field, spec.backend) {
            (Some(field), _) => (0..spec.codeword_len as u64)
                .map(|j| {
                    let point = field.primitive_power(j);
                    message
                        .0
                        .iter()
                        .rev()
                        .fold(0, |acc, &coef| field.add(field.mul(acc, point), coef))
                })
                .collect(),
            (None, CodeBackend::Synthetic { seed }) => {
                let s = spec.alphabet_size as u64;
                let mut out = message.0.clone();
                for j in spec.message_len..spec.codeword_len {
                    let mut column = rng::stream(seed, Purpose::Generator, j as u64);
                    let parity = message.0.iter().fold(0u64, |acc, &x| {
                        (acc + x as u64 * column.random_range(0..s)) % s
                    });
                    out.push(parity as u32);
                }
                out
            }
            (None, CodeBackend::ReedSolomon) => {
                unreachable!("field is built for Reed-Solomon codes")
            }
        };
        Ok(SymbolString(symbols))
    }
}

/// Convenience wrapper around [`Code::encode`].
pub fn encode(spec: &CodeSpec, message: &SymbolString) -> Result<SymbolString> {
    Code::new(spec.clone())?.encode(message)
}

/// Distance-model codeword for the attacker's easiest message change: `c`
/// with exactly `round(2 theta N)` positions, chosen uniformly, replaced by a
/// different symbol.
pub fn minimal_forgery_codeword(
    spec: &CodeSpec,
    codeword: &SymbolString,
    seed: u64,
) -> Result<SymbolString> {
    if codeword.len() != spec.codeword_len {
        return Err(Error::param(format!(
            "codeword has length {}, expected N = {}",
            codeword.len(),
            spec.codeword_len
        )));
    }
    let flips = spec.forgery_distance();
    if flips < 1 {
        return Err(Error::param(format!(
            "round(2 theta N) = 0 for theta = {}, N = {}: the code cannot separate messages",
            spec.theta, spec.codeword_len
        )));
    }
    if flips > spec.codeword_len {
        return Err(Error::param("forgery distance exceeds codeword length"));
    }
    let mut rng = rng::stream(seed, Purpose::Codeword, 0);
    let mut out = codeword.0.clone();
    let s = spec.alphabet_size;
    for pos in sample(&mut rng, spec.codeword_len, flips).iter() {
        out[pos] = (out[pos] + 1 + rng.random_range(0..s - 1)) % s;
    }
    Ok(SymbolString(out))
}
