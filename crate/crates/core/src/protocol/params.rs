use serde::Serialize;

use crate::adversary::{self, leakage};
use crate::coding::CodeSpec;
use crate::{Error, Result};

/// Tunables and derived quantities of one instance of the scheme.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchemeParams {
    pub d: u64,
    /// `S = 1/alpha`
    pub alphabet_size: u64,
    /// `l = d - d/S`
    pub revealed: u64,
    pub alpha: f64,
    pub verifiers: u32,
    pub theta: f64,
    pub nu: f64,
    pub code: CodeSpec,
    pub z_acc: u64,
    pub z_rej: u64,
    pub eps_c: f64,
    pub eps_f: f64,
    /// `T log2(d) / d`
    pub phi: f64,
    pub p1: f64,
    pub gap: f64,
    /// Whether `p1` includes the finite-size `sqrt(d-l)/l` term.
    pub include_correction: bool,
}

impl SchemeParams {
    /// Parameters for simulation with user-chosen code and thresholds.
    /// Only the structural constraints are checked; use
    /// [`SchemeParams::validate`] for the security constraints.
    pub fn custom(
        d: u64,
        alpha: f64,
        verifiers: u32,
        code: CodeSpec,
        z_acc: u64,
        z_rej: u64,
    ) -> Result<Self> {
        let hidden = adversary::hidden_length(alpha, d)?;
        let s = d / hidden;
        if code.alphabet_size as u64 != s {
            return Err(Error::param(format!(
                "code alphabet {} does not match S = {s}",
                code.alphabet_size
            )));
        }
        let n = code.codeword_len as u64;
        if z_acc >= z_rej || z_rej > n {
            return Err(Error::param(format!(
                "thresholds must satisfy z_acc < z_rej <= N, got {z_acc}, {z_rej}, N = {n}"
            )));
        }
        let phi = leakage(d, verifiers);
        let (p1, gap) = match adversary::p1_bound(alpha, d, verifiers) {
            Ok(b) => (b.p1, b.gap),
            Err(_) => (f64::NAN, f64::NAN),
        };
        Ok(SchemeParams {
            d,
            alphabet_size: s,
            revealed: d - hidden,
            alpha,
            verifiers,
            theta: code.theta,
            nu: 2.0 * code.theta / alpha - 1.0,
            code,
            z_acc,
            z_rej,
            eps_c: f64::NAN,
            eps_f: f64::NAN,
            phi,
            p1,
            gap,
            include_correction: true,
        })
    }

    pub fn hidden(&self) -> u64 {
        self.d - self.revealed
    }

    pub fn codeword_len(&self) -> u64 {
        self.code.codeword_len as u64
    }

    /// Checks `S | d`, `alpha N <= z_acc < z_rej <= 2 theta N`, `nu > alpha`
    /// and `d - l > T log2(d)`.
    pub fn validate(&self) -> Result<()> {
        if self.alphabet_size * self.hidden() != self.d {
            return Err(Error::param(format!(
                "S must be an integer dividing d (S = {}, d = {})",
                self.alphabet_size, self.d
            )));
        }
        let n = self.codeword_len() as f64;
        let lower = self.alpha * n;
        let upper = 2.0 * self.theta * n;
        let (za, zr) = (self.z_acc as f64, self.z_rej as f64);
        if !(lower <= za && self.z_acc < self.z_rej && zr <= upper) {
            return Err(Error::param(format!(
                "thresholds violate alpha N <= z_acc < z_rej <= 2 theta N: {lower} <= {za} < {zr} <= {upper}"
            )));
        }
        if !(self.nu > self.alpha) {
            return Err(Error::param(format!(
                "nu = {} must exceed alpha = {}",
                self.nu, self.alpha
            )));
        }
        if !(self.phi < self.alpha) {
            return Err(Error::InsecureParameters(format!(
                "d - l = {} does not exceed T log2(d) = {}",
                self.hidden(),
                self.verifiers as f64 * (self.d as f64).log2()
            )));
        }
        Ok(())
    }
}
