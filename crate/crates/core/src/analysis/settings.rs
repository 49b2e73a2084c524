//! Secure parameter settings, forgery rejection bound and qubit accounting.

use serde::Serialize;

use super::entropy::binary_entropy;
use super::tails::chernoff_lower;
use crate::adversary::{self, leakage};
use crate::coding::CodeSpec;
use crate::protocol::SchemeParams;
use crate::{Error, Result};

/// Largest codeword length accepted; beyond it `N` is no longer an exact float.
pub const MAX_CODEWORD_LEN: f64 = 9_007_199_254_740_992.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SettingsOptions {
    /// Keep the finite-size `sqrt(d-l)/l` term in `p1` (larger, safer `N`).
    pub include_correction: bool,
    pub code_seed: u64,
}

impl Default for SettingsOptions {
    fn default() -> Self {
        SettingsOptions {
            include_correction: true,
            code_seed: 0,
        }
    }
}

/// `theta = (alpha/2)(1 + nu)`.
pub fn theta(alpha: f64, nu: f64) -> f64 {
    alpha / 2.0 * (1.0 + nu)
}

pub fn set_parameters(
    alpha: f64,
    d: u64,
    verifiers: u32,
    nu: f64,
    eps_c: f64,
    eps_f: f64,
) -> Result<SchemeParams> {
    set_parameters_with(
        alpha,
        d,
        verifiers,
        nu,
        eps_c,
        eps_f,
        SettingsOptions::default(),
    )
}

/// Chooses `theta`, `N`, `z_acc` and `z_rej` so that the scheme is correct
/// with error `eps_c` and secure against forgery with error `eps_f`.
///
/// `N = (1/alpha^3) ((sqrt(3 ln 1/eps_c) + sqrt(1 + 4 theta) sqrt(2 ln 1/eps_f)) / (gap/alpha))^2`,
/// rounded up. `z_acc` is rounded up and `z_rej` down.
pub fn set_parameters_with(
    alpha: f64,
    d: u64,
    verifiers: u32,
    nu: f64,
    eps_c: f64,
    eps_f: f64,
    options: SettingsOptions,
) -> Result<SchemeParams> {
    let s = adversary::alphabet_size(alpha)?;
    let hidden = adversary::hidden_length(alpha, d)?;
    for (name, eps) in [("eps_c", eps_c), ("eps_f", eps_f)] {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::param(format!("{name} = {eps} outside (0, 1)")));
        }
    }
    if !(nu > alpha) {
        return Err(Error::param(format!(
            "nu = {nu} must exceed alpha = {alpha}"
        )));
    }
    let theta = theta(alpha, nu);
    if theta >= 0.5 {
        return Err(Error::param(format!("theta = {theta} must be below 1/2")));
    }
    let bound = adversary::p1_bound_with(alpha, d, verifiers, options.include_correction)?;
    if !(bound.gap > 0.0) {
        return Err(Error::InsecureParameters(format!(
            "gap 1 - p1 - alpha = {} is not positive",
            bound.gap
        )));
    }
    let lc = (1.0 / eps_c).ln();
    let lf = (1.0 / eps_f).ln();
    let root = (3.0 * lc).sqrt() + (1.0 + 4.0 * theta).sqrt() * (2.0 * lf).sqrt();
    let n_real = (root / (bound.gap / alpha)).powi(2) / alpha.powi(3);
    if !(n_real < MAX_CODEWORD_LEN) {
        return Err(Error::param(format!(
            "codeword length {n_real:e} exceeds {MAX_CODEWORD_LEN:e}"
        )));
    }
    let n = n_real.ceil();
    let z_acc = (n * alpha + (n * alpha).sqrt() * (3.0 * lc).sqrt()).ceil();
    let mean = forgery_mean(n, alpha, theta, bound.p1);
    let z_rej = (mean - mean.sqrt() * (2.0 * lf).sqrt()).floor();

    let code = CodeSpec::synthetic(s as u32, n as usize, theta, options.code_seed)?;
    let params = SchemeParams {
        d,
        alphabet_size: s,
        revealed: d - hidden,
        alpha,
        verifiers,
        theta,
        nu,
        code,
        z_acc: z_acc as u64,
        z_rej: z_rej.max(0.0) as u64,
        eps_c,
        eps_f,
        phi: leakage(d, verifiers),
        p1: bound.p1,
        gap: bound.gap,
        include_correction: options.include_correction,
    };
    params.validate()?;
    Ok(params)
}

/// Expected forgery tally `(1 - 2 theta) N alpha + 2 theta N (1 - p1)`.
fn forgery_mean(n: f64, alpha: f64, theta: f64, p1: f64) -> f64 {
    (1.0 - 2.0 * theta) * n * alpha + 2.0 * theta * n * (1.0 - p1)
}

/// Lower bound on the probability that a forgery is rejected:
/// `1 - exp(-delta^2 E / 2)` with `E` the expected forgery tally and
/// `delta = (E - z_rej)/E`.
pub fn forgery_reject_bound(n: u64, alpha: f64, theta: f64, p1: f64, z_rej: f64) -> Result<f64> {
    let mean = forgery_mean(n as f64, alpha, theta, p1);
    if z_rej >= mean {
        return Err(Error::Degenerate(format!(
            "z_rej = {z_rej} is not below the expected forgery tally {mean}"
        )));
    }
    Ok(1.0 - chernoff_lower(mean, (mean - z_rej) / mean)?)
}

pub fn forgery_reject_probability(params: &SchemeParams) -> Result<f64> {
    forgery_reject_bound(
        params.codeword_len(),
        params.alpha,
        params.theta,
        params.p1,
        params.z_rej as f64,
    )
}

/// `T max(eps_f^(nu^2), eps_c^(nu^2))`, capped at 1. The `1 + O(alpha)`
/// factor of the underlying estimate is not included.
pub fn repudiation_bound_scheme(params: &SchemeParams) -> f64 {
    repudiation_bound(params.verifiers, params.nu, params.eps_c, params.eps_f)
}

pub fn repudiation_bound(verifiers: u32, nu: f64, eps_c: f64, eps_f: f64) -> f64 {
    let e = nu * nu;
    (verifiers as f64 * eps_f.powf(e).max(eps_c.powf(e))).min(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QubitCost {
    /// `N log2(d) / (K log2(S))`
    pub exact: f64,
    /// `(log2(d) / log2(S)) / (1 - h(theta))`
    pub asymptotic: f64,
    /// `(1 + (log2(T) + log2(log2(d))) / log2(S)) N / K`, attained when the
    /// leakage constraint `d - l >= T log2(d)` is tight.
    pub leakage_floor: f64,
}

pub fn qubits_per_bit(params: &SchemeParams) -> Result<QubitCost> {
    qubit_cost(
        params.d as f64,
        params.alphabet_size as f64,
        params.codeword_len() as f64,
        params.code.message_len as f64,
        params.theta,
        params.verifiers,
    )
}

pub fn qubit_cost(d: f64, s: f64, n: f64, k: f64, theta: f64, verifiers: u32) -> Result<QubitCost> {
    if !(k > 0.0) {
        return Err(Error::domain("message length K = 0"));
    }
    if !(s >= 2.0 && d >= s) {
        return Err(Error::domain(format!(
            "need 2 <= S <= d, got S = {s}, d = {d}"
        )));
    }
    let ratio = d.log2() / s.log2();
    let exact = n * ratio / k;
    let asymptotic = ratio / (1.0 - binary_entropy(theta)?);
    let leakage_floor = if verifiers >= 1 {
        (1.0 + ((verifiers as f64).log2() + d.log2().log2()) / s.log2()) * n / k
    } else {
        n / k
    };
    let admissible = d / s > verifiers as f64 * d.log2();
    if admissible {
        assert!(
            exact >= leakage_floor * (1.0 - 1e-12),
            "qubit cost {exact} below leakage floor {leakage_floor}"
        );
    }
    Ok(QubitCost {
        exact,
        asymptotic,
        leakage_floor,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::tails::genuine_accept_probability;

    #[test]
    fn theta_example() {
        assert!((theta(0.1, 0.2) - 0.06).abs() < 1e-15);
    }

    #[test]
    fn reference_setting() {
        let p = set_parameters(0.25, 1024, 10, 0.3, 1e-9, 1e-12).unwrap();
        assert!((p.theta - 0.1625).abs() < 1e-15);
        assert!((p.p1 - 0.633_182_801_69).abs() < 1e-9);
        assert!((p.gap - 0.116_817_198_31).abs() < 1e-9);
        // Independent evaluation of the closed forms.
        assert_eq!(p.codeword_len(), 89_090);
        assert_eq!(p.z_acc, 23_450);
        assert_eq!(p.z_rej, 24_464);
        assert_eq!(p.revealed, 768);
        assert_eq!(p.alphabet_size, 4);
        let n = p.codeword_len() as f64;
        assert!(p.alpha * n <= p.z_acc as f64);
        assert!(p.z_acc < p.z_rej && p.z_rej as f64 <= 2.0 * p.theta * n);
        assert!(
            genuine_accept_probability(p.codeword_len(), p.alpha, p.z_acc).unwrap() >= 1.0 - 1e-9
        );
        assert!(forgery_reject_probability(&p).unwrap() >= 1.0 - 1e-12);
    }

    #[test]
    fn correction_flag_shrinks_codeword() {
        let with = set_parameters(0.25, 1024, 10, 0.3, 1e-9, 1e-12).unwrap();
        let without = set_parameters_with(
            0.25,
            1024,
            10,
            0.3,
            1e-9,
            1e-12,
            SettingsOptions {
                include_correction: false,
                code_seed: 0,
            },
        )
        .unwrap();
        assert!(without.codeword_len() < with.codeword_len());
        assert!(!without.include_correction);
    }

    #[test]
    fn precondition_errors() {
        let err = set_parameters(0.3, 1024, 10, 0.5, 1e-9, 1e-12).unwrap_err();
        assert!(
            err.to_string().contains("S must be an integer dividing d"),
            "{err}"
        );
        let err = set_parameters(0.1, 1024, 10, 0.5, 1e-9, 1e-12).unwrap_err();
        assert!(
            err.to_string().contains("S must be an integer dividing d"),
            "{err}"
        );
        assert!(set_parameters(0.25, 1024, 10, 0.2, 1e-9, 1e-12).is_err());
        assert!(matches!(
            set_parameters(0.25, 64, 10, 0.3, 1e-9, 1e-12),
            Err(Error::InsecureParameters(_))
        ));
        assert!(set_parameters(0.25, 1024, 10, 0.3, 0.0, 1e-12).is_err());
    }

    #[test]
    fn z_acc_arithmetic() {
        // N = 10^4, alpha = 0.01, eps_c = e^-3: 100 + 10 * 3.
        let n: f64 = 1e4;
        let z = n * 0.01 + (n * 0.01).sqrt() * (3.0f64 * 3.0).sqrt();
        assert!((z - 130.0).abs() < 1e-12);
    }

    #[test]
    fn forgery_bound_edges() {
        // theta = 0: expected tally N alpha sits below any valid z_rej.
        assert!(matches!(
            forgery_reject_bound(1000, 0.25, 0.0, 0.6, 260.0),
            Err(Error::Degenerate(_))
        ));
        // z_rej placed exactly at E - sqrt(E) sqrt(2 ln 1/eps).
        let (n, alpha, theta, p1, eps) = (50_000u64, 0.25, 0.16, 0.63, 1e-12f64);
        let e = forgery_mean(n as f64, alpha, theta, p1);
        let z = e - e.sqrt() * (2.0 * (1.0 / eps).ln()).sqrt();
        let bound = forgery_reject_bound(n, alpha, theta, p1, z).unwrap();
        assert!((bound - (1.0 - eps)).abs() < 1e-15);
    }

    #[test]
    fn repudiation_bound_examples() {
        assert!((repudiation_bound(10, 1.0, 1e-9, 1e-12) - 1e-8).abs() < 1e-20);
        assert_eq!(repudiation_bound(10, 1e-9, 1e-9, 1e-12), 1.0);
        let e: f64 = 1e-6;
        assert!((repudiation_bound(3, 0.5, e, e) - 3.0 * e.powf(0.25)).abs() < 1e-15);
    }

    #[test]
    fn qubit_accounting() {
        let c = qubit_cost(2f64.powi(20), 2f64.powi(10), 1000.0, 990.0, 0.001, 1).unwrap();
        assert!((c.asymptotic - 2.0 / (1.0 - binary_entropy(0.001).unwrap())).abs() < 1e-12);
        assert!((c.asymptotic - 2.023).abs() < 1e-3);
        // Degenerate S = d: ratio 1.
        let c = qubit_cost(1024.0, 1024.0, 100.0, 50.0, 0.1, 0).unwrap();
        assert!((c.asymptotic - 1.0 / (1.0 - binary_entropy(0.1).unwrap())).abs() < 1e-12);
        assert!(qubit_cost(1024.0, 4.0, 100.0, 0.0, 0.1, 1).is_err());
        // Tight leakage: d/S = T log2(d) with d = 256, S = 4, T = 8.
        let c = qubit_cost(256.0, 4.0, 100.0, 80.0, 0.1, 8).unwrap();
        assert!((c.exact - c.leakage_floor).abs() < 1e-12);
    }

    #[test]
    fn scheme_beats_baseline_by_log_s() {
        let p = set_parameters(0.25, 1024, 10, 0.3, 1e-9, 1e-12).unwrap();
        let ours = qubits_per_bit(&p).unwrap().asymptotic;
        let gc = crate::gc::gc_qubits_per_bit(1024.0, p.theta, true).unwrap();
        assert!((gc / ours - 2.0).abs() < 1e-12);
    }
}
