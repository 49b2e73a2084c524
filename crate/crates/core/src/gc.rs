//! Gottesman-Chuang baseline.
//!
//! Only the analytic cost model is implemented: asymptotic code rates
//! `L/d = 1 - h(gamma)` for the embedding code and `K/N = 1 - h(beta)` for
//! the message code. Embedding the baseline into fewer dimensions changes
//! constants only and has no formula to reproduce, so it is not modelled.

use serde::Serialize;

use crate::analysis::entropy::binary_entropy;
use crate::{Error, Result};

/// Overlap bound between public keys whose embedded strings differ in one
/// bit: `1 - 4 gamma`.
pub fn gc_delta(gamma: f64) -> Result<f64> {
    if !(0.0..=0.25).contains(&gamma) {
        return Err(Error::domain(format!("gamma = {gamma} outside [0, 1/4]")));
    }
    Ok(1.0 - 4.0 * gamma)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GcParams {
    pub d: u64,
    pub gamma: f64,
    pub beta: f64,
    pub verifiers: u32,
    /// Count the halved cost of a scheme that re-uses unspent states.
    pub reuse: bool,
    /// Required forgery rejection probability.
    pub qr_target: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GcForgery {
    pub delta: f64,
    /// `L = d (1 - h(gamma))`
    pub embedded_len: f64,
    /// `L - T log2 d`
    pub margin: f64,
    pub p_forge1: f64,
    /// `1 - p_forge1`; the genuine error rate is zero, so this is the gap.
    pub j_gc: f64,
}

/// Single-qudit forgery probability
/// `2^-m + (1 - 2^-m) delta^2` with `m = d (1 - h(gamma)) - T log2 d`.
pub fn gc_forge1(d: u64, gamma: f64, verifiers: u32) -> Result<GcForgery> {
    let delta = gc_delta(gamma)?;
    if d < 2 {
        return Err(Error::param(format!(
            "dimension d = {d} must be at least 2"
        )));
    }
    let embedded_len = d as f64 * (1.0 - binary_entropy(gamma)?);
    let margin = embedded_len - verifiers as f64 * (d as f64).log2();
    if margin <= 0.0 {
        return Err(Error::InsecureParameters(format!(
            "L = {embedded_len} does not exceed T log2(d) = {}",
            verifiers as f64 * (d as f64).log2()
        )));
    }
    let guess = (-margin).exp2();
    let p_forge1 = guess + (1.0 - guess) * delta * delta;
    Ok(GcForgery {
        delta,
        embedded_len,
        margin,
        p_forge1,
        j_gc: 1.0 - p_forge1,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MinDimension {
    /// Smallest `d` with `d / log2(d) > T / (1 - h(gamma))`.
    pub solved: u64,
    /// `round(T log2 T)`
    pub approx: u64,
}

pub fn gc_min_dimension(verifiers: u32, gamma: f64) -> Result<MinDimension> {
    if verifiers < 2 {
        return Err(Error::param(format!("need T >= 2, got {verifiers}")));
    }
    gc_delta(gamma)?;
    let target = verifiers as f64 / (1.0 - binary_entropy(gamma)?);
    let ok = |d: u64| d as f64 / (d as f64).log2() > target;
    // d / log2(d) is increasing for d >= 3.
    let mut lo = 3u64;
    let mut hi = 4u64;
    while !ok(hi) {
        lo = hi;
        hi *= 2;
    }
    if ok(lo) {
        hi = lo;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let t = verifiers as f64;
    Ok(MinDimension {
        solved: hi,
        approx: (t * t.log2()).round() as u64,
    })
}

/// `N_min = ln(1/(1 - Q)) / (beta J)`.
pub fn gc_min_codeword(beta: f64, j_gc: f64, qr_target: f64) -> Result<f64> {
    check_codeword_inputs(beta, j_gc, qr_target)?;
    Ok(-(-qr_target).ln_1p() / (beta * j_gc))
}

/// Rejection threshold `2 beta N J - 2 sqrt(beta N J) sqrt(ln(1/(1 - Q)))`;
/// positive exactly when `N > N_min`.
pub fn gc_reject_threshold(n: f64, beta: f64, j_gc: f64, qr_target: f64) -> Result<f64> {
    check_codeword_inputs(beta, j_gc, qr_target)?;
    let mean = beta * n * j_gc;
    Ok(2.0 * mean - 2.0 * mean.sqrt() * (-(-qr_target).ln_1p()).sqrt())
}

fn check_codeword_inputs(beta: f64, j_gc: f64, qr_target: f64) -> Result<()> {
    if !(beta > 0.0 && beta < 0.5) {
        return Err(Error::domain(format!("beta = {beta} outside (0, 1/2)")));
    }
    if !(j_gc > 0.0) {
        return Err(Error::Degenerate(format!(
            "J = {j_gc} leaves no forgery gap"
        )));
    }
    if !(0.0..1.0).contains(&qr_target) {
        return Err(Error::domain(format!(
            "target rejection probability {qr_target} outside [0, 1)"
        )));
    }
    Ok(())
}

/// `(2 - reuse) log2(d) / (1 - h(beta))`.
pub fn gc_qubits_per_bit(d: f64, beta: f64, reuse: bool) -> Result<f64> {
    if !(0.0..0.5).contains(&beta) {
        return Err(Error::domain(format!("beta = {beta} outside [0, 1/2)")));
    }
    if !(d >= 2.0) {
        return Err(Error::domain(format!("dimension {d} below 2")));
    }
    let factor = if reuse { 1.0 } else { 2.0 };
    Ok(factor * d.log2() / (1.0 - binary_entropy(beta)?))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GcReport {
    pub params: GcParams,
    pub delta: f64,
    pub embedded_len: f64,
    pub p_forge1: f64,
    pub j_gc: f64,
    pub d_min: MinDimension,
    pub n_min: f64,
    pub qubits_per_bit: f64,
}

pub fn gc_report(params: GcParams) -> Result<GcReport> {
    if !(params.gamma > 0.0 && params.gamma < 0.25) {
        return Err(Error::param(format!(
            "gamma = {} outside (0, 1/4)",
            params.gamma
        )));
    }
    let forgery = gc_forge1(params.d, params.gamma, params.verifiers)?;
    Ok(GcReport {
        params,
        delta: forgery.delta,
        embedded_len: forgery.embedded_len,
        p_forge1: forgery.p_forge1,
        j_gc: forgery.j_gc,
        d_min: gc_min_dimension(params.verifiers.max(2), params.gamma)?,
        n_min: gc_min_codeword(params.beta, forgery.j_gc, params.qr_target)?,
        qubits_per_bit: gc_qubits_per_bit(params.d as f64, params.beta, params.reuse)?,
    })
}
