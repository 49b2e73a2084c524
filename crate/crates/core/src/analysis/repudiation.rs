//! Repudiation algebra for `T` independent verifiers.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

const SUM_TOLERANCE: f64 = 1e-12;

/// Per-verifier probabilities of REJ, 0-ACC and 1-ACC.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutcomeDistribution {
    pub q_reject: f64,
    pub q_zero: f64,
    pub q_one: f64,
}

impl OutcomeDistribution {
    pub fn new(q_reject: f64, q_zero: f64, q_one: f64) -> Result<Self> {
        for (name, q) in [("Q_R", q_reject), ("Q_0", q_zero), ("Q_1", q_one)] {
            if !(0.0..=1.0).contains(&q) {
                return Err(Error::domain(format!("{name} = {q} outside [0, 1]")));
            }
        }
        let total = q_reject + q_zero + q_one;
        if (total - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::domain(format!(
                "outcome probabilities sum to {total}"
            )));
        }
        Ok(OutcomeDistribution {
            q_reject,
            q_zero,
            q_one,
        })
    }
}

/// Exact repudiation probability and its two upper bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RepudiationBounds {
    pub exact: f64,
    /// `1 - (1 - min(Q_R, Q_1))^T`
    pub bound_pow: f64,
    /// `T min(Q_R, Q_1)`
    pub bound_lin: f64,
}

/// Probability that at least one of `T` verifiers 1-accepts and at least one
/// rejects: `1 - (1 - Q_R)^T - (1 - Q_1)^T + Q_0^T`.
pub fn repudiation_probability(
    dist: &OutcomeDistribution,
    verifiers: u32,
) -> Result<RepudiationBounds> {
    if verifiers < 1 {
        return Err(Error::domain("need at least one verifier"));
    }
    let t = verifiers as i32;
    let OutcomeDistribution {
        q_reject,
        q_zero,
        q_one,
    } = *dist;
    let exact = if verifiers == 1 || q_reject == 0.0 || q_one == 0.0 {
        0.0
    } else {
        (1.0 - (q_zero + q_one).powi(t) - (q_zero + q_reject).powi(t) + q_zero.powi(t))
            .clamp(0.0, 1.0)
    };
    let m = q_reject.min(q_one);
    let bound_pow = -(verifiers as f64 * (-m).ln_1p()).exp_m1();
    let bound_lin = verifiers as f64 * m;
    assert!(
        exact <= bound_pow + 1e-12,
        "repudiation {exact} above power bound {bound_pow}"
    );
    if bound_lin <= 1.0 {
        assert!(
            bound_pow <= bound_lin + 1e-12,
            "power bound {bound_pow} above linear bound {bound_lin}"
        );
    }
    Ok(RepudiationBounds {
        exact,
        bound_pow,
        bound_lin,
    })
}

/// Repudiation bound `T max(eps1, eps2)` for a scheme that is correct with
/// error `eps1` and `eps2`-secure against forgery, capped at 1.
pub fn repudiation_from_eps(eps1: f64, eps2: f64, verifiers: u32) -> Result<f64> {
    for e in [eps1, eps2] {
        if !(0.0..=1.0).contains(&e) {
            return Err(Error::domain(format!(
                "error probability {e} outside [0, 1]"
            )));
        }
    }
    Ok((verifiers as f64 * eps1.max(eps2)).min(1.0))
}
