//! Qubit cost versus security over a log-spaced range of dimensions.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::settings::{qubits_per_bit, set_parameters_with, SettingsOptions};
use crate::adversary::alphabet_size;
use crate::gc::gc_qubits_per_bit;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum XAxis {
    Gap,
    Codelength,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub verifiers: u32,
    pub alphas: Vec<f64>,
    pub d_min: f64,
    pub d_max: f64,
    pub points: usize,
    pub nu: f64,
    pub eps_c: f64,
    pub eps_f: f64,
    pub x_axis: XAxis,
    pub include_correction: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub alpha: f64,
    /// Requested dimension snapped to the nearest multiple of `S`.
    pub d: u64,
    /// Log-spaced dimension before snapping.
    pub d_requested: f64,
    pub theta: f64,
    pub n: Option<u64>,
    pub p1: Option<f64>,
    pub gap: Option<f64>,
    pub qubits_per_bit: Option<f64>,
    /// Baseline at the same `d` with `beta = theta`, re-using unspent states.
    pub gc_qubits_per_bit: Option<f64>,
    pub admissible: bool,
    pub reason: Option<String>,
}

/// `points` log-spaced dimensions in `[d_min, d_max]`, each snapped to the
/// nearest positive multiple of `S`.
pub fn dimension_grid(d_min: f64, d_max: f64, points: usize, s: u64) -> Vec<(f64, u64)> {
    let (lo, hi) = (d_min.ln(), d_max.ln());
    (0..points)
        .map(|i| {
            let t = if points == 1 {
                0.0
            } else {
                i as f64 / (points - 1) as f64
            };
            let raw = (lo + t * (hi - lo)).exp();
            let snapped = ((raw / s as f64).round() as u64).max(1) * s;
            (raw, snapped)
        })
        .collect()
}

pub fn sweep(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    if config.points == 0 || config.alphas.is_empty() {
        return Err(Error::Sweep("empty sweep grid".into()));
    }
    if !(config.d_min >= 2.0 && config.d_max >= config.d_min && config.d_max.is_finite()) {
        return Err(Error::Sweep(format!(
            "invalid dimension range [{}, {}]",
            config.d_min, config.d_max
        )));
    }
    let mut rows = Vec::with_capacity(config.points * config.alphas.len());
    for &alpha in &config.alphas {
        let s = alphabet_size(alpha).map_err(|e| Error::Sweep(e.to_string()))?;
        let theta = super::settings::theta(alpha, config.nu);
        let mut group: Vec<SweepRow> = dimension_grid(config.d_min, config.d_max, config.points, s)
            .into_par_iter()
            .map(|(raw, d)| row(config, alpha, theta, raw, d))
            .collect();
        group.sort_by(|a, b| {
            b.admissible.cmp(&a.admissible).then_with(|| {
                let key = |r: &SweepRow| match config.x_axis {
                    XAxis::Gap => r.gap.unwrap_or(f64::INFINITY),
                    XAxis::Codelength => r.n.map_or(f64::INFINITY, |n| n as f64),
                };
                key(a).total_cmp(&key(b)).then(a.d.cmp(&b.d))
            })
        });
        rows.extend(group);
    }
    if !rows.iter().any(|r| r.admissible) {
        return Err(Error::Sweep("no admissible point in the sweep".into()));
    }
    Ok(rows)
}

fn row(config: &SweepConfig, alpha: f64, theta: f64, raw: f64, d: u64) -> SweepRow {
    let options = SettingsOptions {
        include_correction: config.include_correction,
        code_seed: 0,
    };
    let gc = gc_qubits_per_bit(d as f64, theta, true).ok();
    let outcome = set_parameters_with(
        alpha,
        d,
        config.verifiers,
        config.nu,
        config.eps_c,
        config.eps_f,
        options,
    )
    .and_then(|p| qubits_per_bit(&p).map(|q| (p, q)));
    match outcome {
        Ok((p, q)) => SweepRow {
            alpha,
            d,
            d_requested: raw,
            theta,
            n: Some(p.codeword_len()),
            p1: Some(p.p1),
            gap: Some(p.gap),
            qubits_per_bit: Some(q.exact),
            gc_qubits_per_bit: gc,
            admissible: true,
            reason: None,
        },
        Err(e) => SweepRow {
            alpha,
            d,
            d_requested: raw,
            theta,
            n: None,
            p1: None,
            gap: None,
            qubits_per_bit: None,
            gc_qubits_per_bit: gc,
            admissible: false,
            reason: Some(e.to_string()),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(alphas: Vec<f64>, d_min: f64, d_max: f64, points: usize) -> SweepConfig {
        SweepConfig {
            verifiers: 100,
            alphas,
            d_min,
            d_max,
            points,
            nu: 0.2,
            eps_c: 1e-9,
            eps_f: 1e-12,
            x_axis: XAxis::Gap,
            include_correction: true,
        }
    }

    #[test]
    fn grid_snaps_to_multiples() {
        let g = dimension_grid(1e4, 1e8, 9, 10);
        assert_eq!(g.len(), 9);
        assert!(g.iter().all(|&(_, d)| d % 10 == 0));
        assert!((g[0].0 - 1e4).abs() < 1e-6 && (g[8].0 - 1e8).abs() < 1e-2);
        let single = dimension_grid(5.0, 5.0, 1, 4);
        assert_eq!(single.len(), 1);
        assert!((single[0].0 - 5.0).abs() < 1e-12 && single[0].1 == 4);
    }

    #[test]
    fn low_alpha_range_is_admissible() {
        let rows = sweep(&config(vec![0.01], 3e5, 8e7, 12)).unwrap();
        assert_eq!(rows.len(), 12);
        assert!(rows.iter().all(|r| r.admissible), "{rows:?}");
        for r in &rows {
            let (p1, gap) = (r.p1.unwrap(), r.gap.unwrap());
            assert_eq!(gap, 1.0 - p1 - r.alpha);
            assert!(p1 > 1.0 - 3.0 * r.alpha);
            assert!(r.qubits_per_bit.unwrap() < r.gc_qubits_per_bit.unwrap());
        }
    }

    #[test]
    fn inadmissible_rows_are_kept_and_last() {
        let rows = sweep(&config(vec![0.25, 0.01], 1e3, 1e6, 6)).unwrap();
        assert_eq!(rows.len(), 12);
        let low: Vec<_> = rows.iter().filter(|r| r.alpha == 0.01).collect();
        assert!(low.iter().any(|r| !r.admissible));
        let first_bad = low.iter().position(|r| !r.admissible).unwrap();
        assert!(low[first_bad..]
            .iter()
            .all(|r| !r.admissible && r.reason.is_some()));
    }

    #[test]
    fn codelength_axis_orders_by_n() {
        let mut c = config(vec![0.1], 1e4, 1e7, 8);
        c.x_axis = XAxis::Codelength;
        let rows = sweep(&c).unwrap();
        let ns: Vec<u64> = rows.iter().filter_map(|r| r.n).collect();
        assert!(ns.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn all_inadmissible_is_an_error() {
        assert!(matches!(
            sweep(&config(vec![0.01], 1e3, 1e4, 4)),
            Err(Error::Sweep(_))
        ));
        assert!(matches!(
            sweep(&config(vec![0.3], 1e5, 1e6, 4)),
            Err(Error::Sweep(_))
        ));
    }
}
