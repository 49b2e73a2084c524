//! Monte Carlo harness over the three attack scenarios.
//!
//! A trial is one signed message checked by all `T` verifiers. Trial `t`
//! draws only from substream `(Trial, t)` of the seed, and trials are reduced
//! in fixed-size chunks in index order, so reports do not depend on the
//! number of worker threads.

use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{keygen, sign_codeword, verify_codeword, SchemeParams, Signature, Verdict};
use crate::adversary::{forge_with, ForgeryModel};
use crate::coding::{Code, SymbolString};
use crate::fingerprint::index_set;
use crate::rng::{self, Purpose};
use crate::{Error, Result};

const CHUNK: u64 = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    Genuine,
    /// The attacker alters `round(2 theta N)` codeword positions, or
    /// `mismatched` positions when given.
    Forgery {
        mismatched: Option<u64>,
    },
    /// A malicious signer whose states fail each projection with probability
    /// `(z_acc + z_rej) / (2N)`, centring every tally between the thresholds.
    TunedRepudiation,
}

impl Scenario {
    pub fn name(&self) -> &'static str {
        match self {
            Scenario::Genuine => "genuine",
            Scenario::Forgery { .. } => "forge",
            Scenario::TunedRepudiation => "repudiate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    /// Tallies drawn as sums of binomials with the exact per-position rates.
    Aggregate,
    /// Keys, signatures and forgeries materialized bit by bit.
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct VerdictCounts {
    pub rej: u64,
    pub acc0: u64,
    pub acc1: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialReport {
    pub scenario: &'static str,
    pub engine: Engine,
    pub trials: u64,
    pub verifiers: u32,
    pub codeword_len: u64,
    /// Codeword positions the forger altered (zero outside forgery).
    pub mismatched: u64,
    pub q_reject: Estimate,
    pub q_zero: Estimate,
    pub q_one: Estimate,
    pub verdicts: VerdictCounts,
    /// Fraction of trials in which some verifier 1-accepts and another rejects.
    pub repudiation: Estimate,
    pub mean_tally: Estimate,
    /// Tally value to number of verifier runs that produced it.
    pub histogram: BTreeMap<u64, u64>,
}

#[derive(Default)]
struct Accumulator {
    trials: u64,
    verdicts: VerdictCounts,
    frac_sum: [f64; 3],
    frac_sq: [f64; 3],
    repudiated: u64,
    tally_sum: f64,
    tally_sq: f64,
    runs: u64,
    histogram: BTreeMap<u64, u64>,
}

impl Accumulator {
    fn record(&mut self, tallies: &[u64], params: &SchemeParams) {
        let mut counts = VerdictCounts::default();
        for &z in tallies {
            match Verdict::classify(z, params.z_acc, params.z_rej) {
                Verdict::Rej => counts.rej += 1,
                Verdict::Acc0 => counts.acc0 += 1,
                Verdict::Acc1 => counts.acc1 += 1,
            }
            *self.histogram.entry(z).or_insert(0) += 1;
            self.tally_sum += z as f64;
            self.tally_sq += (z as f64).powi(2);
        }
        let t = tallies.len() as f64;
        for (i, c) in [counts.rej, counts.acc0, counts.acc1]
            .into_iter()
            .enumerate()
        {
            let f = c as f64 / t;
            self.frac_sum[i] += f;
            self.frac_sq[i] += f * f;
        }
        if counts.rej > 0 && counts.acc1 > 0 {
            self.repudiated += 1;
        }
        self.verdicts.rej += counts.rej;
        self.verdicts.acc0 += counts.acc0;
        self.verdicts.acc1 += counts.acc1;
        self.runs += tallies.len() as u64;
        self.trials += 1;
    }

    fn merge(mut self, other: Accumulator) -> Accumulator {
        self.trials += other.trials;
        self.verdicts.rej += other.verdicts.rej;
        self.verdicts.acc0 += other.verdicts.acc0;
        self.verdicts.acc1 += other.verdicts.acc1;
        for i in 0..3 {
            self.frac_sum[i] += other.frac_sum[i];
            self.frac_sq[i] += other.frac_sq[i];
        }
        self.repudiated += other.repudiated;
        self.tally_sum += other.tally_sum;
        self.tally_sq += other.tally_sq;
        self.runs += other.runs;
        for (z, c) in other.histogram {
            *self.histogram.entry(z).or_insert(0) += c;
        }
        self
    }
}

fn estimate(sum: f64, sq: f64, n: f64) -> Estimate {
    let mean = sum / n;
    let var = if n > 1.0 {
        ((sq - n * mean * mean) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    Estimate {
        value: mean,
        std_error: (var / n).sqrt(),
    }
}

/// Runs `trials` independent trials of `scenario`.
pub fn run_trials(
    scenario: Scenario,
    params: &SchemeParams,
    trials: u64,
    engine: Engine,
    seed: u64,
) -> Result<TrialReport> {
    if trials < 1 {
        return Err(Error::Usage("need at least one trial".into()));
    }
    if params.verifiers < 1 {
        return Err(Error::param("need at least one verifier"));
    }
    let n = params.codeword_len();
    let mismatched = match scenario {
        Scenario::Forgery {
            mismatched: Some(m),
        } => m,
        Scenario::Forgery { mismatched: None } => params.code.forgery_distance() as u64,
        _ => 0,
    };
    if mismatched > n {
        return Err(Error::param(format!(
            "{mismatched} altered positions exceed N = {n}"
        )));
    }
    let sampler = TrialSampler::new(scenario, params, mismatched, engine)?;

    let chunks = trials.div_ceil(CHUNK);
    let partials: Vec<Result<Accumulator>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = Accumulator::default();
            let mut tallies = Vec::with_capacity(params.verifiers as usize);
            for t in c * CHUNK..((c + 1) * CHUNK).min(trials) {
                tallies.clear();
                sampler.trial(t, seed, &mut tallies)?;
                acc.record(&tallies, params);
            }
            Ok(acc)
        })
        .collect();
    let mut acc = Accumulator::default();
    for p in partials {
        acc = acc.merge(p?);
    }

    let tn = acc.trials as f64;
    let repudiated = acc.repudiated as f64;
    let rep = repudiated / tn;
    Ok(TrialReport {
        scenario: scenario.name(),
        engine,
        trials,
        verifiers: params.verifiers,
        codeword_len: n,
        mismatched,
        q_reject: estimate(acc.frac_sum[0], acc.frac_sq[0], tn),
        q_zero: estimate(acc.frac_sum[1], acc.frac_sq[1], tn),
        q_one: estimate(acc.frac_sum[2], acc.frac_sq[2], tn),
        verdicts: acc.verdicts,
        repudiation: Estimate {
            value: rep,
            std_error: (rep * (1.0 - rep) / tn).sqrt(),
        },
        mean_tally: estimate(acc.tally_sum, acc.tally_sq, acc.runs as f64),
        histogram: acc.histogram,
    })
}

enum TrialSampler<'a> {
    Rate {
        n: u64,
        rate: f64,
        verifiers: u32,
    },
    Forgery {
        n: u64,
        alpha: f64,
        mismatched: u64,
        verifiers: u32,
        model: ForgeryModel,
        /// Per-position failure probability for each guess distance `w`.
        fail: Vec<f64>,
    },
    Full {
        scenario: Scenario,
        params: &'a SchemeParams,
        code: Code,
        model: Option<ForgeryModel>,
        mismatched: u64,
    },
}

impl<'a> TrialSampler<'a> {
    fn new(
        scenario: Scenario,
        params: &'a SchemeParams,
        mismatched: u64,
        engine: Engine,
    ) -> Result<Self> {
        let n = params.codeword_len();
        let verifiers = params.verifiers;
        let forgery_model = || -> Result<ForgeryModel> {
            ForgeryModel::for_scheme(params.alpha, params.d, params.verifiers)
        };
        match (engine, scenario) {
            (Engine::Aggregate, Scenario::Genuine) => Ok(TrialSampler::Rate {
                n,
                rate: params.alpha,
                verifiers,
            }),
            (Engine::Aggregate, Scenario::TunedRepudiation) => Ok(TrialSampler::Rate {
                n,
                rate: (params.z_acc + params.z_rej) as f64 / (2 * n) as f64,
                verifiers,
            }),
            (Engine::Aggregate, Scenario::Forgery { .. }) => {
                let model = forgery_model()?;
                let ell = params.revealed as f64;
                let d = params.d as f64;
                let fail = (0..=model.radius)
                    .map(|w| 1.0 - (ell - 2.0 * w as f64).powi(2) / (ell * d))
                    .collect();
                Ok(TrialSampler::Forgery {
                    n,
                    alpha: params.alpha,
                    mismatched,
                    verifiers,
                    model,
                    fail,
                })
            }
            (Engine::Full, Scenario::TunedRepudiation) => Err(Error::Usage(
                "tuned repudiation prepares arbitrary states and has no key-level simulation; use the aggregate engine"
                    .into(),
            )),
            (Engine::Full, _) => {
                let model = match scenario {
                    Scenario::Forgery { .. } if mismatched > 0 => Some(forgery_model()?),
                    _ => None,
                };
                Ok(TrialSampler::Full {
                    scenario,
                    params,
                    code: Code::new(params.code.clone())?,
                    model,
                    mismatched,
                })
            }
        }
    }

    fn trial(&self, t: u64, seed: u64, tallies: &mut Vec<u64>) -> Result<()> {
        let mut rng = rng::stream(seed, Purpose::Trial, t);
        match self {
            TrialSampler::Rate { n, rate, verifiers } => {
                let dist = binomial(*n, *rate)?;
                tallies.extend((0..*verifiers).map(|_| dist.sample(&mut rng)));
            }
            TrialSampler::Forgery {
                n,
                alpha,
                mismatched,
                verifiers,
                model,
                fail,
            } => {
                // The forged signature is shared by all verifiers: draw the
                // guess distance once per altered position.
                let mut per_w = vec![0u64; fail.len()];
                if *mismatched > 0 {
                    let w_dist = model.sampler();
                    for _ in 0..*mismatched {
                        per_w[w_dist.sample(&mut rng)] += 1;
                    }
                }
                let untouched = binomial(n - mismatched, *alpha)?;
                let altered: Vec<Option<Binomial>> = per_w
                    .iter()
                    .zip(fail)
                    .map(|(&count, &p)| (count > 0).then(|| binomial(count, p)).transpose())
                    .collect::<Result<_>>()?;
                for _ in 0..*verifiers {
                    let mut z = untouched.sample(&mut rng);
                    for b in altered.iter().flatten() {
                        z += b.sample(&mut rng);
                    }
                    tallies.push(z);
                }
            }
            TrialSampler::Full {
                scenario,
                params,
                code,
                model,
                mismatched,
            } => {
                let keys = keygen(params, rng::derive_seed(seed, Purpose::KeyGen, t))?;
                let spec = code.spec();
                let message = SymbolString::random(spec.message_len, spec.alphabet_size, &mut rng);
                let codeword = code.encode(&message)?;
                let signature = sign_codeword(&keys, &codeword, params)?;
                let (target, presented) = match (scenario, model) {
                    (Scenario::Forgery { .. }, Some(model)) => forge_signature(
                        params,
                        &keys.keys,
                        &codeword,
                        &signature,
                        *mismatched,
                        model,
                        &mut rng,
                    )?,
                    _ => (codeword, signature),
                };
                for _ in 0..params.verifiers {
                    tallies
                        .push(verify_codeword(&keys, &target, &presented, params, &mut rng)?.tally);
                }
            }
        }
        Ok(())
    }
}

fn binomial(n: u64, p: f64) -> Result<Binomial> {
    Binomial::new(n, p.clamp(0.0, 1.0))
        .map_err(|e| Error::domain(format!("binomial({n}, {p}): {e}")))
}

/// Alters `mismatched` uniformly chosen codeword symbols and forges the
/// signature there: bits revealed by the genuine signature are copied, the
/// previously hidden block is guessed by the ball attacker.
fn forge_signature<R: Rng + ?Sized>(
    params: &SchemeParams,
    keys: &[crate::fingerprint::BitString],
    codeword: &SymbolString,
    signature: &Signature,
    mismatched: u64,
    model: &ForgeryModel,
    rng: &mut R,
) -> Result<(SymbolString, Signature)> {
    let s = params.alphabet_size as u32;
    let (d, ell) = (params.d as usize, params.revealed as usize);
    let mut symbols = codeword.as_slice().to_vec();
    let mut revealed = signature.revealed.clone();
    let positions = rand::seq::index::sample(rng, symbols.len(), mismatched as usize);
    for i in positions.iter() {
        let old = symbols[i];
        let new = (old + rng.random_range(1..s)) % s;
        symbols[i] = new;
        let old_block = index_set(old as usize, d, ell)?;
        let (guess, _) = forge_with(&keys[i].restrict(&old_block)?, model, rng)?;
        let new_block = index_set(new as usize, d, ell)?;
        let mut kappa = crate::fingerprint::BitString::zeros(ell);
        let mut guess_bits = guess.iter();
        for (slot, j) in new_block.complement().iter().enumerate() {
            let bit = if old_block.contains(j) {
                guess_bits
                    .next()
                    .expect("old block lies inside the new revealed set")
            } else {
                keys[i].get(j)
            };
            kappa.set(slot, bit);
        }
        revealed[i] = kappa;
    }
    Ok((SymbolString::new(symbols, s)?, Signature { revealed }))
}
