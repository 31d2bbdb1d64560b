//! Seeded Monte Carlo estimation of success probability and post-selected
//! fidelity.
//!
//! Trial `t` draws all of its randomness from ChaCha8 seeded with the run
//! seed on stream `t`, so results do not depend on how trials are spread
//! over threads. Counts are reduced as integers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::circuit::{run, validate, Circuit, FaultAssignment};
use crate::error::{Error, Result};
use crate::noise::{enumerate_fault_sites, FaultSampler, NoiseModel};
use crate::tableau::RngCoin;

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;

const BLOCK: u64 = 2048;

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloReport {
    pub protocol: String,
    pub model: NoiseModel<f64>,
    pub trials: u64,
    pub passes: u64,
    /// Trials that passed and ended in the target state.
    pub matches: u64,
    pub seed: u64,
}

/// Wilson score interval for `k` successes out of `n`.
pub fn wilson_interval(k: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n_f = n as f64;
    let p = k as f64 / n_f;
    let z2 = z * z;
    let denom = 1.0 + z2 / n_f;
    let centre = (p + z2 / (2.0 * n_f)) / denom;
    let half = z * (p * (1.0 - p) / n_f + z2 / (4.0 * n_f * n_f)).sqrt() / denom;
    ((centre - half).max(0.0).min(p), (centre + half).min(1.0).max(p))
}

impl MonteCarloReport {
    pub fn success_probability(&self) -> f64 {
        self.passes as f64 / self.trials as f64
    }

    /// `None` when no trial passed.
    pub fn fidelity(&self) -> Option<f64> {
        (self.passes > 0).then(|| self.matches as f64 / self.passes as f64)
    }

    pub fn ci_success(&self) -> (f64, f64) {
        wilson_interval(self.passes, self.trials, Z_95)
    }

    pub fn ci_fidelity(&self) -> Option<(f64, f64)> {
        (self.passes > 0).then(|| wilson_interval(self.matches, self.passes, Z_95))
    }

    /// Binomial standard error of the success estimate.
    pub fn sigma_success(&self) -> f64 {
        let p = self.success_probability();
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }

    /// Binomial standard error of the fidelity estimate.
    pub fn sigma_fidelity(&self) -> Option<f64> {
        self.fidelity()
            .map(|f| (f * (1.0 - f) / self.passes as f64).sqrt())
    }

    pub fn csv_row(&self) -> McRow {
        let (slo, shi) = self.ci_success();
        let fid = self.ci_fidelity();
        McRow {
            protocol: self.protocol.clone(),
            eps: self.model.epsilon,
            p_gate: self.model.p_gate,
            p_meas: self.model.p_meas,
            trials: self.trials,
            seed: self.seed,
            success: Some(self.success_probability()),
            success_lo: Some(slo),
            success_hi: Some(shi),
            fidelity: self.fidelity(),
            fidelity_lo: fid.map(|f| f.0),
            fidelity_hi: fid.map(|f| f.1),
        }
    }
}

/// One CSV row. Missing values (undefined fidelity, or intervals that an
/// engine does not produce) are written as `NA`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McRow {
    pub protocol: String,
    pub eps: f64,
    pub p_gate: f64,
    pub p_meas: f64,
    pub trials: u64,
    pub seed: u64,
    #[serde(serialize_with = "na")]
    pub success: Option<f64>,
    #[serde(serialize_with = "na")]
    pub success_lo: Option<f64>,
    #[serde(serialize_with = "na")]
    pub success_hi: Option<f64>,
    #[serde(serialize_with = "na")]
    pub fidelity: Option<f64>,
    #[serde(serialize_with = "na")]
    pub fidelity_lo: Option<f64>,
    #[serde(serialize_with = "na")]
    pub fidelity_hi: Option<f64>,
}

pub(crate) fn na<S: serde::Serializer>(v: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(x) => s.serialize_f64(*x),
        None => s.serialize_str("NA"),
    }
}

/// Writes reports as CSV with a header row.
pub fn reports_to_csv(reports: &[MonteCarloReport]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    if reports.is_empty() {
        w.write_record(MC_COLUMNS).map_err(|e| Error::Io(e.to_string()))?;
    }
    for r in reports {
        w.serialize(r.csv_row()).map_err(|e| Error::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub const MC_COLUMNS: [&str; 12] = [
    "protocol",
    "eps",
    "p_gate",
    "p_meas",
    "trials",
    "seed",
    "success",
    "success_lo",
    "success_hi",
    "fidelity",
    "fidelity_lo",
    "fidelity_hi",
];

/// Runs `trials` independent noisy executions of `circuit`.
///
/// The circuit must validate. Because validation proves that the
/// noiseless run passes and reaches the target for every measurement
/// outcome, trials without faults are counted without being executed.
pub fn run_mc(
    circuit: &Circuit,
    model: &NoiseModel<f64>,
    trials: u64,
    seed: u64,
) -> Result<MonteCarloReport> {
    if trials == 0 {
        return Err(Error::Domain("at least one trial is required".into()));
    }
    let diagnostics = validate(circuit);
    if !diagnostics.is_empty() {
        let text: Vec<String> = diagnostics.iter().map(|d| d.to_string()).collect();
        return Err(Error::Validation(text.join("\n")));
    }
    let sampler = FaultSampler::new(enumerate_fault_sites(circuit, model), model);
    let base = ChaCha8Rng::seed_from_u64(seed);
    let blocks = trials.div_ceil(BLOCK);
    let (passes, matches) = (0..blocks)
        .into_par_iter()
        .map(|b| -> Result<(u64, u64)> {
            let mut faults = FaultAssignment::default();
            let (mut passes, mut matches) = (0u64, 0u64);
            for t in b * BLOCK..((b + 1) * BLOCK).min(trials) {
                let mut rng = base.clone();
                rng.set_stream(t);
                sampler.sample_into(&mut rng, &mut faults);
                if faults.is_empty() {
                    passes += 1;
                    matches += 1;
                    continue;
                }
                let r = run(circuit, &faults, &mut RngCoin(&mut rng), true)?;
                passes += u64::from(r.passed);
                matches += u64::from(r.success());
            }
            Ok((passes, matches))
        })
        .try_reduce(|| (0, 0), |a, b| Ok((a.0 + b.0, a.1 + b.1)))?;
    Ok(MonteCarloReport {
        protocol: circuit.name().to_string(),
        model: model.clone(),
        trials,
        passes,
        matches,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_contains_estimate() {
        for (k, n) in [(0, 10), (10, 10), (3, 10), (500, 1000)] {
            let (lo, hi) = wilson_interval(k, n, Z_95);
            let p = k as f64 / n as f64;
            assert!(lo <= p && p <= hi && lo >= 0.0 && hi <= 1.0);
        }
        let (lo, hi) = wilson_interval(50, 100, Z_95);
        assert!((lo - 0.4038).abs() < 1e-3 && (hi - 0.5962).abs() < 1e-3);
    }
}
