//! Exhaustive enumeration of fault patterns with exact probabilities.
//!
//! Every site either stays quiet or fires one of its alternatives, so a
//! circuit with sites `s_1…s_k` has `Π (1 + |alternatives(s_i)|)` patterns.
//! Feasible for a handful of sites; used as the oracle for the Monte Carlo
//! engine and, with a rational scalar, gives closed-form values.

use rayon::prelude::*;

use crate::circuit::{sweep_coins, CoinSweep, Circuit, FaultAssignment, MAX_COIN_LEAVES};
use crate::error::{Error, Result};
use crate::noise::{enumerate_fault_sites, NoiseModel};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct ExactReport<T> {
    /// Probability that every check passes.
    pub pass: T,
    /// Probability that every check passes and the target is reached.
    pub pass_and_correct: T,
    pub patterns: usize,
}

impl<T: Scalar> ExactReport<T> {
    pub fn success(&self) -> T {
        self.pass.clone()
    }

    pub fn fidelity(&self) -> Option<T> {
        (!self.pass.is_zero()).then(|| self.pass_and_correct.clone() / self.pass.clone())
    }
}

/// Default cap on the number of enumerated patterns.
pub const MAX_PATTERNS: usize = 1 << 20;

/// Exact success probability and post-selected fidelity of `circuit` under
/// `model`.
pub fn exact_enumeration<T: Scalar>(
    circuit: &Circuit,
    model: &NoiseModel<T>,
    max_patterns: usize,
) -> Result<ExactReport<T>> {
    let sites = enumerate_fault_sites(circuit, model);
    let radices: Vec<usize> = sites.iter().map(|s| s.alternatives.len() + 1).collect();
    let total = radices
        .iter()
        .try_fold(1usize, |acc, &r| acc.checked_mul(r).filter(|&v| v <= max_patterns))
        .ok_or_else(|| {
            Error::Domain(format!(
                "{} fault sites exceed the enumeration limit of {max_patterns} patterns",
                sites.len()
            ))
        })?;
    let quiet: Vec<T> = sites
        .iter()
        .map(|s| T::one() - s.total_weight(model))
        .collect();
    let (pass, correct) = (0..total)
        .into_par_iter()
        .map(|index| -> Result<(T, T)> {
            let mut rest = index;
            let mut probability = T::one();
            let mut faults = Vec::new();
            for (k, site) in sites.iter().enumerate() {
                let digit = rest % radices[k];
                rest /= radices[k];
                if digit == 0 {
                    probability = probability * quiet[k].clone();
                } else {
                    let alt = &site.alternatives[digit - 1];
                    probability = probability * alt.weight(model, site.parameter);
                    faults.push(site.fault(digit - 1));
                }
            }
            if probability.is_zero() {
                return Ok((T::zero(), T::zero()));
            }
            let assignment = FaultAssignment::new(faults);
            let result = match sweep_coins(circuit, &assignment, MAX_COIN_LEAVES)? {
                CoinSweep::Deterministic(r) => r,
                CoinSweep::Ambiguous { .. } => {
                    return Err(Error::Ambiguity(format!(
                        "fault pattern {index} depends on measurement outcomes"
                    )))
                }
            };
            let p = if result.passed { probability.clone() } else { T::zero() };
            let c = if result.success() { probability } else { T::zero() };
            Ok((p, c))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold((T::zero(), T::zero()), |(a, b), (p, c)| (a + p, b + c));
    Ok(ExactReport {
        pass,
        pass_and_correct: correct,
        patterns: total,
    })
}
