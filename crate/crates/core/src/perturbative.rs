//! First-order branch expansion.
//!
//! The no-fault branch and every single-fault branch are executed once.
//! Each alternative is tagged as detected (some check fails), harmless
//! (checks pass, target reached) or harmful (checks pass, wrong state).
//! With `w` the alternative weights,
//!
//! ```text
//! success  = 1 - Σ w(detected)
//! fidelity = 1 - Σ w(harmful)
//! ```
//!
//! The fidelity line is the first-order expansion of
//! `P(pass and correct) / P(pass)`: detected weight appears in both and
//! cancels.

use std::fmt;

use num_traits::One;
use rayon::prelude::*;
use serde::Serialize;

use crate::circuit::{sweep_coins, validate, Circuit, CoinSweep, FaultAssignment, MAX_COIN_LEAVES};
use crate::error::{Error, Result};
use crate::montecarlo::run_mc;
use crate::noise::{enumerate_fault_sites, FaultSite, NoiseModel, Parameter};
use crate::scalar::Scalar;
use crate::Rational;

/// Degree-1 polynomial in `eps`, `p_gate` and `p_meas`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearPolynomial<T> {
    pub constant: T,
    /// Indexed by [`Parameter::index`].
    pub coefficients: [T; 3],
}

impl<T: Scalar> LinearPolynomial<T> {
    pub fn constant(value: T) -> Self {
        LinearPolynomial {
            constant: value,
            coefficients: [T::zero(), T::zero(), T::zero()],
        }
    }

    /// `constant + Σ coefficient·parameter` from `(parameter, coefficient)`
    /// pairs; repeated parameters add up.
    pub fn new(constant: T, terms: &[(Parameter, T)]) -> Self {
        let mut p = Self::constant(constant);
        for (param, c) in terms {
            p.coefficients[param.index()] = p.coefficients[param.index()].clone() + c.clone();
        }
        p
    }

    pub fn coefficient(&self, parameter: Parameter) -> &T {
        &self.coefficients[parameter.index()]
    }

    pub fn evaluate(&self, model: &NoiseModel<T>) -> T {
        Parameter::ALL.iter().fold(self.constant.clone(), |acc, &p| {
            acc + self.coefficient(p).clone() * model.value(p).clone()
        })
    }

    pub fn evaluate_f64(&self, model: &NoiseModel<f64>) -> f64 {
        Parameter::ALL.iter().fold(self.constant.to_f64(), |acc, &p| {
            acc + self.coefficient(p).to_f64() * model.value(p)
        })
    }
}

impl<T: Scalar> fmt::Display for LinearPolynomial<T> {
    /// Renders as e.g. `1 - 10*eps + 1/15*p_gate`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.constant)?;
        for p in Parameter::ALL {
            let c = self.coefficient(p);
            if c.is_zero() {
                continue;
            }
            let (sign, magnitude) = if *c < T::zero() {
                ("-", T::zero() - c.clone())
            } else {
                ("+", c.clone())
            };
            if magnitude.is_one() {
                write!(f, " {sign} {p}")?;
            } else {
                write!(f, " {sign} {magnitude}*{p}")?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FaultClass {
    Detected,
    UndetectedHarmless,
    UndetectedHarmful,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassifiedFault {
    /// Index into [`ExpansionReport::sites`].
    pub site: usize,
    pub alternative: usize,
    pub class: FaultClass,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpansionReport {
    pub protocol: String,
    pub success: LinearPolynomial<Rational>,
    pub fidelity: LinearPolynomial<Rational>,
    pub branch_count: usize,
    pub sites: Vec<FaultSite>,
    pub classified_faults: Vec<ClassifiedFault>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolynomialRow {
    pub protocol: String,
    pub parameter: String,
    pub constant: String,
    pub coeff_eps: String,
    pub coeff_p_gate: String,
    pub coeff_p_meas: String,
}

impl ExpansionReport {
    pub fn count(&self, class: FaultClass) -> usize {
        self.classified_faults.iter().filter(|c| c.class == class).count()
    }

    /// `success = …` and `fidelity = …`, one per line.
    pub fn to_text(&self) -> String {
        format!("success = {}\nfidelity = {}\n", self.success, self.fidelity)
    }

    pub fn csv_rows(&self) -> Vec<PolynomialRow> {
        [("success", &self.success), ("fidelity", &self.fidelity)]
            .into_iter()
            .map(|(name, poly)| PolynomialRow {
                protocol: self.protocol.clone(),
                parameter: name.to_string(),
                constant: poly.constant.to_string(),
                coeff_eps: poly.coefficient(Parameter::Eps).to_string(),
                coeff_p_gate: poly.coefficient(Parameter::PGate).to_string(),
                coeff_p_meas: poly.coefficient(Parameter::PMeas).to_string(),
            })
            .collect()
    }

    pub fn to_csv(reports: &[ExpansionReport]) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        if reports.is_empty() {
            w.write_record([
                "protocol",
                "parameter",
                "constant",
                "coeff_eps",
                "coeff_p_gate",
                "coeff_p_meas",
            ])
            .map_err(|e| Error::Io(e.to_string()))?;
        }
        for r in reports {
            for row in r.csv_rows() {
                w.serialize(row).map_err(|e| Error::Io(e.to_string()))?;
            }
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

fn branch(circuit: &Circuit, faults: &FaultAssignment, what: &str) -> Result<(bool, bool)> {
    match sweep_coins(circuit, faults, MAX_COIN_LEAVES)? {
        CoinSweep::Deterministic(r) => Ok((r.passed, r.purified_equals_target)),
        CoinSweep::Ambiguous { first, other, coins } => Err(Error::Ambiguity(format!(
            "{what}: outcome sequence {coins:?} gives {other:?}, another gives {first:?}"
        ))),
    }
}

/// Expands success probability and conditional fidelity to first order in
/// the parameters that are nonzero in `model`.
pub fn expand<T: Scalar>(circuit: &Circuit, model: &NoiseModel<T>) -> Result<ExpansionReport> {
    let diagnostics = validate(circuit);
    if !diagnostics.is_empty() {
        let text: Vec<String> = diagnostics.iter().map(|d| d.to_string()).collect();
        return Err(Error::Validation(text.join("\n")));
    }
    let (passed, equal) = branch(circuit, &FaultAssignment::default(), "no-fault branch")?;
    if !(passed && equal) {
        return Err(Error::Contract("no-fault branch is not idempotent".into()));
    }
    let sites = enumerate_fault_sites(circuit, model);
    let jobs: Vec<(usize, usize)> = sites
        .iter()
        .enumerate()
        .flat_map(|(s, site)| (0..site.alternatives.len()).map(move |a| (s, a)))
        .collect();
    let classified = jobs
        .par_iter()
        .map(|&(s, a)| {
            let faults = FaultAssignment::single(sites[s].fault(a));
            let what = format!("{} alternative {a}", sites[s]);
            let (passed, equal) = branch(circuit, &faults, &what)?;
            let class = match (passed, equal) {
                (false, _) => FaultClass::Detected,
                (true, true) => FaultClass::UndetectedHarmless,
                (true, false) => FaultClass::UndetectedHarmful,
            };
            Ok(ClassifiedFault {
                site: s,
                alternative: a,
                class,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut success = LinearPolynomial::constant(Rational::one());
    let mut fidelity = LinearPolynomial::constant(Rational::one());
    for c in &classified {
        let site = &sites[c.site];
        let alt = &site.alternatives[c.alternative];
        let w = Rational::new(alt.numer, alt.denom);
        let k = site.parameter.index();
        match c.class {
            FaultClass::Detected => success.coefficients[k] -= w,
            FaultClass::UndetectedHarmful => fidelity.coefficients[k] -= w,
            FaultClass::UndetectedHarmless => {}
        }
    }
    Ok(ExpansionReport {
        protocol: circuit.name().to_string(),
        success,
        fidelity,
        branch_count: 1 + classified.len(),
        sites,
        classified_faults: classified,
    })
}

/// Default second-order allowance `C` in `3σ + C·ε²`.
pub const DEFAULT_ALLOWANCE: f64 = 50.0;

/// `allowance·r²` with `r` the largest error rate in `model`.
pub fn second_order_band(model: &NoiseModel<f64>, allowance: f64) -> f64 {
    let r = model.epsilon.max(model.p_gate).max(model.p_meas);
    allowance * r * r
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossValidationRow {
    pub eps: f64,
    pub mc_success: f64,
    pub poly_success: f64,
    pub sigma_success: f64,
    pub mc_fidelity: Option<f64>,
    pub poly_fidelity: f64,
    pub sigma_fidelity: f64,
    pub band: f64,
    pub flagged: bool,
}

/// Compares Monte Carlo estimates with the first-order polynomials at each
/// `eps` (gate and measurement rates taken from `model`). A row is flagged
/// when either quantity differs by more than `3σ + allowance·r²`, with σ
/// the binomial error at the polynomial's value and `r` the largest rate.
pub fn cross_validate(
    circuit: &Circuit,
    model: &NoiseModel<f64>,
    eps_values: &[f64],
    trials: u64,
    seed: u64,
    allowance: f64,
) -> Result<Vec<CrossValidationRow>> {
    let mut symbolic = NoiseModel::<Rational>::noiseless().with_noisy_prep(model.noisy_prep);
    symbolic.epsilon = Rational::one();
    if model.p_gate > 0.0 {
        symbolic.p_gate = Rational::one();
    }
    if model.p_meas > 0.0 {
        symbolic.p_meas = Rational::one();
    }
    let report = expand(circuit, &symbolic)?;
    eps_values
        .iter()
        .map(|&eps| {
            let point = NoiseModel::new(eps, model.p_gate, model.p_meas)?
                .with_noisy_prep(model.noisy_prep);
            let mc = run_mc(circuit, &point, trials, seed)?;
            let poly_success = report.success.evaluate_f64(&point);
            let poly_fidelity = report.fidelity.evaluate_f64(&point);
            let sigma = |p: f64, n: u64| {
                let p = p.clamp(0.0, 1.0);
                (p * (1.0 - p) / n.max(1) as f64).sqrt()
            };
            let sigma_success = sigma(poly_success, mc.trials);
            let sigma_fidelity = sigma(poly_fidelity, mc.passes);
            let band = second_order_band(&point, allowance);
            let bad_success = (mc.success_probability() - poly_success).abs() > 3.0 * sigma_success + band;
            let bad_fidelity = match mc.fidelity() {
                Some(f) => (f - poly_fidelity).abs() > 3.0 * sigma_fidelity + band,
                None => true,
            };
            Ok(CrossValidationRow {
                eps,
                mc_success: mc.success_probability(),
                poly_success,
                sigma_success,
                mc_fidelity: mc.fidelity(),
                poly_fidelity,
                sigma_fidelity,
                band,
                flagged: bad_success || bad_fidelity,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_rendering() {
        let p = LinearPolynomial::new(
            Rational::one(),
            &[(Parameter::Eps, Rational::from_integer(-10)), (Parameter::PGate, Rational::new(2, 15))],
        );
        assert_eq!(p.to_string(), "1 - 10*eps + 2/15*p_gate");
        let q = LinearPolynomial::new(Rational::one(), &[(Parameter::PMeas, Rational::from_integer(-1))]);
        assert_eq!(q.to_string(), "1 - p_meas");
        assert_eq!(LinearPolynomial::constant(Rational::one()).to_string(), "1");
    }

    #[test]
    fn evaluation() {
        let p = LinearPolynomial::new(1.0f64, &[(Parameter::Eps, -6.0)]);
        let m = NoiseModel::network(0.01).unwrap();
        assert!((p.evaluate(&m) - 0.94).abs() < 1e-12);
    }
}
