//! Fault sites and their probabilities.
//!
//! Network noise puts X, Y or Z on a transmitted qubit with probability `ε`
//! each. Gate noise follows every eligible gate with a uniformly chosen
//! non-identity Pauli on its qubits, total probability `p_gate`. Measurement
//! noise flips the recorded bit with probability `p_meas`.

use std::fmt;

use rand::Rng;

use crate::circuit::{Circuit, CircuitOp, Fault, FaultAction, FaultAssignment};
use crate::error::{Error, Result};
use crate::pauli::Pauli;
use crate::scalar::Scalar;

/// Channels accepted by explicit noise sites: `network` behaves like a
/// transmission, `depolarize` like gate noise on the listed qubits.
pub const KNOWN_CHANNELS: &[&str] = &["network", "depolarize"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parameter {
    Eps,
    PGate,
    PMeas,
}

impl Parameter {
    pub const ALL: [Parameter; 3] = [Parameter::Eps, Parameter::PGate, Parameter::PMeas];

    pub fn name(self) -> &'static str {
        match self {
            Parameter::Eps => "eps",
            Parameter::PGate => "p_gate",
            Parameter::PMeas => "p_meas",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Parameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseModel<T = f64> {
    pub epsilon: T,
    pub p_gate: T,
    pub p_meas: T,
    /// Apply gate noise to preparation and frame-change gates as well.
    pub noisy_prep: bool,
}

impl<T: Scalar> NoiseModel<T> {
    pub fn new(epsilon: T, p_gate: T, p_meas: T) -> Result<Self> {
        let model = NoiseModel {
            epsilon,
            p_gate,
            p_meas,
            noisy_prep: false,
        };
        model.check()?;
        Ok(model)
    }

    pub fn network(epsilon: T) -> Result<Self> {
        Self::new(epsilon, T::zero(), T::zero())
    }

    pub fn noiseless() -> Self {
        NoiseModel {
            epsilon: T::zero(),
            p_gate: T::zero(),
            p_meas: T::zero(),
            noisy_prep: false,
        }
    }

    pub fn with_noisy_prep(mut self, noisy_prep: bool) -> Self {
        self.noisy_prep = noisy_prep;
        self
    }

    fn check(&self) -> Result<()> {
        let zero = T::zero();
        let one = T::one();
        let three = T::from_int(3);
        if !(self.epsilon >= zero && self.epsilon.clone() * three <= one) {
            return Err(Error::Domain(format!(
                "eps = {} must lie in [0, 1/3]",
                self.epsilon
            )));
        }
        for (name, p) in [("p_gate", &self.p_gate), ("p_meas", &self.p_meas)] {
            if !(*p >= zero && *p <= one) {
                return Err(Error::Domain(format!("{name} = {p} must lie in [0, 1]")));
            }
        }
        Ok(())
    }

    pub fn value(&self, parameter: Parameter) -> &T {
        match parameter {
            Parameter::Eps => &self.epsilon,
            Parameter::PGate => &self.p_gate,
            Parameter::PMeas => &self.p_meas,
        }
    }

    pub fn is_active(&self, parameter: Parameter) -> bool {
        !self.value(parameter).is_zero()
    }

    pub fn to_f64(&self) -> NoiseModel<f64> {
        NoiseModel {
            epsilon: self.epsilon.to_f64(),
            p_gate: self.p_gate.to_f64(),
            p_meas: self.p_meas.to_f64(),
            noisy_prep: self.noisy_prep,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SiteKind {
    Network { qubit: usize },
    Gate { qubits: Vec<usize> },
    Measurement { label: String },
}

/// One way a site can fail, with weight `numer/denom` times its parameter.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Alternative {
    pub action: FaultAction,
    pub numer: i64,
    pub denom: i64,
}

impl Alternative {
    pub fn weight<T: Scalar>(&self, model: &NoiseModel<T>, parameter: Parameter) -> T {
        T::from_ratio(self.numer, self.denom) * model.value(parameter).clone()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FaultSite {
    pub op_index: usize,
    pub kind: SiteKind,
    pub parameter: Parameter,
    pub alternatives: Vec<Alternative>,
}

impl FaultSite {
    pub fn fault(&self, alternative: usize) -> Fault {
        Fault {
            op_index: self.op_index,
            action: self.alternatives[alternative].action.clone(),
        }
    }

    /// Total probability that the site fires.
    pub fn total_weight<T: Scalar>(&self, model: &NoiseModel<T>) -> T {
        self.alternatives
            .iter()
            .fold(T::zero(), |acc, a| acc + a.weight(model, self.parameter))
    }
}

impl fmt::Display for FaultSite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            SiteKind::Network { qubit } => write!(f, "op {} network q{qubit}", self.op_index),
            SiteKind::Gate { qubits } => write!(f, "op {} gate {qubits:?}", self.op_index),
            SiteKind::Measurement { label } => write!(f, "op {} flip {label}", self.op_index),
        }
    }
}

fn network_site(op_index: usize, qubit: usize) -> FaultSite {
    FaultSite {
        op_index,
        kind: SiteKind::Network { qubit },
        parameter: Parameter::Eps,
        alternatives: Pauli::NON_IDENTITY
            .iter()
            .map(|&p| Alternative {
                action: FaultAction::Pauli(vec![(qubit, p)]),
                numer: 1,
                denom: 1,
            })
            .collect(),
    }
}

fn depolarizing_site(op_index: usize, qubits: &[usize]) -> FaultSite {
    let alternatives: Vec<FaultAction> = match *qubits {
        [q] => Pauli::NON_IDENTITY
            .iter()
            .map(|&p| FaultAction::Pauli(vec![(q, p)]))
            .collect(),
        [a, b] => {
            let all = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
            all.iter()
                .flat_map(|&pa| all.iter().map(move |&pb| (pa, pb)))
                .filter(|&(pa, pb)| (pa, pb) != (Pauli::I, Pauli::I))
                .map(|(pa, pb)| {
                    let mut v = Vec::with_capacity(2);
                    if pa != Pauli::I {
                        v.push((a, pa));
                    }
                    if pb != Pauli::I {
                        v.push((b, pb));
                    }
                    FaultAction::Pauli(v)
                })
                .collect()
        }
        _ => Vec::new(),
    };
    let denom = alternatives.len() as i64;
    FaultSite {
        op_index,
        kind: SiteKind::Gate {
            qubits: qubits.to_vec(),
        },
        parameter: Parameter::PGate,
        alternatives: alternatives
            .into_iter()
            .map(|action| Alternative {
                action,
                numer: 1,
                denom,
            })
            .collect(),
    }
}

/// Lists every fault site whose parameter is nonzero, ordered by op index
/// and then qubit index.
pub fn enumerate_fault_sites<T: Scalar>(circuit: &Circuit, model: &NoiseModel<T>) -> Vec<FaultSite> {
    let eps = model.is_active(Parameter::Eps);
    let gate = model.is_active(Parameter::PGate);
    let meas = model.is_active(Parameter::PMeas);
    let mut sites = Vec::new();
    for (i, op) in circuit.ops().iter().enumerate() {
        match op {
            CircuitOp::NetworkTransmit { qubits } if eps => {
                let mut qs = qubits.clone();
                qs.sort_unstable();
                sites.extend(qs.into_iter().map(|q| network_site(i, q)));
            }
            CircuitOp::NoisySite { channel, qubits } => match channel.as_str() {
                "network" if eps => {
                    let mut qs = qubits.clone();
                    qs.sort_unstable();
                    sites.extend(qs.into_iter().map(|q| network_site(i, q)));
                }
                "depolarize" if gate => sites.push(depolarizing_site(i, qubits)),
                _ => {}
            },
            CircuitOp::Gate {
                gate: g,
                condition: None,
                prep,
            } if gate && (!prep || model.noisy_prep) => {
                sites.push(depolarizing_site(i, &g.qubits()));
            }
            CircuitOp::Measure { label, .. } if meas => sites.push(FaultSite {
                op_index: i,
                kind: SiteKind::Measurement {
                    label: label.clone(),
                },
                parameter: Parameter::PMeas,
                alternatives: vec![Alternative {
                    action: FaultAction::FlipOutcome,
                    numer: 1,
                    denom: 1,
                }],
            }),
            _ => {}
        }
    }
    sites
}

/// Precomputed per-site probabilities for fast sampling.
#[derive(Debug, Clone)]
pub struct FaultSampler {
    sites: Vec<FaultSite>,
    /// Per site, the probability of each alternative.
    probabilities: Vec<Vec<f64>>,
    totals: Vec<f64>,
}

impl FaultSampler {
    pub fn new(sites: Vec<FaultSite>, model: &NoiseModel<f64>) -> Self {
        let probabilities: Vec<Vec<f64>> = sites
            .iter()
            .map(|s| {
                s.alternatives
                    .iter()
                    .map(|a| a.weight(model, s.parameter))
                    .collect()
            })
            .collect();
        let totals = probabilities.iter().map(|p| p.iter().sum()).collect();
        FaultSampler {
            sites,
            probabilities,
            totals,
        }
    }

    pub fn sites(&self) -> &[FaultSite] {
        &self.sites
    }

    /// Draws one uniform number per site and fills `out` with the realized
    /// faults, replacing its previous contents.
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut FaultAssignment) {
        out.clear();
        for (k, site) in self.sites.iter().enumerate() {
            let u: f64 = rng.random();
            if u >= self.totals[k] {
                continue;
            }
            let mut acc = 0.0;
            let probs = &self.probabilities[k];
            let mut chosen = probs.len() - 1;
            for (j, p) in probs.iter().enumerate() {
                acc += p;
                if u < acc {
                    chosen = j;
                    break;
                }
            }
            out.push_ordered(site.fault(chosen));
        }
    }
}

/// Draws a fault assignment with the exact site probabilities: each site
/// independently fires one of its alternatives or stays quiet.
pub fn sample_faults<R: Rng + ?Sized>(
    sites: &[FaultSite],
    model: &NoiseModel<f64>,
    rng: &mut R,
) -> FaultAssignment {
    let sampler = FaultSampler::new(sites.to_vec(), model);
    let mut out = FaultAssignment::default();
    sampler.sample_into(rng, &mut out);
    out
}
