//! Dense state-vector reference simulator used as an independent oracle.
#![allow(dead_code)]

use num_complex::Complex64;
use purecliff::pauli::{Pauli, PauliOperator};
use purecliff::tableau::{CliffordGate, StabilizerTableau};
use rand::Rng;

const TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct Dense {
    pub n: usize,
    pub amps: Vec<Complex64>,
}

fn bit(index: usize, q: usize) -> bool {
    (index >> q) & 1 == 1
}

impl Dense {
    pub fn zero(n: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[0] = Complex64::new(1.0, 0.0);
        Dense { n, amps }
    }

    pub fn apply_gate(&mut self, gate: &CliffordGate) {
        let i = Complex64::new(0.0, 1.0);
        match *gate {
            CliffordGate::H(q) => {
                let s = std::f64::consts::FRAC_1_SQRT_2;
                for idx in 0..self.amps.len() {
                    if !bit(idx, q) {
                        let j = idx | (1 << q);
                        let (a, b) = (self.amps[idx], self.amps[j]);
                        self.amps[idx] = (a + b) * s;
                        self.amps[j] = (a - b) * s;
                    }
                }
            }
            CliffordGate::S(q) => {
                for idx in 0..self.amps.len() {
                    if bit(idx, q) {
                        self.amps[idx] *= i;
                    }
                }
            }
            CliffordGate::X(q) => self.apply_single(q, Pauli::X),
            CliffordGate::Y(q) => self.apply_single(q, Pauli::Y),
            CliffordGate::Z(q) => self.apply_single(q, Pauli::Z),
            CliffordGate::Cnot(c, t) => {
                for idx in 0..self.amps.len() {
                    if bit(idx, c) && !bit(idx, t) {
                        self.amps.swap(idx, idx | (1 << t));
                    }
                }
            }
            CliffordGate::Cz(a, b) => {
                for idx in 0..self.amps.len() {
                    if bit(idx, a) && bit(idx, b) {
                        self.amps[idx] = -self.amps[idx];
                    }
                }
            }
        }
    }

    fn apply_single(&mut self, q: usize, p: Pauli) {
        let mut op = PauliOperator::identity(self.n);
        op.set(q, p).unwrap();
        self.amps = self.act(&op);
    }

    /// `P|psi>` including the operator's phase.
    pub fn act(&self, op: &PauliOperator) -> Vec<Complex64> {
        let i = Complex64::new(0.0, 1.0);
        let global = i.powu(op.phase() as u32);
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (idx, &a) in self.amps.iter().enumerate() {
            let mut target = idx;
            let mut factor = global;
            for q in 0..self.n {
                let b = bit(idx, q);
                match op.get(q) {
                    Pauli::I => {}
                    Pauli::X => target ^= 1 << q,
                    Pauli::Z => {
                        if b {
                            factor = -factor;
                        }
                    }
                    Pauli::Y => {
                        target ^= 1 << q;
                        factor *= if b { -i } else { i };
                    }
                }
            }
            out[target] += factor * a;
        }
        out
    }

    pub fn expectation(&self, op: &PauliOperator) -> f64 {
        let image = self.act(op);
        self.amps
            .iter()
            .zip(&image)
            .map(|(a, b)| (a.conj() * b).re)
            .sum()
    }

    /// Probability of the `+1` outcome when measuring `op`.
    pub fn prob_plus(&self, op: &PauliOperator) -> f64 {
        (0.5 * (1.0 + self.expectation(op))).clamp(0.0, 1.0)
    }

    /// Projects onto the eigenspace selected by `minus` and renormalises.
    /// Returns the probability of that outcome.
    pub fn project(&mut self, op: &PauliOperator, minus: bool) -> f64 {
        let image = self.act(op);
        let sign = if minus { -1.0 } else { 1.0 };
        for (a, b) in self.amps.iter_mut().zip(&image) {
            *a = (*a + *b * sign) * 0.5;
        }
        let norm: f64 = self.amps.iter().map(|a| a.norm_sqr()).sum();
        if norm > TOL {
            let s = norm.sqrt();
            for a in &mut self.amps {
                *a /= s;
            }
        }
        norm
    }

    pub fn is_stabilized_by(&self, op: &PauliOperator) -> bool {
        let image = self.act(op);
        self.amps
            .iter()
            .zip(&image)
            .all(|(a, b)| (a - b).norm() < 1e-7)
    }

    /// True when every stabilizer of `tableau` fixes this state.
    pub fn matches(&self, tableau: &StabilizerTableau) -> bool {
        tableau.stabilizers().iter().all(|s| self.is_stabilized_by(s))
    }

    pub fn fidelity(&self, other: &Dense) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            .norm_sqr()
    }
}

#[derive(Debug, Clone)]
pub enum Step {
    Gate(CliffordGate),
    Measure(PauliOperator),
}

pub fn random_pauli<R: Rng>(rng: &mut R, n: usize) -> PauliOperator {
    loop {
        let letters: Vec<Pauli> = (0..n)
            .map(|_| [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][rng.random_range(0..4)])
            .collect();
        let op = PauliOperator::from_paulis(&letters);
        if !op.is_identity() {
            return if rng.random_bool(0.5) { op.negated() } else { op };
        }
    }
}

pub fn random_gate<R: Rng>(rng: &mut R, n: usize) -> CliffordGate {
    let a = rng.random_range(0..n);
    let mut b = rng.random_range(0..n);
    if n > 1 {
        while b == a {
            b = rng.random_range(0..n);
        }
    }
    match rng.random_range(0..if n > 1 { 7 } else { 5 }) {
        0 => CliffordGate::H(a),
        1 => CliffordGate::S(a),
        2 => CliffordGate::X(a),
        3 => CliffordGate::Y(a),
        4 => CliffordGate::Z(a),
        5 => CliffordGate::Cnot(a, b),
        _ => CliffordGate::Cz(a, b),
    }
}

/// A random circuit on `n` qubits with at most `max_measurements`
/// Pauli measurements.
pub fn random_circuit<R: Rng>(rng: &mut R, n: usize, len: usize, max_measurements: usize) -> Vec<Step> {
    let mut measured = 0;
    (0..len)
        .map(|_| {
            if measured < max_measurements && rng.random_bool(0.3) {
                measured += 1;
                Step::Measure(random_pauli(rng, n))
            } else {
                Step::Gate(random_gate(rng, n))
            }
        })
        .collect()
}

/// One leaf of the exact outcome tree.
#[derive(Debug, Clone)]
pub struct Branch {
    pub outcomes: Vec<bool>,
    /// For each measurement: was the outcome certain?
    pub certain: Vec<bool>,
    pub probability: f64,
    pub state: Dense,
}

/// Exact distribution over measurement-outcome sequences.
pub fn exact_branches(n: usize, steps: &[Step]) -> Vec<Branch> {
    let mut leaves = Vec::new();
    let root = Branch {
        outcomes: Vec::new(),
        certain: Vec::new(),
        probability: 1.0,
        state: Dense::zero(n),
    };
    walk(root, steps, &mut leaves);
    leaves
}

fn walk(mut branch: Branch, steps: &[Step], leaves: &mut Vec<Branch>) {
    for (k, step) in steps.iter().enumerate() {
        match step {
            Step::Gate(g) => branch.state.apply_gate(g),
            Step::Measure(op) => {
                let p_plus = branch.state.prob_plus(op);
                let certain = !(TOL..=1.0 - TOL).contains(&p_plus);
                for minus in [false, true] {
                    let p = if minus { 1.0 - p_plus } else { p_plus };
                    if p < TOL {
                        continue;
                    }
                    let mut child = branch.clone();
                    child.state.project(op, minus);
                    child.outcomes.push(minus);
                    child.certain.push(certain);
                    child.probability *= p;
                    walk(child, &steps[k + 1..], leaves);
                }
                return;
            }
        }
    }
    leaves.push(branch);
}
