use crate::circuit::{Basis, Circuit, CircuitOp, Parity, Register, RegisterRole};
use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliOperator};
use crate::protocols::states::{distribute, StateSpec};
use crate::tableau::{CliffordGate, StabilizerTableau};

/// Incrementally assembles a circuit from registers and ops.
#[derive(Debug, Clone)]
pub struct CircuitBuilder {
    name: String,
    registers: Vec<Register>,
    initial: Vec<StabilizerTableau>,
    ops: Vec<CircuitOp>,
    n_qubits: usize,
}

impl CircuitBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        CircuitBuilder {
            name: name.into(),
            registers: Vec::new(),
            initial: Vec::new(),
            ops: Vec::new(),
            n_qubits: 0,
        }
    }

    /// Declares a register starting in `|0…0⟩` and returns its global qubit
    /// indices.
    pub fn register(
        &mut self,
        name: &str,
        size: usize,
        home_qubit: usize,
        role: RegisterRole,
        nodes: Vec<usize>,
    ) -> Vec<usize> {
        let first = self.n_qubits;
        self.registers.push(Register {
            name: name.to_string(),
            qubit_count: size,
            home_qubit,
            role,
            nodes,
        });
        self.initial.push(StabilizerTableau::zero_state(size));
        self.n_qubits += size;
        (first..first + size).collect()
    }

    /// Declares a register for `state`, prepares it and transmits every
    /// qubit but the home one. `nodes[i]` is where qubit `i` ends up.
    pub fn distributed(
        &mut self,
        name: &str,
        state: &StateSpec,
        role: RegisterRole,
        nodes: Vec<usize>,
    ) -> Vec<usize> {
        let qubits = self.register(name, state.n_qubits(), state.home_qubit, role, nodes);
        for op in distribute(state) {
            self.ops.push(op.remap(|q| qubits[q]));
        }
        qubits
    }

    /// Node of a global qubit after distribution.
    pub fn node_of(&self, qubit: usize) -> Option<usize> {
        let mut offset = 0;
        for reg in &self.registers {
            if qubit < offset + reg.qubit_count {
                return reg.nodes.get(qubit - offset).copied();
            }
            offset += reg.qubit_count;
        }
        None
    }

    pub fn push(&mut self, op: CircuitOp) -> &mut Self {
        self.ops.push(op);
        self
    }

    pub fn gate(&mut self, gate: CliffordGate) -> &mut Self {
        self.push(CircuitOp::gate(gate))
    }

    pub fn cx(&mut self, control: usize, target: usize) -> &mut Self {
        self.gate(CliffordGate::Cnot(control, target))
    }

    pub fn cz(&mut self, a: usize, b: usize) -> &mut Self {
        self.gate(CliffordGate::Cz(a, b))
    }

    pub fn h(&mut self, q: usize) -> &mut Self {
        self.gate(CliffordGate::H(q))
    }

    /// A frame-change Hadamard, treated like preparation for noise purposes.
    pub fn frame_h(&mut self, q: usize) -> &mut Self {
        self.push(CircuitOp::prep(CliffordGate::H(q)))
    }

    pub fn measure(&mut self, q: usize, basis: Basis, label: &str) -> &mut Self {
        self.push(CircuitOp::measure(q, basis, label))
    }

    pub fn check(&mut self, labels: &[&str]) -> &mut Self {
        self.push(CircuitOp::check(labels))
    }

    pub fn finish(self, target: StabilizerTableau) -> Result<Circuit> {
        Circuit::new(self.name, self.registers, self.initial, target, self.ops)
    }
}

/// Appends a non-local measurement of `checked` on the purified qubits,
/// consuming one copy of `sacrifice`.
///
/// Sacrificial qubit `j` is co-located with purified qubit
/// `purified_qubits[wiring[j]]` and applies a controlled version of the
/// checked operator's Pauli there; the X outcomes of the sacrificial qubits
/// then multiply to the checked eigenvalue. The sacrifice must be stabilized
/// by `+X…X`, so Bell and GHZ states qualify. Returns the measurement
/// labels, which are covered by one parity check.
pub fn build_stabilizer_check(
    builder: &mut CircuitBuilder,
    purified: &StateSpec,
    purified_qubits: &[usize],
    checked: &PauliOperator,
    sacrifice: &StateSpec,
    wiring: &[usize],
    label_prefix: &str,
) -> Result<Vec<String>> {
    let construction = |m: String| Error::Construction(m);
    if checked.n_qubits() != purified.n_qubits() || purified_qubits.len() != purified.n_qubits() {
        return Err(construction(format!(
            "checked operator {checked} does not match the {}-qubit purified state",
            purified.n_qubits()
        )));
    }
    // The X parity measures the unsigned operator.
    let sign = purified
        .tableau()
        .expectation(&checked.clone().with_phase(0))
        .map_err(|e| construction(e.to_string()))?
        .ok_or_else(|| construction(format!("{checked} is not a stabilizer of {}", purified.name)))?;
    let mut support = checked.support();
    let mut wired = wiring.to_vec();
    wired.sort_unstable();
    support.sort_unstable();
    if wiring.len() != sacrifice.n_qubits() || wired != support {
        return Err(construction(format!(
            "wiring {wiring:?} must cover the support {support:?} of {checked} once per qubit of {}",
            sacrifice.name
        )));
    }
    let all_x = PauliOperator::from_paulis(&vec![Pauli::X; sacrifice.n_qubits()]);
    if sacrifice.tableau().expectation(&all_x)? != Some(false) {
        return Err(construction(format!(
            "{} is not stabilized by {all_x}",
            sacrifice.name
        )));
    }
    let nodes = wiring
        .iter()
        .map(|&w| builder.node_of(purified_qubits[w]))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| construction("purified qubits are not registered".into()))?;
    let sac = builder.distributed(
        &format!("{label_prefix}sacrifice"),
        sacrifice,
        RegisterRole::Sacrificial,
        nodes,
    );
    for (j, &w) in wiring.iter().enumerate() {
        let (c, t) = (sac[j], purified_qubits[w]);
        match checked.get(w) {
            Pauli::X => {
                builder.cx(c, t);
            }
            Pauli::Z => {
                builder.cz(c, t);
            }
            Pauli::Y => {
                // S·CNOT·S† is a controlled-Y.
                builder
                    .gate(CliffordGate::Z(t))
                    .gate(CliffordGate::S(t))
                    .cx(c, t)
                    .gate(CliffordGate::S(t));
            }
            Pauli::I => unreachable!("wiring matches support"),
        }
    }
    let labels: Vec<String> = (0..wiring.len()).map(|j| format!("{label_prefix}{j}")).collect();
    for (j, label) in labels.iter().enumerate() {
        builder.measure(sac[j], Basis::X, label);
    }
    builder.push(CircuitOp::ParityCheck {
        labels: labels.clone(),
        expected: if sign { Parity::Odd } else { Parity::Even },
    });
    Ok(labels)
}
