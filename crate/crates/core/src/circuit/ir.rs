use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::pauli::PauliOperator;
use crate::tableau::{CliffordGate, StabilizerTableau};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegisterRole {
    Purified,
    Sacrificial,
}

impl RegisterRole {
    pub fn name(self) -> &'static str {
        match self {
            RegisterRole::Purified => "purified",
            RegisterRole::Sacrificial => "sacrificial",
        }
    }
}

/// A named block of qubits holding one entangled state.
///
/// `nodes[i]` is the network node where qubit `i` ends up. Before a qubit is
/// transmitted it sits at the node of the home qubit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Register {
    pub name: String,
    pub qubit_count: usize,
    pub home_qubit: usize,
    pub role: RegisterRole,
    pub nodes: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Basis {
    X,
    Y,
    Z,
}

impl Basis {
    pub fn pauli(self) -> crate::pauli::Pauli {
        match self {
            Basis::X => crate::pauli::Pauli::X,
            Basis::Y => crate::pauli::Pauli::Y,
            Basis::Z => crate::pauli::Pauli::Z,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

/// Classical control: the gate fires when the labelled bit equals `value`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Condition {
    pub label: String,
    pub value: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CircuitOp {
    /// `prep` marks state-preparation and frame-change gates, which only
    /// receive gate noise when the noise model asks for noisy preparation.
    /// Conditional gates never receive gate noise.
    Gate {
        gate: CliffordGate,
        condition: Option<Condition>,
        prep: bool,
    },
    NetworkTransmit {
        qubits: Vec<usize>,
    },
    NoisySite {
        channel: String,
        qubits: Vec<usize>,
    },
    Measure {
        qubit: usize,
        basis: Basis,
        label: String,
    },
    ParityCheck {
        labels: Vec<String>,
        expected: Parity,
    },
    Discard {
        qubits: Vec<usize>,
    },
}

impl CircuitOp {
    pub fn gate(gate: CliffordGate) -> Self {
        CircuitOp::Gate {
            gate,
            condition: None,
            prep: false,
        }
    }

    pub fn prep(gate: CliffordGate) -> Self {
        CircuitOp::Gate {
            gate,
            condition: None,
            prep: true,
        }
    }

    pub fn conditional(gate: CliffordGate, label: &str, value: bool) -> Self {
        CircuitOp::Gate {
            gate,
            condition: Some(Condition {
                label: label.to_string(),
                value,
            }),
            prep: false,
        }
    }

    pub fn measure(qubit: usize, basis: Basis, label: &str) -> Self {
        CircuitOp::Measure {
            qubit,
            basis,
            label: label.to_string(),
        }
    }

    pub fn check(labels: &[&str]) -> Self {
        CircuitOp::ParityCheck {
            labels: labels.iter().map(|s| s.to_string()).collect(),
            expected: Parity::Even,
        }
    }

    /// Qubits the op acts on.
    pub fn qubits(&self) -> Vec<usize> {
        match self {
            CircuitOp::Gate { gate, .. } => gate.qubits(),
            CircuitOp::NetworkTransmit { qubits }
            | CircuitOp::NoisySite { qubits, .. }
            | CircuitOp::Discard { qubits } => qubits.clone(),
            CircuitOp::Measure { qubit, .. } => vec![*qubit],
            CircuitOp::ParityCheck { .. } => Vec::new(),
        }
    }

    pub fn remap(&self, map: impl Fn(usize) -> usize) -> CircuitOp {
        let many = |qs: &[usize]| qs.iter().map(|&q| map(q)).collect();
        match self {
            CircuitOp::Gate {
                gate,
                condition,
                prep,
            } => CircuitOp::Gate {
                gate: gate.remap(&map),
                condition: condition.clone(),
                prep: *prep,
            },
            CircuitOp::NetworkTransmit { qubits } => CircuitOp::NetworkTransmit {
                qubits: many(qubits),
            },
            CircuitOp::NoisySite { channel, qubits } => CircuitOp::NoisySite {
                channel: channel.clone(),
                qubits: many(qubits),
            },
            CircuitOp::Measure {
                qubit,
                basis,
                label,
            } => CircuitOp::Measure {
                qubit: map(*qubit),
                basis: *basis,
                label: label.clone(),
            },
            CircuitOp::ParityCheck { .. } => self.clone(),
            CircuitOp::Discard { qubits } => CircuitOp::Discard {
                qubits: many(qubits),
            },
        }
    }
}

impl fmt::Display for CircuitOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CircuitOp::Gate {
                gate,
                condition,
                prep,
            } => {
                write!(f, "{gate}")?;
                if let Some(c) = condition {
                    write!(f, " if {}={}", c.label, u8::from(c.value))?;
                }
                if *prep {
                    write!(f, " (prep)")?;
                }
                Ok(())
            }
            CircuitOp::NetworkTransmit { qubits } => write!(f, "transmit {qubits:?}"),
            CircuitOp::NoisySite { channel, qubits } => write!(f, "noise {channel} {qubits:?}"),
            CircuitOp::Measure {
                qubit,
                basis,
                label,
            } => write!(f, "measure {basis:?} {qubit} -> {label}"),
            CircuitOp::ParityCheck { labels, expected } => {
                write!(f, "check {expected:?} [{}]", labels.join(", "))
            }
            CircuitOp::Discard { qubits } => write!(f, "discard {qubits:?}"),
        }
    }
}

/// A purification circuit over a set of registers.
///
/// Global qubit indices concatenate the registers in declaration order. The
/// circuit starts from the product of `initial_states` and must leave the
/// purified register in `target_state` when run without noise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    name: String,
    registers: Vec<Register>,
    initial_states: Vec<StabilizerTableau>,
    target_state: StabilizerTableau,
    ops: Vec<CircuitOp>,
    compiled: Compiled,
}

/// Precomputed lookups so execution never touches strings.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub(crate) struct Compiled {
    pub n_qubits: usize,
    pub offsets: Vec<usize>,
    pub purified: Vec<usize>,
    pub label_slot: HashMap<String, usize>,
    /// Per op: the label slot written (Measure) or read (condition).
    pub op_slot: Vec<Option<usize>>,
    /// Per ParityCheck op: the label slots it reads.
    pub check_slots: Vec<Option<Vec<usize>>>,
    pub unresolved: Vec<(usize, String)>,
    pub initial: Option<StabilizerTableau>,
    pub target_rows: Vec<PauliOperator>,
}

impl Circuit {
    /// Assembles a circuit. Structural problems are reported by
    /// [`crate::circuit::validate`] rather than here; only mismatched
    /// register and state dimensions are rejected.
    pub fn new(
        name: impl Into<String>,
        registers: Vec<Register>,
        initial_states: Vec<StabilizerTableau>,
        target_state: StabilizerTableau,
        ops: Vec<CircuitOp>,
    ) -> Result<Circuit> {
        if registers.len() != initial_states.len() {
            return Err(Error::Contract(format!(
                "{} registers but {} initial states",
                registers.len(),
                initial_states.len()
            )));
        }
        for (reg, state) in registers.iter().zip(&initial_states) {
            if reg.qubit_count != state.n_qubits() {
                return Err(Error::Contract(format!(
                    "register `{}` has {} qubits but its initial state has {}",
                    reg.name,
                    reg.qubit_count,
                    state.n_qubits()
                )));
            }
        }
        let mut circuit = Circuit {
            name: name.into(),
            registers,
            initial_states,
            target_state,
            ops,
            compiled: Compiled::default(),
        };
        circuit.compiled = circuit.compile();
        Ok(circuit)
    }

    fn compile(&self) -> Compiled {
        let mut offsets = Vec::with_capacity(self.registers.len());
        let mut n = 0;
        for reg in &self.registers {
            offsets.push(n);
            n += reg.qubit_count;
        }
        let purified = self
            .registers
            .iter()
            .zip(&offsets)
            .filter(|(r, _)| r.role == RegisterRole::Purified)
            .flat_map(|(r, &o)| o..o + r.qubit_count)
            .collect::<Vec<_>>();
        let mut label_slot = HashMap::new();
        let mut op_slot = Vec::with_capacity(self.ops.len());
        let mut check_slots = Vec::with_capacity(self.ops.len());
        let mut unresolved = Vec::new();
        for (i, op) in self.ops.iter().enumerate() {
            let mut slot = None;
            let mut checks = None;
            match op {
                CircuitOp::Measure { label, .. } => {
                    let next = label_slot.len();
                    slot = Some(*label_slot.entry(label.clone()).or_insert(next));
                }
                CircuitOp::Gate {
                    condition: Some(c), ..
                } => match label_slot.get(&c.label) {
                    Some(&s) => slot = Some(s),
                    None => unresolved.push((i, c.label.clone())),
                },
                CircuitOp::ParityCheck { labels, .. } => {
                    let mut slots = Vec::with_capacity(labels.len());
                    for l in labels {
                        match label_slot.get(l) {
                            Some(&s) => slots.push(s),
                            None => unresolved.push((i, l.clone())),
                        }
                    }
                    checks = Some(slots);
                }
                _ => {}
            }
            op_slot.push(slot);
            check_slots.push(checks);
        }
        let initial = self
            .initial_states
            .iter()
            .cloned()
            .reduce(|a, b| a.tensor(&b));
        let target_rows = if self.target_state.n_qubits() == purified.len() {
            self.target_state
                .stabilizers()
                .iter()
                .map(|s| s.embed(n, &purified).expect("dimension checked"))
                .collect()
        } else {
            Vec::new()
        };
        Compiled {
            n_qubits: n,
            offsets,
            purified,
            label_slot,
            op_slot,
            check_slots,
            unresolved,
            initial,
            target_rows,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn initial_states(&self) -> &[StabilizerTableau] {
        &self.initial_states
    }

    pub fn target_state(&self) -> &StabilizerTableau {
        &self.target_state
    }

    pub fn ops(&self) -> &[CircuitOp] {
        &self.ops
    }

    pub fn n_qubits(&self) -> usize {
        self.compiled.n_qubits
    }

    /// Global index of the first qubit of each register.
    pub fn register_offsets(&self) -> &[usize] {
        &self.compiled.offsets
    }

    pub fn purified_qubits(&self) -> &[usize] {
        &self.compiled.purified
    }

    pub fn measurement_count(&self) -> usize {
        self.compiled.label_slot.len()
    }

    /// Register index and local index of a global qubit.
    pub fn locate(&self, qubit: usize) -> Option<(usize, usize)> {
        let offsets = &self.compiled.offsets;
        let r = offsets.partition_point(|&o| o <= qubit).checked_sub(1)?;
        let local = qubit - offsets[r];
        (local < self.registers[r].qubit_count).then_some((r, local))
    }

    /// Copy of the circuit with a different op list.
    pub fn with_ops(&self, ops: Vec<CircuitOp>) -> Circuit {
        Circuit::new(
            self.name.clone(),
            self.registers.clone(),
            self.initial_states.clone(),
            self.target_state.clone(),
            ops,
        )
        .expect("registers unchanged")
    }

    pub(crate) fn compiled(&self) -> &Compiled {
        &self.compiled
    }
}
