use std::collections::HashSet;
use std::fmt;

use crate::circuit::execute::{sweep_coins, CoinSweep, FaultAssignment, MAX_COIN_LEAVES};
use crate::circuit::ir::{Circuit, CircuitOp, RegisterRole};
use crate::noise::KNOWN_CHANNELS;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub op_index: Option<usize>,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.op_index {
            Some(i) => write!(f, "op {i}: {}", self.message),
            None => write!(f, "{}", self.message),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum QubitStatus {
    Live,
    Measured(usize),
    Discarded(usize),
}

/// Checks structure, node locality and noiseless idempotence. An empty
/// list means the circuit is valid.
pub fn validate(circuit: &Circuit) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    macro_rules! diag {
        ($op:expr, $message:expr $(,)?) => {
            out.push(Diagnostic {
                op_index: $op,
                message: $message,
            })
        };
    }

    let regs = circuit.registers();
    let purified: Vec<_> = regs
        .iter()
        .filter(|r| r.role == RegisterRole::Purified)
        .collect();
    if purified.len() != 1 {
        diag!(None, format!("expected one purified register, found {}", purified.len()));
    }
    let mut names = HashSet::new();
    for reg in regs {
        if !names.insert(reg.name.as_str()) {
            diag!(None, format!("duplicate register name `{}`", reg.name));
        }
        if reg.qubit_count == 0 {
            diag!(None, format!("register `{}` is empty", reg.name));
        }
        if reg.home_qubit >= reg.qubit_count {
            diag!(
                None,
                format!(
                    "register `{}` home qubit {} out of range",
                    reg.name, reg.home_qubit
                ),
            );
        }
        if reg.nodes.len() != reg.qubit_count {
            diag!(
                None,
                format!(
                    "register `{}` lists {} nodes for {} qubits",
                    reg.name,
                    reg.nodes.len(),
                    reg.qubit_count
                ),
            );
        }
    }
    if circuit.target_state().n_qubits() != circuit.purified_qubits().len() {
        diag!(
            None,
            format!(
                "target state has {} qubits but the purified register has {}",
                circuit.target_state().n_qubits(),
                circuit.purified_qubits().len()
            ),
        );
    }
    let structural_ok = out.is_empty();

    let n = circuit.n_qubits();
    let mut status = vec![QubitStatus::Live; n];
    let mut transmitted = vec![false; n];
    let mut labels = HashSet::new();
    // Where each qubit currently sits: the home node until transmitted.
    let location = |q: usize, transmitted: &[bool]| -> Option<usize> {
        let (r, local) = circuit.locate(q)?;
        let reg = &regs[r];
        let idx = if transmitted[q] { local } else { reg.home_qubit };
        reg.nodes.get(idx).copied()
    };

    for (i, op) in circuit.ops().iter().enumerate() {
        let qubits = op.qubits();
        let mut in_range = true;
        for &q in &qubits {
            if q >= n {
                diag!(Some(i), format!("qubit {q} out of range ({n} qubits)"));
                in_range = false;
                continue;
            }
            match status[q] {
                QubitStatus::Measured(at) => {
                    diag!(Some(i), format!("qubit {q} used after measurement at op {at}"))
                }
                QubitStatus::Discarded(at) => {
                    diag!(Some(i), format!("qubit {q} used after discard at op {at}"))
                }
                QubitStatus::Live => {}
            }
        }
        let distinct: HashSet<_> = qubits.iter().collect();
        if distinct.len() != qubits.len() {
            diag!(Some(i), format!("repeated qubit in {op}"));
        }
        match op {
            CircuitOp::Gate {
                gate, condition, ..
            } => {
                if let Some(c) = condition {
                    if !labels.contains(&c.label) {
                        diag!(
                            Some(i),
                            format!("condition reads label `{}` before it is measured", c.label),
                        );
                    }
                }
                let qs = gate.qubits();
                if qs.len() == 2 && in_range && structural_ok {
                    let (a, b) = (location(qs[0], &transmitted), location(qs[1], &transmitted));
                    if a != b {
                        diag!(
                            Some(i),
                            format!(
                                "{gate} acts across nodes {} and {}",
                                a.map_or("?".into(), |v| v.to_string()),
                                b.map_or("?".into(), |v| v.to_string())
                            ),
                        );
                    }
                }
            }
            CircuitOp::NetworkTransmit { qubits } => {
                for &q in qubits.iter().filter(|&&q| q < n) {
                    if transmitted[q] {
                        diag!(Some(i), format!("qubit {q} transmitted twice"));
                    }
                    transmitted[q] = true;
                    if let Some((r, local)) = circuit.locate(q) {
                        if local == regs[r].home_qubit {
                            diag!(
                                Some(i),
                                format!("home qubit {q} of register `{}` is transmitted", regs[r].name),
                            );
                        }
                    }
                }
            }
            CircuitOp::NoisySite { channel, qubits } => {
                if !KNOWN_CHANNELS.contains(&channel.as_str()) {
                    diag!(Some(i), format!("unknown noise channel `{channel}`"));
                }
                if !(1..=2).contains(&qubits.len()) {
                    diag!(Some(i), "noise site must cover one or two qubits".into());
                }
            }
            CircuitOp::Measure { qubit, label, .. } => {
                if !labels.insert(label.clone()) {
                    diag!(Some(i), format!("label `{label}` measured twice"));
                }
                if *qubit < n && status[*qubit] == QubitStatus::Live {
                    status[*qubit] = QubitStatus::Measured(i);
                }
            }
            CircuitOp::ParityCheck { labels: used, .. } => {
                if used.is_empty() {
                    diag!(Some(i), "parity check without labels".into());
                }
                for l in used {
                    if !labels.contains(l) {
                        diag!(Some(i), format!("parity check references unknown label `{l}`"));
                    }
                }
            }
            CircuitOp::Discard { qubits } => {
                for &q in qubits.iter().filter(|&&q| q < n) {
                    if status[q] == QubitStatus::Live {
                        status[q] = QubitStatus::Discarded(i);
                    }
                }
            }
        }
    }

    if structural_ok {
        for (r, reg) in regs.iter().enumerate() {
            let offset = circuit.register_offsets()[r];
            for q in offset..offset + reg.qubit_count {
                match (reg.role, status[q]) {
                    (RegisterRole::Sacrificial, QubitStatus::Live) => diag!(
                        None,
                        format!("sacrificial qubit {q} of `{}` is never measured or discarded", reg.name),
                    ),
                    (RegisterRole::Purified, QubitStatus::Measured(at) | QubitStatus::Discarded(at)) => {
                        diag!(Some(at), format!("purified qubit {q} is consumed"))
                    }
                    _ => {}
                }
            }
        }
    }

    if out.is_empty() {
        match sweep_coins(circuit, &FaultAssignment::default(), MAX_COIN_LEAVES) {
            Ok(CoinSweep::Deterministic(r)) => {
                if !r.passed {
                    diag!(None, "noiseless run fails a parity check".into());
                }
                if !r.purified_equals_target {
                    diag!(None, "noiseless run does not reproduce the target state".into());
                }
            }
            Ok(CoinSweep::Ambiguous { first, other, .. }) => diag!(
                None,
                format!(
                    "noiseless run depends on measurement outcomes ({first:?} vs {other:?})"
                ),
            ),
            Err(e) => diag!(None, format!("noiseless run failed: {e}")),
        }
    }
    out
}
