//! Text format for circuits, `purecliff-circuit/1`.
//!
//! The document is TOML with a fixed key order:
//!
//! ```toml
//! format = "purecliff-circuit/1"
//! name = "bell"
//! target = ["+XX", "+ZZ"]
//!
//! [[registers]]
//! name = "data"
//! role = "purified"
//! qubits = 2
//! home = 0
//! nodes = [0, 1]
//! initial = ["+ZI", "+IZ"]
//!
//! [[ops]]
//! op = "gate"
//! gate = "h"
//! qubits = [0]
//! prep = true
//! ```
//!
//! Op kinds are `gate`, `transmit`, `noise`, `measure`, `check` and
//! `discard`. A gate may carry `condition = "label"` (fires when the bit is
//! 1) or `condition = "!label"` (fires when it is 0).

use std::ops::Range;

use serde::{Deserialize, Serialize};
use toml::Spanned;

use crate::circuit::ir::{Basis, Circuit, CircuitOp, Condition, Parity, Register, RegisterRole};
use crate::error::{Error, Result};
use crate::tableau::{CliffordGate, GateKind, StabilizerTableau};

pub const FORMAT_TAG: &str = "purecliff-circuit/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum GateName {
    H,
    S,
    Cnot,
    Cz,
    X,
    Y,
    Z,
}

impl From<GateName> for GateKind {
    fn from(g: GateName) -> GateKind {
        match g {
            GateName::H => GateKind::Hadamard,
            GateName::S => GateKind::Phase,
            GateName::Cnot => GateKind::Cnot,
            GateName::Cz => GateKind::Cz,
            GateName::X => GateKind::PauliX,
            GateName::Y => GateKind::PauliY,
            GateName::Z => GateKind::PauliZ,
        }
    }
}

impl From<GateKind> for GateName {
    fn from(g: GateKind) -> GateName {
        match g {
            GateKind::Hadamard => GateName::H,
            GateKind::Phase => GateName::S,
            GateKind::Cnot => GateName::Cnot,
            GateKind::Cz => GateName::Cz,
            GateKind::PauliX => GateName::X,
            GateKind::PauliY => GateName::Y,
            GateKind::PauliZ => GateName::Z,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum BasisName {
    X,
    Y,
    Z,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum ParityName {
    #[default]
    Even,
    Odd,
}

impl ParityName {
    fn is_even(&self) -> bool {
        *self == ParityName::Even
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum RoleName {
    Purified,
    Sacrificial,
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase", deny_unknown_fields)]
enum OpDoc {
    Gate {
        gate: GateName,
        qubits: Vec<usize>,
        #[serde(default, skip_serializing_if = "is_false")]
        prep: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        condition: Option<String>,
    },
    Transmit {
        qubits: Vec<usize>,
    },
    Noise {
        channel: String,
        qubits: Vec<usize>,
    },
    Measure {
        qubit: usize,
        basis: BasisName,
        label: String,
    },
    Check {
        labels: Vec<String>,
        #[serde(default, skip_serializing_if = "ParityName::is_even")]
        parity: ParityName,
    },
    Discard {
        qubits: Vec<usize>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RegisterDoc {
    name: String,
    role: RoleName,
    qubits: usize,
    home: usize,
    nodes: Vec<usize>,
    initial: Vec<String>,
}

#[derive(Serialize)]
struct WriteDocument<'a> {
    format: &'a str,
    name: &'a str,
    target: Vec<String>,
    registers: Vec<RegisterDoc>,
    ops: Vec<OpDoc>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ReadDocument {
    format: Spanned<String>,
    name: String,
    target: Spanned<Vec<String>>,
    registers: Vec<Spanned<RegisterDoc>>,
    #[serde(default)]
    ops: Vec<Spanned<OpDoc>>,
}

fn op_to_doc(op: &CircuitOp) -> OpDoc {
    match op {
        CircuitOp::Gate {
            gate,
            condition,
            prep,
        } => OpDoc::Gate {
            gate: gate.kind().into(),
            qubits: gate.qubits(),
            prep: *prep,
            condition: condition.as_ref().map(|c| {
                if c.value {
                    c.label.clone()
                } else {
                    format!("!{}", c.label)
                }
            }),
        },
        CircuitOp::NetworkTransmit { qubits } => OpDoc::Transmit {
            qubits: qubits.clone(),
        },
        CircuitOp::NoisySite { channel, qubits } => OpDoc::Noise {
            channel: channel.clone(),
            qubits: qubits.clone(),
        },
        CircuitOp::Measure {
            qubit,
            basis,
            label,
        } => OpDoc::Measure {
            qubit: *qubit,
            basis: match basis {
                Basis::X => BasisName::X,
                Basis::Y => BasisName::Y,
                Basis::Z => BasisName::Z,
            },
            label: label.clone(),
        },
        CircuitOp::ParityCheck { labels, expected } => OpDoc::Check {
            labels: labels.clone(),
            parity: match expected {
                Parity::Even => ParityName::Even,
                Parity::Odd => ParityName::Odd,
            },
        },
        CircuitOp::Discard { qubits } => OpDoc::Discard {
            qubits: qubits.clone(),
        },
    }
}

fn doc_to_op(doc: OpDoc) -> std::result::Result<CircuitOp, String> {
    Ok(match doc {
        OpDoc::Gate {
            gate,
            qubits,
            prep,
            condition,
        } => {
            let gate = CliffordGate::new(gate.into(), &qubits).map_err(|e| e.to_string())?;
            let condition = condition.map(|c| match c.strip_prefix('!') {
                Some(label) => Condition {
                    label: label.to_string(),
                    value: false,
                },
                None => Condition {
                    label: c,
                    value: true,
                },
            });
            CircuitOp::Gate {
                gate,
                condition,
                prep,
            }
        }
        OpDoc::Transmit { qubits } => CircuitOp::NetworkTransmit { qubits },
        OpDoc::Noise { channel, qubits } => CircuitOp::NoisySite { channel, qubits },
        OpDoc::Measure {
            qubit,
            basis,
            label,
        } => CircuitOp::Measure {
            qubit,
            basis: match basis {
                BasisName::X => Basis::X,
                BasisName::Y => Basis::Y,
                BasisName::Z => Basis::Z,
            },
            label,
        },
        OpDoc::Check { labels, parity } => CircuitOp::ParityCheck {
            labels,
            expected: match parity {
                ParityName::Even => Parity::Even,
                ParityName::Odd => Parity::Odd,
            },
        },
        OpDoc::Discard { qubits } => CircuitOp::Discard { qubits },
    })
}

fn stabilizer_strings(t: &StabilizerTableau) -> Vec<String> {
    t.stabilizers().iter().map(|s| s.to_string()).collect()
}

/// Renders a circuit in the `purecliff-circuit/1` format.
pub fn serialize(circuit: &Circuit) -> String {
    let doc = WriteDocument {
        format: FORMAT_TAG,
        name: circuit.name(),
        target: stabilizer_strings(circuit.target_state()),
        registers: circuit
            .registers()
            .iter()
            .zip(circuit.initial_states())
            .map(|(r, s)| RegisterDoc {
                name: r.name.clone(),
                role: match r.role {
                    RegisterRole::Purified => RoleName::Purified,
                    RegisterRole::Sacrificial => RoleName::Sacrificial,
                },
                qubits: r.qubit_count,
                home: r.home_qubit,
                nodes: r.nodes.clone(),
                initial: stabilizer_strings(s),
            })
            .collect(),
        ops: circuit.ops().iter().map(op_to_doc).collect(),
    };
    toml::to_string(&doc).expect("circuit documents always serialize")
}

/// One-based line and column of a byte offset.
fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(text.len());
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(offset, |p| offset - p - 1) + 1;
    (line, column)
}

fn parse_error(text: &str, span: Option<Range<usize>>, message: impl Into<String>) -> Error {
    let (line, column) = span.map_or((1, 1), |s| line_col(text, s.start));
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// Parses a `purecliff-circuit/1` document. Errors carry the line and
/// column of the offending element.
pub fn deserialize(text: &str) -> Result<Circuit> {
    let doc: ReadDocument = toml::from_str(text)
        .map_err(|e| parse_error(text, e.span(), e.message().to_string()))?;
    if doc.format.get_ref() != FORMAT_TAG {
        return Err(parse_error(
            text,
            Some(doc.format.span()),
            format!(
                "unsupported format `{}`, expected `{FORMAT_TAG}`",
                doc.format.get_ref()
            ),
        ));
    }
    let states = |strings: &[String], span: Range<usize>| {
        StabilizerTableau::from_strings(strings)
            .map_err(|e| parse_error(text, Some(span), e.to_string()))
    };
    let target = states(doc.target.get_ref(), doc.target.span())?;
    let mut registers = Vec::new();
    let mut initial = Vec::new();
    for reg in doc.registers {
        let span = reg.span();
        let reg = reg.into_inner();
        initial.push(states(&reg.initial, span)?);
        registers.push(Register {
            name: reg.name,
            qubit_count: reg.qubits,
            home_qubit: reg.home,
            role: match reg.role {
                RoleName::Purified => RegisterRole::Purified,
                RoleName::Sacrificial => RegisterRole::Sacrificial,
            },
            nodes: reg.nodes,
        });
    }
    let mut ops = Vec::with_capacity(doc.ops.len());
    for op in doc.ops {
        let span = op.span();
        ops.push(doc_to_op(op.into_inner()).map_err(|m| parse_error(text, Some(span), m))?);
    }
    Circuit::new(doc.name, registers, initial, target, ops)
        .map_err(|e| parse_error(text, None, e.to_string()))
}
