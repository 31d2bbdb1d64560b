use std::fmt;

use crate::circuit::CircuitOp;
use crate::pauli::PauliOperator;
use crate::tableau::{CliffordGate, StabilizerTableau};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StateName {
    Bell,
    Ghz3,
    Ghz4,
    Cluster4,
    /// GHZ with the first qubit Hadamard-rotated, the X-frame form used by
    /// the hashing stages.
    Ghz3c,
    Ghz4c,
}

impl StateName {
    pub fn as_str(self) -> &'static str {
        match self {
            StateName::Bell => "Bell",
            StateName::Ghz3 => "GHZ3",
            StateName::Ghz4 => "GHZ4",
            StateName::Cluster4 => "Cluster4",
            StateName::Ghz3c => "GHZ3c",
            StateName::Ghz4c => "GHZ4c",
        }
    }
}

impl fmt::Display for StateName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// An entangled resource: its stabilizer generators, the qubit that stays
/// at the generating node, and a gate sequence preparing it from `|0…0⟩`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateSpec {
    pub name: StateName,
    pub generators: Vec<PauliOperator>,
    pub home_qubit: usize,
    pub preparation: Vec<CliffordGate>,
}

fn ghz_prep(n: usize) -> Vec<CliffordGate> {
    let mut gates = vec![CliffordGate::H(0)];
    gates.extend((1..n).map(|q| CliffordGate::Cnot(0, q)));
    gates
}

fn parse_all(gens: &[&str]) -> Vec<PauliOperator> {
    gens.iter()
        .map(|g| g.parse().expect("catalog generators are well formed"))
        .collect()
}

impl StateSpec {
    pub fn new(name: StateName) -> StateSpec {
        let (gens, prep): (&[&str], Vec<CliffordGate>) = match name {
            StateName::Bell => (&["+XX", "+ZZ"], ghz_prep(2)),
            StateName::Ghz3 => (&["+XXX", "+ZZI", "+IZZ"], ghz_prep(3)),
            StateName::Ghz4 => (&["+XXXX", "+ZZII", "+IZZI", "+IIZZ"], ghz_prep(4)),
            StateName::Cluster4 => {
                let mut prep: Vec<_> = (0..4).map(CliffordGate::H).collect();
                prep.extend((0..3).map(|q| CliffordGate::Cz(q, q + 1)));
                (&["+XZII", "+ZXZI", "+IZXZ", "+IIZX"], prep)
            }
            StateName::Ghz3c => {
                let mut prep = ghz_prep(3);
                prep.push(CliffordGate::H(0));
                (&["+ZXX", "+XZI", "+IZZ"], prep)
            }
            StateName::Ghz4c => {
                let mut prep = ghz_prep(4);
                prep.push(CliffordGate::H(0));
                (&["+ZXXX", "+XZII", "+IZZI", "+IIZZ"], prep)
            }
        };
        StateSpec {
            name,
            generators: parse_all(gens),
            home_qubit: 0,
            preparation: prep,
        }
    }

    pub fn bell() -> Self {
        Self::new(StateName::Bell)
    }

    pub fn ghz3() -> Self {
        Self::new(StateName::Ghz3)
    }

    pub fn ghz4() -> Self {
        Self::new(StateName::Ghz4)
    }

    pub fn cluster4() -> Self {
        Self::new(StateName::Cluster4)
    }

    pub fn n_qubits(&self) -> usize {
        self.generators.len()
    }

    pub fn tableau(&self) -> StabilizerTableau {
        StabilizerTableau::from_stabilizers(&self.generators)
            .expect("catalog generators are valid")
    }

    pub fn transmitted_qubits(&self) -> Vec<usize> {
        (0..self.n_qubits()).filter(|&q| q != self.home_qubit).collect()
    }
}

/// Preparation gates for `state` followed by one transmission of every
/// qubit except the home qubit, on local indices `0..n`.
pub fn distribute(state: &StateSpec) -> Vec<CircuitOp> {
    let mut ops: Vec<CircuitOp> = state.preparation.iter().map(|&g| CircuitOp::prep(g)).collect();
    ops.push(CircuitOp::NetworkTransmit {
        qubits: state.transmitted_qubits(),
    });
    ops
}
