//! Entangled states, the network distribution wrapper, the stabilizer-check
//! gadget, and the built-in purification protocols.

mod builder;
mod catalog;
mod states;

pub use builder::{build_stabilizer_check, CircuitBuilder};
pub use catalog::{builtin, BUILTIN_NAMES};
pub use states::{distribute, StateName, StateSpec};

use crate::circuit::Circuit;
use crate::pauli::{Pauli, PauliOperator};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProtocolSpec {
    pub name: String,
    pub purified: StateSpec,
    pub sacrificial: Vec<StateSpec>,
    pub circuit: Circuit,
}

/// Every nontrivial element of the stabilizer group with the number of
/// single-qubit Pauli errors on transmitted qubits that it detects, most
/// sensitive first. Ties are broken by the Pauli letters (`I < X < Y < Z`)
/// and then by sign.
pub fn rank_stabilizers(state: &StateSpec) -> Vec<(PauliOperator, usize)> {
    let n = state.n_qubits();
    let errors: Vec<PauliOperator> = state
        .transmitted_qubits()
        .into_iter()
        .flat_map(|q| {
            Pauli::NON_IDENTITY
                .iter()
                .map(move |&p| PauliOperator::single(n, q, p).expect("qubit in range"))
        })
        .collect();
    let mut ranked: Vec<(PauliOperator, usize)> = (1u64..1 << n)
        .map(|mask| {
            let element = state
                .generators
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .fold(PauliOperator::identity(n), |acc, (_, g)| {
                    acc.multiply(g).expect("same width")
                });
            let count = errors
                .iter()
                .filter(|e| !element.commutes(e).expect("same width"))
                .count();
            (element, count)
        })
        .collect();
    ranked.sort_by(|(a, ca), (b, cb)| {
        cb.cmp(ca)
            .then_with(|| a.letters().cmp(&b.letters()))
            .then_with(|| a.phase().cmp(&b.phase()))
    });
    ranked
}
