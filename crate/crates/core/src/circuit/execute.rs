use crate::circuit::ir::{Circuit, CircuitOp, Parity};
use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliOperator};
use crate::tableau::{Coin, ScriptedCoin, StabilizerTableau};

/// What a fault does at its op.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FaultAction {
    /// Pauli error on global qubits, applied right after the op.
    Pauli(Vec<(usize, Pauli)>),
    /// Flips the recorded bit of a measurement; the state is untouched.
    FlipOutcome,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fault {
    pub op_index: usize,
    pub action: FaultAction,
}

/// Faults realized in one trajectory, kept sorted by op index.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FaultAssignment {
    faults: Vec<Fault>,
}

impl FaultAssignment {
    pub fn new(mut faults: Vec<Fault>) -> Self {
        faults.sort_by_key(|f| f.op_index);
        FaultAssignment { faults }
    }

    pub fn single(fault: Fault) -> Self {
        FaultAssignment {
            faults: vec![fault],
        }
    }

    /// Appends a fault whose op index is not below any already present.
    pub(crate) fn push_ordered(&mut self, fault: Fault) {
        debug_assert!(self.faults.last().is_none_or(|f| f.op_index <= fault.op_index));
        self.faults.push(fault);
    }

    pub(crate) fn clear(&mut self) {
        self.faults.clear();
    }

    pub fn is_empty(&self) -> bool {
        self.faults.is_empty()
    }

    pub fn faults(&self) -> &[Fault] {
        &self.faults
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TrajectoryResult {
    /// Every parity check agreed with its expected parity.
    pub passed: bool,
    /// The purified register ended in the target state.
    pub purified_equals_target: bool,
}

impl TrajectoryResult {
    pub fn success(&self) -> bool {
        self.passed && self.purified_equals_target
    }
}

fn check_fault(circuit: &Circuit, fault: &Fault) -> Result<()> {
    let op = circuit.ops().get(fault.op_index).ok_or_else(|| {
        Error::Contract(format!("fault at op {} beyond circuit end", fault.op_index))
    })?;
    match (&fault.action, op) {
        (FaultAction::FlipOutcome, CircuitOp::Measure { .. }) => Ok(()),
        (
            FaultAction::Pauli(paulis),
            CircuitOp::Gate { .. } | CircuitOp::NetworkTransmit { .. } | CircuitOp::NoisySite { .. },
        ) => {
            let allowed = op.qubits();
            match paulis.iter().find(|(q, _)| !allowed.contains(q)) {
                Some((q, _)) => Err(Error::Contract(format!(
                    "fault on qubit {q} at op {} ({op}) which does not touch it",
                    fault.op_index
                ))),
                None => Ok(()),
            }
        }
        _ => Err(Error::Contract(format!(
            "fault {:?} is not valid at op {} ({op})",
            fault.action, fault.op_index
        ))),
    }
}

/// Runs one trajectory.
pub fn execute(
    circuit: &Circuit,
    faults: &FaultAssignment,
    coin: &mut dyn Coin,
) -> Result<TrajectoryResult> {
    for f in faults.faults() {
        check_fault(circuit, f)?;
    }
    run(circuit, faults, coin, false)
}

struct Interpreted {
    state: StabilizerTableau,
    passed: bool,
    stopped_early: bool,
}

/// Core interpreter. With `stop_on_failure`, a failed check ends the run.
fn interpret(
    circuit: &Circuit,
    faults: &FaultAssignment,
    coin: &mut dyn Coin,
    stop_on_failure: bool,
) -> Result<Interpreted> {
    let compiled = circuit.compiled();
    if let Some((i, label)) = compiled.unresolved.first() {
        return Err(Error::Contract(format!("op {i} reads unknown label `{label}`")));
    }
    let n = compiled.n_qubits;
    let mut state = match &compiled.initial {
        Some(t) => t.clone(),
        None => StabilizerTableau::zero_state(0),
    };
    let mut bits = vec![false; compiled.label_slot.len()];
    let mut passed = true;
    let mut pending = faults.faults().iter().peekable();
    for (i, op) in circuit.ops().iter().enumerate() {
        match op {
            CircuitOp::Gate {
                gate, condition, ..
            } => {
                let fire = match condition {
                    None => true,
                    Some(c) => bits[compiled.op_slot[i].expect("resolved")] == c.value,
                };
                if fire {
                    state.apply_gate(gate)?;
                }
            }
            CircuitOp::Measure { qubit, basis, .. } => {
                let obs = PauliOperator::single(n, *qubit, basis.pauli())?;
                let m = state.measure(&obs, coin)?;
                bits[compiled.op_slot[i].expect("measure slot")] = m.outcome;
            }
            CircuitOp::ParityCheck { expected, .. } => {
                let slots = compiled.check_slots[i].as_ref().expect("check slots");
                let parity = slots.iter().fold(false, |acc, &s| acc ^ bits[s]);
                if parity != (*expected == Parity::Odd) {
                    passed = false;
                }
            }
            CircuitOp::NetworkTransmit { .. }
            | CircuitOp::NoisySite { .. }
            | CircuitOp::Discard { .. } => {}
        }
        while let Some(f) = pending.next_if(|f| f.op_index == i) {
            match &f.action {
                FaultAction::Pauli(paulis) => {
                    for &(q, p) in paulis {
                        state.apply_single_pauli(q, p)?;
                    }
                }
                FaultAction::FlipOutcome => {
                    let slot = compiled.op_slot[i].expect("measure slot");
                    bits[slot] = !bits[slot];
                }
            }
        }
        if !passed && stop_on_failure {
            return Ok(Interpreted {
                state,
                passed,
                stopped_early: true,
            });
        }
    }
    Ok(Interpreted {
        state,
        passed,
        stopped_early: false,
    })
}

pub(crate) fn run(
    circuit: &Circuit,
    faults: &FaultAssignment,
    coin: &mut dyn Coin,
    stop_on_failure: bool,
) -> Result<TrajectoryResult> {
    let out = interpret(circuit, faults, coin, stop_on_failure)?;
    if out.stopped_early {
        return Ok(TrajectoryResult {
            passed: false,
            purified_equals_target: false,
        });
    }
    // The purified register equals the target iff every target generator,
    // padded with identities, stabilizes the joint state with sign +1.
    let rows = &circuit.compiled().target_rows;
    let mut equal = !rows.is_empty();
    for row in rows {
        if out.state.expectation(row)? != Some(false) {
            equal = false;
            break;
        }
    }
    Ok(TrajectoryResult {
        passed: out.passed,
        purified_equals_target: equal,
    })
}

/// The joint state at the end of a trajectory, for inspection and tests.
pub fn final_state(
    circuit: &Circuit,
    faults: &FaultAssignment,
    coin: &mut dyn Coin,
) -> Result<StabilizerTableau> {
    for f in faults.faults() {
        check_fault(circuit, f)?;
    }
    Ok(interpret(circuit, faults, coin, false)?.state)
}

/// Result of running a trajectory under every sequence of measurement coins.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoinSweep {
    /// All sequences agree.
    Deterministic(TrajectoryResult),
    /// Two sequences disagree; the first differing pair is kept.
    Ambiguous {
        first: TrajectoryResult,
        other: TrajectoryResult,
        coins: Vec<bool>,
    },
}

/// Default cap on the number of coin sequences explored.
pub const MAX_COIN_LEAVES: usize = 1 << 16;

/// Runs `faults` under every sequence of random measurement outcomes,
/// depth first, and reports whether the result depends on them.
pub fn sweep_coins(
    circuit: &Circuit,
    faults: &FaultAssignment,
    max_leaves: usize,
) -> Result<CoinSweep> {
    for f in faults.faults() {
        check_fault(circuit, f)?;
    }
    let mut script = Some(Vec::new());
    let mut first: Option<TrajectoryResult> = None;
    let mut leaves = 0;
    while let Some(s) = script {
        leaves += 1;
        if leaves > max_leaves {
            return Err(Error::Contract(format!(
                "more than {max_leaves} measurement outcome sequences"
            )));
        }
        let mut coin = ScriptedCoin::new(s);
        let result = run(circuit, faults, &mut coin, false)?;
        match first {
            None => first = Some(result),
            Some(f) if f != result => {
                return Ok(CoinSweep::Ambiguous {
                    first: f,
                    other: result,
                    coins: coin.used().to_vec(),
                })
            }
            _ => {}
        }
        script = coin.next_script();
    }
    Ok(CoinSweep::Deterministic(first.expect("at least one leaf")))
}
