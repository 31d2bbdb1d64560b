//! Circuit representation, validation, execution and the file format.

mod execute;
pub mod format;
mod ir;
mod validate;

pub use execute::{
    execute, final_state, sweep_coins, CoinSweep, Fault, FaultAction, FaultAssignment,
    TrajectoryResult, MAX_COIN_LEAVES,
};
pub(crate) use execute::run;
pub use ir::{Basis, Circuit, CircuitOp, Condition, Parity, Register, RegisterRole};
pub use validate::{validate, Diagnostic};
