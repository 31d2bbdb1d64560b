//! The built-in purification circuits.
//!
//! Purified qubit `i` lives on node `i`; node 0 holds the home qubit and
//! never receives anything over the network. Sacrificial qubits are placed
//! on the node of the purified qubit they interact with, so every two-qubit
//! gate after distribution is local.

use crate::circuit::{Basis, CircuitOp, RegisterRole};
use crate::error::{Error, Result};
use crate::protocols::builder::CircuitBuilder;
use crate::protocols::states::{StateName, StateSpec};
use crate::protocols::ProtocolSpec;
use crate::tableau::CliffordGate;

pub const BUILTIN_NAMES: [&str; 15] = [
    "ghz3-p1",
    "ghz3-p2",
    "ghz3-p1p2",
    "ghz3-het",
    "ghz4-p1",
    "ghz4-p2",
    "ghz4-p1p2",
    "ghz4-het",
    "cluster4-p1",
    "cluster4-p2",
    "cluster4-p1p2",
    "cluster4-het",
    "raw-ghz3",
    "raw-ghz4",
    "raw-cluster4",
];

pub fn builtin(name: &str) -> Result<ProtocolSpec> {
    match name {
        "raw-ghz3" => raw(name, StateSpec::ghz3()),
        "raw-ghz4" => raw(name, StateSpec::ghz4()),
        "raw-cluster4" => raw(name, StateSpec::cluster4()),
        "ghz3-p1" => ghz_hashing(name, 3, true, false),
        "ghz3-p2" => ghz_hashing(name, 3, false, true),
        "ghz3-p1p2" => ghz_hashing(name, 3, true, true),
        "ghz4-p1" => ghz_hashing(name, 4, true, false),
        "ghz4-p2" => ghz_hashing(name, 4, false, true),
        "ghz4-p1p2" => ghz_hashing(name, 4, true, true),
        "cluster4-p1" => cluster_hashing(name, true, false),
        "cluster4-p2" => cluster_hashing(name, false, true),
        "cluster4-p1p2" => cluster_hashing(name, true, true),
        "ghz3-het" => ghz3_het(),
        "ghz4-het" => ghz4_het(),
        "cluster4-het" => cluster4_het(),
        _ => Err(Error::Catalog(name.to_string())),
    }
}

fn data_register(b: &mut CircuitBuilder, state: &StateSpec) -> Vec<usize> {
    let n = state.n_qubits();
    b.distributed("data", state, RegisterRole::Purified, (0..n).collect())
}

fn finish(
    name: &str,
    b: CircuitBuilder,
    purified: StateSpec,
    sacrificial: Vec<StateSpec>,
) -> Result<ProtocolSpec> {
    let circuit = b.finish(purified.tableau())?;
    Ok(ProtocolSpec {
        name: name.to_string(),
        purified,
        sacrificial,
        circuit,
    })
}

fn raw(name: &str, state: StateSpec) -> Result<ProtocolSpec> {
    let mut b = CircuitBuilder::new(name);
    data_register(&mut b, &state);
    finish(name, b, state, Vec::new())
}

/// GHZ hashing stages in the X frame: the purified state is rotated into
/// GHZᶜ form by a Hadamard on its home qubit, checked against GHZᶜ
/// sacrifices with bilateral CNOTs, and rotated back.
///
/// P1 copies the Z-type parities of the data onto the sacrifice; P2 copies
/// the sacrifice's X…X-type parity onto the data.
fn ghz_hashing(name: &str, n: usize, p1: bool, p2: bool) -> Result<ProtocolSpec> {
    let (state, sac_name) = match n {
        3 => (StateSpec::ghz3(), StateName::Ghz3c),
        _ => (StateSpec::ghz4(), StateName::Ghz4c),
    };
    let sac = StateSpec::new(sac_name);
    let mut b = CircuitBuilder::new(name);
    let d = data_register(&mut b, &state);
    b.frame_h(d[0]);
    let nodes: Vec<usize> = (0..n).collect();
    let mut sacrificial = Vec::new();
    let first = p1.then(|| {
        sacrificial.push(sac.clone());
        b.distributed("p1", &sac, RegisterRole::Sacrificial, nodes.clone())
    });
    let second = p2.then(|| {
        sacrificial.push(sac.clone());
        b.distributed("p2", &sac, RegisterRole::Sacrificial, nodes.clone())
    });
    if let Some(s) = first {
        b.cx(s[0], d[0]);
        for i in 1..n {
            b.cx(d[i], s[i]);
        }
        b.measure(s[0], Basis::X, "p0");
        for i in 1..n {
            b.measure(s[i], Basis::Z, &format!("p{i}"));
        }
        for i in 0..n - 1 {
            b.check(&[&format!("p{i}"), &format!("p{}", i + 1)]);
        }
    }
    if let Some(s) = second {
        b.cx(d[0], s[0]);
        for i in 1..n {
            b.cx(s[i], d[i]);
        }
        b.measure(s[0], Basis::Z, "q0");
        for i in 1..n {
            b.measure(s[i], Basis::X, &format!("q{i}"));
        }
        let labels: Vec<String> = (0..n).map(|i| format!("q{i}")).collect();
        let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
        b.check(&refs);
    }
    b.frame_h(d[0]);
    finish(name, b, state, sacrificial)
}

/// Hashing stages for the linear cluster state, two-coloured as
/// {0, 2} and {1, 3}. Each stage sacrifices one cluster state and checks
/// the stabilizers centred on one colour.
fn cluster_hashing(name: &str, p1: bool, p2: bool) -> Result<ProtocolSpec> {
    let state = StateSpec::cluster4();
    let mut b = CircuitBuilder::new(name);
    let d = data_register(&mut b, &state);
    let nodes: Vec<usize> = (0..4).collect();
    let (even, odd) = ([0usize, 2], [1usize, 3]);
    let mut sacrificial = Vec::new();
    let first = p1.then(|| {
        sacrificial.push(state.clone());
        b.distributed("p1", &state, RegisterRole::Sacrificial, nodes.clone())
    });
    let second = p2.then(|| {
        sacrificial.push(state.clone());
        b.distributed("p2", &state, RegisterRole::Sacrificial, nodes.clone())
    });
    if let Some(s) = first {
        for i in even {
            b.cx(d[i], s[i]);
        }
        for i in odd {
            b.cx(s[i], d[i]);
        }
        for i in 0..4 {
            let basis = if even.contains(&i) { Basis::Z } else { Basis::X };
            b.measure(s[i], basis, &format!("p{i}"));
        }
        b.check(&["p0", "p1", "p2"]).check(&["p2", "p3"]);
    }
    if let Some(s) = second {
        for i in odd {
            b.cx(d[i], s[i]);
        }
        for i in even {
            b.cx(s[i], d[i]);
        }
        for i in 0..4 {
            let basis = if odd.contains(&i) { Basis::Z } else { Basis::X };
            b.measure(s[i], basis, &format!("q{i}"));
        }
        b.check(&["q0", "q1"]).check(&["q1", "q2", "q3"]);
    }
    finish(name, b, state, sacrificial)
}

fn bell_pair(b: &mut CircuitBuilder, name: &str, from: usize, to: usize) -> (usize, usize) {
    let q = b.distributed(name, &StateSpec::bell(), RegisterRole::Sacrificial, vec![from, to]);
    (q[0], q[1])
}

/// Two Bell pairs between nodes 1 and 2. The first checks `IZZ`; the second
/// checks the first pair's `XX` so that phase errors on the sacrifice are
/// caught too.
fn ghz3_het() -> Result<ProtocolSpec> {
    let name = "ghz3-het";
    let state = StateSpec::ghz3();
    let mut b = CircuitBuilder::new(name);
    let d = data_register(&mut b, &state);
    let (a1, a2) = bell_pair(&mut b, "a", 1, 2);
    let (c1, c2) = bell_pair(&mut b, "c", 1, 2);
    b.cx(c1, a1).cx(c2, a2);
    b.cx(d[1], a1).cx(d[2], a2);
    b.measure(a1, Basis::Z, "m1")
        .measure(a2, Basis::Z, "m2")
        .measure(c1, Basis::X, "m3")
        .measure(c2, Basis::X, "m4");
    b.check(&["m1", "m2"]).check(&["m3", "m4"]);
    finish(name, b, state, vec![StateSpec::bell(); 2])
}

/// Three Bell pairs in a triangle over nodes 1, 2 and 3, coupled to the
/// data at every node, with one parity check per measurement basis. The
/// conditional Z undoes the phase the node-3 coupling leaves on the data.
fn ghz4_het() -> Result<ProtocolSpec> {
    let name = "ghz4-het";
    let state = StateSpec::ghz4();
    let mut b = CircuitBuilder::new(name);
    let d = data_register(&mut b, &state);
    let (p, r) = bell_pair(&mut b, "b12", 1, 2);
    let (s, u) = bell_pair(&mut b, "b23", 2, 3);
    let (v, q) = bell_pair(&mut b, "b31", 3, 1);
    b.cx(p, q).cz(d[1], p);
    b.measure(p, Basis::X, "n1a").measure(q, Basis::Z, "n1b");
    b.cx(r, s).cz(d[2], r).cx(d[2], s);
    b.measure(r, Basis::X, "n2a").measure(s, Basis::Z, "n2b");
    b.cx(u, v).cx(d[3], v);
    b.measure(u, Basis::X, "n3a").measure(v, Basis::Z, "n3b");
    b.push(CircuitOp::conditional(CliffordGate::Z(d[3]), "n3a", true));
    b.check(&["n1a", "n2a", "n3a"]).check(&["n1b", "n2b", "n3b"]);
    finish(name, b, state, vec![StateSpec::bell(); 3])
}

/// Four Bell pairs among nodes 1, 2 and 3. The data couplings at nodes 2
/// and 3 check `ZXZI` and `IZXZ`; the remaining parities catch errors on
/// the pairs themselves.
fn cluster4_het() -> Result<ProtocolSpec> {
    let name = "cluster4-het";
    let state = StateSpec::cluster4();
    let mut b = CircuitBuilder::new(name);
    let d = data_register(&mut b, &state);
    let (a1, a2) = bell_pair(&mut b, "a", 1, 2);
    let (e1, e3) = bell_pair(&mut b, "e", 1, 3);
    let (b2, b3) = bell_pair(&mut b, "b", 2, 3);
    let (c3, c2) = bell_pair(&mut b, "c", 3, 2);
    b.cx(a1, e1).cz(d[1], a1);
    b.measure(a1, Basis::X, "m1a").measure(e1, Basis::Z, "m1b");
    b.cx(b2, c2).cx(a2, c2).cx(d[2], c2).cx(a2, d[2]);
    b.measure(a2, Basis::X, "m2a")
        .measure(b2, Basis::X, "m2c")
        .measure(c2, Basis::Z, "m2b");
    b.cx(b3, c3).cx(e3, c3).h(d[3]).cx(d[3], c3).cx(e3, d[3]).h(d[3]);
    b.measure(e3, Basis::X, "m3a")
        .measure(b3, Basis::X, "m3c")
        .measure(c3, Basis::Z, "m3b");
    b.push(CircuitOp::conditional(CliffordGate::Z(d[3]), "m1b", true));
    b.check(&["m1a", "m2a", "m3a", "m2c", "m3c"])
        .check(&["m1b", "m2b", "m3b"])
        .check(&["m2c", "m3c"]);
    finish(name, b, state, vec![StateSpec::bell(); 4])
}
