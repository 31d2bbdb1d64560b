//! CHP-style stabilizer tableau with destabilizer rows.
//!
//! Rows `0..n` are destabilizers and rows `n..2n` stabilizers. Each row is
//! bit-packed into `words` machine words per X and Z block, with a phase
//! exponent of `i`. Stabilizer phases are always 0 or 2; destabilizer phases
//! carry no meaning and may drift.

use std::fmt;

use rand::Rng;

use crate::error::{check_dimension, Error, Result};
use crate::pauli::{anticommutes_words, product_phase, words_for, Pauli, PauliOperator};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    Hadamard,
    Phase,
    Cnot,
    Cz,
    PauliX,
    PauliY,
    PauliZ,
}

impl GateKind {
    pub fn arity(self) -> usize {
        match self {
            GateKind::Cnot | GateKind::Cz => 2,
            _ => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::Hadamard => "h",
            GateKind::Phase => "s",
            GateKind::Cnot => "cnot",
            GateKind::Cz => "cz",
            GateKind::PauliX => "x",
            GateKind::PauliY => "y",
            GateKind::PauliZ => "z",
        }
    }

    pub fn from_name(name: &str) -> Option<GateKind> {
        Some(match name {
            "h" => GateKind::Hadamard,
            "s" => GateKind::Phase,
            "cnot" => GateKind::Cnot,
            "cz" => GateKind::Cz,
            "x" => GateKind::PauliX,
            "y" => GateKind::PauliY,
            "z" => GateKind::PauliZ,
            _ => return None,
        })
    }
}

/// A Clifford gate with its target qubits. For `Cnot` the first target is
/// the control.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CliffordGate {
    H(usize),
    S(usize),
    X(usize),
    Y(usize),
    Z(usize),
    Cnot(usize, usize),
    Cz(usize, usize),
}

impl CliffordGate {
    pub fn new(kind: GateKind, targets: &[usize]) -> Result<CliffordGate> {
        if targets.len() != kind.arity() {
            return Err(Error::Contract(format!(
                "gate `{}` takes {} target(s), got {}",
                kind.name(),
                kind.arity(),
                targets.len()
            )));
        }
        let gate = match kind {
            GateKind::Hadamard => CliffordGate::H(targets[0]),
            GateKind::Phase => CliffordGate::S(targets[0]),
            GateKind::PauliX => CliffordGate::X(targets[0]),
            GateKind::PauliY => CliffordGate::Y(targets[0]),
            GateKind::PauliZ => CliffordGate::Z(targets[0]),
            GateKind::Cnot => CliffordGate::Cnot(targets[0], targets[1]),
            GateKind::Cz => CliffordGate::Cz(targets[0], targets[1]),
        };
        if targets.len() == 2 && targets[0] == targets[1] {
            return Err(Error::Contract(format!(
                "gate `{}` needs two distinct targets, got {} twice",
                kind.name(),
                targets[0]
            )));
        }
        Ok(gate)
    }

    pub fn kind(&self) -> GateKind {
        match self {
            CliffordGate::H(_) => GateKind::Hadamard,
            CliffordGate::S(_) => GateKind::Phase,
            CliffordGate::X(_) => GateKind::PauliX,
            CliffordGate::Y(_) => GateKind::PauliY,
            CliffordGate::Z(_) => GateKind::PauliZ,
            CliffordGate::Cnot(..) => GateKind::Cnot,
            CliffordGate::Cz(..) => GateKind::Cz,
        }
    }

    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            CliffordGate::H(q)
            | CliffordGate::S(q)
            | CliffordGate::X(q)
            | CliffordGate::Y(q)
            | CliffordGate::Z(q) => vec![q],
            CliffordGate::Cnot(a, b) | CliffordGate::Cz(a, b) => vec![a, b],
        }
    }

    /// Same gate with every target passed through `map`.
    pub fn remap(&self, map: impl Fn(usize) -> usize) -> CliffordGate {
        match *self {
            CliffordGate::H(q) => CliffordGate::H(map(q)),
            CliffordGate::S(q) => CliffordGate::S(map(q)),
            CliffordGate::X(q) => CliffordGate::X(map(q)),
            CliffordGate::Y(q) => CliffordGate::Y(map(q)),
            CliffordGate::Z(q) => CliffordGate::Z(map(q)),
            CliffordGate::Cnot(a, b) => CliffordGate::Cnot(map(a), map(b)),
            CliffordGate::Cz(a, b) => CliffordGate::Cz(map(a), map(b)),
        }
    }
}

impl fmt::Display for CliffordGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let qs: Vec<String> = self.qubits().iter().map(|q| q.to_string()).collect();
        write!(f, "{} {}", self.kind().name(), qs.join(" "))
    }
}

/// Source of fair coin flips for random measurement outcomes.
pub trait Coin {
    fn flip(&mut self) -> bool;
}

/// Always returns the same value.
#[derive(Debug, Clone, Copy)]
pub struct FixedCoin(pub bool);

impl Coin for FixedCoin {
    fn flip(&mut self) -> bool {
        self.0
    }
}

/// Adapts any random number generator.
pub struct RngCoin<'a, R: Rng + ?Sized>(pub &'a mut R);

impl<R: Rng + ?Sized> Coin for RngCoin<'_, R> {
    fn flip(&mut self) -> bool {
        self.0.random()
    }
}

/// Replays a script and answers `false` once it runs out, recording every
/// value handed out. Used to enumerate all outcome sequences depth-first.
#[derive(Debug, Clone, Default)]
pub struct ScriptedCoin {
    script: Vec<bool>,
    used: Vec<bool>,
}

impl ScriptedCoin {
    pub fn new(script: Vec<bool>) -> Self {
        ScriptedCoin {
            script,
            used: Vec::new(),
        }
    }

    pub fn used(&self) -> &[bool] {
        &self.used
    }

    /// Script for the next leaf in depth-first order, or `None` when every
    /// sequence has been visited.
    pub fn next_script(&self) -> Option<Vec<bool>> {
        let last_false = self.used.iter().rposition(|&b| !b)?;
        let mut next = self.used[..last_false].to_vec();
        next.push(true);
        Some(next)
    }
}

impl Coin for ScriptedCoin {
    fn flip(&mut self) -> bool {
        let value = self.script.get(self.used.len()).copied().unwrap_or(false);
        self.used.push(value);
        value
    }
}

/// Outcome of a Pauli measurement: `false` for eigenvalue +1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Measurement {
    pub outcome: bool,
    pub deterministic: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StabilizerTableau {
    n: usize,
    words: usize,
    xs: Vec<u64>,
    zs: Vec<u64>,
    phases: Vec<u8>,
}

impl StabilizerTableau {
    /// The all-zeros state `|0…0⟩`.
    pub fn zero_state(n_qubits: usize) -> Self {
        let words = words_for(n_qubits);
        let rows = 2 * n_qubits;
        let mut t = StabilizerTableau {
            n: n_qubits,
            words,
            xs: vec![0; rows * words],
            zs: vec![0; rows * words],
            phases: vec![0; rows],
        };
        for q in 0..n_qubits {
            let (w, mask) = (q / 64, 1u64 << (q % 64));
            t.xs[q * words + w] |= mask;
            t.zs[(n_qubits + q) * words + w] |= mask;
        }
        t
    }

    /// Builds the state stabilized by `generators`, which must be Hermitian,
    /// pairwise commuting, independent, and exactly `n` in number. The rows
    /// are stored in the given order.
    pub fn from_stabilizers(generators: &[PauliOperator]) -> Result<Self> {
        let n = generators
            .first()
            .map(|g| g.n_qubits())
            .ok_or_else(|| Error::InvalidGenerators("no generators given".into()))?;
        check_dimension(n, generators.len())?;
        for g in generators {
            check_dimension(n, g.n_qubits())?;
            if !g.is_hermitian() {
                return Err(Error::InvalidGenerators(format!("{g} is not Hermitian")));
            }
        }
        for (i, a) in generators.iter().enumerate() {
            for b in &generators[i + 1..] {
                if !a.commutes(b)? {
                    return Err(Error::InvalidGenerators(format!("{a} and {b} anticommute")));
                }
            }
        }
        let destabilizers = solve_destabilizers(generators).ok_or_else(|| {
            Error::InvalidGenerators("generators are not independent".into())
        })?;
        let words = words_for(n);
        let mut t = StabilizerTableau {
            n,
            words,
            xs: vec![0; 2 * n * words],
            zs: vec![0; 2 * n * words],
            phases: vec![0; 2 * n],
        };
        for (i, row) in destabilizers.iter().chain(generators).enumerate() {
            t.store_row(i, row);
        }
        Ok(t)
    }

    pub fn from_strings<S: AsRef<str>>(generators: &[S]) -> Result<Self> {
        let ops = generators
            .iter()
            .map(|s| s.as_ref().parse())
            .collect::<Result<Vec<PauliOperator>>>()?;
        Self::from_stabilizers(&ops)
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn stabilizer(&self, i: usize) -> PauliOperator {
        self.load_row(self.n + i)
    }

    pub fn destabilizer(&self, i: usize) -> PauliOperator {
        self.load_row(i)
    }

    pub fn stabilizers(&self) -> Vec<PauliOperator> {
        (0..self.n).map(|i| self.stabilizer(i)).collect()
    }

    pub fn destabilizers(&self) -> Vec<PauliOperator> {
        (0..self.n).map(|i| self.destabilizer(i)).collect()
    }

    /// Tensor product with `other` placed on the following qubit indices.
    pub fn tensor(&self, other: &StabilizerTableau) -> StabilizerTableau {
        let n = self.n + other.n;
        let words = words_for(n);
        let mut t = StabilizerTableau {
            n,
            words,
            xs: vec![0; 2 * n * words],
            zs: vec![0; 2 * n * words],
            phases: vec![0; 2 * n],
        };
        let lift_a = |p: PauliOperator| p.tensor(&PauliOperator::identity(other.n));
        let lift_b = |p: PauliOperator| PauliOperator::identity(self.n).tensor(&p);
        for i in 0..self.n {
            t.store_row(i, &lift_a(self.destabilizer(i)));
            t.store_row(n + i, &lift_a(self.stabilizer(i)));
        }
        for i in 0..other.n {
            t.store_row(self.n + i, &lift_b(other.destabilizer(i)));
            t.store_row(n + self.n + i, &lift_b(other.stabilizer(i)));
        }
        t
    }

    fn load_row(&self, row: usize) -> PauliOperator {
        let r = row * self.words..(row + 1) * self.words;
        PauliOperator::from_words(
            self.n,
            self.xs[r.clone()].to_vec(),
            self.zs[r].to_vec(),
            self.phases[row],
        )
    }

    fn store_row(&mut self, row: usize, op: &PauliOperator) {
        let r = row * self.words..(row + 1) * self.words;
        self.xs[r.clone()].copy_from_slice(op.x_words());
        self.zs[r].copy_from_slice(op.z_words());
        self.phases[row] = op.phase();
    }

    fn row_x(&self, row: usize) -> &[u64] {
        &self.xs[row * self.words..(row + 1) * self.words]
    }

    fn row_z(&self, row: usize) -> &[u64] {
        &self.zs[row * self.words..(row + 1) * self.words]
    }

    /// `row[target] ← row[target] · row[source]`.
    fn rowmul(&mut self, target: usize, source: usize) {
        let w = self.words;
        let extra = product_phase(
            self.row_x(target),
            self.row_z(target),
            self.row_x(source),
            self.row_z(source),
        );
        self.phases[target] = (self.phases[target] + self.phases[source] + extra) % 4;
        for k in 0..w {
            self.xs[target * w + k] ^= self.xs[source * w + k];
            self.zs[target * w + k] ^= self.zs[source * w + k];
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let w = self.words;
        for k in 0..w {
            self.xs.swap(a * w + k, b * w + k);
            self.zs.swap(a * w + k, b * w + k);
        }
        self.phases.swap(a, b);
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q < self.n {
            Ok(())
        } else {
            Err(Error::QubitOutOfRange {
                qubit: q,
                n_qubits: self.n,
            })
        }
    }

    fn bit(&self, data: &[u64], row: usize, q: usize) -> bool {
        (data[row * self.words + q / 64] >> (q % 64)) & 1 == 1
    }

    /// Conjugates every row by `gate`.
    pub fn apply_gate(&mut self, gate: &CliffordGate) -> Result<()> {
        for q in gate.qubits() {
            self.check_qubit(q)?;
        }
        if let CliffordGate::Cnot(a, b) | CliffordGate::Cz(a, b) = *gate {
            if a == b {
                return Err(Error::Contract(format!("{gate} needs two distinct targets")));
            }
        }
        let w = self.words;
        let rows = 2 * self.n;
        let (xs, zs, ph) = (&mut self.xs, &mut self.zs, &mut self.phases);
        let loc = |q: usize| (q / 64, q % 64);
        match *gate {
            CliffordGate::H(q) => {
                let (k, s) = loc(q);
                for r in 0..rows {
                    let (x, z) = ((xs[r * w + k] >> s) & 1, (zs[r * w + k] >> s) & 1);
                    ph[r] = (ph[r] + 2 * (x & z) as u8) % 4;
                    if x != z {
                        xs[r * w + k] ^= 1 << s;
                        zs[r * w + k] ^= 1 << s;
                    }
                }
            }
            CliffordGate::S(q) => {
                let (k, s) = loc(q);
                for r in 0..rows {
                    let (x, z) = ((xs[r * w + k] >> s) & 1, (zs[r * w + k] >> s) & 1);
                    ph[r] = (ph[r] + 2 * (x & z) as u8) % 4;
                    zs[r * w + k] ^= x << s;
                }
            }
            CliffordGate::X(q) | CliffordGate::Y(q) | CliffordGate::Z(q) => {
                let (k, s) = loc(q);
                for r in 0..rows {
                    let (x, z) = ((xs[r * w + k] >> s) & 1, (zs[r * w + k] >> s) & 1);
                    let flip = match gate {
                        CliffordGate::X(_) => z,
                        CliffordGate::Z(_) => x,
                        _ => x ^ z,
                    };
                    ph[r] = (ph[r] + 2 * flip as u8) % 4;
                }
            }
            CliffordGate::Cnot(a, b) => {
                let ((ka, sa), (kb, sb)) = (loc(a), loc(b));
                for r in 0..rows {
                    let xa = (xs[r * w + ka] >> sa) & 1;
                    let za = (zs[r * w + ka] >> sa) & 1;
                    let xb = (xs[r * w + kb] >> sb) & 1;
                    let zb = (zs[r * w + kb] >> sb) & 1;
                    ph[r] = (ph[r] + 2 * (xa & zb & (xb ^ za ^ 1)) as u8) % 4;
                    xs[r * w + kb] ^= xa << sb;
                    zs[r * w + ka] ^= zb << sa;
                }
            }
            CliffordGate::Cz(a, b) => {
                let ((ka, sa), (kb, sb)) = (loc(a), loc(b));
                for r in 0..rows {
                    let xa = (xs[r * w + ka] >> sa) & 1;
                    let za = (zs[r * w + ka] >> sa) & 1;
                    let xb = (xs[r * w + kb] >> sb) & 1;
                    let zb = (zs[r * w + kb] >> sb) & 1;
                    ph[r] = (ph[r] + 2 * (xa & xb & (za ^ zb)) as u8) % 4;
                    zs[r * w + ka] ^= xb << sa;
                    zs[r * w + kb] ^= xa << sb;
                }
            }
        }
        Ok(())
    }

    /// Applies a Pauli error: stabilizer signs flip where they anticommute.
    pub fn apply_pauli(&mut self, error: &PauliOperator) -> Result<()> {
        check_dimension(self.n, error.n_qubits())?;
        for r in 0..2 * self.n {
            if anticommutes_words(self.row_x(r), self.row_z(r), error.x_words(), error.z_words()) {
                self.phases[r] = (self.phases[r] + 2) % 4;
            }
        }
        Ok(())
    }

    /// Single-qubit Pauli error without allocating an operator.
    pub fn apply_single_pauli(&mut self, qubit: usize, pauli: Pauli) -> Result<()> {
        self.check_qubit(qubit)?;
        let gate = match pauli {
            Pauli::I => return Ok(()),
            Pauli::X => CliffordGate::X(qubit),
            Pauli::Y => CliffordGate::Y(qubit),
            Pauli::Z => CliffordGate::Z(qubit),
        };
        self.apply_gate(&gate)
    }

    fn first_anticommuting_stabilizer(&self, obs: &PauliOperator) -> Option<usize> {
        (self.n..2 * self.n).find(|&r| {
            anticommutes_words(self.row_x(r), self.row_z(r), obs.x_words(), obs.z_words())
        })
    }

    /// Sign of `obs` within the stabilizer group, or `None` if `obs` is not
    /// in the group up to sign. `Some(false)` means `+obs` stabilizes the
    /// state. Does not modify the tableau.
    pub fn expectation(&self, obs: &PauliOperator) -> Result<Option<bool>> {
        check_dimension(self.n, obs.n_qubits())?;
        if !obs.is_hermitian() {
            return Err(Error::InvalidObservable(obs.to_string()));
        }
        if self.first_anticommuting_stabilizer(obs).is_some() {
            return Ok(None);
        }
        Ok(Some(self.deterministic_outcome(obs)))
    }

    fn deterministic_outcome(&self, obs: &PauliOperator) -> bool {
        let w = self.words;
        let mut x = vec![0u64; w];
        let mut z = vec![0u64; w];
        let mut phase = 0u8;
        for i in 0..self.n {
            if anticommutes_words(self.row_x(i), self.row_z(i), obs.x_words(), obs.z_words()) {
                let s = self.n + i;
                let extra = product_phase(&x, &z, self.row_x(s), self.row_z(s));
                phase = (phase + self.phases[s] + extra) % 4;
                for k in 0..w {
                    x[k] ^= self.xs[s * w + k];
                    z[k] ^= self.zs[s * w + k];
                }
            }
        }
        debug_assert!(x == obs.x_words() && z == obs.z_words());
        (phase + 4 - obs.phase()) % 4 == 2
    }

    /// Measures a Hermitian Pauli observable. Random outcomes are drawn from
    /// `coin`, which is not consulted for deterministic ones.
    pub fn measure(&mut self, obs: &PauliOperator, coin: &mut dyn Coin) -> Result<Measurement> {
        check_dimension(self.n, obs.n_qubits())?;
        if !obs.is_hermitian() {
            return Err(Error::InvalidObservable(obs.to_string()));
        }
        let Some(p) = self.first_anticommuting_stabilizer(obs) else {
            return Ok(Measurement {
                outcome: self.deterministic_outcome(obs),
                deterministic: true,
            });
        };
        for r in 0..2 * self.n {
            if r != p
                && anticommutes_words(self.row_x(r), self.row_z(r), obs.x_words(), obs.z_words())
            {
                self.rowmul(r, p);
            }
        }
        let outcome = coin.flip();
        let old = self.load_row(p);
        self.store_row(p - self.n, &old);
        let signed = obs.clone().with_phase(obs.phase() + if outcome { 2 } else { 0 });
        self.store_row(p, &signed);
        Ok(Measurement {
            outcome,
            deterministic: false,
        })
    }

    /// Reduces the stabilizer rows to a unique echelon form: X block first,
    /// then Z block, column by column with fully reduced pivots. Row
    /// operations are mirrored on the destabilizers to keep the pairing.
    pub fn canonicalize(&mut self) {
        let n = self.n;
        let mut next = 0;
        for block in 0..2 {
            for q in 0..n {
                let has = |t: &Self, r: usize| {
                    let data = if block == 0 { &t.xs } else { &t.zs };
                    t.bit(data, n + r, q)
                };
                let Some(pivot) = (next..n).find(|&r| has(self, r)) else {
                    continue;
                };
                self.swap_rows(n + next, n + pivot);
                self.swap_rows(next, pivot);
                for r in 0..n {
                    if r != next && has(self, r) {
                        self.rowmul(n + r, n + next);
                        self.rowmul(next, r);
                    }
                }
                next += 1;
            }
        }
    }

    pub fn canonical(&self) -> StabilizerTableau {
        let mut t = self.clone();
        t.canonicalize();
        t
    }

    /// Whether both tableaux describe the same pure state.
    pub fn states_equal(&self, other: &StabilizerTableau) -> Result<bool> {
        check_dimension(self.n, other.n)?;
        let (a, b) = (self.canonical(), other.canonical());
        let rows = self.n * self.words..2 * self.n * self.words;
        Ok(a.xs[rows.clone()] == b.xs[rows.clone()]
            && a.zs[rows.clone()] == b.zs[rows]
            && a.phases[self.n..] == b.phases[self.n..])
    }

    /// Canonical stabilizer rows rendered as strings.
    pub fn canonical_strings(&self) -> Vec<String> {
        self.canonical().stabilizers().iter().map(|s| s.to_string()).collect()
    }

    /// The state of `qubits` alone, if it is pure. Returns `None` when the
    /// qubits are entangled with the rest, i.e. the stabilizer subgroup
    /// supported on them has rank below `qubits.len()`.
    pub fn restrict(&self, qubits: &[usize]) -> Result<Option<StabilizerTableau>> {
        for &q in qubits {
            self.check_qubit(q)?;
        }
        let mut keep = vec![false; self.n];
        for &q in qubits {
            keep[q] = true;
        }
        let mut t = self.clone();
        let n = t.n;
        let mut next = 0;
        for block in 0..2 {
            for q in (0..n).filter(|&q| !keep[q]) {
                let has = |t: &Self, r: usize| {
                    let data = if block == 0 { &t.xs } else { &t.zs };
                    t.bit(data, n + r, q)
                };
                let Some(pivot) = (next..n).find(|&r| has(&t, r)) else {
                    continue;
                };
                t.swap_rows(n + next, n + pivot);
                for r in next + 1..n {
                    if has(&t, r) {
                        t.rowmul(n + r, n + next);
                    }
                }
                next += 1;
            }
        }
        let local: Vec<PauliOperator> = (next..n).map(|r| t.stabilizer(r).select(qubits)).collect();
        if local.len() != qubits.len() {
            return Ok(None);
        }
        if local.is_empty() {
            return Ok(None);
        }
        Ok(Some(StabilizerTableau::from_stabilizers(&local)?))
    }

    /// Checks the tableau invariants, returning a description of the first
    /// violation.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let n = self.n;
        let stabs = self.stabilizers();
        let destabs = self.destabilizers();
        for (i, s) in stabs.iter().enumerate() {
            if !s.is_hermitian() {
                return Err(format!("stabilizer {i} ({s}) is not Hermitian"));
            }
            if s.is_identity() && s.is_negative() {
                return Err(format!("stabilizer {i} is -I"));
            }
            for (j, t) in stabs.iter().enumerate().skip(i + 1) {
                if !s.commutes(t).unwrap() {
                    return Err(format!("stabilizers {i} and {j} anticommute"));
                }
            }
            for (j, d) in destabs.iter().enumerate() {
                let anti = !s.commutes(d).unwrap();
                if anti != (i == j) {
                    return Err(format!("destabilizer {j} pairs wrongly with stabilizer {i}"));
                }
            }
        }
        if n > 0 && solve_destabilizers(&stabs).is_none() {
            return Err("stabilizers are dependent".into());
        }
        Ok(())
    }
}

impl fmt::Display for StabilizerTableau {
    /// One stabilizer row per line, e.g. `+XX` then `+ZZ`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.stabilizers().iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// Finds destabilizers for independent commuting generators: Paulis `D_i`
/// with `D_i` anticommuting `S_i` only, pairwise commuting among themselves.
/// Returns `None` if the generators are dependent.
fn solve_destabilizers(generators: &[PauliOperator]) -> Option<Vec<PauliOperator>> {
    let n = generators.len();
    let nq = generators[0].n_qubits();
    // Row i of the system is S_i with X and Z swapped, so that a dot product
    // with a candidate (x | z) vector is the symplectic product.
    let cols = 2 * nq;
    let mut rows: Vec<(Vec<bool>, Vec<bool>)> = generators
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let mut lhs = vec![false; cols];
            for q in 0..nq {
                let (x, z) = g.get(q).bits();
                lhs[q] = z;
                lhs[nq + q] = x;
            }
            let mut rhs = vec![false; n];
            rhs[i] = true;
            (lhs, rhs)
        })
        .collect();
    let mut pivots = Vec::with_capacity(n);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..n).find(|&i| rows[i].0[c]) else {
            continue;
        };
        rows.swap(r, p);
        for i in 0..n {
            if i != r && rows[i].0[c] {
                let (src_l, src_r) = rows[r].clone();
                for k in 0..cols {
                    rows[i].0[k] ^= src_l[k];
                }
                for k in 0..n {
                    rows[i].1[k] ^= src_r[k];
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == n {
            break;
        }
    }
    if r < n {
        return None;
    }
    let mut destabs: Vec<PauliOperator> = (0..n)
        .map(|target| {
            let mut d = vec![Pauli::I; nq];
            let mut xbits = vec![false; nq];
            let mut zbits = vec![false; nq];
            for (row, &c) in pivots.iter().enumerate() {
                if rows[row].1[target] {
                    if c < nq {
                        xbits[c] = true;
                    } else {
                        zbits[c - nq] = true;
                    }
                }
            }
            for q in 0..nq {
                d[q] = Pauli::from_bits(xbits[q], zbits[q]);
            }
            PauliOperator::from_paulis(&d)
        })
        .collect();
    for k in 0..n {
        for i in 0..k {
            if !destabs[k].commutes(&destabs[i]).unwrap() {
                destabs[k] = destabs[k].multiply(&generators[i]).unwrap().with_phase(0);
            }
        }
    }
    Some(destabs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(gens: &[&str]) -> StabilizerTableau {
        StabilizerTableau::from_strings(gens).unwrap()
    }

    fn p(s: &str) -> PauliOperator {
        s.parse().unwrap()
    }

    #[test]
    fn hadamard_maps_z_to_x() {
        let mut s = StabilizerTableau::zero_state(1);
        s.apply_gate(&CliffordGate::H(0)).unwrap();
        assert!(s.states_equal(&t(&["+X"])).unwrap());
    }

    #[test]
    fn cnot_builds_bell_pair() {
        let mut s = t(&["+XI", "+IZ"]);
        s.apply_gate(&CliffordGate::Cnot(0, 1)).unwrap();
        assert!(s.states_equal(&t(&["+XX", "+ZZ"])).unwrap());
        s.check_invariants().unwrap();
    }

    #[test]
    fn involutions_restore_canonical_form() {
        let ghz = t(&["+XXX", "+ZZI", "+IZZ"]);
        for g in [
            CliffordGate::H(1),
            CliffordGate::Cnot(2, 0),
            CliffordGate::Cz(0, 2),
            CliffordGate::Y(1),
        ] {
            let mut s = ghz.clone();
            s.apply_gate(&g).unwrap();
            s.apply_gate(&g).unwrap();
            assert_eq!(s.canonical_strings(), ghz.canonical_strings());
        }
    }

    #[test]
    fn out_of_range_target() {
        let mut s = StabilizerTableau::zero_state(2);
        assert_eq!(
            s.apply_gate(&CliffordGate::Cnot(0, 2)),
            Err(Error::QubitOutOfRange { qubit: 2, n_qubits: 2 })
        );
    }

    #[test]
    fn pauli_errors_flip_signs() {
        let mut ghz = t(&["+XXX", "+ZZI", "+IZZ"]);
        ghz.apply_pauli(&p("IXI")).unwrap();
        assert_eq!(ghz.stabilizer(1), p("-ZZI"));
        assert_eq!(ghz.stabilizer(0), p("+XXX"));

        let mut bell = t(&["+XX", "+ZZ"]);
        bell.apply_pauli(&p("ZI")).unwrap();
        assert_eq!(bell.stabilizers(), vec![p("-XX"), p("+ZZ")]);
    }

    #[test]
    fn deterministic_and_random_measurements() {
        let mut zero = StabilizerTableau::zero_state(1);
        let m = zero.measure(&p("Z"), &mut FixedCoin(true)).unwrap();
        assert_eq!(m, Measurement { outcome: false, deterministic: true });

        for coin in [false, true] {
            let mut plus = t(&["+X"]);
            let m = plus.measure(&p("Z"), &mut FixedCoin(coin)).unwrap();
            assert!(!m.deterministic);
            assert_eq!(m.outcome, coin);
            let expected = if coin { "-Z" } else { "+Z" };
            assert!(plus.states_equal(&t(&[expected])).unwrap());
            plus.check_invariants().unwrap();
        }

        let mut ghz = t(&["+XXX", "+ZZI", "+IZZ"]);
        let before = ghz.canonical_strings();
        let m = ghz.measure(&p("IZZ"), &mut FixedCoin(true)).unwrap();
        assert_eq!(m, Measurement { outcome: false, deterministic: true });
        assert_eq!(ghz.canonical_strings(), before);
    }

    #[test]
    fn measuring_negative_observable() {
        let mut zero = StabilizerTableau::zero_state(1);
        let m = zero.measure(&p("-Z"), &mut FixedCoin(false)).unwrap();
        assert!(m.outcome);
        let mut plus = t(&["+X"]);
        let m = plus.measure(&p("-Z"), &mut FixedCoin(true)).unwrap();
        assert!(m.outcome);
        assert!(plus.states_equal(&t(&["+Z"])).unwrap());
    }

    #[test]
    fn non_hermitian_observable_rejected() {
        let mut s = StabilizerTableau::zero_state(1);
        assert!(matches!(
            s.measure(&p("iZ"), &mut FixedCoin(false)),
            Err(Error::InvalidObservable(_))
        ));
    }

    #[test]
    fn canonical_form_is_unique_per_group() {
        let a = t(&["+IZZ", "+ZZI", "+XXX"]);
        let b = t(&["+ZIZ", "+ZZI", "+XXX"]);
        assert_eq!(a.canonical_strings(), b.canonical_strings());
        let c = t(&["+ZZ", "+XX"]);
        let d = t(&["+XX", "-YY"]);
        assert_eq!(c.canonical_strings(), d.canonical_strings());
        let once = a.canonical();
        assert_eq!(once.canonical(), once);
        once.check_invariants().unwrap();
    }

    #[test]
    fn states_equal_examples() {
        let ghz = t(&["+XXX", "+ZZI", "+IZZ"]);
        let mut stab = ghz.clone();
        stab.apply_pauli(&p("IZZ")).unwrap();
        assert!(ghz.states_equal(&stab).unwrap());
        let mut flipped = ghz.clone();
        flipped.apply_pauli(&p("IXI")).unwrap();
        assert!(!ghz.states_equal(&flipped).unwrap());
        assert!(ghz.states_equal(&StabilizerTableau::zero_state(2)).is_err());
    }

    #[test]
    fn invalid_generator_sets() {
        assert!(StabilizerTableau::from_strings(&["+XX", "+ZI"]).is_err());
        assert!(StabilizerTableau::from_strings(&["+ZZ", "+ZZ"]).is_err());
        assert!(StabilizerTableau::from_strings(&["+iZ"]).is_err());
        assert!(StabilizerTableau::from_strings(&["+Z", "+ZZ"]).is_err());
    }

    #[test]
    fn restriction_of_product_and_entangled_states() {
        let mut s = t(&["+XXI", "+ZZI", "+IIZ"]);
        let r = s.restrict(&[0, 1]).unwrap().unwrap();
        assert!(r.states_equal(&t(&["+XX", "+ZZ"])).unwrap());
        assert!(s.restrict(&[1, 2]).unwrap().is_none());
        s.apply_gate(&CliffordGate::H(2)).unwrap();
        let r = s.restrict(&[2]).unwrap().unwrap();
        assert!(r.states_equal(&t(&["+X"])).unwrap());
    }

    #[test]
    fn tensor_product_places_blocks() {
        let bell = t(&["+XX", "+ZZ"]);
        let one = t(&["-Z"]);
        let joint = bell.tensor(&one);
        joint.check_invariants().unwrap();
        assert!(joint.states_equal(&t(&["+XXI", "+ZZI", "-IIZ"])).unwrap());
    }

    #[test]
    fn scripted_coin_enumerates_sequences() {
        let mut seen = Vec::new();
        let mut script = Some(Vec::new());
        while let Some(s) = script {
            let mut coin = ScriptedCoin::new(s);
            let a = coin.flip();
            let b = if a { false } else { coin.flip() };
            seen.push((a, b));
            script = coin.next_script();
        }
        assert_eq!(seen, vec![(false, false), (false, true), (true, false)]);
    }
}
