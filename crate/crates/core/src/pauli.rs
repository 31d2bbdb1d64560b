//! Signed n-qubit Pauli operators in the binary symplectic representation.
//!
//! An operator is stored as `i^phase` times a tensor product of literal
//! single-qubit Paulis, where the bit pair `(x, z) = (1, 1)` is `Y` itself
//! (not `XZ`). Hermitian operators therefore have an even phase.

use std::fmt;
use std::str::FromStr;

use crate::error::{check_dimension, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const NON_IDENTITY: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    pub fn from_bits(x: bool, z: bool) -> Pauli {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_symbol(c: char) -> Option<Pauli> {
        match c {
            'I' | '_' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

pub(crate) fn words_for(n: usize) -> usize {
    n.div_ceil(64).max(1)
}

/// Exponent of `i` picked up when multiplying two literal Pauli strings,
/// given as packed bit words. The result is taken mod 4.
pub(crate) fn product_phase(x1: &[u64], z1: &[u64], x2: &[u64], z2: &[u64]) -> u8 {
    let mut plus = 0u32;
    let mut minus = 0u32;
    for w in 0..x1.len() {
        let (a, b, c, d) = (x1[w], z1[w], x2[w], z2[w]);
        // X*Y = iZ, Y*Z = iX, Z*X = iY and the reversed orders give -i.
        plus += ((a & !b & c & d) | (a & b & !c & d) | (!a & b & c & !d)).count_ones();
        minus += ((a & !b & !c & d) | (a & b & c & !d) | (!a & b & c & d)).count_ones();
    }
    ((plus + 4 * 64 * x1.len() as u32 - minus) % 4) as u8
}

pub(crate) fn anticommutes_words(x1: &[u64], z1: &[u64], x2: &[u64], z2: &[u64]) -> bool {
    let mut acc = 0u64;
    for w in 0..x1.len() {
        acc ^= (x1[w] & z2[w]) ^ (z1[w] & x2[w]);
    }
    acc.count_ones() % 2 == 1
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliOperator {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    phase: u8,
}

impl PauliOperator {
    pub fn identity(n_qubits: usize) -> Self {
        let words = words_for(n_qubits);
        PauliOperator {
            n: n_qubits,
            x: vec![0; words],
            z: vec![0; words],
            phase: 0,
        }
    }

    pub fn single(n_qubits: usize, qubit: usize, pauli: Pauli) -> Result<Self> {
        let mut op = Self::identity(n_qubits);
        op.set(qubit, pauli)?;
        Ok(op)
    }

    /// Builds an operator from `(qubit, pauli)` pairs; later entries overwrite
    /// earlier ones on the same qubit.
    pub fn from_sparse(n_qubits: usize, entries: &[(usize, Pauli)]) -> Result<Self> {
        let mut op = Self::identity(n_qubits);
        for &(q, p) in entries {
            op.set(q, p)?;
        }
        Ok(op)
    }

    pub fn from_paulis(paulis: &[Pauli]) -> Self {
        let mut op = Self::identity(paulis.len());
        for (q, &p) in paulis.iter().enumerate() {
            op.set_unchecked(q, p);
        }
        op
    }

    pub(crate) fn from_words(n: usize, x: Vec<u64>, z: Vec<u64>, phase: u8) -> Self {
        PauliOperator {
            n,
            x,
            z,
            phase: phase % 4,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    /// Exponent of `i` in `{0, 1, 2, 3}`.
    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase % 2 == 0
    }

    /// `true` for a Hermitian operator carrying a minus sign.
    pub fn is_negative(&self) -> bool {
        self.phase == 2
    }

    pub fn with_phase(mut self, phase: u8) -> Self {
        self.phase = phase % 4;
        self
    }

    pub fn negated(mut self) -> Self {
        self.phase = (self.phase + 2) % 4;
        self
    }

    pub fn get(&self, qubit: usize) -> Pauli {
        let (w, b) = (qubit / 64, qubit % 64);
        Pauli::from_bits((self.x[w] >> b) & 1 == 1, (self.z[w] >> b) & 1 == 1)
    }

    pub fn set(&mut self, qubit: usize, pauli: Pauli) -> Result<()> {
        if qubit >= self.n {
            return Err(Error::QubitOutOfRange {
                qubit,
                n_qubits: self.n,
            });
        }
        self.set_unchecked(qubit, pauli);
        Ok(())
    }

    fn set_unchecked(&mut self, qubit: usize, pauli: Pauli) {
        let (w, mask) = (qubit / 64, 1u64 << (qubit % 64));
        let (x, z) = pauli.bits();
        self.x[w] = if x { self.x[w] | mask } else { self.x[w] & !mask };
        self.z[w] = if z { self.z[w] | mask } else { self.z[w] & !mask };
    }

    pub fn x_words(&self) -> &[u64] {
        &self.x
    }

    pub fn z_words(&self) -> &[u64] {
        &self.z
    }

    pub fn paulis(&self) -> Vec<Pauli> {
        (0..self.n).map(|q| self.get(q)).collect()
    }

    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(x, z)| (x | z).count_ones() as usize)
            .sum()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.n).filter(|&q| self.get(q) != Pauli::I).collect()
    }

    /// Identity up to phase.
    pub fn is_identity(&self) -> bool {
        self.x.iter().chain(&self.z).all(|&w| w == 0)
    }

    pub fn commutes(&self, other: &PauliOperator) -> Result<bool> {
        check_dimension(self.n, other.n)?;
        Ok(!anticommutes_words(&self.x, &self.z, &other.x, &other.z))
    }

    /// The product `self · other`.
    pub fn multiply(&self, other: &PauliOperator) -> Result<PauliOperator> {
        check_dimension(self.n, other.n)?;
        let extra = product_phase(&self.x, &self.z, &other.x, &other.z);
        Ok(PauliOperator {
            n: self.n,
            x: self.x.iter().zip(&other.x).map(|(a, b)| a ^ b).collect(),
            z: self.z.iter().zip(&other.z).map(|(a, b)| a ^ b).collect(),
            phase: (self.phase + other.phase + extra) % 4,
        })
    }

    /// Tensor product `self ⊗ other`, with `self` on the low qubit indices.
    pub fn tensor(&self, other: &PauliOperator) -> PauliOperator {
        let mut paulis = self.paulis();
        paulis.extend(other.paulis());
        PauliOperator::from_paulis(&paulis).with_phase(self.phase + other.phase)
    }

    /// Restricts to the listed qubits, keeping the phase.
    pub fn select(&self, qubits: &[usize]) -> PauliOperator {
        let paulis: Vec<Pauli> = qubits.iter().map(|&q| self.get(q)).collect();
        PauliOperator::from_paulis(&paulis).with_phase(self.phase)
    }

    /// Places this operator onto `qubits` of a larger register.
    pub fn embed(&self, n_qubits: usize, qubits: &[usize]) -> Result<PauliOperator> {
        check_dimension(self.n, qubits.len())?;
        let mut out = PauliOperator::identity(n_qubits);
        for (local, &global) in qubits.iter().enumerate() {
            out.set(global, self.get(local))?;
        }
        Ok(out.with_phase(self.phase))
    }

    /// The Pauli letters without sign, used as a deterministic sort key.
    pub fn letters(&self) -> String {
        (0..self.n).map(|q| self.get(q).symbol()).collect()
    }
}

impl fmt::Display for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = match self.phase {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        };
        write!(f, "{sign}{}", self.letters())
    }
}

impl FromStr for PauliOperator {
    type Err = Error;

    /// Parses `+XZI`, `-YY`, `+iZ` or unsigned `XX`.
    fn from_str(text: &str) -> Result<Self> {
        let parse_err = |column: usize, message: String| Error::Parse {
            line: 1,
            column,
            message,
        };
        let text = text.trim();
        let (mut phase, rest) = if let Some(r) = text.strip_prefix('-') {
            (2u8, r)
        } else if let Some(r) = text.strip_prefix('+') {
            (0u8, r)
        } else {
            (0u8, text)
        };
        let rest = match rest.strip_prefix('i') {
            Some(r) => {
                phase += 1;
                r
            }
            None => rest,
        };
        let offset = text.len() - rest.len();
        if rest.is_empty() {
            return Err(parse_err(offset + 1, format!("empty Pauli string `{text}`")));
        }
        let mut paulis = Vec::with_capacity(rest.len());
        for (i, c) in rest.chars().enumerate() {
            let p = Pauli::from_symbol(c).ok_or_else(|| {
                parse_err(offset + i + 1, format!("unexpected character `{c}` in Pauli string"))
            })?;
            paulis.push(p);
        }
        Ok(PauliOperator::from_paulis(&paulis).with_phase(phase))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PauliOperator {
        s.parse().unwrap()
    }

    #[test]
    fn commutation_examples() {
        assert!(!p("X").commutes(&p("Z")).unwrap());
        assert!(p("XX").commutes(&p("ZZ")).unwrap());
        assert!(!p("IZZ").commutes(&p("IXI")).unwrap());
    }

    #[test]
    fn multiplication_examples() {
        assert_eq!(p("X").multiply(&p("Z")).unwrap(), p("-iY"));
        assert_eq!(p("Z").multiply(&p("X")).unwrap(), p("+iY"));
        assert_eq!(p("ZZI").multiply(&p("IZZ")).unwrap(), p("ZIZ"));
        assert_eq!(p("-XYZ").multiply(&p("-XYZ")).unwrap(), p("III"));
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        assert_eq!(
            p("XX").commutes(&p("X")),
            Err(Error::Dimension { expected: 2, found: 1 })
        );
        assert!(p("XX").multiply(&p("XXX")).is_err());
    }

    #[test]
    fn display_round_trip() {
        for s in ["+XYZI", "-ZZ", "+iX", "-iYY"] {
            assert_eq!(p(s).to_string(), s);
        }
        assert_eq!(p("XZ").to_string(), "+XZ");
    }

    #[test]
    fn parse_errors_carry_column() {
        match "+XQ".parse::<PauliOperator>() {
            Err(Error::Parse { column, .. }) => assert_eq!(column, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!("-".parse::<PauliOperator>().is_err());
    }

    #[test]
    fn wide_operators_use_several_words() {
        let mut a = PauliOperator::identity(130);
        a.set(129, Pauli::X).unwrap();
        let b = PauliOperator::single(130, 129, Pauli::Z).unwrap();
        assert!(!a.commutes(&b).unwrap());
        assert_eq!(a.multiply(&b).unwrap().get(129), Pauli::Y);
        assert_eq!(a.weight(), 1);
        assert!(a.set(130, Pauli::Z).is_err());
    }
}
