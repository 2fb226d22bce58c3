//! Signed Pauli strings in symplectic form and the GF(2) linear algebra of
//! stabilizer groups built from them.
//!
//! A [`PauliOperator`] on `n` qubits stores an `x` and a `z` bit-vector packed
//! into 64-bit words together with a phase exponent `k ∈ Z₄`. It represents
//!
//! ```text
//! i^k · ⊗_q σ(x_q, z_q),   σ(0,0)=I, σ(1,0)=X, σ(0,1)=Z, σ(1,1)=Y = i·X·Z
//! ```
//!
//! so every operator with even `k` is Hermitian and stabilizer-group elements
//! carry `k ∈ {0, 2}` (signs ±1). In terms of the raw product "`X` part after
//! `Z` part", the single-qubit product `X·Z` has bits `(1,1)` and `k = 3`.

mod group;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use group::{graph_state_group, in_span, intersect, Decomposition, SpanBasis, StabilizerGroup};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PauliError {
    #[error("dimension mismatch: {0} vs {1} qubits")]
    DimensionMismatch(usize, usize),
    #[error("operator {0} is not Hermitian")]
    NotHermitian(String),
    #[error("generators {0} and {1} do not commute")]
    NonCommuting(usize, usize),
    #[error("inconsistent group: the generators produce -I")]
    InconsistentGroup,
    #[error("generators are not independent")]
    Dependent,
    #[error("qubit index {index} out of range for {n} qubits")]
    QubitOutOfRange { index: usize, n: usize },
    #[error("cannot parse Pauli string `{0}`")]
    Parse(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
}

/// One tensor factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

pub(crate) fn words(n: usize) -> usize {
    n.div_ceil(64)
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliOperator {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    phase: u8,
}

impl PauliOperator {
    pub fn identity(n: usize) -> Self {
        Self { n, x: vec![0; words(n)], z: vec![0; words(n)], phase: 0 }
    }

    /// Operator with the given single-qubit factors and `+1` phase.
    pub fn from_sparse(n: usize, factors: &[(usize, Pauli)]) -> Result<Self, PauliError> {
        let mut p = Self::identity(n);
        for &(q, f) in factors {
            if q >= n {
                return Err(PauliError::QubitOutOfRange { index: q, n });
            }
            let next = p.multiply(&Self::single(n, q, f))?;
            p = next;
        }
        Ok(p)
    }

    pub fn single(n: usize, q: usize, f: Pauli) -> Self {
        let mut p = Self::identity(n);
        let (x, z) = f.bits();
        p.set_bits(q, x, z);
        p
    }

    pub fn x(n: usize, q: usize) -> Self {
        Self::single(n, q, Pauli::X)
    }

    pub fn z(n: usize, q: usize) -> Self {
        Self::single(n, q, Pauli::Z)
    }

    /// Builds an operator directly from its symplectic data.
    pub fn from_bits(n: usize, x: &[bool], z: &[bool], phase: u8) -> Result<Self, PauliError> {
        if x.len() != n {
            return Err(PauliError::DimensionMismatch(n, x.len()));
        }
        if z.len() != n {
            return Err(PauliError::DimensionMismatch(n, z.len()));
        }
        let mut p = Self::identity(n);
        for q in 0..n {
            p.set_bits(q, x[q], z[q]);
        }
        p.phase = phase % 4;
        Ok(p)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn x_words(&self) -> &[u64] {
        &self.x
    }

    pub fn z_words(&self) -> &[u64] {
        &self.z
    }

    pub fn x_bit(&self, q: usize) -> bool {
        self.x[q / 64] >> (q % 64) & 1 == 1
    }

    pub fn z_bit(&self, q: usize) -> bool {
        self.z[q / 64] >> (q % 64) & 1 == 1
    }

    pub fn get(&self, q: usize) -> Pauli {
        Pauli::from_bits(self.x_bit(q), self.z_bit(q))
    }

    pub(crate) fn set_bits(&mut self, q: usize, x: bool, z: bool) {
        let (w, b) = (q / 64, 1u64 << (q % 64));
        if x {
            self.x[w] |= b;
        } else {
            self.x[w] &= !b;
        }
        if z {
            self.z[w] |= b;
        } else {
            self.z[w] &= !b;
        }
    }

    /// Qubits on which the operator acts non-trivially, in increasing order.
    pub fn support(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (w, (&xw, &zw)) in self.x.iter().zip(&self.z).enumerate() {
            let mut m = xw | zw;
            while m != 0 {
                out.push(w * 64 + m.trailing_zeros() as usize);
                m &= m - 1;
            }
        }
        out
    }

    pub fn weight(&self) -> usize {
        self.x.iter().zip(&self.z).map(|(a, b)| (a | b).count_ones() as usize).sum()
    }

    pub fn is_identity_up_to_phase(&self) -> bool {
        self.x.iter().chain(&self.z).all(|&w| w == 0)
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase.is_multiple_of(2)
    }

    /// `+1` for phase 0, `-1` for phase 2, `None` for the non-Hermitian phases.
    pub fn sign(&self) -> Option<i8> {
        match self.phase {
            0 => Some(1),
            2 => Some(-1),
            _ => None,
        }
    }

    pub fn negated(&self) -> Self {
        let mut p = self.clone();
        p.phase = (p.phase + 2) % 4;
        p
    }

    pub fn with_phase(&self, phase: u8) -> Self {
        let mut p = self.clone();
        p.phase = phase % 4;
        p
    }

    /// Same Pauli string with phase 0.
    pub fn unsigned(&self) -> Self {
        self.with_phase(0)
    }

    /// Matrix product `self · other` with the exact phase.
    pub fn multiply(&self, other: &Self) -> Result<Self, PauliError> {
        if self.n != other.n {
            return Err(PauliError::DimensionMismatch(self.n, other.n));
        }
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &Self) -> Self {
        let mut x = Vec::with_capacity(self.x.len());
        let mut z = Vec::with_capacity(self.z.len());
        let mut k: u32 = self.phase as u32 + other.phase as u32;
        for i in 0..self.x.len() {
            let (x1, z1, x2, z2) = (self.x[i], self.z[i], other.x[i], other.z[i]);
            let (x3, z3) = (x1 ^ x2, z1 ^ z2);
            k += (x1 & z1).count_ones() + (x2 & z2).count_ones() + 2 * (z1 & x2).count_ones();
            k += 4 * 64 - (x3 & z3).count_ones();
            x.push(x3);
            z.push(z3);
        }
        Self { n: self.n, x, z, phase: (k % 4) as u8 }
    }

    pub fn commutes(&self, other: &Self) -> Result<bool, PauliError> {
        if self.n != other.n {
            return Err(PauliError::DimensionMismatch(self.n, other.n));
        }
        Ok(self.commutes_unchecked(other))
    }

    pub(crate) fn commutes_unchecked(&self, other: &Self) -> bool {
        let mut acc = 0u64;
        for i in 0..self.x.len() {
            acc ^= (self.x[i] & other.z[i]) ^ (self.z[i] & other.x[i]);
        }
        acc.count_ones().is_multiple_of(2)
    }

    /// Restriction to a subset of qubits, relabelled `0..qubits.len()` in the
    /// given order. The phase is kept.
    pub fn restrict(&self, qubits: &[usize]) -> Self {
        let mut p = Self::identity(qubits.len());
        for (i, &q) in qubits.iter().enumerate() {
            p.set_bits(i, self.x_bit(q), self.z_bit(q));
        }
        p.phase = self.phase;
        p
    }

    /// Embeds into `n` qubits, sending local qubit `i` to `qubits[i]`.
    pub fn embed(&self, n: usize, qubits: &[usize]) -> Self {
        let mut p = Self::identity(n);
        for (i, &q) in qubits.iter().enumerate() {
            p.set_bits(q, self.x_bit(i), self.z_bit(i));
        }
        p.phase = self.phase;
        p
    }
}

impl fmt::Display for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(["+", "+i", "-", "-i"][self.phase as usize])?;
        for q in 0..self.n {
            write!(f, "{}", self.get(q).letter())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for PauliOperator {
    type Err = PauliError;

    /// Accepts an optional sign prefix (`+`, `-`, `+i`, `-i`, `i`) followed by
    /// one letter from `IXYZ` per qubit.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let (phase, body) = if let Some(r) = t.strip_prefix("+i") {
            (1, r)
        } else if let Some(r) = t.strip_prefix("-i") {
            (3, r)
        } else if let Some(r) = t.strip_prefix('i') {
            (1, r)
        } else if let Some(r) = t.strip_prefix('+') {
            (0, r)
        } else if let Some(r) = t.strip_prefix('-') {
            (2, r)
        } else {
            (0, t)
        };
        let n = body.chars().count();
        let mut p = Self::identity(n);
        for (q, c) in body.chars().enumerate() {
            let f = match c {
                'I' | '_' => Pauli::I,
                'X' => Pauli::X,
                'Y' => Pauli::Y,
                'Z' => Pauli::Z,
                _ => return Err(PauliError::Parse(s.to_string())),
            };
            let (x, z) = f.bits();
            p.set_bits(q, x, z);
        }
        p.phase = phase;
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PauliOperator {
        s.parse().unwrap()
    }

    #[test]
    fn involution_gives_identity() {
        let a = p("XI");
        let r = a.multiply(&a).unwrap();
        assert!(r.is_identity_up_to_phase());
        assert_eq!(r.phase(), 0);
    }

    #[test]
    fn x_times_z_is_minus_i_y() {
        let r = p("X").multiply(&p("Z")).unwrap();
        assert_eq!(r.get(0), Pauli::Y);
        assert_eq!(r.phase(), 3);
        assert_eq!(p("Z").multiply(&p("X")).unwrap().phase(), 1);
    }

    #[test]
    fn commutation_examples() {
        assert!(p("XZ").commutes(&p("ZX")).unwrap());
        assert!(p("X").commutes(&p("X")).unwrap());
        assert!(!p("X").commutes(&p("Z")).unwrap());
        assert!(p("X").commutes(&p("XZ")).is_err());
    }

    #[test]
    fn display_round_trip() {
        for s in ["+XYZI", "-ZZ", "+iY", "-iXX"] {
            assert_eq!(p(s).to_string(), s);
        }
        assert!("XQ".parse::<PauliOperator>().is_err());
    }

    #[test]
    fn wide_operators_cross_word_boundaries() {
        let n = 130;
        let a = PauliOperator::x(n, 129).multiply(&PauliOperator::z(n, 3)).unwrap();
        let b = PauliOperator::z(n, 129);
        assert!(!a.commutes(&b).unwrap());
        assert_eq!(a.support(), vec![3, 129]);
        let ab = a.multiply(&b).unwrap();
        assert_eq!(ab.get(129), Pauli::Y);
        assert_eq!(ab.weight(), 2);
    }
}
