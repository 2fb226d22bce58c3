//! Dense state vectors on at most [`MAX_QUBITS`] qubits.
//!
//! Qubit `q` is bit `q` of the amplitude index. Two-qubit gate matrices use
//! the local index `b₀ + 2·b₁` where `b₀` is the bit of the first target.
//! Removing qubits (fusions, destructive measurements) keeps the remaining
//! qubits in their original relative order.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

use crate::pauli::PauliOperator;

pub const MAX_QUBITS: usize = 14;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StateError {
    #[error("{0} qubits exceeds the limit of {MAX_QUBITS}")]
    TooManyQubits(usize),
    #[error("gate matrix is not unitary (deviation {0:.3e})")]
    NonUnitary(f64),
    #[error("bad gate targets: {0}")]
    BadTargets(String),
    #[error("impossible outcome (probability {0:.3e})")]
    ImpossibleOutcome(f64),
    #[error("operator acts on {0} qubits, state has {1}")]
    DimensionMismatch(usize, usize),
    #[error("operator {0} is not Hermitian")]
    NotHermitian(String),
    #[error("amplitude vector of length {0} is not a normalisable power of two")]
    BadAmplitudes(usize),
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Single-qubit measurement basis for destructive projections.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Basis {
    X,
    Z,
}

/// A 2×2 or 4×4 unitary acting on the listed qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct GateApplication {
    matrix: Vec<Complex64>,
    targets: Vec<usize>,
}

pub type Matrix2 = [[Complex64; 2]; 2];

impl GateApplication {
    /// Row-major `2^k × 2^k` matrix on `k = targets.len() ∈ {1, 2}` qubits.
    pub fn new(matrix: Vec<Complex64>, targets: Vec<usize>) -> Result<Self, StateError> {
        let k = targets.len();
        if !(1..=2).contains(&k) {
            return Err(StateError::BadTargets(format!("{k} targets")));
        }
        if k == 2 && targets[0] == targets[1] {
            return Err(StateError::BadTargets(format!("repeated target {}", targets[0])));
        }
        let d = 1 << k;
        if matrix.len() != d * d {
            return Err(StateError::BadTargets(format!("matrix has {} entries for {k} targets", matrix.len())));
        }
        let mut dev = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                let mut s = ZERO;
                for r in 0..d {
                    s += matrix[r * d + i].conj() * matrix[r * d + j];
                }
                let target = if i == j { ONE } else { ZERO };
                dev = dev.max((s - target).norm());
            }
        }
        if dev > 1e-10 {
            return Err(StateError::NonUnitary(dev));
        }
        Ok(Self { matrix, targets })
    }

    pub fn single(m: Matrix2, q: usize) -> Result<Self, StateError> {
        Self::new(vec![m[0][0], m[0][1], m[1][0], m[1][1]], vec![q])
    }

    pub fn h(q: usize) -> Self {
        Self::single(hadamard(), q).unwrap()
    }

    pub fn x(q: usize) -> Self {
        Self::single([[ZERO, ONE], [ONE, ZERO]], q).unwrap()
    }

    pub fn z(q: usize) -> Self {
        Self::single([[ONE, ZERO], [ZERO, -ONE]], q).unwrap()
    }

    pub fn t(q: usize) -> Self {
        Self::single(t_gate(), q).unwrap()
    }

    pub fn cz(a: usize, b: usize) -> Result<Self, StateError> {
        let mut m = vec![ZERO; 16];
        for i in 0..4 {
            m[i * 4 + i] = if i == 3 { -ONE } else { ONE };
        }
        Self::new(m, vec![a, b])
    }

    pub fn cnot(control: usize, target: usize) -> Result<Self, StateError> {
        let mut m = vec![ZERO; 16];
        for i in 0..4usize {
            let j = if i & 1 == 1 { i ^ 2 } else { i };
            m[j * 4 + i] = ONE;
        }
        Self::new(m, vec![control, target])
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }
}

pub fn hadamard() -> Matrix2 {
    let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    [[s, s], [s, -s]]
}

pub fn t_gate() -> Matrix2 {
    [[ONE, ZERO], [ZERO, Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4)]]
}

/// Haar-random 2×2 unitary from Gram–Schmidt on a complex Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R) -> Matrix2 {
    let mut g = || Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng));
    let (a0, a1, b0, b1) = (g(), g(), g(), g());
    let na = (a0.norm_sqr() + a1.norm_sqr()).sqrt();
    let (u0, u1) = (a0 / na, a1 / na);
    let proj = u0.conj() * b0 + u1.conj() * b1;
    let (w0, w1) = (b0 - proj * u0, b1 - proj * u1);
    let nw = (w0.norm_sqr() + w1.norm_sqr()).sqrt();
    [[u0, w0 / nw], [u1, w1 / nw]]
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

fn guard(n: usize) -> Result<(), StateError> {
    if n > MAX_QUBITS {
        Err(StateError::TooManyQubits(n))
    } else {
        Ok(())
    }
}

/// Spreads the bits of `r` over the positions not listed in `fixed`
/// (sorted ascending) and places `bits[k]` at `fixed[k]`.
fn insert_bits(mut r: usize, fixed: &[usize], bits: &[usize]) -> usize {
    let mut out = 0usize;
    let mut pos = 0usize;
    let mut k = 0usize;
    while r != 0 || k < fixed.len() {
        if k < fixed.len() && fixed[k] == pos {
            out |= bits[k] << pos;
            k += 1;
        } else {
            out |= (r & 1) << pos;
            r >>= 1;
        }
        pos += 1;
    }
    out
}

impl StateVector {
    /// `|0…0⟩`.
    pub fn zero(n: usize) -> Result<Self, StateError> {
        guard(n)?;
        let mut amps = vec![ZERO; 1 << n];
        amps[0] = ONE;
        Ok(Self { n, amps })
    }

    /// `|+…+⟩`.
    pub fn plus(n: usize) -> Result<Self, StateError> {
        guard(n)?;
        let a = Complex64::new((0.5f64).powf(n as f64 / 2.0), 0.0);
        Ok(Self { n, amps: vec![a; 1 << n] })
    }

    /// Normalises the given amplitudes.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self, StateError> {
        let len = amps.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(StateError::BadAmplitudes(len));
        }
        let n = len.trailing_zeros() as usize;
        guard(n)?;
        let mut s = Self { n, amps };
        if s.norm_sqr() < 1e-300 {
            return Err(StateError::BadAmplitudes(len));
        }
        s.normalize();
        Ok(s)
    }

    /// Haar-random pure state from normalised complex Gaussian amplitudes.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self, StateError> {
        guard(n)?;
        let amps = (0..1usize << n)
            .map(|_| Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)))
            .collect();
        Self::from_amplitudes(amps)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalize(&mut self) {
        let s = self.norm_sqr().sqrt();
        for a in &mut self.amps {
            *a /= s;
        }
    }

    /// `self ⊗ other`, with `other`'s qubits appended after `self`'s.
    pub fn tensor(&self, other: &Self) -> Result<Self, StateError> {
        guard(self.n + other.n)?;
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for b in &other.amps {
            for a in &self.amps {
                amps.push(a * b);
            }
        }
        Ok(Self { n: self.n + other.n, amps })
    }

    /// Reorders qubits so that new qubit `i` is old qubit `order[i]`.
    pub fn permute(&self, order: &[usize]) -> Result<Self, StateError> {
        let mut seen = vec![false; self.n];
        if order.len() != self.n || order.iter().any(|&q| q >= self.n || std::mem::replace(&mut seen[q], true)) {
            return Err(StateError::BadTargets(format!("{order:?} is not a permutation of {} qubits", self.n)));
        }
        let mut amps = vec![ZERO; self.amps.len()];
        for (old, a) in self.amps.iter().enumerate() {
            let mut new = 0;
            for (i, &q) in order.iter().enumerate() {
                new |= (old >> q & 1) << i;
            }
            amps[new] = *a;
        }
        Ok(Self { n: self.n, amps })
    }

    fn check_targets(&self, targets: &[usize]) -> Result<(), StateError> {
        for (i, &t) in targets.iter().enumerate() {
            if t >= self.n {
                return Err(StateError::BadTargets(format!("qubit {t} out of range for {} qubits", self.n)));
            }
            if targets[..i].contains(&t) {
                return Err(StateError::BadTargets(format!("repeated target {t}")));
            }
        }
        Ok(())
    }

    pub fn apply(&self, gate: &GateApplication) -> Result<Self, StateError> {
        let mut s = self.clone();
        s.apply_in_place(gate)?;
        Ok(s)
    }

    pub fn apply_in_place(&mut self, gate: &GateApplication) -> Result<(), StateError> {
        self.check_targets(&gate.targets)?;
        let k = gate.targets.len();
        let d = 1usize << k;
        let mut fixed: Vec<usize> = gate.targets.clone();
        fixed.sort_unstable();
        let mut idx = vec![0usize; d];
        let mut buf = vec![ZERO; d];
        for r in 0..(1usize << (self.n - k)) {
            let base = insert_bits(r, &fixed, &vec![0; k]);
            for (local, slot) in idx.iter_mut().enumerate() {
                let mut i = base;
                for (b, &t) in gate.targets.iter().enumerate() {
                    i |= (local >> b & 1) << t;
                }
                *slot = i;
            }
            for (row, out) in buf.iter_mut().enumerate() {
                *out = (0..d).map(|col| gate.matrix[row * d + col] * self.amps[idx[col]]).sum();
            }
            for (local, &i) in idx.iter().enumerate() {
                self.amps[i] = buf[local];
            }
        }
        Ok(())
    }

    /// Multiplies by a Pauli operator including its phase.
    pub fn apply_pauli(&self, p: &PauliOperator) -> Result<Self, StateError> {
        if p.num_qubits() != self.n {
            return Err(StateError::DimensionMismatch(p.num_qubits(), self.n));
        }
        let (mut xm, mut zm, mut ym) = (0usize, 0usize, 0u32);
        for q in 0..self.n {
            if p.x_bit(q) {
                xm |= 1 << q;
            }
            if p.z_bit(q) {
                zm |= 1 << q;
            }
            if p.x_bit(q) && p.z_bit(q) {
                ym += 1;
            }
        }
        // σ(1,1) = i·X·Z, so the operator is i^(phase + #Y) · X^x · Z^z.
        let global = I.powu((p.phase() as u32 + ym) % 4);
        let mut amps = vec![ZERO; self.amps.len()];
        for (i, a) in self.amps.iter().enumerate() {
            let sign = if (i & zm).count_ones() % 2 == 1 { -ONE } else { ONE };
            amps[i ^ xm] = global * sign * a;
        }
        Ok(Self { n: self.n, amps })
    }

    /// `⟨ψ|P|ψ⟩` for a Hermitian Pauli operator.
    pub fn expectation(&self, p: &PauliOperator) -> Result<f64, StateError> {
        if !p.is_hermitian() {
            return Err(StateError::NotHermitian(p.to_string()));
        }
        let pv = self.apply_pauli(p)?;
        let v: Complex64 = self.amps.iter().zip(&pv.amps).map(|(a, b)| a.conj() * b).sum();
        Ok(v.re)
    }

    pub fn inner(&self, other: &Self) -> Result<Complex64, StateError> {
        if self.n != other.n {
            return Err(StateError::DimensionMismatch(other.n, self.n));
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// `|⟨self|other⟩|` for normalised states; 1 means equal up to global phase.
    pub fn overlap(&self, other: &Self) -> Result<f64, StateError> {
        Ok(self.inner(other)?.norm())
    }

    /// Unnormalised contraction of qubits `qs` with the bra of `local`
    /// (indexed by `Σ b_k 2^k` over `qs`).
    fn contract(&self, qs: &[usize], local: &[Complex64]) -> Result<Self, StateError> {
        self.check_targets(qs)?;
        let mut fixed: Vec<usize> = qs.to_vec();
        fixed.sort_unstable();
        let m = qs.len();
        let terms: Vec<(usize, Complex64)> = local
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != ZERO)
            .map(|(l, c)| (qs.iter().enumerate().map(|(k, &q)| (l >> k & 1) << q).sum(), c.conj()))
            .collect();
        let zeros = vec![0usize; m];
        let amps = (0..1usize << (self.n - m))
            .map(|r| {
                let base = insert_bits(r, &fixed, &zeros);
                terms.iter().map(|&(off, c)| c * self.amps[base | off]).sum()
            })
            .collect();
        Ok(Self { n: self.n - m, amps })
    }

    fn finish(mut s: Self) -> Result<(Self, f64), StateError> {
        let p = s.norm_sqr();
        if p < 1e-12 {
            return Err(StateError::ImpossibleOutcome(p));
        }
        s.normalize();
        Ok((s, p))
    }

    /// Destructive fusion measurement of `X_{q1}Z_{q2}` and `Z_{q1}X_{q2}` with
    /// eigenvalues `(-1)^u` and `(-1)^v`. Returns the post-state on the other
    /// qubits and the outcome probability.
    pub fn fusion_project(&self, q1: usize, q2: usize, outcome: (u8, u8)) -> Result<(Self, f64), StateError> {
        if q1 == q2 {
            return Err(StateError::BadTargets(format!("fusion of qubit {q1} with itself")));
        }
        Self::finish(self.contract(&[q1, q2], &fusion_basis_state(outcome.0, outcome.1))?)
    }

    /// Probabilities of the four fusion outcomes, indexed by `2u + v`.
    pub fn fusion_probabilities(&self, q1: usize, q2: usize) -> Result<[f64; 4], StateError> {
        if q1 == q2 {
            return Err(StateError::BadTargets(format!("fusion of qubit {q1} with itself")));
        }
        let mut out = [0.0; 4];
        for (k, slot) in out.iter_mut().enumerate() {
            *slot = self.contract(&[q1, q2], &fusion_basis_state((k >> 1) as u8, (k & 1) as u8))?.norm_sqr();
        }
        Ok(out)
    }

    /// Destructive single-qubit measurement with eigenvalue `(-1)^outcome`.
    pub fn measure_project(&self, q: usize, basis: Basis, outcome: u8) -> Result<(Self, f64), StateError> {
        Self::finish(self.contract(&[q], &single_basis_state(basis, outcome))?)
    }

    pub fn measure_probability(&self, q: usize, basis: Basis, outcome: u8) -> Result<f64, StateError> {
        Ok(self.contract(&[q], &single_basis_state(basis, outcome))?.norm_sqr())
    }
}

fn single_basis_state(basis: Basis, outcome: u8) -> Vec<Complex64> {
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    match (basis, outcome & 1) {
        (Basis::Z, 0) => vec![ONE, ZERO],
        (Basis::Z, _) => vec![ZERO, ONE],
        (Basis::X, 0) => vec![h, h],
        (Basis::X, _) => vec![h, -h],
    }
}

/// `|u,v⟩ = X^v_{q1} Z^u_{q1} (|+⟩|0⟩ + |−⟩|1⟩)/√2`, indexed by `b₁ + 2·b₂`.
pub fn fusion_basis_state(u: u8, v: u8) -> Vec<Complex64> {
    let half = Complex64::new(0.5, 0.0);
    let mut s = vec![half, half, half, -half];
    if u & 1 == 1 {
        s[1] = -s[1];
        s[3] = -s[3];
    }
    if v & 1 == 1 {
        s.swap(0, 1);
        s.swap(2, 3);
    }
    s
}
