//! Noiseless state-vector execution of small fusion networks.

use rand::Rng;

use super::{FusionNetwork, NetworkError, Slot};
use crate::statevec::{GateApplication, StateVector};

/// Outcome of one sampled run.
#[derive(Debug, Clone)]
pub struct SimulationRun {
    /// Outcome bit of every observable (`1` means eigenvalue `-1`).
    pub outcomes: Vec<u8>,
    /// Joint state of all qubits never fused or measured.
    pub state: StateVector,
    /// Label of each qubit of `state`: a network qubit id, or
    /// `num_qubits + k` for the `k`-th external reference qubit.
    pub labels: Vec<usize>,
}

fn resource_vector(group: &crate::pauli::StabilizerGroup) -> Result<StateVector, NetworkError> {
    let k = group.num_qubits();
    if group.rank() != k {
        return Err(NetworkError::Invalid("simulation needs pure resource states".into()));
    }
    for basis_index in 0..1usize << k {
        let mut amps = vec![num_complex::Complex64::new(0.0, 0.0); 1 << k];
        amps[basis_index] = 1.0.into();
        let mut s = StateVector::from_amplitudes(amps)?;
        let mut alive = true;
        for g in group.generators() {
            let gs = s.apply_pauli(g)?;
            let sum: Vec<_> = s.amplitudes().iter().zip(gs.amplitudes()).map(|(a, b)| (a + b) * 0.5).collect();
            if sum.iter().map(|a| a.norm_sqr()).sum::<f64>() < 1e-12 {
                alive = false;
                break;
            }
            s = StateVector::from_amplitudes(sum)?;
        }
        if alive {
            return Ok(s);
        }
    }
    Err(NetworkError::Invalid("stabilizer group has no +1 eigenstate".into()))
}

/// Runs the network on `initial`, whose qubits carry `initial_labels` (every
/// input port must appear; other labels are external references). Resource
/// states are added in network order, and every fusion or measurement is
/// performed, with a Born-sampled outcome, as soon as its qubits are present.
pub fn simulate_network<R: Rng + ?Sized>(
    network: &FusionNetwork,
    initial: StateVector,
    initial_labels: Vec<usize>,
    rng: &mut R,
) -> Result<SimulationRun, NetworkError> {
    network.validate()?;
    let n = network.num_qubits();
    let slots = network.slots()?;
    if initial.num_qubits() != initial_labels.len() {
        return Err(NetworkError::Invalid("one label per initial qubit is required".into()));
    }
    for &q in network.inputs() {
        if !initial_labels.contains(&q) {
            return Err(NetworkError::Invalid(format!("input port {q} missing from the initial state")));
        }
    }
    if initial_labels.iter().any(|&l| l < n && !matches!(slots[l], Slot::Input(_))) {
        return Err(NetworkError::Invalid("initial labels may only name input ports".into()));
    }
    let mut state = initial;
    let mut labels = initial_labels;
    let nf = network.fusions().len();
    let mut outcomes = vec![0u8; network.num_observables()];
    let mut done_f = vec![false; nf];
    let mut done_m = vec![false; network.measurements().len()];
    for res in network.resources() {
        let mut v = resource_vector(&res.group)?;
        if let Some(d) = &res.decoration {
            v.apply_in_place(&GateApplication::single(d.unitary, d.qubit)?)?;
        }
        state = state.tensor(&v)?;
        labels.extend(&res.qubits);
        loop {
            let pos = |q: usize, labels: &[usize]| labels.iter().position(|&l| l == q);
            let mut acted = false;
            for (k, f) in network.fusions().iter().enumerate() {
                if done_f[k] {
                    continue;
                }
                let (Some(ia), Some(ib)) = (pos(f.a, &labels), pos(f.b, &labels)) else { continue };
                let probs = state.fusion_probabilities(ia, ib)?;
                let idx = sample(&probs, rng);
                let (u, v) = ((idx >> 1) as u8, (idx & 1) as u8);
                state = state.fusion_project(ia, ib, (u, v))?.0;
                labels.retain(|&l| l != f.a && l != f.b);
                outcomes[2 * k] = u;
                outcomes[2 * k + 1] = v;
                done_f[k] = true;
                acted = true;
            }
            for (k, m) in network.measurements().iter().enumerate() {
                if done_m[k] {
                    continue;
                }
                let Some(iq) = pos(m.qubit, &labels) else { continue };
                let p0 = state.measure_probability(iq, m.basis, 0)?;
                let bit = u8::from(rng.random::<f64>() >= p0);
                state = state.measure_project(iq, m.basis, bit)?.0;
                labels.remove(iq);
                outcomes[2 * nf + k] = bit;
                done_m[k] = true;
                acted = true;
            }
            if !acted {
                break;
            }
        }
    }
    if done_f.iter().any(|d| !d) || done_m.iter().any(|d| !d) {
        return Err(NetworkError::Invalid("some fusions or measurements never became ready".into()));
    }
    Ok(SimulationRun { outcomes, state, labels })
}

fn sample<R: Rng + ?Sized>(probs: &[f64; 4], rng: &mut R) -> usize {
    let total: f64 = probs.iter().sum();
    let mut r = rng.random::<f64>() * total;
    for (i, &p) in probs.iter().enumerate() {
        if r < p {
            return i;
        }
        r -= p;
    }
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(3)
}
