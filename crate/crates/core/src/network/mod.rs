//! Fusion networks: resource states, two-qubit fusions and single-qubit
//! measurements over a common qubit register.
//!
//! Every qubit either belongs to exactly one resource state or is an input
//! port (an externally supplied wire). Each qubit takes part in at most one
//! fusion or measurement. Fusion `k` on `(a, b)` contributes the observables
//! `2k = X_a Z_b` and `2k + 1 = Z_a X_b`; measurement `i` contributes
//! observable `2F + i` where `F` is the number of fusions.

mod checks;
mod circuit;
mod foliated;
mod layered;
mod sim;
mod syndrome;
mod text;

pub use checks::{compute_check_group, Check, CheckGroup};
pub use circuit::{cyclize, transpile, CircuitIR, GateTag, Instruction};
pub use foliated::{
    absorb_fusions, build_foliated_network, build_foliated_network_with, CheckType, FoliationOptions, NetworkModel,
    SurfaceCode, SurfaceCheck, TimeBoundary,
};
pub use layered::build_raussendorf_equivalent;
pub use sim::{simulate_network, SimulationRun};
pub use syndrome::{extract_syndrome_graph, SyndromeEdge, SyndromeGraph};

use thiserror::Error;

use crate::pauli::{Pauli, PauliError, PauliOperator, StabilizerGroup};
use crate::statevec::{Basis, Matrix2, StateError};

pub type QubitId = usize;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NetworkError {
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error(transparent)]
    State(#[from] StateError),
    #[error("invalid network: {0}")]
    Invalid(String),
    #[error("invalid circuit: {0}")]
    Circuit(String),
    #[error("no init/measure pair matching the cyclization pattern")]
    PatternNotFound,
    #[error("network contains decorated (non-Clifford) resource states")]
    NonCliffordResource,
    #[error("observable {observable} appears in {count} checks")]
    NotGraphRepresentable { observable: usize, count: usize },
    #[error("invalid parameters: {0}")]
    Parameters(String),
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Non-Clifford single-qubit unitary applied to one qubit of an otherwise
/// stabilizer resource state.
#[derive(Debug, Clone, PartialEq)]
pub struct Decoration {
    pub label: String,
    pub unitary: Matrix2,
    /// Position within the resource state's qubit list.
    pub qubit: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResourceState {
    pub qubits: Vec<QubitId>,
    /// Stabilizer group on the local register `0..qubits.len()`, before any
    /// decoration is applied.
    pub group: StabilizerGroup,
    pub decoration: Option<Decoration>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fusion {
    pub a: QubitId,
    pub b: QubitId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Measurement {
    pub qubit: QubitId,
    pub basis: Basis,
}

/// Circuit-level history of one logical wire, kept so that later passes
/// (cyclization, simulation) can find where a wire starts and ends.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WireLine {
    pub start: QubitId,
    pub end: QubitId,
    pub init: Option<Basis>,
    pub measured: Option<Basis>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FusionNetwork {
    num_qubits: usize,
    resources: Vec<ResourceState>,
    fusions: Vec<Fusion>,
    measurements: Vec<Measurement>,
    inputs: Vec<QubitId>,
    lines: Vec<WireLine>,
}

/// Owner of a qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    Resource(usize, usize),
    Input(usize),
}

impl FusionNetwork {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a resource state on fresh qubits and returns their ids.
    pub fn add_resource(&mut self, group: StabilizerGroup, decoration: Option<Decoration>) -> Vec<QubitId> {
        let k = group.num_qubits();
        let qubits: Vec<QubitId> = (self.num_qubits..self.num_qubits + k).collect();
        self.num_qubits += k;
        self.resources.push(ResourceState { qubits: qubits.clone(), group, decoration });
        qubits
    }

    pub fn add_input(&mut self) -> QubitId {
        let q = self.num_qubits;
        self.num_qubits += 1;
        self.inputs.push(q);
        q
    }

    pub fn fuse(&mut self, a: QubitId, b: QubitId) {
        self.fusions.push(Fusion { a, b });
    }

    pub fn measure(&mut self, qubit: QubitId, basis: Basis) {
        self.measurements.push(Measurement { qubit, basis });
    }

    pub fn push_line(&mut self, line: WireLine) {
        self.lines.push(line);
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    /// Qubits held by resource states (input ports excluded).
    pub fn num_resource_qubits(&self) -> usize {
        self.resources.iter().map(|r| r.qubits.len()).sum()
    }

    pub fn resources(&self) -> &[ResourceState] {
        &self.resources
    }

    pub fn fusions(&self) -> &[Fusion] {
        &self.fusions
    }

    pub fn measurements(&self) -> &[Measurement] {
        &self.measurements
    }

    pub fn inputs(&self) -> &[QubitId] {
        &self.inputs
    }

    pub fn lines(&self) -> &[WireLine] {
        &self.lines
    }

    pub fn num_observables(&self) -> usize {
        2 * self.fusions.len() + self.measurements.len()
    }

    pub fn is_clifford(&self) -> bool {
        self.resources.iter().all(|r| r.decoration.is_none())
    }

    /// Owner of every qubit, or an error if ownership is not a partition.
    pub fn slots(&self) -> Result<Vec<Slot>, NetworkError> {
        let mut slot: Vec<Option<Slot>> = vec![None; self.num_qubits];
        let mut claim = |q: QubitId, s: Slot| -> Result<(), NetworkError> {
            match slot.get_mut(q) {
                None => Err(NetworkError::Invalid(format!("qubit {q} out of range"))),
                Some(Some(_)) => Err(NetworkError::Invalid(format!("qubit {q} has two owners"))),
                Some(entry) => {
                    *entry = Some(s);
                    Ok(())
                }
            }
        };
        for (r, res) in self.resources.iter().enumerate() {
            if res.group.num_qubits() != res.qubits.len() {
                return Err(NetworkError::Invalid(format!("resource {r} group size mismatch")));
            }
            for (i, &q) in res.qubits.iter().enumerate() {
                claim(q, Slot::Resource(r, i))?;
            }
        }
        for (i, &q) in self.inputs.iter().enumerate() {
            claim(q, Slot::Input(i))?;
        }
        slot.into_iter()
            .enumerate()
            .map(|(q, s)| s.ok_or_else(|| NetworkError::Invalid(format!("qubit {q} has no owner"))))
            .collect()
    }

    pub fn validate(&self) -> Result<(), NetworkError> {
        self.slots()?;
        let mut used = vec![false; self.num_qubits];
        let mut touch = |q: QubitId| -> Result<(), NetworkError> {
            if q >= used.len() {
                return Err(NetworkError::Invalid(format!("qubit {q} out of range")));
            }
            if std::mem::replace(&mut used[q], true) {
                return Err(NetworkError::Invalid(format!("qubit {q} is consumed twice")));
            }
            Ok(())
        };
        for f in &self.fusions {
            if f.a == f.b {
                return Err(NetworkError::Invalid(format!("fusion of qubit {} with itself", f.a)));
            }
            touch(f.a)?;
            touch(f.b)?;
        }
        for m in &self.measurements {
            touch(m.qubit)?;
        }
        for res in &self.resources {
            if let Some(d) = &res.decoration {
                if d.qubit >= res.qubits.len() {
                    return Err(NetworkError::Invalid("decoration outside its resource state".into()));
                }
            }
        }
        Ok(())
    }

    /// Qubits not consumed by any fusion or measurement.
    pub fn open_qubits(&self) -> Vec<QubitId> {
        let mut used = vec![false; self.num_qubits];
        for f in &self.fusions {
            used[f.a] = true;
            used[f.b] = true;
        }
        for m in &self.measurements {
            used[m.qubit] = true;
        }
        (0..self.num_qubits).filter(|&q| !used[q]).collect()
    }

    /// The qubits an observable acts on, with their single-qubit factors.
    pub fn observable_factors(&self, j: usize) -> Vec<(QubitId, Pauli)> {
        let nf = 2 * self.fusions.len();
        if j < nf {
            let f = self.fusions[j / 2];
            if j.is_multiple_of(2) {
                vec![(f.a, Pauli::X), (f.b, Pauli::Z)]
            } else {
                vec![(f.a, Pauli::Z), (f.b, Pauli::X)]
            }
        } else {
            let m = self.measurements[j - nf];
            vec![(m.qubit, if m.basis == Basis::X { Pauli::X } else { Pauli::Z })]
        }
    }

    pub fn observable(&self, j: usize) -> PauliOperator {
        PauliOperator::from_sparse(self.num_qubits, &self.observable_factors(j)).expect("observable in range")
    }

    pub fn observables(&self) -> Vec<PauliOperator> {
        (0..self.num_observables()).map(|j| self.observable(j)).collect()
    }

    /// Product of all undecorated resource groups on the global register.
    pub fn resource_group(&self) -> Result<StabilizerGroup, NetworkError> {
        let parts: Vec<StabilizerGroup> = self
            .resources
            .iter()
            .filter(|r| r.decoration.is_none())
            .map(|r| r.group.embed(self.num_qubits, &r.qubits))
            .collect();
        Ok(StabilizerGroup::direct_product(self.num_qubits, &parts)?)
    }

    /// Group generated by all fusion and measurement observables.
    pub fn fusion_group(&self) -> Result<StabilizerGroup, NetworkError> {
        Ok(StabilizerGroup::new(self.num_qubits, self.observables())?)
    }

    /// Drops the listed qubits (which must be unowned and unused) and
    /// renumbers the rest in order.
    pub(crate) fn compact(mut self, removed: &[bool]) -> Self {
        let mut map = vec![usize::MAX; self.num_qubits];
        let mut next = 0;
        for q in 0..self.num_qubits {
            if !removed.get(q).copied().unwrap_or(false) {
                map[q] = next;
                next += 1;
            }
        }
        self.num_qubits = next;
        for r in &mut self.resources {
            for q in &mut r.qubits {
                *q = map[*q];
            }
        }
        for f in &mut self.fusions {
            f.a = map[f.a];
            f.b = map[f.b];
        }
        for m in &mut self.measurements {
            m.qubit = map[m.qubit];
        }
        for q in &mut self.inputs {
            *q = map[*q];
        }
        self.lines.retain(|l| map[l.start] != usize::MAX && map[l.end] != usize::MAX);
        for l in &mut self.lines {
            l.start = map[l.start];
            l.end = map[l.end];
        }
        self
    }

    pub(crate) fn parts_mut(
        &mut self,
    ) -> (&mut Vec<ResourceState>, &mut Vec<Fusion>, &mut Vec<Measurement>, &mut Vec<QubitId>, &mut Vec<WireLine>) {
        (&mut self.resources, &mut self.fusions, &mut self.measurements, &mut self.inputs, &mut self.lines)
    }
}
