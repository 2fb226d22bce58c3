//! Circuit intermediate representation and its gate-by-gate translation into
//! a fusion network.

use super::{Decoration, FusionNetwork, NetworkError, QubitId, WireLine};
use crate::pauli::{graph_state_group, PauliOperator, StabilizerGroup};
use crate::statevec::{t_gate, Basis, Matrix2};

#[derive(Debug, Clone, PartialEq)]
pub enum GateTag {
    H,
    T,
    Matrix { label: String, unitary: Matrix2 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Instruction {
    Init { qubit: usize, basis: Basis },
    Gate { qubit: usize, gate: GateTag },
    Cnot { control: usize, target: usize },
    Measure { qubit: usize, basis: Basis },
}

/// A circuit over `num_qubits` wires. A wire whose first instruction is not
/// `Init` is an input of the circuit.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CircuitIR {
    pub num_qubits: usize,
    pub instructions: Vec<Instruction>,
}

impl CircuitIR {
    pub fn new(num_qubits: usize) -> Self {
        Self { num_qubits, instructions: Vec::new() }
    }

    pub fn init(&mut self, qubit: usize, basis: Basis) -> &mut Self {
        self.instructions.push(Instruction::Init { qubit, basis });
        self
    }

    pub fn gate(&mut self, qubit: usize, gate: GateTag) -> &mut Self {
        self.instructions.push(Instruction::Gate { qubit, gate });
        self
    }

    pub fn h(&mut self, qubit: usize) -> &mut Self {
        self.gate(qubit, GateTag::H)
    }

    pub fn t(&mut self, qubit: usize) -> &mut Self {
        self.gate(qubit, GateTag::T)
    }

    pub fn cnot(&mut self, control: usize, target: usize) -> &mut Self {
        self.instructions.push(Instruction::Cnot { control, target });
        self
    }

    pub fn measure(&mut self, qubit: usize, basis: Basis) -> &mut Self {
        self.instructions.push(Instruction::Measure { qubit, basis });
        self
    }

    /// Parity measurement of `Z^{⊗w}` (for `basis = Z`) or `X^{⊗w}` on data
    /// wires `0..w` through one ancilla wire `w`.
    pub fn parity_check(basis: Basis, w: usize) -> Self {
        let mut c = Self::new(w + 1);
        c.init(w, basis);
        for d in 0..w {
            match basis {
                Basis::Z => c.cnot(d, w),
                Basis::X => c.cnot(w, d),
            };
        }
        c.measure(w, basis);
        c
    }
}

#[derive(Debug, Clone, Copy)]
enum Wire {
    Unborn,
    Live { current: QubitId, start: QubitId, init: Option<Basis> },
    Done,
}

/// Incremental translation state; exposed within the crate so that builders
/// can see which fusions each instruction produced.
pub(crate) struct Transpiler {
    pub net: FusionNetwork,
    wires: Vec<Wire>,
}

impl Transpiler {
    pub fn new(num_wires: usize) -> Self {
        Self { net: FusionNetwork::new(), wires: vec![Wire::Unborn; num_wires] }
    }

    fn live(&mut self, w: usize) -> Result<QubitId, NetworkError> {
        match self.wires.get(w).copied() {
            None => Err(NetworkError::Circuit(format!("wire {w} out of range"))),
            Some(Wire::Done) => Err(NetworkError::Circuit(format!("wire {w} used after measurement"))),
            Some(Wire::Live { current, .. }) => Ok(current),
            Some(Wire::Unborn) => {
                let q = self.net.add_input();
                self.wires[w] = Wire::Live { current: q, start: q, init: None };
                Ok(q)
            }
        }
    }

    fn advance(&mut self, w: usize, q: QubitId) {
        if let Wire::Live { current, .. } = &mut self.wires[w] {
            *current = q;
        }
    }

    /// Applies one instruction and returns the indices of the fusions it added.
    pub fn apply(&mut self, ins: &Instruction) -> Result<Vec<usize>, NetworkError> {
        let first = self.net.fusions().len();
        match ins {
            Instruction::Init { qubit, basis } => {
                if matches!(self.wires.get(*qubit), Some(Wire::Live { .. })) {
                    return Err(NetworkError::Circuit(format!("wire {qubit} initialised while live")));
                }
                if *qubit >= self.wires.len() {
                    return Err(NetworkError::Circuit(format!("wire {qubit} out of range")));
                }
                let g = match basis {
                    Basis::Z => PauliOperator::z(1, 0),
                    Basis::X => PauliOperator::x(1, 0),
                };
                let q = self.net.add_resource(StabilizerGroup::new(1, vec![g])?, None)[0];
                self.wires[*qubit] = Wire::Live { current: q, start: q, init: Some(*basis) };
            }
            Instruction::Gate { qubit, gate } => {
                let input = self.live(*qubit)?;
                let bell = graph_state_group(2, &[(0, 1)])?;
                let (group, decoration) = match gate {
                    GateTag::H => (hadamard_conjugate(&bell, 1)?, None),
                    GateTag::T => {
                        (bell, Some(Decoration { label: "T".into(), unitary: t_gate(), qubit: 1 }))
                    }
                    GateTag::Matrix { label, unitary } => {
                        (bell, Some(Decoration { label: label.clone(), unitary: *unitary, qubit: 1 }))
                    }
                };
                let qs = self.net.add_resource(group, decoration);
                self.net.fuse(qs[0], input);
                self.advance(*qubit, qs[1]);
            }
            Instruction::Cnot { control, target } => {
                if control == target {
                    return Err(NetworkError::Circuit(format!("CNOT on a single wire {control}")));
                }
                let c = self.live(*control)?;
                let t = self.live(*target)?;
                let qs = self.net.add_resource(graph_state_group(4, &[(0, 1), (1, 2), (2, 3)])?, None);
                self.net.fuse(qs[0], c);
                self.net.fuse(qs[2], t);
                self.advance(*control, qs[1]);
                self.advance(*target, qs[3]);
            }
            Instruction::Measure { qubit, basis } => {
                let q = self.live(*qubit)?;
                self.net.measure(q, *basis);
                if let Wire::Live { start, init, .. } = self.wires[*qubit] {
                    self.net.push_line(WireLine { start, end: q, init, measured: Some(*basis) });
                }
                self.wires[*qubit] = Wire::Done;
            }
        }
        Ok((first..self.net.fusions().len()).collect())
    }

    pub fn finish(mut self) -> Result<FusionNetwork, NetworkError> {
        for w in &self.wires {
            if let Wire::Live { current, start, init } = *w {
                self.net.push_line(WireLine { start, end: current, init, measured: None });
            }
        }
        self.net.validate()?;
        Ok(self.net)
    }
}

/// Conjugates every generator by a Hadamard on local qubit `q`.
fn hadamard_conjugate(g: &StabilizerGroup, q: usize) -> Result<StabilizerGroup, NetworkError> {
    let gens = g
        .generators()
        .iter()
        .map(|p| {
            let (x, z) = (p.x_bit(q), p.z_bit(q));
            let mut out = p.clone();
            out.set_bits(q, z, x);
            if x && z {
                out.negated()
            } else {
                out
            }
        })
        .collect();
    Ok(StabilizerGroup::new(g.num_qubits(), gens)?)
}

/// Replaces every gate by its resource state and fusions: `H`, `T` or a
/// custom single-qubit gate becomes a two-qubit cluster (decorated for
/// non-Clifford gates), CNOT the four-qubit linear cluster
/// `c_a – c_out – t_a – t_out`, and `Init`/`Measure` a one-qubit resource
/// state or a single-qubit measurement. Fusions are oriented as
/// `(resource qubit, incoming wire qubit)`.
pub fn transpile(circuit: &CircuitIR) -> Result<FusionNetwork, NetworkError> {
    let mut t = Transpiler::new(circuit.num_qubits);
    for ins in &circuit.instructions {
        t.apply(ins)?;
    }
    t.finish()
}

/// Removes the first wire that is initialised and measured in the same basis
/// (a `|0⟩ … Z` or `|+⟩ … X` ancilla), fusing its last qubit with the qubit
/// its initial state was fused to.
pub fn cyclize(network: &FusionNetwork) -> Result<FusionNetwork, NetworkError> {
    let mut net = network.clone();
    let slots = net.slots()?;
    let found = net.lines().iter().enumerate().find_map(|(li, line)| {
        let (Some(b0), Some(b1)) = (line.init, line.measured) else { return None };
        if b0 != b1 {
            return None;
        }
        let super::Slot::Resource(r, _) = slots[line.start] else { return None };
        let res = &net.resources()[r];
        if res.qubits.len() != 1 || res.decoration.is_some() {
            return None;
        }
        let fi = net.fusions().iter().position(|f| f.a == line.start || f.b == line.start)?;
        let mi = net.measurements().iter().position(|m| m.qubit == line.end)?;
        Some((li, r, fi, mi))
    });
    let (li, r, fi, mi) = found.ok_or(NetworkError::PatternNotFound)?;
    let start = net.lines()[li].start;
    let end = net.lines()[li].end;
    let mut removed = vec![false; net.num_qubits()];
    removed[start] = true;
    {
        let (resources, fusions, measurements, _, lines) = net.parts_mut();
        let f = fusions[fi];
        let partner = if f.a == start { f.b } else { f.a };
        fusions[fi] = super::Fusion { a: end, b: partner };
        measurements.remove(mi);
        resources.remove(r);
        lines.remove(li);
    }
    let net = net.compact(&removed);
    net.validate()?;
    Ok(net)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plus_h_measure() {
        let mut c = CircuitIR::new(1);
        c.init(0, Basis::X).h(0).measure(0, Basis::X);
        let net = transpile(&c).unwrap();
        assert_eq!(net.resources().len(), 2);
        assert_eq!(net.resources().iter().filter(|r| r.qubits.len() == 2).count(), 1);
        assert_eq!(net.fusions().len(), 1);
        assert_eq!(net.measurements().len(), 1);
        assert_eq!(net.measurements()[0].basis, Basis::X);
        let g: Vec<String> = net.resources()[1].group.generators().iter().map(|p| p.to_string()).collect();
        assert_eq!(g, ["+XX", "+ZZ"]);
    }

    #[test]
    fn z_check_counts() {
        let net = transpile(&CircuitIR::parity_check(Basis::Z, 4)).unwrap();
        assert_eq!(net.resources().iter().filter(|r| r.qubits.len() == 4).count(), 4);
        assert_eq!(net.fusions().len(), 8);
        assert_eq!(net.measurements().len(), 1);
        assert_eq!(net.inputs().len(), 4);
        let cyc = cyclize(&net).unwrap();
        assert_eq!(cyc.num_resource_qubits(), 16);
        assert_eq!(cyc.fusions().len(), 8);
        assert!(cyc.measurements().is_empty());
        assert_eq!(cyclize(&cyc), Err(NetworkError::PatternNotFound));
    }

    #[test]
    fn t_gate_is_decorated() {
        let mut c = CircuitIR::new(1);
        c.t(0);
        let net = transpile(&c).unwrap();
        assert!(!net.is_clifford());
        assert_eq!(net.inputs().len(), 1);
    }

    #[test]
    fn measured_wire_cannot_be_reused() {
        let mut c = CircuitIR::new(1);
        c.measure(0, Basis::Z).h(0);
        assert!(matches!(transpile(&c), Err(NetworkError::Circuit(_))));
    }
}
