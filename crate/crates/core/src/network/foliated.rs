//! Foliated surface-code networks: repeated rounds of four-qubit parity
//! checks, each check compiled to four CNOT clusters and cyclized.

use std::collections::BTreeMap;

use super::circuit::{cyclize, Instruction, Transpiler};
use super::{FusionNetwork, NetworkError, ResourceState, Slot};
use crate::pauli::{PauliOperator, StabilizerGroup};
use crate::statevec::Basis;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CheckType {
    X,
    Z,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurfaceCheck {
    pub kind: CheckType,
    /// Data qubits in circular order around the check.
    pub data: [usize; 4],
    /// Membership of the first class of the check lattice's bipartition.
    pub first_class: bool,
}

/// Weight-four parity checks of a toric surface code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurfaceCode {
    pub num_data: usize,
    pub checks: Vec<SurfaceCheck>,
}

fn even_dims(lx: usize, ly: usize) -> Result<(), NetworkError> {
    if lx < 2 || ly < 2 || lx % 2 == 1 || ly % 2 == 1 {
        return Err(NetworkError::Parameters(format!("dimensions {lx}x{ly} must be even and at least 2")));
    }
    Ok(())
}

impl SurfaceCode {
    /// Data qubits on the edges of an `lx × ly` square torus, `X` checks on
    /// vertices and `Z` checks on plaquettes. Each check lattice is split into
    /// its two checkerboard classes.
    pub fn square(lx: usize, ly: usize) -> Result<Self, NetworkError> {
        even_dims(lx, ly)?;
        let h = |x: usize, y: usize| 2 * ((x % lx) + lx * (y % ly));
        let v = |x: usize, y: usize| 2 * ((x % lx) + lx * (y % ly)) + 1;
        let mut checks = Vec::new();
        for y in 0..ly {
            for x in 0..lx {
                checks.push(SurfaceCheck {
                    kind: CheckType::X,
                    data: [h(x, y), v(x, y), h(x + lx - 1, y), v(x, y + ly - 1)],
                    first_class: (x + y) % 2 == 0,
                });
            }
        }
        for y in 0..ly {
            for x in 0..lx {
                checks.push(SurfaceCheck {
                    kind: CheckType::Z,
                    data: [h(x, y), v(x + 1, y), h(x, y + 1), v(x, y)],
                    first_class: (x + y) % 2 == 0,
                });
            }
        }
        Ok(Self { num_data: 2 * lx * ly, checks })
    }

    /// Data qubits on the sites of an `lx × ly` torus with a check on every
    /// plaquette, `X` and `Z` alternating like a checkerboard. Each type is
    /// split into classes by the parity of the plaquette column.
    pub fn rotated(lx: usize, ly: usize) -> Result<Self, NetworkError> {
        even_dims(lx, ly)?;
        let site = |i: usize, j: usize| (i % lx) + lx * (j % ly);
        let mut checks = Vec::new();
        for kind in [CheckType::X, CheckType::Z] {
            for j in 0..ly {
                for i in 0..lx {
                    let is_x = (i + j) % 2 == 0;
                    if is_x != (kind == CheckType::X) {
                        continue;
                    }
                    checks.push(SurfaceCheck {
                        kind,
                        data: [site(i, j), site(i + 1, j), site(i + 1, j + 1), site(i, j + 1)],
                        first_class: i % 2 == 0,
                    });
                }
            }
        }
        Ok(Self { num_data: lx * ly, checks })
    }

    /// Check indices in the order they are executed within one round:
    /// first-class `X`, second-class `X`, second-class `Z`, first-class `Z`.
    pub fn schedule(&self) -> Vec<usize> {
        let mut order = Vec::with_capacity(self.checks.len());
        for (kind, first) in [(CheckType::X, true), (CheckType::X, false), (CheckType::Z, false), (CheckType::Z, true)] {
            order.extend(
                self.checks.iter().enumerate().filter(|(_, c)| c.kind == kind && c.first_class == first).map(|(i, _)| i),
            );
        }
        order
    }

    pub fn validate(&self) -> Result<(), NetworkError> {
        let op = |c: &SurfaceCheck| {
            let mut p = PauliOperator::identity(self.num_data);
            for &d in &c.data {
                let f = match c.kind {
                    CheckType::X => PauliOperator::x(self.num_data, d),
                    CheckType::Z => PauliOperator::z(self.num_data, d),
                };
                p = p.multiply(&f).expect("same register");
            }
            p
        };
        for (i, a) in self.checks.iter().enumerate() {
            let mut seen = a.data;
            seen.sort_unstable();
            if seen.windows(2).any(|w| w[0] == w[1]) || seen[3] >= self.num_data {
                return Err(NetworkError::Parameters(format!("check {i} does not act on four distinct data qubits")));
            }
            for b in &self.checks[i + 1..] {
                if !op(a).commutes(&op(b))? {
                    return Err(NetworkError::Parameters("surface code checks do not commute".into()));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NetworkModel {
    /// Every CNOT cluster is its own resource state.
    FourQubit,
    /// The clusters along each data line within one round are merged into a
    /// single ten-qubit resource state.
    TenQubit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TimeBoundary {
    /// Data wires enter as input ports and leave as open qubits.
    Open,
    /// The last round's data outputs are fused into the first round's inputs.
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FoliationOptions {
    pub model: NetworkModel,
    pub rounds: usize,
    pub time: TimeBoundary,
}

/// Square-layout foliated network with periodic time.
pub fn build_foliated_network(
    lx: usize,
    ly: usize,
    rounds: usize,
    model: NetworkModel,
) -> Result<FusionNetwork, NetworkError> {
    build_foliated_network_with(&SurfaceCode::square(lx, ly)?, FoliationOptions { model, rounds, time: TimeBoundary::Periodic })
}

pub fn build_foliated_network_with(code: &SurfaceCode, opts: FoliationOptions) -> Result<FusionNetwork, NetworkError> {
    if opts.rounds == 0 {
        return Err(NetworkError::Parameters("at least one round is required".into()));
    }
    code.validate()?;
    let ancilla = code.num_data;
    let mut t = Transpiler::new(code.num_data + 1);
    let mut absorb = Vec::new();
    let schedule = code.schedule();
    for _ in 0..opts.rounds {
        let mut touched = vec![false; code.num_data];
        for &ci in &schedule {
            let check = &code.checks[ci];
            let basis = match check.kind {
                CheckType::X => Basis::X,
                CheckType::Z => Basis::Z,
            };
            t.apply(&Instruction::Init { qubit: ancilla, basis })?;
            for &d in &check.data {
                let (control, target) = match check.kind {
                    CheckType::Z => (d, ancilla),
                    CheckType::X => (ancilla, d),
                };
                let made = t.apply(&Instruction::Cnot { control, target })?;
                let data_fusion = if check.kind == CheckType::Z { made[0] } else { made[1] };
                if std::mem::replace(&mut touched[d], true) {
                    absorb.push(data_fusion);
                }
            }
            t.apply(&Instruction::Measure { qubit: ancilla, basis })?;
        }
    }
    let mut net = t.finish()?;
    if opts.model == NetworkModel::TenQubit {
        net = absorb_fusions(&net, &absorb)?;
    }
    loop {
        match cyclize(&net) {
            Ok(next) => net = next,
            Err(NetworkError::PatternNotFound) => break,
            Err(e) => return Err(e),
        }
    }
    if opts.time == TimeBoundary::Periodic {
        net = close_time(net)?;
    }
    Ok(net)
}

/// Fuses every open wire end into the qubit its input port was fused with,
/// removing the port.
fn close_time(mut net: FusionNetwork) -> Result<FusionNetwork, NetworkError> {
    let inputs: Vec<usize> = net.inputs().to_vec();
    let mut removed = vec![false; net.num_qubits()];
    let (_, fusions, _, ports, lines) = net.parts_mut();
    for line in lines.iter().filter(|l| l.measured.is_none() && inputs.contains(&l.start)) {
        let Some(f) = fusions.iter_mut().find(|f| f.a == line.start || f.b == line.start) else { continue };
        if f.a == line.start {
            f.a = line.end;
        } else {
            f.b = line.end;
        }
        removed[line.start] = true;
    }
    ports.retain(|q| !removed[*q]);
    lines.retain(|l| !removed[l.start]);
    let net = net.compact(&removed);
    net.validate()?;
    Ok(net)
}

/// Measures the listed fusions inside merged resource states with the `+1`
/// outcome on both observables, so that every group of resource states
/// connected by them becomes one resource state on the remaining qubits.
pub fn absorb_fusions(network: &FusionNetwork, fusion_ids: &[usize]) -> Result<FusionNetwork, NetworkError> {
    let slots = network.slots()?;
    let nres = network.resources().len();
    let mut parent: Vec<usize> = (0..nres).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut chosen = vec![false; network.fusions().len()];
    for &fi in fusion_ids {
        let f = *network
            .fusions()
            .get(fi)
            .ok_or_else(|| NetworkError::Invalid(format!("fusion {fi} out of range")))?;
        let (Slot::Resource(ra, _), Slot::Resource(rb, _)) = (slots[f.a], slots[f.b]) else {
            return Err(NetworkError::Invalid(format!("fusion {fi} touches an input port")));
        };
        if network.resources()[ra].decoration.is_some() || network.resources()[rb].decoration.is_some() {
            return Err(NetworkError::NonCliffordResource);
        }
        chosen[fi] = true;
        let (x, y) = (find(&mut parent, ra), find(&mut parent, rb));
        parent[x] = y;
    }
    let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for r in 0..nres {
        let root = find(&mut parent, r);
        classes.entry(root).or_default().push(r);
    }
    let mut class_fusions: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (fi, f) in network.fusions().iter().enumerate() {
        if chosen[fi] {
            let Slot::Resource(r, _) = slots[f.a] else { unreachable!() };
            class_fusions.entry(find(&mut parent, r)).or_default().push(fi);
        }
    }
    let mut removed = vec![false; network.num_qubits()];
    let mut resources: Vec<ResourceState> = Vec::new();
    for r in 0..nres {
        let root = find(&mut parent, r);
        let members = &classes[&root];
        if members[0] != r {
            continue;
        }
        if members.len() == 1 && !class_fusions.contains_key(&root) {
            resources.push(network.resources()[r].clone());
            continue;
        }
        let qubits: Vec<usize> = members.iter().flat_map(|&m| network.resources()[m].qubits.iter().copied()).collect();
        let k = qubits.len();
        let local = |q: usize| qubits.iter().position(|&x| x == q).expect("qubit in class");
        let mut gens: Vec<PauliOperator> = Vec::new();
        let mut offset = 0;
        for &m in members {
            let res = &network.resources()[m];
            let positions: Vec<usize> = (offset..offset + res.qubits.len()).collect();
            gens.extend(res.group.generators().iter().map(|g| g.embed(k, &positions)));
            offset += res.qubits.len();
        }
        let mut gone = vec![false; k];
        for &fi in &class_fusions[&root] {
            let f = network.fusions()[fi];
            let (a, b) = (local(f.a), local(f.b));
            for obs in [
                PauliOperator::x(k, a).multiply(&PauliOperator::z(k, b))?,
                PauliOperator::z(k, a).multiply(&PauliOperator::x(k, b))?,
            ] {
                gens = measure_plus(gens, &obs)?;
            }
            gens = drop_qubits(gens, &[a, b])?;
            gone[a] = true;
            gone[b] = true;
            removed[f.a] = true;
            removed[f.b] = true;
        }
        let keep: Vec<usize> = (0..k).filter(|&i| !gone[i]).collect();
        let group = StabilizerGroup::new(keep.len(), gens.iter().map(|g| g.restrict(&keep)).collect())?;
        resources.push(ResourceState { qubits: keep.iter().map(|&i| qubits[i]).collect(), group, decoration: None });
    }
    let mut net = network.clone();
    {
        let (res, fusions, _, _, _) = net.parts_mut();
        *res = resources;
        let mut i = 0;
        fusions.retain(|_| {
            i += 1;
            !chosen[i - 1]
        });
    }
    let net = net.compact(&removed);
    net.validate()?;
    Ok(net)
}

/// Stabilizer update for measuring `obs` with outcome `+1`.
fn measure_plus(mut gens: Vec<PauliOperator>, obs: &PauliOperator) -> Result<Vec<PauliOperator>, NetworkError> {
    let anti: Vec<usize> = (0..gens.len()).filter(|&i| !gens[i].commutes(obs).unwrap_or(true)).collect();
    match anti.first() {
        Some(&pivot) => {
            for &i in &anti[1..] {
                gens[i] = gens[i].multiply(&gens[pivot])?;
            }
            gens[pivot] = obs.clone();
            Ok(gens)
        }
        None => {
            let basis = crate::pauli::SpanBasis::from_operators(obs.num_qubits(), gens.clone());
            match basis.decompose(obs)? {
                Some(d) if d.sign == 1 => Ok(gens),
                Some(_) => Err(NetworkError::Invalid("absorbed fusion has a deterministic -1 outcome".into())),
                None => Err(NetworkError::Invalid("resource state is not pure".into())),
            }
        }
    }
}

/// Removes qubits that are in a product state with the rest: generators
/// touching them are eliminated so that the others act trivially there.
fn drop_qubits(mut gens: Vec<PauliOperator>, qubits: &[usize]) -> Result<Vec<PauliOperator>, NetworkError> {
    let mut used = vec![false; gens.len()];
    for &q in qubits {
        for zpart in [false, true] {
            let has = |g: &PauliOperator| if zpart { g.z_bit(q) } else { g.x_bit(q) };
            let Some(p) = (0..gens.len()).find(|&i| !used[i] && has(&gens[i])) else { continue };
            used[p] = true;
            for i in 0..gens.len() {
                if i != p && has(&gens[i]) {
                    gens[i] = gens[i].multiply(&gens[p])?;
                }
            }
        }
    }
    let rest: Vec<PauliOperator> = gens.into_iter().zip(used).filter(|(_, u)| !u).map(|(g, _)| g).collect();
    if rest.iter().any(|g| qubits.iter().any(|&q| g.x_bit(q) || g.z_bit(q))) {
        return Err(NetworkError::Invalid("qubits to drop are entangled with the rest".into()));
    }
    Ok(rest)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_two_by_two_counts() {
        let code = SurfaceCode::square(2, 2).unwrap();
        code.validate().unwrap();
        assert_eq!(code.checks.len(), 8);
        let net = build_foliated_network(2, 2, 1, NetworkModel::FourQubit).unwrap();
        assert_eq!(net.resources().len(), 32);
        assert!(net.resources().iter().all(|r| r.qubits.len() == 4));
        assert!(net.inputs().is_empty());
        assert!(net.measurements().is_empty());
        assert!(net.open_qubits().is_empty());
    }

    #[test]
    fn ten_qubit_merges_lines() {
        let net = build_foliated_network(2, 2, 1, NetworkModel::TenQubit).unwrap();
        assert_eq!(net.resources().len(), 8);
        assert!(net.resources().iter().all(|r| r.qubits.len() == 10 && r.group.rank() == 10));
        assert!(net.open_qubits().is_empty());
    }

    #[test]
    fn rotated_layout_is_valid() {
        let code = SurfaceCode::rotated(4, 4).unwrap();
        code.validate().unwrap();
        assert_eq!(code.checks.len(), 16);
        assert!(SurfaceCode::rotated(3, 4).is_err());
    }

    #[test]
    fn open_time_keeps_ports() {
        let code = SurfaceCode::square(2, 2).unwrap();
        let net = build_foliated_network_with(
            &code,
            FoliationOptions { model: NetworkModel::FourQubit, rounds: 2, time: TimeBoundary::Open },
        )
        .unwrap();
        assert_eq!(net.inputs().len(), 8);
        assert_eq!(net.open_qubits().len(), 8);
    }
}
