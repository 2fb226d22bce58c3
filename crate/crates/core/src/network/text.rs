//! Line-oriented text form of a network.
//!
//! ```text
//! QUBITS <n>
//! RS <id> <qubit>...
//! GEN <rs-id> <pauli on the resource's qubits, in listed order>
//! DEC <rs-id> <local qubit> <label> <8 reals: row-major re/im pairs>
//! PORT <qubit>
//! FUSE <a> <b>
//! MEAS <qubit> X|Z
//! LINE <start> <end> <init X|Z|-> <measured X|Z|->
//! ```
//! Blank lines and lines starting with `#` are ignored.

use std::fmt::Write as _;

use num_complex::Complex64;

use super::{Decoration, Fusion, FusionNetwork, Measurement, NetworkError, ResourceState, WireLine};
use crate::pauli::{PauliOperator, StabilizerGroup};
use crate::statevec::Basis;

fn basis_char(b: Option<Basis>) -> char {
    match b {
        Some(Basis::X) => 'X',
        Some(Basis::Z) => 'Z',
        None => '-',
    }
}

impl FusionNetwork {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "QUBITS {}", self.num_qubits);
        for (id, r) in self.resources.iter().enumerate() {
            let qs: Vec<String> = r.qubits.iter().map(|q| q.to_string()).collect();
            let _ = writeln!(out, "RS {id} {}", qs.join(" "));
            for g in r.group.generators() {
                let _ = writeln!(out, "GEN {id} {g}");
            }
            if let Some(d) = &r.decoration {
                let nums: Vec<String> =
                    d.unitary.iter().flatten().flat_map(|c| [c.re.to_string(), c.im.to_string()]).collect();
                let _ = writeln!(out, "DEC {id} {} {} {}", d.qubit, d.label, nums.join(" "));
            }
        }
        for q in &self.inputs {
            let _ = writeln!(out, "PORT {q}");
        }
        for f in &self.fusions {
            let _ = writeln!(out, "FUSE {} {}", f.a, f.b);
        }
        for m in &self.measurements {
            let _ = writeln!(out, "MEAS {} {}", m.qubit, basis_char(Some(m.basis)));
        }
        for l in &self.lines {
            let _ = writeln!(out, "LINE {} {} {} {}", l.start, l.end, basis_char(l.init), basis_char(l.measured));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, NetworkError> {
        let mut net = FusionNetwork::new();
        let mut gens: Vec<Vec<PauliOperator>> = Vec::new();
        let mut decorations: Vec<Option<Decoration>> = Vec::new();
        let mut qubit_lists: Vec<Vec<usize>> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let err = |message: String| NetworkError::Parse { line, message };
            let t = raw.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let parts: Vec<&str> = t.split_whitespace().collect();
            let num = |s: &str| s.parse::<usize>().map_err(|e| err(format!("`{s}`: {e}")));
            let basis = |s: &str| match s {
                "X" => Ok(Some(Basis::X)),
                "Z" => Ok(Some(Basis::Z)),
                "-" => Ok(None),
                other => Err(err(format!("unknown basis `{other}`"))),
            };
            let rs_index = |s: &str, len: usize| {
                let id = num(s)?;
                if id < len {
                    Ok(id)
                } else {
                    Err(err(format!("unknown resource state {id}")))
                }
            };
            match parts[0] {
                "QUBITS" if parts.len() == 2 => net.num_qubits = num(parts[1])?,
                "RS" if parts.len() >= 2 => {
                    if num(parts[1])? != qubit_lists.len() {
                        return Err(err("resource states must be numbered consecutively".into()));
                    }
                    qubit_lists.push(parts[2..].iter().map(|s| num(s)).collect::<Result<_, _>>()?);
                    gens.push(Vec::new());
                    decorations.push(None);
                }
                "GEN" if parts.len() == 3 => {
                    let id = rs_index(parts[1], gens.len())?;
                    let p: PauliOperator = parts[2].parse().map_err(|e| err(format!("{e}")))?;
                    gens[id].push(p);
                }
                "DEC" if parts.len() == 12 => {
                    let id = rs_index(parts[1], gens.len())?;
                    let vals: Vec<f64> = parts[4..]
                        .iter()
                        .map(|s| s.parse::<f64>().map_err(|e| err(format!("`{s}`: {e}"))))
                        .collect::<Result<_, _>>()?;
                    let c = |k: usize| Complex64::new(vals[2 * k], vals[2 * k + 1]);
                    decorations[id] = Some(Decoration {
                        label: parts[3].to_string(),
                        unitary: [[c(0), c(1)], [c(2), c(3)]],
                        qubit: num(parts[2])?,
                    });
                }
                "PORT" if parts.len() == 2 => net.inputs.push(num(parts[1])?),
                "FUSE" if parts.len() == 3 => net.fusions.push(Fusion { a: num(parts[1])?, b: num(parts[2])? }),
                "MEAS" if parts.len() == 3 => {
                    let b = basis(parts[2])?.ok_or_else(|| err("measurement needs a basis".into()))?;
                    net.measurements.push(Measurement { qubit: num(parts[1])?, basis: b });
                }
                "LINE" if parts.len() == 5 => net.lines.push(WireLine {
                    start: num(parts[1])?,
                    end: num(parts[2])?,
                    init: basis(parts[3])?,
                    measured: basis(parts[4])?,
                }),
                _ => return Err(err(format!("unrecognised line `{t}`"))),
            }
        }
        for ((qubits, g), decoration) in qubit_lists.into_iter().zip(gens).zip(decorations) {
            let group = StabilizerGroup::new(qubits.len(), g)?;
            net.resources.push(ResourceState { qubits, group, decoration });
        }
        let max = net.resources.iter().flat_map(|r| r.qubits.iter()).chain(&net.inputs).map(|&q| q + 1).max();
        net.num_qubits = net.num_qubits.max(max.unwrap_or(0));
        net.validate()?;
        Ok(net)
    }
}
