//! Layered network equivalent to the Raussendorf lattice.
//!
//! The lattice is a periodic cubic complex with a qubit on every face
//! (primal) and every edge (dual), joined when the edge bounds the face.
//! Slicing it between time steps leaves one graph state per layer. Each face
//! between two time steps is adjacent to exactly one edge of the next layer;
//! those pairs become fusions, and every other qubit is measured in `X`.

use super::{FusionNetwork, NetworkError};
use crate::pauli::graph_state_group;
use crate::statevec::Basis;

/// Qubit kinds of one layer, in storage order.
#[derive(Clone, Copy)]
enum Kind {
    HFace = 0,
    HEdgeX = 1,
    HEdgeY = 2,
    VFaceX = 3,
    VFaceY = 4,
    VEdge = 5,
}

pub fn build_raussendorf_equivalent(lx: usize, ly: usize, rounds: usize) -> Result<FusionNetwork, NetworkError> {
    if lx < 2 || ly < 2 || rounds == 0 {
        return Err(NetworkError::Parameters(format!("layered lattice {lx}x{ly}x{rounds} is too small")));
    }
    let per = 6 * lx * ly;
    let local = |k: Kind, x: usize, y: usize| (k as usize) * lx * ly + (x % lx) + lx * (y % ly);
    let mut edges = Vec::new();
    for y in 0..ly {
        for x in 0..lx {
            let f = local(Kind::HFace, x, y);
            for e in [
                local(Kind::HEdgeX, x, y),
                local(Kind::HEdgeX, x, y + 1),
                local(Kind::HEdgeY, x, y),
                local(Kind::HEdgeY, x + 1, y),
            ] {
                edges.push((f, e));
            }
            let fx = local(Kind::VFaceX, x, y);
            for e in [local(Kind::HEdgeX, x, y), local(Kind::VEdge, x, y), local(Kind::VEdge, x + 1, y)] {
                edges.push((fx, e));
            }
            let fy = local(Kind::VFaceY, x, y);
            for e in [local(Kind::HEdgeY, x, y), local(Kind::VEdge, x, y), local(Kind::VEdge, x, y + 1)] {
                edges.push((fy, e));
            }
        }
    }
    let group = graph_state_group(per, &edges)?;
    let mut net = FusionNetwork::new();
    let layers: Vec<Vec<usize>> = (0..rounds).map(|_| net.add_resource(group.clone(), None)).collect();
    for t in 0..rounds {
        let (cur, next) = (&layers[t], &layers[(t + 1) % rounds]);
        for y in 0..ly {
            for x in 0..lx {
                net.fuse(cur[local(Kind::VFaceX, x, y)], next[local(Kind::HEdgeX, x, y)]);
                net.fuse(cur[local(Kind::VFaceY, x, y)], next[local(Kind::HEdgeY, x, y)]);
            }
        }
    }
    for layer in &layers {
        for y in 0..ly {
            for x in 0..lx {
                net.measure(layer[local(Kind::HFace, x, y)], Basis::X);
                net.measure(layer[local(Kind::VEdge, x, y)], Basis::X);
            }
        }
    }
    net.validate()?;
    Ok(net)
}
