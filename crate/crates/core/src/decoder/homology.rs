use crate::lattice::{PeriodicSyndromeLattice, CUT_X, CUT_Y, CUT_Z};

use super::DecodeError;

/// Winding parities of a cycle set across the three cut planes, as a
/// [`CUT_X`]/[`CUT_Y`]/[`CUT_Z`] mask. Edge ids may repeat; repeats cancel.
pub fn winding_mask(lattice: &PeriodicSyndromeLattice, edge_ids: &[usize]) -> u8 {
    edge_ids.iter().fold(0u8, |acc, &e| acc ^ lattice.edges()[e].cuts)
}

/// Whether a closed edge set wraps the torus an odd number of times in some
/// direction. Errors if the set has a nonempty boundary.
pub fn logical_failure(lattice: &PeriodicSyndromeLattice, edge_ids: &[usize]) -> Result<bool, DecodeError> {
    let boundary = lattice.boundary(edge_ids);
    if !boundary.is_empty() {
        return Err(DecodeError::OpenChain(boundary.len()));
    }
    Ok(winding_mask(lattice, edge_ids) & (CUT_X | CUT_Y | CUT_Z) != 0)
}

/// Lifted displacement `(dx, dy, dz)` of the edge from `u` to `v` in the cover.
pub fn lifted_offset(lattice: &PeriodicSyndromeLattice, edge: usize) -> [i64; 3] {
    let e = lattice.edges()[edge];
    let l = lattice.size() as i64;
    let a = lattice.coords(e.u);
    let b = lattice.coords(e.v);
    let mut d = [b.0 as i64 - a.0 as i64, b.1 as i64 - a.1 as i64, b.2 as i64 - a.2 as i64];
    for (k, bit) in [CUT_X, CUT_Y, CUT_Z].into_iter().enumerate() {
        if e.cuts & bit != 0 {
            d[k] -= l * d[k].signum();
        }
    }
    d
}

/// Whether the erased subgraph contains a cycle that winds around the torus.
///
/// Union-find where each vertex stores its lifted offset relative to its root;
/// closing an edge between two vertices of one component with inconsistent
/// offsets exhibits a non-contractible loop.
pub fn percolation_check(lattice: &PeriodicSyndromeLattice, erased: &[usize]) -> bool {
    let n = lattice.num_vertices();
    let mut parent: Vec<usize> = (0..n).collect();
    let mut offset = vec![[0i64; 3]; n];

    fn find(parent: &mut [usize], offset: &mut [[i64; 3]], v: usize) -> usize {
        let p = parent[v];
        if p == v {
            return v;
        }
        let root = find(parent, offset, p);
        let po = offset[p];
        for k in 0..3 {
            offset[v][k] += po[k];
        }
        parent[v] = root;
        root
    }

    for &id in erased {
        let e = lattice.edges()[id];
        let d = lifted_offset(lattice, id);
        let ru = find(&mut parent, &mut offset, e.u);
        let rv = find(&mut parent, &mut offset, e.v);
        let (ou, ov) = (offset[e.u], offset[e.v]);
        if ru == rv {
            if (0..3).any(|k| ou[k] + d[k] != ov[k]) {
                return true;
            }
        } else {
            // position(v) = position(u) + d, with position(x) = offset[x] + position(root).
            parent[rv] = ru;
            for k in 0..3 {
                offset[rv][k] = ou[k] + d[k] - ov[k];
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_cubic, build_ten_qubit};

    fn edge_between(lat: &PeriodicSyndromeLattice, a: usize, b: usize) -> usize {
        lat.neighbors(a).iter().find(|&&(v, _)| v == b).unwrap().1
    }

    #[test]
    fn straight_loop_fails_and_face_does_not() {
        let lat = build_cubic(4).unwrap();
        let mut ids = Vec::new();
        for x in 0..4 {
            ids.push(edge_between(&lat, lat.index(x, 1, 2), lat.index((x + 1) % 4, 1, 2)));
        }
        assert!(logical_failure(&lat, &ids).unwrap());
        assert_eq!(winding_mask(&lat, &ids), CUT_X);

        // Plaquette straddling the x and y cut planes.
        let corners = [(3, 3), (0, 3), (0, 0), (3, 0)];
        let mut face = Vec::new();
        for k in 0..4 {
            let (x1, y1) = corners[k];
            let (x2, y2) = corners[(k + 1) % 4];
            face.push(edge_between(&lat, lat.index(x1, y1, 1), lat.index(x2, y2, 1)));
        }
        assert!(!logical_failure(&lat, &face).unwrap());
        assert!(!logical_failure(&lat, &[]).unwrap());
    }

    #[test]
    fn open_chain_is_rejected() {
        let lat = build_cubic(4).unwrap();
        assert!(logical_failure(&lat, &[0]).is_err());
    }

    #[test]
    fn erased_vertical_column_percolates() {
        let lat = build_ten_qubit(6).unwrap();
        let column: Vec<usize> = (0..6)
            .map(|z| edge_between(&lat, lat.index(2, 0, z), lat.index(2, 0, (z + 1) % 6)))
            .collect();
        assert!(percolation_check(&lat, &column));
        assert!(!percolation_check(&lat, &column[..5]));
        assert!(!percolation_check(&lat, &[]));
    }

    #[test]
    fn contractible_cycle_does_not_percolate() {
        let lat = build_cubic(4).unwrap();
        let corners = [(3, 3), (0, 3), (0, 0), (3, 0)];
        let face: Vec<usize> = (0..4)
            .map(|k| {
                let (x1, y1) = corners[k];
                let (x2, y2) = corners[(k + 1) % 4];
                edge_between(&lat, lat.index(x1, y1, 1), lat.index(x2, y2, 1))
            })
            .collect();
        assert!(!percolation_check(&lat, &face));
    }
}
