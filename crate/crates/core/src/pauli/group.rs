use super::{words, PauliError, PauliOperator};
use crate::gf2::{ones, unit, Echelon};

/// Concatenated `[x | z]` words of an operator.
fn symplectic(p: &PauliOperator) -> Vec<u64> {
    let mut v = Vec::with_capacity(2 * p.x_words().len());
    v.extend_from_slice(p.x_words());
    v.extend_from_slice(p.z_words());
    v
}

/// Product of the listed operators, left to right.
fn product(n: usize, ops: &[PauliOperator], indices: &[usize]) -> PauliOperator {
    let mut acc = PauliOperator::identity(n);
    for &i in indices {
        acc = acc.mul_unchecked(&ops[i]);
    }
    acc
}

/// A commuting set of Hermitian Pauli operators with no `-I` among their
/// products, held as an ordered, independent generator list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilizerGroup {
    n: usize,
    generators: Vec<PauliOperator>,
}

impl StabilizerGroup {
    /// Validates that `generators` commute pairwise, are Hermitian and
    /// GF(2)-independent (which also rules out `-I`).
    pub fn new(n: usize, generators: Vec<PauliOperator>) -> Result<Self, PauliError> {
        check_commuting(n, &generators)?;
        let mut ech = Echelon::new(0);
        for g in &generators {
            if ech.insert(symplectic(g), vec![0]).is_err() {
                return Err(PauliError::Dependent);
            }
        }
        Ok(Self { n, generators })
    }

    /// Accepts a possibly redundant commuting generating set and returns the
    /// canonical (reduced echelon) form of the group it generates.
    pub fn from_generating_set(n: usize, generators: Vec<PauliOperator>) -> Result<Self, PauliError> {
        check_commuting(n, &generators)?;
        canonical_rows(n, generators).map(|generators| Self { n, generators })
    }

    pub fn trivial(n: usize) -> Self {
        Self { n, generators: Vec::new() }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[PauliOperator] {
        &self.generators
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// Equivalent group whose generator matrix `[x | z]` is in reduced
    /// row-echelon form, with phases carried through the row operations.
    pub fn canonicalize(&self) -> Result<Self, PauliError> {
        canonical_rows(self.n, self.generators.clone()).map(|generators| Self { n: self.n, generators })
    }

    /// Same generators embedded into a larger register.
    pub fn embed(&self, n: usize, qubits: &[usize]) -> Self {
        Self { n, generators: self.generators.iter().map(|g| g.embed(n, qubits)).collect() }
    }

    /// Direct product of groups acting on disjoint qubit sets of one register.
    pub fn direct_product(n: usize, parts: &[StabilizerGroup]) -> Result<Self, PauliError> {
        let mut gens = Vec::new();
        for part in parts {
            if part.n != n {
                return Err(PauliError::DimensionMismatch(n, part.n));
            }
            gens.extend(part.generators.iter().cloned());
        }
        Ok(Self { n, generators: gens })
    }
}

fn check_commuting(n: usize, generators: &[PauliOperator]) -> Result<(), PauliError> {
    for g in generators {
        if g.num_qubits() != n {
            return Err(PauliError::DimensionMismatch(n, g.num_qubits()));
        }
        if !g.is_hermitian() {
            return Err(PauliError::NotHermitian(g.to_string()));
        }
    }
    for i in 0..generators.len() {
        for j in i + 1..generators.len() {
            if !generators[i].commutes_unchecked(&generators[j]) {
                return Err(PauliError::NonCommuting(i, j));
            }
        }
    }
    Ok(())
}

fn canonical_rows(n: usize, mut rows: Vec<PauliOperator>) -> Result<Vec<PauliOperator>, PauliError> {
    let mut r = 0;
    for col in 0..2 * n {
        let has = |p: &PauliOperator| if col < n { p.x_bit(col) } else { p.z_bit(col - n) };
        let Some(i) = (r..rows.len()).find(|&i| has(&rows[i])) else { continue };
        rows.swap(r, i);
        for j in 0..rows.len() {
            if j != r && has(&rows[j]) {
                rows[j] = rows[j].mul_unchecked(&rows[r]);
            }
        }
        r += 1;
    }
    for extra in &rows[r..] {
        debug_assert!(extra.is_identity_up_to_phase());
        if extra.phase() != 0 {
            return Err(PauliError::InconsistentGroup);
        }
    }
    rows.truncate(r);
    Ok(rows)
}

/// A subset of generator indices and the sign relating an operator to the
/// ordered product of those generators: `p = sign · ∏_{j ∈ indices} g_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub indices: Vec<usize>,
    pub sign: i8,
}

/// Precomputed elimination of a group's generators for repeated span queries.
#[derive(Debug, Clone)]
pub struct SpanBasis {
    n: usize,
    generators: Vec<PauliOperator>,
    echelon: Echelon,
}

impl SpanBasis {
    pub fn new(group: &StabilizerGroup) -> Self {
        Self::from_operators(group.n, group.generators.clone())
    }

    /// Same as [`SpanBasis::new`] for an arbitrary list of operators; dependent
    /// entries are allowed and simply never needed.
    pub fn from_operators(n: usize, generators: Vec<PauliOperator>) -> Self {
        let m = generators.len();
        let mut echelon = Echelon::new(m);
        for (k, g) in generators.iter().enumerate() {
            let _ = echelon.insert(symplectic(g), unit(m, k));
        }
        Self { n, generators, echelon }
    }

    pub fn rank(&self) -> usize {
        self.echelon.rows.len()
    }

    pub fn generators(&self) -> &[PauliOperator] {
        &self.generators
    }

    /// Indices of generators whose product equals `p` up to sign, or `None`
    /// when `p` is outside the span or only reachable with an imaginary phase.
    pub fn decompose(&self, p: &PauliOperator) -> Result<Option<Decomposition>, PauliError> {
        if p.num_qubits() != self.n {
            return Err(PauliError::DimensionMismatch(p.num_qubits(), self.n));
        }
        let mut v = symplectic(p);
        let mut combo = self.echelon.empty_combo();
        self.echelon.reduce(&mut v, &mut combo);
        if v.iter().any(|&w| w != 0) {
            return Ok(None);
        }
        let indices = ones(&combo);
        let prod = product(self.n, &self.generators, &indices);
        let sign = match (p.phase() + 4 - prod.phase()) % 4 {
            0 => 1,
            2 => -1,
            _ => return Ok(None),
        };
        Ok(Some(Decomposition { indices, sign }))
    }

    pub fn contains(&self, p: &PauliOperator) -> bool {
        let mut v = symplectic(p);
        let mut combo = self.echelon.empty_combo();
        self.echelon.reduce(&mut v, &mut combo);
        v.iter().all(|&w| w == 0)
    }
}

/// Membership of `p` (up to sign) in the span of `g`'s generators.
pub fn in_span(p: &PauliOperator, g: &StabilizerGroup) -> Result<Option<Decomposition>, PauliError> {
    if p.num_qubits() != g.n {
        return Err(PauliError::DimensionMismatch(p.num_qubits(), g.n));
    }
    SpanBasis::new(g).decompose(p)
}

/// Intersection of the unsigned symplectic spans of `r` and `f`, computed by
/// Zassenhaus elimination. Each returned generator carries the sign it has as
/// an element of `r`.
pub fn intersect(r: &StabilizerGroup, f: &StabilizerGroup) -> Result<StabilizerGroup, PauliError> {
    if r.n != f.n {
        return Err(PauliError::DimensionMismatch(r.n, f.n));
    }
    let n = r.n;
    let w = 2 * words(n);
    let m = r.generators.len();
    let mut ech = Echelon::new(m);
    for (k, g) in r.generators.iter().enumerate() {
        let s = symplectic(g);
        let mut row = s.clone();
        row.extend_from_slice(&s);
        let _ = ech.insert(row, unit(m, k));
    }
    for g in &f.generators {
        let mut row = symplectic(g);
        row.resize(2 * w, 0);
        let combo = ech.empty_combo();
        let _ = ech.insert(row, combo);
    }
    let mut gens = Vec::new();
    for (p, combo) in ech.pivots.iter().zip(&ech.combos) {
        if *p >= w * 64 {
            gens.push(product(n, &r.generators, &ones(combo)));
        }
    }
    StabilizerGroup::new(n, gens)
}

/// Stabilizer group `⟨X_v ∏_{u ∈ N(v)} Z_u⟩` of the graph state on `n`
/// vertices with the given undirected edges.
pub fn graph_state_group(n: usize, edges: &[(usize, usize)]) -> Result<StabilizerGroup, PauliError> {
    let mut gens: Vec<PauliOperator> = (0..n).map(|v| PauliOperator::x(n, v)).collect();
    let mut seen = std::collections::BTreeSet::new();
    for &(a, b) in edges {
        if a >= n || b >= n {
            return Err(PauliError::InvalidGraph(format!("edge ({a}, {b}) outside {n} vertices")));
        }
        if a == b {
            return Err(PauliError::InvalidGraph(format!("self-loop at {a}")));
        }
        if !seen.insert((a.min(b), a.max(b))) {
            return Err(PauliError::InvalidGraph(format!("repeated edge ({a}, {b})")));
        }
        gens[a].set_bits(b, false, true);
        gens[b].set_bits(a, false, true);
    }
    Ok(StabilizerGroup { n, generators: gens })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PauliOperator {
        s.parse().unwrap()
    }

    fn group(gens: &[&str]) -> StabilizerGroup {
        let ops: Vec<PauliOperator> = gens.iter().map(|s| p(s)).collect();
        StabilizerGroup::from_generating_set(ops[0].num_qubits(), ops).unwrap()
    }

    #[test]
    fn canonicalize_removes_duplicates() {
        let g = StabilizerGroup::from_generating_set(2, vec![p("XX"), p("XX")]).unwrap();
        assert_eq!(g.generators(), &[p("XX")]);
        assert_eq!(
            StabilizerGroup::from_generating_set(2, vec![p("XX"), p("-XX")]),
            Err(PauliError::InconsistentGroup)
        );
        assert_eq!(group(&["ZZI", "IZZ", "ZIZ"]).rank(), 2);
    }

    #[test]
    fn canonicalize_is_idempotent_and_rejects_bad_input() {
        let g = group(&["XXXX", "ZZZZ", "-ZZII"]);
        let c = g.canonicalize().unwrap();
        assert_eq!(c, c.canonicalize().unwrap());
        assert_eq!(StabilizerGroup::new(1, vec![p("X"), p("Z")]), Err(PauliError::NonCommuting(0, 1)));
        assert_eq!(StabilizerGroup::new(2, vec![p("XX"), p("XX")]), Err(PauliError::Dependent));
    }

    #[test]
    fn span_examples() {
        let g = StabilizerGroup::new(2, vec![p("XI"), p("IX")]).unwrap();
        let d = in_span(&p("XX"), &g).unwrap().unwrap();
        assert_eq!(d, Decomposition { indices: vec![0, 1], sign: 1 });
        let id = in_span(&p("II"), &g).unwrap().unwrap();
        assert_eq!(id, Decomposition { indices: vec![], sign: 1 });
        assert_eq!(in_span(&p("-XX"), &g).unwrap().unwrap().sign, -1);
        assert!(in_span(&p("ZI"), &g).unwrap().is_none());
    }

    #[test]
    fn intersection_examples() {
        let r = StabilizerGroup::new(2, vec![p("ZZ")]).unwrap();
        let c = intersect(&r, &r).unwrap();
        assert_eq!(c.generators(), &[p("ZZ")]);
        let r = StabilizerGroup::new(2, vec![p("XX"), p("ZZ")]).unwrap();
        let f = StabilizerGroup::new(2, vec![p("XI"), p("IX")]).unwrap();
        let c = intersect(&r, &f).unwrap();
        assert_eq!(c.generators(), &[p("XX")]);
        let r = StabilizerGroup::new(2, vec![p("-XX"), p("ZZ")]).unwrap();
        assert_eq!(intersect(&r, &f).unwrap().generators(), &[p("-XX")]);
    }

    #[test]
    fn graph_states() {
        assert_eq!(graph_state_group(1, &[]).unwrap().generators(), &[p("X")]);
        assert_eq!(graph_state_group(2, &[(0, 1)]).unwrap().generators(), &[p("XZ"), p("ZX")]);
        let path = graph_state_group(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        assert_eq!(path.generators(), &[p("XZII"), p("ZXZI"), p("IZXZ"), p("IIZX")]);
        assert!(graph_state_group(2, &[(0, 0)]).is_err());
    }
}
