//! Packed GF(2) vectors and an incremental row-echelon form that remembers
//! which inserted rows each reduced row combines.

pub(crate) fn first_bit(v: &[u64]) -> Option<usize> {
    v.iter().position(|&w| w != 0).map(|i| i * 64 + v[i].trailing_zeros() as usize)
}

pub(crate) fn bit(v: &[u64], i: usize) -> bool {
    v[i / 64] >> (i % 64) & 1 == 1
}

pub(crate) fn set(v: &mut [u64], i: usize) {
    v[i / 64] |= 1 << (i % 64);
}

pub(crate) fn xor_into(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= s;
    }
}

pub(crate) fn zeros(bits: usize) -> Vec<u64> {
    vec![0; bits.div_ceil(64).max(1)]
}

pub(crate) fn unit(bits: usize, i: usize) -> Vec<u64> {
    let mut v = zeros(bits);
    set(&mut v, i);
    v
}

pub(crate) fn count(v: &[u64]) -> usize {
    v.iter().map(|w| w.count_ones() as usize).sum()
}

pub(crate) fn ones(v: &[u64]) -> Vec<usize> {
    let mut out = Vec::new();
    for (w, &word) in v.iter().enumerate() {
        let mut m = word;
        while m != 0 {
            out.push(w * 64 + m.trailing_zeros() as usize);
            m &= m - 1;
        }
    }
    out
}

#[derive(Debug, Clone)]
pub(crate) struct Echelon {
    pub rows: Vec<Vec<u64>>,
    pub pivots: Vec<usize>,
    pub combos: Vec<Vec<u64>>,
    tag_bits: usize,
}

impl Echelon {
    pub fn new(tag_bits: usize) -> Self {
        Self { rows: Vec::new(), pivots: Vec::new(), combos: Vec::new(), tag_bits }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn reduce(&self, v: &mut [u64], combo: &mut [u64]) {
        for ((row, &p), c) in self.rows.iter().zip(&self.pivots).zip(&self.combos) {
            if bit(v, p) {
                xor_into(v, row);
                xor_into(combo, c);
            }
        }
    }

    /// Inserts `v` tagged with `combo`. Returns `Ok(())` if the rank grew,
    /// otherwise the combination of tags that reproduces `v`.
    pub fn insert(&mut self, mut v: Vec<u64>, mut combo: Vec<u64>) -> Result<(), Vec<u64>> {
        self.reduce(&mut v, &mut combo);
        match first_bit(&v) {
            Some(p) => {
                self.rows.push(v);
                self.pivots.push(p);
                self.combos.push(combo);
                Ok(())
            }
            None => Err(combo),
        }
    }

    pub fn empty_combo(&self) -> Vec<u64> {
        zeros(self.tag_bits)
    }
}

/// Basis of `{v : row · v = 0 for every row}` over `ncols` bits.
pub(crate) fn nullspace(rows: &[Vec<u64>], ncols: usize) -> Vec<Vec<u64>> {
    let mut rows: Vec<Vec<u64>> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        let Some(i) = (r..rows.len()).find(|&i| bit(&rows[i], col)) else { continue };
        rows.swap(r, i);
        let pivot_row = rows[r].clone();
        for (j, row) in rows.iter_mut().enumerate() {
            if j != r && bit(row, col) {
                xor_into(row, &pivot_row);
            }
        }
        pivots.push(col);
        r += 1;
    }
    let mut out = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = unit(ncols, free);
        for (k, &p) in pivots.iter().enumerate() {
            if bit(&rows[k], free) {
                set(&mut v, p);
            }
        }
        out.push(v);
    }
    out
}
