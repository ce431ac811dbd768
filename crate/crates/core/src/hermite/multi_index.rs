use serde::{Deserialize, Serialize};

/// A d-tuple of non-negative integers indexing the eigenfunction Φ_μ.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Self {
        Self(entries)
    }

    pub fn zero(dim: usize) -> Self {
        Self(vec![0; dim])
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// |μ| = Σ μ_i
    pub fn degree(&self) -> usize {
        self.0.iter().map(|&m| m as usize).sum()
    }

    /// Position of `self` inside its own eigenspace in graded-lexicographic
    /// order (first entry descending).
    pub fn rank_in_shell(&self) -> usize {
        let mut rank = 0;
        let mut remaining = self.degree();
        let d = self.dim();
        for (i, &m) in self.0.iter().enumerate() {
            let rest = d - i - 1;
            if rest == 0 {
                break;
            }
            let m = m as usize;
            // indices in this sub-shell whose i-th entry is larger than m
            for j in (m + 1)..=remaining {
                rank += eigenspace_size(remaining - j, rest);
            }
            remaining -= m;
        }
        rank
    }
}

impl std::fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("(")?;
        for (i, m) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{m}")?;
        }
        f.write_str(")")
    }
}

/// Number of multi-indices of degree k in d dimensions, C(k+d−1, d−1).
pub fn eigenspace_size(k: usize, d: usize) -> usize {
    if d == 0 {
        return usize::from(k == 0);
    }
    // C(k + d - 1, d - 1) computed incrementally; exact in integers.
    let r = d - 1;
    let mut c: u128 = 1;
    for i in 1..=r {
        c = c * (k + i) as u128 / i as u128;
    }
    c as usize
}

/// All μ with |μ| = k in graded-lexicographic order.
pub fn enumerate_eigenspace(k: usize, d: usize) -> Vec<MultiIndex> {
    let mut out = Vec::with_capacity(eigenspace_size(k, d));
    if d == 0 {
        return out;
    }
    let mut current = vec![0u32; d];
    fill(&mut current, 0, k, &mut out);
    out
}

fn fill(current: &mut [u32], pos: usize, remaining: usize, out: &mut Vec<MultiIndex>) {
    if pos + 1 == current.len() {
        current[pos] = remaining as u32;
        out.push(MultiIndex(current.to_vec()));
        return;
    }
    for m in (0..=remaining).rev() {
        current[pos] = m as u32;
        fill(current, pos + 1, remaining - m, out);
    }
}
