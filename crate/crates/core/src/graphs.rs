//! Labelled graph enumeration on up to eight vertices.
//!
//! A graph on vertex set `{0, .., n-1}` is a bitmask over the `C(n, 2)`
//! vertex pairs, so enumeration is a filtered scan of `0..2^C(n,2)`.  This
//! brute-force representation is the point: the counts and alternating sums
//! computed here serve as ground truth for the expansion machinery, so the
//! implementation favours being obviously correct over being clever.
//!
//! Conventions: the one-vertex graph is connected; 2-connectivity means
//! "connected with no articulation vertex", which admits the single edge on
//! two vertices.

use thiserror::Error;

/// Hard cap: `C(9, 2) = 36` edge bits would overflow the scan budget.
pub const MAX_VERTICES: usize = 8;

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("vertex count {0} out of range 1..={MAX_VERTICES}")]
    VertexCountOutOfRange(usize),
}

/// Bit position of the pair `{i, j}` (`i != j`) in an edge mask: pairs are
/// ordered colexicographically, `{0,1} {0,2} {1,2} {0,3} ...`.
#[inline]
pub fn pair_index(i: usize, j: usize) -> usize {
    debug_assert!(i != j);
    let (lo, hi) = if i < j { (i, j) } else { (j, i) };
    hi * (hi - 1) / 2 + lo
}

/// Number of vertex pairs on `n` vertices.
#[inline]
pub fn pair_count(n: usize) -> usize {
    n * (n - 1) / 2
}

/// A labelled graph: `n` vertices and an edge bitmask.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LabeledGraph {
    n: usize,
    edges: u32,
}

impl LabeledGraph {
    pub fn new(n: usize, edges: u32) -> Result<Self, GraphError> {
        if n == 0 || n > MAX_VERTICES {
            return Err(GraphError::VertexCountOutOfRange(n));
        }
        debug_assert_eq!(edges >> pair_count(n), 0, "edge bits beyond C(n,2)");
        Ok(Self { n, edges })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_mask(&self) -> u32 {
        self.edges
    }

    pub fn edge_count(&self) -> u32 {
        self.edges.count_ones()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edges >> pair_index(i, j) & 1 == 1
    }

    /// Neighbour bitmasks, one per vertex.
    fn adjacency(&self) -> [u16; MAX_VERTICES] {
        adjacency_of(self.n, self.edges)
    }

    pub fn is_connected(&self) -> bool {
        connected_mask(self.n, self.edges)
    }

    /// Connected with no articulation vertex ("2-connected"); the single
    /// edge on two vertices qualifies, a lone vertex does not.
    pub fn is_biconnected(&self) -> bool {
        if !self.is_connected() {
            return false;
        }
        match self.n {
            1 => false,
            2 => self.edges != 0,
            _ => {
                let adj = self.adjacency();
                (0..self.n).all(|v| {
                    let keep = !(1u16 << v);
                    let start = usize::from(v == 0);
                    let reached = reach(&adj, start, keep);
                    reached == ((1u16 << self.n) - 1) & keep
                })
            }
        }
    }
}

fn adjacency_of(n: usize, edges: u32) -> [u16; MAX_VERTICES] {
    let mut adj = [0u16; MAX_VERTICES];
    for j in 1..n {
        for i in 0..j {
            if edges >> pair_index(i, j) & 1 == 1 {
                adj[i] |= 1 << j;
                adj[j] |= 1 << i;
            }
        }
    }
    adj
}

/// Vertices reachable from `start` walking only inside the `allowed` set.
fn reach(adj: &[u16; MAX_VERTICES], start: usize, allowed: u16) -> u16 {
    let mut seen = (1u16 << start) & allowed;
    let mut frontier = seen;
    while frontier != 0 {
        let mut next = 0u16;
        let mut f = frontier;
        while f != 0 {
            let v = f.trailing_zeros() as usize;
            f &= f - 1;
            next |= adj[v] & allowed;
        }
        frontier = next & !seen;
        seen |= next & allowed;
    }
    seen
}

/// Connectivity of an edge mask on `n` labelled vertices (spanning: every
/// vertex must be reached).
pub(crate) fn connected_mask(n: usize, edges: u32) -> bool {
    let adj = adjacency_of(n, edges);
    reach(&adj, 0, (1u16 << n) - 1) == (1u16 << n) - 1
}

fn enumerate_filtered(
    n: usize,
    keep: fn(usize, u32) -> bool,
) -> Result<impl Iterator<Item = LabeledGraph>, GraphError> {
    if n == 0 || n > MAX_VERTICES {
        return Err(GraphError::VertexCountOutOfRange(n));
    }
    let top: u64 = 1u64 << pair_count(n);
    Ok((0..top).filter_map(move |mask| {
        let mask = mask as u32;
        keep(n, mask).then_some(LabeledGraph { n, edges: mask })
    }))
}

/// All connected labelled graphs on `n` vertices, streamed in ascending
/// edge-mask order.  (`n = 8` scans `2^28` masks; prefer counting to
/// collecting there.)
pub fn enumerate_connected(n: usize) -> Result<impl Iterator<Item = LabeledGraph>, GraphError> {
    enumerate_filtered(n, connected_mask)
}

/// All 2-connected labelled graphs on `n` vertices, streamed in ascending
/// edge-mask order.
pub fn enumerate_biconnected(n: usize) -> Result<impl Iterator<Item = LabeledGraph>, GraphError> {
    enumerate_filtered(n, |n, mask| {
        LabeledGraph { n, edges: mask }.is_biconnected()
    })
}

/// Count of connected labelled graphs on `n` vertices; the scan is sharded
/// across threads (`n = 8` visits `2^28` masks).
pub fn count_connected(n: usize) -> Result<u64, GraphError> {
    count_filtered(n, connected_mask)
}

/// Count of 2-connected labelled graphs on `n` vertices.
pub fn count_biconnected(n: usize) -> Result<u64, GraphError> {
    count_filtered(n, |n, mask| {
        LabeledGraph { n, edges: mask }.is_biconnected()
    })
}

fn count_filtered(n: usize, keep: fn(usize, u32) -> bool) -> Result<u64, GraphError> {
    use rayon::prelude::*;
    if n == 0 || n > MAX_VERTICES {
        return Err(GraphError::VertexCountOutOfRange(n));
    }
    let top: u64 = 1u64 << pair_count(n);
    Ok((0..top)
        .into_par_iter()
        .filter(|&mask| keep(n, mask as u32))
        .count() as u64)
}

/// Number of labelled trees on `n` vertices: `n^{n-2}` (1 for `n <= 2`).
pub fn tree_count(n: usize) -> Result<u64, GraphError> {
    if n == 0 || n > MAX_VERTICES {
        return Err(GraphError::VertexCountOutOfRange(n));
    }
    Ok(match n {
        1 | 2 => 1,
        _ => (n as u64).pow(n as u32 - 2),
    })
}

/// Alternating connected-graph sum ("tree-truncated" weight) of an
/// incompatibility relation on `n` objects:
///
/// ```text
/// phi^T = sum over connected graphs g on {0..n-1} whose every edge joins an
///         incompatible pair, of (-1)^{#edges(g)}
/// ```
///
/// With every pair incompatible this equals `(-1)^{n-1} (n-1)!`; if some
/// object is compatible with all others the sum telescopes to zero.
/// Cost grows as `2^C(n,2)`; `n <= 8` enforced.
pub fn penrose_value(
    n: usize,
    incompatible: impl Fn(usize, usize) -> bool,
) -> Result<i64, GraphError> {
    if n == 0 || n > MAX_VERTICES {
        return Err(GraphError::VertexCountOutOfRange(n));
    }
    let mut allowed = 0u32;
    for j in 1..n {
        for i in 0..j {
            if incompatible(i, j) {
                allowed |= 1 << pair_index(i, j);
            }
        }
    }
    // Walk submasks of `allowed`, the only graphs that can contribute.
    let mut total = 0i64;
    let mut sub = allowed;
    loop {
        if connected_mask(n, sub) {
            total += if sub.count_ones().is_multiple_of(2) {
                1
            } else {
                -1
            };
        }
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & allowed;
    }
    Ok(total)
}

/// Table of [`penrose_value`] for every incompatibility edge mask on `n`
/// objects, indexed by mask.  Built with a subset-zeta transform so the
/// whole table costs `O(C(n,2) 2^C(n,2))`; memory limits it to `n <= 6`
/// (`2^15` entries).
pub fn penrose_table(n: usize) -> Result<Vec<i64>, GraphError> {
    if n == 0 || n > 6 {
        return Err(GraphError::VertexCountOutOfRange(n));
    }
    let bits = pair_count(n);
    let size = 1usize << bits;
    let mut table = vec![0i64; size];
    for (mask, entry) in table.iter_mut().enumerate() {
        if connected_mask(n, mask as u32) {
            *entry = if (mask as u32).count_ones().is_multiple_of(2) {
                1
            } else {
                -1
            };
        }
    }
    // Zeta transform: table[h] = sum over submasks g of h of sign(g).
    for bit in 0..bits {
        for mask in 0..size {
            if mask >> bit & 1 == 1 {
                table[mask] += table[mask ^ (1 << bit)];
            }
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_indexing_is_colex() {
        assert_eq!(pair_index(0, 1), 0);
        assert_eq!(pair_index(0, 2), 1);
        assert_eq!(pair_index(1, 2), 2);
        assert_eq!(pair_index(0, 3), 3);
        assert_eq!(pair_index(2, 3), 5);
        assert_eq!(pair_index(3, 2), 5); // order-insensitive
    }

    #[test]
    fn connected_counts_small_n() {
        let expect = [1usize, 1, 4, 38, 728, 26_704];
        for (n, &want) in (1..=6).zip(&expect) {
            let got = enumerate_connected(n).unwrap().count();
            assert_eq!(got, want, "n = {n}");
        }
    }

    #[test]
    fn biconnected_counts_small_n() {
        let expect = [1usize, 1, 10, 238];
        for (n, &want) in (2..=5).zip(&expect) {
            let got = enumerate_biconnected(n).unwrap().count();
            assert_eq!(got, want, "n = {n}");
        }
        assert_eq!(enumerate_biconnected(1).unwrap().count(), 0);
    }

    #[test]
    fn single_edge_is_biconnected_by_convention() {
        let g = LabeledGraph::new(2, 1).unwrap();
        assert!(g.is_biconnected());
        let g = LabeledGraph::new(2, 0).unwrap();
        assert!(!g.is_biconnected());
    }

    #[test]
    fn path_has_articulation_vertex_cycle_does_not() {
        // Path 0-1-2-3.
        let mut path = 0u32;
        for (i, j) in [(0, 1), (1, 2), (2, 3)] {
            path |= 1 << pair_index(i, j);
        }
        let path = LabeledGraph::new(4, path).unwrap();
        assert!(path.is_connected());
        assert!(!path.is_biconnected());
        // Cycle 0-1-2-3-0.
        let mut cyc = path.edge_mask();
        cyc |= 1 << pair_index(3, 0);
        let cyc = LabeledGraph::new(4, cyc).unwrap();
        assert!(cyc.is_biconnected());
    }

    #[test]
    fn tree_counts_match_spanning_tree_enumeration() {
        // Trees = connected graphs with exactly n-1 edges.
        for n in 1..=6 {
            let want = tree_count(n).unwrap();
            let got = enumerate_connected(n)
                .unwrap()
                .filter(|g| g.edge_count() as usize == n - 1)
                .count() as u64;
            assert_eq!(got, want, "n = {n}");
        }
    }

    #[test]
    fn penrose_all_incompatible() {
        // (-1)^{n-1} (n-1)!
        let mut factorial = 1i64;
        for n in 2..=6usize {
            factorial *= n as i64 - 1;
            let sign = if n % 2 == 0 { -1 } else { 1 };
            let got = penrose_value(n, |_, _| true).unwrap();
            assert_eq!(got, sign * factorial, "n = {n}");
        }
        assert_eq!(penrose_value(1, |_, _| true).unwrap(), 1);
    }

    #[test]
    fn penrose_vanishes_with_an_isolated_object() {
        // Object 3 compatible with everyone: no spanning connected graph.
        for n in 2..=5usize {
            let got = penrose_value(n, |i, j| i != n - 1 && j != n - 1).unwrap();
            assert_eq!(got, 0, "n = {n}");
        }
    }

    #[test]
    fn penrose_table_agrees_with_direct_evaluation() {
        for n in 1..=4usize {
            let table = penrose_table(n).unwrap();
            for (mask, &val) in table.iter().enumerate() {
                let direct = penrose_value(n, |i, j| mask >> pair_index(i, j) & 1 == 1).unwrap();
                assert_eq!(val, direct, "n = {n}, mask = {mask:#b}");
            }
        }
    }

    #[test]
    fn vertex_count_bounds_enforced() {
        assert!(enumerate_connected(0).is_err());
        assert!(enumerate_connected(9).is_err());
        assert!(penrose_value(9, |_, _| true).is_err());
        assert!(penrose_table(7).is_err());
        assert!(tree_count(0).is_err());
    }

    #[test]
    fn biconnected_implies_connected() {
        for n in 2..=5 {
            for g in enumerate_biconnected(n).unwrap() {
                assert!(g.is_connected());
            }
        }
    }

    #[test]
    fn parallel_counts_match_enumeration() {
        for n in 1..=6 {
            assert_eq!(
                count_connected(n).unwrap(),
                enumerate_connected(n).unwrap().count() as u64,
                "connected, n = {n}"
            );
            assert_eq!(
                count_biconnected(n).unwrap(),
                enumerate_biconnected(n).unwrap().count() as u64,
                "biconnected, n = {n}"
            );
        }
        assert!(count_connected(9).is_err());
    }
}
