//! Independent oracle for the graph enumeration: a union-find classifier,
//! sharing no code with the library's mask-BFS, recounts every class.

use clex_core::graphs;

/// Union-find with path halving.
struct Uf(Vec<usize>);

impl Uf {
    fn new(n: usize) -> Self {
        Uf((0..n).collect())
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra] = rb;
        }
    }
}

/// Edge list of a mask, in this file's own pair order (row by row), which
/// need not match the library's.
fn edge_list(n: usize, mask: u32) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    let mut bit = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            if mask >> bit & 1 == 1 {
                edges.push((i, j));
            }
            bit += 1;
        }
    }
    edges
}

fn connected_uf(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut uf = Uf::new(n);
    for &(i, j) in edges {
        uf.union(i, j);
    }
    let root = uf.find(0);
    (1..n).all(|v| uf.find(v) == root)
}

/// 2-connectivity by definition: connected, and removing any one vertex
/// leaves the rest connected.  A single edge on two vertices counts.
fn biconnected_uf(n: usize, edges: &[(usize, usize)]) -> bool {
    if n == 1 {
        return false;
    }
    if n == 2 {
        return !edges.is_empty();
    }
    if !connected_uf(n, edges) {
        return false;
    }
    for removed in 0..n {
        let mut uf = Uf::new(n);
        for &(i, j) in edges {
            if i != removed && j != removed {
                uf.union(i, j);
            }
        }
        let keep: Vec<usize> = (0..n).filter(|&v| v != removed).collect();
        let root = uf.find(keep[0]);
        if !keep.iter().all(|&v| uf.find(v) == root) {
            return false;
        }
    }
    true
}

fn count_by(n: usize, keep: impl Fn(usize, &[(usize, usize)]) -> bool) -> usize {
    let top = 1u64 << (n * (n - 1) / 2);
    (0..top)
        .filter(|&mask| keep(n, &edge_list(n, mask as u32)))
        .count()
}

#[test]
fn connected_counts_match_union_find_oracle() {
    // Literature values for labelled connected graphs (OEIS A001187).
    let frozen = [1usize, 1, 4, 38, 728, 26_704];
    for (n, &want) in (1..=6).zip(&frozen) {
        let oracle = count_by(n, connected_uf);
        let lib = graphs::enumerate_connected(n).unwrap().count();
        assert_eq!(oracle, want, "oracle deviates from frozen count at n = {n}");
        assert_eq!(lib, oracle, "library deviates from oracle at n = {n}");
    }
}

#[test]
fn biconnected_counts_match_union_find_oracle() {
    // Labelled 2-connected graphs (OEIS A013922), with the n = 2 edge
    // convention; n = 1 has none.
    let frozen = [0usize, 1, 1, 10, 238];
    for (n, &want) in (1..=5).zip(&frozen) {
        let oracle = count_by(n, biconnected_uf);
        let lib = graphs::enumerate_biconnected(n).unwrap().count();
        assert_eq!(oracle, want, "oracle deviates from frozen count at n = {n}");
        assert_eq!(lib, oracle, "library deviates from oracle at n = {n}");
    }
}

#[test]
fn classification_agrees_graph_by_graph() {
    // Not just the totals: the two classifiers must agree on every mask.
    for n in 2..=5 {
        let top = 1u64 << (n * (n - 1) / 2);
        for mask in 0..top {
            let edges = edge_list(n, mask as u32);
            // Translate this file's bit order into library edges.
            let mut lib_mask = 0u32;
            for &(i, j) in &edges {
                lib_mask |= 1 << graphs::pair_index(i, j);
            }
            let g = graphs::LabeledGraph::new(n, lib_mask).unwrap();
            assert_eq!(
                g.is_connected(),
                connected_uf(n, &edges),
                "n = {n}, mask = {mask}"
            );
            assert_eq!(
                g.is_biconnected(),
                biconnected_uf(n, &edges),
                "n = {n}, mask = {mask}"
            );
        }
    }
}

#[test]
fn tree_count_matches_exhaustive_tree_enumeration() {
    // Trees are exactly the connected graphs with n - 1 edges; their count
    // must equal Cayley's n^{n-2}.
    for n in 1..=6 {
        let by_enumeration = graphs::enumerate_connected(n)
            .unwrap()
            .filter(|g| g.edge_count() as usize == n - 1)
            .count() as u64;
        assert_eq!(graphs::tree_count(n).unwrap(), by_enumeration, "n = {n}");
    }
}

#[test]
fn penrose_value_matches_direct_alternating_sum() {
    // Recompute the alternating connected-subgraph sum with the union-find
    // classifier for a battery of incompatibility relations on 4 objects.
    for rel_mask in 0u32..(1 << 6) {
        let incompat = |i: usize, j: usize| rel_mask >> graphs::pair_index(i, j) & 1 == 1;
        let mut direct = 0i64;
        for sub in 0u64..(1 << 6) {
            let edges = edge_list(4, sub as u32);
            // Keep only subgraphs of the incompatibility relation.
            if !edges.iter().all(|&(i, j)| incompat(i, j)) {
                continue;
            }
            if connected_uf(4, &edges) {
                direct += if edges.len().is_multiple_of(2) { 1 } else { -1 };
            }
        }
        let lib = graphs::penrose_value(4, incompat).unwrap();
        assert_eq!(lib, direct, "relation mask {rel_mask:#b}");
    }
}

#[test]
fn penrose_complete_relation_closed_form() {
    // All pairs incompatible: phi^T = (-1)^{n-1} (n-1)!.
    let mut factorial = 1i64;
    for n in 2..=6usize {
        factorial *= n as i64 - 1;
        let sign = if n % 2 == 1 { 1 } else { -1 };
        assert_eq!(
            graphs::penrose_value(n, |_, _| true).unwrap(),
            sign * factorial,
            "n = {n}"
        );
    }
}
