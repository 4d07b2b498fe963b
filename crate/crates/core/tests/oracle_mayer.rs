//! Independent oracles for the hard-rod irreducible coefficients.
//!
//! Two routes that share nothing with the Monte Carlo estimator:
//!
//! 1. An *exact integer* evaluation.  With unit rods, split each coordinate
//!    into integer offset plus fractional part.  Every pair indicator
//!    `|x_i - x_j| < 1` is then constant on a cell indexed by the offsets
//!    and the ordering of the fractional parts, and every cell with a fixed
//!    ordering has volume `1/m!`.  Summing signs over (graph, offsets,
//!    ordering) gives `beta_m` as an exact rational `num / (m!)^2`.
//! 2. Midpoint tensor quadrature for `beta_2` on power-of-two grids, whose
//!    error must shrink linearly in the step (the integrand is an
//!    indicator, so halving the grid roughly halves the error).
//!
//! Both reproduce the closed form `beta_m = -(m+1)/m` frozen in the
//! library.

use clex_core::mayer;

/// Union-find connectivity, independent of the library's bitmask BFS.
fn connected(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for &(i, j) in edges {
        let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
        if ri != rj {
            parent[ri] = rj;
        }
    }
    let root = find(&mut parent, 0);
    (1..n).all(|v| find(&mut parent, v) == root)
}

fn biconnected(n: usize, edges: &[(usize, usize)]) -> bool {
    if n == 2 {
        return !edges.is_empty();
    }
    if !connected(n, edges) {
        return false;
    }
    (0..n).all(|removed| {
        let surviving: Vec<(usize, usize)> = edges
            .iter()
            .copied()
            .filter(|&(i, j)| i != removed && j != removed)
            // Relabel to 0..n-1 so the connectivity check sees n-1 vertices.
            .map(|(i, j)| {
                let shift = |v: usize| if v > removed { v - 1 } else { v };
                (shift(i), shift(j))
            })
            .collect();
        connected(n - 1, &surviving)
    })
}

/// All 2-connected graphs on `n` vertices as edge lists.
fn biconnected_graphs(n: usize) -> Vec<Vec<(usize, usize)>> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect();
    let mut out = Vec::new();
    for mask in 0u64..(1 << pairs.len()) {
        let edges: Vec<(usize, usize)> = pairs
            .iter()
            .enumerate()
            .filter(|(b, _)| mask >> b & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        if biconnected(n, &edges) {
            out.push(edges);
        }
    }
    out
}

fn permutations(m: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, rest: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..rest.len() {
            let v = rest.remove(i);
            prefix.push(v);
            rec(prefix, rest, out);
            prefix.pop();
            rest.insert(i, v);
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut (1..=m).collect(), &mut out);
    out
}

/// Exact `beta_m` for unit hard rods by cell decomposition: the signed
/// count of valid (graph, offsets, ordering) cells over `(m!)^2`.
///
/// Vertex 0 is pinned at the origin: offset 0, fractional part 0 (smallest
/// rank).  For an edge with offset difference `d = c_i - c_j` the indicator
/// `|x_i - x_j| < 1` holds iff `d = 0`, or `|d| = 1` and the fractional
/// parts are ordered to cancel the unit offset; `|d| >= 2` never holds.
fn beta_m_cell_oracle(m: usize) -> (i64, i64) {
    let n = m + 1;
    let graphs = biconnected_graphs(n);
    let perms = permutations(m);
    let mut num = 0i64;
    // Offsets of vertices 1..m range over {-m..m} (graph diameter <= m).
    let width = 2 * m + 1;
    let mut offsets = vec![0i64; n]; // offsets[0] stays 0
    let total = (width as u64).pow(m as u32);
    for code in 0..total {
        let mut c = code;
        for slot in offsets.iter_mut().skip(1) {
            *slot = (c % width as u64) as i64 - m as i64;
            c /= width as u64;
        }
        for perm in &perms {
            // ranks[v]: position of the fractional part of vertex v; vertex
            // 0 has rank 0 (its fractional part is exactly zero).
            let mut ranks = vec![0usize; n];
            for (slot, &v) in perm.iter().enumerate() {
                ranks[v] = slot + 1;
            }
            for edges in &graphs {
                let ok = edges.iter().all(|&(i, j)| match offsets[i] - offsets[j] {
                    0 => true,
                    1 => ranks[i] < ranks[j],
                    -1 => ranks[i] > ranks[j],
                    _ => false,
                });
                if ok {
                    num += if edges.len() % 2 == 0 { 1 } else { -1 };
                }
            }
        }
    }
    let m_fact: i64 = (1..=m as i64).product();
    (num, m_fact * m_fact)
}

#[test]
fn cell_oracle_reproduces_closed_form_exactly() {
    // beta_m = -(m+1)/m exactly: numerators must divide out with no
    // remainder, so this is an integer identity, not a float comparison.
    for m in 1..=4usize {
        let (num, den) = beta_m_cell_oracle(m);
        // -(m+1)/m == num/den  <=>  num * m == -(m+1) * den.
        assert_eq!(
            num * m as i64,
            -((m as i64 + 1) * den),
            "m = {m}: cells gave {num}/{den}"
        );
        let lib = mayer::beta_m_exact_hardrod(m, 1.0);
        assert!(
            (lib - num as f64 / den as f64).abs() < 1e-15,
            "library closed form disagrees at m = {m}"
        );
    }
}

#[test]
fn cell_oracle_scales_with_rod_length() {
    // beta_m for rods of length sigma is sigma^m times the unit value
    // (pure dilation); the library closed form must carry that factor.
    let (num, den) = beta_m_cell_oracle(2);
    let unit = num as f64 / den as f64;
    for &sigma in &[0.5, 1.0, 2.5] {
        let want = unit * sigma * sigma;
        assert!((mayer::beta_m_exact_hardrod(2, sigma) - want).abs() < 1e-14);
    }
}

/// Midpoint quadrature for `beta_2 = (1/2) \int f(x) f(y) f(x-y) dx dy`
/// with `f = -1[|.| < 1]`, on a `points^2` grid over `[-2, 2]^2`.
fn beta_2_midpoint(points: usize) -> f64 {
    let half = 2.0;
    let h = 2.0 * half / points as f64;
    let f = |x: f64| if x.abs() < 1.0 { -1.0 } else { 0.0 };
    let mut sum = 0.0;
    for i in 0..points {
        let x = -half + (i as f64 + 0.5) * h;
        if f(x) == 0.0 {
            continue;
        }
        for j in 0..points {
            let y = -half + (j as f64 + 0.5) * h;
            sum += f(x) * f(y) * f(x - y);
        }
    }
    0.5 * sum * h * h
}

#[test]
fn quadrature_error_halves_with_the_step() {
    let exact = -1.5;
    let mut prev_err = f64::INFINITY;
    for &p in &[64usize, 128, 256, 512] {
        let err = (beta_2_midpoint(p) - exact).abs();
        // Indicator integrands converge at first order: error ~ 2/points.
        assert!(err < 2.5 / p as f64, "points = {p}: error = {err}");
        let ratio = prev_err / err;
        if prev_err.is_finite() {
            assert!(
                (1.7..=2.4).contains(&ratio),
                "points = {p}: ratio = {ratio}"
            );
        }
        prev_err = err;
    }
}

#[test]
fn monte_carlo_agrees_with_cell_oracle() {
    use clex_core::potentials::PairPotential;
    let rod = PairPotential::hard_rod(1.0).unwrap();
    for m in 1..=3usize {
        let (num, den) = beta_m_cell_oracle(m);
        let exact = num as f64 / den as f64;
        let est = mayer::beta_m_monte_carlo(&rod, 1.0, m, 200_000, 0x5EED).unwrap();
        let tol = 4.0 * est.std_error + 1e-12;
        assert!(
            (est.mean - exact).abs() <= tol,
            "m = {m}: mean = {}, exact = {exact}, 4se = {tol}",
            est.mean
        );
    }
}
