//! Brute-force verification laboratory for the polymer representation of
//! the canonical partition function.
//!
//! For `N` particles on the torus of side `L`, the interaction part of the
//! partition function can be rewritten as a gas of *polymers*: nonempty
//! subsets `V` of `{1..N}` carrying activities
//!
//! ```text
//! zeta~(V) = sum over connected graphs g on V of
//!            \int prod_{{i,j} in E(g)} f^per_{ij} prod_{i in V} dq_i / (L K)
//! zeta(V)  = zeta~(V) - 1 for singletons,  zeta~(V) otherwise,
//! ```
//!
//! where `K >= 1` is the free normalisation constant of the polymer
//! measure (singletons get `zeta~ = 1/K`).  Two polymers are *compatible*
//! when their supports are disjoint.  Everything in this module evaluates
//! the small-`N` identities of that representation literally — partitions
//! and collections enumerated subset by subset, tuple sums taken term by
//! term — so that the expansion machinery can be checked against ground
//! truth rather than against itself.
//!
//! All quadrature uses midpoint tensor grids with a power-of-two point
//! count (so accuracy can be checked by halving), and all long sums use
//! compensated accumulation sharded in fixed index order (results do not
//! depend on the thread count).

use rayon::prelude::*;
use thiserror::Error;

use crate::graphs;
use crate::potentials::{self, PairPotential, PotentialError};
use crate::util::{binomial, KahanSum};

/// Largest site count for the dense activity table (`2^N - 1` subsets).
pub const MAX_SITES: usize = 6;
/// Largest site count for which activities are computed by quadrature.
pub const MAX_QUADRATURE_SITES: usize = 4;
/// Largest truncation order of the cluster-log sum.
pub const MAX_CLUSTER_ORDER: usize = 6;
/// Largest particle count for the direct partition-function quadrature.
pub const MAX_DIRECT_PARTICLES: usize = 3;

#[derive(Debug, Error, PartialEq)]
pub enum ClusterError {
    #[error("site count {0} out of range 1..={MAX_SITES}")]
    SiteCountOutOfRange(usize),
    #[error("site count {0} out of range 1..={MAX_QUADRATURE_SITES} for quadrature")]
    QuadratureSitesOutOfRange(usize),
    #[error("truncation order {0} out of range 1..={MAX_CLUSTER_ORDER}")]
    OrderOutOfRange(usize),
    #[error("particle count {0} out of range 1..={MAX_DIRECT_PARTICLES}")]
    ParticleCountOutOfRange(usize),
    #[error("grid point count {0} must be a power of two")]
    GridNotPowerOfTwo(usize),
    #[error(
        "grid has {points} points for {sites} sites: {evals:.1e} evaluations is out of budget"
    )]
    GridTooFine {
        points: usize,
        sites: usize,
        evals: f64,
    },
    #[error("quadrature requires a one-dimensional potential, got d={0}")]
    OneDimensionalOnly(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("potential error: {0}")]
    Potential(#[from] PotentialError),
}

/// Polymer activities for `N` sites, either one value per subset (dense)
/// or one value per cardinality (translation-invariant).
#[derive(Clone, Debug)]
pub struct ActivityTable {
    n_sites: usize,
    k_norm: f64,
    values: Values,
}

#[derive(Clone, Debug)]
enum Values {
    /// `zeta(V)` indexed by subset bitmask (entry 0 unused).
    Dense(Vec<f64>),
    /// `zeta(V)` indexed by `|V|` (entry 0 unused).
    ByCardinality(Vec<f64>),
}

impl ActivityTable {
    /// Dense table: `zeta_by_mask[mask]` is `zeta(V)` for the subset with
    /// bitmask `mask`; the length must be `2^n` (entry 0 is ignored).
    pub fn dense(
        n_sites: usize,
        k_norm: f64,
        zeta_by_mask: Vec<f64>,
    ) -> Result<Self, ClusterError> {
        check_sites(n_sites)?;
        check_k(k_norm)?;
        if zeta_by_mask.len() != 1 << n_sites {
            return Err(ClusterError::InvalidParameter(format!(
                "dense table needs 2^{n_sites} entries, got {}",
                zeta_by_mask.len()
            )));
        }
        Ok(Self {
            n_sites,
            k_norm,
            values: Values::Dense(zeta_by_mask),
        })
    }

    /// Translation-invariant table: `zeta_by_size[n]` is `zeta(V)` for any
    /// `|V| = n`; the length must be `n_sites + 1` (entry 0 is ignored).
    pub fn by_cardinality(
        n_sites: usize,
        k_norm: f64,
        zeta_by_size: Vec<f64>,
    ) -> Result<Self, ClusterError> {
        check_sites(n_sites)?;
        check_k(k_norm)?;
        if zeta_by_size.len() != n_sites + 1 {
            return Err(ClusterError::InvalidParameter(format!(
                "cardinality table needs {} entries, got {}",
                n_sites + 1,
                zeta_by_size.len()
            )));
        }
        Ok(Self {
            n_sites,
            k_norm,
            values: Values::ByCardinality(zeta_by_size),
        })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn k_norm(&self) -> f64 {
        self.k_norm
    }

    pub fn translation_invariant(&self) -> bool {
        matches!(self.values, Values::ByCardinality(_))
    }

    /// `zeta(V)` for the nonempty subset with bitmask `mask`.
    pub fn zeta(&self, mask: u32) -> f64 {
        debug_assert!(
            mask != 0 && (mask >> self.n_sites) == 0,
            "subset out of range"
        );
        match &self.values {
            Values::Dense(v) => v[mask as usize],
            Values::ByCardinality(v) => v[mask.count_ones() as usize],
        }
    }

    /// `zeta~(V)`: equals `zeta(V) + 1` on singletons, `zeta(V)` otherwise.
    pub fn zeta_tilde(&self, mask: u32) -> f64 {
        self.zeta(mask) + if mask.count_ones() == 1 { 1.0 } else { 0.0 }
    }

    /// Largest `|zeta(V)|` per cardinality, for feeding the convergence
    /// condition check.
    pub fn zeta_abs_by_size(&self) -> Vec<f64> {
        let mut out = vec![0.0f64; self.n_sites];
        for mask in 1..(1u32 << self.n_sites) {
            let n = mask.count_ones() as usize;
            out[n - 1] = out[n - 1].max(self.zeta(mask).abs());
        }
        out
    }
}

fn check_sites(n: usize) -> Result<(), ClusterError> {
    if n == 0 || n > MAX_SITES {
        return Err(ClusterError::SiteCountOutOfRange(n));
    }
    Ok(())
}

fn check_k(k: f64) -> Result<(), ClusterError> {
    if !k.is_finite() || k <= 0.0 {
        return Err(ClusterError::InvalidParameter(format!(
            "normalisation K must be positive and finite, got {k}"
        )));
    }
    Ok(())
}

/// The compatibility structure of subset polymers on `{1..N}`.
#[derive(Clone, Copy, Debug)]
pub struct PolymerFamily {
    n_sites: usize,
}

impl PolymerFamily {
    pub fn new(n_sites: usize) -> Result<Self, ClusterError> {
        check_sites(n_sites)?;
        Ok(Self { n_sites })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    /// Two polymers are compatible iff their supports are disjoint.
    pub fn compatible(&self, v: u32, w: u32) -> bool {
        v & w == 0
    }

    /// Hard-core pair indicator `phi`: 1 if the tuple is pairwise
    /// compatible, 0 otherwise.
    pub fn phi(&self, polymers: &[u32]) -> f64 {
        for b in 1..polymers.len() {
            for a in 0..b {
                if !self.compatible(polymers[a], polymers[b]) {
                    return 0.0;
                }
            }
        }
        1.0
    }

    /// Edge bitmask of the incompatibility graph of an ordered tuple
    /// (bit `pair_index(a, b)` set when `V_a` and `V_b` intersect).
    pub fn incompatibility_mask(&self, polymers: &[u32]) -> u32 {
        let mut h = 0u32;
        for b in 1..polymers.len() {
            for a in 0..b {
                if !self.compatible(polymers[a], polymers[b]) {
                    h |= 1 << graphs::pair_index(a, b);
                }
            }
        }
        h
    }

    /// Tree-truncated weight `phi^T` of an ordered tuple: the alternating
    /// connected-graph sum over its incompatibility relation.
    pub fn phi_tree(&self, polymers: &[u32]) -> Result<i64, graphs::GraphError> {
        graphs::penrose_value(polymers.len(), |a, b| {
            !self.compatible(polymers[a], polymers[b])
        })
    }
}

/// Both evaluations of the interaction partition function `Z^int`.
#[derive(Clone, Copy, Debug)]
pub struct PolymerPartition {
    /// Sum over unordered collections of pairwise-compatible polymers of
    /// `prod zeta(V)` (empty collection contributes 1).
    pub collection_form: f64,
    /// Sum over set partitions of `{1..N}` of `prod zeta~(block)`.
    pub partition_form: f64,
}

impl PolymerPartition {
    pub fn value(&self) -> f64 {
        self.collection_form
    }

    pub fn relative_residual(&self) -> f64 {
        (self.collection_form - self.partition_form).abs()
            / self.collection_form.abs().max(f64::MIN_POSITIVE)
    }
}

/// Evaluate `Z^int` by brute force in both forms.
///
/// The two forms are algebraically identical (expand `zeta~ = zeta + 1`
/// over singleton blocks); computing them independently and comparing is
/// the first consistency check of the representation.
pub fn polymer_partition(table: &ActivityTable) -> PolymerPartition {
    let n = table.n_sites();
    let full = (1u32 << n) - 1;
    // collection[rem]: sum over collections of disjoint polymers inside rem.
    let mut collection = vec![0.0f64; full as usize + 1];
    // partition[rem]: sum over partitions of exactly rem.
    let mut partition = vec![0.0f64; full as usize + 1];
    collection[0] = 1.0;
    partition[0] = 1.0;
    for rem in 1..=full {
        let e = rem & rem.wrapping_neg(); // lowest site of rem
        let rest = rem & !e;
        // Either site e is not covered by any polymer ...
        let mut coll = collection[rest as usize];
        let mut part = 0.0;
        // ... or it belongs to the polymer V = e | sub, sub subset of rest.
        let mut sub = rest;
        loop {
            let v = sub | e;
            let remainder = (rem & !v) as usize;
            coll += table.zeta(v) * collection[remainder];
            part += table.zeta_tilde(v) * partition[remainder];
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
        collection[rem as usize] = coll;
        partition[rem as usize] = part;
    }
    PolymerPartition {
        collection_form: collection[full as usize],
        partition_form: partition[full as usize],
    }
}

/// Truncated cluster-expansion logarithm: per-order terms
///
/// ```text
/// T_n = (1/n!) sum over ordered n-tuples (V_1..V_n) of nonempty subsets
///       phi^T(V_1..V_n) prod_k zeta(V_k)
/// ```
///
/// so that `sum_{n <= n_max} T_n` approximates `log Z^int`.
#[derive(Clone, Debug)]
pub struct ClusterExpansion {
    /// `T_1, .., T_{n_max}`.
    pub orders: Vec<f64>,
}

impl ClusterExpansion {
    /// Partial sum through order `k` (1-based; `k <= orders.len()`).
    pub fn partial(&self, k: usize) -> f64 {
        self.orders[..k].iter().sum()
    }

    pub fn total(&self) -> f64 {
        self.partial(self.orders.len())
    }
}

/// Evaluate the truncated cluster log by literal tuple enumeration.
///
/// `phi^T` of each tuple is looked up in the precomputed alternating-sum
/// table of its incompatibility graph.  Cost is `(2^N - 1)^n` tuples at
/// order `n`; the caps (`N <= 5`, `n_max <= 6`) keep the worst case under
/// `2^30` tuples.
pub fn cluster_log_truncated(
    table: &ActivityTable,
    n_max: usize,
) -> Result<ClusterExpansion, ClusterError> {
    let n_sites = table.n_sites();
    if n_sites > 5 {
        return Err(ClusterError::SiteCountOutOfRange(n_sites));
    }
    if n_max == 0 || n_max > MAX_CLUSTER_ORDER {
        return Err(ClusterError::OrderOutOfRange(n_max));
    }
    let subset_count = (1usize << n_sites) - 1;
    let zetas: Vec<f64> = (1..=subset_count).map(|m| table.zeta(m as u32)).collect();
    let masks: Vec<u32> = (1..=subset_count as u32).collect();

    let mut orders = Vec::with_capacity(n_max);
    let mut factorial = 1.0f64;
    for n in 1..=n_max {
        factorial *= n as f64;
        let tab = graphs::penrose_table(n).expect("n <= 6");
        // Shard on the first tuple slot; merge shards in index order.
        let shard_sums: Vec<KahanSum> = (0..subset_count)
            .into_par_iter()
            .map(|first| {
                let mut acc = KahanSum::new();
                let mut idx = vec![0usize; n];
                idx[0] = first;
                let mut tuple = vec![0u32; n];
                loop {
                    let mut prod = 1.0;
                    for (slot, &i) in idx.iter().enumerate() {
                        prod *= zetas[i];
                        tuple[slot] = masks[i];
                    }
                    if prod != 0.0 {
                        let mut h = 0u32;
                        for b in 1..n {
                            for a in 0..b {
                                if tuple[a] & tuple[b] != 0 {
                                    h |= 1 << graphs::pair_index(a, b);
                                }
                            }
                        }
                        let phi_t = tab[h as usize];
                        if phi_t != 0 {
                            acc.add(phi_t as f64 * prod);
                        }
                    }
                    // Odometer over slots 1..n (slot 0 is the shard).
                    let mut pos = n - 1;
                    loop {
                        if pos == 0 {
                            return acc;
                        }
                        idx[pos] += 1;
                        if idx[pos] < subset_count {
                            break;
                        }
                        idx[pos] = 0;
                        pos -= 1;
                    }
                }
            })
            .collect();
        let mut total = KahanSum::new();
        for s in shard_sums {
            total.merge(s);
        }
        orders.push(total.value() / factorial);
    }
    Ok(ClusterExpansion { orders })
}

/// The two inequalities of the convergence-condition check.
#[derive(Clone, Copy, Debug)]
pub struct KpReport {
    /// `sum_{n>=2} C(N-1, n-1) |zeta_n| e^{a n}`.
    pub multi_sum: f64,
    /// Its budget `e^a - 1`.
    pub multi_bound: f64,
    /// `(1 - 1/K) e^c + (e^c - 1)/e^c`.
    pub singleton_sum: f64,
    /// Its budget `e^c - 1`.
    pub singleton_bound: f64,
}

impl KpReport {
    pub fn holds(&self) -> bool {
        self.multi_sum <= self.multi_bound && self.singleton_sum <= self.singleton_bound
    }
}

/// Check the summability condition that drives the convergence proof:
/// the multi-site polymers must fit in the budget `e^a - 1`, and singletons
/// (weight `1 - 1/K` each) must fit next to the multi-site share
/// `(e^c - 1)/e^c`.  `c` defaults to `a`, the maximiser supplied by the
/// bounds machinery.
///
/// `zeta_abs[n-1]` is (a bound on) `|zeta(V)|` for `|V| = n`, `n = 1..=N`.
pub fn kp_check(zeta_abs: &[f64], a: f64, c: Option<f64>, k: f64) -> KpReport {
    assert!(a > 0.0 && k >= 1.0, "kp_check requires a > 0 and K >= 1");
    let n_sites = zeta_abs.len() as u64;
    let mut multi = KahanSum::new();
    for n in 2..=n_sites {
        multi.add(
            binomial(n_sites - 1, n - 1) * zeta_abs[n as usize - 1].abs() * (a * n as f64).exp(),
        );
    }
    let c = c.unwrap_or(a);
    let ec = c.exp();
    KpReport {
        multi_sum: multi.value(),
        multi_bound: a.exp() - 1.0,
        singleton_sum: (1.0 - 1.0 / k) * ec + (ec - 1.0) / ec,
        singleton_bound: ec - 1.0,
    }
}

/// Tree-graph estimate for the size-`n` activity:
/// `(e^{beta B + a} / K) n^{n-2} (e^{beta B + a} C_Lambda / (K volume))^{n-1}`.
pub fn zeta_tree_bound(
    n: usize,
    beta: f64,
    stab: f64,
    c_lambda: f64,
    volume: f64,
    k: f64,
    a: f64,
) -> f64 {
    assert!(n >= 1 && beta > 0.0 && stab >= 0.0 && c_lambda > 0.0 && volume > 0.0 && k > 0.0);
    let boost = (beta * stab + a).exp();
    (boost / k)
        * (n as f64).powi(n as i32 - 2)
        * (boost * c_lambda / (k * volume)).powi(n as i32 - 1)
}

/// Both sides of the activity-moment identity used in the first reduction
/// step of the expansion:
///
/// ```text
/// sum_{m>=1} (1/(m-1)!) (1 - 1/K)^{m-1}
///     sum_{m_1+..+m_{n+1} = m-1} multinomial(m-1; m_1..m_{n+1}) prod m_i!
///   = K^{n+1}
/// ```
///
/// Each composition contributes `multinomial * prod m_i! = (m-1)!`, so the
/// inner sum is `(m-1)! C(m-1+n, n)` and the series telescopes to the
/// negative binomial sum `sum_j C(j+n, n) x^j = (1-x)^{-(n+1)}` with
/// `x = 1 - 1/K`.  (The collapse is verified composition-by-composition in
/// the tests.)
#[derive(Clone, Copy, Debug)]
pub struct Step1Identity {
    pub lhs: f64,
    pub rhs: f64,
}

impl Step1Identity {
    pub fn relative_residual(&self) -> f64 {
        (self.lhs - self.rhs).abs() / self.rhs.abs()
    }
}

/// Evaluate the identity numerically, summing until terms drop below
/// `1e-14` past the series peak.
pub fn step1_identity(n: usize, k: f64) -> Result<Step1Identity, ClusterError> {
    if !k.is_finite() || k < 1.0 {
        return Err(ClusterError::InvalidParameter(format!(
            "K must be >= 1, got {k}"
        )));
    }
    if n > 16 {
        return Err(ClusterError::InvalidParameter(format!(
            "n = {n} too large (max 16)"
        )));
    }
    let x = 1.0 - 1.0 / k;
    let mut lhs = KahanSum::new();
    let mut coeff = 1.0f64; // C(j + n, n), starting at j = 0
    let mut xpow = 1.0f64;
    // Terms t_j = x^j C(j+n, n) rise until roughly j ~ n x / (1 - x).
    let peak = if x > 0.0 {
        n as f64 * x / (1.0 - x)
    } else {
        0.0
    };
    let mut j = 0u64;
    loop {
        let term = xpow * coeff;
        lhs.add(term);
        if (j as f64 > peak && term < 1e-14) || j > 100_000 {
            break;
        }
        coeff *= (j as f64 + 1.0 + n as f64) / (j as f64 + 1.0);
        xpow *= x;
        j += 1;
    }
    Ok(Step1Identity {
        lhs: lhs.value(),
        rhs: k.powi(n as i32 + 1),
    })
}

/// Falling-factorial density factor `P_{N,V}(n) = (N-1)(N-2)..(N-n) / V^n`
/// (zero at `n = 0` by convention, and automatically zero once `n >= N`).
pub fn density_factor(n_total: u64, volume: f64, n: usize) -> f64 {
    assert!(n_total >= 1 && volume > 0.0, "density_factor domain");
    if n == 0 {
        return 0.0;
    }
    let mut prod = 1.0;
    for i in 1..=n as u64 {
        if i >= n_total {
            return 0.0;
        }
        prod *= (n_total - i) as f64;
    }
    prod / volume.powi(n as i32)
}

/// Truncated free-case (ideal-gas) cluster log per particle:
/// `sum_{m=1}^{m_max} (-1)^{m-1} (1/K - 1)^m / m`, which converges to
/// `log(1/K) = -log K`.
pub fn free_case_log_series(k: f64, m_max: usize) -> f64 {
    assert!(k > 0.0 && k.is_finite(), "K must be positive");
    let z = 1.0 / k - 1.0;
    let mut sum = KahanSum::new();
    let mut zpow = 1.0;
    for m in 1..=m_max {
        zpow *= z;
        let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
        sum.add(sign * zpow / m as f64);
    }
    sum.value()
}

/// Midpoint nodes `-L/2 + (t + 1/2) h` and the periodic Mayer row
/// `f^per(t h)` folded into the box; entry `t` serves any index pair at
/// grid distance `t mod P`.
fn mayer_row(
    p: &PairPotential,
    beta: f64,
    box_side: f64,
    points: usize,
) -> Result<Vec<f64>, ClusterError> {
    let h = box_side / points as f64;
    (0..points)
        .map(|t| {
            let mut delta = t as f64 * h;
            if delta > box_side / 2.0 {
                delta -= box_side;
            }
            Ok(potentials::periodic_mayer_f(p, beta, box_side, &[delta])?)
        })
        .collect()
}

fn check_quadrature_args(
    p: &PairPotential,
    beta: f64,
    box_side: f64,
    grid_points: usize,
    free_dims: usize,
) -> Result<(), ClusterError> {
    if p.dimension() != 1 {
        return Err(ClusterError::OneDimensionalOnly(p.dimension()));
    }
    if !beta.is_finite() || beta <= 0.0 {
        return Err(ClusterError::InvalidParameter(format!(
            "beta must be positive and finite, got {beta}"
        )));
    }
    if !box_side.is_finite() || box_side <= 0.0 {
        return Err(ClusterError::InvalidParameter(format!(
            "box side must be positive and finite, got {box_side}"
        )));
    }
    if grid_points < 2 || !grid_points.is_power_of_two() {
        return Err(ClusterError::GridNotPowerOfTwo(grid_points));
    }
    let evals = (grid_points as f64).powi(free_dims as i32);
    if evals > 2f64.powi(34) {
        return Err(ClusterError::GridTooFine {
            points: grid_points,
            sites: free_dims + 1,
            evals,
        });
    }
    Ok(())
}

/// Fill a translation-invariant activity table from a one-dimensional
/// potential by tensor-grid quadrature on the torus of side `L`.
///
/// The size-`n` activity integrates over `n` positions, one of which is
/// pinned by discrete translation invariance (exact on the periodic
/// midpoint grid), so the cost is `grid_points^{n-1}` evaluations of the
/// connected-graph sum.
pub fn zeta_from_potential(
    p: &PairPotential,
    beta: f64,
    box_side: f64,
    k_norm: f64,
    n_sites: usize,
    grid_points: usize,
) -> Result<ActivityTable, ClusterError> {
    if n_sites == 0 || n_sites > MAX_QUADRATURE_SITES {
        return Err(ClusterError::QuadratureSitesOutOfRange(n_sites));
    }
    check_k(k_norm)?;
    check_quadrature_args(p, beta, box_side, grid_points, n_sites.saturating_sub(1))?;
    let frow = mayer_row(p, beta, box_side, grid_points)?;
    let h = box_side / grid_points as f64;

    let mut by_size = Vec::with_capacity(n_sites + 1);
    by_size.push(0.0);
    by_size.push(1.0 / k_norm - 1.0); // zeta on singletons
    for n in 2..=n_sites {
        let masks: Vec<u32> = graphs::enumerate_connected(n)
            .expect("n <= 4")
            .map(|g| g.edge_mask())
            .collect();
        let sum = grid_sum(grid_points, n - 1, |idx, fvals| {
            // Vertex 0 pinned at grid index 0, vertex v >= 1 at idx[v - 1].
            for b in 1..n {
                let ib = idx[b - 1];
                fvals[graphs::pair_index(0, b)] = frow[ib];
                for a in 1..b {
                    let ia = idx[a - 1];
                    fvals[graphs::pair_index(a, b)] = frow[(ia + grid_points - ib) % grid_points];
                }
            }
            let mut total = 0.0;
            'masks: for &mask in &masks {
                let mut prod = 1.0;
                let mut bits = mask;
                while bits != 0 {
                    let f = fvals[bits.trailing_zeros() as usize];
                    if f == 0.0 {
                        continue 'masks;
                    }
                    prod *= f;
                    bits &= bits - 1;
                }
                total += prod;
            }
            total
        });
        // zeta~_n = L h^{n-1} S / (L K)^n.
        by_size.push(box_side * h.powi(n as i32 - 1) * sum / (box_side * k_norm).powi(n as i32));
    }
    ActivityTable::by_cardinality(n_sites, k_norm, by_size)
}

/// Sum `integrand(idx, scratch)` over all `free_dims`-tuples of grid
/// indices, sharded on the first index and merged in index order.
fn grid_sum(
    points: usize,
    free_dims: usize,
    integrand: impl Fn(&[usize], &mut [f64; 28]) -> f64 + Sync,
) -> f64 {
    if free_dims == 0 {
        let mut scratch = [0.0f64; 28];
        return integrand(&[], &mut scratch);
    }
    let shard_sums: Vec<KahanSum> = (0..points)
        .into_par_iter()
        .map(|first| {
            let mut acc = KahanSum::new();
            let mut idx = vec![0usize; free_dims];
            idx[0] = first;
            let mut scratch = [0.0f64; 28];
            loop {
                acc.add(integrand(&idx, &mut scratch));
                let mut pos = free_dims - 1;
                loop {
                    if pos == 0 {
                        return acc;
                    }
                    idx[pos] += 1;
                    if idx[pos] < points {
                        break;
                    }
                    idx[pos] = 0;
                    pos -= 1;
                }
            }
        })
        .collect();
    let mut total = KahanSum::new();
    for s in shard_sums {
        total.merge(s);
    }
    total.value()
}

/// Direct evaluation of the periodic partition function for very small
/// particle numbers, with its polymer factorisation.
#[derive(Clone, Copy, Debug)]
pub struct DirectZ {
    /// `Z^per`: tensor-grid quadrature of `(1/N!) \int e^{-beta sum V^per}`.
    pub z_per: f64,
    /// `Z^free = (L K)^N / N!`.
    pub z_free: f64,
    /// `Z^int` from the polymer collection sum on the same grid.
    pub z_int: f64,
}

impl DirectZ {
    /// `|Z^per - Z^free Z^int| / Z^per`: the factorisation residual, which
    /// is pure floating-point noise when both sides share a grid.
    pub fn factorization_residual(&self) -> f64 {
        (self.z_per - self.z_free * self.z_int).abs() / self.z_per.abs().max(f64::MIN_POSITIVE)
    }
}

/// Quadrature `Z^per` and its polymer factorisation `Z^free Z^int` on the
/// same midpoint grid.
pub fn direct_z_small(
    p: &PairPotential,
    beta: f64,
    box_side: f64,
    k_norm: f64,
    n_particles: usize,
    grid_points: usize,
) -> Result<DirectZ, ClusterError> {
    if n_particles == 0 || n_particles > MAX_DIRECT_PARTICLES {
        return Err(ClusterError::ParticleCountOutOfRange(n_particles));
    }
    check_k(k_norm)?;
    check_quadrature_args(p, beta, box_side, grid_points, n_particles - 1)?;
    let n = n_particles;
    let brow: Vec<f64> = mayer_row(p, beta, box_side, grid_points)?
        .into_iter()
        .map(|f| f + 1.0)
        .collect();
    let h = box_side / grid_points as f64;
    let factorial: f64 = (1..=n).map(|k| k as f64).product();

    let sum = grid_sum(grid_points, n - 1, |idx, _| {
        let mut prod = 1.0;
        for b in 1..n {
            let ib = idx[b - 1];
            prod *= brow[ib];
            if prod == 0.0 {
                return 0.0;
            }
            for a in 1..b {
                let ia = idx[a - 1];
                prod *= brow[(ia + grid_points - ib) % grid_points];
                if prod == 0.0 {
                    return 0.0;
                }
            }
        }
        prod
    });
    let z_per = box_side * h.powi(n as i32 - 1) * sum / factorial;
    let z_free = (box_side * k_norm).powi(n as i32) / factorial;
    let table = zeta_from_potential(p, beta, box_side, k_norm, n, grid_points)?;
    let z_int = polymer_partition(&table).value();
    Ok(DirectZ {
        z_per,
        z_free,
        z_int,
    })
}
