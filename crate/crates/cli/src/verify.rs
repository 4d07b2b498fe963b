//! The verification suites behind `verify-polymer` and `verify-identities`:
//! each check is reported as one row with both sides, the residual, and a
//! pass flag, so a failing run documents exactly what broke.

use clex_core::cluster::{
    cluster_log_truncated, direct_z_small, free_case_log_series, polymer_partition, step1_identity,
    zeta_from_potential, ClusterError,
};
use clex_core::graphs::penrose_value;
use clex_core::potentials::PairPotential;
use serde::Serialize;

/// One verified identity.
#[derive(Serialize)]
pub struct IdentityRow {
    pub identity: String,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub pass: bool,
}

#[derive(Serialize)]
pub struct VerifyReport {
    pub checks: Vec<IdentityRow>,
    pub all_pass: bool,
}

impl VerifyReport {
    fn new(checks: Vec<IdentityRow>) -> Self {
        let all_pass = checks.iter().all(|c| c.pass);
        Self { checks, all_pass }
    }
}

fn relative(lhs: f64, rhs: f64) -> f64 {
    (lhs - rhs).abs() / rhs.abs().max(f64::MIN_POSITIVE)
}

fn row(identity: impl Into<String>, lhs: f64, rhs: f64, tol: f64) -> IdentityRow {
    let residual = relative(lhs, rhs);
    IdentityRow {
        identity: identity.into(),
        lhs,
        rhs,
        residual,
        pass: residual < tol,
    }
}

/// Brute-force polymer identities for one potential on the torus.
///
/// * the partition and collection forms of `Z^int` agree (pure recursion
///   identity, tolerance `1e-12`);
/// * `exp` of the truncated cluster log approaches `Z^int` geometrically
///   (each added order shrinks the residual by at least the factor 0.85);
/// * for up to three particles, `Z^per = Z^free Z^int` on the shared grid
///   (tolerance `1e-6`).
pub fn polymer_suite(
    p: &PairPotential,
    beta: f64,
    box_side: f64,
    k_norm: f64,
    n_sites: usize,
    n_max: usize,
    grid: usize,
) -> Result<VerifyReport, ClusterError> {
    let table = zeta_from_potential(p, beta, box_side, k_norm, n_sites, grid)?;
    let z = polymer_partition(&table);
    let mut checks = vec![row(
        "partition_vs_collection",
        z.collection_form,
        z.partition_form,
        1e-12,
    )];

    let expansion = cluster_log_truncated(&table, n_max)?;
    let mut residuals = Vec::with_capacity(n_max);
    for order in 1..=n_max {
        residuals.push((expansion.partial(order).exp() - z.value()).abs());
    }
    let geometric = residuals.windows(2).all(|w| w[1] <= 0.85 * w[0]);
    let final_resid = *residuals.last().expect("n_max >= 1");
    checks.push(IdentityRow {
        identity: format!("cluster_log_geometric_convergence_nmax{n_max}"),
        lhs: expansion.total().exp(),
        rhs: z.value(),
        residual: final_resid / z.value().abs().max(f64::MIN_POSITIVE),
        pass: geometric,
    });

    if n_sites <= 3 {
        let direct = direct_z_small(p, beta, box_side, k_norm, n_sites, grid)?;
        checks.push(row(
            "z_periodic_factorization",
            direct.z_per,
            direct.z_free * direct.z_int,
            1e-6,
        ));
    }
    Ok(VerifyReport::new(checks))
}

/// The potential-free combinatorial suite: Penrose closed form, the
/// single-polymer moment identity, and the free-case logarithm.
pub fn identity_suite() -> VerifyReport {
    let mut checks = Vec::new();

    let mut factorial = 1.0f64;
    for n in 2..=6usize {
        factorial *= n as f64 - 1.0;
        let sign = if n % 2 == 0 { -1.0 } else { 1.0 };
        let lhs = penrose_value(n, |_, _| true).expect("n <= 8") as f64;
        let rhs = sign * factorial;
        checks.push(IdentityRow {
            identity: format!("penrose_complete_n{n}"),
            lhs,
            rhs,
            residual: (lhs - rhs).abs(),
            pass: lhs == rhs,
        });
    }

    for &k in &[1.01, 1.1462, 1.5, 2.0, 3.0] {
        for n in 0..=6usize {
            let s = step1_identity(n, k).expect("K >= 1, n <= 16");
            checks.push(row(format!("step1_n{n}_K{k}"), s.lhs, s.rhs, 1e-9));
        }
        // 80 terms: the term ratio is 1 - 1/K, so even at K = 3 the tail
        // is below 1e-15.
        let lhs = free_case_log_series(k, 80);
        let rhs = -k.ln();
        checks.push(IdentityRow {
            identity: format!("free_case_log_K{k}"),
            lhs,
            rhs,
            residual: (lhs - rhs).abs(),
            pass: (lhs - rhs).abs() < 1e-10,
        });
    }
    VerifyReport::new(checks)
}
