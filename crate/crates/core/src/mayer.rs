//! Irreducible Mayer coefficients by Monte Carlo over 2-connected graphs.
//!
//! The order-`m` coefficient is the sum over 2-connected graphs `g` on
//! `m + 1` labelled vertices of the integral of the product of Mayer
//! factors over the edges of `g`, with particle 1 pinned at the origin:
//!
//! ```text
//! beta_m = (1/m!) sum_{g 2-connected on {1..m+1}}
//!          \int prod_{{i,j} in g} f(q_i - q_j) dq_2 .. dq_{m+1}
//! ```
//!
//! Every integrand has support inside `[-m r_V, m r_V]^d` per coordinate
//! (each free particle is within graph distance `m` of the pinned one), so
//! uniform sampling on that box with the volume factor gives an unbiased
//! estimator.  A finite-volume variant integrates over a periodic box
//! instead and converges to `beta_m` as the box grows.
//!
//! Determinism: samples are drawn from a counter-based stream keyed by
//! `(seed, m)` and accumulated in fixed blocks of 8192; block sums are
//! merged in block order, so the result is bit-identical for any thread
//! count.
//!
//! For one-dimensional hard rods the exact values are known in closed form,
//! `beta_m = -((m+1)/m) sigma^m`, which makes the estimator fully testable.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::graphs;
use crate::potentials::{self, PairPotential};
use crate::rng::CounterRng;

/// Largest Monte Carlo order: `m = 4` already sums 238 graphs per sample;
/// beyond that the estimator variance and graph count grow out of scope.
pub const MAX_ORDER: usize = 4;

/// Samples per accumulation block; fixed so that parallel runs reduce in a
/// thread-count-independent order.
const BLOCK: u64 = 8192;

#[derive(Debug, Error, PartialEq)]
pub enum MayerError {
    #[error("order m={0} out of range 1..={MAX_ORDER}")]
    OrderOutOfRange(usize),
    #[error("sample count must be positive")]
    NoSamples,
    #[error("potential error: {0}")]
    Potential(#[from] potentials::PotentialError),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// A Monte Carlo estimate of one coefficient.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct MayerEstimate {
    pub m: usize,
    pub mean: f64,
    pub std_error: f64,
    pub samples: u64,
    pub seed: u64,
}

/// Finite-volume estimate: the periodic-box analogue of `beta_m` together
/// with a flag raised when the box is small enough (`L <= 2 m r_V`) for
/// periodic images to bias the integrand.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct FiniteVolumeEstimate {
    pub estimate: MayerEstimate,
    pub box_side: f64,
    pub box_warning: bool,
}

/// Exact hard-rod coefficient `beta_m = -((m+1)/m) sigma^m`.
pub fn beta_m_exact_hardrod(m: usize, sigma: f64) -> f64 {
    assert!(m >= 1, "order must be >= 1");
    -((m + 1) as f64 / m as f64) * sigma.powi(m as i32)
}

/// Monte Carlo estimate of `beta_m` on the free-space box `[-m r_V, m r_V]^d`.
pub fn beta_m_monte_carlo(
    p: &PairPotential,
    beta: f64,
    m: usize,
    samples: u64,
    seed: u64,
) -> Result<MayerEstimate, MayerError> {
    check_common(beta, m, samples)?;
    let half = m as f64 * p.range();
    let pot = *p;
    run_estimator(p, m, samples, seed, half, move |diff| {
        // Support lies inside the box, no folding needed.
        potentials::mayer_f(&pot, beta, diff).expect("dimension fixed by caller")
    })
}

/// Monte Carlo estimate of the finite-volume coefficient on the periodic
/// box `(-L/2, L/2]^d`; converges to `beta_m` as `L -> inf`.
pub fn w_star_finite_volume(
    p: &PairPotential,
    beta: f64,
    m: usize,
    box_side: f64,
    samples: u64,
    seed: u64,
) -> Result<FiniteVolumeEstimate, MayerError> {
    check_common(beta, m, samples)?;
    if !box_side.is_finite() || box_side <= 0.0 {
        return Err(MayerError::InvalidParameter(format!(
            "box side must be positive and finite, got {box_side}"
        )));
    }
    let pot = *p;
    let l = box_side;
    let estimate = run_estimator(p, m, samples, seed, l / 2.0, move |diff| {
        // Differences of box points lie in (-L, L); fold into (-L/2, L/2].
        let mut folded = [0.0f64; 8];
        for (dst, &c) in folded.iter_mut().zip(diff.iter()) {
            *dst = if c > l / 2.0 {
                c - l
            } else if c <= -l / 2.0 {
                c + l
            } else {
                c
            };
        }
        potentials::periodic_mayer_f(&pot, beta, l, &folded[..diff.len()])
            .expect("folded point lies in the box")
    })?;
    Ok(FiniteVolumeEstimate {
        estimate,
        box_side,
        box_warning: box_side <= 2.0 * m as f64 * p.range(),
    })
}

fn check_common(beta: f64, m: usize, samples: u64) -> Result<(), MayerError> {
    if m == 0 || m > MAX_ORDER {
        return Err(MayerError::OrderOutOfRange(m));
    }
    if samples == 0 {
        return Err(MayerError::NoSamples);
    }
    if !beta.is_finite() || beta <= 0.0 {
        return Err(MayerError::InvalidParameter(format!(
            "beta must be positive and finite, got {beta}"
        )));
    }
    Ok(())
}

/// Shared estimator: draw the `m` free particles uniformly in
/// `[-half, half]^d`, evaluate the signed graph sum, scale by the box
/// volume over `m!`.
fn run_estimator(
    p: &PairPotential,
    m: usize,
    samples: u64,
    seed: u64,
    half: f64,
    pair_f: impl Fn(&[f64]) -> f64 + Sync,
) -> Result<MayerEstimate, MayerError> {
    let d = p.dimension();
    if d > 8 {
        return Err(MayerError::InvalidParameter(format!(
            "Monte Carlo estimator supports d <= 8, got {d}"
        )));
    }
    let n = m + 1;
    let graph_masks: Vec<u32> = graphs::enumerate_biconnected(n)
        .expect("n <= 5 by the order cap")
        .map(|g| g.edge_mask())
        .collect();
    let factorial: f64 = (1..=m).map(|k| k as f64).product();
    let volume_factor = (2.0 * half).powi((d * m) as i32) / factorial;
    let rng = CounterRng::new(seed, m as u64);
    let dims_per_sample = (m * d) as u64;

    let blocks = samples.div_ceil(BLOCK);
    let partials: Vec<(f64, f64)> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let lo = b * BLOCK;
            let hi = ((b + 1) * BLOCK).min(samples);
            let mut pos = vec![0.0f64; n * d]; // particle 0 pinned at origin
            let mut diff = [0.0f64; 8];
            let mut fpairs = [0.0f64; 28];
            let mut sum = 0.0;
            let mut sumsq = 0.0;
            for s in lo..hi {
                let base = s * dims_per_sample;
                for k in 1..n {
                    for j in 0..d {
                        pos[k * d + j] =
                            rng.uniform_in(base + ((k - 1) * d + j) as u64, -half, half);
                    }
                }
                for jv in 1..n {
                    for iv in 0..jv {
                        for j in 0..d {
                            diff[j] = pos[iv * d + j] - pos[jv * d + j];
                        }
                        fpairs[graphs::pair_index(iv, jv)] = pair_f(&diff[..d]);
                    }
                }
                let mut graph_sum = 0.0;
                'graphs: for &mask in &graph_masks {
                    let mut prod = 1.0;
                    let mut bits = mask;
                    while bits != 0 {
                        let f = fpairs[bits.trailing_zeros() as usize];
                        if f == 0.0 {
                            continue 'graphs; // short-circuit zero factors
                        }
                        prod *= f;
                        bits &= bits - 1;
                    }
                    graph_sum += prod;
                }
                let value = volume_factor * graph_sum;
                sum += value;
                sumsq += value * value;
            }
            (sum, sumsq)
        })
        .collect();

    // Sequential merge in block order: bit-identical at any thread count.
    let mut sum = 0.0;
    let mut sumsq = 0.0;
    for (s, s2) in partials {
        sum += s;
        sumsq += s2;
    }
    let nf = samples as f64;
    let mean = sum / nf;
    let std_error = if samples > 1 {
        let var = ((sumsq - nf * mean * mean) / (nf - 1.0)).max(0.0);
        (var / nf).sqrt()
    } else {
        0.0
    };
    Ok(MayerEstimate {
        m,
        mean,
        std_error,
        samples,
        seed,
    })
}

/// Truncated free-energy series
/// `f(rho) = (1/beta) [ rho (log rho - 1) - sum_{m=1}^{M} beta_m rho^{m+1} / (m+1) ]`.
#[derive(Clone, Debug, Serialize)]
pub struct FreeEnergySeries {
    pub rho: f64,
    pub f_series: f64,
    pub f_ideal: f64,
    pub coefficients: Vec<f64>,
}

/// Evaluate the series from given coefficients `beta_1 .. beta_M`.
pub fn free_energy_series(beta: f64, rho: f64, coefficients: &[f64]) -> FreeEnergySeries {
    assert!(beta > 0.0 && rho > 0.0, "free_energy_series domain");
    let f_ideal = rho * (rho.ln() - 1.0) / beta;
    let mut correction = 0.0;
    for (idx, &bm) in coefficients.iter().enumerate() {
        let m = idx + 1;
        correction += bm * rho.powi(m as i32 + 1) / (m + 1) as f64;
    }
    FreeEnergySeries {
        rho,
        f_series: f_ideal - correction / beta,
        f_ideal,
        coefficients: coefficients.to_vec(),
    }
}

/// Exact Tonks-gas free energy per volume for hard rods of length `sigma`:
/// `f = (1/beta) (rho log(rho / (1 - rho sigma)) - rho)`, for
/// `rho sigma < 1`.
pub fn tonks_free_energy(beta: f64, rho: f64, sigma: f64) -> f64 {
    assert!(
        beta > 0.0 && rho > 0.0 && sigma > 0.0 && rho * sigma < 1.0,
        "tonks domain"
    );
    (rho * (rho / (1.0 - rho * sigma)).ln() - rho) / beta
}

/// Tail of the hard-rod series beyond order `M`:
/// `rho * sum_{m > M} (rho sigma)^m / m` (in units of `beta f`).  This is
/// exactly the truncation error of [`free_energy_series`] with the exact
/// hard-rod coefficients at `beta = 1`.
pub fn tonks_tail_bound(rho: f64, sigma: f64, order: usize) -> f64 {
    assert!(
        rho > 0.0 && sigma > 0.0 && rho * sigma < 1.0,
        "tonks domain"
    );
    let x = rho * sigma;
    let mut tail = 0.0;
    let mut term = x.powi(order as i32);
    for m in (order + 1)..10_000 {
        term *= x;
        let t = term / m as f64;
        tail += t;
        if t < 1e-300 || t < 1e-18 * tail {
            break;
        }
    }
    rho * tail
}
