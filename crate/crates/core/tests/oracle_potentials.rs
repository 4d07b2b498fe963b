//! Independent oracles for the thermodynamic constants: the temperedness
//! integral is recomputed by plain Riemann summation, and the stability
//! constant is attacked with explicit particle configurations.

use clex_core::potentials::{
    self, evaluate, stability_constant, temperedness_integral, unit_ball_volume, Energy,
    PairPotential,
};
use clex_core::rng::CounterRng;

/// `C(beta)` by midpoint Riemann sum of `(1 - e^{-beta |V(r)|})` against
/// the radial measure `d v_d(1) r^{d-1} dr` — no closed forms involved.
fn temperedness_by_riemann(p: &PairPotential, beta: f64, steps: usize) -> f64 {
    let d = p.dimension();
    let r_max = p.range() * 1.25; // padding: integrand vanishes beyond range
    let h = r_max / steps as f64;
    let surface = d as f64 * unit_ball_volume(d);
    let mut sum = 0.0;
    for i in 0..steps {
        let r = (i as f64 + 0.5) * h;
        let mut x = vec![0.0; d];
        x[0] = r;
        let absweight = match evaluate(p, &x).unwrap() {
            Energy::Infinite => 1.0,
            Energy::Finite(v) => 1.0 - (-beta * v.abs()).exp(),
        };
        sum += absweight * surface * r.powi(d as i32 - 1);
    }
    sum * h
}

#[test]
fn temperedness_matches_riemann_oracle() {
    let cases = vec![
        PairPotential::hard_rod(1.0).unwrap(),
        PairPotential::hard_rod(0.37).unwrap(),
        PairPotential::hard_core(1.0, 2).unwrap(),
        PairPotential::hard_core(1.0, 3).unwrap(),
        PairPotential::hard_core(0.8, 5).unwrap(),
        PairPotential::square_well(1.0, 0.5, 0.7, 1).unwrap(),
        PairPotential::square_well(1.0, 1.2, 0.5, 3).unwrap(),
    ];
    for p in &cases {
        for &beta in &[0.5, 1.0, 2.0] {
            let lib = temperedness_integral(p, beta);
            let oracle = temperedness_by_riemann(p, beta, 1_000_000);
            assert!(
                (lib - oracle).abs() / oracle < 1e-4,
                "{p:?} at beta = {beta}: {lib} vs {oracle}"
            );
        }
    }
}

/// Total pair energy of a configuration; `None` when some pair overlaps a
/// hard core.
fn total_energy(p: &PairPotential, points: &[Vec<f64>]) -> Option<f64> {
    let mut total = 0.0;
    for j in 1..points.len() {
        for i in 0..j {
            let diff: Vec<f64> = points[i]
                .iter()
                .zip(&points[j])
                .map(|(a, b)| a - b)
                .collect();
            match evaluate(p, &diff).unwrap() {
                Energy::Infinite => return None,
                Energy::Finite(v) => total += v,
            }
        }
    }
    Some(total)
}

#[test]
fn stability_chain_saturates_the_one_dimensional_bound() {
    // A close-packed chain of rods is the worst case in one dimension: the
    // energy per particle must approach -B from above as the chain grows.
    let (sigma, epsilon) = (1.0, 0.8);
    for &width in &[0.5, 1.7, 2.3] {
        let p = PairPotential::square_well(sigma, epsilon, width, 1).unwrap();
        let b = stability_constant(&p);
        let n = 400usize;
        let chain: Vec<Vec<f64>> = (0..n).map(|k| vec![k as f64 * sigma]).collect();
        let u = total_energy(&p, &chain).expect("chain has no overlaps");
        assert!(u >= -(n as f64) * b, "width = {width}: U = {u} < -NB");
        // Tightness: the deficit is a boundary effect of order 1/N.
        let per = u / n as f64;
        let m0 = ((sigma + width) / sigma).ceil() - 1.0;
        let slack = epsilon * (m0 + 1.0) * (m0 + 1.0) / n as f64;
        assert!(
            per <= -b + slack,
            "width = {width}: U/N = {per} misses -B = {} by more than {slack}",
            -b
        );
    }
}

#[test]
fn stability_holds_on_random_configurations() {
    // No configuration — random or crafted — may dip below -NB.  Overlapping
    // draws have infinite energy and satisfy the bound trivially.
    let rng = CounterRng::new(0x5EED, 21);
    let mut checked = 0;
    for (dim, side) in [(1usize, 24.0f64), (2, 8.0), (3, 5.0)] {
        let p = PairPotential::square_well(1.0, 1.5, 1.1, dim).unwrap();
        let b = stability_constant(&p);
        let n = 5usize;
        for trial in 0..200u64 {
            let pts: Vec<Vec<f64>> = (0..n)
                .map(|k| {
                    (0..dim)
                        .map(|c| {
                            let idx = ((trial * n as u64 + k as u64) * dim as u64) + c as u64;
                            rng.uniform_in(dim as u64 * 1_000_000 + idx, 0.0, side)
                        })
                        .collect()
                })
                .collect();
            if let Some(u) = total_energy(&p, &pts) {
                checked += 1;
                assert!(
                    u >= -(n as f64) * b,
                    "d = {dim}, trial {trial}: U = {u}, -NB = {}",
                    -(n as f64) * b
                );
            }
        }
    }
    assert!(
        checked > 50,
        "too few overlap-free draws to be meaningful: {checked}"
    );
}

#[test]
fn hard_potentials_have_zero_stability_constant() {
    assert_eq!(
        stability_constant(&PairPotential::hard_rod(2.0).unwrap()),
        0.0
    );
    assert_eq!(
        stability_constant(&PairPotential::hard_core(1.0, 3).unwrap()),
        0.0
    );
}

#[test]
fn thermo_params_bundle_is_consistent() {
    let p = PairPotential::square_well(1.0, 0.9, 0.6, 2).unwrap();
    let t = potentials::ThermoParams::new(&p, 1.7).unwrap();
    assert_eq!(t.beta, 1.7);
    assert_eq!(t.stability, stability_constant(&p));
    assert_eq!(t.temperedness, temperedness_integral(&p, 1.7));
}
