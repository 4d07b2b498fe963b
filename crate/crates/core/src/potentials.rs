//! Pair potential catalog for the expansion machinery.
//!
//! The catalog is deliberately closed: every potential here is stable,
//! tempered and of finite range, which is exactly what the convergence
//! machinery assumes.  Three families are provided:
//!
//! * **Hard core** in `d >= 1` dimensions: `V(x) = +inf` for `|x| < sigma`,
//!   `0` otherwise.
//! * **Hard rod**: the one-dimensional hard core, kept as its own kind
//!   because the exact Tonks-gas references apply to it.
//! * **Square well**: hard core of radius `sigma` plus an attractive shell
//!   of depth `epsilon >= 0` and width `well_width > 0`.
//!
//! Infinite energy is a distinguished [`Energy`] variant, never an IEEE
//! overflow: the Boltzmann factor of an overlap is exactly `0`, so Mayer
//! `f`-factors of hard pairs are exactly `-1`.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PotentialError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("dimension mismatch: potential lives in d={expected}, point has d={got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("point lies outside the periodic box (-L/2, L/2]: coordinate {0}")]
    OutsideBox(f64),
}

/// A pair energy; `Infinite` marks hard-core overlap.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Energy {
    Finite(f64),
    Infinite,
}

impl Energy {
    /// `e^{-beta V}`, exactly `0` for an overlap.
    #[inline]
    pub fn boltzmann(self, beta: f64) -> f64 {
        match self {
            Energy::Finite(v) => (-beta * v).exp(),
            Energy::Infinite => 0.0,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Energy::Infinite)
    }
}

impl std::ops::Add for Energy {
    type Output = Energy;

    /// Hard-core overlaps absorb everything: `Infinite + x = Infinite`.
    fn add(self, other: Energy) -> Energy {
        match (self, other) {
            (Energy::Finite(a), Energy::Finite(b)) => Energy::Finite(a + b),
            _ => Energy::Infinite,
        }
    }
}

/// The closed catalog of pair potentials.
///
/// Invariants (enforced by the constructors, assumed everywhere else):
/// `sigma > 0`; hard rods are one-dimensional; for the square well
/// `epsilon >= 0` and `well_width > 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PairPotential {
    HardCore {
        sigma: f64,
        dim: usize,
    },
    HardRod {
        sigma: f64,
    },
    SquareWell {
        sigma: f64,
        epsilon: f64,
        well_width: f64,
        dim: usize,
    },
}

/// Inverse temperature together with the derived constants the bounds
/// machinery consumes: the stability constant `B` and the temperedness
/// integral `C(beta)`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ThermoParams {
    pub beta: f64,
    pub stability: f64,
    pub temperedness: f64,
}

impl ThermoParams {
    pub fn new(potential: &PairPotential, beta: f64) -> Result<Self, PotentialError> {
        if !beta.is_finite() || beta <= 0.0 {
            return Err(PotentialError::InvalidParameter(format!(
                "beta must be positive and finite, got {beta}"
            )));
        }
        Ok(Self {
            beta,
            stability: stability_constant(potential),
            temperedness: temperedness_integral(potential, beta),
        })
    }
}

impl PairPotential {
    pub fn hard_core(sigma: f64, dim: usize) -> Result<Self, PotentialError> {
        check_sigma(sigma)?;
        check_dim(dim)?;
        Ok(PairPotential::HardCore { sigma, dim })
    }

    pub fn hard_rod(sigma: f64) -> Result<Self, PotentialError> {
        check_sigma(sigma)?;
        Ok(PairPotential::HardRod { sigma })
    }

    pub fn square_well(
        sigma: f64,
        epsilon: f64,
        well_width: f64,
        dim: usize,
    ) -> Result<Self, PotentialError> {
        check_sigma(sigma)?;
        check_dim(dim)?;
        if !epsilon.is_finite() || epsilon < 0.0 {
            return Err(PotentialError::InvalidParameter(format!(
                "eps must be >= 0 and finite, got {epsilon}"
            )));
        }
        if !well_width.is_finite() || well_width <= 0.0 {
            return Err(PotentialError::InvalidParameter(format!(
                "width must be > 0 and finite, got {well_width}"
            )));
        }
        Ok(PairPotential::SquareWell {
            sigma,
            epsilon,
            well_width,
            dim,
        })
    }

    pub fn dimension(&self) -> usize {
        match *self {
            PairPotential::HardCore { dim, .. } => dim,
            PairPotential::HardRod { .. } => 1,
            PairPotential::SquareWell { dim, .. } => dim,
        }
    }

    /// Interaction range `r_V`: the potential vanishes beyond this distance.
    pub fn range(&self) -> f64 {
        match *self {
            PairPotential::HardCore { sigma, .. } => sigma,
            PairPotential::HardRod { sigma } => sigma,
            PairPotential::SquareWell {
                sigma, well_width, ..
            } => sigma + well_width,
        }
    }

    pub fn is_hard_rod(&self) -> bool {
        matches!(self, PairPotential::HardRod { .. })
    }

    /// Pair energy at separation `r = |x|` (all catalog members are radial).
    #[inline]
    fn at_distance(&self, r: f64) -> Energy {
        match *self {
            PairPotential::HardCore { sigma, .. } | PairPotential::HardRod { sigma } => {
                if r < sigma {
                    Energy::Infinite
                } else {
                    Energy::Finite(0.0)
                }
            }
            PairPotential::SquareWell {
                sigma,
                epsilon,
                well_width,
                ..
            } => {
                if r < sigma {
                    Energy::Infinite
                } else if r < sigma + well_width {
                    Energy::Finite(-epsilon)
                } else {
                    Energy::Finite(0.0)
                }
            }
        }
    }
}

fn check_sigma(sigma: f64) -> Result<(), PotentialError> {
    if !sigma.is_finite() || sigma <= 0.0 {
        return Err(PotentialError::InvalidParameter(format!(
            "sigma must be positive and finite, got {sigma}"
        )));
    }
    Ok(())
}

fn check_dim(dim: usize) -> Result<(), PotentialError> {
    if dim == 0 {
        return Err(PotentialError::InvalidParameter("d must be >= 1".into()));
    }
    Ok(())
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|c| c * c).sum::<f64>().sqrt()
}

/// Pair energy `V(x)` at separation vector `x`.
pub fn evaluate(p: &PairPotential, x: &[f64]) -> Result<Energy, PotentialError> {
    let d = p.dimension();
    if x.len() != d {
        return Err(PotentialError::DimensionMismatch {
            expected: d,
            got: x.len(),
        });
    }
    Ok(p.at_distance(norm(x)))
}

/// Mayer factor `f(x) = e^{-beta V(x)} - 1`; exactly `-1` on hard overlap.
pub fn mayer_f(p: &PairPotential, beta: f64, x: &[f64]) -> Result<f64, PotentialError> {
    Ok(evaluate(p, x)?.boltzmann(beta) - 1.0)
}

/// Volume of the unit ball in `d` dimensions via the exact recurrence
/// `V_d = (2 pi / d) V_{d-2}`, `V_0 = 1`, `V_1 = 2`.
pub fn unit_ball_volume(d: usize) -> f64 {
    match d {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * std::f64::consts::PI / d as f64 * unit_ball_volume(d - 2),
    }
}

/// Temperedness integral `C(beta) = \int (1 - e^{-beta |V(x)|}) dx`
/// (closed forms; the integrand is `1` on the core and `1 - e^{-beta eps}`
/// on the attractive shell).
pub fn temperedness_integral(p: &PairPotential, beta: f64) -> f64 {
    match *p {
        PairPotential::HardCore { sigma, dim } => unit_ball_volume(dim) * sigma.powi(dim as i32),
        PairPotential::HardRod { sigma } => 2.0 * sigma,
        PairPotential::SquareWell {
            sigma,
            epsilon,
            well_width,
            dim,
        } => {
            let vd = unit_ball_volume(dim);
            let core = vd * sigma.powi(dim as i32);
            let shell = vd * ((sigma + well_width).powi(dim as i32) - sigma.powi(dim as i32));
            core + shell * (-(-beta * epsilon).exp_m1())
        }
    }
}

/// Stability constant `B >= 0` with `sum_{i<j} V(x_i - x_j) >= -B N`.
///
/// Hard potentials are non-negative, so `B = 0`.  For the square well a
/// particle can be attracted only by particles at distance in
/// `[sigma, sigma + w)`, themselves pairwise at least `sigma` apart; with
/// `k` the maximal number of such neighbours, `B = epsilon k / 2`.
///
/// * `d = 1`: exactly `k = 2 (floor(w / sigma) + 1)` (that many rods fit in
///   the well range on each side), so `B = epsilon (floor(w/sigma) + 1)`.
/// * `d >= 2`: conservative sphere-packing bound.  Balls of radius
///   `sigma / 2` around the neighbours and the centre are disjoint and fit
///   in a ball of radius `sigma + w + sigma/2`, giving
///   `k <= (2(sigma + w)/sigma + 1)^d - 1`.
pub fn stability_constant(p: &PairPotential) -> f64 {
    match *p {
        PairPotential::HardCore { .. } | PairPotential::HardRod { .. } => 0.0,
        PairPotential::SquareWell {
            sigma,
            epsilon,
            well_width,
            dim,
        } => {
            let neighbours = if dim == 1 {
                2.0 * ((well_width / sigma).floor() + 1.0)
            } else {
                (2.0 * (sigma + well_width) / sigma + 1.0).powi(dim as i32) - 1.0
            };
            epsilon * neighbours / 2.0
        }
    }
}

/// Result of a periodic image sum: the energy plus a flag raised when the
/// box is so small (`L <= 2 r_V`) that a pair can interact through more
/// than one image at once.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PeriodicEnergy {
    pub energy: Energy,
    pub images_overlap: bool,
}

/// Periodic pair energy `V^per(x) = sum_n V(x + n L)` on the torus of side
/// `L`.  Requires `x` componentwise in `(-L/2, L/2]`; only the finitely many
/// images within the interaction range contribute.
pub fn periodic_potential(
    p: &PairPotential,
    box_side: f64,
    x: &[f64],
) -> Result<PeriodicEnergy, PotentialError> {
    let d = p.dimension();
    if x.len() != d {
        return Err(PotentialError::DimensionMismatch {
            expected: d,
            got: x.len(),
        });
    }
    if !box_side.is_finite() || box_side <= 0.0 {
        return Err(PotentialError::InvalidParameter(format!(
            "box side must be positive and finite, got {box_side}"
        )));
    }
    for &c in x {
        if !(c > -box_side / 2.0 && c <= box_side / 2.0) {
            return Err(PotentialError::OutsideBox(c));
        }
    }
    let range = p.range();
    let kmax = ((range + box_side / 2.0) / box_side).ceil() as i64;
    let mut total = Energy::Finite(0.0);
    // Walk the image lattice n in {-kmax..kmax}^d with an odometer.
    let mut image = vec![-kmax; d];
    let mut shifted = vec![0.0; d];
    'images: loop {
        for i in 0..d {
            shifted[i] = x[i] + image[i] as f64 * box_side;
        }
        if norm(&shifted) <= range {
            total = total + p.at_distance(norm(&shifted));
            if total.is_infinite() {
                // Energy can only stay infinite; skip remaining images.
                break 'images;
            }
        }
        let mut pos = 0;
        loop {
            if pos == d {
                break 'images;
            }
            image[pos] += 1;
            if image[pos] <= kmax {
                break;
            }
            image[pos] = -kmax;
            pos += 1;
        }
    }
    Ok(PeriodicEnergy {
        energy: total,
        images_overlap: box_side <= 2.0 * range,
    })
}

/// Periodic Mayer factor `e^{-beta V^per(x)} - 1`.
pub fn periodic_mayer_f(
    p: &PairPotential,
    beta: f64,
    box_side: f64,
    x: &[f64],
) -> Result<f64, PotentialError> {
    Ok(periodic_potential(p, box_side, x)?.energy.boltzmann(beta) - 1.0)
}
