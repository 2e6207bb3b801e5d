//! Velocity-grid wavefunctions and the non-inertial Hamiltonian.
//!
//! States live on an odd n³ grid of constant-velocity labels centered at
//! `q = 0`. The momentum operator is diagonal, `P̂ψ = m q ψ`; the position
//! operator is the velocity-space derivative `X̂ = (i/m)∇_q`, realized as a
//! second-order central difference with zero padding outside the grid. All
//! reductions are sequential in index order, so results are deterministic.

use std::io;

use ndarray::Array3;
use num_complex::Complex64;
use thiserror::Error;

use super::FrameSpec;
use crate::v3;
use crate::Mass;

pub const DEFAULT_GRID_POINTS: usize = 17;
pub const DEFAULT_GRID_SPACING: f64 = 0.25;

/// Boundary amplitudes must stay below this fraction of the peak before the
/// zero-padded finite differences can be trusted.
pub const DECAY_THRESHOLD: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum GridError {
    #[error("grid size must be odd and at least 3, got {0}")]
    BadSize(usize),
    #[error("grid spacing must be positive and finite, got {0}")]
    BadSpacing(f64),
    #[error("state does not decay at the grid boundary (boundary/max = {ratio:.3e}, threshold {threshold:.3e}); zero padding would bite")]
    DecayViolation { ratio: f64, threshold: f64 },
    #[error("grids are incompatible: {0} vs {1} points, spacing {2} vs {3}")]
    Mismatch(usize, usize, f64, f64),
}

/// Complex amplitudes over an odd, origin-centered cube of velocity labels.
#[derive(Clone, Debug)]
pub struct GridWavefunction {
    n: usize,
    dq: f64,
    mass: Mass,
    values: Array3<Complex64>,
}

impl GridWavefunction {
    pub fn zeros(n: usize, dq: f64, mass: Mass) -> Result<Self, GridError> {
        if n < 3 || n % 2 == 0 {
            return Err(GridError::BadSize(n));
        }
        if !(dq.is_finite() && dq > 0.0) {
            return Err(GridError::BadSpacing(dq));
        }
        Ok(GridWavefunction { n, dq, mass, values: Array3::zeros((n, n, n)) })
    }

    pub fn from_fn(
        n: usize,
        dq: f64,
        mass: Mass,
        f: impl Fn([f64; 3]) -> Complex64,
    ) -> Result<Self, GridError> {
        let mut psi = Self::zeros(n, dq, mass)?;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let q = psi.coordinate([i, j, k]);
                    psi.values[(i, j, k)] = f(q);
                }
            }
        }
        Ok(psi)
    }

    /// Normalized Gaussian packet `exp(−|q − c|²/2σ²)`.
    pub fn gaussian(
        n: usize,
        dq: f64,
        mass: Mass,
        sigma: f64,
        center: [f64; 3],
    ) -> Result<Self, GridError> {
        let psi = Self::from_fn(n, dq, mass, |q| {
            let d = v3::sub(q, center);
            Complex64::new((-v3::dot(d, d) / (2.0 * sigma * sigma)).exp(), 0.0)
        })?;
        Ok(psi.normalized())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dq(&self) -> f64 {
        self.dq
    }

    pub fn mass(&self) -> Mass {
        self.mass
    }

    pub fn values(&self) -> &Array3<Complex64> {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut Array3<Complex64> {
        &mut self.values
    }

    pub fn axis_coordinate(&self, i: usize) -> f64 {
        (i as f64 - ((self.n - 1) / 2) as f64) * self.dq
    }

    pub fn coordinate(&self, idx: [usize; 3]) -> [f64; 3] {
        [
            self.axis_coordinate(idx[0]),
            self.axis_coordinate(idx[1]),
            self.axis_coordinate(idx[2]),
        ]
    }

    /// `√(Σ|ψ|² dq³)`, summed in index order.
    pub fn norm(&self) -> f64 {
        let mut s = 0.0;
        for v in self.values.iter() {
            s += v.norm_sqr();
        }
        (s * self.dq.powi(3)).sqrt()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        if n == 0.0 {
            return self.clone();
        }
        self.map(|v| v / n)
    }

    /// `⟨self|other⟩ = Σ conj(self)·other · dq³`, summed in index order.
    pub fn inner(&self, other: &GridWavefunction) -> Result<Complex64, GridError> {
        self.compatible(other)?;
        let mut s = Complex64::new(0.0, 0.0);
        for (a, b) in self.values.iter().zip(other.values.iter()) {
            s += a.conj() * b;
        }
        Ok(s * self.dq.powi(3))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest |ψ| on the six boundary faces over the largest |ψ| anywhere.
    pub fn boundary_ratio(&self) -> f64 {
        let peak = self.max_abs();
        if peak == 0.0 {
            return 0.0;
        }
        let n = self.n;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for (a, b, c) in [
                    (0, i, j),
                    (n - 1, i, j),
                    (i, 0, j),
                    (i, n - 1, j),
                    (i, j, 0),
                    (i, j, n - 1),
                ] {
                    worst = worst.max(self.values[(a, b, c)].norm());
                }
            }
        }
        worst / peak
    }

    pub fn check_decay(&self, threshold: f64) -> Result<(), GridError> {
        let ratio = self.boundary_ratio();
        if ratio > threshold {
            return Err(GridError::DecayViolation { ratio, threshold });
        }
        Ok(())
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        GridWavefunction {
            n: self.n,
            dq: self.dq,
            mass: self.mass,
            values: self.values.mapv(f),
        }
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        self.map(|v| c * v)
    }

    pub fn add(&self, other: &GridWavefunction) -> Result<Self, GridError> {
        self.compatible(other)?;
        Ok(GridWavefunction {
            n: self.n,
            dq: self.dq,
            mass: self.mass,
            values: &self.values + &other.values,
        })
    }

    pub fn sub(&self, other: &GridWavefunction) -> Result<Self, GridError> {
        self.compatible(other)?;
        Ok(GridWavefunction {
            n: self.n,
            dq: self.dq,
            mass: self.mass,
            values: &self.values - &other.values,
        })
    }

    /// Largest pointwise amplitude difference.
    pub fn distance(&self, other: &GridWavefunction) -> f64 {
        if self.compatible(other).is_err() {
            return f64::INFINITY;
        }
        self.values
            .iter()
            .zip(other.values.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    fn compatible(&self, other: &GridWavefunction) -> Result<(), GridError> {
        if self.n != other.n || self.dq != other.dq {
            return Err(GridError::Mismatch(self.n, other.n, self.dq, other.dq));
        }
        Ok(())
    }
}

/// Zero-padded central difference along one axis: `(ψ₊ − ψ₋)/(2 dq)`.
pub(crate) fn central_difference(psi: &GridWavefunction, axis: usize) -> Array3<Complex64> {
    let n = psi.n;
    let inv = 1.0 / (2.0 * psi.dq);
    let mut out = Array3::zeros((n, n, n));
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let idx = [i, j, k];
                let mut up = idx;
                let mut down = idx;
                let plus = if idx[axis] + 1 < n {
                    up[axis] += 1;
                    psi.values[(up[0], up[1], up[2])]
                } else {
                    Complex64::new(0.0, 0.0)
                };
                let minus = if idx[axis] > 0 {
                    down[axis] -= 1;
                    psi.values[(down[0], down[1], down[2])]
                } else {
                    Complex64::new(0.0, 0.0)
                };
                out[(i, j, k)] = (plus - minus) * inv;
            }
        }
    }
    out
}

fn wrap(psi: &GridWavefunction, values: Array3<Complex64>) -> GridWavefunction {
    GridWavefunction { n: psi.n, dq: psi.dq, mass: psi.mass, values }
}

/// Neighbour average `(ψ₊ + ψ₋)/2` along `axis`, zero-padded like the
/// difference stencil. `[X̂_j, P̂_j]` equals `i` times this operator exactly.
pub(crate) fn average_shift(psi: &GridWavefunction, axis: usize) -> GridWavefunction {
    let n = psi.n;
    let mut out = Array3::zeros((n, n, n));
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let idx = [i, j, k];
                let mut up = idx;
                let mut down = idx;
                let plus = if idx[axis] + 1 < n {
                    up[axis] += 1;
                    psi.values[(up[0], up[1], up[2])]
                } else {
                    Complex64::new(0.0, 0.0)
                };
                let minus = if idx[axis] > 0 {
                    down[axis] -= 1;
                    psi.values[(down[0], down[1], down[2])]
                } else {
                    Complex64::new(0.0, 0.0)
                };
                out[(i, j, k)] = 0.5 * (plus + minus);
            }
        }
    }
    wrap(psi, out)
}

pub(crate) fn position_components(psi: &GridWavefunction) -> [GridWavefunction; 3] {
    let i_over_m = Complex64::new(0.0, 1.0 / psi.mass.value());
    [0, 1, 2].map(|axis| wrap(psi, central_difference(psi, axis).mapv(|v| i_over_m * v)))
}

/// `X̂ψ = (i/m)∇_q ψ`, one grid per component.
pub fn position_op(psi: &GridWavefunction) -> Result<[GridWavefunction; 3], GridError> {
    psi.check_decay(DECAY_THRESHOLD)?;
    Ok(position_components(psi))
}

pub(crate) fn momentum_components(psi: &GridWavefunction) -> [GridWavefunction; 3] {
    let m = psi.mass.value();
    [0, 1, 2].map(|axis| {
        let mut values = psi.values.clone();
        for i in 0..psi.n {
            for j in 0..psi.n {
                for k in 0..psi.n {
                    let q = psi.coordinate([i, j, k]);
                    values[(i, j, k)] *= m * q[axis];
                }
            }
        }
        wrap(psi, values)
    })
}

/// `P̂ψ = m q ψ`, one grid per component.
pub fn momentum_op(psi: &GridWavefunction) -> Result<[GridWavefunction; 3], GridError> {
    psi.check_decay(DECAY_THRESHOLD)?;
    Ok(momentum_components(psi))
}

/// Label-rate coefficient for a constant-velocity grid ket at time `t0`,
/// whose boost is exactly `q·t0`:
/// `q̇(q, t0) = Ω̇×(q t0) + 2Ω×q − Ω×(Ω×(q t0))`.
pub fn qdot_at(frame: &FrameSpec, q: [f64; 3], t0: f64) -> [f64; 3] {
    let om = frame.omega().evaluate(t0);
    let om_dot = frame.omega_dot().evaluate(t0);
    let a_q = v3::scale(q, t0);
    let euler = v3::cross(om_dot, a_q);
    let coriolis = v3::scale(v3::cross(om, q), 2.0);
    let centrifugal = v3::scale(v3::cross(om, v3::cross(om, a_q)), -1.0);
    v3::add(euler, v3::add(coriolis, centrifugal))
}

/// `Ĥψ = (m q²/2)ψ + m q̇·(X̂ψ) + (m/2)(q̇·a_q)ψ` at time `t0`, with the
/// label-dependent coefficient to the left of the derivative.
pub fn hamiltonian_apply(
    frame: &FrameSpec,
    psi: &GridWavefunction,
    t0: f64,
) -> Result<GridWavefunction, GridError> {
    hamiltonian_apply_with(frame, psi, t0, false)
}

/// As `hamiltonian_apply`, optionally dropping the `½a_q` scalar piece (the
/// part removable by a phase redefinition).
pub fn hamiltonian_apply_with(
    frame: &FrameSpec,
    psi: &GridWavefunction,
    t0: f64,
    drop_aq: bool,
) -> Result<GridWavefunction, GridError> {
    psi.check_decay(DECAY_THRESHOLD)?;
    let m = psi.mass.value();
    let grad = position_components(psi);
    let mut values = Array3::zeros((psi.n, psi.n, psi.n));
    for i in 0..psi.n {
        for j in 0..psi.n {
            for k in 0..psi.n {
                let q = psi.coordinate([i, j, k]);
                let qdot = qdot_at(frame, q, t0);
                let mut v = psi.values[(i, j, k)] * (0.5 * m * v3::dot(q, q));
                for (axis, g) in grad.iter().enumerate() {
                    v += g.values[(i, j, k)] * (m * qdot[axis]);
                }
                if !drop_aq {
                    let a_q = v3::scale(q, t0);
                    v += psi.values[(i, j, k)] * (0.5 * m * v3::dot(qdot, a_q));
                }
                values[(i, j, k)] = v;
            }
        }
    }
    Ok(wrap(psi, values))
}

/// Writes the `z = const` slice of a state as CSV rows `q_x,q_y,re,im`.
pub fn write_slice_csv<W: io::Write>(
    psi: &GridWavefunction,
    z_index: usize,
    out: &mut W,
) -> io::Result<()> {
    writeln!(out, "q_x,q_y,re,im")?;
    for i in 0..psi.n {
        for j in 0..psi.n {
            let v = psi.values[(i, j, z_index)];
            writeln!(
                out,
                "{},{},{},{}",
                psi.axis_coordinate(i),
                psi.axis_coordinate(j),
                v.re,
                v.im
            )?;
        }
    }
    Ok(())
}

/// Random state supported strictly inside the grid (zero within `margin`
/// cells of every face), for exact-identity checks.
pub(crate) fn interior_random(
    n: usize,
    dq: f64,
    mass: Mass,
    seed: u64,
    margin: usize,
) -> GridWavefunction {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut psi = GridWavefunction::zeros(n, dq, mass).unwrap();
    for i in margin..n - margin {
        for j in margin..n - margin {
            for k in margin..n - margin {
                psi.values[(i, j, k)] =
                    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
    }
    psi
}
