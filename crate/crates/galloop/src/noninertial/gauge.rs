//! Simulated gauge potentials for the rotating-frame Hamiltonian.
//!
//! At a fixed time `t0` the non-inertial Hamiltonian can be rewritten as a
//! minimally coupled one,
//!
//! ```text
//!   Ĥ = Â₀ + (1/2m)(P̂ − Â)·(P̂ − Â),    Â = 2m Ω × (X̂ + ½a_q),
//! ```
//!
//! with `a_q = q t0` and all operator products applied literally (the second
//! factor acts on the output grids of the first). On the discrete grid the
//! identity is exact, not approximate: every cross term that has to vanish
//! does so because the Coriolis-type coefficients never involve the component
//! they differentiate, and the scalar remainders are triple products with a
//! repeated vector.
//!
//! The scalar potential admits two readings of its frame-rate term that agree
//! whenever `Ω` is constant or `t0 = 0`; [`A0Variant`] keeps both so the
//! discriminating case `Ω̇ ≠ 0, t0 ≠ 0` can be tested rather than assumed.

use std::fmt;
use std::str::FromStr;

use ndarray::Array3;
use num_complex::Complex64;

use super::grid::{central_difference, GridError, GridWavefunction, DECAY_THRESHOLD};
use super::FrameSpec;
use crate::v3;
use crate::Mass;

/// The two candidate orderings of the scalar potential's frame-rate term.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum A0Variant {
    /// Rate term `m (Ω̇ × a_q)·(X̂ + ½a_q)`: the frame rate is substituted
    /// into the coefficient before contracting with the position operator.
    Substituted,
    /// Rate term `m a_q·(Ω̇ × (X̂ + ½a_q))`: the contraction order is
    /// transposed, flipping the sign of the derivative coupling.
    RateTransposed,
}

impl fmt::Display for A0Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            A0Variant::Substituted => write!(f, "substituted"),
            A0Variant::RateTransposed => write!(f, "rate-transposed"),
        }
    }
}

impl FromStr for A0Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "substituted" => Ok(A0Variant::Substituted),
            "rate-transposed" | "transposed" => Ok(A0Variant::RateTransposed),
            other => Err(format!(
                "unknown scalar-potential variant {other:?} (expected substituted or rate-transposed)"
            )),
        }
    }
}

/// Frame data frozen at the evaluation time `t0`.
#[derive(Clone, Copy, Debug)]
pub struct GaugeFields {
    pub omega0: [f64; 3],
    pub omega_dot0: [f64; 3],
    pub t0: f64,
    pub mass: Mass,
    /// Drop the `½a_q` pieces from both the vector potential and the scalar
    /// potential's couplings (the gauge-removable part of the coupling).
    pub drop_aq: bool,
}

pub fn gauge_fields(frame: &FrameSpec, t0: f64, mass: Mass, drop_aq: bool) -> GaugeFields {
    GaugeFields {
        omega0: frame.omega().evaluate(t0),
        omega_dot0: frame.omega_dot().evaluate(t0),
        t0,
        mass,
        drop_aq,
    }
}

fn cross_rc(a: [f64; 3], b: [Complex64; 3]) -> [Complex64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

impl GaugeFields {
    /// Classical vector potential `A(x) = 2m Ω₀ × x`.
    pub fn vector_potential(&self, x: [f64; 3]) -> [f64; 3] {
        v3::scale(v3::cross(self.omega0, x), 2.0 * self.mass.value())
    }

    fn half_aq(&self, q: [f64; 3]) -> [f64; 3] {
        if self.drop_aq {
            [0.0; 3]
        } else {
            v3::scale(q, 0.5 * self.t0)
        }
    }

    /// `X̂f + ½a_q f` per point, the vector each potential contracts with.
    fn coupling(&self, f: &GridWavefunction) -> [Array3<Complex64>; 3] {
        let i_over_m = Complex64::new(0.0, 1.0 / self.mass.value());
        let mut out = [0, 1, 2].map(|axis| {
            let mut d = central_difference(f, axis);
            d.mapv_inplace(|v| i_over_m * v);
            d
        });
        for ((i, j, k), &v) in f.values().indexed_iter() {
            let half = self.half_aq(f.coordinate([i, j, k]));
            for axis in 0..3 {
                out[axis][(i, j, k)] += v * half[axis];
            }
        }
        out
    }

    fn vector_apply_raw(&self, f: &GridWavefunction) -> [GridWavefunction; 3] {
        let w = self.coupling(f);
        let two_m = 2.0 * self.mass.value();
        let mut out = [0, 1, 2].map(|_| f.map(|_| Complex64::new(0.0, 0.0)));
        for ((i, j, k), _) in f.values().indexed_iter() {
            let cross = cross_rc(
                self.omega0,
                [w[0][(i, j, k)], w[1][(i, j, k)], w[2][(i, j, k)]],
            );
            for axis in 0..3 {
                out[axis].values_mut()[(i, j, k)] = two_m * cross[axis];
            }
        }
        out
    }

    /// `Σ_j Â_j v_j` for a vector of grid functions.
    fn vector_dot_apply(&self, v: &[GridWavefunction; 3]) -> GridWavefunction {
        let two_m = 2.0 * self.mass.value();
        let mut acc = v[0].map(|_| Complex64::new(0.0, 0.0));
        for (j, component) in v.iter().enumerate() {
            let w = self.coupling(component);
            for ((a, b, c), slot) in acc.values_mut().indexed_iter_mut() {
                let cross = cross_rc(
                    self.omega0,
                    [w[0][(a, b, c)], w[1][(a, b, c)], w[2][(a, b, c)]],
                );
                *slot += two_m * cross[j];
            }
        }
        acc
    }

    /// `Âψ = 2m Ω₀ × (X̂ψ + ½a_q ψ)`, one grid per component.
    pub fn vector_apply(
        &self,
        psi: &GridWavefunction,
    ) -> Result<[GridWavefunction; 3], GridError> {
        psi.check_decay(DECAY_THRESHOLD)?;
        Ok(self.vector_apply_raw(psi))
    }

    /// Scalar potential applied to a state:
    ///
    /// ```text
    ///   Â₀ψ = m[±(Ω̇₀ × a_q) − Ω₀×(Ω₀×a_q)]·(X̂ψ + ½a_qψ) − (1/2m) Â(Âψ)
    /// ```
    ///
    /// with the rate term's sign fixed by the [`A0Variant`].
    pub fn scalar_apply(
        &self,
        psi: &GridWavefunction,
        variant: A0Variant,
    ) -> Result<GridWavefunction, GridError> {
        psi.check_decay(DECAY_THRESHOLD)?;
        Ok(self.scalar_apply_raw(psi, variant))
    }

    fn scalar_apply_raw(&self, psi: &GridWavefunction, variant: A0Variant) -> GridWavefunction {
        let m = self.mass.value();
        let w = self.coupling(psi);
        let a_psi = self.vector_apply_raw(psi);
        let a_a_psi = self.vector_dot_apply(&a_psi);

        let mut out = psi.map(|_| Complex64::new(0.0, 0.0));
        for ((i, j, k), slot) in out.values_mut().indexed_iter_mut() {
            let q = psi.coordinate([i, j, k]);
            // The label history a_q enters the Euler and centrifugal
            // coefficients regardless of drop_aq; only the ½a_q couplings
            // inside `coupling` are gauge-removable.
            let a_q = v3::scale(q, self.t0);
            let rate = v3::cross(self.omega_dot0, a_q);
            // a_q·(Ω̇×w) = −(Ω̇×a_q)·w: transposing the contraction only
            // flips the sign of the rate coupling.
            let rate = match variant {
                A0Variant::Substituted => rate,
                A0Variant::RateTransposed => v3::scale(rate, -1.0),
            };
            let coeff = v3::sub(rate, v3::cross(self.omega0, v3::cross(self.omega0, a_q)));
            let mut v = -a_a_psi.values()[(i, j, k)] / (2.0 * m);
            for axis in 0..3 {
                v += w[axis][(i, j, k)] * (m * coeff[axis]);
            }
            *slot = v;
        }
        out
    }
}

/// `Â₀ψ + (1/2m)(P̂ − Â)·((P̂ − Â)ψ)` with literal double application.
pub fn gauge_hamiltonian_apply(
    fields: &GaugeFields,
    psi: &GridWavefunction,
    variant: A0Variant,
) -> Result<GridWavefunction, GridError> {
    psi.check_decay(DECAY_THRESHOLD)?;
    let m = fields.mass.value();

    let a_psi = fields.vector_apply_raw(psi);
    let mut first = a_psi;
    for (axis, component) in first.iter_mut().enumerate() {
        for ((i, j, k), slot) in component.values_mut().indexed_iter_mut() {
            let q = component_coordinate(psi, [i, j, k], axis);
            *slot = psi.values()[(i, j, k)] * (m * q) - *slot;
        }
    }

    let a_first = fields.vector_dot_apply(&first);
    let mut second = psi.map(|_| Complex64::new(0.0, 0.0));
    for ((i, j, k), slot) in second.values_mut().indexed_iter_mut() {
        let q = psi.coordinate([i, j, k]);
        let mut v = -a_first.values()[(i, j, k)];
        for axis in 0..3 {
            v += first[axis].values()[(i, j, k)] * (m * q[axis]);
        }
        *slot = v;
    }

    let a0 = fields.scalar_apply_raw(psi, variant);
    a0.add(&second.scaled(Complex64::new(1.0 / (2.0 * m), 0.0)))
}

fn component_coordinate(psi: &GridWavefunction, idx: [usize; 3], axis: usize) -> f64 {
    psi.coordinate(idx)[axis]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noninertial::grid::{hamiltonian_apply_with, interior_random};
    use crate::timefn::{TrigPoly, Vec3Fn};

    fn m() -> Mass {
        Mass::new(1.1).unwrap()
    }

    fn relative_gap(a: &GridWavefunction, b: &GridWavefunction) -> f64 {
        a.distance(b) / a.max_abs().max(1e-300)
    }

    #[test]
    fn variant_names_round_trip() {
        for v in [A0Variant::Substituted, A0Variant::RateTransposed] {
            assert_eq!(v.to_string().parse::<A0Variant>().unwrap(), v);
        }
        assert!("spin".parse::<A0Variant>().is_err());
    }

    #[test]
    fn vector_potential_is_the_rotation_coupling() {
        let frame = FrameSpec::from_angular_velocity(
            Vec3Fn::constant([0.3, -0.7, 1.1]),
            Vec3Fn::zero(),
        );
        let fields = gauge_fields(&frame, 0.4, m(), false);
        let x = [0.5, -1.25, 2.0];
        let want = v3::scale(v3::cross([0.3, -0.7, 1.1], x), 2.0 * m().value());
        assert_eq!(fields.vector_potential(x), want);

        let doubled = gauge_fields(
            &FrameSpec::from_angular_velocity(
                Vec3Fn::constant([0.6, -1.4, 2.2]),
                Vec3Fn::zero(),
            ),
            0.4,
            m(),
            false,
        );
        let twice = doubled.vector_potential(x);
        for axis in 0..3 {
            assert!((twice[axis] - 2.0 * want[axis]).abs() < 1e-12);
        }
    }

    #[test]
    fn without_rotation_the_gauge_hamiltonian_is_kinetic() {
        let frame = FrameSpec::inertial();
        let fields = gauge_fields(&frame, 0.8, m(), false);
        let psi = interior_random(17, 0.25, m(), 23, 2);
        let gauged = gauge_hamiltonian_apply(&fields, &psi, A0Variant::Substituted).unwrap();
        let direct = hamiltonian_apply_with(&frame, &psi, 0.8, false).unwrap();
        assert!(relative_gap(&direct, &gauged) < 1e-13);
    }

    #[test]
    fn constant_rotation_identity_is_exact_for_both_variants() {
        let frame = FrameSpec::from_angular_velocity(
            Vec3Fn::constant([0.3, -0.7, 1.1]),
            Vec3Fn::zero(),
        );
        let psi = interior_random(17, 0.25, m(), 29, 2);
        for t0 in [0.0, 0.6] {
            let direct = hamiltonian_apply_with(&frame, &psi, t0, false).unwrap();
            for variant in [A0Variant::Substituted, A0Variant::RateTransposed] {
                let fields = gauge_fields(&frame, t0, m(), false);
                let gauged = gauge_hamiltonian_apply(&fields, &psi, variant).unwrap();
                let gap = relative_gap(&direct, &gauged);
                assert!(gap < 1e-12, "t0={t0} {variant}: relative gap {gap:.3e}");
            }
        }
    }

    #[test]
    fn dropping_the_aq_pieces_keeps_the_identity_exact() {
        let frame = FrameSpec::from_angular_velocity(
            Vec3Fn::constant([0.3, -0.7, 1.1]),
            Vec3Fn::zero(),
        );
        let psi = interior_random(17, 0.25, m(), 31, 2);
        let t0 = 0.6;
        let direct = hamiltonian_apply_with(&frame, &psi, t0, true).unwrap();
        let fields = gauge_fields(&frame, t0, m(), true);
        let gauged = gauge_hamiltonian_apply(&fields, &psi, A0Variant::Substituted).unwrap();
        assert!(relative_gap(&direct, &gauged) < 1e-12);
    }

    #[test]
    fn time_dependent_rotation_discriminates_the_variants() {
        // Ω = (0, 0, 1 + t): Ω̇ ≠ 0, so at t0 ≠ 0 the two rate-term readings
        // differ by 2m(Ω̇×a_q)·X̂ψ and only one can match the Hamiltonian.
        let omega = Vec3Fn::new(
            TrigPoly::zero(),
            TrigPoly::zero(),
            &TrigPoly::one() + &TrigPoly::t(),
        );
        let frame = FrameSpec::from_angular_velocity(omega, Vec3Fn::zero());
        let psi = interior_random(17, 0.25, m(), 37, 2);

        let t0 = 0.5;
        let direct = hamiltonian_apply_with(&frame, &psi, t0, false).unwrap();
        let fields = gauge_fields(&frame, t0, m(), false);
        let sub = gauge_hamiltonian_apply(&fields, &psi, A0Variant::Substituted).unwrap();
        let trans = gauge_hamiltonian_apply(&fields, &psi, A0Variant::RateTransposed).unwrap();
        assert!(relative_gap(&direct, &sub) < 1e-12);
        assert!(relative_gap(&direct, &trans) > 1e-3);

        // At t0 = 0 the discriminating coefficient a_q vanishes.
        let direct0 = hamiltonian_apply_with(&frame, &psi, 0.0, false).unwrap();
        let fields0 = gauge_fields(&frame, 0.0, m(), false);
        for variant in [A0Variant::Substituted, A0Variant::RateTransposed] {
            let gauged = gauge_hamiltonian_apply(&fields0, &psi, variant).unwrap();
            assert!(relative_gap(&direct0, &gauged) < 1e-12);
        }
    }
}
