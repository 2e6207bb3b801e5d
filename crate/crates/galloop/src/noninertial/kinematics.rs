//! Rotating-frame velocity labels and the decomposition of their rate of
//! change into Euler, Coriolis, and centrifugal pieces.

use thiserror::Error;

use crate::linegroup::{angular_velocity, LineGroupError};
use crate::timefn::{Mat3Fn, TrigPoly, Vec3Fn};

#[derive(Debug, Error)]
pub enum KinematicsError {
    #[error(transparent)]
    Rotation(#[from] LineGroupError),
    #[error("candidate velocity violates its defining relation by {residual:.3e} (tolerance {atol:.3e})")]
    NotASolution { residual: f64, atol: f64 },
}

/// Velocity label seen from a frame rotating as `R`, for a constant inertial
/// velocity `q⁰`: the solution of `q = Rq⁰ + Ω × ∫q dt`.
///
/// The solution is written down in closed form, `q = d/dt(R q⁰ t)`: with
/// `a_q = R q⁰ t` one has `Ω × a_q = (Ṙ Rᵀ)(R q⁰)t = Ṙ q⁰ t`, so
/// `Rq⁰ + Ω × a_q = Rq⁰ + Ṙq⁰t = q` on the nose. (Fixed-point iteration on
/// the defining relation does not converge — the iteration map has a unit
/// eigenvalue along the solution direction — so no iterating is done; the
/// relation is instead verified on the result.)
pub fn rotating_frame_velocity(
    rotation: &Mat3Fn,
    q0: [f64; 3],
    atol: f64,
) -> Result<Vec3Fn, KinematicsError> {
    let omega = angular_velocity(rotation, atol.min(1e-9))?;
    let carried = (rotation * &Vec3Fn::constant(q0)).scale_fn(&TrigPoly::t());
    let q = carried.differentiate();
    let relation = &(rotation * &Vec3Fn::constant(q0)) + &omega.cross(&q.antiderivative());
    let residual = q.distance(&relation);
    if residual > atol {
        return Err(KinematicsError::NotASolution { residual, atol });
    }
    Ok(q)
}

/// The three named pieces of `q̇` for a frame with angular velocity `Ω`:
/// `q̇ = Ω̇ × a_q + 2Ω × q − Ω × (Ω × a_q)`, with `a_q = ∫q dt`.
#[derive(Clone, Debug)]
pub struct QdotDecomposition {
    pub euler: Vec3Fn,
    pub coriolis: Vec3Fn,
    pub centrifugal: Vec3Fn,
}

impl QdotDecomposition {
    pub fn total(&self) -> Vec3Fn {
        &(&self.euler + &self.coriolis) + &self.centrifugal
    }
}

/// Splits the rate of change of a velocity label into Euler, Coriolis, and
/// centrifugal terms. The sum equals `differentiate(q)` exactly when `q`
/// solves the rotating-frame relation above.
pub fn qdot_decomposition(omega: &Vec3Fn, q: &Vec3Fn) -> QdotDecomposition {
    let a_q = q.antiderivative();
    QdotDecomposition {
        euler: omega.differentiate().cross(&a_q),
        coriolis: omega.cross(q).scale(2.0),
        centrifugal: -&omega.cross(&omega.cross(&a_q)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linegroup::rotation_about_axis;
    use crate::sampling::Sampler;

    #[test]
    fn trivial_frames() {
        let q = rotating_frame_velocity(&Mat3Fn::identity(), [1.0, -2.0, 0.5], 1e-10).unwrap();
        assert!(q.approx_equal(&Vec3Fn::constant([1.0, -2.0, 0.5]), 1e-12));

        let r = rotation_about_axis([0.0, 0.0, 1.0], 0.3, 1.5).unwrap();
        let q = rotating_frame_velocity(&r, [0.0; 3], 1e-10).unwrap();
        assert!(q.is_zero());
    }

    #[test]
    fn solution_satisfies_the_defining_relation() {
        let mut s = Sampler::new(19);
        for _ in 0..10 {
            let r = s.rotation();
            let q0 = s.velocity();
            let q = rotating_frame_velocity(&r, q0, 1e-10).unwrap();
            // Independent reconstruction: q = Rq⁰ + t·(Ω × Rq⁰).
            let omega = angular_velocity(&r, 1e-9).unwrap();
            let rq0 = &r * &Vec3Fn::constant(q0);
            let want = &rq0 + &omega.cross(&rq0).scale_fn(&TrigPoly::t());
            assert!(
                q.approx_equal(&want, 1e-10),
                "closed-form gap {}",
                q.distance(&want)
            );
        }
    }

    #[test]
    fn fixed_point_iteration_moves_away_from_the_solution() {
        // Documents why the solver is not iterative: seeding the map
        // q ↦ Rq⁰ + Ω × ∫q dt at the standard guess drifts monotonically
        // (secular t-powers accumulate instead of contracting).
        let r = rotation_about_axis([0.0, 0.0, 1.0], 0.0, 1.0).unwrap();
        let q0 = [1.0, 0.0, 0.0];
        let omega = angular_velocity(&r, 1e-9).unwrap();
        let solution = rotating_frame_velocity(&r, q0, 1e-10).unwrap();
        let seed = &r * &Vec3Fn::constant(q0);

        let mut iterate = seed.clone();
        let mut gaps = Vec::new();
        for _ in 0..5 {
            iterate = &seed + &omega.cross(&iterate.antiderivative());
            gaps.push(iterate.distance(&solution));
        }
        assert!(
            gaps.last().unwrap() > gaps.first().unwrap(),
            "iteration unexpectedly contracted: {gaps:?}"
        );
    }

    #[test]
    fn qdot_decomposition_trivial_cases() {
        let q = Vec3Fn::constant([0.4, -0.1, 0.9]);
        let parts = qdot_decomposition(&Vec3Fn::zero(), &q);
        assert!(parts.euler.is_zero());
        assert!(parts.coriolis.is_zero());
        assert!(parts.centrifugal.is_zero());
        assert!(parts.total().is_zero());

        let omega = Vec3Fn::constant([0.0, 0.0, 2.0]);
        let parts = qdot_decomposition(&omega, &q);
        assert!(parts.euler.is_zero(), "constant Ω has no Euler term");
        assert!(!parts.coriolis.is_zero());
    }

    #[test]
    fn decomposition_sums_to_the_derivative_on_frame_solutions() {
        let mut s = Sampler::new(43);
        for _ in 0..10 {
            let r = s.rotation();
            let q = rotating_frame_velocity(&r, s.velocity(), 1e-10).unwrap();
            let omega = angular_velocity(&r, 1e-9).unwrap();
            let parts = qdot_decomposition(&omega, &q);
            let residual = parts.total().distance(&q.differentiate());
            assert!(residual < 1e-10, "decomposition residual {residual}");
        }
    }
}
