//! Cocycles of the line group with values in trig polynomials.
//!
//! The group acts on time functions by `Λ_b f = f(·+b)`. With that action the
//! coboundary of a 2-cochain `w` is
//!
//! ```text
//! (δw)(g₃,g₂,g₁) = Λ_{b₁}w(g₃,g₂) + w(g₃g₂,g₁) − w(g₂,g₁) − w(g₃,g₂g₁)
//! ```
//!
//! and a 3-cochain `d` is closed when
//!
//! ```text
//! Λ_{b₁}d(g₄,g₃,g₂) − d(g₄,g₃,g₂g₁) + d(g₄,g₃g₂,g₁) − d(g₄g₃,g₂,g₁) + d(g₃,g₂,g₁) = 0 .
//! ```
//!
//! These two operators compose to zero identically (all ten cross terms cancel
//! pairwise), which is what makes [`three_cocycle`] — an explicit closed form
//! for `δω` of the mechanical two-cochain — automatically satisfy the
//! 3-cocycle condition.

use crate::linegroup::{angular_velocity, GalileiElement, LineGroupElement, LineGroupError};
use crate::timefn::TrigPoly;
use crate::v3;
use crate::Mass;

/// Cocycle values are scalar time functions.
pub type CocycleValue = TrigPoly;

/// Internal tolerance for extracting `Ω` from sampled rotation families; the
/// families are exact Rodrigues products, so the symmetric residual of `Ṙ·Rᵀ`
/// is pure float noise.
const ROTATION_ATOL: f64 = 1e-9;

/// The mechanical two-cochain
/// `ω(g₂,g₁) = (m/2)·[(Λ₁a₂)·((Λ₁R₂)ȧ₁) − (Λ₁ȧ₂)·((Λ₁R₂)a₁)]`, `Λ₁ = Λ_{b₁}`.
///
/// On the Galilei subgroup it is constant in time and reproduces the
/// textbook mass cocycle ([`galilei_two_cocycle`]).
pub fn two_cocycle(g2: &LineGroupElement, g1: &LineGroupElement, mass: Mass) -> CocycleValue {
    let b1 = g1.time_shift;
    let r2s = g2.rotation.shift(b1);
    let lhs = g2
        .translation
        .shift(b1)
        .dot(&(&r2s * &g1.translation.differentiate()));
    let rhs = g2
        .translation
        .differentiate()
        .shift(b1)
        .dot(&(&r2s * &g1.translation));
    (&lhs - &rhs).scale(0.5 * mass.value())
}

/// The classical mass cocycle on the Galilei group,
/// `(m/2)·(a₂⁰·R₂v₁ − v₂·R₂a₁⁰ + b₁·v₂·R₂v₁)`, computed with plain numbers as
/// an independent oracle for [`two_cocycle`] on embedded elements.
pub fn galilei_two_cocycle(h2: &GalileiElement, h1: &GalileiElement, mass: Mass) -> f64 {
    let r2v1 = v3::mat_vec(h2.rotation, h1.boost);
    let r2a1 = v3::mat_vec(h2.rotation, h1.translation);
    0.5 * mass.value()
        * (v3::dot(h2.translation, r2v1) - v3::dot(h2.boost, r2a1)
            + h1.time_shift * v3::dot(h2.boost, r2v1))
}

/// Coboundary of a 2-cochain, evaluated on a triple.
pub fn coboundary2<F>(
    w: F,
    g3: &LineGroupElement,
    g2: &LineGroupElement,
    g1: &LineGroupElement,
) -> CocycleValue
where
    F: Fn(&LineGroupElement, &LineGroupElement) -> CocycleValue,
{
    let b1 = g1.time_shift;
    &(&w(g3, g2).shift(b1) + &w(&g3.compose(g2), g1)) - &(&w(g2, g1) + &w(g3, &g2.compose(g1)))
}

/// Closed form of `δω` for the mechanical two-cochain:
///
/// ```text
/// δω(g₃,g₂,g₁) = (m/2)·[ (Λ₁Ω₂) · ( Λ₁₂(R₃ᵀa₃) × (Λ₁R₂)a₁ )
///                      − (Λ₁₂(R₃ᵀΩ₃)) · ( (Λ₁a₂) × (Λ₁R₂)a₁ ) ]
/// ```
///
/// with `Λ₁ = Λ_{b₁}`, `Λ₁₂ = Λ_{b₁+b₂}` and `Ωᵢ` the angular velocity of
/// `Rᵢ`. Note the angular velocity of the *outer* rotation enters in its own
/// body frame, `R₃ᵀΩ₃`; for a fixed-axis `R₃` this equals the spatial `Ω₃`,
/// but for wobbling axes only the body-frame form matches the coboundary.
/// It vanishes identically when both rotations are constant.
///
/// Errors if either rotation entry is not actually a rotation family.
pub fn three_cocycle(
    g3: &LineGroupElement,
    g2: &LineGroupElement,
    g1: &LineGroupElement,
    mass: Mass,
) -> Result<CocycleValue, LineGroupError> {
    let om2 = angular_velocity(&g2.rotation, ROTATION_ATOL)?;
    let om3 = angular_velocity(&g3.rotation, ROTATION_ATOL)?;
    let b1 = g1.time_shift;
    let b12 = b1 + g2.time_shift;
    let r3t = g3.rotation.transpose();
    let r2s_a1 = &g2.rotation.shift(b1) * &g1.translation;
    let first = om2
        .shift(b1)
        .dot(&(&r3t * &g3.translation).shift(b12).cross(&r2s_a1));
    let second = (&r3t * &om3)
        .shift(b12)
        .dot(&g2.translation.shift(b1).cross(&r2s_a1));
    Ok((&first - &second).scale(0.5 * mass.value()))
}

/// Left side of the 3-cocycle condition for a 3-cochain `d` on a 4-tuple;
/// zero (to numerical noise) iff `d` is closed there.
pub fn three_cocycle_condition<F>(
    d: F,
    g4: &LineGroupElement,
    g3: &LineGroupElement,
    g2: &LineGroupElement,
    g1: &LineGroupElement,
) -> CocycleValue
where
    F: Fn(&LineGroupElement, &LineGroupElement, &LineGroupElement) -> CocycleValue,
{
    let b1 = g1.time_shift;
    let pos = &(&d(g4, g3, g2).shift(b1) + &d(g4, &g3.compose(g2), g1)) + &d(g3, g2, g1);
    let neg = &d(g4, g3, &g2.compose(g1)) + &d(&g4.compose(g3), g2, g1);
    &pos - &neg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linegroup::rotation_about_axis;
    use crate::sampling::Sampler;
    use crate::timefn::Vec3Fn;

    fn m() -> Mass {
        Mass::new(1.4).unwrap()
    }

    #[test]
    fn vanishes_against_identity() {
        let mut s = Sampler::new(11);
        let g = s.element();
        let e = LineGroupElement::identity();
        assert!(two_cocycle(&g, &e, m()).is_zero());
        assert!(two_cocycle(&e, &g, m()).is_zero());
    }

    #[test]
    fn reduces_to_classical_cocycle_on_galilei_elements() {
        let mut s = Sampler::new(23);
        for _ in 0..20 {
            let (h2, h1) = (s.galilei(), s.galilei());
            let w = two_cocycle(&h2.embed(), &h1.embed(), m());
            let oracle = galilei_two_cocycle(&h2, &h1, m());
            assert!(
                w.approx_equal(&TrigPoly::constant(oracle), 1e-11),
                "time-dependent or wrong value: {w} vs {oracle}"
            );
        }
    }

    #[test]
    fn closed_form_matches_coboundary_on_a_nontrivial_triple() {
        let mut s = Sampler::new(31);
        let (g3, g2, g1) = (s.element(), s.element(), s.element());
        let direct = coboundary2(|a, b| two_cocycle(a, b, m()), &g3, &g2, &g1);
        let closed = three_cocycle(&g3, &g2, &g1, m()).unwrap();
        assert!(
            direct.approx_equal(&closed, 1e-9),
            "distance {}",
            direct.distance(&closed)
        );
    }

    #[test]
    fn pure_outer_rotation_special_case() {
        // g₁,g₂ pure translations, g₃ a pure rotation:
        // δω = −(m/2)·(R₃ᵀΩ₃)·(a₂ × a₁)
        let a1 = Vec3Fn::new(
            "0.4*t^2".parse().unwrap(),
            "1 - 0.3*t".parse().unwrap(),
            "0.6*sin(1.2*t)".parse().unwrap(),
        );
        let a2 = Vec3Fn::new(
            "cos(0.9*t)".parse().unwrap(),
            "0.7*t".parse().unwrap(),
            "0.2".parse().unwrap(),
        );
        let g1 = LineGroupElement::from_translation(a1.clone());
        let g2 = LineGroupElement::from_translation(a2.clone());
        let r3 = &rotation_about_axis([0.0, 0.0, 1.0], 0.2, 1.1).unwrap()
            * &rotation_about_axis([0.0, 1.0, 0.0], -0.4, 0.7).unwrap();
        let g3 = LineGroupElement::from_rotation(r3.clone());

        let direct = coboundary2(|a, b| two_cocycle(a, b, m()), &g3, &g2, &g1);
        let om3_body = &r3.transpose() * &angular_velocity(&r3, 1e-10).unwrap();
        let expect = om3_body.dot(&a2.cross(&a1)).scale(-0.5 * m().value());
        assert!(
            direct.approx_equal(&expect, 1e-10),
            "distance {}",
            direct.distance(&expect)
        );
        assert!(three_cocycle(&g3, &g2, &g1, m())
            .unwrap()
            .approx_equal(&expect, 1e-10));
    }

    #[test]
    fn pure_middle_rotation_special_case() {
        // g₁,g₃ pure translations, g₂ a pure rotation:
        // δω = −(m/2)·Ω₂·(R₂a₁ × a₃)
        let mut s = Sampler::new(77);
        let (a1, a3) = (s.translation(), s.translation());
        let r2 = &rotation_about_axis([1.0, 0.0, 0.0], 0.3, -0.8).unwrap()
            * &rotation_about_axis([0.0, 0.0, 1.0], 0.9, 1.3).unwrap();
        let g1 = LineGroupElement::from_translation(a1.clone());
        let g2 = LineGroupElement::from_rotation(r2.clone());
        let g3 = LineGroupElement::from_translation(a3.clone());

        let direct = coboundary2(|a, b| two_cocycle(a, b, m()), &g3, &g2, &g1);
        let om2 = angular_velocity(&r2, 1e-10).unwrap();
        let expect = om2
            .dot(&(&r2 * &a1).cross(&a3))
            .scale(-0.5 * m().value());
        assert!(
            direct.approx_equal(&expect, 1e-10),
            "distance {}",
            direct.distance(&expect)
        );
    }

    #[test]
    fn constant_rotations_make_the_coboundary_vanish() {
        let mut s = Sampler::new(41);
        for _ in 0..10 {
            let (g3, g2, g1) = (
                s.constant_rotation_element(),
                s.constant_rotation_element(),
                s.constant_rotation_element(),
            );
            let direct = coboundary2(|a, b| two_cocycle(a, b, m()), &g3, &g2, &g1);
            assert!(
                direct.approx_equal(&TrigPoly::zero(), 1e-10),
                "residual {}",
                direct.distance(&TrigPoly::zero())
            );
        }
    }

    #[test]
    fn coboundaries_are_closed() {
        // δ∘δ = 0 for any 2-cochain, not only ω: try a made-up cochain.
        let w = |g2: &LineGroupElement, g1: &LineGroupElement| {
            &g2.translation.shift(g1.time_shift).dot(&g1.translation)
                + &g1.rotation.0[0][1].scale(g2.time_shift)
        };
        let mut s = Sampler::new(53);
        let (g4, g3, g2, g1) = (s.element(), s.element(), s.element(), s.element());
        let d = |a: &LineGroupElement, b: &LineGroupElement, c: &LineGroupElement| {
            coboundary2(w, a, b, c)
        };
        let residual = three_cocycle_condition(d, &g4, &g3, &g2, &g1);
        assert!(
            residual.approx_equal(&TrigPoly::zero(), 1e-9),
            "residual {}",
            residual.distance(&TrigPoly::zero())
        );
    }
}

#[cfg(test)]
mod growth_bounds {
    use super::*;
    use crate::sampling::Sampler;

    /// The deepest symbolic expressions in the crate are the cocycle checks.
    /// With the sampler's lattice frequencies they stay two orders of
    /// magnitude under the term cap — this pins that headroom so a sampler or
    /// ring change that reintroduces combinatorial growth fails loudly here
    /// instead of panicking mid-suite.
    #[test]
    fn legitimate_term_counts_stay_bounded() {
        let m = Mass::new(1.0).unwrap();
        let mut s = Sampler::new(99);
        let mut max_triple = 0usize;
        for _ in 0..120 {
            let (g3, g2, g1) = (s.element(), s.element(), s.element());
            let d = coboundary2(|a, b| two_cocycle(a, b, m), &g3, &g2, &g1);
            max_triple = max_triple.max(d.terms().len());
        }
        let mut max_quad = 0usize;
        for _ in 0..60 {
            let (g4, g3, g2, g1) = (s.element(), s.element(), s.element(), s.element());
            let c = three_cocycle_condition(
                |a, b, c| three_cocycle(a, b, c, m).unwrap(),
                &g4,
                &g3,
                &g2,
                &g1,
            );
            max_quad = max_quad.max(c.terms().len());
        }
        assert!(max_triple <= 512, "coboundary values grew to {max_triple} terms");
        assert!(max_quad <= 64, "condition residuals grew to {max_quad} terms");
    }
}
