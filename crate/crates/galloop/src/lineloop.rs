//! The loop prolongation of the line group: pairs `x = (φ(t), g)` of a scalar
//! time function and a group element, with composition twisted by the
//! mechanical two-cochain,
//!
//! ```text
//! x₂·x₁ = ( Λ_{b₁}φ₂ + φ₁ + (1/m)·ω(g₂,g₁) , g₂g₁ ) .
//! ```
//!
//! Because `ω` is not closed (its coboundary `δω` is the nonzero
//! three-cocycle), this product is not associative: it forms a *loop* — a
//! quasigroup with two-sided identity. Left and right inverses both exist but
//! differ, every division problem has a unique exact solution, and the failure
//! of associativity is measured by a central associator whose phase is exactly
//! `−(1/m)·δω` re-anchored to the total time shift.
//!
//! Phases are normalized per unit mass: the physical action-like phase is
//! `m·φ`, which is why `ω` (which carries a factor `m`) enters through `1/m`
//! and the central reduction of the Galilei sector is mass-independent.

use crate::cocycles::{galilei_two_cocycle, three_cocycle, two_cocycle};
use crate::linegroup::{to_galilei, GalileiElement, LineGroupElement, LineGroupError};
use crate::timefn::TrigPoly;
use crate::Mass;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CentralReductionError {
    #[error("element is outside the Galilei sector (rotation or translation is not affine-in-t within {atol:e})")]
    NonGalileiSector { atol: f64 },
    #[error("phase varies in time by {variation:e}, more than {atol:e}")]
    NonConstantPhase { variation: f64, atol: f64 },
}

/// `(φ(t), g)`: a phase-per-mass function attached to a group element.
#[derive(Clone, Debug, PartialEq)]
pub struct LoopElement {
    pub phase: TrigPoly,
    pub element: LineGroupElement,
}

impl LoopElement {
    pub fn new(phase: TrigPoly, element: LineGroupElement) -> Self {
        LoopElement { phase, element }
    }

    pub fn identity() -> Self {
        LoopElement::new(TrigPoly::zero(), LineGroupElement::identity())
    }

    pub fn from_group(element: LineGroupElement) -> Self {
        LoopElement::new(TrigPoly::zero(), element)
    }

    /// Loop product `self·rhs` (apply `rhs` first).
    pub fn compose(&self, rhs: &LoopElement, mass: Mass) -> LoopElement {
        let w = two_cocycle(&self.element, &rhs.element, mass);
        LoopElement::new(
            &(&self.phase.shift(rhs.element.time_shift) + &rhs.phase)
                + &w.scale(1.0 / mass.value()),
            self.element.compose(&rhs.element),
        )
    }

    /// The unique `y` with `y·self = identity`.
    pub fn left_inverse(&self, mass: Mass) -> LoopElement {
        let ginv = self.element.inverse();
        let w = two_cocycle(&ginv, &self.element, mass);
        let phase = (&(-&self.phase) - &w.scale(1.0 / mass.value())).shift(-self.element.time_shift);
        LoopElement::new(phase, ginv)
    }

    /// The unique `z` with `self·z = identity`. Differs from
    /// [`Self::left_inverse`] whenever the twist `ω` sees the element from the
    /// two sides differently.
    pub fn right_inverse(&self, mass: Mass) -> LoopElement {
        let ginv = self.element.inverse();
        let w = two_cocycle(&self.element, &ginv, mass);
        let phase = &(-&self.phase.shift(-self.element.time_shift)) - &w.scale(1.0 / mass.value());
        LoopElement::new(phase, ginv)
    }

    pub fn distance(&self, other: &LoopElement) -> f64 {
        self.phase
            .distance(&other.phase)
            .max(self.element.distance(&other.element))
    }

    pub fn approx_equal(&self, other: &LoopElement, atol: f64) -> bool {
        self.distance(other) < atol
    }

    pub fn is_identity(&self, atol: f64) -> bool {
        self.approx_equal(&LoopElement::identity(), atol)
    }
}

/// The unique solution `x` of `a·x = b`:
/// `g_x = g_a⁻¹g_b`, `φ_x = φ_b − Λ_{b_x}φ_a − (1/m)·ω(g_a,g_x)`.
pub fn solve_right(a: &LoopElement, b: &LoopElement, mass: Mass) -> LoopElement {
    let gx = a.element.inverse().compose(&b.element);
    let w = two_cocycle(&a.element, &gx, mass);
    let phase =
        &(&b.phase - &a.phase.shift(gx.time_shift)) - &w.scale(1.0 / mass.value());
    LoopElement::new(phase, gx)
}

/// The unique solution `y` of `y·a = b`:
/// `g_y = g_b g_a⁻¹`, `φ_y = Λ_{−b_a}[φ_b − φ_a − (1/m)·ω(g_y,g_a)]`.
pub fn solve_left(a: &LoopElement, b: &LoopElement, mass: Mass) -> LoopElement {
    let gy = b.element.compose(&a.element.inverse());
    let w = two_cocycle(&gy, &a.element, mass);
    let phase = (&(&b.phase - &a.phase) - &w.scale(1.0 / mass.value()))
        .shift(-a.element.time_shift);
    LoopElement::new(phase, gy)
}

/// The left associator `A` defined by `x₃·(x₂·x₁) = A·[(x₃·x₂)·x₁]`, computed
/// by exact division. Its group part is always the identity: associativity
/// fails only along the phase direction.
pub fn associator(x3: &LoopElement, x2: &LoopElement, x1: &LoopElement, mass: Mass) -> LoopElement {
    let left = x3.compose(&x2.compose(x1, mass), mass);
    let right = x3.compose(x2, mass).compose(x1, mass);
    solve_left(&right, &left, mass)
}

/// Closed form of the associator phase: the φ-discrepancy between the two
/// bracketings is `−(1/m)·δω(g₃,g₂,g₁)`, and dividing it out re-anchors it by
/// the total time shift, giving
///
/// ```text
/// A = ( −(1/m)·Λ_{−(b₁+b₂+b₃)}·δω(g₃,g₂,g₁) , e ) .
/// ```
pub fn associator_closed_form(
    g3: &LineGroupElement,
    g2: &LineGroupElement,
    g1: &LineGroupElement,
    mass: Mass,
) -> Result<LoopElement, LineGroupError> {
    let d = three_cocycle(g3, g2, g1, mass)?;
    let b_total = g1.time_shift + g2.time_shift + g3.time_shift;
    Ok(LoopElement::new(
        d.scale(-1.0 / mass.value()).shift(-b_total),
        LineGroupElement::identity(),
    ))
}

/// A phase attached to a classical Galilei element — the Galilei sector of the
/// loop collapses to this honest central extension, where composition *is*
/// associative.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CentralElement {
    pub phase: f64,
    pub element: GalileiElement,
}

impl CentralElement {
    pub fn compose(&self, rhs: &CentralElement, mass: Mass) -> CentralElement {
        CentralElement {
            phase: self.phase
                + rhs.phase
                + galilei_two_cocycle(&self.element, &rhs.element, mass) / mass.value(),
            element: self.element.compose(&rhs.element),
        }
    }
}

/// Projects a loop element into the central extension of the Galilei group.
/// Exact on the Galilei sector (constant rotation, affine translation,
/// constant phase); anything else is an error, since the projection would
/// discard time dependence.
pub fn reduce_to_central(
    x: &LoopElement,
    atol: f64,
) -> Result<CentralElement, CentralReductionError> {
    let element =
        to_galilei(&x.element, atol).ok_or(CentralReductionError::NonGalileiSector { atol })?;
    let phase = x.phase.as_constant(atol).ok_or_else(|| {
        let c = TrigPoly::constant(x.phase.evaluate(0.0));
        CentralReductionError::NonConstantPhase {
            variation: x.phase.distance(&c),
            atol,
        }
    })?;
    Ok(CentralElement { phase, element })
}
