//! The Galilean line group: time-dependent rotations and translations,
//! composed with time shifts.
//!
//! An element `g = (R(t), a(t), b)` acts on spacetime by `x ↦ R(t)x + a(t)`,
//! `t ↦ t + b`, with `R` a rotation family and `a` a translation family, both
//! trig polynomials in `t`. Writing `Λ_b f = f(·+b)` for the time shift, the
//! action composes as
//!
//! ```text
//! (R₂,a₂,b₂)(R₁,a₁,b₁) = ( (Λ_{b₁}R₂)·R₁ , Λ_{b₁}a₂ + (Λ_{b₁}R₂)·a₁ , b₂+b₁ )
//! ```
//!
//! The classical Galilei group sits inside as the elements with constant `R`
//! and affine `a(t) = a⁰ + v·t`; [`GalileiElement`] implements that subgroup's
//! textbook composition directly on numbers, as an independent cross-check of
//! the function-valued law.

use crate::timefn::{Mat3Fn, TrigPoly, Vec3Fn};
use crate::v3;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LineGroupError {
    #[error("rotation axis must have unit length, got ‖n‖ = {norm}")]
    NonUnitAxis { norm: f64 },
    #[error("not a rotation family: R·Rᵀ deviates from the identity by {residual:e} (tolerance {atol:e})")]
    NotARotation { residual: f64, atol: f64 },
}

/// `(R(t), a(t), b)`. Arithmetic on elements inherits the trig-polynomial
/// growth caps: composing wildly high-degree families panics rather than
/// silently truncating.
#[derive(Clone, Debug, PartialEq)]
pub struct LineGroupElement {
    pub rotation: Mat3Fn,
    pub translation: Vec3Fn,
    pub time_shift: f64,
}

impl LineGroupElement {
    pub fn new(rotation: Mat3Fn, translation: Vec3Fn, time_shift: f64) -> Self {
        LineGroupElement {
            rotation,
            translation,
            time_shift,
        }
    }

    pub fn identity() -> Self {
        Self::new(Mat3Fn::identity(), Vec3Fn::zero(), 0.0)
    }

    pub fn from_rotation(rotation: Mat3Fn) -> Self {
        Self::new(rotation, Vec3Fn::zero(), 0.0)
    }

    pub fn from_translation(translation: Vec3Fn) -> Self {
        Self::new(Mat3Fn::identity(), translation, 0.0)
    }

    pub fn from_time_shift(b: f64) -> Self {
        Self::new(Mat3Fn::identity(), Vec3Fn::zero(), b)
    }

    /// Group product `self·rhs` (apply `rhs` first).
    pub fn compose(&self, rhs: &LineGroupElement) -> LineGroupElement {
        let b1 = rhs.time_shift;
        let r2_shift = self.rotation.shift(b1);
        LineGroupElement {
            rotation: &r2_shift * &rhs.rotation,
            translation: &self.translation.shift(b1) + &(&r2_shift * &rhs.translation),
            time_shift: self.time_shift + rhs.time_shift,
        }
    }

    /// `g⁻¹ = (Λ_{−b}Rᵀ, −Λ_{−b}(Rᵀa), −b)`; cancels on both sides.
    pub fn inverse(&self) -> LineGroupElement {
        let rt = self.rotation.transpose();
        LineGroupElement {
            rotation: rt.shift(-self.time_shift),
            translation: -(&rt * &self.translation).shift(-self.time_shift),
            time_shift: -self.time_shift,
        }
    }

    pub fn distance(&self, other: &LineGroupElement) -> f64 {
        self.rotation
            .distance(&other.rotation)
            .max(self.translation.distance(&other.translation))
            .max((self.time_shift - other.time_shift).abs())
    }

    pub fn approx_equal(&self, other: &LineGroupElement, atol: f64) -> bool {
        self.distance(other) < atol
    }

    pub fn is_identity(&self, atol: f64) -> bool {
        self.approx_equal(&Self::identity(), atol)
    }
}

/// Rotation family about a fixed unit axis with linearly advancing angle
/// `θ(t) = θ₀ + ω·t`, via the Rodrigues form `I + sinθ·K + (1−cosθ)·K²`.
pub fn rotation_about_axis(
    axis: [f64; 3],
    theta0: f64,
    omega: f64,
) -> Result<Mat3Fn, LineGroupError> {
    let norm = v3::norm(axis);
    if (norm - 1.0).abs() > 1e-9 {
        return Err(LineGroupError::NonUnitAxis { norm });
    }
    let [x, y, z] = axis;
    let k = Mat3Fn::constant([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]]);
    let k2 = &k * &k;
    // sin(θ₀+ωt) and cos(θ₀+ωt) expanded over the {cos(ωt), sin(ωt)} basis
    let (sin, one_minus_cos) = if omega == 0.0 {
        (
            TrigPoly::constant(theta0.sin()),
            TrigPoly::constant(1.0 - theta0.cos()),
        )
    } else {
        (
            TrigPoly::term(0, omega, theta0.sin(), theta0.cos()),
            &TrigPoly::one() - &TrigPoly::term(0, omega, theta0.cos(), -theta0.sin()),
        )
    };
    Ok(&(&Mat3Fn::identity() + &k.scale_fn(&sin)) + &k2.scale_fn(&one_minus_cos))
}

/// Angular velocity `Ω(t)` of a rotation family, from `W = Ṙ·Rᵀ`,
/// `Ω = (W₂₁, W₀₂, W₁₀)`. Errors when `R·Rᵀ` deviates from the identity by
/// more than `atol` — i.e. when `R` is not orthogonal for all `t`. (This
/// also forces `W` antisymmetric: the symmetric part of `W` is `½ d/dt(R·Rᵀ)`.)
pub fn angular_velocity(rotation: &Mat3Fn, atol: f64) -> Result<Vec3Fn, LineGroupError> {
    let residual = (rotation * &rotation.transpose()).distance(&Mat3Fn::identity());
    if residual > atol {
        return Err(LineGroupError::NotARotation { residual, atol });
    }
    let w = &rotation.differentiate() * &rotation.transpose();
    Ok(Vec3Fn::new(
        w[(2, 1)].clone(),
        w[(0, 2)].clone(),
        w[(1, 0)].clone(),
    ))
}

/// A classical Galilei transformation `(R, v, a⁰, b)`:
/// `x ↦ Rx + a⁰ + v·t`, `t ↦ t + b`, all entries plain numbers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GalileiElement {
    pub rotation: [[f64; 3]; 3],
    pub boost: [f64; 3],
    pub translation: [f64; 3],
    pub time_shift: f64,
}

impl GalileiElement {
    pub fn identity() -> Self {
        GalileiElement {
            rotation: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            boost: [0.0; 3],
            translation: [0.0; 3],
            time_shift: 0.0,
        }
    }

    /// Textbook composition: `R = R₂R₁`, `v = v₂ + R₂v₁`,
    /// `a⁰ = a₂⁰ + R₂a₁⁰ + v₂b₁`, `b = b₂ + b₁`.
    pub fn compose(&self, rhs: &GalileiElement) -> GalileiElement {
        GalileiElement {
            rotation: v3::mat_mul(self.rotation, rhs.rotation),
            boost: v3::add(self.boost, v3::mat_vec(self.rotation, rhs.boost)),
            translation: v3::add(
                v3::add(self.translation, v3::mat_vec(self.rotation, rhs.translation)),
                v3::scale(self.boost, rhs.time_shift),
            ),
            time_shift: self.time_shift + rhs.time_shift,
        }
    }

    pub fn inverse(&self) -> GalileiElement {
        let rt = v3::transpose(self.rotation);
        GalileiElement {
            rotation: rt,
            boost: v3::scale(v3::mat_vec(rt, self.boost), -1.0),
            translation: v3::mat_vec(
                rt,
                v3::sub(v3::scale(self.boost, self.time_shift), self.translation),
            ),
            time_shift: -self.time_shift,
        }
    }

    /// The corresponding line-group element: constant rotation,
    /// affine translation `a(t) = a⁰ + v·t`.
    pub fn embed(&self) -> LineGroupElement {
        let a = Vec3Fn(std::array::from_fn(|i| {
            &TrigPoly::constant(self.translation[i]) + &TrigPoly::monomial(1, self.boost[i])
        }));
        LineGroupElement::new(Mat3Fn::constant(self.rotation), a, self.time_shift)
    }
}

/// Reads a line-group element back as a classical Galilei transformation:
/// `Some` iff the rotation is constant and the translation affine in `t`,
/// both within `atol`.
pub fn to_galilei(g: &LineGroupElement, atol: f64) -> Option<GalileiElement> {
    let mut rotation = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            rotation[i][j] = g.rotation[(i, j)].as_constant(atol)?;
        }
    }
    let deriv = g.translation.differentiate();
    let mut boost = [0.0; 3];
    for i in 0..3 {
        boost[i] = deriv[i].as_constant(atol)?;
    }
    let translation = g.translation.evaluate(0.0);
    let affine = Vec3Fn(std::array::from_fn(|i| {
        &TrigPoly::constant(translation[i]) + &TrigPoly::monomial(1, boost[i])
    }));
    if !g.translation.approx_equal(&affine, atol) {
        return None;
    }
    Some(GalileiElement {
        rotation,
        boost,
        translation,
        time_shift: g.time_shift,
    })
}
