//! Velocity-eigenket representation of the loop.
//!
//! A ket `|q⟩` is labelled by its velocity function together with the boost
//! `a_q` it was prepared with (`ȧ_q = q`). Fresh labels use the zero-constant
//! antiderivative `a_q = ∫ q dt`; transported labels carry
//! `a_{q′} = Λ_{−b}(R a_q + a)` forward, so that applying elements one at a
//! time lands on exactly the same label as applying their product —
//! re-canonicalising after each step would shed integration constants and the
//! chained route would drift off the composed one.
//!
//! A loop element `x = (φ, (R, a, b))` acts as
//!
//! ```text
//! U(x)|q⟩ = e^{i ξ(x;q)} |Λ_{−b} q′⟩,
//! ξ(x;q)  = m(φ + q′·a − ½ a·ȧ ± ½(Λ_{−b} − 1)[q′·a_{q′}]),
//! ```
//!
//! with `q′ = d/dt(R a_q + a)` taken before the final time shift. The sign of
//! the last bracket is a convention choice (`TimeShiftSign`): read literally
//! it gives a pure time shift `b` on a constant label the phase `−m q² b/2`,
//! while the classical central-extension formula carries `+m q² b/2`. Both
//! are supported; the mismatch is surfaced by `reduce_to_galilei` instead of
//! being silently resolved.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cocycles::two_cocycle;
use crate::linegroup::{angular_velocity, LineGroupElement, LineGroupError};
use crate::lineloop::{reduce_to_central, CentralReductionError, LoopElement};
use crate::timefn::{Mat3Fn, ParseError, TrigPoly, Vec3Fn};
use crate::{v3, Mass};

/// Tolerance for internal consistency checks (dual-route transport, sector
/// reductions).
const TRANSPORT_ATOL: f64 = 1e-9;

/// Labels closer than this — boost and velocity alike — name the same ket.
const LABEL_ATOL: f64 = 1e-9;

/// Convention for the time-shift bracket of `ξ`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TimeShiftSign {
    /// Literal reading: a pure time shift `b` on a constant label `q`
    /// contributes `−m q² b / 2`.
    #[default]
    Standard,
    /// Flipped bracket, matching the classical convention `+m q² b / 2`.
    Flipped,
}

impl TimeShiftSign {
    fn multiplier(self) -> f64 {
        match self {
            TimeShiftSign::Standard => 1.0,
            TimeShiftSign::Flipped => -1.0,
        }
    }
}

impl std::fmt::Display for TimeShiftSign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TimeShiftSign::Standard => "standard",
            TimeShiftSign::Flipped => "flipped",
        })
    }
}

impl std::str::FromStr for TimeShiftSign {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "standard" | "minus" | "-1" => Ok(TimeShiftSign::Standard),
            "flipped" | "plus" | "+1" | "1" => Ok(TimeShiftSign::Flipped),
            other => Err(format!(
                "unknown time-shift sign {other:?} (expected standard/minus or flipped/plus)"
            )),
        }
    }
}

#[derive(Debug, Error)]
pub enum RepresentationError {
    /// The transport routes `Rq + Ṙa_q + ȧ` and `d/dt(Ra_q + a)` disagree,
    /// which means the ring arithmetic itself is broken.
    #[error("label transport routes disagree by {residual:.3e} (tolerance {atol:.3e})")]
    InconsistentTransport { residual: f64, atol: f64 },
    #[error(transparent)]
    Rotation(#[from] LineGroupError),
}

#[derive(Debug, Error)]
pub enum StateError {
    #[error("ket terms share a label but their phases differ non-constantly (variation {variation:.3e}); no single amplitude represents the sum")]
    UnmergeableTerms { variation: f64 },
    #[error("label velocity does not match the derivative of its boost (residual {residual:.3e})")]
    BoostMismatch { residual: f64 },
    #[error("malformed state JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unreadable label or phase: {0}")]
    Parse(#[from] ParseError),
}

#[derive(Debug, Error)]
pub enum GalileiReductionError {
    #[error(transparent)]
    Sector(#[from] CentralReductionError),
    #[error("comparison needs a constant velocity label (variation {variation:.3e})")]
    NonConstantLabel { variation: f64 },
    #[error("comparison needs a freshly prepared label; this one carries a transported boost (offset {offset:.3e})")]
    NonCanonicalBoost { offset: f64 },
}

/// Velocity eigenket label: the velocity function and the boost it rode in on.
/// The velocity is always the derivative of the boost, so only the boost is
/// stored.
#[derive(Clone, Debug)]
pub struct VelocityLabel {
    boost: Vec3Fn,
}

impl VelocityLabel {
    pub fn rest() -> Self {
        VelocityLabel { boost: Vec3Fn::zero() }
    }

    /// Fresh label: canonical (zero integration constant) antiderivative as
    /// the boost.
    pub fn from_velocity(q: &Vec3Fn) -> Self {
        VelocityLabel { boost: q.antiderivative() }
    }

    pub fn from_constant_velocity(q: [f64; 3]) -> Self {
        Self::from_velocity(&Vec3Fn::constant(q))
    }

    /// Label carrying an explicit boost, as produced by transport.
    pub fn from_boost(boost: Vec3Fn) -> Self {
        VelocityLabel { boost }
    }

    pub fn velocity(&self) -> Vec3Fn {
        self.boost.differentiate()
    }

    pub fn boost(&self) -> &Vec3Fn {
        &self.boost
    }

    /// Whether the carried boost is the canonical antiderivative of the
    /// velocity. True for fresh labels; transported ones generally pick up at
    /// least a constant offset.
    pub fn has_canonical_boost(&self, atol: f64) -> bool {
        self.boost.approx_equal(&self.velocity().antiderivative(), atol)
    }

    pub fn shift(&self, b: f64) -> Self {
        VelocityLabel { boost: self.boost.shift(b) }
    }

    /// Separation between kets: both the velocity and the boost must agree
    /// for two labels to name the same basis vector.
    pub fn distance(&self, other: &VelocityLabel) -> f64 {
        self.boost
            .distance(&other.boost)
            .max(self.velocity().distance(&other.velocity()))
    }

    pub fn approx_equal(&self, other: &VelocityLabel, atol: f64) -> bool {
        self.distance(other) <= atol
    }
}

/// The boost attached to a label (for fresh labels, `∫ q dt` with zero
/// integration constants).
pub fn boost_of(q: &VelocityLabel) -> Vec3Fn {
    q.boost.clone()
}

/// Transports a label by a group element, *before* the final time shift:
/// `a_{q′} = R a_q + a` and `q′ = d/dt a_{q′}`. The derivative is also taken
/// via the product rule `Rq + Ṙa_q + ȧ` and the two routes must agree.
pub fn transform_label(
    g: &LineGroupElement,
    q: &VelocityLabel,
) -> Result<VelocityLabel, RepresentationError> {
    let boost = &(&g.rotation * q.boost()) + &g.translation;
    let direct = boost.differentiate();
    let product_rule = &(&(&g.rotation * &q.velocity())
        + &(&g.rotation.differentiate() * q.boost()))
        + &g.translation.differentiate();
    let residual = direct.distance(&product_rule);
    if residual > TRANSPORT_ATOL {
        return Err(RepresentationError::InconsistentTransport {
            residual,
            atol: TRANSPORT_ATOL,
        });
    }
    Ok(VelocityLabel::from_boost(boost))
}

/// Phase picked up by `|q⟩` under the loop element `x = (φ, (R, a, b))`.
pub fn xi_phase(x: &LoopElement, q: &VelocityLabel, mass: Mass, sign: TimeShiftSign) -> TrigPoly {
    let g = &x.element;
    let a_qp = &(&g.rotation * q.boost()) + &g.translation;
    let qp = a_qp.differentiate();
    let bracket = qp.dot(&a_qp);
    let xi = &(&(&x.phase + &qp.dot(&g.translation))
        - &g.translation.dot(&g.translation.differentiate()).scale(0.5))
        + &(&bracket.shift(-g.time_shift) - &bracket).scale(0.5 * sign.multiplier());
    xi.scale(mass.value())
}

/// One basis ket: the full coefficient at time `t` is
/// `amplitude · e^{i·phase(t)}`.
#[derive(Clone, Debug)]
pub struct KetTerm {
    pub label: VelocityLabel,
    pub amplitude: Complex64,
    pub phase: TrigPoly,
}

/// Finite superposition of velocity eigenkets with pairwise distinct labels.
#[derive(Clone, Debug)]
pub struct WavepacketState {
    terms: Vec<KetTerm>,
    mass: Mass,
}

#[derive(Serialize, Deserialize)]
struct KetTermRecord {
    label: [String; 3],
    re: f64,
    im: f64,
    phase: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    boost: Option<[String; 3]>,
}

impl WavepacketState {
    /// Builds a state, merging terms whose labels coincide. Coinciding terms
    /// combine only when their phases differ by a constant (folded into the
    /// amplitude); a non-constant difference has no single-term
    /// representation and is an error.
    pub fn new(terms: Vec<KetTerm>, mass: Mass) -> Result<Self, StateError> {
        let mut merged: Vec<KetTerm> = Vec::with_capacity(terms.len());
        for term in terms {
            match merged
                .iter_mut()
                .find(|k| k.label.approx_equal(&term.label, LABEL_ATOL))
            {
                None => merged.push(term),
                Some(k) => {
                    let delta = &term.phase - &k.phase;
                    let c = delta.as_constant(LABEL_ATOL).ok_or_else(|| {
                        StateError::UnmergeableTerms {
                            variation: delta
                                .distance(&TrigPoly::constant(delta.evaluate(0.0))),
                        }
                    })?;
                    k.amplitude += term.amplitude * Complex64::from_polar(1.0, c);
                }
            }
        }
        merged.retain(|k| k.amplitude.norm() > 0.0);
        Ok(WavepacketState { terms: merged, mass })
    }

    /// Single fresh ket of unit amplitude and zero accumulated phase.
    pub fn single(q: VelocityLabel, mass: Mass) -> Self {
        WavepacketState {
            terms: vec![KetTerm {
                label: q,
                amplitude: Complex64::new(1.0, 0.0),
                phase: TrigPoly::zero(),
            }],
            mass,
        }
    }

    pub fn terms(&self) -> &[KetTerm] {
        &self.terms
    }

    pub fn mass(&self) -> Mass {
        self.mass
    }

    /// Distinct labels are orthonormal and phases unimodular, so the norm is
    /// carried by the amplitudes alone.
    pub fn norm(&self) -> f64 {
        self.terms
            .iter()
            .map(|k| k.amplitude.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Worst per-term discrepancy (label, phase, amplitude) against a state
    /// with the same term order; infinite if the shapes differ.
    pub fn distance(&self, other: &WavepacketState) -> f64 {
        if self.terms.len() != other.terms.len() {
            return f64::INFINITY;
        }
        self.terms
            .iter()
            .zip(&other.terms)
            .map(|(a, b)| {
                a.label
                    .distance(&b.label)
                    .max(a.phase.distance(&b.phase))
                    .max((a.amplitude - b.amplitude).norm())
            })
            .fold(0.0, f64::max)
    }

    /// JSON array of `{label, re, im, phase}` records; a `boost` field is
    /// added only for terms carrying a non-canonical boost.
    pub fn to_json(&self) -> String {
        let records: Vec<KetTermRecord> = self
            .terms
            .iter()
            .map(|k| {
                let vel = k.label.velocity();
                KetTermRecord {
                    label: [vel[0].to_string(), vel[1].to_string(), vel[2].to_string()],
                    re: k.amplitude.re,
                    im: k.amplitude.im,
                    phase: k.phase.to_string(),
                    boost: if k.label.has_canonical_boost(LABEL_ATOL) {
                        None
                    } else {
                        let b = k.label.boost();
                        Some([b[0].to_string(), b[1].to_string(), b[2].to_string()])
                    },
                }
            })
            .collect();
        serde_json::to_string_pretty(&records).expect("ket records always serialize")
    }

    pub fn from_json(text: &str, mass: Mass) -> Result<WavepacketState, StateError> {
        let records: Vec<KetTermRecord> = serde_json::from_str(text)?;
        let mut terms = Vec::with_capacity(records.len());
        for r in records {
            let q = Vec3Fn::new(r.label[0].parse()?, r.label[1].parse()?, r.label[2].parse()?);
            let label = match r.boost {
                None => VelocityLabel::from_velocity(&q),
                Some(b) => {
                    let label = VelocityLabel::from_boost(Vec3Fn::new(
                        b[0].parse()?,
                        b[1].parse()?,
                        b[2].parse()?,
                    ));
                    let residual = label.velocity().distance(&q);
                    if residual > LABEL_ATOL {
                        return Err(StateError::BoostMismatch { residual });
                    }
                    label
                }
            };
            terms.push(KetTerm {
                label,
                amplitude: Complex64::new(r.re, r.im),
                phase: r.phase.parse()?,
            });
        }
        WavepacketState::new(terms, mass)
    }
}

/// Applies a loop element to every ket: labels transport and pick up the
/// final time shift, phases accumulate `ξ`, amplitudes are untouched.
pub fn apply(
    x: &LoopElement,
    s: &WavepacketState,
    sign: TimeShiftSign,
) -> Result<WavepacketState, RepresentationError> {
    let b = x.element.time_shift;
    let mut terms = Vec::with_capacity(s.terms.len());
    for k in &s.terms {
        let xi = xi_phase(x, &k.label, s.mass, sign);
        terms.push(KetTerm {
            label: transform_label(&x.element, &k.label)?.shift(-b),
            amplitude: k.amplitude,
            phase: &k.phase + &xi,
        });
    }
    // Transport is invertible, so distinct labels stay distinct.
    Ok(WavepacketState { terms, mass: s.mass })
}

/// Composition defect of the phases,
/// `ξ₂(x₂,x₁;q) = ξ(x₁;q) + ξ(x₂;Λ_{−b₁}q′) − ξ(x₂·x₁;q)`.
pub fn xi2_direct(
    x2: &LoopElement,
    x1: &LoopElement,
    q: &VelocityLabel,
    mass: Mass,
    sign: TimeShiftSign,
) -> Result<TrigPoly, RepresentationError> {
    let q1 = transform_label(&x1.element, q)?.shift(-x1.element.time_shift);
    let x21 = x2.compose(x1, mass);
    Ok(&(&xi_phase(x1, q, mass, sign) + &xi_phase(x2, &q1, mass, sign))
        - &xi_phase(&x21, q, mass, sign))
}

/// Closed form of the composition defect.
///
/// With `a_p = Λ_{−b₁}(R₁ a_q + a₁)` (the label's boost after the first
/// element) and `g_p = (I, a_p, 0)`:
///
/// ```text
/// ξ₂ = m(1 − Λ_{b₁})φ₂
///    + (1 − Λ_{b₁}) ω(g₂, g_p)
///    + (m/2)(1 − Λ_{b₁})[Ω₂·(R₂a_p × a₂)]
///    − m(Λ_{b₁}Ω₂)·((Λ_{b₁}R₂)[(R₁a_q) × a₁])
///    + (m/2)(Λ_{b₁}Ω₂)·((Λ_{b₁}R₂)a₁ × Λ_{b₁}a₂)
/// ```
///
/// Under the flipped time-shift convention the bracket terms of `ξ` flip
/// sign, which adds `−m[(Λ_{−b₁}−1)(q₁·a_{q₁}) + (Λ_{b₁}−1)(q₂·a_{q₂})]`
/// built from the transported pre-shift label at each stage.
pub fn xi2_closed(
    x2: &LoopElement,
    x1: &LoopElement,
    q: &VelocityLabel,
    mass: Mass,
    sign: TimeShiftSign,
) -> Result<TrigPoly, RepresentationError> {
    let m = mass.value();
    let (g1, g2) = (&x1.element, &x2.element);
    let b1 = g1.time_shift;
    let om2 = angular_velocity(&g2.rotation, TRANSPORT_ATOL)?;
    let v1 = &(&g1.rotation * q.boost()) + &g1.translation;
    let a_p = v1.shift(-b1);
    let g_p = LineGroupElement::new(Mat3Fn::identity(), a_p.clone(), 0.0);

    let phi_term = (&x2.phase - &x2.phase.shift(b1)).scale(m);
    let w = two_cocycle(g2, &g_p, mass);
    let omega_term = &w - &w.shift(b1);
    let pivot = om2.dot(&(&g2.rotation * &a_p).cross(&g2.translation));
    let pivot_term = (&pivot - &pivot.shift(b1)).scale(0.5 * m);
    let om2s = om2.shift(b1);
    let r2s = g2.rotation.shift(b1);
    let outer_term = om2s
        .dot(&(&r2s * &(&g1.rotation * q.boost()).cross(&g1.translation)))
        .scale(-m);
    let mixed_term = om2s
        .dot(&(&r2s * &g1.translation).cross(&g2.translation.shift(b1)))
        .scale(0.5 * m);

    let mut xi2 = &(&(&phi_term + &omega_term) + &(&pivot_term + &outer_term)) + &mixed_term;
    if sign == TimeShiftSign::Flipped {
        let p1 = v1.differentiate().dot(&v1);
        let v2 = &(&g2.rotation * &a_p) + &g2.translation;
        let p2 = v2.differentiate().dot(&v2);
        let correction = &(&p1.shift(-b1) - &p1) + &(&p2.shift(b1) - &p2);
        xi2 = &xi2 - &correction.scale(m);
    }
    Ok(xi2)
}

/// Worst discrepancy between the chained application
/// `apply(x₃, apply(x₂, apply(x₁, s)))` and the two composed-element routes
/// glued with the closed-form `ξ₂` phases (compose `x₃x₂` or `x₂x₁` first).
/// The loop's non-associativity cancels against the phases, so this should
/// vanish.
pub fn associativity_residual(
    x3: &LoopElement,
    x2: &LoopElement,
    x1: &LoopElement,
    s: &WavepacketState,
    sign: TimeShiftSign,
) -> Result<f64, RepresentationError> {
    let mass = s.mass();
    let s1 = apply(x1, s, sign)?;
    let chained = apply(x3, &apply(x2, &s1, sign)?, sign)?;

    let mut left = apply(&x3.compose(x2, mass), &s1, sign)?;
    for (term, before) in left.terms.iter_mut().zip(s1.terms()) {
        term.phase = &term.phase + &xi2_closed(x3, x2, &before.label, mass, sign)?;
    }

    let mut right = apply(x3, &apply(&x2.compose(x1, mass), s, sign)?, sign)?;
    for (term, before) in right.terms.iter_mut().zip(s.terms()) {
        term.phase = &term.phase + &xi2_closed(x2, x1, &before.label, mass, sign)?;
    }

    Ok(chained.distance(&left).max(chained.distance(&right)))
}

/// Side-by-side phases for an element of the Galilei sector.
#[derive(Clone, Debug)]
pub struct GalileiComparison {
    /// Classical central-extension exponent `m(φ + q′·a⁰ − ½v·a⁰ + ½q′²b)`.
    pub classical_exponent: f64,
    /// The loop representation's phase, a function of time.
    pub loop_exponent: TrigPoly,
    /// `loop_exponent − classical_exponent`; in general
    /// `m(q′·v t − ½v² t − q′² b)`, which depends on the label, so the two
    /// conventions differ by more than a relabelling.
    pub difference: TrigPoly,
}

/// Evaluates both phase conventions on the Galilei sector (constant rotation,
/// affine translation, constant loop phase, constant fresh label).
pub fn reduce_to_galilei(
    x: &LoopElement,
    q: &VelocityLabel,
    mass: Mass,
    sign: TimeShiftSign,
) -> Result<GalileiComparison, GalileiReductionError> {
    let central = reduce_to_central(x, TRANSPORT_ATOL)?;
    let qvec = constant_velocity_of(q)?;
    let g = &central.element;
    let qp = v3::add(v3::mat_vec(g.rotation, qvec), g.boost);
    let classical_exponent = mass.value()
        * (central.phase + v3::dot(qp, g.translation)
            - 0.5 * v3::dot(g.boost, g.translation)
            + 0.5 * v3::dot(qp, qp) * g.time_shift);
    let loop_exponent = xi_phase(x, q, mass, sign);
    let difference = &loop_exponent - &TrigPoly::constant(classical_exponent);
    Ok(GalileiComparison { classical_exponent, loop_exponent, difference })
}

fn constant_velocity_of(q: &VelocityLabel) -> Result<[f64; 3], GalileiReductionError> {
    let vel = q.velocity();
    let mut out = [0.0; 3];
    for (i, slot) in out.iter_mut().enumerate() {
        *slot = vel[i].as_constant(LABEL_ATOL).ok_or_else(|| {
            GalileiReductionError::NonConstantLabel {
                variation: vel[i].distance(&TrigPoly::constant(vel[i].evaluate(0.0))),
            }
        })?;
    }
    if !q.has_canonical_boost(LABEL_ATOL) {
        return Err(GalileiReductionError::NonCanonicalBoost {
            offset: q.boost().distance(&vel.antiderivative()),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::Sampler;

    fn m() -> Mass {
        Mass::new(1.3).unwrap()
    }

    fn sample_loop(s: &mut Sampler) -> LoopElement {
        LoopElement::new(
            &TrigPoly::term(1, 0.0, s.scalar(-0.7, 0.7), 0.0)
                + &TrigPoly::term(0, 0.5, s.scalar(-1.0, 1.0), s.scalar(-1.0, 1.0)),
            s.element(),
        )
    }

    fn sample_label(s: &mut Sampler) -> VelocityLabel {
        VelocityLabel::from_velocity(&s.translation())
    }

    #[test]
    fn boost_conventions() {
        assert!(boost_of(&VelocityLabel::rest()).is_zero());

        let q = VelocityLabel::from_constant_velocity([1.0, -2.0, 0.5]);
        let want = Vec3Fn::new(
            TrigPoly::monomial(1, 1.0),
            TrigPoly::monomial(1, -2.0),
            TrigPoly::monomial(1, 0.5),
        );
        assert!(boost_of(&q).approx_equal(&want, 1e-12));

        let osc = VelocityLabel::from_velocity(&Vec3Fn::new(
            TrigPoly::cosine(0, 1.0, 1.0),
            TrigPoly::zero(),
            TrigPoly::zero(),
        ));
        let want = Vec3Fn::new(TrigPoly::sine(0, 1.0, 1.0), TrigPoly::zero(), TrigPoly::zero());
        assert!(boost_of(&osc).approx_equal(&want, 1e-12));
        assert!(osc
            .boost()
            .differentiate()
            .approx_equal(&osc.velocity(), 1e-12));
    }

    #[test]
    fn transform_label_frozen_cases() {
        let q = VelocityLabel::from_constant_velocity([0.3, -1.1, 0.7]);

        let id = LineGroupElement::identity();
        assert!(transform_label(&id, &q)
            .unwrap()
            .approx_equal(&q, 1e-12));

        let mut s = Sampler::new(11);
        let r0 = LineGroupElement::new(s.constant_rotation(), Vec3Fn::zero(), 0.0);
        let got = transform_label(&r0, &q).unwrap();
        let rq = v3::mat_vec(r0.rotation.evaluate(0.0), [0.3, -1.1, 0.7]);
        assert!(got
            .velocity()
            .approx_equal(&Vec3Fn::constant(rq), 1e-10));

        // Pure boost acts by velocity addition.
        let v = [0.4, 0.2, -0.9];
        let boost = LineGroupElement::new(
            Mat3Fn::identity(),
            Vec3Fn::new(
                TrigPoly::monomial(1, v[0]),
                TrigPoly::monomial(1, v[1]),
                TrigPoly::monomial(1, v[2]),
            ),
            0.0,
        );
        let got = transform_label(&boost, &q).unwrap();
        assert!(got
            .velocity()
            .approx_equal(&Vec3Fn::constant([0.7, -0.9, -0.2]), 1e-10));
    }

    #[test]
    fn transport_routes_agree_on_random_elements() {
        let mut s = Sampler::new(23);
        for _ in 0..40 {
            let label = sample_label(&mut s);
            let g1 = s.element();
            let once = transform_label(&g1, &label).unwrap().shift(-g1.time_shift);
            // A second transport starts from a non-canonical boost.
            let g2 = s.element();
            transform_label(&g2, &once).unwrap();
        }
    }

    #[test]
    fn transport_is_multiplicative() {
        let mut s = Sampler::new(37);
        for _ in 0..30 {
            let label = sample_label(&mut s);
            let (g1, g2) = (s.element(), s.element());
            let chained = {
                let step = transform_label(&g1, &label).unwrap().shift(-g1.time_shift);
                transform_label(&g2, &step).unwrap().shift(-g2.time_shift)
            };
            let composed = {
                let g21 = g2.compose(&g1);
                transform_label(&g21, &label).unwrap().shift(-g21.time_shift)
            };
            assert!(
                chained.approx_equal(&composed, 1e-9),
                "transport gap {}",
                chained.distance(&composed)
            );
        }
    }

    #[test]
    fn carried_boost_differs_from_recanonicalised_one_by_a_constant() {
        let mut s = Sampler::new(51);
        for _ in 0..20 {
            let label = sample_label(&mut s);
            let g = s.element();
            let carried = transform_label(&g, &label).unwrap();
            let fresh = VelocityLabel::from_velocity(&carried.velocity());
            let gap = &carried.boost().clone() - fresh.boost();
            // Same velocity, boost off by a constant vector.
            assert!(gap.differentiate().distance(&Vec3Fn::zero()) < 1e-10);
        }
    }

    #[test]
    fn xi_phase_frozen_cases() {
        let mass = m();
        let q = VelocityLabel::from_constant_velocity([0.6, -0.2, 1.1]);
        let q2 = 0.6f64.powi(2) + 0.2f64.powi(2) + 1.1f64.powi(2);

        let xi = xi_phase(&LoopElement::identity(), &q, mass, TimeShiftSign::Standard);
        assert!(xi.is_zero());

        let mut s = Sampler::new(3);
        let rot = LoopElement::from_group(LineGroupElement::new(
            s.constant_rotation(),
            Vec3Fn::zero(),
            0.0,
        ));
        let xi = xi_phase(&rot, &q, mass, TimeShiftSign::Standard);
        assert!(xi.distance(&TrigPoly::zero()) < 1e-12);

        let b = 0.8;
        let shift = LoopElement::from_group(LineGroupElement::new(
            Mat3Fn::identity(),
            Vec3Fn::zero(),
            b,
        ));
        let xi = xi_phase(&shift, &q, mass, TimeShiftSign::Standard);
        let want = TrigPoly::constant(-0.5 * mass.value() * q2 * b);
        assert!(xi.distance(&want) < 1e-12, "time-shift phase {xi}");

        let xi = xi_phase(&shift, &q, mass, TimeShiftSign::Flipped);
        let want = TrigPoly::constant(0.5 * mass.value() * q2 * b);
        assert!(xi.distance(&want) < 1e-12);
    }

    #[test]
    fn applying_a_boost_to_the_rest_ket_yields_that_velocity() {
        let mass = m();
        let q = [0.9, -0.4, 0.3];
        let target = VelocityLabel::from_constant_velocity(q);
        let g_q = LoopElement::from_group(LineGroupElement::new(
            Mat3Fn::identity(),
            boost_of(&target),
            0.0,
        ));
        let rest = WavepacketState::single(VelocityLabel::rest(), mass);
        let out = apply(&g_q, &rest, TimeShiftSign::Standard).unwrap();
        assert_eq!(out.terms().len(), 1);
        let ket = &out.terms()[0];
        assert!(ket.label.approx_equal(&target, 1e-12));
        assert!(ket.label.has_canonical_boost(1e-12));
        // Kinetic phase of the boosted rest ket.
        let want = TrigPoly::monomial(1, 0.5 * mass.value() * v3::dot(q, q));
        assert!(ket.phase.distance(&want) < 1e-12);
    }

    #[test]
    fn apply_preserves_norm_and_identity_acts_trivially() {
        let mass = m();
        let mut s = Sampler::new(29);
        let state = WavepacketState::new(
            vec![
                KetTerm {
                    label: sample_label(&mut s),
                    amplitude: Complex64::new(0.6, 0.3),
                    phase: TrigPoly::zero(),
                },
                KetTerm {
                    label: sample_label(&mut s),
                    amplitude: Complex64::new(-0.2, 0.7),
                    phase: TrigPoly::cosine(0, 0.5, 0.4),
                },
            ],
            mass,
        )
        .unwrap();

        let same = apply(&LoopElement::identity(), &state, TimeShiftSign::Standard).unwrap();
        assert!(state.distance(&same) < 1e-12);

        for _ in 0..10 {
            let x = sample_loop(&mut s);
            let out = apply(&x, &state, TimeShiftSign::Standard).unwrap();
            assert!((out.norm() - state.norm()).abs() < 1e-12);
        }
    }

    #[test]
    fn chained_apply_equals_composed_apply_plus_defect_phase() {
        let mass = m();
        let mut s = Sampler::new(41);
        for _ in 0..15 {
            let state = WavepacketState::single(sample_label(&mut s), mass);
            let (x1, x2) = (sample_loop(&mut s), sample_loop(&mut s));
            let chained =
                apply(&x2, &apply(&x1, &state, TimeShiftSign::Standard).unwrap(), TimeShiftSign::Standard)
                    .unwrap();
            let mut composed =
                apply(&x2.compose(&x1, mass), &state, TimeShiftSign::Standard).unwrap();
            for (term, before) in composed.terms.iter_mut().zip(state.terms()) {
                let defect =
                    xi2_direct(&x2, &x1, &before.label, mass, TimeShiftSign::Standard).unwrap();
                term.phase = &term.phase + &defect;
            }
            assert!(
                chained.distance(&composed) < 1e-10,
                "composition gap {}",
                chained.distance(&composed)
            );
        }
    }

    #[test]
    fn xi2_vanishes_when_either_factor_is_the_identity() {
        let mass = m();
        let mut s = Sampler::new(7);
        let x = sample_loop(&mut s);
        let q = sample_label(&mut s);
        let id = LoopElement::identity();
        for (a, b) in [(&x, &id), (&id, &x)] {
            let d = xi2_direct(a, b, &q, mass, TimeShiftSign::Standard).unwrap();
            assert!(d.distance(&TrigPoly::zero()) < 1e-12);
        }
    }

    #[test]
    fn xi2_is_constant_on_galilei_pairs_and_zero_without_a_first_time_shift() {
        let mass = m();
        let mut s = Sampler::new(13);
        for _ in 0..20 {
            let q = VelocityLabel::from_constant_velocity(s.velocity());
            let mut h1 = s.galilei();
            let h2 = s.galilei();
            let xi2 = xi2_direct(
                &LoopElement::from_group(h2.embed()),
                &LoopElement::from_group(h1.embed()),
                &q,
                mass,
                TimeShiftSign::Standard,
            )
            .unwrap();
            assert!(xi2.as_constant(1e-9).is_some(), "not constant: {xi2}");

            h1.time_shift = 0.0;
            let xi2 = xi2_direct(
                &LoopElement::from_group(h2.embed()),
                &LoopElement::from_group(h1.embed()),
                &q,
                mass,
                TimeShiftSign::Standard,
            )
            .unwrap();
            assert!(xi2.distance(&TrigPoly::zero()) < 1e-9, "nonzero: {xi2}");
        }
    }

    #[test]
    fn xi2_closed_matches_direct() {
        let mass = m();
        let mut s = Sampler::new(61);
        let mut worst = 0.0f64;
        for i in 0..40 {
            let q = sample_label(&mut s);
            let (x1, x2) = (sample_loop(&mut s), sample_loop(&mut s));
            let sign = if i % 2 == 0 { TimeShiftSign::Standard } else { TimeShiftSign::Flipped };
            let direct = xi2_direct(&x2, &x1, &q, mass, sign).unwrap();
            let closed = xi2_closed(&x2, &x1, &q, mass, sign).unwrap();
            worst = worst.max(direct.distance(&closed));
        }
        assert!(worst < 1e-9, "worst closed-form gap {worst}");
    }

    #[test]
    fn xi2_on_pure_time_shifts_is_the_shifted_phase_difference() {
        let mass = m();
        let mut s = Sampler::new(17);
        for _ in 0..10 {
            let q = VelocityLabel::from_constant_velocity(s.velocity());
            let phi2 = TrigPoly::term(0, 1.5, s.scalar(-1.0, 1.0), s.scalar(-1.0, 1.0));
            let b1 = s.time_shift();
            let x1 = LoopElement::from_group(LineGroupElement::new(
                Mat3Fn::identity(),
                Vec3Fn::zero(),
                b1,
            ));
            let x2 = LoopElement::new(
                phi2.clone(),
                LineGroupElement::new(Mat3Fn::identity(), Vec3Fn::zero(), s.time_shift()),
            );
            let want = (&phi2 - &phi2.shift(b1)).scale(mass.value());
            for sign in [TimeShiftSign::Standard, TimeShiftSign::Flipped] {
                let got = xi2_direct(&x2, &x1, &q, mass, sign).unwrap();
                assert!(got.distance(&want) < 1e-10);
            }
        }
    }

    #[test]
    fn chained_and_composed_routes_agree_through_the_defect_phases() {
        let mass = m();
        let mut s = Sampler::new(71);
        let mut nontrivial = 0;
        for _ in 0..20 {
            let state = WavepacketState::new(
                vec![
                    KetTerm {
                        label: sample_label(&mut s),
                        amplitude: Complex64::new(0.8, 0.0),
                        phase: TrigPoly::zero(),
                    },
                    KetTerm {
                        label: sample_label(&mut s),
                        amplitude: Complex64::new(0.0, 0.6),
                        phase: TrigPoly::zero(),
                    },
                ],
                mass,
            )
            .unwrap();
            let (x1, x2, x3) = (sample_loop(&mut s), sample_loop(&mut s), sample_loop(&mut s));
            let assoc = crate::lineloop::associator(&x3, &x2, &x1, mass);
            if !assoc.is_identity(1e-6) {
                nontrivial += 1;
            }
            let r = associativity_residual(&x3, &x2, &x1, &state, TimeShiftSign::Standard).unwrap();
            assert!(r < 1e-9, "associativity residual {r}");
        }
        assert!(nontrivial >= 5, "only {nontrivial} nontrivial associators");
    }

    #[test]
    fn galilei_sector_reduction_comparison() {
        let mass = m();
        let q = VelocityLabel::from_constant_velocity([0.5, 0.1, -0.7]);

        let both = reduce_to_galilei(
            &LoopElement::identity(),
            &q,
            mass,
            TimeShiftSign::Standard,
        )
        .unwrap();
        assert_eq!(both.classical_exponent, 0.0);
        assert!(both.loop_exponent.is_zero());

        // Pure constant translation: the conventions agree.
        let a0 = [0.4, -0.3, 0.2];
        let x = LoopElement::from_group(LineGroupElement::new(
            Mat3Fn::identity(),
            Vec3Fn::constant(a0),
            0.0,
        ));
        let got = reduce_to_galilei(&x, &q, mass, TimeShiftSign::Standard).unwrap();
        let want = mass.value() * v3::dot([0.5, 0.1, -0.7], a0);
        assert!((got.classical_exponent - want).abs() < 1e-12);
        assert!(got.difference.distance(&TrigPoly::zero()) < 1e-12);

        // Pure time shift: the conventions disagree by exactly m q² b.
        let b = 0.6;
        let x = LoopElement::from_group(LineGroupElement::new(
            Mat3Fn::identity(),
            Vec3Fn::zero(),
            b,
        ));
        let got = reduce_to_galilei(&x, &q, mass, TimeShiftSign::Standard).unwrap();
        let q2 = v3::dot([0.5, 0.1, -0.7], [0.5, 0.1, -0.7]);
        assert!((got.classical_exponent - 0.5 * mass.value() * q2 * b).abs() < 1e-12);
        assert!(got
            .loop_exponent
            .approx_equal(&TrigPoly::constant(-0.5 * mass.value() * q2 * b), 1e-12));

        // General Galilei element: difference is m(q′·v t − ½v² t − q′² b).
        let mut s = Sampler::new(83);
        for _ in 0..10 {
            let h = s.galilei();
            let x = LoopElement::new(TrigPoly::constant(s.scalar(-1.0, 1.0)), h.embed());
            let qv = s.velocity();
            let label = VelocityLabel::from_constant_velocity(qv);
            let got = reduce_to_galilei(&x, &label, mass, TimeShiftSign::Standard).unwrap();
            let qp = v3::add(v3::mat_vec(h.rotation, qv), h.boost);
            let slope = mass.value() * (v3::dot(qp, h.boost) - 0.5 * v3::dot(h.boost, h.boost));
            let offset = -mass.value() * v3::dot(qp, qp) * h.time_shift;
            let want = &TrigPoly::monomial(1, slope) + &TrigPoly::constant(offset);
            assert!(
                got.difference.distance(&want) < 1e-10,
                "difference {} vs {}",
                got.difference,
                want
            );
        }
    }

    #[test]
    fn galilei_reduction_rejects_bad_inputs() {
        let mass = m();
        let mut s = Sampler::new(97);
        let q = VelocityLabel::from_constant_velocity([0.1, 0.2, 0.3]);
        let x = LoopElement::from_group(s.element());
        // Time-dependent rotations are not in the Galilei sector.
        let err = reduce_to_galilei(&x, &q, mass, TimeShiftSign::Standard);
        assert!(matches!(
            err,
            Err(GalileiReductionError::Sector(_)) | Ok(_)
        ));

        let wobbly = VelocityLabel::from_velocity(&Vec3Fn::new(
            TrigPoly::cosine(0, 1.0, 1.0),
            TrigPoly::zero(),
            TrigPoly::zero(),
        ));
        let id = LoopElement::identity();
        assert!(matches!(
            reduce_to_galilei(&id, &wobbly, mass, TimeShiftSign::Standard),
            Err(GalileiReductionError::NonConstantLabel { .. })
        ));

        let carried = VelocityLabel::from_boost(Vec3Fn::new(
            &TrigPoly::monomial(1, 1.0) + &TrigPoly::constant(2.0),
            TrigPoly::zero(),
            TrigPoly::zero(),
        ));
        assert!(matches!(
            reduce_to_galilei(&id, &carried, mass, TimeShiftSign::Standard),
            Err(GalileiReductionError::NonCanonicalBoost { .. })
        ));
    }

    #[test]
    fn state_json_round_trips() {
        let mass = m();
        let mut s = Sampler::new(5);
        let fresh = sample_label(&mut s);
        let g = s.element();
        let carried = transform_label(&g, &fresh).unwrap().shift(-g.time_shift);
        let state = WavepacketState::new(
            vec![
                KetTerm {
                    label: fresh,
                    amplitude: Complex64::new(0.5, -0.1),
                    phase: TrigPoly::cosine(0, 0.5, 1.2),
                },
                KetTerm {
                    label: carried.clone(),
                    amplitude: Complex64::new(0.3, 0.8),
                    phase: TrigPoly::zero(),
                },
            ],
            mass,
        )
        .unwrap();

        let text = state.to_json();
        let back = WavepacketState::from_json(&text, mass).unwrap();
        assert!(
            state.distance(&back) < 1e-9,
            "round-trip distance {}",
            state.distance(&back)
        );

        // The carried term keeps its boost through the file.
        assert!(!carried.has_canonical_boost(1e-9));
        assert!(text.contains("\"boost\""));
    }

    #[test]
    fn state_merging_and_error_paths() {
        let mass = m();
        let label = VelocityLabel::from_constant_velocity([1.0, 0.0, 0.0]);
        // Same label, phases differing by a constant: amplitudes combine.
        let merged = WavepacketState::new(
            vec![
                KetTerm {
                    label: label.clone(),
                    amplitude: Complex64::new(0.5, 0.0),
                    phase: TrigPoly::zero(),
                },
                KetTerm {
                    label: label.clone(),
                    amplitude: Complex64::new(0.5, 0.0),
                    phase: TrigPoly::constant(std::f64::consts::PI),
                },
            ],
            mass,
        )
        .unwrap();
        assert!(merged.norm() < 1e-12);

        // Non-constant phase difference cannot merge.
        let err = WavepacketState::new(
            vec![
                KetTerm {
                    label: label.clone(),
                    amplitude: Complex64::new(0.5, 0.0),
                    phase: TrigPoly::zero(),
                },
                KetTerm {
                    label,
                    amplitude: Complex64::new(0.5, 0.0),
                    phase: TrigPoly::monomial(1, 1.0),
                },
            ],
            mass,
        );
        assert!(matches!(err, Err(StateError::UnmergeableTerms { .. })));

        // A boost field inconsistent with the printed velocity is rejected.
        let bad = r#"[{"label": ["1", "0", "0"], "re": 1.0, "im": 0.0,
                       "phase": "0", "boost": ["3*t", "0", "0"]}]"#;
        assert!(matches!(
            WavepacketState::from_json(bad, mass),
            Err(StateError::BoostMismatch { .. })
        ));
    }
}
