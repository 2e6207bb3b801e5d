//! Batch verification checks over every algebraic layer of the crate.
//!
//! Each check draws seeded random elements, compares two independently coded
//! routes to the same quantity, and reports the worst residual together with
//! the tolerance it was held to. Checks are pure functions of their inputs,
//! so a fixed seed reproduces a report bit for bit. Findings carry the
//! convention questions and measured discrepancies that a residual cannot
//! decide — they never flip a check's pass flag.

use num_complex::Complex64;
use serde::Serialize;

use crate::cocycles::{
    coboundary2, galilei_two_cocycle, three_cocycle, three_cocycle_condition, two_cocycle,
};
use crate::galrep::{
    associativity_residual, reduce_to_galilei, xi2_closed, xi2_direct, xi_phase, KetTerm,
    TimeShiftSign, VelocityLabel, WavepacketState,
};
use crate::linegroup::{angular_velocity, LineGroupElement};
use crate::lineloop::{associator, associator_closed_form, LoopElement};
use crate::noninertial::grid::{average_shift, hamiltonian_apply_with, interior_random};
use crate::noninertial::{
    gauge_fields, gauge_hamiltonian_apply, hamiltonian_apply, loop_phase, momentum_op,
    position_op, qdot_decomposition, rectangle_path, rectangle_stokes_phase,
    rotating_frame_velocity, A0Variant, FrameSpec, GridWavefunction,
};
use crate::sampling::Sampler;
use crate::timefn::{Mat3Fn, TrigPoly, Vec3Fn};
use crate::v3;
use crate::Mass;

/// One verification check: worst residual over `n_samples` draws, held
/// against `atol`.
#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    pub check: String,
    pub n_samples: usize,
    pub max_residual: f64,
    pub atol: f64,
    pub pass: bool,
}

fn record(check: &str, n_samples: usize, max_residual: f64, atol: f64) -> CheckRecord {
    CheckRecord {
        check: check.to_string(),
        n_samples,
        max_residual,
        atol,
        pass: max_residual < atol,
    }
}

/// A convention note or measured discrepancy attached to a suite.
#[derive(Clone, Debug, Serialize)]
pub struct Finding {
    pub topic: String,
    pub detail: String,
}

fn finding(topic: &str, detail: String) -> Finding {
    Finding { topic: topic.to_string(), detail }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<CheckRecord>,
    pub findings: Vec<Finding>,
}

impl SuiteReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Knobs shared by every suite. `samples` and `atol`, when set, override each
/// check's built-in sample count and tolerance.
#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    pub seed: u64,
    pub samples: Option<usize>,
    pub atol: Option<f64>,
    pub mass: Mass,
    pub time_shift_sign: TimeShiftSign,
    pub drop_aq: bool,
}

impl VerifyOptions {
    pub fn new(mass: Mass) -> Self {
        VerifyOptions {
            seed: 7,
            samples: None,
            atol: None,
            mass,
            time_shift_sign: TimeShiftSign::Standard,
            drop_aq: false,
        }
    }

    fn n(&self, default: usize) -> usize {
        self.samples.unwrap_or(default).max(1)
    }

    fn tol(&self, default: f64) -> f64 {
        self.atol.unwrap_or(default)
    }
}

// ---------------------------------------------------------------------------
// shared sample builders

fn sample_loop(s: &mut Sampler) -> LoopElement {
    LoopElement::new(
        &TrigPoly::term(1, 0.0, s.scalar(-0.7, 0.7), 0.0)
            + &TrigPoly::term(0, 0.5, s.scalar(-1.0, 1.0), s.scalar(-1.0, 1.0)),
        s.element(),
    )
}

fn sample_label(s: &mut Sampler) -> VelocityLabel {
    if s.scalar(0.0, 1.0) < 0.5 {
        VelocityLabel::from_constant_velocity(s.velocity())
    } else {
        VelocityLabel::from_velocity(&s.translation().differentiate())
    }
}

fn sample_state(s: &mut Sampler, mass: Mass) -> WavepacketState {
    let first = KetTerm {
        label: sample_label(s),
        amplitude: Complex64::new(s.scalar(-1.0, 1.0), s.scalar(-1.0, 1.0)),
        phase: TrigPoly::zero(),
    };
    let second = KetTerm {
        label: sample_label(s),
        amplitude: Complex64::new(s.scalar(-1.0, 1.0), 0.0),
        phase: TrigPoly::constant(s.scalar(-1.0, 1.0)),
    };
    WavepacketState::new(vec![first, second], mass).expect("fresh random labels are distinct")
}

fn pure_time_shift(b: f64) -> LoopElement {
    LoopElement::from_group(LineGroupElement::new(Mat3Fn::identity(), Vec3Fn::zero(), b))
}

// ---------------------------------------------------------------------------
// linegroup

/// `(g₃g₂)g₁ = g₃(g₂g₁)` as a function identity.
pub fn check_group_associativity(seed: u64, n: usize, atol: f64) -> CheckRecord {
    let mut s = Sampler::new(seed ^ 0x11);
    let mut worst = 0.0f64;
    for _ in 0..n {
        let (g3, g2, g1) = (s.element(), s.element(), s.element());
        let left = g3.compose(&g2.compose(&g1));
        let right = g3.compose(&g2).compose(&g1);
        worst = worst.max(left.distance(&right));
    }
    record("composition-associativity", n, worst, atol)
}

// ---------------------------------------------------------------------------
// cocycles

/// The function-valued two-cochain collapses to the classical constant mass
/// cocycle on embedded inertial-frame pairs.
pub fn check_galilei_cocycle_reduction(seed: u64, n: usize, atol: f64, mass: Mass) -> CheckRecord {
    let mut s = Sampler::new(seed ^ 0x22);
    let mut worst = 0.0f64;
    for _ in 0..n {
        let (h2, h1) = (s.galilei(), s.galilei());
        let w = two_cocycle(&h2.embed(), &h1.embed(), mass);
        let classical = galilei_two_cocycle(&h2, &h1, mass);
        worst = worst.max(w.distance(&TrigPoly::constant(classical)));
    }
    record("galilei-cocycle-reduction", n, worst, atol)
}

/// `δω` computed literally from four two-cochain evaluations matches the
/// independent closed form built from angular velocities.
pub fn check_three_cocycle_closed_form(seed: u64, n: usize, atol: f64, mass: Mass) -> CheckRecord {
    let mut s = Sampler::new(seed ^ 0x33);
    let mut worst = 0.0f64;
    for _ in 0..n {
        let (g3, g2, g1) = (s.element(), s.element(), s.element());
        let direct = coboundary2(|a, b| two_cocycle(a, b, mass), &g3, &g2, &g1);
        let closed = three_cocycle(&g3, &g2, &g1, mass).expect("sampled rotations are valid");
        worst = worst.max(direct.distance(&closed));
    }
    record("three-cocycle-closed-form", n, worst, atol)
}

/// On constant rotations the two-cochain is an honest two-cocycle: its
/// coboundary vanishes identically.
pub fn check_three_cocycle_constant_rotations(
    seed: u64,
    n: usize,
    atol: f64,
    mass: Mass,
) -> CheckRecord {
    let mut s = Sampler::new(seed ^ 0x44);
    let mut worst = 0.0f64;
    for _ in 0..n {
        let (g3, g2, g1) = (
            s.constant_rotation_element(),
            s.constant_rotation_element(),
            s.constant_rotation_element(),
        );
        let direct = coboundary2(|a, b| two_cocycle(a, b, mass), &g3, &g2, &g1);
        worst = worst.max(direct.distance(&TrigPoly::zero()));
    }
    record("two-cocycle-on-constant-rotations", n, worst, atol)
}

/// The derived three-cochain is closed: the level-3 cocycle identity holds
/// on random 4-tuples.
pub fn check_three_cocycle_condition(seed: u64, n: usize, atol: f64, mass: Mass) -> CheckRecord {
    let mut s = Sampler::new(seed ^ 0x55);
    let mut worst = 0.0f64;
    for _ in 0..n {
        let (g4, g3, g2, g1) = (s.element(), s.element(), s.element(), s.element());
        let lhs = three_cocycle_condition(
            |a, b, c| three_cocycle(a, b, c, mass).expect("sampled rotations are valid"),
            &g4,
            &g3,
            &g2,
            &g1,
        );
        worst = worst.max(lhs.distance(&TrigPoly::zero()));
    }
    record("three-cocycle-condition", n, worst, atol)
}

// ---------------------------------------------------------------------------
// lineloop

/// Associator by exact double composition and division matches the closed
/// form built from the three-cochain.
pub fn check_associator_closed_form(seed: u64, n: usize, atol: f64, mass: Mass) -> CheckRecord {
    let mut s = Sampler::new(seed ^ 0x66);
    let mut worst = 0.0f64;
    for _ in 0..n {
        let (x3, x2, x1) = (sample_loop(&mut s), sample_loop(&mut s), sample_loop(&mut s));
        let direct = associator(&x3, &x2, &x1, mass);
        let closed = associator_closed_form(&x3.element, &x2.element, &x1.element, mass)
            .expect("sampled rotations are valid");
        worst = worst.max(direct.distance(&closed));
    }
    record("associator-closed-form", n, worst, atol)
}

/// The associator is the identity on the classical inertial-frame sector.
pub fn check_associator_galilei_identity(
    seed: u64,
    n: usize,
    atol: f64,
    mass: Mass,
) -> CheckRecord {
    let mut s = Sampler::new(seed ^ 0x77);
    let identity = LoopElement::identity();
    let mut worst = 0.0f64;
    for _ in 0..n {
        let (x3, x2, x1) = (
            LoopElement::from_group(s.galilei().embed()),
            LoopElement::from_group(s.galilei().embed()),
            LoopElement::from_group(s.galilei().embed()),
        );
        worst = worst.max(associator(&x3, &x2, &x1, mass).distance(&identity));
    }
    record("associator-trivial-on-galilei-sector", n, worst, atol)
}

/// Left and right loop inverses coincide for this twist.
pub fn check_inverse_coincidence(seed: u64, n: usize, atol: f64, mass: Mass) -> CheckRecord {
    let mut s = Sampler::new(seed ^ 0x88);
    let mut worst = 0.0f64;
    for _ in 0..n {
        let x = sample_loop(&mut s);
        worst = worst.max(x.left_inverse(mass).distance(&x.right_inverse(mass)));
    }
    record("left-right-inverse-coincidence", n, worst, atol)
}

// ---------------------------------------------------------------------------
// galrep

/// The two-step phase defect assembled from three ξ evaluations equals the
/// independent closed form.
pub fn check_xi2_closed_form(
    seed: u64,
    n: usize,
    atol: f64,
    mass: Mass,
    sign: TimeShiftSign,
) -> CheckRecord {
    let mut s = Sampler::new(seed ^ 0x99);
    let mut worst = 0.0f64;
    for _ in 0..n {
        let (x2, x1) = (sample_loop(&mut s), sample_loop(&mut s));
        let q = sample_label(&mut s);
        let direct = xi2_direct(&x2, &x1, &q, mass, sign).expect("transport is consistent");
        let closed = xi2_closed(&x2, &x1, &q, mass, sign).expect("transport is consistent");
        worst = worst.max(direct.distance(&closed));
    }
    record("two-step-phase-defect-closed-form", n, worst, atol)
}

/// Chained operator application agrees with both pairwise-composed routes:
/// the phase defects cancel the associator exactly where the loop fails to
/// associate. Also counts how many sampled triples had a nonzero associator;
/// the check fails if too few did, since then the cancellation was never
/// actually exercised.
pub fn operator_associativity_profile(
    seed: u64,
    n: usize,
    atol: f64,
    mass: Mass,
    sign: TimeShiftSign,
) -> (CheckRecord, usize) {
    let mut s = Sampler::new(seed ^ 0xaa);
    let mut worst = 0.0f64;
    let mut nontrivial = 0usize;
    for _ in 0..n {
        let (x3, x2, x1) = (sample_loop(&mut s), sample_loop(&mut s), sample_loop(&mut s));
        let state = sample_state(&mut s, mass);
        let res =
            associativity_residual(&x3, &x2, &x1, &state, sign).expect("transport is consistent");
        worst = worst.max(res);
        if !associator(&x3, &x2, &x1, mass).is_identity(1e-12) {
            nontrivial += 1;
        }
    }
    let mut rec = record("operator-associativity", n, worst, atol);
    if nontrivial < (n / 5).min(20) {
        rec.pass = false;
    }
    (rec, nontrivial)
}

/// The phase difference between the representation and the classical
/// central-extension exponent on the inertial sector follows its closed
/// form: slope `m(q′·v − ½v²)` in time, plus a constant offset that depends
/// on the time-shift bracket convention.
pub fn check_galilei_exponent_difference(
    seed: u64,
    n: usize,
    atol: f64,
    mass: Mass,
    sign: TimeShiftSign,
) -> CheckRecord {
    let mut s = Sampler::new(seed ^ 0xbb);
    let mut worst = 0.0f64;
    for _ in 0..n {
        let h = s.galilei();
        let x = LoopElement::new(TrigPoly::constant(s.scalar(-1.0, 1.0)), h.embed());
        let qv = s.velocity();
        let label = VelocityLabel::from_constant_velocity(qv);
        let got = reduce_to_galilei(&x, &label, mass, sign).expect("inertial sector");
        let qp = v3::add(v3::mat_vec(h.rotation, qv), h.boost);
        let slope = mass.value() * (v3::dot(qp, h.boost) - 0.5 * v3::dot(h.boost, h.boost));
        // The standard bracket leaves −mq′²b against the classical +½mq′²b;
        // the flipped bracket matches the classical offset exactly.
        let offset = match sign {
            TimeShiftSign::Standard => -mass.value() * v3::dot(qp, qp) * h.time_shift,
            TimeShiftSign::Flipped => 0.0,
        };
        let want = &TrigPoly::monomial(1, slope) + &TrigPoly::constant(offset);
        worst = worst.max(got.difference.distance(&want));
    }
    record("inertial-sector-exponent-difference", n, worst, atol)
}

// ---------------------------------------------------------------------------
// kinematics

/// The closed-form rotating-frame velocity satisfies its defining implicit
/// relation, re-evaluated here from scratch.
pub fn check_rotating_frame_relation(seed: u64, n: usize, atol: f64) -> CheckRecord {
    let mut s = Sampler::new(seed ^ 0xcc);
    let mut worst = 0.0f64;
    for _ in 0..n {
        let rotation = s.rotation();
        let q0 = s.velocity();
        let q = rotating_frame_velocity(&rotation, q0, 1e-9)
            .expect("closed form solves the relation");
        let omega = angular_velocity(&rotation, 1e-9).expect("sampled rotations are valid");
        let relation =
            &rotation.mul_vec(&Vec3Fn::constant(q0)) + &omega.cross(&q.antiderivative());
        worst = worst.max(q.distance(&relation));
    }
    record("rotating-frame-defining-relation", n, worst, atol)
}

/// Euler + Coriolis + centrifugal terms sum to the direct time derivative on
/// frame solutions.
pub fn check_qdot_decomposition_sum(seed: u64, n: usize, atol: f64) -> CheckRecord {
    let mut s = Sampler::new(seed ^ 0xdd);
    let mut worst = 0.0f64;
    for _ in 0..n {
        let rotation = s.rotation();
        let q = rotating_frame_velocity(&rotation, s.velocity(), 1e-9)
            .expect("closed form solves the relation");
        let omega = angular_velocity(&rotation, 1e-9).expect("sampled rotations are valid");
        let parts = qdot_decomposition(&omega, &q);
        worst = worst.max(parts.total().distance(&q.differentiate()));
    }
    record("acceleration-decomposition-sum", n, worst, atol)
}

// ---------------------------------------------------------------------------
// grid / generator

fn richardson<F: Fn(f64) -> f64>(f: F, h: f64) -> f64 {
    let central = |h: f64| (f(h) - f(-h)) / (2.0 * h);
    let d0 = central(h);
    let d1 = central(h / 2.0);
    let d2 = central(h / 4.0);
    let r1 = (4.0 * d1 - d0) / 3.0;
    let r2 = (4.0 * d2 - d1) / 3.0;
    (16.0 * r2 - r1) / 15.0
}

/// The time-shift phase and the label flow differentiate (numerically, to
/// sixth order) into exactly the scalar coefficient and transport
/// coefficient of the evolution generator; a spike ket ties the same number
/// to the grid operator's diagonal action.
pub fn check_generator_time_shift(
    seed: u64,
    n: usize,
    atol: f64,
    mass: Mass,
    sign: TimeShiftSign,
) -> CheckRecord {
    let mut s = Sampler::new(seed ^ 0xee);
    let m = mass.value();
    let h = 0.04;
    let mut worst = 0.0f64;

    for i in 0..n {
        let label = match i % 3 {
            0 => VelocityLabel::from_constant_velocity(s.velocity()),
            1 => {
                let rotation = s.rotation();
                let q = rotating_frame_velocity(&rotation, s.velocity(), 1e-8)
                    .expect("closed form solves the relation");
                VelocityLabel::from_velocity(&q)
            }
            _ => VelocityLabel::from_velocity(&s.translation().differentiate()),
        };
        let t0 = if i % 2 == 0 { 0.0 } else { 0.4 };

        let q = label.velocity();
        let qdot = q.differentiate();
        let u = label.boost();

        // Scalar part: the shift-derivative of the phase against the
        // kinetic + history coefficient of the generator.
        let d_phase = richardson(
            |b| xi_phase(&pure_time_shift(b), &label, mass, sign).evaluate(t0),
            h,
        );
        let coefficient = 0.5
            * m
            * (v3::dot(q.evaluate(t0), q.evaluate(t0))
                + v3::dot(qdot.evaluate(t0), u.evaluate(t0)));
        worst = worst.max((-d_phase - coefficient).abs());

        // Transport part: the shift-derivative of the flowed label against
        // the label's own rate.
        for axis in 0..3 {
            let d_flow = richardson(|b| label.shift(-b).velocity().evaluate(t0)[axis], h);
            worst = worst.max((d_flow + qdot.evaluate(t0)[axis]).abs());
        }
    }

    // Diagonal tie to the grid operator: a spike ket at node q* is an exact
    // eigenvector of the inertial-frame operator at t0 = 0 (the stencil only
    // reads its zero neighbours), so its eigenvalue must equal the same
    // phase derivative.
    let frame = FrameSpec::inertial();
    for idx in [[10usize, 8, 3], [4, 12, 9], [12, 5, 8]] {
        let mut spike = GridWavefunction::zeros(17, 0.25, mass).expect("valid grid");
        spike.values_mut()[(idx[0], idx[1], idx[2])] = Complex64::new(1.0, 0.0);
        let q_star = spike.coordinate(idx);
        let applied = hamiltonian_apply(&frame, &spike, 0.0).expect("spike decays");
        let eigen = applied.values()[(idx[0], idx[1], idx[2])];
        let label = VelocityLabel::from_constant_velocity(q_star);
        let d_phase = richardson(
            |b| xi_phase(&pure_time_shift(b), &label, mass, sign).evaluate(0.0),
            h,
        );
        worst = worst.max((eigen.re - (-d_phase)).abs().max(eigen.im.abs()));
    }

    record("time-shift-generator-derivative", n, worst, atol)
}

/// Exact discrete identity `⟨[X̂_j, P̂_k]⟩ = i δ_jk ⟨avg_j⟩` on interior
/// states.
pub fn check_commutator_identity(seed: u64, atol: f64, mass: Mass) -> CheckRecord {
    let psi = interior_random(17, 0.25, mass, seed ^ 0xff, 2);
    let norm2 = psi.inner(&psi).expect("same grid").re;
    let mut worst = 0.0f64;
    for j in 0..3 {
        for k in 0..3 {
            let p = &momentum_op(&psi).expect("interior state decays")[k];
            let xp = position_op(p).expect("interior state decays")[j].clone();
            let x = &position_op(&psi).expect("interior state decays")[j];
            let px = momentum_op(x).expect("interior state decays")[k].clone();
            let comm = psi.inner(&xp.sub(&px).expect("same grid")).expect("same grid") / norm2;
            let want = if j == k {
                Complex64::new(0.0, 1.0)
                    * (psi.inner(&average_shift(&psi, j)).expect("same grid") / norm2)
            } else {
                Complex64::new(0.0, 0.0)
            };
            worst = worst.max((comm - want).norm());
        }
    }
    record("commutator-averaged-shift-identity", 9, worst, atol)
}

fn hermiticity_pairing(seed: u64, mass: Mass, t0: f64) -> (Complex64, Complex64) {
    let frame =
        FrameSpec::from_angular_velocity(Vec3Fn::constant([0.4, -0.8, 1.2]), Vec3Fn::zero());
    let phi = interior_random(17, 0.25, mass, seed ^ 0x1010, 2);
    let psi = interior_random(17, 0.25, mass, seed ^ 0x2020, 2);
    let lhs = phi
        .inner(&hamiltonian_apply(&frame, &psi, t0).expect("interior state decays"))
        .expect("same grid");
    let rhs = hamiltonian_apply(&frame, &phi, t0)
        .expect("interior state decays")
        .inner(&psi)
        .expect("same grid");
    (lhs, rhs)
}

/// `⟨φ|Ĥψ⟩ = ⟨Ĥφ|ψ⟩` for a constant rotation rate at `t0 = 0`, where the
/// transport coefficient never multiplies the component it differentiates.
pub fn check_hamiltonian_hermiticity(seed: u64, atol: f64, mass: Mass) -> CheckRecord {
    let (lhs, rhs) = hermiticity_pairing(seed, mass, 0.0);
    let gap = (lhs - rhs).norm() / lhs.norm().max(1e-300);
    record("hermiticity-constant-rate", 1, gap, atol)
}

/// Relative hermiticity defect at `t0 ≠ 0`, where the history-dependent
/// coefficients break the symmetry of the coefficient-left ordering.
/// Reported as a finding, not asserted.
pub fn hermiticity_ordering_defect(seed: u64, mass: Mass) -> f64 {
    let (lhs, rhs) = hermiticity_pairing(seed, mass, 0.7);
    (lhs - rhs).norm() / lhs.norm().max(1e-300)
}

// ---------------------------------------------------------------------------
// gauge

fn gaussian_packet(mass: Mass, seed: u64) -> GridWavefunction {
    // σ chosen so the 17³ boundary sits below the decay threshold; a random
    // plane-wave modulation varies the packet without touching the envelope.
    let mut s = Sampler::new(seed);
    let k = s.velocity();
    let sigma = 0.28;
    GridWavefunction::from_fn(17, 0.25, mass, |q| {
        Complex64::from_polar((-v3::dot(q, q) / (2.0 * sigma * sigma)).exp(), v3::dot(k, q))
    })
    .expect("valid grid")
    .normalized()
}

fn gauge_gap(
    frame: &FrameSpec,
    psi: &GridWavefunction,
    t0: f64,
    mass: Mass,
    drop_aq: bool,
    variant: A0Variant,
) -> f64 {
    let direct = hamiltonian_apply_with(frame, psi, t0, drop_aq).expect("packet decays");
    let fields = gauge_fields(frame, t0, mass, drop_aq);
    let gauged = gauge_hamiltonian_apply(&fields, psi, variant).expect("packet decays");
    direct.distance(&gauged) / direct.max_abs().max(1e-300)
}

/// Minimal-coupling form equals the direct operator for constant rotation
/// rates, on Gaussian packets, for both scalar-potential variants.
pub fn check_gauge_equivalence_constant(
    seed: u64,
    atol: f64,
    mass: Mass,
    drop_aq: bool,
) -> CheckRecord {
    let frame =
        FrameSpec::from_angular_velocity(Vec3Fn::constant([0.3, -0.7, 1.1]), Vec3Fn::zero());
    let mut worst = 0.0f64;
    let mut count = 0;
    for packet in 0..3 {
        let psi = gaussian_packet(mass, seed ^ (0x3030 + packet));
        for t0 in [0.0, 0.6] {
            for variant in [A0Variant::Substituted, A0Variant::RateTransposed] {
                worst = worst.max(gauge_gap(&frame, &psi, t0, mass, drop_aq, variant));
                count += 1;
            }
        }
    }
    record("gauge-equivalence-constant-rate", count, worst, atol)
}

/// Relative residuals of both scalar-potential variants against the direct
/// operator, for an arbitrary frame and time, on a seeded Gaussian packet:
/// `(substituted, rate-transposed)`.
pub fn gauge_residuals(
    frame: &FrameSpec,
    t0: f64,
    mass: Mass,
    drop_aq: bool,
    seed: u64,
) -> (f64, f64) {
    let psi = gaussian_packet(mass, seed ^ 0x4040);
    (
        gauge_gap(frame, &psi, t0, mass, drop_aq, A0Variant::Substituted),
        gauge_gap(frame, &psi, t0, mass, drop_aq, A0Variant::RateTransposed),
    )
}

/// Outcome of the scalar-potential adjudication under a time-dependent rate.
pub struct VariantAdjudication {
    pub record: CheckRecord,
    pub substituted_residual: f64,
    pub transposed_residual: f64,
    /// The variant that satisfied the identity, if exactly one did.
    pub satisfied: Option<A0Variant>,
}

/// For `Ω = (0,0,1+t)` at `t0 = 0.5` exactly one reading of the scalar
/// potential's rate term reproduces the direct operator; the check passes
/// only if the adjudication is unambiguous.
pub fn adjudicate_a0_variant(
    seed: u64,
    atol: f64,
    mass: Mass,
    drop_aq: bool,
) -> VariantAdjudication {
    let omega = Vec3Fn::new(TrigPoly::zero(), TrigPoly::zero(), &TrigPoly::one() + &TrigPoly::t());
    let frame = FrameSpec::from_angular_velocity(omega, Vec3Fn::zero());
    let psi = gaussian_packet(mass, seed ^ 0x4040);
    let t0 = 0.5;
    let sub = gauge_gap(&frame, &psi, t0, mass, drop_aq, A0Variant::Substituted);
    let trans = gauge_gap(&frame, &psi, t0, mass, drop_aq, A0Variant::RateTransposed);
    let satisfied = match (sub < atol, trans < atol) {
        (true, false) => Some(A0Variant::Substituted),
        (false, true) => Some(A0Variant::RateTransposed),
        _ => None,
    };
    let mut rec = record("gauge-equivalence-time-dependent-rate", 1, sub.min(trans), atol);
    rec.pass = satisfied.is_some();
    VariantAdjudication {
        record: rec,
        substituted_residual: sub,
        transposed_residual: trans,
        satisfied,
    }
}

// ---------------------------------------------------------------------------
// phase

/// Quadrature loop integral of the rotation coupling around rectangles
/// matches the flux closed form.
pub fn check_sagnac_stokes(seed: u64, n: usize, atol: f64, mass: Mass) -> CheckRecord {
    let mut s = Sampler::new(seed ^ 0x5050);
    let m = mass.value();
    let mut worst = 0.0f64;
    for _ in 0..n {
        let omega = s.velocity();
        let normal = s.unit_axis();
        let lx = s.scalar(0.3, 2.0);
        let ly = s.scalar(0.3, 2.0);
        let path = rectangle_path(lx, ly, normal).expect("positive sides");
        let field = |x: [f64; 3]| v3::scale(v3::cross(omega, x), 2.0 * m);
        let phase = loop_phase(field, &path).expect("closed path");
        let flux = rectangle_stokes_phase(mass, omega, lx, ly, normal).expect("positive sides");
        worst = worst.max((phase - flux).abs());
    }
    record("loop-phase-matches-flux-form", n, worst, atol)
}

/// Doubling the mass, the rotation rate, or the enclosed area doubles the
/// quadrature phase.
pub fn check_sagnac_linearity(seed: u64, n: usize, atol: f64, mass: Mass) -> CheckRecord {
    let mut s = Sampler::new(seed ^ 0x6060);
    let mut worst = 0.0f64;
    for _ in 0..n {
        let omega = s.velocity();
        let normal = s.unit_axis();
        let lx = s.scalar(0.3, 1.5);
        let ly = s.scalar(0.3, 1.5);
        let numeric = |mass: Mass, omega: [f64; 3], lx: f64, ly: f64| {
            let path = rectangle_path(lx, ly, normal).expect("positive sides");
            let m = mass.value();
            loop_phase(|x: [f64; 3]| v3::scale(v3::cross(omega, x), 2.0 * m), &path)
                .expect("closed path")
        };
        let base = numeric(mass, omega, lx, ly);
        let double_mass = numeric(Mass::new(2.0 * mass.value()).expect("positive"), omega, lx, ly);
        let double_rate = numeric(mass, v3::scale(omega, 2.0), lx, ly);
        let double_area = numeric(mass, omega, 2.0 * lx, ly);
        for doubled in [double_mass, double_rate, double_area] {
            worst = worst.max((doubled - 2.0 * base).abs());
        }
    }
    record("loop-phase-linearity", n, worst, atol)
}

// ---------------------------------------------------------------------------
// timefn

fn sample_trig_poly(s: &mut Sampler) -> TrigPoly {
    let mut f = TrigPoly::term(s.scalar(0.0, 2.9) as u32, 0.0, s.scalar(-1.0, 1.0), 0.0);
    for _ in 0..2 {
        let freq = 0.5 * (1.0 + s.scalar(0.0, 3.9).floor());
        f = &f
            + &TrigPoly::term(
                s.scalar(0.0, 1.9) as u32,
                freq,
                s.scalar(-1.0, 1.0),
                s.scalar(-1.0, 1.0),
            );
    }
    f
}

/// Differentiating the antiderivative returns the original function.
pub fn check_antiderivative_roundtrip(seed: u64, n: usize, atol: f64) -> CheckRecord {
    let mut s = Sampler::new(seed ^ 0x7070);
    let mut worst = 0.0f64;
    for _ in 0..n {
        let f = sample_trig_poly(&mut s);
        worst = worst.max(f.antiderivative().differentiate().distance(&f));
    }
    record("antiderivative-derivative-roundtrip", n, worst, atol)
}

/// Product rule `(fg)' = f'g + fg'` in the exact ring.
pub fn check_product_rule(seed: u64, n: usize, atol: f64) -> CheckRecord {
    let mut s = Sampler::new(seed ^ 0x8080);
    let mut worst = 0.0f64;
    for _ in 0..n {
        let f = sample_trig_poly(&mut s);
        let g = sample_trig_poly(&mut s);
        let lhs = (&f * &g).differentiate();
        let rhs = &(&f.differentiate() * &g) + &(&f * &g.differentiate());
        worst = worst.max(lhs.distance(&rhs));
    }
    record("derivative-product-rule", n, worst, atol)
}

/// Printing and reparsing reproduces the function exactly.
pub fn check_display_roundtrip(seed: u64, n: usize, atol: f64) -> CheckRecord {
    let mut s = Sampler::new(seed ^ 0x9090);
    let mut worst = 0.0f64;
    for _ in 0..n {
        let f = sample_trig_poly(&mut s);
        let reparsed: TrigPoly = f.to_string().parse().expect("printed form parses");
        worst = worst.max(f.distance(&reparsed));
    }
    record("text-form-roundtrip", n, worst, atol)
}

// ---------------------------------------------------------------------------
// findings

fn finding_time_shift_sign(mass: Mass, sign: TimeShiftSign) -> Finding {
    let m = mass.value();
    let label = VelocityLabel::from_constant_velocity([1.0, 0.0, 0.0]);
    let standard =
        xi_phase(&pure_time_shift(1.0), &label, mass, TimeShiftSign::Standard).evaluate(0.0);
    let flipped =
        xi_phase(&pure_time_shift(1.0), &label, mass, TimeShiftSign::Flipped).evaluate(0.0);
    finding(
        "time-shift-phase-sign",
        format!(
            "A unit time shift on a unit constant-velocity ket gives phase {standard:.3} under \
             the standard convention and {flipped:.3} under the flipped one (m = {m}): the \
             literal reading of the bracket produces −mq²b/2 where the classical \
             central-extension exponent carries +½q′²b. The standard convention is also the \
             one whose shift-derivative matches the generator's sign (see \
             time-shift-generator-derivative). Active convention for this run: {sign}."
        ),
    )
}

fn finding_galilei_reduction_cancellation(mass: Mass) -> Finding {
    let mut s = Sampler::new(0xb0b);
    let (h2, h1) = (s.galilei(), s.galilei());
    let w = two_cocycle(&h2.embed(), &h1.embed(), mass);
    let classical = galilei_two_cocycle(&h2, &h1, mass);
    finding(
        "inertial-pair-cocycle-cancellation",
        format!(
            "On inertial-frame pairs each half of the function-valued two-cochain grows \
             linearly in time; the growth cancels exactly in the antisymmetrized difference, \
             leaving the classical constant (sample: value {:.6}, residual from constant \
             {:.2e}).",
            classical,
            w.distance(&TrigPoly::constant(classical)),
        ),
    )
}

fn finding_three_cocycle_closure(max_residual: f64) -> Finding {
    finding(
        "three-cochain-closure",
        format!(
            "The level-3 closure identity is evaluated with the time-shift action on the \
             outermost slot, matching the coboundary convention used to derive the \
             three-cochain; its worst residual on random 4-tuples was {max_residual:.2e}. A \
             nonzero residual here would implicate the chosen closure form, not arithmetic."
        ),
    )
}

fn finding_associator_normalization() -> Finding {
    finding(
        "associator-normalization",
        "Loop composition adds the two-cochain divided by the mass, so the associator phase \
         is −(1/m)·(coboundary of the cochain), re-anchored by the total time shift. The \
         closed form and the direct double composition are compared under that single \
         convention; moving the 1/m between the composition law and the associator rescales \
         both sides together and cannot hide an error."
            .to_string(),
    )
}

fn finding_inverse_coincidence(mass: Mass) -> Finding {
    let mut s = Sampler::new(0xc0c);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let x = sample_loop(&mut s);
        worst = worst.max(x.left_inverse(mass).distance(&x.right_inverse(mass)));
    }
    finding(
        "inverse-coincidence",
        format!(
            "Left and right loop inverses coincide identically (worst gap {worst:.2e} over 50 \
             samples): the twist evaluates an element against its group inverse symmetrically, \
             so the two division problems share their solution."
        ),
    )
}

fn finding_defect_shorthand(seed: u64, mass: Mass, sign: TimeShiftSign) -> Finding {
    let mut s = Sampler::new(seed ^ 0xd0d);
    let mut worst_short = 0.0f64;
    let mut worst_impl = 0.0f64;
    for _ in 0..40 {
        let (x2, x1) = (sample_loop(&mut s), sample_loop(&mut s));
        let q = VelocityLabel::from_constant_velocity(s.velocity());
        let direct = xi2_direct(&x2, &x1, &q, mass, sign).expect("transport is consistent");

        // Compact shorthand that groups the history term as a single
        // ω(g₂, g₁·g_q) with the untransported label boost.
        let g2 = &x2.element;
        let g1 = &x1.element;
        let b1 = g1.time_shift;
        let m = mass.value();
        let om2 = angular_velocity(&g2.rotation, 1e-9).expect("sampled rotations are valid");
        let a_q = q.boost().clone();
        let cross1 = (&g1.rotation * &a_q).cross(&g1.translation);
        let cross2 =
            (&g2.rotation.shift(b1) * &g1.translation).cross(&g2.translation.shift(b1));
        let rotational = om2.shift(b1).dot(&(&cross1 - &cross2)).scale(m);
        let phase_term = (&x2.phase - &x2.phase.shift(b1)).scale(m);
        let g1_gq = g1.compose(&LineGroupElement::new(Mat3Fn::identity(), a_q.clone(), 0.0));
        let w = two_cocycle(g2, &g1_gq, mass);
        let history_bare = &w.shift(-b1) - &w;
        let base = &rotational + &phase_term;
        // Two normalization readings of the ω term: the cochain already
        // carries the mass, or the printed m multiplies it again.
        let gap = direct
            .distance(&(&base + &history_bare))
            .min(direct.distance(&(&base + &history_bare.scale(m))));
        worst_short = worst_short.max(gap);

        let closed = xi2_closed(&x2, &x1, &q, mass, sign).expect("transport is consistent");
        worst_impl = worst_impl.max(direct.distance(&closed));
    }
    finding(
        "defect-phase-shorthand-gap",
        format!(
            "A compact closed form for the two-step phase defect that groups the history term \
             as a single ω(g₂, g₁·g_q) with the untransported label boost misses the direct \
             three-ξ computation by up to {worst_short:.2e} on random pairs (taking the better \
             of both normalization readings of the ω term), while the implemented closed form \
             — which pivots on the transported, time-shifted label — agrees to \
             {worst_impl:.2e}. The compact grouping drops the terms generated by commuting the \
             first element's time shift past the label boost."
        ),
    )
}

fn finding_galilei_exponent(mass: Mass, sign: TimeShiftSign) -> Finding {
    finding(
        "inertial-sector-exponent-offset",
        format!(
            "On the inertial sector the representation phase differs from the classical \
             central-extension exponent by m(q′·v − ½v²)t plus a constant set by the \
             time-shift bracket (−mq′²b under the standard convention, 0 under the flipped \
             one; active convention {sign}, mass {}). The slope depends on the ket label, so \
             the two exponents are genuinely different phase assignments — consistent \
             time-dependent bookkeeping, not a relabelling.",
            mass.value()
        ),
    )
}

fn finding_variant_adjudication(adj: &VariantAdjudication) -> Finding {
    let named = match adj.satisfied {
        Some(v) => format!("only the `{v}` variant"),
        None => "neither variant unambiguously".to_string(),
    };
    finding(
        "scalar-potential-rate-term",
        format!(
            "With rate Ω = (0,0,1+t) at t0 = 0.5, {named} satisfies the minimal-coupling \
             identity: residual {:.2e} with the rate inside the coefficient (substituted) vs \
             {:.2e} with the transposed contraction. The two readings differ by \
             2m(Ω̇×a_q)·X̂ and coincide whenever Ω̇ = 0 or t0 = 0.",
            adj.substituted_residual, adj.transposed_residual
        ),
    )
}

fn finding_hermiticity(seed: u64, mass: Mass) -> Finding {
    let defect = hermiticity_ordering_defect(seed, mass);
    finding(
        "hermiticity-history-ordering",
        format!(
            "At t0 = 0 the operator is exactly hermitian on the grid: every transport \
             coefficient is perpendicular to its own differentiated direction, so the \
             first-order terms antisymmetrize cleanly. At t0 = 0.7 the history-dependent \
             coefficients break the symmetry of the coefficient-left ordering by a relative \
             {defect:.2e}; reported, not asserted."
        ),
    )
}

fn finding_commutator_discretization(mass: Mass) -> Finding {
    let psi = GridWavefunction::gaussian(29, 0.25, mass, 0.5, [0.0; 3]).expect("valid grid");
    let norm2 = psi.inner(&psi).expect("same grid").re;
    let avg = psi.inner(&average_shift(&psi, 0)).expect("same grid") / norm2;
    finding(
        "commutator-discretization",
        format!(
            "The discrete canonical commutator is exactly i·δ_jk·(neighbour average), not i: \
             on a smooth packet the averaging factor is {:.4}, approaching 1 at second order \
             in the spacing. The identity check asserts the exact discrete form; the continuum \
             value is recovered only in the refinement limit.",
            avg.re
        ),
    )
}

fn finding_operator_associativity_profile(n: usize, nontrivial: usize) -> Finding {
    finding(
        "operator-associativity-sample-profile",
        format!(
            "{nontrivial} of {n} sampled triples had a nonzero associator (phase gap above \
             1e-12), so the cancellation between the defect phases and the associator was \
             exercised where associativity genuinely fails, not only on the associative \
             sector."
        ),
    )
}

fn finding_frame_velocity_method() -> Finding {
    finding(
        "frame-velocity-solution-method",
        "The implicit frame-velocity relation is solved in closed form by differentiating the \
         rotated straight-line history; fixed-point iteration on the relation itself does not \
         contract (secular terms accumulate instead of shrinking), so no iterative fallback \
         is offered and the relation is verified on the result instead."
            .to_string(),
    )
}

// ---------------------------------------------------------------------------
// assembly

/// Runs every suite with per-check defaults (overridable through `opts`) and
/// returns the reports sorted by suite name.
pub fn run_all(opts: &VerifyOptions) -> Vec<SuiteReport> {
    let VerifyOptions { seed, mass, time_shift_sign: sign, drop_aq, .. } = *opts;

    let closure = check_three_cocycle_condition(seed, opts.n(100), opts.tol(1e-9), mass);
    let closure_residual = closure.max_residual;
    let cocycles = SuiteReport {
        suite: "cocycles".to_string(),
        checks: vec![
            check_galilei_cocycle_reduction(seed, opts.n(500), opts.tol(1e-10), mass),
            check_three_cocycle_closed_form(seed, opts.n(200), opts.tol(1e-9), mass),
            check_three_cocycle_constant_rotations(seed, opts.n(200), opts.tol(1e-9), mass),
            closure,
        ],
        findings: vec![
            finding_galilei_reduction_cancellation(mass),
            finding_three_cocycle_closure(closure_residual),
        ],
    };

    let (assoc, nontrivial) =
        operator_associativity_profile(seed, opts.n(100), opts.tol(1e-9), mass, sign);
    let assoc_samples = assoc.n_samples;
    let galrep = SuiteReport {
        suite: "galrep".to_string(),
        checks: vec![
            check_xi2_closed_form(seed, opts.n(200), opts.tol(1e-9), mass, sign),
            assoc,
            check_galilei_exponent_difference(seed, opts.n(100), opts.tol(1e-9), mass, sign),
            check_generator_time_shift(seed, opts.n(40), opts.tol(1e-6), mass, sign),
        ],
        findings: vec![
            finding_time_shift_sign(mass, sign),
            finding_defect_shorthand(seed, mass, sign),
            finding_galilei_exponent(mass, sign),
            finding_operator_associativity_profile(assoc_samples, nontrivial),
        ],
    };

    let adjudication = adjudicate_a0_variant(seed, opts.tol(1e-5), mass, drop_aq);
    let gauge = SuiteReport {
        suite: "gauge".to_string(),
        checks: vec![
            check_gauge_equivalence_constant(seed, opts.tol(1e-5), mass, drop_aq),
            adjudication.record.clone(),
        ],
        findings: vec![finding_variant_adjudication(&adjudication)],
    };

    let grid = SuiteReport {
        suite: "grid".to_string(),
        checks: vec![
            check_commutator_identity(seed, opts.tol(1e-12), mass),
            check_hamiltonian_hermiticity(seed, opts.tol(1e-5), mass),
        ],
        findings: vec![
            finding_hermiticity(seed, mass),
            finding_commutator_discretization(mass),
        ],
    };

    let kinematics = SuiteReport {
        suite: "kinematics".to_string(),
        checks: vec![
            check_rotating_frame_relation(seed, opts.n(100), opts.tol(1e-8)),
            check_qdot_decomposition_sum(seed, opts.n(100), opts.tol(1e-8)),
        ],
        findings: vec![finding_frame_velocity_method()],
    };

    let linegroup = SuiteReport {
        suite: "linegroup".to_string(),
        checks: vec![check_group_associativity(seed, opts.n(500), opts.tol(1e-10))],
        findings: vec![],
    };

    let lineloop = SuiteReport {
        suite: "lineloop".to_string(),
        checks: vec![
            check_associator_closed_form(seed, opts.n(200), opts.tol(1e-9), mass),
            check_associator_galilei_identity(seed, opts.n(200), opts.tol(1e-9), mass),
            check_inverse_coincidence(seed, opts.n(100), opts.tol(1e-9), mass),
        ],
        findings: vec![
            finding_associator_normalization(),
            finding_inverse_coincidence(mass),
        ],
    };

    let phase = SuiteReport {
        suite: "phase".to_string(),
        checks: vec![
            check_sagnac_stokes(seed, opts.n(50), opts.tol(1e-9), mass),
            check_sagnac_linearity(seed, opts.n(20), opts.tol(1e-9), mass),
        ],
        findings: vec![],
    };

    let timefn = SuiteReport {
        suite: "timefn".to_string(),
        checks: vec![
            check_antiderivative_roundtrip(seed, opts.n(200), opts.tol(1e-10)),
            check_product_rule(seed, opts.n(200), opts.tol(1e-10)),
            check_display_roundtrip(seed, opts.n(200), opts.tol(1e-15)),
        ],
        findings: vec![],
    };

    // Assembled in suite-name order so report layout is stable.
    vec![cocycles, galrep, gauge, grid, kinematics, linegroup, lineloop, phase, timefn]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m() -> Mass {
        Mass::new(1.0).unwrap()
    }

    #[test]
    fn default_options_pass_every_suite() {
        let mut opts = VerifyOptions::new(m());
        opts.samples = Some(8);
        let suites = run_all(&opts);
        assert_eq!(suites.len(), 9);
        let names: Vec<&str> = suites.iter().map(|s| s.suite.as_str()).collect();
        let mut sorted = names.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(names, sorted);
        for suite in &suites {
            for check in &suite.checks {
                assert!(
                    check.pass,
                    "{}/{} failed: {} !< {}",
                    suite.suite, check.check, check.max_residual, check.atol
                );
            }
        }
    }

    #[test]
    fn impossible_tolerance_fails_numeric_checks() {
        let mut opts = VerifyOptions::new(m());
        opts.samples = Some(4);
        opts.atol = Some(1e-300);
        let suites = run_all(&opts);
        assert!(suites.iter().any(|s| !s.all_pass()));
    }

    #[test]
    fn reports_are_deterministic_for_a_seed() {
        let mut opts = VerifyOptions::new(m());
        opts.samples = Some(3);
        let a = serde_json::to_string(&run_all(&opts)).unwrap();
        let b = serde_json::to_string(&run_all(&opts)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn exponent_difference_holds_under_both_sign_conventions() {
        for sign in [TimeShiftSign::Standard, TimeShiftSign::Flipped] {
            let rec = check_galilei_exponent_difference(11, 50, 1e-9, m(), sign);
            assert!(rec.pass, "{sign}: residual {}", rec.max_residual);
        }
    }

    #[test]
    fn flipped_sign_convention_breaks_the_generator_match() {
        let rec = check_generator_time_shift(7, 6, 1e-6, m(), TimeShiftSign::Flipped);
        assert!(!rec.pass, "flipped convention should not generate the evolution");
    }
}
