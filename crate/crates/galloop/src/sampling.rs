//! Seeded random generators for group elements, used by the verification
//! suites and tests. ChaCha8 keeps every run reproducible from a single `u64`
//! seed across platforms.
//!
//! Frequencies (rotation rates and translation harmonics) are drawn from the
//! half-integer lattice `{0.5, 1.0, …}` rather than a continuum. Products of
//! trig polynomials combine frequencies as sums and differences, so a lattice
//! is closed under composition and keeps term counts bounded through the
//! four-deep products the cocycle checks build; generic real frequencies make
//! every composition level double the number of distinct harmonics. Axes,
//! phases, coefficients, and time shifts stay fully continuous, so the checks
//! still sample the group broadly.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::linegroup::{rotation_about_axis, GalileiElement, LineGroupElement};
use crate::timefn::{Mat3Fn, TrigPoly, Vec3Fn};
use crate::v3;

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn unit_axis(&mut self) -> [f64; 3] {
        loop {
            let v = [
                self.rng.gen_range(-1.0..1.0),
                self.rng.gen_range(-1.0..1.0),
                self.rng.gen_range(-1.0..1.0),
            ];
            let n = v3::norm(v);
            if (0.3..=1.0).contains(&n) {
                return v3::scale(v, 1.0 / n);
            }
        }
    }

    /// A rotation family: one or two axis factors, each with angle
    /// `θ₀ + ω·t`, `ω ∈ [−2, 2]` (occasionally frozen to 0).
    pub fn rotation(&mut self) -> Mat3Fn {
        let factors = self.rng.gen_range(1..=2);
        let mut r = Mat3Fn::identity();
        for _ in 0..factors {
            r = &r * &self.axis_factor(true);
        }
        r
    }

    /// A time-independent rotation.
    pub fn constant_rotation(&mut self) -> Mat3Fn {
        let axis = self.unit_axis();
        let theta0 = self.rng.gen_range(0.0..std::f64::consts::TAU);
        rotation_about_axis(axis, theta0, 0.0).expect("axis is normalized")
    }

    fn axis_factor(&mut self, allow_time_dependence: bool) -> Mat3Fn {
        let axis = self.unit_axis();
        let theta0 = self.rng.gen_range(0.0..std::f64::consts::TAU);
        let omega = if allow_time_dependence && self.rng.gen_bool(0.85) {
            // ±{0.5, 1, 1.5, 2}
            0.5 * self.rng.gen_range(1..=4) as f64 * if self.rng.gen_bool(0.5) { 1.0 } else { -1.0 }
        } else {
            0.0
        };
        rotation_about_axis(axis, theta0, omega).expect("axis is normalized")
    }

    /// A translation family: sparse polynomial of degree ≤ 3 plus at most one
    /// harmonic per component.
    pub fn translation(&mut self) -> Vec3Fn {
        Vec3Fn(std::array::from_fn(|_| {
            let mut f = TrigPoly::zero();
            for k in 0..=3u32 {
                if self.rng.gen_bool(0.6) {
                    f = &f + &TrigPoly::monomial(k, self.coeff());
                }
            }
            if self.rng.gen_bool(0.6) {
                let w = 0.5 * self.rng.gen_range(1..=5) as f64; // {0.5, …, 2.5}
                f = &f + &TrigPoly::term(0, w, self.coeff(), self.coeff());
            }
            f
        }))
    }

    fn coeff(&mut self) -> f64 {
        self.rng.gen_range(-1.5..1.5)
    }

    pub fn time_shift(&mut self) -> f64 {
        self.rng.gen_range(-1.0..1.0)
    }

    pub fn element(&mut self) -> LineGroupElement {
        LineGroupElement::new(self.rotation(), self.translation(), self.time_shift())
    }

    /// An element whose rotation is constant in time (translation and time
    /// shift still free).
    pub fn constant_rotation_element(&mut self) -> LineGroupElement {
        LineGroupElement::new(
            self.constant_rotation(),
            self.translation(),
            self.time_shift(),
        )
    }

    /// A pure translation `(I, a(t), 0)`.
    pub fn pure_translation(&mut self) -> LineGroupElement {
        LineGroupElement::from_translation(self.translation())
    }

    pub fn galilei(&mut self) -> GalileiElement {
        GalileiElement {
            rotation: self.constant_rotation().evaluate(0.0),
            boost: std::array::from_fn(|_| self.coeff()),
            translation: std::array::from_fn(|_| self.coeff()),
            time_shift: self.time_shift(),
        }
    }

    /// A constant velocity eigenvalue.
    pub fn velocity(&mut self) -> [f64; 3] {
        std::array::from_fn(|_| self.rng.gen_range(-1.5..1.5))
    }

    pub fn scalar(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.gen_range(lo..hi)
    }
}
