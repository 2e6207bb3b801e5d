//! Loop prolongation of the Galilean line group and the physics it induces:
//! exact time-dependent algebra, two- and three-cocycles, the loop extension,
//! velocity-eigenstate representations, and rotating-frame Hamiltonians with
//! their simulated gauge potentials.

pub mod cocycles;
pub mod galrep;
pub mod lineloop;
pub mod linegroup;
pub mod noninertial;
pub mod sampling;
pub mod timefn;
pub mod verify;

pub(crate) mod v3;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("mass must be strictly positive and finite, got {0}")]
pub struct InvalidMass(pub f64);

/// Particle mass, validated strictly positive.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mass(f64);

impl Mass {
    pub fn new(m: f64) -> Result<Mass, InvalidMass> {
        if m.is_finite() && m > 0.0 {
            Ok(Mass(m))
        } else {
            Err(InvalidMass(m))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}
