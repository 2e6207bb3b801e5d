//! Physics of non-inertial frames: rotating-frame kinematics, the grid
//! Hamiltonian, the simulated gauge potentials, and interferometric loop
//! phases.

pub mod gauge;
pub mod grid;
pub mod kinematics;
pub mod phase;

pub use gauge::{gauge_fields, gauge_hamiltonian_apply, A0Variant, GaugeFields};
pub use grid::{
    hamiltonian_apply, momentum_op, position_op, GridError, GridWavefunction,
};
pub use kinematics::{
    qdot_decomposition, rotating_frame_velocity, KinematicsError, QdotDecomposition,
};
pub use phase::{loop_phase, rectangle_path, rectangle_stokes_phase, PathError};

use crate::linegroup::{angular_velocity, LineGroupError};
use crate::timefn::{Mat3Fn, Vec3Fn};

const ROTATION_ATOL: f64 = 1e-9;

/// A non-inertial reference frame: a rotation and a translation history.
///
/// The grid and gauge operators only ever need the angular velocity and its
/// derivative, so a frame may be specified either by its rotation matrix
/// (with `Ω` derived) or by `Ω` directly — the latter also covers angular
/// velocities like `(0, 0, 1 + t)` whose rotation matrix has no
/// trigonometric-polynomial representation. Operations that genuinely need
/// the matrix error out on `Ω`-only frames.
#[derive(Clone, Debug)]
pub struct FrameSpec {
    rotation: Option<Mat3Fn>,
    translation: Vec3Fn,
    omega: Vec3Fn,
}

impl FrameSpec {
    pub fn inertial() -> Self {
        FrameSpec {
            rotation: Some(Mat3Fn::identity()),
            translation: Vec3Fn::zero(),
            omega: Vec3Fn::zero(),
        }
    }

    pub fn from_rotation(rotation: Mat3Fn, translation: Vec3Fn) -> Result<Self, LineGroupError> {
        let omega = angular_velocity(&rotation, ROTATION_ATOL)?;
        Ok(FrameSpec { rotation: Some(rotation), translation, omega })
    }

    pub fn from_angular_velocity(omega: Vec3Fn, translation: Vec3Fn) -> Self {
        FrameSpec { rotation: None, translation, omega }
    }

    pub fn rotation(&self) -> Option<&Mat3Fn> {
        self.rotation.as_ref()
    }

    pub fn translation(&self) -> &Vec3Fn {
        &self.translation
    }

    pub fn omega(&self) -> &Vec3Fn {
        &self.omega
    }

    pub fn omega_dot(&self) -> Vec3Fn {
        self.omega.differentiate()
    }
}
