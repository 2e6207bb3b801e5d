//! Text format for non-inertial frame specifications.
//!
//! One `key = value` assignment per line; `#` starts a comment. Values are
//! comma-separated time functions in the same grammar the library prints
//! (`0.5*cos(2*t) + 1*t`). Keys:
//!
//! * `omega` — three entries, the angular velocity; or
//! * `r` — nine entries, the rotation family in row-major order (the angular
//!   velocity is then derived, and the family is validated as a rotation);
//! * `a` — three entries, the translation (optional, defaults to zero).
//!
//! Exactly one of `omega`/`r` must be present.

use galloop::noninertial::FrameSpec;
use galloop::timefn::{Mat3Fn, TrigPoly, Vec3Fn};

pub fn parse_frame(text: &str) -> Result<FrameSpec, String> {
    let mut rotation: Option<Vec<TrigPoly>> = None;
    let mut translation: Option<Vec<TrigPoly>> = None;
    let mut omega: Option<Vec<TrigPoly>> = None;

    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("frame line {}: expected `key = value`", i + 1))?;
        let entries = value
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<TrigPoly>()
                    .map_err(|e| format!("frame line {}: {e}", i + 1))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let slot = match key.trim() {
            "r" => &mut rotation,
            "a" => &mut translation,
            "omega" => &mut omega,
            other => {
                return Err(format!(
                    "frame line {}: unknown key {other:?} (expected r, a, or omega)",
                    i + 1
                ))
            }
        };
        if slot.is_some() {
            return Err(format!("frame line {}: duplicate key {:?}", i + 1, key.trim()));
        }
        *slot = Some(entries);
    }

    let a = match translation {
        None => Vec3Fn::zero(),
        Some(entries) => {
            let [x, y, z] = *to_array::<3>("a", entries)?;
            Vec3Fn::new(x, y, z)
        }
    };

    match (rotation, omega) {
        (Some(_), Some(_)) => {
            Err("frame: give either r or omega, not both (omega is derived from r)".to_string())
        }
        (None, None) => Err("frame: one of r or omega is required".to_string()),
        (Some(entries), None) => {
            let e = to_array::<9>("r", entries)?;
            let [e0, e1, e2, e3, e4, e5, e6, e7, e8] = *e;
            let rot = Mat3Fn([[e0, e1, e2], [e3, e4, e5], [e6, e7, e8]]);
            FrameSpec::from_rotation(rot, a).map_err(|e| format!("frame: {e}"))
        }
        (None, Some(entries)) => {
            let [x, y, z] = *to_array::<3>("omega", entries)?;
            Ok(FrameSpec::from_angular_velocity(Vec3Fn::new(x, y, z), a))
        }
    }
}

fn to_array<const N: usize>(key: &str, entries: Vec<TrigPoly>) -> Result<Box<[TrigPoly; N]>, String> {
    let found = entries.len();
    entries
        .try_into()
        .map(|a: [TrigPoly; N]| Box::new(a))
        .map_err(|_| format!("frame: key {key:?} needs {N} comma-separated entries, found {found}"))
}
