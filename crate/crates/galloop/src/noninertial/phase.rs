//! Loop integrals of the simulated vector potential.
//!
//! A closed velocity-space circuit through `A(x) = 2m Ω × x` picks up the
//! Sagnac-type phase `∮ A·dl = 4m Ω·S`, with `S` the oriented area of the
//! circuit. The line integral is evaluated per segment with four-point
//! Gauss–Legendre quadrature, which is exact for the linear fields at hand,
//! and checked against the closed-form flux through a rectangle.

use std::io;

use thiserror::Error;

use crate::v3;
use crate::Mass;

const GAUSS_NODES: [f64; 4] = [
    -0.8611363115940526,
    -0.3399810435848563,
    0.3399810435848563,
    0.8611363115940526,
];
const GAUSS_WEIGHTS: [f64; 4] = [
    0.3478548451374538,
    0.6521451548625461,
    0.6521451548625461,
    0.3478548451374538,
];

const CLOSURE_ATOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum PathError {
    #[error("a circuit needs at least 3 vertices, got {0}")]
    TooShort(usize),
    #[error("path endpoints differ by {gap:.3e}; the circuit must close")]
    OpenPath { gap: f64 },
    #[error("rectangle sides must be positive, got {0} x {1}")]
    DegenerateRectangle(f64, f64),
    #[error("the rectangle normal must be nonzero")]
    ZeroNormal,
}

/// `∮ field·dl` over a closed polygonal path (last vertex = first).
pub fn loop_phase(
    field: impl Fn([f64; 3]) -> [f64; 3],
    path: &[[f64; 3]],
) -> Result<f64, PathError> {
    if path.len() < 3 {
        return Err(PathError::TooShort(path.len()));
    }
    let gap = v3::norm(v3::sub(path[path.len() - 1], path[0]));
    if gap > CLOSURE_ATOL {
        return Err(PathError::OpenPath { gap });
    }
    let mut total = 0.0;
    for pair in path.windows(2) {
        let (p, q) = (pair[0], pair[1]);
        let step = v3::sub(q, p);
        for (node, weight) in GAUSS_NODES.iter().zip(GAUSS_WEIGHTS) {
            let s = 0.5 * (node + 1.0);
            let x = v3::add(p, v3::scale(step, s));
            total += 0.5 * weight * v3::dot(field(x), step);
        }
    }
    Ok(total)
}

/// Closed rectangle centered at the origin with side `lx` × `ly` and the
/// given plane normal; the five vertices circulate right-handedly about it.
pub fn rectangle_path(lx: f64, ly: f64, normal: [f64; 3]) -> Result<Vec<[f64; 3]>, PathError> {
    if !(lx > 0.0 && ly > 0.0) {
        return Err(PathError::DegenerateRectangle(lx, ly));
    }
    let n_norm = v3::norm(normal);
    if !(n_norm > 0.0) || !n_norm.is_finite() {
        return Err(PathError::ZeroNormal);
    }
    let n = v3::scale(normal, 1.0 / n_norm);

    // Seed the in-plane frame from the axis least aligned with the normal.
    let axes = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let seed = axes
        .into_iter()
        .min_by(|a, b| {
            v3::dot(*a, n)
                .abs()
                .partial_cmp(&v3::dot(*b, n).abs())
                .unwrap()
        })
        .unwrap();
    let u_raw = v3::cross(seed, n);
    let u = v3::scale(u_raw, 1.0 / v3::norm(u_raw));
    let v = v3::cross(n, u);

    let corner = |su: f64, sv: f64| {
        v3::add(
            v3::scale(u, 0.5 * su * lx),
            v3::scale(v, 0.5 * sv * ly),
        )
    };
    Ok(vec![
        corner(-1.0, -1.0),
        corner(1.0, -1.0),
        corner(1.0, 1.0),
        corner(-1.0, 1.0),
        corner(-1.0, -1.0),
    ])
}

/// Flux form of the same circuit: `∮ (2mΩ×x)·dl = 4m lx ly (Ω·n̂)`.
pub fn rectangle_stokes_phase(
    mass: Mass,
    omega: [f64; 3],
    lx: f64,
    ly: f64,
    normal: [f64; 3],
) -> Result<f64, PathError> {
    if !(lx > 0.0 && ly > 0.0) {
        return Err(PathError::DegenerateRectangle(lx, ly));
    }
    let n_norm = v3::norm(normal);
    if !(n_norm > 0.0) || !n_norm.is_finite() {
        return Err(PathError::ZeroNormal);
    }
    let n = v3::scale(normal, 1.0 / n_norm);
    Ok(4.0 * mass.value() * lx * ly * v3::dot(omega, n))
}

/// Writes `(omega, area, phase)` sweep rows as CSV.
pub fn write_phase_sweep_csv<W: io::Write>(
    rows: &[(f64, f64, f64)],
    out: &mut W,
) -> io::Result<()> {
    writeln!(out, "omega,area,phase")?;
    for (omega, area, phase) in rows {
        writeln!(out, "{omega},{area},{phase}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m() -> Mass {
        Mass::new(1.0).unwrap()
    }

    fn rotation_field(mass: Mass, omega: [f64; 3]) -> impl Fn([f64; 3]) -> [f64; 3] {
        move |x| v3::scale(v3::cross(omega, x), 2.0 * mass.value())
    }

    #[test]
    fn constant_fields_integrate_to_zero_around_any_circuit() {
        let field = |_x: [f64; 3]| [0.7, -0.2, 1.3];
        let triangle = [
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.5],
            [0.3, 1.2, -0.4],
            [0.0, 0.0, 0.0],
        ];
        assert!(loop_phase(field, &triangle).unwrap().abs() < 1e-12);
    }

    #[test]
    fn unit_square_about_the_rotation_axis_gives_four_m() {
        let omega = [0.0, 0.0, 1.0];
        let path = rectangle_path(1.0, 1.0, [0.0, 0.0, 1.0]).unwrap();
        let phase = loop_phase(rotation_field(m(), omega), &path).unwrap();
        assert!((phase - 4.0).abs() < 1e-10, "phase {phase}");
        let flux = rectangle_stokes_phase(m(), omega, 1.0, 1.0, [0.0, 0.0, 1.0]).unwrap();
        assert!((phase - flux).abs() < 1e-10);
    }

    #[test]
    fn tilted_circuits_match_the_flux_form() {
        let mass = Mass::new(1.7).unwrap();
        let omega = [0.4, -1.1, 0.8];
        for (lx, ly, normal) in [
            (1.0, 2.0, [0.0, 0.0, 1.0]),
            (0.5, 0.5, [1.0, 1.0, 1.0]),
            (2.0, 0.25, [-0.3, 0.9, 0.2]),
        ] {
            let path = rectangle_path(lx, ly, normal).unwrap();
            let phase = loop_phase(rotation_field(mass, omega), &path).unwrap();
            let flux = rectangle_stokes_phase(mass, omega, lx, ly, normal).unwrap();
            assert!(
                (phase - flux).abs() < 1e-9,
                "lx={lx} ly={ly} normal={normal:?}: {phase} vs {flux}"
            );
        }
    }

    #[test]
    fn phase_is_linear_in_mass_rate_and_area() {
        let base = rectangle_stokes_phase(m(), [0.0, 0.0, 1.5], 1.0, 2.0, [0.0, 0.0, 1.0]);
        let base = base.unwrap();
        let double_mass = rectangle_stokes_phase(
            Mass::new(2.0).unwrap(),
            [0.0, 0.0, 1.5],
            1.0,
            2.0,
            [0.0, 0.0, 1.0],
        )
        .unwrap();
        let double_rate =
            rectangle_stokes_phase(m(), [0.0, 0.0, 3.0], 1.0, 2.0, [0.0, 0.0, 1.0]).unwrap();
        let double_area =
            rectangle_stokes_phase(m(), [0.0, 0.0, 1.5], 2.0, 2.0, [0.0, 0.0, 1.0]).unwrap();
        for doubled in [double_mass, double_rate, double_area] {
            assert!((doubled - 2.0 * base).abs() < 1e-12);
        }

        // The numeric integral scales the same way.
        let path = rectangle_path(2.0, 2.0, [0.0, 0.0, 1.0]).unwrap();
        let phase = loop_phase(rotation_field(m(), [0.0, 0.0, 1.5]), &path).unwrap();
        assert!((phase - 2.0 * base).abs() < 1e-9);
    }

    #[test]
    fn circuits_orthogonal_to_the_rotation_pick_up_nothing() {
        let path = rectangle_path(1.0, 1.0, [1.0, 0.0, 0.0]).unwrap();
        let phase = loop_phase(rotation_field(m(), [0.0, 0.0, 2.0]), &path).unwrap();
        assert!(phase.abs() < 1e-12);
    }

    #[test]
    fn bad_circuits_are_rejected() {
        let field = |_x: [f64; 3]| [0.0; 3];
        assert!(matches!(
            loop_phase(field, &[[0.0; 3], [1.0, 0.0, 0.0]]),
            Err(PathError::TooShort(2))
        ));
        assert!(matches!(
            loop_phase(field, &[[0.0; 3], [1.0, 0.0, 0.0], [1.0, 1.0, 0.0]]),
            Err(PathError::OpenPath { .. })
        ));
        assert!(matches!(
            rectangle_path(0.0, 1.0, [0.0, 0.0, 1.0]),
            Err(PathError::DegenerateRectangle(_, _))
        ));
        assert!(matches!(
            rectangle_path(1.0, 1.0, [0.0; 3]),
            Err(PathError::ZeroNormal)
        ));
        assert!(matches!(
            rectangle_stokes_phase(m(), [0.0; 3], -1.0, 1.0, [0.0, 0.0, 1.0]),
            Err(PathError::DegenerateRectangle(_, _))
        ));
    }

    #[test]
    fn sweep_csv_has_header_and_rows() {
        let mut buf = Vec::new();
        write_phase_sweep_csv(&[(1.0, 1.0, 4.0), (2.0, 1.0, 8.0)], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "omega,area,phase\n1,1,4\n2,1,8\n");
    }
}
