use crate::error::{Error, Result};
use crate::model::Vec3;

/// Y₀⁰ = 1 / (2√π).
pub const SH_C0: f64 = 0.282_094_791_773_878_14;
/// √(3 / 4π).
pub const SH_C1: f64 = 0.488_602_511_902_919_9;
const SH_C2: [f64; 5] = [
    1.092_548_430_592_079_2,
    -1.092_548_430_592_079_2,
    0.315_391_565_252_520_05,
    -1.092_548_430_592_079_2,
    0.546_274_215_296_039_6,
];

pub fn sh_coeff_count(degree: u8) -> usize {
    (degree as usize + 1).pow(2)
}

/// Real spherical-harmonic basis up to `degree` (≤ 2) in the order
/// Y₀⁰, Y₁⁻¹, Y₁⁰, Y₁¹, Y₂⁻², …, Y₂².
///
/// Signs follow the Condon–Shortley convention used by Plenoxels and
/// Gaussian-splatting exports: Y₁⁻¹ = −C₁·y, Y₁⁰ = C₁·z, Y₁¹ = −C₁·x.
pub fn sh_basis(direction: &Vec3, degree: u8) -> Result<Vec<f64>> {
    if degree > 2 {
        return Err(Error::Domain(format!(
            "spherical-harmonic degree {degree} not supported (max 2)"
        )));
    }
    let norm = direction.norm();
    if !((norm - 1.0).abs() <= 1e-6) {
        return Err(Error::Domain(format!(
            "sh_basis needs a unit direction, got norm {norm}"
        )));
    }
    Ok(sh_basis_unchecked(direction, degree))
}

pub(crate) fn sh_basis_unchecked(d: &Vec3, degree: u8) -> Vec<f64> {
    let (x, y, z) = (d.x, d.y, d.z);
    let mut out = Vec::with_capacity(sh_coeff_count(degree));
    out.push(SH_C0);
    if degree >= 1 {
        out.extend([-SH_C1 * y, SH_C1 * z, -SH_C1 * x]);
    }
    if degree >= 2 {
        out.extend([
            SH_C2[0] * x * y,
            SH_C2[1] * y * z,
            SH_C2[2] * (2.0 * z * z - x * x - y * y),
            SH_C2[3] * x * z,
            SH_C2[4] * (x * x - y * y),
        ]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn constants_match_closed_forms() {
        assert!((SH_C0 - 1.0 / (2.0 * PI.sqrt())).abs() < 1e-15);
        assert!((SH_C1 - (3.0 / (4.0 * PI)).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn degree_zero_is_constant() {
        for d in [Vec3::x(), Vec3::new(0.6, 0.0, -0.8), -Vec3::z()] {
            let b = sh_basis(&d, 0).unwrap();
            assert_eq!(b.len(), 1);
            assert!((b[0] - 0.2820948).abs() < 1e-7);
        }
    }

    #[test]
    fn degree_one_at_pole() {
        let b = sh_basis(&Vec3::z(), 1).unwrap();
        assert!((b[0] - 0.2820948).abs() < 1e-7);
        assert_eq!(b[1], 0.0);
        assert!((b[2] - 0.4886025).abs() < 1e-7);
        assert_eq!(b[3], 0.0);
    }

    #[test]
    fn parity() {
        let d = Vec3::new(0.36, -0.48, 0.8);
        let a = sh_basis(&d, 2).unwrap();
        let b = sh_basis(&-d, 2).unwrap();
        assert_eq!(a[0], b[0]);
        for k in 1..4 {
            assert_eq!(a[k], -b[k]);
        }
        for k in 4..9 {
            assert!((a[k] - b[k]).abs() < 1e-15);
        }
    }

    #[test]
    fn non_unit_rejected() {
        assert!(matches!(
            sh_basis(&Vec3::new(1.0, 1.0, 0.0), 1),
            Err(Error::Domain(_))
        ));
        assert!(sh_basis(&Vec3::x(), 3).is_err());
    }

    /// Degree ≤ 2 basis functions are orthonormal on the sphere.
    #[test]
    fn orthonormal_by_quadrature() {
        let (nt, np) = (200, 400);
        let mut gram = [[0.0f64; 9]; 9];
        for i in 0..nt {
            let theta = (i as f64 + 0.5) * PI / nt as f64;
            for j in 0..np {
                let phi = (j as f64 + 0.5) * 2.0 * PI / np as f64;
                let d = Vec3::new(
                    theta.sin() * phi.cos(),
                    theta.sin() * phi.sin(),
                    theta.cos(),
                );
                let b = sh_basis_unchecked(&d, 2);
                let w = theta.sin() * (PI / nt as f64) * (2.0 * PI / np as f64);
                for a in 0..9 {
                    for c in 0..9 {
                        gram[a][c] += w * b[a] * b[c];
                    }
                }
            }
        }
        for (a, row) in gram.iter().enumerate() {
            for (c, g) in row.iter().enumerate() {
                let expected = if a == c { 1.0 } else { 0.0 };
                assert!((g - expected).abs() < 1e-3, "{a},{c}: {g}");
            }
        }
    }
}
