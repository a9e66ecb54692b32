//! Exact reflected-beam power density and SNR.
//!
//! The reflected beam is an elliptical Gaussian beam launched from the RIS
//! footprint. Its density at an observation point, normalised by the noise
//! density `N_o`, times the receiver aperture gives the SNR. This is the
//! ground-truth model that the closed forms approximate.

use crate::error::Result;
use crate::geometry::{beam_coords, BeamDirection, LinkGeometry, ObservationPoint, PhysicalConfig};

/// Reflected power density at `p` for a beam steered along `b`, divided by
/// `N_o` (units of 1/m² once multiplied by the bandwidth-free ratio `P_t/N_o`).
///
/// The cross-term of the exponent is evaluated as
/// `(1 - cos⁴θ) u² z_B² / (q (z_B² + z_R² cos⁴θ))`, which is the printed
/// form multiplied through by `z_B²` and stays finite at `z_B = 0`.
pub fn power_density(
    cfg: &PhysicalConfig,
    geom: &LinkGeometry,
    b: &BeamDirection,
    p: &ObservationPoint,
) -> Result<f64> {
    let (x_b, y_b, z_b) = beam_coords(p, b)?;
    let z_r = geom.rayleigh_length();
    let cos4 = b.theta().cos().powi(4);
    let (sp, cp) = b.phi().sin_cos();

    let zz = z_b * z_b;
    let zr2 = z_r * z_r;
    let q = 1.0 + zz / zr2;
    let amplitude = cfg.peak_snr(geom.w_ris())
        / cfg.receiver_aperture()
        / (q * (1.0 + zz / (zr2 * cos4))).sqrt();

    let along = x_b * cp + y_b * sp;
    let cross = if zz == 0.0 {
        0.0
    } else {
        (1.0 - cos4) * along * along * zz / (q * (zz + zr2 * cos4))
    };
    let exponent = (cfg.wavenumber() / z_r) * ((x_b * x_b + y_b * y_b) / q - cross);
    Ok(amplitude * (-exponent).exp())
}

/// SNR at an arbitrary observation point: density times receiver aperture.
pub fn snr_at_point(
    cfg: &PhysicalConfig,
    geom: &LinkGeometry,
    b: &BeamDirection,
    p: &ObservationPoint,
) -> Result<f64> {
    Ok(power_density(cfg, geom, b, p)? * cfg.receiver_aperture())
}

/// SNR at the UE for a beam steered exactly at it; the maximum achievable
/// SNR for the link.
pub fn snr_at_ue(cfg: &PhysicalConfig, geom: &LinkGeometry) -> f64 {
    let ratio = geom.d_ue() / geom.rayleigh_length();
    let r2 = ratio * ratio;
    let cos4 = geom.theta_ue().cos().powi(4);
    cfg.peak_snr(geom.w_ris()) / ((1.0 + r2) * (1.0 + r2 / cos4)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{error_angles_to_beam_direction, spherical_to_cartesian};
    use crate::units::deg_to_rad;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn reference() -> (PhysicalConfig, LinkGeometry) {
        let phys = PhysicalConfig::reference();
        let geom = LinkGeometry::reference(&phys);
        (phys, geom)
    }

    // 2 * 100 * A_r / (pi * 0.25^2) / (1 + (2/z_R)^2), with
    // A_r = 1e4 * (c/140e9)^2 / (4 pi), z_R = (2 pi 140e9 / c) * 0.25^2 / 2.
    // Evaluated independently (double precision, numpy).
    const REFERENCE_SNR_AT_UE: f64 = 3.715_087_153_057_631_5;

    #[test]
    fn ris_center_density_is_prefactor() {
        let (phys, geom) = reference();
        let b = BeamDirection::new(0.4, 0.3).unwrap();
        let s = power_density(&phys, &geom, &b, &ObservationPoint::ORIGIN).unwrap();
        let expected = 2.0 * 100.0 / (PI * 0.25 * 0.25);
        assert_relative_eq!(s, expected, max_relative = 1e-14);
    }

    #[test]
    fn reference_snr_at_ue() {
        let (phys, geom) = reference();
        assert_relative_eq!(
            snr_at_ue(&phys, &geom),
            REFERENCE_SNR_AT_UE,
            max_relative = 1e-12
        );
        let aimed = snr_at_point(&phys, &geom, &geom.ue_direction(), &geom.ue_position()).unwrap();
        assert_relative_eq!(aimed, REFERENCE_SNR_AT_UE, max_relative = 1e-12);
    }

    #[test]
    fn one_degree_in_plane_error() {
        let (phys, geom) = reference();
        let b = error_angles_to_beam_direction(0.0, deg_to_rad(1.0), 0.0).unwrap();
        let s = snr_at_point(&phys, &geom, &b, &geom.ue_position()).unwrap();
        assert!((s - 3.576).abs() / 3.576 < 0.01, "{s}");
        assert!(s < REFERENCE_SNR_AT_UE);
    }

    #[test]
    fn density_even_in_transverse_offset() {
        let (phys, geom) = reference();
        let b = BeamDirection::new(deg_to_rad(40.0), deg_to_rad(25.0)).unwrap();
        let on_axis = spherical_to_cartesian(3.0, b.theta(), b.phi());
        let (dx, dy) = (0.013, -0.021);
        let plus = ObservationPoint::new(on_axis.x + dx, on_axis.y + dy, on_axis.z);
        let minus = ObservationPoint::new(on_axis.x - dx, on_axis.y - dy, on_axis.z);
        let sp = power_density(&phys, &geom, &b, &plus).unwrap();
        let sm = power_density(&phys, &geom, &b, &minus).unwrap();
        assert_relative_eq!(sp, sm, max_relative = 1e-12);
    }

    #[test]
    fn snr_at_ue_limits() {
        let phys = PhysicalConfig::reference();
        let near = LinkGeometry::with_footprint(&phys, 0.25, 1e-9, 0.0).unwrap();
        assert_relative_eq!(
            snr_at_ue(&phys, &near),
            phys.peak_snr(0.25),
            max_relative = 1e-12
        );

        let broadside = LinkGeometry::with_footprint(&phys, 0.25, 2.0, 0.0).unwrap();
        let steered = LinkGeometry::with_footprint(&phys, 0.25, 2.0, deg_to_rad(60.0)).unwrap();
        assert!(snr_at_ue(&phys, &steered) < snr_at_ue(&phys, &broadside));
    }

    #[test]
    fn near_ris_plane_is_finite() {
        let (phys, geom) = reference();
        let b = BeamDirection::new(deg_to_rad(30.0), 0.0).unwrap();
        let s = power_density(&phys, &geom, &b, &ObservationPoint::new(0.05, 0.0, 0.0)).unwrap();
        assert!(s.is_finite() && s > 0.0);
    }

    #[test]
    fn aimed_beam_is_maximum() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let phys = PhysicalConfig::reference();
        for theta_ue_deg in [0.0, 30.0, 60.0] {
            let geom =
                LinkGeometry::with_footprint(&phys, 0.25, 2.0, deg_to_rad(theta_ue_deg)).unwrap();
            let peak = snr_at_ue(&phys, &geom);
            let ue = geom.ue_position();
            for _ in 0..10_000 {
                let b = BeamDirection::new(
                    rng.random_range(0.0..FRAC_PI_2 - 1e-3),
                    rng.random_range(-PI + 1e-12..PI),
                )
                .unwrap();
                let s = snr_at_point(&phys, &geom, &b, &ue).unwrap();
                assert!(s <= peak + 1e-12, "{s} > {peak}");
            }
        }
    }

    #[test]
    fn expansion_error_is_third_order() {
        // |exact - alpha exp(-beta d^2)| / alpha <= C d^3 with C fitted on the
        // smallest step and checked on the others.
        let (phys, geom) = reference();
        let k = phys.wavenumber();
        let z_r = geom.rayleigh_length();
        let d = geom.d_ue();
        let alpha = snr_at_ue(&phys, &geom);
        let beta = k * z_r * d * d / (z_r * z_r + d * d);
        let ratio = |deg: f64| {
            let delta = deg_to_rad(deg);
            let b = error_angles_to_beam_direction(0.0, delta, 0.0).unwrap();
            let exact = snr_at_point(&phys, &geom, &b, &geom.ue_position()).unwrap();
            ((exact - alpha * (-beta * delta * delta).exp()) / alpha).abs() / delta.powi(3)
        };
        let c = ratio(0.1);
        assert!(c.is_finite());
        for deg in [0.2, 0.5] {
            assert!(
                ratio(deg) <= 2.0 * c.max(1e-6),
                "deg {deg}: {} vs C={c}",
                ratio(deg)
            );
        }
    }
}
