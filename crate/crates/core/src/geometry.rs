//! Link geometry, angle conventions and the frame transformations between the
//! RIS-centred global frame and the tilted frame of the reflected beam.
//!
//! The RIS sits at the origin with its normal along `z`. Elevation angles are
//! measured from `z`, azimuths from `x` in the `x`-`y` plane. The steering
//! plane is the `x`-`z` plane, which contains the UE.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::error::{ensure, Error, Result};
use crate::units::SPEED_OF_LIGHT;

/// Relative tolerance when both a footprint radius and AP distance/gain are
/// supplied and must agree.
pub const FOOTPRINT_CONSISTENCY_TOL: f64 = 1e-9;

/// Carrier and link-budget constants that are independent of geometry.
///
/// Transmit power and noise density only ever appear as the ratio
/// `P_t / N_o`, so that ratio is the only thing stored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConfig {
    frequency: f64,
    wavelength: f64,
    wavenumber: f64,
    power_noise_ratio: f64,
    reflection_magnitude: f64,
    receiver_gain: f64,
    receiver_aperture: f64,
}

impl PhysicalConfig {
    /// `frequency` in Hz; `power_noise_ratio` and `receiver_gain` linear;
    /// `reflection_magnitude` is `|R|` in `[0, 1]`.
    pub fn new(
        frequency: f64,
        power_noise_ratio: f64,
        reflection_magnitude: f64,
        receiver_gain: f64,
    ) -> Result<Self> {
        ensure(
            frequency.is_finite() && frequency > 0.0,
            "frequency",
            frequency,
            "must be > 0",
        )?;
        ensure(
            power_noise_ratio.is_finite() && power_noise_ratio > 0.0,
            "power_noise_ratio",
            power_noise_ratio,
            "must be > 0",
        )?;
        ensure(
            (0.0..=1.0).contains(&reflection_magnitude),
            "reflection_magnitude",
            reflection_magnitude,
            "must lie in [0, 1]",
        )?;
        ensure(
            receiver_gain.is_finite() && receiver_gain > 0.0,
            "receiver_gain",
            receiver_gain,
            "must be > 0",
        )?;
        let wavelength = SPEED_OF_LIGHT / frequency;
        Ok(Self {
            frequency,
            wavelength,
            wavenumber: TAU / wavelength,
            power_noise_ratio,
            reflection_magnitude,
            receiver_gain,
            receiver_aperture: receiver_gain * wavelength * wavelength / (4.0 * PI),
        })
    }

    /// 140 GHz, `P_t/N_o` = 20 dB, `|R|` = 1, `G_r` = 40 dB.
    pub fn reference() -> Self {
        Self::new(140e9, 100.0, 1.0, 1e4).expect("reference constants are valid")
    }

    pub fn frequency(&self) -> f64 {
        self.frequency
    }
    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }
    /// Free-space wavenumber `k_o = 2π/λ`, rad/m.
    pub fn wavenumber(&self) -> f64 {
        self.wavenumber
    }
    pub fn power_noise_ratio(&self) -> f64 {
        self.power_noise_ratio
    }
    pub fn reflection_magnitude(&self) -> f64 {
        self.reflection_magnitude
    }
    pub fn receiver_gain(&self) -> f64 {
        self.receiver_gain
    }
    /// Effective receiver aperture `A_r = G_r λ² / 4π`, m².
    pub fn receiver_aperture(&self) -> f64 {
        self.receiver_aperture
    }

    /// SNR of a unit-area beam normalised by its footprint:
    /// `2 (P_t/N_o) |R|² A_r / (π w²)`. This is the on-axis SNR at the RIS.
    pub fn peak_snr(&self, w_ris: f64) -> f64 {
        2.0 * self.power_noise_ratio * self.reflection_magnitude.powi(2) * self.receiver_aperture
            / (PI * w_ris * w_ris)
    }
}

/// How the AP beam footprint on the RIS is specified.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Footprint {
    /// Footprint radius `w_RIS`, m.
    Radius(f64),
    /// AP distance (m) and linear antenna gain; `w_RIS² = 8 d_AP² / G_AP`.
    Antenna { d_ap: f64, g_ap: f64 },
    /// Both forms; they must agree to [`FOOTPRINT_CONSISTENCY_TOL`].
    Both { w_ris: f64, d_ap: f64, g_ap: f64 },
}

/// Raw geometry inputs before validation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometryInputs {
    pub footprint: Footprint,
    pub d_ue: f64,
    pub theta_ue: f64,
    pub phi_ue: f64,
    /// AP elevation/azimuth. Kept for provenance only.
    pub ap_direction: Option<(f64, f64)>,
}

/// Validated link geometry with the derived Rayleigh length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry {
    d_ap: Option<f64>,
    g_ap: Option<f64>,
    ap_direction: Option<(f64, f64)>,
    w_ris: f64,
    rayleigh_length: f64,
    d_ue: f64,
    theta_ue: f64,
}

impl LinkGeometry {
    pub fn new(phys: &PhysicalConfig, inputs: &GeometryInputs) -> Result<Self> {
        let positive = |name, v: f64| ensure(v.is_finite() && v > 0.0, name, v, "must be > 0");
        let from_antenna = |d_ap: f64, g_ap: f64| -> Result<f64> {
            positive("d_ap", d_ap)?;
            positive("g_ap", g_ap)?;
            Ok((8.0 * d_ap * d_ap / g_ap).sqrt())
        };

        let (w_ris, d_ap, g_ap) = match inputs.footprint {
            Footprint::Radius(w) => (w, None, None),
            Footprint::Antenna { d_ap, g_ap } => {
                (from_antenna(d_ap, g_ap)?, Some(d_ap), Some(g_ap))
            }
            Footprint::Both { w_ris, d_ap, g_ap } => {
                let implied = from_antenna(d_ap, g_ap)?;
                let mismatch = (w_ris - implied).abs() / implied;
                if mismatch.is_nan() || mismatch > FOOTPRINT_CONSISTENCY_TOL {
                    return Err(Error::InconsistentFootprint {
                        w_ris,
                        implied,
                        mismatch,
                    });
                }
                (w_ris, Some(d_ap), Some(g_ap))
            }
        };
        positive("w_ris", w_ris)?;
        positive("d_ue", inputs.d_ue)?;
        ensure(
            inputs.theta_ue.is_finite() && inputs.theta_ue.abs() < FRAC_PI_2,
            "theta_ue",
            inputs.theta_ue,
            "must satisfy |theta_ue| < pi/2",
        )?;
        if inputs.phi_ue != 0.0 {
            return Err(Error::UeOffSteeringPlane(inputs.phi_ue));
        }

        let rayleigh_length = match (d_ap, g_ap) {
            (Some(d), Some(g)) if matches!(inputs.footprint, Footprint::Antenna { .. }) => {
                4.0 * phys.wavenumber() * d * d / g
            }
            _ => phys.wavenumber() * w_ris * w_ris / 2.0,
        };

        Ok(Self {
            d_ap,
            g_ap,
            ap_direction: inputs.ap_direction,
            w_ris,
            rayleigh_length,
            d_ue: inputs.d_ue,
            theta_ue: inputs.theta_ue,
        })
    }

    /// Geometry from a footprint radius with the UE on the steering plane.
    pub fn with_footprint(
        phys: &PhysicalConfig,
        w_ris: f64,
        d_ue: f64,
        theta_ue: f64,
    ) -> Result<Self> {
        Self::new(
            phys,
            &GeometryInputs {
                footprint: Footprint::Radius(w_ris),
                d_ue,
                theta_ue,
                phi_ue: 0.0,
                ap_direction: None,
            },
        )
    }

    /// 25 cm footprint, UE at 2 m broadside.
    pub fn reference(phys: &PhysicalConfig) -> Self {
        Self::with_footprint(phys, 0.25, 2.0, 0.0).expect("reference geometry is valid")
    }

    pub fn w_ris(&self) -> f64 {
        self.w_ris
    }
    /// `z_R = k_o w_RIS² / 2`.
    pub fn rayleigh_length(&self) -> f64 {
        self.rayleigh_length
    }
    pub fn d_ue(&self) -> f64 {
        self.d_ue
    }
    pub fn theta_ue(&self) -> f64 {
        self.theta_ue
    }
    /// Always 0: the UE lies on the steering plane.
    pub fn phi_ue(&self) -> f64 {
        0.0
    }
    pub fn d_ap(&self) -> Option<f64> {
        self.d_ap
    }
    pub fn g_ap(&self) -> Option<f64> {
        self.g_ap
    }
    pub fn ap_direction(&self) -> Option<(f64, f64)> {
        self.ap_direction
    }

    pub fn ue_position(&self) -> ObservationPoint {
        spherical_to_cartesian(self.d_ue, self.theta_ue, self.phi_ue())
    }

    /// Beam direction aimed exactly at the UE.
    pub fn ue_direction(&self) -> BeamDirection {
        BeamDirection {
            theta: self.theta_ue.abs(),
            phi: if self.theta_ue < 0.0 { PI } else { 0.0 },
        }
    }
}

/// Elevation/azimuth of the reflected beam, radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamDirection {
    theta: f64,
    phi: f64,
}

impl BeamDirection {
    /// `theta` in `[0, π/2)`, `phi` in `(-π, π]`.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if theta.is_finite() && theta >= FRAC_PI_2 {
            return Err(Error::GrazingBeam(theta));
        }
        ensure(
            theta.is_finite() && theta >= 0.0,
            "theta_b",
            theta,
            "must lie in [0, pi/2)",
        )?;
        ensure(
            phi.is_finite() && phi > -PI && phi <= PI,
            "phi_b",
            phi,
            "must lie in (-pi, pi]",
        )?;
        Ok(Self { theta, phi })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }
    pub fn phi(&self) -> f64 {
        self.phi
    }
}

/// Cartesian point in the RIS-centred frame, metres.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservationPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl ObservationPoint {
    pub const ORIGIN: Self = Self {
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn radius(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    /// `(r, θ, φ)` with `θ` from `+z` and `φ = atan2(y, x)`.
    pub fn to_spherical(&self) -> (f64, f64, f64) {
        let r = self.radius();
        let rho = self.x.hypot(self.y);
        (r, rho.atan2(self.z), self.y.atan2(self.x))
    }
}

pub fn spherical_to_cartesian(d: f64, theta: f64, phi: f64) -> ObservationPoint {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    ObservationPoint {
        x: d * st * cp,
        y: d * st * sp,
        z: d * ct,
    }
}

/// Coordinates of `p` in the non-orthogonal frame that follows the beam:
/// `x_B ∥ x`, `y_B ∥ y`, `z_B` is the distance travelled along the beam axis.
pub fn beam_coords(p: &ObservationPoint, b: &BeamDirection) -> Result<(f64, f64, f64)> {
    let (st, ct) = b.theta.sin_cos();
    if ct <= 0.0 {
        return Err(Error::GrazingBeam(b.theta));
    }
    let (sp, cp) = b.phi.sin_cos();
    let z_b = p.z / ct;
    Ok((p.x - z_b * st * cp, p.y - z_b * st * sp, z_b))
}

/// Beam direction produced by pointing errors `dx` (on the steering plane)
/// and `dy` (on the steering-plane normal) around a UE at elevation
/// `theta_ue`. Solves
///
/// ```text
/// sinθ_B cosφ_B = sin(θ_UE + δθ_x) cos δθ_y
/// sinθ_B sinφ_B = sin δθ_y
/// cosθ_B        = cos(θ_UE + δθ_x) cos δθ_y
/// ```
///
/// exactly. Errors if the beam ends up outside the forward half-space.
pub fn error_angles_to_beam_direction(theta_ue: f64, dx: f64, dy: f64) -> Result<BeamDirection> {
    let elevation = theta_ue + dx;
    let (se, ce) = elevation.sin_cos();
    let (sy, cy) = dy.sin_cos();
    let cos_theta = ce * cy;
    if cos_theta.is_nan() || cos_theta <= 0.0 {
        return Err(Error::BackwardBeam(cos_theta));
    }

    if dy == 0.0 {
        // pure in-plane error: keep the elevation bit-exact
        let (theta, phi) = if elevation < 0.0 {
            (-elevation, PI)
        } else {
            (elevation, 0.0)
        };
        return Ok(BeamDirection { theta, phi });
    }

    let a = se * cy;
    let theta = a.hypot(sy).atan2(cos_theta);
    let mut phi = sy.atan2(a);
    if phi <= -PI {
        phi = PI;
    }
    Ok(BeamDirection { theta, phi })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::deg_to_rad;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn spherical_examples() {
        let p = spherical_to_cartesian(2.0, 0.0, 0.0);
        assert_eq!((p.x, p.y, p.z), (0.0, 0.0, 2.0));

        let p = spherical_to_cartesian(2.0, FRAC_PI_2, FRAC_PI_2);
        assert!(p.x.abs() < 1e-15 && (p.y - 2.0).abs() < 1e-15 && p.z.abs() < 1e-15);

        let p = spherical_to_cartesian(2.0, deg_to_rad(30.0), 0.0);
        assert!((p.x - 1.0).abs() < 1e-12);
        assert_eq!(p.y, 0.0);
        assert!((p.z - 1.732_050_807_568_877_2).abs() < 1e-12);
    }

    #[test]
    fn beam_coords_examples() {
        let phys = PhysicalConfig::reference();
        let geom = LinkGeometry::with_footprint(&phys, 0.25, 2.0, deg_to_rad(35.0)).unwrap();
        let (x, y, z) = beam_coords(&geom.ue_position(), &geom.ue_direction()).unwrap();
        assert!(x.abs() < 1e-15 && y.abs() < 1e-15);
        assert_relative_eq!(z, 2.0, max_relative = 1e-15);

        let b = BeamDirection::new(0.3, -1.2).unwrap();
        assert_eq!(
            beam_coords(&ObservationPoint::ORIGIN, &b).unwrap(),
            (0.0, 0.0, 0.0)
        );

        let b = BeamDirection::new(deg_to_rad(45.0), 0.0).unwrap();
        let (x, y, z) = beam_coords(&ObservationPoint::new(0.0, 0.0, 1.0), &b).unwrap();
        assert_relative_eq!(z, 2f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(x, -1.0, max_relative = 1e-15);
        assert_eq!(y, 0.0);
    }

    #[test]
    fn grazing_beam_rejected() {
        assert!(matches!(
            BeamDirection::new(FRAC_PI_2, 0.0),
            Err(Error::GrazingBeam(_))
        ));
        assert!(BeamDirection::new(0.1, -PI).is_err());
        assert!(BeamDirection::new(0.1, PI).is_ok());
    }

    #[test]
    fn error_angle_examples() {
        let b = error_angles_to_beam_direction(deg_to_rad(30.0), 0.0, 0.0).unwrap();
        assert_eq!((b.theta(), b.phi()), (deg_to_rad(30.0), 0.0));

        let b = error_angles_to_beam_direction(deg_to_rad(45.0), deg_to_rad(2.0), 0.0).unwrap();
        assert_relative_eq!(b.theta(), deg_to_rad(47.0), max_relative = 1e-15);
        assert_eq!(b.phi(), 0.0);

        let b = error_angles_to_beam_direction(0.0, 0.0, deg_to_rad(5.0)).unwrap();
        assert_relative_eq!(b.theta(), deg_to_rad(5.0), max_relative = 1e-14);
        assert_relative_eq!(b.phi(), FRAC_PI_2, max_relative = 1e-15);

        let b = error_angles_to_beam_direction(0.0, deg_to_rad(-1.0), 0.0).unwrap();
        assert_eq!((b.theta(), b.phi()), (deg_to_rad(1.0), PI));
    }

    #[test]
    fn backward_beam_rejected() {
        let r = error_angles_to_beam_direction(deg_to_rad(80.0), deg_to_rad(15.0), 0.0);
        assert!(matches!(r, Err(Error::BackwardBeam(_))));
        assert!(error_angles_to_beam_direction(0.0, 0.0, FRAC_PI_2 + 0.01).is_err());
    }

    fn residuals(theta_ue: f64, dx: f64, dy: f64) -> [f64; 3] {
        let b = error_angles_to_beam_direction(theta_ue, dx, dy).unwrap();
        let (st, ct) = b.theta().sin_cos();
        let (sp, cp) = b.phi().sin_cos();
        [
            (st * cp - (theta_ue + dx).sin() * dy.cos()).abs(),
            (st * sp - dy.sin()).abs(),
            (ct - (theta_ue + dx).cos() * dy.cos()).abs(),
        ]
    }

    #[test]
    fn constraint_residuals_on_grid() {
        let n = 100;
        let lin =
            |lo: f64, hi: f64, i: usize| deg_to_rad(lo + (hi - lo) * i as f64 / (n - 1) as f64);
        let mut worst = 0f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let r = residuals(lin(0.0, 60.0, i), lin(-10.0, 10.0, j), lin(-10.0, 10.0, k));
                    worst = worst.max(r[0]).max(r[1]).max(r[2]);
                }
            }
        }
        assert!(worst <= 1e-12, "worst residual {worst:e}");
    }

    #[test]
    fn footprint_forms_agree() {
        let phys = PhysicalConfig::reference();
        let (d_ap, g_ap) = (3.0, 1000.0f64);
        let w = (8.0 * d_ap * d_ap / g_ap).sqrt();
        let a = LinkGeometry::new(
            &phys,
            &GeometryInputs {
                footprint: Footprint::Antenna { d_ap, g_ap },
                d_ue: 2.0,
                theta_ue: 0.0,
                phi_ue: 0.0,
                ap_direction: Some((0.5, 1.0)),
            },
        )
        .unwrap();
        assert_relative_eq!(a.w_ris(), w, max_relative = 1e-15);
        let k = phys.wavenumber();
        assert_relative_eq!(a.rayleigh_length(), k * w * w / 2.0, max_relative = 1e-12);
        assert_relative_eq!(
            a.rayleigh_length(),
            4.0 * k * d_ap * d_ap / g_ap,
            max_relative = 1e-12
        );

        let both = |w_ris| {
            LinkGeometry::new(
                &phys,
                &GeometryInputs {
                    footprint: Footprint::Both { w_ris, d_ap, g_ap },
                    d_ue: 2.0,
                    theta_ue: 0.0,
                    phi_ue: 0.0,
                    ap_direction: None,
                },
            )
        };
        assert!(both(w * (1.0 + 1e-10)).is_ok());
        assert!(matches!(
            both(w * 1.01),
            Err(Error::InconsistentFootprint { .. })
        ));
    }

    #[test]
    fn physical_invariants() {
        let phys = PhysicalConfig::new(300e9, 50.0, 0.7, 2000.0).unwrap();
        assert_relative_eq!(
            phys.wavenumber() * phys.wavelength(),
            TAU,
            max_relative = 1e-12
        );
        let lam = phys.wavelength();
        assert_relative_eq!(
            phys.receiver_aperture(),
            2000.0 * lam * lam / (4.0 * PI),
            max_relative = 1e-12
        );
        assert!(PhysicalConfig::new(140e9, 100.0, 1.2, 1e4).is_err());
        assert!(PhysicalConfig::new(0.0, 100.0, 1.0, 1e4).is_err());
    }

    #[test]
    fn geometry_validation() {
        let phys = PhysicalConfig::reference();
        assert!(LinkGeometry::with_footprint(&phys, 0.0, 2.0, 0.0).is_err());
        assert!(LinkGeometry::with_footprint(&phys, 0.25, -1.0, 0.0).is_err());
        assert!(LinkGeometry::with_footprint(&phys, 0.25, 2.0, FRAC_PI_2).is_err());
        let off_plane = GeometryInputs {
            footprint: Footprint::Radius(0.25),
            d_ue: 2.0,
            theta_ue: 0.2,
            phi_ue: 0.1,
            ap_direction: None,
        };
        assert!(matches!(
            LinkGeometry::new(&phys, &off_plane),
            Err(Error::UeOffSteeringPlane(_))
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn spherical_round_trip(d in 0.01f64..100.0, theta in 1e-6f64..(FRAC_PI_2 - 1e-6), phi in (-PI + 1e-9)..PI) {
            let (r, t, p) = spherical_to_cartesian(d, theta, phi).to_spherical();
            prop_assert!((r - d).abs() <= 1e-10 * d);
            prop_assert!((t - theta).abs() <= 1e-10);
            prop_assert!((p - phi).abs() <= 1e-10);
        }

        #[test]
        fn aimed_beam_hits_point(d in 0.01f64..100.0, theta in 0.0f64..1.5, phi in (-PI + 1e-9)..PI) {
            let p = spherical_to_cartesian(d, theta, phi);
            let b = BeamDirection::new(theta, phi).unwrap();
            let (x, y, z) = beam_coords(&p, &b).unwrap();
            prop_assert!(x.abs() <= 1e-12 * d && y.abs() <= 1e-12 * d);
            prop_assert!((z - p.radius()).abs() <= 1e-12 * d);
        }

        #[test]
        fn in_plane_error_is_additive(theta in 0.0f64..1.2, dx in -0.3f64..0.3) {
            prop_assume!(theta + dx > 0.0 && theta + dx < FRAC_PI_2);
            let b = error_angles_to_beam_direction(theta, dx, 0.0).unwrap();
            prop_assert_eq!(b.theta(), theta + dx);
            prop_assert_eq!(b.phi(), 0.0);
        }
    }
}
