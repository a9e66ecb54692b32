//! Closed-form statistics of the misaligned SNR.
//!
//! For small pointing errors the SNR at the UE behaves like
//! `α exp(-slope · δθ²)` with `δθ ~ N(0, σ²)`. The slope is `β` for errors on
//! the steering plane and `ζ` for errors on its normal; everything else
//! (PDF, CDF, moments, skewness) is shared between the two regimes and
//! depends on the slope only through `u = slope · σ²`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::geometry::{LinkGeometry, PhysicalConfig};

/// Plane on which the pointing error occurs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
pub enum Plane {
    /// Error on the steering plane (perturbs the elevation, slope `β`).
    #[serde(rename = "inplane")]
    #[value(name = "inplane")]
    InPlane,
    /// Error on the steering-plane normal (sideways, slope `ζ`).
    #[serde(rename = "normal")]
    #[value(name = "normal")]
    NormalPlane,
}

impl std::fmt::Display for Plane {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Plane::InPlane => "inplane",
            Plane::NormalPlane => "normal",
        })
    }
}

/// A pointing-error regime: the plane and the error standard deviation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Misalignment {
    plane: Plane,
    sigma: f64,
}

impl Misalignment {
    /// `sigma` in radians, strictly positive.
    pub fn new(plane: Plane, sigma: f64) -> Result<Self> {
        check_sigma(sigma)?;
        Ok(Self { plane, sigma })
    }
    pub fn plane(&self) -> Plane {
        self.plane
    }
    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

/// `(α, slope)`: together with `σ` these fully determine the approximate
/// SNR distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormParams {
    alpha: f64,
    slope: f64,
}

impl ClosedFormParams {
    pub fn new(alpha: f64, slope: f64) -> Result<Self> {
        ensure(
            alpha.is_finite() && alpha > 0.0,
            "alpha",
            alpha,
            "must be > 0",
        )?;
        ensure(
            slope.is_finite() && slope > 0.0,
            "slope",
            slope,
            "must be > 0",
        )?;
        Ok(Self { alpha, slope })
    }
    /// Peak (aligned) SNR and upper end of the support.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    /// `β` or `ζ`, rad⁻².
    pub fn slope(&self) -> f64 {
        self.slope
    }
    /// Dimensionless spread `u = slope · σ²`.
    pub fn spread(&self, sigma: f64) -> f64 {
        self.slope * sigma * sigma
    }
}

fn check_sigma(sigma: f64) -> Result<()> {
    ensure(
        sigma.is_finite() && sigma > 0.0,
        "sigma",
        sigma,
        "must be > 0",
    )
}

pub fn closed_form_params(
    cfg: &PhysicalConfig,
    geom: &LinkGeometry,
    plane: Plane,
) -> ClosedFormParams {
    let k = cfg.wavenumber();
    let z_r = geom.rayleigh_length();
    let d = geom.d_ue();
    let c2 = geom.theta_ue().cos().powi(2);
    let c4 = c2 * c2;
    let (zr2, d2) = (z_r * z_r, d * d);

    let alpha = cfg.peak_snr(geom.w_ris()) * zr2 / ((d2 + zr2) * (zr2 + d2 / c4)).sqrt();
    let slope = match plane {
        Plane::InPlane => (d2 * k * z_r / c2) / (zr2 + d2 / c4),
        Plane::NormalPlane => k * z_r * d2 / (zr2 + d2),
    };
    ClosedFormParams { alpha, slope }
}

/// Approximate SNR for a pointing error `delta` (rad).
pub fn snr_tilde(params: &ClosedFormParams, delta: f64) -> f64 {
    params.alpha * (-params.slope * delta * delta).exp()
}

/// Density of the approximate SNR on the open support `(0, α)`.
pub fn pdf(params: &ClosedFormParams, sigma: f64, x: f64) -> Result<f64> {
    check_sigma(sigma)?;
    let alpha = params.alpha;
    if !(x > 0.0 && x < alpha) {
        return Err(Error::OutsideSupport { x, alpha });
    }
    let t = (alpha / x).ln();
    if t <= 0.0 {
        // x rounds to α: the ln(α/x)^(-1/2) singularity
        return Err(Error::OutsideSupport { x, alpha });
    }
    Ok(density_with_log_ratio(params, sigma, x, t))
}

/// The density at `x` given `log_ratio = ln(α/x) > 0` directly, for callers
/// that know it more accurately than `x` does.
pub(crate) fn density_with_log_ratio(
    params: &ClosedFormParams,
    sigma: f64,
    x: f64,
    log_ratio: f64,
) -> f64 {
    let s = params.slope;
    let num = (-log_ratio / (2.0 * s * sigma * sigma)).exp();
    num / ((2.0 * PI).sqrt() * sigma * x * (s * log_ratio).sqrt())
}

/// CDF of the approximate SNR; 0 for `x ≤ 0`, 1 for `x ≥ α`.
pub fn cdf(params: &ClosedFormParams, sigma: f64, x: f64) -> Result<f64> {
    check_sigma(sigma)?;
    if x <= 0.0 {
        return Ok(0.0);
    }
    if x >= params.alpha {
        return Ok(1.0);
    }
    let t = (params.alpha / x).ln();
    Ok(libm::erfc(t.sqrt() / ((2.0 * params.slope).sqrt() * sigma)))
}

pub fn mean(params: &ClosedFormParams, sigma: f64) -> Result<f64> {
    raw_moment(params, sigma, 1)
}

/// `E[SNR^m] = α^m / √(1 + 2 m u)`.
pub fn raw_moment(params: &ClosedFormParams, sigma: f64, m: u32) -> Result<f64> {
    check_sigma(sigma)?;
    let u = params.spread(sigma);
    Ok(params.alpha.powi(m as i32) / (1.0 + 2.0 * m as f64 * u).sqrt())
}

pub fn variance(params: &ClosedFormParams, sigma: f64) -> Result<f64> {
    check_sigma(sigma)?;
    let u = params.spread(sigma);
    let (d2, _) = log_moment_gaps(u);
    Ok(params.alpha * params.alpha / (1.0 + 2.0 * u) * d2.exp_m1())
}

/// Third standardised moment. Depends on `u = slope · σ²` only.
pub fn skewness(params: &ClosedFormParams, sigma: f64) -> Result<f64> {
    check_sigma(sigma)?;
    Ok(skewness_of_spread(params.spread(sigma)))
}

/// Skewness as a function of `u`.
///
/// Algebraically identical to
///
/// ```text
/// [1/√(1+6u) + (2√(1+4u) - 3 - 6u) / (√(1+4u)(1+2u)^{3/2})]
///     / [1/√(1+4u) - 1/(1+2u)]^{3/2}
/// ```
///
/// but written in terms of `ln(1+x) - x` so that the O(u²) and O(u³)
/// leading terms do not cancel in floating point for small `u`.
pub fn skewness_of_spread(u: f64) -> f64 {
    let (d2, d3) = log_moment_gaps(u);
    let var = d2.exp_m1();
    (d3.exp_m1() - 3.0 * var) / (var * var.sqrt())
}

/// `(L₂ - 2L₁, L₃ - 3L₁)` with `L_m = -½ ln(1 + 2mu)` the log of the
/// normalised m-th raw moment.
fn log_moment_gaps(u: f64) -> (f64, f64) {
    let g2 = log1p_minus_x(2.0 * u);
    (
        g2 - 0.5 * log1p_minus_x(4.0 * u),
        1.5 * g2 - 0.5 * log1p_minus_x(6.0 * u),
    )
}

/// `ln(1 + x) - x`, accurate for small `x`.
fn log1p_minus_x(x: f64) -> f64 {
    if x.abs() < 0.05 {
        // alternating series -x²/2 + x³/3 - ...; 16 terms reach 1e-21 relative
        let mut term = x;
        let mut sum = 0.0;
        for n in 2..18 {
            term *= -x;
            sum += term / n as f64;
        }
        sum
    } else {
        x.ln_1p() - x
    }
}

/// Lower and upper end of the bracket searched for the zero-skewness spread.
pub const ZERO_SKEW_BRACKET: (f64, f64) = (1e-6, 10.0);

/// The unique `u*` with `skewness_of_spread(u*) = 0`.
pub fn zero_skew_spread() -> f64 {
    static ROOT: OnceLock<f64> = OnceLock::new();
    *ROOT.get_or_init(|| {
        let (mut lo, mut hi) = ZERO_SKEW_BRACKET;
        debug_assert!(skewness_of_spread(lo) < 0.0 && skewness_of_spread(hi) > 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if skewness_of_spread(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    })
}

/// Error standard deviation (rad) at which the SNR distribution has zero
/// skewness for these parameters.
pub fn zero_skew_sigma(params: &ClosedFormParams) -> f64 {
    (zero_skew_spread() / params.slope).sqrt()
}

/// Limiting regimes of the Rayleigh length relative to the UE distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AsymptoticLimit {
    /// `z_R ≫ d_UE` (wide footprint, low-gain AP).
    FarRayleigh,
    /// `d_UE ≫ z_R` (narrow footprint, high-gain AP).
    NearRayleigh,
}

/// Leading-order `(α, slope)` in one of the limits. The caller decides
/// whether the limit applies.
pub fn asymptotic_params(
    cfg: &PhysicalConfig,
    geom: &LinkGeometry,
    plane: Plane,
    limit: AsymptoticLimit,
) -> ClosedFormParams {
    let k = cfg.wavenumber();
    let z_r = geom.rayleigh_length();
    let d = geom.d_ue();
    let c2 = geom.theta_ue().cos().powi(2);
    let peak = cfg.peak_snr(geom.w_ris());
    let (alpha, slope) = match limit {
        AsymptoticLimit::FarRayleigh => {
            let zeta = k * d * d / z_r;
            (
                peak,
                if plane == Plane::InPlane {
                    zeta / c2
                } else {
                    zeta
                },
            )
        }
        AsymptoticLimit::NearRayleigh => {
            let zeta = k * z_r;
            (
                peak * z_r * z_r / (d * d) * c2,
                if plane == Plane::InPlane {
                    zeta * c2
                } else {
                    zeta
                },
            )
        }
    };
    ClosedFormParams { alpha, slope }
}
