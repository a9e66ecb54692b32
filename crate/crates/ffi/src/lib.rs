//! C ABI over `ris_misalign`.
//!
//! All quantities are SI with angles in radians and gains as linear ratios.
//! Every function returns a [`RisStatus`]; on failure a description is
//! available from [`ris_last_error_message`] on the same thread. Objects
//! are opaque and owned by the caller once created: release them with the
//! matching `*_free` function. No function unwinds across the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use ris_misalign::analytic::{self, AsymptoticLimit, ClosedFormParams, Misalignment, Plane};
use ris_misalign::field;
use ris_misalign::geometry::{self, Footprint, GeometryInputs, LinkGeometry, PhysicalConfig};
use ris_misalign::montecarlo::{self, EmpiricalDistribution, Model, SamplerSpec};
use ris_misalign::Error;

pub const RIS_PLANE_IN: u32 = 0;
pub const RIS_PLANE_NORMAL: u32 = 1;
pub const RIS_MODEL_EXACT: u32 = 0;
pub const RIS_MODEL_APPROX: u32 = 1;
pub const RIS_LIMIT_FAR_RAYLEIGH: u32 = 0;
pub const RIS_LIMIT_NEAR_RAYLEIGH: u32 = 1;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RisStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    InconsistentFootprint = 3,
    UeOffSteeringPlane = 4,
    GrazingBeam = 5,
    BackwardBeam = 6,
    OutsideSupport = 7,
    SamplerTooSmall = 8,
    InvalidEnum = 9,
    BufferTooSmall = 10,
    Panic = 99,
}

/// Link description. Give `w_ris_m`, or both `d_ap_m` and `g_ap`, or all
/// three (checked for consistency); unused fields must be NaN.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct RisLinkParams {
    pub frequency_hz: f64,
    pub power_noise_ratio: f64,
    pub reflection_magnitude: f64,
    pub receiver_gain: f64,
    pub w_ris_m: f64,
    pub d_ap_m: f64,
    pub g_ap: f64,
    pub d_ue_m: f64,
    pub theta_ue_rad: f64,
}

/// Closed-form distribution parameters.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RisClosedForm {
    pub alpha: f64,
    pub slope: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RisSummary {
    pub n_samples: usize,
    pub seed: u64,
    pub redraws: u64,
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
}

/// A validated link: physical configuration plus geometry.
pub struct RisLink {
    phys: PhysicalConfig,
    geom: LinkGeometry,
}

/// Result of a Monte-Carlo run.
pub struct RisEmpirical {
    inner: EmpiricalDistribution,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure(RisStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::InvalidParameter { .. } => RisStatus::InvalidParameter,
            Error::InconsistentFootprint { .. } => RisStatus::InconsistentFootprint,
            Error::UeOffSteeringPlane(_) => RisStatus::UeOffSteeringPlane,
            Error::GrazingBeam(_) => RisStatus::GrazingBeam,
            Error::BackwardBeam(_) => RisStatus::BackwardBeam,
            Error::OutsideSupport { .. } => RisStatus::OutsideSupport,
            Error::SamplerTooSmall { .. } => RisStatus::SamplerTooSmall,
        };
        Failure(status, e.to_string())
    }
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> RisStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            RisStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            RisStatus::Panic
        }
    }
}

fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    // SAFETY: callers pass either null or a pointer obtained from this library
    // (or a valid caller-owned struct) that outlives the call.
    unsafe { p.as_ref() }.ok_or_else(|| Failure(RisStatus::NullPointer, format!("{what} is null")))
}

fn write_out<T>(p: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if p.is_null() {
        return Err(Failure(RisStatus::NullPointer, format!("{what} is null")));
    }
    // SAFETY: non-null, and the caller guarantees it points to writable storage for T.
    unsafe { p.write(value) };
    Ok(())
}

fn plane(v: u32) -> Result<Plane, Failure> {
    match v {
        RIS_PLANE_IN => Ok(Plane::InPlane),
        RIS_PLANE_NORMAL => Ok(Plane::NormalPlane),
        _ => Err(Failure(
            RisStatus::InvalidEnum,
            format!("unknown plane {v}"),
        )),
    }
}

fn model(v: u32) -> Result<Model, Failure> {
    match v {
        RIS_MODEL_EXACT => Ok(Model::Exact),
        RIS_MODEL_APPROX => Ok(Model::Approx),
        _ => Err(Failure(
            RisStatus::InvalidEnum,
            format!("unknown model {v}"),
        )),
    }
}

fn params(cf: RisClosedForm) -> Result<ClosedFormParams, Failure> {
    Ok(ClosedFormParams::new(cf.alpha, cf.slope)?)
}

fn closed(p: ClosedFormParams) -> RisClosedForm {
    RisClosedForm {
        alpha: p.alpha(),
        slope: p.slope(),
    }
}

fn footprint(p: &RisLinkParams) -> Result<Footprint, Failure> {
    let given = |v: f64| !v.is_nan();
    match (given(p.w_ris_m), given(p.d_ap_m), given(p.g_ap)) {
        (true, false, false) => Ok(Footprint::Radius(p.w_ris_m)),
        (false, true, true) => Ok(Footprint::Antenna {
            d_ap: p.d_ap_m,
            g_ap: p.g_ap,
        }),
        (true, true, true) => Ok(Footprint::Both {
            w_ris: p.w_ris_m,
            d_ap: p.d_ap_m,
            g_ap: p.g_ap,
        }),
        _ => Err(Failure(
            RisStatus::InvalidParameter,
            "footprint: give w_ris_m, or both d_ap_m and g_ap, or all three (others NaN)".into(),
        )),
    }
}

/// Validate `params` and create a link handle in `*out`.
///
/// # Safety
/// `params` must be null or point to a valid `RisLinkParams`; `out` must be
/// null or writable.
#[no_mangle]
pub unsafe extern "C" fn ris_link_new(
    params: *const RisLinkParams,
    out: *mut *mut RisLink,
) -> RisStatus {
    guard(|| {
        let p = deref(params, "params")?;
        if out.is_null() {
            return Err(Failure(RisStatus::NullPointer, "out is null".into()));
        }
        let phys = PhysicalConfig::new(
            p.frequency_hz,
            p.power_noise_ratio,
            p.reflection_magnitude,
            p.receiver_gain,
        )?;
        let inputs = GeometryInputs {
            footprint: footprint(p)?,
            d_ue: p.d_ue_m,
            theta_ue: p.theta_ue_rad,
            phi_ue: 0.0,
            ap_direction: None,
        };
        let geom = LinkGeometry::new(&phys, &inputs)?;
        write_out(out, Box::into_raw(Box::new(RisLink { phys, geom })), "out")
    })
}

/// Release a link handle. Null is a no-op.
///
/// # Safety
/// `link` must be null or a handle from [`ris_link_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ris_link_free(link: *mut RisLink) {
    if !link.is_null() {
        // SAFETY: ownership returns to Rust exactly once per the contract above.
        drop(unsafe { Box::from_raw(link) });
    }
}

/// SNR at the UE for a beam aimed exactly at it (the aligned SNR).
///
/// # Safety
/// `link` must be null or a live handle; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn ris_link_snr_at_ue(link: *const RisLink, out: *mut f64) -> RisStatus {
    guard(|| {
        let l = deref(link, "link")?;
        write_out(out, field::snr_at_ue(&l.phys, &l.geom), "out")
    })
}

/// Rayleigh length of the reflected beam, metres.
///
/// # Safety
/// As [`ris_link_snr_at_ue`].
#[no_mangle]
pub unsafe extern "C" fn ris_link_rayleigh_length(
    link: *const RisLink,
    out: *mut f64,
) -> RisStatus {
    guard(|| {
        let l = deref(link, "link")?;
        write_out(out, l.geom.rayleigh_length(), "out")
    })
}

/// SNR at the UE when the beam is steered along `(theta_b, phi_b)`.
///
/// # Safety
/// As [`ris_link_snr_at_ue`].
#[no_mangle]
pub unsafe extern "C" fn ris_link_snr_at_direction(
    link: *const RisLink,
    theta_b: f64,
    phi_b: f64,
    out: *mut f64,
) -> RisStatus {
    guard(|| {
        let l = deref(link, "link")?;
        let b = geometry::BeamDirection::new(theta_b, phi_b)?;
        write_out(
            out,
            field::snr_at_point(&l.phys, &l.geom, &b, &l.geom.ue_position())?,
            "out",
        )
    })
}

/// Beam direction produced by in-plane error `dx` and normal-plane error
/// `dy` around UE elevation `theta_ue`.
///
/// # Safety
/// `theta_b` and `phi_b` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn ris_error_angles(
    theta_ue: f64,
    dx: f64,
    dy: f64,
    theta_b: *mut f64,
    phi_b: *mut f64,
) -> RisStatus {
    guard(|| {
        if theta_b.is_null() || phi_b.is_null() {
            return Err(Failure(RisStatus::NullPointer, "output is null".into()));
        }
        let b = geometry::error_angles_to_beam_direction(theta_ue, dx, dy)?;
        write_out(theta_b, b.theta(), "theta_b")?;
        write_out(phi_b, b.phi(), "phi_b")
    })
}

/// Closed-form `(alpha, slope)` for errors on `plane` (`RIS_PLANE_*`).
///
/// # Safety
/// As [`ris_link_snr_at_ue`].
#[no_mangle]
pub unsafe extern "C" fn ris_link_closed_form(
    link: *const RisLink,
    plane_id: u32,
    out: *mut RisClosedForm,
) -> RisStatus {
    guard(|| {
        let l = deref(link, "link")?;
        write_out(
            out,
            closed(analytic::closed_form_params(
                &l.phys,
                &l.geom,
                plane(plane_id)?,
            )),
            "out",
        )
    })
}

/// Leading-order parameters in a Rayleigh-length limit (`RIS_LIMIT_*`).
///
/// # Safety
/// As [`ris_link_snr_at_ue`].
#[no_mangle]
pub unsafe extern "C" fn ris_link_asymptotic(
    link: *const RisLink,
    plane_id: u32,
    limit: u32,
    out: *mut RisClosedForm,
) -> RisStatus {
    guard(|| {
        let l = deref(link, "link")?;
        let limit = match limit {
            RIS_LIMIT_FAR_RAYLEIGH => AsymptoticLimit::FarRayleigh,
            RIS_LIMIT_NEAR_RAYLEIGH => AsymptoticLimit::NearRayleigh,
            v => {
                return Err(Failure(
                    RisStatus::InvalidEnum,
                    format!("unknown limit {v}"),
                ))
            }
        };
        write_out(
            out,
            closed(analytic::asymptotic_params(
                &l.phys,
                &l.geom,
                plane(plane_id)?,
                limit,
            )),
            "out",
        )
    })
}

/// Density at `x`, which must lie strictly inside `(0, alpha)`.
///
/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn ris_pdf(
    cf: RisClosedForm,
    sigma: f64,
    x: f64,
    out: *mut f64,
) -> RisStatus {
    guard(|| write_out(out, analytic::pdf(&params(cf)?, sigma, x)?, "out"))
}

/// Distribution function at `x`, clamped to 0 below the support and 1 above.
///
/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn ris_cdf(
    cf: RisClosedForm,
    sigma: f64,
    x: f64,
    out: *mut f64,
) -> RisStatus {
    guard(|| write_out(out, analytic::cdf(&params(cf)?, sigma, x)?, "out"))
}

/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn ris_mean(cf: RisClosedForm, sigma: f64, out: *mut f64) -> RisStatus {
    guard(|| write_out(out, analytic::mean(&params(cf)?, sigma)?, "out"))
}

/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn ris_variance(cf: RisClosedForm, sigma: f64, out: *mut f64) -> RisStatus {
    guard(|| write_out(out, analytic::variance(&params(cf)?, sigma)?, "out"))
}

/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn ris_skewness(cf: RisClosedForm, sigma: f64, out: *mut f64) -> RisStatus {
    guard(|| write_out(out, analytic::skewness(&params(cf)?, sigma)?, "out"))
}

/// Error standard deviation (rad) at which the skewness vanishes.
///
/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn ris_zero_skew_sigma(cf: RisClosedForm, out: *mut f64) -> RisStatus {
    guard(|| write_out(out, analytic::zero_skew_sigma(&params(cf)?), "out"))
}

/// Draw `n_samples` errors of standard deviation `sigma` on `plane_id` and
/// evaluate the SNR with `model_id` (`RIS_MODEL_*`). Deterministic in
/// `(seed, n_samples)`.
///
/// # Safety
/// `link` must be null or a live handle; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn ris_sample(
    link: *const RisLink,
    plane_id: u32,
    model_id: u32,
    sigma: f64,
    n_samples: usize,
    seed: u64,
    n_bins: usize,
    out: *mut *mut RisEmpirical,
) -> RisStatus {
    guard(|| {
        let l = deref(link, "link")?;
        if out.is_null() {
            return Err(Failure(RisStatus::NullPointer, "out is null".into()));
        }
        let spec = SamplerSpec::new(
            Misalignment::new(plane(plane_id)?, sigma)?,
            model(model_id)?,
            n_samples,
            seed,
            n_bins,
        )?;
        let inner = montecarlo::sample(&l.phys, &l.geom, &spec)?;
        write_out(out, Box::into_raw(Box::new(RisEmpirical { inner })), "out")
    })
}

/// # Safety
/// `emp` must be null or a handle from [`ris_sample`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ris_empirical_free(emp: *mut RisEmpirical) {
    if !emp.is_null() {
        // SAFETY: ownership returns to Rust exactly once per the contract above.
        drop(unsafe { Box::from_raw(emp) });
    }
}

/// # Safety
/// `emp` must be null or a live handle; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn ris_empirical_summary(
    emp: *const RisEmpirical,
    out: *mut RisSummary,
) -> RisStatus {
    guard(|| {
        let e = &deref(emp, "emp")?.inner;
        let summary = RisSummary {
            n_samples: e.n_samples(),
            seed: e.seed(),
            redraws: e.redraws(),
            mean: e.mean(),
            variance: e.variance(),
            skewness: e.skewness(),
        };
        write_out(out, summary, "out")
    })
}

/// Fraction of samples not exceeding `x`.
///
/// # Safety
/// As [`ris_empirical_summary`].
#[no_mangle]
pub unsafe extern "C" fn ris_empirical_cdf(
    emp: *const RisEmpirical,
    x: f64,
    out: *mut f64,
) -> RisStatus {
    guard(|| write_out(out, deref(emp, "emp")?.inner.cdf(x), "out"))
}

/// Kolmogorov–Smirnov distance to the closed-form distribution.
///
/// # Safety
/// As [`ris_empirical_summary`].
#[no_mangle]
pub unsafe extern "C" fn ris_empirical_ks(
    emp: *const RisEmpirical,
    cf: RisClosedForm,
    sigma: f64,
    out: *mut f64,
) -> RisStatus {
    guard(|| {
        let e = deref(emp, "emp")?;
        write_out(
            out,
            montecarlo::ks_distance(&e.inner, &params(cf)?, sigma)?,
            "out",
        )
    })
}

/// Copy histogram bin centres and densities into caller buffers of length
/// `len`. The bin count is always stored in `*n_bins`; if `len` is too small
/// nothing else is written and `BufferTooSmall` is returned.
///
/// # Safety
/// `centers` and `densities` must be null or point to `len` writable
/// doubles; `n_bins` null or writable.
#[no_mangle]
pub unsafe extern "C" fn ris_empirical_histogram(
    emp: *const RisEmpirical,
    centers: *mut f64,
    densities: *mut f64,
    len: usize,
    n_bins: *mut usize,
) -> RisStatus {
    guard(|| {
        let h = deref(emp, "emp")?.inner.histogram();
        let bins = h.densities.len();
        write_out(n_bins, bins, "n_bins")?;
        if len < bins {
            return Err(Failure(
                RisStatus::BufferTooSmall,
                format!("need {bins} slots, got {len}"),
            ));
        }
        if centers.is_null() || densities.is_null() {
            return Err(Failure(
                RisStatus::NullPointer,
                "output buffer is null".into(),
            ));
        }
        // SAFETY: both buffers hold at least `len >= bins` doubles per the contract.
        let (c, d) = unsafe {
            (
                std::slice::from_raw_parts_mut(centers, bins),
                std::slice::from_raw_parts_mut(densities, bins),
            )
        };
        for (slot, v) in c.iter_mut().zip(h.centers()) {
            *slot = v;
        }
        d.copy_from_slice(&h.densities);
        Ok(())
    })
}

/// Description of the last failure on this thread, or an empty string after
/// a success. Valid until the next call into this library on the thread.
#[no_mangle]
pub extern "C" fn ris_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Library version, a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ris_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
