use thiserror::Error;

/// Errors raised by the link model, the closed forms and the sampler.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error(
        "footprint radius {w_ris} m disagrees with AP distance/gain (implies {implied} m, relative mismatch {mismatch:.3e})"
    )]
    InconsistentFootprint {
        w_ris: f64,
        implied: f64,
        mismatch: f64,
    },

    #[error("UE azimuth must be 0 (UE on the steering plane), got {0} rad")]
    UeOffSteeringPlane(f64),

    #[error("beam elevation {0} rad is grazing; beam coordinates are singular")]
    GrazingBeam(f64),

    #[error("beam direction leaves the forward half-space (cos(theta_B) = {0})")]
    BackwardBeam(f64),

    #[error("x = {x} lies outside the open support (0, {alpha})")]
    OutsideSupport { x: f64, alpha: f64 },

    #[error("sampler needs at least {min} {what}, got {got}")]
    SamplerTooSmall {
        what: &'static str,
        min: usize,
        got: usize,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure(
    cond: bool,
    name: &'static str,
    value: f64,
    reason: &'static str,
) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason,
        })
    }
}
