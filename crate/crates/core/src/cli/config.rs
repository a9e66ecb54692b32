//! Run configuration as read from JSON and CLI flags, and its resolution into
//! validated library types.
//!
//! Boundary units are degrees, decibels, hertz and metres. [`RunConfig::resolve`]
//! is the only place where degrees are turned into radians and decibels into
//! linear ratios.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::analytic::Plane;
use crate::geometry::{Footprint, GeometryInputs, LinkGeometry, PhysicalConfig};
use crate::montecarlo::{Model, SamplerSpec};
use crate::units::{db_to_linear, deg_to_rad};
use crate::{Misalignment, Result};

/// Parameter swept by the `sweep` subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    /// Footprint radius, metres.
    Wris,
    /// UE elevation, degrees.
    Theta,
    /// UE distance, metres.
    Due,
}

impl Axis {
    /// Default range, in boundary units.
    pub fn default_range(self) -> Range {
        match self {
            Axis::Wris => Range {
                min: 0.01,
                max: 0.5,
                steps: 50,
            },
            Axis::Theta => Range {
                min: 0.0,
                max: 60.0,
                steps: 61,
            },
            Axis::Due => Range {
                min: 2.0,
                max: 20.0,
                steps: 37,
            },
        }
    }

    pub fn unit(self) -> &'static str {
        match self {
            Axis::Wris | Axis::Due => "m",
            Axis::Theta => "deg",
        }
    }
}

/// Inclusive linear grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Range {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Range {
    pub fn values(&self) -> Vec<f64> {
        if self.steps <= 1 {
            return vec![self.min];
        }
        let step = (self.max - self.min) / (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| self.min + step * i as f64)
            .collect()
    }

    fn check(&self, what: &str) -> std::result::Result<(), String> {
        if !(self.min.is_finite() && self.max.is_finite()) || self.max < self.min || self.steps == 0
        {
            return Err(format!(
                "{what}: need finite min <= max and steps >= 1, got {self:?}"
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub axis: Axis,
    #[serde(flatten)]
    pub range: Range,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplerConfig {
    pub n: usize,
    pub seed: u64,
    pub bins: usize,
    pub model: Model,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            n: 1_000_000,
            seed: 20_220_531,
            bins: 100,
            model: Model::Exact,
        }
    }
}

/// Footprint radius used when no footprint key is given, metres.
pub const DEFAULT_W_RIS: f64 = 0.25;

/// Everything a run needs, in boundary units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub frequency_hz: f64,
    pub power_noise_ratio_db: f64,
    pub reflection_magnitude: f64,
    pub receiver_gain_db: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w_ris_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_ap_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g_ap_db: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_ap_deg: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi_ap_deg: Option<f64>,
    pub d_ue_m: f64,
    pub theta_ue_deg: f64,
    pub phi_ue_deg: f64,
    pub regime: Plane,
    /// Explicit error standard deviations; takes precedence over `sigma_range`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_deg: Option<Vec<f64>>,
    pub sigma_range: Range,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    pub dist_points: usize,
    pub sampler: SamplerConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            frequency_hz: 140e9,
            power_noise_ratio_db: 20.0,
            reflection_magnitude: 1.0,
            receiver_gain_db: 40.0,
            w_ris_m: None,
            d_ap_m: None,
            g_ap_db: None,
            theta_ap_deg: None,
            phi_ap_deg: None,
            d_ue_m: 2.0,
            theta_ue_deg: 0.0,
            phi_ue_deg: 0.0,
            regime: Plane::InPlane,
            sigma_deg: None,
            sigma_range: Range {
                min: 0.1,
                max: 10.0,
                steps: 50,
            },
            sweep: None,
            dist_points: 500,
            sampler: SamplerConfig::default(),
            out: None,
        }
    }
}

/// A resolved configuration: validated, in radians and linear units.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub phys: PhysicalConfig,
    pub geom: LinkGeometry,
    pub plane: Plane,
    /// `(boundary degrees, radians)` pairs.
    pub sigmas: Vec<(f64, f64)>,
    pub sampler: SamplerConfig,
    pub dist_points: usize,
}

/// One point of a sweep: the axis value in boundary units and its geometry.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub axis_value: f64,
    pub geom: LinkGeometry,
}

impl RunConfig {
    pub fn from_json(text: &str) -> std::result::Result<Self, String> {
        serde_json::from_str(text).map_err(|e| format!("config: {e}"))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config is always serialisable")
    }

    fn physical(&self) -> Result<PhysicalConfig> {
        PhysicalConfig::new(
            self.frequency_hz,
            db_to_linear(self.power_noise_ratio_db),
            self.reflection_magnitude,
            db_to_linear(self.receiver_gain_db),
        )
    }

    fn geometry_inputs(&self) -> std::result::Result<GeometryInputs, String> {
        let footprint = match (self.w_ris_m, self.d_ap_m, self.g_ap_db) {
            (None, None, None) => Footprint::Radius(DEFAULT_W_RIS),
            (Some(w), None, None) => Footprint::Radius(w),
            (None, Some(d), Some(g)) => Footprint::Antenna {
                d_ap: d,
                g_ap: db_to_linear(g),
            },
            (Some(w), Some(d), Some(g)) => Footprint::Both {
                w_ris: w,
                d_ap: d,
                g_ap: db_to_linear(g),
            },
            _ => {
                return Err(
                    "footprint: give w_ris_m, or both d_ap_m and g_ap_db, or all three".into(),
                );
            }
        };
        let ap_direction = match (self.theta_ap_deg, self.phi_ap_deg) {
            (Some(t), Some(p)) => Some((deg_to_rad(t), deg_to_rad(p))),
            (None, None) => None,
            _ => return Err("theta_ap_deg and phi_ap_deg must be given together".into()),
        };
        Ok(GeometryInputs {
            footprint,
            d_ue: self.d_ue_m,
            theta_ue: deg_to_rad(self.theta_ue_deg),
            phi_ue: deg_to_rad(self.phi_ue_deg),
            ap_direction,
        })
    }

    pub fn sigma_values_deg(&self) -> Vec<f64> {
        match &self.sigma_deg {
            Some(list) => list.clone(),
            None => self.sigma_range.values(),
        }
    }

    /// Validate everything and convert to internal units.
    pub fn resolve(&self) -> std::result::Result<Resolved, String> {
        let phys = self.physical().map_err(|e| e.to_string())?;
        let geom = LinkGeometry::new(&phys, &self.geometry_inputs()?).map_err(|e| e.to_string())?;
        self.sigma_range.check("sigma_range")?;
        let sigmas = self
            .sigma_values_deg()
            .into_iter()
            .map(|deg| {
                let rad = deg_to_rad(deg);
                Misalignment::new(self.regime, rad).map_err(|e| format!("sigma_deg: {e}"))?;
                Ok((deg, rad))
            })
            .collect::<std::result::Result<Vec<_>, String>>()?;
        if sigmas.is_empty() {
            return Err("sigma_deg: at least one value is required".into());
        }
        if self.dist_points < 2 {
            return Err(format!(
                "dist_points: need at least 2, got {}",
                self.dist_points
            ));
        }
        if let Some(sweep) = &self.sweep {
            sweep.range.check("sweep")?;
        }
        let m = Misalignment::new(self.regime, sigmas[0].1).map_err(|e| e.to_string())?;
        SamplerSpec::new(
            m,
            self.sampler.model,
            self.sampler.n,
            self.sampler.seed,
            self.sampler.bins,
        )
        .map_err(|e| format!("sampler: {e}"))?;
        Ok(Resolved {
            phys,
            geom,
            plane: self.regime,
            sigmas,
            sampler: self.sampler,
            dist_points: self.dist_points,
        })
    }

    /// Geometries along the sweep axis; every point is validated.
    pub fn sweep_points(
        &self,
        phys: &PhysicalConfig,
    ) -> std::result::Result<(Axis, Vec<SweepPoint>), String> {
        let spec = self
            .sweep
            .ok_or("sweep: no axis given (use --axis or a `sweep` block)")?;
        let base = self.geometry_inputs()?;
        let mut points = Vec::with_capacity(spec.range.steps);
        for value in spec.range.values() {
            let mut inputs = base;
            match spec.axis {
                Axis::Wris => inputs.footprint = Footprint::Radius(value),
                Axis::Theta => inputs.theta_ue = deg_to_rad(value),
                Axis::Due => inputs.d_ue = value,
            }
            let geom = LinkGeometry::new(phys, &inputs)
                .map_err(|e| format!("sweep {:?}={value}: {e}", spec.axis))?;
            points.push(SweepPoint {
                axis_value: value,
                geom,
            });
        }
        Ok((spec.axis, points))
    }
}
