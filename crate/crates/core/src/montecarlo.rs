//! Monte-Carlo oracle: Gaussian pointing errors pushed through either the
//! exact field model or the closed-form approximation.
//!
//! Samples are generated in fixed-size chunks. Chunk `i` draws from ChaCha8
//! stream `i` of the user seed, so the output depends only on
//! `(seed, n_samples)` and never on how many worker threads ran the chunks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{
    cdf, closed_form_params, raw_moment, snr_tilde, ClosedFormParams, Misalignment, Plane,
};
use crate::error::{Error, Result};
use crate::field::snr_at_point;
use crate::geometry::{error_angles_to_beam_direction, LinkGeometry, PhysicalConfig};

/// Samples per independent RNG stream.
pub const CHUNK_SIZE: usize = 1 << 16;
pub const MIN_SAMPLES: usize = 1_000;
pub const MIN_BINS: usize = 10;
/// Histogram upper edge as a multiple of `α`.
pub const HISTOGRAM_HEADROOM: f64 = 1.001;

/// Which SNR expression the sampled errors are pushed through.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    /// Full field model at the UE position.
    Exact,
    /// `α exp(-slope δθ²)`.
    Approx,
}

impl std::fmt::Display for Model {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Model::Exact => "exact",
            Model::Approx => "approx",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplerSpec {
    misalignment: Misalignment,
    model: Model,
    n_samples: usize,
    seed: u64,
    n_bins: usize,
}

impl SamplerSpec {
    pub fn new(
        misalignment: Misalignment,
        model: Model,
        n_samples: usize,
        seed: u64,
        n_bins: usize,
    ) -> Result<Self> {
        if n_samples < MIN_SAMPLES {
            return Err(Error::SamplerTooSmall {
                what: "samples",
                min: MIN_SAMPLES,
                got: n_samples,
            });
        }
        if n_bins < MIN_BINS {
            return Err(Error::SamplerTooSmall {
                what: "histogram bins",
                min: MIN_BINS,
                got: n_bins,
            });
        }
        Ok(Self {
            misalignment,
            model,
            n_samples,
            seed,
            n_bins,
        })
    }

    pub fn misalignment(&self) -> Misalignment {
        self.misalignment
    }
    pub fn model(&self) -> Model {
        self.model
    }
    pub fn n_samples(&self) -> usize {
        self.n_samples
    }
    pub fn seed(&self) -> u64 {
        self.seed
    }
    pub fn n_bins(&self) -> usize {
        self.n_bins
    }
}

/// Equal-width, density-normalised histogram.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub densities: Vec<f64>,
}

impl Histogram {
    fn build(sorted: &[f64], upper: f64, n_bins: usize) -> Self {
        let width = upper / n_bins as f64;
        let edges = (0..=n_bins).map(|i| i as f64 * width).collect();
        let mut counts = vec![0u64; n_bins];
        for &x in sorted {
            let bin = ((x / width) as usize).min(n_bins - 1);
            counts[bin] += 1;
        }
        let norm = sorted.len() as f64 * width;
        Self {
            edges,
            densities: counts.into_iter().map(|c| c as f64 / norm).collect(),
        }
    }

    pub fn bin_width(&self) -> f64 {
        self.edges[1] - self.edges[0]
    }

    pub fn centers(&self) -> impl Iterator<Item = f64> + '_ {
        self.edges.windows(2).map(|w| 0.5 * (w[0] + w[1]))
    }
}

/// Running count, mean and 2nd/3rd central sums; mergeable.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: f64,
    mean: f64,
    m2: f64,
    m3: f64,
}

impl Moments {
    fn of(xs: &[f64]) -> Self {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let (m2, m3) = xs.iter().fold((0.0, 0.0), |(m2, m3), &x| {
            let d = x - mean;
            (m2 + d * d, m3 + d * d * d)
        });
        Self { n, mean, m2, m3 }
    }

    fn merge(self, other: Self) -> Self {
        if self.n == 0.0 {
            return other;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        let mean = self.mean + delta * other.n / n;
        let m2 = self.m2 + other.m2 + delta * delta * self.n * other.n / n;
        let m3 = self.m3
            + other.m3
            + delta.powi(3) * self.n * other.n * (self.n - other.n) / (n * n)
            + 3.0 * delta * (self.n * other.m2 - other.n * self.m2) / n;
        Self { n, mean, m2, m3 }
    }
}

/// Summary of one Monte-Carlo run.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDistribution {
    sorted: Vec<f64>,
    histogram: Histogram,
    mean: f64,
    variance: f64,
    skewness: f64,
    seed: u64,
    redraws: u64,
}

impl EmpiricalDistribution {
    pub fn n_samples(&self) -> usize {
        self.sorted.len()
    }
    pub fn seed(&self) -> u64 {
        self.seed
    }
    /// Errors that pointed the beam out of the forward half-space and were
    /// drawn again.
    pub fn redraws(&self) -> u64 {
        self.redraws
    }
    pub fn histogram(&self) -> &Histogram {
        &self.histogram
    }
    pub fn mean(&self) -> f64 {
        self.mean
    }
    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        self.variance
    }
    /// Sample skewness `m₃ / m₂^{3/2}` from population central moments.
    pub fn skewness(&self) -> f64 {
        self.skewness
    }
    /// Samples in ascending order.
    pub fn sorted_samples(&self) -> &[f64] {
        &self.sorted
    }

    /// Fraction of samples `≤ x`.
    pub fn cdf(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&s| s <= x) as f64 / self.sorted.len() as f64
    }

    /// Smallest sample whose empirical CDF reaches `p`.
    pub fn quantile(&self, p: f64) -> f64 {
        let n = self.sorted.len();
        let idx = ((p * n as f64).ceil() as usize).clamp(1, n) - 1;
        self.sorted[idx]
    }
}

/// Draw `n_samples` pointing errors and evaluate the SNR at the UE.
///
/// Errors that would turn the beam out of the forward half-space are
/// redrawn, for both models, so the two models see the same accepted error
/// sequence for a given seed.
pub fn sample(
    cfg: &PhysicalConfig,
    geom: &LinkGeometry,
    spec: &SamplerSpec,
) -> Result<EmpiricalDistribution> {
    let plane = spec.misalignment.plane();
    let sigma = spec.misalignment.sigma();
    let params = closed_form_params(cfg, geom, plane);
    let ue = geom.ue_position();
    let theta_ue = geom.theta_ue();
    let n = spec.n_samples;
    let n_chunks = n.div_ceil(CHUNK_SIZE);

    let chunks: Vec<Result<(Vec<f64>, u64)>> = (0..n_chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            rng.set_stream(chunk as u64);
            let len = CHUNK_SIZE.min(n - chunk * CHUNK_SIZE);
            let mut out = Vec::with_capacity(len);
            let mut redraws = 0u64;
            while out.len() < len {
                let z: f64 = rng.sample(StandardNormal);
                let delta = sigma * z;
                let (dx, dy) = match plane {
                    Plane::InPlane => (delta, 0.0),
                    Plane::NormalPlane => (0.0, delta),
                };
                let b = match error_angles_to_beam_direction(theta_ue, dx, dy) {
                    Ok(b) => b,
                    Err(_) => {
                        redraws += 1;
                        continue;
                    }
                };
                out.push(match spec.model {
                    Model::Exact => snr_at_point(cfg, geom, &b, &ue)?,
                    Model::Approx => snr_tilde(&params, delta),
                });
            }
            Ok((out, redraws))
        })
        .collect();

    let mut sorted = Vec::with_capacity(n);
    let mut moments = Moments::default();
    let mut redraws = 0;
    for chunk in chunks {
        let (values, r) = chunk?;
        moments = moments.merge(Moments::of(&values));
        redraws += r;
        sorted.extend_from_slice(&values);
    }
    sorted.par_sort_unstable_by(f64::total_cmp);

    let nf = moments.n;
    let variance = moments.m2 / (nf - 1.0);
    let skewness = (moments.m3 / nf) / (moments.m2 / nf).powf(1.5);
    let histogram = Histogram::build(&sorted, params.alpha() * HISTOGRAM_HEADROOM, spec.n_bins);

    Ok(EmpiricalDistribution {
        sorted,
        histogram,
        mean: moments.mean,
        variance,
        skewness,
        seed: spec.seed,
        redraws,
    })
}

/// Kolmogorov–Smirnov distance between the empirical CDF and the closed-form
/// CDF for `(params, sigma)`.
pub fn ks_distance(
    emp: &EmpiricalDistribution,
    params: &ClosedFormParams,
    sigma: f64,
) -> Result<f64> {
    let n = emp.sorted.len() as f64;
    let mut sup = 0f64;
    for (i, &x) in emp.sorted.iter().enumerate() {
        let f = cdf(params, sigma, x)?;
        let above = (i + 1) as f64 / n - f;
        let below = f - i as f64 / n;
        sup = sup.max(above).max(below);
    }
    Ok(sup)
}

/// Asymptotic standard errors of the sample mean, variance and skewness of
/// `n` draws from the closed-form distribution, by the delta method on the
/// first three raw sample moments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StandardErrors {
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
}

pub fn standard_errors(params: &ClosedFormParams, sigma: f64, n: usize) -> Result<StandardErrors> {
    let alpha = params.alpha();
    let unit = ClosedFormParams::new(1.0, params.slope())?;
    let mut m = [1.0; 7];
    for (k, slot) in m.iter_mut().enumerate().skip(1) {
        *slot = raw_moment(&unit, sigma, k as u32)?;
    }
    let cov = |i: usize, j: usize| m[i + j] - m[i] * m[j];
    let quad = |g: [f64; 3]| {
        let mut acc = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                acc += g[i] * g[j] * cov(i + 1, j + 1);
            }
        }
        (acc.max(0.0) / n as f64).sqrt()
    };
    let (a1, a2, a3) = (m[1], m[2], m[3]);
    let v = a2 - a1 * a1;
    let mu3 = a3 - 3.0 * a1 * a2 + 2.0 * a1.powi(3);
    let v15 = v.powf(1.5);
    let v25 = v.powf(2.5);
    let skew_grad = [
        (-3.0 * a2 + 6.0 * a1 * a1) / v15 - 1.5 * mu3 / v25 * (-2.0 * a1),
        -3.0 * a1 / v15 - 1.5 * mu3 / v25,
        1.0 / v15,
    ];
    Ok(StandardErrors {
        mean: alpha * quad([1.0, 0.0, 0.0]),
        variance: alpha * alpha * quad([-2.0 * a1, 1.0, 0.0]),
        skewness: quad(skew_grad),
    })
}

/// Two-sample KS distance between two empirical distributions.
pub fn ks_two_sample(a: &EmpiricalDistribution, b: &EmpiricalDistribution) -> f64 {
    let (xs, ys) = (&a.sorted, &b.sorted);
    let (n, m) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut sup = 0f64;
    while i < xs.len() && j < ys.len() {
        let x = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] <= x {
            i += 1;
        }
        while j < ys.len() && ys[j] <= x {
            j += 1;
        }
        sup = sup.max((i as f64 / n - j as f64 / m).abs());
    }
    sup
}
