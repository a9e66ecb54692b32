//! Adaptive Gauss–Kronrod (7/15) quadrature, and integration against the
//! approximate SNR density with its endpoint singularities mapped away.

#![allow(clippy::excessive_precision)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::analytic::{density_with_log_ratio, pdf, ClosedFormParams};
use crate::error::Result;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub abs_error: f64,
    pub converged: bool,
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kron += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kron * half, ((kron - gauss) * half).abs())
}

/// Integrate `f` over `[a, b]` to `max(abs_tol, rel_tol·|I|)`, bisecting the
/// segment with the largest error estimate first.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Integral {
    const MAX_SEGMENTS: usize = 2000;
    let (value, error) = kronrod(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, error });
    let mut total = value;
    let mut total_err = error;

    while total_err > abs_tol.max(rel_tol * total.abs()) {
        if heap.len() >= MAX_SEGMENTS {
            return Integral {
                value: total,
                abs_error: total_err,
                converged: false,
            };
        }
        let worst = heap.pop().expect("heap never empties");
        let mid = 0.5 * (worst.a + worst.b);
        let (lv, le) = kronrod(&f, worst.a, mid);
        let (rv, re) = kronrod(&f, mid, worst.b);
        total += lv + rv - worst.value;
        total_err += le + re - worst.error;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: lv,
            error: le,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: rv,
            error: re,
        });
    }
    // re-sum to shed the drift of the running updates
    let value = heap.iter().map(|s| s.value).sum();
    let abs_error = heap.iter().map(|s| s.error).sum();
    Integral {
        value,
        abs_error,
        converged: true,
    }
}

/// `∫₀^α h(x) f(x) dx` where `f` is the approximate SNR density.
///
/// Substituting `x = α e^{-t²}` turns both endpoint singularities of `f`
/// into a smooth half-Gaussian in `t` of width `√(slope·σ²)`. The range is
/// cut at `t = 26`, where `x` leaves the normal floating-point range; the
/// probability beyond the cut is added to `abs_error` and the result is
/// flagged unconverged when that mass exceeds the requested accuracy.
pub fn integrate_against_density<H: Fn(f64) -> f64>(
    params: &ClosedFormParams,
    sigma: f64,
    h: H,
    rel_tol: f64,
) -> Result<Integral> {
    let alpha = params.alpha();
    // surface the sigma/params validation once, up front
    pdf(params, sigma, 0.5 * alpha)?;
    let width = params.spread(sigma).sqrt();
    let upper = (14.0 * width).min(26.0);
    let integrand = |t: f64| {
        let e = (-t * t).exp();
        let x = alpha * e;
        if t == 0.0 || x == 0.0 {
            return 0.0;
        }
        h(x) * density_with_log_ratio(params, sigma, x, t * t) * 2.0 * t * x
    };
    let mut r = integrate(integrand, 0.0, upper, 0.0, rel_tol);
    let lost = libm::erfc(upper / (2.0 * width * width).sqrt());
    if lost > 0.0 {
        r.abs_error += lost;
        r.converged &= lost <= rel_tol * r.value.abs();
    }
    Ok(r)
}
