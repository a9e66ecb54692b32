//! Subcommand bodies. Each writes its files, prints a short summary to
//! stdout and returns the error class that decides the exit code.

use serde_json::{json, Value};

use super::config::{Resolved, RunConfig};
use super::output::{resolve_path, sibling, write, write_json, Csv, Provenance};
use super::CliError;
use crate::analytic::{
    cdf, closed_form_params, mean, pdf, skewness, variance, zero_skew_sigma, Misalignment,
};
use crate::field::snr_at_ue;
use crate::montecarlo::{ks_distance, sample, SamplerSpec};
use crate::units::rad_to_deg;
use crate::validate::{self, KS_BAND_99};

/// Relative inset of the `dist` grid from both ends of the support.
pub const DIST_INSET: f64 = 1e-4;
/// Probability levels of the quantile table written by `mc`.
pub const QUANTILE_LEVELS: usize = 99;

fn single_sigma(r: &Resolved, command: &str) -> Result<(f64, f64), CliError> {
    match r.sigmas.as_slice() {
        [one] => Ok(*one),
        many => Err(CliError::Config(format!(
            "{command} takes exactly one sigma, got {} (use --sigma-deg)",
            many.len()
        ))),
    }
}

pub fn eval(cfg: &RunConfig, r: &Resolved) -> Result<(), CliError> {
    let params = closed_form_params(&r.phys, &r.geom, r.plane);
    let aligned = snr_at_ue(&r.phys, &r.geom);
    let zero_skew = rad_to_deg(zero_skew_sigma(&params));
    let mut rows = Vec::with_capacity(r.sigmas.len());
    println!(
        "{:>10} {:>14} {:>14} {:>10}",
        "sigma_deg", "mean", "variance", "skewness"
    );
    for &(deg, rad) in &r.sigmas {
        let (m, v, s) = (
            mean(&params, rad)?,
            variance(&params, rad)?,
            skewness(&params, rad)?,
        );
        println!("{deg:>10} {m:>14.6} {v:>14.6e} {s:>10.4}");
        rows.push(json!({
            "sigma_deg": deg,
            "alpha": params.alpha(),
            "slope": params.slope(),
            "snr_at_ue": aligned,
            "mean": m,
            "variance": v,
            "skewness": s,
            "zero_skew_sigma_deg": zero_skew,
        }));
    }
    println!(
        "alpha = {}, slope = {}, zero-skew sigma = {zero_skew} deg",
        params.alpha(),
        params.slope()
    );
    let path = resolve_path(cfg.out.as_deref(), "eval.json");
    write_json(
        &path,
        &Provenance {
            command: "eval",
            config: cfg,
        }
        .json(Value::Array(rows)),
    )?;
    println!("wrote {}", path.display());
    Ok(())
}

pub fn dist(cfg: &RunConfig, r: &Resolved) -> Result<(), CliError> {
    let (_, sigma) = single_sigma(r, "dist")?;
    let params = closed_form_params(&r.phys, &r.geom, r.plane);
    let alpha = params.alpha();
    let lo = DIST_INSET * alpha;
    let step = (alpha - 2.0 * lo) / (r.dist_points - 1) as f64;
    let mut csv = Csv::new(
        Provenance {
            command: "dist",
            config: cfg,
        }
        .csv_header(),
        &["x", "pdf_analytic", "cdf_analytic"],
    );
    for i in 0..r.dist_points {
        let x = lo + step * i as f64;
        csv.row(&[x, pdf(&params, sigma, x)?, cdf(&params, sigma, x)?]);
    }
    let path = resolve_path(cfg.out.as_deref(), "dist.csv");
    write(&path, &csv.finish())?;
    println!(
        "{} points over (0, {alpha}); wrote {}",
        r.dist_points,
        path.display()
    );
    Ok(())
}

pub fn mc(cfg: &RunConfig, r: &Resolved) -> Result<(), CliError> {
    let (deg, sigma) = single_sigma(r, "mc")?;
    let s = r.sampler;
    let spec = SamplerSpec::new(
        Misalignment::new(r.plane, sigma)?,
        s.model,
        s.n,
        s.seed,
        s.bins,
    )?;
    let emp = sample(&r.phys, &r.geom, &spec)?;
    let params = closed_form_params(&r.phys, &r.geom, r.plane);
    let ks = ks_distance(&emp, &params, sigma)?;
    let band = KS_BAND_99 / (s.n as f64).sqrt();
    let prov = Provenance {
        command: "mc",
        config: cfg,
    };

    let mut hist = Csv::new(prov.csv_header(), &["bin_center", "density"]);
    for (c, d) in emp.histogram().centers().zip(&emp.histogram().densities) {
        hist.row(&[c, *d]);
    }
    let mut quant = Csv::new(
        prov.csv_header(),
        &["p", "quantile", "ecdf", "cdf_analytic"],
    );
    for i in 1..=QUANTILE_LEVELS {
        let p = i as f64 / (QUANTILE_LEVELS + 1) as f64;
        let x = emp.quantile(p);
        quant.row(&[p, x, emp.cdf(x), cdf(&params, sigma, x)?]);
    }
    let summary = json!({
        "model": s.model,
        "regime": r.plane,
        "sigma_deg": deg,
        "n_samples": emp.n_samples(),
        "seed": emp.seed(),
        "redraws": emp.redraws(),
        "mean": emp.mean(),
        "variance": emp.variance(),
        "skewness": emp.skewness(),
        "analytic": {
            "alpha": params.alpha(),
            "slope": params.slope(),
            "mean": mean(&params, sigma)?,
            "variance": variance(&params, sigma)?,
            "skewness": skewness(&params, sigma)?,
        },
        "ks_distance": ks,
        "ks_band_99": band,
    });

    let prefix = resolve_path(cfg.out.as_deref(), "mc");
    let paths = [
        sibling(&prefix, "_hist.csv"),
        sibling(&prefix, "_quantiles.csv"),
        sibling(&prefix, "_summary.json"),
    ];
    write(&paths[0], &hist.finish())?;
    write(&paths[1], &quant.finish())?;
    write_json(&paths[2], &prov.json(summary))?;
    println!(
        "n = {}, mean = {:.6}, skewness = {:.4}, KS = {ks:.5} (99% band {band:.5}), redraws = {}",
        emp.n_samples(),
        emp.mean(),
        emp.skewness(),
        emp.redraws()
    );
    for p in &paths {
        println!("wrote {}", p.display());
    }
    Ok(())
}

pub fn sweep(cfg: &RunConfig, r: &Resolved) -> Result<(), CliError> {
    let (axis, points) = cfg.sweep_points(&r.phys).map_err(CliError::Config)?;
    let prov = Provenance {
        command: "sweep",
        config: cfg,
    };
    let mut grid = Csv::new(
        prov.csv_header(),
        &["axis_value", "sigma_deg", "mean", "skewness"],
    );
    let mut locus = Csv::new(prov.csv_header(), &["axis_value", "zero_skew_sigma_deg"]);
    for pt in &points {
        let params = closed_form_params(&r.phys, &pt.geom, r.plane);
        for &(deg, rad) in &r.sigmas {
            grid.row(&[
                pt.axis_value,
                deg,
                mean(&params, rad)?,
                skewness(&params, rad)?,
            ]);
        }
        locus.row(&[pt.axis_value, rad_to_deg(zero_skew_sigma(&params))]);
    }
    let path = resolve_path(cfg.out.as_deref(), "sweep.csv");
    let locus_path = sibling(&path, "_locus.csv");
    write(&path, &grid.finish())?;
    write(&locus_path, &locus.finish())?;
    println!(
        "{} {:?} values ({}) x {} sigmas; wrote {} and {}",
        points.len(),
        axis,
        axis.unit(),
        r.sigmas.len(),
        path.display(),
        locus_path.display()
    );
    Ok(())
}

pub fn validate(cfg: &RunConfig, r: &Resolved, alpha_scale: f64) -> Result<(), CliError> {
    let opts = validate::Options {
        n_samples: r.sampler.n,
        seed: r.sampler.seed,
        alpha_scale,
    };
    let report = validate::run(&r.phys, &opts)?;
    print!("{}", report.table());
    let path = resolve_path(cfg.out.as_deref(), "validate.json");
    let results = json!({
        "scale": report.scale,
        "passed": report.passed(),
        "checks": report.checks,
    });
    write_json(
        &path,
        &Provenance {
            command: "validate",
            config: cfg,
        }
        .json(results),
    )?;
    println!("wrote {}", path.display());
    if report.passed() {
        Ok(())
    } else {
        let names: Vec<String> = report
            .failures()
            .map(|c| format!("[{}] {}", c.criterion, c.name))
            .collect();
        Err(CliError::Validation(format!(
            "{} check(s) failed: {}",
            names.len(),
            names.join("; ")
        )))
    }
}
