use std::ffi::CStr;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use ris_misalign_ffi::*;

const REFERENCE_SNR: f64 = 3.715_087_153_057_631_5;

fn reference_params() -> RisLinkParams {
    RisLinkParams {
        frequency_hz: 140e9,
        power_noise_ratio: 100.0,
        reflection_magnitude: 1.0,
        receiver_gain: 1e4,
        w_ris_m: 0.25,
        d_ap_m: f64::NAN,
        g_ap: f64::NAN,
        d_ue_m: 2.0,
        theta_ue_rad: 0.0,
    }
}

fn new_link(p: &RisLinkParams) -> Result<*mut RisLink, RisStatus> {
    let mut link = ptr::null_mut();
    match unsafe { ris_link_new(p, &mut link) } {
        RisStatus::Ok => Ok(link),
        s => Err(s),
    }
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(ris_last_error_message()) }
        .to_string_lossy()
        .into_owned()
}

#[test]
fn link_lifecycle_and_aligned_snr() {
    let link = new_link(&reference_params()).unwrap();
    let (mut snr, mut zr) = (0.0, 0.0);
    assert_eq!(unsafe { ris_link_snr_at_ue(link, &mut snr) }, RisStatus::Ok);
    assert_eq!(
        unsafe { ris_link_rayleigh_length(link, &mut zr) },
        RisStatus::Ok
    );
    assert!((snr - REFERENCE_SNR).abs() < 1e-12);
    assert!(zr > 90.0 && zr < 93.0);
    assert!(last_error().is_empty());

    let mut aimed = 0.0;
    assert_eq!(
        unsafe { ris_link_snr_at_direction(link, 0.0, 0.0, &mut aimed) },
        RisStatus::Ok
    );
    assert!((aimed - snr).abs() < 1e-12);
    unsafe { ris_link_free(link) };
    unsafe { ris_link_free(ptr::null_mut()) };
}

#[test]
fn invalid_parameters_map_to_status_codes() {
    let mut p = reference_params();
    p.reflection_magnitude = 2.0;
    assert_eq!(new_link(&p).unwrap_err(), RisStatus::InvalidParameter);
    assert!(
        last_error().contains("reflection_magnitude"),
        "{}",
        last_error()
    );

    let mut p = reference_params();
    p.d_ap_m = 3.0;
    p.g_ap = 1000.0;
    assert_eq!(new_link(&p).unwrap_err(), RisStatus::InconsistentFootprint);

    let mut p = reference_params();
    p.w_ris_m = f64::NAN;
    assert_eq!(new_link(&p).unwrap_err(), RisStatus::InvalidParameter);
    assert!(last_error().contains("footprint"));

    let mut link = ptr::null_mut();
    assert_eq!(
        unsafe { ris_link_new(ptr::null(), &mut link) },
        RisStatus::NullPointer
    );
    assert_eq!(
        unsafe { ris_link_new(&reference_params(), ptr::null_mut()) },
        RisStatus::NullPointer
    );

    let (mut t, mut f) = (0.0, 0.0);
    assert_eq!(
        unsafe { ris_error_angles(1.5, 0.2, 0.0, &mut t, &mut f) },
        RisStatus::BackwardBeam
    );
    assert_eq!(
        unsafe { ris_error_angles(0.0, 0.1, 0.0, &mut t, &mut f) },
        RisStatus::Ok
    );
    assert!((t - 0.1).abs() < 1e-15 && f == 0.0);
}

#[test]
fn closed_forms_through_the_abi() {
    let link = new_link(&reference_params()).unwrap();
    let mut cf = RisClosedForm {
        alpha: 0.0,
        slope: 0.0,
    };
    let mut normal = cf;
    assert_eq!(
        unsafe { ris_link_closed_form(link, RIS_PLANE_IN, &mut cf) },
        RisStatus::Ok
    );
    assert_eq!(
        unsafe { ris_link_closed_form(link, RIS_PLANE_NORMAL, &mut normal) },
        RisStatus::Ok
    );
    assert_eq!(
        unsafe { ris_link_closed_form(link, 7, &mut normal) },
        RisStatus::InvalidEnum
    );
    assert!((cf.alpha - REFERENCE_SNR).abs() < 1e-12);
    assert!((cf.slope / normal.slope - 1.0).abs() < 1e-12);

    let mut far = cf;
    assert_eq!(
        unsafe { ris_link_asymptotic(link, RIS_PLANE_IN, RIS_LIMIT_FAR_RAYLEIGH, &mut far) },
        RisStatus::Ok
    );
    assert!((far.slope / cf.slope - 1.0).abs() < 1e-3);

    let sigma = 6f64.to_radians();
    let (mut m, mut v, mut s, mut z, mut c, mut d) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    unsafe {
        assert_eq!(ris_mean(cf, sigma, &mut m), RisStatus::Ok);
        assert_eq!(ris_variance(cf, sigma, &mut v), RisStatus::Ok);
        assert_eq!(ris_skewness(cf, sigma, &mut s), RisStatus::Ok);
        assert_eq!(ris_zero_skew_sigma(cf, &mut z), RisStatus::Ok);
        assert_eq!(ris_cdf(cf, sigma, 2.0, &mut c), RisStatus::Ok);
        assert_eq!(ris_pdf(cf, sigma, 2.0, &mut d), RisStatus::Ok);
        assert_eq!(
            ris_pdf(cf, sigma, cf.alpha, &mut d),
            RisStatus::OutsideSupport
        );
        assert_eq!(ris_mean(cf, -1.0, &mut m), RisStatus::InvalidParameter);
        assert_eq!(
            ris_mean(
                RisClosedForm {
                    alpha: -1.0,
                    slope: 1.0
                },
                sigma,
                &mut m
            ),
            RisStatus::InvalidParameter
        );
        assert_eq!(ris_mean(cf, sigma, ptr::null_mut()), RisStatus::NullPointer);
    }
    assert!((z.to_degrees() - 6.26).abs() < 0.05);
    assert!(v > 0.0 && c > 0.0 && c < 1.0);
    unsafe { ris_link_free(link) };
}

#[test]
fn sampling_handle() {
    let link = new_link(&reference_params()).unwrap();
    let sigma = 2.5f64.to_radians();
    let mut emp = ptr::null_mut();
    assert_eq!(
        unsafe {
            ris_sample(
                link,
                RIS_PLANE_IN,
                RIS_MODEL_EXACT,
                sigma,
                10,
                1,
                50,
                &mut emp,
            )
        },
        RisStatus::SamplerTooSmall
    );
    assert!(emp.is_null());
    assert_eq!(
        unsafe {
            ris_sample(
                link,
                RIS_PLANE_IN,
                RIS_MODEL_EXACT,
                sigma,
                50_000,
                11,
                40,
                &mut emp,
            )
        },
        RisStatus::Ok
    );

    let mut summary = RisSummary {
        n_samples: 0,
        seed: 0,
        redraws: 0,
        mean: 0.0,
        variance: 0.0,
        skewness: 0.0,
    };
    assert_eq!(
        unsafe { ris_empirical_summary(emp, &mut summary) },
        RisStatus::Ok
    );
    assert_eq!(
        (summary.n_samples, summary.seed, summary.redraws),
        (50_000, 11, 0)
    );

    let mut cf = RisClosedForm {
        alpha: 0.0,
        slope: 0.0,
    };
    unsafe { ris_link_closed_form(link, RIS_PLANE_IN, &mut cf) };
    let (mut ks, mut below) = (1.0, 0.0);
    assert_eq!(
        unsafe { ris_empirical_ks(emp, cf, sigma, &mut ks) },
        RisStatus::Ok
    );
    assert_eq!(
        unsafe { ris_empirical_cdf(emp, cf.alpha, &mut below) },
        RisStatus::Ok
    );
    assert!(ks < 0.02, "{ks}");
    assert_eq!(below, 1.0);

    let mut bins = 0usize;
    let mut small = [0.0; 10];
    let mut small2 = [0.0; 10];
    assert_eq!(
        unsafe {
            ris_empirical_histogram(
                emp,
                small.as_mut_ptr(),
                small2.as_mut_ptr(),
                small.len(),
                &mut bins,
            )
        },
        RisStatus::BufferTooSmall
    );
    assert_eq!(bins, 40);
    let (mut centers, mut dens) = (vec![0.0; bins], vec![0.0; bins]);
    assert_eq!(
        unsafe {
            ris_empirical_histogram(
                emp,
                centers.as_mut_ptr(),
                dens.as_mut_ptr(),
                bins,
                &mut bins,
            )
        },
        RisStatus::Ok
    );
    let width = centers[1] - centers[0];
    assert!((dens.iter().sum::<f64>() * width - 1.0).abs() < 1e-9);

    unsafe {
        ris_empirical_free(emp);
        ris_empirical_free(ptr::null_mut());
        ris_link_free(link);
    }
}

#[test]
fn error_message_is_thread_local() {
    let mut p = reference_params();
    p.d_ue_m = -1.0;
    assert!(new_link(&p).is_err());
    let here = last_error();
    assert!(!here.is_empty());
    let there = std::thread::spawn(last_error).join().unwrap();
    assert!(there.is_empty());
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(ris_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(crate_dir().join("include/ris_misalign.h")).unwrap();
    let source = std::fs::read_to_string(crate_dir().join("src/lib.rs")).unwrap();
    let exports: Vec<&str> = source
        .split("extern \"C\" fn ")
        .skip(1)
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(exports.len() >= 20);
    for name in exports {
        assert!(
            header.contains(&format!("{name}(")),
            "{name} missing from header"
        );
    }
}

fn static_lib() -> Option<PathBuf> {
    // tests run from <target>/<profile>/deps
    let exe = std::env::current_exe().ok()?;
    let profile_dir = exe.parent()?.parent()?;
    let lib = profile_dir.join("libris_misalign_ffi.a");
    lib.exists().then_some(lib)
}

#[test]
fn c_program_links_and_runs() {
    let lib = static_lib().expect("static library next to the test binary");
    let out_dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let exe = out_dir.join("ris_smoke");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let status = Command::new(&cc)
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(crate_dir().join("include"))
        .arg(crate_dir().join("tests/c/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("C compiler available");
    assert!(
        status.success(),
        "compiling {}",
        Path::new("tests/c/smoke.c").display()
    );
    let run = Command::new(&exe).output().unwrap();
    let stdout = String::from_utf8_lossy(&run.stdout);
    assert!(
        run.status.success(),
        "{stdout}{}",
        String::from_utf8_lossy(&run.stderr)
    );
    assert!(stdout.starts_with("ok "), "{stdout}");
}
