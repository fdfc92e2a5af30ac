use std::ffi::{CStr, CString};
use std::ptr;

use rydberg_cz_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as std::ffi::c_char; 256];
    unsafe {
        rcz_last_error(buf.as_mut_ptr(), buf.len());
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

#[test]
fn preset_simulation_round_trip() {
    let name = CString::new("to").unwrap();
    let mut pulse = ptr::null_mut();
    unsafe {
        assert_eq!(rcz_pulse_preset(name.as_ptr(), &mut pulse), RczStatus::Ok);
        assert!(rcz_pulse_gate_time(pulse) > 0.0);

        let mut res = ptr::null_mut();
        assert_eq!(rcz_simulate(pulse, 0.0, false, &mut res), RczStatus::Ok);
        let mut tt = [0.0; 4];
        assert_eq!(rcz_gate_result_truth_table(res, tt.as_mut_ptr()), RczStatus::Ok);
        assert!(tt.iter().all(|f| *f > 0.999));
        let mut ph = [0.0; 3];
        assert_eq!(rcz_gate_result_phases(res, ph.as_mut_ptr()), RczStatus::Ok);
        assert!((ph[0] - ph[1]).abs() < 1e-9);
        let mut f = 0.0;
        assert_eq!(rcz_gate_result_fidelity(res, RczMeasure::TruthTableSqrtTrace, &mut f), RczStatus::Ok);
        assert!(f > 0.9999);
        rcz_gate_result_free(res);
        rcz_pulse_free(pulse);
    }
}

#[test]
fn custom_timing_is_reported_back() {
    let mut pulse = ptr::null_mut();
    unsafe {
        assert_eq!(rcz_pulse_custom(0.2, 0.4, 0.1, &mut pulse), RczStatus::Ok);
        let mut t = [0.0; 3];
        assert_eq!(rcz_pulse_timing(pulse, t.as_mut_ptr()), RczStatus::Ok);
        assert_eq!(t, [0.2, 0.4, 0.1]);
        rcz_pulse_free(pulse);
    }
}

#[test]
fn errors_are_reported() {
    let bad = CString::new("nope").unwrap();
    let mut pulse = ptr::null_mut();
    unsafe {
        assert_eq!(rcz_pulse_preset(bad.as_ptr(), &mut pulse), RczStatus::InvalidArgument);
        assert!(pulse.is_null());
        assert!(last_error().contains("nope"));

        assert_eq!(rcz_pulse_custom(-1.0, 0.4, 0.1, &mut pulse), RczStatus::InvalidArgument);
        assert_eq!(rcz_pulse_preset(ptr::null(), &mut pulse), RczStatus::NullPointer);
        assert_eq!(rcz_simulate(ptr::null(), 0.0, false, &mut ptr::null_mut()), RczStatus::NullPointer);
        assert!(rcz_pulse_gate_time(ptr::null()).is_nan());

        let toml = CString::new("[pulse]\nbogus = 1\n").unwrap();
        let mut cfg = ptr::null_mut();
        assert_eq!(rcz_config_parse(toml.as_ptr(), &mut cfg), RczStatus::InvalidArgument);
        assert!(!last_error().is_empty());

        rcz_pulse_free(ptr::null_mut());
        rcz_gate_result_free(ptr::null_mut());
        rcz_config_free(ptr::null_mut());
    }
}

#[test]
fn last_error_truncates() {
    let bad = CString::new("a-very-long-unknown-preset-name").unwrap();
    let mut pulse = ptr::null_mut();
    unsafe {
        rcz_pulse_preset(bad.as_ptr(), &mut pulse);
        let mut buf = [1 as std::ffi::c_char; 8];
        let full = rcz_last_error(buf.as_mut_ptr(), buf.len());
        assert!(full > 8);
        assert_eq!(buf[7], 0);
        assert_eq!(rcz_last_error(ptr::null_mut(), 0), full);
    }
}

#[test]
fn monte_carlo_from_config() {
    let toml = CString::new(
        "[pulse]\npreset = \"to\"\n\n[noise.eps_delta]\nkind = \"uniform\"\nhalf_width_mhz = 0.5\n\n[sampling]\nsamples = 4\nseed = 3\n",
    )
    .unwrap();
    let mut cfg = ptr::null_mut();
    unsafe {
        assert_eq!(rcz_config_parse(toml.as_ptr(), &mut cfg), RczStatus::Ok, "{}", last_error());
        let (mut mean, mut se, mut failed) = (0.0, 0.0, 0usize);
        assert_eq!(rcz_monte_carlo(cfg, &mut mean, &mut se, &mut failed), RczStatus::Ok);
        assert!(mean > 0.99 && mean < 1.0);
        assert!(se > 0.0);
        assert_eq!(failed, 0);
        let mut again = 0.0;
        rcz_monte_carlo(cfg, &mut again, &mut se, &mut failed);
        assert_eq!(mean, again);
        rcz_config_free(cfg);
    }
}

#[test]
fn version_is_nul_terminated() {
    let v = unsafe { CStr::from_ptr(rcz_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/rydberg_cz.h")).unwrap();
    let src = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/src/lib.rs")).unwrap();
    let exports: Vec<&str> = src
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(exports.len() >= 14);
    for name in exports {
        assert!(header.contains(&format!("{name}(")), "{name} missing from header");
    }
}
