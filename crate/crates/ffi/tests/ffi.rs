use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use tsvf_ffi::*;

fn last_error() -> String {
    let p = tsvf_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

unsafe fn state(re: &[f64], im: Option<&[f64]>) -> *mut TsvfState {
    let mut out = ptr::null_mut();
    let im = im.map_or(ptr::null(), <[f64]>::as_ptr);
    assert_eq!(
        unsafe { tsvf_state_new(re.as_ptr(), im, re.len(), &mut out) },
        TsvfStatus::Ok
    );
    out
}

unsafe fn observable(re: &[f64], im: Option<&[f64]>, dim: usize) -> *mut TsvfObservable {
    let mut out = ptr::null_mut();
    let im = im.map_or(ptr::null(), <[f64]>::as_ptr);
    assert_eq!(
        unsafe { tsvf_observable_new(re.as_ptr(), im, dim, &mut out) },
        TsvfStatus::Ok
    );
    out
}

#[test]
fn tilted_spin_abl_through_handles() {
    unsafe {
        let theta = 2.0 * std::f64::consts::PI / 3.0;
        let up = state(&[1.0, 0.0], None);
        let mut xi = ptr::null_mut();
        assert_eq!(tsvf_observable_spin(theta, 0.0, &mut xi), TsvfStatus::Ok);
        let mut tsv = ptr::null_mut();
        assert_eq!(tsvf_two_state_new(up, up, &mut tsv), TsvfStatus::Ok);

        let (mut p, mut e, mut n) = ([0.0; 2], [0.0; 2], 0usize);
        assert_eq!(
            tsvf_abl_probabilities(tsv, xi, p.as_mut_ptr(), e.as_mut_ptr(), 2, &mut n),
            TsvfStatus::Ok
        );
        assert_eq!(n, 2);
        assert!((e[0] + 1.0).abs() < 1e-12 && (e[1] - 1.0).abs() < 1e-12);
        // (1/16) / (1/16 + 9/16)
        assert!((p[1] - 0.1).abs() < 1e-12);

        let mut small = [0.0; 1];
        assert_eq!(
            tsvf_abl_probabilities(tsv, xi, small.as_mut_ptr(), ptr::null_mut(), 1, &mut n),
            TsvfStatus::BufferTooSmall
        );
        assert_eq!(n, 2);

        tsvf_two_state_free(tsv);
        tsvf_observable_free(xi);
        tsvf_state_free(up);
    }
}

#[test]
fn singlet_tensor_and_inner() {
    unsafe {
        let up = state(&[1.0, 0.0], None);
        let down = state(&[0.0, 1.0], None);
        let singlet = state(&[0.0, 1.0, -1.0, 0.0], None);
        let mut ud = ptr::null_mut();
        assert_eq!(tsvf_state_tensor(up, down, &mut ud), TsvfStatus::Ok);
        assert_eq!(tsvf_state_dim(ud), 4);
        let (mut re, mut im) = (0.0, 0.0);
        assert_eq!(
            tsvf_state_inner(ud, singlet, &mut re, &mut im),
            TsvfStatus::Ok
        );
        assert!((re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15 && im == 0.0);

        let mut amps = ([0.0; 4], [0.0; 4]);
        assert_eq!(
            tsvf_state_amplitudes(singlet, amps.0.as_mut_ptr(), amps.1.as_mut_ptr(), 4),
            TsvfStatus::Ok
        );
        assert!((amps.0[2] + std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);

        assert_eq!(
            tsvf_state_inner(up, singlet, &mut re, &mut im),
            TsvfStatus::DimensionMismatch
        );
        assert!(last_error().contains("dimension"));
        for s in [up, down, singlet, ud] {
            tsvf_state_free(s);
        }
    }
}

#[test]
fn product_observable_weak_value() {
    unsafe {
        // post-selection |up_x>|up_y> on the singlet makes sigma_1y sigma_2x certain at -1
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let post = state(&[0.5, 0.0, 0.5, 0.0], Some(&[0.0, 0.5, 0.0, 0.5]));
        let singlet = state(&[0.0, h, -h, 0.0], None);
        let y = observable(&[0.0; 4], Some(&[0.0, -1.0, 1.0, 0.0]), 2);
        let x = observable(&[0.0, 1.0, 1.0, 0.0], None, 2);
        let mut yx = ptr::null_mut();
        assert_eq!(tsvf_observable_tensor(y, x, &mut yx), TsvfStatus::Ok);
        let mut tsv = ptr::null_mut();
        assert_eq!(tsvf_two_state_new(singlet, post, &mut tsv), TsvfStatus::Ok);
        let (mut re, mut im) = (0.0, 0.0);
        assert_eq!(tsvf_weak_value(tsv, yx, &mut re, &mut im), TsvfStatus::Ok);
        assert!((re + 1.0).abs() < 1e-12 && im.abs() < 1e-12, "{re} {im}");
        tsvf_two_state_free(tsv);
        tsvf_observable_free(yx);
        tsvf_observable_free(x);
        tsvf_observable_free(y);
        tsvf_state_free(post);
        tsvf_state_free(singlet);
    }
}

#[test]
fn error_codes() {
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(
            tsvf_state_new(ptr::null(), ptr::null(), 2, &mut s),
            TsvfStatus::NullPointer
        );
        assert_eq!(
            tsvf_state_new([0.0, 0.0].as_ptr(), ptr::null(), 2, &mut s),
            TsvfStatus::ZeroNorm
        );
        assert!(s.is_null());

        let mut o = ptr::null_mut();
        let skew = [0.0, 1.0, -1.0, 0.0];
        assert_eq!(
            tsvf_observable_new(skew.as_ptr(), ptr::null(), 2, &mut o),
            TsvfStatus::NotHermitian
        );
        assert_eq!(
            tsvf_observable_new(skew.as_ptr(), ptr::null(), 0, &mut o),
            TsvfStatus::InvalidArgument
        );

        let up = state(&[1.0, 0.0], None);
        let down = state(&[0.0, 1.0], None);
        let mut tsv = ptr::null_mut();
        assert_eq!(tsvf_two_state_new(up, down, &mut tsv), TsvfStatus::Ok);
        let z = observable(&[1.0, 0.0, 0.0, -1.0], None, 2);
        let (mut re, mut im) = (0.0, 0.0);
        assert_eq!(
            tsvf_weak_value(tsv, z, &mut re, &mut im),
            TsvfStatus::WeakValueUndefined
        );
        let mut p = [0.0; 2];
        let mut n = 0;
        assert_eq!(
            tsvf_abl_probabilities(tsv, z, p.as_mut_ptr(), ptr::null_mut(), 2, &mut n),
            TsvfStatus::PostSelectionUnreachable
        );
        assert_eq!(
            tsvf_weak_value(ptr::null(), z, &mut re, &mut im),
            TsvfStatus::NullPointer
        );

        // success clears the message
        assert_eq!(tsvf_state_dim(up), 2);
        let mut again = ptr::null_mut();
        assert_eq!(tsvf_state_spin_up(0.3, 0.1, &mut again), TsvfStatus::Ok);
        assert!(tsvf_last_error_message().is_null());

        tsvf_two_state_free(tsv);
        tsvf_observable_free(z);
        for s in [up, down, again] {
            tsvf_state_free(s);
        }
        tsvf_state_free(ptr::null_mut());
        assert_eq!(tsvf_state_dim(ptr::null()), 0);
    }
}

#[test]
fn scenario_report_json() {
    unsafe {
        let names = CString::new("ghz_classical_bound, scenario_three_box").unwrap();
        let mut json = ptr::null_mut();
        let mut passed = false;
        assert_eq!(
            tsvf_run_scenarios_json(names.as_ptr(), 2_000, 5, 4.0, &mut json, &mut passed),
            TsvfStatus::Ok
        );
        assert!(passed);
        let text = CStr::from_ptr(json).to_str().unwrap().to_owned();
        tsvf_string_free(json);
        assert!(text.contains("\"results\"") && text.contains("scenario_three_box"));

        let bad = CString::new("nope").unwrap();
        assert_eq!(
            tsvf_run_scenarios_json(bad.as_ptr(), 2_000, 5, 4.0, &mut json, ptr::null_mut()),
            TsvfStatus::UnknownScenario
        );
        assert!(last_error().contains("valid names"));
        assert_eq!(
            tsvf_run_scenarios_json(ptr::null(), 10, 5, 4.0, &mut json, ptr::null_mut()),
            TsvfStatus::InvalidArgument
        );
    }
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(tsvf_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

fn header_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include")
}

#[test]
fn header_declares_every_export() {
    let h = std::fs::read_to_string(header_dir().join("tsvf_lab.h")).unwrap();
    for f in [
        "tsvf_state_new",
        "tsvf_state_free",
        "tsvf_observable_new",
        "tsvf_observable_spin",
        "tsvf_two_state_new",
        "tsvf_abl_probabilities",
        "tsvf_weak_value",
        "tsvf_run_scenarios_json",
        "tsvf_string_free",
        "tsvf_last_error_message",
        "typedef struct TsvfState TsvfState",
        "TSVF_STATUS_BUFFER_TOO_SMALL = 9",
    ] {
        assert!(h.contains(f), "header lacks {f}");
    }
}

/// Compiles a C program against the header and the static library, then runs it.
#[test]
fn c_program_links_and_runs() {
    if Command::new("cc").arg("--version").output().is_err() {
        eprintln!("no C compiler; skipping");
        return;
    }
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(Path::parent).unwrap();
    let lib = profile_dir.join("libtsvf_ffi.a");
    assert!(lib.exists(), "{} missing", lib.display());
    let out = Path::new(env!("CARGO_TARGET_TMPDIR")).join("tsvf_smoke");
    let src = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/c/smoke.c");
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(header_dir())
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let run = Command::new(&out).output().unwrap();
    assert!(
        run.status.success(),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );
    assert!(String::from_utf8_lossy(&run.stdout).starts_with("ok "));
}
