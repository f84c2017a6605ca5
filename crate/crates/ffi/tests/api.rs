use std::ffi::{CStr, CString};
use std::ptr;

use sdc_ffi::*;

fn last_error() -> Option<String> {
    let p = sdc_last_error_message();
    if p.is_null() {
        return None;
    }
    let s = unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned();
    unsafe { sdc_string_free(p) };
    Some(s)
}

fn params() -> SdcParams {
    let mut p = std::mem::MaybeUninit::<SdcParams>::uninit();
    assert_eq!(unsafe { sdc_params_default(p.as_mut_ptr()) }, SdcStatus::Ok);
    unsafe { p.assume_init() }
}

fn capacity(id: &str, p: &SdcParams) -> (SdcStatus, f64) {
    let id = CString::new(id).unwrap();
    let mut out = f64::NAN;
    let st = unsafe { sdc_capacity(id.as_ptr(), p, &mut out) };
    (st, out)
}

#[test]
fn capacity_cases() {
    let mut p = params();
    assert_eq!(capacity("fully-correlated-bell", &p), (SdcStatus::Ok, 2.0));
    p.p = 0.5;
    let (st, v) = capacity("one-sided-bell", &p);
    assert_eq!(st, SdcStatus::Ok);
    assert!((v - 0.451_205_059_304_601_53).abs() < 1e-10);
    p.k = 2;
    assert_eq!(capacity("ghz-fully", &p), (SdcStatus::Ok, 4.0));
}

#[test]
fn errors_are_reported() {
    let mut p = params();
    assert_eq!(capacity("nope", &p).0, SdcStatus::UnknownCase);
    assert!(last_error().unwrap().contains("nope"));
    p.p = 2.0;
    assert_eq!(capacity("one-sided-bell", &p).0, SdcStatus::InvalidArgument);
    assert!(last_error().unwrap().contains("`p`"));
    let mut out = 0.0;
    assert_eq!(
        unsafe { sdc_capacity(ptr::null(), &p, &mut out) },
        SdcStatus::NullPointer
    );
    p.p = 0.1;
    assert_eq!(capacity("one-sided-bell", &p).0, SdcStatus::Ok);
    assert_eq!(last_error(), None);
}

#[test]
fn state_and_channel_handles() {
    unsafe {
        let mut bell = ptr::null_mut();
        assert_eq!(sdc_state_bell(2, &mut bell), SdcStatus::Ok);
        assert_eq!(sdc_state_dim(bell), 4);
        let mut s = -1.0;
        assert_eq!(sdc_state_entropy(bell, &mut s), SdcStatus::Ok);
        assert!(s.abs() < 1e-12);

        let mut ch = ptr::null_mut();
        assert_eq!(sdc_channel_depolarising(2, 0.5, &mut ch), SdcStatus::Ok);
        let mut out_state = ptr::null_mut();
        assert_eq!(sdc_channel_apply(ch, bell, &mut out_state), SdcStatus::Ok);
        let mut werner = ptr::null_mut();
        assert_eq!(sdc_state_werner(2, 0.25, &mut werner), SdcStatus::Ok);
        let (mut a, mut b) = (0.0, 0.0);
        sdc_state_entropy(out_state, &mut a);
        sdc_state_entropy(werner, &mut b);
        assert!((a - b).abs() < 1e-12);

        let mut chi = 0.0;
        assert_eq!(sdc_holevo_chi_weyl(bell, ch, 2, &mut chi), SdcStatus::Ok);
        assert!((chi - (2.0 - b)).abs() < 1e-10);

        let mut cov = 1.0;
        assert_eq!(sdc_channel_covariance(ch, 1, 3, 7, &mut cov), SdcStatus::Ok);
        assert!(cov <= 1e-10);

        let (mut ent, mut cap, mut conv) = (0.0, 0.0, false);
        assert_eq!(
            sdc_min_output_entropy(bell, ch, 2, false, 4, 1, &mut ent, &mut cap, &mut conv),
            SdcStatus::Ok
        );
        assert!((ent - b).abs() < 1e-4);
        assert!((cap - (2.0 - b)).abs() < 1e-4);

        let mut ghz = ptr::null_mut();
        assert_eq!(sdc_state_ghz(7, &mut ghz), SdcStatus::DimensionOverflow);
        assert!(ghz.is_null());

        let mut copies = ptr::null_mut();
        assert_eq!(sdc_state_k_copies(bell, 2, &mut copies), SdcStatus::Ok);
        assert_eq!(sdc_state_dim(copies), 16);
        assert_eq!(
            sdc_channel_apply(ch, copies, &mut out_state),
            SdcStatus::DimensionMismatch
        );

        for s in [bell, out_state, werner, copies] {
            sdc_state_free(s);
        }
        sdc_channel_free(ch);
        sdc_state_free(ptr::null_mut());
        sdc_channel_free(ptr::null_mut());
        assert_eq!(sdc_state_dim(ptr::null()), 0);
    }
}

#[test]
fn fully_correlated_and_bell_diagonal() {
    unsafe {
        let p4 = [0.4, 0.3, 0.2, 0.1];
        let mut bd = ptr::null_mut();
        assert_eq!(sdc_state_bell_diagonal(p4.as_ptr(), &mut bd), SdcStatus::Ok);
        let q4 = [0.1, 0.2, 0.3, 0.4];
        let mut ch = ptr::null_mut();
        assert_eq!(
            sdc_channel_fully_correlated(q4.as_ptr(), 2, &mut ch),
            SdcStatus::Ok
        );
        let mut chi = 0.0;
        assert_eq!(sdc_holevo_chi_weyl(bd, ch, 2, &mut chi), SdcStatus::Ok);
        assert!((chi - (2.0 - 1.846_439_344_671_015_4)).abs() < 1e-10);
        assert_eq!(
            sdc_state_bell_diagonal(ptr::null(), &mut bd),
            SdcStatus::NullPointer
        );
        sdc_state_free(bd);
        sdc_channel_free(ch);
    }
}

#[test]
fn thresholds() {
    unsafe {
        let mut pt = 0.0;
        assert_eq!(sdc_depolarising_threshold(1e-5, &mut pt), SdcStatus::Ok);
        assert!((pt - 0.345).abs() <= 0.005);
        let (mut mu, mut found) = (0.0, false);
        assert_eq!(
            sdc_crossover_mu(0.05, 1e-5, &mut mu, &mut found),
            SdcStatus::Ok
        );
        assert!(found && (mu - 0.294_619_021_200_492_8).abs() < 2e-5);
        assert_eq!(
            sdc_crossover_mu(0.5, 1e-5, &mut mu, &mut found),
            SdcStatus::Ok
        );
        assert!(!found && mu.is_nan());
        let mut eta = 0.0;
        assert_eq!(sdc_crossover_eta(0.0, 1e-5, &mut eta), SdcStatus::Ok);
        assert!((eta - 0.747_613_833_446_357_7).abs() < 2e-5);
        assert_eq!(
            sdc_depolarising_threshold(0.0, &mut pt),
            SdcStatus::InvalidArgument
        );
    }
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(sdc_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}
