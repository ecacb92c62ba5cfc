use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use review_pricing::buyers::{BuyerKind, BuyerModel};
use review_pricing::instances::build_hard_instance;
use review_pricing::sellers::{PolicySpec, TwoPhaseConfig};
use review_pricing::sim::run_episode;
use review_pricing_ffi::*;

const INSTANCE: &str = r#"
d = 3
horizon_T = 500
theta = [0.3, 0.6, 0.9]
q = [0.2, 0.3, 0.5]
value_dists = [
    { kind = "bernoulli", params = [0.3] },
    { kind = "uniform", params = [0.4, 0.8] },
    { kind = "point", params = [0.9] },
]
"#;

fn instance() -> *mut RpInstance {
    let text = CString::new(INSTANCE).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { rp_instance_from_toml(text.as_ptr(), &mut out) },
        RpStatus::Ok
    );
    assert!(!out.is_null());
    out
}

fn last_error() -> String {
    let p = rp_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn instance_queries() {
    let inst = instance();
    unsafe {
        assert_eq!(rp_instance_d(inst), 3);
        assert_eq!(rp_instance_horizon(inst), 500);
        let all = [true; 3];
        let mut rev = 0.0;
        assert_eq!(
            rp_instance_rev(inst, 0.6, all.as_ptr(), 3, &mut rev),
            RpStatus::Ok
        );
        assert!((rev - 0.48).abs() < 1e-12);
        let mut best = RpOptimalPrice {
            price: 0.0,
            type_index: 0,
            revenue: 0.0,
        };
        assert_eq!(
            rp_instance_optimal_price(inst, all.as_ptr(), 3, &mut best),
            RpStatus::Ok
        );
        assert_eq!(best.type_index, 1);
        assert!((best.price - 0.6).abs() < 1e-12);
        let top = [false, false, true];
        assert_eq!(
            rp_instance_optimal_price(inst, top.as_ptr(), 3, &mut best),
            RpStatus::Ok
        );
        assert_eq!(best.type_index, 2);
        rp_instance_free(inst);
    }
}

#[test]
fn episode_matches_library() {
    let inst = unsafe {
        let mut out = ptr::null_mut();
        assert_eq!(rp_instance_hard(4096, 3, 0.1, &mut out), RpStatus::Ok);
        out
    };
    let policy = CString::new("two_phase").unwrap();
    let buyer = CString::new("fixed_confidence").unwrap();
    let mut trace = ptr::null_mut();
    let status = unsafe {
        rp_run_episode(
            inst,
            policy.as_ptr(),
            buyer.as_ptr(),
            0.1,
            2.0,
            0.0,
            42,
            &mut trace,
        )
    };
    assert_eq!(status, RpStatus::Ok);

    let lib_inst = build_hard_instance(4096, 3, 0.1).unwrap();
    let config = TwoPhaseConfig {
        lambda: None,
        phase1_constant: 2.0,
        eta: 0.1,
    };
    let lib_policy = PolicySpec::TwoPhase.build(&lib_inst, &config).unwrap();
    let buyer_model = BuyerModel::new(BuyerKind::FixedConfidence, 0.1).unwrap();
    let expected = run_episode(&lib_inst, lib_policy, buyer_model, 42).unwrap();

    unsafe {
        assert_eq!(rp_trace_len(trace), 4096);
        assert_eq!(rp_trace_total_revenue(trace), expected.total_revenue());
        assert_eq!(rp_trace_regret(trace), expected.regret());
        let mut round = std::mem::zeroed::<RpRound>();
        for (k, r) in expected.records.iter().enumerate().step_by(97) {
            assert_eq!(rp_trace_round(trace, k, &mut round), RpStatus::Ok);
            assert_eq!(round.t, r.t);
            assert_eq!(round.price, r.price);
            assert_eq!(round.type_index, r.type_index);
            assert_eq!(round.bought, r.bought);
            assert_eq!(round.revenue, r.revenue);
            match r.review {
                Some(v) => assert_eq!(round.review, v),
                None => assert!(round.review.is_nan()),
            }
        }
        assert_eq!(
            rp_trace_round(trace, 4096, &mut round),
            RpStatus::OutOfRange
        );
        assert!(last_error().contains("out of range"));
        rp_trace_free(trace);
        rp_instance_free(inst);
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        let mut out = ptr::null_mut();
        assert_eq!(
            rp_instance_from_toml(ptr::null(), &mut out),
            RpStatus::NullPointer
        );
        let bad =
            CString::new("d = 2\nhorizon_T = 10\ntheta = [0.5, 0.2]\nq = [0.5, 0.5]\n").unwrap();
        assert_ne!(rp_instance_from_toml(bad.as_ptr(), &mut out), RpStatus::Ok);
        assert!(out.is_null());
        assert_eq!(
            rp_instance_hard(100, 1, 0.1, &mut out),
            RpStatus::InvalidArgument
        );
        assert!(last_error().contains("d >= 2"));

        let inst = instance();
        let unknown = CString::new("greedy").unwrap();
        let buyer = CString::new("exact_lb").unwrap();
        let mut trace = ptr::null_mut();
        assert_eq!(
            rp_run_episode(
                inst,
                unknown.as_ptr(),
                buyer.as_ptr(),
                0.1,
                2.0,
                0.0,
                1,
                &mut trace
            ),
            RpStatus::Parse
        );
        assert!(trace.is_null());
        let mask = [true, false];
        let mut rev = 0.0;
        assert_eq!(
            rp_instance_rev(inst, 0.5, mask.as_ptr(), 2, &mut rev),
            RpStatus::OutOfRange
        );
        rp_instance_free(inst);

        assert_eq!(rp_instance_d(ptr::null()), 0);
        assert!(rp_trace_regret(ptr::null()).is_nan());
        rp_instance_free(ptr::null_mut());
        rp_trace_free(ptr::null_mut());
    }
}

#[test]
fn scalar_helpers() {
    let reviews = [1.0; 16]
        .iter()
        .chain(&[0.0; 4])
        .copied()
        .collect::<Vec<f64>>();
    let mut lb = 0.0;
    unsafe {
        assert_eq!(
            rp_compute_lb(reviews.as_ptr(), 20, 10, 0.05, &mut lb),
            RpStatus::Ok
        );
        // 0.8 - sqrt(ln(200) / 40)
        assert!((lb - 0.436_052_291_992_790_7).abs() < 1e-12);
        assert_eq!(rp_compute_lb(ptr::null(), 0, 1, 0.1, &mut lb), RpStatus::Ok);
        assert_eq!(lb, 0.0);
        assert_eq!(
            rp_compute_lb(reviews.as_ptr(), 20, 0, 0.1, &mut lb),
            RpStatus::InvalidArgument
        );
    }
    assert_eq!(rp_phase1_length(3, 100, 0.5, 32.0), 100);
    let q = rp_q_threshold(10_000, 3, 0.1);
    assert!((q - 0.038_611_668_223_171_53).abs() < 1e-12);
}

fn target_dir() -> PathBuf {
    // tests run from target/<profile>/deps
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_against_header() {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let lib_dir = target_dir();
    let archive = lib_dir.join("libreview_pricing_ffi.a");
    assert!(archive.exists(), "{} missing", archive.display());
    let out_dir = tempfile::tempdir().unwrap();
    let exe = out_dir.path().join("smoke");
    let compile = Command::new(std::env::var("CC").unwrap_or_else(|_| "cc".into()))
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(manifest.join("tests/c/smoke.c"))
        .arg(&archive)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .output()
        .expect("C compiler available");
    assert!(
        compile.status.success(),
        "{}",
        String::from_utf8_lossy(&compile.stderr)
    );
    let run = Command::new(&exe).output().unwrap();
    assert!(
        run.status.success(),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );
    let line = String::from_utf8(run.stdout).unwrap();
    let values: Vec<f64> = line
        .split_whitespace()
        .map(|v| v.parse().unwrap())
        .collect();
    assert_eq!(values.len(), 2);
    assert!(values[0] > 0.0);
}
