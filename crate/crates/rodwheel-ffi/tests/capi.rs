//! Exercises the C ABI: status codes, handle lifecycle, and a real C
//! program compiled against the generated header and linked to the cdylib.

use std::ffi::CStr;
use std::path::PathBuf;
use std::ptr;

use rodwheel_ffi::*;

const FREE_START: [f64; 10] = [4.0, 0.0, 0.0, 0.3, 0.0, -0.5, 6.0, -3.0, 0.0, 0.0];

#[test]
fn version_is_a_c_string() {
    let v = unsafe { CStr::from_ptr(rw_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn model_rejects_nonpositive_parameters() {
    assert!(rw_model_new(0.0, 9.81, 1.0, 1.0, 2.0, false).is_null());
    assert!(rw_model_new(5.0, 9.81, -1.0, 1.0, 2.0, false).is_null());
    let m = rw_model_new(5.0, 9.81, 1.0, 1.0, 2.0, false);
    assert!(!m.is_null());
    unsafe { rw_model_free(m) };
}

#[test]
fn forward_dynamics_matches_constraints_and_null_checks() {
    let model = rw_model_default();
    let mut xdot = [0.0; 10];
    let status = unsafe {
        rw_forward_dynamics(model, FREE_START.as_ptr(), 0.0, xdot.as_mut_ptr())
    };
    assert_eq!(status, RwStatus::Ok);
    assert!((xdot[0] - (-3.0 * 0.3f64.cos())).abs() <= 1e-14);
    assert!((xdot[1] + 6.0).abs() <= 1e-14);

    let status = unsafe { rw_forward_dynamics(ptr::null(), FREE_START.as_ptr(), 0.0, xdot.as_mut_ptr()) };
    assert_eq!(status, RwStatus::NullPointer);
    let status = unsafe { rw_forward_dynamics(model, FREE_START.as_ptr(), f64::NAN, xdot.as_mut_ptr()) };
    assert_eq!(status, RwStatus::InvalidArgument);

    // Flat wheel: singular mass matrix.
    let mut flat = FREE_START;
    flat[3] = std::f64::consts::FRAC_PI_2;
    let status = unsafe { rw_forward_dynamics(model, flat.as_ptr(), 0.0, xdot.as_mut_ptr()) };
    assert_eq!(status, RwStatus::SingularMass);

    unsafe { rw_model_free(model) };
}

#[test]
fn energy_and_reaction_roundtrip() {
    let model = rw_model_default();
    let rest = [4.0, 0.0, 0.0, 0.0, 0.0, std::f64::consts::PI, 0.0, 0.0, 0.0, 0.0];
    let mut e = 0.0;
    assert_eq!(
        unsafe { rw_total_energy(model, rest.as_ptr(), &mut e) },
        RwStatus::Ok
    );
    assert!((e - 39.24).abs() <= 1e-10);

    let upright = [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0];
    let mut lambda = [1.0; 2];
    assert_eq!(
        unsafe { rw_ground_reaction(model, upright.as_ptr(), 0.0, lambda.as_mut_ptr()) },
        RwStatus::Ok
    );
    assert!(lambda[0].abs() <= 1e-9 && lambda[1].abs() <= 1e-9);
    unsafe { rw_model_free(model) };
}

#[test]
fn control_torque_all_kinds() {
    let rod_down = [0.0, 0.0, 0.0, 0.0, 0.0, std::f64::consts::PI, 0.0, 0.0, 0.0, 0.0];
    let mut u = 0.0;
    assert_eq!(
        unsafe { rw_control_torque(RwControllerKind::None, ptr::null(), rod_down.as_ptr(), &mut u) },
        RwStatus::Ok
    );
    assert_eq!(u, 0.0);

    assert_eq!(
        unsafe { rw_control_torque(RwControllerKind::Case1, ptr::null(), rod_down.as_ptr(), &mut u) },
        RwStatus::Ok
    );
    assert!((u - 43.551).abs() <= 1e-3);

    // Custom without gains is a null-pointer error.
    assert_eq!(
        unsafe { rw_control_torque(RwControllerKind::Custom, ptr::null(), rod_down.as_ptr(), &mut u) },
        RwStatus::NullPointer
    );
    let gains = RwGains {
        k_p: 20.0,
        k_d: 20.0,
        k_theta: 0.0,
        amplitude: 1.0,
        v_ref: 2.0,
    };
    assert_eq!(
        unsafe { rw_control_torque(RwControllerKind::Custom, &gains, rod_down.as_ptr(), &mut u) },
        RwStatus::Ok
    );
    assert!((u - 43.551).abs() <= 1e-3);
}

#[test]
fn rk2_step_validates_dt() {
    let model = rw_model_default();
    let mut next = [0.0; 10];
    assert_eq!(
        unsafe { rw_rk2_step(model, FREE_START.as_ptr(), 0.0, 0.0, next.as_mut_ptr()) },
        RwStatus::InvalidArgument
    );
    assert_eq!(
        unsafe { rw_rk2_step(model, FREE_START.as_ptr(), 0.0, 0.001, next.as_mut_ptr()) },
        RwStatus::Ok
    );
    assert!(next.iter().all(|v| v.is_finite()));
    unsafe { rw_model_free(model) };
}

#[test]
fn simulate_trajectory_lifecycle() {
    // Legacy potential: the reference free-rolling run completes 8 s.
    let model = rw_model_new(5.0, 9.81, 1.0, 1.0, 2.0, true);
    let mut traj: *mut RwTrajectory = ptr::null_mut();
    let status = unsafe {
        rw_simulate(
            model,
            FREE_START.as_ptr(),
            RwControllerKind::None,
            ptr::null(),
            0.01,
            8.0,
            &mut traj,
        )
    };
    assert_eq!(status, RwStatus::Ok);
    assert!(!traj.is_null());
    assert_eq!(unsafe { rw_trajectory_len(traj) }, 801);
    assert!(!unsafe { rw_trajectory_fell(traj) });

    let mut t = -1.0;
    let mut state = [0.0; 10];
    let mut u = 0.0;
    let mut e = 0.0;
    let mut lambda = [0.0; 2];
    assert_eq!(
        unsafe {
            rw_trajectory_sample(
                traj,
                0,
                &mut t,
                state.as_mut_ptr(),
                &mut u,
                &mut e,
                lambda.as_mut_ptr(),
            )
        },
        RwStatus::Ok
    );
    assert_eq!(t, 0.0);
    assert_eq!(state, FREE_START);
    assert_eq!(u, 0.0);
    assert!(e.is_finite());

    assert_eq!(
        unsafe { rw_trajectory_sample(traj, 801, &mut t, ptr::null_mut(), ptr::null_mut(), ptr::null_mut(), ptr::null_mut()) },
        RwStatus::InvalidArgument
    );
    let mut t_fall = 0.0;
    assert_eq!(
        unsafe { rw_trajectory_fall_time(traj, &mut t_fall) },
        RwStatus::InvalidArgument
    );
    unsafe { rw_trajectory_free(traj) };
    unsafe { rw_model_free(model) };
}

#[test]
fn simulate_reports_falls_through_the_handle() {
    let model = rw_model_new(5.0, 9.81, 1.0, 1.0, 2.0, true);
    let mut x0 = [0.0; 10];
    x0[0] = 4.0;
    x0[3] = 2e-12;
    x0[5] = std::f64::consts::PI;
    let mut traj: *mut RwTrajectory = ptr::null_mut();
    let status = unsafe {
        rw_simulate(
            model,
            x0.as_ptr(),
            RwControllerKind::Case1,
            ptr::null(),
            0.01,
            30.0,
            &mut traj,
        )
    };
    assert_eq!(status, RwStatus::Ok);
    assert!(unsafe { rw_trajectory_fell(traj) });
    let mut t_fall = 0.0;
    assert_eq!(unsafe { rw_trajectory_fall_time(traj, &mut t_fall) }, RwStatus::Ok);
    assert!(t_fall > 0.0 && t_fall <= 30.0);
    unsafe { rw_trajectory_free(traj) };
    unsafe { rw_model_free(model) };
}

/// Compile and run a small C program against the generated header and the
/// cdylib, proving the shipped artifacts bind from plain C.
#[test]
fn c_program_links_and_runs() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let include_dir = manifest.join("include");
    let target_dir = std::env::var("CARGO_TARGET_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|_| manifest.join("../../target"));
    let lib_dir = target_dir.join("debug");
    if !lib_dir.join("librodwheel_ffi.so").exists() {
        panic!("cdylib not found at {}", lib_dir.display());
    }

    let dir = tempfile::TempDir::new().unwrap();
    let src = dir.path().join("smoke.c");
    std::fs::write(
        &src,
        r#"
#include <stdio.h>
#include <math.h>
#include "rodwheel.h"

int main(void) {
    struct RwModel *model = rw_model_new(5.0, 9.81, 1.0, 1.0, 2.0, true);
    if (!model) return 1;

    double x0[10] = {4.0, 0.0, 0.0, 0.3, 0.0, -0.5, 6.0, -3.0, 0.0, 0.0};
    double xdot[10];
    if (rw_forward_dynamics(model, x0, 0.0, xdot) != RW_STATUS_OK) return 2;
    if (fabs(xdot[1] + 6.0) > 1e-12) return 3;

    RwTrajectory *traj = NULL;
    if (rw_simulate(model, x0, RW_CONTROLLER_KIND_CASE2, NULL, 0.01, 8.0, &traj) != RW_STATUS_OK)
        return 4;
    if (rw_trajectory_fell(traj)) return 5;
    size_t n = rw_trajectory_len(traj);
    double t, e;
    if (rw_trajectory_sample(traj, n - 1, &t, NULL, NULL, &e, NULL) != RW_STATUS_OK) return 6;
    printf("final t=%.2f E=%.3f n=%zu version=%s\n", t, e, n, rw_version());

    rw_trajectory_free(traj);
    rw_model_free(model);
    return 0;
}
"#,
    )
    .unwrap();

    let exe = dir.path().join("smoke");
    let compile = std::process::Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(&include_dir)
        .arg("-L")
        .arg(&lib_dir)
        .arg("-lrodwheel_ffi")
        .arg("-lm")
        .arg(format!("-Wl,-rpath,{}", lib_dir.display()))
        .arg("-o")
        .arg(&exe)
        .output()
        .expect("cc available");
    assert!(
        compile.status.success(),
        "compile failed: {}",
        String::from_utf8_lossy(&compile.stderr)
    );

    let run = std::process::Command::new(&exe).output().unwrap();
    assert!(
        run.status.success(),
        "smoke test exited {:?}: {}",
        run.status.code(),
        String::from_utf8_lossy(&run.stdout)
    );
    let stdout = String::from_utf8_lossy(&run.stdout);
    assert!(stdout.contains("n=801"), "{stdout}");
}
