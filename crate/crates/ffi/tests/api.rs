use std::ffi::{CStr, CString};
use std::ptr;

use riccati2d_ffi::*;

fn dom() -> R2dDomain {
    R2dDomain {
        x_min: -1.0,
        x_max: 1.0,
        y_min: -1.0,
        y_max: 1.0,
        nx: 21,
        ny: 21,
    }
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(r2d_last_error_message()) }
        .to_string_lossy()
        .into_owned()
}

fn scalar(expr: &str) -> *mut R2dScalarField {
    let e = CString::new(expr).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { r2d_scalar_parse(e.as_ptr(), &dom(), &mut out) },
        R2dStatus::Ok
    );
    out
}

#[test]
fn darboux_partner_matches_closed_form() {
    let (nu, u, f) = (scalar("1"), scalar("exp(0.6*x + 0.8*y)"), scalar("exp(x)"));
    let mut v = ptr::null_mut();
    unsafe {
        assert_eq!(r2d_darboux_v_from_u(nu, u, f, &mut v), R2dStatus::Ok);
        for (x, y) in [(0.3, -0.2), (-0.7, 0.9)] {
            let mut got = 0.0;
            assert_eq!(r2d_scalar_eval(v, x, y, &mut got), R2dStatus::Ok);
            let want = -0.5 * (0.6 * x + 0.8 * y).exp() + 0.5 * (-x).exp();
            assert!((got - want).abs() < 1e-10, "{got} vs {want}");
        }
        for h in [nu, u, f, v] {
            r2d_scalar_free(h);
        }
    }
}

#[test]
fn grid_handles_and_residuals() {
    let d = dom();
    let values: Vec<f64> = (0..d.ny)
        .flat_map(|j| (0..d.nx).map(move |i| (i, j)))
        .map(|(i, j)| {
            let x = -1.0 + 0.1 * i as f64;
            let y = -1.0 + 0.1 * j as f64;
            (0.6 * x + 0.8 * y).exp()
        })
        .collect();
    let mut u = ptr::null_mut();
    unsafe {
        assert_eq!(
            r2d_scalar_from_grid(&d, values.as_ptr(), values.len(), &mut u),
            R2dStatus::Ok
        );
        let nu = scalar("1");
        let mut r = 0.0;
        assert_eq!(r2d_schrodinger_residual_max(nu, u, &mut r), R2dStatus::Ok);
        assert!(r > 0.0 && r < 0.05, "{r}");
        assert_eq!(
            r2d_scalar_from_grid(&d, values.as_ptr(), values.len() - 1, &mut u),
            R2dStatus::InvalidArgument
        );
        r2d_scalar_free(u);
        r2d_scalar_free(nu);
    }
}

#[test]
fn errors_map_to_status_codes() {
    let mut out = ptr::null_mut();
    let bad = CString::new("exp(").unwrap();
    assert_eq!(
        unsafe { r2d_scalar_parse(bad.as_ptr(), &dom(), &mut out) },
        R2dStatus::Parse
    );
    assert!(out.is_null());
    assert!(last_error().contains("parse error"));

    let nu = scalar("1");
    let zero = scalar("x");
    let mut q = ptr::null_mut();
    assert_eq!(
        unsafe { r2d_log_derivative(nu, zero, &mut q) },
        R2dStatus::Vanishing
    );
    assert_eq!(
        unsafe { r2d_log_derivative(nu, ptr::null(), &mut q) },
        R2dStatus::InvalidArgument
    );
    assert!(last_error().contains("null"));

    let flat = R2dDomain { nx: 2, ..dom() };
    let one = CString::new("1").unwrap();
    assert_eq!(
        unsafe { r2d_scalar_parse(one.as_ptr(), &flat, &mut out) },
        R2dStatus::Domain
    );
    unsafe {
        r2d_scalar_free(nu);
        r2d_scalar_free(zero);
        r2d_scalar_free(ptr::null_mut());
    }
    // success clears the message
    unsafe { r2d_scalar_free(scalar("2")) };
    assert_eq!(last_error(), "");
}

#[test]
fn verify_reports_and_classifies() {
    let run = |cfg: &str| {
        let c = CString::new(cfg).unwrap();
        let mut json = ptr::null_mut();
        let s = unsafe { r2d_verify(c.as_ptr(), &mut json) };
        let text = (!json.is_null()).then(|| {
            unsafe { CStr::from_ptr(json) }
                .to_string_lossy()
                .into_owned()
        });
        unsafe { r2d_string_free(json) };
        (s, text)
    };
    let (s, text) = run("case = euler1\ndomain = -1 1 -1 1\n");
    assert_eq!(s, R2dStatus::Ok);
    assert!(text.unwrap().contains("euler1-vekua"));
    let (s, text) =
        run("case = cauchy-riccati\ndomain = -1 1 -1 1\ncontour = polyline 0 0 1 1 4\n");
    assert_eq!(s, R2dStatus::IdentityFailed);
    assert!(text.unwrap().contains("contour not closed"));
    let (s, text) = run("case = picard\n");
    assert_eq!(s, R2dStatus::Config);
    assert!(text.is_none());
    assert!(last_error().contains("domain"));
}
