use super::*;
use crate::specfun::{try_integrate, QuadratureSettings};

fn cfg(xi_rel: f64, ac: f64, ad: f64) -> NetworkConfig {
    let mut c = NetworkConfig::default();
    c.mode.alpha_c = ac;
    c.mode.alpha_d = ad;
    c.mode.xi = c.mode.rho_d * xi_rel;
    c
}

/// Taylor coefficients `s^k M^(k) / k!` of the deficit `1 - M`.
fn scaled(m: &MgfValue) -> Vec<f64> {
    let mut w = 1.0;
    m.derivatives
        .iter()
        .enumerate()
        .map(|(k, v)| {
            if k == 0 {
                1.0 - v
            } else {
                w *= m.s / k as f64;
                -v * w
            }
        })
        .collect()
}

/// Deficits (1 - M) and their scaled derivatives must agree relative to the
/// largest coefficient, or to within 1e-12 absolute.
fn assert_deficit_close(a: &MgfValue, b: &MgfValue, rel: f64, what: &str) {
    let (x, y) = (scaled(a), scaled(b));
    assert_eq!(x.len(), y.len());
    let norm = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for k in 0..x.len() {
        assert!((x[k] - y[k]).abs() <= rel * norm + 1e-12, "{what}: order {k}: {:e} vs {:e}", x[k], y[k]);
    }
}

#[test]
fn bs_closed_form_matches_quadrature() {
    for &(xi, ac, ad) in &[(1.0, 4.0, 4.0), (0.1, 3.5, 4.0), (10.0, 3.0, 3.0), (1e-4, 4.0, 4.0), (1.0, 2.0, 4.0), (0.5, 3.0, 5.0)] {
        let c = cfg(xi, ac, ad);
        for &s in &[1e9, 1e11, 3e12] {
            let a = mgf_single_bs(s, 4, &c, MgfMethod::ClosedForm).unwrap();
            let b = mgf_single_bs(s, 4, &c, MgfMethod::Quadrature).unwrap();
            assert_deficit_close(&a, &b, 1e-7, &format!("xi {xi} ac {ac} ad {ad} s {s:e}"));
        }
    }
}

#[test]
fn bs_at_zero_gives_mean_interference() {
    let c = cfg(1.0, 4.0, 4.0);
    let m = mgf_single_bs(0.0, 1, &c, MgfMethod::ClosedForm).unwrap();
    assert_eq!(m.value(), 1.0);
    // E[I] = int f(r_d) int (2 r_c / R^2) rho r_d^4 r_c^-4 dr_c dr_d
    let set = QuadratureSettings::default();
    let r = c.geometry.cell_radius;
    let mean = try_integrate(
        |rd: f64| {
            let lo = c.admission_floor(rd);
            let inner = c.mode.rho_d * rd.powi(4) * (lo.powi(-2) - r.powi(-2)) / (r * r);
            Ok(inner * 2.0 * rd / (35.0 * 35.0))
        },
        &[0.0, c.effective_d2d_range()],
        &set,
    )
    .unwrap()
    .value;
    assert!((m.derivatives[1] + mean).abs() < 1e-8 * mean);
}

#[test]
fn drx_closed_form_matches_quadrature() {
    for &(xi, a) in &[(1.0, 4.0), (0.05, 4.0), (20.0, 4.0), (1.0, 2.0), (0.2, 2.0)] {
        let c = cfg(xi, a, a);
        for &d in &[0.0, 5.0, 35.0, 120.0, 499.0, 530.0] {
            for &s in &[1e8, 1e10, 1e12] {
                let x = mgf_single_drx(s, d, 4, &c, MgfMethod::ClosedForm).unwrap();
                let y = mgf_single_drx(s, d, 4, &c, MgfMethod::Quadrature).unwrap();
                assert_deficit_close(&x, &y, 1e-6, &format!("alpha {a} xi {xi} d {d} s {s:e}"));
            }
        }
    }
}

#[test]
fn drx_semi_closed_matches_quadrature() {
    for &(xi, ac) in &[(1.0, 3.5), (0.1, 3.0), (10.0, 2.5)] {
        let c = cfg(xi, ac, 4.0);
        for &d in &[0.0, 20.0, 250.0, 510.0] {
            for &s in &[1e9, 1e11] {
                let x = mgf_single_drx(s, d, 3, &c, MgfMethod::ClosedForm).unwrap();
                let y = mgf_single_drx(s, d, 3, &c, MgfMethod::Quadrature).unwrap();
                assert_deficit_close(&x, &y, 1e-6, &format!("ac {ac} xi {xi} d {d} s {s:e}"));
            }
        }
    }
}

#[test]
fn drx_direct_route_confirms_angular_closed_form() {
    for &(ac, ad) in &[(4.0, 4.0), (3.5, 4.0), (3.0, 3.0)] {
        let mut c = cfg(1.0, ac, ad);
        c.quadrature = QuadratureSettings { rel_tol: 1e-7, abs_tol: 1e-13, max_subdivisions: 2000 };
        let x = mgf_single_drx(1e10, 60.0, 1, &c, MgfMethod::Direct).unwrap();
        let y = mgf_single_drx(1e10, 60.0, 1, &c, MgfMethod::ClosedForm).unwrap();
        assert_deficit_close(&x, &y, 1e-5, &format!("ac {ac} ad {ad}"));
    }
}

#[test]
fn cue_closed_forms_match_quadrature() {
    for &(ac, ad) in &[(4.0, 4.0), (2.0, 2.0), (3.5, 4.0), (2.5, 3.0)] {
        let c = cfg(1.0, ac, ad);
        for &d in &[0.0, 10.0, 250.0, 500.0, 520.0] {
            for &s in &[1e9, 1e11, 1e13] {
                let x = mgf_cue_drx(s, d, 4, &c, MgfMethod::ClosedForm).unwrap();
                let y = mgf_cue_drx(s, d, 4, &c, MgfMethod::Quadrature).unwrap();
                assert_deficit_close(&x, &y, 1e-6, &format!("ac {ac} ad {ad} d {d} s {s:e}"));
            }
        }
    }
}

#[test]
fn cue_at_the_bs_is_a_single_exponential() {
    let c = cfg(1.0, 4.0, 4.0);
    let s = 3e10;
    let m = mgf_cue_drx(s, 0.0, 2, &c, MgfMethod::ClosedForm).unwrap();
    let a = s * c.mode.rho_bs;
    assert!((m.value() - 1.0 / (1.0 + a)).abs() < 1e-13);
    let d1 = -c.mode.rho_bs / (1.0 + a).powi(2);
    assert!((m.derivatives[1] - d1).abs() < 1e-10 * d1.abs());
}

#[test]
fn derivatives_match_finite_differences() {
    let c = cfg(0.3, 4.0, 4.0);
    let s = 2e10;
    let h = s * 1e-4;
    for target in [MgfTarget::AggregateBs, MgfTarget::AggregateDrx { d: 140.0 }, MgfTarget::CueDrx { d: 30.0 }] {
        let m = mgf(target, s, 2, &c, MgfMethod::ClosedForm).unwrap();
        let f = |x: f64, k: usize| mgf(target, x, 1, &c, MgfMethod::ClosedForm).unwrap().derivatives[k];
        let d1 = (f(s + h, 0) - f(s - h, 0)) / (2.0 * h);
        let d2 = (f(s + h, 1) - f(s - h, 1)) / (2.0 * h);
        assert!((m.derivatives[1] - d1).abs() < 1e-6 * d1.abs(), "{target:?}: {} vs {d1}", m.derivatives[1]);
        assert!((m.derivatives[2] - d2).abs() < 1e-3 * d2.abs(), "{target:?}: {} vs {d2}", m.derivatives[2]);
    }
}

#[test]
fn aggregates_follow_from_single_user_mgfs() {
    let c = cfg(1.0, 4.0, 4.0);
    let (s, d) = (1e11, 80.0);
    let n = c.mean_pdue_count();
    let single = mgf_single_bs(s, 0, &c, MgfMethod::ClosedForm).unwrap().value();
    let agg = mgf_agg_bs(s, 0, &c, MgfMethod::ClosedForm).unwrap().value();
    assert!((agg - (n * (single - 1.0)).exp()).abs() < 1e-14);
    let sd = mgf_single_drx(s, d, 0, &c, MgfMethod::ClosedForm).unwrap().value();
    let cue = mgf_cue_drx(s, d, 0, &c, MgfMethod::ClosedForm).unwrap().value();
    let agg = mgf_agg_drx(s, d, 0, &c, MgfMethod::ClosedForm).unwrap().value();
    assert!((agg - cue * (n * (sd - 1.0)).exp()).abs() < 1e-14);
}

#[test]
fn mgfs_are_monotone_and_bounded() {
    let c = cfg(1.0, 3.5, 4.0);
    let mut last = 1.0;
    for k in 0..12 {
        let s = 10f64.powi(k + 6);
        let v = mgf_agg_drx(s, 200.0, 0, &c, MgfMethod::ClosedForm).unwrap().value();
        assert!(v > 0.0 && v <= last + 1e-15, "s {s:e}");
        last = v;
    }
}

#[test]
fn rejected_inputs() {
    let c = NetworkConfig::default();
    assert_eq!(mgf_single_bs(1e10, 5, &c, MgfMethod::ClosedForm), Err(Error::UnsupportedOrder(5)));
    assert!(mgf_single_bs(-1.0, 0, &c, MgfMethod::ClosedForm).is_err());
    assert!(mgf_single_drx(1e10, 600.0, 0, &c, MgfMethod::ClosedForm).is_err());
    assert!(mgf_single_drx(0.0, 10.0, 1, &c, MgfMethod::ClosedForm).is_err());
    assert_eq!(mgf_single_drx(0.0, 10.0, 0, &c, MgfMethod::ClosedForm).unwrap().value(), 1.0);
}

#[test]
fn success_sum_is_the_truncated_series() {
    let m = MgfValue { s: 2.0, derivatives: vec![0.5, -0.1, 0.04] };
    let expect = 0.5 + 2.0 * 0.1 + 2.0 * 0.04;
    assert!((m.success_sum(3) - expect).abs() < 1e-15);
}
