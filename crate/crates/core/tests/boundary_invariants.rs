use std::f64::consts::TAU;

use karpelevic::boundary::{
    endpoint_slope, implicit_residual, rho_at, sample_arc, sample_interval, verify_phi, Angle,
    ArcEnd,
};
use karpelevic::farey::{arcs_of_order, ArcId};

fn sign_changes(arc: ArcId, theta: f64) -> usize {
    let grid = 10_000;
    let mut prev = implicit_residual(arc, theta, 2.0 / grid as f64).unwrap();
    let mut count = 0;
    for i in 2..=grid {
        let mu = 2.0 * i as f64 / grid as f64;
        let v = implicit_residual(arc, theta, mu).unwrap();
        if v != 0.0 && prev != 0.0 && v.signum() != prev.signum() {
            count += 1;
        }
        if v != 0.0 {
            prev = v;
        }
    }
    count
}

#[test]
fn unique_root_on_test_arcs() {
    let arcs = [(14, 3, 14), (15, 3, 14), (8, 7, 8), (8, 4, 7), (6, 5, 6), (10, 1, 10), (16, 3, 14)];
    for (n, q, s) in arcs {
        let arc = ArcId::new(n, q, s).unwrap();
        for p in sample_arc(arc, 9).unwrap().iter().skip(1).take(7) {
            assert_eq!(sign_changes(arc, p.theta), 1, "{arc} θ = {}", p.theta);
        }
    }
}

#[test]
fn symmetric_about_real_axis() {
    for n in [3, 5, 8, 14, 20] {
        for k in 1..200 {
            let theta = TAU * k as f64 / 400.0 + 1e-3;
            let a = rho_at(n, Angle::Radians(theta)).unwrap();
            let b = rho_at(n, Angle::Radians(TAU - theta)).unwrap();
            assert!((a.rho - b.rho).abs() < 1e-10, "n = {n}, θ = {theta}");
        }
    }
}

#[test]
fn phi_vanishes_on_samples() {
    for n in 2..=30 {
        for arc in arcs_of_order(n).unwrap() {
            for conjugate in [false, true] {
                for p in sample_interval(arc, 12, conjugate).unwrap() {
                    let r = verify_phi(&p);
                    assert!(r < 1e-9, "{arc} θ = {} residual {r:e}", p.theta);
                }
            }
        }
    }
}

#[test]
fn interior_radius_below_one_and_endpoints_on_circle() {
    for n in 3..=20 {
        for arc in arcs_of_order(n).unwrap() {
            let pts = sample_arc(arc, 16).unwrap();
            assert!((pts[0].rho - 1.0).abs() < 1e-10);
            assert!((pts[15].rho - 1.0).abs() < 1e-10);
            for p in &pts[1..15] {
                assert!(p.rho < 1.0 && p.rho > 0.0, "{arc} {p:?}");
                assert!((0.0..=1.0).contains(&p.alpha));
            }
        }
    }
}

#[test]
fn samples_refine_continuously() {
    let arc = ArcId::new(14, 3, 14).unwrap();
    let jump = |count| {
        let pts = sample_arc(arc, count).unwrap();
        pts.windows(2).map(|w| (w[1].rho - w[0].rho).abs()).fold(0.0, f64::max)
    };
    let coarse = jump(20);
    let fine = jump(200);
    assert!(fine < coarse / 5.0, "{coarse} vs {fine}");
}

#[test]
fn slopes_match_finite_differences() {
    let h = 1e-5;
    for n in 2..=20 {
        for arc in arcs_of_order(n).unwrap() {
            let pts = sample_arc(arc, 2).unwrap();
            let (lo, hi) = (pts[0].theta, pts[1].theta);
            let at_q = endpoint_slope(arc, ArcEnd::AtQ);
            if at_q.is_finite() {
                let fd = (rho_at(n, Angle::Radians(lo + h)).unwrap().rho - 1.0) / h;
                assert!((fd - at_q).abs() < 1e-3, "{arc} q end: {fd} vs {at_q}");
            }
            let at_s = endpoint_slope(arc, ArcEnd::AtS);
            if at_s.is_finite() {
                let fd = (1.0 - rho_at(n, Angle::Radians(hi - h)).unwrap().rho) / h;
                assert!((fd - at_s).abs() < 1e-3, "{arc} s end: {fd} vs {at_s}");
            }
        }
    }
}
