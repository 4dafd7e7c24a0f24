use std::sync::Arc;

use hardy_core::norms::lp_norm_radial;
use hardy_core::operators::{apply_conjugate, apply_hardy_avg, apply_hardy_multi};
use hardy_core::radialfn::RadialFunction;
use hardy_core::weights::WeightSpec;
use hardy_core::Result;

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn radii() -> Vec<f64> {
    (0..20).map(|i| 0.05 * 1.3f64.powi(i)).collect()
}

type Op = fn(&WeightSpec, &RadialFunction) -> Result<RadialFunction>;

fn hardy(_: &WeightSpec, f: &RadialFunction) -> Result<RadialFunction> {
    apply_hardy_multi(f)
}

#[test]
fn operators_are_linear() {
    let w = WeightSpec::beta(2.0, 3.0).unwrap();
    let (a, b) = (1.7, -0.4);
    let ops: [(&str, Op); 3] = [("U", apply_hardy_avg), ("V", apply_conjugate), ("H", hardy)];
    for d in [1, 3] {
        let f = RadialFunction::gaussian(d).unwrap();
        let g = RadialFunction::bump(d).unwrap();
        let mix = f.scaled(a).sum(&g.scaled(b)).unwrap();
        for (name, op) in ops {
            let (tf, tg, tm) = (op(&w, &f).unwrap(), op(&w, &g).unwrap(), op(&w, &mix).unwrap());
            for r in radii() {
                let want = a * tf.eval(r).unwrap() + b * tg.eval(r).unwrap();
                let got = tm.eval(r).unwrap();
                let scale = a.abs() * tf.eval(r).unwrap().abs() + b.abs() * tg.eval(r).unwrap().abs();
                assert!((got - want).abs() <= 1e-9 * scale + 1e-300, "{name} d={d} r={r}: {got} vs {want}");
            }
        }
    }
}

#[test]
fn image_metadata() {
    let w = WeightSpec::beta(2.0, 3.0).unwrap();
    let f = RadialFunction::power_tail(2, -1.5).unwrap();
    let u = apply_hardy_avg(&w, &f).unwrap();
    assert_eq!(u.exponent_at_infinity(), -1.5);
    let h = apply_hardy_multi(&RadialFunction::bump(2).unwrap()).unwrap();
    // the ball average of a compactly supported f decays like r^{-d}
    assert_eq!(h.exponent_at_infinity(), -2.0);
    let v = apply_conjugate(&w, &RadialFunction::bump(2).unwrap()).unwrap();
    assert_eq!(v.support_ceiling(), 1.0);
}

// 30-digit mpmath value of |U_φ e^{-r²}|_2 on R, φ = t(1-t)²
#[test]
fn frozen_average_norm() {
    let w = WeightSpec::beta(2.0, 3.0).unwrap();
    let u = apply_hardy_avg(&w, &RadialFunction::gaussian(1).unwrap()).unwrap();
    let n = lp_norm_radial(&u, 2.0).unwrap();
    assert!(rel(n.value, 0.155_100_192_473_362_1) < 1e-9, "{}", n.value);
}

#[test]
fn constant_weight_on_indicator() {
    // U 1_B = min(1, 1/r) in d = 1, so |U 1_B|_3 = 3^{1/3}
    let w = WeightSpec::constant(1.0).unwrap();
    let u = apply_hardy_avg(&w, &RadialFunction::indicator_ball(1).unwrap()).unwrap();
    for r in [0.3, 1.0, 2.0, 17.0] {
        assert!(rel(u.eval(r).unwrap(), 1.0f64.min(1.0 / r)) < 1e-10);
    }
    assert!(rel(lp_norm_radial(&u, 3.0).unwrap().value, 3f64.cbrt()) < 1e-9);
}

#[test]
fn log_tail_matches_radius_domain() {
    // φ ~ t^{-0.6} at 0 leaves an r^{-0.4} tail in the image: |.|^3 decays like r^{-1.2}
    let w = WeightSpec::beta(0.4, 2.0).unwrap();
    for f in [RadialFunction::gaussian(1).unwrap(), RadialFunction::power_tail(1, -2.0).unwrap()] {
        let u = apply_hardy_avg(&w, &f).unwrap();
        assert!(u.log_tail().is_some());
        let g = u.clone();
        let copy = RadialFunction::new(1, "copy", Arc::new(move |r| g.eval(r)), u.meta().clone()).unwrap();
        assert!(copy.log_tail().is_none());
        let (a, b) = (lp_norm_radial(&u, 3.0).unwrap(), lp_norm_radial(&copy, 3.0).unwrap());
        assert!(rel(a.value, b.value) < 1e-7, "{}: {} vs {}", f.label(), a.value, b.value);
    }
}
