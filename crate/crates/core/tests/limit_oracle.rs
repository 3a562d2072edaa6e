mod common;

use num_complex::Complex64;
use oddwalk::jacobi::jacobi_limit;
use oddwalk::qclt::{q0_limit, qm_limit, qm_limit_closed, qm_limit_quadrature, stieltjes_limit, LimitMeasure};
use oddwalk::spectral::stieltjes_cf;
use oddwalk::walk::linspace;

fn quadrature_q(m: usize, t: f64) -> Complex64 {
    // orthonormal P_m for ω = 1, 1, 2, 2, ...
    let (p, norm) = match m {
        0 => (Box::new(|_: f64| 1.0) as Box<dyn Fn(f64) -> f64>, 1.0),
        1 => (Box::new(|x: f64| x) as Box<dyn Fn(f64) -> f64>, 1.0),
        2 => (Box::new(|x: f64| x * x - 1.0) as Box<dyn Fn(f64) -> f64>, 1.0),
        3 => (Box::new(|x: f64| x * x * x - 2.0 * x) as Box<dyn Fn(f64) -> f64>, 2f64.sqrt()),
        _ => unreachable!(),
    };
    common::integrate_limit_density(|x| Complex64::new(0.0, -x * t).exp() * p(x)) / norm
}

#[test]
fn q0_at_two_and_small_t() {
    assert!((q0_limit(2.0) - common::limit_fourier(2.0)).norm() < 1e-10);
    assert!((q0_limit(1e-3).re - (1.0 - 5e-7)).abs() < 1e-12);
    assert!(q0_limit(50.0).norm() < 1e-2);
}

#[test]
fn closed_forms_match_independent_quadrature() {
    for m in 0..=3 {
        for t in linspace(0.0, 10.0, 41) {
            let gap = (qm_limit_closed(m, t).unwrap() - quadrature_q(m, t)).norm();
            assert!(gap < 1e-10, "m = {m}, t = {t}, gap {gap:e}");
        }
    }
}

#[test]
fn gauss_rule_matches_closed_forms() {
    for m in 0..=3 {
        for t in linspace(0.0, 10.0, 101) {
            let gap = (qm_limit_quadrature(m, t).unwrap() - qm_limit_closed(m, t).unwrap()).norm();
            assert!(gap < 1e-10, "m = {m}, t = {t}");
        }
    }
    assert!(qm_limit(5, 0.0).unwrap().norm() < 1e-14);
}

#[test]
fn conservation_over_sixty_strata() {
    let total: f64 = (0..=60).map(|m| qm_limit(m, 1.0).unwrap().norm_sqr()).sum();
    assert!((total - 1.0).abs() < 1e-8);
}

#[test]
fn limit_stieltjes_transform() {
    let z = Complex64::i();
    let oracle = common::integrate_limit_density(|x| 1.0 / (z - x));
    let cf = stieltjes_cf(&jacobi_limit(400).unwrap(), z, 400).unwrap();
    assert!((cf - oracle).norm() < 1e-8, "{cf} vs {oracle}");
    assert!((stieltjes_limit(z, 500).unwrap() - oracle).norm() < 1e-6);
    let w = Complex64::new(1.0, 1.0);
    assert!((stieltjes_limit(-w, 200).unwrap() + stieltjes_limit(w, 200).unwrap()).norm() < 1e-12);
    let big = Complex64::new(0.0, 1e6);
    assert!((big * stieltjes_limit(big, 50).unwrap() - 1.0).norm() < 1e-5);
}

#[test]
fn even_moments_are_factorials() {
    let lm = LimitMeasure::new(40).unwrap();
    let mut fact = 1.0;
    for j in 0..=6 {
        if j > 0 {
            fact *= f64::from(j);
        }
        assert!((lm.moment(2 * j) - fact).abs() < 1e-9 * fact, "j = {j}");
        assert!(lm.moment(2 * j + 1).abs() < 1e-9 * fact);
    }
    let mass = common::integrate(|x| x.abs() * (-x * x).exp(), -8.0, 8.0, 1e-15);
    assert!((mass - 1.0).abs() < 1e-12);
}
