//! Coefficient extraction and Atkin-Lehner images on the bundled orbits.

mod common;

use common::{max_dist, session};
use kleinian::kleinian::zeta_hat;
use kleinian::mockform::{
    al_l_value, atkin_lehner_matrix, eichler_vector, fourier_extract, zhat_v, MockFormSession, SessionConfig, Target,
    DEFAULT_Y0,
};
use kleinian::newforms::load_orbit;
use kleinian::numerics::{Cx, Rational};
use kleinian::par::Execution;
use kleinian::periods::GroupElement;

#[test]
fn scalar_table_is_the_sum_of_component_tables() {
    let s = session("23.2.a.a", 30);
    let total = fourier_extract(&s, Target::Scalar, 5, DEFAULT_Y0).unwrap();
    let a = fourier_extract(&s, Target::Mero(0), 5, DEFAULT_Y0).unwrap();
    let b = fourier_extract(&s, Target::Mero(1), 5, DEFAULT_Y0).unwrap();
    for n in -1..=5 {
        let sum = a.value(n).unwrap() + b.value(n).unwrap();
        assert!(sum.dist(total.value(n).unwrap()).to_f64() < 1e-25, "n = {n}");
    }
}

#[test]
fn recognized_rationals_survive_doubling_the_digits() {
    let s = session("27.2.a.a", 40);
    let lo = fourier_extract(&s, Target::Scalar, 17, DEFAULT_Y0).unwrap();
    let hi = fourier_extract(&s.with_digits(80).unwrap(), Target::Scalar, 17, DEFAULT_Y0).unwrap();
    assert!(!lo.recognized().is_empty());
    assert_eq!(lo.recognized(), hi.recognized());
    assert_eq!(hi.get(8).unwrap().rational, Some(Rational::new(1407, 4)));
}

#[test]
fn sequential_and_parallel_extraction_agree_exactly() {
    let orbit = load_orbit("27.2.a.a").unwrap();
    let mut cfg = SessionConfig::new(30);
    cfg.execution = Execution::Sequential;
    let seq = MockFormSession::build(&orbit, &cfg).unwrap();
    cfg.execution = Execution::Parallel;
    let par = MockFormSession::build(&orbit, &cfg).unwrap();
    let a = fourier_extract(&seq, Target::Scalar, 8, DEFAULT_Y0).unwrap();
    let b = fourier_extract(&par, Target::Scalar, 8, DEFAULT_Y0).unwrap();
    assert_eq!(a.to_json(), b.to_json());
}

#[test]
fn trivial_atkin_lehner_shift_vanishes() {
    let s = session("23.2.a.a", 30);
    assert!(al_l_value(1, &s).unwrap().iter().all(Cx::is_zero));
}

#[test]
fn atkin_lehner_image_is_zhat_at_w_tau() {
    let s = session("23.2.a.a", 40);
    let w = atkin_lehner_matrix(23, 23).unwrap();
    let lambda = s.source.al_sign(23).unwrap() as i64;
    let l = al_l_value(23, &s).unwrap();
    // zhat_V(W sigma) = zeta_hat(lambda (E(sigma) - L))
    for (x, y) in [(0.1, 0.3), (-0.35, 0.22), (0.4, 0.5)] {
        let sigma = s.ctx.cx(x, y);
        let e = eichler_vector(&sigma, &s).unwrap();
        let shifted: Vec<Cx> = e.iter().zip(&l).map(|(a, b)| (a - b).mul_i64(lambda)).collect();
        let lhs = zeta_hat(&shifted, &s.kctx, &s.ctx).unwrap();
        let p = s.ctx.bits();
        let num = &(&sigma.mul_i64(w[0]) + &Cx::from_i64(p, w[1]));
        let den = &(&sigma.mul_i64(w[2]) + &Cx::from_i64(p, w[3]));
        let rhs = zhat_v(&(num / den), &s).unwrap();
        assert!(max_dist(&lhs, &rhs) < 1e-28, "sigma = {sigma}");
    }
}

#[test]
fn atkin_lehner_matrix_normalizes_gamma0() {
    let w = atkin_lehner_matrix(23, 23).unwrap();
    let (a, b, c, d) = (w[0], w[1], w[2], w[3]);
    assert_eq!(a * d - b * c, 23);
    // W gamma W^{-1} stays in Gamma_0(23) for a generator gamma
    let g = GroupElement::new(1, 1, 23, 24).unwrap();
    let m = [a * g.a + b * g.c, a * g.b + b * g.d, c * g.a + d * g.c, c * g.b + d * g.d];
    let winv_c = -c;
    let lower = m[2] * d + m[3] * winv_c;
    assert_eq!(lower % (23 * 23), 0);
}

#[test]
fn nonpositive_height_is_rejected() {
    let s = session("27.2.a.a", 30);
    assert!(fourier_extract(&s, Target::Scalar, 4, 0.0).is_err());
}
