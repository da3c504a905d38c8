//! Genus-1 Kleinian functions against the Weierstrass functions of the same lattice.

mod common;

use common::{random_point, session, Weierstrass};
use kleinian::kleinian::{sigma, wp_reduced, zeta_hat, zeta_mero, KleinianContext};
use kleinian::numerics::{CMatrix, Cx};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn level27() -> (kleinian::mockform::MockFormSession, Weierstrass) {
    let s = session("27.2.a.a", 40);
    let w = Weierstrass::new(&s.kctx.omega[(0, 0)], &s.kctx.omega_prime[(0, 0)], 40);
    (s, w)
}

#[test]
fn zeta_hat_matches_completed_weierstrass_zeta() {
    let (s, w) = level27();
    let mut rng = ChaCha8Rng::seed_from_u64(27);
    for _ in 0..3 {
        let u = random_point(&s.ctx, &mut rng);
        let ours = zeta_hat(&[u.clone()], &s.kctx, &s.ctx).unwrap();
        let err = ours[0].dist(&w.zeta_completed(&u)).to_f64();
        assert!(err < 1e-20, "u = {u}: {err:e}");
    }
}

#[test]
fn oracle_zeta_is_quasi_periodic() {
    let (s, w) = level27();
    let u = s.ctx.cx(0.31, -0.17);
    let shifted = &u + &w.omega;
    let jump = &w.zeta(&shifted) - &w.zeta(&u);
    assert!(jump.dist(&w.eta).to_f64() < 1e-30);
}

#[test]
fn meromorphic_part_differs_from_zeta_by_a_linear_term() {
    let (s, w) = level27();
    // zeta_mero(u) - zeta(u) = c u for one constant c
    let pts = [s.ctx.cx(0.2, 0.1), s.ctx.cx(-0.4, 0.35), s.ctx.cx(0.05, -0.6)];
    let ratios: Vec<Cx> = pts
        .iter()
        .map(|u| {
            let m = zeta_mero(&[u.clone()], &s.kctx, &s.ctx).unwrap();
            &(&m[0] - &w.zeta(u)) / u
        })
        .collect();
    for r in &ratios[1..] {
        assert!(r.dist(&ratios[0]).to_f64() < 1e-25);
    }
}

fn with_eta(s: &kleinian::mockform::MockFormSession, w: &Weierstrass) -> KleinianContext {
    let eta = CMatrix::from_rows(vec![vec![w.eta.clone()]]);
    KleinianContext::from_periods(&s.kctx.omega, &s.kctx.omega_prime, s.kctx.characteristic.clone(), Some(eta), &s.ctx)
        .unwrap()
}

#[test]
fn sigma_is_a_constant_multiple_of_weierstrass_sigma() {
    let (s, w) = level27();
    let k = with_eta(&s, &w);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let ratios: Vec<Cx> = (0..4)
        .map(|_| {
            let u = random_point(&s.ctx, &mut rng);
            &sigma(&[u.clone()], &k, &s.ctx).unwrap() / &w.sigma(&u)
        })
        .collect();
    for r in &ratios[1..] {
        assert!(r.dist(&ratios[0]).to_f64() / ratios[0].abs_f64() < 1e-25);
    }
}

#[test]
fn wp_matches_weierstrass_wp_when_eta_is_known() {
    let (s, w) = level27();
    let k = with_eta(&s, &w);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..3 {
        let u = random_point(&s.ctx, &mut rng);
        let ours = wp_reduced(&[u.clone()], &k, &s.ctx).unwrap();
        let want = w.wp(&u);
        assert!(ours[(0, 0)].dist(&want).to_f64() / want.abs_f64().max(1.0) < 1e-20);
    }
}
