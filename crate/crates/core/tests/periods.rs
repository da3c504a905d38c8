//! Period lattices of the bundled orbits.

mod common;

use common::session;
use kleinian::numerics::PrecisionContext;
use kleinian::periods::{compute_period_data, BasisMode, HomologyFixture};

#[test]
fn period_matrices_lie_in_siegel_space() {
    for label in ["27.2.a.a", "23.2.a.a", "256.2.a.e"] {
        let s = session(label, 30);
        let om = &s.periods.big_omega;
        assert!(om.symmetry_defect().to_f64() < 1e-25, "{label}");
        let ctx = PrecisionContext::new(30).unwrap();
        assert!(om.im().is_hermitian_positive_definite(&ctx), "{label}");
        assert!(s.periods.p_matrix.hermitian_defect().to_f64() < 1e-25, "{label}");
    }
}

#[test]
fn level_256_period_matrix_is_purely_imaginary() {
    let s = session("256.2.a.e", 30);
    let h = std::f64::consts::SQRT_2 / 2.0;
    let want = [[2.0 * h, h], [h, h]];
    for i in 0..2 {
        for j in 0..2 {
            let z = &s.periods.big_omega[(i, j)];
            assert!(z.re.to_f64().abs() < 1e-25);
            assert!((z.im.to_f64() - want[i][j]).abs() < 1e-14);
        }
    }
}

#[test]
fn precision_change_moves_periods_by_less_than_the_coarser_epsilon() {
    let lo = session("23.2.a.a", 30);
    let hi = lo.with_digits(50).unwrap();
    let d = lo.periods.omega.max_abs_diff(&hi.periods.omega).to_f64();
    assert!(d < 1e-28, "{d:e}");
}

#[test]
fn auto_basis_recovers_the_level_23_polarization() {
    let ctx = PrecisionContext::new(30).unwrap();
    let orbit = kleinian::newforms::load_orbit("23.2.a.a").unwrap().embed(&ctx).unwrap();
    let auto = compute_period_data(&orbit, BasisMode::Auto, None, &ctx, Default::default()).unwrap();
    let fx = HomologyFixture::bundled("23.2.a.a").unwrap();
    let fixed = compute_period_data(&orbit, BasisMode::Fixture, Some(&fx), &ctx, Default::default()).unwrap();
    assert_eq!(auto.elementary_divisors, fixed.elementary_divisors);
    // P is a basis-independent invariant up to the integral symplectic change of basis; compare determinants
    let da = auto.p_matrix.det().abs().to_f64();
    let df = fixed.p_matrix.det().abs().to_f64();
    assert!((da - df).abs() / df < 1e-20, "{da} vs {df}");
}
