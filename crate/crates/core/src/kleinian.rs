//! Completed Kleinian zeta function, the reduced wp-matrix and sigma.
//!
//! Everything is expressed through the theta function
//! vartheta(u) = theta[char](omega^{-1} u; Omega), so the quasi-periods are only
//! needed for sigma and for the constant shift of wp.

use crate::error::{Error, Result};
use crate::numerics::{CMatrix, Cx, PrecisionContext};
use crate::periods::{pairing_matrix, PeriodData};
use crate::theta::{plan, theta_all, Characteristic, ThetaPlan, ThetaValue};
use rug::Float;

/// Lattice, theta plan and characteristic for evaluating the Kleinian functions.
#[derive(Clone, Debug)]
pub struct KleinianContext {
    pub omega: CMatrix,
    pub omega_prime: CMatrix,
    pub omega_inv: CMatrix,
    pub big_omega: CMatrix,
    /// (Im Omega)^{-1}.
    pub y_inv: CMatrix,
    pub p_matrix: CMatrix,
    /// (P^tr)^{-1} = (omega Y conj(omega)^tr)^{-1}.
    pub pt_inv: CMatrix,
    /// (omega Y omega^tr)^{-1}, the holomorphic half of the completion.
    pub hol_inv: CMatrix,
    pub characteristic: Characteristic,
    pub plan: ThetaPlan,
    pub eta: Option<CMatrix>,
    /// theta values below this fraction of the largest term count as zero.
    divisor_tol: f64,
}

impl KleinianContext {
    pub fn new(pd: &PeriodData, ch: Characteristic, eta: Option<CMatrix>, ctx: &PrecisionContext) -> Result<Self> {
        Self::from_periods(&pd.omega, &pd.omega_prime, ch, eta, ctx)
    }

    pub fn from_periods(
        omega: &CMatrix,
        omega_prime: &CMatrix,
        ch: Characteristic,
        eta: Option<CMatrix>,
        ctx: &PrecisionContext,
    ) -> Result<Self> {
        let g = omega.rows();
        if ch.genus() != g {
            return Err(Error::InvalidArgument(format!(
                "characteristic of genus {} for a lattice of genus {g}",
                ch.genus()
            )));
        }
        if let Some(e) = &eta {
            if e.rows() != g || e.cols() != g {
                return Err(Error::InvalidArgument("quasi-period matrix has the wrong shape".into()));
            }
        }
        let omega_inv = omega.inverse()?;
        let big_omega = omega_inv.mul(omega_prime);
        let plan = plan(&big_omega, ctx)?;
        let y = big_omega.im();
        let y_inv = y.inverse()?;
        let p_matrix = pairing_matrix(omega, omega_prime, ctx)?;
        let pt_inv = p_matrix.transpose().inverse()?;
        let hol_inv = omega.mul(&y).mul(&omega.transpose()).inverse()?;
        Ok(KleinianContext {
            omega: omega.clone(),
            omega_prime: omega_prime.clone(),
            omega_inv,
            big_omega,
            y_inv,
            p_matrix,
            pt_inv,
            hol_inv,
            characteristic: ch,
            plan,
            eta,
            divisor_tol: 10f64.powf(-(ctx.digits() as f64) / 2.0),
        })
    }

    pub fn genus(&self) -> usize {
        self.omega.rows()
    }

    /// Lattice vector omega m + omega' n.
    pub fn lattice_vector(&self, m: &[i64], n: &[i64]) -> Vec<Cx> {
        let p = self.omega.prec();
        let mv: Vec<Cx> = m.iter().map(|&k| Cx::from_i64(p, k)).collect();
        let nv: Vec<Cx> = n.iter().map(|&k| Cx::from_i64(p, k)).collect();
        let a = self.omega.mul_vec(&mv);
        let b = self.omega_prime.mul_vec(&nv);
        a.iter().zip(&b).map(|(x, y)| x + y).collect()
    }

    fn theta_at(&self, u: &[Cx], order: u8) -> Result<(Vec<Cx>, ThetaValue)> {
        if u.len() != self.genus() {
            return Err(Error::InvalidArgument("argument has the wrong dimension".into()));
        }
        let v = self.omega_inv.mul_vec(u);
        let tv = theta_all(&v, &self.characteristic, &self.plan, order)?;
        let rel = tv.relative_size();
        if rel < self.divisor_tol {
            return Err(Error::NearThetaDivisor(rel));
        }
        Ok((v, tv))
    }
}

fn real_row(v: &[Cx]) -> Vec<Cx> {
    v.iter().map(|z| Cx::from_real(z.im.clone())).collect()
}

/// Row vector (1/vartheta) grad_u vartheta, the quasi-periodic part of zeta.
pub fn theta_quotient(u: &[Cx], k: &KleinianContext) -> Result<Vec<Cx>> {
    let (_, tv) = k.theta_at(u, 1)?;
    Ok(quotient_row(&tv, k))
}

fn quotient_row(tv: &ThetaValue, k: &KleinianContext) -> Vec<Cx> {
    let inv = tv.value.recip();
    let lg: Vec<Cx> = tv.grad.iter().map(|x| x * &inv).collect();
    CMatrix::vec_mul(&lg, &k.omega_inv)
}

/// Real-linear completion 2 pi i Im(omega^{-1} u)^tr (Im Omega)^{-1} omega^{-1}.
pub fn completion(u: &[Cx], k: &KleinianContext, ctx: &PrecisionContext) -> Vec<Cx> {
    let v = k.omega_inv.mul_vec(u);
    completion_from_v(&v, k, ctx)
}

fn completion_from_v(v: &[Cx], k: &KleinianContext, ctx: &PrecisionContext) -> Vec<Cx> {
    let row = CMatrix::vec_mul(&real_row(v), &k.y_inv);
    let row = CMatrix::vec_mul(&row, &k.omega_inv);
    let tpi = ctx.two_pi_i();
    row.iter().map(|z| z * &tpi).collect()
}

/// The same completion split as pi u^tr (omega Y omega^tr)^{-1} - pi conj(u)^tr (P^tr)^{-1}.
pub fn completion_split(u: &[Cx], k: &KleinianContext, ctx: &PrecisionContext) -> Vec<Cx> {
    let pi = ctx.pi();
    let a = CMatrix::vec_mul(u, &k.hol_inv);
    let ubar: Vec<Cx> = u.iter().map(Cx::conj).collect();
    let b = CMatrix::vec_mul(&ubar, &k.pt_inv);
    a.iter().zip(&b).map(|(x, y)| (x - y).mul_real(&pi)).collect()
}

/// Completed zeta: lattice invariant, real-analytic away from the theta divisor.
pub fn zeta_hat(u: &[Cx], k: &KleinianContext, ctx: &PrecisionContext) -> Result<Vec<Cx>> {
    let (v, tv) = k.theta_at(u, 1)?;
    let q = quotient_row(&tv, k);
    let c = completion_from_v(&v, k, ctx);
    Ok(q.iter().zip(&c).map(|(a, b)| a + b).collect())
}

/// Holomorphic part of zeta_hat: zeta_hat(u) + pi conj(u)^tr (P^tr)^{-1}.
pub fn zeta_mero(u: &[Cx], k: &KleinianContext, ctx: &PrecisionContext) -> Result<Vec<Cx>> {
    let z = zeta_hat(u, k, ctx)?;
    let pi = ctx.pi();
    let ubar: Vec<Cx> = u.iter().map(Cx::conj).collect();
    let corr = CMatrix::vec_mul(&ubar, &k.pt_inv);
    Ok(z.iter().zip(&corr).map(|(a, b)| a + &b.mul_real(&pi)).collect())
}

/// -omega^{-tr} Hess(log theta) omega^{-1}, minus sym(omega^{-1} eta) when eta is known.
pub fn wp_reduced(u: &[Cx], k: &KleinianContext, _ctx: &PrecisionContext) -> Result<CMatrix> {
    let (_, tv) = k.theta_at(u, 2)?;
    let g = k.genus();
    let h = tv.hess.as_ref().expect("order 2 requested");
    let inv = tv.value.recip();
    let lg: Vec<Cx> = tv.grad.iter().map(|x| x * &inv).collect();
    let lh = CMatrix::from_fn(g, g, |i, j| &(&h[(i, j)] * &inv) - &(&lg[i] * &lg[j]));
    let mut wp = k.omega_inv.transpose().mul(&lh).mul(&k.omega_inv).neg();
    if let Some(eta) = &k.eta {
        let a = k.omega_inv.mul(eta);
        let half = Cx::from_f64(a.prec(), 0.5, 0.0);
        wp = wp.sub(&a.add(&a.transpose()).scale(&half));
    }
    Ok(wp)
}

/// exp(u^tr omega^{-1} eta u / 2) vartheta(u).
pub fn sigma(u: &[Cx], k: &KleinianContext, _ctx: &PrecisionContext) -> Result<Cx> {
    let eta = k.eta.as_ref().ok_or(Error::MissingQuasiPeriods)?;
    if u.len() != k.genus() {
        return Err(Error::InvalidArgument("argument has the wrong dimension".into()));
    }
    let v = k.omega_inv.mul_vec(u);
    let th = theta_all(&v, &k.characteristic, &k.plan, 0)?.value;
    let a = k.omega_inv.mul(eta);
    let au = a.mul_vec(u);
    let mut quad = Cx::zero(th.prec());
    for (x, y) in u.iter().zip(&au) {
        quad.add_mul(x, y);
    }
    let half = Float::with_val(th.prec(), 0.5);
    Ok(&quad.mul_real(&half).exp() * &th)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Rational;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(30).unwrap()
    }

    fn genus2(c: &PrecisionContext) -> KleinianContext {
        let p = c.bits();
        let omega = CMatrix::from_rows(vec![
            vec![Cx::from_f64(p, 1.1, 0.2), Cx::from_f64(p, 0.3, -0.1)],
            vec![Cx::from_f64(p, -0.2, 0.4), Cx::from_f64(p, 0.9, 0.1)],
        ]);
        let big = CMatrix::from_rows(vec![
            vec![Cx::from_f64(p, 0.2, 1.1), Cx::from_f64(p, -0.3, 0.25)],
            vec![Cx::from_f64(p, -0.3, 0.25), Cx::from_f64(p, 0.1, 0.9)],
        ]);
        let ch = Characteristic::new(vec![Rational::HALF, Rational::ZERO], vec![Rational::HALF, Rational::HALF]).unwrap();
        KleinianContext::from_periods(&omega, &omega.mul(&big), ch, None, c).unwrap()
    }

    fn small(v: &[Cx], tol: f64) -> bool {
        v.iter().all(|z| z.abs_f64() < tol)
    }

    #[test]
    fn completion_forms_agree() {
        let c = ctx();
        let k = genus2(&c);
        let u = vec![c.cx(0.3, -0.7), c.cx(-1.2, 0.4)];
        let a = completion(&u, &k, &c);
        let b = completion_split(&u, &k, &c);
        let d: Vec<Cx> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
        assert!(small(&d, 1e-25));
    }

    #[test]
    fn zeta_hat_is_lattice_invariant_and_odd() {
        let c = ctx();
        let k = genus2(&c);
        let u = vec![c.cx(0.31, -0.17), c.cx(-0.12, 0.24)];
        let z0 = zeta_hat(&u, &k, &c).unwrap();
        let l = k.lattice_vector(&[1, -2], &[2, 1]);
        let shifted: Vec<Cx> = u.iter().zip(&l).map(|(a, b)| a + b).collect();
        let z1 = zeta_hat(&shifted, &k, &c).unwrap();
        let d: Vec<Cx> = z0.iter().zip(&z1).map(|(x, y)| x - y).collect();
        assert!(small(&d, 1e-20), "{d:?}");
        let neg: Vec<Cx> = u.iter().map(|z| -z).collect();
        let zn = zeta_hat(&neg, &k, &c).unwrap();
        let s: Vec<Cx> = z0.iter().zip(&zn).map(|(x, y)| x + y).collect();
        assert!(small(&s, 1e-20));
    }

    #[test]
    fn wp_is_symmetric_and_periodic() {
        let c = ctx();
        let k = genus2(&c);
        let u = vec![c.cx(0.21, 0.13), c.cx(-0.4, 0.05)];
        let w = wp_reduced(&u, &k, &c).unwrap();
        assert!(w.symmetry_defect().to_f64() < 1e-20);
        let l = k.lattice_vector(&[0, 1], &[-1, 1]);
        let shifted: Vec<Cx> = u.iter().zip(&l).map(|(a, b)| a + b).collect();
        let w1 = wp_reduced(&shifted, &k, &c).unwrap();
        assert!(w.max_abs_diff(&w1).to_f64() < 1e-20);
    }

    #[test]
    fn divisor_and_missing_eta_are_reported() {
        let c = ctx();
        let k = genus2(&c);
        let zero = vec![c.zero(), c.zero()];
        assert!(matches!(zeta_hat(&zero, &k, &c), Err(Error::NearThetaDivisor(_))));
        assert!(matches!(sigma(&zero, &k, &c), Err(Error::MissingQuasiPeriods)));
    }

    #[test]
    fn mero_part_is_holomorphic_in_u() {
        let c = ctx();
        let k = genus2(&c);
        let u = vec![c.cx(0.3, 0.1), c.cx(-0.2, 0.35)];
        let h = c.float(1e-8);
        // d/d(conj u_1) = (d/dx + i d/dy)/2 along the first coordinate
        let at = |dx: f64, dy: f64| {
            let mut w = u.clone();
            w[0] = &w[0] + &c.cx(dx, dy);
            zeta_mero(&w, &k, &c).unwrap()
        };
        let h64 = h.to_f64();
        let (xp, xm, yp, ym) = (at(h64, 0.0), at(-h64, 0.0), at(0.0, h64), at(0.0, -h64));
        for j in 0..2 {
            let dx = &xp[j] - &xm[j];
            let dy = (&yp[j] - &ym[j]).mul_i();
            let dbar = (&dx + &dy).abs_f64() / (4.0 * h64);
            assert!(dbar < 1e-7, "component {j}: {dbar}");
        }
    }
}
