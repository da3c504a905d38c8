//! Riemann theta functions with characteristics, their gradients and Hessians.

use crate::error::{Error, Result};
use crate::numerics::{cholesky, CMatrix, Cx, PrecisionContext, Rational};
use rug::Float;
use serde::{Deserialize, Serialize};

/// Characteristic [alpha; beta] in Q^g x Q^g.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Characteristic {
    pub alpha: Vec<Rational>,
    pub beta: Vec<Rational>,
}

impl Characteristic {
    pub fn new(alpha: Vec<Rational>, beta: Vec<Rational>) -> Result<Self> {
        if alpha.len() != beta.len() || alpha.is_empty() {
            return Err(Error::InvalidArgument("characteristic halves have different lengths".into()));
        }
        Ok(Characteristic { alpha, beta })
    }

    pub fn genus(&self) -> usize {
        self.alpha.len()
    }

    /// Parses "a1,a2;b1,b2".
    pub fn parse(s: &str) -> Result<Self> {
        let (a, b) = s.split_once(';').ok_or_else(|| Error::Parse(format!("characteristic {s:?} needs ';'")))?;
        let half = |t: &str| t.split(',').map(Rational::parse).collect::<Result<Vec<_>>>();
        Characteristic::new(half(a)?, half(b)?)
    }

    pub fn is_half_integral(&self) -> bool {
        self.alpha.iter().chain(&self.beta).all(|q| q.den() <= 2)
    }

    /// True for an odd half-integral characteristic (4 alpha.beta odd).
    pub fn is_odd(&self) -> bool {
        let s: i128 = self
            .alpha
            .iter()
            .zip(&self.beta)
            .map(|(a, b)| (a.num() * 2 / a.den()) * (b.num() * 2 / b.den()))
            .sum();
        self.is_half_integral() && s.rem_euclid(2) == 1
    }

    /// All 4^g characteristics with entries in {0, 1/2}.
    pub fn all_half_integral(g: usize) -> Vec<Characteristic> {
        (0..1usize << (2 * g))
            .map(|code| {
                let bit = |k: usize| if code >> k & 1 == 1 { Rational::HALF } else { Rational::ZERO };
                Characteristic { alpha: (0..g).map(bit).collect(), beta: (g..2 * g).map(bit).collect() }
            })
            .collect()
    }
}

impl std::fmt::Display for Characteristic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let j = |v: &[Rational]| v.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "{};{}", j(&self.alpha), j(&self.beta))
    }
}

/// Precomputed data for summing theta series with period matrix Omega.
#[derive(Clone, Debug)]
pub struct ThetaPlan {
    pub omega: CMatrix,
    /// Im Omega and its inverse, f64, for locating the lattice-point ellipsoid.
    y: Vec<Vec<f64>>,
    y_inv: Vec<Vec<f64>>,
    /// Fincke-Pohst coefficients from the Cholesky factor of Im Omega.
    fp_diag: Vec<f64>,
    fp_off: Vec<Vec<f64>>,
    /// Terms are summed over the ellipsoid Q(m + alpha + c) <= bound.
    pub bound: f64,
    bits: u32,
    digits: u32,
}

impl ThetaPlan {
    pub fn genus(&self) -> usize {
        self.y.len()
    }

    /// Ellipsoid radius sqrt(bound) in the Im Omega metric.
    pub fn radius(&self) -> f64 {
        self.bound.sqrt()
    }

    pub fn prec(&self) -> u32 {
        self.bits
    }

    fn enumerate(&self, shift: &[f64], bound: f64, mut visit: impl FnMut(&[i64])) {
        // points x = m + shift with x^T Y x <= bound
        let g = self.genus();
        let mut m = vec![0i64; g];
        fn rec(
            plan: &ThetaPlan,
            k: usize,
            rem: f64,
            shift: &[f64],
            m: &mut Vec<i64>,
            visit: &mut dyn FnMut(&[i64]),
        ) {
            let g = plan.genus();
            let mut center = shift[k];
            for j in k + 1..g {
                center += plan.fp_off[k][j] * (m[j] as f64 + shift[j]);
            }
            let w = (rem.max(0.0) / plan.fp_diag[k]).sqrt();
            let lo = (-center - w).ceil() as i64;
            let hi = (-center + w).floor() as i64;
            for mk in lo..=hi {
                m[k] = mk;
                let t = mk as f64 + center;
                let r = rem - plan.fp_diag[k] * t * t;
                if r < -1e-9 {
                    continue;
                }
                if k == 0 {
                    visit(m);
                } else {
                    rec(plan, k - 1, r, shift, m, visit);
                }
            }
        }
        rec(self, g - 1, bound, shift, &mut m, &mut visit);
    }

    /// sum over the shell bound < Q <= outer of exp(-pi Q) (1 + 2 pi |x|)^2.
    fn shell_weight(&self, shift: &[f64], inner: f64, outer: f64) -> f64 {
        let mut s = 0.0;
        self.enumerate(shift, outer, |m| {
            let x: Vec<f64> = m.iter().zip(shift).map(|(&a, b)| a as f64 + b).collect();
            let q = quad(&self.y, &x);
            if q > inner {
                let nrm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                s += (-std::f64::consts::PI * q).exp() * (1.0 + 2.0 * std::f64::consts::PI * nrm).powi(2);
            }
        });
        s
    }
}

fn quad(y: &[Vec<f64>], x: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..x.len() {
        for j in 0..x.len() {
            s += x[i] * y[i][j] * x[j];
        }
    }
    s
}

fn inv_f64(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.iter().cloned().collect();
    let mut inv: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect()).collect();
    for c in 0..n {
        let p = (c..n).max_by(|&x, &y| m[x][c].abs().total_cmp(&m[y][c].abs())).unwrap_or(c);
        m.swap(c, p);
        inv.swap(c, p);
        let d = m[c][c];
        for j in 0..n {
            m[c][j] /= d;
            inv[c][j] /= d;
        }
        for r in 0..n {
            if r != c {
                let f = m[r][c];
                for j in 0..n {
                    m[r][j] -= f * m[c][j];
                    inv[r][j] -= f * inv[c][j];
                }
            }
        }
    }
    inv
}

/// Builds the summation plan for Omega, choosing the ellipsoid so that the
/// discarded terms are below 10^-(D+4) relative to the largest term.
pub fn plan(omega: &CMatrix, ctx: &PrecisionContext) -> Result<ThetaPlan> {
    let g = omega.rows();
    if g == 0 || omega.cols() != g {
        return Err(Error::InvalidArgument("period matrix must be square".into()));
    }
    let tol = Float::with_val(ctx.bits(), &omega.max_abs() * ctx.check_eps());
    if omega.symmetry_defect() > tol {
        return Err(Error::InvalidArgument("period matrix is not symmetric".into()));
    }
    let l = cholesky(&omega.im(), ctx)?;
    let y = omega.im().re_f64();
    let y_inv = inv_f64(&y);
    // Q(x) = sum_k d_k (x_k + sum_{j>k} o_kj x_j)^2 from Y = R^T R with R upper
    // triangular, R = L^T.
    let lf = l.re_f64();
    let mut fp_diag = vec![0.0; g];
    let mut fp_off = vec![vec![0.0; g]; g];
    for k in 0..g {
        let rkk = lf[k][k];
        fp_diag[k] = rkk * rkk;
        for j in k + 1..g {
            fp_off[k][j] = lf[j][k] / rkk;
        }
    }
    let lam_min = {
        // smallest eigenvalue bound via the Cholesky diagonal and the inverse norm
        let inv_norm: f64 = y_inv.iter().map(|r| r.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max);
        1.0 / inv_norm
    };
    let target = (ctx.digits() as f64 + 4.0) * std::f64::consts::LN_10;
    let trace: f64 = (0..g).map(|i| y[i][i]).sum();
    let det: f64 = fp_diag.iter().product();
    let unit_ball = std::f64::consts::PI.powf(g as f64 / 2.0) / gamma_half(g);
    let log_tail = |b: f64| -> f64 {
        // crude union bound over unit shells beyond b
        let mut total = f64::NEG_INFINITY;
        let mut k = b;
        loop {
            let count = unit_ball * ((k + 1.0).sqrt() + trace.sqrt()).powi(g as i32) / det.sqrt();
            let poly = (1.0 + 2.0 * std::f64::consts::PI * ((k + 1.0) / lam_min).sqrt()).powi(2);
            let term = count.ln() + poly.ln() - std::f64::consts::PI * k;
            total = log_add(total, term);
            if term < total - 40.0 {
                break;
            }
            k += 1.0;
        }
        total
    };
    let mut bound = target / std::f64::consts::PI;
    while log_tail(bound) > -target {
        bound += 0.25;
    }
    let mut p = ThetaPlan { omega: omega.clone(), y, y_inv, fp_diag, fp_off, bound, bits: ctx.bits(), digits: ctx.digits() };
    // empirical check: the next shell must already be negligible
    let shifts: Vec<Vec<f64>> = vec![vec![0.0; g], vec![0.5; g], (0..g).map(|i| 0.25 + 0.1 * i as f64).collect()];
    for _ in 0..50 {
        let outer = (p.bound.sqrt() + 1.0).powi(2);
        let worst = shifts.iter().map(|s| p.shell_weight(s, p.bound, outer)).fold(0.0, f64::max);
        if worst.ln() < -target {
            break;
        }
        p.bound = outer;
    }
    Ok(p)
}

fn gamma_half(g: usize) -> f64 {
    // Gamma(g/2 + 1)
    let mut v = if g % 2 == 0 { 1.0 } else { std::f64::consts::PI.sqrt() / 2.0 };
    let mut k = if g % 2 == 0 { 1.0 } else { 1.5 };
    while k <= g as f64 / 2.0 + 1e-9 {
        v *= k;
        k += 1.0;
    }
    v
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// Theta value with first and (optionally) second derivatives.
#[derive(Clone, Debug)]
pub struct ThetaValue {
    pub value: Cx,
    pub grad: Vec<Cx>,
    pub hess: Option<CMatrix>,
    /// Largest single term magnitude; |value| / max_term measures cancellation.
    pub max_term: Float,
}

impl ThetaValue {
    /// |theta| relative to its largest term.
    pub fn relative_size(&self) -> f64 {
        if self.max_term.is_zero() {
            return 0.0;
        }
        Float::with_val(53, self.value.abs() / &self.max_term).to_f64()
    }
}

/// Theta series and derivatives up to `order` (0, 1 or 2) at u.
pub fn theta_all(u: &[Cx], ch: &Characteristic, plan: &ThetaPlan, order: u8) -> Result<ThetaValue> {
    let g = plan.genus();
    if u.len() != g || ch.genus() != g {
        return Err(Error::InvalidArgument("dimension mismatch in theta evaluation".into()));
    }
    let p = plan.bits;
    let alpha_f: Vec<f64> = ch.alpha.iter().map(Rational::to_f64).collect();
    let im_u: Vec<f64> = u.iter().map(|z| z.im.to_f64()).collect();
    // c = Y^{-1} Im u; the dominant terms sit at m + alpha near -c
    let c: Vec<f64> = (0..g).map(|i| (0..g).map(|j| plan.y_inv[i][j] * im_u[j]).sum()).collect();
    let shift: Vec<f64> = (0..g).map(|i| alpha_f[i] + c[i]).collect();
    let alpha: Vec<Float> = ch.alpha.iter().map(|q| q.to_float(p)).collect();
    let ub: Vec<Cx> = u.iter().zip(&ch.beta).map(|(z, b)| &z.with_prec(p) + &Cx::from_real(b.to_float(p))).collect();
    let half_omega = plan.omega.scale(&Cx::from_f64(p, 0.5, 0.0));
    let mut value = Cx::zero(p);
    let mut grad = vec![Cx::zero(p); g];
    let mut hess = if order >= 2 { Some(CMatrix::zeros(g, g, p)) } else { None };
    let mut max_term = Float::new(p);
    let mut points: Vec<Vec<i64>> = Vec::new();
    plan.enumerate(&shift, plan.bound, |m| points.push(m.to_vec()));
    let two_pi_i = {
        let mut c = Cx::zero(p);
        c.im = Float::with_val(p, rug::float::Constant::Pi) * 2u32;
        c
    };
    for m in &points {
        let n: Vec<Float> = m.iter().zip(&alpha).map(|(&mi, a)| Float::with_val(p, a + mi)).collect();
        let mut z = Cx::zero(p);
        for i in 0..g {
            z += &ub[i].mul_real(&n[i]);
            let mut row = Cx::zero(p);
            for j in 0..g {
                row += &half_omega[(i, j)].mul_real(&n[j]);
            }
            z += &row.mul_real(&n[i]);
        }
        let term = (&z * &two_pi_i).exp();
        let a = term.abs();
        if a > max_term {
            max_term = a;
        }
        if order >= 1 {
            let t1 = &term * &two_pi_i;
            let scaled: Vec<Cx> = n.iter().map(|ni| t1.mul_real(ni)).collect();
            for i in 0..g {
                grad[i] += &scaled[i];
            }
            if let Some(h) = hess.as_mut() {
                for i in 0..g {
                    let si = &scaled[i] * &two_pi_i;
                    for j in 0..g {
                        h[(i, j)] += &si.mul_real(&n[j]);
                    }
                }
            }
        }
        value += &term;
    }
    let _ = plan.digits;
    Ok(ThetaValue { value, grad, hess, max_term })
}

pub fn theta(u: &[Cx], ch: &Characteristic, plan: &ThetaPlan) -> Result<Cx> {
    Ok(theta_all(u, ch, plan, 0)?.value)
}

pub fn theta_gradient(u: &[Cx], ch: &Characteristic, plan: &ThetaPlan) -> Result<Vec<Cx>> {
    Ok(theta_all(u, ch, plan, 1)?.grad)
}

/// Hessian of log theta: H/theta - grad grad^T / theta^2.
pub fn log_theta_hessian(u: &[Cx], ch: &Characteristic, plan: &ThetaPlan) -> Result<CMatrix> {
    let tv = theta_all(u, ch, plan, 2)?;
    let g = plan.genus();
    let h = tv.hess.expect("order 2 requested");
    let inv = tv.value.recip();
    let lg: Vec<Cx> = tv.grad.iter().map(|x| x * &inv).collect();
    Ok(CMatrix::from_fn(g, g, |i, j| &(&h[(i, j)] * &inv) - &(&lg[i] * &lg[j])))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(40).unwrap()
    }

    fn zero_char(g: usize) -> Characteristic {
        Characteristic { alpha: vec![Rational::ZERO; g], beta: vec![Rational::ZERO; g] }
    }

    #[test]
    fn radius_for_identity_at_forty_digits() {
        let c = ctx();
        let omega = CMatrix::identity(2, c.bits()).scale(&Cx::i(c.bits()));
        let p = plan(&omega, &c).unwrap();
        // exp(-pi R^2) must reach 10^-44 with polynomial headroom
        assert!(p.radius() > 5.6 && p.radius() < 7.5, "radius {}", p.radius());
    }

    #[test]
    fn theta_at_origin_matches_box_sum() {
        let c = ctx();
        let omega = CMatrix::identity(2, c.bits()).scale(&Cx::i(c.bits()));
        let p = plan(&omega, &c).unwrap();
        let v = theta(&[c.zero(), c.zero()], &zero_char(2), &p).unwrap();
        let big = PrecisionContext::new(80).unwrap();
        let mut one_d = Float::new(big.bits());
        for n in -50i64..=50 {
            let e = Float::with_val(big.bits(), -(n * n)) * big.pi();
            one_d += e.exp();
        }
        let expect = Float::with_val(big.bits(), &one_d * &one_d);
        let err = Float::with_val(big.bits(), &v.re - &expect).abs();
        assert!(err < Float::with_val(64, c.eps() * 100u32));
        assert!(v.im.clone().abs() < *c.eps());
    }

    #[test]
    fn odd_characteristic_vanishes_at_zero() {
        let c = ctx();
        let omega = CMatrix::from_rows(vec![
            vec![c.cx(0.1, 1.0), c.cx(0.2, 0.3)],
            vec![c.cx(0.2, 0.3), c.cx(-0.4, 0.9)],
        ]);
        let p = plan(&omega, &c).unwrap();
        for ch in Characteristic::all_half_integral(2) {
            let v = theta(&[c.zero(), c.zero()], &ch, &p).unwrap();
            if ch.is_odd() {
                assert!(v.abs() < *c.check_eps(), "{ch}");
            }
        }
        assert_eq!(Characteristic::all_half_integral(2).iter().filter(|c| c.is_odd()).count(), 6);
    }

    #[test]
    fn gradient_matches_central_differences() {
        let c = ctx();
        let omega = CMatrix::from_rows(vec![
            vec![c.cx(0.1, 1.0), c.cx(0.2, 0.3)],
            vec![c.cx(0.2, 0.3), c.cx(-0.4, 0.9)],
        ]);
        let p = plan(&omega, &c).unwrap();
        let ch = Characteristic::parse("1/2,0;1/2,1/2").unwrap();
        let u = vec![c.cx(0.13, 0.07), c.cx(-0.21, 0.11)];
        let tv = theta_all(&u, &ch, &p, 2).unwrap();
        let h = c.pow10(-20);
        for k in 0..2 {
            let mut up = u.clone();
            let mut dn = u.clone();
            up[k].re += &h;
            dn[k].re -= &h;
            let num = &(&theta(&up, &ch, &p).unwrap() - &theta(&dn, &ch, &p).unwrap()) / &Cx::from_real(Float::with_val(c.bits(), &h * 2u32));
            let rel = Float::with_val(c.bits(), num.dist(&tv.grad[k]) / tv.grad[k].abs());
            assert!(rel < c.pow10(-16));
            let gu = theta_gradient(&up, &ch, &p).unwrap();
            let gd = theta_gradient(&dn, &ch, &p).unwrap();
            let hess = tv.hess.as_ref().unwrap();
            for j in 0..2 {
                let num = &(&gu[j] - &gd[j]) / &Cx::from_real(Float::with_val(c.bits(), &h * 2u32));
                let rel = Float::with_val(c.bits(), num.dist(&hess[(j, k)]) / hess[(j, k)].abs());
                assert!(rel < c.pow10(-16));
            }
        }
    }

    #[test]
    fn rejects_non_positive_imaginary_part() {
        let c = ctx();
        let omega = CMatrix::from_rows(vec![vec![c.cx(0.0, 1.0), c.cx(0.0, 2.0)], vec![c.cx(0.0, 2.0), c.cx(0.0, 1.0)]]);
        assert!(matches!(plan(&omega, &c), Err(Error::NotPositiveDefinite)));
    }
}
