//! Numerical verification of the harmonic Maass form properties: the xi_0
//! image, the hyperbolic Laplacian, lattice and modular invariance.

use crate::error::{Error, Result};
use crate::kleinian::{theta_quotient, zeta_hat, KleinianContext};
use crate::mockform::{mero_part, zhat_v, MockFormSession};
use crate::newforms::evaluate;
use crate::numerics::{float_to_string, CMatrix, Cx, PrecisionContext};
use crate::par::{self, Execution};
use crate::periods::GroupElement;
use crate::theta::theta;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::Float;
use serde_json::json;

/// Default step for the xi_0 central differences.
pub const DEFAULT_XI_STEP: f64 = 1e-8;
/// Default step for the Laplacian stencil.
pub const DEFAULT_LAPLACE_STEP: f64 = 1e-5;

fn shifted(tau: &Cx, dx: &Float, dy: &Float) -> Cx {
    Cx::new(Float::with_val(tau.prec(), &tau.re + dx), Float::with_val(tau.prec(), &tau.im + dy))
}

/// -2i conj(dF/d tau-bar) by central differences, for vector-valued F.
pub fn xi0_fd<F>(f: &F, tau: &Cx, h: &Float) -> Result<Vec<Cx>>
where
    F: Fn(&Cx) -> Result<Vec<Cx>>,
{
    let p = tau.prec();
    let zero = Float::new(p);
    let mh = Float::with_val(p, -h);
    let xp = f(&shifted(tau, h, &zero))?;
    let xm = f(&shifted(tau, &mh, &zero))?;
    let yp = f(&shifted(tau, &zero, h))?;
    let ym = f(&shifted(tau, &zero, &mh))?;
    let four_h = Float::with_val(p, h * 4u32);
    Ok((0..xp.len())
        .map(|j| {
            // d/d tau-bar = (d/dx + i d/dy) / 2
            let dx = &xp[j] - &xm[j];
            let dy = (&yp[j] - &ym[j]).mul_i();
            let dbar = (&dx + &dy).mul_real(&Float::with_val(p, four_h.recip_ref()));
            // -2i conj(z)
            dbar.conj().mul_i().mul_i64(-2)
        })
        .collect())
}

/// xi_0 of zhat_V at tau.
pub fn xi0_image(tau: &Cx, s: &MockFormSession, h: f64) -> Result<Vec<Cx>> {
    xi0_fd(&|t: &Cx| zhat_v(t, s), tau, &s.ctx.float(h))
}

/// Largest |Delta_0 F| over the components, with the isotropic 9-point stencil
/// and Delta_0 = -y^2 (d_xx + d_yy).
pub fn laplacian_fd<F>(f: &F, tau: &Cx, h: &Float) -> Result<f64>
where
    F: Fn(&Cx) -> Result<Vec<Cx>>,
{
    let p = tau.prec();
    let mut edges: Vec<Vec<Cx>> = Vec::with_capacity(4);
    let mut corners: Vec<Vec<Cx>> = Vec::with_capacity(4);
    let steps = [Float::with_val(p, -h), Float::new(p), h.clone()];
    let mut center = Vec::new();
    for (i, dx) in steps.iter().enumerate() {
        for (j, dy) in steps.iter().enumerate() {
            let v = f(&shifted(tau, dx, dy))?;
            match (i == 1, j == 1) {
                (true, true) => center = v,
                (true, false) | (false, true) => edges.push(v),
                _ => corners.push(v),
            }
        }
    }
    let y2 = Float::with_val(p, tau.im.square_ref());
    let denom = Float::with_val(p, h.square_ref()) * 6u32;
    let mut worst: f64 = 0.0;
    for k in 0..center.len() {
        let mut acc = center[k].mul_i64(-20);
        for e in &edges {
            acc += &e[k].mul_i64(4);
        }
        for c in &corners {
            acc += &c[k];
        }
        let lap = acc.mul_real(&Float::with_val(p, &y2 / &denom));
        worst = worst.max(lap.abs_f64());
    }
    Ok(worst)
}

/// Hyperbolic Laplacian residual of zhat_V at tau.
pub fn laplacian_residual(tau: &Cx, s: &MockFormSession, h: f64) -> Result<f64> {
    laplacian_fd(&|t: &Cx| zhat_v(t, s), tau, &s.ctx.float(h))
}

/// Result of fitting xi_0 zhat_V = f^tr C at several points.
#[derive(Clone, Debug)]
pub struct ShadowReport {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub fitted: CMatrix,
    /// 4 pi^2 P^{-1}.
    pub reference: CMatrix,
    /// The sign and transpose convention whose candidate is closest to the fit.
    pub convention: String,
    /// Relative distance between the fit and the selected candidate.
    pub relative_error: f64,
    /// Largest relative misfit of a single point against the fitted C.
    pub spread: f64,
    pub step: f64,
}

impl ShadowReport {
    pub fn to_json_value(&self) -> serde_json::Value {
        let mat = |m: &CMatrix| -> Vec<Vec<String>> {
            (0..m.rows())
                .map(|i| m.row(i).iter().map(|z| format!("{} {}", float_to_string(&z.re, 15), float_to_string(&z.im, 15))).collect())
                .collect()
        };
        json!({
            "label": self.label,
            "points": self.points,
            "step": self.step,
            "fitted": mat(&self.fitted),
            "reference_4pi2_Pinv": mat(&self.reference),
            "convention": self.convention,
            "relative_error": self.relative_error,
            "spread": self.spread,
        })
    }
}

fn rel_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    let d = a.max_abs_diff(b).to_f64();
    d / b.max_abs().to_f64().max(f64::MIN_POSITIVE)
}

fn sample_points(rng: &mut ChaCha8Rng, k: usize) -> Vec<(f64, f64)> {
    (0..k).map(|_| (rng.gen_range(-0.5..0.5), rng.gen_range(0.6..1.3))).collect()
}

/// Least-squares fit of C in xi_0 zhat_V(tau_k) = f(tau_k)^tr C and
/// comparison with +-4 pi^2 P^{-1} and its transpose.
pub fn shadow_report(s: &MockFormSession, points: usize, h: f64, seed: u64, exec: Execution) -> Result<ShadowReport> {
    let g = s.genus();
    let points = points.max(g + 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts = sample_points(&mut rng, points);
    let rows = par::try_map(exec, &pts, |&(x, y)| -> Result<(Vec<Cx>, Vec<Cx>)> {
        let tau = s.ctx.cx(x, y);
        let f: Vec<Cx> = s.orbit.forms.iter().map(|q| evaluate(q, &tau, &s.ctx)).collect::<Result<_>>()?;
        Ok((f, xi0_image(&tau, s, h)?))
    })?;
    let fm = CMatrix::from_rows(rows.iter().map(|r| r.0.clone()).collect());
    let xm = CMatrix::from_rows(rows.iter().map(|r| r.1.clone()).collect());
    let fa = fm.adjoint();
    let fitted = fa.mul(&fm).inverse()?.mul(&fa.mul(&xm));
    let resid = xm.sub(&fm.mul(&fitted));
    let spread = (0..points)
        .map(|k| {
            let r = resid.row(k).iter().map(Cx::abs_f64).fold(0.0, f64::max);
            let x = xm.row(k).iter().map(Cx::abs_f64).fold(0.0, f64::max);
            r / x.max(f64::MIN_POSITIVE)
        })
        .fold(0.0, f64::max);
    let mut four_pi2 = s.ctx.pi();
    four_pi2.square_mut();
    four_pi2 *= 4;
    let reference = s.kctx.p_matrix.inverse()?.scale(&Cx::from_real(four_pi2));
    let candidates = [
        ("+4pi^2 P^-1", reference.clone()),
        ("-4pi^2 P^-1", reference.neg()),
        ("+4pi^2 (P^tr)^-1", reference.transpose()),
        ("-4pi^2 (P^tr)^-1", reference.transpose().neg()),
    ];
    let (convention, relative_error) = candidates
        .iter()
        .map(|(name, c)| (name.to_string(), rel_diff(&fitted, c)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("candidates are non-empty");
    Ok(ShadowReport {
        label: s.label().to_string(),
        points: pts,
        fitted,
        reference,
        convention,
        relative_error,
        spread,
        step: h,
    })
}

/// One verification check.
#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn new(name: &str, residual: f64, tolerance: f64) -> Self {
        Check { name: name.to_string(), residual, tolerance }
    }

    pub fn passed(&self) -> bool {
        self.residual.is_finite() && self.residual < self.tolerance
    }
}

/// Residual summary of all verification suites.
#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub label: String,
    pub digits: u32,
    pub checks: Vec<Check>,
    pub shadow: ShadowReport,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed())
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let checks: Vec<serde_json::Value> = self
            .checks
            .iter()
            .map(|c| json!({"name": c.name, "residual": c.residual, "tolerance": c.tolerance, "passed": c.passed()}))
            .collect();
        json!({
            "label": self.label,
            "digits": self.digits,
            "passed": self.passed(),
            "checks": checks,
            "xi0": self.shadow.to_json_value(),
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} at {} digits\n", self.label, self.digits);
        for c in &self.checks {
            out.push_str(&format!(
                "{}  {:<34} residual {:.3e}  tolerance {:.0e}\n",
                if c.passed() { "PASS" } else { "FAIL" },
                c.name,
                c.residual,
                c.tolerance
            ));
        }
        out.push_str(&format!("xi_0 convention: {}\n", self.shadow.convention));
        out
    }
}

fn max_dist(a: &[Cx], b: &[Cx]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.dist(y).to_f64()).fold(0.0, f64::max)
}

fn translate(m: usize, a: i64, b: i64) -> (Vec<i64>, Vec<i64>) {
    ((0..m).map(|j| a - j as i64).collect(), (0..m).map(|j| b + j as i64).collect())
}

fn random_u(rng: &mut ChaCha8Rng, k: &KleinianContext, ctx: &PrecisionContext) -> Vec<Cx> {
    // a random point of the fundamental parallelotope
    let g = k.genus();
    let p = ctx.bits();
    let a: Vec<Cx> = (0..g).map(|_| Cx::from_real(Float::with_val(p, rng.gen_range(0.05..0.95)))).collect();
    let b: Vec<Cx> = (0..g).map(|_| Cx::from_real(Float::with_val(p, rng.gen_range(0.05..0.95)))).collect();
    let x = k.omega.mul_vec(&a);
    let y = k.omega_prime.mul_vec(&b);
    x.iter().zip(&y).map(|(s, t)| s + t).collect()
}

/// Relative residual of theta[a;b](v + m + Omega n) against the transformation law.
pub fn theta_quasi_periodicity(k: &KleinianContext, v: &[Cx], m: &[i64], n: &[i64], ctx: &PrecisionContext) -> Result<f64> {
    let p = ctx.bits();
    let g = k.genus();
    let nv: Vec<Cx> = n.iter().map(|&x| Cx::from_i64(p, x)).collect();
    let on = k.big_omega.mul_vec(&nv);
    let w: Vec<Cx> = (0..g).map(|i| &(&v[i] + &on[i]) + &Cx::from_i64(p, m[i])).collect();
    let ch = &k.characteristic;
    let t0 = theta(v, ch, &k.plan)?;
    let t1 = theta(&w, ch, &k.plan)?;
    // exponent: alpha.m - beta.n - n.v - n.Omega.n / 2
    let mut e = Cx::zero(p);
    for i in 0..g {
        e += &Cx::from_real(ch.alpha[i].to_float(p) * m[i]);
        e -= &Cx::from_real(ch.beta[i].to_float(p) * n[i]);
        e -= &v[i].mul_i64(n[i]);
        e -= &(&on[i].mul_i64(n[i]) * &Cx::from_f64(p, 0.5, 0.0));
    }
    let expect = &e.e2pi() * &t0;
    Ok(Float::with_val(53, t1.dist(&expect) / expect.abs()).to_f64())
}

/// Runs every verification suite on a session.
pub fn verify(s: &MockFormSession, seed: u64, exec: Execution) -> Result<VerifyReport> {
    let ctx = &s.ctx;
    let k = &s.kctx;
    let g = s.genus();
    let d = ctx.digits() as i32;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();

    // theta quasi-periodicity at three base points
    let mut worst: f64 = 0.0;
    for _ in 0..3 {
        let u = random_u(&mut rng, k, ctx);
        let v = k.omega_inv.mul_vec(&u);
        let (m, n) = translate(g, rng.gen_range(-2..=2), rng.gen_range(-2..=2));
        worst = worst.max(theta_quasi_periodicity(k, &v, &m, &n, ctx)?);
    }
    checks.push(Check::new("theta quasi-periodicity", worst, 10f64.powi(-(d - 10))));

    // zeta_hat invariance over a 5x5 grid of translates, 3 base points
    let bases: Vec<Vec<Cx>> = (0..3).map(|_| random_u(&mut rng, k, ctx)).collect();
    let grid: Vec<(usize, i64, i64)> =
        (0..3).flat_map(|b| (-2..=2).flat_map(move |i| (-2..=2).map(move |j| (b, i, j)))).collect();
    let base_vals = par::try_map(exec, &bases, |u| zeta_hat(u, k, ctx))?;
    let diffs = par::try_map(exec, &grid, |&(b, i, j)| -> Result<f64> {
        let (m, n) = translate(g, i, j);
        let l = k.lattice_vector(&m, &n);
        let w: Vec<Cx> = bases[b].iter().zip(&l).map(|(x, y)| x + y).collect();
        Ok(max_dist(&zeta_hat(&w, k, ctx)?, &base_vals[b]))
    })?;
    checks.push(Check::new("zeta_hat lattice invariance", diffs.iter().cloned().fold(0.0, f64::max), 10f64.powi(-(d - 10))));

    // the uncompleted quotient shifts by a u-independent amount
    let mut worst: f64 = 0.0;
    for (i, j) in [(1, 0), (0, 1), (2, -1)] {
        let (m, n) = translate(g, i, j);
        let l = k.lattice_vector(&m, &n);
        let jump = |u: &Vec<Cx>| -> Result<Vec<Cx>> {
            let w: Vec<Cx> = u.iter().zip(&l).map(|(x, y)| x + y).collect();
            let a = theta_quotient(&w, k)?;
            let b = theta_quotient(u, k)?;
            Ok(a.iter().zip(&b).map(|(x, y)| x - y).collect())
        };
        let j0 = jump(&bases[0])?;
        let j1 = jump(&bases[1])?;
        let scale = j0.iter().map(Cx::abs_f64).fold(1.0, f64::max);
        worst = worst.max(max_dist(&j0, &j1) / scale);
    }
    checks.push(Check::new("zeta quasi-periodicity", worst, 10f64.powi(-(d - 10))));

    // Gamma_0(N) invariance of zhat_V
    let n = s.level() as i64;
    let pairs: Vec<(GroupElement, f64, f64)> = (0..10)
        .map(|_| {
            let kk = rng.gen_range(1..=2);
            let c = n * kk;
            let a = loop {
                let a = rng.gen_range(1..c);
                if gcd(a, c) == 1 {
                    break a;
                }
            };
            let gamma = GroupElement::mapping_infinity_to(a, c).expect("coprime entries");
            (gamma, rng.gen_range(-0.3..0.3), rng.gen_range(0.8..1.25))
        })
        .collect();
    let inv = par::try_map(exec, &pairs, |(gamma, dx, t)| -> Result<f64> {
        // tau = (-d + dx + i t)/c keeps tau and gamma tau at comparable heights
        let c = ctx.int(gamma.c);
        let tau = Cx::new((ctx.int(-gamma.d) + ctx.float(*dx)) / &c, ctx.float(*t) / &c);
        let a = zhat_v(&tau, s)?;
        let b = zhat_v(&gamma.act(&tau), s)?;
        Ok(max_dist(&a, &b))
    })?;
    checks.push(Check::new("Gamma_0(N) invariance", inv.iter().cloned().fold(0.0, f64::max), 10f64.powi(-(d - 12))));

    // holomorphy of the meromorphic part
    let pts = sample_points(&mut rng, 5);
    let holo = par::try_map(exec, &pts, |&(x, y)| -> Result<f64> {
        let tau = ctx.cx(x, y);
        // xi_0 of a holomorphic function vanishes
        let v = xi0_fd(&|t: &Cx| mero_part(t, s), &tau, &ctx.float(1e-10))?;
        Ok(v.iter().map(Cx::abs_f64).fold(0.0, f64::max))
    })?;
    checks.push(Check::new("holomorphy of mero_part", holo.iter().cloned().fold(0.0, f64::max), 1e-8));

    // hyperbolic Laplacian
    let pts = sample_points(&mut rng, 3);
    let lap = par::try_map(exec, &pts, |&(x, y)| laplacian_residual(&ctx.cx(x, y), s, DEFAULT_LAPLACE_STEP))?;
    checks.push(Check::new("Laplacian", lap.iter().cloned().fold(0.0, f64::max), 1e-4));

    // xi_0 identity
    let shadow = shadow_report(s, 5, DEFAULT_XI_STEP, seed ^ 0x5eed, exec)?;
    checks.push(Check::new("xi_0 constant fit spread", shadow.spread, 1e-5));
    checks.push(Check::new("xi_0 against 4 pi^2 P^-1", shadow.relative_error, 1e-6));

    Ok(VerifyReport { label: s.label().to_string(), digits: ctx.digits(), checks, shadow })
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Error raised by the CLI when a verification check fails.
pub fn failure_error(report: &VerifyReport) -> Option<Error> {
    report.first_failure().map(|c| {
        Error::InvariantViolation(format!("{}: residual {:.3e} exceeds {:.0e}", c.name, c.residual, c.tolerance))
    })
}
