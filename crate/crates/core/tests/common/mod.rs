//! Shared helpers for the integration tests, including an independent
//! Weierstrass oracle for genus-1 lattices built only from cotangent sums and
//! q-products.

#![allow(dead_code)]

use kleinian::mockform::{MockFormSession, SessionConfig};
use kleinian::newforms::load_orbit;
use kleinian::numerics::{Cx, PrecisionContext};
use rug::Float;

pub fn session(label: &str, digits: u32) -> MockFormSession {
    let orbit = load_orbit(label).expect("bundled orbit");
    MockFormSession::build(&orbit, &SessionConfig::new(digits)).expect("session builds")
}

pub fn max_dist(a: &[Cx], b: &[Cx]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.dist(y).to_f64()).fold(0.0, f64::max)
}

/// Weierstrass functions of the lattice omega Z + omega' Z.
pub struct Weierstrass {
    pub omega: Cx,
    pub tau: Cx,
    /// G2(tau) = (pi^2/3) E2(tau).
    pub g2: Cx,
    /// Quasi-period attached to omega: zeta(u + omega) = zeta(u) + eta.
    pub eta: Cx,
    /// Cutoff of the cotangent and product sums.
    terms: i64,
    prec: u32,
}

fn pi(prec: u32) -> Float {
    Float::with_val(prec, rug::float::Constant::Pi)
}

/// cot(pi w) = i (e^{2 pi i w} + 1) / (e^{2 pi i w} - 1).
fn cot_pi(w: &Cx) -> Cx {
    let p = w.prec();
    let e = w.e2pi();
    let one = Cx::one(p);
    &(&(&e + &one) / &(&e - &one)) * &Cx::i(p)
}

impl Weierstrass {
    pub fn new(omega: &Cx, omega_prime: &Cx, digits: u32) -> Self {
        let prec = omega.prec();
        let tau = omega_prime / omega;
        let im = tau.im.to_f64();
        assert!(im > 0.0, "lattice basis must be positively oriented");
        let terms = ((digits as f64 + 20.0) * std::f64::consts::LN_10 / (2.0 * std::f64::consts::PI * im)).ceil() as i64 + 2;
        // E2 = 1 - 24 sum sigma_1(n) q^n
        let q = tau.e2pi();
        let mut e2 = Cx::one(prec);
        let mut qn = Cx::one(prec);
        for n in 1..=terms {
            qn = &qn * &q;
            let s1: i64 = (1..=n).filter(|d| n % d == 0).sum();
            e2 -= &qn.mul_i64(24 * s1);
        }
        let p = pi(prec);
        let g2 = e2.mul_real(&(Float::with_val(prec, &p * &p) / 3u32));
        let eta = &g2 / omega;
        Weierstrass { omega: omega.clone(), tau, g2, eta, terms, prec }
    }

    fn z(&self, u: &Cx) -> Cx {
        u / &self.omega
    }

    /// sum over n in [-N, N] of cot(pi (z + n tau)).
    fn cot_sum(&self, z: &Cx) -> Cx {
        let mut s = cot_pi(z);
        for n in 1..=self.terms {
            let nt = self.tau.mul_i64(n);
            s += &cot_pi(&(z + &nt));
            s += &cot_pi(&(z - &nt));
        }
        s
    }

    pub fn zeta(&self, u: &Cx) -> Cx {
        let z = self.z(u);
        let p = pi(self.prec);
        let v = &(&self.g2 * &z) + &self.cot_sum(&z).mul_real(&p);
        &v / &self.omega
    }

    /// zeta(u) - eta u / omega + pi (z - conj z) / (omega Im tau), invariant under the lattice.
    pub fn zeta_completed(&self, u: &Cx) -> Cx {
        let z = self.z(u);
        let p = pi(self.prec);
        let diff = &z - &z.conj();
        let corr = diff.mul_real(&(Float::with_val(self.prec, &p / &self.tau.im)));
        let v = &self.cot_sum(&z).mul_real(&p) + &corr;
        &v / &self.omega
    }

    pub fn wp(&self, u: &Cx) -> Cx {
        let z = self.z(u);
        let p = pi(self.prec);
        let p2 = Float::with_val(self.prec, &p * &p);
        let one = Cx::one(self.prec);
        // pi^2 csc^2(pi w) = pi^2 (1 + cot^2(pi w))
        let csc2 = |w: &Cx| {
            let c = cot_pi(w);
            &one + &(&c * &c)
        };
        let mut s = csc2(&z);
        for n in 1..=self.terms {
            let nt = self.tau.mul_i64(n);
            s += &csc2(&(&z + &nt));
            s += &csc2(&(&z - &nt));
        }
        let v = &s.mul_real(&p2) - &self.g2;
        &v / &(&self.omega * &self.omega)
    }

    /// omega sin(pi z)/pi exp(eta u^2 / (2 omega)) prod (1 - q^n x)(1 - q^n / x) / (1 - q^n)^2.
    pub fn sigma(&self, u: &Cx) -> Cx {
        let z = self.z(u);
        let p = pi(self.prec);
        let one = Cx::one(self.prec);
        let x = z.e2pi();
        let xi = x.recip();
        let half = z.mul_real(&(Float::with_val(self.prec, &p))).mul_i();
        let sin = &(&half.exp() - &(-half).exp()) / &Cx::i(self.prec).mul_i64(2);
        let q = self.tau.e2pi();
        let mut prod = Cx::one(self.prec);
        let mut qn = Cx::one(self.prec);
        for _ in 1..=self.terms {
            qn = &qn * &q;
            let a = &one - &(&qn * &x);
            let b = &one - &(&qn * &xi);
            let c = &one - &qn;
            prod = &prod * &(&(&a * &b) / &(&c * &c));
        }
        let half_prec = Float::with_val(self.prec, 0.5);
        let ex = (&(&(&self.eta * u) * u) / &self.omega).mul_real(&half_prec).exp();
        let lead = (&self.omega * &sin).mul_real(&(Float::with_val(self.prec, 1) / &p));
        &(&lead * &ex) * &prod
    }
}

/// A point of C with real and imaginary parts in [-1, 1].
pub fn random_point(ctx: &PrecisionContext, rng: &mut impl rand::Rng) -> Cx {
    ctx.cx(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}
