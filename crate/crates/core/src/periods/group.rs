use crate::error::{Error, Result};
use crate::numerics::Cx;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// Element of SL_2(Z), [[a, b], [c, d]].
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupElement {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

pub(crate) fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a.abs(), a.signum(), 0)
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - a.div_euclid(b) * y)
    }
}

pub(crate) fn gcd(a: i64, b: i64) -> i64 {
    ext_gcd(a, b).0
}

impl GroupElement {
    pub const IDENTITY: GroupElement = GroupElement { a: 1, b: 0, c: 0, d: 1 };
    pub const S: GroupElement = GroupElement { a: 0, b: -1, c: 1, d: 0 };
    pub const T: GroupElement = GroupElement { a: 1, b: 1, c: 0, d: 1 };

    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        if a * d - b * c != 1 {
            return Err(Error::InvalidArgument(format!("[[{a}, {b}], [{c}, {d}]] has determinant != 1")));
        }
        Ok(GroupElement { a, b, c, d })
    }

    pub fn mul(&self, o: &GroupElement) -> GroupElement {
        GroupElement {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }

    pub fn inverse(&self) -> GroupElement {
        GroupElement { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    pub fn neg(&self) -> GroupElement {
        GroupElement { a: -self.a, b: -self.b, c: -self.c, d: -self.d }
    }

    /// Representative of +-gamma with c > 0, or c = 0 and d > 0.
    pub fn normalized(&self) -> GroupElement {
        if self.c < 0 || (self.c == 0 && self.d < 0) {
            self.neg()
        } else {
            *self
        }
    }

    pub fn is_plus_minus_identity(&self) -> bool {
        self.b == 0 && self.c == 0 && self.a == self.d
    }

    pub fn in_gamma0(&self, n: u64) -> bool {
        self.c.rem_euclid(n as i64) == 0
    }

    /// Mobius action on the upper half plane.
    pub fn act(&self, tau: &Cx) -> Cx {
        let p = tau.prec();
        let num = &tau.mul_i64(self.a) + &Cx::from_i64(p, self.b);
        let den = &tau.mul_i64(self.c) + &Cx::from_i64(p, self.d);
        &num / &den
    }

    /// Automorphy factor c tau + d.
    pub fn j(&self, tau: &Cx) -> Cx {
        &tau.mul_i64(self.c) + &Cx::from_i64(tau.prec(), self.d)
    }

    /// Element with gamma(infinity) = p/q (q > 0, gcd(p, q) = 1).
    pub fn mapping_infinity_to(p: i64, q: i64) -> Result<GroupElement> {
        let (g, x, y) = ext_gcd(p, q);
        if g != 1 || q <= 0 {
            return Err(Error::InvalidArgument(format!("{p}/{q} is not a reduced fraction")));
        }
        // p*x + q*y = 1 -> [[p, -y], [q, x]]
        GroupElement::new(p, -y, q, x)
    }
}

impl std::fmt::Display for GroupElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

/// Index of Gamma_0(N) in SL_2(Z): N prod_{p | N} (1 + 1/p).
pub fn psi(n: u64) -> u64 {
    let mut m = n;
    let mut out = n;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            out = out / p * (p + 1);
            while m % p == 0 {
                m /= p;
            }
        }
        p += 1;
    }
    if m > 1 {
        out = out / m * (m + 1);
    }
    out
}

/// Projective line P^1(Z/N) with canonical representatives.
pub struct ProjectiveLine {
    n: i64,
    index: HashMap<(i64, i64), usize>,
    reps: Vec<(i64, i64)>,
}

impl ProjectiveLine {
    pub fn new(n: u64) -> Self {
        let n = n as i64;
        let mut index = HashMap::new();
        let mut reps = Vec::new();
        if n == 1 {
            index.insert((0, 0), 0);
            reps.push((0, 0));
            return ProjectiveLine { n, index, reps };
        }
        let units: Vec<i64> = (1..n).filter(|&u| gcd(u, n) == 1).collect();
        // (0:1) first so that the identity coset has index 0
        let mut order: Vec<(i64, i64)> = vec![(0, 1)];
        for c in 0..n {
            for d in 0..n {
                order.push((c, d));
            }
        }
        for (c, d) in order {
            if index.contains_key(&(c, d)) || gcd(gcd(c, d), n) != 1 {
                continue;
            }
            let k = reps.len();
            reps.push((c, d));
            for &u in &units {
                index.insert(((u * c) % n, (u * d) % n), k);
            }
        }
        ProjectiveLine { n, index, reps }
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn class_of(&self, c: i64, d: i64) -> usize {
        if self.n == 1 {
            return 0;
        }
        self.index[&(c.rem_euclid(self.n), d.rem_euclid(self.n))]
    }

    pub fn class_rep(&self, k: usize) -> (i64, i64) {
        self.reps[k]
    }
}

/// Right coset representatives of Gamma_0(N) in SL_2(Z), indexed by P^1(Z/N);
/// the identity represents the trivial coset.
pub fn coset_reps(n: u64) -> Vec<GroupElement> {
    let line = ProjectiveLine::new(n);
    (0..line.len()).map(|k| lift(line.class_rep(k), n as i64)).collect()
}

fn lift((c, d): (i64, i64), n: i64) -> GroupElement {
    if c == 0 || n == 1 {
        return GroupElement::IDENTITY;
    }
    let mut d1 = d;
    while gcd(c, d1) != 1 {
        d1 += n;
    }
    // a d1 - b c = 1
    let (_, x, y) = ext_gcd(d1, c);
    GroupElement { a: x, b: -y, c, d: d1 }
}

/// Generators rho_i s rho_j^{-1} of Gamma_0(N), s in {S, T}, up to sign and
/// excluding +-1, normalized with c >= 0.
pub fn schreier_generators(n: u64) -> Vec<GroupElement> {
    let line = ProjectiveLine::new(n);
    let reps: Vec<GroupElement> = (0..line.len()).map(|k| lift(line.class_rep(k), n as i64)).collect();
    let mut out: Vec<GroupElement> = Vec::new();
    for rho in &reps {
        for s in [GroupElement::S, GroupElement::T] {
            let x = rho.mul(&s);
            let j = line.class_of(x.c, x.d);
            let g = x.mul(&reps[j].inverse()).normalized();
            debug_assert!(g.in_gamma0(n));
            if !g.is_plus_minus_identity() && !out.contains(&g) {
                out.push(g);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_formula() {
        for (n, expect) in [(1, 1), (23, 24), (27, 36), (256, 384), (12, 24)] {
            assert_eq!(psi(n), expect);
            assert_eq!(coset_reps(n).len() as u64, expect);
        }
    }

    #[test]
    fn cosets_are_distinct_and_complete() {
        for n in [11u64, 23, 27, 36] {
            let reps = coset_reps(n);
            assert_eq!(reps[0], GroupElement::IDENTITY);
            for (i, r) in reps.iter().enumerate() {
                assert_eq!(r.a * r.d - r.b * r.c, 1);
                for s in &reps[..i] {
                    assert!(!r.mul(&s.inverse()).in_gamma0(n), "duplicate coset at level {n}");
                }
            }
        }
    }

    #[test]
    fn schreier_generators_lie_in_gamma0() {
        for n in [1u64, 23, 27, 256] {
            let gens = schreier_generators(n);
            assert!(gens.len() as u64 <= 2 * psi(n));
            for g in &gens {
                assert!(g.in_gamma0(n));
                assert_eq!(g.a * g.d - g.b * g.c, 1);
            }
        }
        let gens1 = schreier_generators(1);
        assert!(gens1.contains(&GroupElement::S.normalized()) && gens1.contains(&GroupElement::T));
    }

    #[test]
    fn infinity_maps_to_cusp() {
        let g = GroupElement::mapping_infinity_to(49, 512).unwrap();
        assert_eq!((g.a, g.c), (49, 512));
        assert_eq!(g.a * g.d - g.b * g.c, 1);
    }
}
