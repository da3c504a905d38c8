//! Newform orbits from the LMFDB JSON API.

use super::orbit::{field_mul, NewformOrbit};
use crate::error::{Error, Result};
use crate::numerics::Rational;
use serde_json::Value;
use std::collections::BTreeMap;
use std::time::Duration;

pub const DEFAULT_BASE_URL: &str = "https://www.lmfdb.org";
/// Environment variable overriding the API host.
pub const BASE_URL_ENV: &str = "KLEINIAN_LMFDB_URL";

/// Level and weight encoded in a label "N.k.c.x".
pub fn parse_label(label: &str) -> Result<(u64, u32)> {
    let parts: Vec<&str> = label.split('.').collect();
    let bad = || Error::Parse(format!("malformed newform label {label:?}"));
    if parts.len() != 4 || parts[2] != "a" || parts[3].is_empty() {
        return Err(bad());
    }
    Ok((parts[0].parse().map_err(|_| bad())?, parts[1].parse().map_err(|_| bad())?))
}

/// Downloads an orbit and builds coefficients through `n_max`.
pub fn fetch_orbit(label: &str, n_max: usize) -> Result<NewformOrbit> {
    let (level, weight) = parse_label(label)?;
    if weight != 2 {
        return Err(Error::UnsupportedOrbit(format!("{label}: weight {weight}")));
    }
    if level == 1 {
        return Err(Error::UnsupportedOrbit(format!("{label}: S_2(1) is zero")));
    }
    let base = std::env::var(BASE_URL_ENV).unwrap_or_else(|_| DEFAULT_BASE_URL.to_string());
    let newform = get_record(&base, "mf_newforms", label)?
        .ok_or_else(|| Error::OrbitNotFound(label.to_string()))?;
    let dim = newform.get("dim").and_then(Value::as_u64).unwrap_or(1);
    let hecke = if dim > 1 { get_record(&base, "mf_hecke_nf", label)? } else { None };
    orbit_from_records(&newform, hecke.as_ref(), n_max)
}

fn get_record(base: &str, table: &str, label: &str) -> Result<Option<Value>> {
    let url = format!("{}/api/{table}/?label={label}&_format=json", base.trim_end_matches('/'));
    let agent = ureq::AgentBuilder::new().timeout(Duration::from_secs(60)).build();
    let body = agent
        .get(&url)
        .call()
        .map_err(|e| Error::Network(format!("{url}: {e}")))?
        .into_string()
        .map_err(|e| Error::Network(format!("{url}: {e}")))?;
    let v: Value = serde_json::from_str(&body)?;
    Ok(v.get("data").and_then(Value::as_array).and_then(|a| a.first()).cloned())
}

fn int_list(v: &Value, what: &str) -> Result<Vec<i64>> {
    v.as_array()
        .ok_or_else(|| Error::Parse(format!("{what} is not a list")))?
        .iter()
        .map(|x| x.as_i64().ok_or_else(|| Error::Parse(format!("{what} has a non-integer entry"))))
        .collect()
}

fn primes_upto(n: usize) -> Vec<usize> {
    let mut sieve = vec![true; n + 1];
    let mut out = Vec::new();
    for p in 2..=n {
        if sieve[p] {
            out.push(p);
            let mut k = p * p;
            while k <= n {
                sieve[k] = false;
                k += p;
            }
        }
    }
    out
}

/// Builds a_1..a_{n_max} from a_p by multiplicativity and the Hecke recursion.
fn expand_from_ap(ap: &BTreeMap<usize, Vec<i128>>, level: u64, poly: &[i64], n_max: usize) -> Result<Vec<Vec<i128>>> {
    let d = poly.len() - 1;
    let mut one = vec![0i128; d];
    one[0] = 1;
    let mut a: Vec<Option<Vec<i128>>> = vec![None; n_max + 1];
    a[1] = Some(one.clone());
    for p in primes_upto(n_max) {
        let apv = ap
            .get(&p)
            .ok_or_else(|| Error::UnsupportedOrbit(format!("a_{p} not available; lower n_max")))?
            .clone();
        let (mut prev, mut cur, mut pk) = (one.clone(), apv.clone(), p);
        a[p] = Some(apv.clone());
        while pk * p <= n_max {
            let mut next = field_mul(&apv, &cur, poly);
            if level % p as u64 != 0 {
                for (x, y) in next.iter_mut().zip(&prev) {
                    *x -= p as i128 * y;
                }
            }
            pk *= p;
            a[pk] = Some(next.clone());
            prev = cur;
            cur = next;
        }
    }
    let mut out = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        if a[n].is_none() {
            // split off the full power of the smallest prime factor
            let p = (2..=n).find(|p| n % p == 0).expect("n > 1");
            let mut q = p;
            while (n / q) % p == 0 {
                q *= p;
            }
            let (x, y) = (a[q].clone().expect("prime power"), a[n / q].clone().expect("smaller index"));
            a[n] = Some(field_mul(&x, &y, poly));
        }
        out.push(a[n].clone().expect("filled"));
    }
    Ok(out)
}

/// Roots of a monic integer polynomial by Durand-Kerner iteration, sorted by
/// real part then imaginary part.
fn approximate_roots(poly: &[i64]) -> Vec<(f64, f64)> {
    let d = poly.len() - 1;
    let eval = |z: (f64, f64)| {
        let mut v = (0.0, 0.0);
        for &c in poly.iter().rev() {
            v = (v.0 * z.0 - v.1 * z.1 + c as f64, v.0 * z.1 + v.1 * z.0);
        }
        v
    };
    let bound = 1.0 + poly[..d].iter().map(|&c| (c as f64).abs()).fold(0.0, f64::max);
    let mut z: Vec<(f64, f64)> =
        (0..d).map(|k| (bound * 0.4, 0.9).pipe_pow(k as u32)).collect();
    for _ in 0..2000 {
        let mut moved: f64 = 0.0;
        for i in 0..d {
            let num = eval(z[i]);
            let mut den = (1.0, 0.0);
            for j in 0..d {
                if i != j {
                    let diff = (z[i].0 - z[j].0, z[i].1 - z[j].1);
                    den = (den.0 * diff.0 - den.1 * diff.1, den.0 * diff.1 + den.1 * diff.0);
                }
            }
            let n2 = den.0 * den.0 + den.1 * den.1;
            let step = ((num.0 * den.0 + num.1 * den.1) / n2, (num.1 * den.0 - num.0 * den.1) / n2);
            z[i] = (z[i].0 - step.0, z[i].1 - step.1);
            moved = moved.max(step.0.hypot(step.1));
        }
        if moved < 1e-15 {
            break;
        }
    }
    for r in z.iter_mut() {
        if r.1.abs() < 1e-12 {
            r.1 = 0.0;
        }
    }
    z.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    z
}

trait PowPair {
    fn pipe_pow(self, k: u32) -> (f64, f64);
}

impl PowPair for (f64, f64) {
    fn pipe_pow(self, k: u32) -> (f64, f64) {
        let mut out = (1.0, 0.0);
        for _ in 0..k {
            out = (out.0 * self.0 - out.1 * self.1, out.0 * self.1 + out.1 * self.0);
        }
        out
    }
}

/// Orbit from an `mf_newforms` record and, for dimension > 1, the matching
/// `mf_hecke_nf` record.
pub fn orbit_from_records(newform: &Value, hecke: Option<&Value>, n_max: usize) -> Result<NewformOrbit> {
    let label = newform
        .get("label")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::Parse("record has no label".into()))?
        .to_string();
    let level = newform.get("level").and_then(Value::as_u64).ok_or_else(|| Error::Parse("no level".into()))?;
    let weight = newform.get("weight").and_then(Value::as_u64).unwrap_or(2) as u32;
    if weight != 2 {
        return Err(Error::UnsupportedOrbit(format!("{label}: weight {weight}")));
    }
    let dim = newform.get("dim").and_then(Value::as_u64).unwrap_or(1) as usize;
    let mut al_signs = BTreeMap::new();
    if let Some(al) = newform.get("atkin_lehner_eigenvals").and_then(Value::as_array) {
        for pair in al {
            let pr = int_list(pair, "atkin_lehner_eigenvals")?;
            if pr.len() != 2 {
                return Err(Error::Parse("Atkin-Lehner entry is not a pair".into()));
            }
            let p = pr[0] as u64;
            let mut q = p;
            while level % (q * p) == 0 {
                q *= p;
            }
            al_signs.insert(q, pr[1] as i8);
        }
    }
    let (poly, ap): (Vec<i64>, BTreeMap<usize, Vec<i128>>) = if dim == 1 {
        let traces = int_list(newform.get("traces").ok_or_else(|| Error::Parse("no traces".into()))?, "traces")?;
        let ap = primes_upto(traces.len()).into_iter().map(|p| (p, vec![traces[p - 1] as i128])).collect();
        (vec![-1, 1], ap)
    } else {
        let h = hecke.ok_or_else(|| Error::UnsupportedOrbit(format!("{label}: no Hecke field data")))?;
        let poly = int_list(h.get("field_poly").ok_or_else(|| Error::Parse("no field_poly".into()))?, "field_poly")?;
        if poly.len() != dim + 1 || poly[dim] != 1 {
            return Err(Error::UnsupportedOrbit(format!("{label}: field polynomial is not monic of degree {dim}")));
        }
        let nums = h.get("hecke_ring_numerators").and_then(Value::as_array);
        let dens = h.get("hecke_ring_denominators").and_then(Value::as_array);
        let basis: Vec<Vec<Rational>> = match (nums, dens) {
            (Some(nums), Some(dens)) => nums
                .iter()
                .zip(dens)
                .map(|(n, d)| {
                    let d = d.as_i64().ok_or_else(|| Error::Parse("bad denominator".into()))? as i128;
                    Ok(int_list(n, "hecke_ring_numerators")?.iter().map(|&x| Rational::new(x as i128, d)).collect())
                })
                .collect::<Result<_>>()?,
            _ => (0..dim).map(|i| (0..dim).map(|j| Rational::integer(i128::from(i == j))).collect()).collect(),
        };
        let to_power = |v: &[i64]| -> Result<Vec<i128>> {
            let mut acc = vec![Rational::ZERO; dim];
            for (c, b) in v.iter().zip(&basis) {
                for (a, x) in acc.iter_mut().zip(b) {
                    *a = *a + Rational::integer(*c as i128) * *x;
                }
            }
            acc.iter()
                .map(|r| {
                    if r.den() == 1 {
                        Ok(r.num())
                    } else {
                        Err(Error::UnsupportedOrbit(format!("{label}: coefficients are not integral in the power basis")))
                    }
                })
                .collect()
        };
        let ap_list = h.get("ap").and_then(Value::as_array).ok_or_else(|| Error::Parse("no ap".into()))?;
        let primes = primes_upto(ap_list.len().max(2) * 20);
        let mut ap = BTreeMap::new();
        for (p, v) in primes.into_iter().zip(ap_list) {
            ap.insert(p, to_power(&int_list(v, "ap")?)?);
        }
        (poly, ap)
    };
    let an = expand_from_ap(&ap, level, &poly, n_max)?;
    let embeddings = approximate_roots(&poly)
        .into_iter()
        .map(|(re, im)| (format!("{re:.17e}"), format!("{im:.17e}")))
        .collect();
    let orbit = NewformOrbit {
        label,
        level,
        weight,
        degree: poly.len() - 1,
        field_poly: poly,
        embeddings,
        al_signs,
        an: an.into_iter().map(|v| v.into_iter().map(|x| x as i64).collect()).collect(),
        notes: "downloaded from the LMFDB".into(),
    };
    orbit.validate()?;
    Ok(orbit)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels() {
        assert_eq!(parse_label("23.2.a.a").unwrap(), (23, 2));
        assert!(parse_label("23.2.b.a").is_err());
        assert!(matches!(fetch_orbit("1.2.a.a", 100), Err(Error::UnsupportedOrbit(_))));
        assert!(matches!(fetch_orbit("11.4.a.a", 100), Err(Error::UnsupportedOrbit(_))));
    }

    #[test]
    fn golden_roots() {
        let r = approximate_roots(&[-1, -1, 1]);
        assert!((r[0].0 + 0.618033988749895).abs() < 1e-14);
        assert!((r[1].0 - 1.618033988749895).abs() < 1e-14);
    }
}
