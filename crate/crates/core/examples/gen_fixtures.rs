//! Regenerates the bundled newform fixtures under `data/orbits`.
//!
//! cargo run --release --example gen_fixtures -- [n_max]

use kleinian::newforms::{eta_product, NewformOrbit};
use std::collections::BTreeMap;
use std::path::Path;

type Q = (i128, i128);

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 { a.abs() } else { gcd(b, a % b) }
}

fn q(n: i128, d: i128) -> Q {
    let g = gcd(n, d).max(1) * d.signum();
    (n / g, d / g)
}
fn qadd(a: Q, b: Q) -> Q {
    q(a.0 * b.1 + b.0 * a.1, a.1 * b.1)
}
fn qmul(a: Q, b: Q) -> Q {
    q(a.0 * b.0, a.1 * b.1)
}

/// u + v*phi with phi^2 = phi + 1.
type G = (Q, Q);

fn gmul(a: G, b: G) -> G {
    let vv = qmul(a.1, b.1);
    (qadd(qmul(a.0, b.0), vv), qadd(qadd(qmul(a.0, b.1), qmul(a.1, b.0)), vv))
}
fn ginv(a: G) -> G {
    // conj(u + v phi) = (u + v) - v phi, norm = u^2 + uv - v^2
    let (u, v) = a;
    let norm = qadd(qadd(qmul(u, u), qmul(u, v)), qmul((-v.0, v.1), v));
    let ni = q(norm.1, norm.0);
    (qmul(qadd(u, v), ni), qmul((-v.0, v.1), ni))
}

fn theta_series(a: i64, b: i64, c: i64, n_max: usize) -> Vec<i128> {
    // a x^2 + b x y + c y^2, positive definite
    let mut t = vec![0i128; n_max + 1];
    let disc = (4 * a * c - b * b) as f64;
    let ymax = (4.0 * a as f64 * n_max as f64 / disc).sqrt() as i64 + 1;
    for y in -ymax..=ymax {
        let xmax = ((n_max as f64 / a as f64).sqrt() + (b * y).abs() as f64 / a as f64) as i64 + 2;
        for x in -xmax..=xmax {
            let v = a * x * x + b * x * y + c * y * y;
            if v >= 0 && (v as usize) <= n_max {
                t[v as usize] += 1;
            }
        }
    }
    t
}

fn sparse_mul(a: &[i128], b: &[i128], n_max: usize) -> Vec<i128> {
    let nz: Vec<(usize, i128)> = a.iter().enumerate().filter(|(_, &x)| x != 0).map(|(i, &x)| (i, x)).collect();
    let mut out = vec![0i128; n_max + 1];
    for (j, &y) in b.iter().enumerate() {
        if y == 0 {
            continue;
        }
        for &(i, x) in &nz {
            if i + j > n_max {
                break;
            }
            out[i + j] += x * y;
        }
    }
    out
}

fn level27(n_max: usize) -> NewformOrbit {
    let s = eta_product(&[(3, 2), (9, 2)], n_max as i64).expect("eta product");
    let an = (1..=n_max as i64).map(|n| vec![s.coeff(n) as i64]).collect();
    NewformOrbit {
        label: "27.2.a.a".into(),
        level: 27,
        weight: 2,
        degree: 1,
        field_poly: vec![-1, 1],
        embeddings: vec![("1".into(), "0".into())],
        al_signs: BTreeMap::from([(27, -1)]),
        an,
        notes: "eta(3 tau)^2 eta(9 tau)^2".into(),
    }
}

fn level23(n_max: usize) -> NewformOrbit {
    let t1 = theta_series(1, 1, 6, n_max);
    let t2 = theta_series(2, 1, 3, n_max);
    let h: Vec<i128> = t1.iter().zip(&t2).map(|(a, b)| a - b).collect();
    let eta = eta_product(&[(1, 1), (23, 1)], n_max as i64).expect("eta product");
    for n in 1..=n_max {
        assert_eq!(h[n], 2 * eta.coeff(n as i64), "theta difference is not 2 eta(tau) eta(23 tau)");
    }
    let ga = sparse_mul(&h, &t1, n_max);
    let gb = sparse_mul(&h, &t2, n_max);
    assert_eq!((ga[1], gb[1]), (2, 2));
    // f = x ga + (1/2 - x) gb with a_2(f) = -phi
    let beta: G = ((0, 1), (-1, 1));
    let rhs: G = (qadd(beta.0, q(-gb[2], 2)), beta.1);
    let x = gmul(rhs, ginv((q(ga[2] - gb[2], 1), (0, 1))));
    let an = (1..=n_max)
        .map(|n| {
            let d = (q(ga[n] - gb[n], 1), (0, 1));
            let v = gmul(x, d);
            let u = qadd(v.0, q(gb[n], 2));
            assert!(u.1 == 1 && v.1 .1 == 1, "a_{n} is not integral");
            vec![u.0 as i64, v.1 .0 as i64]
        })
        .collect();
    NewformOrbit {
        label: "23.2.a.a".into(),
        level: 23,
        weight: 2,
        degree: 2,
        field_poly: vec![-1, -1, 1],
        embeddings: vec![
            ("-0.61803398874989484820458683436563811772030917980576286213544862".into(), "0".into()),
            ("1.6180339887498948482045868343656381177203091798057628621354486".into(), "0".into()),
        ],
        al_signs: BTreeMap::from([(23, -1)]),
        an,
        notes: "generator phi = (1 - sqrt 5)/2 in the first embedding; built from theta series of x^2+xy+6y^2 and 2x^2+xy+3y^2".into(),
    }
}

/// Residues of a + b sqrt(-2) with a odd, modulo 4 sqrt(-2): (a mod 8, b mod 4).
fn unit_group() -> Vec<(i64, i64)> {
    let mut g = Vec::new();
    for a in (1..8).step_by(2) {
        for b in 0..4 {
            g.push((a, b));
        }
    }
    g
}

fn umul(x: (i64, i64), y: (i64, i64)) -> (i64, i64) {
    let a = x.0 * y.0 - 2 * x.1 * y.1;
    let b = x.0 * y.1 + x.1 * y.0;
    (a.rem_euclid(8), b.rem_euclid(4))
}

/// Quartic characters of the unit group, as exponents of i.
fn quartic_characters() -> Vec<BTreeMap<(i64, i64), u8>> {
    let g = unit_group();
    let mut gens: Vec<(i64, i64)> = Vec::new();
    let mut span = vec![(1i64, 0i64)];
    for &x in &g {
        if !span.contains(&x) {
            gens.push(x);
            let mut next = span.clone();
            loop {
                let before = next.len();
                for s in next.clone() {
                    for &t in gens.iter() {
                        let p = umul(s, t);
                        if !next.contains(&p) {
                            next.push(p);
                        }
                    }
                }
                if next.len() == before {
                    break;
                }
            }
            span = next;
        }
    }
    let mut out = Vec::new();
    let k = gens.len();
    'assign: for code in 0..4usize.pow(k as u32) {
        let vals: Vec<u8> = (0..k).map(|i| ((code / 4usize.pow(i as u32)) % 4) as u8).collect();
        let mut chi: BTreeMap<(i64, i64), u8> = BTreeMap::from([((1, 0), 0)]);
        let mut frontier = vec![(1i64, 0i64)];
        while let Some(s) = frontier.pop() {
            for (i, &t) in gens.iter().enumerate() {
                let p = umul(s, t);
                let v = (chi[&s] + vals[i]) % 4;
                match chi.get(&p) {
                    Some(&w) if w != v => continue 'assign,
                    Some(_) => {}
                    None => {
                        chi.insert(p, v);
                        frontier.push(p);
                    }
                }
            }
        }
        for &x in &g {
            for &y in &g {
                if (chi[&x] + chi[&y]) % 4 != chi[&umul(x, y)] {
                    continue 'assign;
                }
            }
        }
        out.push(chi);
    }
    out
}

fn level256(n_max: usize) -> NewformOrbit {
    let key = |a: i64, b: i64| (a.rem_euclid(8), b.rem_euclid(4));
    // exponents of i: 1 -> 0, i -> 1, -1 -> 2, -i -> 3
    let wanted = [((-1, 0), 2u8), ((1, 1), 3), ((3, 1), 1), ((3, 2), 0), ((1, 3), 1)];
    let chars: Vec<_> = quartic_characters()
        .into_iter()
        .filter(|c| wanted.iter().all(|&((a, b), v)| c[&key(a, b)] == v))
        .collect();
    assert_eq!(chars.len(), 1, "character is not pinned down");
    let chi = &chars[0];
    let mut re = vec![(0i128, 0i128); n_max + 1];
    let mut im = vec![(0i128, 0i128); n_max + 1];
    let amax = (n_max as f64).sqrt() as i64 + 1;
    let bmax = (n_max as f64 / 2.0).sqrt() as i64 + 1;
    for a in (-amax..=amax).filter(|a| a % 2 != 0) {
        for b in -bmax..=bmax {
            let n = a * a + 2 * b * b;
            if n as usize > n_max {
                continue;
            }
            let n = n as usize;
            // chi * (a + b sqrt(-2)); real part in Z + Z sqrt 2, imaginary in Z + Z sqrt 2
            let (a, b) = (a as i128, b as i128);
            let (r, i) = match chi[&key(a as i64, b as i64)] {
                0 => ((a, 0), (0, b)),
                1 => ((0, -b), (a, 0)),
                2 => ((-a, 0), (0, -b)),
                _ => ((0, b), (-a, 0)),
            };
            re[n] = (re[n].0 + r.0, re[n].1 + r.1);
            im[n] = (im[n].0 + i.0, im[n].1 + i.1);
        }
    }
    let an = (1..=n_max)
        .map(|n| {
            assert_eq!(im[n], (0, 0), "imaginary part survives at {n}");
            assert!(re[n].0 % 2 == 0 && re[n].1 % 2 == 0);
            vec![(re[n].0 / 2) as i64, (re[n].1 / 2) as i64]
        })
        .collect();
    NewformOrbit {
        label: "256.2.a.e".into(),
        level: 256,
        weight: 2,
        degree: 2,
        field_poly: vec![-2, 0, 1],
        embeddings: vec![
            ("1.4142135623730950488016887242096980785696718753769480731766797".into(), "0".into()),
            ("-1.4142135623730950488016887242096980785696718753769480731766797".into(), "0".into()),
        ],
        // fixed numerically: L_256 is base-point independent only for this sign
        al_signs: BTreeMap::from([(256, -1)]),
        an,
        notes: "CM by Q(sqrt -2), generator sqrt 2; label inferred from the LMFDB ordering (four rational newforms precede the unique two-dimensional orbit); the Atkin-Lehner sign is the one for which L_256 is independent of the base point".into(),
    }
}

fn main() {
    let n_max: usize = std::env::args().nth(1).map(|s| s.parse().expect("n_max")).unwrap_or(20000);
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/orbits");
    std::fs::create_dir_all(&dir).expect("create data dir");
    for orbit in [level27(n_max), level23(n_max), level256(n_max)] {
        orbit.validate().expect("generated orbit is invalid");
        let path = dir.join(format!("{}.json", orbit.label));
        std::fs::write(&path, orbit.to_json().expect("serialize")).expect("write fixture");
        let head: Vec<_> = orbit.an.iter().take(12).collect();
        println!("{} -> {}  a_1..a_12 = {:?}", orbit.label, path.display(), head);
    }
}
