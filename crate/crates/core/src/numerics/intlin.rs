use super::{rational_reconstruct, Rational};
use crate::error::{Error, Result};
use rug::Float;

/// Integer matrix, row-major.
pub type IntMat = Vec<Vec<i128>>;

fn overflow() -> Error {
    Error::InvariantViolation("integer overflow in lattice reduction".into())
}

/// Column-style echelon reduction of `a` (m x n) by unimodular column
/// operations.  Returns the reduced matrix, the transform U with a*U equal to
/// the reduced matrix, and the rank.
fn column_echelon(a: &[Vec<i128>], n: usize) -> Result<(IntMat, IntMat, usize)> {
    let m = a.len();
    let mut a: IntMat = a.to_vec();
    let mut u: IntMat = (0..n).map(|i| (0..n).map(|j| i128::from(i == j)).collect()).collect();
    let col_axpy = |mat: &mut IntMat, dst: usize, src: usize, q: i128| -> Result<()> {
        for row in mat.iter_mut() {
            row[dst] = row[dst].checked_sub(q.checked_mul(row[src]).ok_or_else(overflow)?).ok_or_else(overflow)?;
        }
        Ok(())
    };
    let swap = |mat: &mut IntMat, x: usize, y: usize| {
        for row in mat.iter_mut() {
            row.swap(x, y);
        }
    };
    let mut r = 0;
    for i in 0..m {
        if r == n {
            break;
        }
        loop {
            let piv = (r..n).filter(|&j| a[i][j] != 0).min_by_key(|&j| a[i][j].abs());
            let Some(piv) = piv else { break };
            swap(&mut a, r, piv);
            swap(&mut u, r, piv);
            let mut done = true;
            for j in r + 1..n {
                if a[i][j] != 0 {
                    let q = a[i][j].div_euclid(a[i][r]);
                    col_axpy(&mut a, j, r, q)?;
                    col_axpy(&mut u, j, r, q)?;
                    if a[i][j] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if (r..n).any(|j| a[i][j] != 0) {
            r += 1;
        }
    }
    Ok((a, u, r))
}

fn normalize_sign(v: &mut [i128]) {
    if let Some(&first) = v.iter().find(|&&x| x != 0) {
        if first < 0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

/// Z-basis of {x in Z^n : A x = 0} for a rational matrix A, LLL-reduced.
pub fn integer_nullspace(a: &[Vec<Rational>]) -> Result<IntMat> {
    let n = a.first().map_or(0, Vec::len);
    let mut int_rows = Vec::with_capacity(a.len());
    for row in a {
        let l = row.iter().fold(1i128, |acc, q| acc / super::rational::gcd(acc, q.den()) * q.den());
        int_rows.push(row.iter().map(|q| q.num() * (l / q.den())).collect::<Vec<_>>());
    }
    let (_, u, r) = column_echelon(&int_rows, n)?;
    let mut basis: IntMat = (r..n).map(|j| u.iter().map(|row| row[j]).collect()).collect();
    basis = lll_reduce(&basis);
    basis.iter_mut().for_each(|v| normalize_sign(v));
    Ok(basis)
}

/// Integer kernel of a real matrix whose entries are recognized as rationals
/// with denominator at most `max_den`.
pub fn integer_nullspace_real(a: &[Vec<Float>], max_den: u64, tol: &Float) -> Result<IntMat> {
    let mut q = Vec::with_capacity(a.len());
    for row in a {
        let mut qr = Vec::with_capacity(row.len());
        for x in row {
            let r = rational_reconstruct(x, max_den, tol)
                .ok_or_else(|| Error::ReconstructionFailed(x.to_string_radix(10, Some(20))))?;
            qr.push(r);
        }
        q.push(qr);
    }
    integer_nullspace(&q)
}

/// Basis of the lattice spanned by the given integer vectors of length `dim`.
pub fn hnf_basis(vectors: &[Vec<i128>], dim: usize) -> Result<IntMat> {
    let a: IntMat = (0..dim).map(|i| vectors.iter().map(|v| v[i]).collect()).collect();
    let (e, _, r) = column_echelon(&a, vectors.len())?;
    Ok((0..r).map(|j| e.iter().map(|row| row[j]).collect()).collect())
}

/// LLL reduction (delta = 3/4) of a list of integer vectors, using f64 Gram-Schmidt.
/// Intended for the small dimensions met in polarization searches.
pub fn lll_reduce(basis: &[Vec<i128>]) -> IntMat {
    let mut b: IntMat = basis.to_vec();
    let k_max = b.len();
    if k_max < 2 {
        return b;
    }
    let dot = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>();
    let to_f = |v: &[i128]| v.iter().map(|&x| x as f64).collect::<Vec<_>>();
    let gso = |b: &IntMat| {
        let mut bs: Vec<Vec<f64>> = Vec::new();
        let mut mu = vec![vec![0.0; b.len()]; b.len()];
        for i in 0..b.len() {
            let mut v = to_f(&b[i]);
            for j in 0..i {
                mu[i][j] = dot(&to_f(&b[i]), &bs[j]) / dot(&bs[j], &bs[j]).max(1e-300);
                for (vk, bk) in v.iter_mut().zip(&bs[j]) {
                    *vk -= mu[i][j] * bk;
                }
            }
            bs.push(v);
        }
        (bs, mu)
    };
    let mut k = 1;
    let mut guard = 0;
    while k < k_max && guard < 10_000 {
        guard += 1;
        for j in (0..k).rev() {
            let (_, mu) = gso(&b);
            let q = mu[k][j].round() as i128;
            if q != 0 {
                let bj = b[j].clone();
                for (x, y) in b[k].iter_mut().zip(&bj) {
                    *x -= q * y;
                }
            }
        }
        let (bs, mu) = gso(&b);
        let lhs = dot(&bs[k], &bs[k]);
        let rhs = (0.75 - mu[k][k - 1] * mu[k][k - 1]) * dot(&bs[k - 1], &bs[k - 1]);
        if lhs >= rhs {
            k += 1;
        } else {
            b.swap(k, k - 1);
            k = (k - 1).max(1);
        }
    }
    b
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn apply(a: &[Vec<i128>], x: &[i128]) -> Vec<i128> {
        a.iter().map(|row| row.iter().zip(x).map(|(p, q)| p * q).sum()).collect()
    }

    #[test]
    fn kernel_of_one_minus_one() {
        let a = vec![vec![Rational::integer(1), Rational::integer(-1)]];
        assert_eq!(integer_nullspace(&a).unwrap(), vec![vec![1, 1]]);
    }

    #[test]
    fn kernel_of_random_three_by_five() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let a: IntMat = (0..3).map(|_| (0..5).map(|_| rng.gen_range(-9..=9)).collect()).collect();
            let q: Vec<Vec<Rational>> =
                a.iter().map(|r| r.iter().map(|&x| Rational::integer(x)).collect()).collect();
            let k = integer_nullspace(&q).unwrap();
            // generic rank 3
            assert_eq!(k.len(), 2);
            for v in &k {
                assert!(apply(&a, v).iter().all(|&x| x == 0));
            }
            // saturation: a random integer kernel vector lies in the span
            let mut cols = k.clone();
            let combo: Vec<i128> = (0..5).map(|i| 3 * k[0][i] - 2 * k[1][i]).collect();
            cols.push(combo);
            assert_eq!(hnf_basis(&cols, 5).unwrap().len(), 2);
        }
    }

    #[test]
    fn kernel_with_rational_entries() {
        let a = vec![vec![Rational::new(1, 2), Rational::new(1, 3), Rational::integer(0)]];
        let k = integer_nullspace(&a).unwrap();
        assert_eq!(k.len(), 2);
        for v in &k {
            assert_eq!(3 * v[0] + 2 * v[1], 0);
        }
    }

    #[test]
    fn real_entries_must_be_recognizable() {
        let tol = Float::with_val(128, 1e-20);
        let pi = Float::with_val(128, rug::float::Constant::Pi);
        let a = vec![vec![Float::with_val(128, 1), pi]];
        assert!(matches!(integer_nullspace_real(&a, 100, &tol), Err(Error::ReconstructionFailed(_))));
    }

    #[test]
    fn hnf_of_redundant_generators() {
        let v = vec![vec![2, 0], vec![0, 3], vec![4, 3], vec![1, 1]];
        let b = hnf_basis(&v, 2).unwrap();
        assert_eq!(b.len(), 2);
        let det = b[0][0] * b[1][1] - b[0][1] * b[1][0];
        assert_eq!(det.abs(), 1);
    }
}
