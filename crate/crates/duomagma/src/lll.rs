//! Exact-rational LLL reduction of small integer lattice bases.
//!
//! Used as a relation-finding strategy only; every candidate it produces is
//! re-checked exactly by the caller, so reduction quality affects
//! completeness, never soundness.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::rational::Rational;

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

fn to_rational(v: &[BigInt]) -> Vec<Rational> {
    v.iter().map(|x| Rational::int(x.clone())).collect()
}

/// Gram-Schmidt data: `mu[i][j]` coefficients and squared norms of the
/// orthogonalized vectors.
fn gram_schmidt(basis: &[Vec<BigInt>]) -> (Vec<Vec<Rational>>, Vec<Rational>) {
    let k = basis.len();
    let mut ortho: Vec<Vec<Rational>> = Vec::with_capacity(k);
    let mut mu = vec![vec![Rational::zero(); k]; k];
    let mut norms = Vec::with_capacity(k);
    for i in 0..k {
        let mut v = to_rational(&basis[i]);
        for j in 0..i {
            let coeff = if norms[j] == Rational::zero() {
                Rational::zero()
            } else {
                &dot(&to_rational(&basis[i]), &ortho[j]) / &norms[j]
            };
            mu[i][j] = coeff.clone();
            for (x, o) in v.iter_mut().zip(&ortho[j]) {
                *x = &*x - &(&coeff * o);
            }
        }
        let n = dot(&v, &v);
        norms.push(n);
        ortho.push(v);
    }
    (mu, norms)
}

fn round_to_int(r: &Rational) -> BigInt {
    (r + &Rational::new(1, 2)).floor()
}

/// LLL with the classical delta = 3/4, over exact rationals. Returns the
/// reduced basis (rows). The input rows must be linearly independent.
pub fn lll_reduce(mut basis: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    let n = basis.len();
    if n <= 1 {
        return basis;
    }
    let delta = Rational::new(3, 4);
    let mut k = 1usize;
    let (mut mu, mut norms) = gram_schmidt(&basis);
    while k < n {
        // size reduction
        for j in (0..k).rev() {
            let r = round_to_int(&mu[k][j]);
            if !r.is_zero() {
                for idx in 0..basis[k].len() {
                    let delta_e = &r * &basis[j][idx];
                    basis[k][idx] = &basis[k][idx] - delta_e;
                }
                let (m2, n2) = gram_schmidt(&basis);
                mu = m2;
                norms = n2;
            }
        }
        let lovasz = &(&delta - &(&mu[k][k - 1] * &mu[k][k - 1])) * &norms[k - 1];
        if norms[k] >= lovasz {
            k += 1;
        } else {
            basis.swap(k, k - 1);
            let (m2, n2) = gram_schmidt(&basis);
            mu = m2;
            norms = n2;
            k = k.max(2) - 1;
        }
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect()
    }

    #[allow(clippy::ptr_arg)] // named-fn argument to Iterator::map over &Vec items
    fn norm2(v: &Vec<BigInt>) -> BigInt {
        v.iter().map(|x| x * x).sum()
    }

    #[test]
    fn reduces_to_shorter_vectors() {
        let basis = big(&[&[1, 1, 1], &[-1, 0, 2], &[3, 5, 6]]);
        let reduced = lll_reduce(basis.clone());
        let before: BigInt = basis.iter().map(norm2).max().unwrap();
        let after: BigInt = reduced.iter().map(norm2).max().unwrap();
        assert!(after <= before);
        // classical example: the reduced basis contains a vector of norm <= 2
        let min = reduced.iter().map(norm2).min().unwrap();
        assert!(min <= BigInt::from(3));
    }

    #[test]
    fn finds_integer_relation_direction() {
        // rows [15*y_i | e_i] for y = (3/7 scaled differently): relation lattice
        let basis = big(&[&[6, 1, 0], &[5, 0, 1]]);
        let reduced = lll_reduce(basis);
        // some reduced vector has a tiny first coordinate
        assert!(reduced
            .iter()
            .any(|v| *v[0].magnitude() <= num_bigint::BigUint::from(1u32)));
    }

    #[test]
    fn identity_basis_is_stable() {
        let basis = big(&[&[1, 0], &[0, 1]]);
        assert_eq!(lll_reduce(basis.clone()), basis);
    }
}
