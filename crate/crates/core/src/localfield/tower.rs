//! Flattening an Eisenstein tower into one absolute Eisenstein polynomial.
//!
//! If `π'` is a root of `E(x) ∈ K[x]` with `K = Q_p(π)`, then `K(π') = Q_p(π')`
//! and the minimal polynomial of `π'` over `Q_p` is the norm of `E` from
//! `K[x]` down to `Q_p[x]`, i.e. the determinant of multiplication by `E`
//! on the `Q_p[x]`-basis `1, π, …, π^{e-1}`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::padic::{vp_bigint, PadicCtx};

type Poly = Vec<BigInt>;

fn trim(mut a: Poly) -> Poly {
    while a.last().is_some_and(|c| c.is_zero()) {
        a.pop();
    }
    a
}

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

fn poly_add(a: &Poly, b: &Poly, sign: i32) -> Poly {
    let n = a.len().max(b.len());
    let mut out = vec![BigInt::zero(); n];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        if sign >= 0 {
            out[i] += y;
        } else {
            out[i] -= y;
        }
    }
    trim(out)
}

/// Cofactor-expansion determinant over Z[x]; tower layers are small.
fn poly_det(m: &[Vec<Poly>]) -> Poly {
    let n = m.len();
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc: Poly = Vec::new();
    for col in 0..n {
        if m[0][col].is_empty() {
            continue;
        }
        let minor: Vec<Vec<Poly>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|(c, _)| *c != col).map(|(_, x)| x.clone()).collect())
            .collect();
        let term = poly_mul(&m[0][col], &poly_det(&minor));
        acc = poly_add(&acc, &term, if col % 2 == 0 { 1 } else { -1 });
    }
    acc
}

/// Absolute Eisenstein polynomial (monic, coefficients `a_0..a_{E-1}`) of a
/// root of `coeffs` (bodies over `ctx`, low degree first, monic).
pub(crate) fn flatten(ctx: &PadicCtx, coeffs: &[Vec<BigInt>]) -> Vec<BigInt> {
    let e = ctx.e;
    // m[j][l] = coefficient of π^j in π^l · E(x), as a polynomial in x.
    let mut m: Vec<Vec<Poly>> = vec![vec![Vec::new(); e]; e];
    for l in 0..e {
        for (k, c) in coeffs.iter().enumerate() {
            let shifted = ctx.mul_pi_pow(c, l as u64);
            for (j, cj) in shifted.iter().enumerate() {
                if cj.is_zero() {
                    continue;
                }
                let entry = &mut m[j][l];
                if entry.len() <= k {
                    entry.resize(k + 1, BigInt::zero());
                }
                entry[k] += cj;
            }
        }
        for row in m.iter_mut() {
            let t = std::mem::take(&mut row[l]);
            row[l] = trim(t);
        }
    }
    let mut det = poly_det(&m);
    if det.last().is_some_and(|c| c.is_negative()) {
        det = det.into_iter().map(|c| -c).collect();
    }
    debug_assert!(det.last().is_some_and(|c| c.is_one()));
    det.pop();
    det
}

pub(crate) fn is_eisenstein_over_zp(p: u32, a: &[BigInt]) -> bool {
    !a.is_empty()
        && !a[0].is_zero()
        && vp_bigint(&a[0], p) == 1
        && a[1..].iter().all(|c| c.is_zero() || vp_bigint(c, p) >= 1)
}
