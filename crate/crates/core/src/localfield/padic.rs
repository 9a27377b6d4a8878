//! Integral bodies for finite totally ramified extensions of the p-adics.
//!
//! A body is a coefficient vector `c_0..c_{e-1}` standing for `Σ c_j π^j`,
//! where `π` is a root of the absolute Eisenstein polynomial
//! `E(x) = x^e + a_{e-1} x^{e-1} + … + a_0`. Because `Z_p[π]` is the full
//! valuation ring, the ideal `π^M` is exactly the set of bodies with
//! `e·v_p(c_j) + j ≥ M` for every `j`, which gives coefficientwise reduction
//! and an O(e) valuation read.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Debug)]
pub(crate) struct PadicCtx {
    pub p: u32,
    pub e: usize,
    /// `a_0..a_{e-1}` of the monic Eisenstein polynomial.
    pub eis: Vec<BigInt>,
    /// `U = π^e / p`, an exact unit body.
    pub u: Vec<BigInt>,
    /// Inverse of the residue of `U` in F_p.
    pub u_res_inv: u32,
    ppow: Vec<BigInt>,
    /// `U^q` for small `q`, so that `π^{qe} = p^q U^q` is one product.
    upow: Vec<Vec<BigInt>>,
}

pub(crate) fn mod_inverse_small(a: u64, p: u32) -> u32 {
    let p = p as u64;
    let a = a % p;
    debug_assert!(a != 0);
    let mut result = 1u64;
    let mut base = a;
    let mut exp = p - 2;
    while exp > 0 {
        if exp & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    result as u32
}

pub(crate) fn vp_bigint(n: &BigInt, p: u32) -> u64 {
    debug_assert!(!n.is_zero());
    if p == 2 {
        return n.trailing_zeros().unwrap_or(0);
    }
    let mut n = n.magnitude().clone();
    if !(&n % p).is_zero() {
        return 0;
    }
    // Strip the largest power of p that fits in a u32 while it divides.
    let (mut chunk, mut width) = (p, 1u64);
    while let Some(next) = chunk.checked_mul(p) {
        chunk = next;
        width += 1;
    }
    let mut k = 0;
    while (&n % chunk).is_zero() {
        n /= chunk;
        k += width;
    }
    while (&n % p).is_zero() {
        n /= p;
        k += 1;
    }
    k
}

pub(crate) fn residue_small(n: &BigInt, p: u32) -> u32 {
    let r = n.mod_floor(&BigInt::from(p));
    r.to_u32_digits().1.first().copied().unwrap_or(0)
}

impl PadicCtx {
    pub fn new(p: u32, eis: Vec<BigInt>) -> Self {
        let e = eis.len();
        let pb = BigInt::from(p);
        let u: Vec<BigInt> = eis.iter().map(|a| -(a / &pb)).collect();
        let u_res = residue_small(&u[0], p);
        let mut ctx = PadicCtx { p, e, eis, u, u_res_inv: mod_inverse_small(u_res as u64, p), ppow: Vec::new(), upow: Vec::new() };
        let mut acc = BigInt::one();
        for _ in 0..256 {
            ctx.ppow.push(acc.clone());
            acc *= &pb;
        }
        if e > 1 {
            let mut acc = ctx.constant(BigInt::one());
            for _ in 0..64 {
                let next = ctx.mul(&acc, &ctx.u);
                ctx.upow.push(std::mem::replace(&mut acc, next));
            }
        }
        ctx
    }

    pub fn ppow(&self, k: u64) -> BigInt {
        match self.ppow.get(k as usize) {
            Some(x) => x.clone(),
            None => num_traits::pow(BigInt::from(self.p), k as usize),
        }
    }

    pub fn zero(&self) -> Vec<BigInt> {
        vec![BigInt::zero(); self.e]
    }

    pub fn constant(&self, c: BigInt) -> Vec<BigInt> {
        let mut b = self.zero();
        b[0] = c;
        b
    }

    pub fn is_zero(b: &[BigInt]) -> bool {
        b.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }

    pub fn sub(&self, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        a.iter().zip(b).map(|(x, y)| x - y).collect()
    }

    pub fn mul_pi(&self, b: &mut Vec<BigInt>) {
        let top = b.pop().expect("body has length e");
        b.insert(0, BigInt::zero());
        if !top.is_zero() {
            for (c, a) in b.iter_mut().zip(&self.eis) {
                *c -= a * &top;
            }
        }
    }

    pub fn mul_pi_pow(&self, b: &[BigInt], d: u64) -> Vec<BigInt> {
        let mut out = b.to_vec();
        if self.e == 1 {
            out[0] *= self.ppow(d);
            return out;
        }
        let (mut q, r) = (d / self.e as u64, d % self.e as u64);
        for _ in 0..r {
            self.mul_pi(&mut out);
        }
        while q > 0 {
            let step = q.min(self.upow.len() as u64 - 1);
            out = self.mul(&out, &self.upow[step as usize]);
            let pq = self.ppow(step);
            out.iter_mut().for_each(|c| *c *= &pq);
            q -= step;
        }
        out
    }

    pub fn mul(&self, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        let e = self.e;
        if e == 1 {
            return vec![&a[0] * &b[0]];
        }
        let mut prod = vec![BigInt::zero(); 2 * e - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if !y.is_zero() {
                    prod[i + j] += x * y;
                }
            }
        }
        for k in (e..2 * e - 1).rev() {
            let top = std::mem::take(&mut prod[k]);
            if top.is_zero() {
                continue;
            }
            for (j, a) in self.eis.iter().enumerate() {
                prod[k - e + j] -= a * &top;
            }
        }
        prod.truncate(e);
        prod
    }

    pub fn scale(&self, a: &[BigInt], k: &BigInt) -> Vec<BigInt> {
        a.iter().map(|c| c * k).collect()
    }

    /// Valuation of a body in π-units, `None` for zero.
    pub fn body_val(&self, b: &[BigInt]) -> Option<i64> {
        b.iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| self.e as i64 * vp_bigint(c, self.p) as i64 + j as i64)
            .min()
    }

    /// Reduce modulo `π^rel`.
    pub fn reduce(&self, b: &mut [BigInt], rel: i64) {
        let e = self.e as i64;
        for (j, c) in b.iter_mut().enumerate() {
            let need = rel - j as i64;
            if need <= 0 {
                *c = BigInt::zero();
            } else {
                let k = (need + e - 1) / e;
                *c = c.mod_floor(&self.ppow(k as u64));
            }
        }
    }

    /// Symmetric representatives, used when probing whether a truncated
    /// body is an exact small-integer polynomial.
    pub fn reduce_symmetric(&self, b: &mut [BigInt], rel: i64) {
        let e = self.e as i64;
        for (j, c) in b.iter_mut().enumerate() {
            let need = rel - j as i64;
            if need <= 0 {
                *c = BigInt::zero();
                continue;
            }
            let m = self.ppow(((need + e - 1) / e) as u64);
            let mut r = c.mod_floor(&m);
            if &r * 2 > m {
                r -= &m;
            }
            *c = r;
        }
    }

    /// Split a nonzero body of valuation `w` as `π^{-m} p^{q} B''` with
    /// `B''` a unit body obtained by exact integer division.
    pub fn unit_part(&self, b: &[BigInt], w: i64) -> (i64, u64, Vec<BigInt>) {
        let e = self.e as i64;
        let m = (e - w.rem_euclid(e)) % e;
        let q = ((w + m) / e) as u64;
        let shifted = self.mul_pi_pow(b, m as u64);
        let pq = self.ppow(q);
        let unit = shifted.iter().map(|c| c / &pq).collect();
        (m, q, unit)
    }

    /// Residue of `B / π^w` in F_p.
    pub fn lead_digit(&self, b: &[BigInt], w: i64) -> u32 {
        let (_, q, unit) = self.unit_part(b, w);
        let r = residue_small(&unit[0], self.p) as u64;
        let mut f = 1u64;
        for _ in 0..(q % (self.p as u64 - 1).max(1)) {
            f = f * self.u_res_inv as u64 % self.p as u64;
        }
        (r * f % self.p as u64) as u32
    }

    pub fn is_plus_minus_one(b: &[BigInt]) -> bool {
        b[0].abs().is_one() && b[1..].iter().all(|c| c.is_zero())
    }

    /// Inverse of a unit body modulo `π^rel` by Newton iteration.
    pub fn inv_unit(&self, b: &[BigInt], rel: i64) -> Vec<BigInt> {
        let c0 = residue_small(&b[0], self.p);
        let mut x = self.constant(BigInt::from(mod_inverse_small(c0 as u64, self.p)));
        let mut cur = 1i64;
        let two = self.constant(BigInt::from(2));
        while cur < rel {
            cur = (cur * 2).min(rel);
            let bx = self.mul(b, &x);
            let mut t = self.sub(&two, &bx);
            self.reduce(&mut t, cur);
            x = self.mul(&x, &t);
            self.reduce(&mut x, cur);
        }
        self.reduce(&mut x, rel.max(1));
        x
    }

    /// `Σ d_j π^j` by Horner evaluation.
    pub fn eval_digits(&self, digits: &[u32]) -> Vec<BigInt> {
        let mut acc = self.zero();
        for d in digits.iter().rev() {
            self.mul_pi(&mut acc);
            acc[0] += *d;
        }
        acc
    }

    pub fn pow_body(&self, b: &[BigInt], k: u64) -> Vec<BigInt> {
        let mut result = self.constant(BigInt::one());
        let mut base = b.to_vec();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = self.mul(&result, &base);
            }
            k >>= 1;
            if k > 0 {
                base = self.mul(&base, &base);
            }
        }
        result
    }
}
