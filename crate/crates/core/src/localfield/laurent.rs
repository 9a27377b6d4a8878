//! Truncated power-series bodies over the prime field F_p.
//!
//! Bodies are kept normalized: either empty (zero) or with a nonzero
//! constant coefficient, the exponent shift living in the element.

use super::padic::mod_inverse_small;

pub(crate) fn normalize(body: &mut Vec<u32>) -> i64 {
    let lead = body.iter().position(|&c| c != 0);
    match lead {
        None => {
            body.clear();
            0
        }
        Some(k) => {
            body.drain(..k);
            k as i64
        }
    }
}

pub(crate) fn add(p: u32, a: &[u32], a_off: usize, b: &[u32], b_off: usize, len: usize) -> Vec<u32> {
    let mut out = vec![0u32; len];
    for (i, c) in a.iter().enumerate() {
        let k = i + a_off;
        if k < len {
            out[k] = *c;
        }
    }
    for (i, c) in b.iter().enumerate() {
        let k = i + b_off;
        if k < len {
            out[k] = (out[k] + c) % p;
        }
    }
    out
}

pub(crate) fn neg(p: u32, a: &[u32]) -> Vec<u32> {
    a.iter().map(|&c| (p - c) % p).collect()
}

pub(crate) fn mul(p: u32, a: &[u32], b: &[u32], len: usize) -> Vec<u32> {
    let n = (a.len() + b.len()).saturating_sub(1).min(len);
    let mut out = vec![0u64; n];
    let pp = p as u64;
    for (i, &x) in a.iter().enumerate() {
        if x == 0 || i >= n {
            continue;
        }
        for (j, &y) in b.iter().enumerate().take(n - i) {
            out[i + j] += x as u64 * y as u64;
            if out[i + j] >= 1 << 62 {
                out[i + j] %= pp;
            }
        }
    }
    out.into_iter().map(|c| (c % pp) as u32).collect()
}

pub(crate) fn scale(p: u32, a: &[u32], k: u32) -> Vec<u32> {
    a.iter().map(|&c| (c as u64 * k as u64 % p as u64) as u32).collect()
}

/// Inverse of a unit series to `len` terms.
pub(crate) fn inv_unit(p: u32, a: &[u32], len: usize) -> Vec<u32> {
    let c0inv = mod_inverse_small(a[0] as u64, p) as u64;
    let pp = p as u64;
    let mut out = vec![0u32; len];
    for k in 0..len {
        // out[k] = c0^{-1} (δ_{k0} - Σ_{i=1..k} a_i out[k-i])
        let mut s: u64 = if k == 0 { 1 } else { 0 };
        for i in 1..=k.min(a.len().saturating_sub(1)) {
            s = (s + pp * pp - a[i] as u64 * out[k - i] as u64 % pp) % pp;
        }
        out[k] = (s * c0inv % pp) as u32;
    }
    out
}
