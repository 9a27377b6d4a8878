//! The group `(Z/p)^n` and its subgroups, via echelon forms over F_p.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::localfield::padic::mod_inverse_small;

/// An element of `G ≅ (Z/p)^n`, written additively.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GaloisVector(pub Vec<u32>);

impl GaloisVector {
    pub fn zero(n: usize) -> Self {
        GaloisVector(vec![0; n])
    }

    pub fn basis(n: usize, i: usize) -> Self {
        let mut v = vec![0; n];
        v[i] = 1;
        GaloisVector(v)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn add(&self, other: &Self, p: u32) -> Self {
        GaloisVector(self.0.iter().zip(&other.0).map(|(a, b)| (a + b) % p).collect())
    }

    pub fn scale(&self, k: u32, p: u32) -> Self {
        GaloisVector(self.0.iter().map(|a| (a * k) % p).collect())
    }

    pub fn dot(&self, other: &[u32], p: u32) -> u32 {
        self.0.iter().zip(other).map(|(a, b)| a * b).sum::<u32>() % p
    }

    /// Mixed-radix index `Σ c_i p^i`.
    pub fn index(&self, p: u32) -> usize {
        self.0.iter().rev().fold(0usize, |acc, &c| acc * p as usize + c as usize)
    }

    pub fn from_index(mut idx: usize, n: usize, p: u32) -> Self {
        let mut v = Vec::with_capacity(n);
        for _ in 0..n {
            v.push((idx % p as usize) as u32);
            idx /= p as usize;
        }
        GaloisVector(v)
    }
}

impl fmt::Display for GaloisVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Reduced row echelon form over F_p; returns the nonzero rows.
pub(crate) fn echelon(rows: &[Vec<u32>], n: usize, p: u32) -> Vec<Vec<u32>> {
    let mut m: Vec<Vec<u32>> = rows.iter().map(|r| r.iter().map(|c| c % p).collect()).collect();
    let mut rank = 0;
    for col in 0..n {
        let Some(piv) = (rank..m.len()).find(|&r| m[r][col] != 0) else { continue };
        m.swap(rank, piv);
        let inv = mod_inverse_small(m[rank][col] as u64, p);
        for c in 0..n {
            m[rank][c] = m[rank][c] * inv % p;
        }
        for r in 0..m.len() {
            if r != rank && m[r][col] != 0 {
                let f = m[r][col];
                for c in 0..n {
                    m[r][c] = (m[r][c] + p * p - f * m[rank][c] % p) % p;
                }
            }
        }
        rank += 1;
    }
    m.truncate(rank);
    m
}

/// A subgroup of `(Z/p)^n`, stored by its reduced echelon basis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subgroup {
    pub n: usize,
    pub p: u32,
    basis: Vec<GaloisVector>,
}

impl Subgroup {
    pub fn span(n: usize, p: u32, gens: &[GaloisVector]) -> Self {
        let rows: Vec<Vec<u32>> = gens.iter().map(|g| g.0.clone()).collect();
        let basis = echelon(&rows, n, p).into_iter().map(GaloisVector).collect();
        Subgroup { n, p, basis }
    }

    pub fn trivial(n: usize, p: u32) -> Self {
        Subgroup { n, p, basis: Vec::new() }
    }

    pub fn full(n: usize, p: u32) -> Self {
        Subgroup::span(n, p, &(0..n).map(|i| GaloisVector::basis(n, i)).collect::<Vec<_>>())
    }

    pub fn basis(&self) -> &[GaloisVector] {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn order(&self) -> usize {
        (self.p as usize).pow(self.basis.len() as u32)
    }

    pub fn contains(&self, g: &GaloisVector) -> bool {
        let mut gens = self.basis.clone();
        gens.push(g.clone());
        echelon(&gens.iter().map(|v| v.0.clone()).collect::<Vec<_>>(), self.n, self.p).len() == self.rank()
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.basis.iter().all(|b| other.contains(b))
    }

    /// All elements, in lexicographic order of coefficient tuples.
    pub fn elements(&self) -> Vec<GaloisVector> {
        let mut out = vec![GaloisVector::zero(self.n)];
        for b in &self.basis {
            let mut next = Vec::with_capacity(out.len() * self.p as usize);
            for k in 0..self.p {
                let step = b.scale(k, self.p);
                next.extend(out.iter().map(|x| x.add(&step, self.p)));
            }
            out = next;
        }
        out.sort();
        out
    }

    /// Basis of `{d : d·h = 0 for all h ∈ H}`, the exponent vectors of
    /// characters (Kummer) or linear forms (Artin–Schreier) trivial on `H`.
    pub fn annihilator(&self) -> Vec<Vec<u32>> {
        let p = self.p;
        let n = self.n;
        let pivots: Vec<usize> = self.basis.iter().map(|b| b.0.iter().position(|&c| c != 0).unwrap()).collect();
        let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut d = vec![0u32; n];
                d[f] = 1;
                for (b, &pc) in self.basis.iter().zip(&pivots) {
                    d[pc] = (p - b.0[f] % p) % p;
                }
                d
            })
            .collect()
    }

    /// Extend `self` to a subgroup of order `p·|self|` inside `within`, using
    /// the lexicographically first element of `within` not already in `self`.
    pub fn extend_within(&self, within: &Subgroup) -> Option<(Subgroup, GaloisVector)> {
        within.elements().into_iter().find(|g| !self.contains(g)).map(|g| {
            let mut gens = self.basis.clone();
            gens.push(g.clone());
            (Subgroup::span(self.n, self.p, &gens), g)
        })
    }

    /// All subgroups of index `p` in the full group, i.e. kernels of the
    /// nonzero linear forms up to scaling.
    pub fn index_p_subgroups(n: usize, p: u32) -> Vec<Subgroup> {
        let total = (p as usize).pow(n as u32);
        let mut out = Vec::new();
        for idx in 1..total {
            let d = GaloisVector::from_index(idx, n, p);
            if d.0.iter().find(|&&c| c != 0) != Some(&1) {
                continue;
            }
            let members: Vec<GaloisVector> =
                (0..total).map(|i| GaloisVector::from_index(i, n, p)).filter(|g| g.dot(&d.0, p) == 0).collect();
            out.push(Subgroup::span(n, p, &members));
        }
        out
    }
}

impl fmt::Display for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.basis.iter().map(|b| b.to_string()).collect();
        write!(f, "<{}>", parts.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_p_to_the_rank() {
        let g = Subgroup::span(3, 3, &[GaloisVector(vec![1, 2, 0]), GaloisVector(vec![2, 1, 0])]);
        assert_eq!(g.rank(), 1);
        assert_eq!(g.order(), 3);
        assert_eq!(g.elements().len(), 3);
        assert!(g.contains(&GaloisVector(vec![2, 1, 0])));
        assert!(!g.contains(&GaloisVector(vec![1, 1, 0])));
    }

    #[test]
    fn annihilator_is_orthogonal_complement() {
        let p = 3;
        let h = Subgroup::span(3, p, &[GaloisVector(vec![1, 1, 0])]);
        let ann = h.annihilator();
        assert_eq!(ann.len(), 2);
        for d in &ann {
            for g in h.elements() {
                assert_eq!(g.dot(d, p), 0);
            }
        }
    }

    #[test]
    fn index_p_subgroup_count() {
        // (p^n - 1)/(p - 1) hyperplanes
        assert_eq!(Subgroup::index_p_subgroups(2, 2).len(), 3);
        assert_eq!(Subgroup::index_p_subgroups(2, 3).len(), 4);
        assert!(Subgroup::index_p_subgroups(3, 2).iter().all(|h| h.order() == 4));
    }

    #[test]
    fn index_round_trip() {
        for idx in 0..27 {
            assert_eq!(GaloisVector::from_index(idx, 3, 3).index(3), idx);
        }
    }
}
