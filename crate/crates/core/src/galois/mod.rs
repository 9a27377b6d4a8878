//! `N = K(x_1, …, x_n)` as an explicit algebra of rank `p^n` over `K`, with
//! its `(Z/p)^n` Galois action.
//!
//! Elements are coordinate vectors over the monomials `x^J`, `J ∈ [0,p)^n`,
//! indexed in mixed radix `Σ j_i p^i`. All layers share one kind: Kummer
//! (`x_i^p = u_i`, needs `ζ_p ∈ K`) or Artin–Schreier (`x_i^p − x_i = f_i`,
//! characteristic `p`).

mod group;
mod subfield;
mod validate;


use num_integer::Integer;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Determinant, KMatrix};
use crate::localfield::padic::mod_inverse_small;
use crate::localfield::{Characteristic, GroundField, KElement, Scalar};

pub use group::{GaloisVector, Subgroup};
pub use subfield::Subfield;
pub use validate::{
    artin_schreier_outcome, kummer_outcome, validate_extension, Check, LineOutcome, LineReport, ValidationReport,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LayerKind {
    Kummer,
    ArtinSchreier,
}

/// One layer as written in a scenario: `x^p = datum` or `x^p − x = datum`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerSpec {
    pub kind: LayerKind,
    pub datum: Scalar,
}

impl LayerSpec {
    pub fn kummer(datum: Scalar) -> Self {
        LayerSpec { kind: LayerKind::Kummer, datum }
    }

    pub fn artin_schreier(datum: Scalar) -> Self {
        LayerSpec { kind: LayerKind::ArtinSchreier, datum }
    }
}

/// An element of `N`: coordinates over the monomial basis.
#[derive(Clone, Debug, PartialEq)]
pub struct NElement {
    coords: Vec<KElement>,
}

impl NElement {
    pub fn coords(&self) -> &[KElement] {
        &self.coords
    }

    pub fn from_coords(coords: Vec<KElement>) -> Self {
        NElement { coords }
    }

    pub fn is_exact(&self) -> bool {
        self.coords.iter().all(KElement::is_exact)
    }

    pub fn is_exact_zero(&self) -> bool {
        self.coords.iter().all(KElement::is_exact_zero)
    }

    /// Weakest coordinate precision, `None` if exact.
    pub fn precision(&self) -> Option<i64> {
        self.coords.iter().filter_map(KElement::precision).min()
    }
}

/// Product of two monomials: a list of `(target, coefficient)` with `None`
/// standing for the coefficient 1.
type Terms = Vec<(usize, Option<KElement>)>;

#[derive(Clone, Debug)]
pub struct ExtensionField {
    k: GroundField,
    kind: LayerKind,
    data: Vec<KElement>,
    n: usize,
    p: u32,
    dim: usize,
    table: Vec<Terms>,
    zeta_pows: Vec<KElement>,
    report: ValidationReport,
    pi: NElement,
    pi_inv: NElement,
    pi_pows: Vec<NElement>,
}

/// `b^e` in `F_p`; negative exponents need `b ≠ 0`.
fn mod_pow_small(b: u32, e: i64, p: u32) -> u32 {
    let b = b % p;
    if b == 0 {
        return u32::from(e == 0);
    }
    let e = e.rem_euclid(p as i64 - 1) as u32;
    (0..e).fold(1u32, |acc, _| acc * b % p)
}

impl ExtensionField {
    /// Build and validate `N` from scenario layers.
    pub fn build(k: &GroundField, layers: &[LayerSpec]) -> Result<Self> {
        let kind = match layers.first() {
            Some(l) => l.kind,
            None => default_kind(k),
        };
        if let Some(i) = layers.iter().position(|l| l.kind != kind) {
            return Err(Error::InvalidLayer { layer: i + 1, reason: "all layers must have the same kind".into() });
        }
        let data: Vec<KElement> = layers.iter().map(|l| k.from_scalar(&l.datum)).collect();
        Self::from_data(k, kind, data)
    }

    /// Build from layer data already in `K`.
    pub fn from_data(k: &GroundField, kind: LayerKind, data: Vec<KElement>) -> Result<Self> {
        let report = validate_extension(k, kind, &data)?;
        if let Some(err) = validate::report_error(kind, &report) {
            return Err(err);
        }
        let n = data.len();
        let p = k.p();
        let dim = (p as usize).pow(n as u32);
        let zeta_pows = match (kind, k.zeta()) {
            (LayerKind::Kummer, Some(z)) => {
                let mut pows = vec![k.one()];
                for _ in 1..p {
                    pows.push(k.mul(pows.last().unwrap(), z));
                }
                pows
            }
            _ => Vec::new(),
        };
        let placeholder = NElement { coords: vec![k.zero(); dim] };
        let mut field = ExtensionField {
            k: k.clone(),
            kind,
            data,
            n,
            p,
            dim,
            table: Vec::new(),
            zeta_pows,
            report,
            pi: placeholder.clone(),
            pi_inv: placeholder,
            pi_pows: Vec::new(),
        };
        field.table = field.multiplication_table();
        field.find_uniformizer()?;
        Ok(field)
    }

    fn multiplication_table(&self) -> Vec<Terms> {
        let (p, n, dim) = (self.p, self.n, self.dim);
        let mut table = Vec::with_capacity(dim * dim);
        for jdx in 0..dim {
            let j = GaloisVector::from_index(jdx, n, p);
            for idx in 0..dim {
                let i = GaloisVector::from_index(idx, n, p);
                // Expand coordinate by coordinate.
                let mut partial: Vec<(Vec<u32>, Option<KElement>)> = vec![(Vec::new(), None)];
                for l in 0..n {
                    let s = j.0[l] + i.0[l];
                    let options: Vec<(u32, Option<&KElement>)> = if s < p {
                        vec![(s, None)]
                    } else {
                        match self.kind {
                            LayerKind::Kummer => vec![(s - p, Some(&self.data[l]))],
                            LayerKind::ArtinSchreier => vec![(s - p + 1, None), (s - p, Some(&self.data[l]))],
                        }
                    };
                    let mut next = Vec::with_capacity(partial.len() * options.len());
                    for (exps, coeff) in &partial {
                        for (e, c) in &options {
                            let mut exps = exps.clone();
                            exps.push(*e);
                            let coeff = match (coeff, c) {
                                (None, None) => None,
                                (Some(a), None) => Some(a.clone()),
                                (None, Some(b)) => Some((*b).clone()),
                                (Some(a), Some(b)) => Some(self.k.mul(a, b)),
                            };
                            next.push((exps, coeff));
                        }
                    }
                    partial = next;
                }
                table.push(partial.into_iter().map(|(e, c)| (GaloisVector(e).index(p), c)).collect());
            }
        }
        table
    }

    /// Uniformizer by successive approximation, layer by layer.
    ///
    /// With `Π` a uniformizer of `N_{i−1} = K(x_1..x_{i−1})`, subtract from
    /// `x_i` multiples `r·Π^k` until its valuation is not a multiple of
    /// `v_N(Π)`, then combine it with `Π` by Bézout. This terminates because
    /// `x_i` has a best approximation in `N_{i−1}`.
    fn find_uniformizer(&mut self) -> Result<()> {
        let k = self.k.clone();
        let p = self.p as i64;
        let mut pi_prev = self.from_k(&k.uniformizer());
        let mut pi_prev_inv = self.from_k(&k.uniformizer_pow(-1));
        for layer in 0..self.n {
            let step = p.pow((self.n - layer) as u32);
            let lam_pi = self.norm_lead(&pi_prev)?.1;
            let mut z = self.generator(layer);
            let max_iter = 4 * k.precision() + 16;
            let mut last = None;
            let mut iter = 0;
            let s = loop {
                let s = self.valuation_or_inconclusive(&z, "uniformizer search")?;
                if s % step != 0 {
                    break s;
                }
                iter += 1;
                if last.is_some_and(|l| s <= l) || iter > max_iter {
                    return Err(Error::NotTotallyRamified { reason: format!("layer {} does not ramify", layer + 1) });
                }
                last = Some(s);
                let kk = s / step;
                let lam_z = self.norm_lead(&z)?.1;
                let r = lam_z * mod_pow_small(mod_inverse_small(lam_pi as u64, self.p), kk, self.p) % self.p;
                let base = if kk >= 0 { &pi_prev } else { &pi_prev_inv };
                let term = self.scale_int(&self.pow_nonneg(base, kk.unsigned_abs()), r as i64);
                z = self.sub(&z, &term);
            };
            let sub = step / p;
            if s % sub != 0 {
                return Err(Error::Structural(format!("valuation {s} of a layer-{} element is not a multiple of {sub}", layer + 1)));
            }
            let s1 = s / sub;
            let a = mod_inverse_small(s1.rem_euclid(p) as u64, self.p) as i64;
            let b = Integer::div_floor(&(1 - a * s1), &p);
            debug_assert_eq!(a * s1 + b * p, 1);
            let zi = self.pow_nonneg(&z, a as u64);
            let base = if b >= 0 { &pi_prev } else { &pi_prev_inv };
            let pi_new = self.mul(&zi, &self.pow_nonneg(base, b.unsigned_abs()));
            pi_prev_inv = self.inv(&pi_new)?;
            pi_prev = pi_new;
        }
        // Prefer an exact representative; it keeps downstream traces exact.
        let exact = NElement { coords: pi_prev.coords.iter().map(|c| k.truncate_exact(c)).collect() };
        if self.valuation(&exact) == Some(1) {
            pi_prev = exact;
            pi_prev_inv = self.inv(&pi_prev)?;
        }
        if self.valuation(&pi_prev) != Some(1) {
            return Err(Error::Structural("uniformizer construction failed".into()));
        }
        let mut pows = vec![self.one()];
        for _ in 1..self.dim {
            pows.push(self.mul(pows.last().unwrap(), &pi_prev));
        }
        self.pi = pi_prev;
        self.pi_inv = pi_prev_inv;
        self.pi_pows = pows;
        Ok(())
    }

    // ---------- accessors ----------

    pub fn ground(&self) -> &GroundField {
        &self.k
    }

    pub fn kind(&self) -> LayerKind {
        self.kind
    }

    pub fn data(&self) -> &[KElement] {
        &self.data
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `[N:K] = p^n`.
    pub fn degree(&self) -> usize {
        self.dim
    }

    /// Degree-`p` extensions are cyclic; the noncyclic statements need `n ≥ 2`.
    pub fn is_cyclic(&self) -> bool {
        self.n <= 1
    }

    pub fn group(&self) -> Subgroup {
        Subgroup::full(self.n, self.p)
    }

    pub fn validation(&self) -> &ValidationReport {
        &self.report
    }

    pub fn uniformizer(&self) -> &NElement {
        &self.pi
    }

    pub fn uniformizer_inverse(&self) -> &NElement {
        &self.pi_inv
    }

    // ---------- construction of elements ----------

    pub fn zero(&self) -> NElement {
        NElement { coords: vec![self.k.zero(); self.dim] }
    }

    pub fn one(&self) -> NElement {
        self.from_k(&self.k.one())
    }

    /// The image of `a ∈ K`.
    pub fn from_k(&self, a: &KElement) -> NElement {
        let mut y = self.zero();
        y.coords[0] = a.clone();
        y
    }

    pub fn from_int(&self, n: i64) -> NElement {
        self.from_k(&self.k.from_int(n))
    }

    /// `c · x^J`.
    pub fn monomial(&self, exps: &GaloisVector, c: &KElement) -> NElement {
        let mut y = self.zero();
        y.coords[exps.index(self.p)] = c.clone();
        y
    }

    /// The layer generator `x_{i+1}`.
    pub fn generator(&self, i: usize) -> NElement {
        self.monomial(&GaloisVector::basis(self.n, i), &self.k.one())
    }

    /// Replace every coordinate by its stored representative, flagged exact.
    pub fn truncate_exact(&self, y: &NElement) -> NElement {
        NElement { coords: y.coords.iter().map(|c| self.k.truncate_exact(c)).collect() }
    }

    /// `π_K^q · π_N^r` for `v = q·p^n + r`: an element of valuation `v`
    /// built without inversions.
    pub fn element_of_valuation(&self, v: i64) -> NElement {
        let (q, r) = v.div_mod_floor(&(self.dim as i64));
        self.scale(&self.k.uniformizer_pow(q), &self.pi_pows[r as usize])
    }

    /// `Σ_{j<p^n} c_j π_N^j` with `c_0` a unit and `c_j ∈ O_K` random.
    pub fn random_unit<R: Rng>(&self, rng: &mut R) -> NElement {
        let mut acc = self.from_k(&self.k.random_element_with(0, rng));
        for j in 1..self.dim {
            let c = self.k.random_integer_with(rng);
            acc = self.add(&acc, &self.scale(&c, &self.pi_pows[j]));
        }
        acc
    }

    /// A random element of exact valuation `v`.
    pub fn random_element<R: Rng>(&self, v: i64, rng: &mut R) -> NElement {
        self.mul(&self.element_of_valuation(v), &self.random_unit(rng))
    }

    // ---------- ring operations ----------

    pub fn add(&self, a: &NElement, b: &NElement) -> NElement {
        NElement { coords: a.coords.iter().zip(&b.coords).map(|(x, y)| self.k.add(x, y)).collect() }
    }

    pub fn sub(&self, a: &NElement, b: &NElement) -> NElement {
        NElement { coords: a.coords.iter().zip(&b.coords).map(|(x, y)| self.k.sub(x, y)).collect() }
    }

    pub fn neg(&self, a: &NElement) -> NElement {
        NElement { coords: a.coords.iter().map(|x| self.k.neg(x)).collect() }
    }

    /// `a · y` for `a ∈ K`.
    pub fn scale(&self, a: &KElement, y: &NElement) -> NElement {
        NElement { coords: y.coords.iter().map(|x| if x.is_exact_zero() { x.clone() } else { self.k.mul(a, x) }).collect() }
    }

    pub fn scale_int(&self, y: &NElement, n: i64) -> NElement {
        NElement { coords: y.coords.iter().map(|x| self.k.mul_int(x, n)).collect() }
    }

    pub fn mul(&self, a: &NElement, b: &NElement) -> NElement {
        let mut out = self.zero();
        for (j, aj) in a.coords.iter().enumerate() {
            if aj.is_exact_zero() {
                continue;
            }
            for (i, bi) in b.coords.iter().enumerate() {
                if bi.is_exact_zero() {
                    continue;
                }
                let prod = self.k.mul(aj, bi);
                for (t, c) in &self.table[j * self.dim + i] {
                    let term = match c {
                        None => prod.clone(),
                        Some(c) => self.k.mul(&prod, c),
                    };
                    out.coords[*t] = self.k.add(&out.coords[*t], &term);
                }
            }
        }
        out
    }

    pub(crate) fn pow_nonneg(&self, y: &NElement, mut e: u64) -> NElement {
        let mut result = self.one();
        let mut base = y.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul(&result, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        result
    }

    pub fn pow(&self, y: &NElement, e: i64) -> Result<NElement> {
        if e >= 0 {
            Ok(self.pow_nonneg(y, e as u64))
        } else {
            Ok(self.pow_nonneg(&self.inv(y)?, e.unsigned_abs()))
        }
    }

    /// `π_N^e`, using the cached inverse for negative exponents.
    pub fn uniformizer_pow(&self, e: i64) -> NElement {
        if e >= 0 {
            self.pow_nonneg(&self.pi, e as u64)
        } else {
            self.pow_nonneg(&self.pi_inv, e.unsigned_abs())
        }
    }

    /// Matrix of multiplication by `y` on the monomial basis (columns are
    /// `y·x^I`).
    pub fn multiplication_matrix(&self, y: &NElement) -> KMatrix {
        let columns: Vec<Vec<KElement>> = (0..self.dim)
            .map(|i| {
                let mut e = self.zero();
                e.coords[i] = self.k.one();
                self.mul(y, &e).coords
            })
            .collect();
        KMatrix::from_columns(&self.k, &columns)
    }

    pub fn inv(&self, y: &NElement) -> Result<NElement> {
        if y.is_exact_zero() {
            return Err(Error::DivisionByZero { precision: None });
        }
        let m = self.multiplication_matrix(y);
        let rhs = self.one().coords;
        match linalg::solve(&self.k, &m, &rhs) {
            Ok(coords) => Ok(NElement { coords }),
            Err(Error::Inconclusive { .. }) => Err(Error::DivisionByZero { precision: y.precision() }),
            Err(e) => Err(e),
        }
    }

    pub fn div(&self, a: &NElement, b: &NElement) -> Result<NElement> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    // ---------- valuation ----------

    /// `N_{N/K}(y)` as a determinant.
    pub fn norm(&self, y: &NElement) -> Determinant {
        if self.dim == 1 {
            let c = &y.coords[0];
            return if c.is_exact_zero() {
                Determinant::ExactZero
            } else if self.k.is_zero_to_precision(c) {
                Determinant::Undetermined { precision: c.precision() }
            } else {
                Determinant::NonZero(c.clone())
            };
        }
        linalg::determinant(&self.k, &self.multiplication_matrix(y))
    }

    /// `v_N(y)`, normalized by `v_N(π_N) = 1`; `None` if `y` vanishes to
    /// the precision carried. Since `N/K` is totally ramified this is
    /// `v_K(N_{N/K} y)`.
    pub fn valuation(&self, y: &NElement) -> Option<i64> {
        match self.norm(y) {
            Determinant::NonZero(d) => self.k.valuation(&d),
            _ => None,
        }
    }

    /// `v_N(y)` or an inconclusive error naming `what`.
    pub fn valuation_or_inconclusive(&self, y: &NElement, what: &str) -> Result<i64> {
        match self.norm(y) {
            Determinant::NonZero(d) => {
                self.k.valuation(&d).ok_or_else(|| Error::inconclusive(self.k.precision(), what.to_string()))
            }
            Determinant::ExactZero => Err(Error::Precondition(format!("{what}: element is exactly zero"))),
            Determinant::Undetermined { .. } => Err(Error::inconclusive(self.k.precision(), what.to_string())),
        }
    }

    /// `(v_N(y), leading digit of N_{N/K}(y))`.
    fn norm_lead(&self, y: &NElement) -> Result<(i64, u32)> {
        let v = self.valuation_or_inconclusive(y, "norm")?;
        match self.norm(y) {
            Determinant::NonZero(d) => Ok((v, self.k.leading_digit(&d).unwrap())),
            _ => unreachable!(),
        }
    }

    /// `(v, c)` with `y ≡ c·π_N^v` modulo `π_N^{v+1}`, `c ∈ F_p^×`.
    ///
    /// The residue of a unit equals the leading digit of its norm because
    /// all conjugates share one residue and `c^{p^n} = c` in `F_p`.
    pub fn leading_coefficient(&self, y: &NElement) -> Result<(i64, u32)> {
        let (v, lam) = self.norm_lead(y)?;
        let (_, lam_pi) = self.norm_lead(&self.pi)?;
        let inv_pi = mod_inverse_small(lam_pi as u64, self.p);
        Ok((v, lam * mod_pow_small(inv_pi, v, self.p) % self.p))
    }

    pub fn eq_to_precision(&self, a: &NElement, b: &NElement) -> bool {
        self.sub(a, b).coords.iter().all(|c| self.k.is_zero_to_precision(c))
    }

    // ---------- Galois action ----------

    /// `σ(y)`: `x_i ↦ ζ^{c_i} x_i` (Kummer) or `x_i ↦ x_i + c_i`
    /// (Artin–Schreier).
    pub fn apply_galois(&self, sigma: &GaloisVector, y: &NElement) -> NElement {
        let p = self.p;
        if sigma.is_zero() {
            return y.clone();
        }
        match self.kind {
            LayerKind::Kummer => NElement {
                coords: y
                    .coords
                    .iter()
                    .enumerate()
                    .map(|(j, c)| {
                        let e = sigma.dot(&GaloisVector::from_index(j, self.n, p).0, p);
                        if e == 0 || c.is_exact_zero() {
                            c.clone()
                        } else {
                            self.k.mul(c, &self.zeta_pows[e as usize])
                        }
                    })
                    .collect(),
            },
            LayerKind::ArtinSchreier => {
                let mut out = self.zero();
                for (j, c) in y.coords.iter().enumerate() {
                    if c.is_exact_zero() {
                        continue;
                    }
                    let exps = GaloisVector::from_index(j, self.n, p);
                    for (t, coeff) in shifted_monomial(&exps.0, &sigma.0, p) {
                        let term = self.k.mul_int(c, coeff as i64);
                        out.coords[t] = self.k.add(&out.coords[t], &term);
                    }
                }
                out
            }
        }
    }

    /// `Σ_{σ∈H} σ(y)`, the trace to the fixed field of `H`, as an element
    /// of `N`.
    pub fn trace_over(&self, h: &Subgroup, y: &NElement) -> NElement {
        match self.kind {
            // Σ_{c∈H} ζ^{c·J} is |H| when J ⊥ H and 0 otherwise.
            LayerKind::Kummer => NElement {
                coords: y
                    .coords
                    .iter()
                    .enumerate()
                    .map(|(j, c)| {
                        let exps = GaloisVector::from_index(j, self.n, self.p);
                        if h.basis().iter().all(|b| b.dot(&exps.0, self.p) == 0) {
                            self.k.mul_int(c, h.order() as i64)
                        } else {
                            self.k.zero()
                        }
                    })
                    .collect(),
            },
            LayerKind::ArtinSchreier => self.trace_by_conjugates(h, y),
        }
    }

    /// `Σ_{σ∈H} σ(y)` by summing conjugates.
    pub fn trace_by_conjugates(&self, h: &Subgroup, y: &NElement) -> NElement {
        h.elements().iter().fold(self.zero(), |acc, s| self.add(&acc, &self.apply_galois(s, y)))
    }

    /// `Tr_{N/K}(y)`.
    pub fn trace_to_k(&self, y: &NElement) -> KElement {
        self.trace_over(&self.group(), y).coords[0].clone()
    }

    /// `Tr_{N/L}(y)` for `L` the fixed field of `sub`, in `L`'s coordinates.
    pub fn trace_to(&self, sub: &Subfield, y: &NElement) -> Result<NElement> {
        sub.section(self, &self.trace_over(sub.subgroup(), y))
    }

    pub fn fixed_field(&self, h: &Subgroup) -> Result<Subfield> {
        Subfield::new(self, h)
    }

    /// Human-readable coordinates, `x^J` labelled by exponent vectors.
    pub fn format(&self, y: &NElement) -> String {
        let parts: Vec<String> = y
            .coords
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_exact_zero())
            .map(|(j, c)| format!("({})·x^{}", self.k.format(c), GaloisVector::from_index(j, self.n, self.p)))
            .collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

fn default_kind(k: &GroundField) -> LayerKind {
    match k.characteristic() {
        Characteristic::Zero => LayerKind::Kummer,
        Characteristic::P => LayerKind::ArtinSchreier,
    }
}

fn binomial_mod(n: u32, k: u32, p: u32) -> u32 {
    let mut c = 1u64;
    for i in 0..k as u64 {
        c = c * (n as u64 - i) / (i + 1);
    }
    (c % p as u64) as u32
}

/// `Π (x_i + c_i)^{j_i}` expanded over monomials, coefficients mod `p`.
fn shifted_monomial(j: &[u32], c: &[u32], p: u32) -> Vec<(usize, u32)> {
    let mut terms: Vec<(Vec<u32>, u32)> = vec![(Vec::new(), 1)];
    for (&ji, &ci) in j.iter().zip(c) {
        let mut next = Vec::new();
        for (exps, coeff) in &terms {
            for k in 0..=ji {
                let f = binomial_mod(ji, k, p) * mod_pow_small(ci, (ji - k) as i64, p) % p;
                if f == 0 {
                    continue;
                }
                let mut e = exps.clone();
                e.push(k);
                next.push((e, coeff * f % p));
            }
        }
        terms = next;
    }
    terms.into_iter().map(|(e, c)| (GaloisVector(e).index(p), c)).collect()
}
