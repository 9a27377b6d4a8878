//! Finite-precision arithmetic in the ground field `K`.
//!
//! Two backends share one element type:
//!
//! * characteristic zero: `K = Q_p(π)` for a totally ramified extension given
//!   by an Eisenstein tower, flattened at construction into one absolute
//!   Eisenstein polynomial;
//! * characteristic `p`: `K = F_p((t))`, truncated Laurent series.
//!
//! Every [`KElement`] carries its own absolute precision (in powers of the
//! uniformizer of `K`) or is flagged exact. Exactness survives addition,
//! subtraction and multiplication; inversion is exact only when the unit
//! part is `±1` (char 0) or a constant (char p), otherwise it is carried to
//! the field's working precision. A value that vanishes to its precision is
//! reported as such and never treated as zero.

mod laurent;
pub(crate) mod padic;
mod scalar;
mod tower;

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use scalar::Scalar;
use padic::PadicCtx;

pub const DEFAULT_PRECISION: i64 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Characteristic {
    Zero,
    P,
}

/// Description of a ground field, as read from a scenario.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundFieldSpec {
    pub characteristic: Characteristic,
    pub p: u32,
    /// Eisenstein polynomials, low degree first, each with coefficients in
    /// the field below it. Empty for `Q_p`; ignored in characteristic `p`.
    pub tower: Vec<Vec<Scalar>>,
    pub default_precision: i64,
}

impl GroundFieldSpec {
    pub fn padic(p: u32) -> Self {
        GroundFieldSpec { characteristic: Characteristic::Zero, p, tower: Vec::new(), default_precision: DEFAULT_PRECISION }
    }

    pub fn laurent(p: u32) -> Self {
        GroundFieldSpec { characteristic: Characteristic::P, p, tower: Vec::new(), default_precision: DEFAULT_PRECISION }
    }

    pub fn with_tower(mut self, tower: Vec<Vec<Scalar>>) -> Self {
        self.tower = tower;
        self
    }

    pub fn with_precision(mut self, precision: i64) -> Self {
        self.default_precision = precision;
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Body {
    Int(Vec<BigInt>),
    Ser(Vec<u32>),
}

/// An element `π^shift · body` of `K`, known modulo `π^prec` (or exactly).
#[derive(Clone, Debug, PartialEq)]
pub struct KElement {
    shift: i64,
    body: Body,
    prec: Option<i64>,
}

impl KElement {
    /// Absolute precision, `None` if exact.
    pub fn precision(&self) -> Option<i64> {
        self.prec
    }

    pub fn is_exact(&self) -> bool {
        self.prec.is_none()
    }

    fn body_is_zero(&self) -> bool {
        match &self.body {
            Body::Int(b) => PadicCtx::is_zero(b),
            Body::Ser(b) => b.is_empty(),
        }
    }

    /// True for an exactly known zero.
    pub fn is_exact_zero(&self) -> bool {
        self.prec.is_none() && self.body_is_zero()
    }
}

#[derive(Clone, Debug)]
enum Backend {
    Padic(PadicCtx),
    Laurent,
}

/// Immutable field context; see the module docs.
#[derive(Clone, Debug)]
pub struct GroundField {
    spec: GroundFieldSpec,
    p: u32,
    e: u32,
    precision: i64,
    backend: Backend,
    zeta: Option<KElement>,
}

fn is_prime(p: u32) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

fn min_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(x), Some(y)) => Some(x.min(y)),
    }
}

fn add_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x + y),
        _ => None,
    }
}

impl GroundField {
    /// Validate `spec` and build the field context.
    pub fn new(spec: GroundFieldSpec) -> Result<Self> {
        if !is_prime(spec.p) {
            return Err(Error::NotPrime(spec.p));
        }
        if spec.default_precision < 2 {
            return Err(Error::InvalidInput(format!("precision {} too small", spec.default_precision)));
        }
        let p = spec.p;
        match spec.characteristic {
            Characteristic::P => {
                if !spec.tower.is_empty() {
                    return Err(Error::InvalidInput(
                        "Eisenstein towers are only supported in characteristic zero".into(),
                    ));
                }
                Ok(GroundField { p, e: 1, precision: spec.default_precision, backend: Backend::Laurent, zeta: None, spec })
            }
            Characteristic::Zero => {
                let mut ctx = PadicCtx::new(p, vec![-BigInt::from(p)]);
                for (i, layer) in spec.tower.iter().enumerate() {
                    ctx = Self::adjoin_layer(&ctx, i + 1, layer)?;
                }
                let mut k = GroundField {
                    p,
                    e: ctx.e as u32,
                    precision: spec.default_precision,
                    backend: Backend::Padic(ctx),
                    zeta: None,
                    spec,
                };
                k.zeta = k.find_zeta()?;
                Ok(k)
            }
        }
    }

    fn adjoin_layer(ctx: &PadicCtx, layer: usize, coeffs: &[Scalar]) -> Result<PadicCtx> {
        let reject = |reason: String| Error::NotEisenstein { layer, reason };
        if coeffs.len() < 2 {
            return Err(reject("polynomial has degree < 1".into()));
        }
        let mut bodies = Vec::with_capacity(coeffs.len());
        for c in coeffs {
            bodies.push(Self::literal_body(ctx, c).ok_or_else(|| reject(format!("coefficient {c} is not integral")))?);
        }
        let lead = bodies.last().unwrap();
        if !(lead[0].is_one() && lead[1..].iter().all(Zero::is_zero)) {
            return Err(reject("leading coefficient is not 1".into()));
        }
        if ctx.body_val(&bodies[0]) != Some(1) {
            return Err(reject(format!("constant coefficient {} does not have valuation 1", coeffs[0])));
        }
        for (k, b) in bodies.iter().enumerate().take(coeffs.len() - 1).skip(1) {
            if ctx.body_val(b).is_some_and(|v| v < 1) {
                return Err(reject(format!("coefficient of x^{k} is a unit")));
            }
        }
        let flat = tower::flatten(ctx, &bodies);
        if !tower::is_eisenstein_over_zp(ctx.p, &flat) {
            return Err(Error::Structural(format!("flattened layer {layer} is not Eisenstein over Z_p")));
        }
        Ok(PadicCtx::new(ctx.p, flat))
    }

    fn literal_body(ctx: &PadicCtx, s: &Scalar) -> Option<Vec<BigInt>> {
        match s {
            Scalar::Integer(n) => Some(ctx.constant(BigInt::from(*n))),
            Scalar::Digits { negative, digits, valuation } => {
                if *valuation < 0 && digits.iter().any(|d| *d != 0) {
                    return None;
                }
                let body = ctx.mul_pi_pow(&ctx.eval_digits(digits), (*valuation).max(0) as u64);
                Some(if *negative { body.into_iter().map(|c| -c).collect() } else { body })
            }
        }
    }

    /// The same field carrying a different working precision.
    pub fn with_precision(&self, precision: i64) -> Result<Self> {
        GroundField::new(self.spec.clone().with_precision(precision))
    }

    pub fn spec(&self) -> &GroundFieldSpec {
        &self.spec
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    /// Absolute ramification index (1 for Laurent series).
    pub fn e_k(&self) -> u32 {
        self.e
    }

    pub fn characteristic(&self) -> Characteristic {
        self.spec.characteristic
    }

    pub fn residue_characteristic(&self) -> u32 {
        self.p
    }

    /// Working relative precision in uniformizer digits.
    pub fn precision(&self) -> i64 {
        self.precision
    }

    /// A primitive p-th root of unity, when `K` contains one.
    pub fn zeta(&self) -> Option<&KElement> {
        self.zeta.as_ref()
    }

    /// Absolute Eisenstein polynomial `a_0..a_{e-1}` (char 0 only).
    pub fn eisenstein(&self) -> Option<Vec<BigInt>> {
        match &self.backend {
            Backend::Padic(ctx) => Some(ctx.eis.clone()),
            Backend::Laurent => None,
        }
    }

    // ---------- construction ----------

    fn make_int(&self, ctx: &PadicCtx, shift: i64, mut body: Vec<BigInt>, prec: Option<i64>) -> KElement {
        if let Some(pr) = prec {
            ctx.reduce(&mut body, pr - shift);
        }
        KElement { shift, body: Body::Int(body), prec }
    }

    fn make_ser(&self, shift: i64, mut body: Vec<u32>, prec: Option<i64>) -> KElement {
        let lead = laurent::normalize(&mut body);
        let shift = if body.is_empty() { 0 } else { shift + lead };
        if let Some(pr) = prec {
            let keep = (pr - shift).max(0) as usize;
            body.truncate(keep);
            let extra = laurent::normalize(&mut body);
            return KElement { shift: if body.is_empty() { 0 } else { shift + extra }, body: Body::Ser(body), prec };
        }
        KElement { shift, body: Body::Ser(body), prec }
    }

    pub fn zero(&self) -> KElement {
        match &self.backend {
            Backend::Padic(ctx) => KElement { shift: 0, body: Body::Int(ctx.zero()), prec: None },
            Backend::Laurent => KElement { shift: 0, body: Body::Ser(Vec::new()), prec: None },
        }
    }

    /// Zero known only modulo `π^prec`.
    pub fn zero_to(&self, prec: i64) -> KElement {
        KElement { prec: Some(prec), ..self.zero() }
    }

    pub fn one(&self) -> KElement {
        self.from_int(1)
    }

    pub fn from_int(&self, n: i64) -> KElement {
        match &self.backend {
            Backend::Padic(ctx) => KElement { shift: 0, body: Body::Int(ctx.constant(BigInt::from(n))), prec: None },
            Backend::Laurent => self.make_ser(0, vec![n.rem_euclid(self.p as i64) as u32], None),
        }
    }

    /// `π^k`, exact.
    pub fn uniformizer_pow(&self, k: i64) -> KElement {
        match &self.backend {
            Backend::Padic(ctx) => KElement { shift: k, body: Body::Int(ctx.constant(BigInt::one())), prec: None },
            Backend::Laurent => KElement { shift: k, body: Body::Ser(vec![1]), prec: None },
        }
    }

    pub fn uniformizer(&self) -> KElement {
        self.uniformizer_pow(1)
    }

    /// `±Σ d_j π^{v+j}`, exact.
    pub fn from_digits(&self, negative: bool, digits: &[u32], v: i64) -> KElement {
        let el = match &self.backend {
            Backend::Padic(ctx) => KElement { shift: v, body: Body::Int(ctx.eval_digits(digits)), prec: None },
            Backend::Laurent => {
                let body = digits.iter().map(|d| d % self.p).collect();
                self.make_ser(v, body, None)
            }
        };
        if negative {
            self.neg(&el)
        } else {
            el
        }
    }

    pub fn from_scalar(&self, s: &Scalar) -> KElement {
        match s {
            Scalar::Integer(n) => self.from_int(*n),
            Scalar::Digits { negative, digits, valuation } => self.from_digits(*negative, digits, *valuation),
        }
    }

    /// Forget the precision flag: the stored representative becomes exact.
    pub fn truncate_exact(&self, a: &KElement) -> KElement {
        KElement { prec: None, ..a.clone() }
    }

    /// Lower the precision of `a` to at most `prec`.
    pub fn with_element_precision(&self, a: &KElement, prec: i64) -> KElement {
        let prec = min_opt(a.prec, Some(prec));
        match (&self.backend, &a.body) {
            (Backend::Padic(ctx), Body::Int(b)) => self.make_int(ctx, a.shift, b.clone(), prec),
            (_, Body::Ser(b)) => self.make_ser(a.shift, b.clone(), prec),
            _ => unreachable!("element from another backend"),
        }
    }

    // ---------- reading ----------

    /// `v_K(a)`, or `None` if `a` vanishes to its precision (or exactly).
    pub fn valuation(&self, a: &KElement) -> Option<i64> {
        match (&self.backend, &a.body) {
            (Backend::Padic(ctx), Body::Int(b)) => ctx.body_val(b).map(|w| w + a.shift),
            (_, Body::Ser(b)) => {
                if b.is_empty() {
                    None
                } else {
                    Some(a.shift)
                }
            }
            _ => unreachable!("element from another backend"),
        }
    }

    /// Lower bound for the valuation; `None` means +∞ (exact zero).
    fn val_lb(&self, a: &KElement) -> Option<i64> {
        match self.valuation(a) {
            Some(v) => Some(v),
            None => a.prec,
        }
    }

    pub fn is_zero_to_precision(&self, a: &KElement) -> bool {
        self.valuation(a).is_none()
    }

    /// Residue of `a / π^{v(a)}` in `F_p`.
    pub fn leading_digit(&self, a: &KElement) -> Option<u32> {
        let v = self.valuation(a)?;
        Some(match (&self.backend, &a.body) {
            (Backend::Padic(ctx), Body::Int(b)) => ctx.lead_digit(b, v - a.shift),
            (_, Body::Ser(b)) => b[0],
            _ => unreachable!(),
        })
    }

    /// The first `count` π-adic digits starting at `v(a)`, each in `[0, p)`,
    /// stopping early at the precision of `a`.
    pub fn digits(&self, a: &KElement, count: usize) -> Option<(i64, Vec<u32>)> {
        let v = self.valuation(a)?;
        let stop = a.prec.map_or(v + count as i64, |pr| pr.min(v + count as i64));
        if let Body::Ser(b) = &a.body {
            return Some((v, b.iter().copied().take((stop - v) as usize).collect()));
        }
        let mut rest = a.clone();
        let mut out = Vec::new();
        for pos in v..stop {
            match self.valuation(&rest) {
                Some(w) if w == pos => {
                    let d = self.leading_digit(&rest).unwrap();
                    let term = self.mul_int(&self.uniformizer_pow(pos), d as i64);
                    rest = self.sub(&rest, &term);
                    out.push(d);
                }
                Some(w) if w > pos => out.push(0),
                None => out.push(0),
                Some(_) => return None,
            }
        }
        Some((v, out))
    }

    // ---------- arithmetic ----------

    pub fn neg(&self, a: &KElement) -> KElement {
        match &a.body {
            Body::Int(b) => KElement { body: Body::Int(b.iter().map(|c| -c).collect()), ..a.clone() },
            Body::Ser(b) => KElement { body: Body::Ser(laurent::neg(self.p, b)), ..a.clone() },
        }
    }

    pub fn add(&self, a: &KElement, b: &KElement) -> KElement {
        self.add_signed(a, b, false)
    }

    pub fn sub(&self, a: &KElement, b: &KElement) -> KElement {
        self.add_signed(a, b, true)
    }

    fn add_signed(&self, a: &KElement, b: &KElement, negate_b: bool) -> KElement {
        let prec = min_opt(a.prec, b.prec);
        match (&self.backend, &a.body, &b.body) {
            (Backend::Padic(ctx), Body::Int(ab), Body::Int(bb)) => {
                let az = PadicCtx::is_zero(ab);
                let bz = PadicCtx::is_zero(bb);
                let shift = match (az, bz) {
                    (true, true) => return self.make_int(ctx, 0, ctx.zero(), prec),
                    (true, false) => b.shift,
                    (false, true) => a.shift,
                    (false, false) => a.shift.min(b.shift),
                };
                let lift = |x: &KElement, body: &[BigInt], zero: bool| {
                    if zero {
                        ctx.zero()
                    } else {
                        ctx.mul_pi_pow(body, (x.shift - shift) as u64)
                    }
                };
                let xa = lift(a, ab, az);
                let xb = lift(b, bb, bz);
                let body = if negate_b { ctx.sub(&xa, &xb) } else { ctx.add(&xa, &xb) };
                self.make_int(ctx, shift, body, prec)
            }
            (Backend::Laurent, Body::Ser(ab), Body::Ser(bb)) => {
                let bb = if negate_b { laurent::neg(self.p, bb) } else { bb.clone() };
                if ab.is_empty() && bb.is_empty() {
                    return self.make_ser(0, Vec::new(), prec);
                }
                let shift = match (ab.is_empty(), bb.is_empty()) {
                    (true, _) => b.shift,
                    (_, true) => a.shift,
                    _ => a.shift.min(b.shift),
                };
                let oa = if ab.is_empty() { 0 } else { (a.shift - shift) as usize };
                let ob = if bb.is_empty() { 0 } else { (b.shift - shift) as usize };
                let natural = (oa + ab.len()).max(ob + bb.len());
                let len = match prec {
                    Some(pr) => ((pr - shift).max(0) as usize).min(natural),
                    None => natural,
                };
                let body = laurent::add(self.p, ab, oa, &bb, ob, len);
                self.make_ser(shift, body, prec)
            }
            _ => unreachable!("element from another backend"),
        }
    }

    pub fn mul(&self, a: &KElement, b: &KElement) -> KElement {
        let va = self.val_lb(a);
        let vb = self.val_lb(b);
        let prec = min_opt(
            if a.prec.is_none() { None } else { add_opt(a.prec, vb) },
            if b.prec.is_none() { None } else { add_opt(b.prec, va) },
        );
        // An exact zero factor makes the product exact.
        let prec = if a.is_exact_zero() || b.is_exact_zero() { None } else { prec };
        match (&self.backend, &a.body, &b.body) {
            (Backend::Padic(ctx), Body::Int(ab), Body::Int(bb)) => {
                if PadicCtx::is_zero(ab) || PadicCtx::is_zero(bb) {
                    return self.make_int(ctx, 0, ctx.zero(), prec);
                }
                self.make_int(ctx, a.shift + b.shift, ctx.mul(ab, bb), prec)
            }
            (Backend::Laurent, Body::Ser(ab), Body::Ser(bb)) => {
                if ab.is_empty() || bb.is_empty() {
                    return self.make_ser(0, Vec::new(), prec);
                }
                let shift = a.shift + b.shift;
                let len = match prec {
                    Some(pr) => (pr - shift).max(0) as usize,
                    None => ab.len() + bb.len(),
                };
                self.make_ser(shift, laurent::mul(self.p, ab, bb, len), prec)
            }
            _ => unreachable!("element from another backend"),
        }
    }

    pub fn mul_int(&self, a: &KElement, n: i64) -> KElement {
        match &self.backend {
            Backend::Padic(ctx) => {
                if let Body::Int(b) = &a.body {
                    if n == 0 {
                        return self.zero();
                    }
                    let body = ctx.scale(b, &BigInt::from(n));
                    let vn = padic::vp_bigint(&BigInt::from(n), self.p) as i64 * self.e as i64;
                    let prec = a.prec.map(|pr| pr + vn);
                    return self.make_int(ctx, a.shift, body, prec);
                }
                unreachable!()
            }
            Backend::Laurent => {
                let k = n.rem_euclid(self.p as i64) as u32;
                if let Body::Ser(b) = &a.body {
                    if k == 0 {
                        return self.zero();
                    }
                    return self.make_ser(a.shift, laurent::scale(self.p, b, k), a.prec);
                }
                unreachable!()
            }
        }
    }

    /// Multiplicative inverse. Relative precision is preserved; an exact
    /// input whose inverse is not a finite expansion is carried to the
    /// working precision.
    pub fn inv(&self, a: &KElement) -> Result<KElement> {
        let v = self.valuation(a).ok_or(Error::DivisionByZero { precision: a.prec })?;
        let rel = match a.prec {
            Some(pr) => pr - v,
            None => self.precision,
        };
        match (&self.backend, &a.body) {
            (Backend::Padic(ctx), Body::Int(b)) => {
                let w = v - a.shift;
                let (m, q, unit) = ctx.unit_part(b, w);
                let (inv_unit, exact) = if PadicCtx::is_plus_minus_one(&unit) {
                    (unit.clone(), true)
                } else {
                    (ctx.inv_unit(&unit, rel), false)
                };
                let body = ctx.mul(&ctx.pow_body(&ctx.u, q), &inv_unit);
                let shift = -a.shift + m - ctx.e as i64 * q as i64;
                let prec = if exact && a.prec.is_none() { None } else { Some(-v + rel) };
                Ok(self.make_int(ctx, shift, body, prec))
            }
            (_, Body::Ser(b)) => {
                let exact = a.prec.is_none() && b.len() == 1;
                let len = if exact { 1 } else { rel.max(1) as usize };
                let body = laurent::inv_unit(self.p, b, len);
                let prec = if exact { None } else { Some(-v + rel) };
                Ok(self.make_ser(-v, body, prec))
            }
            _ => unreachable!(),
        }
    }

    pub fn div(&self, a: &KElement, b: &KElement) -> Result<KElement> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    pub fn pow(&self, a: &KElement, k: i64) -> Result<KElement> {
        let base = if k < 0 { self.inv(a)? } else { a.clone() };
        let mut k = k.unsigned_abs();
        let mut result = self.one();
        let mut b = base;
        while k > 0 {
            if k & 1 == 1 {
                result = self.mul(&result, &b);
            }
            k >>= 1;
            if k > 0 {
                b = self.mul(&b, &b);
            }
        }
        Ok(result)
    }

    /// `a == b` up to the weaker precision of the two.
    pub fn eq_to_precision(&self, a: &KElement, b: &KElement) -> bool {
        self.is_zero_to_precision(&self.sub(a, b))
    }

    // ---------- sampling ----------

    /// Deterministic random element of exact valuation `v`: nonzero leading
    /// digit, uniform higher digits, known to the working precision.
    pub fn random_element(&self, valuation: i64, seed: u64) -> KElement {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.random_element_with(valuation, &mut rng)
    }

    pub fn random_element_with<R: Rng>(&self, valuation: i64, rng: &mut R) -> KElement {
        let n = self.precision as usize;
        let mut digits = Vec::with_capacity(n);
        digits.push(rng.gen_range(1..self.p));
        for _ in 1..n {
            digits.push(rng.gen_range(0..self.p));
        }
        let el = self.from_digits(false, &digits, valuation);
        self.with_element_precision(&el, valuation + self.precision)
    }

    /// Random element of `O_K` (possibly zero-ish), known to working precision.
    pub fn random_integer_with<R: Rng>(&self, rng: &mut R) -> KElement {
        let n = self.precision as usize;
        let digits: Vec<u32> = (0..n).map(|_| rng.gen_range(0..self.p)).collect();
        let el = self.from_digits(false, &digits, 0);
        self.with_element_precision(&el, self.precision)
    }

    // ---------- roots of unity ----------

    fn find_zeta(&self) -> Result<Option<KElement>> {
        let p = self.p as i64;
        if p == 2 {
            return Ok(Some(self.from_int(-1)));
        }
        let e = self.e as i64;
        if e % (p - 1) != 0 {
            return Ok(None);
        }
        let d = e / (p - 1);
        // Roots of Φ_p(1+z) = Σ_{k<p} C(p,k+1) z^k have valuation d and are
        // pairwise at distance d; a prefix known mod π^j of a root must have
        // v(f) ≥ j + (p-2)·min(j,d).
        let binom: Vec<i64> = {
            let mut row = vec![1i64];
            for _ in 0..p {
                let mut next = vec![1i64; row.len() + 1];
                for i in 1..row.len() {
                    next[i] = row[i - 1] + row[i];
                }
                row = next;
            }
            row
        };
        let f_coeffs: Vec<i64> = (0..p).map(|k| binom[(k + 1) as usize]).collect();
        let eval = |z: &KElement| {
            let mut acc = self.zero();
            for c in f_coeffs.iter().rev() {
                acc = self.add(&self.mul(&acc, z), &self.from_int(*c));
            }
            acc
        };
        let threshold = |j: i64| j + (p - 2) * j.min(d);
        let survives = |z: &KElement, j: i64| match self.valuation(&eval(z)) {
            None => true,
            Some(w) => w >= threshold(j),
        };
        let mut cands: Vec<KElement> = (1..p)
            .map(|delta| self.mul_int(&self.uniformizer_pow(d), delta))
            .filter(|z| survives(z, d + 1))
            .collect();
        let depth = (p - 2) * d + d + 2;
        for j in d + 1..depth {
            let mut next = Vec::new();
            for z in &cands {
                for delta in 0..p {
                    let z2 = self.add(z, &self.mul_int(&self.uniformizer_pow(j), delta));
                    if survives(&z2, j + 1) {
                        next.push(z2);
                    }
                }
            }
            cands = next;
            if cands.is_empty() {
                return Ok(None);
            }
        }
        let df_coeffs: Vec<i64> = (1..p).map(|k| k * f_coeffs[k as usize]).collect();
        let deval = |z: &KElement| {
            let mut acc = self.zero();
            for c in df_coeffs.iter().rev() {
                acc = self.add(&self.mul(&acc, z), &self.from_int(*c));
            }
            acc
        };
        for start in cands {
            let mut z = start;
            for _ in 0..64 {
                let fz = eval(&z);
                if self.is_zero_to_precision(&fz) {
                    break;
                }
                let step = match self.div(&fz, &deval(&z)) {
                    Ok(s) => s,
                    Err(_) => break,
                };
                z = self.sub(&z, &step);
            }
            if !self.is_zero_to_precision(&eval(&z)) {
                continue;
            }
            let zeta = self.add(&self.one(), &self.exact_if_possible(&z, &eval));
            return Ok(Some(zeta));
        }
        Err(Error::Structural("cyclotomic lifting failed to converge".into()))
    }

    /// If a symmetric small-integer representative of `z` is an exact root
    /// of `f`, return it flagged exact.
    fn exact_if_possible(&self, z: &KElement, f: &dyn Fn(&KElement) -> KElement) -> KElement {
        if let (Backend::Padic(ctx), Body::Int(b), Some(pr)) = (&self.backend, &z.body, z.prec) {
            let mut body = b.clone();
            ctx.reduce_symmetric(&mut body, pr - z.shift);
            let cand = KElement { shift: z.shift, body: Body::Int(body), prec: None };
            if f(&cand).is_exact_zero() {
                return cand;
            }
        }
        z.clone()
    }

    /// Human-readable digit expansion.
    pub fn format(&self, a: &KElement) -> String {
        let tail = match a.prec {
            Some(pr) => format!(" + O(π^{pr})"),
            None => String::new(),
        };
        match self.digits(a, 12) {
            None => match a.prec {
                Some(pr) => format!("O(π^{pr})"),
                None => "0".into(),
            },
            Some((v, ds)) => {
                let body: Vec<String> = ds.iter().map(u32::to_string).collect();
                format!("[{}]@{}{}", body.join(","), v, tail)
            }
        }
    }
}

impl fmt::Display for Characteristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Characteristic::Zero => f.write_str("zero"),
            Characteristic::P => f.write_str("p"),
        }
    }
}

#[cfg(test)]
mod tests;
