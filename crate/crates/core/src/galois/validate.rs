//! Checking that a list of layers defines a totally ramified field of
//! degree `p^n`.
//!
//! The degree-`p` subextensions of `N` correspond to the lines of
//! `(Z/p)^n`: the line through `d` gives `x^p = Π u_i^{d_i}` (Kummer) or
//! `x^p − x = Σ d_i f_i` (Artin–Schreier). `N` is a field of degree `p^n`
//! iff none of these is split, and totally ramified iff none is
//! unramified, so every line is classified on its own.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::group::GaloisVector;
use super::LayerKind;
use crate::error::{Error, Result};
use crate::localfield::{Characteristic, GroundField, KElement};

/// How a single degree-`p` layer behaves over `K`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "type", content = "break")]
pub enum LineOutcome {
    /// Totally ramified with this single lower break.
    Ramified(i64),
    /// Unramified, or at the critical level where this code does not
    /// separate unramified from split.
    Unramified,
    /// The datum is a `p`-th power (Kummer) or in `℘(K)` (Artin–Schreier).
    Split,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineReport {
    pub character: GaloisVector,
    pub outcome: LineOutcome,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub n: usize,
    pub degree: usize,
    pub lines: Vec<LineReport>,
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Breaks of the degree-`p` subextensions; for an abelian extension
    /// these are exactly its upper breaks.
    pub fn line_breaks(&self) -> Vec<i64> {
        let mut out: Vec<i64> = self
            .lines
            .iter()
            .filter_map(|l| match l.outcome {
                LineOutcome::Ramified(b) => Some(b),
                _ => None,
            })
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Characters `d ≠ 0` with first nonzero entry 1, unit vectors first.
pub(crate) fn projective_lines(n: usize, p: u32) -> Vec<GaloisVector> {
    let total = (p as usize).pow(n as u32);
    let mut lines: Vec<GaloisVector> = (1..total)
        .map(|i| GaloisVector::from_index(i, n, p))
        .filter(|d| d.0.iter().find(|&&c| c != 0) == Some(&1))
        .collect();
    lines.sort_by_key(|d| (d.0.iter().filter(|&&c| c != 0).count(), d.index(p)));
    lines
}

/// The datum of the degree-`p` layer attached to the character `d`.
pub(crate) fn line_datum(k: &GroundField, kind: LayerKind, data: &[KElement], d: &[u32]) -> Result<KElement> {
    match kind {
        LayerKind::Kummer => {
            let mut acc = k.one();
            for (u, &di) in data.iter().zip(d) {
                if di != 0 {
                    acc = k.mul(&acc, &k.pow(u, di as i64)?);
                }
            }
            Ok(acc)
        }
        LayerKind::ArtinSchreier => {
            let mut acc = k.zero();
            for (f, &di) in data.iter().zip(d) {
                if di != 0 {
                    acc = k.add(&acc, &k.mul_int(f, di as i64));
                }
            }
            Ok(acc)
        }
    }
}

/// Classify `K(y)`, `y^p = u`, for `K ∋ ζ_p`.
pub fn kummer_outcome(k: &GroundField, u: &KElement) -> Result<LineOutcome> {
    let p = k.p() as i64;
    let Some(v) = k.valuation(u) else { return Ok(LineOutcome::Split) };
    // Critical level p·e_K/(p−1): principal units beyond it are p-th powers.
    let c = p * k.e_k() as i64 / (p - 1);
    if v % p != 0 {
        return Ok(LineOutcome::Ramified(c));
    }
    let u0 = k.mul(u, &k.uniformizer_pow(-v));
    // u^{p−1} spans the same line mod p-th powers and is ≡ 1 mod π.
    let mut u1 = k.pow(&u0, p - 1)?;
    loop {
        let a = k.sub(&u1, &k.one());
        let s = match k.valuation(&a) {
            None => return Ok(LineOutcome::Split),
            Some(s) => s,
        };
        if s > c {
            return Ok(LineOutcome::Split);
        }
        if s == c {
            return Ok(LineOutcome::Unramified);
        }
        if s % p != 0 {
            return Ok(LineOutcome::Ramified(c - s));
        }
        if a.precision().is_some_and(|pr| pr <= c) {
            return Err(Error::inconclusive(k.precision(), "Kummer datum known below the critical level"));
        }
        let r = k.leading_digit(&a).unwrap() as i64;
        let b = k.mul_int(&k.uniformizer_pow(s / p), r);
        let bp = k.pow(&k.add(&k.one(), &b), p)?;
        u1 = k.div(&u1, &bp)?;
    }
}

/// Classify `K(y)`, `y^p − y = f`, over `F_p((t))`.
pub fn artin_schreier_outcome(k: &GroundField, f: &KElement) -> Result<LineOutcome> {
    let p = k.p() as i64;
    let Some(v) = k.valuation(f) else { return Ok(LineOutcome::Split) };
    if v > 0 {
        return Ok(LineOutcome::Split);
    }
    let (v, digits) = k.digits(f, (1 - v) as usize).expect("nonzero datum");
    let mut terms: BTreeMap<i64, i64> = BTreeMap::new();
    for (j, d) in digits.iter().enumerate() {
        let e = v + j as i64;
        if e <= 0 && *d != 0 {
            terms.insert(e, *d as i64);
        }
    }
    if f.precision().is_some_and(|pr| pr <= 0) {
        return Err(Error::inconclusive(k.precision(), "Artin–Schreier datum not known to its constant term"));
    }
    // c·t^{−pm} ≡ c·t^{−m} modulo ℘(K) since c^p = c in F_p.
    loop {
        let lowest = terms.iter().find(|(&e, &c)| e < 0 && c % p != 0).map(|(&e, &c)| (e, c));
        let Some((e, c)) = lowest else { break };
        if e % p != 0 {
            return Ok(LineOutcome::Ramified(-e));
        }
        terms.remove(&e);
        *terms.entry(e / p).or_insert(0) += c;
    }
    if terms.get(&0).is_some_and(|c| c % p != 0) {
        Ok(LineOutcome::Unramified)
    } else {
        Ok(LineOutcome::Split)
    }
}

pub(crate) fn line_outcome(k: &GroundField, kind: LayerKind, datum: &KElement) -> Result<LineOutcome> {
    match kind {
        LayerKind::Kummer => kummer_outcome(k, datum),
        LayerKind::ArtinSchreier => artin_schreier_outcome(k, datum),
    }
}

/// Reasons a layer kind cannot be used over `k`.
pub(crate) fn kind_problem(k: &GroundField, kind: LayerKind) -> Option<&'static str> {
    match (kind, k.characteristic()) {
        (LayerKind::Kummer, Characteristic::P) => Some("Kummer layers are inseparable in characteristic p"),
        (LayerKind::Kummer, Characteristic::Zero) if k.zeta().is_none() => {
            Some("K contains no primitive p-th root of unity")
        }
        (LayerKind::ArtinSchreier, Characteristic::Zero) => Some("Artin–Schreier layers require characteristic p"),
        _ => None,
    }
}

fn describe(kind: LayerKind, d: &GaloisVector) -> String {
    let parts: Vec<String> = d
        .0
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(i, &c)| match (kind, c) {
            (LayerKind::Kummer, 1) => format!("u{}", i + 1),
            (LayerKind::Kummer, _) => format!("u{}^{}", i + 1, c),
            (LayerKind::ArtinSchreier, 1) => format!("f{}", i + 1),
            (LayerKind::ArtinSchreier, _) => format!("{}·f{}", c, i + 1),
        })
        .collect();
    match kind {
        LayerKind::Kummer => format!("{} is a p-th power", parts.join("·")),
        LayerKind::ArtinSchreier => format!("{} lies in ℘(K)", parts.join(" + ")),
    }
}

/// Classify every line and collect the results; never fails on
/// mathematical grounds, only on precision exhaustion.
pub fn validate_extension(k: &GroundField, kind: LayerKind, data: &[KElement]) -> Result<ValidationReport> {
    let n = data.len();
    let p = k.p();
    let mut checks = Vec::new();
    let mut lines = Vec::new();
    if let Some(problem) = kind_problem(k, kind) {
        checks.push(Check { name: "layer kind".into(), passed: false, detail: problem.into() });
        return Ok(ValidationReport { n, degree: 0, lines, checks });
    }
    for d in projective_lines(n, p) {
        let datum = line_datum(k, kind, data, &d.0)?;
        let outcome = line_outcome(k, kind, &datum)?;
        lines.push(LineReport { character: d, outcome });
    }
    let degree = (p as usize).pow(n as u32);
    let split: Vec<&LineReport> = lines.iter().filter(|l| l.outcome == LineOutcome::Split).collect();
    checks.push(Check {
        name: "degree".into(),
        passed: split.is_empty(),
        detail: if split.is_empty() {
            format!("degree {degree}")
        } else {
            split.iter().map(|l| describe(kind, &l.character)).collect::<Vec<_>>().join("; ")
        },
    });
    let unram: Vec<&LineReport> = lines.iter().filter(|l| l.outcome == LineOutcome::Unramified).collect();
    checks.push(Check {
        name: "total ramification".into(),
        passed: unram.is_empty(),
        detail: if unram.is_empty() {
            "every degree-p subextension is ramified".into()
        } else {
            unram.iter().map(|l| format!("subextension {} is unramified", l.character)).collect::<Vec<_>>().join("; ")
        },
    });
    Ok(ValidationReport { n, degree, lines, checks })
}

/// Turn a failed report into the error naming the culprit.
pub(crate) fn report_error(kind: LayerKind, report: &ValidationReport) -> Option<Error> {
    if let Some(c) = report.checks.iter().find(|c| c.name == "layer kind" && !c.passed) {
        return Some(Error::InvalidLayer { layer: 1, reason: c.detail.clone() });
    }
    for l in &report.lines {
        let weight = l.character.0.iter().filter(|&&c| c != 0).count();
        let layer = l.character.0.iter().position(|&c| c != 0).unwrap() + 1;
        match (l.outcome, weight) {
            (LineOutcome::Ramified(_), _) => {}
            (LineOutcome::Split, 1) => {
                return Some(Error::InvalidLayer { layer, reason: format!("degree collapse: {}", describe(kind, &l.character)) })
            }
            (LineOutcome::Unramified, 1) => {
                return Some(Error::InvalidLayer { layer, reason: "layer is not ramified".into() })
            }
            (LineOutcome::Split, _) => return Some(Error::DependentLayers { relation: describe(kind, &l.character) }),
            (LineOutcome::Unramified, _) => {
                return Some(Error::NotTotallyRamified {
                    reason: format!("the subextension cut out by {} is unramified", l.character),
                })
            }
        }
    }
    None
}
