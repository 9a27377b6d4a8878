//! Normal basis membership, the trace-valuation law and its converse, the
//! residue congruence for index-`p` subfields, and the construction of
//! trace-zero elements in every forbidden valuation class.

use num_integer::Integer;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::galois::{ExtensionField, GaloisVector, LayerKind, NElement, Subfield, Subgroup};
use crate::linalg::{self, Determinant, KMatrix};
use crate::localfield::padic::mod_inverse_small;
use crate::ramification::{compute_filtration, RamificationData};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NBStatus {
    Generator,
    NonGenerator,
    Inconclusive,
}

/// Evidence behind a verdict.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Witness {
    /// `v_K` of the determinant of the conjugate matrix.
    Determinant { valuation: i64 },
    /// The conjugate matrix is singular in exact arithmetic.
    ExactDependence,
    /// An exactly vanishing Kummer coordinate: every conjugate lies in the
    /// span of the other monomials.
    VanishingCoordinate { monomial: GaloisVector },
    /// `Tr_{N/K} ρ = 0` exactly; in characteristic `p` this is equivalent
    /// to `ρ ∉ NB`.
    TraceZero,
    PrecisionCap,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NBVerdict {
    pub status: NBStatus,
    pub det_valuation: Option<i64>,
    pub witness: Witness,
    pub precision: i64,
}

impl NBVerdict {
    pub fn is_generator(&self) -> bool {
        self.status == NBStatus::Generator
    }
}

/// Whether the conjugates `{σρ : σ ∈ G}` form a `K`-basis of `N`.
pub fn nb_test(n: &ExtensionField, rho: &NElement) -> Result<NBVerdict> {
    let k = n.ground();
    let precision = k.precision();
    if rho.coords().iter().all(|c| k.is_zero_to_precision(c)) {
        return Err(Error::InvalidInput("nb_test needs a nonzero element".into()));
    }
    let columns: Vec<Vec<_>> =
        n.group().elements().iter().map(|s| n.apply_galois(s, rho).coords().to_vec()).collect();
    let verdict = |status, det_valuation, witness| NBVerdict { status, det_valuation, witness, precision };
    match linalg::determinant(k, &KMatrix::from_columns(k, &columns)) {
        Determinant::NonZero(d) => {
            let v = k.valuation(&d).expect("nonzero determinant has a valuation");
            Ok(verdict(NBStatus::Generator, Some(v), Witness::Determinant { valuation: v }))
        }
        Determinant::ExactZero => Ok(verdict(NBStatus::NonGenerator, None, Witness::ExactDependence)),
        Determinant::Undetermined { .. } => {
            if let Some(w) = exact_certificate(n, rho) {
                return Ok(verdict(NBStatus::NonGenerator, None, w));
            }
            Ok(verdict(NBStatus::Inconclusive, None, Witness::PrecisionCap))
        }
    }
}

fn exact_certificate(n: &ExtensionField, rho: &NElement) -> Option<Witness> {
    match n.kind() {
        LayerKind::Kummer => rho
            .coords()
            .iter()
            .position(|c| c.is_exact_zero())
            .map(|j| Witness::VanishingCoordinate { monomial: GaloisVector::from_index(j, n.n(), n.p()) }),
        LayerKind::ArtinSchreier => n.trace_to_k(rho).is_exact_zero().then_some(Witness::TraceZero),
    }
}

/// `v_N` of `Tr_{N/K}(ρ)`.
pub fn trace_valuation(n: &ExtensionField, rho: &NElement) -> Result<i64> {
    let t = n.trace_to_k(rho);
    let v = n
        .ground()
        .valuation(&t)
        .ok_or_else(|| Error::inconclusive(n.ground().precision(), "trace vanishes to working precision"))?;
    Ok(v * n.degree() as i64)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceLaw {
    pub v_rho: i64,
    pub v_trace: i64,
    pub t_g: i64,
    /// `v_N(ρ) ≡ b_m mod p^n`.
    pub precondition: bool,
    /// `v_Tr = v_ρ + t_G`; reported only when the precondition holds.
    pub law_holds: Option<bool>,
}

/// `v_N(Tr ρ) = v_N(ρ) + t_G` for `v_N(ρ) ≡ b_m mod p^n`.
pub fn trace_valuation_forward(n: &ExtensionField, data: &RamificationData, rho: &NElement) -> Result<TraceLaw> {
    let v_rho = n.valuation_or_inconclusive(rho, "v_N(ρ)")?;
    let precondition = (v_rho - data.b_max).rem_euclid(n.degree() as i64) == 0;
    let v_trace = trace_valuation(n, rho)?;
    let law_holds = precondition.then_some(v_trace == v_rho + data.t_g);
    Ok(TraceLaw { v_rho, v_trace, t_g: data.t_g, precondition, law_holds })
}

fn largest_break_in(data: &RamificationData, h: &Subgroup) -> Option<i64> {
    data.element_breaks.iter().filter(|e| h.contains(&e.sigma)).map(|e| e.lower_break).max()
}

/// `ρ` with `Tr_H(ρ) = β` and `v_N(ρ) = target_v`, for `β ∈ N^H` given in
/// `N`'s coordinates.
///
/// Successive approximation: at each step the residual `β` has valuation
/// `c + t_H` with `c ≡ b_H mod |H|`, so the trace of `γ = π_K^q π_N^j` of
/// valuation `c` matches it up to a residue `r ∈ F_p^×`; subtract `r·Tr(γ)`
/// and repeat until the residual is below working precision.
pub fn solve_trace_in(
    n: &ExtensionField,
    data: &RamificationData,
    h: &Subgroup,
    beta: &NElement,
    target_v: i64,
) -> Result<NElement> {
    let p = n.p();
    let t_h = data.t_sum(h);
    let order = h.order() as i64;
    let v_beta = n.valuation(beta).ok_or_else(|| Error::Precondition("trace target is zero".into()))?;
    if v_beta != target_v + t_h {
        return Err(Error::Precondition(format!(
            "target valuation {target_v} requires v_N(α) = {}, got {v_beta}",
            target_v + t_h
        )));
    }
    let Some(b_h) = largest_break_in(data, h) else { return Ok(beta.clone()) };
    if (target_v - b_h).rem_euclid(order) != 0 {
        return Err(Error::Precondition(format!("target valuation {target_v} is not ≡ {b_h} mod {order}")));
    }
    let deg = n.degree() as i64;
    let stop = v_beta + deg * n.ground().precision();
    // γ = π_K^q π_N^j, so Tr_H(γ) = π_K^q Tr_H(π_N^j) and its leading
    // coefficient is lc(π_K)^q lc(Tr_H(π_N^j)).
    let (_, lc_pk) = n.leading_coefficient(&n.from_k(&n.ground().uniformizer()))?;
    let lc_pk_inv = mod_inverse_small(lc_pk as u64, p);
    let mut by_j: Vec<Option<(NElement, i64, u32)>> = vec![None; n.degree()];
    let mut rho = n.zero();
    let mut residual = beta.clone();
    while let Some(v) = n.valuation(&residual) {
        if v >= stop {
            break;
        }
        let c = v - t_h;
        let (q, j) = c.div_mod_floor(&deg);
        if by_j[j as usize].is_none() {
            let t = n.trace_over(h, &n.element_of_valuation(j));
            let (vt, lt) = n.leading_coefficient(&t)?;
            by_j[j as usize] = Some((t, vt, lt));
        }
        let (t_j, vt_j, lt_j) = by_j[j as usize].as_ref().expect("filled above");
        if vt_j + deg * q != v {
            return Err(Error::Structural(format!(
                "trace of an element of valuation {c} has valuation {}, expected {v}",
                vt_j + deg * q
            )));
        }
        let scale = if q >= 0 { lc_pk } else { lc_pk_inv };
        let lt = (0..q.unsigned_abs()).fold(*lt_j as u64, |acc, _| acc * scale as u64 % p as u64);
        let (_, lb) = n.leading_coefficient(&residual)?;
        let r = (lb as u64 * mod_inverse_small(lt, p) as u64 % p as u64) as i64;
        let pk_q = n.ground().uniformizer_pow(q);
        rho = n.add(&rho, &n.scale(&pk_q, &n.scale_int(&n.element_of_valuation(j), r)));
        residual = n.sub(&residual, &n.scale(&pk_q, &n.scale_int(t_j, r)));
    }
    Ok(rho)
}

/// `ρ` with `Tr_{N/L}(ρ) = α` and `v_N(ρ) = target_v`, for `α` in `L`'s coordinates.
pub fn solve_trace(
    n: &ExtensionField,
    data: &RamificationData,
    l: &Subfield,
    alpha: &NElement,
    target_v: i64,
) -> Result<NElement> {
    solve_trace_in(n, data, l.subgroup(), &l.embed(n, alpha), target_v)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ResidueCheck {
    pub subgroup: Subgroup,
    /// Break of the degree-`p` extension `L/K`.
    pub b: i64,
    pub v_l_of_trace: i64,
    pub congruence_holds: bool,
}

/// An index-`p` subgroup prepared for repeated residue checks.
#[derive(Clone, Debug)]
pub struct ResidueSetup {
    pub subfield: Subfield,
    pub b: i64,
}

impl ResidueSetup {
    pub fn new(n: &ExtensionField, h: &Subgroup) -> Result<Self> {
        if n.is_cyclic() {
            return Err(Error::Precondition("the residue congruence needs a noncyclic extension (n ≥ 2)".into()));
        }
        if h.rank() + 1 != n.n() {
            return Err(Error::Precondition(format!("{h} does not have index p")));
        }
        let subfield = n.fixed_field(h)?;
        let ld = compute_filtration(subfield.field())?;
        Ok(ResidueSetup { b: ld.lower_breaks[0], subfield })
    }

    pub fn check(&self, n: &ExtensionField, data: &RamificationData, rho: &NElement) -> Result<ResidueCheck> {
        let v = n.valuation_or_inconclusive(rho, "v_N(ρ)")?;
        if (v - data.b_max).rem_euclid(n.degree() as i64) != 0 {
            return Err(Error::Precondition(format!("v_N(ρ) = {v} is not ≡ b_m = {} mod p^n", data.b_max)));
        }
        let h = self.subfield.subgroup();
        let t = n.trace_over(h, rho);
        let vt = n.valuation_or_inconclusive(&t, "v_N(Tr_{N/L} ρ)")?;
        let order = h.order() as i64;
        if vt % order != 0 {
            return Err(Error::Structural(format!("element of L has v_N = {vt}, not divisible by {order}")));
        }
        let v_l = vt / order;
        let p = n.p() as i64;
        Ok(ResidueCheck {
            subgroup: h.clone(),
            b: self.b,
            v_l_of_trace: v_l,
            congruence_holds: (v_l - self.b).rem_euclid(p) == 0,
        })
    }
}

/// `v_L(Tr_{N/L} ρ) ≡ b mod p` for `L = N^H`, `b` the break of `L/K`.
pub fn residue_congruence(n: &ExtensionField, data: &RamificationData, h: &Subgroup, rho: &NElement) -> Result<ResidueCheck> {
    ResidueSetup::new(n, h)?.check(n, data, rho)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RhoVChecks {
    pub valuation_is_v: bool,
    pub trace_zero_exact: bool,
    pub non_generator: bool,
}

impl RhoVChecks {
    pub fn all(&self) -> bool {
        self.valuation_is_v && self.trace_zero_exact && self.non_generator
    }
}

/// Transcript of the construction of a trace-zero element of valuation `v`.
#[derive(Clone, Debug, Serialize)]
pub struct RhoVCertificate {
    pub v: i64,
    /// `"filtration"` for the construction through `H_k ⊂ H_{k+1}`;
    /// `"direct"` when `p | b_m` leaves `a_v` undefined.
    pub method: String,
    pub a_v: Option<i64>,
    pub k: Option<u32>,
    pub r: Option<u32>,
    /// `a_v = 0` with `k = 0`, where `r = p − 1`.
    pub a_v_zero_edge: bool,
    pub b_s: Option<i64>,
    pub h_k: Option<Subgroup>,
    pub h_k1: Option<Subgroup>,
    pub sigma: Option<GaloisVector>,
    pub t_h_k: Option<i64>,
    pub alpha_valuation: Option<i64>,
    pub alpha: Option<String>,
    pub sigma_minus_one_valuation: Option<i64>,
    /// Whether the solver output needed the final projection onto the
    /// trace-zero hyperplane (it only removes digits beyond working
    /// precision).
    pub trace_projection_applied: bool,
    pub rho_v: String,
    pub checks: RhoVChecks,
    pub verdict: NBVerdict,
    pub precision: i64,
    #[serde(skip)]
    pub rho: NElement,
}

/// An exact element of trace 1.
fn trace_one(n: &ExtensionField) -> Result<NElement> {
    let k = n.ground();
    match n.kind() {
        LayerKind::Kummer => Ok(n.from_k(&k.inv(&k.from_int(n.degree() as i64))?)),
        // Tr(x^{p−1}) = −1 on an Artin–Schreier layer, and traces of
        // products of distinct layers multiply.
        LayerKind::ArtinSchreier => {
            let exps = GaloisVector(vec![n.p() - 1; n.n()]);
            let sign = if n.n().is_multiple_of(2) { 1 } else { -1 };
            Ok(n.monomial(&exps, &k.from_int(sign)))
        }
    }
}

/// Round `ρ` to an exact representative and project it onto `Tr = 0`.
fn exact_trace_zero(n: &ExtensionField, rho: &NElement) -> Result<(NElement, bool)> {
    let rho = n.truncate_exact(rho);
    let t = n.trace_to_k(&rho);
    if t.is_exact_zero() {
        return Ok((rho, false));
    }
    let corr = n.scale(&t, &trace_one(n)?);
    Ok((n.sub(&rho, &corr), true))
}

/// Group element extending `base` inside `within` by one dimension.
fn extend(base: &Subgroup, within: &Subgroup) -> Result<(Subgroup, GaloisVector)> {
    base.extend_within(within).ok_or_else(|| Error::Structural(format!("cannot extend {base} inside {within}")))
}

/// Build `ρ_v` with `v_N(ρ_v) = v` and `Tr_{N/K}(ρ_v) = 0`.
pub fn construct_rho_v(n: &ExtensionField, data: &RamificationData, v: i64) -> Result<RhoVCertificate> {
    let p = n.p() as i64;
    let deg = n.degree() as i64;
    if (v - data.b_max).rem_euclid(deg) == 0 {
        return Err(Error::Precondition(format!("v = {v} lies in the class of b_m = {} mod {deg}", data.b_max)));
    }
    if data.b_max % p == 0 {
        return construct_direct(n, v);
    }
    let b_inv = data.b_max.extended_gcd(&deg).x.rem_euclid(deg);
    let a_v = (v * b_inv).rem_euclid(deg);
    let mut k = 0u32;
    while k + 1 < n.n() as u32 && (a_v - 1).rem_euclid(p.pow(k + 1)) == 0 {
        k += 1;
    }
    let pk = p.pow(k);
    let r = Integer::div_floor(&(a_v - 1), &pk).rem_euclid(p) as u32;
    let a_v_zero_edge = a_v == 0 && k == 0;
    let s = (0..data.m)
        .find(|&s| {
            let next = data.orders.get(s + 1).copied().unwrap_or(1) as i64;
            next < p * pk && p * pk <= data.orders[s] as i64
        })
        .ok_or_else(|| Error::Structural(format!("no break b_s with g_(b_s+1) < p^{} ≤ g_(b_s)", k + 1)))?;
    let b_s = data.lower_breaks[s];
    let mut h_k = data.groups.get(s + 1).cloned().unwrap_or_else(|| Subgroup::trivial(n.n(), n.p()));
    while (h_k.order() as i64) < pk {
        h_k = extend(&h_k, &data.groups[s])?.0;
    }
    let (h_k1, sigma) = extend(&h_k, &data.groups[s])?;
    let t_h_k = data.t_sum(&h_k);
    let l = n.fixed_field(&h_k)?;
    let w = v + t_h_k - r as i64 * pk * b_s;
    if w % pk != 0 {
        return Err(Error::Structural(format!("v_N(α) = {w} is not divisible by [N:L] = {pk}")));
    }
    let alpha = l.embed(n, &l.field().element_of_valuation(w / pk));
    let alpha_valuation = n.valuation_or_inconclusive(&alpha, "v_N(α)")?;
    let mut beta = alpha.clone();
    for _ in 0..r {
        beta = n.sub(&n.apply_galois(&sigma, &beta), &beta);
    }
    let beta_valuation = n.valuation_or_inconclusive(&beta, "v_N((σ−1)^r α)")?;
    if beta_valuation != v + t_h_k {
        return Err(Error::Structural(format!(
            "v_N((σ−1)^r α) = {beta_valuation}, expected v + t_H_k = {}",
            v + t_h_k
        )));
    }
    let raw = solve_trace_in(n, data, &h_k, &beta, v)?;
    let (rho, projected) = exact_trace_zero(n, &raw)?;
    let mut cert = certify(n, v, rho, projected, "filtration")?;
    cert.a_v = Some(a_v);
    cert.k = Some(k);
    cert.r = Some(r);
    cert.a_v_zero_edge = a_v_zero_edge;
    cert.b_s = Some(b_s);
    cert.h_k = Some(h_k);
    cert.h_k1 = Some(h_k1);
    cert.sigma = Some(sigma);
    cert.t_h_k = Some(t_h_k);
    cert.alpha_valuation = Some(alpha_valuation);
    cert.alpha = Some(n.format(&alpha));
    cert.sigma_minus_one_valuation = Some(beta_valuation);
    check_certificate(cert)
}

/// `π_N^v` projected onto `Tr = 0`; used when `p | b_m`.
fn construct_direct(n: &ExtensionField, v: i64) -> Result<RhoVCertificate> {
    let (rho, projected) = exact_trace_zero(n, &n.element_of_valuation(v))?;
    check_certificate(certify(n, v, rho, projected, "direct")?)
}

fn certify(n: &ExtensionField, v: i64, rho: NElement, projected: bool, method: &str) -> Result<RhoVCertificate> {
    let verdict = nb_test(n, &rho)?;
    let checks = RhoVChecks {
        valuation_is_v: n.valuation(&rho) == Some(v),
        trace_zero_exact: n.trace_to_k(&rho).is_exact_zero(),
        non_generator: verdict.status == NBStatus::NonGenerator,
    };
    Ok(RhoVCertificate {
        v,
        method: method.into(),
        a_v: None,
        k: None,
        r: None,
        a_v_zero_edge: false,
        b_s: None,
        h_k: None,
        h_k1: None,
        sigma: None,
        t_h_k: None,
        alpha_valuation: None,
        alpha: None,
        sigma_minus_one_valuation: None,
        trace_projection_applied: projected,
        rho_v: n.format(&rho),
        checks,
        verdict,
        precision: n.ground().precision(),
        rho,
    })
}

fn check_certificate(cert: RhoVCertificate) -> Result<RhoVCertificate> {
    if cert.checks.all() {
        Ok(cert)
    } else if cert.verdict.status == NBStatus::Inconclusive && cert.checks.valuation_is_v && cert.checks.trace_zero_exact {
        Err(Error::inconclusive(cert.precision, "normal basis test of ρ_v"))
    } else {
        Err(Error::Structural(format!(
            "ρ_v certificate failed: {}",
            serde_json::to_string(&cert).unwrap_or_default()
        )))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TrialOutcome {
    pub index: u64,
    pub valuation: i64,
    pub status: NBStatus,
    pub det_valuation: Option<i64>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SweepReport {
    pub residue: i64,
    pub trials: u64,
    pub seed: u64,
    pub generator: u64,
    pub non_generator: u64,
    pub inconclusive: u64,
    /// Indices of trials that were not generators.
    pub non_generator_trials: Vec<u64>,
    pub inconclusive_trials: Vec<u64>,
    /// `residue ≡ b_m mod p^n`.
    pub nb_class: bool,
}

impl SweepReport {
    pub fn from_outcomes(residue: i64, seed: u64, nb_class: bool, outcomes: &[TrialOutcome]) -> Self {
        let mut rep = SweepReport { residue, seed, nb_class, trials: outcomes.len() as u64, ..Default::default() };
        for o in outcomes {
            match o.status {
                NBStatus::Generator => rep.generator += 1,
                NBStatus::NonGenerator => {
                    rep.non_generator += 1;
                    rep.non_generator_trials.push(o.index);
                }
                NBStatus::Inconclusive => {
                    rep.inconclusive += 1;
                    rep.inconclusive_trials.push(o.index);
                }
            }
        }
        rep
    }
}

/// The generator used by trial `index` of a sweep seeded with `seed`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Random element of valuation `residue` (a fixed element of that valuation
/// times a random unit) for one trial.
pub fn sweep_element(n: &ExtensionField, residue: i64, seed: u64, index: u64) -> NElement {
    let mut rng = trial_rng(seed, index);
    n.mul(&n.element_of_valuation(residue), &n.random_unit(&mut rng))
}

pub fn sweep_trial(n: &ExtensionField, residue: i64, seed: u64, index: u64) -> Result<TrialOutcome> {
    let rho = sweep_element(n, residue, seed, index);
    let verdict = nb_test(n, &rho)?;
    Ok(TrialOutcome { index, valuation: residue, status: verdict.status, det_valuation: verdict.det_valuation })
}

/// Normal basis tests on `trials` random elements of valuation `residue`.
pub fn sweep_class(n: &ExtensionField, data: &RamificationData, residue: i64, trials: u64, seed: u64) -> Result<SweepReport> {
    let outcomes: Vec<TrialOutcome> =
        (0..trials).into_par_iter().map(|i| sweep_trial(n, residue, seed, i)).collect::<Result<_>>()?;
    let nb_class = (residue - data.b_max).rem_euclid(n.degree() as i64) == 0;
    Ok(SweepReport::from_outcomes(residue, seed, nb_class, &outcomes))
}
