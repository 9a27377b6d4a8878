//! Lower and upper ramification breaks of `N/K`.
//!
//! For `σ ≠ 0` the break `i(σ)` is `v_N(σπ_N − π_N) − 1`; the lower
//! filtration is `G_b = {σ : i(σ) ≥ b}`. Upper breaks come from the
//! closed formula `u_i = (b_1 g_{b_1} + Σ_{j≤i} (b_j − b_{j−1}) g_{b_j}) / p^n`
//! and are kept as exact rationals.

use num_integer::Integer;
use num_rational::Ratio;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::galois::{Check, ExtensionField, GaloisVector, NElement, Subgroup};

fn ratios_as_strings<S: Serializer>(v: &[Ratio<i64>], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|r| r.to_string()))
}

/// The break of one group element.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ElementBreak {
    pub sigma: GaloisVector,
    pub lower_break: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RamificationData {
    pub p: u32,
    pub n: usize,
    pub m: usize,
    pub lower_breaks: Vec<i64>,
    /// `g_{b_i} = |G_{b_i}|`, aligned with `lower_breaks`.
    pub orders: Vec<usize>,
    /// `G_{b_i}`, aligned with `lower_breaks`.
    pub groups: Vec<Subgroup>,
    #[serde(serialize_with = "ratios_as_strings")]
    pub upper_breaks: Vec<Ratio<i64>>,
    pub t_g: i64,
    pub b_max: i64,
    pub hypothesis_ok: bool,
    pub element_breaks: Vec<ElementBreak>,
    /// Working precision (digits of `K`) at which the breaks were decided.
    pub precision: i64,
}

/// Upper breaks from lower breaks and the orders `g_{b_i}`.
pub fn lower_to_upper(breaks: &[i64], orders: &[usize], degree: usize) -> Vec<Ratio<i64>> {
    let mut out = Vec::with_capacity(breaks.len());
    let mut acc = Ratio::from_integer(0);
    let mut prev = 0;
    for (&b, &g) in breaks.iter().zip(orders) {
        acc += Ratio::new((b - prev) * g as i64, degree as i64);
        out.push(acc);
        prev = b;
    }
    out
}

/// Filtration computed from the field's own uniformizer.
pub fn compute_filtration(n: &ExtensionField) -> Result<RamificationData> {
    compute_filtration_with(n, n.uniformizer())
}

/// Filtration computed from a caller-supplied uniformizer.
pub fn compute_filtration_with(n: &ExtensionField, pi: &NElement) -> Result<RamificationData> {
    if n.valuation(pi) != Some(1) {
        return Err(Error::Precondition("supplied element is not a uniformizer".into()));
    }
    let p = n.p();
    let mut element_breaks = Vec::new();
    for sigma in n.group().elements().into_iter().filter(|s| !s.is_zero()) {
        let diff = n.sub(&n.apply_galois(&sigma, pi), pi);
        if diff.is_exact_zero() {
            return Err(Error::Structural(format!("σ = {sigma} fixes the uniformizer")));
        }
        let v = n.valuation(&diff).ok_or_else(|| {
            Error::inconclusive(n.ground().precision(), format!("break of σ = {sigma}"))
        })?;
        element_breaks.push(ElementBreak { sigma, lower_break: v - 1 });
    }
    let mut lower_breaks: Vec<i64> = element_breaks.iter().map(|e| e.lower_break).collect();
    lower_breaks.sort_unstable();
    lower_breaks.dedup();
    let groups: Vec<Subgroup> = lower_breaks
        .iter()
        .map(|&b| {
            let gens: Vec<GaloisVector> =
                element_breaks.iter().filter(|e| e.lower_break >= b).map(|e| e.sigma.clone()).collect();
            Subgroup::span(n.n(), p, &gens)
        })
        .collect();
    let orders: Vec<usize> = lower_breaks
        .iter()
        .map(|&b| 1 + element_breaks.iter().filter(|e| e.lower_break >= b).count())
        .collect();
    let upper_breaks = lower_to_upper(&lower_breaks, &orders, n.degree());
    let t_g = element_breaks.iter().map(|e| e.lower_break).sum();
    let hypothesis_ok = upper_breaks.iter().all(|u| u.is_integer() && u.to_integer() % p as i64 != 0);
    Ok(RamificationData {
        p,
        n: n.n(),
        m: lower_breaks.len(),
        b_max: lower_breaks.last().copied().unwrap_or(0),
        lower_breaks,
        orders,
        groups,
        upper_breaks,
        t_g,
        hypothesis_ok,
        element_breaks,
        precision: n.ground().precision(),
    })
}

impl RamificationData {
    pub fn degree(&self) -> usize {
        (self.p as usize).pow(self.n as u32)
    }

    /// Break of a single element, `None` for the identity.
    pub fn break_of(&self, sigma: &GaloisVector) -> Option<i64> {
        self.element_breaks.iter().find(|e| &e.sigma == sigma).map(|e| e.lower_break)
    }

    /// `G_i` for any integer `i ≥ 0`.
    pub fn group_at(&self, i: i64) -> Subgroup {
        match self.lower_breaks.iter().position(|&b| b >= i) {
            Some(idx) => self.groups[idx].clone(),
            None => Subgroup::trivial(self.n, self.p),
        }
    }

    /// `|G_i|`.
    pub fn order_at(&self, i: i64) -> usize {
        self.group_at(i).order()
    }

    /// `t_H = Σ_{σ ∈ H∖0} i(σ)`, i.e. `Σ_j b_j |H_{b_j} ∖ H_{b_j+1}|` for
    /// the induced filtration `H_j = G_j ∩ H`.
    pub fn t_sum(&self, h: &Subgroup) -> i64 {
        self.element_breaks.iter().filter(|e| h.contains(&e.sigma)).map(|e| e.lower_break).sum()
    }

    /// Upper breaks as integers, if all are integral.
    pub fn integral_upper_breaks(&self) -> Option<Vec<i64>> {
        self.upper_breaks.iter().map(|u| u.is_integer().then(|| u.to_integer())).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HypothesisCheck {
    pub ok: bool,
    /// Upper breaks divisible by `p` (or non-integral), as strings.
    pub failing: Vec<String>,
}

/// All upper breaks prime to `p`.
pub fn check_hypothesis(data: &RamificationData) -> HypothesisCheck {
    let p = data.p as i64;
    let failing: Vec<String> = data
        .upper_breaks
        .iter()
        .filter(|u| !u.is_integer() || u.to_integer() % p == 0)
        .map(|u| u.to_string())
        .collect();
    HypothesisCheck { ok: failing.is_empty(), failing }
}

fn check(name: &str, passed: bool, detail: impl Into<String>) -> Check {
    Check { name: name.into(), passed, detail: detail.into() }
}

/// Identities every filtration of a totally ramified `(Z/p)^n`-extension
/// satisfies.
pub fn structural_checks(data: &RamificationData) -> Vec<Check> {
    let p = data.p as i64;
    let deg = data.degree();
    let b = &data.lower_breaks;
    let g = &data.orders;
    let mut out = Vec::new();
    if b.is_empty() {
        out.push(check("nontrivial filtration", data.n == 0, "no breaks"));
        return out;
    }
    out.push(check("u_1 = b_1", data.upper_breaks[0] == Ratio::from_integer(b[0]), format!("u_1 = {}, b_1 = {}", data.upper_breaks[0], b[0])));
    let non_integral: Vec<String> = data.upper_breaks.iter().filter(|u| !u.is_integer()).map(|u| u.to_string()).collect();
    out.push(check(
        "upper breaks integral",
        non_integral.is_empty(),
        if non_integral.is_empty() { "all integral".to_string() } else { format!("non-integral: {}", non_integral.join(", ")) },
    ));
    let congruent = b.iter().all(|x| x.rem_euclid(p) == b[0].rem_euclid(p));
    out.push(check("lower breaks congruent mod p", congruent, format!("{b:?} mod {p}")));
    out.push(check("orders strictly decreasing", g.windows(2).all(|w| w[0] > w[1]), format!("{g:?}")));
    out.push(check("g_{b_1} = p^n", g[0] == deg, format!("g_(b_1) = {}, p^n = {deg}", g[0])));
    out.push(check("G_1 = G", b[0] >= 1, format!("smallest break {}", b[0])));
    let mut prev = 0;
    let mut bad = Vec::new();
    for (&bi, &gi) in b.iter().zip(g) {
        if (gi as i64 * (bi - prev)) % deg as i64 != 0 {
            bad.push(bi);
        }
        prev = bi;
    }
    out.push(check(
        "p^n | g_(b_i)(b_i − b_(i−1))",
        bad.is_empty(),
        if bad.is_empty() { "holds at every break".into() } else { format!("fails at breaks {bad:?}") },
    ));
    let by_orders: i64 = b
        .iter()
        .enumerate()
        .map(|(i, &bi)| bi * (g[i] - g.get(i + 1).copied().unwrap_or(1)) as i64)
        .sum();
    out.push(check("t_G sum rule", by_orders == data.t_g, format!("Σ b_i|G_b_i∖G_b_i+1| = {by_orders}, Σ_σ i(σ) = {}", data.t_g)));
    let group_orders = data.groups.iter().zip(g).all(|(h, &o)| h.order() == o);
    out.push(check("G_b_i are subgroups of order g_b_i", group_orders, format!("{g:?}")));
    let b_m = *b.last().unwrap();
    let cyclic_forced = b_m.rem_euclid(p) == 0;
    out.push(check(
        "b_m ≡ 0 mod p forces cyclic",
        !cyclic_forced || data.n == 1,
        if cyclic_forced { format!("b_m = {b_m} ≡ 0 mod {p}; extension has n = {}", data.n) } else { "b_m prime to p".into() },
    ));
    out
}

/// Break of each degree-`p` quotient `N^H/K` and whether it is an upper
/// break of `N/K`.
pub fn quotient_breaks(n: &ExtensionField, data: &RamificationData) -> Result<Vec<(Subgroup, i64, bool)>> {
    let mut out = Vec::new();
    for h in Subgroup::index_p_subgroups(n.n(), n.p()) {
        let l = n.fixed_field(&h)?;
        let ld = compute_filtration(l.field())?;
        if ld.m != 1 {
            return Err(Error::Structural(format!("degree-p quotient by {h} has {} breaks", ld.m)));
        }
        let b = ld.lower_breaks[0];
        let member = data.upper_breaks.contains(&Ratio::from_integer(b));
        out.push((h, b, member));
    }
    Ok(out)
}

/// Quotient breaks as checks, also compared with the breaks found while
/// validating the layers.
pub fn quotient_checks(n: &ExtensionField, data: &RamificationData) -> Result<Vec<Check>> {
    let q = quotient_breaks(n, data)?;
    let mut out: Vec<Check> = q
        .iter()
        .map(|(h, b, ok)| check("quotient break is an upper break", *ok, format!("N^{h}: break {b}")))
        .collect();
    let mut from_quotients: Vec<i64> = q.iter().map(|(_, b, _)| *b).collect();
    from_quotients.sort_unstable();
    from_quotients.dedup();
    let from_lines = n.validation().line_breaks();
    out.push(check(
        "quotient breaks match layer classification",
        from_quotients == from_lines,
        format!("{from_quotients:?} vs {from_lines:?}"),
    ));
    Ok(out)
}

/// Recompute with `π_N·u` for a random unit `u` and with `π_N^{1+p^n}/π_K`.
pub fn uniformizer_independence(n: &ExtensionField, data: &RamificationData, seed: u64) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pi = n.uniformizer();
    let alt1 = n.truncate_exact(&n.mul(pi, &n.random_unit(&mut rng)));
    let pi_k_inv = n.from_k(&n.ground().uniformizer_pow(-1));
    let alt2 = n.mul(&n.uniformizer_pow(1 + n.degree() as i64), &pi_k_inv);
    let mut same = true;
    let mut detail = Vec::new();
    for (label, alt) in [("random unit", alt1), ("π^(1+p^n)/π_K", alt2)] {
        let d = compute_filtration_with(n, &alt)?;
        let eq = d.element_breaks == data.element_breaks;
        same &= eq;
        detail.push(format!("{label}: {}", if eq { "identical" } else { "differs" }));
    }
    Ok(check("filtration independent of uniformizer", same, detail.join("; ")))
}

/// `(v_N(ρ) − b_m) / p^n` when `v_N(ρ) ≡ b_m mod p^n`.
pub fn nb_class_offset(data: &RamificationData, v: i64) -> Option<i64> {
    let deg = data.degree() as i64;
    let (q, r) = (v - data.b_max).div_mod_floor(&deg);
    (r == 0).then_some(q)
}
