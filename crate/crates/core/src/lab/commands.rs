//! The command verbs. Each returns a report; only unusable input (exit 3)
//! surfaces as an error.

use std::time::Instant;

use serde_json::{json, Value};

use super::report::{ReportDoc, Verdict};
use super::suites::{self, Suite};
use super::{Context, Lab};
use crate::error::{Error, Result};
use crate::galois::{GaloisVector, LayerKind};
use crate::normalbasis::{construct_rho_v, nb_test};
use crate::ramification::{check_hypothesis, quotient_checks, structural_checks, uniformizer_independence};

struct Draft<'a> {
    lab: &'a Lab,
    verb: &'static str,
    start: Instant,
    notes: Vec<String>,
}

impl<'a> Draft<'a> {
    fn new(lab: &'a Lab, verb: &'static str) -> Self {
        Draft { lab, verb, start: Instant::now(), notes: Vec::new() }
    }

    fn finish(self, payload: Value, verdict: Verdict) -> ReportDoc {
        let base = self.lab.base();
        ReportDoc {
            tool: "nbval",
            version: env!("CARGO_PKG_VERSION"),
            verb: self.verb.into(),
            scenario: self.lab.scenario().clone(),
            ramification: Some(base.data.clone()),
            payload,
            verdict,
            precision: base.precision(),
            precision_cap: self.lab.cap(),
            notes: self.notes,
            wall_time_seconds: self.start.elapsed().as_secs_f64(),
        }
    }
}

fn field_summary(ctx: &Context) -> Value {
    json!({
        "p": ctx.n.p(),
        "n": ctx.n.n(),
        "degree": ctx.n.degree(),
        "kind": ctx.n.kind(),
        "ground_ramification_index": ctx.k.e_k(),
        "uniformizer": ctx.n.format(ctx.n.uniformizer()),
        "precision": ctx.precision(),
    })
}

/// Validate the scenario and describe the resulting field.
pub fn cmd_build(lab: &Lab) -> ReportDoc {
    let base = lab.base();
    let draft = Draft::new(lab, "build");
    let payload = json!({ "field": field_summary(&base), "validation": base.n.validation() });
    draft.finish(payload, Verdict::Pass)
}

/// The ramification filtration with its structural identities.
pub fn cmd_ramify(lab: &Lab, seed: u64) -> ReportDoc {
    let base = lab.base();
    let prec = base.precision();
    let draft = Draft::new(lab, "ramify");
    let mut checks: Vec<Value> = structural_checks(&base.data)
        .into_iter()
        .map(|c| json!({ "check": c, "precision": prec }))
        .collect();
    let mut verdict = if checks.iter().all(|c| c["check"]["passed"] == true) { Verdict::Pass } else { Verdict::Fail };
    match lab.escalate(|c| quotient_checks(&c.n, &c.data)) {
        Ok((q, p)) => {
            if q.iter().any(|c| !c.passed) {
                verdict = verdict.combine(Verdict::Fail);
            }
            checks.extend(q.into_iter().map(|c| json!({ "check": c, "precision": p })));
        }
        Err(e) => verdict = verdict.combine(Verdict::from_error(&e)),
    }
    match lab.escalate(|c| uniformizer_independence(&c.n, &c.data, seed)) {
        Ok((c, p)) => {
            if !c.passed {
                verdict = verdict.combine(Verdict::Fail);
            }
            checks.push(json!({ "check": c, "precision": p }));
        }
        Err(e) => verdict = verdict.combine(Verdict::from_error(&e)),
    }
    let payload = json!({
        "field": field_summary(&base),
        "hypothesis": check_hypothesis(&base.data),
        "checks": checks,
    });
    draft.finish(payload, verdict)
}

/// Monomials `π_K^q x^J` of valuation `≡ v mod p^n` that are not
/// generators; only Kummer towers have such exact witnesses.
fn monomial_witnesses(ctx: &Context, v: i64) -> Result<Vec<Value>> {
    let n = &ctx.n;
    let deg = n.degree() as i64;
    if n.kind() != LayerKind::Kummer || deg == 1 {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for j in 0..n.degree() {
        let mono = n.monomial(&GaloisVector::from_index(j, n.n(), n.p()), &ctx.k.one());
        let w = n.valuation_or_inconclusive(&mono, "monomial valuation")?;
        if (w - v).rem_euclid(deg) != 0 {
            continue;
        }
        let q = (v - w) / deg;
        let rho = n.scale(&ctx.k.uniformizer_pow(q), &mono);
        let verdict = nb_test(n, &rho)?;
        out.push(json!({ "element": n.format(&rho), "valuation": v, "verdict": verdict }));
    }
    Ok(out)
}

/// Normal basis tests on random elements of valuation `v`.
pub fn cmd_nbtest(lab: &Lab, v: i64, trials: u64, seed: u64) -> ReportDoc {
    let base = lab.base();
    let mut draft = Draft::new(lab, "nbtest");
    let hyp = check_hypothesis(&base.data);
    let run = suites::sweep(lab, v, trials, seed);
    let rep = &run.report;
    let asserted = rep.nb_class && hyp.ok;
    let mut verdict = if !run.errors.is_empty() || (asserted && rep.non_generator > 0) {
        Verdict::Fail
    } else if rep.inconclusive > 0 {
        Verdict::Inconclusive
    } else {
        Verdict::Pass
    };
    if asserted {
        draft.notes.push("class of b_m with upper breaks prime to p: every trial must be a generator".into());
    } else if rep.nb_class {
        draft.notes.push(format!("upper breaks {} divisible by p: no prediction asserted", hyp.failing.join(", ")));
    } else {
        draft.notes.push("class differs from b_m mod p^n: non-generators exist but random trials need not find one".into());
    }
    let witnesses = match lab.escalate(|c| monomial_witnesses(c, v)) {
        Ok((w, _)) => w,
        Err(e) => {
            verdict = verdict.combine(Verdict::from_error(&e));
            Vec::new()
        }
    };
    let payload = json!({
        "valuation": v,
        "hypothesis": hyp,
        "asserted": asserted,
        "sweep": run,
        "monomial_witnesses": witnesses,
    });
    draft.finish(payload, verdict)
}

/// Construct and certify a trace-zero non-generator of valuation `v`.
pub fn cmd_rhov(lab: &Lab, v: i64) -> Result<ReportDoc> {
    let base = lab.base();
    let deg = base.n.degree() as i64;
    if (v - base.data.b_max).rem_euclid(deg) == 0 {
        return Err(Error::InvalidInput(format!(
            "valuation {v} lies in the normal basis class b_m = {} mod {deg}",
            base.data.b_max
        )));
    }
    let mut draft = Draft::new(lab, "rhov");
    let hyp = check_hypothesis(&base.data);
    if !hyp.ok {
        draft.notes.push(format!("upper breaks {} divisible by p", hyp.failing.join(", ")));
    }
    Ok(match lab.escalate(|c| construct_rho_v(&c.n, &c.data, v)) {
        Ok((cert, p)) => {
            let verdict = if cert.checks.all() { Verdict::Pass } else { Verdict::Fail };
            draft.finish(json!({ "certificate": cert, "precision": p }), verdict)
        }
        Err(e @ (Error::Precondition(_) | Error::InvalidInput(_))) => return Err(e),
        Err(e) => draft.finish(json!({ "error": e.to_string() }), Verdict::from_error(&e)),
    })
}

/// Run a property suite.
pub fn cmd_verify(lab: &Lab, suite: Suite, trials: u64, seed: u64) -> Result<ReportDoc> {
    let draft = Draft::new(lab, "verify");
    let outcomes = match suites::run(lab, suite, trials, seed) {
        Ok(o) => o,
        Err(e @ (Error::Structural(_) | Error::Inconclusive { .. })) => {
            let verdict = Verdict::from_error(&e);
            return Ok(draft.finish(json!({ "suite": suite, "error": e.to_string() }), verdict));
        }
        Err(e) => return Err(e),
    };
    let verdict = outcomes.iter().fold(Verdict::Pass, |v, o| v.combine(o.verdict));
    Ok(draft.finish(json!({ "suite": suite, "trials": trials, "seed": seed, "outcomes": outcomes }), verdict))
}

