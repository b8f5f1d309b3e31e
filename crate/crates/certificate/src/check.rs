//! The independent certificate checker.
//!
//! Validation needs nothing from the search side: formulas, outward-rounded
//! interval evaluation, and the topological degree are the entire trust
//! base. The checker recomputes every condition from the formula and the
//! certificate alone and reports them one by one: the digest pin, the
//! literal selector, domain discipline, the equation/variable count, the
//! box-union shape, boundary nonvanishing, a nonzero degree, and the
//! inequality sign conditions on every box.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use num_rational::BigRational;
use num_traits::Zero;

use ntacert_formula::{partition_selected, selected_literals, Formula, Rel, VarId};
use ntacert_interval::{eval_term, union_hull_if_box, BoxesError, Interval, NamedBox};
use ntacert_topdeg::{degree, DegreeResult};

use crate::model::{formula_digest, Certificate};

/// Final answer of a certificate check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// Every condition verified.
    Valid,
    /// Some condition failed outright.
    Invalid,
    /// Verification ran out of budget before any condition failed.
    Undetermined,
}

/// Outcome of a single condition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
    /// Budget exhausted while checking this condition.
    Undetermined,
    /// Not attempted because an earlier condition already settled the
    /// verdict.
    Skipped,
}

#[derive(Clone, Debug)]
pub struct ConditionReport {
    pub name: &'static str,
    pub outcome: Outcome,
    pub detail: String,
    pub elapsed: Duration,
}

#[derive(Clone, Debug)]
pub struct CheckReport {
    pub verdict: Verdict,
    pub conditions: Vec<ConditionReport>,
    pub elapsed: Duration,
}

impl CheckReport {
    pub fn condition(&self, name: &str) -> Option<&ConditionReport> {
        self.conditions.iter().find(|c| c.name == name)
    }
}

pub const CONDITION_NAMES: [&str; 8] = [
    "digest",
    "selector",
    "domains",
    "equation-count",
    "union-box",
    "boundary-nonzero",
    "degree-nonzero",
    "inequalities",
];

struct Run {
    conditions: Vec<ConditionReport>,
    started: Instant,
    stage: Instant,
}

impl Run {
    fn new() -> Run {
        let now = Instant::now();
        Run {
            conditions: Vec::new(),
            started: now,
            stage: now,
        }
    }

    fn record(&mut self, name: &'static str, outcome: Outcome, detail: impl Into<String>) {
        let now = Instant::now();
        self.conditions.push(ConditionReport {
            name,
            outcome,
            detail: detail.into(),
            elapsed: now - self.stage,
        });
        self.stage = now;
    }

    /// Marks every condition not yet reported as skipped and closes the
    /// report with the given verdict.
    fn finish(mut self, verdict: Verdict) -> CheckReport {
        for name in CONDITION_NAMES {
            if !self.conditions.iter().any(|c| c.name == name) {
                self.conditions.push(ConditionReport {
                    name,
                    outcome: Outcome::Skipped,
                    detail: "not attempted".to_string(),
                    elapsed: Duration::ZERO,
                });
            }
        }
        // Report in canonical condition order regardless of execution order.
        self.conditions
            .sort_by_key(|c| CONDITION_NAMES.iter().position(|n| *n == c.name));
        CheckReport {
            verdict,
            conditions: self.conditions,
            elapsed: self.started.elapsed(),
        }
    }
}

fn interval_satisfies(iv: Interval, rel: Rel) -> bool {
    match rel {
        // Equations at a fully pinned point must evaluate to exactly zero;
        // outward rounding keeps rational arithmetic exact, so a true
        // rational model really achieves this.
        Rel::Eq => iv.is_point() && iv.lo() == 0.0,
        Rel::Le => iv.hi() <= 0.0,
        Rel::Lt => iv.hi() < 0.0,
    }
}

/// Checks a certificate against a formula.
///
/// `budget` caps the cell count of the degree computation. The verdict is
/// `Valid` only if every condition verified; budget exhaustion anywhere
/// yields `Undetermined` rather than a guess.
pub fn check_certificate(phi: &Formula, cert: &Certificate, budget: usize) -> CheckReport {
    let mut run = Run::new();

    // Digest pin.
    let expected = formula_digest(phi);
    if cert.formula_digest != expected {
        run.record(
            "digest",
            Outcome::Fail,
            format!(
                "certificate was issued for a different formula (expected {expected}, got {})",
                cert.formula_digest
            ),
        );
        return run.finish(Verdict::Invalid);
    }
    run.record("digest", Outcome::Pass, "sha-256 matches");

    // (a) selector totality.
    let selected = match selected_literals(phi, &cert.sigma) {
        Ok(s) => {
            run.record(
                "selector",
                Outcome::Pass,
                format!("one literal per clause ({} clauses)", s.len()),
            );
            s
        }
        Err(e) => {
            run.record("selector", Outcome::Fail, e.to_string());
            return run.finish(Verdict::Invalid);
        }
    };

    // Domain discipline: ν names resolve and are finite, V ⊆ Vars(σ(φ)),
    // every box ranges exactly over Vars(φ) \ V.
    let mut nu: BTreeMap<VarId, f64> = BTreeMap::new();
    for (name, &v) in &cert.nu {
        let Some(id) = phi.var_id(name) else {
            run.record(
                "domains",
                Outcome::Fail,
                format!("instantiated variable `{name}` does not occur in the formula"),
            );
            return run.finish(Verdict::Invalid);
        };
        if !v.is_finite() {
            run.record(
                "domains",
                Outcome::Fail,
                format!("instantiation of `{name}` is not a finite float"),
            );
            return run.finish(Verdict::Invalid);
        }
        nu.insert(id, v);
    }
    let (system, warnings) =
        partition_selected(phi, &cert.sigma, &nu, &BigRational::zero()).expect("validated above");
    if let Some(w) = warnings.first() {
        run.record("domains", Outcome::Fail, w.clone());
        return run.finish(Verdict::Invalid);
    }

    let box_domain: Vec<VarId> = system.domain.clone();
    let box_names: BTreeSet<&str> = box_domain.iter().map(|&v| phi.var_name(v)).collect();
    let mut boxes: Vec<NamedBox> = Vec::with_capacity(cert.beta.len());
    for (i, b) in cert.beta.iter().enumerate() {
        let names: BTreeSet<&str> = b.keys().map(String::as_str).collect();
        if names != box_names {
            run.record(
                "domains",
                Outcome::Fail,
                format!(
                    "box {i} ranges over {{{}}} but Vars(φ)\\V is {{{}}}",
                    names.into_iter().collect::<Vec<_>>().join(", "),
                    box_names.into_iter().collect::<Vec<_>>().join(", ")
                ),
            );
            return run.finish(Verdict::Invalid);
        }
        let mut pairs = Vec::with_capacity(b.len());
        for (name, &(lo, hi)) in b {
            if lo.is_nan() || hi.is_nan() || !(lo <= hi) || (lo == hi && lo.is_infinite()) {
                run.record(
                    "domains",
                    Outcome::Fail,
                    format!("box {i}: `{name}` has an invalid interval [{lo}, {hi}]"),
                );
                return run.finish(Verdict::Invalid);
            }
            pairs.push((phi.var_id(name).unwrap(), Interval::new(lo, hi)));
        }
        boxes.push(NamedBox::new(pairs));
    }
    if boxes.is_empty() {
        run.record("domains", Outcome::Fail, "certificate has no boxes");
        return run.finish(Verdict::Invalid);
    }
    run.record(
        "domains",
        Outcome::Pass,
        format!(
            "ν pins {} of {} variables; {} box(es) over the rest",
            nu.len(),
            phi.num_vars(),
            boxes.len()
        ),
    );

    if box_domain.is_empty() {
        return check_dimension_zero(&nu, &selected, run);
    }

    // (b) as many selected equations as uninstantiated variables.
    if system.f.len() != box_domain.len() {
        run.record(
            "equation-count",
            Outcome::Fail,
            format!(
                "{} selected equation(s) for {} uninstantiated variable(s)",
                system.f.len(),
                box_domain.len()
            ),
        );
        return run.finish(Verdict::Invalid);
    }
    run.record(
        "equation-count",
        Outcome::Pass,
        format!("{} equations over {} variables", system.f.len(), box_domain.len()),
    );

    // (c) the boxes union to a box.
    let hull = match union_hull_if_box(&boxes) {
        Ok(Some(h)) => {
            run.record("union-box", Outcome::Pass, "β unions to a box");
            h
        }
        Ok(None) => {
            run.record(
                "union-box",
                Outcome::Fail,
                "the union of the boxes is not itself a box",
            );
            return run.finish(Verdict::Invalid);
        }
        Err(BoxesError::UnionBudgetExceeded) => {
            run.record(
                "union-box",
                Outcome::Undetermined,
                "slab budget exhausted while testing the union",
            );
            return run.finish(Verdict::Undetermined);
        }
        Err(e) => {
            run.record("union-box", Outcome::Fail, e.to_string());
            return run.finish(Verdict::Invalid);
        }
    };

    // (f) inequalities hold on every box of β — checked before the degree
    // so a report still carries them when the degree budget runs dry.
    let mut ineq_failures = Vec::new();
    for (i, b) in boxes.iter().enumerate() {
        for (k, g) in system.g.iter().enumerate() {
            let iv = eval_term(g, b).expect("inequality variables live in the box domain");
            let ok = if system.g_strict[k] {
                iv.hi() < 0.0
            } else {
                iv.hi() <= 0.0
            };
            if !ok {
                ineq_failures.push(format!(
                    "inequality {k} on box {i}: upper bound {} not {} 0",
                    iv.hi(),
                    if system.g_strict[k] { "<" } else { "≤" }
                ));
            }
        }
    }
    if ineq_failures.is_empty() {
        run.record(
            "inequalities",
            Outcome::Pass,
            format!(
                "{} inequalit{} verified on {} box(es)",
                system.g.len(),
                if system.g.len() == 1 { "y" } else { "ies" },
                boxes.len()
            ),
        );
    } else {
        run.record("inequalities", Outcome::Fail, ineq_failures.join("; "));
        return run.finish(Verdict::Invalid);
    }

    // (d) + (e): one degree computation certifies 0 ∉ F(∂B_β) on the way to
    // the degree itself.
    match degree(&system.f, &hull, budget) {
        DegreeResult::Degree(d) => {
            run.record(
                "boundary-nonzero",
                Outcome::Pass,
                "sign covering of ∂B_β completed",
            );
            if d != 0 {
                run.record("degree-nonzero", Outcome::Pass, format!("deg(F, B_β, 0) = {d}"));
                run.finish(Verdict::Valid)
            } else {
                run.record("degree-nonzero", Outcome::Fail, "deg(F, B_β, 0) = 0");
                run.finish(Verdict::Invalid)
            }
        }
        DegreeResult::BoundaryZeroUnverified => {
            run.record(
                "boundary-nonzero",
                Outcome::Fail,
                "0 ∈ F(∂B_β) could not be excluded at float resolution",
            );
            run.finish(Verdict::Invalid)
        }
        DegreeResult::BudgetExceeded => {
            run.record(
                "boundary-nonzero",
                Outcome::Undetermined,
                "cell budget exhausted",
            );
            run.finish(Verdict::Undetermined)
        }
    }
}

/// Fully instantiated certificates: every variable is pinned by ν, β is the
/// empty-domain box, and the empty equation system has degree 1 by the
/// convention for empty products. What remains is to verify each selected
/// literal at the point — equations must come out exactly zero.
fn check_dimension_zero(
    nu: &BTreeMap<VarId, f64>,
    selected: &[&ntacert_formula::Literal],
    mut run: Run,
) -> CheckReport {
    run.record(
        "equation-count",
        Outcome::Pass,
        "V = Vars(φ): count condition waived in dimension 0",
    );
    run.record("union-box", Outcome::Pass, "empty-domain box");
    run.record("boundary-nonzero", Outcome::Pass, "empty system: no boundary");
    run.record(
        "degree-nonzero",
        Outcome::Pass,
        "empty system has degree 1 by convention",
    );

    let point = NamedBox::new(
        nu.iter()
            .map(|(&v, &x)| (v, Interval::point(x)))
            .collect(),
    );
    let mut failures = Vec::new();
    for (i, lit) in selected.iter().enumerate() {
        let iv = eval_term(&lit.term, &point).expect("all variables are pinned");
        if !interval_satisfies(iv, lit.rel) {
            failures.push(format!(
                "selected literal {i} evaluates to [{}, {}] at ν",
                iv.lo(),
                iv.hi()
            ));
        }
    }
    if failures.is_empty() {
        run.record(
            "inequalities",
            Outcome::Pass,
            format!("{} selected literal(s) hold exactly at ν", selected.len()),
        );
        run.finish(Verdict::Valid)
    } else {
        run.record("inequalities", Outcome::Fail, failures.join("; "));
        run.finish(Verdict::Invalid)
    }
}
