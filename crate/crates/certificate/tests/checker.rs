//! End-to-end checks: a reference certificate for a mixed
//! transcendental/inequality formula, structural failure modes, the
//! dimension-zero convention, and a soundness property on systems with
//! planted roots.

use std::collections::BTreeMap;

use proptest::prelude::*;

use ntacert_certificate::{
    check_certificate, formula_digest, Certificate, Outcome, Verdict,
};
use ntacert_formula::{parse_formula, Clause, Formula, Literal, Term};

const BUDGET: usize = 100_000;

/// Two transcendental equation clauses and two inequality bounds; the
/// certificate pins z and brackets the joint root of the selected equations
/// with a single box.
fn reference_formula() -> Formula {
    parse_formula(
        "(set-logic QF_NRA)\n\
         (declare-fun x () Real)\n\
         (declare-fun y () Real)\n\
         (declare-fun z () Real)\n\
         (assert (or (= (cos y) 0) (= (sin y) (exp x))))\n\
         (assert (or (= (sin y) 0) (= (cos y) (sin (- (* 8 (* x x)) z)))))\n\
         (assert (<= (- x y) (cos z)))\n\
         (assert (>= (+ x y) (sin z)))\n\
         (check-sat)\n",
    )
    .unwrap()
}

fn reference_certificate(phi: &Formula) -> Certificate {
    Certificate {
        formula_digest: formula_digest(phi),
        sigma: vec![1, 1, 0, 0],
        nu: [("z".to_string(), 0.2f64)].into_iter().collect(),
        beta: vec![[
            ("x".to_string(), (-0.1, 0.05)),
            ("y".to_string(), (1.4, 1.9)),
        ]
        .into_iter()
        .collect()],
    }
}

#[test]
fn reference_certificate_is_valid() {
    let phi = reference_formula();
    let cert = reference_certificate(&phi);
    let report = check_certificate(&phi, &cert, BUDGET);
    for c in &report.conditions {
        assert_eq!(c.outcome, Outcome::Pass, "{}: {}", c.name, c.detail);
    }
    assert_eq!(report.verdict, Verdict::Valid);
}

#[test]
fn moving_the_box_away_from_the_root_invalidates() {
    let phi = reference_formula();
    let mut cert = reference_certificate(&phi);
    cert.beta[0].insert("y".to_string(), (0.0, 0.5));
    let report = check_certificate(&phi, &cert, BUDGET);
    assert_eq!(report.verdict, Verdict::Invalid);
}

#[test]
fn digest_mismatch_is_rejected_before_any_math() {
    let phi = reference_formula();
    let mut cert = reference_certificate(&phi);
    cert.formula_digest = "00".repeat(32);
    let report = check_certificate(&phi, &cert, BUDGET);
    assert_eq!(report.verdict, Verdict::Invalid);
    assert_eq!(report.condition("digest").unwrap().outcome, Outcome::Fail);
    assert_eq!(
        report.condition("degree-nonzero").unwrap().outcome,
        Outcome::Skipped
    );
}

#[test]
fn selector_out_of_range_is_rejected() {
    let phi = reference_formula();
    let mut cert = reference_certificate(&phi);
    cert.sigma = vec![1, 5, 0, 0];
    let report = check_certificate(&phi, &cert, BUDGET);
    assert_eq!(report.verdict, Verdict::Invalid);
    assert_eq!(report.condition("selector").unwrap().outcome, Outcome::Fail);
}

#[test]
fn equation_count_must_match_uninstantiated_variables() {
    // One equation, two free variables: never certifiable at dimension 2.
    let phi = parse_formula(
        "(declare-fun x () Real)(declare-fun y () Real)\
         (assert (= x 0))(assert (<= y 1))",
    )
    .unwrap();
    let cert = Certificate {
        formula_digest: formula_digest(&phi),
        sigma: vec![0, 0],
        nu: BTreeMap::new(),
        beta: vec![[
            ("x".to_string(), (-1.0, 1.0)),
            ("y".to_string(), (0.0, 0.5)),
        ]
        .into_iter()
        .collect()],
    };
    let report = check_certificate(&phi, &cert, BUDGET);
    assert_eq!(report.verdict, Verdict::Invalid);
    assert_eq!(
        report.condition("equation-count").unwrap().outcome,
        Outcome::Fail
    );
}

#[test]
fn disconnected_boxes_fail_the_union_condition() {
    let phi = parse_formula("(declare-fun x () Real)(assert (= (* x x) 1))").unwrap();
    let mk = |lo: f64, hi: f64| {
        [("x".to_string(), (lo, hi))]
            .into_iter()
            .collect::<BTreeMap<_, _>>()
    };
    let cert = Certificate {
        formula_digest: formula_digest(&phi),
        sigma: vec![0],
        nu: BTreeMap::new(),
        beta: vec![mk(-1.5, -0.5), mk(0.5, 1.5)],
    };
    let report = check_certificate(&phi, &cert, BUDGET);
    assert_eq!(report.verdict, Verdict::Invalid);
    assert_eq!(report.condition("union-box").unwrap().outcome, Outcome::Fail);
}

#[test]
fn abutting_boxes_that_union_to_a_box_are_accepted() {
    // x² = 1 has the root 1 inside [0.5, 1.5]; β covers it with two pieces.
    let phi = parse_formula("(declare-fun x () Real)(assert (= (* x x) 1))").unwrap();
    let mk = |lo: f64, hi: f64| {
        [("x".to_string(), (lo, hi))]
            .into_iter()
            .collect::<BTreeMap<_, _>>()
    };
    let cert = Certificate {
        formula_digest: formula_digest(&phi),
        sigma: vec![0],
        nu: BTreeMap::new(),
        beta: vec![mk(0.5, 1.0), mk(1.0, 1.5)],
    };
    assert_eq!(check_certificate(&phi, &cert, BUDGET).verdict, Verdict::Valid);
}

#[test]
fn dimension_zero_rational_model_is_certifiable() {
    let phi = parse_formula(
        "(declare-fun x () Real)(declare-fun y () Real)\
         (assert (= (+ x y) 2))(assert (<= x y))",
    )
    .unwrap();
    let cert = Certificate {
        formula_digest: formula_digest(&phi),
        sigma: vec![0, 0],
        nu: [("x".to_string(), 0.5f64), ("y".to_string(), 1.5f64)]
            .into_iter()
            .collect(),
        beta: vec![BTreeMap::new()],
    };
    let report = check_certificate(&phi, &cert, BUDGET);
    assert_eq!(report.verdict, Verdict::Valid, "{:?}", report.conditions);

    // The same shape with a point that misses the equation exactly.
    let mut wrong = cert.clone();
    wrong.nu.insert("x".to_string(), 0.25);
    let report = check_certificate(&phi, &wrong, BUDGET);
    assert_eq!(report.verdict, Verdict::Invalid);
    assert_eq!(
        report.condition("inequalities").unwrap().outcome,
        Outcome::Fail
    );
}

#[test]
fn strict_inequalities_demand_strictly_negative_upper_bounds() {
    let phi = parse_formula(
        "(declare-fun x () Real)(assert (< x 0))(assert (= (+ x 1) 0))",
    )
    .unwrap();
    let mk_cert = |lo: f64, hi: f64| Certificate {
        formula_digest: formula_digest(&phi),
        sigma: vec![0, 0],
        nu: BTreeMap::new(),
        beta: vec![[("x".to_string(), (lo, hi))].into_iter().collect()],
    };
    // Root −1 well inside, x < 0 strictly on the whole box: valid.
    assert_eq!(
        check_certificate(&phi, &mk_cert(-1.5, -0.5), BUDGET).verdict,
        Verdict::Valid
    );
    // Box touches 0: x < 0 fails at the endpoint even though x ≤ 0 holds.
    let report = check_certificate(&phi, &mk_cert(-1.5, 0.0), BUDGET);
    assert_eq!(report.verdict, Verdict::Invalid);
    assert_eq!(
        report.condition("inequalities").unwrap().outcome,
        Outcome::Fail
    );
}

#[test]
fn budget_exhaustion_is_undetermined_not_invalid() {
    let phi = parse_formula(
        "(declare-fun x () Real)(declare-fun y () Real)\
         (assert (= x 0))(assert (= y 0))",
    )
    .unwrap();
    let cert = Certificate {
        formula_digest: formula_digest(&phi),
        sigma: vec![0, 0],
        nu: BTreeMap::new(),
        beta: vec![[
            ("x".to_string(), (-1.0, 1.0)),
            ("y".to_string(), (-1.0, 1.0)),
        ]
        .into_iter()
        .collect()],
    };
    let report = check_certificate(&phi, &cert, 3);
    assert_eq!(report.verdict, Verdict::Undetermined);
    assert_eq!(
        report.condition("boundary-nonzero").unwrap().outcome,
        Outcome::Undetermined
    );
    // Inequalities were still checked (there are none — vacuous pass).
    assert_eq!(
        report.condition("inequalities").unwrap().outcome,
        Outcome::Pass
    );
}

/// Grid of exactly representable values used by the planted-root property.
fn grid(range: std::ops::RangeInclusive<i32>) -> impl Strategy<Value = f64> {
    range.prop_map(|k| k as f64 / 16.0)
}

fn planted_formula(roots: &[f64]) -> Formula {
    let vars: Vec<String> = (0..roots.len()).map(|i| format!("v{i}")).collect();
    let clauses = roots
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            let c = num_rational::BigRational::from_float(r).unwrap();
            Clause::unit(Literal::eq0(Term::sub(Term::var(i), Term::Const(c))))
        })
        .collect();
    Formula { vars, clauses }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    /// A correct certificate for a system with an analytically known root is
    /// accepted, and the root indeed lies inside the certified box union.
    #[test]
    fn planted_roots_certify_and_lie_inside_the_box(
        roots in prop::collection::vec(grid(-32..=32), 1..=3),
        pad_lo in grid(1..=8),
        pad_hi in grid(1..=8),
    ) {
        let phi = planted_formula(&roots);
        let beta: BTreeMap<String, (f64, f64)> = roots
            .iter()
            .enumerate()
            .map(|(i, &r)| (format!("v{i}"), (r - pad_lo, r + pad_hi)))
            .collect();
        let cert = Certificate {
            formula_digest: formula_digest(&phi),
            sigma: vec![0; roots.len()],
            nu: BTreeMap::new(),
            beta: vec![beta.clone()],
        };
        let report = check_certificate(&phi, &cert, BUDGET);
        prop_assert_eq!(report.verdict, Verdict::Valid);
        for (i, &r) in roots.iter().enumerate() {
            let (lo, hi) = beta[&format!("v{i}")];
            prop_assert!(lo <= r && r <= hi);
        }
    }

    /// Shifting the box strictly past the root flips the verdict: the
    /// checker cannot be talked into a root-free box.
    #[test]
    fn root_free_boxes_are_rejected(
        roots in prop::collection::vec(grid(-32..=32), 1..=3),
        gap in grid(1..=8),
    ) {
        let phi = planted_formula(&roots);
        let beta: BTreeMap<String, (f64, f64)> = roots
            .iter()
            .enumerate()
            .map(|(i, &r)| {
                let (lo, hi) = if i == 0 {
                    (r + gap, r + gap + 0.5)
                } else {
                    (r - 0.5, r + 0.5)
                };
                (format!("v{i}"), (lo, hi))
            })
            .collect();
        let cert = Certificate {
            formula_digest: formula_digest(&phi),
            sigma: vec![0; roots.len()],
            nu: BTreeMap::new(),
            beta: vec![beta],
        };
        let report = check_certificate(&phi, &cert, BUDGET);
        prop_assert_eq!(report.verdict, Verdict::Invalid);
    }
}
