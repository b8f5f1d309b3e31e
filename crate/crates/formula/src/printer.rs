//! Canonical printer. Output is a valid script in the accepted input subset
//! and re-parses to a structurally identical formula, so content digests can
//! be taken over the printed form.

use crate::formula::{Formula, Literal, Rel};
use crate::term::Term;
use num_rational::BigRational;
use num_traits::Signed;
use std::fmt::Write;

pub fn print_formula(phi: &Formula) -> String {
    let mut out = String::new();
    for name in &phi.vars {
        writeln!(out, "(declare-fun {name} () Real)").unwrap();
    }
    for clause in &phi.clauses {
        let body = if clause.literals.len() == 1 {
            print_literal(&clause.literals[0], phi)
        } else {
            let lits: Vec<String> = clause
                .literals
                .iter()
                .map(|l| print_literal(l, phi))
                .collect();
            format!("(or {})", lits.join(" "))
        };
        writeln!(out, "(assert {body})").unwrap();
    }
    out
}

pub fn print_literal(lit: &Literal, phi: &Formula) -> String {
    let rel = match lit.rel {
        Rel::Eq => "=",
        Rel::Le => "<=",
        Rel::Lt => "<",
    };
    format!("({rel} {} 0)", print_term(&lit.term, phi))
}

pub fn print_term(t: &Term, phi: &Formula) -> String {
    let mut out = String::new();
    go(t, phi, &mut out);
    out
}

fn go(t: &Term, phi: &Formula, out: &mut String) {
    match t {
        Term::Var(v) => out.push_str(phi.var_name(*v)),
        Term::Const(c) => print_rational(c, out),
        Term::Add(a, b) => {
            out.push_str("(+ ");
            go(a, phi, out);
            out.push(' ');
            go(b, phi, out);
            out.push(')');
        }
        Term::Mul(a, b) => {
            out.push_str("(* ");
            go(a, phi, out);
            out.push(' ');
            go(b, phi, out);
            out.push(')');
        }
        Term::Neg(a) => {
            out.push_str("(- ");
            go(a, phi, out);
            out.push(')');
        }
        Term::App(f, a) => {
            out.push('(');
            out.push_str(f.name());
            out.push(' ');
            go(a, phi, out);
            out.push(')');
        }
    }
}

fn print_rational(c: &BigRational, out: &mut String) {
    // negative constants print as (- ...) so they re-parse through the
    // constant-folding `-`
    if c.is_negative() {
        out.push_str("(- ");
        print_rational(&-c, out);
        out.push(')');
        return;
    }
    if c.is_integer() {
        write!(out, "{}", c.numer()).unwrap();
    } else {
        write!(out, "(/ {} {})", c.numer(), c.denom()).unwrap();
    }
}
