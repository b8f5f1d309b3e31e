//! Parser for the accepted SMT-LIB subset.
//!
//! Accepted commands: `declare-fun` / `declare-const` of sort `Real`,
//! `assert`, plus ignorable script framing (`set-logic`, `set-info`,
//! `set-option`, `check-sat`, `get-model`, `exit`). Assertions may use
//! `and`, `or`, `not` over atoms `= <= < >= >` whose sides are terms built
//! from `+ - * / ^ sin cos tan exp`, variables and rational numerals.
//!
//! Everything is normalized on the way in: negation is pushed onto atoms,
//! atoms become `t ⋈ 0` literals with the relation side moved left, `or` is
//! distributed over `and` (capped), divisions by constants and integer
//! powers are expanded. The result is a canonical CNF [`Formula`].

use crate::formula::{Clause, Formula, Literal};
use crate::term::{Func, Term, VarId};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

/// Hard ceiling on the number of clauses produced by distributing `or` over
/// `and` across all assertions.
pub const CNF_CLAUSE_CAP: usize = 1_000;

/// Largest accepted integer exponent for `^`.
const MAX_POWER: u32 = 1_000;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}, col {col}: {msg}")]
pub struct ParseError {
    pub line: u32,
    pub col: u32,
    pub msg: String,
}

impl ParseError {
    fn at(pos: (u32, u32), msg: impl Into<String>) -> ParseError {
        ParseError {
            line: pos.0,
            col: pos.1,
            msg: msg.into(),
        }
    }
}

// ---------------------------------------------------------------- s-exprs

#[derive(Debug)]
enum Sexpr {
    Atom(String, (u32, u32)),
    List(Vec<Sexpr>, (u32, u32)),
}

impl Sexpr {
    fn pos(&self) -> (u32, u32) {
        match self {
            Sexpr::Atom(_, p) | Sexpr::List(_, p) => *p,
        }
    }
}

struct Lexer<'a> {
    src: &'a [u8],
    i: usize,
    line: u32,
    col: u32,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Lexer<'a> {
        Lexer {
            src: src.as_bytes(),
            i: 0,
            line: 1,
            col: 1,
        }
    }

    fn bump(&mut self) -> u8 {
        let c = self.src[self.i];
        self.i += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        c
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.i).copied()
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_ascii_whitespace() {
                self.bump();
            } else if c == b';' {
                while let Some(c) = self.peek() {
                    self.bump();
                    if c == b'\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn read_one(&mut self) -> Result<Option<Sexpr>, ParseError> {
        self.skip_trivia();
        let Some(c) = self.peek() else {
            return Ok(None);
        };
        let pos = (self.line, self.col);
        match c {
            b'(' => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_trivia();
                    match self.peek() {
                        None => return Err(ParseError::at(pos, "unclosed `(`")),
                        Some(b')') => {
                            self.bump();
                            return Ok(Some(Sexpr::List(items, pos)));
                        }
                        Some(_) => match self.read_one()? {
                            Some(e) => items.push(e),
                            None => return Err(ParseError::at(pos, "unclosed `(`")),
                        },
                    }
                }
            }
            b')' => Err(ParseError::at(pos, "unexpected `)`")),
            b'"' => {
                // string literal: only appears inside ignored commands
                self.bump();
                let mut s = String::from("\"");
                loop {
                    match self.peek() {
                        None => return Err(ParseError::at(pos, "unclosed string")),
                        Some(b'"') => {
                            self.bump();
                            s.push('"');
                            return Ok(Some(Sexpr::Atom(s, pos)));
                        }
                        Some(c) => {
                            self.bump();
                            s.push(c as char);
                        }
                    }
                }
            }
            _ => {
                let mut s = String::new();
                while let Some(c) = self.peek() {
                    if c.is_ascii_whitespace() || c == b'(' || c == b')' || c == b';' {
                        break;
                    }
                    self.bump();
                    s.push(c as char);
                }
                Ok(Some(Sexpr::Atom(s, pos)))
            }
        }
    }
}

// ------------------------------------------------------- raw propositions

/// Assertion body before CNF: negation-free boolean structure over atoms.
enum Prop {
    And(Vec<Prop>),
    Or(Vec<Prop>),
    Lit(Literal),
}

// ---------------------------------------------------------------- parser

struct Parser {
    /// Declared variable names in declaration order.
    decls: Vec<String>,
    index: BTreeMap<String, usize>,
}

pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let mut lexer = Lexer::new(text);
    let mut parser = Parser {
        decls: Vec::new(),
        index: BTreeMap::new(),
    };
    let mut clauses: Vec<Clause> = Vec::new();

    while let Some(cmd) = lexer.read_one()? {
        parser.command(&cmd, &mut clauses)?;
    }

    // Rebuild the variable table from the variables that actually occur, in
    // declaration order, and remap ids to be dense.
    let mut used = BTreeSet::new();
    for c in &clauses {
        used.extend(c.vars());
    }
    let mut map = BTreeMap::new();
    let mut vars = Vec::new();
    for (old, name) in parser.decls.iter().enumerate() {
        if used.contains(&VarId(old)) {
            map.insert(VarId(old), VarId(vars.len()));
            vars.push(name.clone());
        }
    }
    let clauses = clauses
        .into_iter()
        .map(|c| {
            Clause::new(
                c.literals
                    .into_iter()
                    .map(|l| Literal::new(l.term.remap_vars(&map), l.rel))
                    .collect(),
            )
        })
        .collect();

    Ok(Formula { vars, clauses })
}

impl Parser {
    fn command(&mut self, cmd: &Sexpr, clauses: &mut Vec<Clause>) -> Result<(), ParseError> {
        let Sexpr::List(items, pos) = cmd else {
            return Err(ParseError::at(cmd.pos(), "expected a command list"));
        };
        let Some(Sexpr::Atom(head, _)) = items.first() else {
            return Err(ParseError::at(*pos, "expected a command name"));
        };
        match head.as_str() {
            "set-logic" | "set-info" | "set-option" | "check-sat" | "get-model" | "exit" => Ok(()),
            "declare-fun" => {
                // (declare-fun name () Real)
                if items.len() != 4 {
                    return Err(ParseError::at(*pos, "declare-fun expects (declare-fun name () Real)"));
                }
                let name = self.symbol(&items[1])?;
                match &items[2] {
                    Sexpr::List(args, _) if args.is_empty() => {}
                    other => {
                        return Err(ParseError::at(
                            other.pos(),
                            "only constant declarations are supported (argument sorts must be `()`)",
                        ))
                    }
                }
                self.expect_real(&items[3])?;
                self.declare(name, items[1].pos())
            }
            "declare-const" => {
                if items.len() != 3 {
                    return Err(ParseError::at(*pos, "declare-const expects (declare-const name Real)"));
                }
                let name = self.symbol(&items[1])?;
                self.expect_real(&items[2])?;
                self.declare(name, items[1].pos())
            }
            "assert" => {
                if items.len() != 2 {
                    return Err(ParseError::at(*pos, "assert expects exactly one argument"));
                }
                let prop = self.prop(&items[1], false)?;
                let mut new = cnf(prop, *pos, CNF_CLAUSE_CAP.saturating_sub(clauses.len()))?;
                clauses.append(&mut new);
                Ok(())
            }
            other => Err(ParseError::at(*pos, format!("unsupported command `{other}`"))),
        }
    }

    fn declare(&mut self, name: String, pos: (u32, u32)) -> Result<(), ParseError> {
        if self.index.contains_key(&name) {
            return Err(ParseError::at(pos, format!("variable `{name}` declared twice")));
        }
        self.index.insert(name.clone(), self.decls.len());
        self.decls.push(name);
        Ok(())
    }

    fn symbol(&self, e: &Sexpr) -> Result<String, ParseError> {
        match e {
            Sexpr::Atom(s, _) if !s.starts_with('"') => Ok(s.clone()),
            _ => Err(ParseError::at(e.pos(), "expected a symbol")),
        }
    }

    fn expect_real(&self, e: &Sexpr) -> Result<(), ParseError> {
        match e {
            Sexpr::Atom(s, _) if s == "Real" => Ok(()),
            _ => Err(ParseError::at(e.pos(), "only sort Real is supported")),
        }
    }

    /// Parses a boolean expression; `neg` tracks a pending negation, which is
    /// pushed down to the atoms (`¬(a=b) ⇒ a<b ∨ b<a`, `¬(a≤b) ⇒ b<a`,
    /// `¬(a<b) ⇒ b≤a`).
    fn prop(&mut self, e: &Sexpr, neg: bool) -> Result<Prop, ParseError> {
        let Sexpr::List(items, pos) = e else {
            let name = self.symbol(e).unwrap_or_default();
            return Err(ParseError::at(
                e.pos(),
                format!("unsupported construct `{name}` (Boolean variables are not supported)"),
            ));
        };
        let Some(Sexpr::Atom(head, _)) = items.first() else {
            return Err(ParseError::at(*pos, "expected an operator"));
        };
        let args = &items[1..];
        match head.as_str() {
            "and" | "or" => {
                if args.is_empty() {
                    return Err(ParseError::at(*pos, format!("`{head}` needs arguments")));
                }
                let sub: Result<Vec<_>, _> = args.iter().map(|a| self.prop(a, neg)).collect();
                // De Morgan: a negated `and` becomes an `or` and vice versa.
                let conj = (head == "and") != neg;
                Ok(if conj { Prop::And(sub?) } else { Prop::Or(sub?) })
            }
            "not" => {
                if args.len() != 1 {
                    return Err(ParseError::at(*pos, "`not` takes one argument"));
                }
                self.prop(&args[0], !neg)
            }
            "=" | "<=" | "<" | ">=" | ">" => {
                if args.len() != 2 {
                    return Err(ParseError::at(*pos, format!("`{head}` takes two arguments")));
                }
                let a = self.term(&args[0])?;
                let b = self.term(&args[1])?;
                Ok(atom(head, a, b, neg))
            }
            "let" | "forall" | "exists" | "ite" | "=>" | "xor" | "distinct" => Err(
                ParseError::at(*pos, format!("unsupported construct `{head}`")),
            ),
            other => Err(ParseError::at(*pos, format!("unsupported operator `{other}`"))),
        }
    }

    fn term(&mut self, e: &Sexpr) -> Result<Term, ParseError> {
        match e {
            Sexpr::Atom(s, pos) => self.atom_term(s, *pos),
            Sexpr::List(items, pos) => {
                let Some(Sexpr::Atom(head, _)) = items.first() else {
                    return Err(ParseError::at(*pos, "expected an operator"));
                };
                let args: Result<Vec<Term>, _> = items[1..].iter().map(|a| self.term(a)).collect();
                let args = args?;
                match (head.as_str(), args.len()) {
                    ("+", n) if n >= 2 => {
                        Ok(args.into_iter().reduce(Term::add).unwrap())
                    }
                    ("-", 1) => Ok(Term::neg(args.into_iter().next().unwrap())),
                    ("-", n) if n >= 2 => {
                        let mut it = args.into_iter();
                        let first = it.next().unwrap();
                        Ok(it.fold(first, Term::sub))
                    }
                    ("*", n) if n >= 2 => {
                        Ok(args.into_iter().reduce(Term::mul).unwrap())
                    }
                    ("/", 2) => {
                        let mut it = args.into_iter();
                        let num = it.next().unwrap();
                        let den = it.next().unwrap();
                        let Some(c) = den.fold_constant() else {
                            return Err(ParseError::at(
                                *pos,
                                "division is only supported by a nonzero constant",
                            ));
                        };
                        if c.is_zero() {
                            return Err(ParseError::at(*pos, "division by zero"));
                        }
                        Ok(Term::mul(Term::Const(c.recip()), num))
                    }
                    ("^", 2) => {
                        let mut it = args.into_iter();
                        let base = it.next().unwrap();
                        let exp = it.next().unwrap();
                        let Some(k) = exp.fold_constant().filter(|k| k.is_integer() && !k.is_negative())
                        else {
                            return Err(ParseError::at(
                                *pos,
                                "`^` needs a nonnegative integer exponent",
                            ));
                        };
                        let Some(k) = k.to_integer().to_u32().filter(|k| *k <= MAX_POWER) else {
                            return Err(ParseError::at(*pos, format!("exponent exceeds {MAX_POWER}")));
                        };
                        Ok(expand_power(base, k))
                    }
                    ("sin", 1) | ("cos", 1) | ("tan", 1) | ("exp", 1) => {
                        let f = match head.as_str() {
                            "sin" => Func::Sin,
                            "cos" => Func::Cos,
                            "tan" => Func::Tan,
                            _ => Func::Exp,
                        };
                        Ok(Term::app(f, args.into_iter().next().unwrap()))
                    }
                    (op, n) => Err(ParseError::at(
                        *pos,
                        format!("unsupported term operator `{op}` with {n} argument(s)"),
                    )),
                }
            }
        }
    }

    fn atom_term(&mut self, s: &str, pos: (u32, u32)) -> Result<Term, ParseError> {
        let first = s.chars().next().unwrap_or(' ');
        if first.is_ascii_digit() || first == '.' || (first == '-' && s.len() > 1) {
            return parse_numeral(s, pos).map(Term::Const);
        }
        match self.index.get(s) {
            Some(&i) => Ok(Term::Var(VarId(i))),
            None => Err(ParseError::at(pos, format!("undeclared variable `{s}`"))),
        }
    }
}

/// Expands `base ^ k` into repeated multiplication (`k = 0` gives `1`).
fn expand_power(base: Term, k: u32) -> Term {
    if k == 0 {
        return Term::int(1);
    }
    let mut acc = base.clone();
    for _ in 1..k {
        acc = Term::mul(acc, base.clone());
    }
    acc
}

/// Parses an SMT-LIB numeral or decimal into an exact rational.
fn parse_numeral(s: &str, pos: (u32, u32)) -> Result<BigRational, ParseError> {
    let (neg, digits) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let bad = || ParseError::at(pos, format!("malformed numeral `{s}`"));
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((i, f)) => (i, f),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let joined = format!("{int_part}{frac_part}");
    let n: BigInt = joined.parse().map_err(|_| bad())?;
    let den = BigInt::from(10u32).pow(frac_part.len() as u32);
    let r = BigRational::new(n, den);
    Ok(if neg { -r } else { r })
}

/// Builds the literal(s) for `a ⋈ b`, moving everything to the left of the
/// relation. `≥` and `>` swap sides; a zero side is kept implicit rather
/// than producing `t - 0`.
fn atom(op: &str, a: Term, b: Term, neg: bool) -> Prop {
    // Normalize direction so we only deal with =, <=, <.
    let (op, a, b) = match op {
        ">=" => ("<=", b, a),
        ">" => ("<", b, a),
        _ => (op, a, b),
    };
    let lhs = |a: Term, b: Term| {
        if b.fold_constant().is_some_and(|c| c.is_zero()) {
            a
        } else if a.fold_constant().is_some_and(|c| c.is_zero()) {
            Term::neg(b)
        } else {
            Term::sub(a, b)
        }
    };
    match (op, neg) {
        ("=", false) => Prop::Lit(Literal::eq0(lhs(a, b))),
        ("=", true) => Prop::Or(vec![
            Prop::Lit(Literal::lt0(lhs(a.clone(), b.clone()))),
            Prop::Lit(Literal::lt0(lhs(b, a))),
        ]),
        ("<=", false) => Prop::Lit(Literal::le0(lhs(a, b))),
        ("<=", true) => Prop::Lit(Literal::lt0(lhs(b, a))),
        ("<", false) => Prop::Lit(Literal::lt0(lhs(a, b))),
        ("<", true) => Prop::Lit(Literal::le0(lhs(b, a))),
        _ => unreachable!(),
    }
}

/// Distributes `or` over `and`, producing at most `cap` clauses.
fn cnf(prop: Prop, pos: (u32, u32), cap: usize) -> Result<Vec<Clause>, ParseError> {
    fn go(prop: Prop, cap: usize) -> Option<Vec<Vec<Literal>>> {
        match prop {
            Prop::Lit(l) => Some(vec![vec![l]]),
            Prop::And(subs) => {
                let mut out = Vec::new();
                for s in subs {
                    out.extend(go(s, cap)?);
                    if out.len() > cap {
                        return None;
                    }
                }
                Some(out)
            }
            Prop::Or(subs) => {
                // cross product of the sub-CNFs
                let mut acc: Vec<Vec<Literal>> = vec![vec![]];
                for s in subs {
                    let rhs = go(s, cap)?;
                    let mut next = Vec::with_capacity(acc.len() * rhs.len());
                    for left in &acc {
                        for right in &rhs {
                            let mut c = left.clone();
                            c.extend(right.iter().cloned());
                            next.push(c);
                            if next.len() > cap {
                                return None;
                            }
                        }
                    }
                    acc = next;
                }
                Some(acc)
            }
        }
    }
    match go(prop, cap) {
        Some(cs) => Ok(cs.into_iter().map(Clause::new).collect()),
        None => Err(ParseError::at(
            pos,
            format!("assertion exceeds the CNF distribution cap of {CNF_CLAUSE_CAP} clauses"),
        )),
    }
}
