use std::cell::RefCell;
use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use num_traits::Signed;
use thiserror::Error;

use super::eval::{eval, EvalError, Value};
use super::{Kind, Rational, Sort, Term};

/// Logic used when the caller does not ask for a specific one. Mixed
/// BitVector and real arithmetic has no standard SMT-LIB logic name.
pub const DEFAULT_LOGIC: &str = "ALL";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScriptError {
    #[error("symbol `{0}` declared twice")]
    Duplicate(String),
    #[error("symbol `{0}` used but never declared")]
    Undeclared(String),
    #[error("symbol `{name}` declared as {declared} but used as {used}")]
    SortClash {
        name: String,
        declared: Sort,
        used: Sort,
    },
    #[error("assertions must be Boolean, found {0}")]
    NotBoolean(Sort),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Item {
    Declare(String, Sort),
    Define(String, Term),
}

/// Ordered declarations, definitions and assertions.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Script {
    items: Vec<Item>,
    assertions: Vec<Term>,
    sorts: HashMap<String, Sort>,
}

impl Script {
    pub fn new() -> Self {
        Self::default()
    }

    fn check_symbols(&self, term: &Term) -> Result<(), ScriptError> {
        let mut seen = HashSet::new();
        let mut stack = vec![term];
        while let Some(t) = stack.pop() {
            if let Kind::Symbol(name) = t.kind() {
                if !seen.insert(name.clone()) {
                    continue;
                }
                match self.sorts.get(name) {
                    None => return Err(ScriptError::Undeclared(name.clone())),
                    Some(s) if *s != t.sort() => {
                        return Err(ScriptError::SortClash {
                            name: name.clone(),
                            declared: *s,
                            used: t.sort(),
                        })
                    }
                    _ => {}
                }
            }
            children(t, &mut stack);
        }
        Ok(())
    }

    /// Declares a constant and returns a term referring to it.
    pub fn declare(&mut self, name: impl Into<String>, sort: Sort) -> Result<Term, ScriptError> {
        let name = name.into();
        if self.sorts.contains_key(&name) {
            return Err(ScriptError::Duplicate(name));
        }
        let t = Term::symbol(name.clone(), sort).map_err(|_| ScriptError::NotBoolean(sort))?;
        self.sorts.insert(name.clone(), sort);
        self.items.push(Item::Declare(name, sort));
        Ok(t)
    }

    /// Names `body` and returns a term referring to the name.
    pub fn define(&mut self, name: impl Into<String>, body: Term) -> Result<Term, ScriptError> {
        let name = name.into();
        if self.sorts.contains_key(&name) {
            return Err(ScriptError::Duplicate(name));
        }
        self.check_symbols(&body)?;
        let sort = body.sort();
        self.sorts.insert(name.clone(), sort);
        self.items.push(Item::Define(name.clone(), body));
        Ok(Term::symbol(name, sort).expect("sort of an existing term"))
    }

    pub fn assert(&mut self, term: Term) -> Result<(), ScriptError> {
        if term.sort() != Sort::Bool {
            return Err(ScriptError::NotBoolean(term.sort()));
        }
        if term.is_true() {
            return Ok(());
        }
        self.check_symbols(&term)?;
        self.assertions.push(term);
        Ok(())
    }

    pub fn assert_all(&mut self, terms: impl IntoIterator<Item = Term>) -> Result<(), ScriptError> {
        for t in terms {
            self.assert(t)?;
        }
        Ok(())
    }

    /// Declared constants, in declaration order. Definitions are excluded.
    pub fn declarations(&self) -> impl Iterator<Item = (&str, Sort)> {
        self.items.iter().filter_map(|i| match i {
            Item::Declare(n, s) => Some((n.as_str(), *s)),
            Item::Define(..) => None,
        })
    }

    pub fn definitions(&self) -> impl Iterator<Item = (&str, &Term)> {
        self.items.iter().filter_map(|i| match i {
            Item::Define(n, t) => Some((n.as_str(), t)),
            Item::Declare(..) => None,
        })
    }

    pub fn assertions(&self) -> &[Term] {
        &self.assertions
    }

    pub fn sort_of(&self, name: &str) -> Option<Sort> {
        self.sorts.get(name).copied()
    }

    /// Evaluates a term, expanding definitions and reading declared
    /// constants from `model`.
    pub fn eval_with(
        &self,
        term: &Term,
        model: &dyn Fn(&str) -> Option<Value>,
    ) -> Result<Value, EvalError> {
        let defs: HashMap<&str, &Term> = self.definitions().collect();
        let memo: RefCell<HashMap<String, Value>> = RefCell::new(HashMap::new());
        fn resolve(
            name: &str,
            defs: &HashMap<&str, &Term>,
            memo: &RefCell<HashMap<String, Value>>,
            model: &dyn Fn(&str) -> Option<Value>,
        ) -> Option<Value> {
            if let Some(v) = memo.borrow().get(name) {
                return Some(v.clone());
            }
            let body = defs.get(name)?;
            let lookup = |n: &str| model(n).or_else(|| resolve(n, defs, memo, model));
            let v = eval(body, &lookup).ok()?;
            memo.borrow_mut().insert(name.to_string(), v.clone());
            Some(v)
        }
        let lookup = |n: &str| model(n).or_else(|| resolve(n, &defs, &memo, model));
        eval(term, &lookup)
    }

    /// Indices of assertions that evaluate to false under `model`.
    pub fn failing_assertions(
        &self,
        model: &dyn Fn(&str) -> Option<Value>,
    ) -> Result<Vec<usize>, EvalError> {
        let mut failing = Vec::new();
        for (i, a) in self.assertions.iter().enumerate() {
            if self.eval_with(a, model)? != Value::Bool(true) {
                failing.push(i);
            }
        }
        Ok(failing)
    }
}

fn children<'a>(t: &'a Term, out: &mut Vec<&'a Term>) {
    match t.kind() {
        Kind::Symbol(_) | Kind::BoolLit(_) | Kind::BvLit(_) | Kind::RealLit(_) => {}
        Kind::Not(a) | Kind::BvNot(a) | Kind::SignExtend(_, a) | Kind::ZeroExtend(_, a) => {
            out.push(a)
        }
        Kind::Extract { arg, .. } => out.push(arg),
        Kind::And(ts) | Kind::Or(ts) | Kind::BvAnd(ts) | Kind::BvOr(ts) | Kind::RealAdd(ts) => {
            out.extend(ts.iter())
        }
        Kind::Implies(a, b)
        | Kind::Eq(a, b)
        | Kind::BvXor(a, b)
        | Kind::BvAdd(a, b)
        | Kind::BvSub(a, b)
        | Kind::BvCmp(_, a, b)
        | Kind::Concat(a, b)
        | Kind::RealCmp(_, a, b) => {
            out.push(a);
            out.push(b);
        }
        Kind::Ite(c, a, b) => {
            out.push(c);
            out.push(a);
            out.push(b);
        }
    }
}

fn write_symbol(name: &str, out: &mut String) {
    let simple = !name.is_empty()
        && !name.starts_with(|c: char| c.is_ascii_digit())
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || "~!@$%^&*_-+=<>.?/".contains(c));
    if simple {
        out.push_str(name);
    } else {
        out.push('|');
        out.push_str(name);
        out.push('|');
    }
}

fn write_real(r: &Rational, out: &mut String) {
    if r.is_negative() {
        out.push_str("(- ");
        write_real(&-r, out);
        out.push(')');
    } else if r.is_integer() {
        let _ = write!(out, "{}.0", r.numer());
    } else {
        let _ = write!(out, "(/ {}.0 {}.0)", r.numer(), r.denom());
    }
}

fn write_nary(op: &str, args: &[Term], out: &mut String) {
    out.push('(');
    out.push_str(op);
    for a in args {
        out.push(' ');
        write_term(a, out);
    }
    out.push(')');
}

pub(super) fn write_term(t: &Term, out: &mut String) {
    match t.kind() {
        Kind::Symbol(n) => write_symbol(n, out),
        Kind::BoolLit(b) => out.push_str(if *b { "true" } else { "false" }),
        Kind::BvLit(bits) => {
            let w = t.sort().width().expect("bit-vector literal") as usize;
            let _ = write!(out, "#b{:0>w$}", bits.to_str_radix(2));
        }
        Kind::RealLit(r) => write_real(r, out),
        Kind::Not(a) => write_nary("not", std::slice::from_ref(a), out),
        Kind::And(ts) => write_nary("and", ts, out),
        Kind::Or(ts) => write_nary("or", ts, out),
        Kind::Implies(a, b) => write_nary("=>", &[a.clone(), b.clone()], out),
        Kind::Eq(a, b) => write_nary("=", &[a.clone(), b.clone()], out),
        Kind::Ite(c, a, b) => write_nary("ite", &[c.clone(), a.clone(), b.clone()], out),
        Kind::BvNot(a) => write_nary("bvnot", std::slice::from_ref(a), out),
        Kind::BvAnd(ts) => write_nary("bvand", ts, out),
        Kind::BvOr(ts) => write_nary("bvor", ts, out),
        Kind::BvXor(a, b) => write_nary("bvxor", &[a.clone(), b.clone()], out),
        Kind::BvAdd(a, b) => write_nary("bvadd", &[a.clone(), b.clone()], out),
        Kind::BvSub(a, b) => write_nary("bvsub", &[a.clone(), b.clone()], out),
        Kind::BvCmp(rel, a, b) => write_nary(rel.symbol(), &[a.clone(), b.clone()], out),
        Kind::Extract { hi, lo, arg } => {
            let _ = write!(out, "((_ extract {hi} {lo}) ");
            write_term(arg, out);
            out.push(')');
        }
        Kind::Concat(a, b) => write_nary("concat", &[a.clone(), b.clone()], out),
        Kind::SignExtend(n, a) => {
            let _ = write!(out, "((_ sign_extend {n}) ");
            write_term(a, out);
            out.push(')');
        }
        Kind::ZeroExtend(n, a) => {
            let _ = write!(out, "((_ zero_extend {n}) ");
            write_term(a, out);
            out.push(')');
        }
        Kind::RealAdd(ts) => write_nary("+", ts, out),
        Kind::RealCmp(rel, a, b) => write_nary(rel.symbol(), &[a.clone(), b.clone()], out),
    }
}

/// Serializes `script` as SMT-LIB2 text ending in `(check-sat)`.
///
/// Output depends only on the script's contents and order, so equal
/// scripts produce identical bytes.
pub fn emit_smtlib2(script: &Script, logic: &str) -> String {
    let mut out = String::new();
    out.push_str("(set-option :produce-models true)\n");
    let _ = writeln!(out, "(set-logic {logic})");
    for item in &script.items {
        match item {
            Item::Declare(name, sort) => {
                out.push_str("(declare-const ");
                write_symbol(name, &mut out);
                let _ = writeln!(out, " {sort})");
            }
            Item::Define(name, body) => {
                out.push_str("(define-fun ");
                write_symbol(name, &mut out);
                let _ = write!(out, " () {} ", body.sort());
                write_term(body, &mut out);
                out.push_str(")\n");
            }
        }
    }
    for a in &script.assertions {
        out.push_str("(assert ");
        write_term(a, &mut out);
        out.push_str(")\n");
    }
    out.push_str("(check-sat)\n");
    out
}
