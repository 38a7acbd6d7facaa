//! State formulas and the safety/reachability queries checked over a lasso.
//!
//! Atoms are evaluated on the configuration of each position, so a query
//! sees interval values rather than the instantaneous value at a firing.

use std::fmt;

use thiserror::Error;

use crate::encoder::PropertyHook;
use crate::model::desugar;
use crate::model::lexer::{lex, Tok, Token};
use crate::span::Span;
use crate::ta::semantics::{eval_var_constraint, SemanticsError};
use crate::ta::{Configuration, LocId, Network, VarConstraint, VarOperand};
use crate::term::{Term, TermError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StateFormula {
    True,
    False,
    /// Automaton (by index) is in the location.
    At(usize, LocId),
    /// Some automaton is in a location carrying the label.
    Label(String),
    Var(VarConstraint),
    Not(Box<StateFormula>),
    And(Box<StateFormula>, Box<StateFormula>),
    Or(Box<StateFormula>, Box<StateFormula>),
}

impl StateFormula {
    pub fn not(self) -> Self {
        StateFormula::Not(Box::new(self))
    }

    pub fn and(self, other: StateFormula) -> Self {
        StateFormula::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: StateFormula) -> Self {
        StateFormula::Or(Box::new(self), Box::new(other))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Query {
    /// Holds at every position; a model is a violation.
    Invariant(StateFormula),
    /// Holds at some position; a model is a witness.
    Reachable(StateFormula),
}

impl Query {
    pub fn formula(&self) -> &StateFormula {
        match self {
            Query::Invariant(f) | Query::Reachable(f) => f,
        }
    }

    /// The formula a witnessing position must satisfy.
    pub fn target(&self) -> StateFormula {
        match self {
            Query::Invariant(f) => f.clone().not(),
            Query::Reachable(f) => f.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PropertyError {
    #[error("query syntax error at column {col}: {message}")]
    Syntax { col: u32, message: String },
    #[error("unknown automaton `{0}`")]
    UnknownAutomaton(String),
    #[error("automaton `{0}` has no location `{1}`")]
    UnknownLocation(String, String),
    #[error("no location carries the label `{0}`")]
    UnknownLabel(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("literal {0} does not fit a 32-bit signed integer")]
    Literal(i64),
    #[error("formula refers to automaton #{0}, which does not exist")]
    Dangling(usize),
    #[error(transparent)]
    Term(#[from] TermError),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

// ---------------------------------------------------------------------------
// Parsing

const MAX_DEPTH: usize = 200;

struct QueryParser<'n> {
    net: &'n Network,
    toks: Vec<Token>,
    pos: usize,
    depth: usize,
}

type PResult<T> = Result<T, PropertyError>;

impl<'n> QueryParser<'n> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        &self.toks[(self.pos + n).min(self.toks.len() - 1)].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, message: impl Into<String>) -> PResult<T> {
        Err(PropertyError::Syntax {
            col: self.span().col,
            message: message.into(),
        })
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if matches!(self.peek(), Tok::Punct(q) if *q == p) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_keyword(&mut self, k: &str) -> bool {
        if matches!(self.peek(), Tok::Ident(s) if s == k) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.bump() {
            Tok::Ident(s) => Ok(s),
            _ => self.fail("expected a name"),
        }
    }

    fn query(&mut self) -> PResult<Query> {
        let q = if self.eat_keyword("invariant") {
            Query::Invariant(self.or()?)
        } else if self.eat_keyword("reachable") {
            Query::Reachable(self.or()?)
        } else {
            return self.fail("expected `invariant` or `reachable`");
        };
        if *self.peek() != Tok::Eof {
            return self.fail("unexpected trailing input");
        }
        Ok(q)
    }

    fn or(&mut self) -> PResult<StateFormula> {
        let mut f = self.and()?;
        while self.eat_punct("||") || self.eat_keyword("or") {
            f = f.or(self.and()?);
        }
        Ok(f)
    }

    fn and(&mut self) -> PResult<StateFormula> {
        let mut f = self.unary()?;
        while self.eat_punct("&&") || self.eat_keyword("and") {
            f = f.and(self.unary()?);
        }
        Ok(f)
    }

    fn unary(&mut self) -> PResult<StateFormula> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return self.fail("formula nested too deeply");
        }
        let f = if self.eat_punct("!") || self.eat_keyword("not") {
            self.unary()?.not()
        } else if self.eat_punct("(") {
            let f = self.or()?;
            if !self.eat_punct(")") {
                return self.fail("expected `)`");
            }
            f
        } else {
            self.atom()?
        };
        self.depth -= 1;
        Ok(f)
    }

    fn operand(&mut self) -> PResult<Result<String, i64>> {
        let negative = self.eat_punct("-");
        match self.bump() {
            Tok::Ident(s) if !negative => Ok(Ok(s)),
            Tok::Int(v) => {
                let v = if negative { -v } else { v };
                if v.unsigned_abs() > i32::MAX as u64 {
                    return Err(PropertyError::Literal(v));
                }
                Ok(Err(v))
            }
            _ => self.fail("expected a variable or an integer"),
        }
    }

    fn var(&self, name: &str) -> PResult<crate::ta::VarId> {
        self.net
            .var_index(name)
            .ok_or_else(|| PropertyError::UnknownVariable(name.to_string()))
    }

    fn atom(&mut self) -> PResult<StateFormula> {
        if matches!(self.peek(), Tok::Ident(_)) && self.peek_at(1) == &Tok::Punct(".") {
            let a = self.ident()?;
            self.bump();
            let q = self.ident()?;
            let i = self
                .net
                .automaton_index(&a)
                .ok_or_else(|| PropertyError::UnknownAutomaton(a.clone()))?;
            let loc = self.net.automata[i]
                .location_index(&q)
                .ok_or(PropertyError::UnknownLocation(a, q))?;
            return Ok(StateFormula::At(i, loc));
        }
        let is_rel = |t: &Tok| matches!(t, Tok::Punct("<" | ">" | "<=" | ">=" | "=" | "!="));
        let rel_next =
            is_rel(self.peek_at(1)) || (self.peek() == &Tok::Punct("-") && is_rel(self.peek_at(2)));
        if !rel_next {
            return match self.bump() {
                Tok::Ident(s) if s == "true" => Ok(StateFormula::True),
                Tok::Ident(s) if s == "false" => Ok(StateFormula::False),
                Tok::Ident(s) => {
                    if self.net.propositions().contains(&s) {
                        Ok(StateFormula::Label(s))
                    } else {
                        Err(PropertyError::UnknownLabel(s))
                    }
                }
                _ => {
                    self.pos = self.pos.saturating_sub(1);
                    self.fail("expected an atom")
                }
            };
        }
        let lhs = self.operand()?;
        let rel = match self.bump() {
            Tok::Punct(p) => p,
            _ => unreachable!("relation checked above"),
        };
        let rhs = self.operand()?;
        let c = match (lhs, rhs) {
            (Ok(a), Ok(b)) => desugar(self.var(&a)?, rel, VarOperand::Var(self.var(&b)?)),
            (Ok(a), Err(c)) => desugar(self.var(&a)?, rel, VarOperand::Const(c)),
            (Err(c), Ok(b)) => desugar(self.var(&b)?, flip(rel), VarOperand::Const(c)),
            (Err(a), Err(b)) => {
                let holds = match rel {
                    "<" => a < b,
                    ">" => a > b,
                    "<=" => a <= b,
                    ">=" => a >= b,
                    "=" => a == b,
                    _ => a != b,
                };
                return Ok(if holds {
                    StateFormula::True
                } else {
                    StateFormula::False
                });
            }
        };
        Ok(StateFormula::Var(c))
    }
}

fn flip(rel: &'static str) -> &'static str {
    match rel {
        "<" => ">",
        ">" => "<",
        "<=" => ">=",
        ">=" => "<=",
        r => r,
    }
}

/// Parses `invariant <formula>` or `reachable <formula>` against `net`.
///
/// Atoms: `A.q`, a location label, `n < 3`-style comparisons (`< <= > >= = !=`),
/// `true`, `false`. Connectives: `!`/`not`, `&&`/`and`, `||`/`or`.
pub fn parse_query(text: &str, net: &Network) -> Result<Query, PropertyError> {
    let toks = lex(text).map_err(|e| PropertyError::Syntax {
        col: e.span.col,
        message: e.message,
    })?;
    QueryParser {
        net,
        toks,
        pos: 0,
        depth: 0,
    }
    .query()
}

/// Parses a bare state formula.
pub fn parse_state_formula(text: &str, net: &Network) -> Result<StateFormula, PropertyError> {
    match parse_query(&format!("reachable {text}"), net) {
        Ok(q) => Ok(q.formula().clone()),
        Err(PropertyError::Syntax { col, message }) => Err(PropertyError::Syntax {
            col: col.saturating_sub(10).max(1),
            message,
        }),
        Err(e) => Err(e),
    }
}

// ---------------------------------------------------------------------------
// Encoding and evaluation

fn check_entities(f: &StateFormula, net: &Network) -> Result<(), PropertyError> {
    match f {
        StateFormula::At(i, q) => match net.automata.get(*i) {
            None => Err(PropertyError::Dangling(*i)),
            Some(a) if q.0 >= a.locations.len() => Err(PropertyError::UnknownLocation(
                a.name.clone(),
                format!("#{}", q.0),
            )),
            Some(_) => Ok(()),
        },
        StateFormula::Label(p) if !net.propositions().contains(p) => {
            Err(PropertyError::UnknownLabel(p.clone()))
        }
        StateFormula::Var(c) => {
            let mut vs = Default::default();
            c.vars(&mut vs);
            match vs.iter().find(|v| v.0 >= net.vars.len()) {
                Some(v) => Err(PropertyError::UnknownVariable(format!("#{}", v.0))),
                None => Ok(()),
            }
        }
        StateFormula::Not(a) => check_entities(a, net),
        StateFormula::And(a, b) | StateFormula::Or(a, b) => {
            check_entities(a, net)?;
            check_entities(b, net)
        }
        _ => Ok(()),
    }
}

/// The formula over the terms of position `l`.
pub fn formula_at(
    hook: &PropertyHook,
    net: &Network,
    f: &StateFormula,
    l: usize,
) -> Result<Term, PropertyError> {
    Ok(match f {
        StateFormula::True => Term::tt(),
        StateFormula::False => Term::ff(),
        StateFormula::At(i, q) => hook.at(*i, *q, l)?,
        StateFormula::Label(p) => {
            let mut alts = Vec::new();
            for (i, a) in net.automata.iter().enumerate() {
                for (q, loc) in a.locations.iter().enumerate() {
                    if loc.labels.contains(p) {
                        alts.push(hook.at(i, LocId(q), l)?);
                    }
                }
            }
            Term::or(alts)?
        }
        StateFormula::Var(c) => hook.mu(l, c)?,
        StateFormula::Not(a) => formula_at(hook, net, a, l)?.not()?,
        StateFormula::And(a, b) => {
            Term::and([formula_at(hook, net, a, l)?, formula_at(hook, net, b, l)?])?
        }
        StateFormula::Or(a, b) => {
            Term::or([formula_at(hook, net, a, l)?, formula_at(hook, net, b, l)?])?
        }
    })
}

/// A single assertion that is satisfiable exactly when some lasso position
/// violates an invariant or witnesses a reachability target.
pub fn encode_query(hook: &PropertyHook, q: &Query, net: &Network) -> Result<Term, PropertyError> {
    check_entities(q.formula(), net)?;
    let target = q.target();
    let alts = hook
        .positions()
        .map(|l| formula_at(hook, net, &target, l))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Term::or(alts)?)
}

/// Evaluates `f` on a concrete configuration.
pub fn eval_state_formula(
    cfg: &Configuration,
    net: &Network,
    f: &StateFormula,
) -> Result<bool, PropertyError> {
    Ok(match f {
        StateFormula::True => true,
        StateFormula::False => false,
        StateFormula::At(i, q) => match cfg.locations.get(*i) {
            Some(l) => l == q,
            None => return Err(PropertyError::Dangling(*i)),
        },
        StateFormula::Label(p) => {
            check_entities(f, net)?;
            net.automata.iter().zip(&cfg.locations).any(|(a, l)| {
                a.locations
                    .get(l.0)
                    .is_some_and(|loc| loc.labels.contains(p))
            })
        }
        StateFormula::Var(c) => eval_var_constraint(&cfg.vars, c)?,
        StateFormula::Not(a) => !eval_state_formula(cfg, net, a)?,
        StateFormula::And(a, b) => {
            eval_state_formula(cfg, net, a)? && eval_state_formula(cfg, net, b)?
        }
        StateFormula::Or(a, b) => {
            eval_state_formula(cfg, net, a)? || eval_state_formula(cfg, net, b)?
        }
    })
}

/// Renders a formula with the names of `net`.
pub struct DisplayFormula<'a>(pub &'a Network, pub &'a StateFormula);

impl fmt::Display for DisplayFormula<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let net = self.0;
        match self.1 {
            StateFormula::True => f.write_str("true"),
            StateFormula::False => f.write_str("false"),
            StateFormula::At(i, q) => match net
                .automata
                .get(*i)
                .and_then(|a| a.location(*q).map(|l| (a, l)))
            {
                Some((a, l)) => write!(f, "{}.{}", a.name, l.name),
                None => write!(f, "#{}.#{}", i, q.0),
            },
            StateFormula::Label(p) => f.write_str(p),
            StateFormula::Var(c) => write!(f, "({})", crate::model::format_var_constraint(net, c)),
            StateFormula::Not(a) => write!(f, "!{}", DisplayFormula(net, a)),
            StateFormula::And(a, b) => write!(
                f,
                "({} && {})",
                DisplayFormula(net, a),
                DisplayFormula(net, b)
            ),
            StateFormula::Or(a, b) => write!(
                f,
                "({} || {})",
                DisplayFormula(net, a),
                DisplayFormula(net, b)
            ),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoder::{encode_network, EncodeOptions};
    use crate::model::parse_network;
    use crate::term::Value;
    use num_bigint::BigUint;

    const NET: &str = "var n : [0, 3] = 0;
automaton A {
  init q0;
  location q0 labels {idle};
  location q1;
  location q2 labels {busy};
  trans t1: q0 -> q1 do {n := n + 1};
  trans t2: q1 -> q2;
}
automaton B {
  init r0;
  location r0 labels {idle};
}
";

    fn net() -> Network {
        parse_network(NET).unwrap().network
    }

    #[test]
    fn parses_the_documented_forms() {
        let net = net();
        let q = parse_query("invariant !(A.q1 && B.r0)", &net).unwrap();
        assert_eq!(
            q,
            Query::Invariant(
                StateFormula::At(0, LocId(1))
                    .and(StateFormula::At(1, LocId(0)))
                    .not()
            )
        );
        let q = parse_query("reachable (n = 1) && A.q2", &net).unwrap();
        assert!(matches!(q, Query::Reachable(StateFormula::And(..))));
        assert!(parse_query("reachable busy or 2 > n", &net).is_ok());
        assert!(parse_query("reachable n >= -1", &net).is_ok());
    }

    #[test]
    fn rejects_unknown_entities() {
        let net = net();
        assert_eq!(
            parse_query("reachable C.q0", &net),
            Err(PropertyError::UnknownAutomaton("C".into()))
        );
        assert_eq!(
            parse_query("reachable A.q9", &net),
            Err(PropertyError::UnknownLocation("A".into(), "q9".into()))
        );
        assert_eq!(
            parse_query("reachable nope", &net),
            Err(PropertyError::UnknownLabel("nope".into()))
        );
        assert_eq!(
            parse_query("reachable m = 1", &net),
            Err(PropertyError::UnknownVariable("m".into()))
        );
        assert!(matches!(
            parse_query("eventually A.q0", &net),
            Err(PropertyError::Syntax { .. })
        ));
        assert!(matches!(
            parse_query("reachable (A.q0", &net),
            Err(PropertyError::Syntax { .. })
        ));
    }

    #[test]
    fn concrete_evaluation() {
        let net = net();
        let mut cfg = net.initial_configuration();
        let f = |s: &str| parse_state_formula(s, &net).unwrap();
        assert!(eval_state_formula(&cfg, &net, &f("A.q0")).unwrap());
        assert!(eval_state_formula(&cfg, &net, &f("idle")).unwrap());
        assert!(!eval_state_formula(&cfg, &net, &f("busy")).unwrap());
        cfg.vars[0] = 1;
        assert!(!eval_state_formula(&cfg, &net, &f("n = 0")).unwrap());
        assert!(eval_state_formula(&cfg, &net, &f("n >= 1 && !(n > 1)")).unwrap());
        assert!(eval_state_formula(&cfg, &net, &f("0 < n")).unwrap());
    }

    /// The encoded formula at a position agrees with concrete evaluation for
    /// every location/value combination of automaton A.
    #[test]
    fn encoding_matches_evaluation() {
        let net = net();
        let k = 2;
        let enc = encode_network(&net, k, EncodeOptions::default()).unwrap();
        let formulas = ["A.q1 || n = 2", "busy && !(n < 1)", "idle", "n != 3"];
        for text in formulas {
            let f = parse_state_formula(text, &net).unwrap();
            let term = formula_at(&enc.hook, &net, &f, 1).unwrap();
            // Transition codes of A: nulls 0..3, then t1 = 3, t2 = 4.
            for code in 0..5u32 {
                for n in 0..4i64 {
                    let loc = match code {
                        0..=2 => code as usize,
                        3 => 0,
                        _ => 1,
                    };
                    let lookup = |name: &str| -> Option<Value> {
                        let width = (k + 2) as u32;
                        let spread = |bit: bool| Value::Bv {
                            width,
                            bits: if bit {
                                (BigUint::from(1u32) << width) - 1u32
                            } else {
                                BigUint::from(0u32)
                            },
                        };
                        if let Some(j) = name.strip_prefix("tb_0_") {
                            let j: u32 = j.parse().unwrap();
                            return Some(spread(code >> j & 1 == 1));
                        }
                        if let Some(j) = name.strip_prefix("vb_0_") {
                            let j: u32 = j.parse().unwrap();
                            return Some(spread(n >> j & 1 == 1));
                        }
                        None
                    };
                    let got = enc
                        .script
                        .eval_with(&term, &lookup)
                        .unwrap()
                        .as_bool()
                        .unwrap();
                    let mut cfg = net.initial_configuration();
                    cfg.locations[0] = LocId(loc);
                    cfg.vars[0] = n;
                    assert_eq!(
                        got,
                        eval_state_formula(&cfg, &net, &f).unwrap(),
                        "{text} code={code} n={n}"
                    );
                }
            }
        }
    }

    #[test]
    fn query_is_one_disjunction_over_positions() {
        let net = net();
        let enc = encode_network(&net, 3, EncodeOptions::default()).unwrap();
        let q = parse_query("invariant false", &net).unwrap();
        assert!(encode_query(&enc.hook, &q, &net).unwrap().is_true());
        let q = parse_query("reachable false", &net).unwrap();
        assert!(encode_query(&enc.hook, &q, &net).unwrap().is_false());
    }
}
