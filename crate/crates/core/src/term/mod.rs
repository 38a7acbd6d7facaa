//! Solver-agnostic terms over Booleans, fixed-width BitVectors and reals.
//!
//! Every constructor checks sorts, so an ill-sorted [`Term`] cannot be built.
//! Terms are reference counted and immutable; clones are cheap and can be
//! shared between threads.

mod eval;
mod script;

use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Zero};
use thiserror::Error;

pub use eval::{eval, EvalError, Value};
pub use script::{emit_smtlib2, Script, ScriptError, DEFAULT_LOGIC};

pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sort {
    Bool,
    Real,
    BitVec(u32),
}

impl Sort {
    pub fn width(self) -> Option<u32> {
        match self {
            Sort::BitVec(w) => Some(w),
            _ => None,
        }
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sort::Bool => f.write_str("Bool"),
            Sort::Real => f.write_str("Real"),
            Sort::BitVec(w) => write!(f, "(_ BitVec {w})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("sort mismatch in {op}: expected {expected}, found {found}")]
    SortMismatch {
        op: &'static str,
        expected: String,
        found: Sort,
    },
    #[error("bit-vector width must be at least 1")]
    ZeroWidth,
    #[error("value {value} is not representable in {width} bits")]
    LiteralOutOfRange { value: BigInt, width: u32 },
    #[error("extract [{hi}:{lo}] out of range for width {width}")]
    BadExtract { hi: u32, lo: u32, width: u32 },
    #[error("{0} needs at least one operand")]
    Empty(&'static str),
}

/// Comparison on reals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RealRel {
    Lt,
    Le,
    Gt,
    Ge,
}

impl RealRel {
    fn symbol(self) -> &'static str {
        match self {
            RealRel::Lt => "<",
            RealRel::Le => "<=",
            RealRel::Gt => ">",
            RealRel::Ge => ">=",
        }
    }
}

/// BitVector predicates; `U` prefix compares unsigned, `S` twos-complement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BvRel {
    Ult,
    Ule,
    Slt,
    Sle,
}

impl BvRel {
    fn symbol(self) -> &'static str {
        match self {
            BvRel::Ult => "bvult",
            BvRel::Ule => "bvule",
            BvRel::Slt => "bvslt",
            BvRel::Sle => "bvsle",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Kind {
    /// Declared or defined symbol.
    Symbol(String),
    BoolLit(bool),
    /// Unsigned bit pattern of the node's width.
    BvLit(BigUint),
    RealLit(Rational),
    Not(Term),
    And(Vec<Term>),
    Or(Vec<Term>),
    Implies(Term, Term),
    Eq(Term, Term),
    Ite(Term, Term, Term),
    BvNot(Term),
    BvAnd(Vec<Term>),
    BvOr(Vec<Term>),
    BvXor(Term, Term),
    BvAdd(Term, Term),
    BvSub(Term, Term),
    BvCmp(BvRel, Term, Term),
    Extract {
        hi: u32,
        lo: u32,
        arg: Term,
    },
    Concat(Term, Term),
    SignExtend(u32, Term),
    ZeroExtend(u32, Term),
    RealAdd(Vec<Term>),
    RealCmp(RealRel, Term, Term),
}

#[derive(Debug, PartialEq, Eq, Hash)]
pub struct Node {
    pub kind: Kind,
    pub sort: Sort,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Term(Arc<Node>);

fn expect(op: &'static str, t: &Term, sort: Sort) -> Result<(), TermError> {
    if t.sort() == sort {
        Ok(())
    } else {
        Err(TermError::SortMismatch {
            op,
            expected: sort.to_string(),
            found: t.sort(),
        })
    }
}

fn expect_bv(op: &'static str, t: &Term) -> Result<u32, TermError> {
    t.sort().width().ok_or(TermError::SortMismatch {
        op,
        expected: "a bit-vector".into(),
        found: t.sort(),
    })
}

fn same_bv(op: &'static str, a: &Term, b: &Term) -> Result<u32, TermError> {
    let w = expect_bv(op, a)?;
    expect(op, b, Sort::BitVec(w))?;
    Ok(w)
}

impl Term {
    fn mk(kind: Kind, sort: Sort) -> Term {
        Term(Arc::new(Node { kind, sort }))
    }

    pub fn sort(&self) -> Sort {
        self.0.sort
    }

    pub fn kind(&self) -> &Kind {
        &self.0.kind
    }

    /// A reference to a declared constant or defined symbol.
    pub fn symbol(name: impl Into<String>, sort: Sort) -> Result<Term, TermError> {
        if sort == Sort::BitVec(0) {
            return Err(TermError::ZeroWidth);
        }
        Ok(Term::mk(Kind::Symbol(name.into()), sort))
    }

    pub fn bool(value: bool) -> Term {
        Term::mk(Kind::BoolLit(value), Sort::Bool)
    }

    pub fn tt() -> Term {
        Term::bool(true)
    }

    pub fn ff() -> Term {
        Term::bool(false)
    }

    pub fn is_true(&self) -> bool {
        matches!(self.kind(), Kind::BoolLit(true))
    }

    pub fn is_false(&self) -> bool {
        matches!(self.kind(), Kind::BoolLit(false))
    }

    /// BitVector literal. Non-negative values must fit unsigned, negative
    /// values must fit twos-complement.
    pub fn bv(value: impl Into<BigInt>, width: u32) -> Result<Term, TermError> {
        let value = value.into();
        if width == 0 {
            return Err(TermError::ZeroWidth);
        }
        let modulus = BigInt::one() << width;
        let in_range = if value.sign() == Sign::Minus {
            -(BigInt::one() << (width - 1)) <= value
        } else {
            value < modulus
        };
        if !in_range {
            return Err(TermError::LiteralOutOfRange { value, width });
        }
        let bits = ((value % &modulus) + &modulus) % &modulus;
        Ok(Term::mk(
            Kind::BvLit(bits.to_biguint().expect("non-negative after reduction")),
            Sort::BitVec(width),
        ))
    }

    /// Literal reduced modulo `2^width`, for casting constants to a width.
    pub fn bv_wrapping(value: impl Into<BigInt>, width: u32) -> Result<Term, TermError> {
        if width == 0 {
            return Err(TermError::ZeroWidth);
        }
        let modulus = BigInt::one() << width;
        let bits = ((value.into() % &modulus) + &modulus) % &modulus;
        Ok(Term::mk(
            Kind::BvLit(bits.to_biguint().expect("non-negative after reduction")),
            Sort::BitVec(width),
        ))
    }

    pub fn bv_ones(width: u32) -> Result<Term, TermError> {
        if width == 0 {
            return Err(TermError::ZeroWidth);
        }
        let bits = (BigUint::one() << width) - BigUint::one();
        Ok(Term::mk(Kind::BvLit(bits), Sort::BitVec(width)))
    }

    pub fn bv_zero(width: u32) -> Result<Term, TermError> {
        Term::bv(0, width)
    }

    pub fn real(value: Rational) -> Term {
        Term::mk(Kind::RealLit(value), Sort::Real)
    }

    pub fn real_int(value: i64) -> Term {
        Term::real(Rational::from_integer(value.into()))
    }

    // Boolean connectives

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Result<Term, TermError> {
        expect("not", &self, Sort::Bool)?;
        Ok(match self.kind() {
            Kind::BoolLit(b) => Term::bool(!b),
            _ => Term::mk(Kind::Not(self), Sort::Bool),
        })
    }

    /// Conjunction; literals are folded and the empty conjunction is `true`.
    pub fn and(terms: impl IntoIterator<Item = Term>) -> Result<Term, TermError> {
        let mut out = Vec::new();
        for t in terms {
            expect("and", &t, Sort::Bool)?;
            if t.is_false() {
                return Ok(Term::ff());
            }
            if !t.is_true() {
                out.push(t);
            }
        }
        Ok(match out.len() {
            0 => Term::tt(),
            1 => out.pop().expect("one element"),
            _ => Term::mk(Kind::And(out), Sort::Bool),
        })
    }

    /// Disjunction; literals are folded and the empty disjunction is `false`.
    pub fn or(terms: impl IntoIterator<Item = Term>) -> Result<Term, TermError> {
        let mut out = Vec::new();
        for t in terms {
            expect("or", &t, Sort::Bool)?;
            if t.is_true() {
                return Ok(Term::tt());
            }
            if !t.is_false() {
                out.push(t);
            }
        }
        Ok(match out.len() {
            0 => Term::ff(),
            1 => out.pop().expect("one element"),
            _ => Term::mk(Kind::Or(out), Sort::Bool),
        })
    }

    pub fn implies(self, then: Term) -> Result<Term, TermError> {
        expect("=>", &self, Sort::Bool)?;
        expect("=>", &then, Sort::Bool)?;
        if self.is_false() || then.is_true() {
            return Ok(Term::tt());
        }
        if self.is_true() {
            return Ok(then);
        }
        Ok(Term::mk(Kind::Implies(self, then), Sort::Bool))
    }

    pub fn eq(self, other: Term) -> Result<Term, TermError> {
        expect("=", &other, self.sort())?;
        Ok(Term::mk(Kind::Eq(self, other), Sort::Bool))
    }

    pub fn ite(cond: Term, then: Term, otherwise: Term) -> Result<Term, TermError> {
        expect("ite", &cond, Sort::Bool)?;
        expect("ite", &otherwise, then.sort())?;
        let sort = then.sort();
        Ok(Term::mk(Kind::Ite(cond, then, otherwise), sort))
    }

    // BitVector operations

    pub fn bvnot(self) -> Result<Term, TermError> {
        let w = expect_bv("bvnot", &self)?;
        Ok(Term::mk(Kind::BvNot(self), Sort::BitVec(w)))
    }

    pub fn bvand(terms: impl IntoIterator<Item = Term>) -> Result<Term, TermError> {
        let terms: Vec<Term> = terms.into_iter().collect();
        let first = terms.first().ok_or(TermError::Empty("bvand"))?;
        let w = expect_bv("bvand", first)?;
        for t in &terms[1..] {
            expect("bvand", t, Sort::BitVec(w))?;
        }
        Ok(if terms.len() == 1 {
            terms.into_iter().next().expect("one element")
        } else {
            Term::mk(Kind::BvAnd(terms), Sort::BitVec(w))
        })
    }

    pub fn bvor(terms: impl IntoIterator<Item = Term>) -> Result<Term, TermError> {
        let terms: Vec<Term> = terms.into_iter().collect();
        let first = terms.first().ok_or(TermError::Empty("bvor"))?;
        let w = expect_bv("bvor", first)?;
        for t in &terms[1..] {
            expect("bvor", t, Sort::BitVec(w))?;
        }
        Ok(if terms.len() == 1 {
            terms.into_iter().next().expect("one element")
        } else {
            Term::mk(Kind::BvOr(terms), Sort::BitVec(w))
        })
    }

    pub fn bvxor(self, other: Term) -> Result<Term, TermError> {
        let w = same_bv("bvxor", &self, &other)?;
        Ok(Term::mk(Kind::BvXor(self, other), Sort::BitVec(w)))
    }

    pub fn bvadd(self, other: Term) -> Result<Term, TermError> {
        let w = same_bv("bvadd", &self, &other)?;
        Ok(Term::mk(Kind::BvAdd(self, other), Sort::BitVec(w)))
    }

    pub fn bvsub(self, other: Term) -> Result<Term, TermError> {
        let w = same_bv("bvsub", &self, &other)?;
        Ok(Term::mk(Kind::BvSub(self, other), Sort::BitVec(w)))
    }

    pub fn bv_cmp(rel: BvRel, a: Term, b: Term) -> Result<Term, TermError> {
        same_bv(rel.symbol(), &a, &b)?;
        Ok(Term::mk(Kind::BvCmp(rel, a, b), Sort::Bool))
    }

    pub fn bvult(self, other: Term) -> Result<Term, TermError> {
        Term::bv_cmp(BvRel::Ult, self, other)
    }

    pub fn bvule(self, other: Term) -> Result<Term, TermError> {
        Term::bv_cmp(BvRel::Ule, self, other)
    }

    pub fn bvslt(self, other: Term) -> Result<Term, TermError> {
        Term::bv_cmp(BvRel::Slt, self, other)
    }

    pub fn bvsle(self, other: Term) -> Result<Term, TermError> {
        Term::bv_cmp(BvRel::Sle, self, other)
    }

    /// Bits `hi` down to `lo`, inclusive. `slice(t, l, l)` reads bit `l`.
    pub fn slice(self, hi: u32, lo: u32) -> Result<Term, TermError> {
        let width = expect_bv("extract", &self)?;
        if lo > hi || hi >= width {
            return Err(TermError::BadExtract { hi, lo, width });
        }
        if lo == 0 && hi == width - 1 {
            return Ok(self);
        }
        Ok(Term::mk(
            Kind::Extract { hi, lo, arg: self },
            Sort::BitVec(hi - lo + 1),
        ))
    }

    /// Bit `index` as a Boolean.
    pub fn bit(self, index: u32) -> Result<Term, TermError> {
        let b = self.slice(index, index)?;
        b.eq(Term::bv(1, 1)?)
    }

    /// `self` in the high bits, `low` in the low bits.
    pub fn concat(self, low: Term) -> Result<Term, TermError> {
        let a = expect_bv("concat", &self)?;
        let b = expect_bv("concat", &low)?;
        Ok(Term::mk(Kind::Concat(self, low), Sort::BitVec(a + b)))
    }

    pub fn sign_extend(self, extra: u32) -> Result<Term, TermError> {
        let w = expect_bv("sign_extend", &self)?;
        if extra == 0 {
            return Ok(self);
        }
        Ok(Term::mk(
            Kind::SignExtend(extra, self),
            Sort::BitVec(w + extra),
        ))
    }

    pub fn zero_extend(self, extra: u32) -> Result<Term, TermError> {
        let w = expect_bv("zero_extend", &self)?;
        if extra == 0 {
            return Ok(self);
        }
        Ok(Term::mk(
            Kind::ZeroExtend(extra, self),
            Sort::BitVec(w + extra),
        ))
    }

    /// Sign-extends to `width`; narrower widths are an error.
    pub fn sign_extend_to(self, width: u32) -> Result<Term, TermError> {
        let w = expect_bv("sign_extend", &self)?;
        if width < w {
            return Err(TermError::BadExtract {
                hi: width.saturating_sub(1),
                lo: 0,
                width: w,
            });
        }
        self.sign_extend(width - w)
    }

    // Real arithmetic

    pub fn real_add(terms: impl IntoIterator<Item = Term>) -> Result<Term, TermError> {
        let terms: Vec<Term> = terms.into_iter().collect();
        if terms.is_empty() {
            return Ok(Term::real(Rational::zero()));
        }
        for t in &terms {
            expect("+", t, Sort::Real)?;
        }
        Ok(if terms.len() == 1 {
            terms.into_iter().next().expect("one element")
        } else {
            Term::mk(Kind::RealAdd(terms), Sort::Real)
        })
    }

    pub fn real_cmp(rel: RealRel, a: Term, b: Term) -> Result<Term, TermError> {
        expect(rel.symbol(), &a, Sort::Real)?;
        expect(rel.symbol(), &b, Sort::Real)?;
        Ok(Term::mk(Kind::RealCmp(rel, a, b), Sort::Bool))
    }

    /// Writes the term in SMT-LIB2 syntax.
    pub fn write_smtlib(&self, out: &mut String) {
        script::write_term(self, out);
    }

    pub fn to_smtlib(&self) -> String {
        let mut s = String::new();
        self.write_smtlib(&mut s);
        s
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_smtlib())
    }
}
