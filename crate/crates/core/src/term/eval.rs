//! Concrete evaluation of ground terms.
//!
//! Used to re-check solver models against the assertions they claim to
//! satisfy and as an in-process oracle in tests.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use thiserror::Error;

use super::{BvRel, Kind, Rational, RealRel, Sort, Term};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Value {
    Bool(bool),
    Bv { width: u32, bits: BigUint },
    Real(Rational),
}

impl Value {
    pub fn sort(&self) -> Sort {
        match self {
            Value::Bool(_) => Sort::Bool,
            Value::Bv { width, .. } => Sort::BitVec(*width),
            Value::Real(_) => Sort::Real,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_bits(&self) -> Option<&BigUint> {
        match self {
            Value::Bv { bits, .. } => Some(bits),
            _ => None,
        }
    }

    pub fn as_real(&self) -> Option<&Rational> {
        match self {
            Value::Real(r) => Some(r),
            _ => None,
        }
    }

    /// Bit `index` of a bit-vector value.
    pub fn bit(&self, index: u32) -> Option<bool> {
        match self {
            Value::Bv { width, bits } if index < *width => Some(bits.bit(index as u64)),
            _ => None,
        }
    }

    /// Twos-complement reading of a bit-vector value.
    pub fn as_signed(&self) -> Option<BigInt> {
        match self {
            Value::Bv { width, bits } => Some(to_signed(bits, *width)),
            _ => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Bv { width, bits } => {
                write!(f, "#b{:0>w$}", bits.to_str_radix(2), w = *width as usize)
            }
            Value::Real(r) => write!(f, "{r}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("no value for symbol `{0}`")]
    Unbound(String),
    #[error("symbol `{name}` bound to a value of sort {found}, expected {expected}")]
    WrongSort {
        name: String,
        expected: Sort,
        found: Sort,
    },
}

fn mask(width: u32) -> BigUint {
    (BigUint::one() << width) - BigUint::one()
}

fn to_signed(bits: &BigUint, width: u32) -> BigInt {
    let v = BigInt::from(bits.clone());
    if bits.bit(width as u64 - 1) {
        v - (BigInt::one() << width)
    } else {
        v
    }
}

fn from_signed(value: &BigInt, width: u32) -> BigUint {
    let modulus = BigInt::one() << width;
    (((value % &modulus) + &modulus) % &modulus)
        .to_biguint()
        .expect("reduced value is non-negative")
}

fn bv(t: &Term, lookup: &dyn Fn(&str) -> Option<Value>) -> Result<BigUint, EvalError> {
    match eval(t, lookup)? {
        Value::Bv { bits, .. } => Ok(bits),
        _ => unreachable!("well-sorted term"),
    }
}

fn boolean(t: &Term, lookup: &dyn Fn(&str) -> Option<Value>) -> Result<bool, EvalError> {
    match eval(t, lookup)? {
        Value::Bool(b) => Ok(b),
        _ => unreachable!("well-sorted term"),
    }
}

fn real(t: &Term, lookup: &dyn Fn(&str) -> Option<Value>) -> Result<Rational, EvalError> {
    match eval(t, lookup)? {
        Value::Real(r) => Ok(r),
        _ => unreachable!("well-sorted term"),
    }
}

/// Evaluates `term`, resolving symbols through `lookup`.
pub fn eval(term: &Term, lookup: &dyn Fn(&str) -> Option<Value>) -> Result<Value, EvalError> {
    let sort = term.sort();
    let width = sort.width().unwrap_or(0);
    let out_bv = |bits: BigUint| Value::Bv {
        width,
        bits: bits & mask(width),
    };
    Ok(match term.kind() {
        Kind::Symbol(name) => {
            let v = lookup(name).ok_or_else(|| EvalError::Unbound(name.clone()))?;
            if v.sort() != sort {
                return Err(EvalError::WrongSort {
                    name: name.clone(),
                    expected: sort,
                    found: v.sort(),
                });
            }
            v
        }
        Kind::BoolLit(b) => Value::Bool(*b),
        Kind::BvLit(bits) => out_bv(bits.clone()),
        Kind::RealLit(r) => Value::Real(r.clone()),
        Kind::Not(a) => Value::Bool(!boolean(a, lookup)?),
        Kind::And(ts) => {
            let mut acc = true;
            for t in ts {
                acc &= boolean(t, lookup)?;
            }
            Value::Bool(acc)
        }
        Kind::Or(ts) => {
            let mut acc = false;
            for t in ts {
                acc |= boolean(t, lookup)?;
            }
            Value::Bool(acc)
        }
        Kind::Implies(a, b) => Value::Bool(!boolean(a, lookup)? || boolean(b, lookup)?),
        Kind::Eq(a, b) => Value::Bool(eval(a, lookup)? == eval(b, lookup)?),
        Kind::Ite(c, a, b) => {
            if boolean(c, lookup)? {
                eval(a, lookup)?
            } else {
                eval(b, lookup)?
            }
        }
        Kind::BvNot(a) => out_bv(bv(a, lookup)? ^ mask(width)),
        Kind::BvAnd(ts) => {
            let mut acc = mask(width);
            for t in ts {
                acc &= bv(t, lookup)?;
            }
            out_bv(acc)
        }
        Kind::BvOr(ts) => {
            let mut acc = BigUint::zero();
            for t in ts {
                acc |= bv(t, lookup)?;
            }
            out_bv(acc)
        }
        Kind::BvXor(a, b) => out_bv(bv(a, lookup)? ^ bv(b, lookup)?),
        Kind::BvAdd(a, b) => out_bv(bv(a, lookup)? + bv(b, lookup)?),
        Kind::BvSub(a, b) => out_bv((bv(a, lookup)? + (BigUint::one() << width)) - bv(b, lookup)?),
        Kind::BvCmp(rel, a, b) => {
            let w = a.sort().width().expect("bit-vector operand");
            let (x, y) = (bv(a, lookup)?, bv(b, lookup)?);
            Value::Bool(match rel {
                BvRel::Ult => x < y,
                BvRel::Ule => x <= y,
                BvRel::Slt => to_signed(&x, w) < to_signed(&y, w),
                BvRel::Sle => to_signed(&x, w) <= to_signed(&y, w),
            })
        }
        Kind::Extract { lo, arg, .. } => out_bv(bv(arg, lookup)? >> *lo),
        Kind::Concat(hi, lo) => {
            let lw = lo.sort().width().expect("bit-vector operand");
            out_bv((bv(hi, lookup)? << lw) | bv(lo, lookup)?)
        }
        Kind::SignExtend(_, a) => {
            let w = a.sort().width().expect("bit-vector operand");
            out_bv(from_signed(&to_signed(&bv(a, lookup)?, w), width))
        }
        Kind::ZeroExtend(_, a) => out_bv(bv(a, lookup)?),
        Kind::RealAdd(ts) => {
            let mut acc = Rational::zero();
            for t in ts {
                acc += real(t, lookup)?;
            }
            Value::Real(acc)
        }
        Kind::RealCmp(rel, a, b) => {
            let (x, y) = (real(a, lookup)?, real(b, lookup)?);
            Value::Bool(match rel {
                RealRel::Lt => x < y,
                RealRel::Le => x <= y,
                RealRel::Gt => x > y,
                RealRel::Ge => x >= y,
            })
        }
    })
}
