//! Recursive-descent parser producing an unresolved syntax tree.

use super::lexer::{Tok, Token};
use crate::span::Span;

pub(crate) type Name = (String, Span);

#[derive(Debug, Clone)]
pub(crate) enum Decl {
    Clock(Name),
    Var {
        name: Name,
        lo: (i64, Span),
        hi: (i64, Span),
        init: (i64, Span),
    },
    Channel(Name),
    Automaton(AutomatonAst),
}

#[derive(Debug, Clone)]
pub(crate) struct AutomatonAst {
    pub name: Name,
    pub init: Option<Name>,
    pub locations: Vec<LocationAst>,
    pub transitions: Vec<TransitionAst>,
}

#[derive(Debug, Clone)]
pub(crate) struct LocationAst {
    pub name: Name,
    pub inv: Option<Cond>,
    pub labels: Vec<Name>,
}

#[derive(Debug, Clone)]
pub(crate) struct TransitionAst {
    pub name: Name,
    pub source: Name,
    pub target: Name,
    pub when: Option<Cond>,
    pub sync: Option<(Name, char)>,
    pub resets: Vec<Name>,
    pub assigns: Vec<(Name, ExprAst)>,
}

#[derive(Debug, Clone)]
pub(crate) enum Operand {
    Name(Name),
    Int(i64, Span),
}

impl Operand {
    pub fn span(&self) -> Span {
        match self {
            Operand::Name((_, s)) | Operand::Int(_, s) => *s,
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) enum Cond {
    True,
    Cmp {
        lhs: Operand,
        rel: &'static str,
        rhs: Operand,
        span: Span,
    },
    Not(Box<Cond>),
    And(Box<Cond>, Box<Cond>),
    Or(Box<Cond>, Box<Cond>),
}

#[derive(Debug, Clone)]
pub(crate) enum ExprAst {
    Int(i64),
    Name(Name),
    Add(Box<ExprAst>, Box<ExprAst>),
    Sub(Box<ExprAst>, Box<ExprAst>),
}

#[derive(Debug, Clone)]
pub(crate) struct SyntaxError {
    pub span: Span,
    pub message: String,
}

/// Nesting limit for parenthesised guards and expressions.
const MAX_DEPTH: usize = 200;

pub(crate) struct Parser {
    toks: Vec<Token>,
    pos: usize,
    depth: usize,
}

type PResult<T> = Result<T, SyntaxError>;

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Int(v) => format!("`{v}`"),
        Tok::BigInt(s) => format!("`{s}`"),
        Tok::Punct(p) => format!("`{p}`"),
        Tok::Eof => "end of input".to_string(),
    }
}

impl Parser {
    pub fn new(toks: Vec<Token>) -> Self {
        Parser {
            toks,
            pos: 0,
            depth: 0,
        }
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        let i = (self.pos + n).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, expected: &str) -> PResult<T> {
        Err(SyntaxError {
            span: self.span(),
            message: format!("expected {expected}, found {}", describe(self.peek())),
        })
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Tok::Punct(q) if *q == p)
    }

    fn is_keyword(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == k)
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if self.is_punct(p) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_keyword(&mut self, k: &str) -> bool {
        if self.is_keyword(k) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, p: &str) -> PResult<Span> {
        if self.is_punct(p) {
            Ok(self.bump().span)
        } else {
            self.error(&format!("`{p}`"))
        }
    }

    fn ident(&mut self) -> PResult<Name> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                let span = self.bump().span;
                Ok((s, span))
            }
            _ => self.error("an identifier"),
        }
    }

    fn int(&mut self) -> PResult<(i64, Span)> {
        let start = self.span();
        let negative = self.eat_punct("-");
        match self.peek().clone() {
            Tok::Int(v) => {
                let span = start.to(self.bump().span);
                Ok((if negative { -v } else { v }, span))
            }
            Tok::BigInt(s) => Err(SyntaxError {
                span: self.span(),
                message: format!("integer literal `{s}` is too large"),
            }),
            _ => self.error("an integer"),
        }
    }

    fn enter(&mut self) -> PResult<()> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(SyntaxError {
                span: self.span(),
                message: "expression nested too deeply".to_string(),
            });
        }
        Ok(())
    }

    pub fn parse_file(&mut self) -> PResult<Vec<Decl>> {
        let mut decls = Vec::new();
        loop {
            match self.peek().clone() {
                Tok::Eof => return Ok(decls),
                Tok::Ident(k) if k == "clock" => {
                    self.bump();
                    loop {
                        decls.push(Decl::Clock(self.ident()?));
                        if !self.eat_punct(",") {
                            break;
                        }
                    }
                    self.expect_punct(";")?;
                }
                Tok::Ident(k) if k == "channel" => {
                    self.bump();
                    loop {
                        decls.push(Decl::Channel(self.ident()?));
                        if !self.eat_punct(",") {
                            break;
                        }
                    }
                    self.expect_punct(";")?;
                }
                Tok::Ident(k) if k == "var" => {
                    self.bump();
                    let name = self.ident()?;
                    self.expect_punct(":")?;
                    self.expect_punct("[")?;
                    let lo = self.int()?;
                    self.expect_punct(",")?;
                    let hi = self.int()?;
                    self.expect_punct("]")?;
                    let init = if self.eat_punct("=") {
                        self.int()?
                    } else {
                        (lo.0, name.1)
                    };
                    self.expect_punct(";")?;
                    decls.push(Decl::Var { name, lo, hi, init });
                }
                Tok::Ident(k) if k == "automaton" => {
                    self.bump();
                    decls.push(Decl::Automaton(self.automaton()?));
                }
                _ => return self.error("`clock`, `var`, `channel` or `automaton`"),
            }
        }
    }

    fn automaton(&mut self) -> PResult<AutomatonAst> {
        let name = self.ident()?;
        self.expect_punct("{")?;
        let mut aut = AutomatonAst {
            name,
            init: None,
            locations: Vec::new(),
            transitions: Vec::new(),
        };
        loop {
            if self.eat_punct("}") {
                return Ok(aut);
            }
            if self.eat_keyword("init") {
                let q = self.ident()?;
                if aut.init.is_some() {
                    return Err(SyntaxError {
                        span: q.1,
                        message: "initial location given twice".to_string(),
                    });
                }
                aut.init = Some(q);
                self.expect_punct(";")?;
            } else if self.eat_keyword("location") {
                aut.locations.push(self.location()?);
            } else if self.eat_keyword("trans") {
                aut.transitions.push(self.transition()?);
            } else {
                return self.error("`init`, `location`, `trans` or `}`");
            }
        }
    }

    fn location(&mut self) -> PResult<LocationAst> {
        let name = self.ident()?;
        let mut loc = LocationAst {
            name,
            inv: None,
            labels: Vec::new(),
        };
        loop {
            if self.eat_punct(";") {
                return Ok(loc);
            }
            if self.eat_keyword("inv") {
                loc.inv = Some(self.cond()?);
            } else if self.eat_keyword("labels") {
                self.expect_punct("{")?;
                if !self.eat_punct("}") {
                    loop {
                        loc.labels.push(self.ident()?);
                        if self.eat_punct("}") {
                            break;
                        }
                        self.expect_punct(",")?;
                    }
                }
            } else {
                return self.error("`inv`, `labels` or `;`");
            }
        }
    }

    fn transition(&mut self) -> PResult<TransitionAst> {
        let name = self.ident()?;
        self.expect_punct(":")?;
        let source = self.ident()?;
        self.expect_punct("->")?;
        let target = self.ident()?;
        let mut t = TransitionAst {
            name,
            source,
            target,
            when: None,
            sync: None,
            resets: Vec::new(),
            assigns: Vec::new(),
        };
        loop {
            if self.eat_punct(";") {
                return Ok(t);
            }
            if self.eat_keyword("when") {
                t.when = Some(self.cond()?);
            } else if self.eat_keyword("sync") {
                let ch = self.ident()?;
                let kind = match self.peek() {
                    Tok::Punct("!") => '!',
                    Tok::Punct("?") => '?',
                    Tok::Punct("#") => '#',
                    Tok::Punct("@") => '@',
                    _ => return self.error("one of `!`, `?`, `#`, `@`"),
                };
                self.bump();
                t.sync = Some((ch, kind));
            } else if self.eat_keyword("reset") {
                self.expect_punct("{")?;
                if !self.eat_punct("}") {
                    loop {
                        let clock = self.ident()?;
                        // `reset {x := 0}` is accepted as a spelling of `reset {x}`.
                        if self.eat_punct(":=") {
                            let (v, span) = self.int()?;
                            if v != 0 {
                                return Err(SyntaxError {
                                    span,
                                    message: "clocks can only be reset to 0".to_string(),
                                });
                            }
                        }
                        t.resets.push(clock);
                        if self.eat_punct("}") {
                            break;
                        }
                        self.expect_punct(",")?;
                    }
                }
            } else if self.eat_keyword("do") {
                self.expect_punct("{")?;
                if !self.eat_punct("}") {
                    loop {
                        let target = self.ident()?;
                        self.expect_punct(":=")?;
                        let e = self.expr()?;
                        t.assigns.push((target, e));
                        if self.eat_punct("}") {
                            break;
                        }
                        if !self.eat_punct(",") {
                            self.expect_punct(";")?;
                            if self.eat_punct("}") {
                                break;
                            }
                        }
                    }
                }
            } else {
                return self.error("`when`, `sync`, `reset`, `do` or `;`");
            }
        }
    }

    /// `or`-level condition.
    pub fn cond(&mut self) -> PResult<Cond> {
        let mut lhs = self.cond_and()?;
        while self.eat_keyword("or") || self.eat_punct("||") {
            let rhs = self.cond_and()?;
            lhs = Cond::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn cond_and(&mut self) -> PResult<Cond> {
        let mut lhs = self.cond_unary()?;
        while self.eat_keyword("and") || self.eat_punct("&&") {
            let rhs = self.cond_unary()?;
            lhs = Cond::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn cond_unary(&mut self) -> PResult<Cond> {
        self.enter()?;
        let c = if self.eat_keyword("not") || self.eat_punct("!") {
            Cond::Not(Box::new(self.cond_unary()?))
        } else if self.eat_keyword("true") {
            Cond::True
        } else if self.is_punct("(") {
            self.bump();
            let c = self.cond()?;
            self.expect_punct(")")?;
            c
        } else {
            let lhs = self.operand()?;
            let rel = match self.peek() {
                Tok::Punct(p @ ("<" | ">" | "<=" | ">=" | "=" | "!=")) => *p,
                _ => return self.error("a comparison operator"),
            };
            self.bump();
            let rhs = self.operand()?;
            let span = lhs.span().to(rhs.span());
            Cond::Cmp {
                lhs,
                rel,
                rhs,
                span,
            }
        };
        self.depth -= 1;
        Ok(c)
    }

    fn operand(&mut self) -> PResult<Operand> {
        match self.peek() {
            Tok::Ident(_) => Ok(Operand::Name(self.ident()?)),
            Tok::Int(_) | Tok::BigInt(_) | Tok::Punct("-") => {
                let (v, s) = self.int()?;
                Ok(Operand::Int(v, s))
            }
            _ => self.error("a name or an integer"),
        }
    }

    pub fn expr(&mut self) -> PResult<ExprAst> {
        let mut lhs = self.expr_primary()?;
        loop {
            if self.eat_punct("+") {
                let rhs = self.expr_primary()?;
                lhs = ExprAst::Add(Box::new(lhs), Box::new(rhs));
            } else if self.is_punct("-") {
                self.bump();
                let rhs = self.expr_primary()?;
                lhs = ExprAst::Sub(Box::new(lhs), Box::new(rhs));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn expr_primary(&mut self) -> PResult<ExprAst> {
        self.enter()?;
        let e = match self.peek() {
            Tok::Ident(_) => ExprAst::Name(self.ident()?),
            Tok::Int(_) | Tok::BigInt(_) => ExprAst::Int(self.int()?.0),
            Tok::Punct("-") if matches!(self.peek_at(1), Tok::Int(_) | Tok::BigInt(_)) => {
                ExprAst::Int(self.int()?.0)
            }
            Tok::Punct("(") => {
                self.bump();
                let e = self.expr()?;
                self.expect_punct(")")?;
                e
            }
            _ => return self.error("a name, an integer or `(`"),
        };
        self.depth -= 1;
        Ok(e)
    }
}
