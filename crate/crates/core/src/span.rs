//! Source locations carried from model text through validation.

use std::collections::HashMap;
use std::fmt;

/// A region of model source text. Lines and columns are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Span {
    pub line: u32,
    pub col: u32,
    /// Byte offset of the first character.
    pub start: usize,
    /// Byte offset one past the last character.
    pub end: usize,
}

impl Span {
    pub fn new(line: u32, col: u32, start: usize, end: usize) -> Self {
        Span {
            line,
            col,
            start,
            end,
        }
    }

    pub fn to(self, other: Span) -> Span {
        Span {
            line: self.line,
            col: self.col,
            start: self.start,
            end: other.end.max(self.end),
        }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// Identifies a declared entity of a network for provenance lookups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Entity {
    Clock(usize),
    Var(usize),
    Channel(usize),
    Automaton(usize),
    Location(usize, usize),
    Transition(usize, usize),
}

/// Side table mapping entities to the span they were declared at.
///
/// Spans never take part in equality: two networks that differ only in
/// where their declarations sit in the source compare equal.
#[derive(Debug, Clone, Default)]
pub struct SourceMap {
    spans: HashMap<Entity, Span>,
}

impl SourceMap {
    pub fn insert(&mut self, entity: Entity, span: Span) {
        self.spans.insert(entity, span);
    }

    pub fn get(&self, entity: Entity) -> Option<Span> {
        self.spans.get(&entity).copied()
    }

    pub fn is_empty(&self) -> bool {
        self.spans.is_empty()
    }
}

impl PartialEq for SourceMap {
    fn eq(&self, _other: &Self) -> bool {
        true
    }
}

impl Eq for SourceMap {}
