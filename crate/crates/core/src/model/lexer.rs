use crate::span::Span;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Int(i64),
    /// Integer literal too large for `i64`.
    BigInt(String),
    Punct(&'static str),
    Eof,
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub span: Span,
}

#[derive(Debug, Clone)]
pub(crate) struct LexError {
    pub span: Span,
    pub message: String,
}

// Longest first, so `<=` wins over `<`.
const PUNCTS: &[&str] = &[
    ":=", "->", "<=", ">=", "!=", "&&", "||", ";", ":", ",", "{", "}", "(", ")", "[", "]", "=",
    "<", ">", "!", "?", "#", "@", "+", "-", ".",
];

pub(crate) fn lex(text: &str) -> Result<Vec<Token>, LexError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let mut line = 1u32;
    let mut line_start = 0usize;
    while i < bytes.len() {
        let c = bytes[i];
        if c == b'\n' {
            line += 1;
            i += 1;
            line_start = i;
            continue;
        }
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if text[i..].starts_with("//") {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        let col = (text[line_start..i].chars().count() + 1) as u32;
        let start = i;
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Ident(text[start..i].to_string()),
                span: Span::new(line, col, start, i),
            });
            continue;
        }
        if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let digits = &text[start..i];
            let tok = match digits.parse::<i64>() {
                Ok(v) => Tok::Int(v),
                Err(_) => Tok::BigInt(digits.to_string()),
            };
            out.push(Token {
                tok,
                span: Span::new(line, col, start, i),
            });
            continue;
        }
        match PUNCTS.iter().find(|p| text[i..].starts_with(**p)) {
            Some(p) => {
                i += p.len();
                out.push(Token {
                    tok: Tok::Punct(p),
                    span: Span::new(line, col, start, i),
                });
            }
            None => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(LexError {
                    span: Span::new(line, col, start, start + ch.len_utf8()),
                    message: format!("unexpected character `{}`", ch.escape_default()),
                });
            }
        }
    }
    let col = (text[line_start..].chars().count() + 1) as u32;
    out.push(Token {
        tok: Tok::Eof,
        span: Span::new(line, col, text.len(), text.len()),
    });
    Ok(out)
}
