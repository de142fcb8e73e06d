//! Tokenizer for the PES file format.
//!
//! The format is line-comment based (`// ...`), whitespace-insensitive, and
//! uses backslash keywords (`\forall`, `\AllAct`, ...) for the modal
//! operators. Section headers (`CLOCKS:`, `EQUATIONS:`, ...) are lexed as
//! single tokens — the trailing colon is part of the header — while the colon
//! after an equation label stays a separate token.

use std::fmt;

/// Byte range of a token in the source text.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum Section {
    Clocks,
    Control,
    Initially,
    Predicate,
    Start,
    Equations,
    Invariant,
    Transitions,
}

impl Section {
    pub fn header(self) -> &'static str {
        match self {
            Section::Clocks => "CLOCKS:",
            Section::Control => "CONTROL:",
            Section::Initially => "INITIALLY:",
            Section::Predicate => "PREDICATE:",
            Section::Start => "START:",
            Section::Equations => "EQUATIONS:",
            Section::Invariant => "INVARIANT:",
            Section::Transitions => "TRANSITIONS:",
        }
    }

    fn from_name(name: &str) -> Option<Section> {
        Some(match name {
            "CLOCKS" => Section::Clocks,
            "CONTROL" => Section::Control,
            "INITIALLY" => Section::Initially,
            "PREDICATE" => Section::Predicate,
            "START" => Section::Start,
            "EQUATIONS" => Section::Equations,
            "INVARIANT" => Section::Invariant,
            "TRANSITIONS" => Section::Transitions,
        _ => return None,
        })
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub enum TokKind {
    Ident(String),
    Int(i64),
    Section(Section),
    /// `#define`
    Define,
    /// `\forall`
    Forall,
    /// `\exists`
    Exists,
    /// `\rel`
    Rel,
    /// `\AllAct`
    AllAct,
    /// `\ExistAct`
    ExistAct,
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Colon,
    /// `->`
    Arrow,
    /// `&&`
    AndAnd,
    /// `||`
    OrOr,
    EqEq,
    Ne,
    Le,
    Ge,
    Lt,
    Gt,
    /// single `=` (assignments)
    Assign,
}

impl fmt::Display for TokKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokKind::Ident(s) => write!(f, "`{s}`"),
            TokKind::Int(n) => write!(f, "`{n}`"),
            TokKind::Section(s) => write!(f, "`{}`", s.header()),
            TokKind::Define => write!(f, "`#define`"),
            TokKind::Forall => write!(f, "`\\forall`"),
            TokKind::Exists => write!(f, "`\\exists`"),
            TokKind::Rel => write!(f, "`\\rel`"),
            TokKind::AllAct => write!(f, "`\\AllAct`"),
            TokKind::ExistAct => write!(f, "`\\ExistAct`"),
            TokKind::LParen => write!(f, "`(`"),
            TokKind::RParen => write!(f, "`)`"),
            TokKind::LBrace => write!(f, "`{{`"),
            TokKind::RBrace => write!(f, "`}}`"),
            TokKind::LBracket => write!(f, "`[`"),
            TokKind::RBracket => write!(f, "`]`"),
            TokKind::Comma => write!(f, "`,`"),
            TokKind::Semi => write!(f, "`;`"),
            TokKind::Colon => write!(f, "`:`"),
            TokKind::Arrow => write!(f, "`->`"),
            TokKind::AndAnd => write!(f, "`&&`"),
            TokKind::OrOr => write!(f, "`||`"),
            TokKind::EqEq => write!(f, "`==`"),
            TokKind::Ne => write!(f, "`!=`"),
            TokKind::Le => write!(f, "`<=`"),
            TokKind::Ge => write!(f, "`>=`"),
            TokKind::Lt => write!(f, "`<`"),
            TokKind::Gt => write!(f, "`>`"),
            TokKind::Assign => write!(f, "`=`"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Token {
    pub kind: TokKind,
    pub span: Span,
}

/// A parse (or lex) error with source position and a rendered context line.
#[derive(Debug, thiserror::Error)]
#[error("{rendered}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    rendered: String,
}

impl ParseError {
    pub fn at(src: &str, pos: usize, msg: impl fmt::Display) -> ParseError {
        let pos = pos.min(src.len());
        let mut line = 1;
        let mut line_start = 0;
        for (i, b) in src.bytes().enumerate().take(pos) {
            if b == b'\n' {
                line += 1;
                line_start = i + 1;
            }
        }
        let col = pos - line_start + 1;
        let line_end = src[line_start..]
            .find('\n')
            .map(|i| line_start + i)
            .unwrap_or(src.len());
        let text = &src[line_start..line_end];
        let caret: String = text
            .chars()
            .take(col - 1)
            .map(|c| if c == '\t' { '\t' } else { ' ' })
            .chain(std::iter::once('^'))
            .collect();
        let rendered =
            format!("line {line}, column {col}: {msg}\n  | {text}\n  | {caret}");
        ParseError { line, col, rendered }
    }
}

/// Tokenize a PES source text. Comments (`//` to end of line) and whitespace
/// are discarded.
pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = src.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b' ' | b'\t' | b'\r' | b'\n' => {
                i += 1;
            }
            b'/' if bytes.get(i + 1) == Some(&b'/') => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            }
            b'#' => {
                let start = i;
                i += 1;
                let word = take_ident(bytes, &mut i);
                if word == "define" {
                    toks.push(tok(TokKind::Define, start, i));
                } else {
                    return Err(ParseError::at(
                        src,
                        start,
                        format!("unknown directive `#{word}`"),
                    ));
                }
            }
            b'\\' => {
                let start = i;
                i += 1;
                let word = take_ident(bytes, &mut i);
                let kind = match word.as_str() {
                    "forall" => TokKind::Forall,
                    "exists" => TokKind::Exists,
                    "rel" => TokKind::Rel,
                    "AllAct" => TokKind::AllAct,
                    "ExistAct" => TokKind::ExistAct,
                    _ => {
                        return Err(ParseError::at(
                            src,
                            start,
                            format!("unknown keyword `\\{word}`"),
                        ))
                    }
                };
                toks.push(tok(kind, start, i));
            }
            b'0'..=b'9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let text = &src[start..i];
                let n: i64 = text.parse().map_err(|_| {
                    ParseError::at(src, start, format!("integer literal `{text}` out of range"))
                })?;
                toks.push(tok(TokKind::Int(n), start, i));
            }
            c if c.is_ascii_alphabetic() => {
                let start = i;
                let word = take_ident(bytes, &mut i);
                // A known section name immediately followed by `:` lexes as a
                // section header including the colon.
                if bytes.get(i) == Some(&b':') {
                    if let Some(sec) = Section::from_name(&word) {
                        i += 1;
                        toks.push(tok(TokKind::Section(sec), start, i));
                        continue;
                    }
                }
                toks.push(tok(TokKind::Ident(word), start, i));
            }
            _ => {
                let start = i;
                let two = if i + 1 < bytes.len() { &bytes[i..i + 2] } else { &bytes[i..i + 1] };
                let (kind, len) = match two {
                    b"->" => (TokKind::Arrow, 2),
                    b"&&" => (TokKind::AndAnd, 2),
                    b"||" => (TokKind::OrOr, 2),
                    b"==" => (TokKind::EqEq, 2),
                    b"!=" => (TokKind::Ne, 2),
                    b"<=" => (TokKind::Le, 2),
                    b">=" => (TokKind::Ge, 2),
                    _ => match c {
                        b'(' => (TokKind::LParen, 1),
                        b')' => (TokKind::RParen, 1),
                        b'{' => (TokKind::LBrace, 1),
                        b'}' => (TokKind::RBrace, 1),
                        b'[' => (TokKind::LBracket, 1),
                        b']' => (TokKind::RBracket, 1),
                        b',' => (TokKind::Comma, 1),
                        b';' => (TokKind::Semi, 1),
                        b':' => (TokKind::Colon, 1),
                        b'<' => (TokKind::Lt, 1),
                        b'>' => (TokKind::Gt, 1),
                        b'=' => (TokKind::Assign, 1),
                        _ => {
                            return Err(ParseError::at(
                                src,
                                start,
                                format!("unexpected character `{}`", c as char),
                            ))
                        }
                    },
                };
                i += len;
                toks.push(tok(kind, start, i));
            }
        }
    }
    Ok(toks)
}

fn take_ident(bytes: &[u8], i: &mut usize) -> String {
    let start = *i;
    while *i < bytes.len()
        && (bytes[*i].is_ascii_alphanumeric() || bytes[*i] == b'_')
    {
        *i += 1;
    }
    String::from_utf8_lossy(&bytes[start..*i]).into_owned()
}

fn tok(kind: TokKind, start: usize, end: usize) -> Token {
    Token { kind, span: Span { start, end } }
}

/// Token kinds only, for whitespace/comment-insensitive text comparison.
pub fn token_kinds(src: &str) -> Result<Vec<TokKind>, ParseError> {
    Ok(tokenize(src)?.into_iter().map(|t| t.kind).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_tokens() {
        let toks = token_kinds("CLOCKS: {x1,y}\n// comment\n#define CA 26").unwrap();
        assert_eq!(
            toks,
            vec![
                TokKind::Section(Section::Clocks),
                TokKind::LBrace,
                TokKind::Ident("x1".into()),
                TokKind::Comma,
                TokKind::Ident("y".into()),
                TokKind::RBrace,
                TokKind::Define,
                TokKind::Ident("CA".into()),
                TokKind::Int(26),
            ]
        );
    }

    #[test]
    fn keywords_and_operators() {
        let toks =
            token_kinds(r"1: nu X = \forall time\rel[(p == 0)](X) && x1 <= 5").unwrap();
        assert!(toks.contains(&TokKind::Forall));
        assert!(toks.contains(&TokKind::Rel));
        assert!(toks.contains(&TokKind::Colon));
        assert!(toks.contains(&TokKind::Le));
        assert!(toks.contains(&TokKind::AndAnd));
    }

    #[test]
    fn section_name_requires_colon() {
        // Without the colon, START is a plain identifier.
        let toks = token_kinds("START X").unwrap();
        assert_eq!(
            toks,
            vec![TokKind::Ident("START".into()), TokKind::Ident("X".into())]
        );
    }

    #[test]
    fn error_position() {
        let err = tokenize("CLOCKS: {x1}\n  ?").unwrap_err();
        assert_eq!(err.line, 2);
        assert_eq!(err.col, 3);
    }
}
