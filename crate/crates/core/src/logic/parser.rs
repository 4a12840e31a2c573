use super::{Direction, PathFormula, StateFormula, SuperOpBound};
use std::fmt;
use thiserror::Error;

/// A formula syntax error. `offset` is a byte offset into the input.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{message} at column {}", .offset + 1)]
pub struct FormulaError {
    pub offset: usize,
    pub message: String,
}

impl FormulaError {
    fn new(offset: usize, message: impl Into<String>) -> Self {
        Self {
            offset,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(String),
    Not,
    And,
    Or,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Le,
    Ge,
    At,
    Minus,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Number(s) => write!(f, "number `{s}`"),
            Tok::Not => write!(f, "`!`"),
            Tok::And => write!(f, "`&`"),
            Tok::Or => write!(f, "`|`"),
            Tok::LParen => write!(f, "`(`"),
            Tok::RParen => write!(f, "`)`"),
            Tok::LBracket => write!(f, "`[`"),
            Tok::RBracket => write!(f, "`]`"),
            Tok::Le => write!(f, "`<=`"),
            Tok::Ge => write!(f, "`>=`"),
            Tok::At => write!(f, "`@`"),
            Tok::Minus => write!(f, "`-`"),
            Tok::End => write!(f, "end of input"),
        }
    }
}

const KEYWORDS: [&str; 5] = ["true", "Q", "X", "U", "F"];

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, FormulaError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let tok = if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            Tok::Ident(text[start..i].to_string())
        } else if c.is_ascii_digit() || c == b'.' {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    i = j;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            Tok::Number(text[start..i].to_string())
        } else {
            let two = bytes.get(i + 1).copied();
            i += 1;
            match (c, two) {
                (b'<', Some(b'=')) => {
                    i += 1;
                    Tok::Le
                }
                (b'>', Some(b'=')) => {
                    i += 1;
                    Tok::Ge
                }
                (b'!', _) => Tok::Not,
                (b'&', _) => Tok::And,
                (b'|', _) => Tok::Or,
                (b'(', _) => Tok::LParen,
                (b')', _) => Tok::RParen,
                (b'[', _) => Tok::LBracket,
                (b']', _) => Tok::RBracket,
                (b'@', _) => Tok::At,
                (b'-', _) => Tok::Minus,
                _ => {
                    let ch = text[start..].chars().next().unwrap_or('?');
                    return Err(FormulaError::new(start, format!("unexpected character `{ch}`")));
                }
            }
        };
        out.push((start, tok));
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), FormulaError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(what))
        }
    }

    fn unexpected(&self, expected: &str) -> FormulaError {
        FormulaError::new(self.offset(), format!("expected {expected}, found {}", self.peek()))
    }

    fn state(&mut self) -> Result<StateFormula, FormulaError> {
        let mut lhs = self.conjunction()?;
        while *self.peek() == Tok::Or {
            self.bump();
            let rhs = self.conjunction()?;
            lhs = StateFormula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<StateFormula, FormulaError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::And {
            self.bump();
            let rhs = self.unary()?;
            lhs = StateFormula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<StateFormula, FormulaError> {
        if *self.peek() == Tok::Not {
            self.bump();
            return Ok(StateFormula::not(self.unary()?));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<StateFormula, FormulaError> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let inner = self.state()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Ident(name) if name == "true" => {
                self.bump();
                Ok(StateFormula::True)
            }
            Tok::Ident(name) if name == "Q" => {
                self.bump();
                let direction = match self.peek() {
                    Tok::Le => Direction::AtMost,
                    Tok::Ge => Direction::AtLeast,
                    _ => return Err(self.unexpected("`<=` or `>=` after `Q`")),
                };
                self.bump();
                let bound = self.bound()?;
                self.expect(Tok::LBracket, "`[`")?;
                let path = self.path()?;
                self.expect(Tok::RBracket, "`]`")?;
                Ok(StateFormula::threshold(direction, bound, path))
            }
            Tok::Ident(name) if KEYWORDS.contains(&name.as_str()) => Err(FormulaError::new(
                self.offset(),
                format!("`{name}` is a keyword and cannot be used as an atom here"),
            )),
            Tok::Ident(name) => {
                self.bump();
                Ok(StateFormula::Atom(name))
            }
            _ => Err(self.unexpected("a state formula")),
        }
    }

    fn bound(&mut self) -> Result<SuperOpBound, FormulaError> {
        let at = self.offset();
        match self.bump() {
            Tok::Number(text) => {
                let p: f64 = text
                    .parse()
                    .map_err(|_| FormulaError::new(at, format!("malformed number `{text}`")))?;
                if !(0.0..=1.0).contains(&p) {
                    return Err(FormulaError::new(at, format!("bound {text} is outside [0, 1]")));
                }
                Ok(SuperOpBound::Scalar(p))
            }
            Tok::At => match self.bump() {
                Tok::Ident(name) => Ok(SuperOpBound::Named(name)),
                _ => Err(FormulaError::new(at + 1, "expected a super-operator name after `@`")),
            },
            Tok::Minus => Err(FormulaError::new(at, "bound must lie in [0, 1]")),
            other => Err(FormulaError::new(
                at,
                format!("expected a number or `@name` bound, found {other}"),
            )),
        }
    }

    /// Parses `<= k` following `U` or `F`, if present.
    fn step_bound(&mut self) -> Result<Option<usize>, FormulaError> {
        if *self.peek() != Tok::Le {
            return Ok(None);
        }
        self.bump();
        let at = self.offset();
        match self.bump() {
            Tok::Number(text) if text.bytes().all(|b| b.is_ascii_digit()) => text
                .parse()
                .map(Some)
                .map_err(|_| FormulaError::new(at, format!("step bound `{text}` is too large"))),
            Tok::Number(text) => Err(FormulaError::new(
                at,
                format!("step bound `{text}` is not a nonnegative integer"),
            )),
            Tok::Minus => Err(FormulaError::new(at, "step bound must be a nonnegative integer")),
            other => Err(FormulaError::new(
                at,
                format!("expected a nonnegative integer step bound, found {other}"),
            )),
        }
    }

    fn path(&mut self) -> Result<PathFormula, FormulaError> {
        if self.is_keyword("X") {
            self.bump();
            return Ok(PathFormula::Next(Box::new(self.state()?)));
        }
        if self.is_keyword("F") {
            self.bump();
            let k = self.step_bound()?;
            let psi = Box::new(self.state()?);
            return Ok(match k {
                Some(k) => PathFormula::BoundedEventually(psi, k),
                None => PathFormula::Eventually(psi),
            });
        }
        let phi = Box::new(self.state()?);
        if !self.is_keyword("U") {
            return Err(self.unexpected("`U` in a path formula"));
        }
        self.bump();
        let k = self.step_bound()?;
        let psi = Box::new(self.state()?);
        Ok(match k {
            Some(k) => PathFormula::BoundedUntil(phi, psi, k),
            None => PathFormula::Until(phi, psi),
        })
    }

    fn finish(&self) -> Result<(), FormulaError> {
        if *self.peek() == Tok::End {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }
}

/// Parses a state formula such as `Q>=0.5[F<=4 succ] & !abort`.
pub fn parse_formula(text: &str) -> Result<StateFormula, FormulaError> {
    let mut p = Parser {
        toks: tokenize(text)?,
        pos: 0,
    };
    let f = p.state()?;
    p.finish()?;
    Ok(f)
}

/// Parses a bare path formula such as `F<=4 succ` or `phi U psi`.
pub fn parse_path_formula(text: &str) -> Result<PathFormula, FormulaError> {
    let mut p = Parser {
        toks: tokenize(text)?,
        pos: 0,
    };
    let f = p.path()?;
    p.finish()?;
    Ok(f)
}
