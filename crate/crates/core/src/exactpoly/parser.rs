//! Recursive-descent parser for polynomial expressions.
//!
//! ```text
//! expr     := term (('+'|'-') term)*
//! term     := factor ('*' factor)*
//! factor   := base ('^' nat)?
//! base     := rational | ident | '(' expr ')' | '-' factor
//! rational := int ('/' nat)?
//! ```
//!
//! Greek letters are accepted as aliases for the standard names
//! (`α` for `alpha`, `λ0` or `λ₀` for `lambda0`, ...).

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use super::polynomial::Polynomial;
use super::rational::Rational;
use super::table::VariableTable;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown variable `{name}` at position {position}")]
    UnknownVariable { position: usize, name: String },
}

impl ParseError {
    pub fn position(&self) -> usize {
        match self {
            ParseError::Syntax { position, .. } | ParseError::UnknownVariable { position, .. } => *position,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn greek_alias(c: char) -> Option<&'static str> {
    Some(match c {
        'α' => "alpha",
        'β' => "beta",
        'γ' => "gamma",
        'δ' => "delta",
        'η' => "eta",
        _ => return None,
    })
}

/// Tokens paired with their character offset in the input.
fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        let tok = match c {
            _ if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '+' => Token::Plus,
            '-' | '−' => Token::Minus,
            '*' | '·' => Token::Star,
            '/' => Token::Slash,
            '^' => Token::Caret,
            '(' => Token::LParen,
            ')' => Token::RParen,
            '0'..='9' => {
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[start..i].iter().collect();
                out.push((start, Token::Int(digits.parse().expect("ascii digits"))));
                continue;
            }
            'λ' => {
                i += 1;
                match chars.get(i) {
                    Some('0') | Some('₀') => {
                        i += 1;
                        out.push((start, Token::Ident("lambda0".into())));
                        continue;
                    }
                    _ => return Err(ParseError::Syntax { position: start, message: "expected `0` after `λ`".into() }),
                }
            }
            _ if c.is_ascii_alphabetic() => {
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push((start, Token::Ident(chars[start..i].iter().collect())));
                continue;
            }
            _ => match greek_alias(c) {
                Some(name) => Token::Ident(name.into()),
                None => {
                    return Err(ParseError::Syntax { position: start, message: format!("unexpected character `{c}`") })
                }
            },
        };
        out.push((start, tok));
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
    vars: &'a Arc<VariableTable>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError::Syntax { position: self.offset(), message: message.into() }
    }

    fn expr(&mut self) -> Result<Polynomial, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Some(Token::Minus) => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial, ParseError> {
        let mut acc = self.factor()?;
        while let Some(Token::Star) = self.peek() {
            self.pos += 1;
            acc = &acc * &self.factor()?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Polynomial, ParseError> {
        let base = self.base()?;
        if let Some(Token::Caret) = self.peek() {
            self.pos += 1;
            let exponent = self.natural()?;
            let exponent = u32::try_from(exponent).map_err(|_| self.error("exponent too large"))?;
            return Ok(base.pow(exponent));
        }
        Ok(base)
    }

    fn natural(&mut self) -> Result<BigInt, ParseError> {
        match self.peek() {
            Some(Token::Int(n)) => {
                let n = n.clone();
                self.pos += 1;
                Ok(n)
            }
            _ => Err(self.error("expected a natural number")),
        }
    }

    fn base(&mut self) -> Result<Polynomial, ParseError> {
        let position = self.offset();
        match self.peek().cloned() {
            Some(Token::Int(n)) => {
                self.pos += 1;
                let mut value = Rational::from_integer(n);
                if let Some(Token::Slash) = self.peek() {
                    self.pos += 1;
                    let den = self.natural()?;
                    if den.is_zero() {
                        return Err(ParseError::Syntax { position, message: "zero denominator".into() });
                    }
                    value /= Rational::from_integer(den);
                }
                Ok(Polynomial::constant(self.vars, value))
            }
            Some(Token::Ident(name)) => {
                self.pos += 1;
                Polynomial::var(self.vars, &name).map_err(|_| ParseError::UnknownVariable { position, name })
            }
            Some(Token::LParen) => {
                self.pos += 1;
                let inner = self.expr()?;
                match self.peek() {
                    Some(Token::RParen) => {
                        self.pos += 1;
                        Ok(inner)
                    }
                    _ => Err(self.error("expected `)`")),
                }
            }
            Some(Token::Minus) => {
                self.pos += 1;
                Ok(-self.factor()?)
            }
            Some(_) => Err(self.error("expected a number, variable, `(` or `-`")),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

/// Parses `text` into a canonical polynomial over `vars`.
pub fn parse_polynomial(text: &str, vars: &Arc<VariableTable>) -> Result<Polynomial, ParseError> {
    let tokens = tokenize(text)?;
    let mut parser = Parser { tokens, pos: 0, end: text.chars().count(), vars };
    let p = parser.expr()?;
    if parser.pos != parser.tokens.len() {
        return Err(parser.error("unexpected trailing input"));
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactpoly::rational::ratio;

    fn parse(text: &str) -> Result<Polynomial, ParseError> {
        parse_polynomial(text, &VariableTable::standard())
    }

    #[test]
    fn literal_half_beta_squared() {
        let t = VariableTable::standard();
        let b = Polynomial::var(&t, "beta").unwrap();
        assert_eq!(parse("1/2*beta^2").unwrap(), (&b * &b).scale(&ratio(1, 2)));
    }

    #[test]
    fn unknown_variable_is_rejected() {
        let err = parse("alpha*e + 0").unwrap_err();
        assert_eq!(err, ParseError::UnknownVariable { position: 6, name: "e".into() });
    }

    #[test]
    fn negated_group() {
        let p = parse("-(alpha^2 + 1/2*beta*gamma)").unwrap();
        assert_eq!(p.to_string(), "-alpha^2 - 1/2*beta*gamma");
    }

    #[test]
    fn greek_aliases() {
        assert_eq!(parse("α^2 - 2*λ0*c + η·δ").unwrap(), parse("alpha^2 - 2*lambda0*c + eta*delta").unwrap());
        assert_eq!(parse("λ₀").unwrap(), parse("lambda0").unwrap());
    }

    #[test]
    fn unary_minus_binds_to_factor() {
        assert_eq!(parse("-alpha^2").unwrap(), -parse("alpha^2").unwrap());
        assert_eq!(parse("beta - -alpha").unwrap(), parse("alpha + beta").unwrap());
    }

    #[test]
    fn syntax_errors_carry_positions() {
        assert_eq!(parse("alpha +").unwrap_err().position(), 7);
        assert_eq!(parse("(alpha").unwrap_err().position(), 6);
        assert_eq!(parse("alpha beta").unwrap_err().position(), 6);
        assert_eq!(parse("1/0").unwrap_err().position(), 0);
        assert!(parse("alpha/2").is_err());
        assert!(parse("").is_err());
    }

    #[test]
    fn round_trip() {
        for text in ["0", "-1/2*alpha^2*beta + 3*c - 7/3", "(alpha - beta)^3*lambda0"] {
            let p = parse(text).unwrap();
            assert_eq!(parse(&p.to_string()).unwrap(), p);
        }
    }
}
