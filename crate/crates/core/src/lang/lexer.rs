//! Tokenizer for check sources.

use std::fmt;

use super::error::LangError;
use super::span::Span;

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    Real(f64),
    Str(String),
    // keywords
    Check,
    Require,
    Else,
    NotApplicable,
    LogNotApplicable,
    Let,
    For,
    In,
    Return,
    And,
    Or,
    Not,
    IExact,
    IsNull,
    True,
    False,
    Null,
    Map,
    Date,
    // punctuation
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Dot,
    Assign,
    EqEq,
    NotEq,
    Lt,
    Le,
    Gt,
    Ge,
    Plus,
    Minus,
    Star,
    Slash,
}

fn keyword(word: &str) -> Option<Tok> {
    Some(match word {
        "check" => Tok::Check,
        "require" => Tok::Require,
        "else" => Tok::Else,
        "not_applicable" => Tok::NotApplicable,
        "log_not_applicable" => Tok::LogNotApplicable,
        "let" => Tok::Let,
        "for" => Tok::For,
        "in" => Tok::In,
        "return" => Tok::Return,
        "and" => Tok::And,
        "or" => Tok::Or,
        "not" => Tok::Not,
        "iexact" => Tok::IExact,
        "isnull" => Tok::IsNull,
        "true" => Tok::True,
        "false" => Tok::False,
        "null" => Tok::Null,
        "map" => Tok::Map,
        "date" => Tok::Date,
        _ => return None,
    })
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(name) => return write!(f, "identifier `{name}`"),
            Tok::Int(i) => return write!(f, "integer {i}"),
            Tok::Real(r) => return write!(f, "number {r:?}"),
            Tok::Str(s) => return write!(f, "string {s:?}"),
            Tok::Check => "`check`",
            Tok::Require => "`require`",
            Tok::Else => "`else`",
            Tok::NotApplicable => "`not_applicable`",
            Tok::LogNotApplicable => "`log_not_applicable`",
            Tok::Let => "`let`",
            Tok::For => "`for`",
            Tok::In => "`in`",
            Tok::Return => "`return`",
            Tok::And => "`and`",
            Tok::Or => "`or`",
            Tok::Not => "`not`",
            Tok::IExact => "`iexact`",
            Tok::IsNull => "`isnull`",
            Tok::True => "`true`",
            Tok::False => "`false`",
            Tok::Null => "`null`",
            Tok::Map => "`map`",
            Tok::Date => "`date`",
            Tok::LBrace => "`{`",
            Tok::RBrace => "`}`",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::LBracket => "`[`",
            Tok::RBracket => "`]`",
            Tok::Comma => "`,`",
            Tok::Semi => "`;`",
            Tok::Dot => "`.`",
            Tok::Assign => "`=`",
            Tok::EqEq => "`==`",
            Tok::NotEq => "`!=`",
            Tok::Lt => "`<`",
            Tok::Le => "`<=`",
            Tok::Gt => "`>`",
            Tok::Ge => "`>=`",
            Tok::Plus => "`+`",
            Tok::Minus => "`-`",
            Tok::Star => "`*`",
            Tok::Slash => "`/`",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: u32,
    col: u32,
}

impl Cursor<'_> {
    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn span(&self) -> Span {
        Span::new(self.line, self.col)
    }
}

/// Splits source text into tokens. `#` starts a comment running to the end
/// of the line.
pub fn tokenize(source: &str) -> Result<Vec<Token>, LangError> {
    let mut cur = Cursor {
        chars: source.chars().peekable(),
        line: 1,
        col: 1,
    };
    let mut out = Vec::new();
    while let Some(c) = cur.peek() {
        let span = cur.span();
        if c.is_whitespace() {
            cur.bump();
            continue;
        }
        if c == '#' {
            while let Some(c) = cur.peek() {
                if c == '\n' {
                    break;
                }
                cur.bump();
            }
            continue;
        }
        let tok = if c.is_alphabetic() || c == '_' {
            let mut word = String::new();
            while let Some(c) = cur.peek() {
                if c.is_alphanumeric() || c == '_' {
                    word.push(c);
                    cur.bump();
                } else {
                    break;
                }
            }
            keyword(&word).unwrap_or(Tok::Ident(word))
        } else if c.is_ascii_digit() {
            number(&mut cur, span)?
        } else if c == '"' {
            string(&mut cur, span)?
        } else {
            cur.bump();
            match c {
                '{' => Tok::LBrace,
                '}' => Tok::RBrace,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '[' => Tok::LBracket,
                ']' => Tok::RBracket,
                ',' => Tok::Comma,
                ';' => Tok::Semi,
                '.' => Tok::Dot,
                '+' => Tok::Plus,
                '-' => Tok::Minus,
                '*' => Tok::Star,
                '/' => Tok::Slash,
                '=' if cur.eat('=') => Tok::EqEq,
                '=' => Tok::Assign,
                '!' if cur.eat('=') => Tok::NotEq,
                '<' if cur.eat('=') => Tok::Le,
                '<' => Tok::Lt,
                '>' if cur.eat('=') => Tok::Ge,
                '>' => Tok::Gt,
                other => {
                    return Err(LangError::Lex {
                        message: format!("unexpected character {other:?}"),
                        span,
                    })
                }
            }
        };
        out.push(Token { tok, span });
    }
    Ok(out)
}

fn number(cur: &mut Cursor<'_>, span: Span) -> Result<Tok, LangError> {
    let mut text = String::new();
    let digits = |cur: &mut Cursor<'_>, text: &mut String| {
        while let Some(c) = cur.peek() {
            if c.is_ascii_digit() {
                text.push(c);
                cur.bump();
            } else {
                break;
            }
        }
    };
    digits(cur, &mut text);
    let mut real = false;
    if cur.peek() == Some('.') {
        // Only a fraction when a digit follows; `1.x` stays field access.
        let mut ahead = cur.chars.clone();
        ahead.next();
        if ahead.next().is_some_and(|c| c.is_ascii_digit()) {
            real = true;
            text.push('.');
            cur.bump();
            digits(cur, &mut text);
        }
    }
    if matches!(cur.peek(), Some('e' | 'E')) {
        let mut ahead = cur.chars.clone();
        ahead.next();
        let next = ahead.next();
        let signed = matches!(next, Some('+' | '-'));
        let first_digit = if signed { ahead.next() } else { next };
        if first_digit.is_some_and(|c| c.is_ascii_digit()) {
            real = true;
            text.push('e');
            cur.bump();
            if signed {
                text.push(cur.bump().expect("sign"));
            }
            digits(cur, &mut text);
        }
    }
    let bad = |what: &str| LangError::Lex {
        message: format!("{what} literal `{text}` out of range"),
        span,
    };
    if real {
        let value: f64 = text.parse().map_err(|_| bad("number"))?;
        if !value.is_finite() {
            return Err(bad("number"));
        }
        Ok(Tok::Real(value))
    } else {
        text.parse().map(Tok::Int).map_err(|_| bad("integer"))
    }
}

fn string(cur: &mut Cursor<'_>, span: Span) -> Result<Tok, LangError> {
    cur.bump();
    let mut value = String::new();
    loop {
        let esc_span = cur.span();
        match cur.bump() {
            None => {
                return Err(LangError::Lex {
                    message: "unterminated string".into(),
                    span,
                })
            }
            Some('"') => return Ok(Tok::Str(value)),
            Some('\\') => {
                let c = match cur.bump() {
                    Some('n') => '\n',
                    Some('t') => '\t',
                    Some('r') => '\r',
                    Some('"') => '"',
                    Some('\\') => '\\',
                    Some(other) => {
                        return Err(LangError::Lex {
                            message: format!("unknown escape `\\{other}`"),
                            span: esc_span,
                        })
                    }
                    None => {
                        return Err(LangError::Lex {
                            message: "unterminated string".into(),
                            span,
                        })
                    }
                };
                value.push(c);
            }
            Some(c) => value.push(c),
        }
    }
}
