//! Tokenizer. Comments are `(* ... *)` and nest; `$` is reserved for
//! generated names and rejected in source text.

use flg_core::diag::{Diagnostic, Span};
use flg_core::{name, Name};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    LIdent(Name),
    UIdent(Name),
    TyVar(Name),
    /// Magnitude and 64-bit flag; sign is applied by the parser.
    Int(u64, bool),
    StrLit(String),
    HashIdent(Name),
    HashLBrace,
    HashEq,
    Backtick,
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Comma,
    Dot,
    Semi,
    Colon,
    ColonColon,
    ColonDash,
    Pipe,
    Underscore,
    Eq,
    NotEq,
    Arrow,
    Bang,
    Project,
    Plus,
    Minus,
    Star,
    Slash,
    Percent,
    Lt,
    Le,
    Gt,
    Ge,
    FAnd,
    FOr,
    FImp,
    Tilde,
    KwType,
    KwFun,
    KwInput,
    KwOutput,
    KwUninterpreted,
    KwSort,
    KwMatch,
    KwWith,
    KwEnd,
    KwLet,
    KwIn,
    KwIf,
    KwThen,
    KwElse,
    KwTrue,
    KwFalse,
    KwForall,
    KwExists,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::LIdent(n) => format!("identifier `{n}`"),
            Tok::UIdent(n) => format!("variable `{n}`"),
            Tok::TyVar(n) => format!("type variable `{n}`"),
            Tok::Int(..) => "integer literal".into(),
            Tok::StrLit(_) => "string literal".into(),
            Tok::HashIdent(n) => format!("`#{n}`"),
            Tok::HashLBrace => "`#{`".into(),
            Tok::HashEq => "`#=`".into(),
            Tok::Backtick => "backtick".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Colon => "`:`".into(),
            Tok::ColonColon => "`::`".into(),
            Tok::ColonDash => "`:-`".into(),
            Tok::Pipe => "`|`".into(),
            Tok::Underscore => "`_`".into(),
            Tok::Eq => "`=`".into(),
            Tok::NotEq => "`!=`".into(),
            Tok::Arrow => "`=>`".into(),
            Tok::Bang => "`!`".into(),
            Tok::Project => "`??`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Percent => "`%`".into(),
            Tok::Lt => "`<`".into(),
            Tok::Le => "`<=`".into(),
            Tok::Gt => "`>`".into(),
            Tok::Ge => "`>=`".into(),
            Tok::FAnd => "`/\\`".into(),
            Tok::FOr => "`\\/`".into(),
            Tok::FImp => "`==>`".into(),
            Tok::Tilde => "`~`".into(),
            Tok::KwType => "`type`".into(),
            Tok::KwFun => "`fun`".into(),
            Tok::KwInput => "`input`".into(),
            Tok::KwOutput => "`output`".into(),
            Tok::KwUninterpreted => "`uninterpreted`".into(),
            Tok::KwSort => "`sort`".into(),
            Tok::KwMatch => "`match`".into(),
            Tok::KwWith => "`with`".into(),
            Tok::KwEnd => "`end`".into(),
            Tok::KwLet => "`let`".into(),
            Tok::KwIn => "`in`".into(),
            Tok::KwIf => "`if`".into(),
            Tok::KwThen => "`then`".into(),
            Tok::KwElse => "`else`".into(),
            Tok::KwTrue => "`true`".into(),
            Tok::KwFalse => "`false`".into(),
            Tok::KwForall => "`forall`".into(),
            Tok::KwExists => "`exists`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

fn keyword(s: &str) -> Option<Tok> {
    Some(match s {
        "type" => Tok::KwType,
        "fun" => Tok::KwFun,
        "input" => Tok::KwInput,
        "output" => Tok::KwOutput,
        "uninterpreted" => Tok::KwUninterpreted,
        "sort" => Tok::KwSort,
        "match" => Tok::KwMatch,
        "with" => Tok::KwWith,
        "end" => Tok::KwEnd,
        "let" => Tok::KwLet,
        "in" => Tok::KwIn,
        "if" => Tok::KwIf,
        "then" => Tok::KwThen,
        "else" => Tok::KwElse,
        "true" => Tok::KwTrue,
        "false" => Tok::KwFalse,
        "forall" => Tok::KwForall,
        "exists" => Tok::KwExists,
        _ => return None,
    })
}

pub struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    file: u16,
}

impl<'a> Lexer<'a> {
    pub fn new(src: &'a str, file: u16) -> Self {
        Lexer { src: src.as_bytes(), pos: 0, file }
    }

    fn span(&self, lo: usize) -> Span {
        Span::new(self.file, lo as u32, self.pos as u32)
    }

    fn err(&self, lo: usize, msg: impl Into<String>) -> Diagnostic {
        Diagnostic::error("lex", msg, self.span(lo))
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn peek2(&self) -> Option<u8> {
        self.src.get(self.pos + 1).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek()?;
        self.pos += 1;
        Some(c)
    }

    fn skip_trivia(&mut self) -> Result<(), Diagnostic> {
        loop {
            match self.peek() {
                Some(c) if c.is_ascii_whitespace() => {
                    self.pos += 1;
                }
                Some(b'(') if self.peek2() == Some(b'*') => {
                    let lo = self.pos;
                    self.pos += 2;
                    let mut depth = 1u32;
                    while depth > 0 {
                        match self.peek() {
                            Some(b'(') if self.peek2() == Some(b'*') => {
                                self.pos += 2;
                                depth += 1;
                            }
                            Some(b'*') if self.peek2() == Some(b')') => {
                                self.pos += 2;
                                depth -= 1;
                            }
                            Some(_) => self.pos += 1,
                            None => return Err(self.err(lo, "unterminated comment")),
                        }
                    }
                }
                _ => return Ok(()),
            }
        }
    }

    fn ident_tail(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == b'_') {
            self.pos += 1;
        }
    }

    fn take_ident(&mut self) -> Name {
        let lo = self.pos;
        self.pos += 1;
        self.ident_tail();
        name(std::str::from_utf8(&self.src[lo..self.pos]).unwrap())
    }

    fn number(&mut self, lo: usize) -> Result<Tok, Diagnostic> {
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        let digits = std::str::from_utf8(&self.src[lo..self.pos]).unwrap();
        let wide = self.peek() == Some(b'L');
        if wide {
            self.pos += 1;
        }
        if matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric()) {
            return Err(self.err(lo, "malformed numeric literal"));
        }
        let mag: u64 = digits
            .parse()
            .map_err(|_| self.err(lo, "integer literal out of range"))?;
        let limit = if wide { i64::MAX as u64 + 1 } else { i32::MAX as u64 + 1 };
        if mag > limit {
            return Err(self.err(lo, "integer literal out of range"));
        }
        Ok(Tok::Int(mag, wide))
    }

    fn string(&mut self, lo: usize) -> Result<Tok, Diagnostic> {
        self.pos += 1;
        let mut out = String::new();
        loop {
            match self.bump() {
                None => return Err(self.err(lo, "unterminated string literal")),
                Some(b'"') => return Ok(Tok::StrLit(out)),
                Some(b'\\') => match self.bump() {
                    Some(b'n') => out.push('\n'),
                    Some(b't') => out.push('\t'),
                    Some(b'r') => out.push('\r'),
                    Some(b'"') => out.push('"'),
                    Some(b'\\') => out.push('\\'),
                    _ => return Err(self.err(lo, "unknown escape in string literal")),
                },
                Some(c) if c < 0x80 => out.push(c as char),
                Some(_) => {
                    // Re-decode the UTF-8 sequence starting one byte back.
                    self.pos -= 1;
                    let rest = std::str::from_utf8(&self.src[self.pos..])
                        .map_err(|_| self.err(lo, "invalid UTF-8 in string literal"))?;
                    let ch = rest.chars().next().unwrap();
                    out.push(ch);
                    self.pos += ch.len_utf8();
                }
            }
        }
    }

    fn next_token(&mut self) -> Result<(Tok, Span), Diagnostic> {
        self.skip_trivia()?;
        let lo = self.pos;
        let Some(c) = self.peek() else {
            return Ok((Tok::Eof, self.span(lo)));
        };
        let tok = match c {
            b'a'..=b'z' => {
                let id = self.take_ident();
                keyword(&id).unwrap_or(Tok::LIdent(id))
            }
            b'A'..=b'Z' => Tok::UIdent(self.take_ident()),
            b'_' => {
                self.pos += 1;
                if matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == b'_') {
                    return Err(self.err(lo, "identifiers cannot start with an underscore"));
                }
                Tok::Underscore
            }
            b'\'' => {
                self.pos += 1;
                if !matches!(self.peek(), Some(c) if c.is_ascii_lowercase()) {
                    return Err(self.err(lo, "expected a type variable after `'`"));
                }
                let id = self.take_ident();
                Tok::TyVar(name(&format!("'{id}")))
            }
            b'0'..=b'9' => self.number(lo)?,
            b'"' => self.string(lo)?,
            b'#' => {
                self.pos += 1;
                match self.peek() {
                    Some(b'{') => {
                        self.pos += 1;
                        Tok::HashLBrace
                    }
                    Some(b'=') => {
                        self.pos += 1;
                        Tok::HashEq
                    }
                    Some(c) if c.is_ascii_lowercase() => Tok::HashIdent(self.take_ident()),
                    _ => return Err(self.err(lo, "expected `{`, `=`, or an identifier after `#`")),
                }
            }
            b'`' => {
                self.pos += 1;
                Tok::Backtick
            }
            b'(' => {
                self.pos += 1;
                Tok::LParen
            }
            b')' => {
                self.pos += 1;
                Tok::RParen
            }
            b'[' => {
                self.pos += 1;
                Tok::LBracket
            }
            b']' => {
                self.pos += 1;
                Tok::RBracket
            }
            b'{' => {
                self.pos += 1;
                Tok::LBrace
            }
            b'}' => {
                self.pos += 1;
                Tok::RBrace
            }
            b',' => {
                self.pos += 1;
                Tok::Comma
            }
            b'.' => {
                self.pos += 1;
                Tok::Dot
            }
            b';' => {
                self.pos += 1;
                Tok::Semi
            }
            b':' => {
                self.pos += 1;
                match self.peek() {
                    Some(b':') => {
                        self.pos += 1;
                        Tok::ColonColon
                    }
                    Some(b'-') => {
                        self.pos += 1;
                        Tok::ColonDash
                    }
                    _ => Tok::Colon,
                }
            }
            b'|' => {
                self.pos += 1;
                Tok::Pipe
            }
            b'=' => {
                self.pos += 1;
                if self.peek() == Some(b'=') && self.peek2() == Some(b'>') {
                    self.pos += 2;
                    Tok::FImp
                } else if self.peek() == Some(b'>') {
                    self.pos += 1;
                    Tok::Arrow
                } else {
                    Tok::Eq
                }
            }
            b'!' => {
                self.pos += 1;
                if self.peek() == Some(b'=') {
                    self.pos += 1;
                    Tok::NotEq
                } else {
                    Tok::Bang
                }
            }
            b'?' => {
                self.pos += 1;
                if self.peek() == Some(b'?') {
                    self.pos += 1;
                    Tok::Project
                } else {
                    return Err(self.err(lo, "expected `??`"));
                }
            }
            b'+' => {
                self.pos += 1;
                Tok::Plus
            }
            b'-' => {
                self.pos += 1;
                Tok::Minus
            }
            b'*' => {
                self.pos += 1;
                Tok::Star
            }
            b'/' => {
                self.pos += 1;
                if self.peek() == Some(b'\\') {
                    self.pos += 1;
                    Tok::FAnd
                } else {
                    Tok::Slash
                }
            }
            b'\\' => {
                self.pos += 1;
                if self.peek() == Some(b'/') {
                    self.pos += 1;
                    Tok::FOr
                } else {
                    return Err(self.err(lo, "expected `\\/`"));
                }
            }
            b'%' => {
                self.pos += 1;
                Tok::Percent
            }
            b'<' => {
                self.pos += 1;
                if self.peek() == Some(b'=') {
                    self.pos += 1;
                    Tok::Le
                } else {
                    Tok::Lt
                }
            }
            b'>' => {
                self.pos += 1;
                if self.peek() == Some(b'=') {
                    self.pos += 1;
                    Tok::Ge
                } else {
                    Tok::Gt
                }
            }
            b'~' => {
                self.pos += 1;
                Tok::Tilde
            }
            b'$' => return Err(self.err(lo, "`$` is reserved for generated names")),
            other => {
                return Err(self.err(lo, format!("unexpected character `{}`", other as char)))
            }
        };
        Ok((tok, self.span(lo)))
    }
}

/// Tokenize a whole source file, ending with an Eof token.
pub fn tokenize(src: &str, file: u16) -> Result<Vec<(Tok, Span)>, Diagnostic> {
    let mut lx = Lexer::new(src, file);
    let mut out = Vec::new();
    loop {
        let (tok, span) = lx.next_token()?;
        let done = tok == Tok::Eof;
        out.push((tok, span));
        if done {
            return Ok(out);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(src: &str) -> Vec<Tok> {
        tokenize(src, 0).unwrap().into_iter().map(|(t, _)| t).take_while(|t| *t != Tok::Eof).collect()
    }

    #[test]
    fn comments_nest() {
        assert_eq!(toks("a (* x (* y *) z *) b"), vec![Tok::LIdent(name("a")), Tok::LIdent(name("b"))]);
    }

    #[test]
    fn hash_forms() {
        assert_eq!(
            toks("#x[bool] #{ #= #is_cons"),
            vec![
                Tok::HashIdent(name("x")),
                Tok::LBracket,
                Tok::LIdent(name("bool")),
                Tok::RBracket,
                Tok::HashLBrace,
                Tok::HashEq,
                Tok::HashIdent(name("is_cons")),
            ]
        );
    }

    #[test]
    fn operators_disambiguate() {
        assert_eq!(toks("==> => = :- :: : /\\ \\/ / != !"), vec![
            Tok::FImp, Tok::Arrow, Tok::Eq, Tok::ColonDash, Tok::ColonColon, Tok::Colon,
            Tok::FAnd, Tok::FOr, Tok::Slash, Tok::NotEq, Tok::Bang,
        ]);
    }

    #[test]
    fn numbers_and_strings() {
        assert_eq!(toks("42 7L \"a\\tb\""), vec![
            Tok::Int(42, false),
            Tok::Int(7, true),
            Tok::StrLit("a\tb".into()),
        ]);
        assert!(!tokenize("2147483648", 0).is_err());
        assert!(tokenize("2147483649", 0).is_err());
        assert!(tokenize("99x", 0).is_err());
    }

    #[test]
    fn reserved_dollar() {
        assert!(tokenize("a $b", 0).is_err());
    }
}
