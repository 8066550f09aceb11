//! Tokenizer for the script language.
//!
//! Newlines end statements, except inside brackets, braces, or parentheses.
//! `#` starts a comment that runs to the end of the line.

use num_bigint::BigInt;

use crate::error::{CliError, ErrorKind};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(BigInt),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Comma,
    Colon,
    Semi,
    Eq,
    Assign,
    Arrow,
    Newline,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(n) => format!("`{n}`"),
            Tok::Newline => "end of line".into(),
            other => format!("`{}`", symbol(other)),
        }
    }
}

fn symbol(t: &Tok) -> &'static str {
    match t {
        Tok::Plus => "+",
        Tok::Minus => "-",
        Tok::Star => "*",
        Tok::Slash => "/",
        Tok::Caret => "^",
        Tok::LParen => "(",
        Tok::RParen => ")",
        Tok::LBracket => "[",
        Tok::RBracket => "]",
        Tok::LBrace => "{",
        Tok::RBrace => "}",
        Tok::Comma => ",",
        Tok::Colon => ":",
        Tok::Semi => ";",
        Tok::Eq => "=",
        Tok::Assign => ":=",
        Tok::Arrow => "->",
        _ => "?",
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
    /// Byte offset of the token in the source.
    pub offset: usize,
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, CliError> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let (mut line, mut col) = (1usize, 1usize);
    let mut chars = src.char_indices().peekable();
    while let Some(&(offset, c)) = chars.peek() {
        let (tl, tc) = (line, col);
        let mut push = |tok: Tok| out.push(Token { tok, line: tl, col: tc, offset });
        if c == '\n' {
            chars.next();
            if depth == 0 {
                push(Tok::Newline);
            }
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            chars.next();
            col += 1;
            continue;
        }
        if c == '#' {
            while let Some(&(_, c)) = chars.peek() {
                if c == '\n' {
                    break;
                }
                chars.next();
            }
            continue;
        }
        if is_ident_start(c) {
            let mut s = String::new();
            while let Some(&(_, c)) = chars.peek() {
                if !is_ident_char(c) {
                    break;
                }
                s.push(c);
                chars.next();
                col += 1;
            }
            push(Tok::Ident(s));
            continue;
        }
        if c.is_ascii_digit() {
            let mut s = String::new();
            while let Some(&(_, c)) = chars.peek() {
                if !c.is_ascii_digit() {
                    break;
                }
                s.push(c);
                chars.next();
                col += 1;
            }
            push(Tok::Int(s.parse().expect("digits")));
            continue;
        }
        chars.next();
        col += 1;
        let next = chars.peek().map(|&(_, c)| c);
        let tok = match c {
            '+' => Tok::Plus,
            '-' if next == Some('>') => {
                chars.next();
                col += 1;
                Tok::Arrow
            }
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => {
                depth += 1;
                Tok::LParen
            }
            '[' => {
                depth += 1;
                Tok::LBracket
            }
            '{' => {
                depth += 1;
                Tok::LBrace
            }
            ')' | ']' | '}' => {
                depth = depth.saturating_sub(1);
                match c {
                    ')' => Tok::RParen,
                    ']' => Tok::RBracket,
                    _ => Tok::RBrace,
                }
            }
            ',' => Tok::Comma,
            ':' if next == Some('=') => {
                chars.next();
                col += 1;
                Tok::Assign
            }
            ':' => Tok::Colon,
            ';' => Tok::Semi,
            '=' => Tok::Eq,
            other => {
                return Err(CliError::new(ErrorKind::Parse, tl, tc, format!("unexpected character `{other}`")));
            }
        };
        push(tok);
    }
    out.push(Token { tok: Tok::Newline, line, col, offset: src.len() });
    Ok(out)
}
