//! Recursive-descent parser for scripts.

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::ast::*;
use crate::error::{CliError, ErrorKind};
use crate::lexer::{tokenize, Tok, Token};

const COMMANDS: &[&str] = &[
    "print", "jac", "tangent", "classify", "invert", "compose", "normalform", "factor", "d", "wedge", "pullback", "homotopy", "derham",
    "potential", "rank", "neumann", "transpose", "partial", "product", "pair", "jaccheck", "check",
];

pub fn parse(src: &str) -> Result<Script, CliError> {
    let tokens = tokenize(src)?;
    let mut p = Parser { src, tokens, i: 0 };
    let mut stmts = Vec::new();
    loop {
        p.skip_newlines();
        if p.at_end() {
            break;
        }
        stmts.push(p.statement()?);
    }
    Ok(Script { stmts })
}

/// Parses a single expression that must span the whole input.
pub fn parse_expr(src: &str) -> Result<Expr, CliError> {
    let tokens = tokenize(src)?;
    let mut p = Parser { src, tokens, i: 0 };
    let e = p.expr()?;
    p.end_of_statement()?;
    p.skip_newlines();
    if !p.at_end() {
        return Err(p.unexpected("end of input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a str,
    tokens: Vec<Token>,
    i: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.tokens[self.i].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let j = (self.i + k).min(self.tokens.len() - 1);
        &self.tokens[j].tok
    }

    fn pos(&self) -> Pos {
        let t = &self.tokens[self.i];
        Pos { line: t.line, col: t.col }
    }

    fn at_end(&self) -> bool {
        self.i + 1 >= self.tokens.len()
    }

    fn bump(&mut self) -> Tok {
        let t = self.tokens[self.i].tok.clone();
        if self.i + 1 < self.tokens.len() {
            self.i += 1;
        }
        t
    }

    fn skip_newlines(&mut self) {
        while *self.peek() == Tok::Newline && !self.at_end() {
            self.i += 1;
        }
    }

    fn error_at(&self, pos: Pos, msg: impl Into<String>) -> CliError {
        CliError::new(ErrorKind::Parse, pos.line, pos.col, msg)
    }

    fn unexpected(&self, wanted: &str) -> CliError {
        self.error_at(self.pos(), format!("expected {wanted}, found {}", self.peek().describe()))
    }

    fn expect(&mut self, tok: Tok) -> Result<(), CliError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&tok.describe()))
        }
    }

    fn ident(&mut self) -> Result<String, CliError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.unexpected("a name")),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), CliError> {
        match self.peek() {
            Tok::Ident(s) if s == kw => {
                self.bump();
                Ok(())
            }
            _ => Err(self.unexpected(&format!("`{kw}`"))),
        }
    }

    fn int(&mut self) -> Result<BigInt, CliError> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(n)
            }
            _ => Err(self.unexpected("an integer")),
        }
    }

    fn small_int<T: TryFrom<u64>>(&mut self) -> Result<T, CliError> {
        let pos = self.pos();
        let n = self.int()?;
        n.to_u64().and_then(|v| T::try_from(v).ok()).ok_or_else(|| self.error_at(pos, format!("integer {n} is out of range")))
    }

    /// `key=INT`.
    fn key_int<T: TryFrom<u64>>(&mut self, key: &str) -> Result<T, CliError> {
        self.keyword(key)?;
        self.expect(Tok::Eq)?;
        self.small_int()
    }

    fn end_of_statement(&mut self) -> Result<(), CliError> {
        if *self.peek() == Tok::Newline {
            Ok(())
        } else {
            Err(self.unexpected("end of line"))
        }
    }

    fn echo(&self, start: usize) -> String {
        let from = self.tokens[start].offset;
        let to = self.tokens[self.i].offset;
        let mut text = String::new();
        for line in self.src[from..to].lines() {
            let code = line.split('#').next().unwrap_or("");
            text.push_str(code);
            text.push(' ');
        }
        text.split_whitespace().collect::<Vec<_>>().join(" ")
    }

    fn statement(&mut self) -> Result<Stmt, CliError> {
        let start = self.i;
        let pos = self.pos();
        let head = match self.peek() {
            Tok::Ident(s) => s.clone(),
            _ => return Err(self.unexpected("a statement")),
        };
        let kind = match head.as_str() {
            "ring" => {
                self.bump();
                StmtKind::Ring(self.ring()?)
            }
            "use" => {
                self.bump();
                StmtKind::Use(self.ident()?)
            }
            "let" => {
                self.bump();
                let name = self.ident()?;
                self.expect(Tok::Eq)?;
                let mark = self.i;
                match self.expr() {
                    Ok(e) if *self.peek() == Tok::Newline => StmtKind::Let(name, e),
                    first => {
                        self.i = mark;
                        match self.peek() {
                            Tok::Ident(s) if COMMANDS.contains(&s.as_str()) => StmtKind::LetCommand(name, self.command()?),
                            _ => {
                                first?;
                                return Err(self.unexpected("end of line"));
                            }
                        }
                    }
                }
            }
            "matrix" => {
                self.bump();
                self.matrix()?
            }
            "morphism" => {
                self.bump();
                self.morphism()?
            }
            s if COMMANDS.contains(&s) => StmtKind::Command(self.command()?),
            _ => return Err(self.error_at(pos, format!("unknown statement `{head}`"))),
        };
        self.end_of_statement()?;
        Ok(Stmt { kind, pos, echo: self.echo(start) })
    }

    fn ring(&mut self) -> Result<RingDecl, CliError> {
        let name = self.ident()?;
        let (mut n, mut cap, mut form_cap, mut p, mut q, mut coords) = (None, None, None, None, None, None);
        loop {
            let pos = self.pos();
            let key = match self.peek() {
                Tok::Ident(s) => s.clone(),
                _ => break,
            };
            match key.as_str() {
                "n" => n = Some(self.key_int("n")?),
                "cap" => cap = Some(self.key_int("cap")?),
                "formcap" => form_cap = Some(self.key_int("formcap")?),
                "p" => p = Some(self.key_int("p")?),
                "q" => {
                    self.bump();
                    self.expect(Tok::Eq)?;
                    self.expect(Tok::LParen)?;
                    let mut v = vec![self.small_int()?];
                    while *self.peek() == Tok::Comma {
                        self.bump();
                        v.push(self.small_int()?);
                    }
                    self.expect(Tok::RParen)?;
                    q = Some(v);
                }
                "coords" => {
                    self.bump();
                    coords = Some(self.coord_list()?);
                }
                _ => return Err(self.error_at(pos, format!("unknown ring parameter `{key}`"))),
            }
        }
        let here = self.pos();
        let n: usize = n.ok_or_else(|| self.error_at(here, "ring declaration needs n=<int>"))?;
        let cap = cap.ok_or_else(|| self.error_at(here, "ring declaration needs cap=<int>"))?;
        let coords = match (coords, p, q) {
            (Some(c), None, None) => RingCoords::Named(c),
            (None, p, Some(q)) => RingCoords::Signature { p: p.unwrap_or(0), q },
            (None, Some(p), None) => RingCoords::Signature { p, q: vec![0; (1usize << n.min(15)) - 1] },
            _ => return Err(self.error_at(here, "ring declaration needs either coords [...] or p=<int> q=(...)")),
        };
        Ok(RingDecl { name, n, cap, form_cap, coords })
    }

    fn degree_spec(&mut self) -> Result<DegreeSpec, CliError> {
        match self.peek() {
            Tok::LParen => {
                self.bump();
                let mut bits = vec![self.int()?];
                while *self.peek() == Tok::Comma {
                    self.bump();
                    bits.push(self.int()?);
                }
                self.expect(Tok::RParen)?;
                Ok(DegreeSpec::Bits(bits))
            }
            Tok::Ident(s) if s == "deg" => Ok(DegreeSpec::Index(self.key_int("deg")?)),
            _ => Err(self.unexpected("a degree `(..)` or `deg=<int>`")),
        }
    }

    fn coord_list(&mut self) -> Result<Vec<(String, DegreeSpec, Pos)>, CliError> {
        self.expect(Tok::LBracket)?;
        let mut out = Vec::new();
        if *self.peek() != Tok::RBracket {
            loop {
                let pos = self.pos();
                let name = self.ident()?;
                self.expect(Tok::Colon)?;
                out.push((name, self.degree_spec()?, pos));
                if *self.peek() != Tok::Comma {
                    break;
                }
                self.bump();
            }
        }
        self.expect(Tok::RBracket)?;
        Ok(out)
    }

    fn degree_list(&mut self) -> Result<Vec<DegreeSpec>, CliError> {
        self.expect(Tok::LBracket)?;
        let mut out = Vec::new();
        if *self.peek() != Tok::RBracket {
            out.push(self.degree_spec()?);
            while *self.peek() == Tok::Comma {
                self.bump();
                out.push(self.degree_spec()?);
            }
        }
        self.expect(Tok::RBracket)?;
        Ok(out)
    }

    fn matrix(&mut self) -> Result<StmtKind, CliError> {
        let name = self.ident()?;
        self.keyword("rows")?;
        let rows = self.degree_list()?;
        self.keyword("cols")?;
        let cols = self.degree_list()?;
        self.expect(Tok::Eq)?;
        self.expect(Tok::LBracket)?;
        let mut entries = Vec::new();
        while *self.peek() == Tok::LBracket {
            self.bump();
            let mut row = Vec::new();
            if *self.peek() != Tok::RBracket {
                row.push(self.expr()?);
                while *self.peek() == Tok::Comma {
                    self.bump();
                    row.push(self.expr()?);
                }
            }
            self.expect(Tok::RBracket)?;
            entries.push(row);
            if *self.peek() == Tok::Comma {
                self.bump();
            }
        }
        self.expect(Tok::RBracket)?;
        Ok(StmtKind::Matrix { name, rows, cols, entries })
    }

    fn morphism(&mut self) -> Result<StmtKind, CliError> {
        let name = self.ident()?;
        self.expect(Tok::Colon)?;
        let source = self.ident()?;
        self.expect(Tok::Arrow)?;
        let target = self.ident()?;
        self.expect(Tok::LBrace)?;
        let mut images = Vec::new();
        while *self.peek() != Tok::RBrace {
            let pos = self.pos();
            let c = self.ident()?;
            self.expect(Tok::Assign)?;
            images.push((c, self.expr()?, pos));
            match self.peek() {
                Tok::Semi => {
                    self.bump();
                }
                Tok::RBrace => {}
                _ => return Err(self.unexpected("`;` or `}`")),
            }
        }
        self.expect(Tok::RBrace)?;
        Ok(StmtKind::Morphism { name, source, target, images })
    }

    fn command(&mut self) -> Result<Command, CliError> {
        let head = self.ident()?;
        Ok(match head.as_str() {
            "print" => Command::Print(self.expr()?),
            "jac" => Command::Jac(self.expr()?),
            "tangent" => Command::Tangent(self.expr()?),
            "classify" => Command::Classify(self.expr()?),
            "invert" => Command::Invert(self.expr()?),
            "compose" => Command::Compose(self.power()?, self.expr()?),
            "normalform" => {
                let kind = match (self.peek(), self.peek_at(1)) {
                    (Tok::Ident(s), next) if (s == "submersion" || s == "immersion") && *next != Tok::Newline => {
                        let k = if s == "submersion" { NormalKind::Submersion } else { NormalKind::Immersion };
                        self.bump();
                        k
                    }
                    _ => NormalKind::Auto,
                };
                Command::NormalForm(kind, self.expr()?)
            }
            "factor" => Command::Factor(self.expr()?),
            "d" => Command::D(self.expr()?),
            "wedge" => Command::Wedge(self.power()?, self.expr()?),
            "pullback" => Command::Pullback(self.power()?, self.expr()?),
            "homotopy" => {
                let e = self.expr()?;
                self.keyword("wrt")?;
                let pos = self.pos();
                Command::Homotopy(e, self.ident()?, pos)
            }
            "derham" => {
                let ring = self.ident()?;
                let k_max = self.key_int("kmax")?;
                let w_max = self.key_int("wmax")?;
                Command::Derham { ring, k_max, w_max }
            }
            "potential" => Command::Potential(self.expr()?),
            "rank" => Command::Rank(self.expr()?),
            "neumann" => Command::Neumann(self.expr()?),
            "transpose" => Command::Transpose(self.expr()?),
            "partial" => {
                let pos = self.pos();
                let c = self.ident()?;
                Command::Partial(c, pos, self.expr()?)
            }
            "product" => Command::Product(self.ident()?, self.ident()?),
            "pair" => Command::Pair(self.power()?, self.expr()?),
            "jaccheck" => Command::JacCheck(self.power()?, self.expr()?),
            "check" => {
                self.keyword("all")?;
                Command::CheckAll
            }
            _ => unreachable!("command table"),
        })
    }

    fn expr(&mut self) -> Result<Expr, CliError> {
        let mut lhs = self.term()?;
        loop {
            let pos = self.pos();
            let kind = match self.peek() {
                Tok::Plus => {
                    self.bump();
                    ExprKind::Add(Box::new(lhs), Box::new(self.term()?))
                }
                Tok::Minus => {
                    self.bump();
                    ExprKind::Sub(Box::new(lhs), Box::new(self.term()?))
                }
                _ => return Ok(lhs),
            };
            lhs = Expr { kind, pos };
        }
    }

    fn term(&mut self) -> Result<Expr, CliError> {
        let mut lhs = self.unary()?;
        loop {
            let pos = self.pos();
            let kind = match self.peek() {
                Tok::Star => {
                    self.bump();
                    ExprKind::Mul(Box::new(lhs), Box::new(self.unary()?))
                }
                Tok::Slash => {
                    self.bump();
                    match self.peek() {
                        Tok::Int(_) => {
                            let here = self.pos();
                            let n = self.int()?;
                            if n == BigInt::from(0) {
                                return Err(self.error_at(here, "division by zero"));
                            }
                            ExprKind::Div(Box::new(lhs), n)
                        }
                        _ => return Err(self.error_at(self.pos(), "division is only allowed by integer literals; use `invert` for series")),
                    }
                }
                _ => return Ok(lhs),
            };
            lhs = Expr { kind, pos };
        }
    }

    fn unary(&mut self) -> Result<Expr, CliError> {
        if *self.peek() == Tok::Minus {
            let pos = self.pos();
            self.bump();
            let inner = self.unary()?;
            return Ok(Expr { kind: ExprKind::Neg(Box::new(inner)), pos });
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, CliError> {
        let base = self.atom()?;
        if *self.peek() == Tok::Caret {
            let pos = self.pos();
            self.bump();
            let k = self.small_int()?;
            return Ok(Expr { kind: ExprKind::Pow(Box::new(base), k), pos });
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, CliError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(Expr { kind: ExprKind::Int(n), pos })
            }
            Tok::Ident(s) if s == "d" && *self.peek_at(1) == Tok::LParen => {
                self.bump();
                self.bump();
                let inner = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(Expr { kind: ExprKind::D(Box::new(inner)), pos })
            }
            Tok::Ident(s) => {
                self.bump();
                Ok(Expr { kind: ExprKind::Ident(s), pos })
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            _ => Err(self.unexpected("an expression")),
        }
    }
}
