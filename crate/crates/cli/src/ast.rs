//! Syntax tree of a script.

use num_bigint::BigInt;

/// Source position (1-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DegreeSpec {
    /// Bit tuple such as `(0,1)`.
    Bits(Vec<BigInt>),
    /// `deg=k`: the k-th nonzero degree in standard order, counted from 1.
    Index(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RingCoords {
    Named(Vec<(String, DegreeSpec, Pos)>),
    /// `p=` even degree-zero coordinates and `q=(...)` counts per nonzero degree.
    Signature { p: usize, q: Vec<usize> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingDecl {
    pub name: String,
    pub n: usize,
    pub cap: u32,
    pub form_cap: Option<u32>,
    pub coords: RingCoords,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExprKind {
    Int(BigInt),
    Ident(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    /// Division by an integer literal.
    Div(Box<Expr>, BigInt),
    Pow(Box<Expr>, u32),
    D(Box<Expr>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expr {
    pub kind: ExprKind,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NormalKind {
    Auto,
    Submersion,
    Immersion,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Command {
    Print(Expr),
    Jac(Expr),
    Tangent(Expr),
    Classify(Expr),
    Invert(Expr),
    /// `compose F G` is G∘F: F runs first.
    Compose(Expr, Expr),
    NormalForm(NormalKind, Expr),
    Factor(Expr),
    D(Expr),
    Wedge(Expr, Expr),
    Pullback(Expr, Expr),
    Homotopy(Expr, String, Pos),
    Derham { ring: String, k_max: u32, w_max: u32 },
    Potential(Expr),
    Rank(Expr),
    Neumann(Expr),
    Transpose(Expr),
    Partial(String, Pos, Expr),
    Product(String, String),
    Pair(Expr, Expr),
    JacCheck(Expr, Expr),
    CheckAll,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StmtKind {
    Ring(RingDecl),
    Use(String),
    Let(String, Expr),
    LetCommand(String, Command),
    Matrix { name: String, rows: Vec<DegreeSpec>, cols: Vec<DegreeSpec>, entries: Vec<Vec<Expr>> },
    Morphism { name: String, source: String, target: String, images: Vec<(String, Expr, Pos)> },
    Command(Command),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub pos: Pos,
    /// Source text of the statement, whitespace-normalized.
    pub echo: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Script {
    pub stmts: Vec<Stmt>,
}
