//! Statement execution against an in-memory symbol table.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde_json::{json, Value as Json};
use zjet::{
    compose, constant_rank_factor, derham_ranks, differential_with_cap, find_potential, immersion_normal_form, invert_morphism,
    jacobian_multiplicativity_check, pair_morphism, product_domain, standard_order, submersion_normal_form, CoordinateSystem, DeRhamTable,
    Degree, DegreeSignature, Domain, Form, GradedMatrix, JetAlgebra, Morphism, QMatrix, Rational, Series, TangentMap,
};

use crate::ast::*;
use crate::emit;
use crate::error::{CliError, ErrorKind};
use crate::parser::parse;
use crate::report::{Payload, Report, Status};

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Options {
    /// Replaces the cap of every declared ring.
    pub cap_override: Option<u32>,
    /// Seed for `check all`.
    pub seed: u64,
}

#[derive(Clone, Debug)]
pub enum Value {
    Series(Series),
    Form(Form),
    Morphism(Morphism),
    Matrix(GradedMatrix),
    Table(String, DeRhamTable),
}

impl Value {
    fn kind(&self) -> &'static str {
        match self {
            Value::Series(_) => "series",
            Value::Form(_) => "form",
            Value::Morphism(_) => "morphism",
            Value::Matrix(_) => "matrix",
            Value::Table(..) => "cohomology table",
        }
    }
}

/// Result of running a script.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub reports: Vec<Report>,
    pub exit_code: i32,
}

/// Parses and executes `src`.
pub fn run(src: &str, opts: &Options) -> Outcome {
    match parse(src) {
        Ok(script) => Session::new(opts.clone()).execute(&script),
        Err(e) => {
            let code = e.kind.exit_code();
            Outcome { reports: vec![Report { line: e.line, echo: String::new(), status: Status::Error(e), diagnostics: vec![] }], exit_code: code }
        }
    }
}

struct RingEntry {
    name: String,
    dom: Domain,
    form_cap: u32,
}

/// Expression values.
enum Ev {
    S(Series),
    F(Form),
}

#[derive(Default)]
pub struct Session {
    opts: Options,
    rings: Vec<RingEntry>,
    values: BTreeMap<String, Value>,
    current: Option<usize>,
    notes: Vec<String>,
}

fn kernel(pos: Pos) -> impl Fn(zjet::Error) -> CliError {
    move |e| CliError::new(ErrorKind::Kernel, pos.line, pos.col, e.to_string())
}

fn type_error(pos: Pos, msg: impl Into<String>) -> CliError {
    CliError::new(ErrorKind::Type, pos.line, pos.col, msg)
}

fn resolve_error(pos: Pos, msg: impl Into<String>) -> CliError {
    CliError::new(ErrorKind::Resolve, pos.line, pos.col, msg)
}

fn scalar_rows(m: &QMatrix) -> Json {
    Json::Array((0..m.rows()).map(|i| Json::Array(m.row(i).iter().map(|c| json!(c.to_string())).collect())).collect())
}

fn derham_text(ring: &str, t: &DeRhamTable) -> String {
    let mut lines = vec![format!("de Rham cohomology of {ring} (kmax={}, wmax={})", t.k_max, t.w_max)];
    for c in &t.cells {
        lines.push(format!("k={} w={} dim={}", c.k, c.w, c.dim));
    }
    for k in 0..=t.k_max {
        lines.push(format!("H^{k} = {}", t.total(k)));
    }
    lines.join("\n")
}

fn derham_json(ring: &str, t: &DeRhamTable) -> Json {
    json!({
        "kind": "derham",
        "ring": ring,
        "k_max": t.k_max,
        "w_max": t.w_max,
        "cells": t.cells.iter().map(|c| json!({"k": c.k, "w": c.w, "dim": c.dim})).collect::<Vec<_>>(),
        "totals": (0..=t.k_max).map(|k| json!({"k": k, "dim": t.total(k)})).collect::<Vec<_>>(),
    })
}

fn tangent_json(t: &TangentMap) -> Json {
    Json::Array(t.degrees.iter().zip(&t.blocks).map(|(d, b)| json!({"degree": d.to_string(), "block": scalar_rows(b)})).collect())
}

impl Session {
    pub fn new(opts: Options) -> Self {
        Self { opts, rings: Vec::new(), values: BTreeMap::new(), current: None, notes: Vec::new() }
    }

    pub(crate) fn eval_series_in(&self, e: &Expr, dom: &Domain) -> Result<Series, CliError> {
        self.eval_series(e, dom, dom.cap().max(1))
    }

    pub(crate) fn eval_form_in(&self, e: &Expr, dom: &Domain, form_cap: u32) -> Result<Form, CliError> {
        Ok(match self.eval(e, dom, form_cap)? {
            Ev::S(s) => Form::function_with_cap(&s, form_cap),
            Ev::F(f) => f,
        })
    }

    pub fn execute(&mut self, script: &Script) -> Outcome {
        let mut reports = Vec::new();
        for stmt in &script.stmts {
            self.notes.clear();
            let status = match self.statement(stmt) {
                Ok(p) => Status::Ok(p),
                Err(e) => Status::Error(e),
            };
            let failed = match &status {
                Status::Error(e) => Some(e.kind.exit_code()),
                Status::Ok(_) => None,
            };
            reports.push(Report { line: stmt.pos.line, echo: stmt.echo.clone(), status, diagnostics: std::mem::take(&mut self.notes) });
            if let Some(code) = failed {
                return Outcome { reports, exit_code: code };
            }
        }
        Outcome { reports, exit_code: 0 }
    }

    fn statement(&mut self, stmt: &Stmt) -> Result<Payload, CliError> {
        let pos = stmt.pos;
        match &stmt.kind {
            StmtKind::Ring(decl) => self.declare_ring(decl, pos),
            StmtKind::Use(name) => {
                let idx = self.ring_index(name).ok_or_else(|| resolve_error(pos, format!("unknown ring `{name}`")))?;
                self.current = Some(idx);
                Ok(Payload::new(format!("using {name}"), json!({"kind": "use", "ring": name})))
            }
            StmtKind::Let(name, e) => {
                let (dom, fc) = self.current_ring(pos)?;
                let v = match self.eval(e, &dom, fc)? {
                    Ev::S(s) => Value::Series(s),
                    Ev::F(f) => Value::Form(f),
                };
                self.bind(name, v.clone());
                Ok(self.describe(Some(name), &v))
            }
            StmtKind::LetCommand(name, cmd) => {
                let (payload, value) = self.command(cmd, pos, Some(name))?;
                let v = value.ok_or_else(|| type_error(pos, "this command produces no value to bind"))?;
                self.bind(name, v);
                Ok(payload)
            }
            StmtKind::Matrix { name, rows, cols, entries } => {
                let (dom, fc) = self.current_ring(pos)?;
                let n = dom.n();
                let rows_d = rows.iter().map(|d| self.degree(d, n, pos)).collect::<Result<Vec<_>, _>>()?;
                let cols_d = cols.iter().map(|d| self.degree(d, n, pos)).collect::<Result<Vec<_>, _>>()?;
                let mut cells = Vec::with_capacity(entries.len());
                for row in entries {
                    let mut r = Vec::with_capacity(row.len());
                    for e in row {
                        r.push(self.eval_series(e, &dom, fc)?);
                    }
                    cells.push(r);
                }
                let m = GradedMatrix::from_rows(&dom, rows_d, cols_d, cells).map_err(kernel(pos))?;
                self.bind(name, Value::Matrix(m.clone()));
                Ok(self.describe(Some(name), &Value::Matrix(m)))
            }
            StmtKind::Morphism { name, source, target, images } => {
                let phi = self.build_morphism(source, target, images, pos)?;
                self.bind(name, Value::Morphism(phi.clone()));
                Ok(self.describe(Some(name), &Value::Morphism(phi)))
            }
            StmtKind::Command(cmd) => Ok(self.command(cmd, pos, None)?.0),
        }
    }

    fn bind(&mut self, name: &str, v: Value) {
        if self.values.contains_key(name) {
            self.notes.push(format!("redefines `{name}`"));
        }
        if let Some(idx) = self.current {
            if self.rings[idx].dom.coords().index_of(name).is_some() {
                self.notes.push(format!("`{name}` shadows a coordinate of {}", self.rings[idx].name));
            }
        }
        self.values.insert(name.to_string(), v);
    }

    fn ring_index(&self, name: &str) -> Option<usize> {
        self.rings.iter().position(|r| r.name == name)
    }

    fn current_ring(&self, pos: Pos) -> Result<(Domain, u32), CliError> {
        let idx = self.current.ok_or_else(|| resolve_error(pos, "no ring in scope; declare one with `ring` or select one with `use`"))?;
        Ok((self.rings[idx].dom.clone(), self.rings[idx].form_cap))
    }

    fn form_cap(&self, dom: &Domain) -> u32 {
        self.rings.iter().find(|r| *r.dom == **dom).map_or(dom.cap().max(1), |r| r.form_cap)
    }

    /// Name of a registered ring equal to `dom`, registering it under
    /// `fallback` when there is none.
    fn ring_name(&mut self, dom: &Domain, fallback: &str) -> String {
        if let Some(r) = self.rings.iter().find(|r| *r.dom == **dom) {
            return r.name.clone();
        }
        self.register_ring(fallback, dom.clone(), dom.cap().max(1))
    }

    fn register_ring(&mut self, name: &str, dom: Domain, form_cap: u32) -> String {
        let payload_name = name.to_string();
        if let Some(idx) = self.ring_index(name) {
            self.notes.push(format!("redeclares ring `{name}`"));
            self.rings[idx] = RingEntry { name: payload_name.clone(), dom, form_cap };
        } else {
            self.rings.push(RingEntry { name: payload_name.clone(), dom, form_cap });
        }
        payload_name
    }

    fn degree(&self, spec: &DegreeSpec, n: u8, pos: Pos) -> Result<Degree, CliError> {
        match spec {
            DegreeSpec::Bits(bits) => {
                if bits.len() != n as usize {
                    return Err(type_error(pos, format!("degree has {} entries, expected n = {n}", bits.len())));
                }
                let mut out = Vec::with_capacity(bits.len());
                for b in bits {
                    if *b == BigInt::from(0) {
                        out.push(0);
                    } else if *b == BigInt::from(1) {
                        out.push(1);
                    } else {
                        return Err(type_error(pos, format!("degree entries must be 0 or 1, found {b}")));
                    }
                }
                Degree::new(&out).map_err(kernel(pos))
            }
            DegreeSpec::Index(k) => {
                let order = standard_order(n).map_err(kernel(pos))?;
                if *k == 0 || *k >= order.len() {
                    return Err(type_error(pos, format!("deg={k} is out of range 1..{} for n = {n}", order.len() - 1)));
                }
                Ok(order[*k])
            }
        }
    }

    fn declare_ring(&mut self, decl: &RingDecl, pos: Pos) -> Result<Payload, CliError> {
        let n = u8::try_from(decl.n).ok().filter(|&n| n <= zjet::grading::MAX_N).ok_or_else(|| type_error(pos, format!("n = {} is not supported", decl.n)))?;
        let cs = match &decl.coords {
            RingCoords::Named(list) => {
                let mut coords = Vec::with_capacity(list.len());
                for (name, spec, cpos) in list {
                    coords.push((name.clone(), self.degree(spec, n, *cpos)?));
                }
                CoordinateSystem::new(n, coords).map_err(kernel(pos))?
            }
            RingCoords::Signature { p, q } => CoordinateSystem::from_signature(*p, &DegreeSignature::new(n, q.clone())).map_err(kernel(pos))?,
        };
        let cap = self.opts.cap_override.unwrap_or(decl.cap);
        let form_cap = decl.form_cap.unwrap_or(cap);
        if self.opts.cap_override.is_some() && cap != decl.cap {
            self.notes.push(format!("cap {} overridden to {cap}", decl.cap));
        }
        let dom = JetAlgebra::new(cs, cap);
        let name = self.register_ring(&decl.name, dom.clone(), form_cap);
        self.current = self.ring_index(&name);
        Ok(self.ring_payload(&name, &dom, form_cap))
    }

    fn ring_payload(&self, name: &str, dom: &Domain, form_cap: u32) -> Payload {
        let (p, q) = dom.dimension();
        let coords: Vec<Json> = dom.coords().coords().iter().map(|c| json!({"name": c.name, "degree": c.degree.to_string()})).collect();
        Payload::new(
            emit::ring(name, dom, form_cap),
            json!({"kind": "ring", "name": name, "n": dom.n(), "cap": dom.cap(), "formcap": form_cap, "p": p, "q": q, "coords": coords}),
        )
    }

    fn build_morphism(&mut self, source: &str, target: &str, images: &[(String, Expr, Pos)], pos: Pos) -> Result<Morphism, CliError> {
        let si = self.ring_index(source).ok_or_else(|| resolve_error(pos, format!("unknown ring `{source}`")))?;
        let ti = self.ring_index(target).ok_or_else(|| resolve_error(pos, format!("unknown ring `{target}`")))?;
        let (src, fc) = (self.rings[si].dom.clone(), self.rings[si].form_cap);
        let tgt = self.rings[ti].dom.clone();
        let mut slots: Vec<Option<Series>> = vec![None; tgt.len()];
        for (c, e, cpos) in images {
            let i = tgt.coords().index_of(c).ok_or_else(|| resolve_error(*cpos, format!("`{c}` is not a coordinate of {target}")))?;
            if slots[i].is_some() {
                return Err(type_error(*cpos, format!("`{c}` is assigned twice")));
            }
            let img = self.eval_series(e, &src, fc)?;
            let d = tgt.coords().degree(i);
            if !img.is_homogeneous(&d) {
                return Err(type_error(e.pos, format!("image of `{c}` must be homogeneous of degree {d}")));
            }
            slots[i] = Some(img);
        }
        let mut pullbacks = Vec::with_capacity(slots.len());
        for (i, s) in slots.into_iter().enumerate() {
            pullbacks.push(s.ok_or_else(|| type_error(pos, format!("missing image for `{}`", tgt.coords().name(i))))?);
        }
        Morphism::new(&src, &tgt, pullbacks).map_err(kernel(pos))
    }

    fn describe(&mut self, name: Option<&str>, v: &Value) -> Payload {
        match v {
            Value::Series(s) => {
                let ring = self.ring_name(s.algebra(), "_ring");
                let text = s.to_string();
                let shown = name.map_or(text.clone(), |n| format!("let {n} = {text}"));
                Payload::new(shown, json!({"kind": "series", "name": name, "ring": ring, "value": text, "degree": s.degree().map(|d| d.to_string())}))
            }
            Value::Form(f) => {
                let ring = self.ring_name(f.algebra(), "_ring");
                let text = f.to_string();
                let shown = name.map_or(text.clone(), |n| format!("let {n} = {text}"));
                Payload::new(
                    shown,
                    json!({"kind": "form", "name": name, "ring": ring, "value": text, "form_degree": f.form_degree(), "degree": f.degree().map(|d| d.to_string())}),
                )
            }
            Value::Morphism(m) => {
                let name = name.unwrap_or("_");
                let src = self.ring_name(m.source(), &format!("{name}_source"));
                let tgt = self.ring_name(m.target(), &format!("{name}_target"));
                let images: Vec<Json> =
                    m.pullbacks().iter().enumerate().map(|(i, p)| json!({"coord": m.target().coords().name(i), "image": p.to_string()})).collect();
                Payload::new(emit::morphism(name, &src, &tgt, m), json!({"kind": "morphism", "name": name, "source": src, "target": tgt, "images": images}))
            }
            Value::Matrix(m) => {
                let name = name.unwrap_or("_");
                let ring = self.ring_name(m.algebra(), "_ring");
                let rows: Vec<Json> = (0..m.nrows()).map(|i| Json::Array(m.row(i).iter().map(|e| json!(e.to_string())).collect())).collect();
                Payload::new(
                    emit::matrix(name, m),
                    json!({
                        "kind": "matrix",
                        "name": name,
                        "ring": ring,
                        "rows": m.row_degrees().iter().map(|d| d.to_string()).collect::<Vec<_>>(),
                        "cols": m.col_degrees().iter().map(|d| d.to_string()).collect::<Vec<_>>(),
                        "entries": rows,
                    }),
                )
            }
            Value::Table(ring, t) => Payload::new(derham_text(ring, t), derham_json(ring, t)),
        }
    }

    fn lookup(&self, name: &str, pos: Pos) -> Result<&Value, CliError> {
        self.values.get(name).ok_or_else(|| resolve_error(pos, format!("unknown identifier `{name}`")))
    }

    fn ident_of(e: &Expr) -> Option<&str> {
        match &e.kind {
            ExprKind::Ident(s) => Some(s),
            _ => None,
        }
    }

    fn morphism_arg(&self, e: &Expr) -> Result<(String, Morphism), CliError> {
        let name = Self::ident_of(e).ok_or_else(|| type_error(e.pos, "expected the name of a morphism"))?;
        match self.lookup(name, e.pos)? {
            Value::Morphism(m) => Ok((name.to_string(), m.clone())),
            v => Err(type_error(e.pos, format!("`{name}` is a {}, not a morphism", v.kind()))),
        }
    }

    fn matrix_arg(&self, e: &Expr) -> Result<(String, GradedMatrix), CliError> {
        let name = Self::ident_of(e).ok_or_else(|| type_error(e.pos, "expected the name of a matrix"))?;
        match self.lookup(name, e.pos)? {
            Value::Matrix(m) => Ok((name.to_string(), m.clone())),
            v => Err(type_error(e.pos, format!("`{name}` is a {}, not a matrix", v.kind()))),
        }
    }

    /// A named value of any kind, or an expression in the current ring.
    fn value_arg(&self, e: &Expr) -> Result<Value, CliError> {
        if let Some(name) = Self::ident_of(e) {
            if let Some(v) = self.values.get(name) {
                if matches!(v, Value::Morphism(_) | Value::Matrix(_) | Value::Table(..)) || self.current.is_none() {
                    return Ok(v.clone());
                }
            }
        }
        let (dom, fc) = self.current_ring(e.pos)?;
        Ok(match self.eval(e, &dom, fc)? {
            Ev::S(s) => Value::Series(s),
            Ev::F(f) => Value::Form(f),
        })
    }

    fn form_arg(&self, e: &Expr) -> Result<Form, CliError> {
        let (dom, fc) = self.current_ring(e.pos)?;
        Ok(match self.eval(e, &dom, fc)? {
            Ev::S(s) => Form::function_with_cap(&s, fc),
            Ev::F(f) => f,
        })
    }

    fn eval_series(&self, e: &Expr, dom: &Domain, fc: u32) -> Result<Series, CliError> {
        match self.eval(e, dom, fc)? {
            Ev::S(s) => Ok(s),
            Ev::F(_) => Err(type_error(e.pos, "expected a series, found a differential form")),
        }
    }

    fn eval(&self, e: &Expr, dom: &Domain, fc: u32) -> Result<Ev, CliError> {
        let k = kernel(e.pos);
        let lift = |s: Series| Form::function_with_cap(&s, fc);
        Ok(match &e.kind {
            ExprKind::Int(n) => Ev::S(Series::constant(dom, Rational::from_integer(n.clone()))),
            ExprKind::Ident(name) => self.resolve(name, e.pos, dom, fc)?,
            ExprKind::Neg(a) => match self.eval(a, dom, fc)? {
                Ev::S(s) => Ev::S(-s),
                Ev::F(f) => Ev::F(-&f),
            },
            ExprKind::Add(a, b) | ExprKind::Sub(a, b) => {
                let sub = matches!(e.kind, ExprKind::Sub(..));
                match (self.eval(a, dom, fc)?, self.eval(b, dom, fc)?) {
                    (Ev::S(x), Ev::S(y)) => Ev::S(if sub { x.checked_sub(&y) } else { x.checked_add(&y) }.map_err(k)?),
                    (x, y) => {
                        let (x, y) = (Self::as_form(x, &lift), Self::as_form(y, &lift));
                        Ev::F(if sub { x.checked_sub(&y) } else { x.checked_add(&y) }.map_err(k)?)
                    }
                }
            }
            ExprKind::Mul(a, b) => match (self.eval(a, dom, fc)?, self.eval(b, dom, fc)?) {
                (Ev::S(x), Ev::S(y)) => Ev::S(x.checked_mul(&y).map_err(k)?),
                (x, y) => Ev::F(Self::as_form(x, &lift).wedge(&Self::as_form(y, &lift)).map_err(k)?),
            },
            ExprKind::Div(a, n) => {
                let c = Rational::new(BigInt::from(1), n.clone());
                match self.eval(a, dom, fc)? {
                    Ev::S(s) => Ev::S(s.scale(&c)),
                    Ev::F(f) => Ev::F(f.scale(&c)),
                }
            }
            ExprKind::Pow(a, p) => match self.eval(a, dom, fc)? {
                Ev::S(s) => Ev::S(s.pow(*p)),
                Ev::F(f) => {
                    let mut acc = Form::function_with_cap(&Series::one(dom), fc);
                    for _ in 0..*p {
                        acc = acc.wedge(&f).map_err(&k)?;
                    }
                    Ev::F(acc)
                }
            },
            ExprKind::D(a) => match self.eval(a, dom, fc)? {
                Ev::S(s) => Ev::F(differential_with_cap(&s, fc).map_err(k)?),
                Ev::F(f) => Ev::F(f.exterior_derivative().map_err(k)?),
            },
        })
    }

    fn as_form(v: Ev, lift: &impl Fn(Series) -> Form) -> Form {
        match v {
            Ev::S(s) => lift(s),
            Ev::F(f) => f,
        }
    }

    /// Let-bound values of this ring, then coordinates, then differentials `d<coord>`.
    fn resolve(&self, name: &str, pos: Pos, dom: &Domain, fc: u32) -> Result<Ev, CliError> {
        let mut elsewhere = None;
        match self.values.get(name) {
            Some(Value::Series(s)) if **s.algebra() == **dom => return Ok(Ev::S(s.clone())),
            Some(Value::Form(f)) if **f.algebra() == **dom => return Ok(Ev::F(f.clone())),
            Some(v @ (Value::Series(_) | Value::Form(_))) => elsewhere = Some(format!("`{name}` is a {} over a different ring", v.kind())),
            Some(v) => elsewhere = Some(format!("`{name}` is a {} and cannot appear in an expression", v.kind())),
            None => {}
        }
        let coords = dom.coords();
        if let Some(i) = coords.index_of(name) {
            return Ok(Ev::S(Series::coordinate(dom, i)));
        }
        if let Some(i) = name.strip_prefix('d').and_then(|c| coords.index_of(c)) {
            return Ok(Ev::F(Form::generator(dom, fc, i).map_err(kernel(pos))?));
        }
        Err(match elsewhere {
            Some(msg) => type_error(pos, msg),
            None => resolve_error(pos, format!("unknown identifier `{name}`")),
        })
    }

    fn register_morphism(&mut self, name: &str, m: &Morphism) -> String {
        let text = self.describe(Some(name), &Value::Morphism(m.clone())).text;
        self.values.insert(name.to_string(), Value::Morphism(m.clone()));
        text
    }

    fn command(&mut self, cmd: &Command, pos: Pos, let_name: Option<&str>) -> Result<(Payload, Option<Value>), CliError> {
        let k = kernel(pos);
        match cmd {
            Command::Print(e) => {
                let v = self.value_arg(e)?;
                let name = let_name.or(Self::ident_of(e));
                Ok((self.describe(name, &v), Some(v)))
            }
            Command::Jac(e) => {
                let (f, phi) = self.morphism_arg(e)?;
                let name = let_name.map_or(format!("{f}_jac"), str::to_string);
                let v = Value::Matrix(phi.jacobian());
                self.values.insert(name.clone(), v.clone());
                Ok((self.describe(Some(&name), &v), Some(v)))
            }
            Command::Tangent(e) => {
                let (_, phi) = self.morphism_arg(e)?;
                let t = phi.tangent_map();
                Ok((Payload::new(t.to_string(), json!({"kind": "tangent", "blocks": tangent_json(&t)})), None))
            }
            Command::Classify(e) => {
                let (f, phi) = self.morphism_arg(e)?;
                let c = phi.classify();
                Ok((
                    Payload::new(format!("{f}: {} with tangent rank {}", c.kind, c.rank), json!({"kind": "classify", "class": c.kind.to_string(), "rank": c.rank.to_string()})),
                    None,
                ))
            }
            Command::Invert(e) => match self.value_arg(e)? {
                Value::Morphism(phi) => {
                    let f = Self::ident_of(e).unwrap_or("_");
                    let inv = invert_morphism(&phi).map_err(k)?;
                    let name = let_name.map_or(format!("{f}_inv"), str::to_string);
                    let text = self.register_morphism(&name, &inv);
                    let json = self.describe(Some(&name), &Value::Morphism(inv.clone())).json;
                    Ok((Payload::new(text, json), Some(Value::Morphism(inv))))
                }
                Value::Series(s) => {
                    let v = Value::Series(s.invert().map_err(k)?);
                    Ok((self.describe(let_name, &v), Some(v)))
                }
                v => Err(type_error(e.pos, format!("cannot invert a {}", v.kind()))),
            },
            Command::Compose(a, b) => {
                let (fa, phi) = self.morphism_arg(a)?;
                let (fb, psi) = self.morphism_arg(b)?;
                let c = compose(&phi, &psi).map_err(k)?;
                let name = let_name.map_or(format!("{fb}_o_{fa}"), str::to_string);
                let text = self.register_morphism(&name, &c);
                let json = self.describe(Some(&name), &Value::Morphism(c.clone())).json;
                Ok((Payload::new(text, json), Some(Value::Morphism(c))))
            }
            Command::NormalForm(kind, e) => {
                let (f, phi) = self.morphism_arg(e)?;
                let t = phi.tangent_map();
                let submersion = match kind {
                    NormalKind::Submersion => true,
                    NormalKind::Immersion => false,
                    NormalKind::Auto => t.is_surjective() || !t.is_injective(),
                };
                if submersion {
                    let nf = submersion_normal_form(&phi).map_err(k)?;
                    let base = let_name.map_or(format!("{f}_tau"), str::to_string);
                    let dom_name = self.ring_name(nf.tau.forward.target(), &format!("{base}_dom"));
                    let dom_text = self.ring_payload(&dom_name, nf.tau.forward.target(), self.form_cap(nf.tau.forward.target())).text;
                    let names: Vec<String> = nf.pivot_columns.iter().map(|&i| phi.source().coords().name(i).to_string()).collect();
                    let lines = [
                        "submersion normal form".to_string(),
                        format!("pivot columns: [{}]", names.join(", ")),
                        dom_text,
                        self.register_morphism(&base, &nf.tau.forward),
                        self.register_morphism(&format!("{base}_inv"), &nf.tau.inverse),
                        self.register_morphism(&format!("{base}_cert"), &nf.certificate),
                    ];
                    let json = json!({"kind": "normalform", "form": "submersion", "pivots": names, "tau": base, "tau_inv": format!("{base}_inv"), "certificate": format!("{base}_cert")});
                    Ok((Payload::new(lines.join("\n"), json), Some(Value::Morphism(nf.tau.forward))))
                } else {
                    let nf = immersion_normal_form(&phi).map_err(k)?;
                    let base = let_name.map_or(format!("{f}_sigma"), str::to_string);
                    let dom_name = self.ring_name(nf.sigma.forward.target(), &format!("{base}_dom"));
                    let dom_text = self.ring_payload(&dom_name, nf.sigma.forward.target(), self.form_cap(nf.sigma.forward.target())).text;
                    let names: Vec<String> = nf.pivot_rows.iter().map(|&i| phi.target().coords().name(i).to_string()).collect();
                    let lines = [
                        "immersion normal form".to_string(),
                        format!("pivot rows: [{}]", names.join(", ")),
                        dom_text,
                        self.register_morphism(&base, &nf.sigma.forward),
                        self.register_morphism(&format!("{base}_inv"), &nf.sigma.inverse),
                        self.register_morphism(&format!("{base}_cert"), &nf.certificate),
                    ];
                    let json = json!({"kind": "normalform", "form": "immersion", "pivots": names, "sigma": base, "sigma_inv": format!("{base}_inv"), "certificate": format!("{base}_cert")});
                    Ok((Payload::new(lines.join("\n"), json), Some(Value::Morphism(nf.sigma.forward))))
                }
            }
            Command::Factor(e) => {
                let (f, phi) = self.morphism_arg(e)?;
                let base = let_name.unwrap_or(&f).to_string();
                match constant_rank_factor(&phi).map_err(k)? {
                    None => Ok((Payload::new(format!("{f} is not of constant rank"), json!({"kind": "factor", "constant_rank": false})), None)),
                    Some(fac) => {
                        let w = self.register_ring(&format!("{base}_W"), fac.w.clone(), fac.w.cap().max(1));
                        let lines = [
                            format!("constant rank {}", fac.profile),
                            self.ring_payload(&w, &fac.w, fac.w.cap().max(1)).text,
                            self.register_morphism(&format!("{base}_phi1"), &fac.phi1),
                            self.register_morphism(&format!("{base}_phi2"), &fac.phi2),
                            self.register_morphism(&format!("{base}_section"), &fac.section),
                            format!("{base}_phi1: {}", fac.phi1.classify().kind),
                            format!("{base}_phi2: {}", fac.phi2.classify().kind),
                        ];
                        let json = json!({
                            "kind": "factor",
                            "constant_rank": true,
                            "profile": fac.profile.to_string(),
                            "W": w,
                            "phi1": format!("{base}_phi1"),
                            "phi2": format!("{base}_phi2"),
                            "section": format!("{base}_section"),
                        });
                        Ok((Payload::new(lines.join("\n"), json), None))
                    }
                }
            }
            Command::D(e) => {
                let (dom, fc) = self.current_ring(e.pos)?;
                let out = match self.eval(e, &dom, fc)? {
                    Ev::S(s) => differential_with_cap(&s, fc).map_err(k)?,
                    Ev::F(f) => f.exterior_derivative().map_err(k)?,
                };
                let v = Value::Form(out);
                Ok((self.describe(let_name, &v), Some(v)))
            }
            Command::Wedge(a, b) => {
                let x = self.form_arg(a)?;
                let y = self.form_arg(b)?;
                let v = Value::Form(x.wedge(&y).map_err(k)?);
                Ok((self.describe(let_name, &v), Some(v)))
            }
            Command::Pullback(f, e) => {
                let (_, phi) = self.morphism_arg(f)?;
                let tgt = phi.target().clone();
                let fc = self.form_cap(&tgt);
                let v = match self.eval(e, &tgt, fc)? {
                    Ev::S(s) => Value::Series(phi.pullback(&s).map_err(k)?),
                    Ev::F(w) => Value::Form(w.pullback(&phi).map_err(k)?),
                };
                Ok((self.describe(let_name, &v), Some(v)))
            }
            Command::Homotopy(e, coord, cpos) => {
                let (dom, _) = self.current_ring(e.pos)?;
                let i = dom.coords().index_of(coord).ok_or_else(|| resolve_error(*cpos, format!("`{coord}` is not a coordinate")))?;
                let omega = self.form_arg(e)?;
                let v = Value::Form(omega.homotopy_k(i).map_err(k)?);
                Ok((self.describe(let_name, &v), Some(v)))
            }
            Command::Derham { ring, k_max, w_max } => {
                let idx = self.ring_index(ring).ok_or_else(|| resolve_error(pos, format!("unknown ring `{ring}`")))?;
                let t = derham_ranks(&self.rings[idx].dom, *k_max, *w_max).map_err(k)?;
                let v = Value::Table(ring.clone(), t);
                Ok((self.describe(None, &v), Some(v)))
            }
            Command::Potential(e) => {
                let omega = self.form_arg(e)?;
                let v = Value::Form(find_potential(&omega).map_err(k)?);
                Ok((self.describe(let_name, &v), Some(v)))
            }
            Command::Rank(e) => match self.value_arg(e)? {
                Value::Matrix(m) => {
                    let name = Self::ident_of(e).unwrap_or("_").to_string();
                    match m.constant_rank_decompose().map_err(k)? {
                        None => Ok((Payload::new(format!("{name} is not of constant rank"), json!({"kind": "rank", "constant_rank": false})), None)),
                        Some(cr) => {
                            let (g1, g2) = (format!("{name}_g1"), format!("{name}_g2"));
                            let mut lines = vec![format!("constant rank {}", cr.profile)];
                            for (n, g) in [(&g1, &cr.g1), (&g2, &cr.g2)] {
                                let v = Value::Matrix(g.clone());
                                lines.push(self.describe(Some(n), &v).text);
                                self.values.insert(n.clone(), v);
                            }
                            let json = json!({"kind": "rank", "constant_rank": true, "profile": cr.profile.to_string(), "g1": g1, "g2": g2});
                            Ok((Payload::new(lines.join("\n"), json), None))
                        }
                    }
                }
                Value::Morphism(phi) => {
                    let c = phi.classify();
                    Ok((Payload::new(format!("tangent rank {}", c.rank), json!({"kind": "rank", "tangent_rank": c.rank.to_string()})), None))
                }
                v => Err(type_error(e.pos, format!("rank of a {} is not defined", v.kind()))),
            },
            Command::Neumann(e) => {
                let (name, m) = self.matrix_arg(e)?;
                let inv = m.neumann_inverse().map_err(k)?;
                let out = let_name.map_or(format!("{name}_inv"), str::to_string);
                let v = Value::Matrix(inv);
                self.values.insert(out.clone(), v.clone());
                Ok((self.describe(Some(&out), &v), Some(v)))
            }
            Command::Transpose(e) => {
                let (name, m) = self.matrix_arg(e)?;
                let out = let_name.map_or(format!("{name}_t"), str::to_string);
                let v = Value::Matrix(m.graded_transpose());
                self.values.insert(out.clone(), v.clone());
                Ok((self.describe(Some(&out), &v), Some(v)))
            }
            Command::Partial(coord, cpos, e) => {
                let (dom, fc) = self.current_ring(e.pos)?;
                let i = dom.coords().index_of(coord).ok_or_else(|| resolve_error(*cpos, format!("`{coord}` is not a coordinate")))?;
                let s = self.eval_series(e, &dom, fc)?;
                let v = Value::Series(s.partial(i));
                Ok((self.describe(let_name, &v), Some(v)))
            }
            Command::Product(a, b) => {
                let ia = self.ring_index(a).ok_or_else(|| resolve_error(pos, format!("unknown ring `{a}`")))?;
                let ib = self.ring_index(b).ok_or_else(|| resolve_error(pos, format!("unknown ring `{b}`")))?;
                let (prod, p1, p2) = product_domain(&self.rings[ia].dom, &self.rings[ib].dom).map_err(k)?;
                let name = let_name.map_or(format!("{a}_x_{b}"), str::to_string);
                let fc = prod.cap().max(1);
                let name = self.register_ring(&name, prod.clone(), fc);
                let lines = [
                    self.ring_payload(&name, &prod, fc).text,
                    self.register_morphism(&format!("{name}_pr1"), &p1),
                    self.register_morphism(&format!("{name}_pr2"), &p2),
                ];
                Ok((Payload::new(lines.join("\n"), json!({"kind": "product", "ring": name, "pr1": format!("{name}_pr1"), "pr2": format!("{name}_pr2")})), None))
            }
            Command::Pair(a, b) => {
                let (fa, f1) = self.morphism_arg(a)?;
                let (fb, f2) = self.morphism_arg(b)?;
                let h = pair_morphism(&f1, &f2).map_err(k)?;
                let name = let_name.map_or(format!("pair_{fa}_{fb}"), str::to_string);
                self.ring_name(h.target(), &format!("{name}_target"));
                let text = self.register_morphism(&name, &h);
                let json = self.describe(Some(&name), &Value::Morphism(h.clone())).json;
                Ok((Payload::new(text, json), Some(Value::Morphism(h))))
            }
            Command::JacCheck(a, b) => {
                let (fa, psi) = self.morphism_arg(a)?;
                let (fb, phi) = self.morphism_arg(b)?;
                let (ok, residual) = jacobian_multiplicativity_check(&psi, &phi).map_err(k)?;
                let text = if ok {
                    format!("Jac({fb} o {fa}) = Jac({fa}) * psi*Jac({fb}): holds")
                } else {
                    format!("Jac({fb} o {fa}) = Jac({fa}) * psi*Jac({fb}): fails\n{}", emit::matrix("residual", &residual))
                };
                Ok((Payload::new(text, json!({"kind": "jaccheck", "holds": ok})), None))
            }
            Command::CheckAll => {
                let results = crate::checks::run_all(self.opts.seed, crate::checks::Scale::Quick);
                let text = crate::checks::summary(&results);
                let failed: Vec<&str> = results.iter().filter(|r| !r.passed).map(|r| r.name).collect();
                if !failed.is_empty() {
                    return Err(CliError::new(ErrorKind::Kernel, pos.line, pos.col, format!("{text}\nfailed checks: {}", failed.join(", "))));
                }
                let json = json!({
                    "kind": "check",
                    "seed": self.opts.seed,
                    "results": results.iter().map(|r| json!({"name": r.name, "cases": r.cases, "passed": r.passed})).collect::<Vec<_>>(),
                });
                Ok((Payload::new(text, json), None))
            }
        }
    }
}
