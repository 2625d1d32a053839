//! Line-oriented text formats.
//!
//! Every file starts with a header line naming the object. Blank lines and
//! everything after `#` are ignored. Rationals are written `p` or `p/q`.
//! Nested graphs (in map and action files) are delimited by a keyword line
//! and `end`.
//!
//! ```text
//! graph
//! vertex 0 boundary
//! vertex 1 interior
//! edge 0 0 1 length 1/2 weight 1
//! ```
//!
//! ```text
//! form 1,0
//! edge 0 forward breaks 0 1/4 1/2
//! piece 1 -2        # coefficients in increasing degree
//! piece 1/2
//! ```
//!
//! An edge block marked `reverse` gives the coefficient in the reversed
//! parameterization; it is stored forward. Isolated vertex values of
//! functions are written `isolated <vertex> <value>`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use crate::calculus::{CalculusError, PiecewisePolynomial, Polynomial};
use crate::forms::{Bidegree, FormError, GraphForm};
use crate::graph::{Edge, EdgeId, GraphError, GraphPoint, Orientation, VertexId, WeightedMetricGraph};
use crate::harmonic::{EdgeImage, MapError, PLMap};
use crate::quotient::{GroupAction, QuotientError};
use crate::rational::{parse_rational, Rational};
use crate::skeleton::{Component, SingularPoint, SkeletonDescription, SkeletonError};
use crate::tropical::{HarmonicTropicalization, LagerbergPolyForm, MultiPoly, TropicalError};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{line}:{col}: {message}")]
    Parse { line: usize, col: usize, message: String },
    #[error("line {line}: {message}")]
    Reference { line: usize, message: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Calculus(#[from] CalculusError),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Quotient(#[from] QuotientError),
    #[error(transparent)]
    Tropical(#[from] TropicalError),
    #[error(transparent)]
    Skeleton(#[from] SkeletonError),
}

pub type Result<T> = std::result::Result<T, IoError>;

#[derive(Clone, Copy)]
struct Token<'a> {
    line: usize,
    col: usize,
    text: &'a str,
}

struct Line<'a> {
    no: usize,
    end_col: usize,
    tokens: Vec<Token<'a>>,
}

fn lex(text: &str) -> Vec<Line<'_>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("");
        let mut tokens = Vec::new();
        let mut start = None;
        for (j, ch) in body.char_indices().chain(std::iter::once((body.len(), ' '))) {
            if ch.is_whitespace() {
                if let Some(s) = start.take() {
                    tokens.push(Token { line: i + 1, col: s + 1, text: &body[s..j] });
                }
            } else if start.is_none() {
                start = Some(j);
            }
        }
        if !tokens.is_empty() {
            out.push(Line { no: i + 1, end_col: body.trim_end().len() + 1, tokens });
        }
    }
    out
}

fn parse_err(line: usize, col: usize, message: impl Into<String>) -> IoError {
    IoError::Parse { line, col, message: message.into() }
}

fn ref_err(line: usize, message: impl Into<String>) -> IoError {
    IoError::Reference { line, message: message.into() }
}

/// Reads the tokens of one line left to right.
struct Fields<'a, 'b> {
    line: &'b Line<'a>,
    pos: usize,
}

impl<'a, 'b> Fields<'a, 'b> {
    fn new(line: &'b Line<'a>) -> Self {
        Fields { line, pos: 0 }
    }

    fn next(&mut self, what: &str) -> Result<Token<'a>> {
        match self.line.tokens.get(self.pos) {
            Some(t) => {
                self.pos += 1;
                Ok(*t)
            }
            None => Err(parse_err(self.line.no, self.line.end_col, format!("expected {what}"))),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<()> {
        let t = self.next(&format!("`{kw}`"))?;
        if t.text != kw {
            return Err(parse_err(t.line, t.col, format!("expected `{kw}`, found `{}`", t.text)));
        }
        Ok(())
    }

    fn choice(&mut self, options: &[&str]) -> Result<(usize, Token<'a>)> {
        let what = options.iter().map(|o| format!("`{o}`")).collect::<Vec<_>>().join(" or ");
        let t = self.next(&what)?;
        match options.iter().position(|o| *o == t.text) {
            Some(i) => Ok((i, t)),
            None => Err(parse_err(t.line, t.col, format!("expected {what}, found `{}`", t.text))),
        }
    }

    fn rational(&mut self) -> Result<Rational> {
        let t = self.next("a rational")?;
        parse_rational(t.text).ok_or_else(|| parse_err(t.line, t.col, format!("`{}` is not a rational", t.text)))
    }

    fn index(&mut self) -> Result<(usize, Token<'a>)> {
        let t = self.next("an index")?;
        let v = t.text.parse::<usize>().map_err(|_| parse_err(t.line, t.col, format!("`{}` is not an index", t.text)))?;
        Ok((v, t))
    }

    fn integer<T: std::str::FromStr>(&mut self, what: &str) -> Result<T> {
        let t = self.next(what)?;
        t.text.parse::<T>().map_err(|_| parse_err(t.line, t.col, format!("`{}` is not {what}", t.text)))
    }

    fn has_more(&self) -> bool {
        self.pos < self.line.tokens.len()
    }

    fn finish(&self) -> Result<()> {
        match self.line.tokens.get(self.pos) {
            Some(t) => Err(parse_err(t.line, t.col, format!("unexpected `{}`", t.text))),
            None => Ok(()),
        }
    }

    fn rest_rationals(&mut self) -> Result<Vec<Rational>> {
        let mut out = Vec::new();
        while self.has_more() {
            out.push(self.rational()?);
        }
        Ok(out)
    }
}

struct Cursor<'s, 'a> {
    lines: &'s [Line<'a>],
    pos: usize,
}

impl<'s, 'a> Cursor<'s, 'a> {
    fn new(lines: &'s [Line<'a>]) -> Self {
        Cursor { lines, pos: 0 }
    }

    fn peek(&self) -> Option<&'s Line<'a>> {
        self.lines.get(self.pos)
    }

    fn peek_word(&self) -> Option<&'a str> {
        self.peek().map(|l| l.tokens[0].text)
    }

    fn take(&mut self) -> Option<&'s Line<'a>> {
        let l = self.lines.get(self.pos);
        if l.is_some() {
            self.pos += 1;
        }
        l
    }

    fn last_line(&self) -> usize {
        self.lines.last().map_or(1, |l| l.no)
    }

    /// Current line number, or one past the end.
    fn line_no(&self) -> usize {
        self.peek().map_or(self.last_line() + 1, |l| l.no)
    }

    fn header(&mut self, kw: &str) -> Result<&'s Line<'a>> {
        match self.take() {
            Some(l) if l.tokens[0].text == kw => Ok(l),
            Some(l) => Err(parse_err(l.no, l.tokens[0].col, format!("expected header `{kw}`, found `{}`", l.tokens[0].text))),
            None => Err(parse_err(1, 1, format!("empty input, expected header `{kw}`"))),
        }
    }

}

fn check_id(t: Token, got: usize, expected: usize, what: &str) -> Result<()> {
    if got != expected {
        return Err(parse_err(t.line, t.col, format!("{what} ids must be consecutive from 0: expected {expected}, found {got}")));
    }
    Ok(())
}

fn parse_bidegree(t: Token) -> Result<Bidegree> {
    let b = match t.text {
        "0,0" => Bidegree::B00,
        "1,0" => Bidegree::B10,
        "0,1" => Bidegree::B01,
        "1,1" => Bidegree::B11,
        _ => return Err(parse_err(t.line, t.col, format!("`{}` is not a bidegree (p,q)", t.text))),
    };
    Ok(b)
}

fn bidegree_text(b: Bidegree) -> String {
    let (p, q) = b.pq();
    format!("{p},{q}")
}

fn join(values: &[Rational]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

// ---------------------------------------------------------------- graphs

/// Reads vertex and edge records until `end` (when nested) or the end of
/// input. Validity is not checked.
fn graph_body(c: &mut Cursor<'_, '_>, nested: bool) -> Result<(WeightedMetricGraph, Vec<usize>)> {
    let mut boundary = Vec::new();
    let mut edges: Vec<Edge> = Vec::new();
    let mut edge_lines = Vec::new();
    loop {
        let Some(line) = c.take() else {
            if nested {
                return Err(parse_err(c.last_line() + 1, 1, "missing `end`"));
            }
            break;
        };
        let line_no = line.no;
        let mut f = Fields::new(line);
        let (kind, _) = f.choice(&["vertex", "edge", "end"])?;
        match kind {
            0 => {
                let (id, t) = f.index()?;
                check_id(t, id, boundary.len(), "vertex")?;
                let (b, _) = f.choice(&["interior", "boundary"])?;
                boundary.push(b == 1);
            }
            1 => {
                let (id, t) = f.index()?;
                check_id(t, id, edges.len(), "edge")?;
                let (tail, _) = f.index()?;
                let (head, _) = f.index()?;
                f.keyword("length")?;
                let length = f.rational()?;
                f.keyword("weight")?;
                let weight: u32 = f.integer("a weight")?;
                edges.push(Edge::new(tail, head, length, weight));
                edge_lines.push(line_no);
            }
            _ => {
                if !nested {
                    return Err(parse_err(line_no, line.tokens[0].col, "unexpected `end`"));
                }
                f.finish()?;
                break;
            }
        }
        f.finish()?;
    }
    for (e, l) in edges.iter().zip(&edge_lines) {
        for v in [e.tail, e.head] {
            if v.0 >= boundary.len() {
                return Err(ref_err(*l, format!("unknown vertex {v}")));
            }
        }
    }
    Ok((WeightedMetricGraph::from_parts_unchecked(boundary, edges), edge_lines))
}

fn checked(g: WeightedMetricGraph) -> Result<WeightedMetricGraph> {
    let r = g.validate();
    if r.is_valid() {
        Ok(g)
    } else {
        Err(GraphError::Invalid(r).into())
    }
}

/// Parses a graph without checking lengths, weights or loops; see
/// [`WeightedMetricGraph::validate`].
pub fn parse_graph_unchecked(text: &str) -> Result<WeightedMetricGraph> {
    let lines = lex(text);
    let mut c = Cursor::new(&lines);
    let h = c.header("graph")?;
    Fields { line: h, pos: 1 }.finish()?;
    let (g, _) = graph_body(&mut c, false)?;
    Ok(g)
}

pub fn parse_graph(text: &str) -> Result<WeightedMetricGraph> {
    checked(parse_graph_unchecked(text)?)
}

fn write_graph_body(out: &mut String, g: &WeightedMetricGraph) {
    for v in g.vertex_ids() {
        let kind = if g.is_boundary(v) { "boundary" } else { "interior" };
        let _ = writeln!(out, "vertex {} {kind}", v.0);
    }
    for (i, e) in g.edges().iter().enumerate() {
        let _ = writeln!(out, "edge {i} {} {} length {} weight {}", e.tail.0, e.head.0, e.length, e.weight);
    }
}

pub fn serialize_graph(g: &WeightedMetricGraph) -> String {
    let mut out = String::from("graph\n");
    write_graph_body(&mut out, g);
    out
}

// ----------------------------------------------------------------- forms

fn parse_piece(line: &Line) -> Result<Polynomial> {
    let mut f = Fields::new(line);
    f.keyword("piece")?;
    let coeffs = f.rest_rationals()?;
    if coeffs.is_empty() {
        return Err(parse_err(line.no, line.end_col, "expected coefficients"));
    }
    Ok(Polynomial::new(coeffs))
}

/// Parses a form on `g` at smoothness order `order`. Every edge needs a
/// block; the form is not checked for validity (see
/// [`validate_form`](crate::forms::validate_form)).
pub fn parse_form(text: &str, g: &WeightedMetricGraph, order: u32) -> Result<GraphForm> {
    let lines = lex(text);
    let mut c = Cursor::new(&lines);
    let h = c.header("form")?;
    let mut f = Fields { line: h, pos: 1 };
    let bidegree = parse_bidegree(f.next("a bidegree")?)?;
    f.finish()?;
    let mut coeffs: Vec<Option<PiecewisePolynomial>> = vec![None; g.num_edges()];
    let mut isolated = BTreeMap::new();
    while let Some(line) = c.take() {
        let line_no = line.no;
        let mut f = Fields::new(line);
        let (kind, _) = f.choice(&["edge", "isolated"])?;
        if kind == 1 {
            let (v, _) = f.index()?;
            let value = f.rational()?;
            f.finish()?;
            if bidegree != Bidegree::B00 {
                return Err(ref_err(line_no, "isolated values only belong to functions"));
            }
            if v >= g.num_vertices() {
                return Err(ref_err(line_no, format!("unknown vertex {v}")));
            }
            if !g.is_isolated(VertexId(v)) {
                return Err(ref_err(line_no, format!("vertex {v} is not isolated")));
            }
            if isolated.insert(VertexId(v), value).is_some() {
                return Err(ref_err(line_no, format!("vertex {v} given twice")));
            }
            continue;
        }
        let (e, _) = f.index()?;
        let (o, _) = f.choice(&["forward", "reverse"])?;
        f.keyword("breaks")?;
        let breaks = f.rest_rationals()?;
        if breaks.len() < 2 {
            return Err(parse_err(line_no, line.end_col, "expected at least two breakpoints"));
        }
        if e >= g.num_edges() {
            return Err(ref_err(line_no, format!("unknown edge {e}")));
        }
        if coeffs[e].is_some() {
            return Err(ref_err(line_no, format!("edge {e} given twice")));
        }
        if breaks.last() != Some(&g.edge(EdgeId(e)).length) {
            return Err(ref_err(line_no, format!("breakpoints of edge {e} do not end at its length {}", g.edge(EdgeId(e)).length)));
        }
        let mut pieces = Vec::new();
        while c.peek_word() == Some("piece") {
            pieces.push(parse_piece(c.take().unwrap())?);
        }
        let mut p = PiecewisePolynomial::new(breaks, pieces, order)?;
        if o == 1 {
            p = p.reverse().scale(&bidegree.reversal_sign());
        }
        coeffs[e] = Some(p);
    }
    let end = c.last_line();
    let coeffs = coeffs
        .into_iter()
        .enumerate()
        .map(|(i, p)| p.ok_or_else(|| ref_err(end, format!("no coefficient for edge {i}"))))
        .collect::<Result<Vec<_>>>()?;
    if bidegree == Bidegree::B00 {
        if let Some(v) = g.vertex_ids().find(|&v| g.is_isolated(v) && !isolated.contains_key(&v)) {
            return Err(ref_err(end, format!("no value for isolated vertex {v}")));
        }
    }
    Ok(GraphForm::new(bidegree, coeffs, isolated, order)?)
}

pub fn serialize_form(form: &GraphForm) -> String {
    let mut out = format!("form {}\n", bidegree_text(form.bidegree()));
    for (i, p) in form.coeffs().iter().enumerate() {
        let _ = writeln!(out, "edge {i} forward breaks {}", join(p.breakpoints()));
        for piece in p.pieces() {
            let cs = if piece.is_zero() { "0".to_string() } else { join(piece.coeffs()) };
            let _ = writeln!(out, "piece {cs}");
        }
    }
    for (v, value) in form.isolated() {
        let _ = writeln!(out, "isolated {} {value}", v.0);
    }
    out
}

// ------------------------------------------------------------------ maps

struct MapRecords {
    source_points: Vec<(EdgeId, Rational)>,
    target_points: Vec<(EdgeId, Rational)>,
    vertex_map: Vec<VertexId>,
    edge_map: Vec<EdgeImage>,
}

/// Subdivision points, then vertex and edge images, until `end` (nested) or
/// the end of input.
fn map_records(c: &mut Cursor<'_, '_>, source: &WeightedMetricGraph, target: &WeightedMetricGraph, nested: bool) -> Result<MapRecords> {
    let mut r = MapRecords { source_points: vec![], target_points: vec![], vertex_map: vec![], edge_map: vec![] };
    loop {
        let Some(line) = c.take() else {
            if nested {
                return Err(parse_err(c.last_line() + 1, 1, "missing `end`"));
            }
            break;
        };
        let line_no = line.no;
        let mut f = Fields::new(line);
        let (kind, kt) = f.choice(&["subdivide", "vertex", "edge", "end"])?;
        match kind {
            0 => {
                let (side, _) = f.choice(&["source", "target"])?;
                let (e, _) = f.index()?;
                let x = f.rational()?;
                let g = if side == 0 { source } else { target };
                if e >= g.num_edges() {
                    return Err(ref_err(line_no, format!("unknown edge {e}")));
                }
                let list = if side == 0 { &mut r.source_points } else { &mut r.target_points };
                list.push((EdgeId(e), x));
            }
            1 => {
                let (id, t) = f.index()?;
                check_id(t, id, r.vertex_map.len(), "vertex")?;
                let (v, _) = f.index()?;
                r.vertex_map.push(VertexId(v));
            }
            2 => {
                let (id, t) = f.index()?;
                check_id(t, id, r.edge_map.len(), "edge")?;
                let (how, _) = f.choice(&["onto", "crush"])?;
                if how == 0 {
                    let (e, _) = f.index()?;
                    let (o, _) = f.choice(&["forward", "reverse"])?;
                    f.keyword("expansion")?;
                    let expansion = f.rational()?;
                    let orientation = if o == 0 { Orientation::Forward } else { Orientation::Backward };
                    r.edge_map.push(EdgeImage::Edge { edge: EdgeId(e), orientation, expansion });
                } else {
                    let (v, _) = f.index()?;
                    r.edge_map.push(EdgeImage::Vertex(VertexId(v)));
                }
            }
            _ => {
                if !nested {
                    return Err(parse_err(line_no, kt.col, "unexpected `end`"));
                }
                f.finish()?;
                break;
            }
        }
        f.finish()?;
    }
    Ok(r)
}

fn build_map(source: WeightedMetricGraph, target: WeightedMetricGraph, r: MapRecords, line: usize) -> Result<PLMap> {
    PLMap::new(source, target, &r.source_points, &r.target_points, r.vertex_map, r.edge_map).map_err(|e| match e {
        MapError::Invalid(rep) => ref_err(line, rep.to_string()),
        other => other.into(),
    })
}

fn nested_graph(c: &mut Cursor<'_, '_>, kw: &str) -> Result<WeightedMetricGraph> {
    let line = c.header(kw)?;
    Fields { line, pos: 1 }.finish()?;
    let (g, _) = graph_body(c, true)?;
    checked(g)
}

/// Map file: `map`, a `source` graph block, a `target` graph block, then
/// subdivision points and images on the subdivided graphs.
pub fn parse_map(text: &str) -> Result<PLMap> {
    let lines = lex(text);
    let mut c = Cursor::new(&lines);
    let h = c.header("map")?;
    Fields { line: h, pos: 1 }.finish()?;
    let source = nested_graph(&mut c, "source")?;
    let target = nested_graph(&mut c, "target")?;
    let start = c.line_no();
    let r = map_records(&mut c, &source, &target, false)?;
    build_map(source, target, r, start)
}

fn write_map_records(out: &mut String, m: &PLMap) {
    for (e, x) in m.source_points() {
        let _ = writeln!(out, "subdivide source {} {x}", e.0);
    }
    for (e, x) in m.target_points() {
        let _ = writeln!(out, "subdivide target {} {x}", e.0);
    }
    for (i, v) in m.vertex_map().iter().enumerate() {
        let _ = writeln!(out, "vertex {i} {}", v.0);
    }
    for (i, im) in m.edge_map().iter().enumerate() {
        let _ = match im {
            EdgeImage::Edge { edge, orientation, expansion } => {
                let o = if *orientation == Orientation::Forward { "forward" } else { "reverse" };
                writeln!(out, "edge {i} onto {} {o} expansion {expansion}", edge.0)
            }
            EdgeImage::Vertex(v) => writeln!(out, "edge {i} crush {}", v.0),
        };
    }
}

pub fn serialize_map(m: &PLMap) -> String {
    let mut out = String::from("map\nsource\n");
    write_graph_body(&mut out, m.source());
    out.push_str("end\ntarget\n");
    write_graph_body(&mut out, m.target());
    out.push_str("end\n");
    write_map_records(&mut out, m);
    out
}

/// Action file: `action elements` (the full group) or `action generators`,
/// a `graph` block, then one `element` block per map.
pub fn parse_action(text: &str) -> Result<GroupAction> {
    let lines = lex(text);
    let mut c = Cursor::new(&lines);
    let h = c.header("action")?;
    let mut f = Fields { line: h, pos: 1 };
    let (mode, _) = f.choice(&["elements", "generators"])?;
    f.finish()?;
    let g = nested_graph(&mut c, "graph")?;
    let mut maps = Vec::new();
    while c.peek().is_some() {
        let line = c.header("element")?;
        Fields { line, pos: 1 }.finish()?;
        let start = c.line_no();
        let r = map_records(&mut c, &g, &g, true)?;
        maps.push(build_map(g.clone(), g.clone(), r, start)?);
    }
    Ok(if mode == 0 { GroupAction::new(g, maps)? } else { GroupAction::generate(g, maps)? })
}

pub fn serialize_action(a: &GroupAction) -> String {
    let mut out = String::from("action elements\ngraph\n");
    write_graph_body(&mut out, a.graph());
    out.push_str("end\n");
    for m in a.elements() {
        out.push_str("element\n");
        write_map_records(&mut out, m);
        out.push_str("end\n");
    }
    out
}

// --------------------------------------------------------- tropicalizations

/// `tropicalization <n>` followed by `vertex <id> <x1> ... <xn>` for every
/// vertex of `g`; slopes are read off the values.
pub fn parse_tropicalization(text: &str, g: &WeightedMetricGraph) -> Result<HarmonicTropicalization> {
    let lines = lex(text);
    let mut c = Cursor::new(&lines);
    let h = c.header("tropicalization")?;
    let mut f = Fields { line: h, pos: 1 };
    let (n, _) = f.index()?;
    f.finish()?;
    let mut points = Vec::new();
    while let Some(line) = c.take() {
        let mut f = Fields::new(line);
        f.keyword("vertex")?;
        let (id, t) = f.index()?;
        check_id(t, id, points.len(), "vertex")?;
        let p = f.rest_rationals()?;
        if p.len() != n {
            return Err(parse_err(line.no, line.end_col, format!("expected {n} coordinates, found {}", p.len())));
        }
        if id >= g.num_vertices() {
            return Err(ref_err(line.no, format!("unknown vertex {id}")));
        }
        points.push(p);
    }
    if points.len() != g.num_vertices() {
        return Err(ref_err(c.last_line(), format!("{} vertex values for {} vertices", points.len(), g.num_vertices())));
    }
    Ok(HarmonicTropicalization::from_points(g, n, &points)?)
}

pub fn serialize_tropicalization(g: &WeightedMetricGraph, h: &HarmonicTropicalization) -> String {
    let mut out = format!("tropicalization {}\n", h.dim());
    for v in g.vertex_ids() {
        let p = h.point(v);
        let _ = writeln!(out, "vertex {}{}{}", v.0, if p.is_empty() { "" } else { " " }, join(&p));
    }
    out
}

/// `lagerberg <n> <p,q>`, then `coeff` lines with 0, 1 or 2 indices, each
/// followed by `term <c> <e1> ... <en>` lines. Missing coefficients are 0.
pub fn parse_lagerberg(text: &str) -> Result<LagerbergPolyForm> {
    let lines = lex(text);
    let mut c = Cursor::new(&lines);
    let h = c.header("lagerberg")?;
    let mut f = Fields { line: h, pos: 1 };
    let (n, _) = f.index()?;
    let bidegree = parse_bidegree(f.next("a bidegree")?)?;
    f.finish()?;
    let nidx = bidegree.total() as usize;
    let count = n.pow(nidx as u32);
    let mut coeffs = vec![MultiPoly::zero(n); count];
    let mut seen = vec![false; count];
    while let Some(line) = c.take() {
        let line_no = line.no;
        let mut f = Fields::new(line);
        f.keyword("coeff")?;
        let mut flat = 0;
        for _ in 0..nidx {
            let (i, t) = f.index()?;
            if i >= n {
                return Err(parse_err(t.line, t.col, format!("index {i} out of range for dimension {n}")));
            }
            flat = flat * n + i;
        }
        f.finish()?;
        if std::mem::replace(&mut seen[flat], true) {
            return Err(ref_err(line_no, "coefficient given twice"));
        }
        let mut terms = BTreeMap::new();
        while c.peek_word() == Some("term") {
            let line = c.take().unwrap();
            let mut f = Fields::new(line);
            f.keyword("term")?;
            let coef = f.rational()?;
            let mut exps = Vec::with_capacity(n);
            for _ in 0..n {
                exps.push(f.integer::<u32>("an exponent")?);
            }
            f.finish()?;
            let slot: &mut Rational = terms.entry(exps).or_default();
            *slot += coef;
        }
        coeffs[flat] = MultiPoly::from_terms(n, terms)?;
    }
    Ok(LagerbergPolyForm::new(n, bidegree, coeffs)?)
}

pub fn serialize_lagerberg(eta: &LagerbergPolyForm) -> String {
    let n = eta.dim();
    let mut out = format!("lagerberg {n} {}\n", bidegree_text(eta.bidegree()));
    let nidx = eta.bidegree().total() as usize;
    for (flat, p) in eta.coeffs().iter().enumerate() {
        if p.is_zero() {
            continue;
        }
        let idx = match nidx {
            0 => String::new(),
            1 => format!(" {flat}"),
            _ => format!(" {} {}", flat / n, flat % n),
        };
        let _ = writeln!(out, "coeff{idx}");
        for (exps, c) in p.terms() {
            let es = exps.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(" ");
            let _ = writeln!(out, "term {c}{}{es}", if es.is_empty() { "" } else { " " });
        }
    }
    out
}

// -------------------------------------------------------------- skeletons

/// `skeleton`, then `component <id> proper|nonproper` and
/// `point <id> <A> <B> degree <d> modulus <val>` records.
pub fn parse_skeleton(text: &str) -> Result<SkeletonDescription> {
    let lines = lex(text);
    let mut c = Cursor::new(&lines);
    let h = c.header("skeleton")?;
    Fields { line: h, pos: 1 }.finish()?;
    let mut components = Vec::new();
    let mut points = Vec::new();
    while let Some(line) = c.take() {
        let mut f = Fields::new(line);
        let (kind, _) = f.choice(&["component", "point"])?;
        if kind == 0 {
            let id: u64 = f.integer("an id")?;
            let (p, _) = f.choice(&["proper", "nonproper"])?;
            components.push(Component { id, proper: p == 0 });
        } else {
            let id: u64 = f.integer("an id")?;
            let a: u64 = f.integer("a component id")?;
            let b: u64 = f.integer("a component id")?;
            f.keyword("degree")?;
            let degree: u32 = f.integer("a degree")?;
            f.keyword("modulus")?;
            let modulus = f.rational()?;
            points.push(SingularPoint { id, a, b, degree, modulus });
        }
        f.finish()?;
    }
    let d = SkeletonDescription { components, points };
    d.validate()?;
    Ok(d)
}

pub fn serialize_skeleton(d: &SkeletonDescription) -> String {
    let mut out = String::from("skeleton\n");
    for c in &d.components {
        let _ = writeln!(out, "component {} {}", c.id, if c.proper { "proper" } else { "nonproper" });
    }
    for p in &d.points {
        let _ = writeln!(out, "point {} {} {} degree {} modulus {}", p.id, p.a, p.b, p.degree, p.modulus);
    }
    out
}

// ---------------------------------------------------------------- points

/// `v<id>` for a vertex, `e<id>@<t>` for a point inside an edge.
pub fn parse_point(s: &str, g: &WeightedMetricGraph) -> Result<GraphPoint> {
    let bad = || parse_err(1, 1, format!("`{s}` is not a point (expected v<id> or e<id>@<t>)"));
    if let Some(rest) = s.strip_prefix('v') {
        let v: usize = rest.parse().map_err(|_| bad())?;
        if v >= g.num_vertices() {
            return Err(ref_err(1, format!("unknown vertex {v}")));
        }
        return Ok(GraphPoint::Vertex(VertexId(v)));
    }
    let rest = s.strip_prefix('e').ok_or_else(bad)?;
    let (e, t) = rest.split_once('@').ok_or_else(bad)?;
    let e: usize = e.parse().map_err(|_| bad())?;
    let t = parse_rational(t).ok_or_else(bad)?;
    if e >= g.num_edges() {
        return Err(ref_err(1, format!("unknown edge {e}")));
    }
    if t < Rational::zero() || t > g.edge(EdgeId(e)).length {
        return Err(ref_err(1, format!("{t} lies outside edge {e}")));
    }
    Ok(g.point_on_edge(EdgeId(e), &t))
}

pub fn format_point(p: &GraphPoint) -> String {
    match p {
        GraphPoint::Vertex(v) => format!("v{}", v.0),
        GraphPoint::OnEdge(e, t) => format!("e{}@{t}", e.0),
    }
}

/// Integer vector as space-separated text.
pub fn format_ints(v: &[BigInt]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}
