//! Expression language for recursively built graphs.
//!
//! ```text
//! expr    := unary (("*" | "⊗") unary)*
//! unary   := INT "on" unary | postfix
//! postfix := primary ("^" ["⊗"] INT)*
//! primary := "P" | "2" | "T" | "SQ(" num "," num "," num ")" | "@" path | "(" expr ")"
//! ```
//!
//! `P` (or a bare `2`) is the two-site graph, `T` the chiral triangle and
//! `SQ(a,b,c)` the phased square. `@path` loads a graph document. `N on X` is
//! the `N`-boson dual of `X`, `*` the Cartesian product and `X^k` the
//! Cartesian power. `on` binds looser than `^`, so `2 on P^2` is the dual of `P^2`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::fock::{basis_size, dual_graph_with_cap, DEFAULT_BASIS_CAP};
use crate::graph::parse_graph;
use crate::graph::{
    build_phased_square, build_triangle_complex, build_two_site, cartesian_power, cartesian_product,
    HermitianWeightedGraph,
};

#[derive(Debug, Clone, PartialEq)]
pub enum Leaf {
    TwoSite,
    Triangle,
    Square { alpha: f64, beta: f64, gamma: f64 },
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub enum HierarchySpec {
    Leaf(Leaf),
    Dual { child: Box<HierarchySpec>, bosons: u32 },
    /// At least two factors.
    Product(Vec<HierarchySpec>),
    Power { child: Box<HierarchySpec>, exponent: u32 },
}

impl HierarchySpec {
    pub fn dual(child: HierarchySpec, bosons: u32) -> Self {
        Self::Dual { child: Box::new(child), bosons }
    }

    pub fn power(child: HierarchySpec, exponent: u32) -> Self {
        Self::Power { child: Box::new(child), exponent }
    }

    /// Every graph file referenced by the tree, in first-appearance order.
    pub fn file_leaves(&self) -> Vec<&Path> {
        let mut out = Vec::new();
        self.visit_files(&mut out);
        out
    }

    fn visit_files<'a>(&'a self, out: &mut Vec<&'a Path>) {
        match self {
            Self::Leaf(Leaf::File(p)) => {
                if !out.contains(&p.as_path()) {
                    out.push(p);
                }
            }
            Self::Leaf(_) => {}
            Self::Dual { child, .. } | Self::Power { child, .. } => child.visit_files(out),
            Self::Product(fs) => fs.iter().for_each(|f| f.visit_files(out)),
        }
    }

    /// Rewrites every file leaf through `f`, e.g. to make paths absolute.
    pub fn map_files(self, f: &mut impl FnMut(PathBuf) -> PathBuf) -> Self {
        match self {
            Self::Leaf(Leaf::File(p)) => Self::Leaf(Leaf::File(f(p))),
            Self::Leaf(l) => Self::Leaf(l),
            Self::Dual { child, bosons } => Self::dual(child.map_files(f), bosons),
            Self::Power { child, exponent } => Self::power(child.map_files(f), exponent),
            Self::Product(fs) => Self::Product(fs.into_iter().map(|x| x.map_files(f)).collect()),
        }
    }

    fn is_atom(&self) -> bool {
        matches!(self, Self::Leaf(_))
    }
}

impl fmt::Display for Leaf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Leaf::TwoSite => f.write_str("P"),
            Leaf::Triangle => f.write_str("T"),
            // `{:?}` on f64 is the shortest round-tripping form.
            Leaf::Square { alpha, beta, gamma } => write!(f, "SQ({alpha:?},{beta:?},{gamma:?})"),
            Leaf::File(p) => write!(f, "@{}", p.display()),
        }
    }
}

/// Canonical form; `parse_hierarchy(&spec.to_string())` returns `spec`.
impl fmt::Display for HierarchySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrapped = |s: &HierarchySpec, f: &mut fmt::Formatter<'_>| {
            if s.is_atom() {
                write!(f, "{s}")
            } else {
                write!(f, "({s})")
            }
        };
        match self {
            Self::Leaf(l) => write!(f, "{l}"),
            Self::Dual { child, bosons } => {
                write!(f, "{bosons} on ")?;
                wrapped(child, f)
            }
            Self::Power { child, exponent } => {
                wrapped(child, f)?;
                write!(f, "^{exponent}")
            }
            Self::Product(fs) => {
                for (k, x) in fs.iter().enumerate() {
                    if k > 0 {
                        f.write_str(" * ")?;
                    }
                    match x {
                        Self::Product(_) => wrapped(x, f)?,
                        _ => write!(f, "{x}")?,
                    }
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(u32),
    Num(f64),
    Word(String),
    Path(String),
    LParen,
    RParen,
    Comma,
    Star,
    Caret,
    Tensor,
}

fn syntax(position: usize, message: impl Into<String>) -> Error {
    Error::Syntax { position, message: message.into() }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>> {
    let mut out = Vec::new();
    let mut it = text.char_indices().peekable();
    while let Some(&(pos, c)) = it.peek() {
        if c.is_whitespace() {
            it.next();
            continue;
        }
        let single = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            '*' => Some(Tok::Star),
            '^' => Some(Tok::Caret),
            '⊗' => Some(Tok::Tensor),
            _ => None,
        };
        if let Some(t) = single {
            it.next();
            out.push((pos, t));
        } else if c.is_ascii_digit() || matches!(c, '-' | '+' | '.') {
            let mut end = pos;
            let mut prev = ' ';
            while let Some(&(p, d)) = it.peek() {
                let sign_ok = matches!(d, '-' | '+') && (p == pos || matches!(prev, 'e' | 'E'));
                if d.is_ascii_digit() || matches!(d, '.' | 'e' | 'E') || sign_ok {
                    prev = d;
                    end = p + d.len_utf8();
                    it.next();
                } else {
                    break;
                }
            }
            let s = &text[pos..end];
            let tok = if s.bytes().all(|b| b.is_ascii_digit()) {
                s.parse().map(Tok::Int).map_err(|_| syntax(pos, format!("integer `{s}` too large")))?
            } else {
                s.parse().map(Tok::Num).map_err(|_| syntax(pos, format!("malformed number `{s}`")))?
            };
            out.push((pos, tok));
        } else if c.is_alphabetic() || c == '_' {
            let mut end = pos;
            while let Some(&(p, d)) = it.peek() {
                if d.is_alphanumeric() || d == '_' {
                    end = p + d.len_utf8();
                    it.next();
                } else {
                    break;
                }
            }
            out.push((pos, Tok::Word(text[pos..end].to_string())));
        } else if c == '@' {
            it.next();
            let mut path = String::new();
            while let Some(&(_, d)) = it.peek() {
                if d.is_whitespace() || matches!(d, ')' | '*' | '^' | '⊗') {
                    break;
                }
                path.push(d);
                it.next();
            }
            if path.is_empty() {
                return Err(syntax(pos, "empty path after `@`"));
            }
            out.push((pos, Tok::Path(path)));
        } else {
            return Err(syntax(pos, format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |(p, _)| *p)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|(_, t)| t.clone());
        self.at += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        let pos = self.pos();
        match self.next() {
            Some(t) if t == want => Ok(()),
            _ => Err(syntax(pos, format!("expected {what}"))),
        }
    }

    fn expr(&mut self) -> Result<HierarchySpec> {
        let mut factors = vec![self.unary()?];
        while matches!(self.peek(), Some(Tok::Star | Tok::Tensor)) {
            self.next();
            factors.push(self.unary()?);
        }
        Ok(if factors.len() == 1 {
            factors.pop().unwrap()
        } else {
            HierarchySpec::Product(factors)
        })
    }

    fn unary(&mut self) -> Result<HierarchySpec> {
        if let (Some(Tok::Int(n)), Some((_, Tok::Word(w)))) = (self.peek(), self.toks.get(self.at + 1)) {
            if w == "on" {
                let (n, pos) = (*n, self.pos());
                if n == 0 {
                    return Err(syntax(pos, "boson count must be at least 1"));
                }
                self.at += 2;
                return Ok(HierarchySpec::dual(self.unary()?, n));
            }
        }
        self.postfix()
    }

    fn postfix(&mut self) -> Result<HierarchySpec> {
        let mut node = self.primary()?;
        while self.peek() == Some(&Tok::Caret) {
            self.next();
            if self.peek() == Some(&Tok::Tensor) {
                self.next();
            }
            let pos = self.pos();
            match self.next() {
                Some(Tok::Int(k)) if k >= 1 => node = HierarchySpec::power(node, k),
                _ => return Err(syntax(pos, "expected a positive exponent")),
            }
        }
        Ok(node)
    }

    fn number(&mut self) -> Result<f64> {
        let pos = self.pos();
        match self.next() {
            Some(Tok::Num(x)) => Ok(x),
            Some(Tok::Int(n)) => Ok(f64::from(n)),
            _ => Err(syntax(pos, "expected a number")),
        }
    }

    fn primary(&mut self) -> Result<HierarchySpec> {
        let pos = self.pos();
        match self.next() {
            Some(Tok::LParen) => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Some(Tok::Int(2)) => Ok(HierarchySpec::Leaf(Leaf::TwoSite)),
            Some(Tok::Word(w)) => match w.as_str() {
                "P" => Ok(HierarchySpec::Leaf(Leaf::TwoSite)),
                "T" => Ok(HierarchySpec::Leaf(Leaf::Triangle)),
                "SQ" => {
                    self.expect(Tok::LParen, "`(` after SQ")?;
                    let alpha = self.number()?;
                    self.expect(Tok::Comma, "`,`")?;
                    let beta = self.number()?;
                    self.expect(Tok::Comma, "`,`")?;
                    let gamma = self.number()?;
                    self.expect(Tok::RParen, "`)`")?;
                    Ok(HierarchySpec::Leaf(Leaf::Square { alpha, beta, gamma }))
                }
                _ => Err(syntax(pos, format!("unknown atom `{w}`"))),
            },
            Some(Tok::Path(p)) => Ok(HierarchySpec::Leaf(Leaf::File(PathBuf::from(p)))),
            Some(Tok::Int(n)) => Err(syntax(pos, format!("unknown atom `{n}` (only `2` names a graph)"))),
            Some(_) => Err(syntax(pos, "expected a graph")),
            None => Err(syntax(pos, "unexpected end of expression")),
        }
    }
}

pub fn parse_hierarchy(text: &str) -> Result<HierarchySpec> {
    let mut p = Parser {
        toks: tokenize(text)?,
        at: 0,
        end: text.len(),
    };
    let e = p.expr()?;
    if p.at < p.toks.len() {
        return Err(syntax(p.pos(), "unexpected trailing input"));
    }
    Ok(e)
}

/// Graph files referenced by a spec, loaded once.
pub type LoadedLeaves = BTreeMap<PathBuf, HermitianWeightedGraph>;

pub fn load_leaves(spec: &HierarchySpec) -> Result<LoadedLeaves> {
    spec.file_leaves()
        .into_iter()
        .map(|p| {
            let text = std::fs::read_to_string(p)?;
            Ok((p.to_path_buf(), parse_graph(&text)?))
        })
        .collect()
}

/// Exact vertex count of the built graph (saturating at `u128::MAX`).
///
/// Fails on the innermost subtree whose size exceeds `cap`.
pub fn estimate_size(spec: &HierarchySpec, leaves: &LoadedLeaves, cap: usize) -> Result<u128> {
    let n = match spec {
        HierarchySpec::Leaf(Leaf::TwoSite) => 2,
        HierarchySpec::Leaf(Leaf::Triangle) => 3,
        HierarchySpec::Leaf(Leaf::Square { .. }) => 4,
        HierarchySpec::Leaf(Leaf::File(p)) => leaf_file(leaves, p)?.vertex_count() as u128,
        HierarchySpec::Dual { child, bosons } => {
            let v = estimate_size(child, leaves, cap)?;
            basis_size(v as usize, *bosons)
        }
        HierarchySpec::Product(fs) => fs.iter().try_fold(1u128, |acc, x| {
            Ok::<_, Error>(acc.saturating_mul(estimate_size(x, leaves, cap)?))
        })?,
        HierarchySpec::Power { child, exponent } => {
            let v = estimate_size(child, leaves, cap)?;
            (0..*exponent).fold(1u128, |acc, _| acc.saturating_mul(v))
        }
    };
    if n > cap as u128 {
        return Err(Error::HierarchyCapExceeded {
            subtree: spec.to_string(),
            required: n,
            cap,
        });
    }
    Ok(n)
}

fn leaf_file<'a>(leaves: &'a LoadedLeaves, p: &Path) -> Result<&'a HermitianWeightedGraph> {
    leaves
        .get(p)
        .ok_or_else(|| Error::InvalidConfig(format!("graph file {} was not loaded", p.display())))
}

pub fn hierarchy_build(spec: &HierarchySpec) -> Result<HermitianWeightedGraph> {
    hierarchy_build_with_cap(spec, DEFAULT_BASIS_CAP)
}

/// Loads file leaves from disk, checks the size estimate, then builds.
pub fn hierarchy_build_with_cap(spec: &HierarchySpec, cap: usize) -> Result<HermitianWeightedGraph> {
    let leaves = load_leaves(spec)?;
    build_loaded(spec, &leaves, cap)
}

pub fn build_loaded(spec: &HierarchySpec, leaves: &LoadedLeaves, cap: usize) -> Result<HermitianWeightedGraph> {
    estimate_size(spec, leaves, cap)?;
    eval(spec, leaves, cap)
}

fn eval(spec: &HierarchySpec, leaves: &LoadedLeaves, cap: usize) -> Result<HermitianWeightedGraph> {
    Ok(match spec {
        HierarchySpec::Leaf(Leaf::TwoSite) => build_two_site(),
        HierarchySpec::Leaf(Leaf::Triangle) => build_triangle_complex(),
        HierarchySpec::Leaf(Leaf::Square { alpha, beta, gamma }) => build_phased_square(*alpha, *beta, *gamma),
        HierarchySpec::Leaf(Leaf::File(p)) => leaf_file(leaves, p)?.clone(),
        HierarchySpec::Dual { child, bosons } => dual_graph_with_cap(&eval(child, leaves, cap)?, *bosons, cap)?,
        HierarchySpec::Product(fs) => {
            let mut it = fs.iter();
            let first = eval(it.next().expect("products have factors"), leaves, cap)?;
            it.try_fold(first, |acc, x| Ok::<_, Error>(cartesian_product(&acc, &eval(x, leaves, cap)?)))?
        }
        HierarchySpec::Power { child, exponent } => cartesian_power(&eval(child, leaves, cap)?, *exponent),
    })
}
