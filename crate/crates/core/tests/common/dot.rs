//! Recursive-descent checker for the DOT language grammar.

use std::collections::BTreeSet;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Id(String),
    Sym(char),
    EdgeOp(&'static str),
}

fn lex(src: &str) -> Result<Vec<Tok>, String> {
    let c: Vec<char> = src.chars().collect();
    let mut i = 0;
    let mut out = Vec::new();
    let mut line_start = true;
    while i < c.len() {
        let ch = c[i];
        if ch == '\n' {
            line_start = true;
            i += 1;
            continue;
        }
        if ch.is_whitespace() {
            i += 1;
            continue;
        }
        if line_start && ch == '#' {
            while i < c.len() && c[i] != '\n' {
                i += 1;
            }
            continue;
        }
        line_start = false;
        if ch == '/' && c.get(i + 1) == Some(&'/') {
            while i < c.len() && c[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if ch == '/' && c.get(i + 1) == Some(&'*') {
            i += 2;
            while i + 1 < c.len() && !(c[i] == '*' && c[i + 1] == '/') {
                i += 1;
            }
            if i + 1 >= c.len() {
                return Err("unterminated comment".into());
            }
            i += 2;
            continue;
        }
        if "{}[];,=:".contains(ch) {
            out.push(Tok::Sym(ch));
            i += 1;
            continue;
        }
        if ch == '-' && c.get(i + 1) == Some(&'-') {
            out.push(Tok::EdgeOp("--"));
            i += 2;
            continue;
        }
        if ch == '-' && c.get(i + 1) == Some(&'>') {
            out.push(Tok::EdgeOp("->"));
            i += 2;
            continue;
        }
        if ch == '"' {
            let mut s = String::new();
            i += 1;
            loop {
                match c.get(i) {
                    None => return Err("unterminated string".into()),
                    Some('"') => break,
                    Some('\\') if i + 1 < c.len() => {
                        s.push(c[i + 1]);
                        i += 2;
                    }
                    Some(&x) => {
                        s.push(x);
                        i += 1;
                    }
                }
            }
            i += 1;
            out.push(Tok::Id(s));
            continue;
        }
        if ch == '<' {
            let mut depth = 0;
            let start = i;
            while i < c.len() {
                match c[i] {
                    '<' => depth += 1,
                    '>' => {
                        depth -= 1;
                        if depth == 0 {
                            break;
                        }
                    }
                    _ => {}
                }
                i += 1;
            }
            if i >= c.len() {
                return Err("unterminated HTML string".into());
            }
            i += 1;
            out.push(Tok::Id(c[start..i].iter().collect()));
            continue;
        }
        if ch.is_ascii_digit() || ch == '.' || ch == '-' {
            let start = i;
            if ch == '-' {
                i += 1;
            }
            let mut digits = 0;
            let mut dots = 0;
            while i < c.len() && (c[i].is_ascii_digit() || c[i] == '.') {
                if c[i] == '.' {
                    dots += 1;
                } else {
                    digits += 1;
                }
                i += 1;
            }
            if digits == 0 || dots > 1 {
                return Err(format!("bad numeral at {start}"));
            }
            if i < c.len() && (c[i].is_alphabetic() || c[i] == '_') {
                return Err(format!("identifier starting with a digit at {start}"));
            }
            out.push(Tok::Id(c[start..i].iter().collect()));
            continue;
        }
        if ch.is_alphabetic() || ch == '_' {
            let start = i;
            while i < c.len() && (c[i].is_alphanumeric() || c[i] == '_') {
                i += 1;
            }
            out.push(Tok::Id(c[start..i].iter().collect()));
            continue;
        }
        return Err(format!("unexpected character {ch:?}"));
    }
    Ok(out)
}

#[derive(Debug, Default)]
pub struct DotGraph {
    pub directed: bool,
    pub nodes: BTreeSet<String>,
    pub edges: Vec<(String, String)>,
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
    out: DotGraph,
}

const KEYWORDS: [&str; 6] = ["strict", "graph", "digraph", "node", "edge", "subgraph"];

fn is_kw(t: &Tok, kw: &str) -> bool {
    matches!(t, Tok::Id(s) if s.eq_ignore_ascii_case(kw))
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k)
    }

    fn eat_sym(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, c: char) -> Result<(), String> {
        if self.eat_sym(c) {
            Ok(())
        } else {
            Err(format!("expected {c:?} at token {}, got {:?}", self.pos, self.peek()))
        }
    }

    fn id(&mut self) -> Result<String, String> {
        match self.peek() {
            Some(Tok::Id(s)) if !KEYWORDS.iter().any(|k| s.eq_ignore_ascii_case(k)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            other => Err(format!("expected an ID at token {}, got {other:?}", self.pos)),
        }
    }

    fn graph(&mut self) -> Result<(), String> {
        if self.peek().is_some_and(|t| is_kw(t, "strict")) {
            self.pos += 1;
        }
        match self.peek() {
            Some(t) if is_kw(t, "graph") => self.out.directed = false,
            Some(t) if is_kw(t, "digraph") => self.out.directed = true,
            other => return Err(format!("expected graph or digraph, got {other:?}")),
        }
        self.pos += 1;
        if !matches!(self.peek(), Some(Tok::Sym('{'))) {
            self.id()?;
        }
        self.expect_sym('{')?;
        self.stmt_list()?;
        self.expect_sym('}')?;
        if self.pos != self.toks.len() {
            return Err(format!("trailing tokens from {}", self.pos));
        }
        Ok(())
    }

    fn stmt_list(&mut self) -> Result<(), String> {
        while !matches!(self.peek(), Some(Tok::Sym('}')) | None) {
            self.stmt()?;
            self.eat_sym(';');
        }
        Ok(())
    }

    fn stmt(&mut self) -> Result<(), String> {
        let t = self.peek().cloned().ok_or("unexpected end of input")?;
        if is_kw(&t, "graph") || is_kw(&t, "node") || is_kw(&t, "edge") {
            self.pos += 1;
            if !matches!(self.peek(), Some(Tok::Sym('['))) {
                return Err("attribute statement without attribute list".into());
            }
            return self.attr_list();
        }
        if matches!(t, Tok::Id(_)) && self.peek_at(1) == Some(&Tok::Sym('=')) {
            self.id()?;
            self.pos += 1;
            self.id()?;
            return Ok(());
        }
        let first = self.operand()?;
        if matches!(self.peek(), Some(Tok::EdgeOp(_))) {
            let mut prev = first;
            while let Some(Tok::EdgeOp(op)) = self.peek().cloned() {
                let want = if self.out.directed { "->" } else { "--" };
                if op != want {
                    return Err(format!("edge operator {op} in a {} graph", if self.out.directed { "directed" } else { "undirected" }));
                }
                self.pos += 1;
                let next = self.operand()?;
                for a in &prev {
                    for b in &next {
                        self.out.edges.push((a.clone(), b.clone()));
                    }
                }
                prev = next;
            }
        } else if let [single] = first.as_slice() {
            self.out.nodes.insert(single.clone());
        }
        if matches!(self.peek(), Some(Tok::Sym('['))) {
            self.attr_list()?;
        }
        Ok(())
    }

    /// A node id or a subgraph; returns the node names it stands for.
    fn operand(&mut self) -> Result<Vec<String>, String> {
        let t = self.peek().cloned().ok_or("unexpected end of input")?;
        if is_kw(&t, "subgraph") || t == Tok::Sym('{') {
            if is_kw(&t, "subgraph") {
                self.pos += 1;
                if !matches!(self.peek(), Some(Tok::Sym('{'))) {
                    self.id()?;
                }
            }
            self.expect_sym('{')?;
            let before = self.out.nodes.clone();
            self.stmt_list()?;
            self.expect_sym('}')?;
            return Ok(self.out.nodes.difference(&before).cloned().collect());
        }
        let name = self.id()?;
        if self.eat_sym(':') {
            self.id()?;
            if self.eat_sym(':') {
                self.id()?;
            }
        }
        Ok(vec![name])
    }

    fn attr_list(&mut self) -> Result<(), String> {
        while self.eat_sym('[') {
            while !self.eat_sym(']') {
                self.id()?;
                self.expect_sym('=')?;
                self.id()?;
                if !self.eat_sym(';') {
                    self.eat_sym(',');
                }
            }
        }
        Ok(())
    }
}

/// Parses `src` against the DOT grammar, collecting node statements and edges.
pub fn parse_dot(src: &str) -> Result<DotGraph, String> {
    let mut p = Parser {
        toks: lex(src)?,
        pos: 0,
        out: DotGraph::default(),
    };
    p.graph()?;
    Ok(p.out)
}
