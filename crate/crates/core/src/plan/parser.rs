use std::collections::HashSet;

use super::ast::{Arg, Cond, Expr, Literal, Locus, PlanProgram, Stmt};
use super::Diagnostic;

pub const DEFAULT_STATEMENT_CAP: usize = 200;

const FORBIDDEN: &[&str] = &["def", "fn", "lambda", "class", "while", "import", "exec", "eval"];

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Str(String),
    Int(i64),
    Float,
    Sym(char),
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    at: Locus,
}

fn parse_err(at: Locus, message: impl Into<String>) -> Diagnostic {
    Diagnostic::new("E_PARSE", message).at(at)
}

fn limit_err(at: Locus, message: impl Into<String>) -> Diagnostic {
    Diagnostic::new("E_LIMIT", message).at(at)
}

fn lex(src: &str) -> Result<Vec<Token>, Diagnostic> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let advance = |i: &mut usize, line: &mut usize, col: &mut usize| {
        let c = chars[*i];
        *i += 1;
        if c == '\n' {
            *line += 1;
            *col = 1;
        } else {
            *col += 1;
        }
    };
    while i < chars.len() {
        let c = chars[i];
        let at = Locus { line, column: col };
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col);
        } else if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                advance(&mut i, &mut line, &mut col);
            }
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                advance(&mut i, &mut line, &mut col);
            }
            out.push(Token { tok: Tok::Ident(chars[start..i].iter().collect()), at });
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                advance(&mut i, &mut line, &mut col);
            }
            if i + 1 < chars.len() && chars[i] == '.' && chars[i + 1].is_ascii_digit() {
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    advance(&mut i, &mut line, &mut col);
                }
                out.push(Token { tok: Tok::Float, at });
                continue;
            }
            let digits: String = chars[start..i].iter().collect();
            let n = digits.parse().map_err(|_| limit_err(at, "integer literal out of range"))?;
            out.push(Token { tok: Tok::Int(n), at });
        } else if c == '"' || c == '\'' {
            let quote = c;
            advance(&mut i, &mut line, &mut col);
            let mut s = String::new();
            loop {
                let Some(&d) = chars.get(i) else {
                    return Err(parse_err(at, "unterminated string literal"));
                };
                advance(&mut i, &mut line, &mut col);
                match d {
                    d if d == quote => break,
                    '\n' => return Err(parse_err(at, "unterminated string literal")),
                    '\\' => {
                        let Some(&e) = chars.get(i) else {
                            return Err(parse_err(at, "unterminated string literal"));
                        };
                        advance(&mut i, &mut line, &mut col);
                        s.push(match e {
                            'n' => '\n',
                            't' => '\t',
                            '\\' | '"' | '\'' => e,
                            _ => return Err(parse_err(Locus { line, column: col - 2 }, format!("unknown escape \\{e}"))),
                        });
                    }
                    d => s.push(d),
                }
            }
            out.push(Token { tok: Tok::Str(s), at });
        } else if "(){}[],=.;".contains(c) {
            advance(&mut i, &mut line, &mut col);
            out.push(Token { tok: Tok::Sym(c), at });
        } else {
            return Err(parse_err(at, format!("unexpected character {c:?}")));
        }
    }
    out.push(Token { tok: Tok::Eof, at: Locus { line, column: col } });
    Ok(out)
}

fn is_keyword(s: &str) -> bool {
    matches!(s, "let" | "if" | "else" | "for" | "in" | "return" | "not" | "empty" | "sample" | "true" | "false")
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    scopes: Vec<HashSet<String>>,
    statements: usize,
    cap: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn describe(t: &Tok) -> String {
        match t {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Str(_) => "string literal".into(),
            Tok::Int(n) => format!("`{n}`"),
            Tok::Float => "number".into(),
            Tok::Sym(c) => format!("`{c}`"),
            Tok::Eof => "end of input".into(),
        }
    }

    fn expect_sym(&mut self, c: char) -> Result<Locus, Diagnostic> {
        let t = self.next();
        if t.tok == Tok::Sym(c) {
            Ok(t.at)
        } else {
            Err(parse_err(t.at, format!("expected `{c}`, found {}", Self::describe(&t.tok))))
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<Locus, Diagnostic> {
        let t = self.next();
        match &t.tok {
            Tok::Ident(s) if s == kw => Ok(t.at),
            other => Err(parse_err(t.at, format!("expected `{kw}`, found {}", Self::describe(other)))),
        }
    }

    fn ident(&mut self) -> Result<(String, Locus), Diagnostic> {
        let t = self.next();
        match t.tok {
            Tok::Ident(s) if !is_keyword(&s) => Ok((s, t.at)),
            other => Err(parse_err(t.at, format!("expected identifier, found {}", Self::describe(&other)))),
        }
    }

    fn defined(&self, name: &str) -> bool {
        self.scopes.iter().any(|s| s.contains(name))
    }

    fn block_until(&mut self, close: bool) -> Result<Vec<Stmt>, Diagnostic> {
        let mut out: Vec<Stmt> = Vec::new();
        loop {
            while self.peek().tok == Tok::Sym(';') {
                self.next();
            }
            let t = self.peek().clone();
            match &t.tok {
                Tok::Eof if !close => return Ok(out),
                Tok::Sym('}') if close => return Ok(out),
                Tok::Eof => return Err(parse_err(t.at, "expected `}`, found end of input")),
                _ => {}
            }
            if matches!(out.last(), Some(Stmt::Return { .. })) && matches!(t.tok, Tok::Ident(_)) {
                return Err(parse_err(t.at, "unreachable statement after return"));
            }
            out.push(self.statement()?);
        }
    }

    fn scoped_block(&mut self, var: Option<String>) -> Result<Vec<Stmt>, Diagnostic> {
        self.expect_sym('{')?;
        self.scopes.push(var.into_iter().collect());
        let block = self.block_until(true);
        self.scopes.pop();
        let block = block?;
        self.expect_sym('}')?;
        Ok(block)
    }

    fn statement(&mut self) -> Result<Stmt, Diagnostic> {
        let t = self.next();
        self.statements += 1;
        if self.statements > self.cap {
            return Err(limit_err(t.at, format!("plan exceeds {} statements", self.cap)));
        }
        let kw = match &t.tok {
            Tok::Ident(s) => s.clone(),
            other => return Err(parse_err(t.at, format!("expected statement, found {}", Self::describe(other)))),
        };
        match kw.as_str() {
            "let" => {
                let (name, _) = self.ident()?;
                self.expect_sym('=')?;
                let expr = self.expr()?;
                self.scopes.last_mut().expect("scope").insert(name.clone());
                Ok(Stmt::Let { name, expr, at: t.at })
            }
            "return" => Ok(Stmt::Return { expr: self.expr()?, at: t.at }),
            "if" => {
                let cond = self.cond()?;
                let then = self.scoped_block(None)?;
                let otherwise = match &self.peek().tok {
                    Tok::Ident(s) if s == "else" => {
                        self.next();
                        Some(self.scoped_block(None)?)
                    }
                    _ => None,
                };
                Ok(Stmt::If { cond, then, otherwise, at: t.at })
            }
            "for" => {
                let (var, _) = self.ident()?;
                self.expect_keyword("in")?;
                let iter = self.expr()?;
                match &iter {
                    Expr::Literal { at, .. } => return Err(limit_err(*at, "loops must iterate over a collection, not a literal")),
                    Expr::Call { tool, at, .. } if tool == "range" => {
                        return Err(limit_err(*at, "numeric ranges are not allowed; loop over a collection"))
                    }
                    _ => {}
                }
                let body = self.scoped_block(Some(var.clone()))?;
                Ok(Stmt::ForEach { var, iter, body, at: t.at })
            }
            s if FORBIDDEN.contains(&s) => Err(limit_err(t.at, format!("`{s}` is not allowed in plans"))),
            _ => Err(parse_err(t.at, format!("expected statement, found `{kw}`"))),
        }
    }

    fn cond(&mut self) -> Result<Cond, Diagnostic> {
        let t = self.next();
        match &t.tok {
            Tok::Ident(s) if s == "not" => Ok(Cond::Not { cond: Box::new(self.cond()?) }),
            Tok::Ident(s) if s == "empty" => {
                self.expect_sym('(')?;
                let expr = self.expr()?;
                self.expect_sym(')')?;
                Ok(Cond::Empty { expr })
            }
            other => Err(parse_err(t.at, format!("expected `empty(...)` or `not`, found {}", Self::describe(other)))),
        }
    }

    fn nonneg(&mut self, what: &str) -> Result<usize, Diagnostic> {
        let t = self.next();
        match t.tok {
            Tok::Int(n) => usize::try_from(n).map_err(|_| parse_err(t.at, format!("{what} out of range"))),
            Tok::Float => Err(limit_err(t.at, "only string, integer and boolean literals are allowed")),
            other => Err(parse_err(t.at, format!("expected integer {what}, found {}", Self::describe(&other)))),
        }
    }

    fn expr(&mut self) -> Result<Expr, Diagnostic> {
        let mut e = self.primary()?;
        while self.peek().tok == Tok::Sym('[') {
            let at = self.next().at;
            let index = self.nonneg("index")?;
            self.expect_sym(']')?;
            e = Expr::Index { base: Box::new(e), index, at };
        }
        Ok(e)
    }

    fn primary(&mut self) -> Result<Expr, Diagnostic> {
        let t = self.next();
        match t.tok {
            Tok::Str(value) => Ok(Expr::Literal { value: Literal::Str { value }, at: t.at }),
            Tok::Int(value) => Ok(Expr::Literal { value: Literal::Int { value }, at: t.at }),
            Tok::Float => Err(limit_err(t.at, "only string, integer and boolean literals are allowed")),
            Tok::Sym('[') => Err(limit_err(t.at, "list literals are not allowed")),
            Tok::Ident(s) if s == "true" || s == "false" => Ok(Expr::Literal { value: Literal::Bool { value: s == "true" }, at: t.at }),
            Tok::Ident(s) if s == "sample" => {
                self.expect_sym('(')?;
                let base = self.expr()?;
                self.expect_sym(',')?;
                let k = self.nonneg("sample size")?;
                self.expect_sym(')')?;
                Ok(Expr::Sample { base: Box::new(base), k, at: t.at })
            }
            Tok::Ident(s) if FORBIDDEN.contains(&s.as_str()) => Err(limit_err(t.at, format!("`{s}` is not allowed in plans"))),
            Tok::Ident(s) if is_keyword(&s) => Err(parse_err(t.at, format!("expected expression, found `{s}`"))),
            Tok::Ident(name) => {
                if self.peek().tok == Tok::Sym('(') {
                    self.next();
                    let args = self.args()?;
                    Ok(Expr::Call { tool: name, args, at: t.at })
                } else if self.defined(&name) {
                    Ok(Expr::Var { name, at: t.at })
                } else {
                    Err(parse_err(t.at, format!("`{name}` is used before it is defined")))
                }
            }
            other => Err(parse_err(t.at, format!("expected expression, found {}", Self::describe(&other)))),
        }
    }

    fn args(&mut self) -> Result<Vec<Arg>, Diagnostic> {
        let mut args: Vec<Arg> = Vec::new();
        if self.peek().tok == Tok::Sym(')') {
            self.next();
            return Ok(args);
        }
        loop {
            let at = self.peek().at;
            let named = matches!(&self.peek().tok, Tok::Ident(s) if !is_keyword(s))
                && self.toks.get(self.pos + 1).is_some_and(|n| n.tok == Tok::Sym('='));
            let name = if named {
                let (n, _) = self.ident()?;
                self.next();
                Some(n)
            } else {
                if args.iter().any(|a| a.name.is_some()) {
                    return Err(parse_err(at, "positional argument after keyword argument"));
                }
                None
            };
            args.push(Arg { name, value: self.expr()?, at });
            let t = self.next();
            match t.tok {
                Tok::Sym(',') => {}
                Tok::Sym(')') => return Ok(args),
                other => return Err(parse_err(t.at, format!("expected `,` or `)`, found {}", Self::describe(&other)))),
            }
        }
    }
}

/// True when every control path through `block` ends in `return`.
fn always_returns(block: &[Stmt]) -> bool {
    match block.last() {
        Some(Stmt::Return { .. }) => true,
        Some(Stmt::If { then, otherwise: Some(o), .. }) => always_returns(then) && always_returns(o),
        _ => false,
    }
}

#[derive(Debug, Clone)]
pub struct ParseOptions {
    pub statement_cap: usize,
    /// Names bound before the plan runs.
    pub predeclared: Vec<String>,
}

impl Default for ParseOptions {
    fn default() -> Self {
        Self { statement_cap: DEFAULT_STATEMENT_CAP, predeclared: Vec::new() }
    }
}

pub fn parse_plan(source: &str) -> Result<PlanProgram, Diagnostic> {
    parse_plan_with(source, &ParseOptions::default())
}

pub fn parse_plan_with(source: &str, opts: &ParseOptions) -> Result<PlanProgram, Diagnostic> {
    let toks = lex(source)?;
    let mut p = Parser { toks, pos: 0, scopes: vec![opts.predeclared.iter().cloned().collect()], statements: 0, cap: opts.statement_cap };
    let body = p.block_until(false)?;
    let end = p.peek().at;
    if !always_returns(&body) {
        return Err(parse_err(end, "plan must end with `return` on every path"));
    }
    Ok(PlanProgram { body })
}
