use std::fmt::{self, Write};

use serde::{Deserialize, Serialize};

/// 1-based source position.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Locus {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Locus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Literal {
    Str { value: String },
    Int { value: i64 },
    Bool { value: bool },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Arg {
    /// `None` for positional arguments.
    pub name: Option<String>,
    pub value: Expr,
    pub at: Locus,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Expr {
    Call { tool: String, args: Vec<Arg>, at: Locus },
    Var { name: String, at: Locus },
    Literal { value: Literal, at: Locus },
    Index { base: Box<Expr>, index: usize, at: Locus },
    Sample { base: Box<Expr>, k: usize, at: Locus },
}

impl Expr {
    pub fn at(&self) -> Locus {
        match self {
            Expr::Call { at, .. } | Expr::Var { at, .. } | Expr::Literal { at, .. } | Expr::Index { at, .. } | Expr::Sample { at, .. } => *at,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Cond {
    Empty { expr: Expr },
    Not { cond: Box<Cond> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Stmt {
    Let { name: String, expr: Expr, at: Locus },
    If { cond: Cond, then: Vec<Stmt>, otherwise: Option<Vec<Stmt>>, at: Locus },
    ForEach { var: String, iter: Expr, body: Vec<Stmt>, at: Locus },
    Return { expr: Expr, at: Locus },
}

impl Stmt {
    pub fn at(&self) -> Locus {
        match self {
            Stmt::Let { at, .. } | Stmt::If { at, .. } | Stmt::ForEach { at, .. } | Stmt::Return { at, .. } => *at,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanProgram {
    pub body: Vec<Stmt>,
}

impl PlanProgram {
    /// Total statements including nested ones.
    pub fn statement_count(&self) -> usize {
        fn count(block: &[Stmt]) -> usize {
            block
                .iter()
                .map(|s| {
                    1 + match s {
                        Stmt::If { then, otherwise, .. } => count(then) + otherwise.as_deref().map_or(0, count),
                        Stmt::ForEach { body, .. } => count(body),
                        _ => 0,
                    }
                })
                .sum()
        }
        count(&self.body)
    }

    /// Visits every call expression, mutably, in source order.
    pub fn for_each_call_mut(&mut self, f: &mut dyn FnMut(&mut String, &mut Vec<Arg>, Locus)) {
        fn expr(e: &mut Expr, f: &mut dyn FnMut(&mut String, &mut Vec<Arg>, Locus)) {
            match e {
                Expr::Call { tool, args, at } => {
                    f(tool, args, *at);
                    for a in args {
                        expr(&mut a.value, f);
                    }
                }
                Expr::Index { base, .. } | Expr::Sample { base, .. } => expr(base, f),
                Expr::Var { .. } | Expr::Literal { .. } => {}
            }
        }
        fn cond(c: &mut Cond, f: &mut dyn FnMut(&mut String, &mut Vec<Arg>, Locus)) {
            match c {
                Cond::Empty { expr: e } => expr(e, f),
                Cond::Not { cond: c } => cond(c, f),
            }
        }
        fn block(b: &mut [Stmt], f: &mut dyn FnMut(&mut String, &mut Vec<Arg>, Locus)) {
            for s in b {
                match s {
                    Stmt::Let { expr: e, .. } | Stmt::Return { expr: e, .. } => expr(e, f),
                    Stmt::If { cond: c, then, otherwise, .. } => {
                        cond(c, f);
                        block(then, f);
                        if let Some(o) = otherwise {
                            block(o, f);
                        }
                    }
                    Stmt::ForEach { iter, body, .. } => {
                        expr(iter, f);
                        block(body, f);
                    }
                }
            }
        }
        block(&mut self.body, f);
    }

    /// Canonical source text. Parsing the output yields the same program
    /// up to source positions.
    pub fn to_source(&self) -> String {
        let mut out = String::new();
        print_block(&mut out, &self.body, 0);
        out
    }
}

pub(crate) fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn print_expr(out: &mut String, e: &Expr) {
    match e {
        Expr::Call { tool, args, .. } => {
            out.push_str(tool);
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                if let Some(n) = &a.name {
                    out.push_str(n);
                    out.push('=');
                }
                print_expr(out, &a.value);
            }
            out.push(')');
        }
        Expr::Var { name, .. } => out.push_str(name),
        Expr::Literal { value, .. } => match value {
            Literal::Str { value } => out.push_str(&quote(value)),
            Literal::Int { value } => {
                let _ = write!(out, "{value}");
            }
            Literal::Bool { value } => {
                let _ = write!(out, "{value}");
            }
        },
        Expr::Index { base, index, .. } => {
            print_expr(out, base);
            let _ = write!(out, "[{index}]");
        }
        Expr::Sample { base, k, .. } => {
            out.push_str("sample(");
            print_expr(out, base);
            let _ = write!(out, ", {k})");
        }
    }
}

fn print_cond(out: &mut String, c: &Cond) {
    match c {
        Cond::Empty { expr } => {
            out.push_str("empty(");
            print_expr(out, expr);
            out.push(')');
        }
        Cond::Not { cond } => {
            out.push_str("not ");
            print_cond(out, cond);
        }
    }
}

fn print_block(out: &mut String, block: &[Stmt], depth: usize) {
    let pad = "    ".repeat(depth);
    for s in block {
        out.push_str(&pad);
        match s {
            Stmt::Let { name, expr, .. } => {
                let _ = write!(out, "let {name} = ");
                print_expr(out, expr);
                out.push('\n');
            }
            Stmt::Return { expr, .. } => {
                out.push_str("return ");
                print_expr(out, expr);
                out.push('\n');
            }
            Stmt::If { cond, then, otherwise, .. } => {
                out.push_str("if ");
                print_cond(out, cond);
                out.push_str(" {\n");
                print_block(out, then, depth + 1);
                out.push_str(&pad);
                out.push('}');
                if let Some(o) = otherwise {
                    out.push_str(" else {\n");
                    print_block(out, o, depth + 1);
                    out.push_str(&pad);
                    out.push('}');
                }
                out.push('\n');
            }
            Stmt::ForEach { var, iter, body, .. } => {
                let _ = write!(out, "for {var} in ");
                print_expr(out, iter);
                out.push_str(" {\n");
                print_block(out, body, depth + 1);
                out.push_str(&pad);
                out.push_str("}\n");
            }
        }
    }
}
