use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::ast::{Cond, Expr, Literal, Locus, PlanProgram, Stmt};
use super::check::ToolRegistry;
use super::value::{Ty, Value};
use super::{Diagnostic, Tier, ValidationReport};

pub const DEFAULT_CALL_BUDGET: usize = 1_000;

/// A section a returned fact was read from.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Citation {
    pub contract_id: String,
    pub ordinal: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolOutput {
    pub value: Value,
    pub citations: Vec<Citation>,
    /// Structured payload behind a rendered value (e.g. a comparison chain).
    pub detail: Option<serde_json::Value>,
}

impl ToolOutput {
    pub fn new(value: Value) -> Self {
        Self { value, citations: Vec::new(), detail: None }
    }
}

/// Implements the registered tools against some corpus.
pub trait ToolHost: Send + Sync {
    fn call(&self, tool: &str, args: &BTreeMap<String, Value>) -> Result<ToolOutput, String>;
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub seq: usize,
    pub tool: String,
    pub args_digest: String,
    pub duration_us: u64,
    /// `ok` or the failure code.
    pub outcome: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolDetail {
    pub tool: String,
    pub payload: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Execution {
    pub value: Option<Value>,
    pub report: ValidationReport,
    pub trace: Vec<TraceEntry>,
    pub citations: Vec<Citation>,
    pub details: Vec<ToolDetail>,
}

impl Execution {
    /// Digest of the trace without timings; stable across runs.
    pub fn trace_digest(&self) -> String {
        let mut h = Sha256::new();
        for e in &self.trace {
            h.update(format!("{}\t{}\t{}\t{}\n", e.seq, e.tool, e.args_digest, e.outcome));
        }
        hex::encode(h.finalize())
    }

    pub fn value_digest(&self) -> String {
        digest(&serde_json::to_value(&self.value).unwrap_or_default())
    }
}

fn digest(v: &serde_json::Value) -> String {
    hex::encode(Sha256::digest(v.to_string().as_bytes()))
}

struct Halt(Diagnostic);

enum Flow {
    Next,
    Return(Value),
}

struct Interp<'a> {
    registry: &'a ToolRegistry,
    host: &'a dyn ToolHost,
    budget: usize,
    scopes: Vec<HashMap<String, Value>>,
    trace: Vec<TraceEntry>,
    citations: BTreeSet<Citation>,
    details: Vec<ToolDetail>,
}

fn fail(code: &str, at: Locus, message: impl Into<String>) -> Halt {
    Halt(Diagnostic::new(code, message).at(at))
}

/// Evenly spaced selection of `k` items, first item always included.
pub fn sample_indices(n: usize, k: usize) -> Vec<usize> {
    if n <= k {
        return (0..n).collect();
    }
    (0..k).map(|i| i * n / k).collect()
}

impl Interp<'_> {
    fn lookup(&self, name: &str, at: Locus) -> Result<Value, Halt> {
        self.scopes
            .iter()
            .rev()
            .find_map(|s| s.get(name))
            .cloned()
            .ok_or_else(|| fail("E_RUNTIME_TYPE", at, format!("`{name}` is not bound")))
    }

    fn expr(&mut self, e: &Expr) -> Result<Value, Halt> {
        match e {
            Expr::Literal { value, .. } => Ok(match value {
                Literal::Str { value } => Value::Str(value.clone()),
                Literal::Int { value } => Value::Int(*value),
                Literal::Bool { value } => Value::Bool(*value),
            }),
            Expr::Var { name, at } => self.lookup(name, *at),
            Expr::Index { base, index, at } => match self.expr(base)? {
                Value::List(items) if items.is_empty() => Err(fail("E_EMPTY_RESULT", *at, format!("index [{index}] into an empty list"))),
                Value::List(mut items) if *index < items.len() => Ok(items.swap_remove(*index)),
                Value::List(items) => Err(fail("E_RUNTIME_TYPE", *at, format!("index [{index}] out of range for {} items", items.len()))),
                Value::Pair(a, _) if *index == 0 => Ok(*a),
                Value::Pair(_, b) if *index == 1 => Ok(*b),
                v => Err(fail("E_RUNTIME_TYPE", *at, format!("cannot index {} with [{index}]", v.kind()))),
            },
            Expr::Sample { base, k, at } => match self.expr(base)? {
                Value::List(items) => Ok(Value::List(sample_indices(items.len(), *k).into_iter().map(|i| items[i].clone()).collect())),
                v => Err(fail("E_RUNTIME_TYPE", *at, format!("sample expects a List, found {}", v.kind()))),
            },
            Expr::Call { tool, args, at } => {
                let spec = self
                    .registry
                    .get(tool)
                    .ok_or_else(|| fail("E_RUNTIME_TYPE", *at, format!("unknown tool `{tool}`")))?;
                let mut bound = BTreeMap::new();
                for (i, a) in args.iter().enumerate() {
                    let name = match &a.name {
                        Some(n) => n.clone(),
                        None => spec
                            .params
                            .get(i)
                            .map(|p| p.name.clone())
                            .ok_or_else(|| fail("E_RUNTIME_TYPE", a.at, "too many arguments"))?,
                    };
                    let v = self.expr(&a.value)?;
                    let Some(param) = spec.param(&name) else {
                        return Err(fail("E_RUNTIME_TYPE", a.at, format!("unknown parameter `{name}`")));
                    };
                    if !v.conforms(&param.ty) {
                        return Err(fail("E_RUNTIME_TYPE", a.at, format!("`{name}` expects {}, got {}", param.ty, v.kind())));
                    }
                    if matches!(param.ty, Ty::List(_)) && param.required && v.is_empty() == Some(true) {
                        return Err(fail("E_EMPTY_RESULT", a.at, format!("`{tool}` received an empty `{name}`; guard it with `if not empty(...)`")));
                    }
                    bound.insert(name, v);
                }
                let returns = spec.returns.clone();
                self.call(tool, &bound, &returns, *at)
            }
        }
    }

    fn call(&mut self, tool: &str, args: &BTreeMap<String, Value>, returns: &Ty, at: Locus) -> Result<Value, Halt> {
        if self.trace.len() >= self.budget {
            return Err(fail("E_BUDGET", at, format!("plan exceeded the budget of {} tool calls", self.budget)));
        }
        let args_digest = digest(&serde_json::to_value(args).unwrap_or_default());
        let started = Instant::now();
        let result = self.host.call(tool, args);
        let duration_us = u64::try_from(started.elapsed().as_micros()).unwrap_or(u64::MAX);
        let seq = self.trace.len();
        let mut entry = TraceEntry { seq, tool: tool.to_string(), args_digest, duration_us, outcome: "ok".into() };
        let out = match result {
            Ok(out) if out.value.conforms(returns) => out,
            Ok(out) => {
                entry.outcome = "E_RUNTIME_TYPE".into();
                self.trace.push(entry);
                return Err(fail("E_RUNTIME_TYPE", at, format!("`{tool}` returned {} where {returns} was declared", out.value.kind())));
            }
            Err(message) => {
                entry.outcome = "E_TOOL_FAIL".into();
                self.trace.push(entry);
                return Err(fail("E_TOOL_FAIL", at, format!("`{tool}` failed: {message}")));
            }
        };
        self.trace.push(entry);
        self.citations.extend(out.citations);
        if let Some(payload) = out.detail {
            self.details.push(ToolDetail { tool: tool.to_string(), payload });
        }
        Ok(out.value)
    }

    fn cond(&mut self, c: &Cond) -> Result<bool, Halt> {
        match c {
            Cond::Not { cond } => Ok(!self.cond(cond)?),
            Cond::Empty { expr } => {
                let v = self.expr(expr)?;
                v.is_empty().ok_or_else(|| fail("E_RUNTIME_TYPE", expr.at(), format!("empty() on {}", v.kind())))
            }
        }
    }

    fn block(&mut self, block: &[Stmt], bind: Option<(String, Value)>) -> Result<Flow, Halt> {
        self.scopes.push(bind.into_iter().collect());
        let flow = self.block_inner(block);
        self.scopes.pop();
        flow
    }

    fn block_inner(&mut self, block: &[Stmt]) -> Result<Flow, Halt> {
        for s in block {
            match s {
                Stmt::Let { name, expr, .. } => {
                    let v = self.expr(expr)?;
                    self.scopes.last_mut().expect("scope").insert(name.clone(), v);
                }
                Stmt::Return { expr, .. } => return Ok(Flow::Return(self.expr(expr)?)),
                Stmt::If { cond, then, otherwise, .. } => {
                    let flow = if self.cond(cond)? {
                        self.block(then, None)?
                    } else if let Some(o) = otherwise {
                        self.block(o, None)?
                    } else {
                        Flow::Next
                    };
                    if let Flow::Return(v) = flow {
                        return Ok(Flow::Return(v));
                    }
                }
                Stmt::ForEach { var, iter, body, .. } => {
                    let items = match self.expr(iter)? {
                        Value::List(items) => items,
                        v => return Err(fail("E_RUNTIME_TYPE", iter.at(), format!("for over {}", v.kind()))),
                    };
                    for item in items {
                        if let Flow::Return(v) = self.block(body, Some((var.clone(), item)))? {
                            return Ok(Flow::Return(v));
                        }
                    }
                }
            }
        }
        Ok(Flow::Next)
    }
}

/// Runtime tier. Runs the statements in order and halts at the first
/// failure; the trace covers every call made, including a failing one.
pub fn execute_plan(
    program: &PlanProgram,
    registry: &ToolRegistry,
    host: &dyn ToolHost,
    bindings: &[(String, Value)],
    call_budget: usize,
) -> Execution {
    let mut it = Interp {
        registry,
        host,
        budget: call_budget,
        scopes: vec![bindings.iter().cloned().collect()],
        trace: Vec::new(),
        citations: BTreeSet::new(),
        details: Vec::new(),
    };
    let (value, diags) = match it.block_inner(&program.body) {
        Ok(Flow::Return(v)) => (Some(v), Vec::new()),
        Ok(Flow::Next) => (None, vec![Diagnostic::new("E_RUNTIME_TYPE", "plan finished without returning a value")]),
        Err(Halt(d)) => (None, vec![d]),
    };
    Execution {
        value,
        report: ValidationReport::new(Tier::Runtime, diags),
        trace: it.trace,
        citations: it.citations.into_iter().collect(),
        details: it.details,
    }
}
