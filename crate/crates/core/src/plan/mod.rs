//! The plan language: a small, non-recursive DSL whose programs call
//! registered tools. Plans are validated in three tiers (syntax,
//! hallucination, runtime) and repaired in a feedback loop.
//!
//! The grammar is in `docs/plan_grammar.md`; plan files use the
//! `.lawplan` extension.

mod ast;
mod check;
mod interp;
mod parser;
mod planner;
mod value;

use serde::{Deserialize, Serialize};

pub use ast::{Arg, Cond, Expr, Literal, Locus, PlanProgram, Stmt};
pub use check::{check_tools, ParamSpec, ToolRegistry, ToolSpec};
pub use interp::{execute_plan, sample_indices, Citation, Execution, ToolDetail, ToolHost, ToolOutput, TraceEntry, DEFAULT_CALL_BUDGET};
pub use parser::{parse_plan, parse_plan_with, ParseOptions, DEFAULT_STATEMENT_CAP};
pub use planner::{
    compile_template, plan_and_repair, Attempt, Entities, Fault, LlmPlanner, MockPlanner, Mutation, PlanOptions, PlanRun, Planner, QuerySpec, Task,
    PLAN_PROMPT,
};
pub use value::{SectionRef, Ty, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tier {
    Syntax,
    Hallucination,
    Runtime,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub code: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub locus: Option<Locus>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suggestion: Option<String>,
}

impl Diagnostic {
    pub fn new(code: &str, message: impl Into<String>) -> Self {
        Self { code: code.to_string(), message: message.into(), locus: None, suggestion: None }
    }

    pub fn at(mut self, locus: Locus) -> Self {
        self.locus = Some(locus);
        self
    }
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.locus {
            Some(l) => write!(f, "{} at {l}: {}", self.code, self.message),
            None => write!(f, "{}: {}", self.code, self.message),
        }
    }
}

/// Outcome of one validation tier. `passed` holds exactly when there are no
/// diagnostics.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub tier: Tier,
    pub passed: bool,
    pub diagnostics: Vec<Diagnostic>,
}

impl ValidationReport {
    pub fn new(tier: Tier, diagnostics: Vec<Diagnostic>) -> Self {
        Self { tier, passed: diagnostics.is_empty(), diagnostics }
    }
}
