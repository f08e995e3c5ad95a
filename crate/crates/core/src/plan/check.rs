use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::ast::{Arg, Cond, Expr, Literal, PlanProgram, Stmt};
use super::value::Ty;
use super::{Diagnostic, Tier, ValidationReport};
use crate::text::levenshtein_within;

const SUGGEST_DISTANCE: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamSpec {
    pub name: String,
    pub ty: Ty,
    pub required: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToolSpec {
    pub name: String,
    pub params: Vec<ParamSpec>,
    pub returns: Ty,
    pub description: String,
    pub example: String,
}

impl ToolSpec {
    pub fn param(&self, name: &str) -> Option<&ParamSpec> {
        self.params.iter().find(|p| p.name == name)
    }

    /// One-line signature, e.g. `get_master(agg_list: List<Contract>) -> List<Contract>`.
    pub fn signature(&self) -> String {
        let params: Vec<String> = self
            .params
            .iter()
            .map(|p| format!("{}{}: {}", p.name, if p.required { "" } else { "?" }, p.ty))
            .collect();
        format!("{}({}) -> {}", self.name, params.join(", "), self.returns)
    }
}

fn spec(name: &str, params: &[(&str, &str, bool)], returns: &str, description: &str, example: &str) -> ToolSpec {
    ToolSpec {
        name: name.into(),
        params: params
            .iter()
            .map(|(n, t, r)| ParamSpec { name: (*n).into(), ty: t.parse().expect("builtin type"), required: *r })
            .collect(),
        returns: returns.parse().expect("builtin type"),
        description: description.into(),
        example: example.into(),
    }
}

/// The tools a plan may call.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToolRegistry {
    tools: Vec<ToolSpec>,
}

impl ToolRegistry {
    /// Fails on duplicate names.
    pub fn new(tools: Vec<ToolSpec>) -> Result<Self, String> {
        let mut seen = std::collections::HashSet::new();
        for t in &tools {
            if !seen.insert(t.name.as_str()) {
                return Err(format!("duplicate tool {:?}", t.name));
            }
        }
        Ok(Self { tools })
    }

    /// The domain toolset.
    pub fn standard() -> Self {
        let tools = vec![
            spec(
                "get_agreements_for",
                &[("funds", "Str", false), ("trusts", "Str", false), ("custodians", "Str", false)],
                "List<Contract>",
                "Contracts whose parties include every given entity (fuzzy name match), oldest first. At least one entity is required.",
                "let agreements = get_agreements_for(funds=\"Acme Growth Fund\")",
            ),
            spec(
                "get_dates",
                &[("agg_list", "List<Contract>", true), ("kind", "Str", true)],
                "List<Pair<Contract,Date>>",
                "The effective, master or dated date of each contract; contracts without that date are omitted.",
                "let masters = get_dates(agg_list=agreements, kind=\"master\")",
            ),
            spec(
                "get_parties",
                &[("agg_list", "List<Contract>", true)],
                "List<Pair<Contract,Str>>",
                "Every party named in each contract, one pair per party.",
                "let parties = get_parties(agg_list=agreements)",
            ),
            spec(
                "get_lifecycle",
                &[("agg_list", "List<Contract>", true)],
                "List<Pair<Contract,Str>>",
                "Termination date of each contract as DD/MM/YYYY, or \"evergreen\".",
                "let ends = get_lifecycle(agg_list=agreements)",
            ),
            spec(
                "get_master",
                &[("agg_list", "List<Contract>", true)],
                "List<Contract>",
                "The distinct master agreements the given contracts belong to.",
                "let masters = get_master(agg_list=agreements)",
            ),
            spec(
                "get_section_v2",
                &[("agg_list", "List<Contract>", true), ("section_name", "Str", true)],
                "List<Section>",
                "The best-matching non-empty section for the clause in each contract, in contract order.",
                "let clauses = get_section_v2(agg_list=agreements, section_name=\"authorized persons\")",
            ),
            spec(
                "get_summary_v1",
                &[("sections", "List<Section>", true)],
                "Text",
                "Summary of the sections, chunked to fit the model context.",
                "return get_summary_v1(sections=clauses)",
            ),
            spec(
                "get_comparison_v1",
                &[("sections", "List<Section>", true)],
                "Text",
                "Chronological pairwise comparison of the sections.",
                "return get_comparison_v1(sections=sample(clauses, 5))",
            ),
        ];
        Self::new(tools).expect("unique builtin names")
    }

    pub fn get(&self, name: &str) -> Option<&ToolSpec> {
        self.tools.iter().find(|t| t.name == name)
    }

    pub fn tools(&self) -> &[ToolSpec] {
        &self.tools
    }

    /// Nearest tool name within edit distance 3 (ties by name).
    pub fn suggest(&self, name: &str) -> Option<String> {
        nearest(name, self.tools.iter().map(|t| t.name.as_str()))
    }
}

fn nearest<'a>(name: &str, candidates: impl Iterator<Item = &'a str>) -> Option<String> {
    let q: Vec<char> = name.chars().collect();
    candidates
        .filter_map(|c| {
            let cc: Vec<char> = c.chars().collect();
            levenshtein_within(&q, &cc, SUGGEST_DISTANCE).map(|d| (d, c))
        })
        .min()
        .map(|(_, c)| c.to_string())
}

struct Checker<'a> {
    registry: &'a ToolRegistry,
    scopes: Vec<HashMap<String, Option<Ty>>>,
    diags: Vec<Diagnostic>,
}

impl Checker<'_> {
    fn lookup(&self, name: &str) -> Option<Ty> {
        self.scopes.iter().rev().find_map(|s| s.get(name)).cloned().flatten()
    }

    fn mismatch(&mut self, at: super::ast::Locus, message: String) {
        self.diags.push(Diagnostic::new("E_TYPE_MISMATCH", message).at(at));
    }

    /// Type of `e`, or `None` when it cannot be known (an earlier error).
    fn expr(&mut self, e: &Expr) -> Option<Ty> {
        match e {
            Expr::Literal { value, .. } => Some(match value {
                Literal::Str { .. } => Ty::Str,
                Literal::Int { .. } => Ty::Int,
                Literal::Bool { .. } => Ty::Bool,
            }),
            Expr::Var { name, .. } => self.lookup(name),
            Expr::Index { base, index, at } => match self.expr(base)? {
                Ty::List(t) => Some(*t),
                Ty::Pair(a, _) if *index == 0 => Some(*a),
                Ty::Pair(_, b) if *index == 1 => Some(*b),
                t => {
                    self.mismatch(*at, format!("cannot index {t} with [{index}]"));
                    None
                }
            },
            Expr::Sample { base, at, .. } => match self.expr(base)? {
                t @ Ty::List(_) => Some(t),
                t => {
                    self.mismatch(*at, format!("sample expects a List, found {t}"));
                    None
                }
            },
            Expr::Call { tool, args, at } => self.call(tool, args, *at),
        }
    }

    fn call(&mut self, tool: &str, args: &[Arg], at: super::ast::Locus) -> Option<Ty> {
        let arg_types: Vec<Option<Ty>> = args.iter().map(|a| self.expr(&a.value)).collect();
        let Some(spec) = self.registry.get(tool) else {
            let mut d = Diagnostic::new("E_UNKNOWN_TOOL", format!("unknown tool `{tool}`")).at(at);
            if let Some(s) = self.registry.suggest(tool) {
                d.message.push_str(&format!("; did you mean `{s}`?"));
                d.suggestion = Some(s);
            }
            self.diags.push(d);
            return None;
        };
        let mut bound: Vec<Option<usize>> = vec![None; spec.params.len()];
        for (i, arg) in args.iter().enumerate() {
            let slot = match &arg.name {
                None if i < spec.params.len() => i,
                None => {
                    self.diags.push(
                        Diagnostic::new(
                            "E_BAD_ARITY",
                            format!("`{tool}` takes at most {} arguments, got {}", spec.params.len(), args.len()),
                        )
                        .at(arg.at),
                    );
                    continue;
                }
                Some(name) => match spec.params.iter().position(|p| &p.name == name) {
                    Some(p) if bound[p].is_none() => p,
                    Some(_) => {
                        self.diags.push(Diagnostic::new("E_BAD_KWARG", format!("`{name}` given twice to `{tool}`")).at(arg.at));
                        continue;
                    }
                    None => {
                        let mut d = Diagnostic::new("E_BAD_KWARG", format!("`{tool}` has no parameter `{name}`")).at(arg.at);
                        d.suggestion = nearest(name, spec.params.iter().map(|p| p.name.as_str()).filter(|p| {
                            !args.iter().any(|a| a.name.as_deref() == Some(p))
                        }));
                        if let Some(s) = &d.suggestion {
                            d.message.push_str(&format!("; did you mean `{s}`?"));
                        }
                        self.diags.push(d);
                        continue;
                    }
                },
            };
            bound[slot] = Some(i);
            let param = &spec.params[slot];
            if let Some(actual) = &arg_types[i] {
                if actual != &param.ty {
                    self.mismatch(
                        arg.value.at(),
                        format!("`{tool}` parameter `{}` expects {}, found {actual}", param.name, param.ty),
                    );
                }
            }
        }
        for (p, b) in spec.params.iter().zip(&bound) {
            if p.required && b.is_none() {
                self.diags.push(
                    Diagnostic::new("E_BAD_ARITY", format!("`{tool}` is missing required parameter `{}`", p.name)).at(at),
                );
            }
        }
        Some(spec.returns.clone())
    }

    fn cond(&mut self, c: &Cond) {
        match c {
            Cond::Not { cond } => self.cond(cond),
            Cond::Empty { expr } => match self.expr(expr) {
                Some(Ty::List(_) | Ty::Str | Ty::Text) | None => {}
                Some(t) => self.mismatch(expr.at(), format!("empty() expects a List, Str or Text, found {t}")),
            },
        }
    }

    fn block(&mut self, block: &[Stmt], var: Option<(String, Option<Ty>)>) {
        self.scopes.push(var.into_iter().collect());
        for s in block {
            match s {
                Stmt::Let { name, expr, .. } => {
                    let t = self.expr(expr);
                    self.scopes.last_mut().expect("scope").insert(name.clone(), t);
                }
                Stmt::Return { expr, .. } => {
                    self.expr(expr);
                }
                Stmt::If { cond, then, otherwise, .. } => {
                    self.cond(cond);
                    self.block(then, None);
                    if let Some(o) = otherwise {
                        self.block(o, None);
                    }
                }
                Stmt::ForEach { var, iter, body, .. } => {
                    let elem = match self.expr(iter) {
                        Some(Ty::List(t)) => Some(*t),
                        Some(t) => {
                            self.mismatch(iter.at(), format!("for expects a List, found {t}"));
                            None
                        }
                        None => None,
                    };
                    self.block(body, Some((var.clone(), elem)));
                }
            }
        }
        self.scopes.pop();
    }
}

/// Hallucination tier: every call names a registered tool with a valid,
/// type-correct signature. `bindings` gives the types of predeclared names.
pub fn check_tools(program: &PlanProgram, registry: &ToolRegistry, bindings: &[(String, Ty)]) -> ValidationReport {
    let mut c = Checker {
        registry,
        scopes: vec![bindings.iter().map(|(n, t)| (n.clone(), Some(t.clone()))).collect()],
        diags: Vec::new(),
    };
    c.block(&program.body, None);
    ValidationReport::new(Tier::Hallucination, c.diags)
}
