use std::fmt;

use serde::{Deserialize, Serialize};

use super::ast::{quote, Expr, Literal, PlanProgram};
use super::check::{check_tools, ToolRegistry};
use super::interp::{execute_plan, Execution, ToolHost};
use super::parser::{parse_plan_with, ParseOptions};
use super::value::Ty;
use super::{Diagnostic, Tier, ValidationReport};
use crate::agents::LlmClient;
use crate::error::{Error, Result};
use crate::labels::ClauseLabel;

pub const PLAN_PROMPT: &str = include_str!("../../data/prompts/plan_v1.txt");

/// How many clause sections a comparison samples.
const COMPARE_SAMPLE: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    ExploreAll,
    FindMasterAgreements,
    FindMasterDates,
    FindTerminationDates,
    FindParties,
    FindClause,
    SummarizeClause,
    CompareClause,
}

impl Task {
    pub const ALL: [Task; 8] = [
        Task::ExploreAll,
        Task::FindMasterAgreements,
        Task::FindMasterDates,
        Task::FindTerminationDates,
        Task::FindParties,
        Task::FindClause,
        Task::SummarizeClause,
        Task::CompareClause,
    ];

    pub const RETRIEVAL: [Task; 5] =
        [Task::ExploreAll, Task::FindMasterAgreements, Task::FindMasterDates, Task::FindTerminationDates, Task::FindParties];

    pub fn as_str(self) -> &'static str {
        match self {
            Task::ExploreAll => "explore_all",
            Task::FindMasterAgreements => "find_master_agreements",
            Task::FindMasterDates => "find_master_dates",
            Task::FindTerminationDates => "find_termination_dates",
            Task::FindParties => "find_parties",
            Task::FindClause => "find_clause",
            Task::SummarizeClause => "summarize_clause",
            Task::CompareClause => "compare_clause",
        }
    }

    pub fn needs_clause(self) -> bool {
        matches!(self, Task::FindClause | Task::SummarizeClause | Task::CompareClause)
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Task {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Task::ALL.into_iter().find(|t| t.as_str() == s).ok_or_else(|| format!("unknown task {s:?}"))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Entities {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fund: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trust: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub custodian: Option<String>,
}

impl Entities {
    /// `(tool keyword, display role, name)` for each populated entity.
    pub fn populated(&self) -> Vec<(&'static str, &'static str, &str)> {
        [("funds", "Fund", &self.fund), ("trusts", "Trust", &self.trust), ("custodians", "Custodian", &self.custodian)]
            .into_iter()
            .filter_map(|(k, r, v)| v.as_deref().map(|v| (k, r, v)))
            .collect()
    }

    pub fn describe(&self) -> String {
        self.populated().iter().map(|(_, r, v)| format!("{r} '{v}'")).collect::<Vec<_>>().join(" and ")
    }
}

/// A templated user query.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuerySpec {
    pub entities: Entities,
    pub task: Task,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clause_label: Option<ClauseLabel>,
    /// Free text appended to the planner prompt.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hint: Option<String>,
}

impl QuerySpec {
    pub fn new(entities: Entities, task: Task) -> Self {
        Self { entities, task, clause_label: None, hint: None }
    }

    pub fn with_clause(mut self, label: ClauseLabel) -> Self {
        self.clause_label = Some(label);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let populated = self.entities.populated();
        if populated.is_empty() {
            return Err(Error::InvalidQuery("at least one of fund, trust or custodian is required".into()));
        }
        if populated.iter().any(|(_, _, v)| v.trim().is_empty()) {
            return Err(Error::InvalidQuery("entity names must be non-empty".into()));
        }
        match (self.task.needs_clause(), self.clause_label) {
            (true, None) => Err(Error::InvalidQuery(format!("task {} requires a clause label", self.task))),
            (true, Some(ClauseLabel::Unknown)) => Err(Error::InvalidQuery("clause label must be one of the twenty labels".into())),
            _ => Ok(()),
        }
    }

    pub fn describe(&self) -> String {
        let mut s = format!("{} for {}", self.task, self.entities.describe());
        if let Some(l) = self.clause_label {
            s.push_str(&format!(", clause \"{l}\""));
        }
        s
    }
}

/// Compiles the plan template for a query.
pub fn compile_template(query: &QuerySpec) -> String {
    let kwargs = query
        .entities
        .populated()
        .iter()
        .map(|(k, _, v)| format!("{k}={}", quote(v)))
        .collect::<Vec<_>>()
        .join(", ");
    let who = query.entities.describe();
    let mut src = String::new();
    if let Some(h) = &query.hint {
        for line in h.lines() {
            src.push_str(&format!("# hint: {line}\n"));
        }
    }
    src.push_str(&format!("let agreements = get_agreements_for({kwargs})\n"));
    src.push_str(&format!("if empty(agreements) {{\n    return {}\n}}\n", quote(&format!("No agreements found for {who}"))));
    let tail = match query.task {
        Task::ExploreAll => "return agreements".to_string(),
        Task::FindMasterAgreements => "return get_master(agg_list=agreements)".to_string(),
        Task::FindMasterDates => "return get_dates(agg_list=agreements, kind=\"master\")".to_string(),
        Task::FindTerminationDates => "return get_lifecycle(agg_list=agreements)".to_string(),
        Task::FindParties => "return get_parties(agg_list=agreements)".to_string(),
        Task::FindClause | Task::SummarizeClause | Task::CompareClause => {
            let label = query.clause_label.unwrap_or(ClauseLabel::Unknown).as_str();
            let last = match query.task {
                Task::FindClause => "return clauses".to_string(),
                Task::SummarizeClause => "return get_summary_v1(sections=clauses)".to_string(),
                _ => format!("return get_comparison_v1(sections=sample(clauses, {COMPARE_SAMPLE}))"),
            };
            format!(
                "let clauses = get_section_v2(agg_list=agreements, section_name={})\nif empty(clauses) {{\n    return {}\n}}\n{last}",
                quote(label),
                quote(&format!("No '{label}' clauses found for {who}"))
            )
        }
    };
    src.push_str(&tail);
    src.push('\n');
    src
}

/// One planning attempt and the reports of the tiers it reached.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Attempt {
    pub source: String,
    pub reports: Vec<ValidationReport>,
}

impl Attempt {
    pub fn passed(&self) -> bool {
        self.reports.len() == 3 && self.reports.iter().all(|r| r.passed)
    }

    pub fn failing(&self) -> Option<&ValidationReport> {
        self.reports.iter().find(|r| !r.passed)
    }
}

pub trait Planner: Send + Sync {
    fn name(&self) -> &str;
    /// Emits plan source; `history` holds the earlier failed attempts.
    fn plan(&self, query: &QuerySpec, history: &[Attempt], registry: &ToolRegistry) -> Result<String, String>;
}

/// Defects a [`MockPlanner`] can inject, one per attempt.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fault {
    ToolTypo,
    KwargRename,
    Garbage,
}

/// Structural mutations used to exercise the validators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mutation {
    ToolName,
    KwargRename,
    Arity,
    TypeSwap,
    StatementCap,
}

impl Mutation {
    pub const ALL: [Mutation; 5] = [Mutation::ToolName, Mutation::KwargRename, Mutation::Arity, Mutation::TypeSwap, Mutation::StatementCap];

    /// The tier expected to reject the mutated plan.
    pub fn tier(self) -> Tier {
        match self {
            Mutation::StatementCap => Tier::Syntax,
            _ => Tier::Hallucination,
        }
    }

    pub fn code(self) -> &'static str {
        match self {
            Mutation::ToolName => "E_UNKNOWN_TOOL",
            Mutation::KwargRename => "E_BAD_KWARG",
            Mutation::Arity => "E_BAD_ARITY",
            Mutation::TypeSwap => "E_TYPE_MISMATCH",
            Mutation::StatementCap => "E_LIMIT",
        }
    }

    /// Applies the mutation to the last tool call of a parseable plan
    /// (the statement-cap mutation pads the plan instead).
    pub fn apply(self, source: &str) -> Option<String> {
        if self == Mutation::StatementCap {
            let pad: String = (0..ParseOptions::default().statement_cap).map(|i| format!("let pad_{i} = {i}\n")).collect();
            return Some(pad + source);
        }
        let mut program = parse_plan_with(source, &ParseOptions::default()).ok()?;
        let mut calls = 0usize;
        program.for_each_call_mut(&mut |_, _, _| calls += 1);
        let target = calls.checked_sub(1)?;
        let mut i = 0;
        program.for_each_call_mut(&mut |tool, args, at| {
            if i == target {
                match self {
                    Mutation::ToolName => *tool = typo(tool),
                    Mutation::KwargRename => {
                        if let Some(a) = args.iter_mut().find(|a| a.name.is_some()) {
                            a.name = a.name.as_ref().map(|n| format!("{n}_v2"));
                        }
                    }
                    Mutation::Arity => {
                        // one positional argument more than the widest tool takes
                        if let Some(first) = args.first().map(|a| a.value.clone()) {
                            *args = (0..4).map(|_| super::ast::Arg { name: None, value: first.clone(), at }).collect();
                        }
                    }
                    Mutation::TypeSwap => {
                        if let Some(a) = args.first_mut() {
                            a.value = Expr::Literal { value: Literal::Int { value: 5 }, at: a.at };
                        }
                    }
                    Mutation::StatementCap => {}
                }
            }
            i += 1;
        });
        Some(program.to_source())
    }
}

/// Drops the middle character of a name.
fn typo(name: &str) -> String {
    let chars: Vec<char> = name.chars().collect();
    let mid = chars.len() / 2;
    chars.iter().enumerate().filter(|(i, _)| *i != mid).map(|(_, c)| c).collect()
}

fn inject(source: &str, fault: Fault) -> String {
    match fault {
        Fault::Garbage => "let = get_agreements_for((\n".to_string(),
        Fault::ToolTypo => Mutation::ToolName.apply(source).unwrap_or_else(|| source.to_string()),
        Fault::KwargRename => Mutation::KwargRename.apply(source).unwrap_or_else(|| source.to_string()),
    }
}

/// Compiles per-task templates and repairs them deterministically from
/// validation feedback: unknown tools and keyword names are replaced by
/// their suggestions, unknown keywords without one are dropped, and
/// anything else is recompiled from the template.
#[derive(Debug, Clone, Default)]
pub struct MockPlanner {
    faults: Vec<Option<Fault>>,
}

impl MockPlanner {
    pub fn new() -> Self {
        Self::default()
    }

    /// `faults[i]` is injected into attempt `i`.
    pub fn with_faults(faults: Vec<Option<Fault>>) -> Self {
        Self { faults }
    }

    fn repair(previous: &Attempt) -> Option<String> {
        let report = previous.failing()?;
        let mut program = parse_plan_with(&previous.source, &ParseOptions::default()).ok()?;
        let mut fixed = 0;
        for d in &report.diagnostics {
            let Some(locus) = d.locus else { continue };
            match d.code.as_str() {
                "E_UNKNOWN_TOOL" => {
                    let Some(s) = &d.suggestion else { continue };
                    program.for_each_call_mut(&mut |tool, _, at| {
                        if at == locus {
                            *tool = s.clone();
                            fixed += 1;
                        }
                    });
                }
                "E_BAD_KWARG" => program.for_each_call_mut(&mut |_, args, _| {
                    if let Some(pos) = args.iter().position(|a| a.at == locus && a.name.is_some()) {
                        match &d.suggestion {
                            Some(s) => args[pos].name = Some(s.clone()),
                            None => {
                                args.remove(pos);
                            }
                        }
                        fixed += 1;
                    }
                }),
                _ => {}
            }
        }
        (fixed > 0).then(|| program.to_source())
    }
}

impl Planner for MockPlanner {
    fn name(&self) -> &str {
        "mock-template"
    }

    fn plan(&self, query: &QuerySpec, history: &[Attempt], _registry: &ToolRegistry) -> Result<String, String> {
        let attempt = history.len();
        let source = history.last().and_then(Self::repair).unwrap_or_else(|| compile_template(query));
        Ok(match self.faults.get(attempt).copied().flatten() {
            Some(f) => inject(&source, f),
            None => source,
        })
    }
}

/// Prompts an [`LlmClient`] with the tool catalogue and the feedback of
/// earlier attempts.
pub struct LlmPlanner<C: LlmClient> {
    pub client: C,
}

impl<C: LlmClient> LlmPlanner<C> {
    pub fn new(client: C) -> Self {
        Self { client }
    }

    pub fn prompt(query: &QuerySpec, history: &[Attempt], registry: &ToolRegistry) -> String {
        let tools = registry
            .tools()
            .iter()
            .map(|t| format!("- {}\n  {}\n  e.g. {}", t.signature(), t.description, t.example))
            .collect::<Vec<_>>()
            .join("\n");
        let hint = query.hint.as_deref().map(|h| format!("Preferences: {h}\n")).unwrap_or_default();
        let feedback = history
            .last()
            .and_then(|a| a.failing().map(|r| (a, r)))
            .map(|(a, r)| {
                let diags = r.diagnostics.iter().map(|d| format!("- {d}")).collect::<Vec<_>>().join("\n");
                format!("Your previous plan:\n{}\nwas rejected:\n{diags}\nFix it.\n", a.source)
            })
            .unwrap_or_default();
        PLAN_PROMPT
            .replace("{tools}", &tools)
            .replace("{query}", &query.describe())
            .replace("{hint}", &hint)
            .replace("{feedback}", &feedback)
    }
}

/// Strips a fenced code block if the reply has one.
fn strip_fence(reply: &str) -> &str {
    let Some(open) = reply.find("```") else { return reply.trim() };
    let body = &reply[open + 3..];
    let body = body.find('\n').map_or(body, |nl| &body[nl + 1..]);
    body.find("```").map_or(body, |close| &body[..close]).trim()
}

impl<C: LlmClient> Planner for LlmPlanner<C> {
    fn name(&self) -> &str {
        self.client.name()
    }

    fn plan(&self, query: &QuerySpec, history: &[Attempt], registry: &ToolRegistry) -> Result<String, String> {
        let reply = self.client.generate(&Self::prompt(query, history, registry), 2_048)?;
        Ok(strip_fence(&reply).to_string())
    }
}

#[derive(Debug, Clone)]
pub struct PlanOptions {
    pub max_attempts: usize,
    pub call_budget: usize,
    pub statement_cap: usize,
}

impl Default for PlanOptions {
    fn default() -> Self {
        Self { max_attempts: 3, call_budget: super::DEFAULT_CALL_BUDGET, statement_cap: super::DEFAULT_STATEMENT_CAP }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanRun {
    pub attempts: Vec<Attempt>,
    /// The execution of the last attempt that reached the runtime tier.
    pub execution: Option<Execution>,
}

impl PlanRun {
    pub fn succeeded(&self) -> bool {
        self.attempts.last().is_some_and(Attempt::passed)
    }

    pub fn source(&self) -> Option<&str> {
        self.attempts.last().map(|a| a.source.as_str())
    }

    pub fn into_result(self) -> Result<(String, Execution)> {
        if !self.succeeded() {
            return Err(Error::Exhausted { attempts: self.attempts.len() });
        }
        let source = self.attempts.last().map(|a| a.source.clone()).unwrap_or_default();
        Ok((source, self.execution.expect("successful run has an execution")))
    }
}

/// Validates one source through the three tiers.
fn run_attempt(source: String, registry: &ToolRegistry, host: &dyn ToolHost, opts: &PlanOptions) -> (Attempt, Option<Execution>) {
    let parse_opts = ParseOptions { statement_cap: opts.statement_cap, predeclared: Vec::new() };
    let program: PlanProgram = match parse_plan_with(&source, &parse_opts) {
        Ok(p) => p,
        Err(d) => return (Attempt { source, reports: vec![ValidationReport::new(Tier::Syntax, vec![d])] }, None),
    };
    let mut reports = vec![ValidationReport::new(Tier::Syntax, vec![])];
    let bindings: [(String, Ty); 0] = [];
    let check = check_tools(&program, registry, &bindings);
    let checked = check.passed;
    reports.push(check);
    if !checked {
        return (Attempt { source, reports }, None);
    }
    let exec = execute_plan(&program, registry, host, &[], opts.call_budget);
    reports.push(exec.report.clone());
    (Attempt { source, reports }, Some(exec))
}

/// Plans, validates and executes, feeding each failing report back to the
/// planner, for at most `max_attempts` attempts.
pub fn plan_and_repair(query: &QuerySpec, planner: &dyn Planner, registry: &ToolRegistry, host: &dyn ToolHost, opts: &PlanOptions) -> PlanRun {
    let mut run = PlanRun { attempts: Vec::new(), execution: None };
    for _ in 0..opts.max_attempts.max(1) {
        let (attempt, exec) = match planner.plan(query, &run.attempts, registry) {
            Ok(source) => run_attempt(source, registry, host, opts),
            Err(message) => (
                Attempt {
                    source: String::new(),
                    reports: vec![ValidationReport::new(Tier::Syntax, vec![Diagnostic::new("E_PARSE", format!("planner failed: {message}"))])],
                },
                None,
            ),
        };
        if exec.is_some() {
            run.execution = exec;
        }
        let done = attempt.passed();
        log::debug!("plan attempt {} for {}: {}", run.attempts.len() + 1, query.task, if done { "passed" } else { "failed" });
        run.attempts.push(attempt);
        if done {
            break;
        }
    }
    run
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plan::interp::tests::FakeHost;
    use crate::plan::parse_plan;

    fn query(fund: &str, task: Task) -> QuerySpec {
        QuerySpec::new(Entities { fund: Some(fund.into()), ..Default::default() }, task)
    }

    fn all_queries() -> Vec<QuerySpec> {
        Task::ALL
            .into_iter()
            .map(|t| {
                let q = query("Alpha Fund", t);
                if t.needs_clause() { q.with_clause(ClauseLabel::AuthorizedPersons) } else { q }
            })
            .collect()
    }

    #[test]
    fn templates_pass_static_tiers() {
        let reg = ToolRegistry::standard();
        for q in all_queries() {
            let src = compile_template(&q);
            let p = parse_plan(&src).unwrap_or_else(|e| panic!("{src}\n{e}"));
            assert!(check_tools(&p, &reg, &[]).passed, "{src}");
        }
    }

    #[test]
    fn success_on_first_attempt() {
        let run = plan_and_repair(&query("Alpha Fund", Task::FindMasterAgreements), &MockPlanner::new(), &ToolRegistry::standard(), &FakeHost, &PlanOptions::default());
        assert!(run.succeeded());
        assert_eq!(run.attempts.len(), 1);
    }

    #[test]
    fn typo_repaired_on_second_attempt() {
        for fault in [Fault::ToolTypo, Fault::KwargRename] {
            let planner = MockPlanner::with_faults(vec![Some(fault)]);
            let run = plan_and_repair(&query("Alpha Fund", Task::FindMasterAgreements), &planner, &ToolRegistry::standard(), &FakeHost, &PlanOptions::default());
            assert!(run.succeeded(), "{fault:?}: {:?}", run.attempts);
            assert_eq!(run.attempts.len(), 2);
            assert_eq!(run.attempts[0].failing().unwrap().tier, Tier::Hallucination);
        }
    }

    #[test]
    fn garbage_thrice_exhausts() {
        let planner = MockPlanner::with_faults(vec![Some(Fault::Garbage); 3]);
        let run = plan_and_repair(&query("Alpha Fund", Task::ExploreAll), &planner, &ToolRegistry::standard(), &FakeHost, &PlanOptions::default());
        assert!(!run.succeeded());
        assert_eq!(run.attempts.len(), 3);
        assert!(run.attempts.iter().all(|a| a.reports.len() == 1 && a.reports[0].tier == Tier::Syntax));
        assert_eq!(run.into_result().unwrap_err().code(), "E_EXHAUSTED");
    }

    #[test]
    fn mutations_rejected_at_their_tier() {
        let reg = ToolRegistry::standard();
        for q in all_queries() {
            let src = compile_template(&q);
            for m in Mutation::ALL {
                let mutated = m.apply(&src).unwrap();
                let (attempt, _) = run_attempt(mutated.clone(), &reg, &FakeHost, &PlanOptions::default());
                let r = attempt.failing().unwrap_or_else(|| panic!("{m:?} accepted:\n{mutated}"));
                assert_eq!(r.tier, m.tier(), "{m:?}\n{mutated}");
                assert!(r.diagnostics.iter().any(|d| d.code == m.code()), "{m:?}: {:?}", r.diagnostics);
            }
        }
    }

    #[test]
    fn query_validation() {
        assert_eq!(QuerySpec::new(Entities::default(), Task::ExploreAll).validate().unwrap_err().code(), "E_INVALID_QUERY");
        assert!(query("X", Task::CompareClause).validate().is_err());
        assert!(query("X", Task::CompareClause).with_clause(ClauseLabel::Termination).validate().is_ok());
        assert!(query(" ", Task::ExploreAll).validate().is_err());
    }

    #[test]
    fn llm_prompt_carries_feedback() {
        let prior = Attempt {
            source: "return get_agrements_for(funds=\"X\")".into(),
            reports: vec![ValidationReport::new(Tier::Syntax, vec![]), ValidationReport::new(Tier::Hallucination, vec![Diagnostic::new("E_UNKNOWN_TOOL", "unknown tool")])],
        };
        let p = LlmPlanner::<crate::agents::MockClient>::prompt(&query("X", Task::ExploreAll), &[prior], &ToolRegistry::standard());
        assert!(p.starts_with("[task:plan v1]"));
        assert!(p.contains("get_section_v2(agg_list: List<Contract>, section_name: Str) -> List<Section>"));
        assert!(p.contains("E_UNKNOWN_TOOL"));
        assert_eq!(strip_fence("Here:\n```lawplan\nreturn 1\n```\n"), "return 1");
    }
}
