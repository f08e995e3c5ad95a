//! Acceptance criteria. Each check prints one PASS/FAIL line; the process
//! exits nonzero when any check fails.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::time::{Duration as StdDuration, Instant};

use chrono::{Datelike, NaiveDate};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lexflow::agents::{chunk_text, compare_clauses, ClauseInput, MockClient, TokenBudget};
use lexflow::corpus::{generate_corpus_sized, ingest_documents, CorpusStore, SectionSpan, StyleMix};
use lexflow::eval::evaluate_synthetic;
use lexflow::extraction::{CalendarDate, MAX_YEAR, PartyRegistry, PartyRole};
use lexflow::index::{build_index, LexiconLabeler};
use lexflow::multihop::{calendar_add, Duration, DurationUnit};
use lexflow::orchestrator::{
    build_client, compute_features, warm_cache, CacheRow, FeatureCache, KnowledgeBase, QuerySpec, Task,
};
use lexflow::plan::{
    check_tools, compile_template, execute_plan, parse_plan_with, plan_and_repair, Attempt, Entities, MockPlanner, Mutation,
    ParseOptions, PlanOptions, Planner, Tier, ToolRegistry, DEFAULT_CALL_BUDGET,
};
use lexflow::{ClauseLabel, Config};

type Outcome = Result<String, String>;

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// ---------------------------------------------------------------- eval

fn end_to_end_eval() -> Outcome {
    let start = Instant::now();
    let run = evaluate_synthetic(42, 200, &Config::default()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let m = |t| run.law.card.mean(t).unwrap_or(0.0);
    let (explore, masters, mdates, term, parties) = (
        m(Task::ExploreAll),
        m(Task::FindMasterAgreements),
        m(Task::FindMasterDates),
        m(Task::FindTerminationDates),
        m(Task::FindParties),
    );
    let n: usize = run.manifest.families.iter().map(|f| f.contracts.len()).sum();
    let ok = n == 200
        && explore >= 0.95
        && masters == 1.0
        && mdates >= 0.95
        && term >= 0.95
        && parties == 1.0
        && elapsed < StdDuration::from_secs(300);
    check(
        ok,
        format!(
            "{n} contracts, {} cases: explore {explore:.3}, masters {masters:.3}, master dates {mdates:.3}, termination {term:.3}, parties {parties:.3}, {:.1}s",
            run.cases.len(),
            elapsed.as_secs_f64()
        ),
    )
}

fn baseline_gap() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for seed in 1..=5u64 {
        let run = evaluate_synthetic(seed, 200, &Config::default()).map_err(|e| e.to_string())?;
        let law = run.law.card.mean(Task::FindTerminationDates).unwrap_or(0.0);
        let base = run.baseline.card.mean(Task::FindTerminationDates).unwrap_or(0.0);
        ok &= law - base >= 0.50 && base < law;
        parts.push(format!("seed {seed}: {:.1} vs {:.1}", law * 100.0, base * 100.0));
    }
    check(ok, parts.join("; "))
}

// ---------------------------------------------------------------- calendar

/// Walks day by day: `n` days, or `n` month boundaries followed by the
/// walk to the original day, clamped to the month's last day.
fn day_iteration_oracle(start: NaiveDate, d: Duration) -> NaiveDate {
    let succ = |x: NaiveDate| x.succ_opt().unwrap();
    let months = match d.unit {
        DurationUnit::Days => {
            let mut x = start;
            for _ in 0..d.count {
                x = succ(x);
            }
            return x;
        }
        DurationUnit::Months => d.count,
        DurationUnit::Years => d.count * 12,
    };
    if months == 0 {
        return start;
    }
    let mut x = start;
    let mut crossed = 0;
    while crossed < months {
        x = succ(x);
        if x.day() == 1 {
            crossed += 1;
        }
    }
    while x.day() < start.day() && succ(x).day() != 1 {
        x = succ(x);
    }
    x
}

fn calendar_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut mismatches = Vec::new();
    for _ in 0..10_000 {
        let start = NaiveDate::from_ymd_opt(1950, 1, 1).unwrap() + chrono::Days::new(rng.gen_range(0..55_000));
        let d = match rng.gen_range(0..3) {
            0 => Duration::new(rng.gen_range(0..2_000), DurationUnit::Days),
            1 => Duration::new(rng.gen_range(0..150), DurationUnit::Months),
            _ => Duration::new(rng.gen_range(0..12), DurationUnit::Years),
        };
        let ours = CalendarDate::new(start.year(), start.month(), start.day()).and_then(|c| calendar_add(c, d));
        let want = day_iteration_oracle(start, d);
        let expected = (want.year() <= MAX_YEAR).then_some((want.year(), want.month(), want.day()));
        if ours.map(|c| (c.year(), c.month(), c.day())) != expected {
            mismatches.push(format!("{start} + {d}: {ours:?} vs {want}"));
        }
    }
    check(mismatches.is_empty(), format!("10000 pairs (out-of-range results must be rejected), {} mismatches {:?}", mismatches.len(), mismatches.first()))
}

// ---------------------------------------------------------------- bm25

fn terms(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric()).filter(|t| t.chars().count() >= 2).map(str::to_lowercase).collect()
}

fn brute_force(sections: &[SectionSpan], contract: &str, query: &str, k: usize) -> Vec<(usize, f64)> {
    let (k1, b, wt) = (1.2, 0.75, 2.0);
    let bodies: Vec<Vec<String>> = sections.iter().map(|s| terms(&s.body_text)).collect();
    let titles: Vec<Vec<String>> = sections
        .iter()
        .map(|s| {
            let label = if s.title_label == ClauseLabel::Unknown { String::new() } else { s.title_label.to_string() };
            terms(&format!("{label} {}", s.heading_text))
        })
        .collect();
    let n = sections.len() as f64;
    let avgdl = bodies.iter().map(|b| b.len() as f64).sum::<f64>() / n;
    let mut q: Vec<String> = terms(query);
    q.sort();
    q.dedup();
    let mut hits = Vec::new();
    for (i, s) in sections.iter().enumerate().filter(|(_, s)| s.contract_id == contract) {
        let mut score = 0.0;
        let mut shared = false;
        for t in &q {
            let btf = bodies[i].iter().filter(|x| *x == t).count() as f64;
            let ttf = titles[i].iter().filter(|x| *x == t).count() as f64;
            if btf + ttf == 0.0 {
                continue;
            }
            shared = true;
            let df = (0..sections.len()).filter(|&j| bodies[j].contains(t) || titles[j].contains(t)).count() as f64;
            let idf = (1.0 + (n - df + 0.5) / (df + 0.5)).ln();
            let tf = btf + wt * ttf;
            let dl = bodies[i].len() as f64;
            score += idf * tf * (k1 + 1.0) / (tf + k1 * (1.0 - b + b * dl / avgdl));
        }
        if shared {
            hits.push((s.ordinal, score));
        }
    }
    hits.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    hits.truncate(k);
    hits
}

fn bm25_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let vocab: Vec<String> = (0..180).map(|i| format!("w{i}")).chain(ClauseLabel::ALL.iter().flat_map(|l| terms(l.as_str()))).collect();
    let word = |rng: &mut ChaCha8Rng| {
        let r: f64 = rng.gen();
        vocab[((r * r) * vocab.len() as f64) as usize].clone()
    };
    let mut sections = Vec::new();
    for c in 0..5 {
        for ordinal in 0..200 {
            let body: Vec<String> = (0..rng.gen_range(0..120)).map(|_| word(&mut rng)).collect();
            let heading: Vec<String> = (0..rng.gen_range(0..4)).map(|_| word(&mut rng)).collect();
            let label = if rng.gen_bool(0.3) { ClauseLabel::Unknown } else { *ClauseLabel::ALL.choose(&mut rng).unwrap() };
            sections.push(SectionSpan {
                contract_id: format!("c{c}"),
                ordinal,
                heading_text: heading.join(" "),
                title_label: label,
                label_score: 1.0,
                body_text: body.join(". "),
                start_offset: 0,
                end_offset: 0,
            });
        }
    }
    let index = build_index(sections.clone());
    let (mut queries, mut max_diff, mut rank_mismatch) = (0, 0.0f64, 0);
    for _ in 0..200 {
        let contract = format!("c{}", rng.gen_range(0..5));
        let q: Vec<String> = (0..rng.gen_range(1..5)).map(|_| word(&mut rng)).collect();
        let query = q.join(" ");
        let got = index.search(&contract, &query, 20);
        let want = brute_force(&sections, &contract, &query, 20);
        queries += 1;
        if got.len() != want.len() || got.iter().zip(&want).any(|(g, w)| g.section.ordinal != w.0) {
            rank_mismatch += 1;
        }
        for (g, w) in got.iter().zip(&want) {
            max_diff = max_diff.max((g.score - w.1).abs());
        }
    }
    check(
        rank_mismatch == 0 && max_diff <= 1e-9 && index.len() == 1000,
        format!("{} sections, {queries} queries, max |Δscore| {max_diff:.2e}, {rank_mismatch} top-20 mismatches", index.len()),
    )
}

// ---------------------------------------------------------------- plans

fn eval_kb(seed: u64, n: usize) -> (KnowledgeBase, lexflow::corpus::CorpusManifest) {
    let config = Config::default();
    let g = generate_corpus_sized(seed, n, &StyleMix::default());
    let docs = ingest_documents(g.raw_inputs(), &LexiconLabeler::builtin(config.index.label_threshold));
    let client = build_client(&config, &PartyRegistry::from_corpus(&docs)).unwrap();
    (KnowledgeBase::build(docs, config, client).unwrap(), g.manifest)
}

fn queries(m: &lexflow::corpus::CorpusManifest) -> Vec<QuerySpec> {
    let f = &m.families[0];
    let name = |r: PartyRole| f.parties.iter().find(|p| p.role == r).map(|p| p.name.clone());
    let single = Entities { fund: name(PartyRole::Fund), ..Default::default() };
    let pair = Entities { trust: name(PartyRole::Trust), custodian: name(PartyRole::Custodian), ..Default::default() };
    let mut out = Vec::new();
    for t in Task::ALL {
        let q = QuerySpec::new(single.clone(), t);
        out.push(if t.needs_clause() { q.with_clause(ClauseLabel::AuthorizedPersons) } else { q });
    }
    out.push(QuerySpec::new(pair.clone(), Task::FindParties));
    out.push(QuerySpec::new(pair, Task::CompareClause).with_clause(ClauseLabel::Termination));
    out
}

/// The tier and code a source is rejected with, or `None` when it runs.
fn first_failure(source: &str, reg: &ToolRegistry, kb: &KnowledgeBase) -> Option<(Tier, Vec<String>)> {
    let program = match parse_plan_with(source, &ParseOptions::default()) {
        Ok(p) => p,
        Err(d) => return Some((Tier::Syntax, vec![d.code])),
    };
    let r = check_tools(&program, reg, &[]);
    if !r.passed {
        return Some((r.tier, r.diagnostics.into_iter().map(|d| d.code).collect()));
    }
    let e = execute_plan(&program, reg, kb, &[], DEFAULT_CALL_BUDGET);
    (!e.report.passed).then(|| (e.report.tier, e.report.diagnostics.into_iter().map(|d| d.code).collect()))
}

fn drop_guard(source: &str) -> String {
    let mut out = String::new();
    let mut lines = source.lines().peekable();
    let mut dropped = false;
    while let Some(l) = lines.next() {
        if !dropped && l.starts_with("if empty(agreements)") {
            lines.next();
            lines.next();
            dropped = true;
            continue;
        }
        out.push_str(l);
        out.push('\n');
    }
    out
}

/// Mutations that pass static checks and must fail while running.
fn runtime_mutations(q: &QuerySpec) -> Vec<(String, &'static str)> {
    let src = compile_template(q);
    let mut out = Vec::new();
    if q.task != Task::ExploreAll {
        let mut unknown = q.clone();
        unknown.entities = Entities { fund: Some("Zzyzx Phantom Holdings".into()), ..Default::default() };
        out.push((drop_guard(&compile_template(&unknown)), "E_EMPTY_RESULT"));
    }
    if src.contains("kind=\"master\"") {
        out.push((src.replace("kind=\"master\"", "kind=\"quarterly\""), "E_TOOL_FAIL"));
    }
    out
}

struct TypoPlanner {
    first: String,
    inner: MockPlanner,
}

impl Planner for TypoPlanner {
    fn name(&self) -> &str {
        "typo"
    }

    fn plan(&self, query: &QuerySpec, history: &[Attempt], registry: &ToolRegistry) -> Result<String, String> {
        if history.is_empty() {
            Ok(self.first.clone())
        } else {
            self.inner.plan(query, history, registry)
        }
    }
}

fn typo(name: &str, kind: usize, rng: &mut ChaCha8Rng) -> String {
    let mut c: Vec<char> = name.chars().collect();
    let i = rng.gen_range(1..c.len() - 1);
    let letter = || (b'a' + (i as u8 * 7 + kind as u8) % 26) as char;
    match kind {
        0 => {
            c.remove(i);
        }
        1 => {
            let mut r = letter();
            if r == c[i] {
                r = if r == 'z' { 'a' } else { (r as u8 + 1) as char };
            }
            c[i] = r;
        }
        2 => c.insert(i, letter()),
        _ => {
            let j = if c[i] != c[i + 1] { i + 1 } else { i - 1 };
            c.swap(i, j);
        }
    }
    c.into_iter().collect()
}

fn mutation_suite() -> Outcome {
    let (kb, m) = eval_kb(21, 40);
    let reg = ToolRegistry::standard();
    let qs = queries(&m);
    let mut total = 0;
    let mut wrong = Vec::new();
    for q in &qs {
        let src = compile_template(q);
        if let Some(f) = first_failure(&src, &reg, &kb) {
            wrong.push(format!("unmutated {} fails: {f:?}", q.task.as_str()));
        }
        let mut cases: Vec<(String, Tier, &str)> =
            Mutation::ALL.iter().filter_map(|mu| mu.apply(&src).map(|s| (s, mu.tier(), mu.code()))).collect();
        cases.extend(runtime_mutations(q).into_iter().map(|(s, code)| (s, Tier::Runtime, code)));
        for (mutated, tier, code) in cases {
            total += 1;
            match first_failure(&mutated, &reg, &kb) {
                Some((t, codes)) if t == tier && codes.iter().any(|c| c == code) => {}
                other => wrong.push(format!("{} expected {tier:?}/{code}, got {other:?}", q.task.as_str())),
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut repairs, mut repaired) = (0, 0);
    let tools: Vec<String> = reg.tools().iter().map(|t| t.name.clone()).collect();
    for q in &qs {
        let src = compile_template(q);
        for tool in tools.iter().filter(|t| src.contains(&format!("{t}("))) {
            for kind in 0..4 {
                let bad = typo(tool, kind, &mut rng);
                if reg.get(&bad).is_some() {
                    continue;
                }
                repairs += 1;
                let planner = TypoPlanner { first: src.replacen(&format!("{tool}("), &format!("{bad}("), 1), inner: MockPlanner::new() };
                let run = plan_and_repair(q, &planner, &reg, &kb, &PlanOptions::default());
                if run.succeeded() && run.attempts.len() <= 2 {
                    repaired += 1;
                } else {
                    wrong.push(format!("typo {bad} not repaired in 2 attempts"));
                }
            }
        }
    }
    check(
        wrong.is_empty() && total >= 50,
        format!("{}/{total} mutants rejected at their tier; {repaired}/{repairs} typos repaired within 2 attempts {:?}", total - wrong.len().min(total), wrong.first()),
    )
}

// ---------------------------------------------------------------- agents

fn oracle_tokens(text: &str) -> usize {
    let mut n = 0;
    let mut prev_alnum = false;
    for c in text.chars() {
        let a = c.is_alphanumeric();
        if (a && !prev_alnum) || (!a && !c.is_whitespace()) {
            n += 1;
        }
        prev_alnum = a;
    }
    n
}

fn random_corpus(rng: &mut ChaCha8Rng) -> String {
    let words = ["fund", "custodian", "shall", "pay", "$100", "fees", "trust", "notice", "days", "agreement", "(a)", "Section"];
    let mut paras = Vec::new();
    for _ in 0..rng.gen_range(1..40) {
        let mut sentences = Vec::new();
        let giant = rng.gen_bool(0.02);
        for _ in 0..if giant { 1 } else { rng.gen_range(1..20) } {
            let n = if giant { rng.gen_range(8_000..12_000) } else { rng.gen_range(1..60) };
            let s: Vec<&str> = (0..n).map(|_| *words.choose(rng).unwrap()).collect();
            sentences.push(format!("{}.", s.join(" ")));
        }
        paras.push(sentences.join(if rng.gen_bool(0.5) { " " } else { "  " }));
    }
    paras.join(if rng.gen_bool(0.8) { "\n\n" } else { "\n\n\n" })
}

fn chunking() -> Outcome {
    let budget = TokenBudget::default();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut bad, mut chunks_total, mut max_tokens, mut multi) = (0, 0, 0, 0);
    for _ in 0..1000 {
        let text = random_corpus(&mut rng);
        let chunks = chunk_text(&text, &budget);
        chunks_total += chunks.len();
        multi += usize::from(chunks.len() > 1);
        let m = chunks.iter().map(|c| oracle_tokens(c)).max().unwrap_or(0);
        max_tokens = max_tokens.max(m);
        if chunks.concat() != text || m > 8_000 {
            bad += 1;
        }
    }
    check(bad == 0, format!("1000 corpora, {chunks_total} chunks ({multi} corpora split), max {max_tokens} tokens/chunk, {bad} failures"))
}

fn comparison_chain() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let budget = TokenBudget::default();
    let client = MockClient::default();
    let mut failures = Vec::new();
    for n in 1..=10usize {
        for _ in 0..20 {
            let inputs: Vec<ClauseInput> = (0..n)
                .map(|i| ClauseInput {
                    contract_id: format!("k{}", rng.gen_range(0..1000)),
                    effective_date: if rng.gen_bool(0.1) {
                        None
                    } else {
                        CalendarDate::new(rng.gen_range(1995..2024), rng.gen_range(1..13), rng.gen_range(1..29))
                    },
                    text: format!("The fee is ${}. Notice period is {} days. Clause {i}.", rng.gen_range(1..500), rng.gen_range(1..90)),
                })
                .collect();
            let chain = compare_clauses(inputs, &budget, &client).map_err(|e| e.to_string())?;
            let dates: Vec<Option<CalendarDate>> = chain.sections.iter().map(|s| s.effective_date).collect();
            let chronological = dates.windows(2).all(|w| match (w[0], w[1]) {
                (Some(a), Some(b)) => a <= b,
                (None, Some(_)) => false,
                _ => true,
            });
            let linked = chain
                .deltas
                .iter()
                .enumerate()
                .all(|(i, d)| d.left_contract == chain.sections[i].contract_id && d.right_contract == chain.sections[i + 1].contract_id);
            if chain.deltas.len() != n - 1 || chain.sections.len() != n || !chronological || !linked {
                failures.push(n);
            }
        }
    }
    check(failures.is_empty(), format!("sizes 1..10 x 20 chains, failing sizes {failures:?}"))
}

// ---------------------------------------------------------------- cache

fn cache_round_trip() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let store = CorpusStore::open(dir.path()).map_err(|e| e.to_string())?;
    let config = Config::default();
    let g = generate_corpus_sized(13, 60, &StyleMix::default());
    let docs = ingest_documents(g.raw_inputs(), &LexiconLabeler::builtin(config.index.label_threshold));
    for d in &docs {
        store.save_doc(d).map_err(|e| e.to_string())?;
    }
    let cache = warm_cache(&store, &config).map_err(|e| e.to_string())?;
    let first = std::fs::read(store.cache_path()).map_err(|e| e.to_string())?;
    let parsed = FeatureCache::from_csv(&first).map_err(|e| e.to_string())?;
    let round = parsed.to_csv().map_err(|e| e.to_string())?;
    warm_cache(&store, &config).map_err(|e| e.to_string())?;
    let second = std::fs::read(store.cache_path()).map_err(|e| e.to_string())?;

    let tricky = FeatureCache {
        rows: vec![CacheRow {
            contract_id: "x-1".into(),
            accession_no: "0001,\"quoted\"".into(),
            effective_date: "01/02/2020".into(),
            master_date: String::new(),
            dated_date: "line\nbreak".into(),
            termination_date: String::new(),
            evergreen: true,
            is_master: false,
            master_id: " padded ".into(),
            parties: "fund:Alpha Fund;custodian:Bank, N.A.".into(),
        }],
    };
    let tb = tricky.to_csv().map_err(|e| e.to_string())?;
    let tricky_ok = FeatureCache::from_csv(&tb).map(|c| c == tricky).unwrap_or(false);

    let registry = PartyRegistry::from_corpus(&docs);
    let fresh = FeatureCache::from_features(&compute_features(&docs, &registry, config.extraction.party_threshold));
    check(
        round == first && second == first && parsed == cache && fresh == cache && tricky_ok && cache.len() == docs.len(),
        format!("{} rows + header, {} bytes; round-trip exact, re-warm identical, quoting round-trips", cache.len(), first.len()),
    )
}

// ---------------------------------------------------------------- labels

fn label_accuracy() -> Outcome {
    let mut per_seed = Vec::new();
    let mut confusion: HashMap<(ClauseLabel, ClauseLabel), usize> = HashMap::new();
    for seed in 1..=10u64 {
        let g = generate_corpus_sized(seed, 200, &StyleMix::default());
        let docs = ingest_documents(g.raw_inputs(), &LexiconLabeler::builtin(Config::default().index.label_threshold));
        let (mut ok, mut total) = (0usize, 0usize);
        for d in &docs {
            let truth = &g.manifest.contract(&d.contract_id).expect("manifest entry").sections;
            total += truth.len();
            for (i, t) in truth.iter().enumerate() {
                match d.sections.get(i) {
                    Some(s) if s.title_label == t.label => ok += 1,
                    Some(s) => *confusion.entry((t.label, s.title_label)).or_default() += 1,
                    None => {}
                }
            }
        }
        per_seed.push(ok as f64 / total as f64);
    }
    let min = per_seed.iter().copied().fold(1.0, f64::min);
    let worst = confusion.iter().max_by_key(|(_, n)| **n).map(|((a, b), n)| format!("{a} -> {b} x{n}"));
    check(min >= 0.90, format!("min accuracy {min:.4} over seeds 1..10; commonest confusion {}", worst.unwrap_or_default()))
}

fn main() {
    let checks: Vec<(&str, fn() -> Outcome)> = vec![
        ("end-to-end eval (seed 42, 200 contracts)", end_to_end_eval),
        ("baseline gap on termination dates (seeds 1..5)", baseline_gap),
        ("calendar oracle (10,000 pairs)", calendar_oracle),
        ("BM25 oracle (1,000 sections)", bm25_oracle),
        ("validator mutation suite and typo repair", mutation_suite),
        ("chunking (1,000 corpora)", chunking),
        ("comparison chain (sizes 1..10)", comparison_chain),
        ("cache round-trip and re-warm", cache_round_trip),
        ("section labelling accuracy (seeds 1..10)", label_accuracy),
    ];
    let mut failed = 0;
    let mut summary: BTreeMap<&str, bool> = BTreeMap::new();
    for (name, f) in checks {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panicked".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match &outcome {
            Ok(d) => println!("PASS  {name}: {d} [{secs:.1}s]"),
            Err(d) => {
                failed += 1;
                println!("FAIL  {name}: {d} [{secs:.1}s]");
            }
        }
        summary.insert(name, outcome.is_ok());
    }
    let passed: BTreeSet<_> = summary.iter().filter(|(_, ok)| **ok).map(|(n, _)| *n).collect();
    println!("acceptance: {}/{} criteria passed", passed.len(), summary.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
