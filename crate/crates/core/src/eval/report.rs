use super::ScoreCard;
use crate::plan::Task;

pub const REPORT_HEADER: &str = "hit rate = per-case recall |retrieved ∩ truth| / |truth| with items pooled across a case's contracts, averaged over cases; similarity = F1 against the reference";

const ROWS: [(Task, &str); 7] = [
    (Task::ExploreAll, "Explore all agreements"),
    (Task::FindMasterAgreements, "Find master agreements"),
    (Task::FindMasterDates, "Find master dates"),
    (Task::FindTerminationDates, "Find termination dates"),
    (Task::FindParties, "Find parties"),
    (Task::SummarizeClause, "Summarize clause"),
    (Task::CompareClause, "Compare clause"),
];

fn cell(card: Option<&ScoreCard>, task: Task) -> String {
    card.and_then(|c| c.mean(task)).map_or_else(|| "-".to_string(), |m| format!("{:.1}", m * 100.0))
}

fn metric_name(task: Task) -> &'static str {
    match task {
        Task::SummarizeClause | Task::CompareClause => "Similarity F1",
        _ => "Hit rate",
    }
}

fn cases(cards: &[Option<&ScoreCard>], task: Task) -> usize {
    cards.iter().flatten().filter_map(|c| c.tasks.get(&task)).map(|t| t.cases).max().unwrap_or(0)
}

/// A fixed-width table with one row per task and one column per system.
pub fn render_table(law: Option<&ScoreCard>, baseline: Option<&ScoreCard>) -> String {
    let scorer = law.or(baseline).map_or("token-f1", |c| c.scorer.as_str());
    let mut out = format!("# {REPORT_HEADER} ({scorer})\n");
    out.push_str(&format!("{:<26} {:<14} {:>6} {:>8} {:>9}\n", "Task", "Metric", "Cases", "LAW", "Baseline"));
    for (task, label) in ROWS {
        out.push_str(&format!(
            "{:<26} {:<14} {:>6} {:>8} {:>9}\n",
            label,
            metric_name(task),
            cases(&[law, baseline], task),
            cell(law, task),
            cell(baseline, task)
        ));
    }
    out
}

/// The same table as CSV. Scores are percentages with one decimal.
pub fn render_csv(law: Option<&ScoreCard>, baseline: Option<&ScoreCard>) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(["task", "metric", "cases", "law", "baseline"]).expect("in-memory write");
    for (task, _) in ROWS {
        w.write_record([
            task.as_str(),
            metric_name(task),
            &cases(&[law, baseline], task).to_string(),
            &cell(law, task),
            &cell(baseline, task),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}
