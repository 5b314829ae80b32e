//! Verdict and critical-transition reports: a structured-text record
//! (key=value lines), a machine-readable JSON document with a fixed field
//! set, and human-readable counterexample listings.

use serde::Serialize;

use crate::ctsearch::CtReport;
use crate::explorer::{ExplorationStats, Outcome, Verdict};
use crate::model::{Action, Execution, Program, Transition};

/// The machine-readable stats document. Field names and membership are the
/// stable schema other tooling keys on; everything else (peak tree size,
/// wall time) lives only in the text record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StatsDoc {
    pub traces_explored: u64,
    pub states_visited: u64,
    pub states_before_first_bug: Option<u64>,
    pub ssb_count: u64,
    pub verdict: String,
}

impl StatsDoc {
    pub fn new(stats: &ExplorationStats, outcome: Outcome) -> StatsDoc {
        StatsDoc {
            traces_explored: stats.traces_explored,
            states_visited: stats.states_visited,
            states_before_first_bug: stats.states_before_first_bug,
            ssb_count: stats.ssb_count,
            verdict: outcome.to_string(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain struct serializes")
    }
}

/// The structured-text record: one key=value per line, schema fields first,
/// then the informational extras.
pub fn render_stats_text(stats: &ExplorationStats, outcome: Outcome) -> String {
    let mut out = String::new();
    out.push_str(&format!("traces_explored={}\n", stats.traces_explored));
    out.push_str(&format!("states_visited={}\n", stats.states_visited));
    out.push_str(&format!(
        "states_before_first_bug={}\n",
        stats
            .states_before_first_bug
            .map_or_else(|| "none".to_owned(), |v| v.to_string())
    ));
    out.push_str(&format!("ssb_count={}\n", stats.ssb_count));
    out.push_str(&format!("verdict={outcome}\n"));
    out.push_str(&format!("peak_tree_nodes={}\n", stats.peak_tree_nodes));
    out.push_str(&format!("wall_time_s={:.3}\n", stats.wall_time.as_secs_f64()));
    out
}

/// One transition of a rendered execution.
#[derive(Debug, Clone, Serialize)]
pub struct StepDoc {
    pub index: usize,
    pub actor: String,
    pub action: String,
}

/// Render an action the way the DSL writes it, with `c<stmt>` naming for
/// waited communications.
pub fn render_action(program: &Program, action: &Action) -> String {
    match action {
        Action::AsyncSend { mailbox } => format!("send {}", program.mailboxes[mailbox.0]),
        Action::AsyncRecv { mailbox, source } => match source {
            Some(a) => format!(
                "recv {} from {}",
                program.mailboxes[mailbox.0], program.actors[a.0].name
            ),
            None => format!("recv {}", program.mailboxes[mailbox.0]),
        },
        Action::Wait { comm } => format!("wait c{comm}"),
        Action::WaitAll { comms } => {
            let names: Vec<String> = comms.iter().map(|c| format!("c{c}")).collect();
            format!("waitall {}", names.join(" "))
        }
        Action::MutexAsyncLock { mutex } => format!("async_lock {}", program.mutexes[mutex.0]),
        Action::MutexWait { mutex } => format!("mutex_wait {}", program.mutexes[mutex.0]),
        Action::MutexUnlock { mutex } => format!("unlock {}", program.mutexes[mutex.0]),
        Action::SemAsyncAcquire { sem } => {
            format!("sem_acquire {}", program.semaphores[sem.0].name)
        }
        Action::SemWait { sem } => format!("sem_wait {}", program.semaphores[sem.0].name),
        Action::SemRelease { sem } => format!("release {}", program.semaphores[sem.0].name),
        Action::BarrierAsyncArrive { barrier } => {
            format!("barrier_arrive {}", program.barriers[barrier.0].name)
        }
        Action::BarrierWait { barrier } => {
            format!("barrier_wait {}", program.barriers[barrier.0].name)
        }
        Action::Fail => "fail".to_owned(),
        Action::LocalStep => "local".to_owned(),
    }
}

fn step_doc(program: &Program, t: &Transition) -> StepDoc {
    StepDoc {
        index: t.index,
        actor: program.actors[t.actor.0].name.clone(),
        action: render_action(program, t.action(program)),
    }
}

pub fn execution_docs(program: &Program, execution: &Execution) -> Vec<StepDoc> {
    execution.steps.iter().map(|t| step_doc(program, t)).collect()
}

/// A replayable counterexample listing: one `index actor action` line per
/// transition.
pub fn render_execution_text(program: &Program, execution: &Execution) -> String {
    let mut out = String::new();
    for t in &execution.steps {
        let doc = step_doc(program, t);
        out.push_str(&format!("{:>4}  {}  {}\n", doc.index, doc.actor, doc.action));
    }
    out
}

/// Full verify result document.
#[derive(Debug, Clone, Serialize)]
pub struct VerifyDoc {
    pub stats: StatsDoc,
    pub counterexample: Option<Vec<StepDoc>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ct: Option<CtDoc>,
    pub peak_tree_nodes: u64,
    pub wall_time_s: f64,
}

impl VerifyDoc {
    pub fn new(program: &Program, verdict: &Verdict, ct: Option<&CtReport>) -> VerifyDoc {
        VerifyDoc {
            stats: StatsDoc::new(&verdict.stats, verdict.outcome),
            counterexample: verdict
                .counterexample
                .as_ref()
                .map(|cx| execution_docs(program, cx)),
            ct: ct.map(|r| CtDoc::new(program, r)),
            peak_tree_nodes: verdict.stats.peak_tree_nodes,
            wall_time_s: verdict.stats.wall_time.as_secs_f64(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain struct serializes")
    }
}

/// Machine-readable critical-transition document.
#[derive(Debug, Clone, Serialize)]
pub struct CtDoc {
    pub class: String,
    /// 1-based; 0 encodes the start-transition limit case.
    pub ct_index: usize,
    pub causal_past: Vec<usize>,
    pub faulty: Vec<StepDoc>,
    pub correct_witness: Option<Vec<StepDoc>>,
    pub multi_cause_warning: bool,
    pub inconclusive: bool,
    pub ct_traces_explored: u64,
    pub ct_states_visited: u64,
    pub reexplored_known_classes: u64,
}

impl CtDoc {
    pub fn new(program: &Program, report: &CtReport) -> CtDoc {
        CtDoc {
            class: report.class.to_string(),
            ct_index: report.ct_index,
            causal_past: report.causal_past.clone(),
            faulty: execution_docs(program, &report.faulty),
            correct_witness: report
                .correct_witness
                .as_ref()
                .map(|w| execution_docs(program, w)),
            multi_cause_warning: report.multi_cause_warning,
            inconclusive: report.inconclusive,
            ct_traces_explored: report.counters.traces_explored,
            ct_states_visited: report.counters.states_visited,
            reexplored_known_classes: report.counters.reexplored_known_classes,
        }
    }
}

/// Human-readable critical-transition listing: the faulty run with the
/// critical transition highlighted and its causal past marked.
pub fn render_ct_text(program: &Program, report: &CtReport) -> String {
    let mut out = String::new();
    if report.ct_index == 0 {
        out.push_str(
            "critical transition: start transition (no correct execution exists)\n",
        );
    } else {
        let t = &report.faulty.steps[report.ct_index - 1];
        let doc = step_doc(program, t);
        out.push_str(&format!(
            "critical transition: index {} ({} {})\n",
            report.ct_index, doc.actor, doc.action
        ));
    }
    if report.inconclusive {
        out.push_str("inconclusive: budget exhausted; earlier indices unverified\n");
    }
    if report.multi_cause_warning {
        out.push_str(
            "warning: causal past alone does not reproduce the bug (multiple causes)\n",
        );
    }
    for t in &report.faulty.steps {
        let doc = step_doc(program, t);
        let marker = if t.index == report.ct_index {
            "=>"
        } else if report.causal_past.contains(&t.index) {
            " *"
        } else {
            "  "
        };
        out.push_str(&format!(
            "{marker} {:>3}  {}  {}\n",
            doc.index, doc.actor, doc.action
        ));
    }
    if let Some(witness) = &report.correct_witness {
        out.push_str("correct witness:\n");
        out.push_str(&render_execution_text(program, witness));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::wildcard_pattern;
    use crate::explorer::{ExploreOptions, Explorer, Strategy, StrategyKind};

    #[test]
    fn stats_doc_has_exactly_the_schema_fields() {
        let stats = ExplorationStats::default();
        let doc = StatsDoc::new(&stats, Outcome::AllSafe);
        let value: serde_json::Value = serde_json::from_str(&doc.to_json()).unwrap();
        let obj = value.as_object().unwrap();
        let mut keys: Vec<&str> = obj.keys().map(|s| s.as_str()).collect();
        keys.sort_unstable();
        assert_eq!(
            keys,
            vec![
                "ssb_count",
                "states_before_first_bug",
                "states_visited",
                "traces_explored",
                "verdict"
            ]
        );
    }

    #[test]
    fn text_record_is_key_value_lines() {
        let stats = ExplorationStats::default();
        let text = render_stats_text(&stats, Outcome::AllSafe);
        for line in text.lines() {
            assert!(line.contains('='), "line '{line}' is not key=value");
        }
        assert!(text.contains("verdict=all_safe"));
    }

    #[test]
    fn ct_text_marks_the_critical_transition_and_causal_past() {
        let p = wildcard_pattern();
        let mut opts = ExploreOptions::new(Strategy::new(StrategyKind::Dfs, 0));
        opts.stop_at_first_bug = true;
        let mut ex = Explorer::new(&p, opts);
        let verdict = ex.run().unwrap();
        assert!(verdict.outcome.is_bug());
        let report = crate::ctsearch::find_critical_transition(&mut ex).unwrap();
        let text = render_ct_text(&p, &report);
        assert!(text.starts_with("critical transition: index"));
        // One listing line per transition, the critical one highlighted.
        let highlighted: Vec<&str> = text.lines().filter(|l| l.starts_with("=>")).collect();
        assert_eq!(highlighted.len(), 1);
        assert!(highlighted[0].contains("p2 send inbox") || highlighted[0].contains("p2  send inbox"));
        // Causal-past markers appear iff the report lists causal indices.
        let marked = text.lines().filter(|l| l.starts_with(" *")).count();
        assert_eq!(marked, report.causal_past.len());
        assert!(text.contains("correct witness:"));
        let doc = CtDoc::new(&p, &report);
        assert_eq!(doc.ct_index, report.ct_index);
        assert_eq!(doc.class, "deadlock");
    }

    #[test]
    fn counterexample_lists_actor_and_action_per_line() {
        let p = wildcard_pattern();
        let mut opts = ExploreOptions::new(Strategy::new(StrategyKind::Dfs, 0));
        opts.stop_at_first_bug = true;
        let mut ex = Explorer::new(&p, opts);
        let verdict = ex.run().unwrap();
        let cx = verdict.counterexample.as_ref().unwrap();
        let text = render_execution_text(&p, cx);
        assert_eq!(text.lines().count(), cx.len());
        assert!(text.contains("send inbox"));
        let doc = VerifyDoc::new(&p, &verdict, None);
        assert_eq!(doc.stats.verdict, "deadlock");
        assert!(doc.counterexample.is_some());
    }
}
