//! Brute-force reference implementations: exhaustive interleaving
//! enumeration, equivalence-class counting, exhaustive state sweeps, and
//! ground-truth critical transitions.
//!
//! Nothing here performs any reduction; the point is to be an independent
//! check on the reduced explorer, so this module leans only on the simulator
//! in [`crate::model`]. Class counting is available through two routes:
//! [`count_classes`] uses the canonical trace key, while
//! [`class_count_pairwise`] partitions executions with a direct pairwise
//! equivalence test that never touches the vector-clock machinery, so the
//! two routes fail independently.

use std::collections::{BTreeSet, HashSet};

use thiserror::Error;

use crate::independence::{dependent, trace_key, TraceKey};
use crate::model::{
    replay, Classification, Execution, Program, SimState, Transition,
};
use crate::model::{classify_execution, ActorId};

/// Enumeration gave up because the interleaving count exceeded the budget.
/// Never silently truncates.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("interleaving budget exceeded: more than {budget} maximal executions")]
pub struct BudgetExceeded {
    pub budget: u64,
}

/// Depth-first enumeration of every maximal execution of the full,
/// unreduced state space.
pub fn enumerate_all(program: &Program, budget: u64) -> Result<Vec<Execution>, BudgetExceeded> {
    let mut out = Vec::new();
    let mut stack = Vec::new();
    let state = SimState::initial(program);
    enumerate_rec(program, state, &mut stack, &mut out, budget)?;
    Ok(out)
}

fn enumerate_rec(
    program: &Program,
    state: SimState,
    stack: &mut Vec<Transition>,
    out: &mut Vec<Execution>,
    budget: u64,
) -> Result<(), BudgetExceeded> {
    let enabled = state.enabled(program);
    if enabled.is_empty() {
        if out.len() as u64 >= budget {
            return Err(BudgetExceeded { budget });
        }
        out.push(Execution {
            steps: stack.clone(),
        });
        return Ok(());
    }
    for actor in enabled {
        let stmt = state.pc(actor);
        let mut next = state.clone();
        next.step(program, actor);
        stack.push(Transition {
            actor,
            stmt,
            label: program.label(actor, stmt),
            index: stack.len() + 1,
        });
        enumerate_rec(program, next, stack, out, budget)?;
        stack.pop();
    }
    Ok(())
}

/// Number of distinct equivalence classes over all maximal executions.
pub fn count_classes(program: &Program, budget: u64) -> Result<u64, BudgetExceeded> {
    let executions = enumerate_all(program, budget)?;
    let keys: HashSet<TraceKey> = executions
        .iter()
        .map(|e| trace_key(program, e))
        .collect();
    Ok(keys.len() as u64)
}

/// Pairwise equivalence of two executions of one program: same event set
/// and the same relative order on every dependent event pair. Events are
/// identified by (actor, statement), which is unique per execution because
/// programs are loop-free.
pub fn equivalent_executions(a: &Execution, b: &Execution) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let events_a: BTreeSet<(ActorId, usize)> = a.steps.iter().map(|t| (t.actor, t.stmt)).collect();
    let events_b: BTreeSet<(ActorId, usize)> = b.steps.iter().map(|t| (t.actor, t.stmt)).collect();
    if events_a != events_b {
        return false;
    }
    let pos_b = |t: &Transition| {
        b.steps
            .iter()
            .position(|u| u.actor == t.actor && u.stmt == t.stmt)
            .expect("same event sets")
    };
    for i in 0..a.len() {
        for j in (i + 1)..a.len() {
            let (ti, tj) = (&a.steps[i], &a.steps[j]);
            if (ti.actor == tj.actor || dependent(&ti.label, &tj.label))
                && pos_b(ti) > pos_b(tj)
            {
                return false;
            }
        }
    }
    true
}

/// Class count via pairwise comparison against class representatives. Slower
/// than [`count_classes`] but independent of the canonicalization code.
pub fn class_count_pairwise(program: &Program, budget: u64) -> Result<u64, BudgetExceeded> {
    let executions = enumerate_all(program, budget)?;
    let mut reps: Vec<&Execution> = Vec::new();
    for e in &executions {
        if !reps.iter().any(|r| equivalent_executions(r, e)) {
            reps.push(e);
        }
    }
    Ok(reps.len() as u64)
}

/// Does some maximal continuation of `prefix` satisfy `want`? Depth-first
/// with early exit.
fn some_continuation(
    program: &Program,
    state: &SimState,
    want: impl Fn(Classification) -> bool + Copy,
) -> bool {
    let enabled = state.enabled(program);
    if enabled.is_empty() {
        return want(state.classify(program));
    }
    enabled.into_iter().any(|actor| {
        let mut next = state.clone();
        next.step(program, actor);
        some_continuation(program, &next, want)
    })
}

/// Ground-truth critical transition of a faulty maximal execution: the
/// largest 1-based index `i` such that every maximal continuation after
/// taking transition `i` is faulty while the prefix before it still has a
/// correct continuation. Returns 0 when no correct execution exists at all.
pub fn oracle_ct(program: &Program, faulty: &Execution) -> usize {
    assert!(
        classify_execution(program, faulty).is_faulty(),
        "oracle_ct needs a faulty execution"
    );
    let actors = faulty.actors();
    for i in (1..=actors.len()).rev() {
        let with_gamma = replay(program, &actors[..i]).expect("prefix must replay");
        let all_faulty = !some_continuation(program, &with_gamma, |c| !c.is_faulty());
        if !all_faulty {
            continue;
        }
        let without = replay(program, &actors[..i - 1]).expect("prefix must replay");
        if some_continuation(program, &without, |c| !c.is_faulty()) {
            return i;
        }
    }
    0
}

/// Every reachable state of the program, found by search over the full
/// transition relation. Used by exhaustive model-validity sweeps.
pub fn reachable_states(program: &Program) -> Vec<SimState> {
    let mut seen = HashSet::new();
    let mut queue = vec![SimState::initial(program)];
    let mut out = Vec::new();
    seen.insert(queue[0].clone());
    while let Some(state) = queue.pop() {
        for actor in state.enabled(program) {
            let mut next = state.clone();
            next.step(program, actor);
            if seen.insert(next.clone()) {
                queue.push(next);
            }
        }
        out.push(state);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::wildcard_pattern;
    use crate::model::{Action, ActorDecl, MailboxId};

    fn locals(n: usize) -> Program {
        Program {
            mailboxes: vec![],
            mutexes: vec![],
            semaphores: vec![],
            barriers: vec![],
            actors: (0..n)
                .map(|i| ActorDecl {
                    name: format!("a{i}"),
                    body: vec![Action::LocalStep],
                })
                .collect(),
        }
    }

    fn senders(n: usize) -> Program {
        Program {
            mailboxes: vec!["m".into()],
            mutexes: vec![],
            semaphores: vec![],
            barriers: vec![],
            actors: (0..n)
                .map(|i| ActorDecl {
                    name: format!("a{i}"),
                    body: vec![Action::AsyncSend {
                        mailbox: MailboxId(0),
                    }],
                })
                .collect(),
        }
    }

    #[test]
    fn two_local_actors_two_executions_one_class() {
        let p = locals(2);
        let all = enumerate_all(&p, 100).unwrap();
        assert_eq!(all.len(), 2);
        assert_eq!(count_classes(&p, 100).unwrap(), 1);
        assert_eq!(class_count_pairwise(&p, 100).unwrap(), 1);
    }

    #[test]
    fn three_senders_six_executions_six_classes() {
        let p = senders(3);
        assert_eq!(enumerate_all(&p, 100).unwrap().len(), 6);
        assert_eq!(count_classes(&p, 100).unwrap(), 6);
        assert_eq!(class_count_pairwise(&p, 100).unwrap(), 6);
    }

    #[test]
    fn wildcard_pattern_contains_a_deadlock() {
        let p = wildcard_pattern();
        let all = enumerate_all(&p, 10_000).unwrap();
        assert!(all
            .iter()
            .any(|e| classify_execution(&p, e) == Classification::Deadlock));
        // Both routes agree on the class partition.
        assert_eq!(
            count_classes(&p, 10_000).unwrap(),
            class_count_pairwise(&p, 10_000).unwrap()
        );
    }

    #[test]
    fn budget_exceeded_is_loud() {
        let p = senders(4);
        assert_eq!(
            enumerate_all(&p, 5).unwrap_err(),
            BudgetExceeded { budget: 5 }
        );
    }

    #[test]
    fn classes_respect_verdicts() {
        // Executions sharing a key always share a classification.
        let p = wildcard_pattern();
        let all = enumerate_all(&p, 10_000).unwrap();
        let mut by_key: std::collections::HashMap<TraceKey, Classification> =
            std::collections::HashMap::new();
        for e in &all {
            let key = trace_key(&p, e);
            let class = classify_execution(&p, e);
            if let Some(prev) = by_key.insert(key, class) {
                assert_eq!(prev, class);
            }
        }
    }

    #[test]
    fn oracle_ct_on_wildcard_deadlock_is_p2_send() {
        let p = wildcard_pattern();
        let all = enumerate_all(&p, 10_000).unwrap();
        for e in all {
            if classify_execution(&p, &e) == Classification::Deadlock {
                let ct = oracle_ct(&p, &e);
                assert!(ct >= 1);
                let t = &e.steps[ct - 1];
                assert_eq!((t.actor, t.stmt), (ActorId(1), 0), "CT must be p2's send");
            }
        }
    }

    #[test]
    fn oracle_ct_all_faulty_program_is_start() {
        let p = Program {
            mailboxes: vec![],
            mutexes: vec![],
            semaphores: vec![],
            barriers: vec![],
            actors: vec![
                ActorDecl {
                    name: "a".into(),
                    body: vec![Action::LocalStep, Action::Fail],
                },
                ActorDecl {
                    name: "b".into(),
                    body: vec![Action::LocalStep],
                },
            ],
        };
        let all = enumerate_all(&p, 1000).unwrap();
        let faulty = all
            .iter()
            .find(|e| classify_execution(&p, e).is_faulty())
            .unwrap();
        assert_eq!(oracle_ct(&p, faulty), 0);
    }

    #[test]
    fn reachable_states_of_wildcard_pattern() {
        let p = wildcard_pattern();
        let states = reachable_states(&p);
        assert!(states.len() > 1);
        // Initial state present exactly once.
        let init = SimState::initial(&p);
        assert_eq!(states.iter().filter(|s| **s == init).count(), 1);
    }
}
