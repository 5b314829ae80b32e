//! Critical-transition search: given the first faulty execution of a run,
//! find the last transition after which the bug is unavoidable, plus its
//! causal past.
//!
//! The search resumes on the exploration tree exactly as it stood at bug
//! discovery. Writing the faulty run as `F · b_1 … b_n`, where `F` is the
//! deepest prefix already known to lie on a correct execution, the critical
//! transition is one of the `b_i`. States on that suffix split into an older
//! block with non-empty sleep sets — each of those provably lies on an
//! already-explored correct execution — and a younger block with empty sleep
//! sets, where finishing the pending wakeup trees *is* an exhaustive search
//! of the continuations. The search therefore walks the younger block
//! backwards, exhausting each prefix's subtree until some prefix yields a
//! correct completion; if none does, the boundary transition into the
//! younger block is critical, and if no correct execution exists at all the
//! critical transition is the start transition (index 0).
//!
//! Crashes lose the persistence property (a crash disables everyone), so
//! during the search a node whose child crashed may have its wakeup tree
//! force-seeded with unexplored enabled actors; otherwise siblings of a
//! crashing transition would never be visited.

use std::collections::{BTreeSet, HashSet};

use thiserror::Error;

use crate::explorer::{ExploreError, Explorer, StepResult};
use crate::independence::{happens_before, TraceKey};
use crate::model::{ActorId, Classification, Execution, Program, SimState};
use crate::wakeup::NodeId;

/// Work done by the critical-transition phase, on top of the original run.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CtCounters {
    pub traces_explored: u64,
    pub states_visited: u64,
    /// Completions during the search whose class had already been explored
    /// before the bug. Zero when reuse works as intended.
    pub reexplored_known_classes: u64,
}

/// Outcome of the critical-transition search.
#[derive(Debug, Clone)]
pub struct CtReport {
    pub faulty: Execution,
    pub class: Classification,
    /// 1-based index of the critical transition in `faulty`; 0 encodes the
    /// limit case where no correct execution exists and the start transition
    /// is critical.
    pub ct_index: usize,
    /// 1-based indices before `ct_index` that happen before it.
    pub causal_past: Vec<usize>,
    /// A correct maximal execution diverging before the critical transition;
    /// present whenever `ct_index > 0` and the witness search succeeded.
    pub correct_witness: Option<Execution>,
    pub counters: CtCounters,
    /// Replaying only the causal past plus the critical transition does not
    /// make the bug inevitable: the bug has causes the causal past misses.
    pub multi_cause_warning: bool,
    /// A budget tripped mid-search: `ct_index` is the smallest index at
    /// which the bug is proven inevitable, but earlier indices are
    /// unverified.
    pub inconclusive: bool,
}

#[derive(Debug, Error)]
pub enum CtError {
    #[error("no faulty execution recorded; run with stop_at_first_bug first")]
    NoBug,
    #[error(transparent)]
    Explore(#[from] ExploreError),
}

/// Transitions before `index` (1-based) that happen before it.
pub fn causal_past(program: &Program, execution: &Execution, index: usize) -> Vec<usize> {
    assert!(index >= 1 && index <= execution.len(), "index out of range");
    let hb = happens_before(program, execution);
    (1..index).filter(|&i| hb.hb(i - 1, index - 1)).collect()
}

enum SweepStep {
    FoundCorrect(Execution),
    Exhausted,
    BudgetHit,
}

/// Locate the critical transition of the explorer's recorded first bug.
pub fn find_critical_transition(ex: &mut Explorer<'_>) -> Result<CtReport, CtError> {
    let bug = ex.first_bug().cloned().ok_or(CtError::NoBug)?;
    let program = ex.program();
    ex.ct_mode = true;
    ex.begin_phase();

    let stats_before = ex.stats();
    let pre_bug_keys: HashSet<TraceKey> = ex.explored_keys().clone();
    let completions_before = ex.completed().len();

    let path = ex.tree.path_nodes(bug.node);
    let m = bug.execution.len();
    debug_assert_eq!(path.len(), m + 1);

    // F: the deepest prefix of the faulty path with a correct completion.
    let f_depth = (0..=m)
        .rev()
        .find(|&d| ex.tree.node(path[d]).correct_completions > 0)
        .unwrap_or(0);
    let n = m - f_depth;
    debug_assert!(n >= 1, "the faulty leaf itself cannot be correct");

    // Boundary between non-empty and empty sleep sets on the suffix.
    let k = (1..=n)
        .rev()
        .find(|&i| !ex.tree.node(path[f_depth + i]).sleep.is_empty())
        .unwrap_or(0);
    // Maximal states have empty sleep sets, so the boundary is strictly
    // inside the suffix.
    debug_assert!(k < n);

    let mut ct_index = None;
    let mut witness = None;
    let mut inconclusive = false;

    for i in ((k + 1).max(1)..=n).rev() {
        let prefix_node = path[f_depth + i - 1];
        let step = match sweep_step(ex, prefix_node) {
            Ok(step) => step,
            Err(e) => {
                ex.end_phase();
                return Err(e);
            }
        };
        match step {
            SweepStep::FoundCorrect(exec) => {
                ct_index = Some(f_depth + i);
                witness = Some(exec);
                break;
            }
            SweepStep::Exhausted => continue,
            SweepStep::BudgetHit => {
                ct_index = Some(f_depth + i);
                inconclusive = true;
                break;
            }
        }
    }

    let ct_index = match ct_index {
        Some(idx) => idx,
        None if k >= 1 => {
            // The sweep exhausted the empty-sleep block. The boundary state
            // has a non-empty sleep set, which certifies it lies on a
            // correct execution even though the reduced search from it finds
            // none (that class was covered through another prefix).
            let idx = f_depth + k + 1;
            witness = raw_correct_witness(
                program,
                &bug.execution.actors()[..idx - 1],
                10_000_000,
            );
            idx
        }
        None => 0,
    };

    if ct_index > 0 && witness.is_none() && !inconclusive {
        // The sweep proved a correct continuation exists among completed
        // traces; dig it out of the record.
        witness = completed_correct_through(ex, &bug.execution.actors()[..ct_index - 1]);
    }

    let causal = if ct_index > 0 {
        causal_past(program, &bug.execution, ct_index)
    } else {
        Vec::new()
    };

    let multi_cause_warning = if ct_index > 0 {
        !reduced_prefix_reproduces(program, &bug.execution, ct_index, &causal, 500_000)
    } else {
        false
    };

    ex.end_phase();
    let stats_after = ex.stats();
    let reexplored = ex.completed()[completions_before..]
        .iter()
        .filter(|t| pre_bug_keys.contains(&t.key))
        .count() as u64;

    Ok(CtReport {
        class: bug.class,
        faulty: bug.execution,
        ct_index,
        causal_past: causal,
        correct_witness: witness,
        counters: CtCounters {
            traces_explored: stats_after.traces_explored - stats_before.traces_explored,
            states_visited: stats_after.states_visited - stats_before.states_visited,
            reexplored_known_classes: reexplored,
        },
        multi_cause_warning,
        inconclusive,
    })
}

/// Exhaust the subtree below `prefix_node`, returning the first correct
/// completion found there. Reuses whatever the tree already knows: an
/// existing correct completion through the prefix answers immediately, and
/// pending wakeup trees below it are driven to completion with the same
/// exploration loop.
fn sweep_step(ex: &mut Explorer<'_>, prefix_node: NodeId) -> Result<SweepStep, CtError> {
    if ex.tree.node(prefix_node).correct_completions > 0 {
        let prefix = ex.tree.path_actors(prefix_node);
        let exec = completed_correct_through(ex, &prefix)
            .expect("positive completion counter implies a recorded trace");
        return Ok(SweepStep::FoundCorrect(exec));
    }
    loop {
        if ex.budget_hit() {
            return Ok(SweepStep::BudgetHit);
        }
        let candidates: Vec<NodeId> = ex
            .heads
            .iter()
            .copied()
            .filter(|&h| ex.tree.is_descendant_or_self(h, prefix_node))
            .collect();
        if candidates.is_empty() {
            // Crashes break persistence: siblings of a crashing transition
            // are not scheduled by race reversal. Seed them explicitly.
            if seed_crash_sibling(ex, prefix_node) {
                continue;
            }
            return Ok(SweepStep::Exhausted);
        }
        let head = ex
            .pick_among(&candidates)
            .expect("candidates are non-empty");
        match ex.explore_from(head)? {
            StepResult::Extended => {}
            StepResult::Completed { class } => {
                if !class.is_faulty() {
                    let exec = ex
                        .completed()
                        .last()
                        .expect("just completed")
                        .execution
                        .clone();
                    return Ok(SweepStep::FoundCorrect(exec));
                }
            }
        }
    }
}

/// Force-seed one node in the subtree whose child crashed and which still
/// has unexplored, non-sleeping enabled actors. Returns true when a seed was
/// planted.
fn seed_crash_sibling(ex: &mut Explorer<'_>, subtree_root: NodeId) -> bool {
    let program = ex.program();
    for node in ex.tree.subtree_nodes(subtree_root) {
        {
            let n = ex.tree.node(node);
            if !n.crashed_child || !n.wut.is_empty() || n.maximal {
                continue;
            }
        }
        let state = ex.state_of(node);
        let n = ex.tree.node(node);
        let candidates: Vec<ActorId> = state
            .enabled(program)
            .into_iter()
            .filter(|a| !n.sleep.contains(a) && !n.done.contains(a))
            .collect();
        if candidates.is_empty() {
            continue;
        }
        let seed = ex.pick_actor(&candidates);
        ex.tree.node_mut(node).wut.append_chain(&[seed]);
        ex.add_head(node);
        ex.record_ct_seed(node, seed);
        return true;
    }
    false
}

fn completed_correct_through(ex: &Explorer<'_>, prefix: &[ActorId]) -> Option<Execution> {
    ex.completed()
        .iter()
        .find(|t| !t.class.is_faulty() && t.execution.actors().starts_with(prefix))
        .map(|t| t.execution.clone())
}

/// Unreduced depth-first hunt for one correct maximal continuation of
/// `prefix`. Only used to materialize a witness the sleep-set argument
/// already guarantees to exist.
fn raw_correct_witness(
    program: &Program,
    prefix: &[ActorId],
    step_budget: u64,
) -> Option<Execution> {
    let state = crate::model::replay(program, prefix).expect("prefix must replay");
    let mut steps = 0u64;
    let mut acc: Vec<ActorId> = prefix.to_vec();
    fn rec(
        program: &Program,
        state: &SimState,
        acc: &mut Vec<ActorId>,
        steps: &mut u64,
        budget: u64,
    ) -> bool {
        let enabled = state.enabled(program);
        if enabled.is_empty() {
            return state.classify(program) == Classification::Safe;
        }
        for actor in enabled {
            if *steps >= budget {
                return false;
            }
            *steps += 1;
            let mut next = state.clone();
            next.step(program, actor);
            acc.push(actor);
            if rec(program, &next, acc, steps, budget) {
                return true;
            }
            acc.pop();
        }
        false
    }
    if rec(program, &state, &mut acc, &mut steps, step_budget) {
        let (_, exec) = crate::model::replay_execution(program, &acc).expect("witness replays");
        Some(exec)
    } else {
        None
    }
}

/// The observable identity of a bug: its classification plus which actors
/// were left unfinished (deadlock) or which actor crashed.
#[derive(Debug, Clone, PartialEq, Eq)]
struct BugSignature {
    class: Classification,
    unfinished: Vec<ActorId>,
    fail_witness: Option<ActorId>,
}

fn signature_of(program: &Program, state: &SimState) -> BugSignature {
    BugSignature {
        class: state.classify(program),
        unfinished: (0..program.actor_count())
            .map(ActorId)
            .filter(|&a| !state.finished(program, a))
            .collect(),
        fail_witness: state.fail_witness(),
    }
}

/// Does replaying just the causal past plus the critical transition fully
/// reproduce the bug? True when every maximal continuation of the reduced
/// prefix ends in the same bug signature as the original faulty run. A
/// deadlock involving causally unrelated actor groups fails this: the
/// reduced prefix omits the other group, whose members may then terminate.
/// Budget exhaustion counts as "no".
fn reduced_prefix_reproduces(
    program: &Program,
    faulty: &Execution,
    ct_index: usize,
    causal: &[usize],
    step_budget: u64,
) -> bool {
    let original = signature_of(
        program,
        &crate::model::replay(program, &faulty.actors()).expect("faulty execution replays"),
    );
    let mut indices: BTreeSet<usize> = causal.iter().copied().collect();
    indices.insert(ct_index);
    let actors: Vec<ActorId> = indices
        .iter()
        .map(|&i| faulty.steps[i - 1].actor)
        .collect();
    let state = crate::model::replay(program, &actors)
        .expect("causal past with its transition is hb-closed and must replay");
    let mut steps = 0u64;
    fn always_same_bug(
        program: &Program,
        state: &SimState,
        original: &BugSignature,
        steps: &mut u64,
        budget: u64,
    ) -> Option<bool> {
        let enabled = state.enabled(program);
        if enabled.is_empty() {
            return Some(signature_of(program, state) == *original);
        }
        for actor in enabled {
            if *steps >= budget {
                return None;
            }
            *steps += 1;
            let mut next = state.clone();
            next.step(program, actor);
            match always_same_bug(program, &next, original, steps, budget) {
                Some(true) => {}
                other => return other,
            }
        }
        Some(true)
    }
    always_same_bug(program, &state, &original, &mut steps, step_budget) == Some(true)
}
