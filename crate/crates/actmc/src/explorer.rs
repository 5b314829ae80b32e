//! The exploration loop: optimal dynamic partial order reduction driven by
//! pluggable head-selection strategies.
//!
//! Exploration maintains a set of *heads* — tree nodes whose wakeup tree is
//! non-empty — and repeatedly extends one of them by one transition. A
//! classic depth-first checker always extends the most recent head; here the
//! strategy may pick any head, which is what lets randomized orders escape
//! barren regions of the state space. When an extension completes a maximal
//! execution, its reversible races are converted into reversal sequences and
//! inserted back into the tree, scheduling exactly the not-yet-covered
//! equivalence classes.
//!
//! Soundness and optimality (one explored execution per class, no sleep-set
//! blocked execution) hold for every strategy; the acceptance suite checks
//! both against the brute-force oracle.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::independence::{
    happens_before, is_weak_initial, notdep, reversible_races_with_hb, trace_key_with_hb, TraceKey,
};
use crate::model::{
    ActorId, Classification, Execution, Program, SimState, Transition,
};
use crate::rng::SplitMix64;
use crate::wakeup::{ExplorationTree, InsertOutcome, NodeId};

/// Exploration order policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StrategyKind {
    /// Classic depth-first order: most recent head, smallest actor id.
    Dfs,
    /// Depth-first head order with uniform-random child and seed picks.
    UniformDfs,
    /// A uniform-random head at every step.
    RfsStep,
    /// Extend the current branch until it completes, then pick a
    /// uniform-random head.
    RfsBranch,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 4] = [
        StrategyKind::Dfs,
        StrategyKind::UniformDfs,
        StrategyKind::RfsStep,
        StrategyKind::RfsBranch,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StrategyKind::Dfs => "dfs",
            StrategyKind::UniformDfs => "uniform-dfs",
            StrategyKind::RfsStep => "rfs-step",
            StrategyKind::RfsBranch => "rfs-branch",
        }
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

impl FromStr for StrategyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dfs" => Ok(StrategyKind::Dfs),
            "uniform-dfs" => Ok(StrategyKind::UniformDfs),
            "rfs-step" => Ok(StrategyKind::RfsStep),
            "rfs-branch" => Ok(StrategyKind::RfsBranch),
            other => Err(format!(
                "unknown strategy '{other}' (expected dfs, uniform-dfs, rfs-step or rfs-branch)"
            )),
        }
    }
}

/// Policy plus seed; the same (policy, seed, program) always reproduces the
/// same exploration transcript.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Strategy {
    pub kind: StrategyKind,
    pub seed: u64,
}

impl Strategy {
    pub fn new(kind: StrategyKind, seed: u64) -> Strategy {
        Strategy { kind, seed }
    }
}

/// Exploration limits. `None` means unlimited.
#[derive(Debug, Clone, Copy, Default)]
pub struct Budget {
    pub max_traces: Option<u64>,
    pub max_states: Option<u64>,
    pub timeout: Option<Duration>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BudgetKind {
    Traces,
    States,
    Timeout,
}

impl fmt::Display for BudgetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BudgetKind::Traces => write!(f, "max-traces"),
            BudgetKind::States => write!(f, "max-states"),
            BudgetKind::Timeout => write!(f, "timeout"),
        }
    }
}

/// Exploration configuration.
#[derive(Debug, Clone)]
pub struct ExploreOptions {
    pub strategy: Strategy,
    pub budget: Budget,
    /// Return at the first deadlock or crash instead of exhausting the
    /// reduced space. Required for the critical-transition search, which
    /// resumes from the tree as it stood at discovery.
    pub stop_at_first_bug: bool,
    /// Collect closed subtrees. Purely a memory optimization; the explored
    /// trace set is identical either way.
    pub gc: bool,
}

impl ExploreOptions {
    pub fn new(strategy: Strategy) -> ExploreOptions {
        ExploreOptions {
            strategy,
            budget: Budget::default(),
            stop_at_first_bug: false,
            gc: true,
        }
    }
}

/// Counters reported after a run.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExplorationStats {
    pub traces_explored: u64,
    pub states_visited: u64,
    /// `states_visited` at the moment the first bug completed; `None` when
    /// no bug was found.
    pub states_before_first_bug: Option<u64>,
    /// Sleep-set-blocked executions encountered. Always zero; a nonzero
    /// count aborts the run as an optimality violation.
    pub ssb_count: u64,
    pub peak_tree_nodes: u64,
    pub wall_time: Duration,
}

/// Final outcome of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    AllSafe,
    Deadlock,
    Crash,
    Exhausted(BudgetKind),
}

impl Outcome {
    pub fn is_bug(self) -> bool {
        matches!(self, Outcome::Deadlock | Outcome::Crash)
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::AllSafe => write!(f, "all_safe"),
            Outcome::Deadlock => write!(f, "deadlock"),
            Outcome::Crash => write!(f, "crash"),
            Outcome::Exhausted(_) => write!(f, "exhausted"),
        }
    }
}

/// Result of a run: outcome, a replayable counterexample when a bug was
/// found, and the stats record.
#[derive(Debug, Clone)]
pub struct Verdict {
    pub outcome: Outcome,
    pub counterexample: Option<Execution>,
    pub stats: ExplorationStats,
}

/// Internal failures. These indicate a broken invariant, never a property of
/// the checked program.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExploreError {
    /// A state with enabled actors had every one of them sleeping: a
    /// sleep-set-blocked execution, which the optimality argument excludes.
    #[error("optimality violation: all enabled actors are sleeping at depth {depth}")]
    OptimalityViolation { depth: usize },
}

/// One explored maximal execution.
#[derive(Debug, Clone)]
pub struct CompletedTrace {
    pub node: NodeId,
    pub execution: Execution,
    pub class: Classification,
    pub key: TraceKey,
}

/// The first faulty execution of a run, with the tree state preserved for
/// the critical-transition search.
#[derive(Debug, Clone)]
pub struct BugRecord {
    pub node: NodeId,
    pub execution: Execution,
    pub class: Classification,
    pub states_at_discovery: u64,
}

/// Deterministic event log of a run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TranscriptEvent {
    SeedRoot { actor: ActorId },
    HeadPick { node: NodeId },
    ChildPick { node: NodeId, actor: ActorId },
    Completed { node: NodeId, class: Classification },
    RaceInsert { earlier: usize, later: usize, target: NodeId },
    RaceSubsumed { earlier: usize, later: usize },
    RaceBlocked { earlier: usize, later: usize },
    SeedWut { node: NodeId, actor: ActorId },
    Gc { node: NodeId, removed: u64 },
    CtSeed { node: NodeId, actor: ActorId },
}

impl fmt::Display for TranscriptEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TranscriptEvent::SeedRoot { actor } => write!(f, "seed-root actor={}", actor.0),
            TranscriptEvent::HeadPick { node } => write!(f, "head node={}", node.0),
            TranscriptEvent::ChildPick { node, actor } => {
                write!(f, "child node={} actor={}", node.0, actor.0)
            }
            TranscriptEvent::Completed { node, class } => {
                write!(f, "completed node={} class={}", node.0, class)
            }
            TranscriptEvent::RaceInsert {
                earlier,
                later,
                target,
            } => write!(f, "race-insert {earlier}<{later} target={}", target.0),
            TranscriptEvent::RaceSubsumed { earlier, later } => {
                write!(f, "race-subsumed {earlier}<{later}")
            }
            TranscriptEvent::RaceBlocked { earlier, later } => {
                write!(f, "race-blocked {earlier}<{later}")
            }
            TranscriptEvent::SeedWut { node, actor } => {
                write!(f, "seed-wut node={} actor={}", node.0, actor.0)
            }
            TranscriptEvent::Gc { node, removed } => {
                write!(f, "gc node={} removed={removed}", node.0)
            }
            TranscriptEvent::CtSeed { node, actor } => {
                write!(f, "ct-seed node={} actor={}", node.0, actor.0)
            }
        }
    }
}

pub(crate) enum StepResult {
    Extended,
    Completed { class: Classification },
}

/// The checker. Owns the exploration tree, head set and all counters; stays
/// usable after `run` returns so that the critical-transition search can
/// resume from the preserved tree.
pub struct Explorer<'p> {
    program: &'p Program,
    pub(crate) options: ExploreOptions,
    pub(crate) tree: ExplorationTree,
    pub(crate) heads: Vec<NodeId>,
    rng: SplitMix64,
    state_cache: HashMap<NodeId, SimState>,
    transcript: Vec<TranscriptEvent>,
    keys_seen: HashSet<TraceKey>,
    completed: Vec<CompletedTrace>,
    duplicate_classes: u64,
    first_bug: Option<BugRecord>,
    current_branch: Option<NodeId>,
    traces_explored: u64,
    states_visited: u64,
    ssb_count: u64,
    started: Option<Instant>,
    elapsed: Duration,
    initialized: bool,
    iterations: u64,
    /// Set by the critical-transition search: suppresses garbage collection
    /// so the faulty path and its sleep sets survive.
    pub(crate) ct_mode: bool,
}

impl<'p> Explorer<'p> {
    pub fn new(program: &'p Program, options: ExploreOptions) -> Explorer<'p> {
        let seed = options.strategy.seed;
        Explorer {
            program,
            options,
            tree: ExplorationTree::new(),
            heads: Vec::new(),
            rng: SplitMix64::new(seed),
            state_cache: HashMap::new(),
            transcript: Vec::new(),
            keys_seen: HashSet::new(),
            completed: Vec::new(),
            duplicate_classes: 0,
            first_bug: None,
            current_branch: None,
            traces_explored: 0,
            states_visited: 0,
            ssb_count: 0,
            started: None,
            elapsed: Duration::ZERO,
            initialized: false,
            iterations: 0,
            ct_mode: false,
        }
    }

    pub fn program(&self) -> &'p Program {
        self.program
    }

    pub fn tree(&self) -> &ExplorationTree {
        &self.tree
    }

    pub fn first_bug(&self) -> Option<&BugRecord> {
        self.first_bug.as_ref()
    }

    pub fn completed(&self) -> &[CompletedTrace] {
        &self.completed
    }

    pub fn explored_keys(&self) -> &HashSet<TraceKey> {
        &self.keys_seen
    }

    /// Maximal executions sharing a key with an earlier one. Zero on every
    /// run by the optimality theorem; exposed so tests can assert it.
    pub fn duplicate_classes(&self) -> u64 {
        self.duplicate_classes
    }

    pub fn transcript(&self) -> &[TranscriptEvent] {
        &self.transcript
    }

    /// The transcript as one line per event.
    pub fn render_transcript(&self) -> String {
        let mut out = String::new();
        for ev in &self.transcript {
            out.push_str(&ev.to_string());
            out.push('\n');
        }
        out
    }

    pub fn stats(&self) -> ExplorationStats {
        ExplorationStats {
            traces_explored: self.traces_explored,
            states_visited: self.states_visited,
            states_before_first_bug: self.first_bug.as_ref().map(|b| b.states_at_discovery),
            ssb_count: self.ssb_count,
            peak_tree_nodes: self.tree.peak_alive() as u64,
            wall_time: self.elapsed,
        }
    }

    /// Run until the head set empties, a budget trips, or (with
    /// `stop_at_first_bug`) a faulty execution completes.
    pub fn run(&mut self) -> Result<Verdict, ExploreError> {
        self.begin_phase();
        if !self.initialized {
            self.initialize();
        }
        let verdict = loop {
            if self.heads.is_empty() {
                break self.final_verdict();
            }
            if let Some(kind) = self.budget_exceeded() {
                break self.verdict_with(Outcome::Exhausted(kind));
            }
            let candidates = self.heads.clone();
            let head = self
                .pick_among(&candidates)
                .expect("non-empty head set yields a pick");
            let step = match self.explore_from(head) {
                Ok(step) => step,
                Err(e) => {
                    self.end_phase();
                    return Err(e);
                }
            };
            match step {
                StepResult::Extended => {}
                StepResult::Completed { class } => {
                    if class.is_faulty() && self.options.stop_at_first_bug {
                        break self.final_verdict();
                    }
                }
            }
        };
        self.end_phase();
        let mut verdict = verdict;
        verdict.stats.wall_time = self.elapsed;
        Ok(verdict)
    }

    /// Start charging wall time against the timeout budget. Paired with
    /// [`Explorer::end_phase`]; the critical-transition search runs as its
    /// own phase on the same clock.
    pub(crate) fn begin_phase(&mut self) {
        debug_assert!(self.started.is_none(), "nested exploration phase");
        self.started = Some(Instant::now());
    }

    pub(crate) fn end_phase(&mut self) {
        if let Some(start) = self.started.take() {
            self.elapsed += start.elapsed();
        }
    }

    fn initialize(&mut self) {
        self.initialized = true;
        let s0 = SimState::initial(self.program);
        let enabled = s0.enabled(self.program);
        let root = self.tree.root();
        self.state_cache.insert(root, s0.clone());
        if enabled.is_empty() {
            // The empty execution is already maximal.
            self.tree.node_mut(root).maximal = true;
            self.complete_trace(root, s0.classify(self.program));
            return;
        }
        let seed = self.pick_actor(&enabled);
        self.tree.node_mut(root).wut.append_chain(&[seed]);
        self.heads.push(root);
        self.transcript.push(TranscriptEvent::SeedRoot { actor: seed });
    }

    fn budget_exceeded(&self) -> Option<BudgetKind> {
        let b = &self.options.budget;
        if b.max_traces.is_some_and(|m| self.traces_explored >= m) {
            return Some(BudgetKind::Traces);
        }
        if b.max_states.is_some_and(|m| self.states_visited >= m) {
            return Some(BudgetKind::States);
        }
        if let (Some(limit), Some(start)) = (b.timeout, self.started) {
            if self.elapsed + start.elapsed() > limit {
                return Some(BudgetKind::Timeout);
            }
        }
        None
    }

    fn final_verdict(&self) -> Verdict {
        let outcome = match &self.first_bug {
            Some(bug) => match bug.class {
                Classification::Deadlock => Outcome::Deadlock,
                Classification::Crash => Outcome::Crash,
                Classification::Safe => unreachable!("bug record is never safe"),
            },
            None => Outcome::AllSafe,
        };
        self.verdict_with(outcome)
    }

    fn verdict_with(&self, outcome: Outcome) -> Verdict {
        Verdict {
            outcome,
            counterexample: self.first_bug.as_ref().map(|b| b.execution.clone()),
            stats: self.stats(),
        }
    }

    /// One iteration of the main loop: extend `head` by one child picked
    /// from its wakeup tree.
    pub(crate) fn explore_from(&mut self, head: NodeId) -> Result<StepResult, ExploreError> {
        self.iterations += 1;
        // Small trees are re-checked on every mutation; larger ones are
        // sampled so the quadratic invariant checks stay affordable.
        if self.tree.alive_count() <= 32 || self.iterations.is_multiple_of(256) {
            self.debug_check_heads_exact();
        }
        self.transcript.push(TranscriptEvent::HeadPick { node: head });

        let head_state = self.state_of(head);
        let p = self.pick_wut_child(head);
        self.transcript.push(TranscriptEvent::ChildPick {
            node: head,
            actor: p,
        });

        let stmt = head_state.pc(p);
        let label = self.program.label(p, stmt);
        let sleep = self
            .tree
            .child_sleep(self.program, &head_state, head, p, &label);
        let depth = self.tree.node(head).depth + 1;
        let edge = Transition {
            actor: p,
            stmt,
            label,
            index: depth,
        };
        let child = self.tree.add_child(head, edge, sleep);
        let moved = self.tree.extract_child_wut(head, p);
        self.tree.node_mut(child).wut = moved;
        if self.tree.node(head).wut.is_empty() {
            self.heads.retain(|&h| h != head);
        }

        let mut child_state = head_state;
        child_state.step(self.program, p);
        self.states_visited += 1;
        self.cache_state(child, child_state.clone());

        let enabled = child_state.enabled(self.program);
        if enabled.is_empty() {
            self.current_branch = None;
            self.tree.node_mut(child).maximal = true;
            let class = child_state.classify(self.program);
            self.complete_trace(child, class);
            if child_state.crashed() {
                self.tree.node_mut(head).crashed_child = true;
            }
            self.process_races(child);
            let stop_here = class.is_faulty() && self.options.stop_at_first_bug;
            if self.options.gc && !self.ct_mode && !stop_here {
                let removed = self.tree.garbage_collect(child);
                if removed > 0 {
                    self.transcript.push(TranscriptEvent::Gc {
                        node: child,
                        removed,
                    });
                }
            }
            Ok(StepResult::Completed { class })
        } else {
            if self.tree.node(child).wut.is_empty() {
                let sleep = &self.tree.node(child).sleep;
                let candidates: Vec<ActorId> = enabled
                    .iter()
                    .copied()
                    .filter(|a| !sleep.contains(a))
                    .collect();
                if candidates.is_empty() {
                    self.ssb_count += 1;
                    return Err(ExploreError::OptimalityViolation { depth });
                }
                let seed = self.pick_actor(&candidates);
                self.tree.node_mut(child).wut.append_chain(&[seed]);
                self.transcript.push(TranscriptEvent::SeedWut {
                    node: child,
                    actor: seed,
                });
            }
            self.add_head(child);
            self.current_branch = Some(child);
            Ok(StepResult::Extended)
        }
    }

    fn complete_trace(&mut self, leaf: NodeId, class: Classification) {
        let execution = self.tree.execution_of(leaf);
        let hb = happens_before(self.program, &execution);
        let key = trace_key_with_hb(&execution, &hb);
        self.traces_explored += 1;
        if !self.keys_seen.insert(key.clone()) {
            self.duplicate_classes += 1;
        }
        self.tree.record_completion(leaf, class.is_faulty());
        self.transcript.push(TranscriptEvent::Completed {
            node: leaf,
            class,
        });
        if class.is_faulty() && self.first_bug.is_none() {
            self.first_bug = Some(BugRecord {
                node: leaf,
                execution: execution.clone(),
                class,
                states_at_discovery: self.states_visited,
            });
        }
        self.completed.push(CompletedTrace {
            node: leaf,
            execution,
            class,
            key,
        });
    }

    /// Race reversal: for each reversible race of the completed execution,
    /// build the reversal sequence and insert it at the node where the race
    /// starts, unless a sleeping or earlier-done alternative already covers
    /// it.
    fn process_races(&mut self, leaf: NodeId) {
        let execution = self.tree.execution_of(leaf);
        let hb = happens_before(self.program, &execution);
        let path = self.tree.path_nodes(leaf);
        for race in reversible_races_with_hb(self.program, &execution, &hb) {
            let (i, j) = (race.earlier, race.later);
            let anchor = path[i];
            let mut v: Vec<Transition> = notdep(&hb, i)
                .into_iter()
                .filter(|&k| k != j)
                .map(|k| execution.steps[k].clone())
                .collect();
            v.push(execution.steps[j].clone());

            let proc_i = execution.steps[i].actor;
            debug_assert!(
                self.tree.node(anchor).done.contains(&proc_i),
                "the raced transition was explored from its own prefix"
            );
            let anchor_state = self.state_of(anchor);
            let blocked = {
                let node = self.tree.node(anchor);
                let done_before = self.tree.done_before(anchor, proc_i);
                node.sleep
                    .iter()
                    .chain(done_before.iter())
                    .any(|&q| is_weak_initial(self.program, &anchor_state, &v, q))
            };
            if blocked {
                self.transcript.push(TranscriptEvent::RaceBlocked {
                    earlier: i,
                    later: j,
                });
                continue;
            }
            match self.tree.insert(self.program, anchor, &anchor_state, &v) {
                InsertOutcome::Inserted(target) => {
                    self.add_head(target);
                    self.transcript.push(TranscriptEvent::RaceInsert {
                        earlier: i,
                        later: j,
                        target,
                    });
                }
                InsertOutcome::Subsumed => {
                    self.transcript.push(TranscriptEvent::RaceSubsumed {
                        earlier: i,
                        later: j,
                    });
                }
            }
        }
    }

    pub(crate) fn add_head(&mut self, node: NodeId) {
        debug_assert!(!self.tree.node(node).wut.is_empty());
        if !self.heads.contains(&node) {
            self.heads.push(node);
        }
    }

    /// Whether some budget has been spent.
    pub(crate) fn budget_hit(&self) -> bool {
        self.budget_exceeded().is_some()
    }

    /// Pick the next head among `candidates` (a subset of the head set, in
    /// head order), per strategy.
    pub(crate) fn pick_among(&mut self, candidates: &[NodeId]) -> Option<NodeId> {
        if candidates.is_empty() {
            return None;
        }
        let pick = match self.options.strategy.kind {
            StrategyKind::Dfs | StrategyKind::UniformDfs => *candidates.last().expect("non-empty"),
            StrategyKind::RfsStep => *self.rng.pick(candidates),
            StrategyKind::RfsBranch => match self.current_branch {
                Some(cur) if candidates.contains(&cur) => cur,
                _ => *self.rng.pick(candidates),
            },
        };
        Some(pick)
    }

    /// The next child is always the leftmost (oldest) pending branch. The
    /// branch order of a wakeup tree is load-bearing: consuming a younger
    /// branch first would order its actor into `done` ahead of older pending
    /// branches it may be a weak initial of, breaking the ordered-tree
    /// condition and with it optimality. Strategy freedom lives in head
    /// selection and in seeding, not here.
    fn pick_wut_child(&mut self, head: NodeId) -> ActorId {
        let options = self.tree.node(head).wut.height_one();
        assert!(!options.is_empty(), "head with empty wakeup tree");
        options[0]
    }

    pub(crate) fn pick_actor(&mut self, candidates: &[ActorId]) -> ActorId {
        assert!(!candidates.is_empty());
        match self.options.strategy.kind {
            StrategyKind::Dfs => candidates.iter().copied().min().expect("non-empty"),
            _ => *self.rng.pick(candidates),
        }
    }

    /// Reconstruct the state of a node by replay from the nearest cached
    /// ancestor. Pure optimization: replay is deterministic, so cache policy
    /// cannot change observable behavior.
    pub(crate) fn state_of(&mut self, node: NodeId) -> SimState {
        if let Some(s) = self.state_cache.get(&node) {
            return s.clone();
        }
        let mut chain = Vec::new();
        let mut cur = node;
        let mut state = loop {
            if let Some(s) = self.state_cache.get(&cur) {
                break s.clone();
            }
            match self.tree.node(cur).edge.as_ref() {
                Some(edge) => {
                    chain.push(edge.actor);
                    cur = self.tree.node(cur).parent.expect("non-root has parent");
                }
                None => break SimState::initial(self.program),
            }
        };
        for &actor in chain.iter().rev() {
            state.step(self.program, actor);
        }
        self.cache_state(node, state.clone());
        state
    }

    fn cache_state(&mut self, node: NodeId, state: SimState) {
        if self.state_cache.len() >= 1024 {
            self.state_cache.clear();
        }
        self.state_cache.insert(node, state);
    }

    fn debug_check_heads_exact(&self) {
        #[cfg(debug_assertions)]
        {
            let mut expected = self.tree.pending_nodes();
            let mut actual = self.heads.clone();
            expected.sort();
            actual.sort();
            assert_eq!(actual, expected, "head set must equal pending wut nodes");
            if self.tree.alive_count() <= 1200 {
                self.tree.check_wakeup_conditions(self.program);
            }
        }
    }

    pub(crate) fn record_ct_seed(&mut self, node: NodeId, actor: ActorId) {
        self.transcript.push(TranscriptEvent::CtSeed { node, actor });
    }
}
