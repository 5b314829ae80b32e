//! Wakeup trees and the exploration tree.
//!
//! The exploration tree plays the role the call stack has in a depth-first
//! checker: one node per explored execution prefix, carrying the ordered
//! list of children already taken (`done`), the inherited sleep set, and a
//! *wakeup tree* of pending continuation sequences that must still be
//! visited from this prefix. Because exploration may resume from any pending
//! node rather than strict backtracking, the whole tree stays live until
//! garbage collection proves a subtree can no longer influence future
//! insertions.
//!
//! Wakeup-tree invariants (checked by tests on small runs):
//! - every branch is prefix-closed and executable from its anchor node;
//! - for every leaf `w`, the weak initials of `w` avoid the anchor's sleep
//!   set;
//! - for a child `p` ordered before a sibling branch `w`, `p` is not a weak
//!   initial of `w` — the order of `done` and of wut children encodes which
//!   alternatives were already covered, which is why both are append-only.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::independence::{dependent, is_weak_initial};
use crate::model::{ActionLabel, ActorId, Execution, Program, SimState, Transition};

/// Ordered tree of pending continuation sequences, edges labelled by actor.
/// The root is the empty sequence; children keep insertion order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WakeupTree {
    edges: Vec<(ActorId, WakeupTree)>,
}

impl WakeupTree {
    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Actors labelling the height-one nodes, in insertion order.
    pub fn height_one(&self) -> Vec<ActorId> {
        self.edges.iter().map(|(a, _)| *a).collect()
    }

    /// Install a single linear branch, appended after existing children.
    pub fn append_chain(&mut self, actors: &[ActorId]) {
        let mut node = self;
        for &a in actors {
            node.edges.push((a, WakeupTree::default()));
            node = &mut node.edges.last_mut().expect("just pushed").1;
        }
    }

    /// Remove and return the subtree rooted after the height-one node `p`.
    ///
    /// Panics if `p` does not label a height-one node.
    pub fn extract(&mut self, p: ActorId) -> WakeupTree {
        let pos = self
            .edges
            .iter()
            .position(|(a, _)| *a == p)
            .unwrap_or_else(|| panic!("{p} is not at height one of this wakeup tree"));
        self.edges.remove(pos).1
    }

    /// Number of nodes (excluding the root).
    pub fn node_count(&self) -> usize {
        self.edges
            .iter()
            .map(|(_, sub)| 1 + sub.node_count())
            .sum()
    }

    /// All root-to-leaf actor sequences, left to right.
    pub fn branches(&self) -> Vec<Vec<ActorId>> {
        if self.edges.is_empty() {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        for (a, sub) in &self.edges {
            for mut rest in sub.branches() {
                rest.insert(0, *a);
                out.push(rest);
            }
        }
        out
    }

    fn render(&self, names: &dyn Fn(ActorId) -> String, out: &mut String) {
        out.push('{');
        for (i, (a, sub)) in self.edges.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&names(*a));
            if !sub.is_empty() {
                sub.render(names, out);
            }
        }
        out.push('}');
    }
}

/// Node handle into the exploration tree arena. Slots are never reused, so
/// ids are stable for the lifetime of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub usize);

/// One explored execution prefix.
#[derive(Debug, Clone)]
pub struct ExplorationNode {
    pub parent: Option<NodeId>,
    /// Transition from the parent; `None` at the root. Its `index` equals
    /// the node's depth.
    pub edge: Option<Transition>,
    pub depth: usize,
    /// Actors explored from here, in exploration order. Append-only.
    pub done: Vec<ActorId>,
    /// Child node per `done` entry; `None` once collected.
    pub children: Vec<Option<NodeId>>,
    /// Actors whose exploration from here would duplicate a covered class.
    pub sleep: BTreeSet<ActorId>,
    pub wut: WakeupTree,
    /// Set when this node's execution turned out maximal.
    pub maximal: bool,
    /// Completed correct / faulty maximal executions in this subtree.
    pub correct_completions: u64,
    pub faulty_completions: u64,
    /// A child of this node ended in a crash; the critical-transition search
    /// may need to force-seed siblings here.
    pub crashed_child: bool,
    alive: bool,
}

/// Outcome of a sequence insertion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InsertOutcome {
    /// The sequence was added to the wakeup tree of this node.
    Inserted(NodeId),
    /// An existing branch already covers the sequence; nothing to enqueue.
    Subsumed,
}

/// Arena-backed exploration tree.
#[derive(Debug)]
pub struct ExplorationTree {
    nodes: Vec<ExplorationNode>,
    root: NodeId,
    alive: usize,
    peak_alive: usize,
}

impl ExplorationTree {
    pub fn new() -> ExplorationTree {
        let root = ExplorationNode {
            parent: None,
            edge: None,
            depth: 0,
            done: Vec::new(),
            children: Vec::new(),
            sleep: BTreeSet::new(),
            wut: WakeupTree::default(),
            maximal: false,
            correct_completions: 0,
            faulty_completions: 0,
            crashed_child: false,
            alive: true,
        };
        ExplorationTree {
            nodes: vec![root],
            root: NodeId(0),
            alive: 1,
            peak_alive: 1,
        }
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn node(&self, id: NodeId) -> &ExplorationNode {
        let n = &self.nodes[id.0];
        debug_assert!(n.alive, "access to collected node {id:?}");
        n
    }

    pub fn node_mut(&mut self, id: NodeId) -> &mut ExplorationNode {
        let n = &mut self.nodes[id.0];
        debug_assert!(n.alive, "access to collected node {id:?}");
        n
    }

    pub fn is_alive(&self, id: NodeId) -> bool {
        self.nodes[id.0].alive
    }

    pub fn alive_count(&self) -> usize {
        self.alive
    }

    pub fn peak_alive(&self) -> usize {
        self.peak_alive
    }

    /// Record `edge.actor` in `done(parent)` and create the child node.
    pub fn add_child(
        &mut self,
        parent: NodeId,
        edge: Transition,
        sleep: BTreeSet<ActorId>,
    ) -> NodeId {
        let id = NodeId(self.nodes.len());
        let depth = self.node(parent).depth + 1;
        debug_assert_eq!(edge.index, depth);
        let actor = edge.actor;
        self.nodes.push(ExplorationNode {
            parent: Some(parent),
            edge: Some(edge),
            depth,
            done: Vec::new(),
            children: Vec::new(),
            sleep,
            wut: WakeupTree::default(),
            maximal: false,
            correct_completions: 0,
            faulty_completions: 0,
            crashed_child: false,
            alive: true,
        });
        let p = self.node_mut(parent);
        debug_assert!(
            !p.done.contains(&actor),
            "{actor} explored twice from one node"
        );
        p.done.push(actor);
        p.children.push(Some(id));
        self.alive += 1;
        self.peak_alive = self.peak_alive.max(self.alive);
        id
    }

    /// Actor path from the root to `id`.
    pub fn path_actors(&self, id: NodeId) -> Vec<ActorId> {
        let mut out = Vec::with_capacity(self.node(id).depth);
        let mut cur = id;
        while let Some(edge) = &self.nodes[cur.0].edge {
            out.push(edge.actor);
            cur = self.nodes[cur.0].parent.expect("non-root has a parent");
        }
        out.reverse();
        out
    }

    /// Nodes from the root to `id`, inclusive.
    pub fn path_nodes(&self, id: NodeId) -> Vec<NodeId> {
        let mut out = vec![id];
        let mut cur = id;
        while let Some(parent) = self.nodes[cur.0].parent {
            out.push(parent);
            cur = parent;
        }
        out.reverse();
        out
    }

    /// The execution this node stands for.
    pub fn execution_of(&self, id: NodeId) -> Execution {
        let mut steps: Vec<Transition> = Vec::with_capacity(self.node(id).depth);
        let mut cur = id;
        while let Some(edge) = &self.nodes[cur.0].edge {
            steps.push(edge.clone());
            cur = self.nodes[cur.0].parent.expect("non-root has a parent");
        }
        steps.reverse();
        Execution { steps }
    }

    pub fn is_descendant_or_self(&self, node: NodeId, ancestor: NodeId) -> bool {
        let mut cur = node;
        loop {
            if cur == ancestor {
                return true;
            }
            match self.nodes[cur.0].parent {
                Some(p) => cur = p,
                None => return false,
            }
        }
    }

    /// Ordered `done` prefix strictly before `p`'s entry.
    ///
    /// Panics if `p` was not explored from this node.
    pub fn done_before(&self, id: NodeId, p: ActorId) -> &[ActorId] {
        let node = self.node(id);
        let pos = node
            .done
            .iter()
            .position(|&a| a == p)
            .unwrap_or_else(|| panic!("{p} not in done of {id:?}"));
        &node.done[..pos]
    }

    /// The sleep set of a child about to be created under `node` via an
    /// actor whose next label is `p_label`: inherited sleepers and done
    /// entries whose next action at `node`'s state is independent of it.
    pub fn child_sleep(
        &self,
        program: &Program,
        node_state: &SimState,
        id: NodeId,
        p: ActorId,
        p_label: &ActionLabel,
    ) -> BTreeSet<ActorId> {
        let node = self.node(id);
        node.sleep
            .iter()
            .chain(node.done.iter())
            .copied()
            .filter(|&q| q != p && !dependent(p_label, &node_state.peek_label(program, q)))
            .collect()
    }

    /// Insert the reversal sequence `v` at `anchor`, walking existing `done`
    /// entries first and then the wakeup tree, always taking the first
    /// ordered alternative that is a weak initial of what remains of `v`.
    /// Consuming all of `v` along existing structure means an equivalent
    /// start is already covered and nothing is inserted.
    pub fn insert(
        &mut self,
        program: &Program,
        anchor: NodeId,
        anchor_state: &SimState,
        v: &[Transition],
    ) -> InsertOutcome {
        let mut state = anchor_state.clone();
        let mut node = anchor;
        let mut v: Vec<Transition> = v.to_vec();
        loop {
            if v.is_empty() {
                return InsertOutcome::Subsumed;
            }
            let n = self.node(node);
            let hit = n
                .done
                .iter()
                .enumerate()
                .find(|&(_, &p)| is_weak_initial(program, &state, &v, p))
                .map(|(pos, &p)| (pos, p));
            match hit {
                Some((pos, p)) => {
                    let child = n.children[pos].unwrap_or_else(|| {
                        panic!("insertion routed into a collected subtree under {node:?}")
                    });
                    state.step(program, p);
                    remove_first_occurrence(&mut v, p);
                    node = child;
                }
                None => break,
            }
        }
        let inserted = wut_insert(program, state, &mut self.nodes[node.0].wut, v);
        if inserted {
            InsertOutcome::Inserted(node)
        } else {
            InsertOutcome::Subsumed
        }
    }

    /// Move the wut subtree rooted after `p` at `id` into the child reached
    /// by `p`, returning it.
    pub fn extract_child_wut(&mut self, id: NodeId, p: ActorId) -> WakeupTree {
        self.node_mut(id).wut.extract(p)
    }

    /// Bump completion counters on the whole path from the root to `leaf`.
    pub fn record_completion(&mut self, leaf: NodeId, faulty: bool) {
        let mut cur = Some(leaf);
        while let Some(id) = cur {
            let n = self.node_mut(id);
            if faulty {
                n.faulty_completions += 1;
            } else {
                n.correct_completions += 1;
            }
            cur = n.parent;
        }
    }

    /// Drop subtrees that can no longer matter. Only the globally leftmost
    /// closed leaf may go: insertions always route to the right of every
    /// pending path, so anything left of all pending work is unreachable.
    /// Removal cascades upward through closed parents; when a parent keeps
    /// other children, its remaining leftmost leaf is retried, and the walk
    /// stops at the first node with a pending wakeup tree.
    ///
    /// Returns the number of nodes removed.
    pub fn garbage_collect(&mut self, leaf: NodeId) -> u64 {
        if !self.is_globally_leftmost(leaf) {
            return 0;
        }
        let mut removed = 0;
        let mut node = leaf;
        loop {
            if !self.closed(node) {
                return removed;
            }
            let parent = self.nodes[node.0].parent;
            self.remove(node);
            removed += 1;
            let Some(parent) = parent else {
                return removed; // root collected: the tree is finished
            };
            match self.first_remaining_child(parent) {
                Some(first) => {
                    // Retry the leftmost remaining leaf, stopping at any
                    // pending wakeup tree on the spine.
                    let mut cur = first;
                    loop {
                        if !self.nodes[cur.0].wut.is_empty() {
                            return removed;
                        }
                        match self.first_remaining_child(cur) {
                            Some(c) => cur = c,
                            None => break,
                        }
                    }
                    node = cur;
                }
                None => node = parent,
            }
        }
    }

    fn closed(&self, id: NodeId) -> bool {
        let n = &self.nodes[id.0];
        n.wut.is_empty() && n.children.iter().all(Option::is_none)
    }

    fn first_remaining_child(&self, id: NodeId) -> Option<NodeId> {
        self.nodes[id.0].children.iter().flatten().next().copied()
    }

    fn is_globally_leftmost(&self, id: NodeId) -> bool {
        let mut cur = id;
        while let Some(parent) = self.nodes[cur.0].parent {
            if self.first_remaining_child(parent) != Some(cur) {
                return false;
            }
            cur = parent;
        }
        true
    }

    fn remove(&mut self, id: NodeId) {
        if let Some(parent) = self.nodes[id.0].parent {
            for slot in &mut self.nodes[parent.0].children {
                if *slot == Some(id) {
                    *slot = None;
                }
            }
        }
        let n = &mut self.nodes[id.0];
        debug_assert!(n.alive);
        n.alive = false;
        self.alive -= 1;
    }

    /// All alive nodes with a non-empty wakeup tree. The exploration head
    /// set must equal this at every loop entry.
    pub fn pending_nodes(&self) -> Vec<NodeId> {
        (0..self.nodes.len())
            .filter(|&i| self.nodes[i].alive && !self.nodes[i].wut.is_empty())
            .map(NodeId)
            .collect()
    }

    /// All alive nodes in the subtree of `ancestor`, preorder.
    pub fn subtree_nodes(&self, ancestor: NodeId) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut stack = vec![ancestor];
        while let Some(id) = stack.pop() {
            if !self.nodes[id.0].alive {
                continue;
            }
            out.push(id);
            for child in self.nodes[id.0].children.iter().flatten() {
                stack.push(*child);
            }
        }
        out
    }

    /// Re-check both wakeup-tree conditions at every alive node by direct
    /// recomputation: each branch's weak initials avoid the anchor's sleep
    /// set, and no earlier sibling (done entry or older branch) is a weak
    /// initial of a later branch. Quadratic in tree size; meant for
    /// debug-assertion sampling and tests on small runs.
    pub fn check_wakeup_conditions(&self, program: &Program) {
        for id in (0..self.nodes.len()).map(NodeId) {
            let node = &self.nodes[id.0];
            if !node.alive || node.wut.is_empty() {
                continue;
            }
            let state = crate::model::replay(program, &self.path_actors(id))
                .expect("node prefixes replay");
            for branch in collect_branches(program, &state, &node.wut) {
                let wi = crate::independence::weak_initials_at(program, &state, &branch);
                for p in &node.sleep {
                    assert!(
                        !wi.contains(p),
                        "sleeping {p} is a weak initial of a pending branch at {id:?}"
                    );
                }
            }
            check_sibling_order(program, &state, &node.wut, &node.done);
        }
    }

    /// Deterministic indented dump of the tree and its wakeup trees, for
    /// golden tests and debugging.
    pub fn dump(&self, program: &Program) -> String {
        let names = |a: ActorId| program.actors[a.0].name.clone();
        let mut out = String::new();
        self.dump_node(self.root, &names, 0, &mut out);
        out
    }

    fn dump_node(
        &self,
        id: NodeId,
        names: &dyn Fn(ActorId) -> String,
        indent: usize,
        out: &mut String,
    ) {
        let n = &self.nodes[id.0];
        let pad = "  ".repeat(indent);
        let label = match &n.edge {
            None => "root".to_owned(),
            Some(t) => names(t.actor),
        };
        let done = n.done.iter().map(|&a| names(a)).collect::<Vec<_>>().join(",");
        let sleep = n
            .sleep
            .iter()
            .map(|&a| names(a))
            .collect::<Vec<_>>()
            .join(",");
        let mut wut = String::new();
        n.wut.render(names, &mut wut);
        let mut flags = String::new();
        if n.maximal {
            flags.push_str(" maximal");
        }
        let _ = writeln!(
            out,
            "{pad}{label} done=[{done}] sleep=[{sleep}] wut={wut}{flags}"
        );
        for (pos, child) in n.children.iter().enumerate() {
            match child {
                Some(c) => self.dump_node(*c, names, indent + 1, out),
                None => {
                    let cpad = "  ".repeat(indent + 1);
                    let _ = writeln!(out, "{cpad}{} collected", names(n.done[pos]));
                }
            }
        }
    }
}

impl Default for ExplorationTree {
    fn default() -> Self {
        ExplorationTree::new()
    }
}

fn remove_first_occurrence(v: &mut Vec<Transition>, p: ActorId) {
    if let Some(pos) = v.iter().position(|t| t.actor == p) {
        v.remove(pos);
    }
}

/// All branches of `wut` as executable transition sequences from `state`.
fn collect_branches(program: &Program, state: &SimState, wut: &WakeupTree) -> Vec<Vec<Transition>> {
    if wut.edges.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for (actor, sub) in &wut.edges {
        let stmt = state.pc(*actor);
        let head = Transition {
            actor: *actor,
            stmt,
            label: program.label(*actor, stmt),
            index: 0,
        };
        let mut next = state.clone();
        next.step(program, *actor);
        for mut rest in collect_branches(program, &next, sub) {
            rest.insert(0, head.clone());
            out.push(rest);
        }
    }
    out
}

/// The ordered-sibling condition: for every branch, no done entry and no
/// older sibling edge is a weak initial of it.
fn check_sibling_order(
    program: &Program,
    state: &SimState,
    wut: &WakeupTree,
    done_before: &[ActorId],
) {
    for (j, (actor, sub)) in wut.edges.iter().enumerate() {
        let stmt = state.pc(*actor);
        let head = Transition {
            actor: *actor,
            stmt,
            label: program.label(*actor, stmt),
            index: 0,
        };
        let mut next = state.clone();
        next.step(program, *actor);
        for rest in collect_branches(program, &next, sub) {
            let mut branch = vec![head.clone()];
            branch.extend(rest);
            for &p in done_before {
                assert!(
                    !crate::independence::is_weak_initial(program, state, &branch, p),
                    "done entry {p} is a weak initial of a later branch"
                );
            }
            for (earlier, _) in &wut.edges[..j] {
                assert!(
                    !crate::independence::is_weak_initial(program, state, &branch, *earlier),
                    "older sibling {earlier} is a weak initial of a later branch"
                );
            }
        }
        check_sibling_order(program, &next, sub, &[]);
    }
}

/// Walk the wakeup tree with the same first-weak-initial rule as the done
/// walk; append what remains of `v` when no ordered child matches. Returns
/// false when `v` was fully consumed along existing branches (subsumed).
fn wut_insert(
    program: &Program,
    mut state: SimState,
    wut: &mut WakeupTree,
    mut v: Vec<Transition>,
) -> bool {
    let mut node = wut;
    loop {
        if v.is_empty() {
            return false;
        }
        let hit = node
            .edges
            .iter()
            .position(|(a, _)| is_weak_initial(program, &state, &v, *a));
        match hit {
            Some(pos) => {
                let p = node.edges[pos].0;
                state.step(program, p);
                remove_first_occurrence(&mut v, p);
                node = &mut node.edges[pos].1;
            }
            None => {
                let actors: Vec<ActorId> = v.iter().map(|t| t.actor).collect();
                node.append_chain(&actors);
                return true;
            }
        }
    }
}
