//! Actor programming model and deterministic replay simulator.
//!
//! A [`Program`] declares shared objects (mailboxes, mutexes, semaphores,
//! barriers) and gives each actor a finite, straight-line statement list.
//! [`SimState`] is the explicit simulator state; the whole state space is
//! reconstructed on demand by replaying actor sequences from
//! [`SimState::initial`], which is what makes stateless exploration possible.
//!
//! Blocking operations are split into an asynchronous post followed by a
//! blocking wait (`MutexAsyncLock` + `MutexWait`, and so on). The split keeps
//! the model *persistent*: an enabled actor stays enabled until it moves,
//! which the reduction layer relies on. The one deliberate exception is
//! `Fail`, which crashes the program and empties the enabled set.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

/// Actor identity: dense indices `0..n` for an `n`-actor program.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ActorId(pub usize);

impl fmt::Display for ActorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{}", self.0)
    }
}

/// Mailbox index into [`Program::mailboxes`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MailboxId(pub usize);

/// Mutex index into [`Program::mutexes`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MutexId(pub usize);

/// Semaphore index into [`Program::semaphores`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SemaphoreId(pub usize);

/// Barrier index into [`Program::barriers`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BarrierId(pub usize);

/// A shared object reference, uniquely identified by kind and index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ObjectId {
    Mailbox(MailboxId),
    Mutex(MutexId),
    Semaphore(SemaphoreId),
    Barrier(BarrierId),
}

/// Position of a statement in its actor's statement list. Doubles as the
/// handle naming the communication posted there (for `Wait`/`WaitAll`).
pub type StmtIndex = usize;

/// One primitive statement of an actor.
///
/// `Wait`/`WaitAll` reference earlier `AsyncSend`/`AsyncRecv` statements of
/// the *same* actor by their statement index.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Action {
    /// Post a send to a mailbox. Non-blocking; matches the oldest compatible
    /// pending receive, FIFO.
    AsyncSend { mailbox: MailboxId },
    /// Post a receive on a mailbox; `source: None` is the wildcard.
    AsyncRecv {
        mailbox: MailboxId,
        source: Option<ActorId>,
    },
    /// Block until the referenced communication is matched.
    Wait { comm: StmtIndex },
    /// Block until all referenced communications are matched.
    WaitAll { comms: Vec<StmtIndex> },
    /// Join the mutex requester queue. Never blocks.
    MutexAsyncLock { mutex: MutexId },
    /// Block until the caller heads the requester queue.
    MutexWait { mutex: MutexId },
    /// Release the mutex, promoting the next requester.
    MutexUnlock { mutex: MutexId },
    /// Join the semaphore acquirer queue. Never blocks.
    SemAsyncAcquire { sem: SemaphoreId },
    /// Block until the caller's queue position is below the token count.
    SemWait { sem: SemaphoreId },
    /// Return one token.
    SemRelease { sem: SemaphoreId },
    /// Register arrival at the barrier's current generation. Never blocks.
    BarrierAsyncArrive { barrier: BarrierId },
    /// Block until the registered generation has completed.
    BarrierWait { barrier: BarrierId },
    /// Crash the program: the execution becomes maximal immediately.
    Fail,
    /// Neutral local work; independent of everything.
    LocalStep,
}

impl Action {
    /// The shared object this action operates on, if any.
    pub fn object(&self) -> Option<ObjectId> {
        match *self {
            Action::AsyncSend { mailbox } | Action::AsyncRecv { mailbox, .. } => {
                Some(ObjectId::Mailbox(mailbox))
            }
            Action::MutexAsyncLock { mutex }
            | Action::MutexWait { mutex }
            | Action::MutexUnlock { mutex } => Some(ObjectId::Mutex(mutex)),
            Action::SemAsyncAcquire { sem }
            | Action::SemWait { sem }
            | Action::SemRelease { sem } => Some(ObjectId::Semaphore(sem)),
            Action::BarrierAsyncArrive { barrier } | Action::BarrierWait { barrier } => {
                Some(ObjectId::Barrier(barrier))
            }
            Action::Wait { .. } | Action::WaitAll { .. } | Action::Fail | Action::LocalStep => None,
        }
    }
}

/// What a pending `Wait` is waiting on: the completion of one communication
/// endpoint. Derived statically from the waited statement; this is the
/// information the dependency relation needs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WaitTarget {
    /// Completion of a send posted by `sender` to `mailbox`.
    SendDone { mailbox: MailboxId, sender: ActorId },
    /// Completion of a receive posted on `mailbox` with the given source
    /// filter (`None` = wildcard).
    RecvDone {
        mailbox: MailboxId,
        source: Option<ActorId>,
    },
}

/// Dependency-relevant label of a transition. Same shape as [`Action`]
/// except that waits carry the communications they observe and mailbox posts
/// carry the poster's identity.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ActionLabel {
    Send {
        mailbox: MailboxId,
        sender: ActorId,
    },
    Recv {
        mailbox: MailboxId,
        source: Option<ActorId>,
    },
    WaitComms(Vec<WaitTarget>),
    MutexOp {
        mutex: MutexId,
        kind: MutexOpKind,
    },
    SemOp {
        sem: SemaphoreId,
        kind: SemOpKind,
    },
    BarrierArrive(BarrierId),
    BarrierWait(BarrierId),
    Fail,
    Local,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MutexOpKind {
    Lock,
    Wait,
    Unlock,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SemOpKind {
    Acquire,
    Wait,
    Release,
}

/// Semaphore declaration: name and initial token count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemaphoreDecl {
    pub name: String,
    pub tokens: u32,
}

/// Barrier declaration: name and capacity (arrivals per generation).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BarrierDecl {
    pub name: String,
    pub capacity: u32,
}

/// One actor: a name and its finite statement list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActorDecl {
    pub name: String,
    pub body: Vec<Action>,
}

/// A whole program: shared object declarations plus per-actor statement
/// lists. Programs are finite and loop-free, so every execution is bounded
/// by the total statement count.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Program {
    pub mailboxes: Vec<String>,
    pub mutexes: Vec<String>,
    pub semaphores: Vec<SemaphoreDecl>,
    pub barriers: Vec<BarrierDecl>,
    pub actors: Vec<ActorDecl>,
}

/// Structural validation failure. `actor`/`stmt` locate the offending
/// statement.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("actor {actor} statement {stmt}: undeclared {kind} index {index}")]
    UndeclaredObject {
        actor: usize,
        stmt: StmtIndex,
        kind: &'static str,
        index: usize,
    },
    #[error("actor {actor} statement {stmt}: wait references statement {target}, which is not an earlier send or receive of the same actor")]
    BadWaitRef {
        actor: usize,
        stmt: StmtIndex,
        target: StmtIndex,
    },
    #[error("actor {actor} statement {stmt}: {what}")]
    BadPairing {
        actor: usize,
        stmt: StmtIndex,
        what: String,
    },
    #[error("actor {actor} has invalid source filter {filter} (only {count} actors declared)")]
    BadSourceFilter {
        actor: usize,
        filter: usize,
        count: usize,
    },
}

impl Program {
    pub fn actor_count(&self) -> usize {
        self.actors.len()
    }

    /// Total statement count over all actors; an upper bound on the length
    /// of any execution.
    pub fn total_statements(&self) -> usize {
        self.actors.iter().map(|a| a.body.len()).sum()
    }

    pub fn statement(&self, actor: ActorId, stmt: StmtIndex) -> &Action {
        &self.actors[actor.0].body[stmt]
    }

    /// Dependency label of statement `stmt` of `actor`.
    pub fn label(&self, actor: ActorId, stmt: StmtIndex) -> ActionLabel {
        let wait_target = |comm: StmtIndex| match self.actors[actor.0].body[comm] {
            Action::AsyncSend { mailbox } => WaitTarget::SendDone {
                mailbox,
                sender: actor,
            },
            Action::AsyncRecv { mailbox, source } => WaitTarget::RecvDone { mailbox, source },
            ref other => panic!("wait target {comm} of {actor} is not a post: {other:?}"),
        };
        match *self.statement(actor, stmt) {
            Action::AsyncSend { mailbox } => ActionLabel::Send {
                mailbox,
                sender: actor,
            },
            Action::AsyncRecv { mailbox, source } => ActionLabel::Recv { mailbox, source },
            Action::Wait { comm } => ActionLabel::WaitComms(vec![wait_target(comm)]),
            Action::WaitAll { ref comms } => {
                ActionLabel::WaitComms(comms.iter().map(|&c| wait_target(c)).collect())
            }
            Action::MutexAsyncLock { mutex } => ActionLabel::MutexOp {
                mutex,
                kind: MutexOpKind::Lock,
            },
            Action::MutexWait { mutex } => ActionLabel::MutexOp {
                mutex,
                kind: MutexOpKind::Wait,
            },
            Action::MutexUnlock { mutex } => ActionLabel::MutexOp {
                mutex,
                kind: MutexOpKind::Unlock,
            },
            Action::SemAsyncAcquire { sem } => ActionLabel::SemOp {
                sem,
                kind: SemOpKind::Acquire,
            },
            Action::SemWait { sem } => ActionLabel::SemOp {
                sem,
                kind: SemOpKind::Wait,
            },
            Action::SemRelease { sem } => ActionLabel::SemOp {
                sem,
                kind: SemOpKind::Release,
            },
            Action::BarrierAsyncArrive { barrier } => ActionLabel::BarrierArrive(barrier),
            Action::BarrierWait { barrier } => ActionLabel::BarrierWait(barrier),
            Action::Fail => ActionLabel::Fail,
            Action::LocalStep => ActionLabel::Local,
        }
    }

    /// Check structural well-formedness: object references declared, wait
    /// handles point at earlier posts of the same actor, and the per-actor
    /// lock/acquire/arrive discipline is respected so that unlock or release
    /// without a completed wait can never occur at runtime.
    pub fn validate(&self) -> Result<(), ValidationError> {
        for (aidx, actor) in self.actors.iter().enumerate() {
            // Per-object bookkeeping for pairing checks.
            let mut mutex_state = vec![0u8; self.mutexes.len()]; // 0 idle, 1 requested, 2 held
            let mut sem_pending = vec![0u32; self.semaphores.len()];
            let mut sem_held = vec![0u32; self.semaphores.len()];
            let mut barrier_pending = vec![false; self.barriers.len()];

            for (sidx, action) in actor.body.iter().enumerate() {
                let undeclared =
                    |kind: &'static str, index: usize| ValidationError::UndeclaredObject {
                        actor: aidx,
                        stmt: sidx,
                        kind,
                        index,
                    };
                let pairing = |what: &str| ValidationError::BadPairing {
                    actor: aidx,
                    stmt: sidx,
                    what: what.to_owned(),
                };
                match *action {
                    Action::AsyncSend { mailbox } => {
                        if mailbox.0 >= self.mailboxes.len() {
                            return Err(undeclared("mailbox", mailbox.0));
                        }
                    }
                    Action::AsyncRecv { mailbox, source } => {
                        if mailbox.0 >= self.mailboxes.len() {
                            return Err(undeclared("mailbox", mailbox.0));
                        }
                        if let Some(src) = source {
                            if src.0 >= self.actors.len() {
                                return Err(ValidationError::BadSourceFilter {
                                    actor: aidx,
                                    filter: src.0,
                                    count: self.actors.len(),
                                });
                            }
                        }
                    }
                    Action::Wait { comm } => {
                        if !is_earlier_post(actor, comm, sidx) {
                            return Err(ValidationError::BadWaitRef {
                                actor: aidx,
                                stmt: sidx,
                                target: comm,
                            });
                        }
                    }
                    Action::WaitAll { ref comms } => {
                        for &comm in comms {
                            if !is_earlier_post(actor, comm, sidx) {
                                return Err(ValidationError::BadWaitRef {
                                    actor: aidx,
                                    stmt: sidx,
                                    target: comm,
                                });
                            }
                        }
                    }
                    Action::MutexAsyncLock { mutex } => {
                        if mutex.0 >= self.mutexes.len() {
                            return Err(undeclared("mutex", mutex.0));
                        }
                        match mutex_state[mutex.0] {
                            0 => mutex_state[mutex.0] = 1,
                            _ => {
                                return Err(pairing(
                                    "async_lock while already requesting or holding this mutex",
                                ))
                            }
                        }
                    }
                    Action::MutexWait { mutex } => {
                        if mutex.0 >= self.mutexes.len() {
                            return Err(undeclared("mutex", mutex.0));
                        }
                        match mutex_state[mutex.0] {
                            1 => mutex_state[mutex.0] = 2,
                            _ => return Err(pairing("mutex_wait without a preceding async_lock")),
                        }
                    }
                    Action::MutexUnlock { mutex } => {
                        if mutex.0 >= self.mutexes.len() {
                            return Err(undeclared("mutex", mutex.0));
                        }
                        match mutex_state[mutex.0] {
                            2 => mutex_state[mutex.0] = 0,
                            _ => return Err(pairing("unlock without a completed mutex_wait")),
                        }
                    }
                    Action::SemAsyncAcquire { sem } => {
                        if sem.0 >= self.semaphores.len() {
                            return Err(undeclared("semaphore", sem.0));
                        }
                        sem_pending[sem.0] += 1;
                    }
                    Action::SemWait { sem } => {
                        if sem.0 >= self.semaphores.len() {
                            return Err(undeclared("semaphore", sem.0));
                        }
                        if sem_pending[sem.0] == 0 {
                            return Err(pairing("sem_wait without a preceding async_acquire"));
                        }
                        sem_pending[sem.0] -= 1;
                        sem_held[sem.0] += 1;
                    }
                    Action::SemRelease { sem } => {
                        if sem.0 >= self.semaphores.len() {
                            return Err(undeclared("semaphore", sem.0));
                        }
                        if sem_held[sem.0] == 0 {
                            return Err(pairing("release without a completed sem_wait"));
                        }
                        sem_held[sem.0] -= 1;
                    }
                    Action::BarrierAsyncArrive { barrier } => {
                        if barrier.0 >= self.barriers.len() {
                            return Err(undeclared("barrier", barrier.0));
                        }
                        if barrier_pending[barrier.0] {
                            return Err(pairing(
                                "arrive while a previous arrival is still unawaited",
                            ));
                        }
                        barrier_pending[barrier.0] = true;
                    }
                    Action::BarrierWait { barrier } => {
                        if barrier.0 >= self.barriers.len() {
                            return Err(undeclared("barrier", barrier.0));
                        }
                        if !barrier_pending[barrier.0] {
                            return Err(pairing("barrier_wait without a preceding arrive"));
                        }
                        barrier_pending[barrier.0] = false;
                    }
                    Action::Fail | Action::LocalStep => {}
                }
            }
        }
        Ok(())
    }
}

fn is_earlier_post(actor: &ActorDecl, comm: StmtIndex, at: StmtIndex) -> bool {
    comm < at
        && matches!(
            actor.body[comm],
            Action::AsyncSend { .. } | Action::AsyncRecv { .. }
        )
}

/// A communication endpoint instance: the post executed at statement `stmt`
/// of `actor`. Unique per execution because actors are loop-free.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CommId {
    pub actor: ActorId,
    pub stmt: StmtIndex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct PendingRecv {
    comm: CommId,
    source: Option<ActorId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
struct MailboxState {
    pending_sends: VecDeque<CommId>,
    pending_recvs: VecDeque<PendingRecv>,
    /// Endpoints (both sides) of matched communications on this mailbox.
    matched: BTreeSet<CommId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
struct MutexState {
    /// Requester queue; the head is the holder once `held` is set.
    queue: VecDeque<ActorId>,
    held: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct SemaphoreState {
    tokens: u32,
    queue: VecDeque<ActorId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct BarrierState {
    /// Index of the generation currently filling.
    generation: u64,
    /// Arrivals registered in the current generation.
    arrived: u32,
    /// Per actor: the generation of its unconsumed arrival, if any.
    pending: Vec<Option<u64>>,
}

/// Explicit simulator state. Plain value: cloneable, comparable, hashable,
/// so exploration can fork and deduplicate states freely.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SimState {
    pcs: Vec<usize>,
    mailboxes: Vec<MailboxState>,
    mutexes: Vec<MutexState>,
    semaphores: Vec<SemaphoreState>,
    barriers: Vec<BarrierState>,
    crashed: bool,
    fail_witness: Option<ActorId>,
}

/// Outcome of a maximal execution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Classification {
    /// Every actor ran to completion.
    Safe,
    /// Some actor is stuck and the program did not crash.
    Deadlock,
    /// A `Fail` statement executed.
    Crash,
}

impl Classification {
    pub fn is_faulty(self) -> bool {
        !matches!(self, Classification::Safe)
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Classification::Safe => write!(f, "safe"),
            Classification::Deadlock => write!(f, "deadlock"),
            Classification::Crash => write!(f, "crash"),
        }
    }
}

/// Replay failure: the sequence asked a disabled actor to move.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("replay failed at step {index}: actor {actor} is not enabled")]
pub struct ReplayError {
    /// 0-based position of the offending element.
    pub index: usize,
    pub actor: ActorId,
}

impl SimState {
    /// The initial state: all program counters at zero, queues empty,
    /// semaphores at their declared token counts, barriers at generation
    /// zero, not crashed.
    pub fn initial(program: &Program) -> SimState {
        let n = program.actors.len();
        SimState {
            pcs: vec![0; n],
            mailboxes: vec![MailboxState::default(); program.mailboxes.len()],
            mutexes: vec![MutexState::default(); program.mutexes.len()],
            semaphores: program
                .semaphores
                .iter()
                .map(|s| SemaphoreState {
                    tokens: s.tokens,
                    queue: VecDeque::new(),
                })
                .collect(),
            barriers: program
                .barriers
                .iter()
                .map(|_| BarrierState {
                    generation: 0,
                    arrived: 0,
                    pending: vec![None; n],
                })
                .collect(),
            crashed: false,
            fail_witness: None,
        }
    }

    pub fn crashed(&self) -> bool {
        self.crashed
    }

    /// The actor whose `Fail` crashed the program, if any.
    pub fn fail_witness(&self) -> Option<ActorId> {
        self.fail_witness
    }

    pub fn pc(&self, actor: ActorId) -> usize {
        self.pcs[actor.0]
    }

    pub fn finished(&self, program: &Program, actor: ActorId) -> bool {
        self.pcs[actor.0] >= program.actors[actor.0].body.len()
    }

    /// The next statement of `actor`, without mutating state.
    ///
    /// Panics if the actor has finished.
    pub fn peek<'p>(&self, program: &'p Program, actor: ActorId) -> &'p Action {
        assert!(
            !self.finished(program, actor),
            "peek on finished actor {actor}"
        );
        program.statement(actor, self.pcs[actor.0])
    }

    /// Dependency label of the actor's next statement.
    pub fn peek_label(&self, program: &Program, actor: ActorId) -> ActionLabel {
        assert!(
            !self.finished(program, actor),
            "peek_label on finished actor {actor}"
        );
        program.label(actor, self.pcs[actor.0])
    }

    fn comm_matched(&self, program: &Program, comm: CommId) -> bool {
        let mailbox = match *program.statement(comm.actor, comm.stmt) {
            Action::AsyncSend { mailbox } | Action::AsyncRecv { mailbox, .. } => mailbox,
            ref other => panic!("comm handle {comm:?} is not a post: {other:?}"),
        };
        self.mailboxes[mailbox.0].matched.contains(&comm)
    }

    /// Whether `actor` can fire its next statement here.
    pub fn is_enabled(&self, program: &Program, actor: ActorId) -> bool {
        if self.crashed || self.finished(program, actor) {
            return false;
        }
        match *self.peek(program, actor) {
            Action::AsyncSend { .. }
            | Action::AsyncRecv { .. }
            | Action::MutexAsyncLock { .. }
            | Action::MutexUnlock { .. }
            | Action::SemAsyncAcquire { .. }
            | Action::SemRelease { .. }
            | Action::BarrierAsyncArrive { .. }
            | Action::Fail
            | Action::LocalStep => true,
            Action::Wait { comm } => self.comm_matched(program, CommId { actor, stmt: comm }),
            Action::WaitAll { ref comms } => comms
                .iter()
                .all(|&c| self.comm_matched(program, CommId { actor, stmt: c })),
            Action::MutexWait { mutex } => self.mutexes[mutex.0].queue.front() == Some(&actor),
            Action::SemWait { sem } => {
                let st = &self.semaphores[sem.0];
                match st.queue.iter().position(|&a| a == actor) {
                    Some(pos) => (pos as u32) < st.tokens,
                    None => panic!("sem_wait by {actor} without a queued acquire"),
                }
            }
            Action::BarrierWait { barrier } => {
                let st = &self.barriers[barrier.0];
                match st.pending[actor.0] {
                    Some(gen) => gen < st.generation,
                    None => panic!("barrier_wait by {actor} without a pending arrival"),
                }
            }
        }
    }

    /// The set of actors that can move, in ascending id order.
    pub fn enabled(&self, program: &Program) -> Vec<ActorId> {
        (0..program.actors.len())
            .map(ActorId)
            .filter(|&a| self.is_enabled(program, a))
            .collect()
    }

    /// Fire the next statement of `actor`. Deterministic: the successor is a
    /// function of the state alone.
    ///
    /// Panics if the actor is not enabled.
    pub fn step(&mut self, program: &Program, actor: ActorId) {
        assert!(
            self.is_enabled(program, actor),
            "step on disabled actor {actor}"
        );
        let stmt = self.pcs[actor.0];
        match *program.statement(actor, stmt) {
            Action::AsyncSend { mailbox } => {
                let comm = CommId { actor, stmt };
                let mb = &mut self.mailboxes[mailbox.0];
                let candidate = mb
                    .pending_recvs
                    .iter()
                    .position(|r| r.source.is_none() || r.source == Some(actor));
                match candidate {
                    Some(pos) => {
                        let recv = mb.pending_recvs.remove(pos).expect("position in range");
                        mb.matched.insert(recv.comm);
                        mb.matched.insert(comm);
                    }
                    None => mb.pending_sends.push_back(comm),
                }
            }
            Action::AsyncRecv { mailbox, source } => {
                let comm = CommId { actor, stmt };
                let mb = &mut self.mailboxes[mailbox.0];
                let candidate = mb
                    .pending_sends
                    .iter()
                    .position(|s| source.is_none() || source == Some(s.actor));
                match candidate {
                    Some(pos) => {
                        let send = mb.pending_sends.remove(pos).expect("position in range");
                        mb.matched.insert(send);
                        mb.matched.insert(comm);
                    }
                    None => mb.pending_recvs.push_back(PendingRecv { comm, source }),
                }
            }
            Action::Wait { .. } | Action::WaitAll { .. } | Action::LocalStep => {}
            Action::MutexAsyncLock { mutex } => {
                self.mutexes[mutex.0].queue.push_back(actor);
            }
            Action::MutexWait { mutex } => {
                let st = &mut self.mutexes[mutex.0];
                debug_assert_eq!(st.queue.front(), Some(&actor));
                debug_assert!(!st.held, "mutex_wait while mutex already held");
                st.held = true;
            }
            Action::MutexUnlock { mutex } => {
                let st = &mut self.mutexes[mutex.0];
                debug_assert!(st.held && st.queue.front() == Some(&actor));
                st.queue.pop_front();
                st.held = false;
            }
            Action::SemAsyncAcquire { sem } => {
                self.semaphores[sem.0].queue.push_back(actor);
            }
            Action::SemWait { sem } => {
                let st = &mut self.semaphores[sem.0];
                let pos = st
                    .queue
                    .iter()
                    .position(|&a| a == actor)
                    .expect("enabled sem_wait has a queued acquire");
                st.queue.remove(pos);
                st.tokens -= 1;
            }
            Action::SemRelease { sem } => {
                self.semaphores[sem.0].tokens += 1;
            }
            Action::BarrierAsyncArrive { barrier } => {
                let st = &mut self.barriers[barrier.0];
                debug_assert!(st.pending[actor.0].is_none());
                st.pending[actor.0] = Some(st.generation);
                st.arrived += 1;
                if st.arrived == program.barriers[barrier.0].capacity {
                    st.generation += 1;
                    st.arrived = 0;
                }
            }
            Action::BarrierWait { barrier } => {
                let st = &mut self.barriers[barrier.0];
                let gen = st.pending[actor.0].take().expect("pending arrival");
                debug_assert!(gen < st.generation);
            }
            Action::Fail => {
                self.crashed = true;
                self.fail_witness = Some(actor);
            }
        }
        self.pcs[actor.0] += 1;
    }

    /// Classify a maximal state.
    ///
    /// Panics unless the enabled set is empty.
    pub fn classify(&self, program: &Program) -> Classification {
        assert!(
            self.enabled(program).is_empty(),
            "classify on a non-maximal state"
        );
        if self.crashed {
            Classification::Crash
        } else if (0..program.actors.len()).all(|a| self.finished(program, ActorId(a))) {
            Classification::Safe
        } else {
            Classification::Deadlock
        }
    }
}

/// One executed transition: which actor moved, which statement it fired, and
/// the dependency label of that statement.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Transition {
    pub actor: ActorId,
    pub stmt: StmtIndex,
    pub label: ActionLabel,
    /// 1-based position in the containing execution.
    pub index: usize,
}

impl Transition {
    pub fn action<'p>(&self, program: &'p Program) -> &'p Action {
        program.statement(self.actor, self.stmt)
    }
}

/// A replayable sequence of transitions from the initial state.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Execution {
    pub steps: Vec<Transition>,
}

impl Execution {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// The actor sequence, which identifies the execution because actors are
    /// deterministic.
    pub fn actors(&self) -> Vec<ActorId> {
        self.steps.iter().map(|t| t.actor).collect()
    }
}

/// Fold `step` over `actors` from the initial state.
pub fn replay(program: &Program, actors: &[ActorId]) -> Result<SimState, ReplayError> {
    let mut state = SimState::initial(program);
    for (index, &actor) in actors.iter().enumerate() {
        if !state.is_enabled(program, actor) {
            return Err(ReplayError { index, actor });
        }
        state.step(program, actor);
    }
    Ok(state)
}

/// Replay and record the executed transitions.
pub fn replay_execution(
    program: &Program,
    actors: &[ActorId],
) -> Result<(SimState, Execution), ReplayError> {
    let mut state = SimState::initial(program);
    let mut steps = Vec::with_capacity(actors.len());
    for (index, &actor) in actors.iter().enumerate() {
        if !state.is_enabled(program, actor) {
            return Err(ReplayError { index, actor });
        }
        let stmt = state.pc(actor);
        steps.push(Transition {
            actor,
            stmt,
            label: program.label(actor, stmt),
            index: index + 1,
        });
        state.step(program, actor);
    }
    Ok((state, Execution { steps }))
}

/// Classify a maximal execution by replaying it.
///
/// Panics if the execution does not replay or is not maximal.
pub fn classify_execution(program: &Program, execution: &Execution) -> Classification {
    let state = replay(program, &execution.actors()).expect("execution must replay");
    state.classify(program)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::wildcard_pattern;

    fn single_actor(body: Vec<Action>) -> Program {
        Program {
            mailboxes: vec!["m".into()],
            mutexes: vec![],
            semaphores: vec![],
            barriers: vec![],
            actors: vec![ActorDecl {
                name: "a".into(),
                body,
            }],
        }
    }

    #[test]
    fn initial_state_single_sender() {
        let p = single_actor(vec![Action::AsyncSend {
            mailbox: MailboxId(0),
        }]);
        let s = SimState::initial(&p);
        assert_eq!(s.pcs, vec![0]);
        assert!(s.mailboxes[0].pending_sends.is_empty());
        assert!(s.mailboxes[0].pending_recvs.is_empty());
    }

    #[test]
    fn initial_state_wildcard_pattern() {
        let p = wildcard_pattern();
        let s = SimState::initial(&p);
        assert_eq!(s.pcs, vec![0, 0, 0]);
        assert!(s.mailboxes[0].matched.is_empty());
        assert!(!s.crashed());
    }

    #[test]
    fn initial_state_semaphore_tokens() {
        let p = Program {
            mailboxes: vec![],
            mutexes: vec![],
            semaphores: vec![SemaphoreDecl {
                name: "s".into(),
                tokens: 2,
            }],
            barriers: vec![],
            actors: vec![],
        };
        let s = SimState::initial(&p);
        assert_eq!(s.semaphores[0].tokens, 2);
    }

    #[test]
    fn enabled_all_posts_at_start() {
        let p = wildcard_pattern();
        let s = SimState::initial(&p);
        assert_eq!(s.enabled(&p), vec![ActorId(0), ActorId(1), ActorId(2)]);
    }

    #[test]
    fn wait_disabled_until_matched() {
        let p = wildcard_pattern();
        let mut s = SimState::initial(&p);
        s.step(&p, ActorId(2)); // post recv(any); nobody has sent
        assert!(!s.is_enabled(&p, ActorId(2)));
        s.step(&p, ActorId(0)); // p1 sends, matching the pending receive
        assert!(s.is_enabled(&p, ActorId(2)));
    }

    #[test]
    fn mutex_wait_enabled_only_for_queue_head() {
        let p = Program {
            mailboxes: vec![],
            mutexes: vec!["mu".into()],
            semaphores: vec![],
            barriers: vec![],
            actors: (0..2)
                .map(|i| ActorDecl {
                    name: format!("a{i}"),
                    body: vec![
                        Action::MutexAsyncLock { mutex: MutexId(0) },
                        Action::MutexWait { mutex: MutexId(0) },
                        Action::MutexUnlock { mutex: MutexId(0) },
                    ],
                })
                .collect(),
        };
        let mut s = SimState::initial(&p);
        s.step(&p, ActorId(0));
        s.step(&p, ActorId(1));
        assert!(s.is_enabled(&p, ActorId(0)));
        assert!(!s.is_enabled(&p, ActorId(1)));
        s.step(&p, ActorId(0)); // wait completes; a0 holds
        s.step(&p, ActorId(0)); // unlock promotes a1
        assert!(s.is_enabled(&p, ActorId(1)));
    }

    #[test]
    fn peek_returns_next_statement() {
        let p = wildcard_pattern();
        let mut s = SimState::initial(&p);
        assert_eq!(
            s.peek(&p, ActorId(0)),
            &Action::AsyncSend {
                mailbox: MailboxId(0)
            }
        );
        s.step(&p, ActorId(2));
        assert_eq!(s.peek(&p, ActorId(2)), &Action::Wait { comm: 0 });
    }

    #[test]
    fn peek_fail_program() {
        let p = single_actor(vec![Action::Fail]);
        let s = SimState::initial(&p);
        assert_eq!(s.peek(&p, ActorId(0)), &Action::Fail);
    }

    #[test]
    #[should_panic(expected = "peek on finished actor")]
    fn peek_finished_actor_panics() {
        let p = single_actor(vec![Action::LocalStep]);
        let mut s = SimState::initial(&p);
        s.step(&p, ActorId(0));
        let _ = s.peek(&p, ActorId(0));
    }

    #[test]
    fn recv_any_matches_oldest_pending_send() {
        let p = wildcard_pattern();
        let mut s = SimState::initial(&p);
        s.step(&p, ActorId(1)); // p2 sends first
        s.step(&p, ActorId(2)); // recv(any) matches p2's send
        assert!(s.mailboxes[0].matched.contains(&CommId {
            actor: ActorId(1),
            stmt: 0
        }));
        assert!(s.mailboxes[0].matched.contains(&CommId {
            actor: ActorId(2),
            stmt: 0
        }));
    }

    #[test]
    fn independent_steps_commute() {
        let p = Program {
            mailboxes: vec!["m0".into(), "m1".into()],
            mutexes: vec![],
            semaphores: vec![],
            barriers: vec![],
            actors: vec![
                ActorDecl {
                    name: "a".into(),
                    body: vec![Action::AsyncSend {
                        mailbox: MailboxId(0),
                    }],
                },
                ActorDecl {
                    name: "b".into(),
                    body: vec![Action::AsyncSend {
                        mailbox: MailboxId(1),
                    }],
                },
            ],
        };
        let mut s1 = SimState::initial(&p);
        s1.step(&p, ActorId(0));
        s1.step(&p, ActorId(1));
        let mut s2 = SimState::initial(&p);
        s2.step(&p, ActorId(1));
        s2.step(&p, ActorId(0));
        assert_eq!(s1, s2);
    }

    #[test]
    fn fail_crashes_and_empties_enabled() {
        let p = Program {
            mailboxes: vec![],
            mutexes: vec![],
            semaphores: vec![],
            barriers: vec![],
            actors: vec![
                ActorDecl {
                    name: "a".into(),
                    body: vec![Action::Fail],
                },
                ActorDecl {
                    name: "b".into(),
                    body: vec![Action::LocalStep],
                },
            ],
        };
        let mut s = SimState::initial(&p);
        s.step(&p, ActorId(0));
        assert!(s.crashed());
        assert_eq!(s.fail_witness(), Some(ActorId(0)));
        assert!(s.enabled(&p).is_empty());
    }

    #[test]
    fn replay_empty_is_initial() {
        let p = wildcard_pattern();
        assert_eq!(replay(&p, &[]).unwrap(), SimState::initial(&p));
    }

    #[test]
    fn replay_deadlocking_run() {
        // p2 sends first, so the wildcard receive matches p2 and the
        // filtered receive can never complete.
        let p = wildcard_pattern();
        let run = [ActorId(1), ActorId(0), ActorId(2), ActorId(2), ActorId(2)];
        let s = replay(&p, &run).unwrap();
        // p3 sits at its final wait, which is not enabled.
        assert_eq!(s.pc(ActorId(2)), 3);
        assert!(!s.is_enabled(&p, ActorId(2)));
        assert!(s.enabled(&p).is_empty());
        assert_eq!(s.classify(&p), Classification::Deadlock);
    }

    #[test]
    fn replay_reports_offending_index() {
        let p = wildcard_pattern();
        let err = replay(&p, &[ActorId(2), ActorId(2)]).unwrap_err();
        assert_eq!(err.index, 1);
        assert_eq!(err.actor, ActorId(2));
    }

    #[test]
    fn classify_safe_run() {
        let p = wildcard_pattern();
        // p1 first: recv(any) matches p1, recv(from p2) matches p2.
        let run = [
            ActorId(0),
            ActorId(1),
            ActorId(2),
            ActorId(2),
            ActorId(2),
            ActorId(2),
        ];
        let (state, exec) = replay_execution(&p, &run).unwrap();
        assert!(state.enabled(&p).is_empty());
        assert_eq!(classify_execution(&p, &exec), Classification::Safe);
    }

    #[test]
    fn classify_crash() {
        let p = single_actor(vec![Action::Fail]);
        let (_, exec) = replay_execution(&p, &[ActorId(0)]).unwrap();
        assert_eq!(classify_execution(&p, &exec), Classification::Crash);
    }

    #[test]
    fn match_stability_along_continuations() {
        let p = wildcard_pattern();
        let mut s = SimState::initial(&p);
        s.step(&p, ActorId(1));
        s.step(&p, ActorId(2));
        let matched_before = s.mailboxes[0].matched.clone();
        s.step(&p, ActorId(0));
        s.step(&p, ActorId(2));
        assert!(s.mailboxes[0].matched.is_superset(&matched_before));
    }

    #[test]
    fn barrier_generations_cycle() {
        let p = Program {
            mailboxes: vec![],
            mutexes: vec![],
            semaphores: vec![],
            barriers: vec![BarrierDecl {
                name: "b".into(),
                capacity: 2,
            }],
            actors: (0..2)
                .map(|i| ActorDecl {
                    name: format!("a{i}"),
                    body: vec![
                        Action::BarrierAsyncArrive {
                            barrier: BarrierId(0),
                        },
                        Action::BarrierWait {
                            barrier: BarrierId(0),
                        },
                        Action::BarrierAsyncArrive {
                            barrier: BarrierId(0),
                        },
                        Action::BarrierWait {
                            barrier: BarrierId(0),
                        },
                    ],
                })
                .collect(),
        };
        let mut s = SimState::initial(&p);
        s.step(&p, ActorId(0));
        assert!(!s.is_enabled(&p, ActorId(0))); // generation 0 not complete
        s.step(&p, ActorId(1));
        assert!(s.is_enabled(&p, ActorId(0)));
        assert!(s.is_enabled(&p, ActorId(1)));
        s.step(&p, ActorId(0));
        s.step(&p, ActorId(0)); // arrive at generation 1
        assert!(!s.is_enabled(&p, ActorId(0)));
        s.step(&p, ActorId(1));
        s.step(&p, ActorId(1));
        assert!(s.is_enabled(&p, ActorId(0)));
        s.step(&p, ActorId(0));
        s.step(&p, ActorId(1));
        assert!(s.enabled(&p).is_empty());
        assert_eq!(s.classify(&p), Classification::Safe);
    }

    #[test]
    fn semaphore_queue_position_gates_wait() {
        let p = Program {
            mailboxes: vec![],
            mutexes: vec![],
            semaphores: vec![SemaphoreDecl {
                name: "s".into(),
                tokens: 1,
            }],
            barriers: vec![],
            actors: (0..2)
                .map(|i| ActorDecl {
                    name: format!("a{i}"),
                    body: vec![
                        Action::SemAsyncAcquire {
                            sem: SemaphoreId(0),
                        },
                        Action::SemWait {
                            sem: SemaphoreId(0),
                        },
                        Action::SemRelease {
                            sem: SemaphoreId(0),
                        },
                    ],
                })
                .collect(),
        };
        let mut s = SimState::initial(&p);
        s.step(&p, ActorId(0));
        s.step(&p, ActorId(1));
        assert!(s.is_enabled(&p, ActorId(0)));
        assert!(!s.is_enabled(&p, ActorId(1))); // position 1 >= 1 token
        s.step(&p, ActorId(0)); // consumes the token
        assert!(!s.is_enabled(&p, ActorId(1)));
        s.step(&p, ActorId(0)); // release
        assert!(s.is_enabled(&p, ActorId(1)));
    }

    #[test]
    fn validate_rejects_undeclared_mailbox() {
        let p = single_actor(vec![Action::AsyncSend {
            mailbox: MailboxId(3),
        }]);
        assert!(matches!(
            p.validate(),
            Err(ValidationError::UndeclaredObject { index: 3, .. })
        ));
    }

    #[test]
    fn validate_rejects_unlock_without_hold() {
        let p = Program {
            mailboxes: vec![],
            mutexes: vec!["mu".into()],
            semaphores: vec![],
            barriers: vec![],
            actors: vec![ActorDecl {
                name: "a".into(),
                body: vec![Action::MutexUnlock { mutex: MutexId(0) }],
            }],
        };
        assert!(matches!(
            p.validate(),
            Err(ValidationError::BadPairing { .. })
        ));
    }

    #[test]
    fn validate_rejects_wait_on_later_statement() {
        let p = single_actor(vec![
            Action::Wait { comm: 1 },
            Action::AsyncSend {
                mailbox: MailboxId(0),
            },
        ]);
        assert!(matches!(
            p.validate(),
            Err(ValidationError::BadWaitRef { target: 1, .. })
        ));
    }

    #[test]
    fn validate_accepts_wildcard_pattern() {
        assert_eq!(wildcard_pattern().validate(), Ok(()));
    }

    #[test]
    fn acyclicity_replay_bounded_by_statement_count() {
        let p = wildcard_pattern();
        let bound = p.total_statements();
        // A maximal safe run uses every statement exactly once.
        let run = [
            ActorId(0),
            ActorId(1),
            ActorId(2),
            ActorId(2),
            ActorId(2),
            ActorId(2),
        ];
        assert_eq!(run.len(), bound);
        let s = replay(&p, &run).unwrap();
        assert!(s.enabled(&p).is_empty());
    }

    #[test]
    fn determinism_double_evaluation() {
        let p = wildcard_pattern();
        let s = SimState::initial(&p);
        for &a in &s.enabled(&p) {
            let mut s1 = s.clone();
            let mut s2 = s.clone();
            s1.step(&p, a);
            s2.step(&p, a);
            assert_eq!(s1, s2);
        }
    }
}
