//! Parameterized benchmark program generators and a random well-formed
//! program generator for property tests.

use crate::model::{
    Action, ActorDecl, ActorId, BarrierDecl, BarrierId, MailboxId, MutexId, Program,
    SemaphoreDecl, SemaphoreId,
};
use crate::rng::SplitMix64;

/// The three-actor wildcard-receive pattern: two actors send to a third
/// actor's mailbox; the receiver posts a wildcard receive, waits, then posts
/// a receive filtered to the second sender and waits again. Deadlocks
/// whenever the second sender's message is consumed by the wildcard.
pub fn wildcard_pattern() -> Program {
    Program {
        mailboxes: vec!["inbox".into()],
        mutexes: vec![],
        semaphores: vec![],
        barriers: vec![],
        actors: vec![
            ActorDecl {
                name: "p1".into(),
                body: vec![Action::AsyncSend {
                    mailbox: MailboxId(0),
                }],
            },
            ActorDecl {
                name: "p2".into(),
                body: vec![Action::AsyncSend {
                    mailbox: MailboxId(0),
                }],
            },
            ActorDecl {
                name: "p3".into(),
                body: vec![
                    Action::AsyncRecv {
                        mailbox: MailboxId(0),
                        source: None,
                    },
                    Action::Wait { comm: 0 },
                    Action::AsyncRecv {
                        mailbox: MailboxId(0),
                        source: Some(ActorId(1)),
                    },
                    Action::Wait { comm: 2 },
                ],
            },
        ],
    }
}

/// The wildcard pattern scaled by `rounds` message rendezvous between the
/// sends and the receives: per round each sender posts one token to a
/// dedicated sync mailbox and the receiver consumes one token (wildcard)
/// before moving on. `rounds == 0` is exactly [`wildcard_pattern`]. Tokens
/// on one mailbox are pairwise dependent, so every added round multiplies
/// the number of equivalence classes while the inbox pattern (and its
/// deadlock) is untouched.
pub fn mpi_any(rounds: u32) -> Program {
    let mut p = wildcard_pattern();
    if rounds == 0 {
        return p;
    }
    p.mailboxes.push("sync".into());
    let sync = MailboxId(1);
    // Senders post their round tokens after the real send.
    for sender in 0..2 {
        for _ in 0..rounds {
            p.actors[sender].body.push(Action::AsyncSend { mailbox: sync });
        }
    }
    // One token consumed per round before the real receives.
    let mut gather = Vec::new();
    for _ in 0..rounds {
        let recv = gather.len();
        gather.push(Action::AsyncRecv {
            mailbox: sync,
            source: None,
        });
        gather.push(Action::Wait { comm: recv });
    }
    let shift = gather.len();
    gather.extend(p.actors[2].body.iter().map(|a| match *a {
        Action::Wait { comm } => Action::Wait { comm: comm + shift },
        ref other => other.clone(),
    }));
    p.actors[2].body = gather;
    p
}

/// Dining philosophers with one mutex per fork: philosopher `i` locks fork
/// `i`, then fork `(i + 1) % n`, eats, and unlocks in reverse order. All
/// philosophers grabbing their first fork at once is the classic deadlock.
pub fn philosophers_mutex(n: usize) -> Program {
    assert!(n >= 2, "need at least two philosophers");
    Program {
        mailboxes: vec![],
        mutexes: (0..n).map(|i| format!("fork{i}")).collect(),
        semaphores: vec![],
        barriers: vec![],
        actors: (0..n)
            .map(|i| {
                let first = MutexId(i);
                let second = MutexId((i + 1) % n);
                ActorDecl {
                    name: format!("phil{i}"),
                    body: vec![
                        Action::MutexAsyncLock { mutex: first },
                        Action::MutexWait { mutex: first },
                        Action::MutexAsyncLock { mutex: second },
                        Action::MutexWait { mutex: second },
                        Action::LocalStep,
                        Action::MutexUnlock { mutex: second },
                        Action::MutexUnlock { mutex: first },
                    ],
                }
            })
            .collect(),
    }
}

/// [`philosophers_mutex`] wrapped in a table semaphore whose initial token
/// count equals the philosopher count, so it restricts nothing and the
/// deadlock survives, but the interleaving space grows.
pub fn philosophers_semaphore(n: usize) -> Program {
    let mut p = philosophers_mutex(n);
    p.semaphores.push(SemaphoreDecl {
        name: "table".into(),
        tokens: n as u32,
    });
    for actor in &mut p.actors {
        let mut body = vec![
            Action::SemAsyncAcquire {
                sem: SemaphoreId(0),
            },
            Action::SemWait {
                sem: SemaphoreId(0),
            },
        ];
        body.append(&mut actor.body);
        body.push(Action::SemRelease {
            sem: SemaphoreId(0),
        });
        actor.body = body;
    }
    p
}

/// `n` actors each sending once to one shared mailbox. All sends are
/// pairwise dependent, so every interleaving is its own class: exactly `n!`
/// classes.
pub fn factorial_bench(n: usize) -> Program {
    assert!(n >= 1);
    Program {
        mailboxes: vec!["shared".into()],
        mutexes: vec![],
        semaphores: vec![],
        barriers: vec![],
        actors: (0..n)
            .map(|i| ActorDecl {
                name: format!("s{i}"),
                body: vec![Action::AsyncSend {
                    mailbox: MailboxId(0),
                }],
            })
            .collect(),
    }
}

/// Busy-waiting benchmark: the wildcard deadlock pattern plus a polling
/// actor that spins on a flag mailbox fed by two tickers (`polls` ticks
/// each, the loop unrolled) before running the buggy receive pair. The
/// faulty reversal anchors at the very first transitions, so a depth-first
/// order grinds through the tick interleavings before trying it, while an
/// out-of-order exploration can jump straight there.
pub fn polling_loop(polls: usize) -> Program {
    let inbox = MailboxId(0);
    let flag = MailboxId(1);
    let tick = |n: usize| ActorDecl {
        name: format!("tick{n}"),
        body: vec![Action::AsyncSend { mailbox: flag }; polls],
    };
    let mut spin = Vec::new();
    for _ in 0..2 * polls {
        let recv = spin.len();
        spin.push(Action::AsyncRecv {
            mailbox: flag,
            source: None,
        });
        spin.push(Action::Wait { comm: recv });
    }
    let first_recv = spin.len();
    spin.push(Action::AsyncRecv {
        mailbox: inbox,
        source: None,
    });
    spin.push(Action::Wait { comm: first_recv });
    spin.push(Action::AsyncRecv {
        mailbox: inbox,
        source: Some(ActorId(1)),
    });
    spin.push(Action::Wait { comm: first_recv + 2 });
    Program {
        mailboxes: vec!["inbox".into(), "flag".into()],
        mutexes: vec![],
        semaphores: vec![],
        barriers: vec![],
        actors: vec![
            ActorDecl {
                name: "p1".into(),
                body: vec![Action::AsyncSend { mailbox: inbox }],
            },
            ActorDecl {
                name: "p2".into(),
                body: vec![Action::AsyncSend { mailbox: inbox }],
            },
            tick(0),
            tick(1),
            ActorDecl {
                name: "spin".into(),
                body: spin,
            },
        ],
    }
}

/// Size bounds for [`random_program`].
#[derive(Debug, Clone, Copy)]
pub struct RandomBounds {
    pub max_actors: usize,
    pub max_total_statements: usize,
}

impl Default for RandomBounds {
    fn default() -> Self {
        RandomBounds {
            max_actors: 4,
            max_total_statements: 12,
        }
    }
}

/// A random well-formed program. Statements are added in fragments that
/// keep the per-actor pairing discipline intact (lock/wait/unlock,
/// acquire/wait/release, arrive/wait), waits always reference an earlier
/// post, and `Fail` is never emitted so the result stays persistent.
/// Barriers span all actors with capacity equal to the actor count.
pub fn random_program(seed: u64, bounds: RandomBounds) -> Program {
    let mut rng = SplitMix64::new(seed);
    let n_actors = 2 + (rng.below(bounds.max_actors.max(2) as u64 - 1) as usize);
    let n_mailboxes = 1 + rng.below(2) as usize;
    let n_mutexes = 1 + rng.below(2) as usize;
    let n_sems = rng.below(2) as usize;

    let mut p = Program {
        mailboxes: (0..n_mailboxes).map(|i| format!("m{i}")).collect(),
        mutexes: (0..n_mutexes).map(|i| format!("mu{i}")).collect(),
        semaphores: (0..n_sems)
            .map(|i| SemaphoreDecl {
                name: format!("s{i}"),
                tokens: 1 + rng.below(2) as u32,
            })
            .collect(),
        barriers: vec![],
        actors: (0..n_actors)
            .map(|i| ActorDecl {
                name: format!("r{i}"),
                body: Vec::new(),
            })
            .collect(),
    };

    let mut total = 0usize;
    // Occasionally open with an all-actor barrier round.
    if rng.below(4) == 0 && bounds.max_total_statements >= 2 * n_actors + n_actors {
        p.barriers.push(BarrierDecl {
            name: "gate".into(),
            capacity: n_actors as u32,
        });
        for actor in &mut p.actors {
            actor.body.push(Action::BarrierAsyncArrive {
                barrier: BarrierId(0),
            });
            actor.body.push(Action::BarrierWait {
                barrier: BarrierId(0),
            });
        }
        total += 2 * n_actors;
    }

    while total < bounds.max_total_statements {
        let actor = rng.below(n_actors as u64) as usize;
        let body = &mut p.actors[actor].body;
        let remaining = bounds.max_total_statements - total;
        let fragment = rng.below(5);
        match fragment {
            0 => {
                let mailbox = MailboxId(rng.below(n_mailboxes as u64) as usize);
                body.push(Action::AsyncSend { mailbox });
                total += 1;
            }
            1 if remaining >= 2 => {
                let mailbox = MailboxId(rng.below(n_mailboxes as u64) as usize);
                let source = if rng.below(2) == 0 {
                    None
                } else {
                    Some(ActorId(rng.below(n_actors as u64) as usize))
                };
                let stmt = body.len();
                body.push(Action::AsyncRecv { mailbox, source });
                body.push(Action::Wait { comm: stmt });
                total += 2;
            }
            2 if remaining >= 4 => {
                let mutex = MutexId(rng.below(n_mutexes as u64) as usize);
                // Only if this actor is not already inside a critical
                // section on the same mutex; fragments always close it, so
                // appending a fresh one is safe.
                body.push(Action::MutexAsyncLock { mutex });
                body.push(Action::MutexWait { mutex });
                body.push(Action::LocalStep);
                body.push(Action::MutexUnlock { mutex });
                total += 4;
            }
            3 if n_sems > 0 && remaining >= 3 => {
                let sem = SemaphoreId(rng.below(n_sems as u64) as usize);
                body.push(Action::SemAsyncAcquire { sem });
                body.push(Action::SemWait { sem });
                body.push(Action::SemRelease { sem });
                total += 3;
            }
            _ => {
                body.push(Action::LocalStep);
                total += 1;
            }
        }
    }

    debug_assert_eq!(p.validate(), Ok(()));
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{classify_execution, Classification};
    use crate::oracle;

    #[test]
    fn mpi_any_zero_is_the_wildcard_pattern() {
        assert_eq!(mpi_any(0), wildcard_pattern());
    }

    #[test]
    fn mpi_any_scaling_grows_classes_and_keeps_the_deadlock() {
        let mut last = 0;
        for k in 0..=2 {
            let p = mpi_any(k);
            p.validate().unwrap();
            let classes = oracle::count_classes(&p, 1_000_000).unwrap();
            assert!(
                classes > last,
                "round {k}: {classes} classes not above {last}"
            );
            last = classes;
            let deadlocks = oracle::enumerate_all(&p, 1_000_000)
                .unwrap()
                .iter()
                .filter(|e| classify_execution(&p, e) == Classification::Deadlock)
                .count();
            assert!(deadlocks > 0, "round {k} lost the deadlock");
        }
    }

    #[test]
    fn philosophers_mutex_two_has_a_deadlock() {
        let p = philosophers_mutex(2);
        p.validate().unwrap();
        let all = oracle::enumerate_all(&p, 1_000_000).unwrap();
        assert!(all
            .iter()
            .any(|e| classify_execution(&p, e) == Classification::Deadlock));
    }

    #[test]
    fn philosophers_semaphore_grows_the_class_count() {
        let plain = oracle::count_classes(&philosophers_mutex(2), 1_000_000).unwrap();
        let wrapped = oracle::count_classes(&philosophers_semaphore(2), 1_000_000).unwrap();
        assert!(wrapped > plain, "{wrapped} vs {plain}");
        let p = philosophers_semaphore(2);
        let all = oracle::enumerate_all(&p, 1_000_000).unwrap();
        assert!(all
            .iter()
            .any(|e| classify_execution(&p, e) == Classification::Deadlock));
    }

    #[test]
    fn factorial_class_counts() {
        assert_eq!(oracle::count_classes(&factorial_bench(4), 100_000).unwrap(), 24);
        // All interleavings are distinct classes.
        assert_eq!(
            oracle::enumerate_all(&factorial_bench(4), 100_000).unwrap().len(),
            24
        );
    }

    #[test]
    fn random_programs_validate_and_stay_persistent_clean() {
        for seed in 0..200 {
            let p = random_program(seed, RandomBounds::default());
            p.validate().unwrap();
            assert!(p.total_statements() <= RandomBounds::default().max_total_statements);
            for actor in &p.actors {
                assert!(!actor.body.contains(&Action::Fail));
            }
        }
    }

    #[test]
    fn polling_loop_validates_and_deadlocks_somewhere() {
        let p = polling_loop(2);
        p.validate().unwrap();
        let all = oracle::enumerate_all(&p, 1_000_000).unwrap();
        assert!(all
            .iter()
            .any(|e| classify_execution(&p, e).is_faulty()));
    }
}
