//! Line-oriented program DSL: the interchange format between the benchmark
//! generators, the CLI and external tooling.
//!
//! ```text
//! actors 3
//! mailbox inbox
//! actor p1:
//!   send inbox
//! actor p2:
//!   send inbox
//! actor p3:
//!   recv inbox -> c0
//!   wait c0
//!   recv inbox from p2 -> c2
//!   wait c2
//! ```
//!
//! Declarations come first (`mailbox`, `mutex <name>`, `semaphore <name>
//! tokens <k>`, `barrier <name> size <k>`), then one indented block per
//! actor. Blocking statements are sugar that expands to an asynchronous post
//! plus a wait: `lock m` becomes `async_lock m; mutex_wait m`, `acquire s`
//! and `barrier b` likewise. `#` starts a comment.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::model::{
    Action, ActorDecl, ActorId, BarrierDecl, BarrierId, MailboxId, MutexId, Program,
    SemaphoreDecl, SemaphoreId, StmtIndex,
};

/// Parse failure with its 1-based source line.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: undeclared {kind} '{name}'")]
    Undeclared {
        line: usize,
        kind: &'static str,
        name: String,
    },
    #[error("line {line}: unknown wait variable '{name}'")]
    UnknownVar { line: usize, name: String },
    #[error("line {line}: duplicate name '{name}'")]
    Duplicate { line: usize, name: String },
    #[error("missing 'actors <n>' header")]
    MissingHeader,
    #[error("header declares {declared} actors but {found} actor blocks follow")]
    ActorCountMismatch { declared: usize, found: usize },
}

/// The program cannot be written in the DSL (waits on sends and split
/// acquire/arrive pairs have no surface syntax).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("actor {actor} statement {stmt}: {what}")]
pub struct EmitError {
    pub actor: usize,
    pub stmt: StmtIndex,
    pub what: String,
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

struct RawActor {
    name: String,
    lines: Vec<(usize, String)>,
}

/// Parse DSL text into a validated [`Program`].
pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    let mut header: Option<usize> = None;
    let mut mailboxes: Vec<String> = Vec::new();
    let mut mutexes: Vec<String> = Vec::new();
    let mut semaphores: Vec<SemaphoreDecl> = Vec::new();
    let mut barriers: Vec<BarrierDecl> = Vec::new();
    let mut raw_actors: Vec<RawActor> = Vec::new();
    let mut names_seen: HashMap<String, ()> = HashMap::new();

    let syntax = |line: usize, msg: &str| ParseError::Syntax {
        line,
        msg: msg.to_owned(),
    };

    // First pass: declarations, actor headers, raw statement lines.
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let without_comment = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        };
        if without_comment.trim().is_empty() {
            continue;
        }
        let indented = without_comment.starts_with(' ') || without_comment.starts_with('\t');
        if indented {
            let actor = raw_actors
                .last_mut()
                .ok_or_else(|| syntax(line_no, "statement outside an actor block"))?;
            actor.lines.push((line_no, without_comment.trim().to_owned()));
            continue;
        }
        let tokens: Vec<&str> = without_comment.split_whitespace().collect();
        let mut declare = |name: &str| -> Result<String, ParseError> {
            if !is_identifier(name) {
                return Err(syntax(line_no, &format!("invalid identifier '{name}'")));
            }
            if names_seen.insert(name.to_owned(), ()).is_some() {
                return Err(ParseError::Duplicate {
                    line: line_no,
                    name: name.to_owned(),
                });
            }
            Ok(name.to_owned())
        };
        match tokens.as_slice() {
            ["actors", n] => {
                let count: usize = n
                    .parse()
                    .map_err(|_| syntax(line_no, "actors header needs a count"))?;
                if header.replace(count).is_some() {
                    return Err(syntax(line_no, "duplicate actors header"));
                }
            }
            ["mailbox", name] => mailboxes.push(declare(name)?),
            ["mutex", name] => mutexes.push(declare(name)?),
            ["semaphore", name, "tokens", k] => {
                let tokens_count: u32 = k
                    .parse()
                    .map_err(|_| syntax(line_no, "semaphore token count must be an integer"))?;
                semaphores.push(SemaphoreDecl {
                    name: declare(name)?,
                    tokens: tokens_count,
                });
            }
            ["barrier", name, "size", k] => {
                let capacity: u32 = k
                    .parse()
                    .map_err(|_| syntax(line_no, "barrier size must be an integer"))?;
                if capacity == 0 {
                    return Err(syntax(line_no, "barrier size must be positive"));
                }
                barriers.push(BarrierDecl {
                    name: declare(name)?,
                    capacity,
                });
            }
            [head] if head.starts_with("actor") => {
                return Err(syntax(line_no, "actor header needs a name: 'actor <name>:'"));
            }
            ["actor", name_colon] => {
                let name = name_colon
                    .strip_suffix(':')
                    .ok_or_else(|| syntax(line_no, "actor header must end with ':'"))?;
                raw_actors.push(RawActor {
                    name: declare(name)?,
                    lines: Vec::new(),
                });
            }
            _ => return Err(syntax(line_no, "unrecognized declaration")),
        }
    }

    let declared = header.ok_or(ParseError::MissingHeader)?;
    if declared != raw_actors.len() {
        return Err(ParseError::ActorCountMismatch {
            declared,
            found: raw_actors.len(),
        });
    }

    let mailbox_ids: HashMap<&str, MailboxId> = mailboxes
        .iter()
        .enumerate()
        .map(|(i, n)| (n.as_str(), MailboxId(i)))
        .collect();
    let mutex_ids: HashMap<&str, MutexId> = mutexes
        .iter()
        .enumerate()
        .map(|(i, n)| (n.as_str(), MutexId(i)))
        .collect();
    let sem_ids: HashMap<&str, SemaphoreId> = semaphores
        .iter()
        .enumerate()
        .map(|(i, s)| (s.name.as_str(), SemaphoreId(i)))
        .collect();
    let barrier_ids: HashMap<&str, BarrierId> = barriers
        .iter()
        .enumerate()
        .map(|(i, b)| (b.name.as_str(), BarrierId(i)))
        .collect();
    let actor_ids: HashMap<&str, ActorId> = raw_actors
        .iter()
        .enumerate()
        .map(|(i, a)| (a.name.as_str(), ActorId(i)))
        .collect();

    // Second pass: statements, with sugar expansion and wait-variable
    // resolution.
    let mut actors = Vec::with_capacity(raw_actors.len());
    for raw in &raw_actors {
        let mut body: Vec<Action> = Vec::new();
        let mut vars: HashMap<String, StmtIndex> = HashMap::new();
        for (line_no, stmt) in &raw.lines {
            let line_no = *line_no;
            let tokens: Vec<&str> = stmt.split_whitespace().collect();
            let lookup = |kind: &'static str, name: &str| ParseError::Undeclared {
                line: line_no,
                kind,
                name: name.to_owned(),
            };
            match tokens.as_slice() {
                ["send", mbox] => {
                    let mailbox = *mailbox_ids.get(mbox).ok_or_else(|| lookup("mailbox", mbox))?;
                    body.push(Action::AsyncSend { mailbox });
                }
                ["recv", mbox, rest @ ..] => {
                    let mailbox = *mailbox_ids.get(mbox).ok_or_else(|| lookup("mailbox", mbox))?;
                    let (source, var) = match rest {
                        ["->", var] => (None, var),
                        ["from", actor, "->", var] => {
                            let src = *actor_ids
                                .get(actor)
                                .ok_or_else(|| lookup("actor", actor))?;
                            (Some(src), var)
                        }
                        _ => {
                            return Err(syntax(
                                line_no,
                                "recv syntax: recv <mailbox> [from <actor>] -> <var>",
                            ))
                        }
                    };
                    if !is_identifier(var) {
                        return Err(syntax(line_no, &format!("invalid variable '{var}'")));
                    }
                    if vars.insert((*var).to_owned(), body.len()).is_some() {
                        return Err(ParseError::Duplicate {
                            line: line_no,
                            name: (*var).to_owned(),
                        });
                    }
                    body.push(Action::AsyncRecv { mailbox, source });
                }
                ["wait", var] => {
                    let comm = *vars.get(*var).ok_or_else(|| ParseError::UnknownVar {
                        line: line_no,
                        name: (*var).to_owned(),
                    })?;
                    body.push(Action::Wait { comm });
                }
                ["waitall", vars_rest @ ..] if !vars_rest.is_empty() => {
                    let mut comms = Vec::with_capacity(vars_rest.len());
                    for var in vars_rest {
                        comms.push(*vars.get(*var).ok_or_else(|| ParseError::UnknownVar {
                            line: line_no,
                            name: (*var).to_owned(),
                        })?);
                    }
                    body.push(Action::WaitAll { comms });
                }
                ["lock", name] => {
                    let mutex = *mutex_ids.get(name).ok_or_else(|| lookup("mutex", name))?;
                    body.push(Action::MutexAsyncLock { mutex });
                    body.push(Action::MutexWait { mutex });
                }
                ["async_lock", name] => {
                    let mutex = *mutex_ids.get(name).ok_or_else(|| lookup("mutex", name))?;
                    body.push(Action::MutexAsyncLock { mutex });
                }
                ["mutex_wait", name] => {
                    let mutex = *mutex_ids.get(name).ok_or_else(|| lookup("mutex", name))?;
                    body.push(Action::MutexWait { mutex });
                }
                ["unlock", name] => {
                    let mutex = *mutex_ids.get(name).ok_or_else(|| lookup("mutex", name))?;
                    body.push(Action::MutexUnlock { mutex });
                }
                ["acquire", name] => {
                    let sem = *sem_ids.get(name).ok_or_else(|| lookup("semaphore", name))?;
                    body.push(Action::SemAsyncAcquire { sem });
                    body.push(Action::SemWait { sem });
                }
                ["release", name] => {
                    let sem = *sem_ids.get(name).ok_or_else(|| lookup("semaphore", name))?;
                    body.push(Action::SemRelease { sem });
                }
                ["barrier", name] => {
                    let barrier = *barrier_ids
                        .get(name)
                        .ok_or_else(|| lookup("barrier", name))?;
                    body.push(Action::BarrierAsyncArrive { barrier });
                    body.push(Action::BarrierWait { barrier });
                }
                ["local"] => body.push(Action::LocalStep),
                ["fail"] => body.push(Action::Fail),
                _ => return Err(syntax(line_no, "unrecognized statement")),
            }
        }
        actors.push(ActorDecl {
            name: raw.name.clone(),
            body,
        });
    }

    let program = Program {
        mailboxes,
        mutexes,
        semaphores,
        barriers,
        actors,
    };
    program.validate().map_err(|e| ParseError::Syntax {
        line: 0,
        msg: e.to_string(),
    })?;
    Ok(program)
}

/// Render a program back to DSL text. Adjacent post/wait pairs fold back
/// into their sugar forms; waited receives get deterministic variable names
/// `c<stmt>` so emit-parse-emit is a fixpoint.
pub fn emit_program(program: &Program) -> Result<String, EmitError> {
    let mut out = String::new();
    let _ = writeln!(out, "actors {}", program.actors.len());
    for m in &program.mailboxes {
        let _ = writeln!(out, "mailbox {m}");
    }
    for m in &program.mutexes {
        let _ = writeln!(out, "mutex {m}");
    }
    for s in &program.semaphores {
        let _ = writeln!(out, "semaphore {} tokens {}", s.name, s.tokens);
    }
    for b in &program.barriers {
        let _ = writeln!(out, "barrier {} size {}", b.name, b.capacity);
    }
    for (aidx, actor) in program.actors.iter().enumerate() {
        let _ = writeln!(out, "actor {}:", actor.name);
        let body = &actor.body;
        let mut i = 0;
        while i < body.len() {
            let fail = |what: &str| EmitError {
                actor: aidx,
                stmt: i,
                what: what.to_owned(),
            };
            match &body[i] {
                Action::AsyncSend { mailbox } => {
                    let _ = writeln!(out, "  send {}", program.mailboxes[mailbox.0]);
                }
                Action::AsyncRecv { mailbox, source } => {
                    let from = match source {
                        Some(a) => format!(" from {}", program.actors[a.0].name),
                        None => String::new(),
                    };
                    let _ = writeln!(
                        out,
                        "  recv {}{from} -> c{i}",
                        program.mailboxes[mailbox.0]
                    );
                }
                Action::Wait { comm } => {
                    if !matches!(body[*comm], Action::AsyncRecv { .. }) {
                        return Err(fail("wait on a send has no DSL form"));
                    }
                    let _ = writeln!(out, "  wait c{comm}");
                }
                Action::WaitAll { comms } => {
                    for comm in comms {
                        if !matches!(body[*comm], Action::AsyncRecv { .. }) {
                            return Err(fail("waitall on a send has no DSL form"));
                        }
                    }
                    let names: Vec<String> = comms.iter().map(|c| format!("c{c}")).collect();
                    let _ = writeln!(out, "  waitall {}", names.join(" "));
                }
                Action::MutexAsyncLock { mutex } => {
                    if matches!(body.get(i + 1), Some(Action::MutexWait { mutex: m }) if m == mutex)
                    {
                        let _ = writeln!(out, "  lock {}", program.mutexes[mutex.0]);
                        i += 1;
                    } else {
                        let _ = writeln!(out, "  async_lock {}", program.mutexes[mutex.0]);
                    }
                }
                Action::MutexWait { mutex } => {
                    let _ = writeln!(out, "  mutex_wait {}", program.mutexes[mutex.0]);
                }
                Action::MutexUnlock { mutex } => {
                    let _ = writeln!(out, "  unlock {}", program.mutexes[mutex.0]);
                }
                Action::SemAsyncAcquire { sem } => {
                    if matches!(body.get(i + 1), Some(Action::SemWait { sem: s }) if s == sem) {
                        let _ = writeln!(out, "  acquire {}", program.semaphores[sem.0].name);
                        i += 1;
                    } else {
                        return Err(fail("async acquire without adjacent wait has no DSL form"));
                    }
                }
                Action::SemWait { .. } => {
                    return Err(fail("bare sem wait has no DSL form"));
                }
                Action::SemRelease { sem } => {
                    let _ = writeln!(out, "  release {}", program.semaphores[sem.0].name);
                }
                Action::BarrierAsyncArrive { barrier } => {
                    if matches!(body.get(i + 1), Some(Action::BarrierWait { barrier: b }) if b == barrier)
                    {
                        let _ = writeln!(out, "  barrier {}", program.barriers[barrier.0].name);
                        i += 1;
                    } else {
                        return Err(fail("barrier arrive without adjacent wait has no DSL form"));
                    }
                }
                Action::BarrierWait { .. } => {
                    return Err(fail("bare barrier wait has no DSL form"));
                }
                Action::LocalStep => {
                    let _ = writeln!(out, "  local");
                }
                Action::Fail => {
                    let _ = writeln!(out, "  fail");
                }
            }
            i += 1;
        }
    }
    Ok(out)
}
