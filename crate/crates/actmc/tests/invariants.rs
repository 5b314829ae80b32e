//! Cross-module invariants that go beyond single-module unit tests:
//! sleep-set soundness on faulty paths, tree shape under disabled garbage
//! collection, busy-waiting resilience of the out-of-order strategies, the
//! golden tree dump, and property tests over randomly generated programs.

use std::time::Duration;

use proptest::prelude::*;

use actmc::bench::{self, RandomBounds};
use actmc::explorer::{Budget, ExploreOptions, Explorer, Strategy, StrategyKind};
use actmc::independence::{happens_before, trace_key, transitions_dependent};
use actmc::model::{replay, replay_execution, ActorId, Classification, Program, SimState};
use actmc::oracle;

fn bug_run(program: &Program, kind: StrategyKind, seed: u64) -> Explorer<'_> {
    let mut opts = ExploreOptions::new(Strategy::new(kind, seed));
    opts.stop_at_first_bug = true;
    let mut ex = Explorer::new(program, opts);
    let v = ex.run().unwrap();
    assert!(v.outcome.is_bug());
    ex
}

/// Any state on the faulty path with a non-empty sleep set must lie on a
/// correct execution: the sleeping actor certifies an already-explored
/// diverging branch, and the whole backward critical-transition sweep rests
/// on that claim. Verified against the unreduced oracle.
#[test]
fn non_empty_sleep_on_faulty_path_implies_correct_continuation() {
    fn exists_correct(program: &Program, state: &SimState) -> bool {
        let enabled = state.enabled(program);
        if enabled.is_empty() {
            return state.classify(program) == Classification::Safe;
        }
        enabled.into_iter().any(|a| {
            let mut next = state.clone();
            next.step(program, a);
            exists_correct(program, &next)
        })
    }
    let mut checked = 0u32;
    for program in [
        bench::mpi_any(0),
        bench::mpi_any(1),
        bench::philosophers_mutex(2),
        bench::philosophers_mutex(3),
        bench::philosophers_semaphore(2),
    ] {
        for kind in [StrategyKind::Dfs, StrategyKind::RfsStep] {
            let ex = bug_run(&program, kind, 5);
            let bug = ex.first_bug().unwrap();
            let path = ex.tree().path_nodes(bug.node);
            for &node in &path {
                if ex.tree().node(node).sleep.is_empty() {
                    continue;
                }
                let prefix = ex.tree().path_actors(node);
                let state = replay(&program, &prefix).unwrap();
                assert!(
                    exists_correct(&program, &state),
                    "state with non-empty sleep has no correct continuation"
                );
                checked += 1;
            }
        }
    }
    assert!(checked > 0, "the benchmarks must exercise non-empty sleeps");
}

/// With garbage collection off, the finished tree holds exactly one maximal
/// leaf per equivalence class.
#[test]
fn gc_off_tree_keeps_one_path_per_class() {
    for program in [
        bench::mpi_any(0),
        bench::factorial_bench(4),
        bench::philosophers_mutex(2),
    ] {
        let classes = oracle::count_classes(&program, 1_000_000).unwrap();
        let mut opts = ExploreOptions::new(Strategy::new(StrategyKind::RfsStep, 11));
        opts.stop_at_first_bug = false;
        opts.gc = false;
        let mut ex = Explorer::new(&program, opts);
        ex.run().unwrap();
        let tree = ex.tree();
        let maximal_leaves = tree
            .subtree_nodes(tree.root())
            .into_iter()
            .filter(|&n| tree.node(n).maximal)
            .count() as u64;
        assert_eq!(maximal_leaves, classes);
    }
}

/// Out-of-order exploration escapes the unrolled polling loop: the median
/// states-to-bug over 50 seeds must not exceed the depth-first figure.
#[test]
fn busy_waiting_resilience() {
    fn states_to_bug(program: &Program, kind: StrategyKind, seed: u64) -> u64 {
        let mut opts = ExploreOptions::new(Strategy::new(kind, seed));
        opts.stop_at_first_bug = true;
        opts.budget = Budget {
            max_traces: None,
            max_states: Some(500_000),
            timeout: Some(Duration::from_secs(120)),
        };
        let mut ex = Explorer::new(program, opts);
        let v = ex.run().unwrap();
        v.stats
            .states_before_first_bug
            .unwrap_or(v.stats.states_visited)
    }
    let program = bench::polling_loop(2);
    let dfs = states_to_bug(&program, StrategyKind::Dfs, 0);
    let mut rfs: Vec<u64> = (0..50)
        .map(|s| states_to_bug(&program, StrategyKind::RfsStep, s))
        .collect();
    rfs.sort_unstable();
    let median = rfs[24];
    assert!(
        median <= dfs,
        "rfs-step median {median} exceeds dfs {dfs} on the polling loop"
    );
}

/// The critical-transition search reuses pre-bug knowledge: completions in
/// the search phase never rediscover a class the original run had explored.
#[test]
fn ct_search_never_reexplores_known_classes() {
    for program in [
        bench::mpi_any(0),
        bench::mpi_any(1),
        bench::philosophers_mutex(2),
        bench::philosophers_semaphore(2),
    ] {
        for kind in [StrategyKind::Dfs, StrategyKind::RfsStep, StrategyKind::RfsBranch] {
            let mut ex = bug_run(&program, kind, 9);
            let report = actmc::ctsearch::find_critical_transition(&mut ex).unwrap();
            assert_eq!(
                report.counters.reexplored_known_classes, 0,
                "{kind}: ct search re-explored a known class"
            );
        }
    }
}

#[test]
fn golden_tree_dump() {
    let p = bench::factorial_bench(3);
    let mut opts = ExploreOptions::new(Strategy::new(StrategyKind::Dfs, 0));
    opts.stop_at_first_bug = false;
    opts.gc = false;
    let mut ex = Explorer::new(&p, opts);
    ex.run().unwrap();
    let expected = "\
root done=[s0,s1,s2] sleep=[] wut={}
  s0 done=[s1,s2] sleep=[] wut={}
    s1 done=[s2] sleep=[] wut={}
      s2 done=[] sleep=[] wut={} maximal
    s2 done=[s1] sleep=[] wut={}
      s1 done=[] sleep=[] wut={} maximal
  s1 done=[s0,s2] sleep=[] wut={}
    s0 done=[s2] sleep=[] wut={}
      s2 done=[] sleep=[] wut={} maximal
    s2 done=[s0] sleep=[] wut={}
      s0 done=[] sleep=[] wut={} maximal
  s2 done=[s0,s1] sleep=[] wut={}
    s0 done=[s1] sleep=[] wut={}
      s1 done=[] sleep=[] wut={} maximal
    s1 done=[s0] sleep=[] wut={}
      s0 done=[] sleep=[] wut={} maximal
";
    assert_eq!(ex.tree().dump(&p), expected);

    // Mid-flight dump: a trace budget leaves the pending branches visible.
    let mut opts = ExploreOptions::new(Strategy::new(StrategyKind::Dfs, 0));
    opts.stop_at_first_bug = false;
    opts.gc = false;
    opts.budget.max_traces = Some(2);
    let mut ex = Explorer::new(&p, opts);
    ex.run().unwrap();
    let expected_pending = "\
root done=[s0] sleep=[] wut={s1,s2}
  s0 done=[s1,s2] sleep=[] wut={}
    s1 done=[s2] sleep=[] wut={}
      s2 done=[] sleep=[] wut={} maximal
    s2 done=[s1] sleep=[] wut={}
      s1 done=[] sleep=[] wut={} maximal
";
    assert_eq!(ex.tree().dump(&p), expected_pending);
}

fn random_walk(program: &Program, seed: u64, bound: usize) -> Vec<ActorId> {
    let mut rng = actmc::rng::SplitMix64::new(seed);
    let mut state = SimState::initial(program);
    let mut walk = Vec::new();
    for _ in 0..bound {
        let enabled = state.enabled(program);
        if enabled.is_empty() {
            break;
        }
        let actor = *rng.pick(&enabled);
        state.step(program, actor);
        walk.push(actor);
    }
    walk
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    /// Persistency and step determinism along random walks of random
    /// (crash-free) programs: an enabled actor stays enabled until it
    /// moves, and double evaluation of a step agrees with itself.
    #[test]
    fn persistency_holds_on_random_programs(seed in 0u64..5000, walk_seed in 0u64..4) {
        let program = bench::random_program(seed, RandomBounds::default());
        let mut state = SimState::initial(&program);
        for actor in random_walk(&program, walk_seed, 12) {
            let enabled = state.enabled(&program);
            let mut next = state.clone();
            next.step(&program, actor);
            let mut again = state.clone();
            again.step(&program, actor);
            prop_assert_eq!(&next, &again);
            for &q in &enabled {
                if q != actor {
                    prop_assert!(next.is_enabled(&program, q));
                }
            }
            state = next;
        }
    }

    /// Happens-before is a strict partial order containing program order,
    /// and the canonical key is invariant under one adjacent independent
    /// swap.
    #[test]
    fn hb_and_key_invariants_on_random_executions(seed in 0u64..5000, walk_seed in 0u64..4) {
        let program = bench::random_program(seed, RandomBounds::default());
        let walk = random_walk(&program, walk_seed, 12);
        let (_, exec) = replay_execution(&program, &walk).unwrap();
        let hb = happens_before(&program, &exec);
        let n = exec.len();
        for i in 0..n {
            prop_assert!(!hb.hb(i, i));
            for j in (i + 1)..n {
                if exec.steps[i].actor == exec.steps[j].actor {
                    prop_assert!(hb.hb(i, j));
                }
                for k in (j + 1)..n {
                    if hb.hb(i, j) && hb.hb(j, k) {
                        prop_assert!(hb.hb(i, k));
                    }
                }
            }
        }
        let key = trace_key(&program, &exec);
        for i in 0..n.saturating_sub(1) {
            let (a, b) = (&exec.steps[i], &exec.steps[i + 1]);
            if !transitions_dependent(a, b) {
                let mut swapped = walk.clone();
                swapped.swap(i, i + 1);
                let (_, other) = replay_execution(&program, &swapped)
                    .expect("independent adjacent swap must replay");
                prop_assert_eq!(&trace_key(&program, &other), &key);
            } else if a.actor != b.actor {
                // A legal adjacent swap of a dependent cross-actor pair
                // lands in a different class.
                let mut swapped = walk.clone();
                swapped.swap(i, i + 1);
                if let Ok((_, other)) = replay_execution(&program, &swapped) {
                    prop_assert_ne!(&trace_key(&program, &other), &key);
                }
            }
        }
    }

    /// Emit then parse is the identity on random programs.
    #[test]
    fn dsl_round_trip_on_random_programs(seed in 0u64..5000) {
        let program = bench::random_program(seed, RandomBounds::default());
        let text = actmc::dsl::emit_program(&program).unwrap();
        let reparsed = actmc::dsl::parse_program(&text).unwrap();
        prop_assert_eq!(reparsed, program);
    }
}
