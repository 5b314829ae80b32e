//! C ABI for the actmc model checker.
//!
//! Programs and verification reports cross the boundary as opaque handles
//! released with their matching `_free` function. Strings returned through
//! `char **` out-parameters are NUL-terminated UTF-8 owned by the caller;
//! release them with [`mc_string_free`]. Every entry point catches panics
//! and converts them to [`McStatus::Internal`]; the last failure message is
//! available per thread via [`mc_last_error`].
//!
//! The header `include/actmc.h` is generated by cbindgen at build time.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::time::Duration;

use actmc::ctsearch;
use actmc::dsl;
use actmc::explorer::{Budget, ExploreOptions, Explorer, Outcome, Strategy, StrategyKind};
use actmc::model::Program;
use actmc::report::VerifyDoc;
use actmc::{bench, oracle};

/// Result code of every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum McStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// The program text failed to parse or validate.
    ParseError = 3,
    /// An argument value is out of range (unknown benchmark, bad scale...).
    InvalidArgument = 4,
    /// An enumeration or exploration budget was exceeded.
    BudgetExceeded = 5,
    /// Internal failure; details via mc_last_error.
    Internal = 6,
}

/// Final verdict of a verification run.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum McVerdict {
    AllSafe = 0,
    Deadlock = 1,
    Crash = 2,
    /// A budget tripped before the exploration finished.
    Exhausted = 3,
}

/// Exploration order policy.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum McStrategy {
    Dfs = 0,
    UniformDfs = 1,
    RfsStep = 2,
    RfsBranch = 3,
}

impl McStrategy {
    fn kind(self) -> StrategyKind {
        match self {
            McStrategy::Dfs => StrategyKind::Dfs,
            McStrategy::UniformDfs => StrategyKind::UniformDfs,
            McStrategy::RfsStep => StrategyKind::RfsStep,
            McStrategy::RfsBranch => StrategyKind::RfsBranch,
        }
    }
}

/// Verification options. Zero means "unlimited" for every budget field.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct McOptions {
    pub strategy: McStrategy,
    pub seed: u64,
    /// Keep exploring after the first bug.
    pub exhaustive: bool,
    /// Locate the critical transition of the first bug (forces stopping at
    /// it).
    pub find_critical_transition: bool,
    /// Exploration-tree garbage collection.
    pub gc: bool,
    pub max_traces: u64,
    pub max_states: u64,
    pub timeout_ms: u64,
}

/// A parsed, validated program. Opaque.
pub struct McProgram {
    program: Program,
}

/// The result of a verification run. Opaque; read through the accessors.
pub struct McReport {
    verdict: McVerdict,
    traces_explored: u64,
    states_visited: u64,
    states_before_first_bug: i64,
    ssb_count: u64,
    peak_tree_nodes: u64,
    ct_index: i64,
    counterexample: Option<CString>,
    json: CString,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = Some(CString::new(msg).unwrap_or_else(|_| {
            CString::new("error message contained a NUL byte").expect("static string")
        }));
    });
}

fn fail(status: McStatus, msg: impl Into<String>) -> McStatus {
    set_error(msg);
    status
}

/// Message describing the most recent failure on this thread, or null when
/// no failure was recorded. The pointer stays valid until the next failing
/// call on the same thread.
#[no_mangle]
pub extern "C" fn mc_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| match &*slot.borrow() {
        Some(msg) => msg.as_ptr(),
        None => ptr::null(),
    })
}

/// ABI revision; bumped on any breaking change to this header.
#[no_mangle]
pub extern "C" fn mc_abi_version() -> u32 {
    1
}

fn guard<F: FnOnce() -> McStatus>(f: F) -> McStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| (*s).to_owned())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_owned());
            fail(McStatus::Internal, format!("internal panic: {msg}"))
        }
    }
}

unsafe fn utf8_arg<'a>(ptr: *const c_char) -> Result<&'a str, McStatus> {
    if ptr.is_null() {
        return Err(fail(McStatus::NullArgument, "null string argument"));
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|_| fail(McStatus::InvalidUtf8, "argument is not valid UTF-8"))
}

/// Parse DSL text into a program handle.
///
/// # Safety
/// `text` must point to a NUL-terminated string; `out` must be a valid
/// pointer. On success `*out` owns the program and must be released with
/// [`mc_program_free`].
#[no_mangle]
pub unsafe extern "C" fn mc_program_parse(
    text: *const c_char,
    out: *mut *mut McProgram,
) -> McStatus {
    guard(|| {
        if out.is_null() {
            return fail(McStatus::NullArgument, "null out pointer");
        }
        let text = match utf8_arg(text) {
            Ok(t) => t,
            Err(status) => return status,
        };
        match dsl::parse_program(text) {
            Ok(program) => {
                *out = Box::into_raw(Box::new(McProgram { program }));
                McStatus::Ok
            }
            Err(e) => fail(McStatus::ParseError, e.to_string()),
        }
    })
}

/// Instantiate a built-in benchmark: one of "mpi_any", "philosophers_mutex",
/// "philosophers_semaphore", "factorial", "polling_loop", "random".
///
/// # Safety
/// `name` must point to a NUL-terminated string; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn mc_program_from_bench(
    name: *const c_char,
    scale: u32,
    out: *mut *mut McProgram,
) -> McStatus {
    guard(|| {
        if out.is_null() {
            return fail(McStatus::NullArgument, "null out pointer");
        }
        let name = match utf8_arg(name) {
            Ok(n) => n,
            Err(status) => return status,
        };
        let program = match name {
            "mpi_any" => bench::mpi_any(scale),
            "philosophers_mutex" if scale >= 2 => bench::philosophers_mutex(scale as usize),
            "philosophers_semaphore" if scale >= 2 => {
                bench::philosophers_semaphore(scale as usize)
            }
            "factorial" if scale >= 1 => bench::factorial_bench(scale as usize),
            "polling_loop" => bench::polling_loop(scale as usize),
            "random" => bench::random_program(u64::from(scale), Default::default()),
            other => {
                return fail(
                    McStatus::InvalidArgument,
                    format!("unknown benchmark or bad scale: {other}({scale})"),
                )
            }
        };
        *out = Box::into_raw(Box::new(McProgram { program }));
        McStatus::Ok
    })
}

/// Render a program handle back to DSL text. Free the string with
/// [`mc_string_free`].
///
/// # Safety
/// `program` must be a live handle from this library; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn mc_program_emit(
    program: *const McProgram,
    out: *mut *mut c_char,
) -> McStatus {
    guard(|| {
        let (Some(program), false) = (program.as_ref(), out.is_null()) else {
            return fail(McStatus::NullArgument, "null argument");
        };
        match dsl::emit_program(&program.program) {
            Ok(text) => {
                *out = CString::new(text).expect("DSL text has no NUL").into_raw();
                McStatus::Ok
            }
            Err(e) => fail(McStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// Release a program handle. Null is a no-op.
///
/// # Safety
/// `program` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn mc_program_free(program: *mut McProgram) {
    if !program.is_null() {
        drop(Box::from_raw(program));
    }
}

/// Default options: dfs, seed 0, stop at first bug, gc on, no limits.
#[no_mangle]
pub extern "C" fn mc_options_default() -> McOptions {
    McOptions {
        strategy: McStrategy::Dfs,
        seed: 0,
        exhaustive: false,
        find_critical_transition: false,
        gc: true,
        max_traces: 0,
        max_states: 0,
        timeout_ms: 0,
    }
}

fn nonzero(v: u64) -> Option<u64> {
    (v != 0).then_some(v)
}

/// Run the checker on a program.
///
/// # Safety
/// `program` must be a live handle; `options` and `out` must be valid
/// pointers. On success `*out` owns the report and must be released with
/// [`mc_report_free`].
#[no_mangle]
pub unsafe extern "C" fn mc_verify(
    program: *const McProgram,
    options: *const McOptions,
    out: *mut *mut McReport,
) -> McStatus {
    guard(|| {
        let (Some(handle), Some(options), false) =
            (program.as_ref(), options.as_ref(), out.is_null())
        else {
            return fail(McStatus::NullArgument, "null argument");
        };
        let mut opts = ExploreOptions::new(Strategy::new(options.strategy.kind(), options.seed));
        opts.stop_at_first_bug = options.find_critical_transition || !options.exhaustive;
        opts.gc = options.gc;
        opts.budget = Budget {
            max_traces: nonzero(options.max_traces),
            max_states: nonzero(options.max_states),
            timeout: nonzero(options.timeout_ms).map(Duration::from_millis),
        };
        let mut explorer = Explorer::new(&handle.program, opts);
        let verdict = match explorer.run() {
            Ok(v) => v,
            Err(e) => return fail(McStatus::Internal, e.to_string()),
        };
        let ct = if options.find_critical_transition && verdict.outcome.is_bug() {
            match ctsearch::find_critical_transition(&mut explorer) {
                Ok(report) => Some(report),
                Err(e) => return fail(McStatus::Internal, e.to_string()),
            }
        } else {
            None
        };
        let doc = VerifyDoc::new(&handle.program, &verdict, ct.as_ref());
        let report = McReport {
            verdict: match verdict.outcome {
                Outcome::AllSafe => McVerdict::AllSafe,
                Outcome::Deadlock => McVerdict::Deadlock,
                Outcome::Crash => McVerdict::Crash,
                Outcome::Exhausted(_) => McVerdict::Exhausted,
            },
            traces_explored: verdict.stats.traces_explored,
            states_visited: verdict.stats.states_visited,
            states_before_first_bug: verdict
                .stats
                .states_before_first_bug
                .map_or(-1, |v| v as i64),
            ssb_count: verdict.stats.ssb_count,
            peak_tree_nodes: verdict.stats.peak_tree_nodes,
            ct_index: ct.as_ref().map_or(-1, |r| r.ct_index as i64),
            counterexample: verdict.counterexample.as_ref().map(|cx| {
                CString::new(actmc::report::render_execution_text(&handle.program, cx))
                    .expect("rendering has no NUL")
            }),
            json: CString::new(doc.to_json()).expect("JSON has no NUL"),
        };
        *out = Box::into_raw(Box::new(report));
        McStatus::Ok
    })
}

/// # Safety
/// `report` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn mc_report_verdict(report: *const McReport) -> McVerdict {
    report.as_ref().map_or(McVerdict::Exhausted, |r| r.verdict)
}

/// # Safety
/// `report` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn mc_report_traces_explored(report: *const McReport) -> u64 {
    report.as_ref().map_or(0, |r| r.traces_explored)
}

/// # Safety
/// `report` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn mc_report_states_visited(report: *const McReport) -> u64 {
    report.as_ref().map_or(0, |r| r.states_visited)
}

/// States explored when the first bug completed, or -1 when no bug was
/// found.
///
/// # Safety
/// `report` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn mc_report_states_before_first_bug(report: *const McReport) -> i64 {
    report.as_ref().map_or(-1, |r| r.states_before_first_bug)
}

/// # Safety
/// `report` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn mc_report_ssb_count(report: *const McReport) -> u64 {
    report.as_ref().map_or(0, |r| r.ssb_count)
}

/// # Safety
/// `report` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn mc_report_peak_tree_nodes(report: *const McReport) -> u64 {
    report.as_ref().map_or(0, |r| r.peak_tree_nodes)
}

/// 1-based index of the critical transition in the counterexample; 0 means
/// the start transition (no correct execution exists); -1 means no
/// critical-transition search ran.
///
/// # Safety
/// `report` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn mc_report_ct_index(report: *const McReport) -> i64 {
    report.as_ref().map_or(-1, |r| r.ct_index)
}

/// The replayable counterexample as text, one `index actor action` line per
/// transition; `*out` is null when the run was safe. Free the string with
/// [`mc_string_free`].
///
/// # Safety
/// `report` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn mc_report_counterexample(
    report: *const McReport,
    out: *mut *mut c_char,
) -> McStatus {
    guard(|| {
        let (Some(report), false) = (report.as_ref(), out.is_null()) else {
            return fail(McStatus::NullArgument, "null argument");
        };
        *out = match &report.counterexample {
            Some(cx) => cx.clone().into_raw(),
            None => ptr::null_mut(),
        };
        McStatus::Ok
    })
}

/// The full machine-readable report document (stats, counterexample,
/// critical transition) as JSON. Free with [`mc_string_free`].
///
/// # Safety
/// `report` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn mc_report_json(
    report: *const McReport,
    out: *mut *mut c_char,
) -> McStatus {
    guard(|| {
        let (Some(report), false) = (report.as_ref(), out.is_null()) else {
            return fail(McStatus::NullArgument, "null argument");
        };
        *out = report.json.clone().into_raw();
        McStatus::Ok
    })
}

/// Release a report handle. Null is a no-op.
///
/// # Safety
/// `report` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn mc_report_free(report: *mut McReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Count distinct equivalence classes of maximal executions, either with
/// the reduced explorer (dfs, seed 0) or with the brute-force enumeration
/// oracle. `budget` bounds the oracle's interleavings (0 picks a default of
/// two million); exceeding it fails loudly instead of truncating.
///
/// # Safety
/// `program` must be a live handle; `out` must point to writable storage.
#[no_mangle]
pub unsafe extern "C" fn mc_count_traces(
    program: *const McProgram,
    use_oracle: bool,
    budget: u64,
    out: *mut u64,
) -> McStatus {
    guard(|| {
        let (Some(handle), false) = (program.as_ref(), out.is_null()) else {
            return fail(McStatus::NullArgument, "null argument");
        };
        let count = if use_oracle {
            let budget = if budget == 0 { 2_000_000 } else { budget };
            match oracle::count_classes(&handle.program, budget) {
                Ok(count) => count,
                Err(e) => return fail(McStatus::BudgetExceeded, e.to_string()),
            }
        } else {
            let mut opts = ExploreOptions::new(Strategy::new(StrategyKind::Dfs, 0));
            opts.stop_at_first_bug = false;
            let mut ex = Explorer::new(&handle.program, opts);
            match ex.run() {
                Ok(v) => v.stats.traces_explored,
                Err(e) => return fail(McStatus::Internal, e.to_string()),
            }
        };
        *out = count;
        McStatus::Ok
    })
}

/// Release a string obtained from this library. Null is a no-op.
///
/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn mc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
