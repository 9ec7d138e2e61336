//! Running checked programs on a simulated set of processes.
//!
//! Each process executes the whole program (SPMD). A seeded scheduler
//! interleaves them one statement at a time, so a run is reproducible
//! from `(program, procs, seed)`.

mod builtins;
mod exec;
pub mod fft;
mod sched;
pub mod value;

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use exec::{Binding, Functions, Halt, Proc};
use sched::Scheduler;

use crate::frontend::Pos;
use crate::runtime::{canonical_order, Elem, RuntimeError, TraceEvent, World};
use crate::typesys::{CheckedProgram, ElemKind};

pub use value::Value;

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub procs: usize,
    pub seed: u64,
    /// Base directory for `readfile`/`writefile` paths.
    pub workdir: PathBuf,
    /// Values for untyped top-level `var` declarations, overriding their initialisers.
    pub defines: BTreeMap<String, i64>,
    /// Allocate and lay out arrays but skip builtins and array assignment.
    pub layout_only: bool,
}

impl RunConfig {
    pub fn new(procs: usize) -> Self {
        RunConfig { procs, seed: 0, workdir: PathBuf::from("."), defines: BTreeMap::new(), layout_only: false }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub struct RuntimeFault {
    pub rank: usize,
    pub pos: Pos,
    pub error: RuntimeError,
}

impl fmt::Display for RuntimeFault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rank {} at {}:{}: {}: {}", self.rank, self.pos.line, self.pos.col, self.error.rule(), self.error)
    }
}

/// Final contents of a distributed variable.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayState {
    pub shape: Vec<usize>,
    pub elem: ElemKind,
    pub replicated: bool,
    /// Row-major logical contents; one entry per rank when replicated, else one.
    pub replicas: Vec<Vec<Elem>>,
}

impl ArrayState {
    pub fn values(&self) -> &[Elem] {
        &self.replicas[0]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockLayout {
    pub id: usize,
    pub owner: usize,
    pub low: usize,
    pub high: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrayLayout {
    pub shape: Vec<usize>,
    pub replicated: bool,
    pub alias_of: Option<String>,
    pub blocks: Vec<BlockLayout>,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub globals: BTreeMap<String, ArrayState>,
    /// Top-level process-local variables, per rank.
    pub locals: Vec<BTreeMap<String, Value>>,
    /// Communication events in canonical order.
    pub trace: Vec<TraceEvent>,
    pub allocated_bytes: usize,
    /// Every rank saw the same set of top-level names after every statement.
    pub bindings_consistent: bool,
    pub layouts: BTreeMap<String, ArrayLayout>,
}

/// Stops everyone if a process thread unwinds.
struct AbortOnPanic<'a>(&'a Scheduler, usize);

impl Drop for AbortOnPanic<'_> {
    fn drop(&mut self) {
        if std::thread::panicking() {
            self.0.abort(self.1);
        }
    }
}

pub fn run(program: &CheckedProgram, config: &RunConfig) -> Result<RunOutcome, RuntimeFault> {
    if config.procs == 0 {
        return Err(RuntimeFault {
            rank: 0,
            pos: Pos { line: 1, col: 1 },
            error: RuntimeError::InvalidPartition { n: 0, p: 0 },
        });
    }
    let stmts = &program.program.stmts;
    let functions: Functions = program.program.functions().map(|(n, p, b)| (n, (p, b))).collect();
    let sched = Scheduler::new(World::new(config.procs), config.seed);

    let results: Vec<_> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..config.procs)
            .map(|rank| {
                let (sched, functions) = (&sched, &functions);
                s.spawn(move || {
                    let _guard = AbortOnPanic(sched, rank);
                    if sched.start(rank).is_err() {
                        return Err(Halt::Aborted);
                    }
                    let r = Proc::new(rank, sched, config, functions).run(stmts);
                    match &r {
                        Ok(_) => sched.finish(rank),
                        Err(_) => sched.abort(rank),
                    }
                    r
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("process thread panicked")).collect()
    });

    let mut finals = Vec::with_capacity(results.len());
    for (rank, r) in results.into_iter().enumerate() {
        match r {
            Ok(f) => finals.push(f),
            Err(Halt::Fault { pos, error }) => return Err(RuntimeFault { rank, pos, error }),
            Err(Halt::Aborted) => {}
        }
    }
    debug_assert_eq!(finals.len(), config.procs, "aborted without a fault");

    let mut world = sched.into_world();
    let mut trace = world.take_trace();
    canonical_order(&mut trace);

    let bindings_consistent = finals.windows(2).all(|w| w[0].binding_log == w[1].binding_log);
    let locals = finals.iter().map(|f| exec::top_locals(&f.top)).collect();

    let mut globals = BTreeMap::new();
    let mut layouts = BTreeMap::new();
    for (name, b) in &finals[0].top {
        let Binding::Global(id) = b else { continue };
        let a = world.array(*id);
        let replicated = a.desc.is_replicated();
        let ranks = if replicated { config.procs } else { 1 };
        let owner0 = a.blocks[0].owner;
        let replicas = (0..ranks).map(|r| world.contents(*id, if replicated { r } else { owner0 })).collect();
        globals.insert(
            name.clone(),
            ArrayState { shape: a.desc.shape.clone(), elem: a.desc.elem, replicated, replicas },
        );
        layouts.insert(
            name.clone(),
            ArrayLayout {
                shape: a.desc.shape.clone(),
                replicated,
                alias_of: a.alias_of.map(|base| world.array(base).name.clone()),
                blocks: a.blocks.iter().map(|b| BlockLayout { id: b.id, owner: b.owner, low: b.low, high: b.high }).collect(),
            },
        );
    }

    Ok(RunOutcome {
        globals,
        locals,
        trace,
        allocated_bytes: world.allocated_bytes(),
        bindings_consistent,
        layouts,
    })
}
