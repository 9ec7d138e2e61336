//! Per-process statement execution.

use std::collections::{BTreeMap, HashMap};

use super::sched::{Scheduler, Stop};
use super::value::Value;
use super::RunConfig;
use crate::frontend::ast::*;
use crate::frontend::Pos;
use crate::runtime::{ArrayId, DistributedArray, Elem, RuntimeError};
use crate::typesys::{lower_variable_chain, plan_of, Arg, CommMode, Distribution, ElemKind, TypeError};

#[derive(Debug, Clone)]
pub(crate) enum Binding {
    /// Process-local value; typed locals remember their element kind.
    Local { value: Value, kind: Option<ElemKind> },
    /// Storage in the global address space.
    Global(ArrayId),
}

pub(crate) type Functions<'p> = HashMap<&'p str, (&'p [Param], &'p [Stmt])>;

/// A failure together with where it happened.
#[derive(Debug)]
pub(crate) enum Halt {
    Fault { pos: Pos, error: RuntimeError },
    Aborted,
}

pub(crate) type Flow<T> = Result<T, Halt>;

pub(crate) trait At<T> {
    fn at(self, pos: Pos) -> Flow<T>;
}

impl<T> At<T> for Result<T, RuntimeError> {
    fn at(self, pos: Pos) -> Flow<T> {
        self.map_err(|error| Halt::Fault { pos, error })
    }
}

impl<T> At<T> for Result<T, Stop> {
    fn at(self, pos: Pos) -> Flow<T> {
        self.map_err(|s| match s {
            Stop::Fault(error) => Halt::Fault { pos, error },
            Stop::Aborted => Halt::Aborted,
        })
    }
}

/// What a process leaves behind.
pub(crate) struct ProcFinal {
    pub top: Vec<(String, Binding)>,
    pub binding_log: Vec<Vec<String>>,
}

pub(crate) struct Proc<'a> {
    pub rank: usize,
    pub procs: usize,
    pub sched: &'a Scheduler,
    pub config: &'a RunConfig,
    functions: &'a Functions<'a>,
    scopes: Vec<HashMap<String, Binding>>,
    pub in_proc: usize,
    collective: u64,
    binding_log: Vec<Vec<String>>,
}

impl<'a> Proc<'a> {
    pub fn new(rank: usize, sched: &'a Scheduler, config: &'a RunConfig, functions: &'a Functions<'a>) -> Self {
        Proc {
            rank,
            procs: config.procs,
            sched,
            config,
            functions,
            scopes: vec![HashMap::new()],
            in_proc: 0,
            collective: 0,
            binding_log: Vec::new(),
        }
    }

    pub fn run(mut self, stmts: &[Stmt]) -> Flow<ProcFinal> {
        for s in stmts {
            self.stmt(s)?;
            let mut names: Vec<String> = self.scopes[0].keys().cloned().collect();
            names.sort();
            self.binding_log.push(names);
        }
        let mut top: Vec<(String, Binding)> = self.scopes.swap_remove(0).into_iter().collect();
        top.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(ProcFinal { top, binding_log: self.binding_log })
    }

    // ---- bindings ----

    fn lookup(&self, name: &str) -> Option<&Binding> {
        self.scopes.iter().rev().find_map(|s| s.get(name))
    }

    fn lookup_mut(&mut self, name: &str) -> Option<&mut Binding> {
        self.scopes.iter_mut().rev().find_map(|s| s.get_mut(name))
    }

    fn bind(&mut self, name: &str, b: Binding) {
        self.scopes.last_mut().expect("a scope").insert(name.to_string(), b);
    }

    fn binding(&self, pos: Pos, name: &str) -> Flow<Binding> {
        self.lookup(name).cloned().ok_or_else(|| Halt::Fault {
            pos,
            error: RuntimeError::Other(format!("`{name}` is not bound")),
        })
    }

    pub fn global(&self, pos: Pos, name: &str) -> Flow<ArrayId> {
        match self.binding(pos, name)? {
            Binding::Global(id) => Ok(id),
            Binding::Local { .. } => Err(Halt::Fault {
                pos,
                error: RuntimeError::TypeMismatch(format!("`{name}` is not a distributed variable")),
            }),
        }
    }

    pub fn array(&self, id: ArrayId) -> DistributedArray {
        self.sched.with(|i| i.world.array(id).clone())
    }

    fn next_collective(&mut self) -> u64 {
        self.collective += 1;
        self.collective
    }

    /// Owner-computes applies at top level; inside `proc` the executing rank acts.
    pub fn owner_computes(&self) -> bool {
        self.in_proc == 0
    }

    // ---- statements ----

    fn stmts_scoped(&mut self, body: &[Stmt]) -> Flow<()> {
        self.scopes.push(HashMap::new());
        let r = body.iter().try_for_each(|s| self.stmt(s));
        self.scopes.pop();
        r
    }

    fn stmt(&mut self, s: &Stmt) -> Flow<()> {
        self.sched.yield_now(self.rank).at(s.pos)?;
        match &s.kind {
            StmtKind::VarDecl { name, ty, init } => self.declare(s.pos, name, ty.as_ref(), init.as_ref()),
            StmtKind::Assign { target, value } => self.assign(target, value),
            StmtKind::For { var, from, to, body } => {
                let lo = self.eval(from)?.as_int().at(from.pos)?;
                let hi = self.eval(to)?.as_int().at(to.pos)?;
                let outer = match self.lookup(var) {
                    None => false,
                    Some(Binding::Local { .. }) => true,
                    Some(Binding::Global(_)) => {
                        return Err(RuntimeError::TypeMismatch(format!("loop variable `{var}` must be local"))).at(s.pos)
                    }
                };
                for v in lo..=hi {
                    self.scopes.push(HashMap::new());
                    if outer {
                        if let Some(Binding::Local { value, .. }) = self.lookup_mut(var) {
                            *value = Value::Int(v);
                        }
                    } else {
                        self.bind(var, Binding::Local { value: Value::Int(v), kind: None });
                    }
                    let r = body.iter().try_for_each(|b| self.stmt(b));
                    self.scopes.pop();
                    r?;
                }
                Ok(())
            }
            StmtKind::Proc { rank, body } => {
                let r = self.eval(rank)?.as_int().at(rank.pos)?;
                if r < 0 || r as usize >= self.procs {
                    return Err(RuntimeError::BadDistribution(format!(
                        "proc {r} names a rank outside 0..{}",
                        self.procs
                    )))
                    .at(rank.pos);
                }
                if r as usize != self.rank {
                    return Ok(());
                }
                self.in_proc += 1;
                let res = self.stmts_scoped(body);
                self.in_proc -= 1;
                res
            }
            StmtKind::Call { name, args } => self.call(s.pos, name, args),
            StmtKind::Function { .. } => Ok(()),
            StmtKind::Sync { var } => {
                let scope = match var {
                    Some(v) => match self.binding(s.pos, v)? {
                        Binding::Global(id) => Some(Some(id)),
                        Binding::Local { .. } => None,
                    },
                    None => Some(None),
                };
                self.sched.barrier(self.rank).at(s.pos)?;
                if let Some(scope) = scope {
                    self.sched.with(|i| i.world.sync(scope)).at(s.pos)?;
                }
                Ok(())
            }
        }
    }

    fn call(&mut self, pos: Pos, name: &str, args: &[Expr]) -> Flow<()> {
        if let Some(&(params, body)) = self.functions.get(name) {
            let mut frame = HashMap::new();
            for (p, a) in params.iter().zip(args) {
                let b = match &a.kind {
                    ExprKind::Var(n) => self.binding(a.pos, n)?,
                    _ => Binding::Local { value: self.eval(a)?, kind: None },
                };
                frame.insert(p.name.clone(), b);
            }
            let saved = self.scopes.split_off(1);
            self.scopes.push(frame);
            let r = body.iter().try_for_each(|s| self.stmt(s));
            self.scopes.truncate(1);
            self.scopes.extend(saved);
            return r;
        }
        if self.config.layout_only {
            return Ok(());
        }
        self.builtin(pos, name, args)
    }

    fn declare(&mut self, pos: Pos, name: &str, ty: Option<&TypeExpr>, init: Option<&Expr>) -> Flow<()> {
        let Some(ty) = ty else {
            let top = self.scopes.len() == 1 && self.in_proc == 0;
            let value = match (top.then(|| self.config.defines.get(name)).flatten(), init) {
                (Some(v), _) => Value::Int(*v),
                (None, Some(e)) => self.eval(e)?,
                (None, None) => Value::Int(0),
            };
            self.bind(name, Binding::Local { value, kind: None });
            return Ok(());
        };

        let mut pending: Option<Halt> = None;
        let chain = {
            let mut eval = |e: &Expr| -> Result<Arg, TypeError> {
                match self.eval(e).and_then(|v| v.as_int().at(e.pos)) {
                    Ok(v) => Ok(Arg::Known(v)),
                    Err(h) => {
                        pending = Some(h);
                        Err(TypeError::UnresolvedArgument(crate::frontend::pretty::print_expr(e)))
                    }
                }
            };
            lower_variable_chain(ty, &mut eval)
        };
        if let Some(h) = pending {
            return Err(h);
        }
        let chain = chain.map_err(RuntimeError::from).at(ty.pos)?;
        let plan = plan_of(&chain).and_then(|p| p.concrete()).map_err(RuntimeError::from).at(ty.pos)?;

        let local = plan.is_scalar()
            && plan.distribution == Distribution::Multiple
            && plan.share_base.is_none()
            && plan.comm == CommMode::OneSided;
        if local {
            let value = match init {
                Some(e) => Value::from_elem(self.eval(e)?.to_elem().and_then(|v| v.coerce(plan.elem)).at(e.pos)?),
                None => Value::from_elem(Elem::zero(plan.elem)),
            };
            self.bind(name, Binding::Local { value, kind: Some(plan.elem) });
            return Ok(());
        }

        let share = match &plan.share_base {
            Some(b) => Some(self.global(pos, b)?),
            None => None,
        };
        let mapping_src = match &plan.distribution {
            Distribution::ArrayDist(d) => Some(self.global(pos, d)?),
            _ => None,
        };
        let key = self.next_collective();
        self.sched.barrier(self.rank).at(pos)?;
        let procs = self.procs;
        let id = self
            .sched
            .with(|i| {
                if let Some(r) = i.allocs.get(&key) {
                    return r.clone();
                }
                let r = (|| {
                    let mapping = match mapping_src {
                        Some(d) => Some(arraydist_mapping(&i.world, d, procs)?),
                        None => None,
                    };
                    i.world.allocate(name, &plan, mapping, share)
                })();
                i.allocs.insert(key, r.clone());
                r
            })
            .at(pos)?;
        self.bind(name, Binding::Global(id));
        if let Some(e) = init {
            self.store_element(pos, id, &[], e)?;
            self.sched.barrier(self.rank).at(pos)?;
        }
        Ok(())
    }

    fn assign(&mut self, target: &LValue, value: &Expr) -> Flow<()> {
        let pos = target.pos;
        match self.binding(pos, &target.name)? {
            Binding::Local { kind, .. } => {
                if !target.indices.is_empty() {
                    return Err(RuntimeError::TypeMismatch(format!("`{}` is not an array", target.name))).at(pos);
                }
                let mut v = self.eval(value)?;
                if let Some(k) = kind {
                    v = Value::from_elem(v.to_elem().and_then(|e| e.coerce(k)).at(value.pos)?);
                }
                if let Some(Binding::Local { value: slot, .. }) = self.lookup_mut(&target.name) {
                    *slot = v;
                }
                Ok(())
            }
            Binding::Global(id) => {
                let arr = self.array(id);
                if !arr.is_scalar() && target.indices.is_empty() {
                    let src = match &value.kind {
                        ExprKind::Var(n) => self.global(value.pos, n)?,
                        _ => {
                            return Err(RuntimeError::TypeMismatch(format!("`{}` needs an array on the right", target.name)))
                                .at(value.pos)
                        }
                    };
                    return self.assign_arrays(pos, id, src);
                }
                if arr.desc.shape.len() == 2 && arr.desc.is_partitioned() {
                    return Err(RuntimeError::TypeMismatch(format!(
                        "rows of partitioned `{}` are changed in place, not assigned",
                        target.name
                    )))
                    .at(pos);
                }
                let mut idx = Vec::with_capacity(target.indices.len());
                for e in &target.indices {
                    idx.push(self.eval(e)?.as_index().at(e.pos)?);
                }
                self.store_element(pos, id, &idx, value)
            }
        }
    }

    /// Store into one element (or a global scalar), choosing channel or one-sided transport.
    fn store_element(&mut self, pos: Pos, id: ArrayId, idx: &[usize], value: &Expr) -> Flow<()> {
        let rank = self.rank;
        let (i, j) = self.sched.with(|w| w.world.logical_index(id, idx)).at(pos)?;
        let arr = self.array(id);
        if arr.desc.is_replicated() {
            let v = self.eval(value)?.to_elem().at(value.pos)?;
            return self.sched.with(|w| w.world.poke(id, rank, i, j, v)).at(pos);
        }
        let owner = arr.blocks[arr.desc.block_of(i, j)].owner;

        if arr.is_scalar() {
            if let Some((chan, src, sender)) = self.channel_route(id, owner, value) {
                return self.channel_assign(pos, chan, id, src, sender, owner);
            }
        }
        if self.owner_computes() && rank != owner {
            return Ok(());
        }
        let v = self.eval(value)?.to_elem().at(value.pos)?;
        self.sched.with(|w| w.world.onesided_write(rank, id, idx, v)).at(pos)
    }

    /// `(channel array, source array, sender rank)` when a declared channel covers this copy.
    fn channel_route(&self, target: ArrayId, dst_owner: usize, value: &Expr) -> Option<(ArrayId, ArrayId, usize)> {
        let ExprKind::Var(n) = &value.kind else { return None };
        let Some(Binding::Global(src)) = self.lookup(n) else { return None };
        let src = *src;
        let sarr = self.array(src);
        if !sarr.is_scalar() || sarr.desc.is_replicated() {
            return None;
        }
        let sender = sarr.blocks[0].owner;
        let tarr = self.array(target);
        let covers = |c: &CommMode| matches!(c, CommMode::PointToPoint { src, dst, .. } if *src == sender && *dst == dst_owner);
        if covers(&tarr.comm) {
            Some((target, src, sender))
        } else if covers(&sarr.comm) {
            Some((src, src, sender))
        } else {
            None
        }
    }

    fn channel_assign(&mut self, pos: Pos, chan: ArrayId, target: ArrayId, src: ArrayId, sender: usize, receiver: usize) -> Flow<()> {
        let rank = self.rank;
        if rank == sender {
            let v = self.sched.with(|i| i.world.peek(src, rank, 0, 0));
            let ticket = self.sched.with(|i| i.world.channel_post(chan, target, sender, receiver, v)).at(pos)?;
            if let Some(t) = ticket {
                if rank == receiver {
                    self.sched.with(|i| i.world.channel_accept(chan, target, sender, receiver)).at(pos)?;
                } else {
                    self.sched.wait_for(rank, |i| Ok(i.world.is_delivered(t).then_some(()))).at(pos)?;
                }
            }
        } else if rank == receiver {
            if self.array(chan).comm.is_async() {
                return Ok(());
            }
            self.sched
                .wait_for(rank, |i| Ok(i.world.channel_accept(chan, target, sender, receiver)?.then_some(())))
                .at(pos)?;
        }
        Ok(())
    }

    fn assign_arrays(&mut self, pos: Pos, dst: ArrayId, src: ArrayId) -> Flow<()> {
        if self.in_proc > 0 {
            return Err(RuntimeError::Other("array assignment is collective and cannot run inside proc".into())).at(pos);
        }
        if self.config.layout_only {
            return Ok(());
        }
        let key = self.next_collective();
        let rank = self.rank;
        self.sched.barrier(rank).at(pos)?;
        self.sched
            .with(|i| {
                i.world.exchange_begin(key, dst, src)?;
                i.world.exchange_send(key, rank);
                Ok::<(), RuntimeError>(())
            })
            .at(pos)?;
        self.sched.barrier(rank).at(pos)?;
        self.sched.with(|i| i.world.exchange_recv(key, rank));
        self.sched.barrier(rank).at(pos)?;
        self.sched.with(|i| i.world.exchange_end(key));
        Ok(())
    }

    // ---- expressions ----

    pub fn eval(&mut self, e: &Expr) -> Flow<Value> {
        let rank = self.rank;
        match &e.kind {
            ExprKind::Int(v) => Ok(Value::Int(*v)),
            ExprKind::Real(v) => Ok(Value::Real(*v)),
            ExprKind::Str(s) => Ok(Value::Str(s.clone())),
            ExprKind::Var(n) => match self.binding(e.pos, n)? {
                Binding::Local { value, .. } => Ok(value),
                Binding::Global(id) => {
                    if !self.array(id).is_scalar() {
                        return Ok(Value::Array(id));
                    }
                    let v = self.sched.with(|i| i.world.onesided_read(rank, id, &[])).at(e.pos)?;
                    Ok(Value::from_elem(v))
                }
            },
            ExprKind::Neg(x) => self.eval(x)?.negate().at(e.pos),
            ExprKind::Binary(op, l, r) => {
                let l = self.eval(l)?;
                let r = self.eval(r)?;
                Value::binary(*op, &l, &r).at(e.pos)
            }
            ExprKind::Call(name, _) => match name.as_str() {
                "processes" => Ok(Value::Int(self.procs as i64)),
                _ => Err(RuntimeError::Other(format!("`{name}` does not produce a value"))).at(e.pos),
            },
            ExprKind::Index(n, idx) => {
                let id = self.global(e.pos, n)?;
                let arr = self.array(id);
                let mut ix = Vec::with_capacity(idx.len());
                for x in idx {
                    ix.push(self.eval(x)?.as_index().at(x.pos)?);
                }
                if arr.desc.shape.len() == 2 && arr.desc.is_partitioned() {
                    let block = ix[0];
                    let Some(b) = arr.blocks.get(block) else {
                        return Err(RuntimeError::IndexOutOfBounds {
                            what: format!("block {block} of `{n}` ({} blocks)", arr.blocks.len()),
                        })
                        .at(e.pos);
                    };
                    return match ix[1..] {
                        [] => Ok(Value::Block { array: id, block }),
                        [r] if r <= b.high - b.low => Ok(Value::Row { array: id, block, row: b.low + r }),
                        [r] => Err(RuntimeError::IndexOutOfBounds {
                            what: format!("row {r} of block {block} of `{n}` ({} rows)", b.high - b.low + 1),
                        })
                        .at(e.pos),
                        _ => Err(RuntimeError::TypeMismatch(format!("too many indices on `{n}`"))).at(e.pos),
                    };
                }
                let v = self.sched.with(|i| i.world.onesided_read(rank, id, &ix)).at(e.pos)?;
                Ok(Value::from_elem(v))
            }
            ExprKind::Accessor(n, acc) => {
                let id = self.global(e.pos, n)?;
                let arr = self.array(id);
                let block = |this: &mut Self, x: &Expr| -> Flow<usize> {
                    let b = this.eval(x)?.as_index().at(x.pos)?;
                    if b >= arr.blocks.len() {
                        return Err(RuntimeError::IndexOutOfBounds {
                            what: format!("block {b} of `{n}` ({} blocks)", arr.blocks.len()),
                        })
                        .at(x.pos);
                    }
                    Ok(b)
                };
                match acc {
                    Accessor::LocalBlocks => Ok(Value::Int(arr.local_blocks(rank).len() as i64)),
                    Accessor::LocalBlockId(x) => {
                        let j = self.eval(x)?.as_index().at(x.pos)?;
                        let local = arr.local_blocks(rank);
                        match local.get(j) {
                            Some(b) => Ok(Value::Int(*b as i64)),
                            None => Err(RuntimeError::IndexOutOfBounds {
                                what: format!("local block {j} of `{n}` (rank {rank} holds {})", local.len()),
                            })
                            .at(x.pos),
                        }
                    }
                    Accessor::Low(x) => Ok(Value::Int(arr.blocks[block(self, x)?].low as i64)),
                    Accessor::High(x) => Ok(Value::Int(arr.blocks[block(self, x)?].high as i64)),
                }
            }
        }
    }
}

/// Block-to-rank mapping read from an `arraydist` source; every replica must agree.
fn arraydist_mapping(world: &crate::runtime::World, d: ArrayId, procs: usize) -> Result<Vec<usize>, RuntimeError> {
    let arr = world.array(d);
    let ranks = if arr.desc.is_replicated() { procs } else { 1 };
    let first = world.contents(d, 0);
    for r in 1..ranks {
        if !world.contents(d, r).iter().zip(&first).all(|(a, b)| a.bits_eq(b)) {
            return Err(RuntimeError::BadDistribution(format!(
                "`{}` differs between rank 0 and rank {r}",
                arr.name
            )));
        }
    }
    first
        .iter()
        .map(|e| match e {
            Elem::Int(v) if *v >= 0 => Ok(*v as usize),
            other => Err(RuntimeError::BadDistribution(format!("`{}` holds {other}, not a rank", arr.name))),
        })
        .collect()
}

pub(crate) fn top_locals(top: &[(String, Binding)]) -> BTreeMap<String, Value> {
    top.iter()
        .filter_map(|(n, b)| match b {
            Binding::Local { value, .. } => Some((n.clone(), value.clone())),
            Binding::Global(_) => None,
        })
        .collect()
}
