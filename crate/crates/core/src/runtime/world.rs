//! The simulated global address space.
//!
//! All block storage for every process lives in one [`World`]. Each access
//! takes a caller rank; touching storage owned by another rank records the
//! corresponding communication event.

use std::collections::HashMap;

use super::elem::Elem;
use super::layout::{ArrayDescriptor, Owner, Region};
use super::redistribute::{placed_blocks, plan_redistribution, Segment};
use super::trace::{TraceEvent, TraceKind};
use super::RuntimeError;
use crate::typesys::{AllocationPlan, CommMode};

pub type ArrayId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub id: usize,
    pub owner: usize,
    /// First global index along the partitioned dimension.
    pub low: usize,
    /// Last global index along the partitioned dimension, inclusive.
    pub high: usize,
    pub region: Region,
    /// Index into the world's buffer arena. Share views reuse their base's buffers.
    pub buffer: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistributedArray {
    pub name: String,
    pub desc: ArrayDescriptor,
    /// Partition blocks, or one replica per rank for replicated arrays.
    pub blocks: Vec<Block>,
    pub alias_of: Option<ArrayId>,
    pub comm: CommMode,
}

impl DistributedArray {
    pub fn is_scalar(&self) -> bool {
        self.desc.shape.is_empty()
    }

    /// Rank holding the whole array, if it lives on exactly one process.
    pub fn single_owner(&self) -> Option<usize> {
        if self.desc.is_replicated() {
            return None;
        }
        let first = self.blocks[0].owner;
        self.blocks.iter().all(|b| b.owner == first).then_some(first)
    }

    /// Ids of the blocks owned by `rank`, ascending.
    pub fn local_blocks(&self, rank: usize) -> Vec<usize> {
        if self.desc.is_replicated() {
            return vec![rank];
        }
        self.blocks.iter().filter(|b| b.owner == rank).map(|b| b.id).collect()
    }
}

#[derive(Debug, Clone)]
struct ChannelMessage {
    ticket: u64,
    chan: ArrayId,
    target: ArrayId,
    src: usize,
    dst: usize,
    value: Elem,
}

#[derive(Debug, Clone)]
struct AsyncTransfer {
    chan: ArrayId,
    target: ArrayId,
    src: usize,
    dst: usize,
    value: Elem,
}

#[derive(Debug)]
struct Exchange {
    dst: ArrayId,
    src: ArrayId,
    segments: Vec<Segment>,
    packed: Vec<Option<Vec<Elem>>>,
}

#[derive(Debug)]
pub struct World {
    procs: usize,
    buffers: Vec<Vec<Elem>>,
    arrays: Vec<DistributedArray>,
    trace: Vec<TraceEvent>,
    seq: Vec<u64>,
    allocated_bytes: usize,
    next_ticket: u64,
    mailbox: Vec<ChannelMessage>,
    delivered: Vec<u64>,
    pending: Vec<AsyncTransfer>,
    exchanges: HashMap<u64, Exchange>,
}

impl World {
    pub fn new(procs: usize) -> Self {
        assert!(procs >= 1, "at least one process");
        World {
            procs,
            buffers: Vec::new(),
            arrays: Vec::new(),
            trace: Vec::new(),
            seq: vec![0; procs],
            allocated_bytes: 0,
            next_ticket: 0,
            mailbox: Vec::new(),
            delivered: Vec::new(),
            pending: Vec::new(),
            exchanges: HashMap::new(),
        }
    }

    pub fn procs(&self) -> usize {
        self.procs
    }

    pub fn array(&self, id: ArrayId) -> &DistributedArray {
        &self.arrays[id]
    }

    pub fn arrays(&self) -> impl Iterator<Item = (ArrayId, &DistributedArray)> {
        self.arrays.iter().enumerate()
    }

    pub fn trace(&self) -> &[TraceEvent] {
        &self.trace
    }

    pub fn take_trace(&mut self) -> Vec<TraceEvent> {
        std::mem::take(&mut self.trace)
    }

    /// Bytes of element storage allocated so far.
    pub fn allocated_bytes(&self) -> usize {
        self.allocated_bytes
    }

    pub fn buffer(&self, id: ArrayId, block: usize) -> &[Elem] {
        &self.buffers[self.arrays[id].blocks[block].buffer]
    }

    pub fn buffer_mut(&mut self, id: ArrayId, block: usize) -> &mut [Elem] {
        let b = self.arrays[id].blocks[block].buffer;
        &mut self.buffers[b]
    }

    fn emit(&mut self, kind: TraceKind, src: usize, dst: usize, bytes: usize, tag: &str) {
        let mut ev = TraceEvent { kind, src, dst, bytes, seq: 0, tag: tag.to_string() };
        let who = ev.initiator();
        ev.seq = self.seq[who];
        self.seq[who] += 1;
        self.trace.push(ev);
    }

    /// Allocate storage for `plan`. `mapping` resolves `arraydist`; `share`
    /// names the base array of a share view.
    pub fn allocate(
        &mut self,
        name: &str,
        plan: &AllocationPlan,
        mapping: Option<Vec<usize>>,
        share: Option<ArrayId>,
    ) -> Result<ArrayId, RuntimeError> {
        let desc = ArrayDescriptor::from_plan(plan, mapping, self.procs)?;
        if let CommMode::PointToPoint { src, dst, .. } = plan.comm {
            if src >= self.procs || dst >= self.procs {
                return Err(RuntimeError::BadDistribution(format!(
                    "channel[{src},{dst}] names a rank outside 0..{}",
                    self.procs
                )));
            }
        }
        let placed = placed_blocks(&desc)?;
        let bounds = |k: usize, region: &Region| -> Result<(usize, usize), RuntimeError> {
            if desc.is_replicated() {
                Ok(region.rows)
            } else {
                desc.block_bounds(k)
            }
        };

        let blocks = match share {
            None => {
                let mut blocks = Vec::with_capacity(placed.len());
                for pb in &placed {
                    let (low, high) = bounds(pb.index, &pb.region)?;
                    self.buffers.push(vec![Elem::zero(desc.elem); pb.region.len()]);
                    self.allocated_bytes += pb.region.len() * desc.elem.byte_size();
                    blocks.push(Block {
                        id: pb.index,
                        owner: pb.rank,
                        low,
                        high,
                        region: pb.region,
                        buffer: self.buffers.len() - 1,
                    });
                }
                blocks
            }
            Some(base_id) => {
                let base = &self.arrays[base_id];
                let mismatch = |why: String| RuntimeError::ShareFootprintMismatch(format!("`{name}` over `{}`: {why}", base.name));
                if base.desc.is_replicated() || desc.is_replicated() {
                    return Err(mismatch("replicated arrays cannot be shared".into()));
                }
                if base.desc.elem != desc.elem {
                    return Err(mismatch("element types differ".into()));
                }
                if base.blocks.len() != placed.len() {
                    return Err(mismatch(format!("{} blocks versus {}", placed.len(), base.blocks.len())));
                }
                let mut blocks = Vec::with_capacity(placed.len());
                for (pb, bb) in placed.iter().zip(&base.blocks) {
                    let base_len = self.buffers[bb.buffer].len();
                    if pb.region.len() != base_len {
                        return Err(mismatch(format!(
                            "block {} holds {} elements versus {base_len}",
                            pb.index,
                            pb.region.len()
                        )));
                    }
                    if pb.rank != bb.owner {
                        return Err(mismatch(format!(
                            "block {} placed on rank {} but its storage is on rank {}",
                            pb.index, pb.rank, bb.owner
                        )));
                    }
                    let (low, high) = bounds(pb.index, &pb.region)?;
                    blocks.push(Block { id: pb.index, owner: pb.rank, low, high, region: pb.region, buffer: bb.buffer });
                }
                blocks
            }
        };
        self.arrays.push(DistributedArray { name: name.to_string(), desc, blocks, alias_of: share, comm: plan.comm.clone() });
        Ok(self.arrays.len() - 1)
    }

    /// Map user indices onto logical `(i, j)` with bounds checking.
    pub fn logical_index(&self, id: ArrayId, idx: &[usize]) -> Result<(usize, usize), RuntimeError> {
        let a = &self.arrays[id];
        let oob = || RuntimeError::IndexOutOfBounds { what: format!("`{}`{:?} (shape {:?})", a.name, idx, a.desc.shape) };
        if idx.len() != a.desc.shape.len() || idx.iter().zip(&a.desc.shape).any(|(i, n)| i >= n) {
            return Err(oob());
        }
        Ok(match idx {
            [] => (0, 0),
            [i] => (*i, 0),
            [i, j] => (*i, *j),
            _ => return Err(oob()),
        })
    }

    /// Block index, buffer offset and owner of an element as seen from `rank`.
    fn locate(&self, id: ArrayId, rank: usize, i: usize, j: usize) -> (usize, usize, usize) {
        let a = &self.arrays[id];
        let k = if a.desc.is_replicated() { rank } else { a.desc.block_of(i, j) };
        let b = &a.blocks[k];
        (k, a.desc.local_offset(&b.region, i, j), b.owner)
    }

    /// Untraced read of logical `(i, j)`; `rank` selects the replica for replicated arrays.
    pub fn peek(&self, id: ArrayId, rank: usize, i: usize, j: usize) -> Elem {
        let (k, t, _) = self.locate(id, rank, i, j);
        self.buffers[self.arrays[id].blocks[k].buffer][t]
    }

    /// Untraced write of logical `(i, j)`.
    pub fn poke(&mut self, id: ArrayId, rank: usize, i: usize, j: usize, value: Elem) -> Result<(), RuntimeError> {
        let value = value.coerce(self.arrays[id].desc.elem)?;
        let (k, t, _) = self.locate(id, rank, i, j);
        let b = self.arrays[id].blocks[k].buffer;
        self.buffers[b][t] = value;
        Ok(())
    }

    pub fn onesided_read(&mut self, caller: usize, id: ArrayId, idx: &[usize]) -> Result<Elem, RuntimeError> {
        let (i, j) = self.logical_index(id, idx)?;
        let (_, _, owner) = self.locate(id, caller, i, j);
        let v = self.peek(id, caller, i, j);
        if owner != caller {
            let (size, name) = (v.kind().byte_size(), self.arrays[id].name.clone());
            self.emit(TraceKind::OneSidedGet, owner, caller, size, &name);
        }
        Ok(v)
    }

    pub fn onesided_write(&mut self, caller: usize, id: ArrayId, idx: &[usize], value: Elem) -> Result<(), RuntimeError> {
        let (i, j) = self.logical_index(id, idx)?;
        let (_, _, owner) = self.locate(id, caller, i, j);
        self.poke(id, caller, i, j, value)?;
        if owner != caller {
            let (size, name) = (self.arrays[id].desc.elem.byte_size(), self.arrays[id].name.clone());
            self.emit(TraceKind::OneSidedPut, caller, owner, size, &name);
        }
        Ok(())
    }

    /// Logical contents in row-major order (`rank` picks the replica).
    pub fn contents(&self, id: ArrayId, rank: usize) -> Vec<Elem> {
        let whole = self.arrays[id].desc.whole();
        whole.coords().map(|(i, j)| self.peek(id, rank, i, j)).collect()
    }

    /// Replace logical contents from row-major data (`rank` picks the replica).
    pub fn set_contents(&mut self, id: ArrayId, rank: usize, data: &[Elem]) -> Result<(), RuntimeError> {
        let whole = self.arrays[id].desc.whole();
        if data.len() != whole.len() {
            return Err(RuntimeError::ShapeMismatch(format!("{} values for {} elements", data.len(), whole.len())));
        }
        for ((i, j), v) in whole.coords().zip(data) {
            self.poke(id, rank, i, j, *v)?;
        }
        Ok(())
    }

    fn row_cells(&self, id: ArrayId, row: usize) -> Result<Vec<(usize, usize)>, RuntimeError> {
        let a = &self.arrays[id];
        let (r, c) = a.desc.dims();
        if row >= r {
            return Err(RuntimeError::IndexOutOfBounds { what: format!("row {row} of `{}` ({r} rows)", a.name) });
        }
        Ok(if a.desc.shape.len() == 2 { (0..c).map(|j| (row, j)).collect() } else { vec![(row, 0)] })
    }

    /// Read logical row `row`; one `onesided-get` event per remote block touched.
    pub fn read_row(&mut self, caller: usize, id: ArrayId, row: usize) -> Result<Vec<Elem>, RuntimeError> {
        let cells = self.row_cells(id, row)?;
        Ok(self.read_cells(caller, id, &cells))
    }

    /// Write logical row `row`; one `onesided-put` event per remote block touched.
    pub fn write_row(&mut self, caller: usize, id: ArrayId, row: usize, values: &[Elem]) -> Result<(), RuntimeError> {
        let cells = self.row_cells(id, row)?;
        self.write_cells(caller, id, &cells, values)
    }

    /// Read the whole array in row-major order, aggregating remote traffic per block.
    pub fn read_all(&mut self, caller: usize, id: ArrayId) -> Vec<Elem> {
        let cells: Vec<_> = self.arrays[id].desc.whole().coords().collect();
        self.read_cells(caller, id, &cells)
    }

    /// Write the whole array from row-major data, aggregating remote traffic per block.
    /// With `owned_only`, cells owned by other ranks are left untouched.
    pub fn write_all(&mut self, caller: usize, id: ArrayId, values: &[Elem], owned_only: bool) -> Result<(), RuntimeError> {
        let all: Vec<_> = self.arrays[id].desc.whole().coords().collect();
        if all.len() != values.len() {
            return Err(RuntimeError::ShapeMismatch(format!("{} values for {} elements", values.len(), all.len())));
        }
        let (cells, vals): (Vec<_>, Vec<_>) = all
            .into_iter()
            .zip(values.iter().copied())
            .filter(|((i, j), _)| !owned_only || self.locate(id, caller, *i, *j).2 == caller)
            .unzip();
        self.write_cells(caller, id, &cells, &vals)
    }

    fn read_cells(&mut self, caller: usize, id: ArrayId, cells: &[(usize, usize)]) -> Vec<Elem> {
        let mut remote: Vec<(usize, usize, usize)> = Vec::new();
        let mut out = Vec::with_capacity(cells.len());
        for &(i, j) in cells {
            let (k, _, owner) = self.locate(id, caller, i, j);
            out.push(self.peek(id, caller, i, j));
            if owner != caller {
                tally(&mut remote, k, owner);
            }
        }
        let (size, name) = (self.arrays[id].desc.elem.byte_size(), self.arrays[id].name.clone());
        for (_, owner, count) in remote {
            self.emit(TraceKind::OneSidedGet, owner, caller, count * size, &name);
        }
        out
    }

    fn write_cells(&mut self, caller: usize, id: ArrayId, cells: &[(usize, usize)], values: &[Elem]) -> Result<(), RuntimeError> {
        if cells.len() != values.len() {
            return Err(RuntimeError::ShapeMismatch(format!("{} values for {} cells", values.len(), cells.len())));
        }
        let mut remote: Vec<(usize, usize, usize)> = Vec::new();
        for (&(i, j), v) in cells.iter().zip(values) {
            let (k, _, owner) = self.locate(id, caller, i, j);
            self.poke(id, caller, i, j, *v)?;
            if owner != caller {
                tally(&mut remote, k, owner);
            }
        }
        let (size, name) = (self.arrays[id].desc.elem.byte_size(), self.arrays[id].name.clone());
        for (_, owner, count) in remote {
            self.emit(TraceKind::OneSidedPut, caller, owner, count * size, &name);
        }
        Ok(())
    }

    // ---- channels ----

    fn check_channel(&self, chan: ArrayId, src: usize, dst: usize) -> Result<bool, RuntimeError> {
        let a = &self.arrays[chan];
        match a.comm {
            CommMode::PointToPoint { src: s, dst: d, asynchronous } if s == src && d == dst => Ok(asynchronous),
            _ => Err(RuntimeError::ChannelMisuse(format!("`{}` has no channel from rank {src} to rank {dst}", a.name))),
        }
    }

    /// Sender half. `chan` is the array whose chain declares the channel and
    /// `target` the scalar that receives the value. Blocking channels return a
    /// ticket to wait on; async channels queue the value until the next
    /// matching sync.
    pub fn channel_post(
        &mut self,
        chan: ArrayId,
        target: ArrayId,
        src: usize,
        dst: usize,
        value: Elem,
    ) -> Result<Option<u64>, RuntimeError> {
        let asynchronous = self.check_channel(chan, src, dst)?;
        let value = value.coerce(self.arrays[target].desc.elem)?;
        let (size, name) = (self.arrays[target].desc.elem.byte_size(), self.arrays[target].name.clone());
        self.emit(TraceKind::ChannelSend, src, dst, size, &name);
        if asynchronous {
            self.pending.push(AsyncTransfer { chan, target, src, dst, value });
            return Ok(None);
        }
        let ticket = self.next_ticket;
        self.next_ticket += 1;
        self.mailbox.push(ChannelMessage { ticket, chan, target, src, dst, value });
        Ok(Some(ticket))
    }

    /// Receiver half of a blocking channel; `false` if nothing has arrived yet.
    pub fn channel_accept(&mut self, chan: ArrayId, target: ArrayId, src: usize, dst: usize) -> Result<bool, RuntimeError> {
        self.check_channel(chan, src, dst)?;
        let Some(pos) =
            self.mailbox.iter().position(|m| m.chan == chan && m.target == target && m.src == src && m.dst == dst)
        else {
            return Ok(false);
        };
        let msg = self.mailbox.remove(pos);
        self.store_delivery(msg.target, msg.src, msg.dst, msg.value)?;
        self.delivered.push(msg.ticket);
        Ok(true)
    }

    pub fn is_delivered(&self, ticket: u64) -> bool {
        self.delivered.contains(&ticket)
    }

    fn store_delivery(&mut self, target: ArrayId, src: usize, dst: usize, value: Elem) -> Result<(), RuntimeError> {
        self.poke(target, dst, 0, 0, value)?;
        let (size, name) = (self.arrays[target].desc.elem.byte_size(), self.arrays[target].name.clone());
        self.emit(TraceKind::ChannelRecv, src, dst, size, &name);
        Ok(())
    }

    /// Run both halves of a channel transfer at once.
    pub fn channel_transfer(&mut self, chan: ArrayId, target: ArrayId, src: usize, dst: usize, payload: Elem) -> Result<(), RuntimeError> {
        if self.channel_post(chan, target, src, dst, payload)?.is_some() {
            let accepted = self.channel_accept(chan, target, src, dst)?;
            debug_assert!(accepted);
        }
        Ok(())
    }

    pub fn has_pending(&self, scope: Option<ArrayId>) -> bool {
        self.pending.iter().any(|t| scope.is_none_or(|s| s == t.chan || s == t.target))
    }

    /// Complete outstanding asynchronous transfers, all or those touching one array.
    pub fn sync(&mut self, scope: Option<ArrayId>) -> Result<(), RuntimeError> {
        let (done, keep): (Vec<_>, Vec<_>) = std::mem::take(&mut self.pending)
            .into_iter()
            .partition(|t| scope.is_none_or(|s| s == t.chan || s == t.target));
        self.pending = keep;
        for t in done {
            self.store_delivery(t.target, t.src, t.dst, t.value)?;
        }
        Ok(())
    }

    // ---- redistribution ----

    /// Register the exchange for `dst := src` under `key`; later calls with the same key are no-ops.
    pub fn exchange_begin(&mut self, key: u64, dst: ArrayId, src: ArrayId) -> Result<(), RuntimeError> {
        if self.exchanges.contains_key(&key) {
            return Ok(());
        }
        let segments = if dst == src {
            Vec::new()
        } else {
            plan_redistribution(&self.arrays[src].desc, &self.arrays[dst].desc)?
        };
        let packed = vec![None; segments.len()];
        self.exchanges.insert(key, Exchange { dst, src, segments, packed });
        Ok(())
    }

    /// Phase one on `rank`: pack every segment this rank sends.
    pub fn exchange_send(&mut self, key: u64, rank: usize) {
        let ex = self.exchanges.remove(&key).expect("exchange registered");
        let mut ex = ex;
        let src_desc = self.arrays[ex.src].desc.clone();
        let dst_name = self.arrays[ex.dst].name.clone();
        for (s, seg) in ex.segments.iter().enumerate() {
            if seg.src_rank != rank {
                continue;
            }
            let block = &self.arrays[ex.src].blocks[seg.src_block];
            let buf = &self.buffers[block.buffer];
            let data = seg.region.coords().map(|(i, j)| buf[src_desc.local_offset(&block.region, i, j)]).collect();
            ex.packed[s] = Some(data);
            if !seg.local {
                self.emit(TraceKind::BlockTransfer, seg.src_rank, seg.dst_rank, seg.bytes, &dst_name);
            }
        }
        self.exchanges.insert(key, ex);
    }

    /// Phase two on `rank`: unpack every segment this rank receives.
    pub fn exchange_recv(&mut self, key: u64, rank: usize) {
        let mut ex = self.exchanges.remove(&key).expect("exchange registered");
        let dst_desc = self.arrays[ex.dst].desc.clone();
        for (s, seg) in ex.segments.iter().enumerate() {
            if seg.dst_rank != rank {
                continue;
            }
            let data = ex.packed[s].take().expect("phase one packed every segment");
            let block = self.arrays[ex.dst].blocks[seg.dst_block].clone();
            let buf = &mut self.buffers[block.buffer];
            for ((i, j), v) in seg.region.coords().zip(data) {
                buf[dst_desc.local_offset(&block.region, i, j)] = v;
            }
        }
        self.exchanges.insert(key, ex);
    }

    pub fn exchange_end(&mut self, key: u64) {
        self.exchanges.remove(&key);
    }

    /// Whole-array assignment `dst := src`, running both exchange phases for every rank.
    pub fn assign_arrays(&mut self, dst: ArrayId, src: ArrayId) -> Result<(), RuntimeError> {
        let key = u64::MAX;
        self.exchange_begin(key, dst, src)?;
        for r in 0..self.procs {
            self.exchange_send(key, r);
        }
        for r in 0..self.procs {
            self.exchange_recv(key, r);
        }
        self.exchange_end(key);
        Ok(())
    }

    /// Owner of each block of an array; replicated arrays report every rank.
    pub fn block_owners(&self, id: ArrayId) -> Vec<Owner> {
        let a = &self.arrays[id];
        if a.desc.is_replicated() {
            return vec![Owner::Every];
        }
        a.blocks.iter().map(|b| Owner::Rank(b.owner)).collect()
    }
}

fn tally(remote: &mut Vec<(usize, usize, usize)>, block: usize, owner: usize) {
    match remote.iter_mut().find(|(b, _, _)| *b == block) {
        Some(entry) => entry.2 += 1,
        None => remote.push((block, owner, 1)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::typesys::{parse_chain, plan_of};
    use num_complex::Complex64;

    fn plan(text: &str) -> AllocationPlan {
        plan_of(&parse_chain(text).unwrap()).unwrap().concrete().unwrap()
    }

    fn c(re: f64) -> Elem {
        Elem::Complex(Complex64::new(re, 0.0))
    }

    #[test]
    fn remote_scalar_read_is_traced_once() {
        let mut w = World::new(3);
        let a = w.allocate("a", &plan("Int::allocated[single[on[0]]]"), None, None).unwrap();
        let b = w.allocate("b", &plan("Int::allocated[single[on[2]]]"), None, None).unwrap();
        w.poke(b, 2, 0, 0, Elem::Int(7)).unwrap();
        let v = w.onesided_read(0, b, &[]).unwrap();
        w.onesided_write(0, a, &[], v).unwrap();
        assert_eq!(w.peek(a, 0, 0, 0), Elem::Int(7));
        assert_eq!(w.trace().len(), 1);
        assert_eq!(w.trace()[0].to_string(), "kind=onesided-get src=2 dst=0 bytes=8 seq=0 tag=b");
        assert!(matches!(w.onesided_read(1, b, &[0]), Err(RuntimeError::IndexOutOfBounds { .. })));
    }

    #[test]
    fn share_view_aliases_block_storage() {
        let mut w = World::new(2);
        let b = w.allocate("B", &plan("array[complex,4,4]::allocated[col[]::horizontal[2]::single[evendist[]]]"), None, None).unwrap();
        let before = w.allocated_bytes();
        let cv = w
            .allocate("C", &plan("array[complex,4,4]::allocated[row[]::vertical[2]::single[evendist[]]]::share[B]"), None, Some(b))
            .unwrap();
        assert_eq!(w.allocated_bytes(), before);
        w.buffer_mut(cv, 1)[3] = c(9.0);
        assert_eq!(w.buffer(b, 1)[3], c(9.0));
        w.poke(b, 0, 1, 3, c(5.0)).unwrap();
        assert_eq!(w.peek(cv, 0, 3, 1), c(5.0));
    }

    #[test]
    fn share_rejects_mismatched_footprint() {
        let mut w = World::new(2);
        let b = w.allocate("B", &plan("array[complex,4,6]::allocated[col[]::horizontal[2]::single[evendist[]]]"), None, None).unwrap();
        let r = w.allocate("C", &plan("array[complex,4,6]::allocated[row[]::vertical[3]::single[evendist[]]]::share[B]"), None, Some(b));
        assert!(matches!(r, Err(RuntimeError::ShareFootprintMismatch(_))));
    }

    #[test]
    fn scatter_then_gather_round_trips() {
        let mut w = World::new(2);
        let s = w.allocate("S", &plan("array[complex,4,4]::allocated[row[]::single[on[0]]]"), None, None).unwrap();
        let a = w.allocate("A", &plan("array[complex,4,4]::allocated[row[]::horizontal[4]::single[evendist[]]]"), None, None).unwrap();
        let data: Vec<Elem> = (0..16).map(|k| c(k as f64)).collect();
        w.set_contents(s, 0, &data).unwrap();
        w.assign_arrays(a, s).unwrap();
        assert_eq!(w.contents(a, 0), data);
        let transfers = w.trace().iter().filter(|e| e.kind == TraceKind::BlockTransfer).count();
        assert_eq!(transfers, 2);
        w.set_contents(s, 0, &vec![c(0.0); 16]).unwrap();
        w.assign_arrays(s, a).unwrap();
        assert_eq!(w.contents(s, 0), data);
        w.assign_arrays(s, s).unwrap();
        assert_eq!(w.trace().len(), 4);
    }

    #[test]
    fn blocking_channel_rendezvous() {
        let mut w = World::new(3);
        let a = w.allocate("a", &plan("Int::allocated[single[on[0]]]::channel[2,0]"), None, None).unwrap();
        let ticket = w.channel_post(a, a, 2, 0, Elem::Int(4)).unwrap().unwrap();
        assert!(!w.is_delivered(ticket));
        assert!(w.channel_accept(a, a, 2, 0).unwrap());
        assert!(w.is_delivered(ticket));
        assert_eq!(w.peek(a, 0, 0, 0), Elem::Int(4));
        assert!(matches!(w.channel_post(a, a, 1, 0, Elem::Int(1)), Err(RuntimeError::ChannelMisuse(_))));
    }

    #[test]
    fn async_channel_completes_at_sync() {
        let mut w = World::new(3);
        let a = w.allocate("a", &plan("Int::allocated[single[on[0]]]::channel[2,0]::async"), None, None).unwrap();
        assert!(w.channel_post(a, a, 2, 0, Elem::Int(4)).unwrap().is_none());
        assert_eq!(w.peek(a, 0, 0, 0), Elem::Int(0));
        assert!(w.has_pending(Some(a)));
        w.sync(None).unwrap();
        assert_eq!(w.peek(a, 0, 0, 0), Elem::Int(4));
        assert!(!w.has_pending(None));
        w.sync(None).unwrap();
    }

    #[test]
    fn row_access_aggregates_per_block() {
        let mut w = World::new(2);
        let cv = w.allocate("C", &plan("array[complex,4,4]::allocated[row[]::vertical[4]::single[evendist[]]]"), None, None).unwrap();
        let row = w.read_row(0, cv, 1).unwrap();
        assert_eq!(row.len(), 4);
        let gets: Vec<_> = w.trace().iter().map(|e| (e.src, e.bytes)).collect();
        assert_eq!(gets, [(1, 16), (1, 16)]);
        w.write_row(1, cv, 1, &row).unwrap();
        assert_eq!(w.trace().iter().filter(|e| e.kind == TraceKind::OneSidedPut).count(), 2);
    }
}
