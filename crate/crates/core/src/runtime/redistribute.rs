//! Planning the block exchange that moves an array between two layouts.

use super::layout::{ArrayDescriptor, Owner, Region};
use super::RuntimeError;

/// A physical block: partition block `k`, or the replica held by rank `k`
/// for replicated arrays.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlacedBlock {
    pub index: usize,
    pub rank: usize,
    pub region: Region,
}

/// Physical blocks of an array, in block order.
pub fn placed_blocks(desc: &ArrayDescriptor) -> Result<Vec<PlacedBlock>, RuntimeError> {
    if desc.is_replicated() {
        return Ok((0..desc.procs).map(|r| PlacedBlock { index: r, rank: r, region: desc.whole() }).collect());
    }
    (0..desc.block_count())
        .map(|k| {
            let Owner::Rank(rank) = desc.owner_of(k)? else { unreachable!("partition blocks have one owner") };
            Ok(PlacedBlock { index: k, rank, region: desc.block_region(k)? })
        })
        .collect()
}

/// One rectangular piece of data moving from a source block to a destination block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub src_block: usize,
    pub dst_block: usize,
    pub src_rank: usize,
    pub dst_rank: usize,
    pub region: Region,
    pub bytes: usize,
    /// Source and destination live on the same process.
    pub local: bool,
}

impl Segment {
    pub fn elements(&self) -> usize {
        self.region.len()
    }
}

/// Segments that make every logical element of `dst` equal to `src`.
///
/// A replicated source feeds each destination block from the replica on
/// the destination's own rank.
pub fn plan_redistribution(src: &ArrayDescriptor, dst: &ArrayDescriptor) -> Result<Vec<Segment>, RuntimeError> {
    if src.dims() != dst.dims() || src.shape.len() != dst.shape.len() || src.elem != dst.elem {
        return Err(RuntimeError::ShapeMismatch(format!(
            "cannot assign {:?} {} to {:?} {}",
            src.shape,
            src.elem.name(),
            dst.shape,
            dst.elem.name()
        )));
    }
    let size = dst.elem.byte_size();
    let src_blocks = placed_blocks(src)?;
    let mut out = Vec::new();
    for db in placed_blocks(dst)? {
        for sb in &src_blocks {
            if src.is_replicated() && sb.rank != db.rank {
                continue;
            }
            if let Some(region) = sb.region.intersect(&db.region) {
                out.push(Segment {
                    src_block: sb.index,
                    dst_block: db.index,
                    src_rank: sb.rank,
                    dst_rank: db.rank,
                    region,
                    bytes: region.len() * size,
                    local: sb.rank == db.rank,
                });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::runtime::layout::DistSpec;
    use crate::typesys::{ElemKind, Ordering, Partition};

    fn desc(partition: Partition, dist: DistSpec, procs: usize) -> ArrayDescriptor {
        ArrayDescriptor::new(vec![8, 8], ElemKind::Complex, Ordering::RowMajor, partition, dist, procs).unwrap()
    }

    #[test]
    fn scatter_from_rank_zero() {
        let s = desc(Partition::None, DistSpec::SingleOn(0), 4);
        let a = desc(Partition::Horizontal(4), DistSpec::Even, 4);
        let segs = plan_redistribution(&s, &a).unwrap();
        assert_eq!(segs.len(), 4);
        assert!(segs.iter().all(|g| g.src_rank == 0));
        assert_eq!(segs.iter().map(|g| g.dst_rank).collect::<Vec<_>>(), [0, 1, 2, 3]);
        assert_eq!(segs.iter().filter(|g| !g.local).count(), 3);
    }

    #[test]
    fn gather_to_rank_zero() {
        let a = desc(Partition::Vertical(4), DistSpec::Even, 2);
        let s = desc(Partition::None, DistSpec::SingleOn(0), 2);
        let segs = plan_redistribution(&a, &s).unwrap();
        assert!(segs.iter().all(|g| g.dst_rank == 0));
        assert_eq!(segs.iter().map(|g| g.elements()).sum::<usize>(), 64);
    }

    #[test]
    fn identity_is_all_local() {
        let a = desc(Partition::Horizontal(3), DistSpec::Even, 3);
        let segs = plan_redistribution(&a, &a).unwrap();
        assert!(segs.iter().all(|g| g.local));
        assert_eq!(segs.len(), 3);
    }

    #[test]
    fn shape_mismatch() {
        let a = desc(Partition::None, DistSpec::SingleOn(0), 1);
        let b = ArrayDescriptor::new(vec![4, 4], ElemKind::Complex, Ordering::RowMajor, Partition::None, DistSpec::SingleOn(0), 1)
            .unwrap();
        assert!(matches!(plan_redistribution(&a, &b), Err(RuntimeError::ShapeMismatch(_))));
    }
}
