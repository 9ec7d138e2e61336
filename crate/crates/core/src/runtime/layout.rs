//! Block geometry: partition bounds, ownership and in-block linearization.
//!
//! Every array is treated as a `d0 x d1` matrix: a 1-D array of length `n`
//! is `n x 1` and a scalar is `1 x 1`.

use super::RuntimeError;
use crate::typesys::{AllocationPlan, ElemKind, Ordering, Partition};

/// Inclusive bounds of block `k` when `n` items are split into `p` parts.
///
/// The first `n mod p` blocks get `ceil(n/p)` items, the rest `floor(n/p)`.
pub fn partition_bounds(n: usize, p: usize, k: usize) -> Result<(usize, usize), RuntimeError> {
    if p == 0 || p > n {
        return Err(RuntimeError::InvalidPartition { n, p });
    }
    if k >= p {
        return Err(RuntimeError::IndexOutOfBounds { what: format!("block {k} of {p}") });
    }
    let (base, extra) = (n / p, n % p);
    let low = k * base + k.min(extra);
    let size = base + usize::from(k < extra);
    Ok((low, low + size - 1))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum DistSpec {
    SingleOn(usize),
    Even,
    /// Block id -> rank.
    ArrayDist(Vec<usize>),
    Multiple,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Owner {
    Rank(usize),
    /// Replicated on every process.
    Every,
}

/// Rectangle of logical indices, inclusive on both ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Region {
    pub rows: (usize, usize),
    pub cols: (usize, usize),
}

impl Region {
    pub fn height(&self) -> usize {
        self.rows.1 - self.rows.0 + 1
    }

    pub fn width(&self) -> usize {
        self.cols.1 - self.cols.0 + 1
    }

    pub fn len(&self) -> usize {
        self.height() * self.width()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        (self.rows.0..=self.rows.1).contains(&i) && (self.cols.0..=self.cols.1).contains(&j)
    }

    pub fn intersect(&self, other: &Region) -> Option<Region> {
        let rows = (self.rows.0.max(other.rows.0), self.rows.1.min(other.rows.1));
        let cols = (self.cols.0.max(other.cols.0), self.cols.1.min(other.cols.1));
        (rows.0 <= rows.1 && cols.0 <= cols.1).then_some(Region { rows, cols })
    }

    /// Row-major iteration over the logical coordinates.
    pub fn coords(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (self.rows.0..=self.rows.1).flat_map(move |i| (self.cols.0..=self.cols.1).map(move |j| (i, j)))
    }
}

/// Shape, element kind, layout and placement of an array. Fully determines
/// which process owns which block.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ArrayDescriptor {
    /// Declared extents; empty for scalars.
    pub shape: Vec<usize>,
    pub elem: ElemKind,
    pub ordering: Ordering,
    pub partition: Partition,
    pub distribution: DistSpec,
    pub procs: usize,
}

impl ArrayDescriptor {
    /// Build a descriptor, checking partition and placement against `procs`.
    pub fn new(
        shape: Vec<usize>,
        elem: ElemKind,
        ordering: Ordering,
        partition: Partition,
        distribution: DistSpec,
        procs: usize,
    ) -> Result<Self, RuntimeError> {
        let desc = ArrayDescriptor { shape, elem, ordering, partition, distribution, procs };
        if desc.shape.len() > 2 {
            return Err(RuntimeError::ShapeMismatch("arrays have at most two dimensions".into()));
        }
        match desc.partition {
            Partition::None => {}
            Partition::Horizontal(p) => {
                partition_bounds(desc.dims().0, p, 0)?;
            }
            Partition::Vertical(p) => {
                if desc.shape.len() != 2 {
                    return Err(RuntimeError::ShapeMismatch("vertical partition needs two dimensions".into()));
                }
                partition_bounds(desc.dims().1, p, 0)?;
            }
        }
        if matches!(desc.distribution, DistSpec::Multiple) && desc.partition != Partition::None {
            return Err(RuntimeError::BadDistribution("replicated arrays cannot be partitioned".into()));
        }
        if let DistSpec::ArrayDist(map) = &desc.distribution {
            if map.len() < desc.block_count() {
                return Err(RuntimeError::BadDistribution(format!(
                    "distribution array has {} entries for {} blocks",
                    map.len(),
                    desc.block_count()
                )));
            }
        }
        for k in 0..desc.block_count() {
            desc.owner_of(k)?;
        }
        Ok(desc)
    }

    pub fn from_plan(plan: &AllocationPlan, mapping: Option<Vec<usize>>, procs: usize) -> Result<Self, RuntimeError> {
        use crate::typesys::Distribution;
        let distribution = match &plan.distribution {
            Distribution::SingleOn(r) => DistSpec::SingleOn(*r),
            Distribution::Even => DistSpec::Even,
            Distribution::ArrayDist(name) => DistSpec::ArrayDist(
                mapping.ok_or_else(|| RuntimeError::BadDistribution(format!("no mapping for arraydist[{name}]")))?,
            ),
            Distribution::Multiple => DistSpec::Multiple,
        };
        Self::new(plan.shape.clone(), plan.elem, plan.ordering, plan.partition.clone(), distribution, procs)
    }

    /// `(d0, d1)` matrix view of the shape.
    pub fn dims(&self) -> (usize, usize) {
        match self.shape.as_slice() {
            [] => (1, 1),
            [n] => (*n, 1),
            [r, c, ..] => (*r, *c),
        }
    }

    pub fn len(&self) -> usize {
        let (r, c) = self.dims();
        r * c
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_replicated(&self) -> bool {
        matches!(self.distribution, DistSpec::Multiple)
    }

    pub fn parts(&self) -> usize {
        match self.partition {
            Partition::None => 1,
            Partition::Horizontal(p) | Partition::Vertical(p) => p,
        }
    }

    pub fn is_partitioned(&self) -> bool {
        self.partition != Partition::None
    }

    /// Number of partition blocks (1 when unpartitioned).
    pub fn block_count(&self) -> usize {
        self.parts()
    }

    pub fn whole(&self) -> Region {
        let (r, c) = self.dims();
        Region { rows: (0, r - 1), cols: (0, c - 1) }
    }

    /// Bounds of block `k` along the partitioned dimension.
    pub fn block_bounds(&self, k: usize) -> Result<(usize, usize), RuntimeError> {
        let (r, c) = self.dims();
        match self.partition {
            Partition::None if k == 0 => Ok((0, r - 1)),
            Partition::None => Err(RuntimeError::IndexOutOfBounds { what: format!("block {k} of 1") }),
            Partition::Horizontal(p) => partition_bounds(r, p, k),
            Partition::Vertical(p) => partition_bounds(c, p, k),
        }
    }

    pub fn block_region(&self, k: usize) -> Result<Region, RuntimeError> {
        let whole = self.whole();
        let b = self.block_bounds(k)?;
        Ok(match self.partition {
            Partition::None => whole,
            Partition::Horizontal(_) => Region { rows: b, cols: whole.cols },
            Partition::Vertical(_) => Region { rows: whole.rows, cols: b },
        })
    }

    /// Which block holds logical element `(i, j)`.
    pub fn block_of(&self, i: usize, j: usize) -> usize {
        let along = match self.partition {
            Partition::None => return 0,
            Partition::Horizontal(_) => i,
            Partition::Vertical(_) => j,
        };
        let n = match self.partition {
            Partition::Horizontal(_) => self.dims().0,
            _ => self.dims().1,
        };
        let p = self.parts();
        let (base, extra) = (n / p, n % p);
        let big = extra * (base + 1);
        if along < big {
            along / (base + 1)
        } else {
            extra + (along - big) / base
        }
    }

    pub fn owner_of(&self, block: usize) -> Result<Owner, RuntimeError> {
        owner_of(&self.distribution, self.block_count(), self.procs, block)
    }

    /// Offset of logical `(i, j)` inside the buffer of a block covering `region`.
    pub fn local_offset(&self, region: &Region, i: usize, j: usize) -> usize {
        let (di, dj) = (i - region.rows.0, j - region.cols.0);
        match self.ordering {
            Ordering::RowMajor => di * region.width() + dj,
            Ordering::ColMajor => dj * region.height() + di,
        }
    }

    /// Inverse of [`local_offset`](Self::local_offset).
    pub fn local_coords(&self, region: &Region, offset: usize) -> (usize, usize) {
        let (di, dj) = match self.ordering {
            Ordering::RowMajor => (offset / region.width(), offset % region.width()),
            Ordering::ColMajor => (offset % region.height(), offset / region.height()),
        };
        (region.rows.0 + di, region.cols.0 + dj)
    }
}

/// Owner of `block` under `dist` with `procs` processes.
///
/// Even distribution is cyclic starting at rank 0.
pub fn owner_of(dist: &DistSpec, block_count: usize, procs: usize, block: usize) -> Result<Owner, RuntimeError> {
    if block >= block_count {
        return Err(RuntimeError::IndexOutOfBounds { what: format!("block {block} of {block_count}") });
    }
    let rank = match dist {
        DistSpec::Multiple => return Ok(Owner::Every),
        DistSpec::SingleOn(r) => *r,
        DistSpec::Even => block % procs,
        DistSpec::ArrayDist(map) => *map.get(block).ok_or_else(|| {
            RuntimeError::BadDistribution(format!("distribution array has no entry for block {block}"))
        })?,
    };
    if rank >= procs {
        return Err(RuntimeError::BadDistribution(format!(
            "block {block} placed on rank {rank}, but only {procs} process(es) exist"
        )));
    }
    Ok(Owner::Rank(rank))
}
