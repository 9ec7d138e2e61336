//! Shared oracles for the redistribution tests: a from-scratch model of
//! block layout, used to fill and inspect raw block buffers.

#![allow(dead_code)]

pub mod chains;

use meshlite::runtime::{Elem, World};
use meshlite::typesys::{parse_chain, plan_of};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Part {
    Horizontal(usize),
    Vertical(usize),
    None,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Dist {
    Even,
    On(usize),
    /// Block k lives on `map[k]`.
    Map(Vec<usize>),
    Replicated,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    pub col_major: bool,
    pub part: Part,
    pub dist: Dist,
}

impl Layout {
    pub fn parts(&self) -> usize {
        match self.part {
            Part::Horizontal(p) | Part::Vertical(p) => p,
            Part::None => 1,
        }
    }

    pub fn chain(&self, n: usize, m: usize) -> String {
        let mut inner = vec![if self.col_major { "col[]".to_string() } else { "row[]".to_string() }];
        match self.part {
            Part::Horizontal(p) => inner.push(format!("horizontal[{p}]")),
            Part::Vertical(p) => inner.push(format!("vertical[{p}]")),
            Part::None => {}
        }
        inner.push(match &self.dist {
            Dist::Even => "single[evendist[]]".into(),
            Dist::On(r) => format!("single[on[{r}]]"),
            Dist::Map(_) => "single[arraydist[d]]".into(),
            Dist::Replicated => "multiple[]".into(),
        });
        format!("array[Int,{n},{m}]::allocated[{}]", inner.join("::"))
    }

    /// `(owner, rows, cols)` per physical block; ranges are half-open.
    pub fn blocks(&self, n: usize, m: usize, procs: usize) -> Vec<(usize, (usize, usize), (usize, usize))> {
        if self.dist == Dist::Replicated {
            return (0..procs).map(|r| (r, (0, n), (0, m))).collect();
        }
        let split = |len: usize, p: usize, k: usize| {
            let sizes: Vec<usize> = (0..p).map(|b| len / p + usize::from(b < len % p)).collect();
            let start: usize = sizes[..k].iter().sum();
            (start, start + sizes[k])
        };
        (0..self.parts())
            .map(|k| {
                let owner = match &self.dist {
                    Dist::Even => k % procs,
                    Dist::On(r) => *r,
                    Dist::Map(map) => map[k],
                    Dist::Replicated => unreachable!(),
                };
                let (rows, cols) = match self.part {
                    Part::Horizontal(p) => (split(n, p, k), (0, m)),
                    Part::Vertical(p) => ((0, n), split(m, p, k)),
                    Part::None => ((0, n), (0, m)),
                };
                (owner, rows, cols)
            })
            .collect()
    }

    pub fn offset(&self, rows: (usize, usize), cols: (usize, usize), i: usize, j: usize) -> usize {
        let (h, w) = (rows.1 - rows.0, cols.1 - cols.0);
        let (li, lj) = (i - rows.0, j - cols.0);
        if self.col_major {
            lj * h + li
        } else {
            li * w + lj
        }
    }
}

pub fn allocate(w: &mut World, name: &str, l: &Layout, n: usize, m: usize) -> Result<usize, String> {
    let plan = plan_of(&parse_chain(&l.chain(n, m)).map_err(|e| e.to_string())?)
        .and_then(|p| p.concrete())
        .map_err(|e| e.to_string())?;
    let mapping = match &l.dist {
        Dist::Map(map) => Some(map.clone()),
        _ => None,
    };
    w.allocate(name, &plan, mapping, None).map_err(|e| e.to_string())
}

/// Assign `src` into `dst` through the runtime, then compare every raw
/// destination buffer with a per-element copy computed from the model.
pub fn check_assign(src: &Layout, dst: &Layout, n: usize, m: usize, procs: usize, seed: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let logical: Vec<i64> = (0..n * m).map(|_| rng.gen_range(-1_000_000..1_000_000)).collect();
    let mut w = World::new(procs);
    let s = allocate(&mut w, "S", src, n, m)?;
    let d = allocate(&mut w, "D", dst, n, m)?;

    for (k, (owner, rows, cols)) in src.blocks(n, m, procs).into_iter().enumerate() {
        if w.array(s).blocks[k].owner != owner {
            return Err(format!("source block {k} placed on {} not {owner}", w.array(s).blocks[k].owner));
        }
        let buf = w.buffer_mut(s, k);
        for i in rows.0..rows.1 {
            for j in cols.0..cols.1 {
                buf[src.offset(rows, cols, i, j)] = Elem::Int(logical[i * m + j]);
            }
        }
    }

    w.assign_arrays(d, s).map_err(|e| e.to_string())?;

    for (k, (owner, rows, cols)) in dst.blocks(n, m, procs).into_iter().enumerate() {
        if w.array(d).blocks[k].owner != owner {
            return Err(format!("destination block {k} placed on {} not {owner}", w.array(d).blocks[k].owner));
        }
        let buf = w.buffer(d, k);
        if buf.len() != (rows.1 - rows.0) * (cols.1 - cols.0) {
            return Err(format!("destination block {k} has {} cells", buf.len()));
        }
        for i in rows.0..rows.1 {
            for j in cols.0..cols.1 {
                let got = buf[dst.offset(rows, cols, i, j)];
                if got != Elem::Int(logical[i * m + j]) {
                    return Err(format!("D({i},{j}) in block {k} is {got}, expected {}", logical[i * m + j]));
                }
            }
        }
    }
    for e in w.trace() {
        if e.src == e.dst {
            return Err(format!("local copy traced: {e}"));
        }
    }
    Ok(())
}

/// Every ordering × partition × distribution combination for `p` parts on `procs` ranks.
pub fn all_layouts(p: usize, procs: usize, rng: &mut ChaCha8Rng) -> Vec<Layout> {
    let mut out = Vec::new();
    for col_major in [false, true] {
        for part in [Part::Horizontal(p), Part::Vertical(p), Part::None] {
            let blocks = if part == Part::None { 1 } else { p };
            let map: Vec<usize> = (0..blocks).map(|_| rng.gen_range(0..procs)).collect();
            for dist in [Dist::Even, Dist::Map(map), Dist::On(rng.gen_range(0..procs))] {
                out.push(Layout { col_major, part, dist });
            }
        }
    }
    out
}
