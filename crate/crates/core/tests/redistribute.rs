mod common;

use common::{check_assign, Dist, Layout, Part};
use meshlite::runtime::{plan_redistribution, ArrayDescriptor, DistSpec};
use meshlite::typesys::{ElemKind, Ordering, Partition};
use proptest::prelude::*;

fn layout(max_p: usize, procs: usize) -> impl Strategy<Value = Layout> {
    (any::<bool>(), 0..3u8, 1..=max_p, 0..4u8, prop::collection::vec(0..procs, 8), 0..procs).prop_map(
        move |(col_major, part, p, dist, map, on)| {
            let part = match part {
                0 => Part::Horizontal(p),
                1 => Part::Vertical(p),
                _ => Part::None,
            };
            let blocks = if part == Part::None { 1 } else { p };
            let dist = match dist {
                0 => Dist::Even,
                1 => Dist::Map(map[..blocks].to_vec()),
                2 => Dist::On(on),
                _ if part == Part::None => Dist::Replicated,
                _ => Dist::Even,
            };
            Layout { col_major, part, dist }
        },
    )
}

fn case() -> impl Strategy<Value = (usize, usize, usize, Layout, Layout, u64)> {
    (1..=4usize, 8..=16usize, 8..=16usize).prop_flat_map(|(procs, n, m)| {
        (Just(procs), Just(n), Just(m), layout(8, procs), layout(8, procs), any::<u64>())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(600))]

    #[test]
    fn assignment_is_a_logical_copy((procs, n, m, src, dst, seed) in case()) {
        prop_assert_eq!(check_assign(&src, &dst, n, m, procs, seed), Ok(()));
    }
}

fn desc(n: usize, ordering: Ordering, partition: Partition, dist: DistSpec, procs: usize) -> ArrayDescriptor {
    ArrayDescriptor::new(vec![n, n], ElemKind::Int, ordering, partition, dist, procs).unwrap()
}

#[test]
fn segments_tile_the_destination_exactly_once() {
    let src = desc(10, Ordering::RowMajor, Partition::Horizontal(4), DistSpec::Even, 3);
    let dst = desc(10, Ordering::ColMajor, Partition::Vertical(8), DistSpec::Even, 3);
    let segs = plan_redistribution(&src, &dst).unwrap();
    let mut hits = vec![0; 100];
    for s in &segs {
        for (i, j) in s.region.coords() {
            hits[i * 10 + j] += 1;
        }
        assert_eq!(s.bytes, s.elements() * 8);
        assert_eq!(s.local, s.src_rank == s.dst_rank);
    }
    assert!(hits.iter().all(|&h| h == 1));
    assert_eq!(segs.len(), 32);
}

#[test]
fn uneven_block_sizes() {
    let l = Layout { col_major: false, part: Part::Horizontal(4), dist: Dist::Even };
    let sizes: Vec<usize> = l.blocks(10, 10, 4).iter().map(|(_, r, _)| r.1 - r.0).collect();
    assert_eq!(sizes, [3, 3, 2, 2]);
    let wrap = Layout { col_major: false, part: Part::Vertical(8), dist: Dist::Even };
    let owners: Vec<usize> = wrap.blocks(10, 10, 3).iter().map(|b| b.0).collect();
    assert_eq!(owners, [0, 1, 2, 0, 1, 2, 0, 1]);
    assert_eq!(check_assign(&l, &wrap, 10, 10, 3, 9), Ok(()));
}

#[test]
fn too_many_parts_is_rejected() {
    let l = Layout { col_major: false, part: Part::Horizontal(5), dist: Dist::Even };
    let mut w = meshlite::runtime::World::new(2);
    let err = common::allocate(&mut w, "X", &l, 4, 4).unwrap_err();
    assert!(err.contains("cannot split 4 items into 5 parts"), "{err}");
}
