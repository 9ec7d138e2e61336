//! Generated type chains and an independent legality oracle.

use meshlite::typesys::*;
use proptest::prelude::*;

pub fn k(v: i64) -> Arg {
    Arg::Known(v)
}

pub fn arr(elem: ElemKind, dims: usize) -> TypeCtor {
    TypeCtor::Array { elem, dims: vec![k(4); dims] }
}

fn single(p: TypeCtor) -> TypeCtor {
    TypeCtor::Single(Box::new(p))
}

/// Constructors a chain may hold outside or inside `allocated[...]`.
pub fn pool() -> Vec<TypeCtor> {
    vec![
        TypeCtor::Int,
        TypeCtor::Char,
        TypeCtor::Real,
        TypeCtor::Complex,
        arr(ElemKind::Complex, 1),
        arr(ElemKind::Int, 2),
        arr(ElemKind::Real, 0),
        arr(ElemKind::Real, 3),
        TypeCtor::Const,
        TypeCtor::Row,
        TypeCtor::Col,
        TypeCtor::Horizontal(k(2)),
        TypeCtor::Vertical(k(2)),
        single(TypeCtor::On(k(0))),
        single(TypeCtor::EvenDist),
        single(TypeCtor::ArrayDist("d".into())),
        single(TypeCtor::Row),
        TypeCtor::Multiple,
        TypeCtor::On(k(1)),
        TypeCtor::EvenDist,
        TypeCtor::ArrayDist("d".into()),
        TypeCtor::Share("B".into()),
        TypeCtor::Channel(k(2), k(0)),
        TypeCtor::Async,
    ]
}

#[derive(Debug, Clone)]
pub enum Gen {
    Ctor(usize),
    Alloc(Vec<usize>),
}

pub fn gen_chain() -> impl Strategy<Value = Vec<Gen>> {
    let n = pool().len();
    let item = prop_oneof![
        4 => (0..n).prop_map(Gen::Ctor),
        1 => prop::collection::vec(0..n, 0..4).prop_map(Gen::Alloc),
    ];
    prop::collection::vec(item, 0..7)
}

/// Constructors as they would be appended, or `None` when an `allocated`
/// body is itself not a valid chain.
pub fn build(g: &[Gen]) -> Option<Vec<TypeCtor>> {
    let p = pool();
    g.iter()
        .map(|x| match x {
            Gen::Ctor(i) => Some(p[*i].clone()),
            Gen::Alloc(is) => TypeChain::from_ctors(is.iter().map(|i| p[*i].clone())).ok().map(TypeCtor::Allocated),
        })
        .collect()
}

// ---- oracle: the documented rules, written against a flat tag list ----

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tag {
    Scalar,
    Array(usize),
    Const,
    Order,
    Part { vertical: bool },
    Single { ok: bool },
    Multiple,
    BarePlacement,
    Share,
    Channel,
    Async,
}

fn tag(c: &TypeCtor) -> Tag {
    match c {
        TypeCtor::Int | TypeCtor::Char | TypeCtor::Real | TypeCtor::Complex => Tag::Scalar,
        TypeCtor::Array { dims, .. } => Tag::Array(dims.len()),
        TypeCtor::Const => Tag::Const,
        TypeCtor::Row | TypeCtor::Col => Tag::Order,
        TypeCtor::Horizontal(_) => Tag::Part { vertical: false },
        TypeCtor::Vertical(_) => Tag::Part { vertical: true },
        TypeCtor::Single(p) => Tag::Single {
            ok: matches!(p.as_ref(), TypeCtor::On(_) | TypeCtor::EvenDist | TypeCtor::ArrayDist(_)),
        },
        TypeCtor::Multiple => Tag::Multiple,
        TypeCtor::On(_) | TypeCtor::EvenDist | TypeCtor::ArrayDist(_) => Tag::BarePlacement,
        TypeCtor::Share(_) => Tag::Share,
        TypeCtor::Channel(..) => Tag::Channel,
        TypeCtor::Async => Tag::Async,
        TypeCtor::Allocated(_) => unreachable!("flattened away"),
    }
}

/// `(tag, inside allocated)` in flattened order.
fn flatten(ctors: &[TypeCtor]) -> Vec<(Tag, bool)> {
    let mut out = Vec::new();
    for c in ctors {
        match c {
            TypeCtor::Allocated(inner) => out.extend(inner.ctors().iter().map(|c| (tag(c), true))),
            c => out.push((tag(c), false)),
        }
    }
    out
}

pub fn oracle_legal(ctors: &[TypeCtor]) -> bool {
    let allocs = ctors.iter().filter(|c| matches!(c, TypeCtor::Allocated(_))).count();
    let f = flatten(ctors);
    let count = |p: &dyn Fn(Tag) -> bool| f.iter().filter(|(t, _)| p(*t)).count();
    let any = |p: &dyn Fn(Tag) -> bool| count(p) > 0;
    let left_of = |i: usize, p: &dyn Fn(Tag) -> bool| f[..i].iter().any(|(t, _)| p(*t));

    let bases = count(&|t| matches!(t, Tag::Scalar | Tag::Array(_)));
    let scalar = any(&|t| t == Tag::Scalar);
    let dims = f.iter().find_map(|(t, _)| if let Tag::Array(d) = t { Some(*d) } else { None });
    let part = any(&|t| matches!(t, Tag::Part { .. }));

    let conflicts = allocs > 1
        || bases > 1
        || matches!(dims, Some(d) if d == 0 || d > 2)
        || count(&|t| t == Tag::Const) > 1
        || count(&|t| t == Tag::Order) > 1
        || count(&|t| matches!(t, Tag::Part { .. })) > 1
        || count(&|t| matches!(t, Tag::Single { .. } | Tag::Multiple)) > 1
        || count(&|t| t == Tag::Share) > 1
        || count(&|t| t == Tag::Channel) > 1
        || count(&|t| t == Tag::Async) > 1
        || (scalar && any(&|t| matches!(t, Tag::Order | Tag::Part { .. } | Tag::Share)))
        || (dims == Some(1) && any(&|t| t == Tag::Part { vertical: true }))
        || (part && any(&|t| matches!(t, Tag::Multiple | Tag::Channel)))
        || any(&|t| matches!(t, Tag::BarePlacement | Tag::Single { ok: false }))
        || f.iter().any(|(t, inside)| {
            *inside && matches!(t, Tag::Scalar | Tag::Array(_) | Tag::Const | Tag::Share | Tag::Channel | Tag::Async)
        });
    if conflicts {
        return false;
    }
    f.iter().enumerate().all(|(i, (t, _))| match t {
        Tag::Share => left_of(i, &|t| matches!(t, Tag::Array(_))),
        Tag::Channel => left_of(i, &|t| matches!(t, Tag::Single { .. })),
        Tag::Async => left_of(i, &|t| t == Tag::Channel),
        _ => true,
    })
}

/// Right-to-left lookup written directly against the flat list.
pub fn oracle_ordering(ctors: &[TypeCtor]) -> Ordering {
    let mut flat = Vec::new();
    for c in ctors {
        match c {
            TypeCtor::Allocated(inner) => flat.extend(inner.ctors().iter().cloned()),
            c => flat.push(c.clone()),
        }
    }
    for c in flat.iter().rev() {
        match c {
            TypeCtor::Row => return Ordering::RowMajor,
            TypeCtor::Col => return Ordering::ColMajor,
            _ => {}
        }
    }
    Ordering::RowMajor
}

/// Check `cases` generated chains against the oracle; returns how many were
/// buildable and how many of those were legal.
pub fn sweep(cases: usize) -> Result<(usize, usize), String> {
    use proptest::strategy::ValueTree;
    use proptest::test_runner::TestRunner;
    let mut runner = TestRunner::deterministic();
    let (mut built, mut legal) = (0, 0);
    for _ in 0..cases {
        let g = gen_chain().new_tree(&mut runner).map_err(|e| e.to_string())?.current();
        let Some(ctors) = build(&g) else { continue };
        built += 1;
        let got = std::panic::catch_unwind(|| {
            let chain = TypeChain::from_ctors(ctors.clone());
            if let Ok(c) = &chain {
                for a in Attribute::ALL {
                    let _ = c.resolve(a);
                }
                let _ = plan_of(c).and_then(|p| p.concrete());
            }
            chain
        })
        .map_err(|_| format!("panic on {ctors:?}"))?;
        let want = oracle_legal(&ctors);
        if got.is_ok() != want {
            return Err(format!("{ctors:?}: oracle says legal={want}, got {got:?}"));
        }
        if let Ok(c) = got {
            legal += 1;
            if c.resolve(Attribute::Ordering) != AttrValue::Ordering(oracle_ordering(&ctors)) {
                return Err(format!("{ctors:?}: ordering disagrees"));
            }
        }
    }
    Ok((built, legal))
}
