//! Type chains: constructor sequences joined by `::`.
//!
//! A chain is validated constructor by constructor as it is built, so any
//! prefix of a valid chain is itself valid. Attribute lookup scans the
//! flattened chain from the right; the first constructor that contributes
//! the attribute wins.

use std::fmt;

use super::TypeError;

/// A constructor argument: a value known now, or an expression that is only
/// known when the declaration executes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Arg {
    Known(i64),
    Symbolic(String),
}

impl fmt::Display for Arg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Arg::Known(v) => write!(f, "{v}"),
            Arg::Symbolic(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ElemKind {
    Int,
    Char,
    Real,
    Complex,
}

impl ElemKind {
    pub fn byte_size(self) -> usize {
        match self {
            ElemKind::Int | ElemKind::Real => 8,
            ElemKind::Char => 1,
            ElemKind::Complex => 16,
        }
    }

    /// Code used in the MSHD file header.
    pub fn code(self) -> u8 {
        match self {
            ElemKind::Int => 0,
            ElemKind::Char => 1,
            ElemKind::Real => 2,
            ElemKind::Complex => 3,
        }
    }

    pub fn from_code(code: u8) -> Option<ElemKind> {
        Some(match code {
            0 => ElemKind::Int,
            1 => ElemKind::Char,
            2 => ElemKind::Real,
            3 => ElemKind::Complex,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            ElemKind::Int => "Int",
            ElemKind::Char => "Char",
            ElemKind::Real => "Real",
            ElemKind::Complex => "Complex",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TypeCtor {
    Int,
    Char,
    Real,
    Complex,
    Array { elem: ElemKind, dims: Vec<Arg> },
    Const,
    Allocated(TypeChain),
    /// Holds exactly one placement constructor (`On`, `EvenDist`, `ArrayDist`).
    Single(Box<TypeCtor>),
    Multiple,
    On(Arg),
    Row,
    Col,
    Horizontal(Arg),
    Vertical(Arg),
    EvenDist,
    ArrayDist(String),
    Share(String),
    Channel(Arg, Arg),
    Async,
}

impl TypeCtor {
    pub fn is_base(&self) -> bool {
        matches!(self, TypeCtor::Int | TypeCtor::Char | TypeCtor::Real | TypeCtor::Complex | TypeCtor::Array { .. })
    }

    pub fn is_placement(&self) -> bool {
        matches!(self, TypeCtor::On(_) | TypeCtor::EvenDist | TypeCtor::ArrayDist(_))
    }

    pub fn name(&self) -> &'static str {
        match self {
            TypeCtor::Int => "Int",
            TypeCtor::Char => "Char",
            TypeCtor::Real => "Real",
            TypeCtor::Complex => "Complex",
            TypeCtor::Array { .. } => "array",
            TypeCtor::Const => "const",
            TypeCtor::Allocated(_) => "allocated",
            TypeCtor::Single(_) => "single",
            TypeCtor::Multiple => "multiple",
            TypeCtor::On(_) => "on",
            TypeCtor::Row => "row",
            TypeCtor::Col => "col",
            TypeCtor::Horizontal(_) => "horizontal",
            TypeCtor::Vertical(_) => "vertical",
            TypeCtor::EvenDist => "evendist",
            TypeCtor::ArrayDist(_) => "arraydist",
            TypeCtor::Share(_) => "share",
            TypeCtor::Channel(..) => "channel",
            TypeCtor::Async => "async",
        }
    }

    /// The attribute slot this constructor fills directly, if any.
    fn slot(&self) -> Option<Attribute> {
        Some(match self {
            TypeCtor::Const => Attribute::Mutability,
            TypeCtor::Row | TypeCtor::Col => Attribute::Ordering,
            TypeCtor::Horizontal(_) | TypeCtor::Vertical(_) => Attribute::Partition,
            TypeCtor::Single(_) | TypeCtor::Multiple => Attribute::Distribution,
            TypeCtor::On(_) | TypeCtor::EvenDist | TypeCtor::ArrayDist(_) => Attribute::Placement,
            TypeCtor::Channel(..) | TypeCtor::Async => Attribute::CommMode,
            _ => return None,
        })
    }
}

impl fmt::Display for TypeCtor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeCtor::Array { elem, dims } => {
                write!(f, "array[{}", elem.name())?;
                for d in dims {
                    write!(f, ",{d}")?;
                }
                f.write_str("]")
            }
            TypeCtor::Allocated(inner) => write!(f, "allocated[{inner}]"),
            TypeCtor::Single(p) => write!(f, "single[{p}]"),
            TypeCtor::On(r) => write!(f, "on[{r}]"),
            TypeCtor::Horizontal(p) => write!(f, "horizontal[{p}]"),
            TypeCtor::Vertical(p) => write!(f, "vertical[{p}]"),
            TypeCtor::ArrayDist(d) => write!(f, "arraydist[{d}]"),
            TypeCtor::Share(b) => write!(f, "share[{b}]"),
            TypeCtor::Channel(a, b) => write!(f, "channel[{a},{b}]"),
            TypeCtor::Row | TypeCtor::Col | TypeCtor::EvenDist | TypeCtor::Multiple => {
                write!(f, "{}[]", self.name())
            }
            other => f.write_str(other.name()),
        }
    }
}

/// Attributes a chain can be asked about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Attribute {
    Mutability,
    Ordering,
    Partition,
    Distribution,
    Placement,
    CommMode,
}

impl Attribute {
    pub const ALL: [Attribute; 6] = [
        Attribute::Mutability,
        Attribute::Ordering,
        Attribute::Partition,
        Attribute::Distribution,
        Attribute::Placement,
        Attribute::CommMode,
    ];

    pub fn from_name(name: &str) -> Result<Attribute, TypeError> {
        Ok(match name {
            "mutability" => Attribute::Mutability,
            "ordering" => Attribute::Ordering,
            "partition" => Attribute::Partition,
            "distribution" => Attribute::Distribution,
            "placement" => Attribute::Placement,
            "commMode" | "comm_mode" => Attribute::CommMode,
            _ => return Err(TypeError::UnknownAttribute(name.to_string())),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mutability {
    ReadWrite,
    ReadOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Ordering {
    #[default]
    RowMajor,
    ColMajor,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Partition<A = usize> {
    None,
    Horizontal(A),
    Vertical(A),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Distribution<A = usize> {
    SingleOn(A),
    Even,
    ArrayDist(String),
    Multiple,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CommMode<A = usize> {
    OneSided,
    PointToPoint { src: A, dst: A, asynchronous: bool },
}

impl<A> CommMode<A> {
    pub fn is_async(&self) -> bool {
        matches!(self, CommMode::PointToPoint { asynchronous: true, .. })
    }
}

/// The value an attribute resolves to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AttrValue {
    Mutability(Mutability),
    Ordering(Ordering),
    Partition(Partition<Arg>),
    Distribution(Distribution<Arg>),
    /// `None` when no `single[...]` placement is present.
    Placement(Option<TypeCtor>),
    CommMode(CommMode<Arg>),
}

/// An ordered, validated list of constructors, leftmost first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct TypeChain {
    ctors: Vec<TypeCtor>,
}

impl fmt::Display for TypeChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, c) in self.ctors.iter().enumerate() {
            if k > 0 {
                f.write_str("::")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

fn invalid(left: &TypeCtor, right: &TypeCtor, reason: &str) -> TypeError {
    TypeError::InvalidCombination { left: left.to_string(), right: right.to_string(), reason: reason.to_string() }
}

impl TypeChain {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Build a chain by combining constructors left to right.
    pub fn from_ctors(ctors: impl IntoIterator<Item = TypeCtor>) -> Result<Self, TypeError> {
        ctors.into_iter().try_fold(TypeChain::empty(), |chain, c| combine(&chain, c))
    }

    /// A variable's chain must start with its base type.
    pub fn for_variable(ctors: impl IntoIterator<Item = TypeCtor>) -> Result<Self, TypeError> {
        let chain = Self::from_ctors(ctors)?;
        match chain.ctors.first() {
            Some(c) if c.is_base() => Ok(chain),
            Some(c) => Err(TypeError::MissingBaseType(c.to_string())),
            None => Err(TypeError::MissingBaseType(String::new())),
        }
    }

    pub fn ctors(&self) -> &[TypeCtor] {
        &self.ctors
    }

    pub fn is_empty(&self) -> bool {
        self.ctors.is_empty()
    }

    /// Constructors with `allocated[...]` bodies inlined at their position.
    pub fn flat(&self) -> Vec<&TypeCtor> {
        let mut out = Vec::new();
        for c in &self.ctors {
            match c {
                TypeCtor::Allocated(inner) => out.extend(inner.flat()),
                other => out.push(other),
            }
        }
        out
    }

    pub fn base(&self) -> Option<&TypeCtor> {
        self.ctors.iter().find(|c| c.is_base())
    }

    pub fn is_array(&self) -> bool {
        matches!(self.base(), Some(TypeCtor::Array { .. }))
    }

    pub fn elem_kind(&self) -> Option<ElemKind> {
        Some(match self.base()? {
            TypeCtor::Int => ElemKind::Int,
            TypeCtor::Char => ElemKind::Char,
            TypeCtor::Real => ElemKind::Real,
            TypeCtor::Complex => ElemKind::Complex,
            TypeCtor::Array { elem, .. } => *elem,
            _ => unreachable!(),
        })
    }

    pub fn has_allocation(&self) -> bool {
        self.ctors.iter().any(|c| matches!(c, TypeCtor::Allocated(_)))
    }

    pub fn share_base(&self) -> Option<&str> {
        self.ctors.iter().rev().find_map(|c| match c {
            TypeCtor::Share(b) => Some(b.as_str()),
            _ => None,
        })
    }

    pub fn arraydist_source(&self) -> Option<&str> {
        self.flat().into_iter().rev().find_map(|c| match c {
            TypeCtor::Single(p) => match p.as_ref() {
                TypeCtor::ArrayDist(d) => Some(d.as_str()),
                _ => None,
            },
            _ => None,
        })
    }

    pub fn is_read_only(&self) -> bool {
        matches!(self.resolve(Attribute::Mutability), AttrValue::Mutability(Mutability::ReadOnly))
    }

    /// Right-to-left attribute resolution with documented defaults.
    pub fn resolve(&self, attr: Attribute) -> AttrValue {
        let flat = self.flat();
        let found = flat.iter().rev().find(|c| match attr {
            Attribute::Mutability => c.is_base() || matches!(c, TypeCtor::Const),
            Attribute::Placement => matches!(c, TypeCtor::Single(_)),
            other => c.slot() == Some(other),
        });
        match (attr, found) {
            (Attribute::Mutability, Some(TypeCtor::Const)) => AttrValue::Mutability(Mutability::ReadOnly),
            (Attribute::Mutability, _) => AttrValue::Mutability(Mutability::ReadWrite),
            (Attribute::Ordering, Some(TypeCtor::Col)) => AttrValue::Ordering(Ordering::ColMajor),
            (Attribute::Ordering, _) => AttrValue::Ordering(Ordering::RowMajor),
            (Attribute::Partition, Some(TypeCtor::Horizontal(p))) => AttrValue::Partition(Partition::Horizontal(p.clone())),
            (Attribute::Partition, Some(TypeCtor::Vertical(p))) => AttrValue::Partition(Partition::Vertical(p.clone())),
            (Attribute::Partition, _) => AttrValue::Partition(Partition::None),
            (Attribute::Distribution, Some(TypeCtor::Single(p))) => AttrValue::Distribution(match p.as_ref() {
                TypeCtor::On(r) => Distribution::SingleOn(r.clone()),
                TypeCtor::EvenDist => Distribution::Even,
                TypeCtor::ArrayDist(d) => Distribution::ArrayDist(d.clone()),
                _ => unreachable!("single holds a placement"),
            }),
            (Attribute::Distribution, _) => AttrValue::Distribution(Distribution::Multiple),
            (Attribute::Placement, Some(TypeCtor::Single(p))) => AttrValue::Placement(Some(p.as_ref().clone())),
            (Attribute::Placement, _) => AttrValue::Placement(None),
            (Attribute::CommMode, Some(TypeCtor::Async)) => {
                let (src, dst) = flat
                    .iter()
                    .rev()
                    .find_map(|c| match c {
                        TypeCtor::Channel(a, b) => Some((a.clone(), b.clone())),
                        _ => None,
                    })
                    .expect("async requires channel");
                AttrValue::CommMode(CommMode::PointToPoint { src, dst, asynchronous: true })
            }
            (Attribute::CommMode, Some(TypeCtor::Channel(a, b))) => {
                AttrValue::CommMode(CommMode::PointToPoint { src: a.clone(), dst: b.clone(), asynchronous: false })
            }
            (Attribute::CommMode, _) => AttrValue::CommMode(CommMode::OneSided),
        }
    }
}

/// Resolve an attribute given by name.
pub fn resolve_attribute(chain: &TypeChain, attribute: &str) -> Result<AttrValue, TypeError> {
    Ok(chain.resolve(Attribute::from_name(attribute)?))
}

/// Append `right` to `left`, rejecting meaningless or duplicate combinations.
pub fn combine(left: &TypeChain, right: TypeCtor) -> Result<TypeChain, TypeError> {
    let flat = left.flat();
    check_append(&flat, &right, left.ctors())?;
    let mut ctors = left.ctors.clone();
    ctors.push(right);
    Ok(TypeChain { ctors })
}

fn check_append(flat: &[&TypeCtor], right: &TypeCtor, top: &[TypeCtor]) -> Result<(), TypeError> {
    let find = |pred: &dyn Fn(&TypeCtor) -> bool| flat.iter().copied().find(|c| pred(c));
    let base = find(&|c| c.is_base());

    if let Some(slot) = right.slot() {
        if slot != Attribute::CommMode && slot != Attribute::Placement {
            if let Some(prev) = find(&|c| c.slot() == Some(slot)) {
                return Err(invalid(prev, right, "duplicate attribute"));
            }
        }
    }

    match right {
        c if c.is_base() => {
            if let Some(b) = base {
                return Err(invalid(b, right, "a chain has exactly one base type"));
            }
            if let TypeCtor::Array { dims, .. } = c {
                if dims.is_empty() || dims.len() > 2 {
                    return Err(TypeError::BadTypeArguments {
                        ctor: "array".into(),
                        message: "arrays have one or two dimensions".into(),
                    });
                }
                if dims.len() < 2 {
                    if let Some(v) = find(&|c| matches!(c, TypeCtor::Vertical(_))) {
                        return Err(invalid(right, v, "vertical partition needs two dimensions"));
                    }
                }
            } else if let Some(prev) = find(&|c| {
                matches!(c, TypeCtor::Row | TypeCtor::Col | TypeCtor::Horizontal(_) | TypeCtor::Vertical(_) | TypeCtor::Share(_))
            }) {
                return Err(invalid(prev, right, "array attribute on a scalar"));
            }
        }
        TypeCtor::Row | TypeCtor::Col | TypeCtor::Share(_) => {
            if let Some(b @ (TypeCtor::Int | TypeCtor::Char | TypeCtor::Real | TypeCtor::Complex)) = base {
                return Err(invalid(b, right, "array attribute on a scalar"));
            }
            if let TypeCtor::Share(_) = right {
                if base.is_none() {
                    return Err(invalid(right, right, "share requires an array base type"));
                }
                if let Some(prev) = top.iter().find(|c| matches!(c, TypeCtor::Share(_))) {
                    return Err(invalid(prev, right, "duplicate share"));
                }
            }
        }
        TypeCtor::Horizontal(_) | TypeCtor::Vertical(_) => {
            if let Some(b @ (TypeCtor::Int | TypeCtor::Char | TypeCtor::Real | TypeCtor::Complex)) = base {
                return Err(invalid(b, right, "partition on a scalar"));
            }
            if let (TypeCtor::Vertical(_), Some(TypeCtor::Array { dims, .. })) = (right, base) {
                if dims.len() < 2 {
                    return Err(invalid(base.unwrap(), right, "vertical partition needs two dimensions"));
                }
            }
            if let Some(m) = find(&|c| matches!(c, TypeCtor::Multiple)) {
                return Err(invalid(m, right, "replicated data cannot be partitioned"));
            }
            if let Some(ch) = find(&|c| matches!(c, TypeCtor::Channel(..))) {
                return Err(invalid(ch, right, "channel is only legal on single, unpartitioned data"));
            }
        }
        TypeCtor::Multiple => {
            if let Some(p) = find(&|c| matches!(c, TypeCtor::Horizontal(_) | TypeCtor::Vertical(_))) {
                return Err(invalid(p, right, "replicated data cannot be partitioned"));
            }
        }
        TypeCtor::Single(inner) => {
            if !inner.is_placement() {
                return Err(invalid(right, inner, "single takes on[], evendist[] or arraydist[]"));
            }
        }
        TypeCtor::On(_) | TypeCtor::EvenDist | TypeCtor::ArrayDist(_) => {
            return Err(invalid(right, right, "placement must appear inside single[...]"));
        }
        TypeCtor::Allocated(inner) => {
            if let Some(prev) = top.iter().find(|c| matches!(c, TypeCtor::Allocated(_))) {
                return Err(invalid(prev, right, "duplicate allocated"));
            }
            let mut seen: Vec<&TypeCtor> = flat.to_vec();
            for c in inner.ctors() {
                if c.is_base() || matches!(c, TypeCtor::Const | TypeCtor::Share(_) | TypeCtor::Channel(..) | TypeCtor::Async)
                {
                    return Err(invalid(right, c, "not an allocation attribute"));
                }
                check_append(&seen, c, &[])?;
                seen.push(c);
            }
        }
        TypeCtor::Channel(..) => {
            if let Some(prev) = find(&|c| matches!(c, TypeCtor::Channel(..))) {
                return Err(invalid(prev, right, "duplicate channel"));
            }
            if find(&|c| matches!(c, TypeCtor::Single(_))).is_none() {
                let culprit = find(&|c| matches!(c, TypeCtor::Multiple)).unwrap_or(right);
                return Err(invalid(culprit, right, "channel requires single allocation"));
            }
            if let Some(p) = find(&|c| matches!(c, TypeCtor::Horizontal(_) | TypeCtor::Vertical(_))) {
                return Err(invalid(p, right, "channel is only legal on single, unpartitioned data"));
            }
        }
        TypeCtor::Async => {
            if find(&|c| matches!(c, TypeCtor::Channel(..))).is_none() {
                return Err(invalid(right, right, "async requires a channel to its left"));
            }
            if let Some(prev) = find(&|c| matches!(c, TypeCtor::Async)) {
                return Err(invalid(prev, right, "duplicate async"));
            }
        }
        TypeCtor::Const => {}
        _ => {}
    }
    Ok(())
}
