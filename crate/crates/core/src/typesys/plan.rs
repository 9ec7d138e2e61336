use super::chain::*;
use super::TypeError;

/// Everything the runtime needs to allocate a variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AllocationPlan<A = usize> {
    pub elem: ElemKind,
    /// Empty for scalars.
    pub shape: Vec<A>,
    pub ordering: Ordering,
    pub partition: Partition<A>,
    pub distribution: Distribution<A>,
    pub share_base: Option<String>,
    pub comm: CommMode<A>,
    pub read_only: bool,
}

impl<A> AllocationPlan<A> {
    pub fn is_scalar(&self) -> bool {
        self.shape.is_empty()
    }
}

/// Flatten a validated chain into an allocation plan.
pub fn plan_of(chain: &TypeChain) -> Result<AllocationPlan<Arg>, TypeError> {
    let (elem, shape) = match chain.base() {
        Some(TypeCtor::Array { elem, dims }) => (*elem, dims.clone()),
        Some(_) => (chain.elem_kind().unwrap(), Vec::new()),
        None => return Err(TypeError::MissingBaseType(chain.to_string())),
    };
    let AttrValue::Ordering(ordering) = chain.resolve(Attribute::Ordering) else { unreachable!() };
    let AttrValue::Partition(partition) = chain.resolve(Attribute::Partition) else { unreachable!() };
    let AttrValue::CommMode(comm) = chain.resolve(Attribute::CommMode) else { unreachable!() };
    let explicit_distribution = chain.flat().iter().any(|c| matches!(c, TypeCtor::Single(_) | TypeCtor::Multiple));
    let AttrValue::Distribution(distribution) = chain.resolve(Attribute::Distribution) else { unreachable!() };

    if partition != Partition::None && !explicit_distribution {
        return Err(TypeError::IncompletePlan(format!("`{chain}`: partitioned array has no distribution")));
    }

    Ok(AllocationPlan {
        elem,
        shape,
        ordering,
        partition,
        distribution,
        share_base: chain.share_base().map(str::to_string),
        comm,
        read_only: chain.is_read_only(),
    })
}

fn known(a: &Arg, what: &str) -> Result<usize, TypeError> {
    match a {
        Arg::Known(v) if *v >= 0 => Ok(*v as usize),
        Arg::Known(v) => Err(TypeError::BadTypeArguments { ctor: what.into(), message: format!("negative value {v}") }),
        Arg::Symbolic(s) => Err(TypeError::UnresolvedArgument(s.clone())),
    }
}

impl AllocationPlan<Arg> {
    /// Replace every argument by its concrete value.
    pub fn concrete(&self) -> Result<AllocationPlan<usize>, TypeError> {
        let shape = self.shape.iter().map(|d| known(d, "array")).collect::<Result<Vec<_>, _>>()?;
        if shape.iter().any(|&d| d == 0) {
            return Err(TypeError::BadTypeArguments { ctor: "array".into(), message: "zero extent".into() });
        }
        let partition = match &self.partition {
            Partition::None => Partition::None,
            Partition::Horizontal(p) => Partition::Horizontal(known(p, "horizontal")?),
            Partition::Vertical(p) => Partition::Vertical(known(p, "vertical")?),
        };
        let distribution = match &self.distribution {
            Distribution::SingleOn(r) => Distribution::SingleOn(known(r, "on")?),
            Distribution::Even => Distribution::Even,
            Distribution::ArrayDist(d) => Distribution::ArrayDist(d.clone()),
            Distribution::Multiple => Distribution::Multiple,
        };
        let comm = match &self.comm {
            CommMode::OneSided => CommMode::OneSided,
            CommMode::PointToPoint { src, dst, asynchronous } => CommMode::PointToPoint {
                src: known(src, "channel")?,
                dst: known(dst, "channel")?,
                asynchronous: *asynchronous,
            },
        };
        Ok(AllocationPlan {
            elem: self.elem,
            shape,
            ordering: self.ordering,
            partition,
            distribution,
            share_base: self.share_base.clone(),
            comm,
            read_only: self.read_only,
        })
    }
}
