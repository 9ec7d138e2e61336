//! Type chains, attribute resolution, allocation plans and static checking.

pub mod chain;
pub mod check;
pub mod lower;
pub mod plan;

pub use chain::{
    combine, resolve_attribute, Arg, AttrValue, Attribute, CommMode, Distribution, ElemKind, Mutability, Ordering,
    Partition, TypeChain, TypeCtor,
};
pub use check::{check_program, CheckedProgram, Diagnostic};
pub use lower::{lower_chain, lower_variable_chain};
pub use plan::{plan_of, AllocationPlan};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("`{left}` cannot be combined with `{right}`: {reason}")]
    InvalidCombination { left: String, right: String, reason: String },
    #[error("unknown attribute `{0}`")]
    UnknownAttribute(String),
    #[error("unknown type `{0}`")]
    UnknownType(String),
    #[error("bad arguments to `{ctor}`: {message}")]
    BadTypeArguments { ctor: String, message: String },
    #[error("type chain `{0}` has no leading base type")]
    MissingBaseType(String),
    #[error("incomplete allocation: {0}")]
    IncompletePlan(String),
    #[error("type argument `{0}` is not known")]
    UnresolvedArgument(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChainSourceError {
    #[error(transparent)]
    Syntax(#[from] crate::frontend::SyntaxError),
    #[error(transparent)]
    Type(#[from] TypeError),
}

/// Parse and lower a variable type written in source syntax, e.g.
/// `"array[complex,4,4]::allocated[multiple[]]"`.
///
/// Integer literals and constant arithmetic are evaluated; any other
/// argument expression is kept symbolic.
pub fn parse_chain(text: &str) -> Result<TypeChain, ChainSourceError> {
    use crate::frontend::ast::{BinOp, Expr, ExprKind, StmtKind};
    fn fold(e: &Expr) -> Option<i64> {
        match &e.kind {
            ExprKind::Int(v) => Some(*v),
            ExprKind::Neg(x) => fold(x).map(|v| -v),
            ExprKind::Binary(op, l, r) => {
                let (l, r) = (fold(l)?, fold(r)?);
                match op {
                    BinOp::Add => l.checked_add(r),
                    BinOp::Sub => l.checked_sub(r),
                    BinOp::Mul => l.checked_mul(r),
                    BinOp::Div => l.checked_div(r),
                    _ => None,
                }
            }
            _ => None,
        }
    }
    let program = crate::frontend::parse_source(&format!("var _chain : {text};"))?;
    let Some(StmtKind::VarDecl { ty: Some(ty), .. }) = program.stmts.first().map(|s| &s.kind) else {
        unreachable!("a declaration was parsed")
    };
    let mut eval = |e: &Expr| {
        Ok(match fold(e) {
            Some(v) => Arg::Known(v),
            None => Arg::Symbolic(crate::frontend::pretty::print_expr(e)),
        })
    };
    Ok(lower_variable_chain(ty, &mut eval)?)
}
