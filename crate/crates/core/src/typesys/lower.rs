//! Turning parsed type expressions into validated chains.

use super::chain::*;
use super::TypeError;
use crate::frontend::ast::{Expr, ExprKind, TypeApp, TypeArg, TypeExpr};

const CTOR_NAMES: &[&str] = &[
    "int", "char", "real", "complex", "array", "const", "allocated", "single", "multiple", "on", "row", "col",
    "horizontal", "vertical", "evendist", "arraydist", "share", "channel", "async",
];

fn is_ctor_name(name: &str) -> bool {
    CTOR_NAMES.contains(&name.to_ascii_lowercase().as_str())
}

/// A bare identifier argument naming a constructor is read as a type.
fn arg_as_type(arg: &TypeArg) -> Option<TypeExpr> {
    match arg {
        TypeArg::Type(t) => Some(t.clone()),
        TypeArg::Expr(Expr { kind: ExprKind::Var(name), pos }) if is_ctor_name(name) => {
            Some(TypeExpr { apps: vec![TypeApp { name: name.clone(), args: None, pos: *pos }], pos: *pos })
        }
        TypeArg::Expr(_) => None,
    }
}

fn bad(ctor: &str, message: impl Into<String>) -> TypeError {
    TypeError::BadTypeArguments { ctor: ctor.into(), message: message.into() }
}

fn arg_name(arg: &TypeArg, ctor: &str) -> Result<String, TypeError> {
    match arg {
        TypeArg::Expr(Expr { kind: ExprKind::Var(name), .. }) => Ok(name.clone()),
        _ => Err(bad(ctor, "expected a variable name")),
    }
}

fn elem_kind(name: &str) -> Option<ElemKind> {
    Some(match name.to_ascii_lowercase().as_str() {
        "int" => ElemKind::Int,
        "char" => ElemKind::Char,
        "real" => ElemKind::Real,
        "complex" => ElemKind::Complex,
        _ => return None,
    })
}

pub type ArgEval<'a> = dyn FnMut(&Expr) -> Result<Arg, TypeError> + 'a;

/// Lower a type expression, evaluating integer arguments through `eval`.
pub fn lower_chain(ty: &TypeExpr, eval: &mut ArgEval<'_>) -> Result<TypeChain, TypeError> {
    let mut chain = TypeChain::empty();
    for app in &ty.apps {
        let ctor = lower_app(app, eval)?;
        chain = combine(&chain, ctor)?;
    }
    Ok(chain)
}

/// Lower the full type of a variable or parameter (base type first).
pub fn lower_variable_chain(ty: &TypeExpr, eval: &mut ArgEval<'_>) -> Result<TypeChain, TypeError> {
    let chain = lower_chain(ty, eval)?;
    TypeChain::for_variable(chain.ctors().iter().cloned())
}

fn expect_args<'t>(app: &'t TypeApp, count: usize) -> Result<&'t [TypeArg], TypeError> {
    let args = app.args.as_deref().unwrap_or(&[]);
    if args.len() != count {
        return Err(bad(&app.name, format!("expected {count} argument(s), found {}", args.len())));
    }
    Ok(args)
}

fn int_arg(arg: &TypeArg, ctor: &str, eval: &mut ArgEval<'_>) -> Result<Arg, TypeError> {
    match arg {
        TypeArg::Expr(e) => eval(e),
        TypeArg::Type(_) => Err(bad(ctor, "expected an integer expression")),
    }
}

fn lower_app(app: &TypeApp, eval: &mut ArgEval<'_>) -> Result<TypeCtor, TypeError> {
    let lname = app.name.to_ascii_lowercase();
    let ctor = match lname.as_str() {
        "int" | "char" | "real" | "complex" => {
            expect_args(app, 0)?;
            match lname.as_str() {
                "int" => TypeCtor::Int,
                "char" => TypeCtor::Char,
                "real" => TypeCtor::Real,
                _ => TypeCtor::Complex,
            }
        }
        "array" => {
            let args = app.args.as_deref().unwrap_or(&[]);
            let Some((first, dims)) = args.split_first() else {
                return Err(bad("array", "missing element type"));
            };
            let elem = arg_as_type(first)
                .filter(|t| t.apps.len() == 1 && t.apps[0].args.is_none())
                .and_then(|t| elem_kind(&t.apps[0].name))
                .ok_or_else(|| bad("array", "element type must be Int, Char, Real or Complex"))?;
            let dims = dims.iter().map(|d| int_arg(d, "array", eval)).collect::<Result<Vec<_>, _>>()?;
            TypeCtor::Array { elem, dims }
        }
        "const" => {
            expect_args(app, 0)?;
            TypeCtor::Const
        }
        "async" => {
            expect_args(app, 0)?;
            TypeCtor::Async
        }
        "row" | "col" | "multiple" | "evendist" => {
            expect_args(app, 0)?;
            match lname.as_str() {
                "row" => TypeCtor::Row,
                "col" => TypeCtor::Col,
                "multiple" => TypeCtor::Multiple,
                _ => TypeCtor::EvenDist,
            }
        }
        "allocated" => {
            let args = expect_args(app, 1)?;
            let inner = arg_as_type(&args[0]).ok_or_else(|| bad("allocated", "expected a type chain"))?;
            TypeCtor::Allocated(lower_chain(&inner, eval)?)
        }
        "single" => {
            let args = expect_args(app, 1)?;
            let placement = match arg_as_type(&args[0]) {
                Some(t) => {
                    if t.apps.len() != 1 {
                        return Err(bad("single", "expected one placement"));
                    }
                    lower_app(&t.apps[0], eval)?
                }
                // `single[0]` is shorthand for `single[on[0]]`.
                None => TypeCtor::On(int_arg(&args[0], "single", eval)?),
            };
            TypeCtor::Single(Box::new(placement))
        }
        "on" => TypeCtor::On(int_arg(&expect_args(app, 1)?[0], "on", eval)?),
        "horizontal" => TypeCtor::Horizontal(int_arg(&expect_args(app, 1)?[0], "horizontal", eval)?),
        "vertical" => TypeCtor::Vertical(int_arg(&expect_args(app, 1)?[0], "vertical", eval)?),
        "arraydist" => TypeCtor::ArrayDist(arg_name(&expect_args(app, 1)?[0], "arraydist")?),
        "share" => TypeCtor::Share(arg_name(&expect_args(app, 1)?[0], "share")?),
        "channel" => {
            let args = expect_args(app, 2)?;
            TypeCtor::Channel(int_arg(&args[0], "channel", eval)?, int_arg(&args[1], "channel", eval)?)
        }
        _ => return Err(TypeError::UnknownType(app.name.clone())),
    };
    Ok(ctor)
}
