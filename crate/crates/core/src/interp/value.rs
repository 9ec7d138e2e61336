//! Interpreter values.

use std::fmt;

use num_complex::Complex64;

use crate::frontend::ast::BinOp;
use crate::runtime::{ArrayId, Elem, RuntimeError};

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(i64),
    Real(f64),
    Complex(Complex64),
    Char(u8),
    Str(String),
    Array(ArrayId),
    /// `A[bid]` on a partitioned array.
    Block { array: ArrayId, block: usize },
    /// `A[bid][r]`: logical row `A[bid].low + r`.
    Row { array: ArrayId, block: usize, row: usize },
}

impl Value {
    pub fn from_elem(e: Elem) -> Value {
        match e {
            Elem::Int(v) => Value::Int(v),
            Elem::Char(v) => Value::Char(v),
            Elem::Real(v) => Value::Real(v),
            Elem::Complex(v) => Value::Complex(v),
        }
    }

    pub fn to_elem(&self) -> Result<Elem, RuntimeError> {
        Ok(match self {
            Value::Int(v) => Elem::Int(*v),
            Value::Char(v) => Elem::Char(*v),
            Value::Real(v) => Elem::Real(*v),
            Value::Complex(v) => Elem::Complex(*v),
            other => return Err(RuntimeError::TypeMismatch(format!("{} is not a scalar value", other.type_name()))),
        })
    }

    pub fn type_name(&self) -> &'static str {
        match self {
            Value::Int(_) => "an integer",
            Value::Real(_) => "a real",
            Value::Complex(_) => "a complex number",
            Value::Char(_) => "a character",
            Value::Str(_) => "a string",
            Value::Array(_) => "an array",
            Value::Block { .. } => "a block reference",
            Value::Row { .. } => "a row slice",
        }
    }

    pub fn as_int(&self) -> Result<i64, RuntimeError> {
        match self {
            Value::Int(v) => Ok(*v),
            Value::Char(v) => Ok(*v as i64),
            other => Err(RuntimeError::TypeMismatch(format!("expected an integer, found {}", other.type_name()))),
        }
    }

    pub fn as_index(&self) -> Result<usize, RuntimeError> {
        let v = self.as_int()?;
        usize::try_from(v).map_err(|_| RuntimeError::IndexOutOfBounds { what: format!("negative index {v}") })
    }

    fn as_real(&self) -> Option<f64> {
        match self {
            Value::Int(v) => Some(*v as f64),
            Value::Char(v) => Some(*v as f64),
            Value::Real(v) => Some(*v),
            _ => None,
        }
    }

    fn as_complex(&self) -> Option<Complex64> {
        match self {
            Value::Complex(z) => Some(*z),
            other => other.as_real().map(|r| Complex64::new(r, 0.0)),
        }
    }

    pub fn negate(&self) -> Result<Value, RuntimeError> {
        Ok(match self {
            Value::Int(v) => Value::Int(v.checked_neg().ok_or_else(|| RuntimeError::Other("integer overflow".into()))?),
            Value::Char(v) => Value::Int(-(*v as i64)),
            Value::Real(v) => Value::Real(-v),
            Value::Complex(z) => Value::Complex(-z),
            other => return Err(RuntimeError::TypeMismatch(format!("cannot negate {}", other.type_name()))),
        })
    }

    pub fn binary(op: BinOp, l: &Value, r: &Value) -> Result<Value, RuntimeError> {
        let mismatch =
            || RuntimeError::TypeMismatch(format!("cannot apply `{}` to {} and {}", op.symbol(), l.type_name(), r.type_name()));
        let truth = |b: bool| Value::Int(b as i64);
        if let (Value::Str(a), Value::Str(b)) = (l, r) {
            return match op {
                BinOp::Eq => Ok(truth(a == b)),
                BinOp::Ne => Ok(truth(a != b)),
                _ => Err(mismatch()),
            };
        }
        if let (Ok(a), Ok(b)) = (l.as_int(), r.as_int()) {
            let overflow = || RuntimeError::Other(format!("integer overflow in `{}`", op.symbol()));
            return Ok(match op {
                BinOp::Add => Value::Int(a.checked_add(b).ok_or_else(overflow)?),
                BinOp::Sub => Value::Int(a.checked_sub(b).ok_or_else(overflow)?),
                BinOp::Mul => Value::Int(a.checked_mul(b).ok_or_else(overflow)?),
                BinOp::Div => Value::Int(if b == 0 { return Err(RuntimeError::DivisionByZero) } else { a / b }),
                BinOp::Lt => truth(a < b),
                BinOp::Le => truth(a <= b),
                BinOp::Gt => truth(a > b),
                BinOp::Ge => truth(a >= b),
                BinOp::Eq => truth(a == b),
                BinOp::Ne => truth(a != b),
            });
        }
        if let (Some(a), Some(b)) = (l.as_real(), r.as_real()) {
            return Ok(match op {
                BinOp::Add => Value::Real(a + b),
                BinOp::Sub => Value::Real(a - b),
                BinOp::Mul => Value::Real(a * b),
                BinOp::Div => Value::Real(a / b),
                BinOp::Lt => truth(a < b),
                BinOp::Le => truth(a <= b),
                BinOp::Gt => truth(a > b),
                BinOp::Ge => truth(a >= b),
                BinOp::Eq => truth(a == b),
                BinOp::Ne => truth(a != b),
            });
        }
        let (Some(a), Some(b)) = (l.as_complex(), r.as_complex()) else { return Err(mismatch()) };
        Ok(match op {
            BinOp::Add => Value::Complex(a + b),
            BinOp::Sub => Value::Complex(a - b),
            BinOp::Mul => Value::Complex(a * b),
            BinOp::Div => Value::Complex(a / b),
            BinOp::Eq => truth(a == b),
            BinOp::Ne => truth(a != b),
            _ => return Err(mismatch()),
        })
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Real(v) => write!(f, "{v}"),
            Value::Complex(z) => write!(f, "({},{})", z.re, z.im),
            Value::Char(v) => write!(f, "{:?}", *v as char),
            Value::Str(s) => write!(f, "{s:?}"),
            Value::Array(id) => write!(f, "<array {id}>"),
            Value::Block { array, block } => write!(f, "<array {array} block {block}>"),
            Value::Row { array, block, row } => write!(f, "<array {array} block {block} row {row}>"),
        }
    }
}
