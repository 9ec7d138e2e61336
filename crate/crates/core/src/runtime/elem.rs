use num_complex::Complex64;
use std::fmt;

use super::RuntimeError;
use crate::typesys::ElemKind;

/// One stored array element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Elem {
    Int(i64),
    Char(u8),
    Real(f64),
    Complex(Complex64),
}

impl Elem {
    pub fn zero(kind: ElemKind) -> Elem {
        match kind {
            ElemKind::Int => Elem::Int(0),
            ElemKind::Char => Elem::Char(0),
            ElemKind::Real => Elem::Real(0.0),
            ElemKind::Complex => Elem::Complex(Complex64::new(0.0, 0.0)),
        }
    }

    pub fn kind(&self) -> ElemKind {
        match self {
            Elem::Int(_) => ElemKind::Int,
            Elem::Char(_) => ElemKind::Char,
            Elem::Real(_) => ElemKind::Real,
            Elem::Complex(_) => ElemKind::Complex,
        }
    }

    /// Convert for storage into an array of `kind`. Only widening is allowed.
    pub fn coerce(self, kind: ElemKind) -> Result<Elem, RuntimeError> {
        Ok(match (self, kind) {
            (e, k) if e.kind() == k => e,
            (Elem::Int(v), ElemKind::Real) => Elem::Real(v as f64),
            (Elem::Int(v), ElemKind::Complex) => Elem::Complex(Complex64::new(v as f64, 0.0)),
            (Elem::Real(v), ElemKind::Complex) => Elem::Complex(Complex64::new(v, 0.0)),
            (Elem::Int(v), ElemKind::Char) if (0..=255).contains(&v) => Elem::Char(v as u8),
            (Elem::Char(c), ElemKind::Int) => Elem::Int(i64::from(c)),
            (e, k) => {
                return Err(RuntimeError::TypeMismatch(format!("cannot store {} value in {} array", e.kind().name(), k.name())))
            }
        })
    }

    pub fn as_complex(&self) -> Complex64 {
        match *self {
            Elem::Int(v) => Complex64::new(v as f64, 0.0),
            Elem::Char(c) => Complex64::new(f64::from(c), 0.0),
            Elem::Real(v) => Complex64::new(v, 0.0),
            Elem::Complex(c) => c,
        }
    }

    /// Bitwise identity, so that `-0.0 != 0.0` and NaNs compare by payload.
    pub fn bits_eq(&self, other: &Elem) -> bool {
        match (self, other) {
            (Elem::Real(a), Elem::Real(b)) => a.to_bits() == b.to_bits(),
            (Elem::Complex(a), Elem::Complex(b)) => {
                a.re.to_bits() == b.re.to_bits() && a.im.to_bits() == b.im.to_bits()
            }
            (a, b) => a == b,
        }
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Elem::Int(v) => write!(f, "{v}"),
            Elem::Char(c) => write!(f, "{:?}", char::from(*c)),
            Elem::Real(v) => write!(f, "{v:?}"),
            Elem::Complex(c) => write!(f, "({:?},{:?})", c.re, c.im),
        }
    }
}
