//! MSHD, the binary array file format used by `readfile` and `writefile`.
//!
//! ```text
//! "MSHD" | kind: u8 | rank: u8 | extents: rank x u64 LE | elements, row-major
//! ```
//!
//! Kind codes: 0 int (i64 LE), 1 char (u8), 2 real (f64 LE), 3 complex
//! (re then im, f64 LE).

use num_complex::Complex64;

use super::elem::Elem;
use super::RuntimeError;
use crate::typesys::ElemKind;

pub const MAGIC: &[u8; 4] = b"MSHD";

#[derive(Debug, Clone, PartialEq)]
pub struct MshdArray {
    pub kind: ElemKind,
    pub shape: Vec<usize>,
    pub data: Vec<Elem>,
}

pub fn encode(arr: &MshdArray) -> Result<Vec<u8>, RuntimeError> {
    let expected: usize = arr.shape.iter().product();
    if expected != arr.data.len() {
        return Err(RuntimeError::ShapeMismatch(format!("{} elements for shape {:?}", arr.data.len(), arr.shape)));
    }
    let mut out = Vec::with_capacity(6 + 8 * arr.shape.len() + expected * arr.kind.byte_size());
    out.extend_from_slice(MAGIC);
    out.push(arr.kind.code());
    out.push(arr.shape.len() as u8);
    for d in &arr.shape {
        out.extend_from_slice(&(*d as u64).to_le_bytes());
    }
    for v in &arr.data {
        match v.coerce(arr.kind)? {
            Elem::Int(x) => out.extend_from_slice(&x.to_le_bytes()),
            Elem::Char(x) => out.push(x),
            Elem::Real(x) => out.extend_from_slice(&x.to_le_bytes()),
            Elem::Complex(z) => {
                out.extend_from_slice(&z.re.to_le_bytes());
                out.extend_from_slice(&z.im.to_le_bytes());
            }
        }
    }
    Ok(out)
}

struct Reader<'a> {
    bytes: &'a [u8],
    at: usize,
}

impl Reader<'_> {
    fn take<const N: usize>(&mut self) -> Result<[u8; N], RuntimeError> {
        let end = self.at + N;
        let s = self.bytes.get(self.at..end).ok_or_else(|| RuntimeError::Format("truncated file".into()))?;
        self.at = end;
        Ok(s.try_into().expect("slice has length N"))
    }
}

pub fn decode(bytes: &[u8]) -> Result<MshdArray, RuntimeError> {
    let mut r = Reader { bytes, at: 0 };
    if &r.take::<4>()? != MAGIC {
        return Err(RuntimeError::Format("bad magic".into()));
    }
    let [code] = r.take::<1>()?;
    let kind = ElemKind::from_code(code).ok_or_else(|| RuntimeError::Format(format!("unknown element kind {code}")))?;
    let [rank] = r.take::<1>()?;
    let mut shape = Vec::with_capacity(rank as usize);
    for _ in 0..rank {
        shape.push(u64::from_le_bytes(r.take::<8>()?) as usize);
    }
    let len = shape.iter().try_fold(1usize, |a, d| a.checked_mul(*d)).ok_or_else(|| RuntimeError::Format("extents overflow".into()))?;
    if len.checked_mul(kind.byte_size()).is_none_or(|n| n > bytes.len()) {
        return Err(RuntimeError::Format("truncated file".into()));
    }
    let mut data = Vec::with_capacity(len);
    for _ in 0..len {
        data.push(match kind {
            ElemKind::Int => Elem::Int(i64::from_le_bytes(r.take::<8>()?)),
            ElemKind::Char => Elem::Char(r.take::<1>()?[0]),
            ElemKind::Real => Elem::Real(f64::from_le_bytes(r.take::<8>()?)),
            ElemKind::Complex => {
                let re = f64::from_le_bytes(r.take::<8>()?);
                let im = f64::from_le_bytes(r.take::<8>()?);
                Elem::Complex(Complex64::new(re, im))
            }
        });
    }
    if r.at != bytes.len() {
        return Err(RuntimeError::Format(format!("{} trailing bytes", bytes.len() - r.at)));
    }
    Ok(MshdArray { kind, shape, data })
}

pub fn read_file(path: &std::path::Path) -> Result<MshdArray, RuntimeError> {
    let bytes = std::fs::read(path).map_err(|e| RuntimeError::Io(format!("{}: {e}", path.display())))?;
    decode(&bytes)
}

pub fn write_file(path: &std::path::Path, arr: &MshdArray) -> Result<(), RuntimeError> {
    let bytes = encode(arr)?;
    std::fs::write(path, bytes).map_err(|e| RuntimeError::Io(format!("{}: {e}", path.display())))
}
