//! Native builtins: `FFT`, `computeSin`, `readfile`, `writefile`.

use num_complex::Complex64;

use super::exec::{At, Flow, Proc};
use super::fft::{fft_in_place, twiddles};
use super::value::Value;
use crate::frontend::ast::Expr;
use crate::frontend::Pos;
use crate::runtime::mshd::{self, MshdArray};
use crate::runtime::{ArrayId, Elem, RuntimeError};
use crate::typesys::ElemKind;

fn complex_of(values: &[Elem], what: &str) -> Result<Vec<Complex64>, RuntimeError> {
    values
        .iter()
        .map(|e| match e {
            Elem::Complex(z) => Ok(*z),
            other => Err(RuntimeError::TypeMismatch(format!("{what} holds {} values, not complex", other.kind().name()))),
        })
        .collect()
}

impl Proc<'_> {
    pub(crate) fn builtin(&mut self, pos: Pos, name: &str, args: &[Expr]) -> Flow<()> {
        match name {
            "FFT" => self.fft(pos, &args[0], &args[1]),
            "computeSin" => self.compute_sin(pos, &args[0]),
            "readfile" => self.file_op(pos, &args[0], &args[1], true),
            "writefile" => self.file_op(pos, &args[0], &args[1], false),
            _ => Err(RuntimeError::Other(format!("no function named `{name}`"))).at(pos),
        }
    }

    fn array_arg(&mut self, e: &Expr) -> Flow<ArrayId> {
        match self.eval(e)? {
            Value::Array(id) => Ok(id),
            other => Err(RuntimeError::TypeMismatch(format!("expected an array, found {}", other.type_name()))).at(e.pos),
        }
    }

    fn fft(&mut self, pos: Pos, row: &Expr, sins: &Expr) -> Flow<()> {
        let Value::Row { array, row: r, .. } = self.eval(row)? else {
            return Err(RuntimeError::TypeMismatch("FFT expects a row slice `A[bid][r]`".into())).at(row.pos);
        };
        let sid = self.array_arg(sins)?;
        let rank = self.rank;
        self.sched
            .with(|i| {
                let w = &mut i.world;
                let tw = if w.array(sid).desc.is_replicated() { w.contents(sid, rank) } else { w.read_all(rank, sid) };
                let tw = complex_of(&tw, "the sinusoid table")?;
                let mut data = complex_of(&w.read_row(rank, array, r)?, "the row")?;
                fft_in_place(&mut data, &tw)?;
                let out: Vec<Elem> = data.into_iter().map(Elem::Complex).collect();
                w.write_row(rank, array, r, &out)
            })
            .at(pos)
    }

    fn compute_sin(&mut self, pos: Pos, arg: &Expr) -> Flow<()> {
        let id = self.array_arg(arg)?;
        let arr = self.array(id);
        if arr.desc.elem != ElemKind::Complex || arr.desc.shape.len() != 1 {
            return Err(RuntimeError::TypeMismatch(format!("`{}` must be a one-dimensional complex array", arr.name)))
                .at(arg.pos);
        }
        let values: Vec<Elem> = twiddles(arr.desc.shape[0]).at(arg.pos)?.into_iter().map(Elem::Complex).collect();
        let (rank, owned_only) = (self.rank, self.owner_computes());
        self.sched
            .with(|i| {
                if arr.desc.is_replicated() {
                    i.world.set_contents(id, rank, &values)
                } else {
                    i.world.write_all(rank, id, &values, owned_only)
                }
            })
            .at(pos)
    }

    fn file_op(&mut self, pos: Pos, arr: &Expr, path: &Expr, read: bool) -> Flow<()> {
        let id = self.array_arg(arr)?;
        let Value::Str(path) = self.eval(path)? else {
            return Err(RuntimeError::TypeMismatch("file name must be a string".into())).at(path.pos);
        };
        let a = self.array(id);
        let rank = self.rank;
        if !a.desc.is_replicated() {
            match a.single_owner() {
                Some(o) if o == rank => {}
                Some(_) if self.owner_computes() => return Ok(()),
                _ => {
                    return Err(RuntimeError::NotOwner(format!(
                        "rank {rank} does not hold all of `{}`",
                        a.name
                    )))
                    .at(pos)
                }
            }
        }
        let full = self.config.workdir.join(&path);
        if read {
            let file = mshd::read_file(&full).at(pos)?;
            if file.kind != a.desc.elem || file.shape != a.desc.shape {
                return Err(RuntimeError::Format(format!(
                    "{path} holds {} {:?}, `{}` is {} {:?}",
                    file.kind.name(),
                    file.shape,
                    a.name,
                    a.desc.elem.name(),
                    a.desc.shape
                )))
                .at(pos);
            }
            self.sched.with(|i| i.world.set_contents(id, rank, &file.data)).at(pos)
        } else {
            let data = self.sched.with(|i| i.world.contents(id, rank));
            let file = MshdArray { kind: a.desc.elem, shape: a.desc.shape.clone(), data };
            mshd::write_file(&full, &file).at(pos)
        }
    }
}

