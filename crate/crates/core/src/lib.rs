//! meshlite: an interpreter for a small PGAS language whose variables carry
//! composable type chains, running on a simulated multi-process runtime.

pub mod frontend;
pub mod interp;
pub mod runtime;
pub mod stdlib_examples;
pub mod typesys;

pub use interp::{run, RunConfig, RunOutcome, RuntimeFault};
pub use typesys::{CheckedProgram, Diagnostic};

/// Parse and check `source`; syntax errors come back as a single diagnostic.
pub fn compile(source: &str) -> Result<CheckedProgram, Vec<Diagnostic>> {
    let program = frontend::parse_source(source).map_err(|e| {
        let text = e.to_string();
        let message = text.strip_prefix(&format!("{}: ", e.pos())).unwrap_or(&text).to_string();
        vec![Diagnostic::new(e.pos(), e.rule(), message)]
    })?;
    typesys::check_program(&program)
}

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/chains.md")]
    mod chains {}
    #[doc = include_str!("../../../book/src/layouts.md")]
    mod layouts {}
    #[doc = include_str!("../../../book/src/share.md")]
    mod share {}
    #[doc = include_str!("../../../book/src/communication.md")]
    mod communication {}
    #[doc = include_str!("../../../book/src/fft.md")]
    mod fft {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
