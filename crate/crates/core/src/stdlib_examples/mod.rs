//! The example corpus, its input generator and the reference 2D DFT.

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::runtime::mshd::{self, MshdArray};
use crate::runtime::{Elem, RuntimeError};
use crate::typesys::ElemKind;

/// What a corpus program needs and produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Inputs {
    None,
    /// An `n`×`n` complex image named `image.dat` in the working directory.
    Image,
}

#[derive(Debug, Clone, Copy)]
pub struct ExampleCase {
    pub name: &'static str,
    /// Path relative to the crate root.
    pub path: &'static str,
    pub source: &'static str,
    pub min_procs: usize,
    pub inputs: Inputs,
    /// Max abs error allowed against [`oracle_dft2d`]; `None` when there is no numeric output.
    pub tolerance: Option<f64>,
    /// Contains no asynchronous channels.
    pub blocking: bool,
}

macro_rules! case {
    ($name:literal, $min:expr, $inputs:expr, $tol:expr, $blocking:expr) => {
        ExampleCase {
            name: $name,
            path: concat!("examples/", $name, ".mesh"),
            source: include_str!(concat!("../../examples/", $name, ".mesh")),
            min_procs: $min,
            inputs: $inputs,
            tolerance: $tol,
            blocking: $blocking,
        }
    };
}

pub const CORPUS: &[ExampleCase] = &[
    case!("listing1", 3, Inputs::None, None, true),
    case!("listing2", 3, Inputs::None, None, true),
    case!("listing2_async", 3, Inputs::None, None, false),
    case!("fft2d", 1, Inputs::Image, Some(1e-8), true),
    case!("fft2d_arraydist", 1, Inputs::Image, Some(1e-8), true),
];

pub fn case(name: &str) -> Option<&'static ExampleCase> {
    CORPUS.iter().find(|c| c.name == name)
}

pub const IMAGE_IN: &str = "image.dat";
pub const IMAGE_OUT: &str = "image.out.dat";

/// Deterministic pseudo-random `n`×`n` complex matrix, row-major, entries in [-1, 1).
pub fn image_matrix(n: usize, seed: u64) -> Result<Vec<Complex64>, RuntimeError> {
    if !n.is_power_of_two() {
        return Err(RuntimeError::NotPowerOfTwo(format!("image size {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n * n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect())
}

pub fn complex_file(n: usize, data: &[Complex64]) -> MshdArray {
    MshdArray { kind: ElemKind::Complex, shape: vec![n, n], data: data.iter().copied().map(Elem::Complex).collect() }
}

pub fn generate_image(n: usize, seed: u64, path: &Path) -> Result<(), RuntimeError> {
    mshd::write_file(path, &complex_file(n, &image_matrix(n, seed)?))
}

/// Direct O(n⁴) evaluation of the 2D DFT of a square row-major matrix.
pub fn oracle_dft2d(x: &[Complex64]) -> Vec<Complex64> {
    let n = (x.len() as f64).sqrt().round() as usize;
    assert_eq!(n * n, x.len(), "matrix must be square");
    let w = |t: usize| Complex64::from_polar(1.0, -2.0 * PI * (t % n) as f64 / n as f64);
    let mut out = vec![Complex64::new(0.0, 0.0); n * n];
    for k in 0..n {
        for l in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for a in 0..n {
                for b in 0..n {
                    acc += x[a * n + b] * w(a * k + b * l);
                }
            }
            out[k * n + l] = acc;
        }
    }
    out
}

/// Write `image.dat` and the expected `image.expected.dat` into `dir`.
pub fn make_fixtures(dir: &Path, n: usize, seed: u64) -> Result<(), RuntimeError> {
    std::fs::create_dir_all(dir).map_err(|e| RuntimeError::Io(format!("{}: {e}", dir.display())))?;
    let x = image_matrix(n, seed)?;
    mshd::write_file(&dir.join(IMAGE_IN), &complex_file(n, &x))?;
    mshd::write_file(&dir.join("image.expected.dat"), &complex_file(n, &oracle_dft2d(&x)))
}

pub fn max_abs_error(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}
