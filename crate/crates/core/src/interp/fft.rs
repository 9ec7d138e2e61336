//! Radix-2 Cooley-Tukey FFT used by the `FFT` and `computeSin` builtins.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::runtime::RuntimeError;

/// Twiddle table for transforms of size `2 * len`: `e^(-2 pi i k / (2 len))`.
pub fn twiddles(len: usize) -> Result<Vec<Complex64>, RuntimeError> {
    let n = len * 2;
    if len == 0 || !n.is_power_of_two() {
        return Err(RuntimeError::BadLength(format!("sinusoid table of length {len} is not half a power of two")));
    }
    Ok((0..len)
        .map(|k| {
            let theta = -2.0 * PI * k as f64 / n as f64;
            Complex64::new(theta.cos(), theta.sin())
        })
        .collect())
}

fn bit_reverse(data: &mut [Complex64]) {
    let n = data.len();
    let bits = n.trailing_zeros();
    if bits == 0 {
        return;
    }
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if i < j {
            data.swap(i, j);
        }
    }
}

/// In-place unnormalized forward DFT: `X[k] = sum_j x[j] e^(-2 pi i jk/n)`.
pub fn fft_in_place(data: &mut [Complex64], sins: &[Complex64]) -> Result<(), RuntimeError> {
    let n = data.len();
    if !n.is_power_of_two() {
        return Err(RuntimeError::NotPowerOfTwo(format!("FFT length {n}")));
    }
    if sins.len() != n / 2 {
        return Err(RuntimeError::BadLength(format!("{} twiddles for a transform of length {n}", sins.len())));
    }
    bit_reverse(data);
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let step = n / len;
        for start in (0..n).step_by(len) {
            for k in 0..half {
                let w = sins[k * step];
                let u = data[start + k];
                let v = data[start + k + half] * w;
                data[start + k] = u + v;
                data[start + k + half] = u - v;
            }
        }
        len *= 2;
    }
    Ok(())
}
