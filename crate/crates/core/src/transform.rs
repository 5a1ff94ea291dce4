//! Cyclic convolution over `Z_{n_1} x ... x Z_{n_k}` through one-dimensional
//! DFTs applied along each axis of the row-major layout.

use rustfft::num_complex::Complex;
use rustfft::{FftDirection, FftPlanner};

use crate::group::Group;

/// `out[z] = Σ_{x+y=z} a[x] b[y]` in floating point.
///
/// Both inputs have length `group.order()`.
pub fn cyclic_convolution(group: &Group, a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = group.order();
    assert_eq!(a.len(), n);
    assert_eq!(b.len(), n);
    let mut planner = FftPlanner::new();
    let mut fa: Vec<Complex<f64>> = a.iter().map(|&x| Complex::new(x, 0.0)).collect();
    let mut fb: Vec<Complex<f64>> = b.iter().map(|&x| Complex::new(x, 0.0)).collect();
    transform(group, &mut fa, &mut planner, FftDirection::Forward);
    transform(group, &mut fb, &mut planner, FftDirection::Forward);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= *y;
    }
    transform(group, &mut fa, &mut planner, FftDirection::Inverse);
    let scale = 1.0 / n as f64;
    fa.into_iter().map(|c| c.re * scale).collect()
}

fn transform(
    group: &Group,
    data: &mut [Complex<f64>],
    planner: &mut FftPlanner<f64>,
    direction: FftDirection,
) {
    let total = data.len();
    for (&len, &stride) in group.moduli().iter().zip(group.strides()) {
        if len == 1 {
            continue;
        }
        let fft = planner.plan_fft(len, direction);
        if stride == 1 {
            // contiguous lines: rustfft processes every chunk of `len`
            fft.process(data);
            continue;
        }
        let mut line = vec![Complex::new(0.0, 0.0); len];
        let mut scratch = vec![Complex::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        let block = len * stride;
        for outer in (0..total).step_by(block) {
            for inner in 0..stride {
                let base = outer + inner;
                for (k, slot) in line.iter_mut().enumerate() {
                    *slot = data[base + k * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (k, v) in line.iter().enumerate() {
                    data[base + k * stride] = *v;
                }
            }
        }
    }
}

/// Largest distance from a value to its nearest integer.
pub fn rounding_residual(values: &[f64]) -> f64 {
    values
        .iter()
        .map(|v| (v - v.round()).abs())
        .fold(0.0, f64::max)
}
