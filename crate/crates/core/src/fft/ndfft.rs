use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

/// In-place forward n-dimensional DFT (kernel e^{−2πi jᵀk/N}) on a row-major
/// hypercube with `len` points per axis, as nested 1-d transforms.
pub(crate) fn fft_nd(data: &mut [Complex64], dims: usize, len: usize) {
    let fft = FftPlanner::new().plan_fft_forward(len);
    let total = data.len();
    for axis in (0..dims).rev() {
        let stride = len.pow((dims - 1 - axis) as u32);
        if stride == 1 {
            data.par_chunks_mut(len).for_each_init(
                || vec![Complex64::default(); fft.get_inplace_scratch_len()],
                |scratch, line| fft.process_with_scratch(line, scratch),
            );
            continue;
        }
        let lines = total / len;
        let block = len * stride;
        let transformed: Vec<Vec<Complex64>> = (0..lines)
            .into_par_iter()
            .map(|line| {
                let base = (line / stride) * block + line % stride;
                let mut buf: Vec<Complex64> = (0..len).map(|i| data[base + i * stride]).collect();
                fft.process(&mut buf);
                buf
            })
            .collect();
        for (line, buf) in transformed.into_iter().enumerate() {
            let base = (line / stride) * block + line % stride;
            for (i, v) in buf.into_iter().enumerate() {
                data[base + i * stride] = v;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn matches_naive_2d() {
        let len = 8;
        let input: Vec<Complex64> =
            (0..len * len).map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos())).collect();
        let mut out = input.clone();
        fft_nd(&mut out, 2, len);
        for k0 in 0..len {
            for k1 in 0..len {
                let mut acc = Complex64::default();
                for j0 in 0..len {
                    for j1 in 0..len {
                        let ph = -2.0 * PI * ((j0 * k0 + j1 * k1) as f64) / len as f64;
                        acc += input[j0 * len + j1] * Complex64::from_polar(1.0, ph);
                    }
                }
                assert!((acc - out[k0 * len + k1]).norm() < 1e-12);
            }
        }
    }
}
