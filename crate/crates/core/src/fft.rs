//! Iterative radix-2 FFT, used to sample power series on whole circles.

use num_complex::Complex64;

#[allow(unused_imports)]
use num_traits::Float;

/// In-place transform `X_k = Σ_j x_j e^{sign·2πi jk/N}` with no normalization.
///
/// `data.len()` must be a power of two.
pub fn fft_in_place(data: &mut [Complex64], sign: f64) {
    let n = data.len();
    assert!(n.is_power_of_two(), "fft length must be a power of two");
    if n <= 1 {
        return;
    }
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            data.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let ang = sign * 2.0 * core::f64::consts::PI / len as f64;
        let half = len / 2;
        for start in (0..n).step_by(len) {
            for k in 0..half {
                // twiddles from sin/cos directly; recurrences drift for long transforms
                let (s, c) = (ang * k as f64).sin_cos();
                let w = Complex64::new(c, s);
                let u = data[start + k];
                let v = data[start + k + half] * w;
                data[start + k] = u + v;
                data[start + k + half] = u - v;
            }
        }
        len <<= 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    #[test]
    fn matches_naive_dft() {
        let n = 16;
        let x: Vec<Complex64> = (0..n)
            .map(|j| Complex64::new((j as f64 * 0.37).sin(), (j as f64 * 1.3).cos()))
            .collect();
        let mut y = x.clone();
        fft_in_place(&mut y, 1.0);
        for k in 0..n {
            let mut s = Complex64::new(0.0, 0.0);
            for (j, xj) in x.iter().enumerate() {
                let a = 2.0 * core::f64::consts::PI * (j * k) as f64 / n as f64;
                s += xj * Complex64::new(a.cos(), a.sin());
            }
            assert!((s - y[k]).norm() < 1e-12);
        }
    }
}
