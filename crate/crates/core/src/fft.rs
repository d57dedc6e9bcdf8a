//! In-place radix-2 forward DFT, `X_j = sum_n x_n exp(-2 pi i j n / N)`.

use core::f64::consts::PI;

use num_complex::Complex64;

/// `data.len()` must be a power of two.
pub(crate) fn forward(data: &mut [Complex64]) {
    let n = data.len();
    debug_assert!(n.is_power_of_two());
    if n < 2 {
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
        let half = len / 2;
        for k in 0..half {
            let angle = -2.0 * PI * k as f64 / len as f64;
            let (s, c) = libm::sincos(angle);
            let w = Complex64::new(c, s);
            for start in (0..n).step_by(len) {
                let a = data[start + k];
                let b = data[start + k + half] * w;
                data[start + k] = a + b;
                data[start + k + half] = a - b;
            }
        }
        len *= 2;
    }
}
