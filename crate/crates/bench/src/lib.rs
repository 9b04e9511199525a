//! Shared inputs for the benchmarks in `benches/`.

use num_complex::Complex64;

/// `a_k = (−1)^{k−1}(k−1)!`, `k = 1..=n`.
pub fn euler_coeffs(n: usize) -> Vec<Complex64> {
    let mut a = Vec::with_capacity(n);
    let mut f = 1.0;
    for k in 1..=n {
        if k > 1 {
            f *= (k - 1) as f64;
        }
        a.push(Complex64::new(if k % 2 == 1 { f } else { -f }, 0.0));
    }
    a
}
