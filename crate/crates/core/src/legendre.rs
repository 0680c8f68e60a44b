//! Legendre polynomials and their normalizations.
//!
//! Two normalizations are used in the crate:
//!
//! * probability-normalized, `sqrt(2n+1) P_n`, orthonormal against the uniform
//!   density `1/2` on `[-1, 1]` (the gPC family);
//! * Lebesgue-normalized, `sqrt((2n+1)/2) P_n`, orthonormal against `dy` on
//!   `[-1, 1]` (the reference-cell DG family).

/// Values `P_0(x) ..= P_n(x)` and derivatives, written into `vals`/`ders`
/// (both of length `n + 1`).
pub fn legendre_with_derivatives(n: usize, x: f64, vals: &mut [f64], ders: &mut [f64]) {
    debug_assert!(vals.len() > n && ders.len() > n);
    vals[0] = 1.0;
    ders[0] = 0.0;
    if n == 0 {
        return;
    }
    vals[1] = x;
    ders[1] = 1.0;
    for j in 2..=n {
        let jf = j as f64;
        vals[j] = ((2.0 * jf - 1.0) * x * vals[j - 1] - (jf - 1.0) * vals[j - 2]) / jf;
        // P_j' = P_{j-2}' + (2j - 1) P_{j-1}
        ders[j] = ders[j - 2] + (2.0 * jf - 1.0) * vals[j - 1];
    }
}

/// `P_n(x)` and `P_n'(x)` for a single degree.
pub fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut vals = vec![0.0; n + 1];
    let mut ders = vec![0.0; n + 1];
    legendre_with_derivatives(n, x, &mut vals, &mut ders);
    (vals[n], ders[n])
}

/// Legendre polynomial of degree `n` normalized to unit norm against the
/// uniform probability density on `[-1, 1]`.
pub fn orthonormal_uniform(n: usize, x: f64) -> f64 {
    ((2 * n + 1) as f64).sqrt() * legendre(n, x).0
}

/// Normalization factor turning `P_n` into a Lebesgue-orthonormal function on `[-1, 1]`.
#[inline]
pub fn lebesgue_scale(n: usize) -> f64 {
    ((2 * n + 1) as f64 / 2.0).sqrt()
}

/// Normalization factor turning `P_n` into a probability-orthonormal function on `[-1, 1]`.
#[inline]
pub fn uniform_scale(n: usize) -> f64 {
    ((2 * n + 1) as f64).sqrt()
}
