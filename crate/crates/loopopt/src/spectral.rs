//! Periodic spectral calculus on uniform grids.
//!
//! Grid functions with values in the plane are packed as complex scalars
//! `z = x + i y`, so a single length-`n` transform differentiates both
//! coordinates at once.  All routines assume an even grid size; the mode
//! with index `n/2` is the Nyquist mode and is annihilated by
//! differentiation, which keeps the differentiation operator antisymmetric
//! and the composition `derivative ∘ derivative` equal to the dedicated
//! second derivative.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

/// Signed wavenumber of coefficient slot `j` in a length-`n` transform:
/// `0, 1, …, n/2, -(n/2-1), …, -1`.
pub fn signed_mode(n: usize, j: usize) -> i64 {
    if j <= n / 2 {
        j as i64
    } else {
        j as i64 - n as i64
    }
}

/// Discrete Fourier coefficients, normalized so that
/// `values[j] = Σ_m coeffs[m] e^{i m θ_j}` with `θ_j = 2π j / n`.
pub fn forward(values: &[Complex64]) -> Vec<Complex64> {
    let n = values.len();
    let mut buf = values.to_vec();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    for z in &mut buf {
        *z *= scale;
    }
    // rustfft's forward kernel uses e^{-2πi jk/n}; with the 1/n factor the
    // slot k therefore holds the coefficient of e^{+i m θ} for m = signed k.
    buf
}

/// Inverse of [`forward`]: synthesize grid values from coefficients.
pub fn inverse(coeffs: &[Complex64]) -> Vec<Complex64> {
    let n = coeffs.len();
    let mut buf = coeffs.to_vec();
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    buf
}

/// Multiply coefficients in place by `i·m` (the Nyquist slot is zeroed).
pub fn derivative_coeffs(coeffs: &mut [Complex64]) {
    let n = coeffs.len();
    for (j, z) in coeffs.iter_mut().enumerate() {
        if n % 2 == 0 && j == n / 2 {
            *z = Complex64::new(0.0, 0.0);
        } else {
            let m = signed_mode(n, j) as f64;
            *z *= Complex64::new(0.0, m);
        }
    }
}

/// Spectral derivative of a sampled periodic function.
pub fn derivative(values: &[Complex64]) -> Vec<Complex64> {
    let mut c = forward(values);
    derivative_coeffs(&mut c);
    inverse(&c)
}

/// Spectral second derivative, identical to applying [`derivative`] twice.
pub fn second_derivative(values: &[Complex64]) -> Vec<Complex64> {
    let mut c = forward(values);
    derivative_coeffs(&mut c);
    derivative_coeffs(&mut c);
    inverse(&c)
}

/// Mean of the samples and the periodic antiderivative of the mean-free
/// part (mode `m ≠ 0` divided by `i·m`, Nyquist zeroed).  The full
/// antiderivative of the samples is `mean · θ + periodic part`.
pub fn antiderivative(values: &[Complex64]) -> (Complex64, Vec<Complex64>) {
    let n = values.len();
    let mut c = forward(values);
    let mean = c[0];
    c[0] = Complex64::new(0.0, 0.0);
    for (j, z) in c.iter_mut().enumerate() {
        if j == 0 {
            continue;
        }
        if n % 2 == 0 && j == n / 2 {
            *z = Complex64::new(0.0, 0.0);
        } else {
            let m = signed_mode(n, j) as f64;
            *z /= Complex64::new(0.0, m);
        }
    }
    (mean, inverse(&c))
}

/// Evaluate the trigonometric interpolant at an arbitrary angle.  The
/// Nyquist coefficient is synthesized as `cos(nθ/2)`, the unique choice
/// that keeps the interpolant real for real data and minimizes oscillation.
pub fn eval_at(coeffs: &[Complex64], theta: f64) -> Complex64 {
    let n = coeffs.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for (j, &z) in coeffs.iter().enumerate() {
        if n % 2 == 0 && j == n / 2 {
            acc += z * (0.5 * n as f64 * theta).cos();
        } else {
            let m = signed_mode(n, j) as f64;
            acc += z * Complex64::new(0.0, m * theta).exp();
        }
    }
    acc
}

/// Magnitude of each folded mode `k = 0 … n/2`: the root sum of squares of
/// the `+k` and `-k` coefficients (`0` and Nyquist appear once).
pub fn folded_magnitudes(coeffs: &[Complex64]) -> Vec<f64> {
    let n = coeffs.len();
    let half = n / 2;
    let mut mags = Vec::with_capacity(half + 1);
    for k in 0..=half {
        let mut s = coeffs[k].norm_sqr();
        if k != 0 && k != half {
            s += coeffs[n - k].norm_sqr();
        }
        mags.push(s.sqrt());
    }
    mags
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn grid(n: usize) -> Vec<f64> {
        (0..n)
            .map(|j| 2.0 * std::f64::consts::PI * j as f64 / n as f64)
            .collect()
    }

    #[test]
    fn derivative_exact_on_trig_polynomial() {
        let n = 32;
        let vals: Vec<Complex64> = grid(n)
            .iter()
            .map(|&t| Complex64::new((3.0 * t).cos() + 0.5 * t.sin(), (2.0 * t).sin()))
            .collect();
        let expect: Vec<Complex64> = grid(n)
            .iter()
            .map(|&t| {
                Complex64::new(-3.0 * (3.0 * t).sin() + 0.5 * t.cos(), 2.0 * (2.0 * t).cos())
            })
            .collect();
        let got = derivative(&vals);
        for (g, e) in got.iter().zip(&expect) {
            assert_relative_eq!(g.re, e.re, epsilon = 1e-12, max_relative = 1e-12);
            assert_relative_eq!(g.im, e.im, epsilon = 1e-12, max_relative = 1e-12);
        }
    }

    #[test]
    fn second_derivative_matches_double_application() {
        let n = 16;
        let vals: Vec<Complex64> = grid(n)
            .iter()
            .map(|&t| Complex64::new((5.0 * t).cos(), (7.0 * t).sin() + t.cos()))
            .collect();
        let twice = derivative(&derivative(&vals));
        let once = second_derivative(&vals);
        for (a, b) in twice.iter().zip(&once) {
            assert!((a - b).norm() < 1e-11);
        }
    }

    #[test]
    fn nyquist_mode_is_annihilated() {
        let n = 8;
        let vals: Vec<Complex64> = grid(n)
            .iter()
            .map(|&t| Complex64::new((4.0 * t).cos(), 0.0))
            .collect();
        let d = derivative(&vals);
        for z in d {
            assert!(z.norm() < 1e-13);
        }
    }

    #[test]
    fn antiderivative_inverts_derivative_below_nyquist() {
        let n = 32;
        let vals: Vec<Complex64> = grid(n)
            .iter()
            .map(|&t| Complex64::new((3.0 * t).sin() - 2.0 * t.cos(), (6.0 * t).cos()))
            .collect();
        let d = derivative(&vals);
        let (mean, anti) = antiderivative(&d);
        assert!(mean.norm() < 1e-13);
        // Mean-free input below Nyquist: exact up to the original mean.
        let orig_mean = forward(&vals)[0];
        for (a, v) in anti.iter().zip(&vals) {
            assert!((a + orig_mean - v).norm() < 1e-12);
        }
    }

    #[test]
    fn interpolant_matches_samples_and_shifted_values() {
        let n = 16;
        let vals: Vec<Complex64> = grid(n)
            .iter()
            .map(|&t| Complex64::new((2.0 * t).cos() + (3.0 * t).sin(), t.sin()))
            .collect();
        let c = forward(&vals);
        for (j, &t) in grid(n).iter().enumerate() {
            assert!((eval_at(&c, t) - vals[j]).norm() < 1e-12);
        }
        let t = 0.37_f64;
        let expect = Complex64::new((2.0 * t).cos() + (3.0 * t).sin(), t.sin());
        assert!((eval_at(&c, t) - expect).norm() < 1e-12);
    }

    #[test]
    fn folded_magnitudes_identify_modes() {
        let n = 16;
        let vals: Vec<Complex64> = grid(n)
            .iter()
            .map(|&t| Complex64::new(2.0 * (3.0 * t).cos(), 0.0))
            .collect();
        let mags = folded_magnitudes(&forward(&vals));
        // cos(3θ)·2 has coefficients 1 at ±3 → folded magnitude √2.
        assert_relative_eq!(mags[3], std::f64::consts::SQRT_2, max_relative = 1e-12);
        for (k, &m) in mags.iter().enumerate() {
            if k != 3 {
                assert!(m < 1e-13);
            }
        }
    }
}
