//! Complex error function through the Faddeeva function
//! `w(z) = exp(−z²) erfc(−iz)`.
//!
//! `w` is evaluated in the upper half plane with Weideman's rational
//! approximation (SIAM J. Numer. Anal. 31, 1497, 1994) using 40 terms,
//! which keeps the relative error near 1e−14 for the arguments this crate
//! produces. The lower half plane follows from `w(z) = 2exp(−z²) − w(−z)`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

const TERMS: usize = 40;

struct Weideman {
    scale: f64,
    /// Polynomial coefficients, highest degree first.
    coeffs: [f64; TERMS],
}

fn table() -> &'static Weideman {
    static TABLE: OnceLock<Weideman> = OnceLock::new();
    TABLE.get_or_init(|| {
        let n = TERMS;
        let m = 2 * n;
        let scale = (n as f64 / std::f64::consts::SQRT_2).sqrt();
        // samples f(t_k) for k = -m+1..m-1, with f(t) = exp(-t²)(L² + t²)
        // and t_k = L tan(kπ/2m); f at k = -m (t = ∞) is zero.
        let len = 2 * m;
        let mut f = vec![0.0; len];
        for (j, slot) in f.iter_mut().enumerate().skip(1) {
            let k = j as f64 - m as f64;
            let t = scale * (k * PI / (2.0 * m as f64)).tan();
            *slot = (-t * t).exp() * (scale * scale + t * t);
        }
        // a_j = Re DFT(fftshift(f))_j / 2m for j = 1..n. fftshift moves index
        // m to the front; DFT of a real even-ish sequence, done directly.
        let mut coeffs = [0.0; TERMS];
        for (out, j) in coeffs.iter_mut().rev().zip(1..=n) {
            let mut acc = 0.0;
            for (idx, &v) in f.iter().enumerate() {
                let shifted = (idx + len - m) % len;
                acc += v * (2.0 * PI * (j * shifted) as f64 / len as f64).cos();
            }
            *out = acc / len as f64;
        }
        Weideman { scale, coeffs }
    })
}

fn w_upper(z: Complex64) -> Complex64 {
    let t = table();
    let i = Complex64::i();
    let denom = t.scale - i * z;
    let ratio = (t.scale + i * z) / denom;
    let mut p = Complex64::new(0.0, 0.0);
    for &a in &t.coeffs {
        p = p * ratio + a;
    }
    2.0 * p / (denom * denom) + (1.0 / PI.sqrt()) / denom
}

/// Faddeeva function `w(z)`.
pub fn faddeeva(z: Complex64) -> Complex64 {
    if z.im >= 0.0 {
        w_upper(z)
    } else {
        2.0 * (-z * z).exp() - w_upper(-z)
    }
}

/// Complementary error function of a complex argument.
pub fn erfc(z: Complex64) -> Complex64 {
    if z.re >= 0.0 {
        (-z * z).exp() * w_upper(Complex64::i() * z)
    } else {
        2.0 - erfc(-z)
    }
}

/// Error function of a complex argument.
pub fn erf(z: Complex64) -> Complex64 {
    if z.re >= 0.0 {
        1.0 - erfc(z)
    } else {
        -erf(-z)
    }
}

/// `erf(a) + erf(b)`, rewritten through `erfc` when the two terms nearly
/// cancel (real parts of opposite sign).
pub fn erf_sum(a: Complex64, b: Complex64) -> Complex64 {
    match (a.re >= 0.0, b.re >= 0.0) {
        (true, false) => erfc(-b) - erfc(a),
        (false, true) => erfc(-a) - erfc(b),
        _ => erf(a) + erf(b),
    }
}
