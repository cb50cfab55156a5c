//! Special-function helpers: complex log-Gamma and stable log/abs combinations.

use num_complex::Complex64;
use std::f64::consts::PI;

// Lanczos coefficients (g = 7, 9 terms), as used by the GNU Scientific Library.
const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS_P: [f64; 9] = [
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
];

/// Principal branch of log Gamma(z) for Re(z) > 0.
///
/// Accuracy is about 1e-13 relative over the arguments used here; callers
/// needing Re(z) <= 0 must apply the reflection formula themselves.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    debug_assert!(z.re > 0.0, "ln_gamma requires Re(z) > 0");
    let zm1 = z - 1.0;
    let mut acc = Complex64::new(LANCZOS_P[0], 0.0);
    for (i, &p) in LANCZOS_P.iter().enumerate().skip(1) {
        acc += p / (zm1 + i as f64);
    }
    let w = zm1 + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (zm1 + 0.5) * w.ln() - w + acc.ln()
}

/// Gamma(x) for real x > 0.
pub fn gamma_real(x: f64) -> f64 {
    ln_gamma(Complex64::new(x, 0.0)).re.exp()
}

/// log sinh(x) for x > 0, stable for large x.
pub fn ln_sinh(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    x + (-(-2.0 * x).exp()).ln_1p() - std::f64::consts::LN_2
}

/// log |Gamma(i y)|^2 = log( pi / (y sinh(pi y)) ) for y > 0.
pub fn ln_abs_gamma_imag_sq(y: f64) -> f64 {
    PI.ln() - y.ln() - ln_sinh(PI * y)
}
