//! Small truncated Taylor series ("jets") used to push radial derivatives
//! through the quadrature integrand without symbolic product rules.

use num_complex::Complex64;

/// Taylor coefficients c[k] = f^(k)(t0)/k! of a real-valued function, length = order+1.
#[derive(Debug, Clone)]
pub struct RealJet(pub Vec<f64>);

impl RealJet {
    /// Jet of A(t) = p e^t + q e^{-t} at t0.
    pub fn hyperbolic(p: f64, q: f64, t0: f64, order: usize) -> Self {
        let ep = p * t0.exp();
        let eq = q * (-t0).exp();
        let mut c = Vec::with_capacity(order + 1);
        let mut fact = 1.0;
        for k in 0..=order {
            if k > 0 {
                fact *= k as f64;
            }
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            c.push((ep + sign * eq) / fact);
        }
        RealJet(c)
    }

    /// Jet of ln A given the jet of A (A(t0) > 0 required).
    ///
    /// Standard recurrence: u_k = (a_k - (1/a_0) sum_{j=1}^{k-1} (j/k) u_j a_{k-j}).
    pub fn ln(&self) -> Self {
        let a = &self.0;
        let n = a.len();
        let mut u = vec![0.0; n];
        u[0] = a[0].ln();
        for k in 1..n {
            let mut s = a[k];
            for j in 1..k {
                s -= (j as f64 / k as f64) * u[j] * a[k - j];
            }
            u[k] = s / a[0];
        }
        RealJet(u)
    }
}

/// Compose a function given by its derivatives at u0 with a real jet u(t),
/// returning the Taylor coefficients of f(u(t)) at t0.
///
/// `f_derivs[m]` must hold f^(m)(u0) for m = 0..=order, where u0 = u jet
/// constant term. Horner evaluation of the Taylor polynomial of f in the
/// (nilpotent) increment series.
pub fn compose(f_derivs: &[Complex64], u: &RealJet) -> Vec<Complex64> {
    let order = u.0.len() - 1;
    debug_assert!(f_derivs.len() > order);
    // increment series d(t) = u(t) - u0, d[0] = 0
    let mut d = u.0.clone();
    d[0] = 0.0;
    // Taylor coefficients of f around u0
    let mut fact = 1.0;
    let coeff: Vec<Complex64> = f_derivs
        .iter()
        .take(order + 1)
        .enumerate()
        .map(|(m, &fm)| {
            if m > 0 {
                fact *= m as f64;
            }
            fm / fact
        })
        .collect();
    // Horner: result = c_n; result = result * d + c_{n-1}; ...
    let mut res = vec![Complex64::new(0.0, 0.0); order + 1];
    res[0] = coeff[order];
    for m in (0..order).rev() {
        // res = res * d (truncated), then add coeff[m]
        let mut next = vec![Complex64::new(0.0, 0.0); order + 1];
        for i in 0..=order {
            if res[i].norm_sqr() == 0.0 {
                continue;
            }
            for j in 1..=(order - i) {
                next[i + j] += res[i] * d[j];
            }
        }
        next[0] += coeff[m];
        res = next;
    }
    res
}

/// k-th derivative from Taylor coefficients: f^(k) = k! c_k.
pub fn derivative_from_jet(coeffs: &[Complex64], k: usize) -> Complex64 {
    let mut fact = 1.0;
    for i in 2..=k {
        fact *= i as f64;
    }
    coeffs[k] * fact
}
