//! Spherical-function evaluation by quadrature over the compact subgroup,
//! the rank-one Plancherel weight from its Gamma-factor product, and the
//! polynomial decay envelope used in integrability estimates.
//!
//! For every supported matrix model the projection of a_t k to the radial
//! coordinate takes the form u(k) = ln(p e^t + q e^{-t}) with node constants
//! (p, q) depending only on k. The integrand of the defining integral is then
//! exp((i lambda - rho) u), and the compact-group average becomes a weighted
//! sum over kernel nodes. A unit test pins the kernel against the actual
//! matrix-level horospherical projection.

use crate::error::{Error, Result};
use crate::groups::Realization;
use crate::quad::gauss_legendre_on;
use crate::roots::{RadialPoint, SpaceDescriptor, SpectralParameter};
use crate::special::{ln_abs_gamma_imag_sq, ln_gamma};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Quadrature budget and spectral-integral settings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuadratureConfig {
    /// Starting order of the compact-group quadrature ladder.
    pub k_order_start: usize,
    /// Ladder cap; exceeding it is an error, never a silent loss of accuracy.
    pub k_order_max: usize,
    /// Successive-order agreement target for the ladder.
    pub k_tol: f64,
    /// Upper end of the spectral integration interval.
    pub lambda_max: f64,
    /// Width of one spectral panel.
    pub panel_width: f64,
    /// Gauss-Legendre order per spectral panel.
    pub panel_order: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            k_order_start: 64,
            // the integrand's analyticity strip shrinks like e^{-t}, so the
            // far corner of the supported (lambda, t) range needs order 8192
            k_order_max: 16384,
            k_tol: 1e-9,
            lambda_max: 400.0,
            panel_width: 2.0,
            panel_order: 16,
        }
    }
}

impl QuadratureConfig {
    /// Settings for inversion-formula density work: a wider spectral interval
    /// so the smoothing window of the tail treatment is narrow.
    pub fn density_preset() -> Self {
        Self {
            lambda_max: 900.0,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k_order_start < 16 {
            return Err(Error::InvalidParameter(
                "quadrature order must be at least 16".into(),
            ));
        }
        if self.k_order_max < self.k_order_start
            || self.k_tol <= 0.0
            || self.lambda_max <= 0.0
            || self.panel_width <= 0.0
            || self.panel_order < 2
        {
            return Err(Error::InvalidParameter("inconsistent quadrature config".into()));
        }
        Ok(())
    }
}

/// One spherical-function evaluation.
#[derive(Debug, Clone)]
pub struct SphericalValue {
    pub value: Complex64,
    pub lambda: SpectralParameter,
    pub point: RadialPoint,
}

/// Spectral density at one parameter value.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlancherelWeight {
    pub lambda: f64,
    /// Density of the Plancherel measure with respect to d lambda on [0, inf):
    /// the inverse square of the Harish-Chandra function normalized so that
    /// the inversion formula reproduces total mass one.
    pub weight: f64,
}

/// Preferred matrix model for a descriptor, if one exists.
pub fn realization_for(space: &SpaceDescriptor) -> Result<Realization> {
    let (m1, m2) = space.rank_one_multiplicities()?;
    if m2 != 0 {
        return Err(Error::Unsupported(format!(
            "{} has a double root; no real matrix model is wired up",
            space.name
        )));
    }
    if m1 == 1 {
        Ok(Realization::Sl2)
    } else {
        Ok(Realization::Lorentz {
            n: m1 as usize + 1,
        })
    }
}

/// Kernel node constants: u_j(t) = ln(p_j e^t + q_j e^{-t}) with weights w_j
/// summing to one.
#[derive(Debug, Clone)]
pub struct RadialKernel {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub w: Vec<f64>,
}

impl RadialKernel {
    pub fn u(&self, j: usize, t: f64) -> f64 {
        (self.p[j] * t.exp() + self.q[j] * (-t).exp()).ln()
    }
}

#[derive(Hash, PartialEq, Eq)]
struct KernelKey {
    sl2: bool,
    n: usize,
    order: usize,
}

/// Node set for one realization and order, cached.
pub fn radial_kernel(realization: Realization, order: usize) -> Arc<RadialKernel> {
    static CACHE: OnceLock<Mutex<HashMap<KernelKey, Arc<RadialKernel>>>> = OnceLock::new();
    let key = match realization {
        Realization::Sl2 => KernelKey {
            sl2: true,
            n: 0,
            order,
        },
        Realization::Lorentz { n } => KernelKey { sl2: false, n, order },
    };
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().unwrap().get(&key) {
        return hit.clone();
    }
    let kernel = Arc::new(build_kernel(realization, order));
    cache.lock().unwrap().insert(key, kernel.clone());
    kernel
}

fn build_kernel(realization: Realization, order: usize) -> RadialKernel {
    match realization {
        Realization::Sl2 => {
            // uniform angles on a half-turn; the projection has period pi
            let mut p = Vec::with_capacity(order);
            let mut q = Vec::with_capacity(order);
            for j in 0..order {
                let th = std::f64::consts::PI * j as f64 / order as f64;
                p.push(th.cos() * th.cos());
                q.push(th.sin() * th.sin());
            }
            RadialKernel {
                p,
                q,
                w: vec![1.0 / order as f64; order],
            }
        }
        Realization::Lorentz { n } => {
            // polar angle with weight sin^{n-2}, Gauss-Legendre in the angle
            let (th, wgl) = gauss_legendre_on(order, 0.0, std::f64::consts::PI);
            let mut p = Vec::with_capacity(order);
            let mut q = Vec::with_capacity(order);
            let mut w = Vec::with_capacity(order);
            for (&a, &g) in th.iter().zip(&wgl) {
                p.push(0.5 * (1.0 + a.cos()));
                q.push(0.5 * (1.0 - a.cos()));
                w.push(g * a.sin().powi(n as i32 - 2));
            }
            let total: f64 = w.iter().sum();
            w.iter_mut().for_each(|v| *v /= total);
            RadialKernel { p, q, w }
        }
    }
}

/// A spherical-function factor at fixed radial point: precomputed projections
/// u_j and weights w_j e^{-rho u_j}, evaluated across many spectral values.
#[derive(Debug, Clone)]
pub struct PhiFactor {
    pub u: Vec<f64>,
    pub wexp: Vec<f64>,
}

impl PhiFactor {
    pub fn new(realization: Realization, rho: f64, t: f64, order: usize) -> Self {
        let kernel = radial_kernel(realization, order);
        let mut u = Vec::with_capacity(kernel.p.len());
        let mut wexp = Vec::with_capacity(kernel.p.len());
        for j in 0..kernel.p.len() {
            let uj = kernel.u(j, t);
            u.push(uj);
            wexp.push(kernel.w[j] * (-rho * uj).exp());
        }
        Self { u, wexp }
    }

    pub fn eval(&self, lambda: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (&u, &w) in self.u.iter().zip(&self.wexp) {
            let (s, c) = (lambda * u).sin_cos();
            acc += Complex64::new(w * c, w * s);
        }
        acc
    }
}

fn phi_once(realization: Realization, rho: f64, lambda: f64, t: f64, order: usize) -> Complex64 {
    PhiFactor::new(realization, rho, t, order).eval(lambda)
}

fn min_order(lambda: f64, t: f64) -> usize {
    let osc = lambda.abs() * t;
    if osc > 50.0 {
        (1.5 * osc).ceil() as usize
    } else {
        0
    }
}

/// Evaluate the spherical function at real spectral parameter `lambda` and
/// radial coordinate `t` by an order-escalation ladder: the order doubles
/// until two successive rules agree to `k_tol`, refusing when the cap is hit.
pub fn spherical_fn(
    space: &SpaceDescriptor,
    lambda: &SpectralParameter,
    point: &RadialPoint,
    quad: &QuadratureConfig,
) -> Result<SphericalValue> {
    quad.validate()?;
    let realization = realization_for(space)?;
    let rho = space.rho_scalar()?;
    let lam = lambda.as_scalar()?;
    let t = point.as_scalar()?;
    if t < 0.0 {
        return Err(Error::InvalidParameter("radial coordinate must be >= 0".into()));
    }
    let value = phi_ladder(realization, rho, lam, t, quad)?;
    Ok(SphericalValue {
        value,
        lambda: lambda.clone(),
        point: point.clone(),
    })
}

pub(crate) fn phi_ladder(
    realization: Realization,
    rho: f64,
    lambda: f64,
    t: f64,
    quad: &QuadratureConfig,
) -> Result<Complex64> {
    let mut order = quad.k_order_start.max(min_order(lambda, t)).next_power_of_two();
    if order > quad.k_order_max {
        return Err(Error::QuadratureBudget(format!(
            "oscillation lambda*t = {:.1} needs order {order} > cap {}",
            lambda.abs() * t,
            quad.k_order_max
        )));
    }
    let mut prev = phi_once(realization, rho, lambda, t, order);
    while order * 2 <= quad.k_order_max {
        order *= 2;
        let next = phi_once(realization, rho, lambda, t, order);
        if (next - prev).norm() <= quad.k_tol * next.norm().max(1.0) {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::QuadratureBudget(format!(
        "ladder exhausted at order {order} without {:.1e} agreement (lambda={lambda}, t={t})",
        quad.k_tol
    )))
}

/// Product of spherical-function values over a list of radial coordinates.
/// Degenerate coordinates t = 0 contribute an exact factor one.
pub fn spherical_product(
    space: &SpaceDescriptor,
    radial_coords: &[f64],
    lambda: f64,
    quad: &QuadratureConfig,
) -> Result<Complex64> {
    let realization = realization_for(space)?;
    let rho = space.rho_scalar()?;
    let mut acc = Complex64::new(1.0, 0.0);
    for &t in radial_coords {
        if t > 0.0 {
            acc *= phi_ladder(realization, rho, lambda, t, quad)?;
        }
    }
    Ok(acc)
}

/// Plancherel spectral density (2 pi)^{-1} |c(lambda)|^{-2} for a rank-one
/// space, from the Gamma-factor product of the rank-one Harish-Chandra
/// function in the Jacobi normalization matched to the radial weight
/// (2 sinh t)^{2a+1} (2 cosh t)^{2b+1}.
pub fn plancherel_weight(space: &SpaceDescriptor, lambda: f64) -> Result<PlancherelWeight> {
    let (m1, m2) = space.rank_one_multiplicities()?;
    Ok(PlancherelWeight {
        lambda,
        weight: spectral_density(lambda, m1, m2),
    })
}

/// Spectral density at multiplicities (m_alpha, m_2alpha); even in lambda.
pub fn spectral_density(lambda: f64, m_alpha: u32, m_2alpha: u32) -> f64 {
    let lam = lambda.abs();
    if lam == 0.0 {
        return 0.0;
    }
    let a = (m_alpha as f64 + m_2alpha as f64 - 1.0) / 2.0;
    let b = (m_2alpha as f64 - 1.0) / 2.0;
    let rho = a + b + 1.0;
    let z1 = Complex64::new(rho / 2.0, lam / 2.0);
    let z2 = Complex64::new((a - b + 1.0) / 2.0, lam / 2.0);
    let log_c_inv_sq = 2.0 * ln_gamma(z1).re + 2.0 * ln_gamma(z2).re
        - 2.0 * rho * std::f64::consts::LN_2
        - 2.0 * ln_gamma(Complex64::new(a + 1.0, 0.0)).re
        - ln_abs_gamma_imag_sq(lam);
    log_c_inv_sq.exp() / (2.0 * std::f64::consts::PI)
}

/// Decay envelope: product over positive roots of
/// (1 + |<lambda, alpha>|)^{-m_alpha / 2}.
///
/// The radial point must lie strictly inside the positive chamber.
pub fn decay_envelope(
    space: &SpaceDescriptor,
    point: &RadialPoint,
    lambda: &SpectralParameter,
) -> Result<f64> {
    if lambda.coords.len() != space.rank || point.coords.len() != space.rank {
        return Err(Error::LengthMismatch(
            "spectral/radial dimensions must match the rank".into(),
        ));
    }
    for root in &space.positive_roots {
        let pairing: f64 = root
            .vector
            .iter()
            .zip(&point.coords)
            .map(|(a, b)| a * b)
            .sum();
        if pairing <= 0.0 {
            return Err(Error::InvalidParameter(
                "decay envelope requires a point strictly inside the chamber".into(),
            ));
        }
    }
    let mut env = 1.0;
    for root in &space.positive_roots {
        let pairing: f64 = root
            .vector
            .iter()
            .zip(&lambda.coords)
            .map(|(a, b)| a * b)
            .sum();
        env *= (1.0 + pairing.abs()).powf(-(root.multiplicity as f64) / 2.0);
    }
    Ok(env)
}
