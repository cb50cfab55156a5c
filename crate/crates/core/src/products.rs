//! Reducible spaces as finite products of rank-one factors: componentwise
//! convolutions, the product density, the factorized squared norm, and the
//! max-over-factors regularity thresholds.

use crate::error::{Error, Result};
use crate::spherical::QuadratureConfig;
use crate::transform::{
    l2_norm_sq, ConvergenceReport, DensityEvaluator, DensityProfile, OrbitalConvolution, Verdict,
};
use serde::{Deserialize, Serialize};

/// A finite product of irreducible factors.
#[derive(Debug, Clone)]
pub struct ProductSpace {
    pub factors: Vec<crate::roots::SpaceDescriptor>,
}

impl ProductSpace {
    pub fn new(factors: Vec<crate::roots::SpaceDescriptor>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::EmptyInput("a product needs at least one factor".into()));
        }
        Ok(Self { factors })
    }

    pub fn total_dim(&self) -> usize {
        self.factors.iter().map(|f| f.dim).sum()
    }

    pub fn max_factor_dim(&self) -> usize {
        self.factors.iter().map(|f| f.dim).max().unwrap_or(0)
    }
}

/// Componentwise convolution data: one rank-one convolution per factor, all
/// of the same length r.
#[derive(Debug, Clone)]
pub struct ProductConvolution {
    pub factor_convs: Vec<OrbitalConvolution>,
}

impl ProductConvolution {
    pub fn new(factor_convs: Vec<OrbitalConvolution>) -> Result<Self> {
        if factor_convs.is_empty() {
            return Err(Error::EmptyInput("a product convolution needs factors".into()));
        }
        let r = factor_convs[0].r();
        if factor_convs.iter().any(|c| c.r() != r) {
            return Err(Error::LengthMismatch(
                "all factors must share the convolution length".into(),
            ));
        }
        Ok(Self { factor_convs })
    }

    pub fn r(&self) -> usize {
        self.factor_convs[0].r()
    }

    pub fn space(&self) -> ProductSpace {
        ProductSpace {
            factors: self.factor_convs.iter().map(|c| c.space.clone()).collect(),
        }
    }
}

/// Componentwise density evaluators plus product bookkeeping.
pub struct ProductDensity {
    pub evaluators: Vec<DensityEvaluator>,
}

impl ProductDensity {
    /// Requires r >= max_j dim_j + 1 so each factor is in its invertible
    /// regime; refuses naming the first offending factor.
    pub fn new(pconv: &ProductConvolution, quad: &QuadratureConfig) -> Result<Self> {
        let r = pconv.r();
        for conv in &pconv.factor_convs {
            if r < conv.space.dim + 1 {
                return Err(Error::ThresholdNotMet {
                    what: format!("product density, factor {}", conv.space.name),
                    required: conv.space.dim + 1,
                    actual: r,
                });
            }
        }
        let evaluators = pconv
            .factor_convs
            .iter()
            .map(|c| DensityEvaluator::new(c, quad, 0))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { evaluators })
    }

    /// Product density at one radial coordinate per factor.
    pub fn density(&self, ts: &[f64]) -> Result<f64> {
        if ts.len() != self.evaluators.len() {
            return Err(Error::LengthMismatch(format!(
                "need {} radial coordinates, got {}",
                self.evaluators.len(),
                ts.len()
            )));
        }
        let mut acc = 1.0;
        for (ev, &t) in self.evaluators.iter().zip(ts) {
            acc *= ev.density(t)?;
        }
        Ok(acc)
    }
}

/// Per-factor profiles with their masses; the product mass is the product of
/// the factor masses.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProductProfile {
    pub factor_profiles: Vec<DensityProfile>,
    pub mass: f64,
}

pub fn product_profile(
    pconv: &ProductConvolution,
    quad: &QuadratureConfig,
    points: usize,
) -> Result<ProductProfile> {
    let density = ProductDensity::new(pconv, quad)?;
    let mut factor_profiles = Vec::with_capacity(density.evaluators.len());
    let mut mass = 1.0;
    for (ev, conv) in density.evaluators.iter().zip(&pconv.factor_convs) {
        let extent = conv.total_displacement()? + 0.5;
        let p = ev.profile(extent, points)?;
        mass *= p.mass;
        factor_profiles.push(p);
    }
    Ok(ProductProfile {
        factor_profiles,
        mass,
    })
}

/// Factorized squared norm: per-factor reports plus their product. The
/// combined value exists only when every factor is finite; a divergent factor
/// makes the product divergent, otherwise an unstable factor makes it
/// marginal.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProductL2Report {
    pub factors: Vec<ConvergenceReport>,
    pub verdict: Verdict,
    pub value: Option<f64>,
}

pub fn product_l2_norm_sq(
    pconv: &ProductConvolution,
    quad: &QuadratureConfig,
) -> Result<ProductL2Report> {
    let factors = pconv
        .factor_convs
        .iter()
        .map(|c| l2_norm_sq(c, quad))
        .collect::<Result<Vec<_>>>()?;
    let verdict = if factors.iter().any(|f| f.verdict == Verdict::Divergent) {
        Verdict::Divergent
    } else if factors.iter().any(|f| f.verdict == Verdict::Marginal) {
        Verdict::Marginal
    } else {
        Verdict::Finite
    };
    let value = if verdict == Verdict::Finite {
        Some(factors.iter().map(|f| f.value.unwrap_or(f64::NAN)).product())
    } else {
        None
    };
    Ok(ProductL2Report {
        factors,
        verdict,
        value,
    })
}

/// Threshold arithmetic with the largest factor dimension in place of the
/// dimension. Also reports the absolute-continuity length r >= max dim, which
/// is the weaker companion threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductRegularityReport {
    pub l2_threshold_met: bool,
    pub ck_max: i64,
    /// Convolution length granting absolute continuity: r >= max dim.
    pub ac_threshold_met: bool,
}

#[allow(clippy::int_plus_one)] // r >= max_dim + 1 is the threshold as stated
pub fn product_regularity_report(pconv: &ProductConvolution) -> ProductRegularityReport {
    let max_dim = pconv.space().max_factor_dim() as i64;
    let r = pconv.r() as i64;
    ProductRegularityReport {
        l2_threshold_met: r >= max_dim + 1,
        ck_max: (r - max_dim - 1).max(-1),
        ac_threshold_met: r >= max_dim,
    }
}
