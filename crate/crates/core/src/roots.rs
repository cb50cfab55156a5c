//! Restricted-root data for symmetric spaces of noncompact type: descriptors
//! for concrete families, the half-sum of positive roots, and the direction
//! separation constant used in integrability estimates.
//!
//! Roots are stored in a fixed orthonormal basis of the dual of the maximal
//! abelian subspace, with the short positive root scaled to norm 1. All inner
//! products are Euclidean in that basis.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// A positive restricted root together with the dimension of its root space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestrictedRoot {
    pub vector: Vec<f64>,
    pub multiplicity: u32,
}

impl RestrictedRoot {
    pub fn new(vector: Vec<f64>, multiplicity: u32) -> Result<Self> {
        if multiplicity == 0 {
            return Err(Error::InvalidParameter("multiplicity must be >= 1".into()));
        }
        if vector.iter().all(|&v| v == 0.0) || vector.is_empty() {
            return Err(Error::InvalidParameter("root vector must be nonzero".into()));
        }
        if !vector.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParameter("root vector must be finite".into()));
        }
        Ok(Self { vector, multiplicity })
    }

    pub fn norm(&self) -> f64 {
        self.vector.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// A point of the dual of the maximal abelian subspace (spectral side).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralParameter {
    pub coords: Vec<f64>,
}

impl SpectralParameter {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if !coords.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParameter("spectral parameter must be finite".into()));
        }
        Ok(Self { coords })
    }

    pub fn scalar(coord: f64) -> Self {
        Self { coords: vec![coord] }
    }

    /// Rank-one coordinate.
    pub fn as_scalar(&self) -> Result<f64> {
        if self.coords.len() == 1 {
            Ok(self.coords[0])
        } else {
            Err(Error::Unsupported("scalar access on a higher-rank parameter".into()))
        }
    }
}

/// A point of the closed positive chamber (radial side).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialPoint {
    pub coords: Vec<f64>,
}

impl RadialPoint {
    /// Rank-one radial coordinate t >= 0.
    pub fn scalar(t: f64) -> Result<Self> {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "radial coordinate must satisfy t >= 0, got {t}"
            )));
        }
        Ok(Self { coords: vec![t] })
    }

    /// General constructor; `space` supplies the chamber inequalities.
    pub fn in_chamber(coords: Vec<f64>, space: &SpaceDescriptor) -> Result<Self> {
        if coords.len() != space.rank {
            return Err(Error::LengthMismatch(format!(
                "radial point has {} coordinates, rank is {}",
                coords.len(),
                space.rank
            )));
        }
        for root in &space.positive_roots {
            let pairing: f64 = root.vector.iter().zip(&coords).map(|(a, b)| a * b).sum();
            if pairing < -1e-12 {
                return Err(Error::InvalidParameter(format!(
                    "point is outside the closed positive chamber (pairing {pairing})"
                )));
            }
        }
        Ok(Self { coords })
    }

    pub fn as_scalar(&self) -> Result<f64> {
        if self.coords.len() == 1 {
            Ok(self.coords[0])
        } else {
            Err(Error::Unsupported("scalar access on a higher-rank point".into()))
        }
    }
}

/// Supported space families.
#[derive(Debug, Clone, PartialEq)]
pub enum SpaceFamily {
    /// Real hyperbolic space of dimension n >= 2.
    RealHyperbolic { n: usize },
    /// Complex hyperbolic space of complex dimension m >= 1 (real dimension 2m).
    ComplexHyperbolic { m: usize },
    /// Abstract rank-one space with prescribed multiplicities for the short
    /// root and its double (either may be absent, not both).
    GenericRankOne { m_alpha: u32, m_2alpha: u32 },
    /// Explicit root data of arbitrary rank.
    Generic {
        rank: usize,
        roots: Vec<RestrictedRoot>,
        weyl_order: u64,
    },
}

/// Structural data of one symmetric space: rank, dimension, positive
/// restricted roots with multiplicities and the Weyl group order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceDescriptor {
    pub name: String,
    pub rank: usize,
    pub dim: usize,
    #[serde(rename = "roots")]
    pub positive_roots: Vec<RestrictedRoot>,
    pub weyl_order: u64,
}

impl SpaceDescriptor {
    fn validate(self) -> Result<Self> {
        let mult_sum: usize = self.positive_roots.iter().map(|r| r.multiplicity as usize).sum();
        if self.dim != self.rank + mult_sum {
            return Err(Error::DimensionMismatch {
                dim: self.dim,
                rank: self.rank,
                mult_sum,
            });
        }
        if self.rank == 0 {
            return Err(Error::InvalidParameter("rank must be >= 1".into()));
        }
        for r in &self.positive_roots {
            if r.vector.len() != self.rank {
                return Err(Error::LengthMismatch(format!(
                    "root lives in dimension {}, rank is {}",
                    r.vector.len(),
                    self.rank
                )));
            }
        }
        if self.rank == 1 && self.weyl_order != 2 {
            return Err(Error::InvalidParameter(
                "rank-one spaces have Weyl order 2".into(),
            ));
        }
        Ok(self)
    }

    /// Half-sum of positive roots with multiplicities.
    pub fn rho(&self) -> SpectralParameter {
        let mut v = vec![0.0; self.rank];
        for r in &self.positive_roots {
            for (acc, &x) in v.iter_mut().zip(&r.vector) {
                *acc += 0.5 * r.multiplicity as f64 * x;
            }
        }
        SpectralParameter { coords: v }
    }

    /// Rank-one multiplicities (m_alpha, m_2alpha); the short root has norm 1.
    pub fn rank_one_multiplicities(&self) -> Result<(u32, u32)> {
        if self.rank != 1 {
            return Err(Error::Unsupported(format!(
                "rank-one data requested on a rank-{} space",
                self.rank
            )));
        }
        let mut m1 = 0u32;
        let mut m2 = 0u32;
        for r in &self.positive_roots {
            let len = r.vector[0].abs();
            if (len - 1.0).abs() < 1e-12 {
                m1 = r.multiplicity;
            } else if (len - 2.0).abs() < 1e-12 {
                m2 = r.multiplicity;
            } else {
                return Err(Error::Unsupported(format!(
                    "rank-one roots must be alpha or 2 alpha with |alpha| = 1, got length {len}"
                )));
            }
        }
        Ok((m1, m2))
    }

    /// Rank-one half-sum coordinate: rho(H_t)/t = (m_alpha + 2 m_2alpha)/2.
    pub fn rho_scalar(&self) -> Result<f64> {
        let (m1, m2) = self.rank_one_multiplicities()?;
        Ok(0.5 * (m1 as f64 + 2.0 * m2 as f64))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("descriptor serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: SpaceDescriptor = serde_json::from_str(text)
            .map_err(|e| Error::InvalidParameter(format!("descriptor JSON: {e}")))?;
        raw.validate()
    }
}

/// Construct the descriptor for one of the supported families.
pub fn build_space(family: SpaceFamily) -> Result<SpaceDescriptor> {
    match family {
        SpaceFamily::RealHyperbolic { n } => {
            if n < 2 {
                return Err(Error::InvalidParameter(format!(
                    "real hyperbolic space needs n >= 2, got {n}"
                )));
            }
            SpaceDescriptor {
                name: format!("real-hyperbolic-{n}"),
                rank: 1,
                dim: n,
                positive_roots: vec![RestrictedRoot::new(vec![1.0], (n - 1) as u32)?],
                weyl_order: 2,
            }
            .validate()
        }
        SpaceFamily::ComplexHyperbolic { m } => {
            if m < 1 {
                return Err(Error::InvalidParameter(format!(
                    "complex hyperbolic space needs m >= 1, got {m}"
                )));
            }
            let mut roots = Vec::new();
            if m > 1 {
                roots.push(RestrictedRoot::new(vec![1.0], 2 * (m as u32 - 1))?);
            }
            roots.push(RestrictedRoot::new(vec![2.0], 1)?);
            SpaceDescriptor {
                name: format!("complex-hyperbolic-{m}"),
                rank: 1,
                dim: 2 * m,
                positive_roots: roots,
                weyl_order: 2,
            }
            .validate()
        }
        SpaceFamily::GenericRankOne { m_alpha, m_2alpha } => {
            if m_alpha == 0 && m_2alpha == 0 {
                return Err(Error::InvalidParameter(
                    "at least one multiplicity must be positive".into(),
                ));
            }
            let mut roots = Vec::new();
            if m_alpha > 0 {
                roots.push(RestrictedRoot::new(vec![1.0], m_alpha)?);
            }
            if m_2alpha > 0 {
                roots.push(RestrictedRoot::new(vec![2.0], m_2alpha)?);
            }
            SpaceDescriptor {
                name: format!("rank-one-{m_alpha}-{m_2alpha}"),
                rank: 1,
                dim: 1 + (m_alpha + m_2alpha) as usize,
                positive_roots: roots,
                weyl_order: 2,
            }
            .validate()
        }
        SpaceFamily::Generic { rank, roots, weyl_order } => {
            let dim = rank + roots.iter().map(|r| r.multiplicity as usize).sum::<usize>();
            SpaceDescriptor {
                name: format!("generic-rank-{rank}"),
                rank,
                dim,
                positive_roots: roots,
                weyl_order,
            }
            .validate()
        }
    }
}

/// Smallest over unit directions u of the largest |<u, alpha_i>|.
///
/// Rank one is exact (the only directions are +-alpha/|alpha|). Rank two scans
/// 10^4 angles and refines the minimum by golden-section search. Higher ranks
/// use a seeded random direction sweep with coordinate refinement; accuracy is
/// the documented 1e-3, which is all the integrability bounds need.
pub fn root_separation_constant(basis_roots: &[RestrictedRoot]) -> Result<f64> {
    if basis_roots.is_empty() {
        return Err(Error::EmptyInput("separation constant needs roots".into()));
    }
    let dim = basis_roots[0].vector.len();
    if basis_roots.iter().any(|r| r.vector.len() != dim) {
        return Err(Error::LengthMismatch("roots of mixed dimension".into()));
    }
    if !spans(basis_roots, dim) {
        return Err(Error::InvalidParameter(
            "roots do not span the dual space".into(),
        ));
    }
    let objective = |u: &[f64]| -> f64 {
        basis_roots
            .iter()
            .map(|r| r.vector.iter().zip(u).map(|(a, b)| a * b).sum::<f64>().abs())
            .fold(0.0, f64::max)
    };
    match dim {
        1 => Ok(basis_roots
            .iter()
            .map(|r| r.vector[0].abs())
            .fold(f64::INFINITY, f64::min)),
        2 => {
            let n = 10_000;
            let mut best = (0.0f64, f64::INFINITY);
            for i in 0..n {
                let th = std::f64::consts::PI * i as f64 / n as f64;
                let v = objective(&[th.cos(), th.sin()]);
                if v < best.1 {
                    best = (th, v);
                }
            }
            // golden-section refinement around the best grid angle
            let h = std::f64::consts::PI / n as f64;
            let (mut a, mut b) = (best.0 - h, best.0 + h);
            let phi = (5.0f64.sqrt() - 1.0) / 2.0;
            for _ in 0..60 {
                let c = b - phi * (b - a);
                let d = a + phi * (b - a);
                if objective(&[c.cos(), c.sin()]) < objective(&[d.cos(), d.sin()]) {
                    b = d;
                } else {
                    a = c;
                }
            }
            let th = 0.5 * (a + b);
            Ok(objective(&[th.cos(), th.sin()]))
        }
        _ => {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
            let mut best_u = vec![0.0; dim];
            let mut best = f64::INFINITY;
            for _ in 0..200_000 {
                let mut u: Vec<f64> = (0..dim)
                    .map(|_| {
                        let a: f64 = rng.gen::<f64>() * 2.0 - 1.0;
                        let b: f64 = rng.gen::<f64>() * 2.0 - 1.0;
                        // Box-Muller for an isotropic direction
                        (-2.0 * a.abs().max(1e-12).ln()).sqrt()
                            * (std::f64::consts::TAU * b).cos()
                    })
                    .collect();
                normalize(&mut u);
                let v = objective(&u);
                if v < best {
                    best = v;
                    best_u = u;
                }
            }
            // coordinate-wise refinement
            let mut step = 0.05;
            while step > 1e-5 {
                let mut improved = false;
                for i in 0..dim {
                    for sgn in [-1.0, 1.0] {
                        let mut cand = best_u.clone();
                        cand[i] += sgn * step;
                        normalize(&mut cand);
                        let v = objective(&cand);
                        if v < best {
                            best = v;
                            best_u = cand;
                            improved = true;
                        }
                    }
                }
                if !improved {
                    step *= 0.5;
                }
            }
            Ok(best)
        }
    }
}

fn normalize(u: &mut [f64]) {
    let n = u.iter().map(|v| v * v).sum::<f64>().sqrt();
    if n > 0.0 {
        u.iter_mut().for_each(|v| *v /= n);
    } else {
        u[0] = 1.0;
    }
}

fn spans(roots: &[RestrictedRoot], dim: usize) -> bool {
    // Gram-matrix rank via nalgebra SVD
    let m = nalgebra::DMatrix::from_fn(roots.len(), dim, |i, j| roots[i].vector[j]);
    m.rank(1e-10) == dim
}
