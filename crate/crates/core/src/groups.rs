//! Concrete matrix models for the rank-one groups: unimodular 2x2 matrices
//! and the identity component of the Lorentz group of an n+1 dimensional
//! quadratic form of signature (n, 1).
//!
//! Conventions:
//! - 2x2 model: radial subgroup a_t = diag(e^{t/2}, e^{-t/2}); the radial
//!   coordinate t is the geodesic distance, the short root pairs as
//!   alpha(H_t) = t with multiplicity 1.
//! - Lorentz model: form J = diag(1, .., 1, -1); radial subgroup is the
//!   hyperbolic rotation in the (first, last) coordinate plane; the compact
//!   subgroup is the special orthogonal block on the first n coordinates.
//!   alpha(H_t) = t with multiplicity n - 1.

use crate::error::{Error, Result};
use nalgebra::DMatrix;
use rand::Rng;

const INVARIANT_TOL: f64 = 1e-10;
/// Radial coordinates below this are snapped to the chamber wall.
const WALL_SNAP: f64 = 1e-12;

/// Which matrix model a group element lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Realization {
    /// 2x2 real matrices of determinant one.
    Sl2,
    /// Identity component of the Lorentz group on n spatial dimensions;
    /// matrices are (n+1) x (n+1).
    Lorentz { n: usize },
}

impl Realization {
    pub fn matrix_dim(&self) -> usize {
        match self {
            Realization::Sl2 => 2,
            Realization::Lorentz { n } => n + 1,
        }
    }
}

/// An element of the group in its matrix model.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement {
    pub matrix: DMatrix<f64>,
    pub realization: Realization,
}

/// An element of the maximal compact subgroup, stored as the full-size
/// orthogonal matrix of the ambient model.
#[derive(Debug, Clone, PartialEq)]
pub struct CompactElement {
    pub matrix: DMatrix<f64>,
}

impl GroupElement {
    /// Validate the realization invariant and wrap the matrix.
    pub fn new(matrix: DMatrix<f64>, realization: Realization) -> Result<Self> {
        let d = realization.matrix_dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::RealizationInvariant(format!(
                "expected a {d}x{d} matrix, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        match realization {
            Realization::Sl2 => {
                let det = matrix[(0, 0)] * matrix[(1, 1)] - matrix[(0, 1)] * matrix[(1, 0)];
                if (det - 1.0).abs() > INVARIANT_TOL {
                    return Err(Error::RealizationInvariant(format!(
                        "determinant {det} != 1"
                    )));
                }
            }
            Realization::Lorentz { n } => {
                let resid = lorentz_residual(&matrix, n);
                let scale = 1.0 + matrix.amax() * matrix.amax();
                if resid > INVARIANT_TOL * scale {
                    return Err(Error::RealizationInvariant(format!(
                        "g^T J g - J residual {resid:.3e}"
                    )));
                }
                if matrix[(n, n)] < 1.0 - INVARIANT_TOL {
                    return Err(Error::RealizationInvariant(
                        "not orthochronous (time-time entry < 1)".into(),
                    ));
                }
                let det = matrix.clone().lu().determinant();
                if (det - 1.0).abs() > 1e-8 * scale {
                    return Err(Error::RealizationInvariant(format!(
                        "determinant {det} != 1, not in the identity component"
                    )));
                }
            }
        }
        Ok(Self { matrix, realization })
    }

    pub fn identity(realization: Realization) -> Self {
        let d = realization.matrix_dim();
        Self {
            matrix: DMatrix::identity(d, d),
            realization,
        }
    }

    /// exp of the radial generator: the one-parameter subgroup at coordinate t.
    pub fn radial(t: f64, realization: Realization) -> Self {
        let matrix = match realization {
            Realization::Sl2 => {
                DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
                    (0.5 * t).exp(),
                    (-0.5 * t).exp(),
                ]))
            }
            Realization::Lorentz { n } => {
                let mut m = DMatrix::identity(n + 1, n + 1);
                m[(0, 0)] = t.cosh();
                m[(0, n)] = t.sinh();
                m[(n, 0)] = t.sinh();
                m[(n, n)] = t.cosh();
                m
            }
        };
        Self { matrix, realization }
    }

    pub fn mul(&self, other: &GroupElement) -> GroupElement {
        debug_assert_eq!(self.realization, other.realization);
        GroupElement {
            matrix: &self.matrix * &other.matrix,
            realization: self.realization,
        }
    }
}

impl CompactElement {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        let d = matrix.nrows();
        if matrix.ncols() != d {
            return Err(Error::RealizationInvariant("compact element must be square".into()));
        }
        let mut resid = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                let dot: f64 = (0..d).map(|k| matrix[(k, i)] * matrix[(k, j)]).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                resid = resid.max((dot - want).abs());
            }
        }
        if resid > INVARIANT_TOL {
            return Err(Error::RealizationInvariant(format!(
                "k^T k - I residual {resid:.3e}"
            )));
        }
        let det = matrix.clone().lu().determinant();
        if (det - 1.0).abs() > 1e-8 {
            return Err(Error::RealizationInvariant(format!("det k = {det} != 1")));
        }
        Ok(Self { matrix })
    }

    /// Planar rotation embedded at the given size: rotates coordinates (i, j).
    pub fn plane_rotation(size: usize, i: usize, j: usize, angle: f64) -> Self {
        let mut m = DMatrix::identity(size, size);
        m[(i, i)] = angle.cos();
        m[(j, j)] = angle.cos();
        m[(i, j)] = -angle.sin();
        m[(j, i)] = angle.sin();
        Self { matrix: m }
    }

    /// View as a group element of the given realization.
    pub fn as_group_element(&self, realization: Realization) -> GroupElement {
        GroupElement {
            matrix: self.matrix.clone(),
            realization,
        }
    }
}

fn lorentz_residual(m: &DMatrix<f64>, n: usize) -> f64 {
    // max entry of g^T J g - J
    let d = n + 1;
    let mut resid = 0.0f64;
    for i in 0..d {
        for j in i..d {
            let mut dot = 0.0;
            for k in 0..d {
                let sign = if k == n { -1.0 } else { 1.0 };
                dot += sign * m[(k, i)] * m[(k, j)];
            }
            let want = if i != j {
                0.0
            } else if i == n {
                -1.0
            } else {
                1.0
            };
            resid = resid.max((dot - want).abs());
        }
    }
    resid
}

/// Result of the horospherical (triangular) factorization g = k exp(H) n.
#[derive(Debug, Clone)]
pub struct IwasawaParts {
    pub k: CompactElement,
    /// Radial coordinate of H in the basis where alpha(H_t) = t.
    pub h: f64,
    pub n: DMatrix<f64>,
}

/// Horospherical projection: the radial coordinate H(g) with g = k exp(H) n.
pub fn iwasawa_h(g: &GroupElement) -> Result<f64> {
    Ok(iwasawa_decompose(g)?.h)
}

/// Full triangular factorization adapted to the realization.
pub fn iwasawa_decompose(g: &GroupElement) -> Result<IwasawaParts> {
    GroupElement::new(g.matrix.clone(), g.realization)?; // re-validate
    match g.realization {
        Realization::Sl2 => {
            let m = &g.matrix;
            let r = m[(0, 0)].hypot(m[(1, 0)]);
            let (c, s) = (m[(0, 0)] / r, m[(1, 0)] / r);
            let k = DMatrix::from_row_slice(2, 2, &[c, -s, s, c]);
            // k^T g is upper triangular with diagonal (r, 1/r)
            let x01 = c * m[(0, 1)] + s * m[(1, 1)];
            let h = 2.0 * r.ln();
            let n = DMatrix::from_row_slice(2, 2, &[1.0, x01 / r, 0.0, 1.0]);
            Ok(IwasawaParts {
                k: CompactElement::new(k)?,
                h,
                n,
            })
        }
        Realization::Lorentz { n } => {
            let m = &g.matrix;
            let d = n + 1;
            // image of the invariant null vector e_1 + e_last
            let mut w = nalgebra::DVector::zeros(d);
            for i in 0..d {
                w[i] = m[(i, 0)] + m[(i, n)];
            }
            let et = w[n];
            if et <= 0.0 {
                return Err(Error::RealizationInvariant(
                    "null-vector image has nonpositive height".into(),
                ));
            }
            let h = et.ln();
            // compact block: first column from w, remaining from shearing off
            // the null direction
            let mut q = DMatrix::<f64>::zeros(n, n);
            for i in 0..n {
                q[(i, 0)] = w[i] / et;
            }
            for j in 1..n {
                let shear = m[(n, j)] / et;
                for i in 0..n {
                    q[(i, j)] = m[(i, j)] - shear * w[i];
                }
            }
            let mut k = DMatrix::identity(d, d);
            k.view_mut((0, 0), (n, n)).copy_from(&q);
            // n = exp(-H) k^T g
            let kt_g = k.transpose() * m;
            let a_inv = GroupElement::radial(-h, g.realization).matrix;
            let nm = a_inv * kt_g;
            Ok(IwasawaParts {
                k: CompactElement::new(k)?,
                h,
                n: nm,
            })
        }
    }
}

/// Radial part of the two-sided compact factorization g = k1 exp(H) k2 with
/// H in the closed positive chamber.
pub fn cartan_radial(g: &GroupElement) -> Result<f64> {
    GroupElement::new(g.matrix.clone(), g.realization)?;
    Ok(cartan_radial_unchecked(g))
}

pub(crate) fn cartan_radial_unchecked(g: &GroupElement) -> f64 {
    let t = match g.realization {
        Realization::Sl2 => {
            let fro: f64 = g.matrix.iter().map(|v| v * v).sum();
            acosh_clamped(fro / 2.0)
        }
        Realization::Lorentz { n } => acosh_clamped(g.matrix[(n, n)]),
    };
    if t < WALL_SNAP {
        0.0
    } else {
        t
    }
}

fn acosh_clamped(x: f64) -> f64 {
    if x <= 1.0 {
        0.0
    } else {
        x.acosh()
    }
}

/// Full two-sided factorization (k1, t, k2) with g = k1 exp(H_t) k2.
pub fn cartan_decompose(g: &GroupElement) -> Result<(CompactElement, f64, CompactElement)> {
    GroupElement::new(g.matrix.clone(), g.realization)?;
    let t = cartan_radial_unchecked(g);
    match g.realization {
        Realization::Sl2 => {
            if t == 0.0 {
                return Ok((
                    CompactElement::new(g.matrix.clone())?,
                    0.0,
                    CompactElement::new(DMatrix::identity(2, 2))?,
                ));
            }
            let m = &g.matrix;
            // eigenvector of g^T g for the top eigenvalue e^t
            let b11 = m[(0, 0)] * m[(0, 0)] + m[(1, 0)] * m[(1, 0)];
            let b12 = m[(0, 0)] * m[(0, 1)] + m[(1, 0)] * m[(1, 1)];
            let b22 = m[(0, 1)] * m[(0, 1)] + m[(1, 1)] * m[(1, 1)];
            let top = t.exp();
            let cand1 = (b12, top - b11);
            let cand2 = (top - b22, b12);
            let (vx, vy) = if cand1.0.hypot(cand1.1) >= cand2.0.hypot(cand2.1) {
                cand1
            } else {
                cand2
            };
            let nrm = vx.hypot(vy);
            let (vx, vy) = (vx / nrm, vy / nrm);
            // k2 has first row = eigenvector
            let k2 = DMatrix::from_row_slice(2, 2, &[vx, vy, -vy, vx]);
            let a_inv = GroupElement::radial(-t, Realization::Sl2).matrix;
            let k1 = m * k2.transpose() * a_inv;
            Ok((CompactElement::new(k1)?, t, CompactElement::new(k2)?))
        }
        Realization::Lorentz { n } => {
            let d = n + 1;
            if t == 0.0 {
                return Ok((
                    CompactElement::new(g.matrix.clone())?,
                    0.0,
                    CompactElement::new(DMatrix::identity(d, d))?,
                ));
            }
            let m = &g.matrix;
            // first column of the left compact block from the image of the
            // base point (last basis vector)
            let sh = t.sinh();
            let mut q1 = nalgebra::DVector::zeros(n);
            for i in 0..n {
                q1[i] = m[(i, n)] / sh;
            }
            let q = complete_orthonormal(&q1);
            let mut k1 = DMatrix::identity(d, d);
            k1.view_mut((0, 0), (n, n)).copy_from(&q);
            let a_inv = GroupElement::radial(-t, g.realization).matrix;
            let k2 = a_inv * k1.transpose() * m;
            Ok((CompactElement::new(k1)?, t, CompactElement::new(k2)?))
        }
    }
}

/// Orthonormal matrix with prescribed first column and determinant +1,
/// built from a Householder reflector.
fn complete_orthonormal(first: &nalgebra::DVector<f64>) -> DMatrix<f64> {
    let n = first.len();
    let mut v = first.clone();
    v[0] -= 1.0; // v = q1 - e1
    let vnorm2: f64 = v.iter().map(|x| x * x).sum();
    let mut q = DMatrix::<f64>::identity(n, n);
    if vnorm2 > 1e-28 {
        // reflector I - 2 v v^T / |v|^2 maps e1 to q1, det = -1
        for i in 0..n {
            for j in 0..n {
                q[(i, j)] -= 2.0 * v[i] * v[j] / vnorm2;
            }
        }
        // restore det = +1 without touching the first column
        if n > 1 {
            for i in 0..n {
                q[(i, n - 1)] = -q[(i, n - 1)];
            }
        }
    }
    q
}

/// Haar-distributed element of the maximal compact subgroup.
///
/// 2x2 model: uniform rotation angle. Lorentz model: orthogonalized Gaussian
/// matrix with the triangular factor's diagonal signs fixed, then a column
/// flip onto the determinant-one component.
pub fn sample_k<R: Rng + ?Sized>(realization: Realization, rng: &mut R) -> CompactElement {
    match realization {
        Realization::Sl2 => {
            let th = rng.gen::<f64>() * std::f64::consts::TAU;
            CompactElement::plane_rotation(2, 0, 1, th)
        }
        Realization::Lorentz { n } => {
            let q = haar_special_orthogonal(n, rng);
            let mut m = DMatrix::identity(n + 1, n + 1);
            m.view_mut((0, 0), (n, n)).copy_from(&q);
            CompactElement { matrix: m }
        }
    }
}

/// Haar measure on the special orthogonal group via QR of a Gaussian matrix.
pub fn haar_special_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<f64> {
    if n == 1 {
        return DMatrix::identity(1, 1);
    }
    let g = DMatrix::from_fn(n, n, |_, _| standard_normal(rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            for i in 0..n {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    // restrict from the full orthogonal group to determinant +1
    if q.determinant() < 0.0 {
        for i in 0..n {
            q[(i, n - 1)] = -q[(i, n - 1)];
        }
    }
    q
}

fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    // Box-Muller; one value per call is plenty here
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen::<f64>();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Radial part of k_0 exp(H_1) k_1 ... exp(H_r) k_r.
///
/// Short words are multiplied out directly. For long words (total
/// displacement > 30) the product is accumulated in the factored form
/// k_left exp(H_T) k_right, re-extracting the two-sided decomposition after
/// every radial factor; the rounding error then depends only on the largest
/// single displacement, not on the accumulated one.
pub fn radial_of_product(
    realization: Realization,
    radial_coords: &[f64],
    compact: &[CompactElement],
) -> Result<f64> {
    if compact.len() != radial_coords.len() + 1 {
        return Err(Error::LengthMismatch(format!(
            "need r+1 compact factors for r radial factors, got {} and {}",
            compact.len(),
            radial_coords.len()
        )));
    }
    let total: f64 = radial_coords.iter().sum();
    if total <= 30.0 {
        let mut g = compact[0].matrix.clone();
        for (&t, k) in radial_coords.iter().zip(&compact[1..]) {
            g *= GroupElement::radial(t, realization).matrix;
            g *= &k.matrix;
        }
        return cartan_radial(&GroupElement::new(g, realization)?);
    }
    // factored accumulation: state is (k_right, T) with the full product
    // equal to (orthogonal) exp(H_T) k_right
    let mut t_acc = 0.0f64;
    let mut right = compact[0].matrix.clone();
    for (&s, k) in radial_coords.iter().zip(&compact[1..]) {
        // h = exp(H_T) * (right * exp(H_s) * k) has moderate entries e^{T+s}
        let m = &right * GroupElement::radial(s, realization).matrix * &k.matrix;
        let h = GroupElement::radial(t_acc, realization).matrix * m;
        let g = GroupElement {
            matrix: h,
            realization,
        };
        t_acc = cartan_radial_unchecked(&g);
        right = refactor_right(&g, t_acc, realization);
    }
    Ok(t_acc)
}

/// Right compact factor of g = k1 exp(H_t) k2, re-orthonormalized.
fn refactor_right(g: &GroupElement, t: f64, realization: Realization) -> DMatrix<f64> {
    match realization {
        Realization::Sl2 => {
            let m = &g.matrix;
            let b11 = m[(0, 0)] * m[(0, 0)] + m[(1, 0)] * m[(1, 0)];
            let b12 = m[(0, 0)] * m[(0, 1)] + m[(1, 0)] * m[(1, 1)];
            let b22 = m[(0, 1)] * m[(0, 1)] + m[(1, 1)] * m[(1, 1)];
            let top = t.exp();
            let cand1 = (b12, top - b11);
            let cand2 = (top - b22, b12);
            let (vx, vy) = if cand1.0.hypot(cand1.1) >= cand2.0.hypot(cand2.1) {
                cand1
            } else {
                cand2
            };
            let nrm = vx.hypot(vy).max(f64::MIN_POSITIVE);
            DMatrix::from_row_slice(2, 2, &[vx / nrm, vy / nrm, -vy / nrm, vx / nrm])
        }
        Realization::Lorentz { n } => {
            let d = n + 1;
            let m = &g.matrix;
            if t <= WALL_SNAP {
                return m.clone();
            }
            let sh = t.sinh();
            let mut q1 = nalgebra::DVector::zeros(n);
            for i in 0..n {
                q1[i] = m[(i, n)] / sh;
            }
            let qn = q1.norm().max(f64::MIN_POSITIVE);
            let q = complete_orthonormal(&(q1 / qn));
            let mut k1t = DMatrix::identity(d, d);
            k1t.view_mut((0, 0), (n, n)).copy_from(&q.transpose());
            let k2 = GroupElement::radial(-t, g.realization).matrix * k1t * m;
            orthonormalize_block(k2, n)
        }
    }
}

/// Modified Gram-Schmidt on the leading n x n block of a near-orthogonal
/// matrix; the block is well-conditioned so this only removes drift.
fn orthonormalize_block(mut m: DMatrix<f64>, n: usize) -> DMatrix<f64> {
    for j in 0..n {
        for prev in 0..j {
            let mut dot = 0.0;
            for i in 0..n {
                dot += m[(i, j)] * m[(i, prev)];
            }
            for i in 0..n {
                let sub = dot * m[(i, prev)];
                m[(i, j)] -= sub;
            }
        }
        let mut norm = 0.0;
        for i in 0..n {
            norm += m[(i, j)] * m[(i, j)];
        }
        let norm = norm.sqrt().max(f64::MIN_POSITIVE);
        for i in 0..n {
            m[(i, j)] /= norm;
        }
    }
    // clear any residue outside the block
    let d = m.nrows();
    for i in 0..d {
        for j in 0..d {
            if (i >= n) != (j >= n) {
                m[(i, j)] = 0.0;
            }
        }
    }
    if n < d {
        m[(n, n)] = 1.0;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_element<R: Rng>(realization: Realization, rng: &mut R) -> GroupElement {
        // word of compact and radial factors stays safely inside the model
        let k1 = sample_k(realization, rng).as_group_element(realization);
        let k2 = sample_k(realization, rng).as_group_element(realization);
        let t1 = rng.gen::<f64>() * 2.0;
        let t2 = rng.gen::<f64>() * 2.0;
        k1.mul(&GroupElement::radial(t1, realization))
            .mul(&k2)
            .mul(&GroupElement::radial(t2, realization))
    }

    #[test]
    fn iwasawa_identity_and_pure_radial() {
        for real in [Realization::Sl2, Realization::Lorentz { n: 2 }, Realization::Lorentz { n: 3 }] {
            assert_eq!(iwasawa_h(&GroupElement::identity(real)).unwrap(), 0.0);
            for &t in &[-1.3, 0.4, 2.2] {
                let a = GroupElement::radial(t, real);
                assert!((iwasawa_h(&a).unwrap() - t).abs() < 1e-12, "{real:?} t={t}");
            }
        }
    }

    #[test]
    fn iwasawa_reconstruction_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for real in [Realization::Sl2, Realization::Lorentz { n: 2 }, Realization::Lorentz { n: 3 }] {
            for _ in 0..1000 {
                let g = random_element(real, &mut rng);
                let parts = iwasawa_decompose(&g).unwrap();
                let rebuilt =
                    &parts.k.matrix * GroupElement::radial(parts.h, real).matrix * &parts.n;
                let err = (&rebuilt - &g.matrix).amax();
                assert!(err < 1e-10, "{real:?}: reconstruction error {err:.2e}");
                // the unipotent factor fixes the invariant null vector
                if let Realization::Lorentz { n } = real {
                    let d = n + 1;
                    let mut xi = nalgebra::DVector::zeros(d);
                    xi[0] = 1.0;
                    xi[n] = 1.0;
                    let img = &parts.n * &xi;
                    assert!((img - xi).amax() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn iwasawa_left_compact_right_unipotent_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for real in [Realization::Sl2, Realization::Lorentz { n: 3 }] {
            for _ in 0..100 {
                let g = random_element(real, &mut rng);
                let h0 = iwasawa_h(&g).unwrap();
                let k = sample_k(real, &mut rng).as_group_element(real);
                let parts = iwasawa_decompose(&random_element(real, &mut rng)).unwrap();
                let n_el = GroupElement::new(parts.n, real).unwrap();
                let moved = k.mul(&g).mul(&n_el);
                let h1 = iwasawa_h(&moved).unwrap();
                assert!((h0 - h1).abs() < 1e-9, "{real:?}: {h0} vs {h1}");
            }
        }
    }

    #[test]
    fn cartan_reconstruction_and_bi_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for real in [Realization::Sl2, Realization::Lorentz { n: 2 }, Realization::Lorentz { n: 3 }] {
            for _ in 0..1000 {
                let g = random_element(real, &mut rng);
                let (k1, t, k2) = cartan_decompose(&g).unwrap();
                assert!(t >= 0.0);
                let rebuilt = &k1.matrix * GroupElement::radial(t, real).matrix * &k2.matrix;
                let err = (&rebuilt - &g.matrix).amax();
                assert!(err < 1e-10, "{real:?}: reconstruction error {err:.2e}");

                let l = sample_k(real, &mut rng).as_group_element(real);
                let r = sample_k(real, &mut rng).as_group_element(real);
                let moved = l.mul(&g).mul(&r);
                let t2 = cartan_radial(&moved).unwrap();
                assert!((t - t2).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn cartan_radial_of_inverse_matches() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for real in [Realization::Sl2, Realization::Lorentz { n: 3 }] {
            for _ in 0..50 {
                let g = random_element(real, &mut rng);
                let inv = g.matrix.clone().try_inverse().unwrap();
                let gi = GroupElement::new(inv, real).unwrap();
                let a = cartan_radial(&g).unwrap();
                let b = cartan_radial(&gi).unwrap();
                assert!((a - b).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn cartan_pure_radial_recovers_t() {
        for real in [Realization::Sl2, Realization::Lorentz { n: 3 }] {
            for &t in &[0.0, 0.7, 3.0] {
                let a = GroupElement::radial(t, real);
                assert!((cartan_radial(&a).unwrap() - t).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn sampled_compacts_are_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for real in [Realization::Sl2, Realization::Lorentz { n: 2 }, Realization::Lorentz { n: 4 }] {
            for _ in 0..50 {
                let k = sample_k(real, &mut rng);
                let d = k.matrix.nrows();
                let resid = (k.matrix.transpose() * &k.matrix - DMatrix::identity(d, d)).amax();
                assert!(resid < 1e-12, "orthogonality residual {resid:.2e}");
                assert!((k.matrix.determinant() - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn product_radial_single_factor_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for real in [Realization::Sl2, Realization::Lorentz { n: 2 }] {
            for _ in 0..50 {
                let k0 = sample_k(real, &mut rng);
                let k1 = sample_k(real, &mut rng);
                let t = 1.3;
                let got = radial_of_product(real, &[t], &[k0, k1]).unwrap();
                assert!((got - t).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn product_radial_abelian_word_sums() {
        for real in [Realization::Sl2, Realization::Lorentz { n: 3 }] {
            let e = CompactElement {
                matrix: DMatrix::identity(real.matrix_dim(), real.matrix_dim()),
            };
            let got =
                radial_of_product(real, &[0.3, 1.1, 0.6], &[e.clone(), e.clone(), e.clone(), e])
                    .unwrap();
            assert!((got - 2.0).abs() < 1e-10);
        }
    }

    #[test]
    fn product_radial_triangle_inequality() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..500 {
            let ks: Vec<_> = (0..3).map(|_| sample_k(Realization::Sl2, &mut rng)).collect();
            let t = radial_of_product(Realization::Sl2, &[1.0, 1.0], &ks).unwrap();
            assert!((0.0..=2.0 + 1e-9).contains(&t), "t = {t}");
        }
    }

    #[test]
    fn product_radial_mismatched_lengths_rejected() {
        let e = CompactElement {
            matrix: DMatrix::identity(2, 2),
        };
        assert!(radial_of_product(Realization::Sl2, &[1.0], &[e]).is_err());
    }

    #[test]
    fn long_word_stays_on_manifold() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let real = Realization::Lorentz { n: 2 };
        let ks: Vec<_> = (0..9).map(|_| sample_k(real, &mut rng)).collect();
        let ts = vec![4.5; 8]; // total displacement 36 triggers stabilization
        let t = radial_of_product(real, &ts, &ks).unwrap();
        assert!(t <= 36.0 + 1e-6);
    }

    #[test]
    fn invariant_violations_rejected() {
        let bad = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 1.0]);
        assert!(GroupElement::new(bad, Realization::Sl2).is_err());
        let mut not_orthochronous = DMatrix::identity(4, 4);
        not_orthochronous[(3, 3)] = -1.0;
        not_orthochronous[(0, 0)] = -1.0;
        assert!(GroupElement::new(not_orthochronous, Realization::Lorentz { n: 3 }).is_err());
    }
}
