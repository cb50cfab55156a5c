//! Independent structure-theory oracle: root multiplicities of the Lorentz
//! algebras recovered numerically from the adjoint action, compared against
//! the descriptors built by the library.

use nalgebra::DMatrix;
use orbital_core::roots::{build_space, SpaceFamily};

/// Basis of the Lorentz algebra on n spatial dimensions: rotations
/// E_ij - E_ji (i < j <= n) and boosts E_{i,last} + E_{last,i}.
fn lorentz_algebra_basis(n: usize) -> Vec<DMatrix<f64>> {
    let d = n + 1;
    let mut basis = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let mut m = DMatrix::zeros(d, d);
            m[(i, j)] = 1.0;
            m[(j, i)] = -1.0;
            basis.push(m);
        }
    }
    for i in 0..n {
        let mut m = DMatrix::zeros(d, d);
        m[(i, n)] = 1.0;
        m[(n, i)] = 1.0;
        basis.push(m);
    }
    basis
}

/// Eigenspace dimensions of ad(H) on the algebra, H the first boost.
/// Returns (dim of the +1 eigenspace, dim of the kernel). The adjoint matrix
/// is diagonalizable with spectrum {0, +-1}, so ranks of shifted copies give
/// the dimensions without an iterative eigensolver.
fn adjoint_eigencounts(n: usize) -> (usize, usize) {
    let basis = lorentz_algebra_basis(n);
    let d = basis.len();
    let h = &basis[n * (n - 1) / 2]; // first boost
    // matrix of ad(H) in the basis; the basis is Frobenius-orthogonal with
    // squared norm 2
    let mut ad = DMatrix::zeros(d, d);
    for (col, x) in basis.iter().enumerate() {
        let bracket = h * x - x * h;
        for (row, b) in basis.iter().enumerate() {
            let coeff = bracket.iter().zip(b.iter()).map(|(a, c)| a * c).sum::<f64>() / 2.0;
            ad[(row, col)] = coeff;
        }
    }
    let shifted = &ad - DMatrix::<f64>::identity(d, d);
    let plus_one = d - shifted.rank(1e-9);
    let kernel = d - ad.rank(1e-9);
    (plus_one, kernel)
}

#[test]
fn root_multiplicities_match_adjoint_eigenspaces() {
    for n in [2usize, 3, 4, 5] {
        let (m_alpha, kernel) = adjoint_eigencounts(n);
        let space = build_space(SpaceFamily::RealHyperbolic { n }).unwrap();
        assert_eq!(space.positive_roots.len(), 1);
        assert_eq!(
            space.positive_roots[0].multiplicity as usize, m_alpha,
            "n = {n}: descriptor multiplicity vs adjoint eigenspace dimension"
        );
        // kernel of ad(H) is the centralizer: rotations fixing the first
        // axis plus the radial direction itself
        assert_eq!(kernel, (n - 1) * (n - 2) / 2 + 1, "n = {n}");
        // dimension bookkeeping against the algebra-level count
        assert_eq!(space.dim, 1 + m_alpha, "n = {n}");
    }
}
