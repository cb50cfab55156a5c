//! Property tests for the structural invariants: decomposition invariances,
//! bookkeeping identities and bounds that must hold on random inputs.

use nalgebra::DMatrix;
use orbital_core::groups::{
    cartan_radial, iwasawa_decompose, iwasawa_h, CompactElement, GroupElement, Realization,
};
use orbital_core::roots::{build_space, RadialPoint, SpaceFamily, SpectralParameter};
use orbital_core::spherical::{spherical_fn, spherical_product, QuadratureConfig};
use orbital_core::transform::OrbitalConvolution;
use proptest::prelude::*;

fn sl2_from_word(th1: f64, t: f64, th2: f64) -> GroupElement {
    let k1 = CompactElement::plane_rotation(2, 0, 1, th1).as_group_element(Realization::Sl2);
    let k2 = CompactElement::plane_rotation(2, 0, 1, th2).as_group_element(Realization::Sl2);
    k1.mul(&GroupElement::radial(t, Realization::Sl2)).mul(&k2)
}

fn shear(x: f64) -> GroupElement {
    GroupElement::new(
        DMatrix::from_row_slice(2, 2, &[1.0, x, 0.0, 1.0]),
        Realization::Sl2,
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn iwasawa_invariant_under_left_rotation_right_shear(
        th1 in 0.0..std::f64::consts::TAU,
        t in 0.0..3.0f64,
        th2 in 0.0..std::f64::consts::TAU,
        th3 in 0.0..std::f64::consts::TAU,
        x in -2.0..2.0f64,
    ) {
        let g = sl2_from_word(th1, t, th2);
        let k = CompactElement::plane_rotation(2, 0, 1, th3).as_group_element(Realization::Sl2);
        let n = shear(x);
        let moved = k.mul(&g).mul(&n);
        let h0 = iwasawa_h(&g).unwrap();
        let h1 = iwasawa_h(&moved).unwrap();
        prop_assert!((h0 - h1).abs() < 1e-9, "{h0} vs {h1}");
    }

    #[test]
    fn iwasawa_reconstruction_exact(
        th1 in 0.0..std::f64::consts::TAU,
        t in 0.0..3.0f64,
        th2 in 0.0..std::f64::consts::TAU,
    ) {
        let g = sl2_from_word(th1, t, th2);
        let parts = iwasawa_decompose(&g).unwrap();
        let rebuilt = &parts.k.matrix
            * GroupElement::radial(parts.h, Realization::Sl2).matrix
            * &parts.n;
        prop_assert!((&rebuilt - &g.matrix).amax() < 1e-10);
    }

    #[test]
    fn cartan_bi_invariance(
        th1 in 0.0..std::f64::consts::TAU,
        t in 0.0..3.0f64,
        th2 in 0.0..std::f64::consts::TAU,
        th3 in 0.0..std::f64::consts::TAU,
        th4 in 0.0..std::f64::consts::TAU,
    ) {
        let g = sl2_from_word(th1, t, th2);
        let l = CompactElement::plane_rotation(2, 0, 1, th3).as_group_element(Realization::Sl2);
        let r = CompactElement::plane_rotation(2, 0, 1, th4).as_group_element(Realization::Sl2);
        let a = cartan_radial(&g).unwrap();
        let b = cartan_radial(&l.mul(&g).mul(&r)).unwrap();
        prop_assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn descriptor_bookkeeping_generic_rank_one(
        m1 in 0u32..8,
        m2 in 0u32..4,
    ) {
        prop_assume!(m1 + m2 > 0);
        let s = build_space(SpaceFamily::GenericRankOne { m_alpha: m1, m_2alpha: m2 }).unwrap();
        let mult: usize = s.positive_roots.iter().map(|r| r.multiplicity as usize).sum();
        prop_assert_eq!(s.dim, s.rank + mult);
        prop_assert_eq!(s.weyl_order, 2);
        // half-sum lies in the closed chamber
        let rho = s.rho();
        for root in &s.positive_roots {
            let pairing: f64 = root.vector.iter().zip(&rho.coords).map(|(a, b)| a * b).sum();
            prop_assert!(pairing >= 0.0);
        }
    }

    #[test]
    fn spherical_bounded_and_even(
        lam in 0.0..30.0f64,
        t in 0.0..3.0f64,
    ) {
        let space = build_space(SpaceFamily::RealHyperbolic { n: 2 }).unwrap();
        let quad = QuadratureConfig::default();
        let v = spherical_fn(
            &space,
            &SpectralParameter::scalar(lam),
            &RadialPoint::scalar(t).unwrap(),
            &quad,
        ).unwrap().value;
        prop_assert!(v.norm() <= 1.0 + 1e-8);
        let w = spherical_fn(
            &space,
            &SpectralParameter::scalar(-lam),
            &RadialPoint::scalar(t).unwrap(),
            &quad,
        ).unwrap().value;
        prop_assert!((v - w).norm() < 1e-10);
    }

    #[test]
    fn transform_invariant_under_generator_permutation(
        t1 in 0.1..2.0f64,
        t2 in 0.1..2.0f64,
        t3 in 0.1..2.0f64,
        lam in 0.0..10.0f64,
    ) {
        let space = build_space(SpaceFamily::RealHyperbolic { n: 2 }).unwrap();
        let quad = QuadratureConfig::default();
        let a = spherical_product(&space, &[t1, t2, t3], lam, &quad).unwrap();
        let b = spherical_product(&space, &[t3, t1, t2], lam, &quad).unwrap();
        prop_assert!((a - b).norm() <= 1e-14 * a.norm().max(1.0));
    }

    #[test]
    fn histogram_conserves_counts(
        samples in prop::collection::vec(0.0f64..5.0, 50..500),
        bins in 10usize..40,
    ) {
        let space = build_space(SpaceFamily::RealHyperbolic { n: 2 }).unwrap();
        let hist = orbital_core::montecarlo::histogram(&space, &samples, bins).unwrap();
        prop_assert_eq!(hist.counts.iter().sum::<u64>(), samples.len() as u64);
        prop_assert_eq!(hist.bin_edges.len(), bins + 1);
        prop_assert!(hist.density_estimate.iter().all(|&d| d >= 0.0));
    }

    #[test]
    fn convolution_rejects_wall_generators(
        t1 in 0.1..2.0f64,
    ) {
        let space = build_space(SpaceFamily::RealHyperbolic { n: 2 }).unwrap();
        prop_assert!(OrbitalConvolution::rank_one(space.clone(), &[t1, 0.0]).is_err());
        prop_assert!(OrbitalConvolution::rank_one(space, &[t1]).is_ok());
    }
}
