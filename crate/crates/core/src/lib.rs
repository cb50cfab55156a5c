//! Numerical harmonic analysis on rank-one noncompact symmetric spaces:
//! spherical functions by compact-group quadrature, spherical transforms of
//! convolutions of orbital measures, Plancherel-based norms, inversion-formula
//! densities with radial derivatives, and a Monte Carlo sampler that
//! cross-validates the analytic pipeline.

pub mod checks;
pub mod error;
pub mod groups;
pub mod jet;
pub mod montecarlo;
pub mod products;
pub mod quad;
pub mod roots;
pub mod special;
pub mod spherical;
pub mod transform;

pub use error::{Error, Result};
pub use groups::{
    cartan_decompose, cartan_radial, iwasawa_decompose, iwasawa_h, radial_of_product, sample_k,
    CompactElement, GroupElement, Realization,
};
pub use roots::{
    build_space, root_separation_constant, RadialPoint, RestrictedRoot, SpaceDescriptor,
    SpaceFamily, SpectralParameter,
};
pub use spherical::{
    decay_envelope, plancherel_weight, realization_for, spherical_fn, spherical_product,
    PlancherelWeight, QuadratureConfig, SphericalValue,
};
pub use montecarlo::{
    compare, empirical_transform, histogram, sample_convolution, CompareReport, RadialHistogram,
};
pub use products::{
    product_l2_norm_sq, product_profile, product_regularity_report, ProductConvolution,
    ProductDensity, ProductL2Report, ProductProfile, ProductRegularityReport, ProductSpace,
};
pub use transform::{
    density_at, density_derivative, l2_norm_sq, realspace_l2_norm_sq, regularity_report,
    transform_of_convolution, ConvergenceReport, DensityEvaluator, DensityProfile,
    OrbitalConvolution, RegularityReport, Verdict,
};
