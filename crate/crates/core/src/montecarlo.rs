//! Stochastic oracle: direct sampling of the convolution of orbital measures
//! through products of Haar-random compact factors, radial histograms, and
//! statistical comparison against the analytic density.

use crate::error::{Error, Result};
use crate::groups::{cartan_radial_unchecked, sample_k, GroupElement, Realization};
use crate::roots::SpaceDescriptor;
use crate::spherical::{phi_ladder, realization_for, QuadratureConfig};
use crate::transform::{radial_weight, DensityProfile, OrbitalConvolution};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Samples per independently seeded chunk; fixed so that a given seed always
/// produces the same stream regardless of thread count.
const CHUNK: usize = 1 << 14;

/// Histogram of radial samples with a density estimate against the radial
/// weight of the invariant measure.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RadialHistogram {
    pub bin_edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub n_samples: u64,
    /// counts / (n_samples * bin width * radial weight at the bin center)
    pub density_estimate: Vec<f64>,
}

/// Distances between an empirical histogram and an analytic profile.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompareReport {
    pub l1: f64,
    pub sup: f64,
    pub ks: f64,
}

/// Draw n radial samples of the convolution: each sample is the radial part
/// of k_0 a_1 k_1 ... a_r k_r with independent Haar draws on the compact
/// subgroup. Deterministic for a fixed seed (chunk seeds are master xor
/// chunk index; the chunk size is a constant of the library).
pub fn sample_convolution(conv: &OrbitalConvolution, n: usize, seed: u64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::InvalidParameter("need at least one sample".into()));
    }
    let realization = realization_for(&conv.space)?;
    let ts = conv.scalar_generators()?;
    let n_chunks = n.div_ceil(CHUNK);
    let chunks: Vec<Vec<f64>> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ c as u64);
            let count = CHUNK.min(n - c * CHUNK);
            let mut out = Vec::with_capacity(count);
            for _ in 0..count {
                out.push(draw_radial(realization, &ts, &mut rng));
            }
            out
        })
        .collect();
    let samples: Vec<f64> = chunks.into_iter().flatten().collect();
    let bound = ts.iter().sum::<f64>() + 1e-6;
    if let Some(&worst) = samples
        .iter()
        .max_by(|a, b| a.partial_cmp(b).expect("radial samples are finite"))
    {
        if worst > bound {
            return Err(Error::RealizationInvariant(format!(
                "sampled radial part {worst} exceeds the support bound {bound}"
            )));
        }
    }
    Ok(samples)
}

/// One radial draw; multiplies through a preallocated pair of buffers.
fn draw_radial<R: rand::Rng>(realization: Realization, ts: &[f64], rng: &mut R) -> f64 {
    let mut g = sample_k(realization, rng).matrix;
    for &t in ts {
        g *= GroupElement::radial(t, realization).matrix;
        g *= &sample_k(realization, rng).matrix;
    }
    cartan_radial_unchecked(&GroupElement {
        matrix: g,
        realization,
    })
}

/// Bin radial samples on a uniform grid over [0, max sample].
pub fn histogram(
    space: &SpaceDescriptor,
    samples: &[f64],
    bins: usize,
) -> Result<RadialHistogram> {
    if samples.is_empty() {
        return Err(Error::EmptyInput("histogram of no samples".into()));
    }
    if bins < 10 {
        return Err(Error::InvalidParameter("need at least 10 bins".into()));
    }
    let max = samples.iter().cloned().fold(0.0f64, f64::max);
    let hi = if max > 0.0 { max * (1.0 + 1e-9) } else { 1e-9 };
    let width = hi / bins as f64;
    let mut counts = vec![0u64; bins];
    for &s in samples {
        let idx = ((s / width) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    let mut edges = Vec::with_capacity(bins + 1);
    for i in 0..=bins {
        edges.push(i as f64 * width);
    }
    let n = samples.len() as f64;
    let density_estimate = counts
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            let center = (i as f64 + 0.5) * width;
            let jac = radial_weight(space, center)?;
            Ok(c as f64 / (n * width * jac))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(RadialHistogram {
        bin_edges: edges,
        counts,
        n_samples: samples.len() as u64,
        density_estimate,
    })
}

/// Compare an empirical histogram with an analytic profile on the histogram
/// bins: L1 and sup distance of the densities, and the Kolmogorov-Smirnov
/// statistic of the cumulative masses.
pub fn compare(
    space: &SpaceDescriptor,
    hist: &RadialHistogram,
    profile: &DensityProfile,
) -> Result<CompareReport> {
    let hist_hi = *hist.bin_edges.last().unwrap();
    let prof_hi = *profile.grid.last().unwrap();
    let prof_lo = profile.grid[0];
    if prof_lo > 0.0 || prof_hi < hist_hi - 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "profile range [{prof_lo}, {prof_hi}] does not cover histogram range [0, {hist_hi}]"
        )));
    }
    let interp = |t: f64| -> f64 {
        // linear interpolation on the profile grid
        let m = profile.grid.len();
        if t <= profile.grid[0] {
            return profile.values[0];
        }
        if t >= profile.grid[m - 1] {
            return *profile.values.last().unwrap();
        }
        let step = (profile.grid[m - 1] - profile.grid[0]) / (m - 1) as f64;
        let i = (((t - profile.grid[0]) / step) as usize).min(m - 2);
        let frac = (t - profile.grid[i]) / step;
        profile.values[i] * (1.0 - frac) + profile.values[i + 1] * frac
    };
    let bins = hist.counts.len();
    let n = hist.n_samples as f64;
    let mut l1 = 0.0;
    let mut sup = 0.0f64;
    let mut cdf_emp = 0.0;
    let mut cdf_ana = 0.0;
    let mut ks = 0.0f64;
    for i in 0..bins {
        let lo = hist.bin_edges[i];
        let hi = hist.bin_edges[i + 1];
        let width = hi - lo;
        let center = 0.5 * (lo + hi);
        let jac = radial_weight(space, center)?;
        let ana = interp(center);
        let emp = hist.density_estimate[i];
        l1 += (emp - ana).abs() * jac * width;
        sup = sup.max((emp - ana).abs());
        cdf_emp += hist.counts[i] as f64 / n;
        cdf_ana += ana * jac * width;
        ks = ks.max((cdf_emp - cdf_ana).abs());
    }
    Ok(CompareReport { l1, sup, ks })
}

/// Monte Carlo estimate (mean, standard error) of the spherical-function
/// value over radial samples; the statistical counterpart of the product
/// formula for the transform of a convolution.
pub fn empirical_transform(
    space: &SpaceDescriptor,
    samples: &[f64],
    lambda: f64,
    quad: &QuadratureConfig,
) -> Result<(f64, f64)> {
    if samples.is_empty() {
        return Err(Error::EmptyInput("empirical transform of no samples".into()));
    }
    let realization = realization_for(space)?;
    let rho = space.rho_scalar()?;
    let t_max = samples.iter().cloned().fold(0.0f64, f64::max);
    // one ladder run at the largest sample pins the order for all of them
    let _ = phi_ladder(realization, rho, lambda, t_max, quad)?;
    let order = converged_order(realization, rho, lambda, t_max, quad)?;
    let kernel = crate::spherical::radial_kernel(realization, order);
    let values: Vec<f64> = samples
        .par_iter()
        .map(|&t| {
            let mut acc = 0.0;
            for j in 0..kernel.p.len() {
                let u = kernel.u(j, t);
                acc += kernel.w[j] * (-rho * u).exp() * (lambda * u).cos();
            }
            acc
        })
        .collect();
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    Ok((mean, (var / n).sqrt()))
}

fn converged_order(
    realization: Realization,
    rho: f64,
    lambda: f64,
    t: f64,
    quad: &QuadratureConfig,
) -> Result<usize> {
    let mut order = quad.k_order_start.next_power_of_two();
    let mut prev = crate::spherical::PhiFactor::new(realization, rho, t, order).eval(lambda);
    while order * 2 <= quad.k_order_max {
        order *= 2;
        let next = crate::spherical::PhiFactor::new(realization, rho, t, order).eval(lambda);
        if (next - prev).norm() <= quad.k_tol * next.norm().max(1.0) {
            return Ok(order);
        }
        prev = next;
    }
    Err(Error::QuadratureBudget(format!(
        "no converged order for lambda={lambda}, t={t}"
    )))
}

/// Asymptotic Kolmogorov distribution tail: P(D > d) for sample size n.
pub fn ks_p_value(d: f64, n: f64) -> f64 {
    let x = n.sqrt() * d;
    let mut p = 0.0;
    for k in 1..=100 {
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        p += sign * (-2.0 * (k as f64) * (k as f64) * x * x).exp();
    }
    (2.0 * p).clamp(0.0, 1.0)
}

/// One-sample KS statistic of data against a CDF.
pub fn ks_statistic<F: Fn(f64) -> f64>(sorted: &[f64], cdf: F) -> f64 {
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let c = cdf(x);
        d = d.max(((i as f64 + 1.0) / n - c).abs());
        d = d.max((i as f64 / n - c).abs());
    }
    d
}

/// Two-sample KS statistic.
pub fn ks_two_sample(a: &mut [f64], b: &mut [f64]) -> f64 {
    a.sort_unstable_by(|x, y| x.partial_cmp(y).unwrap());
    b.sort_unstable_by(|x, y| x.partial_cmp(y).unwrap());
    let (mut i, mut j) = (0usize, 0usize);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let mut d = 0.0f64;
    while i < a.len() && j < b.len() {
        if a[i] <= b[j] {
            i += 1;
        } else {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roots::{build_space, SpaceFamily};
    use crate::spherical::spherical_product;

    fn h2() -> SpaceDescriptor {
        build_space(SpaceFamily::RealHyperbolic { n: 2 }).unwrap()
    }
    fn h3() -> SpaceDescriptor {
        build_space(SpaceFamily::RealHyperbolic { n: 3 }).unwrap()
    }

    #[test]
    fn single_generator_samples_are_constant() {
        let conv = OrbitalConvolution::rank_one(h2(), &[1.0]).unwrap();
        let samples = sample_convolution(&conv, 1000, 7).unwrap();
        assert!(samples.iter().all(|&t| (t - 1.0).abs() < 1e-10));
    }

    #[test]
    fn two_generator_samples_respect_triangle_inequality() {
        for space in [h2(), h3()] {
            let conv = OrbitalConvolution::rank_one(space, &[1.0, 1.0]).unwrap();
            let samples = sample_convolution(&conv, 4000, 99).unwrap();
            assert!(samples.iter().all(|&t| (0.0..=2.0 + 1e-9).contains(&t)));
        }
    }

    #[test]
    fn sampling_is_deterministic_per_seed() {
        let conv = OrbitalConvolution::rank_one(h2(), &[0.7, 1.2, 0.4]).unwrap();
        let a = sample_convolution(&conv, 50_000, 12345).unwrap();
        let b = sample_convolution(&conv, 50_000, 12345).unwrap();
        assert_eq!(a, b);
        let c = sample_convolution(&conv, 50_000, 54321).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn sampler_matches_general_product_operation() {
        use crate::groups::{radial_of_product, sample_k};
        use rand::SeedableRng;
        let real = crate::spherical::realization_for(&h3()).unwrap();
        let ts = [0.8, 1.1];
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let ks: Vec<_> = (0..3).map(|_| sample_k(real, &mut rng)).collect();
            let via_op = radial_of_product(real, &ts, &ks).unwrap();
            let mut g = ks[0].matrix.clone();
            for (i, &t) in ts.iter().enumerate() {
                g *= GroupElement::radial(t, real).matrix;
                g *= &ks[i + 1].matrix;
            }
            let via_fast = cartan_radial_unchecked(&GroupElement {
                matrix: g,
                realization: real,
            });
            assert!((via_op - via_fast).abs() < 1e-12);
        }
    }

    #[test]
    fn rotation_angles_are_uniform() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
        let n = 100_000;
        let mut angles: Vec<f64> = (0..n)
            .map(|_| {
                let k = sample_k(Realization::Sl2, &mut rng);
                let th = k.matrix[(1, 0)].atan2(k.matrix[(0, 0)]);
                (th + std::f64::consts::TAU) % std::f64::consts::TAU
            })
            .collect();
        angles.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
        let d = ks_statistic(&angles, |x| x / std::f64::consts::TAU);
        let p = ks_p_value(d, n as f64);
        assert!(p > 0.01, "KS statistic {d}, p = {p}");
    }

    #[test]
    fn haar_right_translation_invariance() {
        use rand::SeedableRng;
        // distribution of entries of k k0 matches distribution of k
        let real = Realization::Lorentz { n: 3 };
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        let k0 = sample_k(real, &mut rng);
        let n = 20_000;
        let mut plain: Vec<f64> = Vec::with_capacity(n);
        let mut translated: Vec<f64> = Vec::with_capacity(n);
        for _ in 0..n {
            plain.push(sample_k(real, &mut rng).matrix[(0, 0)]);
            let k = sample_k(real, &mut rng);
            translated.push((&k.matrix * &k0.matrix)[(0, 0)]);
        }
        let d = ks_two_sample(&mut plain, &mut translated);
        let eff = (n * n) as f64 / (2 * n) as f64;
        let p = ks_p_value(d, eff);
        assert!(p > 0.01, "two-sample KS {d}, p = {p}");
    }

    #[test]
    fn histogram_bookkeeping() {
        let conv = OrbitalConvolution::rank_one(h2(), &[1.0]).unwrap();
        let samples = sample_convolution(&conv, 5000, 3).unwrap();
        let hist = histogram(&h2(), &samples, 25).unwrap();
        assert_eq!(hist.counts.iter().sum::<u64>(), 5000);
        // point mass: exactly one occupied bin
        assert_eq!(hist.counts.iter().filter(|&&c| c > 0).count(), 1);
        assert!(hist.density_estimate.iter().all(|&d| d >= 0.0));
        assert!(histogram(&h2(), &samples, 5).is_err());
        assert!(histogram(&h2(), &[], 20).is_err());
    }

    #[test]
    fn empirical_transform_matches_product_formula() {
        let quad = QuadratureConfig::default();
        for (space, ts) in [(h2(), vec![1.0, 1.5]), (h3(), vec![0.9, 0.6])] {
            let conv = OrbitalConvolution::rank_one(space.clone(), &ts).unwrap();
            let samples = sample_convolution(&conv, 30_000, 2718).unwrap();
            for &lam in &[0.5, 2.0] {
                let (mean, se) = empirical_transform(&space, &samples, lam, &quad).unwrap();
                let want = spherical_product(&space, &ts, lam, &quad).unwrap().re;
                let z = (mean - want).abs() / se;
                assert!(z < 4.0, "{}: lambda={lam} z={z:.2}", space.name);
            }
        }
    }

    #[test]
    fn ks_p_value_sane() {
        // for uniform data the statistic ~ 1/sqrt(n) gives moderate p
        assert!(ks_p_value(0.001, 1e5) > 0.9);
        assert!(ks_p_value(0.05, 1e5) < 1e-6);
    }

    #[test]
    fn compare_profile_with_itself_is_small() {
        // synthetic histogram built from the profile itself: distances are
        // bounded by binning error
        let space = h2();
        let grid: Vec<f64> = (0..701).map(|i| 2.0 * i as f64 / 700.0).collect();
        // a smooth normalized fake density
        let raw: Vec<f64> = grid.iter().map(|&t| (-(t - 1.0) * (t - 1.0) * 4.0).exp()).collect();
        let mut mass = 0.0;
        for i in 0..grid.len() - 1 {
            let f0 = raw[i] * radial_weight(&space, grid[i]).unwrap();
            let f1 = raw[i + 1] * radial_weight(&space, grid[i + 1]).unwrap();
            mass += 0.5 * (f0 + f1) * (grid[i + 1] - grid[i]);
        }
        let values: Vec<f64> = raw.iter().map(|v| v / mass).collect();
        let profile = DensityProfile {
            grid: grid.clone(),
            values: values.clone(),
            mass: 1.0,
        };
        // histogram with counts proportional to the profile mass per bin
        let bins = 50;
        let width = 2.0 / bins as f64;
        let n: u64 = 1_000_000;
        let mut counts = vec![0u64; bins];
        for (i, c) in counts.iter_mut().enumerate() {
            let center = (i as f64 + 0.5) * width;
            let j = ((center / 2.0) * 700.0) as usize;
            let jac = radial_weight(&space, center).unwrap();
            *c = (values[j.min(699)] * jac * width * n as f64) as u64;
        }
        let total: u64 = counts.iter().sum();
        let density_estimate: Vec<f64> = counts
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                let center = (i as f64 + 0.5) * width;
                c as f64 / (total as f64 * width * radial_weight(&space, center).unwrap())
            })
            .collect();
        let hist = RadialHistogram {
            bin_edges: (0..=bins).map(|i| i as f64 * width).collect(),
            counts,
            n_samples: total,
            density_estimate,
        };
        let rep = compare(&space, &hist, &profile).unwrap();
        assert!(rep.l1 < 0.01, "l1 = {}", rep.l1);
        assert!(rep.ks < 0.01, "ks = {}", rep.ks);
    }

    #[test]
    fn compare_rejects_uncovered_range() {
        let space = h2();
        let profile = DensityProfile {
            grid: vec![0.0, 0.5, 1.0],
            values: vec![0.1, 0.1, 0.1],
            mass: 1.0,
        };
        let hist = RadialHistogram {
            bin_edges: vec![0.0, 1.0, 2.0],
            counts: vec![1, 1],
            n_samples: 2,
            density_estimate: vec![0.1, 0.1],
        };
        assert!(compare(&space, &hist, &profile).is_err());
    }
}
