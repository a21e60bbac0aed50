//! Distance from the law of `W` to the standard normal.

use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::haar::{haar_records, NormalizedA};
use crate::report::{Criterion, EstimateReport};
use crate::rng::SeedStream;

/// Confidence level of the DKW allowance.
pub const DKW_DELTA: f64 = 1e-3;
pub const MIN_DISTANCE_SAMPLES: usize = 100_000;

const KDE_LO: f64 = -8.0;
const KDE_HI: f64 = 8.0;
const KDE_BINS: usize = 1600;

fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// `2√2/(n−1)`.
pub fn tv_bound(n: usize) -> f64 {
    2.0 * std::f64::consts::SQRT_2 / (n as f64 - 1.0)
}

/// `√(ln(2/δ)/(2N))`: with probability `1 − δ` the empirical CDF is this close.
pub fn dkw_allowance(samples: usize, delta: f64) -> f64 {
    ((2.0 / delta).ln() / (2.0 * samples as f64)).sqrt()
}

/// `sup_x |F̂(x) − Φ(x)|`.
pub fn kolmogorov_distance(samples: &[f64]) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let phi = normal_cdf(x);
            ((i + 1) as f64 / n - phi).max(phi - i as f64 / n)
        })
        .fold(0.0, f64::max)
}

/// Half the L¹ distance between a Gaussian-kernel density estimate
/// (Silverman bandwidth, binned on `[-8, 8]`) and the normal density.
pub fn smoothed_tv_distance(samples: &[f64]) -> f64 {
    let n = samples.len();
    if n < 2 {
        return f64::NAN;
    }
    let nf = n as f64;
    let mean = samples.iter().sum::<f64>() / nf;
    let sd = (samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (nf - 1.0)).sqrt();
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let q = |p: f64| sorted[((nf - 1.0) * p).round() as usize];
    let iqr = q(0.75) - q(0.25);
    let spread = if iqr > 0.0 { sd.min(iqr / 1.34) } else { sd };
    let h = (0.9 * spread * nf.powf(-0.2)).max(1e-6);

    let width = (KDE_HI - KDE_LO) / KDE_BINS as f64;
    let mut counts = vec![0.0; KDE_BINS];
    let mut outside = 0.0;
    for &x in samples {
        let b = ((x - KDE_LO) / width).floor();
        if b >= 0.0 && (b as usize) < KDE_BINS {
            counts[b as usize] += 1.0;
        } else {
            outside += 1.0;
        }
    }
    let reach = ((5.0 * h) / width).ceil() as isize;
    let kernel: Vec<f64> = (-reach..=reach)
        .map(|k| normal_pdf(k as f64 * width / h) / h)
        .collect();
    let mut l1 = 0.0;
    for i in 0..KDE_BINS {
        let mut density = 0.0;
        for (j, w) in kernel.iter().enumerate() {
            let src = i as isize + j as isize - reach;
            if src >= 0 && (src as usize) < KDE_BINS {
                density += counts[src as usize] * w;
            }
        }
        density /= nf;
        let x = KDE_LO + (i as f64 + 0.5) * width;
        l1 += (density - normal_pdf(x)).abs() * width;
    }
    0.5 * (l1 + outside / nf)
}

/// Empirical Kolmogorov distance against `2√2/(n−1)` plus the DKW allowance.
/// The smoothed total-variation estimate is attached but never gated on.
pub fn check_tv_bound(a: &NormalizedA, samples: usize, stream: &SeedStream) -> Result<EstimateReport> {
    let n = a.dim();
    if n < 2 {
        return Err(Error::Dimension {
            got: n,
            reason: "the distance bound needs n >= 2",
        });
    }
    if samples < MIN_DISTANCE_SAMPLES {
        return Err(Error::Config(format!(
            "distance checks need at least {MIN_DISTANCE_SAMPLES} samples, got {samples}"
        )));
    }
    let ws = haar_records(a, samples, &stream.fork("distance"), |o, _| a.w(o));
    let ks = kolmogorov_distance(&ws);
    let bound = tv_bound(n);
    let dkw = dkw_allowance(samples, DKW_DELTA);
    Ok(EstimateReport::new(
        format!("kolmogorov distance {}", a.describe()),
        ks,
        0.0,
        samples as u64,
        Criterion::AtMost {
            threshold: bound + dkw,
        },
        Some(stream.seed()),
    )
    .with_extra("bound", bound)
    .with_extra("dkw_allowance", dkw)
    .with_extra("smoothed_tv", smoothed_tv_distance(&ws)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand_distr::StandardNormal;

    #[test]
    fn constants() {
        assert!((tv_bound(10) - 0.314_269_680_527).abs() < 1e-9);
        assert!((tv_bound(4) - 0.942_809_041_582).abs() < 1e-9);
        assert!(tv_bound(2) > 2.8);
        assert!((dkw_allowance(100_000, 1e-3) - 0.006_165).abs() < 1e-6);
    }

    #[test]
    fn kolmogorov_of_normal_sample_is_small() {
        let mut rng = SeedStream::new(5).rng(0);
        let xs: Vec<f64> = (0..50_000).map(|_| rng.sample(StandardNormal)).collect();
        assert!(kolmogorov_distance(&xs) < dkw_allowance(50_000, 1e-3));
        assert!(smoothed_tv_distance(&xs) < 0.03);
    }

    #[test]
    fn kolmogorov_of_point_mass() {
        // all mass at 0: the jump of F̂ at 0 is 1 against Φ(0) = 1/2
        let d = kolmogorov_distance(&[0.0; 100]);
        assert!((d - 0.5).abs() < 1e-12);
        let shifted: Vec<f64> = (0..1000).map(|i| 10.0 + i as f64).collect();
        assert!(kolmogorov_distance(&shifted) > 0.999);
        assert!(smoothed_tv_distance(&shifted) > 0.99);
    }

    #[test]
    fn bound_holds_and_errors() {
        let s = SeedStream::new(9);
        let r = check_tv_bound(&NormalizedA::identity(10), 100_000, &s).unwrap();
        assert!(r.pass, "{}", r.summary_line());
        assert!(r.point_estimate < 0.05);
        assert!(check_tv_bound(&NormalizedA::borel(4), 100_000, &s).unwrap().pass);
        assert!(check_tv_bound(&NormalizedA::identity(2), 100_000, &s).unwrap().pass);
        assert!(matches!(
            check_tv_bound(&NormalizedA::identity(6), 99_999, &s),
            Err(Error::Config(_))
        ));
        assert!(check_tv_bound(&NormalizedA::identity(1), 100_000, &s).is_err());
    }
}
