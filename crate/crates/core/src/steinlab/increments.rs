//! Small-time scaling of the absolute increments `|W' − W|`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::haar::{sample_haar, NormalizedA};
use crate::heatkernel::{heat_increment, HeatStepConfig};
use crate::report::{mean_se, ols_slope, Criterion, EstimateReport};
use crate::rng::{par_samples, SeedStream};

pub const DEFAULT_INCREMENT_GRID: [f64; 4] = [1e-3, 3.16e-3, 1e-2, 3.16e-2];
pub const MIN_THIRD_SLOPE: f64 = 1.4;
pub const MIN_FOURTH_SLOPE: f64 = 1.8;

/// `E|W'−W|^k`, `k = 2, 3, 4`, with standard errors, at one heat time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IncrementMoments {
    pub t: f64,
    pub second: (f64, f64),
    pub third: (f64, f64),
    pub fourth: (f64, f64),
}

/// Haar-averaged increment moments on each time of `t_grid`.
///
/// Each sample contributes the average over the antithetic pair `O·E`,
/// `O·Eᵗ`.
pub fn increment_moments(
    a: &NormalizedA,
    t_grid: &[f64],
    samples: usize,
    stream: &SeedStream,
) -> Result<Vec<IncrementMoments>> {
    let n = a.dim();
    if n < 2 {
        return Err(Error::Dimension {
            got: n,
            reason: "heat-kernel checks need n >= 2",
        });
    }
    let jobs = stream.fork("increments");
    t_grid
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let cfg = HeatStepConfig::new(t, 1)?;
            let rows = par_samples(samples, &jobs.fork_index(i as u64), |rng| {
                let o = sample_haar(n, rng).expect("n >= 1");
                let m = a.times(&o);
                let w = m.trace();
                let e = heat_increment(n, &cfg, rng).expect("finite increment");
                let dp = (m.trace_of_product(&e) - w).abs();
                let dm = (m.transpose().trace_of_product(&e) - w).abs();
                let avg = |k: i32| (dp.powi(k) + dm.powi(k)) / 2.0;
                [avg(2), avg(3), avg(4)]
            });
            let col = |j: usize| mean_se(&rows.iter().map(|r| r[j]).collect::<Vec<_>>());
            Ok(IncrementMoments {
                t,
                second: col(0),
                third: col(1),
                fourth: col(2),
            })
        })
        .collect()
}

/// Log-log slopes of the increment moments in `t`. The third and fourth
/// are gated from below; the second is reported only.
pub fn check_increment_moments(
    a: &NormalizedA,
    t_grid: &[f64],
    samples: usize,
    stream: &SeedStream,
) -> Result<Vec<EstimateReport>> {
    if t_grid.len() < 2 || t_grid.iter().any(|t| !(*t > 0.0)) {
        return Err(Error::Config(
            "increment scaling needs at least two positive times".into(),
        ));
    }
    let lo = t_grid.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = t_grid.iter().cloned().fold(0.0, f64::max);
    // 3.16 ≈ √10 is accepted as half a decade twice
    if hi / lo < 9.99 {
        return Err(Error::Config(format!(
            "increment scaling grid must span at least one decade, got [{lo}, {hi}]"
        )));
    }
    let table = increment_moments(a, t_grid, samples, stream)?;
    let log_t: Vec<f64> = table.iter().map(|m| m.t.ln()).collect();
    let label = a.describe();
    let total = (samples * table.len()) as u64;
    let seed = Some(stream.seed());
    let fourth_ratio: Vec<f64> = table.iter().map(|m| m.fourth.0 / (m.t * m.t)).collect();
    let ratio_max = fourth_ratio.iter().cloned().fold(0.0, f64::max);
    let ratio_min = fourth_ratio.iter().cloned().fold(f64::INFINITY, f64::min);
    let slope_report = |name: &str, pick: fn(&IncrementMoments) -> (f64, f64), criterion: Criterion| {
        let log_m: Vec<f64> = table.iter().map(|m| pick(m).0.ln()).collect();
        let (slope, se) = ols_slope(&log_t, &log_m);
        let mut r = EstimateReport::new(
            format!("{name} increment slope {label}"),
            slope,
            se,
            total,
            criterion,
            seed,
        );
        for (i, m) in table.iter().enumerate() {
            r = r.with_extra(&format!("t{i}"), m.t).with_extra(&format!("moment{i}"), pick(m).0);
        }
        r
    };
    Ok(vec![
        slope_report("second", |m| m.second, Criterion::Informational),
        slope_report(
            "third",
            |m| m.third,
            Criterion::AtLeast {
                threshold: MIN_THIRD_SLOPE,
            },
        ),
        slope_report(
            "fourth",
            |m| m.fourth,
            Criterion::AtLeast {
                threshold: MIN_FOURTH_SLOPE,
            },
        )
        .with_extra("fourth_over_t2_max", ratio_max)
        .with_extra("fourth_over_t2_min", ratio_min),
    ])
}
