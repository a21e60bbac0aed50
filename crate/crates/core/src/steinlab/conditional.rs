//! Conditional moments of the heat-kernel pair at fixed base points `O`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::haar::{sample_haar, NormalizedA};
use crate::heatkernel::{
    antithetic_traces, drift_extrapolation, estimate_laplacian, heat_increment,
    validate_t_grid, Extrapolation, HeatStepConfig, Observable,
};
use crate::matrix::SquareMatrix;
use crate::report::{mean_se, Criterion, EstimateReport};
use crate::rng::{par_samples, SeedStream};

/// Base points with `|W|` below this are left out of the drift regression.
pub const DRIFT_GUARD: f64 = 0.1;

/// Panel size, resamples per `(point, t)` and the time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionalBudget {
    pub panel: usize,
    pub samples: usize,
    pub t_grid: Vec<f64>,
}

impl Default for ConditionalBudget {
    fn default() -> Self {
        ConditionalBudget {
            panel: 8,
            samples: 200_000,
            t_grid: vec![1e-3, 4e-3, 1.6e-2],
        }
    }
}

impl ConditionalBudget {
    fn validate(&self) -> Result<Vec<f64>> {
        if self.panel == 0 || self.samples < 2 {
            return Err(Error::Config(
                "conditional checks need a nonempty panel and at least two resamples".into(),
            ));
        }
        validate_t_grid(&self.t_grid)
    }
}

/// Haar base points shared by every panel check run under `stream`.
fn panel_points(n: usize, count: usize, stream: &SeedStream) -> Vec<SquareMatrix> {
    let mut rng = stream.fork("panel").rng(0);
    (0..count)
        .map(|_| sample_haar(n, &mut rng).expect("n >= 1"))
        .collect()
}

fn require_group(a: &NormalizedA) -> Result<()> {
    if a.dim() < 2 {
        return Err(Error::Dimension {
            got: a.dim(),
            reason: "heat-kernel checks need n >= 2",
        });
    }
    Ok(())
}

/// Laplacian identities for `observable` at every panel point.
pub fn check_laplacian_panel(
    observable: Observable,
    a: &NormalizedA,
    budget: &ConditionalBudget,
    stream: &SeedStream,
) -> Result<Vec<EstimateReport>> {
    require_group(a)?;
    budget.validate()?;
    let jobs = stream.fork(&format!("laplacian-{observable}"));
    panel_points(a.dim(), budget.panel, stream)
        .iter()
        .enumerate()
        .map(|(i, o)| {
            let mut r = estimate_laplacian(
                observable,
                a,
                o,
                &budget.t_grid,
                budget.samples,
                &jobs.fork_index(i as u64),
            )?;
            r.name = format!("{} point {i}", r.name);
            Ok(r)
        })
        .collect()
}

/// Drift coefficient of `E[W'|O] = (1 − t(n−1)/2)W + O(t²)`: the weighted
/// least-squares slope of the extrapolated drift on `W` across the panel.
pub fn check_drift(
    a: &NormalizedA,
    budget: &ConditionalBudget,
    stream: &SeedStream,
) -> Result<EstimateReport> {
    require_group(a)?;
    budget.validate()?;
    let jobs = stream.fork("drift");
    let mut num = 0.0;
    let mut den = 0.0;
    let mut var = 0.0;
    let mut skipped = 0usize;
    let mut used = 0usize;
    for (i, o) in panel_points(a.dim(), budget.panel, stream).iter().enumerate() {
        let w = a.w(o);
        if w.abs() < DRIFT_GUARD {
            skipped += 1;
            continue;
        }
        let ex = drift_extrapolation(
            Observable::P1,
            a,
            o,
            &budget.t_grid,
            budget.samples,
            &jobs.fork_index(i as u64),
        )?;
        num += w * ex.value;
        den += w * w;
        var += w * w * ex.standard_error * ex.standard_error;
        used += 1;
    }
    let (slope, se) = if used == 0 {
        (f64::NAN, f64::NAN)
    } else {
        (num / den, var.sqrt() / den)
    };
    let target = -(a.dim() as f64 - 1.0) / 2.0;
    Ok(EstimateReport::new(
        format!("drift coefficient {}", a.describe()),
        slope,
        se,
        (used * budget.samples) as u64,
        Criterion::WithinSe { target },
        Some(stream.seed()),
    )
    .with_extra("points_used", used as f64)
    .with_extra("points_skipped", skipped as f64))
}

/// `E[(W'−W)²|O]/t → n − p₂(AO)` at a single base point.
pub fn quadratic_variation_at(
    a: &NormalizedA,
    o: &SquareMatrix,
    t_grid: &[f64],
    samples: usize,
    stream: &SeedStream,
) -> Result<EstimateReport> {
    require_group(a)?;
    let ts = validate_t_grid(t_grid)?;
    let m = a.times(o);
    let w = m.trace();
    let mut points = Vec::with_capacity(ts.len());
    for (i, &t) in ts.iter().enumerate() {
        let pairs = antithetic_traces(&m, t, samples, &stream.fork_index(i as u64))?;
        let ys: Vec<f64> = pairs
            .iter()
            .map(|&(wp, wm)| ((wp - w).powi(2) + (wm - w).powi(2)) / (2.0 * t))
            .collect();
        let (mean, se) = mean_se(&ys);
        points.push((t, mean, se));
    }
    let ex = Extrapolation::from_points(points);
    let target = a.dim() as f64 - a.p2(o);
    let r = EstimateReport::new(
        format!("quadratic variation {}", a.describe()),
        ex.value,
        ex.standard_error,
        samples as u64,
        Criterion::WithinSe { target },
        Some(stream.seed()),
    );
    Ok(ex.annotate(r))
}

/// Conditional quadratic variation `t[n − p₂(AO)]` at every panel point.
pub fn check_quadratic_variation(
    a: &NormalizedA,
    budget: &ConditionalBudget,
    stream: &SeedStream,
) -> Result<Vec<EstimateReport>> {
    require_group(a)?;
    budget.validate()?;
    let jobs = stream.fork("quadratic-variation");
    panel_points(a.dim(), budget.panel, stream)
        .iter()
        .enumerate()
        .map(|(i, o)| {
            let mut r = quadratic_variation_at(
                a,
                o,
                &budget.t_grid,
                budget.samples,
                &jobs.fork_index(i as u64),
            )?;
            r.name = format!("{} point {i}", r.name);
            Ok(r)
        })
        .collect()
}

/// `E(W'−W)²/t → n − 1` with `O` drawn fresh from Haar measure per sample.
pub fn check_mean_quadratic_variation(
    a: &NormalizedA,
    t_grid: &[f64],
    samples: usize,
    stream: &SeedStream,
) -> Result<EstimateReport> {
    require_group(a)?;
    let ts = validate_t_grid(t_grid)?;
    let n = a.dim();
    let mut points = Vec::with_capacity(ts.len());
    for (i, &t) in ts.iter().enumerate() {
        let cfg = HeatStepConfig::new(t, 1)?;
        let ys = par_samples(samples, &stream.fork("mean-qv").fork_index(i as u64), |rng| {
            let o = sample_haar(n, rng).expect("n >= 1");
            let m = a.times(&o);
            let w = m.trace();
            let e = heat_increment(n, &cfg, rng).expect("finite increment");
            let wp = m.trace_of_product(&e);
            let wm = m.transpose().trace_of_product(&e);
            ((wp - w).powi(2) + (wm - w).powi(2)) / (2.0 * t)
        });
        let (mean, se) = mean_se(&ys);
        points.push((t, mean, se));
    }
    let ex = Extrapolation::from_points(points);
    let r = EstimateReport::new(
        format!("mean quadratic variation {}", a.describe()),
        ex.value,
        ex.standard_error,
        samples as u64,
        Criterion::WithinSe {
            target: n as f64 - 1.0,
        },
        Some(stream.seed()),
    );
    Ok(ex.annotate(r))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_budget() -> ConditionalBudget {
        ConditionalBudget {
            panel: 4,
            samples: 20_000,
            t_grid: vec![1e-3, 4e-3],
        }
    }

    #[test]
    fn drift_slope_n6_identity() {
        let r = check_drift(&NormalizedA::identity(6), &small_budget(), &SeedStream::new(1)).unwrap();
        assert_eq!(r.target, Some(-2.5));
        assert!(r.pass, "{}", r.summary_line());
    }

    #[test]
    fn drift_slope_n2_is_independent_of_a() {
        for a in [NormalizedA::identity(2), NormalizedA::borel(2)] {
            let r = check_drift(&a, &small_budget(), &SeedStream::new(2)).unwrap();
            assert_eq!(r.target, Some(-0.5));
            assert!(r.pass, "{}", r.summary_line());
        }
    }

    #[test]
    fn drift_guard_skips_small_w() {
        // Borel A at n=2 gives W = √2·O_11; some panel points may fall under the guard
        let budget = ConditionalBudget {
            panel: 30,
            samples: 256,
            t_grid: vec![1e-3, 4e-3],
        };
        let a = NormalizedA::borel(2);
        let r = check_drift(&a, &budget, &SeedStream::new(4)).unwrap();
        let expected = panel_points(2, 30, &SeedStream::new(4))
            .iter()
            .filter(|o| a.w(o).abs() < DRIFT_GUARD)
            .count();
        assert_eq!(r.extra["points_skipped"], expected as f64);
        assert_eq!(r.extra["points_used"] + r.extra["points_skipped"], 30.0);
    }

    #[test]
    fn quadratic_variation_at_identity_vanishes() {
        let a = NormalizedA::identity(4);
        let r = quadratic_variation_at(
            &a,
            &SquareMatrix::identity(4),
            &[1e-4, 4e-4],
            20_000,
            &SeedStream::new(5),
        )
        .unwrap();
        assert_eq!(r.target, Some(0.0));
        assert!(r.pass, "{}", r.summary_line());
    }

    #[test]
    fn quadratic_variation_panel_and_mean() {
        let a = NormalizedA::identity(6);
        for r in check_quadratic_variation(&a, &small_budget(), &SeedStream::new(6)).unwrap() {
            assert!(r.pass, "{}", r.summary_line());
        }
        let m = check_mean_quadratic_variation(&a, &[1e-3, 4e-3], 40_000, &SeedStream::new(7)).unwrap();
        assert_eq!(m.target, Some(5.0));
        assert!(m.pass, "{}", m.summary_line());
    }

    #[test]
    fn laplacian_panel_random_a() {
        let a = NormalizedA::random(6, 77);
        for obs in [Observable::P1, Observable::P11] {
            let reports = check_laplacian_panel(obs, &a, &small_budget(), &SeedStream::new(8)).unwrap();
            assert_eq!(reports.len(), 4);
            for r in reports {
                assert!(r.pass, "{}", r.summary_line());
            }
        }
    }

    #[test]
    fn budget_validation() {
        let a = NormalizedA::identity(3);
        let bad = ConditionalBudget {
            t_grid: vec![1e-3],
            ..small_budget()
        };
        assert!(check_drift(&a, &bad, &SeedStream::new(1)).is_err());
        assert!(check_drift(&NormalizedA::identity(1), &small_budget(), &SeedStream::new(1)).is_err());
    }
}
