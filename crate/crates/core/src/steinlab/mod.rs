//! Monte Carlo and exact checks for `W = Tr(AO)` and its exchangeable pair.
//!
//! Each `check_*` function returns [`EstimateReport`]s whose pass flag is
//! decided by the 4·SE rule or by an explicit threshold. Paired comparisons
//! reuse one sample stream for both sides.

mod conditional;
mod distance;
mod increments;
mod moments;
mod stein;

pub use conditional::{
    check_drift, check_laplacian_panel, check_mean_quadratic_variation,
    check_quadratic_variation, quadratic_variation_at, ConditionalBudget, DRIFT_GUARD,
};
pub use distance::{
    check_tv_bound, dkw_allowance, kolmogorov_distance, smoothed_tv_distance, tv_bound,
    DKW_DELTA, MIN_DISTANCE_SAMPLES,
};
pub use increments::{
    check_increment_moments, increment_moments, IncrementMoments, DEFAULT_INCREMENT_GRID,
    MIN_FOURTH_SLOPE, MIN_THIRD_SLOPE,
};
pub use moments::{
    check_mgf, check_moments, check_p2_expansion, check_power_sum_expectations,
    check_schur_expectation, check_schur_expectations, check_var_p2, exact_moment, mgf_series,
    mgf_term, power_sum_expectation_exact, schur_expectation_exact, var_p2_exact,
    P2_EXPANSION_TOL,
};
pub use stein::{check_stein_identities, check_stein_identity, TestFunction};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::haar::{sample_haar, NormalizedA};
use crate::heatkernel::{heat_step, HeatStepConfig};
use crate::rng::{par_samples, SeedStream};

/// One exchangeable pair and the base-point statistics it was drawn at.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairSample {
    pub w: f64,
    pub w_prime: f64,
    pub p2: f64,
    pub p11: f64,
}

/// Seeded collection of `(W, W')` pairs at a fixed heat time: `O` is Haar,
/// `O'` is one heat step away from `O`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExchangeablePairBatch {
    pub a: NormalizedA,
    pub step: HeatStepConfig,
    pub pairs: Vec<PairSample>,
    pub stream: SeedStream,
}

impl ExchangeablePairBatch {
    pub fn generate(
        a: &NormalizedA,
        step: HeatStepConfig,
        samples: usize,
        stream: &SeedStream,
    ) -> Result<Self> {
        let n = a.dim();
        let pairs = par_samples(samples, stream, |rng| {
            let o = sample_haar(n, rng).expect("n >= 1");
            let o2 = heat_step(&o, &step, rng).expect("heat step on a group element");
            let w = a.w(&o);
            PairSample {
                w,
                w_prime: a.w(&o2),
                p2: a.p2(&o),
                p11: w * w,
            }
        });
        Ok(ExchangeablePairBatch {
            a: a.clone(),
            step,
            pairs,
            stream: *stream,
        })
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// `W' − W` for every pair.
    pub fn increments(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.w_prime - p.w).collect()
    }
}
