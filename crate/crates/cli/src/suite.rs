//! Verification suites and JSON-lines report output.

use std::io::Write;

use anyhow::Result;
use clap::ValueEnum;
use serde::Serialize;

use heatstein::heatkernel::Observable;
use heatstein::partitions::{gen_partitions, Partition};
use heatstein::steinlab::{self, ConditionalBudget, TestFunction};
use heatstein::symchars::char_table;
use heatstein::symfun::{
    power_sum_from_schur, zonal_hook_sum, zonal_ratio,
    zonals_of_weight, PowerSumPolynomial, MAX_SCHUR_WEIGHT, MAX_ZONAL_WEIGHT,
};
use heatstein::{Criterion, EstimateReport, NormalizedA, SeedStream};

use crate::config::ExperimentConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Symbolic,
    Lemmas,
    Distance,
    All,
}

const MAX_CHARACTER_TABLE_CHECK: usize = 8;
const RATIO_DIMENSIONS: [usize; 3] = [4, 6, 10];
const RATIO_MATRICES_PER_DIMENSION: u64 = 5;
const RATIO_TOLERANCE: f64 = 1e-12;

/// Exact identities for characters, Schur functions and zonal polynomials.
/// `max_degree` caps the weights of the expansion checks.
pub fn symbolic_reports(max_degree: usize) -> Result<Vec<EstimateReport>> {
    let mut out = Vec::new();
    for k in 1..=MAX_CHARACTER_TABLE_CHECK {
        let table = char_table(k)?;
        out.push(EstimateReport::exact(
            format!("character orthogonality k={k}"),
            table.rows_orthonormal() && table.columns_orthogonal(),
        ));
    }
    for k in 1..=max_degree.min(MAX_SCHUR_WEIGHT) {
        let mut holds = true;
        for rho in gen_partitions(k) {
            holds &= power_sum_from_schur(&rho)? == PowerSumPolynomial::power_sum(&rho);
        }
        out.push(EstimateReport::exact(format!("schur basis roundtrip k={k}"), holds));
    }
    for k in 1..=max_degree.min(MAX_ZONAL_WEIGHT) {
        let p1k = PowerSumPolynomial::power_sum(&Partition::column(k));
        out.push(EstimateReport::exact(
            format!("zonal hook-length sum k={k}"),
            zonal_hook_sum(k)? == p1k,
        ));
    }
    for k in 1..=max_degree.min(MAX_ZONAL_WEIGHT) {
        let mut holds = true;
        for z in zonals_of_weight(k)? {
            for n in 1..=10 {
                holds &= z.matches_product_formula(n);
            }
        }
        out.push(EstimateReport::exact(format!("zonal value at ones |lambda|={k} n<=10"), holds));
    }
    Ok(out)
}

/// Floating evaluation of the degree-two zonal ratios against their closed
/// forms in `∑ a⁴`, for random `A`.
pub fn zonal_ratio_reports(seed: u64) -> Result<Vec<EstimateReport>> {
    let mut out = Vec::new();
    for n in RATIO_DIMENSIONS {
        for j in 0..RATIO_MATRICES_PER_DIMENSION {
            let a = NormalizedA::random(n, seed.wrapping_mul(31).wrapping_add(j * 1009 + n as u64));
            let sq = a.squared_singular_values();
            let s4 = a.fourth_power_sum();
            let nf = n as f64;
            let cases = [
                (Partition::row(2), (nf * nf + 2.0 * s4) / (nf * nf + 2.0 * nf)),
                (Partition::column(2), (nf * nf - s4) / (nf * nf - nf)),
            ];
            for (lambda, target) in cases {
                out.push(
                    EstimateReport::new(
                        format!("zonal ratio Z{lambda} n={n} matrix {j}"),
                        zonal_ratio(&lambda, &sq)?,
                        0.0,
                        1,
                        Criterion::Relative {
                            target,
                            tolerance: RATIO_TOLERANCE,
                        },
                        Some(seed),
                    )
                    .with_extra("sum_a4", s4),
                );
            }
        }
    }
    Ok(out)
}

/// Monte Carlo and exact checks of every lemma at the configured `n` and `A`.
pub fn lemma_reports(cfg: &ExperimentConfig) -> Result<Vec<EstimateReport>> {
    let a = cfg.a_matrix()?;
    let root = SeedStream::new(cfg.seed);
    let scalar = cfg.samples.scalar;
    let budget = ConditionalBudget {
        panel: cfg.panel,
        samples: cfg.samples.resamples,
        t_grid: cfg.t_grid.clone(),
    };
    let mut out = Vec::new();
    for (i, &t) in cfg.mgf_times.iter().enumerate() {
        out.push(steinlab::check_mgf(
            &a,
            t,
            cfg.max_degree,
            scalar,
            &root.fork("mgf").fork_index(i as u64),
        )?);
    }
    let lambdas: Vec<Partition> = (1..=4).flat_map(gen_partitions).collect();
    out.extend(steinlab::check_schur_expectations(&lambdas, &a, scalar, &root.fork("schur"))?);
    for r in 1..=6 {
        out.push(steinlab::check_moments(r, &a, scalar, &root.fork("moments"))?);
    }
    out.push(steinlab::check_p2_expansion(&a, scalar, &root.fork("p2-expansion"))?);
    out.extend(steinlab::check_power_sum_expectations(&a, scalar, &root.fork("power-sums"))?);
    if a.dim() >= 4 {
        out.extend(steinlab::check_var_p2(&a, scalar, &root.fork("var-p2"))?);
    }
    for obs in [Observable::P1, Observable::P11] {
        out.extend(steinlab::check_laplacian_panel(obs, &a, &budget, &root.fork("laplacian"))?);
    }
    out.push(steinlab::check_drift(&a, &budget, &root.fork("drift"))?);
    out.extend(steinlab::check_quadratic_variation(&a, &budget, &root.fork("qv"))?);
    out.push(steinlab::check_mean_quadratic_variation(
        &a,
        &cfg.t_grid,
        cfg.samples.resamples,
        &root.fork("mean-qv"),
    )?);
    out.extend(steinlab::check_increment_moments(
        &a,
        &cfg.increment_grid,
        cfg.samples.increments,
        &root.fork("increments"),
    )?);
    out.extend(steinlab::check_stein_identities(
        &TestFunction::ALL,
        &a,
        scalar,
        &root.fork("stein"),
    )?);
    Ok(out)
}

pub fn distance_reports(cfg: &ExperimentConfig) -> Result<Vec<EstimateReport>> {
    let a = cfg.a_matrix()?;
    Ok(vec![steinlab::check_tv_bound(
        &a,
        cfg.samples.distance,
        &SeedStream::new(cfg.seed).fork("distance"),
    )?])
}

pub fn run_suite(cfg: &ExperimentConfig, suite: Suite) -> Result<Vec<EstimateReport>> {
    let mut out = Vec::new();
    if matches!(suite, Suite::Symbolic | Suite::All) {
        out.extend(symbolic_reports(cfg.max_degree)?);
        out.extend(zonal_ratio_reports(cfg.seed)?);
    }
    if matches!(suite, Suite::Lemmas | Suite::All) {
        out.extend(lemma_reports(cfg)?);
    }
    if matches!(suite, Suite::Distance | Suite::All) {
        out.extend(distance_reports(cfg)?);
    }
    Ok(out)
}

/// First line of every report file; the timestamp is the only field that
/// varies between identical runs.
#[derive(Debug, Serialize)]
pub struct Header<'a> {
    pub timestamp: String,
    pub command: &'a str,
    pub version: &'static str,
    pub config: &'a ExperimentConfig,
}

impl<'a> Header<'a> {
    pub fn new(command: &'a str, config: &'a ExperimentConfig) -> Self {
        Header {
            timestamp: chrono::Utc::now().to_rfc3339(),
            command,
            version: env!("CARGO_PKG_VERSION"),
            config,
        }
    }
}

pub fn write_jsonl<W: Write>(mut w: W, header: &Header<'_>, reports: &[EstimateReport]) -> Result<()> {
    serde_json::to_writer(&mut w, &serde_json::json!({ "header": header }))?;
    writeln!(w)?;
    for r in reports {
        serde_json::to_writer(&mut w, r)?;
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}
