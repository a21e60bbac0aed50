//! CSV tables for external plotting and raw sample dumps.

use std::io::Write;

use anyhow::Result;
use clap::ValueEnum;

use heatstein::haar::haar_records;
use heatstein::heatkernel::HeatStepConfig;
use heatstein::steinlab::{self, increment_moments, ExchangeablePairBatch};
use heatstein::SeedStream;

use crate::config::ExperimentConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EmitKind {
    WHistogram,
    IncrementScaling,
    BoundVsN,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SampleKind {
    /// `W`, `p₂` and the entries of each Haar draw.
    Haar,
    /// `(W, W', p₂, p₁₁)` from one heat step at the smallest grid time.
    Pairs,
}

const HISTOGRAM_RANGE: f64 = 4.0;
const HISTOGRAM_BINS: usize = 80;

fn normal_density(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

pub fn emit<W: Write>(cfg: &ExperimentConfig, kind: EmitKind, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let root = SeedStream::new(cfg.seed).fork("emit");
    match kind {
        EmitKind::WHistogram => {
            let a = cfg.a_matrix()?;
            let ws = haar_records(&a, cfg.samples.scalar, &root.fork("w-histogram"), |o, _| a.w(o));
            let width = 2.0 * HISTOGRAM_RANGE / HISTOGRAM_BINS as f64;
            let mut counts = vec![0u64; HISTOGRAM_BINS];
            for x in &ws {
                let b = ((x + HISTOGRAM_RANGE) / width).floor();
                if b >= 0.0 && (b as usize) < HISTOGRAM_BINS {
                    counts[b as usize] += 1;
                }
            }
            w.write_record(["bin_lo", "bin_hi", "center", "count", "density", "normal_density"])?;
            for (i, &c) in counts.iter().enumerate() {
                let lo = -HISTOGRAM_RANGE + i as f64 * width;
                let center = lo + width / 2.0;
                w.serialize((
                    lo,
                    lo + width,
                    center,
                    c,
                    c as f64 / (ws.len() as f64 * width),
                    normal_density(center),
                ))?;
            }
        }
        EmitKind::IncrementScaling => {
            let a = cfg.a_matrix()?;
            let table = increment_moments(
                &a,
                &cfg.increment_grid,
                cfg.samples.increments,
                &root.fork("increment-scaling"),
            )?;
            w.write_record(["t", "m2", "m2_se", "m3_abs", "m3_abs_se", "m4", "m4_se"])?;
            for m in table {
                w.serialize((
                    m.t, m.second.0, m.second.1, m.third.0, m.third.1, m.fourth.0, m.fourth.1,
                ))?;
            }
        }
        EmitKind::BoundVsN => {
            w.write_record([
                "n",
                "kolmogorov",
                "dkw_allowance",
                "bound",
                "smoothed_tv",
                "below_bound",
            ])?;
            for &n in &cfg.bound_ns {
                let a = cfg.a_at(n)?;
                let r = steinlab::check_tv_bound(
                    &a,
                    cfg.samples.distance,
                    &root.fork("bound-vs-n").fork_index(n as u64),
                )?;
                w.serialize((
                    n,
                    r.point_estimate,
                    r.extra["dkw_allowance"],
                    r.extra["bound"],
                    r.extra["smoothed_tv"],
                    r.pass,
                ))?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub fn dump_samples<W: Write>(cfg: &ExperimentConfig, kind: SampleKind, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let a = cfg.a_matrix()?;
    let root = SeedStream::new(cfg.seed).fork("sample");
    let n = a.dim();
    match kind {
        SampleKind::Haar => {
            let mut header = vec!["w".to_string(), "p2".to_string()];
            for i in 0..n {
                for j in 0..n {
                    header.push(format!("o{i}{j}"));
                }
            }
            w.write_record(&header)?;
            let rows = haar_records(&a, cfg.samples.scalar, &root.fork("haar"), |o, _| {
                let mut row = vec![a.w(o), a.p2(o)];
                row.extend_from_slice(o.as_slice());
                row
            });
            for row in rows {
                w.serialize(row)?;
            }
        }
        SampleKind::Pairs => {
            let t = cfg.t_grid.iter().cloned().fold(f64::INFINITY, f64::min);
            let batch = ExchangeablePairBatch::generate(
                &a,
                HeatStepConfig::new(t, 1)?,
                cfg.samples.scalar,
                &root.fork("pairs"),
            )?;
            w.write_record(["w", "w_prime", "p2", "p11"])?;
            for p in &batch.pairs {
                w.serialize((p.w, p.w_prime, p.p2, p.p11))?;
            }
        }
    }
    w.flush()?;
    Ok(())
}
