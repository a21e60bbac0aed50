//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::process::{Command, ExitCode};
use std::time::Instant;

use heatstein::heatkernel::Observable;
use heatstein::partitions::{gen_partitions, Partition};
use heatstein::steinlab::{self, ConditionalBudget, TestFunction, DEFAULT_INCREMENT_GRID};
use heatstein::{Criterion, EstimateReport, NormalizedA, SeedStream};
use heatstein_cli::suite::{symbolic_reports, zonal_ratio_reports};

const SEED: u64 = 1;
const SCALAR: usize = 1_000_000;
const DISTANCE: usize = 100_000;

type Outcome = anyhow::Result<Vec<EstimateReport>>;

fn conditional_budget() -> ConditionalBudget {
    ConditionalBudget {
        panel: 8,
        samples: 200_000,
        t_grid: vec![1e-3, 4e-3],
    }
}

fn conditional_matrices() -> [NormalizedA; 2] {
    [NormalizedA::identity(6), NormalizedA::random(6, SEED)]
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut reports = symbolic_reports(6)?;
    let elapsed = start.elapsed().as_secs_f64();
    reports.push(EstimateReport::new(
        "symbolic suite runtime seconds",
        elapsed,
        0.0,
        1,
        Criterion::AtMost { threshold: 10.0 },
        None,
    ));
    Ok(reports)
}

fn criterion_2() -> Outcome {
    Ok(zonal_ratio_reports(SEED)?)
}

fn criterion_3() -> Outcome {
    let root = SeedStream::new(SEED).fork("acceptance-laplacian");
    let mut out = Vec::new();
    for (i, a) in conditional_matrices().iter().enumerate() {
        for obs in [Observable::P1, Observable::P11] {
            out.extend(steinlab::check_laplacian_panel(
                obs,
                a,
                &conditional_budget(),
                &root.fork_index(i as u64),
            )?);
        }
    }
    Ok(out)
}

fn criterion_4() -> Outcome {
    let root = SeedStream::new(SEED).fork("acceptance-pair-lemmas");
    let mut out = Vec::new();
    for (i, a) in conditional_matrices().iter().enumerate() {
        let s = root.fork_index(i as u64);
        out.push(steinlab::check_drift(a, &conditional_budget(), &s)?);
        out.extend(steinlab::check_quadratic_variation(a, &conditional_budget(), &s)?);
        out.extend(steinlab::check_increment_moments(
            a,
            &DEFAULT_INCREMENT_GRID,
            200_000,
            &s,
        )?);
    }
    Ok(out)
}

fn criterion_5() -> Outcome {
    let root = SeedStream::new(SEED).fork("acceptance-var-p2");
    let mut out = Vec::new();
    for n in [4, 10] {
        for (j, a) in [
            NormalizedA::identity(n),
            NormalizedA::borel(n),
            NormalizedA::random(n, SEED + n as u64),
        ]
        .iter()
        .enumerate()
        {
            let reports = steinlab::check_var_p2(a, SCALAR, &root.fork_index((10 * n + j) as u64))?;
            if j == 0 {
                // equality case of the bound
                let v = &reports[0];
                out.push(EstimateReport::new(
                    format!("var p2 equals 2 at identity(n={n})"),
                    v.point_estimate,
                    v.standard_error,
                    v.samples,
                    Criterion::WithinSe { target: 2.0 },
                    v.seed,
                ));
            }
            out.extend(reports);
        }
    }
    Ok(out)
}

fn criterion_6() -> Outcome {
    let root = SeedStream::new(SEED).fork("acceptance-mgf");
    let mut out = Vec::new();
    for (j, a) in [NormalizedA::identity(8), NormalizedA::random(8, SEED)].iter().enumerate() {
        for (i, t) in [0.25, 0.5].into_iter().enumerate() {
            out.push(steinlab::check_mgf(a, t, 8, SCALAR, &root.fork_index((2 * j + i) as u64))?);
        }
    }
    Ok(out)
}

fn criterion_7() -> Outcome {
    let root = SeedStream::new(SEED).fork("acceptance-schur");
    let lambdas: Vec<Partition> = (1..=4).flat_map(gen_partitions).collect();
    let mut out = Vec::new();
    for (j, a) in [NormalizedA::identity(8), NormalizedA::random(8, SEED)].iter().enumerate() {
        for lambda in lambdas.iter().filter(|l| l.weight() % 2 == 1) {
            out.push(EstimateReport::exact(
                format!("odd-weight target vanishes s{lambda}"),
                steinlab::schur_expectation_exact(lambda, a)? == 0.0,
            ));
        }
        out.extend(steinlab::check_schur_expectations(&lambdas, a, SCALAR, &root.fork_index(j as u64))?);
    }
    Ok(out)
}

fn criterion_8() -> Outcome {
    let root = SeedStream::new(SEED).fork("acceptance-stein");
    let mut out = Vec::new();
    for n in [6, 10] {
        for (j, a) in [NormalizedA::identity(n), NormalizedA::borel(n)].iter().enumerate() {
            out.extend(steinlab::check_stein_identities(
                &TestFunction::ALL,
                a,
                SCALAR,
                &root.fork_index((10 * n + j) as u64),
            )?);
        }
    }
    Ok(out)
}

fn criterion_9() -> Outcome {
    let root = SeedStream::new(SEED).fork("acceptance-distance");
    let mut out = Vec::new();
    for n in [4, 6, 8, 10, 16] {
        for (j, a) in [NormalizedA::identity(n), NormalizedA::borel(n)].iter().enumerate() {
            out.push(steinlab::check_tv_bound(a, DISTANCE, &root.fork_index((10 * n + j) as u64))?);
        }
    }
    Ok(out)
}

const REDUCED_CONFIG: &str = r#"
n = 6
A = "random:5"
seed = 11

[samples]
scalar = 20000
distance = 100000
resamples = 2000
increments = 5000

[conditional]
panel = 2
"#;

fn run_verify_all(config: &std::path::Path, out: &std::path::Path, threads: usize) -> anyhow::Result<String> {
    let status = Command::new(env!("CARGO_BIN_EXE_heatstein"))
        .args(["verify", "all", "--threads", &threads.to_string(), "--config"])
        .arg(config)
        .arg("--out")
        .arg(out)
        .stderr(std::process::Stdio::null())
        .status()?;
    anyhow::ensure!(
        matches!(status.code(), Some(0) | Some(1)),
        "verify all exited with {status}"
    );
    Ok(std::fs::read_to_string(out)?)
}

/// Drops the timestamp so the rest of the header is compared too.
fn without_timestamp(report: &str) -> anyhow::Result<Vec<String>> {
    let mut lines: Vec<String> = report.lines().map(str::to_string).collect();
    let mut header: serde_json::Value = serde_json::from_str(&lines[0])?;
    header["header"]
        .as_object_mut()
        .ok_or_else(|| anyhow::anyhow!("missing header"))?
        .remove("timestamp");
    lines[0] = header.to_string();
    Ok(lines)
}

fn criterion_10() -> Outcome {
    let dir = tempfile::tempdir()?;
    let config = dir.path().join("reduced.toml");
    std::fs::write(&config, REDUCED_CONFIG)?;
    let first = run_verify_all(&config, &dir.path().join("a.jsonl"), 1)?;
    let second = run_verify_all(&config, &dir.path().join("b.jsonl"), 1)?;
    let parallel = run_verify_all(&config, &dir.path().join("c.jsonl"), 2)?;
    let base = without_timestamp(&first)?;
    Ok(vec![
        EstimateReport::exact("report line count above 50", base.len() > 50),
        EstimateReport::exact("repeated run identical", base == without_timestamp(&second)?),
        EstimateReport::exact(
            "one thread vs two threads identical",
            base == without_timestamp(&parallel)?,
        ),
    ])
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("exact symbolic suite", criterion_1),
        ("zonal degree-2 ratios", criterion_2),
        ("laplacian identities", criterion_3),
        ("exchangeable-pair lemmas", criterion_4),
        ("variance of p2", criterion_5),
        ("mgf series", criterion_6),
        ("schur expectations", criterion_7),
        ("stein identity", criterion_8),
        ("distance bound", criterion_9),
        ("reproducibility", criterion_10),
    ];
    let mut failures = 0;
    for (i, (title, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(reports) => {
                let failed: Vec<&EstimateReport> = reports.iter().filter(|r| !r.pass).collect();
                let verdict = if failed.is_empty() { "PASS" } else { "FAIL" };
                println!(
                    "criterion {:>2} {verdict}: {title} ({}/{} checks, {secs:.1} s)",
                    i + 1,
                    reports.len() - failed.len(),
                    reports.len()
                );
                for r in failed {
                    println!("    {}", r.summary_line());
                }
                if verdict == "FAIL" {
                    failures += 1;
                }
            }
            Err(e) => {
                println!("criterion {:>2} FAIL: {title} (error: {e:#})", i + 1);
                failures += 1;
            }
        }
    }
    if failures == 0 {
        println!("acceptance: all 10 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failures} criteria failed");
        ExitCode::FAILURE
    }
}
