//! Exact zonal-polynomial expectations and their Monte Carlo counterparts.

use crate::error::{Error, Result};
use crate::haar::{haar_records, trace_powers, NormalizedA};
use crate::partitions::{gen_partitions, Partition};
use crate::report::{mean_se, variance_se, Criterion, EstimateReport};
use crate::rng::SeedStream;
use crate::symchars::character;
use crate::symfun::{schur_expansion, zonal_ratio, MAX_ZONAL_WEIGHT};

const MAX_MGF_DEGREE: usize = 2 * MAX_ZONAL_WEIGHT;
const MAX_SCHUR_CHECK_WEIGHT: usize = 6;
const MAX_MOMENT_ORDER: usize = 8;
/// Per-sample agreement required between the two evaluations of `p₂(AO)`.
pub const P2_EXPANSION_TOL: f64 = 1e-10;

/// `Z_κ(a²)/Z_κ(1ⁿ)`, taken as 0 when `κ` has more than `n` rows.
fn safe_zonal_ratio(kappa: &Partition, a: &NormalizedA) -> Result<f64> {
    if kappa.length() > a.dim() {
        return Ok(0.0);
    }
    zonal_ratio(kappa, &a.squared_singular_values())
}

/// `Var p₂(AO)` from the closed form in `∑ a_i⁴`, for `n ≥ 4`.
pub fn var_p2_exact(a: &NormalizedA) -> Result<f64> {
    let n = a.dim();
    if n < 4 {
        return Err(Error::Hypothesis(format!(
            "variance formula for p2 requires n >= 4, got n = {n}"
        )));
    }
    let n = n as f64;
    let s4 = a.fourth_power_sum();
    let base = n * n / (n * n + 2.0 * n) + 2.0 * n * n / (n * n - n) - 1.0;
    let slope = 2.0 / (n * n - n) - 2.0 / (n * n + 2.0 * n);
    Ok(base - s4 * slope)
}

/// Monte Carlo `Var p₂(AO)` against the closed form, the bound `≤ 2`,
/// and `E p₂(AO) = 1`, from one sample set.
pub fn check_var_p2(a: &NormalizedA, samples: usize, stream: &SeedStream) -> Result<Vec<EstimateReport>> {
    let exact = var_p2_exact(a)?;
    let p2s = haar_records(a, samples, &stream.fork("var-p2"), |o, _| a.p2(o));
    let (var, var_se) = variance_se(&p2s);
    let (mean, mean_se) = mean_se(&p2s);
    let label = a.describe();
    let seed = Some(stream.seed());
    Ok(vec![
        EstimateReport::new(
            format!("var p2 {label}"),
            var,
            var_se,
            samples as u64,
            Criterion::WithinSe { target: exact },
            seed,
        ),
        EstimateReport::new(
            format!("var p2 bound {label}"),
            var,
            var_se,
            samples as u64,
            Criterion::AtMost {
                threshold: 2.0 + 4.0 * var_se,
            },
            seed,
        )
        .with_extra("exact", exact),
        EstimateReport::new(
            format!("mean p2 {label}"),
            mean,
            mean_se,
            samples as u64,
            Criterion::WithinSe { target: 1.0 },
            seed,
        ),
    ])
}

/// The `t^{2k}` term `∑_{|λ|=k} t^{2k}/h(2λ) · Z_λ(a²)/Z_λ(1ⁿ)` of the
/// moment generating function.
pub fn mgf_term(a: &NormalizedA, t: f64, k: usize) -> Result<f64> {
    if k > MAX_ZONAL_WEIGHT {
        return Err(Error::Capacity {
            what: "moment generating function degree",
            got: 2 * k,
            max: MAX_MGF_DEGREE,
        });
    }
    let mut sum = 0.0;
    for lambda in gen_partitions(k) {
        sum += safe_zonal_ratio(&lambda, a)? / lambda.double().hook_product() as f64;
    }
    Ok(sum * t.powi(2 * k as i32))
}

/// Partial sum of `E exp(tW)` through degree `max_degree`.
pub fn mgf_series(a: &NormalizedA, t: f64, max_degree: usize) -> Result<f64> {
    if max_degree % 2 != 0 {
        return Err(Error::Config(format!(
            "series degree must be even, got {max_degree}"
        )));
    }
    if max_degree > MAX_MGF_DEGREE {
        return Err(Error::Capacity {
            what: "moment generating function degree",
            got: max_degree,
            max: MAX_MGF_DEGREE,
        });
    }
    if !(t.abs() <= 1.0) {
        return Err(Error::Config(format!("|t| must be at most 1, got {t}")));
    }
    (0..=max_degree / 2).map(|k| mgf_term(a, t, k)).sum()
}

/// Size of the first term left out of [`mgf_series`]. Past the zonal
/// capacity, the Gaussian term `t^{2k}/(2^k k!)` stands in.
fn mgf_tail_estimate(a: &NormalizedA, t: f64, max_degree: usize) -> Result<f64> {
    let k = max_degree / 2 + 1;
    if k <= MAX_ZONAL_WEIGHT {
        return mgf_term(a, t, k);
    }
    let denom = (1..=k).fold(1.0, |acc, j| acc * 2.0 * j as f64);
    Ok(t.powi(2 * k as i32) / denom)
}

/// Monte Carlo `E exp(tW)` against the truncated series, allowing the
/// larger of 4·SE and the first omitted term.
pub fn check_mgf(
    a: &NormalizedA,
    t: f64,
    max_degree: usize,
    samples: usize,
    stream: &SeedStream,
) -> Result<EstimateReport> {
    let target = mgf_series(a, t, max_degree)?;
    let allowance = mgf_tail_estimate(a, t, max_degree)?;
    let xs = haar_records(a, samples, &stream.fork("mgf"), |o, _| (t * a.w(o)).exp());
    let (mean, se) = mean_se(&xs);
    Ok(EstimateReport::new(
        format!("mgf t={t} degree={max_degree} {}", a.describe()),
        mean,
        se,
        samples as u64,
        Criterion::WithinSeOrAllowance { target, allowance },
        Some(stream.seed()),
    ))
}

/// `E s_λ(AO)`: `Z_κ(a²)/Z_κ(1ⁿ)` when `λ = 2κ`, otherwise 0.
pub fn schur_expectation_exact(lambda: &Partition, a: &NormalizedA) -> Result<f64> {
    match lambda.halve() {
        Some(kappa) => safe_zonal_ratio(&kappa, a),
        None => Ok(0.0),
    }
}

/// `E p_ρ(AO) = ∑_λ χ^λ_ρ E s_λ(AO)`.
pub fn power_sum_expectation_exact(rho: &Partition, a: &NormalizedA) -> Result<f64> {
    let mut sum = 0.0;
    for lambda in gen_partitions(rho.weight()) {
        if lambda.halve().is_none() {
            continue;
        }
        sum += character(&lambda, rho)? as f64 * schur_expectation_exact(&lambda, a)?;
    }
    Ok(sum)
}

/// Monte Carlo `E s_λ(AO)` for every `λ` in `lambdas`, on one shared sample set.
pub fn check_schur_expectations(
    lambdas: &[Partition],
    a: &NormalizedA,
    samples: usize,
    stream: &SeedStream,
) -> Result<Vec<EstimateReport>> {
    let mut polys = Vec::with_capacity(lambdas.len());
    let mut kmax = 1;
    for lambda in lambdas {
        if lambda.weight() > MAX_SCHUR_CHECK_WEIGHT {
            return Err(Error::Capacity {
                what: "schur expectation weight",
                got: lambda.weight(),
                max: MAX_SCHUR_CHECK_WEIGHT,
            });
        }
        kmax = kmax.max(lambda.weight());
        polys.push((schur_expansion(lambda)?.to_float(), schur_expectation_exact(lambda, a)?));
    }
    let values = haar_records(a, samples, &stream.fork("schur"), |o, _| {
        let traces = trace_powers(&a.times(o), kmax);
        polys.iter().map(|(p, _)| p.eval(&traces)).collect::<Vec<f64>>()
    });
    Ok(lambdas
        .iter()
        .zip(&polys)
        .enumerate()
        .map(|(i, (lambda, (_, target)))| {
            let column: Vec<f64> = values.iter().map(|v| v[i]).collect();
            let (mean, se) = mean_se(&column);
            EstimateReport::new(
                format!("E s{lambda} {}", a.describe()),
                mean,
                se,
                samples as u64,
                Criterion::WithinSe { target: *target },
                Some(stream.seed()),
            )
        })
        .collect())
}

pub fn check_schur_expectation(
    lambda: &Partition,
    a: &NormalizedA,
    samples: usize,
    stream: &SeedStream,
) -> Result<EstimateReport> {
    Ok(check_schur_expectations(std::slice::from_ref(lambda), a, samples, stream)?.remove(0))
}

/// Exact `E W^r = r! ∑_{|λ|=r/2} Z_λ(a²)/(h(2λ) Z_λ(1ⁿ))`, 0 for odd `r`.
pub fn exact_moment(a: &NormalizedA, r: usize) -> Result<f64> {
    if r % 2 == 1 {
        return Ok(0.0);
    }
    let factorial = (1..=r).fold(1.0, |acc, j| acc * j as f64);
    Ok(factorial * mgf_term(a, 1.0, r / 2)?)
}

fn double_factorial_odd(r: usize) -> f64 {
    (1..r).step_by(2).fold(1.0, |acc, j| acc * j as f64)
}

/// Monte Carlo `E W^r` against the exact finite-`n` moment. The Gaussian
/// moment `(r−1)!!` is attached as `asymptotic` for trend reporting only.
pub fn check_moments(
    r: usize,
    a: &NormalizedA,
    samples: usize,
    stream: &SeedStream,
) -> Result<EstimateReport> {
    if r == 0 || r > MAX_MOMENT_ORDER {
        return Err(Error::Capacity {
            what: "moment order",
            got: r,
            max: MAX_MOMENT_ORDER,
        });
    }
    let target = exact_moment(a, r)?;
    let asymptotic = if r % 2 == 0 { double_factorial_odd(r) } else { 0.0 };
    let xs = haar_records(a, samples, &stream.fork_index(r as u64), |o, _| a.w(o).powi(r as i32));
    let (mean, se) = mean_se(&xs);
    Ok(EstimateReport::new(
        format!("E W^{r} {}", a.describe()),
        mean,
        se,
        samples as u64,
        Criterion::WithinSe { target },
        Some(stream.seed()),
    )
    .with_extra("asymptotic", asymptotic)
    .with_extra("asymptotic_deviation", mean - asymptotic))
}

/// `E p_{1111}(AO)` and `E p_{211}(AO)` against their zonal closed forms.
pub fn check_power_sum_expectations(
    a: &NormalizedA,
    samples: usize,
    stream: &SeedStream,
) -> Result<Vec<EstimateReport>> {
    let rhos = [Partition::column(4), Partition::new(vec![2, 1, 1])?];
    let targets = rhos
        .iter()
        .map(|r| power_sum_expectation_exact(r, a))
        .collect::<Result<Vec<_>>>()?;
    let values = haar_records(a, samples, &stream.fork("power-sums"), |o, _| {
        let w = a.w(o);
        let w2 = w * w;
        [w2 * w2, a.p2(o) * w2]
    });
    Ok(rhos
        .iter()
        .zip(targets)
        .enumerate()
        .map(|(i, (rho, target))| {
            let column: Vec<f64> = values.iter().map(|v| v[i]).collect();
            let (mean, se) = mean_se(&column);
            EstimateReport::new(
                format!("E p{rho} {}", a.describe()),
                mean,
                se,
                samples as u64,
                Criterion::WithinSe { target },
                Some(stream.seed()),
            )
        })
        .collect())
}

/// Largest per-sample gap between `Tr((AO)²)` and `(s₂ − s₁₁)(AO)`.
pub fn check_p2_expansion(a: &NormalizedA, samples: usize, stream: &SeedStream) -> Result<EstimateReport> {
    let s2 = schur_expansion(&Partition::row(2))?.to_float();
    let s11 = schur_expansion(&Partition::column(2))?.to_float();
    let gaps = haar_records(a, samples, &stream.fork("p2-expansion"), |o, _| {
        let ao = a.times(o);
        let traces = trace_powers(&ao, 2);
        (ao.trace_of_product(&ao) - (s2.eval(&traces) - s11.eval(&traces))).abs()
    });
    let worst = gaps.iter().cloned().fold(0.0, f64::max);
    Ok(EstimateReport::new(
        format!("p2 schur expansion {}", a.describe()),
        worst,
        0.0,
        samples as u64,
        Criterion::AtMost {
            threshold: P2_EXPANSION_TOL,
        },
        Some(stream.seed()),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition;

    #[test]
    fn var_p2_closed_form_values() {
        for n in [4, 5, 6, 10, 100] {
            let v = var_p2_exact(&NormalizedA::identity(n)).unwrap();
            assert!((v - 2.0).abs() < 1e-12, "n={n}: {v}");
        }
        assert!((var_p2_exact(&NormalizedA::borel(4)).unwrap() - 1.0).abs() < 1e-12);
        for seed in 0..20 {
            let a = NormalizedA::random(4 + seed as usize % 7, seed);
            assert!(var_p2_exact(&a).unwrap() <= 2.0 + 1e-12);
        }
        assert!(matches!(
            var_p2_exact(&NormalizedA::identity(3)),
            Err(Error::Hypothesis(_))
        ));
    }

    #[test]
    fn var_p2_matches_zonal_oracle() {
        // Var p₂ = E p₍₂,₂₎ − (E p₂)² through the character expansion
        for (n, seed) in [(4, 1), (6, 2), (9, 3)] {
            let a = NormalizedA::random(n, seed);
            let e22 = power_sum_expectation_exact(&partition![2, 2], &a).unwrap();
            let e2 = power_sum_expectation_exact(&partition![2], &a).unwrap();
            assert!((e2 - 1.0).abs() < 1e-12);
            let v = var_p2_exact(&a).unwrap();
            assert!((e22 - e2 * e2 - v).abs() < 1e-10, "n={n}: {} vs {v}", e22 - 1.0);
        }
    }

    #[test]
    fn power_sum_targets_have_zonal_closed_forms() {
        let a = NormalizedA::random(5, 4);
        let v = a.squared_singular_values();
        let z2 = zonal_ratio(&partition![2], &v).unwrap();
        let z11 = zonal_ratio(&partition![1, 1], &v).unwrap();
        let e1111 = power_sum_expectation_exact(&partition![1, 1, 1, 1], &a).unwrap();
        let e211 = power_sum_expectation_exact(&partition![2, 1, 1], &a).unwrap();
        assert!((e1111 - (z2 + 2.0 * z11)).abs() < 1e-12);
        assert!((e211 - z2).abs() < 1e-12);
    }

    #[test]
    fn mgf_low_terms() {
        let a = NormalizedA::random(7, 5);
        assert_eq!(mgf_term(&a, 0.7, 0).unwrap(), 1.0);
        assert!((mgf_term(&a, 0.7, 1).unwrap() - 0.49 / 2.0).abs() < 1e-14);
        assert!(mgf_series(&a, 0.5, 7).is_err());
        assert!(mgf_series(&a, 0.5, 14).is_err());
        assert!(mgf_series(&a, 1.5, 4).is_err());
        assert!(mgf_series(&a, 1.0, 12).is_ok());
    }

    #[test]
    fn exact_moments_identity() {
        // Haar trace moments equal Gaussian ones while 2k ≤ n − 1
        let a = NormalizedA::identity(12);
        for (r, m) in [(1, 0.0), (2, 1.0), (3, 0.0), (4, 3.0), (6, 15.0), (8, 105.0)] {
            assert!((exact_moment(&a, r).unwrap() - m).abs() < 1e-9, "r={r}");
        }
        // Borel A: W = √n·O₁₁ and E O₁₁^{2k} = (2k−1)!!/(n(n+2)⋯(n+2k−2))
        let n = 5.0;
        let b = NormalizedA::borel(5);
        let want = n * n * n * 15.0 / (n * (n + 2.0) * (n + 4.0));
        assert!((exact_moment(&b, 6).unwrap() - want).abs() < 1e-10);
    }

    #[test]
    fn schur_targets() {
        let a = NormalizedA::random(6, 8);
        assert_eq!(schur_expectation_exact(&partition![1, 1], &a).unwrap(), 0.0);
        assert!((schur_expectation_exact(&partition![2], &a).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(schur_expectation_exact(&partition![3], &a).unwrap(), 0.0);
        assert_eq!(schur_expectation_exact(&partition![], &a).unwrap(), 1.0);
        let too_long = NormalizedA::identity(2);
        assert_eq!(schur_expectation_exact(&partition![2, 2, 2], &too_long).unwrap(), 0.0);
    }

    #[test]
    fn monte_carlo_checks_small() {
        let a = NormalizedA::random(6, 9);
        let s = SeedStream::new(30);
        for r in check_var_p2(&a, 100_000, &s).unwrap() {
            assert!(r.pass, "{}", r.summary_line());
        }
        assert!(check_mgf(&a, 0.5, 8, 100_000, &s).unwrap().pass);
        let lambdas: Vec<Partition> = crate::partitions::gen_partitions_upto(4);
        for r in check_schur_expectations(&lambdas, &a, 100_000, &s).unwrap() {
            assert!(r.pass, "{}", r.summary_line());
        }
        for r in 1..=4 {
            let rep = check_moments(r, &a, 100_000, &s).unwrap();
            assert!(rep.pass, "{}", rep.summary_line());
        }
        for r in check_power_sum_expectations(&a, 100_000, &s).unwrap() {
            assert!(r.pass, "{}", r.summary_line());
        }
        let gap = check_p2_expansion(&a, 10_000, &s).unwrap();
        assert!(gap.pass, "{}", gap.summary_line());
        assert!(check_moments(9, &a, 10, &s).is_err());
        assert!(check_schur_expectation(&partition![7], &a, 10, &s).is_err());
    }
}
