//! Monte Carlo estimate records and the pass rules applied to them.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Standard-error multiplier used by every statistical gate.
pub const SE_MULTIPLIER: f64 = 4.0;

/// How a report decides `pass`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum Criterion {
    /// `|estimate − target| ≤ 4·SE`.
    WithinSe { target: f64 },
    /// `|estimate − target| ≤ max(4·SE, allowance)`.
    WithinSeOrAllowance { target: f64, allowance: f64 },
    /// `|estimate − target| ≤ tolerance · max(|target|, 1e-300)`.
    Relative { target: f64, tolerance: f64 },
    /// Exact agreement (symbolic identities, mismatch counts).
    Exact { target: f64 },
    AtLeast { threshold: f64 },
    AtMost { threshold: f64 },
    /// Reported but never gated.
    Informational,
}

impl Criterion {
    pub fn target(&self) -> Option<f64> {
        match *self {
            Criterion::WithinSe { target }
            | Criterion::WithinSeOrAllowance { target, .. }
            | Criterion::Relative { target, .. }
            | Criterion::Exact { target } => Some(target),
            _ => None,
        }
    }

    pub fn evaluate(&self, estimate: f64, standard_error: f64) -> bool {
        if !estimate.is_finite() {
            return matches!(self, Criterion::Informational);
        }
        match *self {
            Criterion::WithinSe { target } => {
                (estimate - target).abs() <= SE_MULTIPLIER * standard_error
            }
            Criterion::WithinSeOrAllowance { target, allowance } => {
                (estimate - target).abs() <= (SE_MULTIPLIER * standard_error).max(allowance)
            }
            Criterion::Relative { target, tolerance } => {
                (estimate - target).abs() <= tolerance * target.abs().max(1e-300)
            }
            Criterion::Exact { target } => estimate == target,
            Criterion::AtLeast { threshold } => estimate >= threshold,
            Criterion::AtMost { threshold } => estimate <= threshold,
            Criterion::Informational => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub name: String,
    pub point_estimate: f64,
    pub standard_error: f64,
    pub samples: u64,
    pub target: Option<f64>,
    pub criterion: Criterion,
    pub pass: bool,
    pub seed: Option<u64>,
    /// Auxiliary numbers (raw per-t values, skipped counts, bounds).
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub extra: BTreeMap<String, f64>,
}

impl EstimateReport {
    pub fn new(
        name: impl Into<String>,
        point_estimate: f64,
        standard_error: f64,
        samples: u64,
        criterion: Criterion,
        seed: Option<u64>,
    ) -> Self {
        let standard_error = standard_error.max(0.0);
        EstimateReport {
            name: name.into(),
            point_estimate,
            standard_error,
            samples,
            target: criterion.target(),
            pass: criterion.evaluate(point_estimate, standard_error),
            criterion,
            seed,
            extra: BTreeMap::new(),
        }
    }

    /// A zero-variance record for exact identities.
    pub fn exact(name: impl Into<String>, holds: bool) -> Self {
        Self::new(
            name,
            if holds { 1.0 } else { 0.0 },
            0.0,
            1,
            Criterion::Exact { target: 1.0 },
            None,
        )
    }

    pub fn with_extra(mut self, key: &str, value: f64) -> Self {
        self.extra.insert(key.to_string(), value);
        self
    }

    /// Re-derives `pass` from the stored estimate and rule.
    pub fn recompute_pass(&self) -> bool {
        self.criterion
            .evaluate(self.point_estimate, self.standard_error)
    }

    /// `(estimate − target)/SE`, when both exist.
    pub fn z_score(&self) -> Option<f64> {
        let t = self.target?;
        (self.standard_error > 0.0).then(|| (self.point_estimate - t) / self.standard_error)
    }

    pub fn summary_line(&self) -> String {
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        match self.target {
            Some(t) => format!(
                "{verdict} {}: estimate {:.6} ± {:.2e} (target {:.6}, n={})",
                self.name, self.point_estimate, self.standard_error, t, self.samples
            ),
            None => format!(
                "{verdict} {}: estimate {:.6} ± {:.2e} ({:?}, n={})",
                self.name, self.point_estimate, self.standard_error, self.criterion, self.samples
            ),
        }
    }
}

/// Sample mean and its standard error.
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Unbiased sample variance and a delta-method standard error
/// `√((m₄ − m₂²)/N)`.
pub fn variance_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n < 2 {
        return (f64::NAN, f64::NAN);
    }
    let nf = n as f64;
    let mean = xs.iter().sum::<f64>() / nf;
    let (m2, m4) = xs.iter().fold((0.0, 0.0), |(a, b), x| {
        let d = (x - mean) * (x - mean);
        (a + d, b + d * d)
    });
    let var = m2 / (nf - 1.0);
    let m2n = m2 / nf;
    let m4n = m4 / nf;
    (var, ((m4n - m2n * m2n).max(0.0) / nf).sqrt())
}

/// Least-squares slope of `y` on `x` with its standard error.
pub fn ols_slope(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    if x.len() <= 2 {
        return (slope, 0.0);
    }
    let resid: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - my - slope * (a - mx)).powi(2))
        .sum();
    (slope, (resid / (n - 2.0) / sxx).sqrt())
}

/// Linear extrapolation to `t = 0` through `(t_a, v_a)` and `(t_b, v_b)`
/// with independent errors.
pub fn richardson(t_a: f64, v_a: (f64, f64), t_b: f64, v_b: (f64, f64)) -> (f64, f64) {
    let denom = t_b - t_a;
    let value = (t_b * v_a.0 - t_a * v_b.0) / denom;
    let se = ((t_b * v_a.1).powi(2) + (t_a * v_b.1).powi(2)).sqrt() / denom.abs();
    (value, se)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_flag_follows_rule() {
        let r = EstimateReport::new("x", 1.3, 0.1, 10, Criterion::WithinSe { target: 1.0 }, Some(1));
        assert!(r.pass);
        assert_eq!(r.target, Some(1.0));
        let r = EstimateReport::new("x", 1.5, 0.1, 10, Criterion::WithinSe { target: 1.0 }, Some(1));
        assert!(!r.pass);
        assert!((r.z_score().unwrap() - 5.0).abs() < 1e-12);
        let r = EstimateReport::new(
            "x",
            1.5,
            0.1,
            10,
            Criterion::WithinSeOrAllowance {
                target: 1.0,
                allowance: 0.6,
            },
            None,
        );
        assert!(r.pass);
        assert!(EstimateReport::new("s", 1.9, 0.0, 1, Criterion::AtLeast { threshold: 1.8 }, None).pass);
        assert!(!EstimateReport::new("s", 1.7, 0.0, 1, Criterion::AtLeast { threshold: 1.8 }, None).pass);
        assert!(!EstimateReport::exact("e", false).pass);
        assert!(!EstimateReport::new("nan", f64::NAN, 0.0, 1, Criterion::AtMost { threshold: 1.0 }, None).pass);
    }

    #[test]
    fn json_roundtrip_preserves_pass() {
        let r = EstimateReport::new("x", 0.2, 0.1, 5, Criterion::WithinSe { target: 0.0 }, Some(3))
            .with_extra("skipped", 2.0);
        let s = serde_json::to_string(&r).unwrap();
        assert!(s.contains("\"rule\":\"within-se\""));
        let back: EstimateReport = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.recompute_pass(), back.pass);
    }

    #[test]
    fn helpers() {
        let (m, se) = mean_se(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((se - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
        let (v, _) = variance_se(&[1.0, 2.0, 3.0, 4.0]);
        assert!((v - 5.0 / 3.0).abs() < 1e-15);
        let (s, _) = ols_slope(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]);
        assert!((s - 2.0).abs() < 1e-15);
        let (l, _) = richardson(1.0, (3.0, 0.0), 2.0, (5.0, 0.0));
        assert!((l - 1.0).abs() < 1e-15);
    }
}
