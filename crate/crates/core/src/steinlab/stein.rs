//! Stein-type identity `E[f'(W) − Wf(W)] = E[(p₂(AO)−1)/(n−1)·f'(W)]`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::haar::{haar_records, NormalizedA};
use crate::report::{mean_se, Criterion, EstimateReport};
use crate::rng::SeedStream;

/// Test functions with bounded second derivative on the relevant range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TestFunction {
    Identity,
    Square,
    Sine,
    Tanh,
}

impl TestFunction {
    pub const ALL: [TestFunction; 4] = [
        TestFunction::Identity,
        TestFunction::Square,
        TestFunction::Sine,
        TestFunction::Tanh,
    ];

    pub fn f(&self, x: f64) -> f64 {
        match self {
            TestFunction::Identity => x,
            TestFunction::Square => x * x,
            TestFunction::Sine => x.sin(),
            TestFunction::Tanh => x.tanh(),
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match self {
            TestFunction::Identity => 1.0,
            TestFunction::Square => 2.0 * x,
            TestFunction::Sine => x.cos(),
            TestFunction::Tanh => {
                let c = x.cosh();
                1.0 / (c * c)
            }
        }
    }
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TestFunction::Identity => "x",
            TestFunction::Square => "x^2",
            TestFunction::Sine => "sin",
            TestFunction::Tanh => "tanh",
        })
    }
}

impl FromStr for TestFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "x" | "identity" | "id" => Ok(TestFunction::Identity),
            "x^2" | "x2" | "square" => Ok(TestFunction::Square),
            "sin" | "sine" => Ok(TestFunction::Sine),
            "tanh" => Ok(TestFunction::Tanh),
            _ => Err(Error::UnknownFunction(s.to_string())),
        }
    }
}

/// `(W, p₂(AO))` draws shared by every function in one call.
fn stein_draws(a: &NormalizedA, samples: usize, stream: &SeedStream) -> Vec<(f64, f64)> {
    haar_records(a, samples, &stream.fork("stein"), |o, _| (a.w(o), a.p2(o)))
}

/// Both sides of the identity on common draws, gated on their per-sample
/// difference. Side means go into `extra` as `lhs`, `rhs`.
pub fn check_stein_identities(
    functions: &[TestFunction],
    a: &NormalizedA,
    samples: usize,
    stream: &SeedStream,
) -> Result<Vec<EstimateReport>> {
    let n = a.dim();
    if n < 2 {
        return Err(Error::Dimension {
            got: n,
            reason: "the identity divides by n - 1",
        });
    }
    let draws = stein_draws(a, samples, stream);
    let scale = 1.0 / (n as f64 - 1.0);
    Ok(functions
        .iter()
        .map(|func| {
            let mut lhs = Vec::with_capacity(draws.len());
            let mut rhs = Vec::with_capacity(draws.len());
            let mut diff = Vec::with_capacity(draws.len());
            for &(w, p2) in &draws {
                let d = func.derivative(w);
                let l = d - w * func.f(w);
                let r = (p2 - 1.0) * scale * d;
                lhs.push(l);
                rhs.push(r);
                diff.push(l - r);
            }
            let (m, se) = mean_se(&diff);
            let (lm, lse) = mean_se(&lhs);
            let (rm, rse) = mean_se(&rhs);
            EstimateReport::new(
                format!("stein f={func} {}", a.describe()),
                m,
                se,
                samples as u64,
                Criterion::WithinSe { target: 0.0 },
                Some(stream.seed()),
            )
            .with_extra("lhs", lm)
            .with_extra("lhs_se", lse)
            .with_extra("rhs", rm)
            .with_extra("rhs_se", rse)
        })
        .collect())
}

pub fn check_stein_identity(
    function: TestFunction,
    a: &NormalizedA,
    samples: usize,
    stream: &SeedStream,
) -> Result<EstimateReport> {
    Ok(check_stein_identities(&[function], a, samples, stream)?.remove(0))
}
