//! Brownian motion on `O(n)` and Monte Carlo estimates of its generator.
//!
//! The Lie algebra carries the inner product `⟨X, Y⟩ = −Tr(XY)` with
//! orthonormal basis `X_{ij} = (E_ij − E_ji)/√2`. A standard Gaussian element
//! is `X = ∑ ξ_{ij} X_{ij}`, i.e. `X = (G − Gᵗ)/2` for i.i.d. Gaussian `G`.
//!
//! The Laplacian is `Δ = ∑_{i<j} X_{ij}²` acting as left-invariant vector
//! fields, so `Δ Tr(AO) = Tr(AO ∑ X_{ij}²) = −(n−1)/2 · Tr(AO)` because
//! `∑_{i<j} X_{ij}² = −(n−1)/2 · I`. The diffusion generated by `Δ` (not
//! `Δ/2`) moves by `exp(√(2h)·X)` over time `h`, which is what [`heat_step`]
//! composes.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::haar::NormalizedA;
use crate::matrix::{householder_qr, SquareMatrix};
use crate::report::{mean_se, richardson, Criterion, EstimateReport};
use crate::rng::{par_samples, SeedStream, StreamRng};

/// Orthogonality drift tolerated after one heat step.
pub const STEP_ORTHOGONALITY_TOL: f64 = 1e-11;

/// Remainder bound targeted by the truncated Taylor series in [`expm`].
const TAYLOR_TOL: f64 = 1e-17;

/// An antisymmetric matrix, i.e. an element of `o(n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LieAlgebraElement(SquareMatrix);

impl LieAlgebraElement {
    /// Accepts `m` only if it is exactly antisymmetric.
    pub fn new(m: SquareMatrix) -> Result<Self> {
        if m.antisymmetry_defect() != 0.0 {
            return Err(Error::Shape("matrix is not antisymmetric".into()));
        }
        Ok(LieAlgebraElement(m))
    }

    /// `θ` times the planar generator `E_12 − E_21`.
    pub fn planar(theta: f64) -> Self {
        let mut m = SquareMatrix::zeros(2);
        m[(0, 1)] = theta;
        m[(1, 0)] = -theta;
        LieAlgebraElement(m)
    }

    pub fn matrix(&self) -> &SquareMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn scaled(&self, s: f64) -> Self {
        LieAlgebraElement(self.0.scaled(s))
    }
}

fn fill_algebra<R: Rng + ?Sized>(m: &mut SquareMatrix, rng: &mut R) {
    let n = m.dim();
    for i in 0..n {
        m[(i, i)] = 0.0;
        for j in i + 1..n {
            // (g_ij − g_ji)/2 ~ N(0, 1/2)
            let z: f64 = rng.sample(StandardNormal);
            let x = z * std::f64::consts::FRAC_1_SQRT_2;
            m[(i, j)] = x;
            m[(j, i)] = -x;
        }
    }
}

/// Standard Gaussian element of `o(n)`: off-diagonal entries `N(0, 1/2)`.
pub fn sample_algebra<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<LieAlgebraElement> {
    if n < 2 {
        return Err(Error::Dimension {
            got: n,
            reason: "o(n) is trivial for n < 2",
        });
    }
    let mut m = SquareMatrix::zeros(n);
    fill_algebra(&mut m, rng);
    Ok(LieAlgebraElement(m))
}

/// `exp(m)` by scaling and squaring a truncated Taylor series.
///
/// `m` is scaled by `2^-s` until its ∞-norm is at most 1/2, the series is cut
/// at the first order `q` with `‖B‖^{q+1}/(q+1)! ≤ 1e-17` (the tail is at most
/// twice that), and the result is squared `s` times.
pub fn expm(m: &SquareMatrix) -> Result<SquareMatrix> {
    m.check_finite()?;
    let n = m.dim();
    let norm = m.norm_inf();
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let b = m.scaled(0.5f64.powi(squarings));
    let bnorm = norm * 0.5f64.powi(squarings);
    let mut order = 1usize;
    let mut term = bnorm;
    while order < 30 {
        term *= bnorm / (order + 1) as f64;
        if term <= TAYLOR_TOL {
            break;
        }
        order += 1;
    }
    let identity = SquareMatrix::identity(n);
    let mut acc = identity.clone();
    let mut tmp = SquareMatrix::zeros(n);
    for k in (1..=order).rev() {
        b.matmul_into(&acc, &mut tmp);
        let inv = 1.0 / k as f64;
        for (dst, (src, id)) in acc
            .as_mut_slice()
            .iter_mut()
            .zip(tmp.as_slice().iter().zip(identity.as_slice()))
        {
            *dst = id + src * inv;
        }
    }
    for _ in 0..squarings {
        acc.matmul_into(&acc.clone(), &mut tmp);
        std::mem::swap(&mut acc, &mut tmp);
    }
    acc.check_finite()?;
    Ok(acc)
}

/// `exp(X)`, orthogonal for antisymmetric `X`.
pub fn matrix_exp(x: &LieAlgebraElement) -> Result<SquareMatrix> {
    expm(x.matrix())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeatStepConfig {
    t: f64,
    substeps: usize,
}

impl HeatStepConfig {
    pub fn new(t: f64, substeps: usize) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::Config(format!("heat time must be positive, got {t}")));
        }
        if substeps == 0 {
            return Err(Error::Config("substeps must be at least 1".into()));
        }
        Ok(HeatStepConfig { t, substeps })
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn substeps(&self) -> usize {
        self.substeps
    }

    /// Scale applied to each standard algebra sample: `√(2t/substeps)`.
    pub fn increment_scale(&self) -> f64 {
        (2.0 * self.t / self.substeps as f64).sqrt()
    }
}

/// Right factor `E` of one heat step `O' = O·E`.
pub fn heat_increment<R: Rng + ?Sized>(
    n: usize,
    cfg: &HeatStepConfig,
    rng: &mut R,
) -> Result<SquareMatrix> {
    let scale = cfg.increment_scale();
    let mut x = SquareMatrix::zeros(n);
    let mut total: Option<SquareMatrix> = None;
    for _ in 0..cfg.substeps {
        fill_algebra(&mut x, rng);
        let e = expm(&x.scaled(scale))?;
        total = Some(match total {
            None => e,
            Some(t) => t.matmul(&e),
        });
    }
    Ok(total.expect("substeps >= 1"))
}

/// Projects a nearly orthogonal matrix back onto `O(n)` via QR with a
/// positive `R` diagonal.
pub fn reproject(o: &SquareMatrix) -> SquareMatrix {
    let qr = householder_qr(o);
    let mut q = qr.q;
    let n = o.dim();
    for (j, &r) in qr.r_diag.iter().enumerate() {
        if r < 0.0 {
            for i in 0..n {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    q
}

/// Result of a heat step that may have needed re-projection.
#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub matrix: SquareMatrix,
    pub renormalized: bool,
}

/// One heat step with drift control: re-projects when the orthogonality
/// defect exceeds [`STEP_ORTHOGONALITY_TOL`] and fails if that does not help.
pub fn heat_step_checked<R: Rng + ?Sized>(
    o: &SquareMatrix,
    cfg: &HeatStepConfig,
    rng: &mut R,
) -> Result<StepOutcome> {
    let n = o.dim();
    if n < 2 {
        return Err(Error::Dimension {
            got: n,
            reason: "heat steps need n >= 2",
        });
    }
    let e = heat_increment(n, cfg, rng)?;
    let next = o.matmul(&e);
    let drift = next.orthogonality_defect();
    if drift <= STEP_ORTHOGONALITY_TOL {
        return Ok(StepOutcome {
            matrix: next,
            renormalized: false,
        });
    }
    let fixed = reproject(&next);
    let after = fixed.orthogonality_defect();
    if after > STEP_ORTHOGONALITY_TOL {
        return Err(Error::OrthogonalityDrift {
            drift: after,
            limit: STEP_ORTHOGONALITY_TOL,
        });
    }
    Ok(StepOutcome {
        matrix: fixed,
        renormalized: true,
    })
}

/// `O' = O·∏ exp(√(2t/m)·X_s)`: Brownian motion run for time `t` from `O`.
pub fn heat_step<R: Rng + ?Sized>(
    o: &SquareMatrix,
    cfg: &HeatStepConfig,
    rng: &mut R,
) -> Result<SquareMatrix> {
    heat_step_checked(o, cfg, rng).map(|s| s.matrix)
}

/// Runs `steps` consecutive heat steps and counts re-projections.
pub fn heat_walk<R: Rng + ?Sized>(
    o: &SquareMatrix,
    cfg: &HeatStepConfig,
    steps: usize,
    rng: &mut R,
) -> Result<(SquareMatrix, usize)> {
    let mut cur = o.clone();
    let mut renorm = 0;
    for _ in 0..steps {
        let s = heat_step_checked(&cur, cfg, rng)?;
        renorm += usize::from(s.renormalized);
        cur = s.matrix;
    }
    Ok((cur, renorm))
}

/// Observables whose Laplacian is known in closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Observable {
    /// `p₁(AO) = Tr(AO)`
    P1,
    /// `p₁,₁(AO) = Tr(AO)²`
    P11,
}

impl Observable {
    pub fn eval(&self, w: f64) -> f64 {
        match self {
            Observable::P1 => w,
            Observable::P11 => w * w,
        }
    }

    /// Closed-form `Δf` at a base point with statistics `w = p₁`, `p2 = p₂`.
    pub fn laplacian(&self, n: usize, w: f64, p2: f64) -> f64 {
        let n = n as f64;
        match self {
            Observable::P1 => -(n - 1.0) / 2.0 * w,
            Observable::P11 => -(n - 1.0) * w * w - p2 + n,
        }
    }
}

impl FromStr for Observable {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "p1" | "p_1" | "(1)" => Ok(Observable::P1),
            "p11" | "p1,1" | "p_{1,1}" | "(1,1)" => Ok(Observable::P11),
            other => Err(Error::UnsupportedObservable(other.to_string())),
        }
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Observable::P1 => "p1",
            Observable::P11 => "p11",
        })
    }
}

/// Draws `samples` single-exponential increments `E` at time `t` and returns
/// `(Tr(M·E), Tr(M·Eᵗ))` for each. `E` and `Eᵗ = exp(−√(2t)X)` are both
/// valid heat steps, so each pair is an antithetic couple.
pub fn antithetic_traces(
    m: &SquareMatrix,
    t: f64,
    samples: usize,
    stream: &SeedStream,
) -> Result<Vec<(f64, f64)>> {
    let cfg = HeatStepConfig::new(t, 1)?;
    let n = m.dim();
    let mt = m.transpose();
    Ok(par_samples(samples, stream, |rng: &mut StreamRng| {
        let e = heat_increment(n, &cfg, rng).expect("finite increment");
        // Tr(M·E) and Tr(M·Eᵗ) = Tr(Mᵗ·E)
        (m.trace_of_product(&e), mt.trace_of_product(&e))
    }))
}

/// Per-time estimates plus their linear extrapolation to `t → 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Extrapolation {
    pub times: Vec<f64>,
    pub means: Vec<f64>,
    pub standard_errors: Vec<f64>,
    pub value: f64,
    pub standard_error: f64,
}

impl Extrapolation {
    /// Fits `L + c·t` through the two smallest times.
    pub fn from_points(points: Vec<(f64, f64, f64)>) -> Self {
        let mut points = points;
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (ta, ma, sa) = points[0];
        let (tb, mb, sb) = points[1];
        let (value, standard_error) = richardson(ta, (ma, sa), tb, (mb, sb));
        Extrapolation {
            times: points.iter().map(|p| p.0).collect(),
            means: points.iter().map(|p| p.1).collect(),
            standard_errors: points.iter().map(|p| p.2).collect(),
            value,
            standard_error,
        }
    }

    pub fn annotate(&self, mut report: EstimateReport) -> EstimateReport {
        for (i, t) in self.times.iter().enumerate() {
            report = report
                .with_extra(&format!("t{i}"), *t)
                .with_extra(&format!("raw{i}"), self.means[i])
                .with_extra(&format!("raw_se{i}"), self.standard_errors[i]);
        }
        report
    }
}

/// Validates a time grid: at least two distinct positive times.
pub fn validate_t_grid(t_grid: &[f64]) -> Result<Vec<f64>> {
    let mut ts: Vec<f64> = t_grid.to_vec();
    if ts.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
        return Err(Error::Config(format!("t grid must be positive: {t_grid:?}")));
    }
    ts.sort_by(|a, b| b.total_cmp(a));
    ts.dedup();
    if ts.len() < 2 {
        return Err(Error::Config("t grid needs at least two distinct times".into()));
    }
    Ok(ts)
}

/// Estimates `(E[f(O')|O] − f(O))/t` on each grid time and extrapolates.
pub fn drift_extrapolation(
    observable: Observable,
    a: &NormalizedA,
    o: &SquareMatrix,
    t_grid: &[f64],
    samples: usize,
    stream: &SeedStream,
) -> Result<Extrapolation> {
    let ts = validate_t_grid(t_grid)?;
    let m = a.times(o);
    let w = m.trace();
    let base = observable.eval(w);
    let mut points = Vec::with_capacity(ts.len());
    for (i, &t) in ts.iter().enumerate() {
        let pairs = antithetic_traces(&m, t, samples, &stream.fork_index(i as u64))?;
        let ys: Vec<f64> = pairs
            .iter()
            .map(|&(wp, wm)| ((observable.eval(wp) + observable.eval(wm)) / 2.0 - base) / t)
            .collect();
        let (mean, se) = mean_se(&ys);
        points.push((t, mean, se));
    }
    Ok(Extrapolation::from_points(points))
}

/// Monte Carlo `Δf(O)` against the closed-form Laplacian identities.
pub fn estimate_laplacian(
    observable: Observable,
    a: &NormalizedA,
    o: &SquareMatrix,
    t_grid: &[f64],
    samples: usize,
    stream: &SeedStream,
) -> Result<EstimateReport> {
    let ex = drift_extrapolation(observable, a, o, t_grid, samples, stream)?;
    let target = observable.laplacian(a.dim(), a.w(o), a.p2(o));
    let report = EstimateReport::new(
        format!("laplacian[{observable}] {}", a.describe()),
        ex.value,
        ex.standard_error,
        samples as u64,
        Criterion::WithinSe { target },
        Some(stream.seed()),
    );
    Ok(ex.annotate(report))
}
