//! Haar-distributed orthogonal matrices and the statistics `Tr(AO)`, `p_ρ(AO)`.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{householder_qr, singular_values, SquareMatrix};
use crate::rng::{par_samples, SeedStream, StreamRng};

/// `‖OᵗO − I‖_max` allowed for a freshly sampled Haar matrix.
pub const HAAR_ORTHOGONALITY_TOL: f64 = 1e-12;

pub fn gaussian_matrix<R: Rng + ?Sized>(n: usize, rng: &mut R) -> SquareMatrix {
    let data = (0..n * n).map(|_| rng.sample(StandardNormal)).collect();
    SquareMatrix::from_row_major(n, data).expect("finite gaussian entries")
}

/// Haar sample on `O(n)`: QR of an i.i.d. Gaussian matrix, with column `i`
/// of `Q` multiplied by `sign(R_ii)`.
pub fn sample_haar<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<SquareMatrix> {
    if n == 0 {
        return Err(Error::Dimension {
            got: 0,
            reason: "orthogonal group needs n >= 1",
        });
    }
    let g = gaussian_matrix(n, rng);
    let qr = householder_qr(&g);
    let mut q = qr.q;
    for (j, &r) in qr.r_diag.iter().enumerate() {
        if r < 0.0 {
            for i in 0..n {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    Ok(q)
}

/// A fixed matrix scaled so `Tr(AAᵗ) = n`, kept in its diagonal
/// singular-value form `D = diag(a₁ ≥ … ≥ a_n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizedA {
    matrix: SquareMatrix,
    singular_values: Vec<f64>,
    /// The input after scaling, before diagonalization.
    scaled_input: SquareMatrix,
}

/// Scales `raw` to `Tr(AAᵗ) = n` and replaces it by its singular values.
pub fn normalize_a(raw: &SquareMatrix) -> Result<NormalizedA> {
    raw.check_finite()?;
    let n = raw.dim();
    let fro = raw.frobenius_sq();
    if fro == 0.0 {
        return Err(Error::Degenerate("A must be nonzero"));
    }
    let scaled = raw.scaled((n as f64 / fro).sqrt());
    let mut sv = singular_values(&scaled);
    // Jacobi leaves ~1e-16 relative error; restore Σa² = n to the last bit we can
    let s2: f64 = sv.iter().map(|s| s * s).sum();
    let fix = (n as f64 / s2).sqrt();
    sv.iter_mut().for_each(|s| *s *= fix);
    Ok(NormalizedA {
        matrix: SquareMatrix::from_diag(&sv),
        singular_values: sv,
        scaled_input: scaled,
    })
}

impl NormalizedA {
    pub fn identity(n: usize) -> Self {
        normalize_a(&SquareMatrix::identity(n)).expect("identity is nondegenerate")
    }

    /// `√n ⊕ 0`, whose statistic is `√n` times one coordinate of a uniform unit vector.
    pub fn borel(n: usize) -> Self {
        let mut d = vec![0.0; n];
        d[0] = 1.0;
        normalize_a(&SquareMatrix::from_diag(&d)).expect("nonzero")
    }

    /// A Gaussian matrix drawn from `seed`, normalized.
    pub fn random(n: usize, seed: u64) -> Self {
        let mut rng = SeedStream::new(seed).fork("random-A").rng(0);
        normalize_a(&gaussian_matrix(n, &mut rng)).expect("gaussian matrix is nonzero a.s.")
    }

    /// Diagonal matrix with the given (nonnegative) values, normalized.
    pub fn from_singular_values(values: &[f64]) -> Result<Self> {
        normalize_a(&SquareMatrix::from_diag(values))
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &SquareMatrix {
        &self.matrix
    }

    pub fn scaled_input(&self) -> &SquareMatrix {
        &self.scaled_input
    }

    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }

    /// `(a₁², …, a_n²)`, the argument of the zonal polynomials.
    pub fn squared_singular_values(&self) -> Vec<f64> {
        self.singular_values.iter().map(|a| a * a).collect()
    }

    /// `∑ a_i⁴`.
    pub fn fourth_power_sum(&self) -> f64 {
        self.singular_values.iter().map(|a| a.powi(4)).sum()
    }

    /// `A·O` with `A` diagonal: row `i` of `O` scaled by `a_i`.
    pub fn times(&self, o: &SquareMatrix) -> SquareMatrix {
        let n = self.dim();
        let mut m = o.clone();
        for i in 0..n {
            let a = self.singular_values[i];
            for j in 0..n {
                m[(i, j)] *= a;
            }
        }
        m
    }

    /// `Tr(AO) = ∑ a_i O_ii`, no dimension check.
    pub fn w(&self, o: &SquareMatrix) -> f64 {
        self.singular_values
            .iter()
            .enumerate()
            .map(|(i, a)| a * o[(i, i)])
            .sum()
    }

    /// `p₂(AO) = Tr((AO)²) = ∑_{ij} a_i a_j O_ij O_ji`.
    pub fn p2(&self, o: &SquareMatrix) -> f64 {
        let n = self.dim();
        let a = &self.singular_values;
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += a[i] * a[j] * o[(i, j)] * o[(j, i)];
            }
        }
        s
    }

    /// Text summary used in report names.
    pub fn describe(&self) -> String {
        let n = self.dim();
        if self.singular_values.iter().all(|&a| (a - 1.0).abs() < 1e-12) {
            format!("identity(n={n})")
        } else if self.singular_values[1..].iter().all(|&a| a == 0.0) {
            format!("borel(n={n})")
        } else {
            format!("custom(n={n})")
        }
    }
}

/// `W = Tr(AO)`.
pub fn statistic_w(a: &NormalizedA, o: &SquareMatrix) -> Result<f64> {
    if a.dim() != o.dim() {
        return Err(Error::Shape(format!(
            "A is {0}x{0} but O is {1}x{1}",
            a.dim(),
            o.dim()
        )));
    }
    Ok(a.w(o))
}

/// `[Tr(M), Tr(M²), …, Tr(M^kmax)]` by repeated multiplication.
pub fn trace_powers(m: &SquareMatrix, kmax: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(kmax);
    if kmax == 0 {
        return out;
    }
    out.push(m.trace());
    if kmax == 1 {
        return out;
    }
    out.push(m.trace_of_product(m));
    let mut power = m.clone();
    let mut next = SquareMatrix::zeros(m.dim());
    // Tr(M^k) = Tr(M^{k-1}·M); only powers up to kmax-1 are formed
    for _ in 3..=kmax {
        power.matmul_into(m, &mut next);
        std::mem::swap(&mut power, &mut next);
        out.push(power.trace_of_product(m));
    }
    out
}

/// Draws `samples` Haar matrices for `a.dim()` and maps each through `f`,
/// in deterministic batch order.
pub fn haar_records<T, F>(a: &NormalizedA, samples: usize, stream: &SeedStream, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&SquareMatrix, &mut StreamRng) -> T + Sync,
{
    let n = a.dim();
    par_samples(samples, stream, |rng| {
        let o = sample_haar(n, rng).expect("n >= 1");
        f(&o, rng)
    })
}
