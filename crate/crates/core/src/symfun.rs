//! Symmetric functions in the power-sum basis.
//!
//! Everything here is exact: coefficients are `BigRational`, and floating
//! point only appears when an expansion is evaluated on traces of a matrix or
//! on power sums of a value vector.
//!
//! Schur functions come from the character expansion
//! `s_λ = ∑_ρ z_ρ⁻¹ χ^λ_ρ p_ρ`. Zonal polynomials (Jack parameter 2) are
//! built by Gram–Schmidt on the monomial basis, written in power sums, under
//! `⟨p_λ, p_μ⟩ = δ_{λμ} z_λ 2^{ℓ(λ)}`. Partitions are processed in increasing
//! lexicographic order, a linear extension of dominance, and each result is
//! scaled so that `Z_λ(1ⁿ) = ∏_{(i,j)∈λ} (n − i + 2j − 1)` as polynomials in `n`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::haar::trace_powers;
use crate::matrix::SquareMatrix;
use crate::partitions::{gen_partitions, Partition};
use crate::symchars::{char_table, CharacterTable};

/// Largest weight for Schur expansions.
pub const MAX_SCHUR_WEIGHT: usize = 8;
/// Largest weight for zonal expansions.
pub const MAX_ZONAL_WEIGHT: usize = 6;

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn rat_u(n: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// A homogeneous symmetric function `∑_ρ c_ρ p_ρ` with exact coefficients.
#[derive(Clone, PartialEq, Eq)]
pub struct PowerSumPolynomial {
    degree: usize,
    coefficients: BTreeMap<Partition, BigRational>,
}

impl PowerSumPolynomial {
    pub fn zero(degree: usize) -> Self {
        PowerSumPolynomial {
            degree,
            coefficients: BTreeMap::new(),
        }
    }

    /// The basis element `p_ρ`.
    pub fn power_sum(rho: &Partition) -> Self {
        let mut p = Self::zero(rho.weight());
        p.coefficients.insert(rho.clone(), BigRational::one());
        p
    }

    /// Builds from `(ρ, c_ρ)` pairs; every `ρ` must have weight `degree`.
    pub fn from_terms(
        degree: usize,
        terms: impl IntoIterator<Item = (Partition, BigRational)>,
    ) -> Result<Self> {
        let mut p = Self::zero(degree);
        for (rho, c) in terms {
            if rho.weight() != degree {
                return Err(Error::WeightMismatch(degree, rho.weight()));
            }
            p.add_term(rho, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, rho: Partition, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let entry = self
            .coefficients
            .entry(rho.clone())
            .or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.coefficients.remove(&rho);
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coefficient(&self, rho: &Partition) -> BigRational {
        self.coefficients
            .get(rho)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Partition, &BigRational)> {
        self.coefficients.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        let mut out = Self::zero(self.degree);
        for (r, c) in &self.coefficients {
            out.add_term(r.clone(), c * s);
        }
        out
    }

    fn checked_combine(&self, other: &Self, sign: i64) -> Self {
        assert_eq!(
            self.degree, other.degree,
            "adding symmetric functions of different degree"
        );
        let mut out = self.clone();
        for (r, c) in &other.coefficients {
            out.add_term(r.clone(), c * rat(sign));
        }
        out
    }

    /// The degree-`k` inner product `⟨p_λ, p_μ⟩ = δ_{λμ} z_λ α^{ℓ(λ)}`.
    pub fn jack_inner(&self, other: &Self, alpha: u64) -> BigRational {
        self.coefficients
            .iter()
            .filter_map(|(r, c)| other.coefficients.get(r).map(|d| (r, c * d)))
            .map(|(r, cd)| cd * rat_u(r.cycle_constant()) * rat_u(alpha.pow(r.length() as u32)))
            .fold(BigRational::zero(), |a, b| a + b)
    }

    /// Value when `p_j` is replaced by `power_sums[j - 1]`.
    pub fn eval_power_sums(&self, power_sums: &[f64]) -> f64 {
        self.to_float().eval(power_sums)
    }

    /// Exact value at the all-ones vector of length `n` (`p_j(1ⁿ) = n`).
    pub fn eval_ones(&self, n: u64) -> BigRational {
        self.coefficients
            .iter()
            .map(|(r, c)| c * rat_u(n.pow(r.length() as u32)))
            .fold(BigRational::zero(), |a, b| a + b)
    }

    pub fn to_float(&self) -> FloatPowerSum {
        FloatPowerSum {
            degree: self.degree,
            terms: self
                .coefficients
                .iter()
                .map(|(r, c)| (r.parts().to_vec(), c.to_f64().expect("finite coefficient")))
                .collect(),
        }
    }

    /// JSON object `{degree, coefficients: {"(2,1)": {"num": "..", "den": ".."}}}`.
    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Coefficient {
            num: String,
            den: String,
        }
        let coefficients: BTreeMap<String, Coefficient> = self
            .coefficients
            .iter()
            .map(|(r, c)| {
                (
                    r.to_string(),
                    Coefficient {
                        num: c.numer().to_string(),
                        den: c.denom().to_string(),
                    },
                )
            })
            .collect();
        serde_json::json!({ "basis": "power-sum", "degree": self.degree, "coefficients": coefficients })
    }
}

impl Add for &PowerSumPolynomial {
    type Output = PowerSumPolynomial;
    fn add(self, rhs: &PowerSumPolynomial) -> PowerSumPolynomial {
        self.checked_combine(rhs, 1)
    }
}

impl Sub for &PowerSumPolynomial {
    type Output = PowerSumPolynomial;
    fn sub(self, rhs: &PowerSumPolynomial) -> PowerSumPolynomial {
        self.checked_combine(rhs, -1)
    }
}

impl Neg for &PowerSumPolynomial {
    type Output = PowerSumPolynomial;
    fn neg(self) -> PowerSumPolynomial {
        self.scale(&rat(-1))
    }
}

impl fmt::Debug for PowerSumPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coefficients.is_empty() {
            return write!(f, "0");
        }
        for (i, (r, c)) in self.coefficients.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}·p{r}")?;
        }
        Ok(())
    }
}

/// Floating-point copy of a [`PowerSumPolynomial`] for hot evaluation loops.
#[derive(Debug, Clone)]
pub struct FloatPowerSum {
    degree: usize,
    terms: Vec<(Vec<usize>, f64)>,
}

impl FloatPowerSum {
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// `power_sums[j - 1]` stands for `p_j`; must have length ≥ degree.
    pub fn eval(&self, power_sums: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(parts, c)| c * parts.iter().map(|&j| power_sums[j - 1]).product::<f64>())
            .sum()
    }
}

/// `p_ρ(M) = ∏_j Tr(M^j)^{m_j}`, from traces of matrix powers.
pub fn power_sum_eval(rho: &Partition, m: &SquareMatrix) -> f64 {
    let kmax = rho.part(0).max(1);
    let traces = trace_powers(m, kmax);
    rho.parts().iter().map(|&j| traces[j - 1]).product()
}

/// `[∑ v, ∑ v², …, ∑ v^kmax]`.
pub fn value_power_sums(values: &[f64], kmax: usize) -> Vec<f64> {
    (1..=kmax)
        .map(|j| values.iter().map(|v| v.powi(j as i32)).sum())
        .collect()
}

fn capacity(what: &'static str, got: usize, max: usize) -> Error {
    Error::Capacity { what, got, max }
}

struct SchurDegree {
    table: Option<CharacterTable>,
    expansions: Vec<(Partition, PowerSumPolynomial)>,
}

fn schur_degree(k: usize) -> &'static SchurDegree {
    static CACHE: [OnceLock<SchurDegree>; MAX_SCHUR_WEIGHT + 1] =
        [const { OnceLock::new() }; MAX_SCHUR_WEIGHT + 1];
    CACHE[k].get_or_init(|| {
        if k == 0 {
            let one = PowerSumPolynomial::power_sum(&Partition::empty());
            return SchurDegree {
                table: None,
                expansions: vec![(Partition::empty(), one)],
            };
        }
        let table = char_table(k).expect("weight within table capacity");
        let expansions = table
            .partitions()
            .iter()
            .map(|l| {
                let row = table.row(l).expect("row present");
                let terms = table.partitions().iter().zip(row).map(|(r, &chi)| {
                    (r.clone(), rat(chi) / rat_u(r.cycle_constant()))
                });
                let p = PowerSumPolynomial::from_terms(k, terms).expect("weights agree");
                (l.clone(), p)
            })
            .collect();
        SchurDegree {
            table: Some(table),
            expansions,
        }
    })
}

/// `s_λ = ∑_ρ z_ρ⁻¹ χ^λ_ρ p_ρ` for `|λ| ≤ 8`.
pub fn schur_expansion(lambda: &Partition) -> Result<PowerSumPolynomial> {
    let k = lambda.weight();
    if k > MAX_SCHUR_WEIGHT {
        return Err(capacity("Schur expansion weight", k, MAX_SCHUR_WEIGHT));
    }
    Ok(schur_degree(k)
        .expansions
        .iter()
        .find(|(l, _)| l == lambda)
        .map(|(_, p)| p.clone())
        .expect("every partition of k has an expansion"))
}

/// `∑_λ χ^λ_ρ s_λ`, which should reproduce `p_ρ` exactly.
pub fn power_sum_from_schur(rho: &Partition) -> Result<PowerSumPolynomial> {
    let k = rho.weight();
    if k > MAX_SCHUR_WEIGHT {
        return Err(capacity("Schur expansion weight", k, MAX_SCHUR_WEIGHT));
    }
    let degree = schur_degree(k);
    let Some(table) = &degree.table else {
        return Ok(PowerSumPolynomial::power_sum(rho));
    };
    let mut acc = PowerSumPolynomial::zero(k);
    for (l, s) in &degree.expansions {
        let chi = table.get(l, rho).expect("entry present");
        acc = &acc + &s.scale(&rat(chi));
    }
    Ok(acc)
}

/// Number of ways to distribute the parts of `rho` over the variables so that
/// variable `i` receives total degree `mu_i`: the coefficient of `m_μ` in `p_ρ`.
fn power_to_monomial_coefficient(rho: &Partition, mu: &Partition) -> u64 {
    fn rec(parts: &[usize], remaining: &mut [usize]) -> u64 {
        let Some((&first, rest)) = parts.split_first() else {
            return u64::from(remaining.iter().all(|&r| r == 0));
        };
        let mut count = 0;
        for i in 0..remaining.len() {
            if remaining[i] >= first {
                remaining[i] -= first;
                count += rec(rest, remaining);
                remaining[i] += first;
            }
        }
        count
    }
    let mut remaining = mu.parts().to_vec();
    rec(rho.parts(), &mut remaining)
}

/// Change of basis at degree `k`: the matrix `L` with `p_ρ = ∑_μ L_{ρμ} m_μ`,
/// together with its exact inverse (`m_μ = ∑_ρ L⁻¹_{μρ} p_ρ`).
pub struct MonomialBasis {
    partitions: Vec<Partition>,
    power_to_monomial: Vec<Vec<BigRational>>,
    monomial_to_power: Vec<Vec<BigRational>>,
}

impl MonomialBasis {
    pub fn new(k: usize) -> Self {
        let partitions = gen_partitions(k);
        let m = partitions.len();
        let l: Vec<Vec<BigRational>> = partitions
            .iter()
            .map(|r| {
                partitions
                    .iter()
                    .map(|mu| rat_u(power_to_monomial_coefficient(r, mu)))
                    .collect()
            })
            .collect();
        let inv = invert(&l).expect("power-sum to monomial matrix is triangular and invertible");
        debug_assert_eq!(inv.len(), m);
        MonomialBasis {
            partitions,
            power_to_monomial: l,
            monomial_to_power: inv,
        }
    }

    /// `m_μ` written in power sums.
    pub fn monomial(&self, mu: &Partition) -> PowerSumPolynomial {
        let idx = self
            .partitions
            .iter()
            .position(|p| p == mu)
            .expect("partition of this degree");
        let k = mu.weight();
        let terms = self
            .partitions
            .iter()
            .zip(&self.monomial_to_power[idx])
            .map(|(r, c)| (r.clone(), c.clone()));
        PowerSumPolynomial::from_terms(k, terms).expect("weights agree")
    }

    /// Coefficients of `f` in the monomial basis.
    pub fn to_monomial(&self, f: &PowerSumPolynomial) -> BTreeMap<Partition, BigRational> {
        let mut out = BTreeMap::new();
        for (j, mu) in self.partitions.iter().enumerate() {
            let c = self
                .partitions
                .iter()
                .enumerate()
                .map(|(i, r)| f.coefficient(r) * &self.power_to_monomial[i][j])
                .fold(BigRational::zero(), |a, b| a + b);
            if !c.is_zero() {
                out.insert(mu.clone(), c);
            }
        }
        out
    }
}

/// Gauss–Jordan inverse over the rationals.
fn invert(a: &[Vec<BigRational>]) -> Option<Vec<Vec<BigRational>>> {
    let m = a.len();
    let mut work: Vec<Vec<BigRational>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..m).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            r
        })
        .collect();
    for col in 0..m {
        let pivot = (col..m).find(|&r| !work[r][col].is_zero())?;
        work.swap(col, pivot);
        let inv = BigRational::one() / &work[col][col];
        for x in work[col].iter_mut() {
            *x *= &inv;
        }
        for r in 0..m {
            if r != col && !work[r][col].is_zero() {
                let factor = work[r][col].clone();
                let pivot_row = work[col].clone();
                for (x, p) in work[r].iter_mut().zip(&pivot_row) {
                    *x -= &factor * p;
                }
            }
        }
    }
    Some(work.into_iter().map(|r| r[m..].to_vec()).collect())
}

/// `∏_{(i,j)∈λ} (n − i + 2j − 1)` with 1-based cell coordinates.
pub fn zonal_one_eval(lambda: &Partition, n: i64) -> BigInt {
    lambda
        .cells()
        .map(|(i, j)| BigInt::from(n - (i as i64 + 1) + 2 * (j as i64 + 1) - 1))
        .product()
}

/// A zonal polynomial with its power-sum expansion and product formula at `1ⁿ`.
#[derive(Clone)]
pub struct ZonalClosedForm {
    partition: Partition,
    expansion: PowerSumPolynomial,
    float: FloatPowerSum,
}

impl ZonalClosedForm {
    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn expansion(&self) -> &PowerSumPolynomial {
        &self.expansion
    }

    /// `Z_λ(1ⁿ)` from the product formula.
    pub fn one_eval(&self, n: i64) -> BigInt {
        zonal_one_eval(&self.partition, n)
    }

    /// Whether the expansion evaluated exactly at `1ⁿ` equals the product formula.
    pub fn matches_product_formula(&self, n: u64) -> bool {
        self.expansion.eval_ones(n) == BigRational::from_integer(self.one_eval(n as i64))
    }

    pub fn one_eval_f64(&self, n: usize) -> f64 {
        self.one_eval(n as i64).to_f64().expect("finite")
    }

    /// Evaluates at a value vector via its power sums.
    pub fn eval(&self, values: &[f64]) -> f64 {
        let k = self.partition.weight().max(1);
        self.float.eval(&value_power_sums(values, k))
    }
}

impl fmt::Debug for ZonalClosedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z{} = {:?}", self.partition, self.expansion)
    }
}

fn build_zonals(k: usize) -> Vec<ZonalClosedForm> {
    if k == 0 {
        let one = PowerSumPolynomial::power_sum(&Partition::empty());
        return vec![ZonalClosedForm {
            partition: Partition::empty(),
            float: one.to_float(),
            expansion: one,
        }];
    }
    let basis = MonomialBasis::new(k);
    let mut ascending = gen_partitions(k);
    ascending.reverse();
    let mut orthogonal: Vec<(Partition, PowerSumPolynomial, BigRational)> = Vec::new();
    for lambda in ascending {
        let m = basis.monomial(&lambda);
        let mut p = m.clone();
        for (_, q, qq) in &orthogonal {
            let coeff = m.jack_inner(q, 2) / qq;
            p = &p - &q.scale(&coeff);
        }
        let pp = p.jack_inner(&p, 2);
        orthogonal.push((lambda, p, pp));
    }
    let mut out: Vec<ZonalClosedForm> = orthogonal
        .into_iter()
        .map(|(lambda, p, _)| {
            let n0 = lambda.length() as u64;
            let target = BigRational::from_integer(zonal_one_eval(&lambda, n0 as i64));
            let scale = target / p.eval_ones(n0);
            let z = p.scale(&scale);
            // both sides are polynomials of degree k in n; k + 1 points pin the identity
            for n in 1..=(k as u64 + 1) {
                assert_eq!(
                    z.eval_ones(n),
                    BigRational::from_integer(zonal_one_eval(&lambda, n as i64)),
                    "zonal normalization is not a polynomial identity for {lambda}"
                );
            }
            ZonalClosedForm {
                float: z.to_float(),
                partition: lambda,
                expansion: z,
            }
        })
        .collect();
    out.reverse();
    out
}

fn zonal_degree(k: usize) -> &'static [ZonalClosedForm] {
    static CACHE: [OnceLock<Vec<ZonalClosedForm>>; MAX_ZONAL_WEIGHT + 1] =
        [const { OnceLock::new() }; MAX_ZONAL_WEIGHT + 1];
    CACHE[k].get_or_init(|| build_zonals(k))
}

/// Zonal polynomial `Z_λ` for `|λ| ≤ 6`.
pub fn zonal_expansion(lambda: &Partition) -> Result<ZonalClosedForm> {
    let k = lambda.weight();
    if k > MAX_ZONAL_WEIGHT {
        return Err(capacity("zonal expansion weight", k, MAX_ZONAL_WEIGHT));
    }
    Ok(zonal_degree(k)
        .iter()
        .find(|z| z.partition() == lambda)
        .cloned()
        .expect("every partition of k has a zonal polynomial"))
}

/// All zonal polynomials of weight `k`, in canonical partition order.
pub fn zonals_of_weight(k: usize) -> Result<&'static [ZonalClosedForm]> {
    if k > MAX_ZONAL_WEIGHT {
        return Err(capacity("zonal expansion weight", k, MAX_ZONAL_WEIGHT));
    }
    Ok(zonal_degree(k))
}

/// `Z_λ(values)` evaluated through the power-sum expansion.
pub fn zonal_eval(lambda: &Partition, values: &[f64]) -> Result<f64> {
    Ok(zonal_expansion(lambda)?.eval(values))
}

/// `Z_λ(values) / Z_λ(1ⁿ)` with `n = values.len()`.
pub fn zonal_ratio(lambda: &Partition, values: &[f64]) -> Result<f64> {
    let z = zonal_expansion(lambda)?;
    Ok(z.eval(values) / z.one_eval_f64(values.len()))
}

/// `∑_{|λ|=k} 2^k k! Z_λ / h(2λ)`, which should equal `p_1^k`.
pub fn zonal_hook_sum(k: usize) -> Result<PowerSumPolynomial> {
    let mut acc = PowerSumPolynomial::zero(k);
    let weight = rat_u(2u64.pow(k as u32) * crate::partitions::factorial(k));
    for z in zonals_of_weight(k)? {
        let h = rat_u(z.partition().double().hook_product());
        acc = &acc + &z.expansion().scale(&(&weight / h));
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn poly(degree: usize, terms: &[(Partition, BigRational)]) -> PowerSumPolynomial {
        PowerSumPolynomial::from_terms(degree, terms.iter().cloned()).unwrap()
    }

    #[test]
    fn power_sum_on_matrices() {
        let i5 = SquareMatrix::identity(5);
        assert_eq!(power_sum_eval(&partition![1], &i5), 5.0);
        let d = SquareMatrix::from_diag(&[1.0, 2.0, -3.0]);
        assert_eq!(power_sum_eval(&partition![2, 2], &d), 14.0 * 14.0);
        let m = SquareMatrix::from_rows(&[
            vec![0.5, 1.0, 0.0],
            vec![-1.0, 0.2, 0.3],
            vec![0.0, 0.4, -0.7],
        ])
        .unwrap();
        let m3 = m.matmul(&m).matmul(&m);
        let m5 = m3.matmul(&m).matmul(&m);
        let expect = m5.trace() * m3.trace() * m3.trace();
        assert!((power_sum_eval(&partition![5, 3, 3], &m) - expect).abs() < 1e-12);
    }

    #[test]
    fn schur_low_degree() {
        assert_eq!(
            schur_expansion(&partition![1]).unwrap(),
            PowerSumPolynomial::power_sum(&partition![1])
        );
        assert_eq!(
            schur_expansion(&partition![2]).unwrap(),
            poly(2, &[(partition![2], q(1, 2)), (partition![1, 1], q(1, 2))])
        );
        assert_eq!(
            schur_expansion(&partition![1, 1]).unwrap(),
            poly(2, &[(partition![2], q(-1, 2)), (partition![1, 1], q(1, 2))])
        );
        let p2 = &schur_expansion(&partition![2]).unwrap()
            - &schur_expansion(&partition![1, 1]).unwrap();
        assert_eq!(p2, PowerSumPolynomial::power_sum(&partition![2]));
        assert!(matches!(
            schur_expansion(&Partition::row(9)),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn schur_roundtrip_exact() {
        for k in 0..=6 {
            for rho in gen_partitions(k) {
                assert_eq!(
                    power_sum_from_schur(&rho).unwrap(),
                    PowerSumPolynomial::power_sum(&rho),
                    "rho={rho}"
                );
            }
        }
    }

    #[test]
    fn schur_matches_bialternant_on_diagonal() {
        // s_(2,1)(x1,x2,x3) by brute force over semistandard tableaux
        let x = [0.3, -1.2, 2.0];
        let mut brute = 0.0;
        // tableaux of shape (2,1) with entries in 1..=3: rows weakly increase, columns strictly
        for a in 0..3 {
            for b in a..3 {
                for c in (a + 1)..3 {
                    brute += x[a] * x[b] * x[c];
                }
            }
        }
        let ps = value_power_sums(&x, 3);
        let s21 = schur_expansion(&partition![2, 1]).unwrap().eval_power_sums(&ps);
        assert!((s21 - brute).abs() < 1e-12);
    }

    #[test]
    fn monomial_change_of_basis() {
        let b = MonomialBasis::new(2);
        // m_(2) = p_2, m_(1,1) = (p_1^2 - p_2)/2
        assert_eq!(b.monomial(&partition![2]), PowerSumPolynomial::power_sum(&partition![2]));
        assert_eq!(
            b.monomial(&partition![1, 1]),
            poly(2, &[(partition![1, 1], q(1, 2)), (partition![2], q(-1, 2))])
        );
        assert_eq!(power_to_monomial_coefficient(&partition![1, 1, 1], &partition![1, 1, 1]), 6);
        assert_eq!(power_to_monomial_coefficient(&partition![2, 1], &partition![1, 1, 1]), 0);
    }

    #[test]
    fn zonal_degree_two() {
        let z2 = zonal_expansion(&partition![2]).unwrap();
        assert_eq!(
            z2.expansion(),
            &poly(2, &[(partition![1, 1], q(1, 1)), (partition![2], q(2, 1))])
        );
        let z11 = zonal_expansion(&partition![1, 1]).unwrap();
        assert_eq!(
            z11.expansion(),
            &poly(2, &[(partition![1, 1], q(1, 1)), (partition![2], q(-1, 1))])
        );
        assert_eq!(z2.one_eval(7), BigInt::from(7 * 9));
        assert_eq!(z11.one_eval(7), BigInt::from(7 * 6));
        let z1 = zonal_expansion(&partition![1]).unwrap();
        assert_eq!(z1.expansion(), &PowerSumPolynomial::power_sum(&partition![1]));
        assert_eq!(zonal_eval(&partition![1], &[1.0; 9]).unwrap(), 9.0);
        assert_eq!(zonal_eval(&partition![2], &[1.0; 4]).unwrap(), 24.0);
    }

    #[test]
    fn zonal_one_eval_consistency() {
        for k in 0..=5 {
            for z in zonals_of_weight(k).unwrap() {
                for n in 1..=10u64 {
                    assert_eq!(
                        z.expansion().eval_ones(n),
                        BigRational::from_integer(z.one_eval(n as i64)),
                        "{:?} at n={n}",
                        z.partition()
                    );
                    let float = z.eval(&vec![1.0; n as usize]);
                    assert!((float - z.one_eval_f64(n as usize)).abs() < 1e-9 * float.abs().max(1.0));
                }
            }
        }
    }

    #[test]
    fn zonal_gram_schmidt_orthogonal() {
        for k in 1..=6 {
            let zs = zonals_of_weight(k).unwrap();
            for (i, a) in zs.iter().enumerate() {
                for b in &zs[i + 1..] {
                    assert!(
                        a.expansion().jack_inner(b.expansion(), 2).is_zero(),
                        "<Z{}, Z{}> != 0",
                        a.partition(),
                        b.partition()
                    );
                }
            }
        }
    }

    #[test]
    fn zonal_triangular_in_dominance() {
        // incomparable pairs first appear at weight 6; the lexicographic
        // Gram–Schmidt still only reaches dominated monomials
        for k in 1..=6 {
            let basis = MonomialBasis::new(k);
            for z in zonals_of_weight(k).unwrap() {
                let mono = basis.to_monomial(z.expansion());
                for mu in mono.keys() {
                    assert!(
                        z.partition().dominates(mu),
                        "Z{} has m{} term",
                        z.partition(),
                        mu
                    );
                }
            }
        }
    }

    #[test]
    fn zonal_hook_sum_is_p1_power() {
        for k in 0..=4 {
            assert_eq!(
                zonal_hook_sum(k).unwrap(),
                PowerSumPolynomial::power_sum(&Partition::column(k)),
                "k={k}"
            );
        }
    }

    #[test]
    fn zonal_degree_two_ratios() {
        let a2 = [0.4, 1.7, 0.0, 1.9];
        let n = a2.len() as f64;
        let s1: f64 = a2.iter().sum();
        let s2: f64 = a2.iter().map(|x| x * x).sum();
        let r2 = zonal_ratio(&partition![2], &a2).unwrap();
        let r11 = zonal_ratio(&partition![1, 1], &a2).unwrap();
        assert!((r2 - (s1 * s1 + 2.0 * s2) / (n * n + 2.0 * n)).abs() < 1e-14);
        assert!((r11 - (s1 * s1 - s2) / (n * n - n)).abs() < 1e-14);
    }

    #[test]
    fn zonal_capacity() {
        assert!(matches!(
            zonal_expansion(&Partition::row(7)),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn json_dump() {
        let v = schur_expansion(&partition![2]).unwrap().to_json();
        assert_eq!(v["coefficients"]["(2)"]["num"], "1");
        assert_eq!(v["coefficients"]["(2)"]["den"], "2");
        assert_eq!(v["degree"], 2);
    }

    #[test]
    fn arithmetic_cancels() {
        let p = PowerSumPolynomial::power_sum(&partition![2]);
        assert!((&p - &p).is_zero());
        assert_eq!(-&(-&p), p);
    }
}
