//! Integer partitions and the small combinatorial statistics built on them.
//!
//! A [`Partition`] is stored as its explicit list of parts. Enumeration order
//! is reverse-lexicographic: `(4), (3,1), (2,2), (2,1,1), (1,1,1,1)`. This is
//! a linear extension of the dominance order read from the top down, which
//! the Gram–Schmidt construction in [`crate::symfun`] relies on.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest weight the enumeration helpers are intended for.
pub const MAX_WEIGHT: usize = 20;

/// A weakly decreasing sequence of positive integers.
///
/// The derived `Ord` is lexicographic on the parts, so sorting a list of
/// partitions of the same weight ascending gives the reverse of the canonical
/// enumeration order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    /// Builds a partition, rejecting zero parts or increasing sequences.
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.iter().any(|&p| p == 0) {
            return Err(Error::Parse(format!("zero part in {parts:?}")));
        }
        if !parts.windows(2).all(|w| w[0] >= w[1]) {
            return Err(Error::Parse(format!("parts not weakly decreasing: {parts:?}")));
        }
        Ok(Partition { parts })
    }

    /// Sorts the given positive integers into a partition.
    pub fn from_unsorted(mut parts: Vec<usize>) -> Result<Self> {
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition::new(parts)
    }

    pub fn empty() -> Self {
        Partition { parts: Vec::new() }
    }

    /// The one-row partition `(k)`; empty for `k = 0`.
    pub fn row(k: usize) -> Self {
        if k == 0 {
            Partition::empty()
        } else {
            Partition { parts: vec![k] }
        }
    }

    /// The one-column partition `(1^k)`.
    pub fn column(k: usize) -> Self {
        Partition { parts: vec![1; k] }
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn weight(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn length(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Part `i` (0-based), or 0 past the end.
    pub fn part(&self, i: usize) -> usize {
        self.parts.get(i).copied().unwrap_or(0)
    }

    /// Multiplicity `m_j` of every part value that occurs.
    pub fn multiplicities(&self) -> BTreeMap<usize, usize> {
        let mut m = BTreeMap::new();
        for &p in &self.parts {
            *m.entry(p).or_insert(0) += 1;
        }
        m
    }

    /// Transposed Young diagram.
    pub fn conjugate(&self) -> Partition {
        let cols = self.part(0);
        let parts = (1..=cols)
            .map(|j| self.parts.iter().take_while(|&&p| p >= j).count())
            .collect();
        Partition { parts }
    }

    /// Every row doubled in length.
    pub fn double(&self) -> Partition {
        Partition {
            parts: self.parts.iter().map(|p| 2 * p).collect(),
        }
    }

    /// `Some(κ)` when every part is even and `self = 2κ`.
    pub fn halve(&self) -> Option<Partition> {
        if self.parts.iter().all(|p| p % 2 == 0) {
            Some(Partition {
                parts: self.parts.iter().map(|p| p / 2).collect(),
            })
        } else {
            None
        }
    }

    /// Hook length of cell `(i, j)` (0-based row, column).
    pub fn hook_length(&self, i: usize, j: usize) -> usize {
        let arm = self.parts[i] - j - 1;
        let leg = self.parts[i + 1..].iter().take_while(|&&p| p > j).count();
        arm + leg + 1
    }

    /// Cells `(i, j)` of the Young diagram, 0-based, row by row.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.parts
            .iter()
            .enumerate()
            .flat_map(|(i, &p)| (0..p).map(move |j| (i, j)))
    }

    /// Product of hook lengths over all cells. Fits in `u64` for `|λ| ≤ 20`.
    pub fn hook_product(&self) -> u64 {
        self.cells()
            .map(|(i, j)| self.hook_length(i, j) as u64)
            .product()
    }

    /// `z_ρ = ∏_j j^{m_j} m_j!`, the centralizer order of cycle type `ρ`.
    pub fn cycle_constant(&self) -> u64 {
        self.multiplicities()
            .into_iter()
            .map(|(j, m)| (j as u64).pow(m as u32) * factorial(m))
            .product()
    }

    /// Sign of a permutation of this cycle type, `(-1)^{|ρ| - ℓ(ρ)}`.
    pub fn sign(&self) -> i64 {
        if (self.weight() - self.length()) % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// Whether `self` dominates `other` (same weight assumed).
    pub fn dominates(&self, other: &Partition) -> bool {
        let len = self.length().max(other.length());
        let mut a = 0;
        let mut b = 0;
        for i in 0..len {
            a += self.part(i);
            b += other.part(i);
            if a < b {
                return false;
            }
        }
        true
    }

    /// Dimension of the corresponding irreducible of `S_|λ|`, via the hook formula.
    pub fn dimension(&self) -> u64 {
        factorial(self.weight()) / self.hook_product()
    }
}

pub fn factorial(k: usize) -> u64 {
    (1..=k as u64).product()
}

/// All partitions of `k` in reverse-lexicographic order.
pub fn gen_partitions(k: usize) -> Vec<Partition> {
    fn rec(remaining: usize, max_part: usize, prefix: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if remaining == 0 {
            out.push(Partition {
                parts: prefix.clone(),
            });
            return;
        }
        for p in (1..=remaining.min(max_part)).rev() {
            prefix.push(p);
            rec(remaining - p, p, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(k, k, &mut Vec::new(), &mut out);
    out
}

/// All partitions of every weight `0..=k`, grouped by weight.
pub fn gen_partitions_upto(k: usize) -> Vec<Partition> {
    (0..=k).flat_map(gen_partitions).collect()
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Partition {
    type Err = Error;

    /// Accepts `(4,2,1)`, `4,2,1`, `4 2 1`, `()` and the empty string.
    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        let parts = inner
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|e| Error::Parse(format!("bad part `{t}`: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Partition::new(parts)
    }
}

impl TryFrom<Vec<usize>> for Partition {
    type Error = Error;
    fn try_from(parts: Vec<usize>) -> Result<Self> {
        Partition::new(parts)
    }
}

impl From<Partition> for Vec<usize> {
    fn from(p: Partition) -> Self {
        p.parts
    }
}

/// Shorthand for literal partitions in tests and tables; panics on invalid input.
#[macro_export]
macro_rules! partition {
    () => { $crate::partitions::Partition::empty() };
    ($($p:expr),+ $(,)?) => {
        $crate::partitions::Partition::new(vec![$($p),+]).expect("valid partition literal")
    };
}
