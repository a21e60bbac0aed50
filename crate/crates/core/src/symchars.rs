//! Irreducible characters of the symmetric group.
//!
//! Values `χ^λ_ρ` come from the Murnaghan–Nakayama rule. Border strips are
//! removed on the beta-set (first-column hook lengths) of `λ`: taking a strip
//! of size `r` off `λ` is the same as lowering one bead `β` to `β - r` when
//! that position is free, with sign `(-1)^{#beads strictly between}`.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::partitions::{factorial, gen_partitions, Partition};

/// Largest `k` for which full tables are built.
pub const MAX_TABLE_WEIGHT: usize = 10;

#[derive(Default)]
struct Memo {
    cache: HashMap<(Partition, Partition), i64>,
}

impl Memo {
    fn character(&mut self, shape: &Partition, cycle_type: &Partition) -> i64 {
        if cycle_type.is_empty() {
            return if shape.is_empty() { 1 } else { 0 };
        }
        let key = (shape.clone(), cycle_type.clone());
        if let Some(&v) = self.cache.get(&key) {
            return v;
        }
        let r = cycle_type.part(0);
        let rest = Partition::new(cycle_type.parts()[1..].to_vec()).expect("suffix of a partition");
        let mut total = 0;
        for (smaller, sign) in remove_border_strips(shape, r) {
            total += sign * self.character(&smaller, &rest);
        }
        self.cache.insert(key, total);
        total
    }
}

/// Every partition obtained from `shape` by removing a border strip of size
/// `r`, paired with `(-1)^{height}` of that strip.
fn remove_border_strips(shape: &Partition, r: usize) -> Vec<(Partition, i64)> {
    let len = shape.length();
    let beta: Vec<usize> = (0..len).map(|i| shape.part(i) + (len - 1 - i)).collect();
    let mut out = Vec::new();
    for (idx, &b) in beta.iter().enumerate() {
        if b < r {
            continue;
        }
        let target = b - r;
        if beta.contains(&target) {
            continue;
        }
        let between = beta.iter().filter(|&&x| x > target && x < b).count();
        let sign = if between % 2 == 0 { 1 } else { -1 };
        let mut next = beta.clone();
        next[idx] = target;
        next.sort_unstable_by(|a, b| b.cmp(a));
        let m = next.len();
        let parts: Vec<usize> = next
            .iter()
            .enumerate()
            .map(|(i, &x)| x - (m - 1 - i))
            .filter(|&p| p > 0)
            .collect();
        out.push((Partition::new(parts).expect("beta-set decodes to a partition"), sign));
    }
    out
}

/// `χ^λ_ρ`, the irreducible character `λ` evaluated on cycle type `ρ`.
pub fn character(shape: &Partition, cycle_type: &Partition) -> Result<i64> {
    if shape.weight() != cycle_type.weight() {
        return Err(Error::WeightMismatch(shape.weight(), cycle_type.weight()));
    }
    Ok(Memo::default().character(shape, cycle_type))
}

/// Full character table of `S_k`, rows indexed by shape and columns by cycle
/// type, both in the canonical enumeration order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharacterTable {
    k: usize,
    partitions: Vec<Partition>,
    index: HashMap<Partition, usize>,
    entries: Vec<Vec<i64>>,
}

/// Builds the character table of `S_k` for `1 ≤ k ≤ 10`.
pub fn char_table(k: usize) -> Result<CharacterTable> {
    if k == 0 || k > MAX_TABLE_WEIGHT {
        return Err(Error::Capacity {
            what: "character table weight",
            got: k,
            max: MAX_TABLE_WEIGHT,
        });
    }
    let partitions = gen_partitions(k);
    let mut memo = Memo::default();
    let entries = partitions
        .iter()
        .map(|l| partitions.iter().map(|r| memo.character(l, r)).collect())
        .collect();
    let index = partitions
        .iter()
        .enumerate()
        .map(|(i, p)| (p.clone(), i))
        .collect();
    Ok(CharacterTable {
        k,
        partitions,
        index,
        entries,
    })
}

impl CharacterTable {
    pub fn weight(&self) -> usize {
        self.k
    }

    pub fn partitions(&self) -> &[Partition] {
        &self.partitions
    }

    pub fn get(&self, shape: &Partition, cycle_type: &Partition) -> Option<i64> {
        let i = *self.index.get(shape)?;
        let j = *self.index.get(cycle_type)?;
        Some(self.entries[i][j])
    }

    pub fn row(&self, shape: &Partition) -> Option<&[i64]> {
        self.index.get(shape).map(|&i| self.entries[i].as_slice())
    }

    /// `∑_ρ χ^λ_ρ χ^μ_ρ / z_ρ = δ_{λμ}` for every pair, checked as the integer
    /// identity `∑_ρ (k!/z_ρ) χ^λ_ρ χ^μ_ρ = δ_{λμ} k!`.
    pub fn rows_orthonormal(&self) -> bool {
        let kf = factorial(self.k) as i128;
        let class_sizes: Vec<i128> = self
            .partitions
            .iter()
            .map(|r| kf / r.cycle_constant() as i128)
            .collect();
        (0..self.partitions.len()).all(|a| {
            (0..self.partitions.len()).all(|b| {
                let s: i128 = (0..self.partitions.len())
                    .map(|c| {
                        class_sizes[c] * self.entries[a][c] as i128 * self.entries[b][c] as i128
                    })
                    .sum();
                s == if a == b { kf } else { 0 }
            })
        })
    }

    /// `∑_λ χ^λ_ρ χ^λ_σ = δ_{ρσ} z_ρ`.
    pub fn columns_orthogonal(&self) -> bool {
        let m = self.partitions.len();
        (0..m).all(|c| {
            (0..m).all(|d| {
                let s: i128 = (0..m)
                    .map(|a| self.entries[a][c] as i128 * self.entries[a][d] as i128)
                    .sum();
                s == if c == d {
                    self.partitions[c].cycle_constant() as i128
                } else {
                    0
                }
            })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition;

    #[test]
    fn values_quoted_for_s4() {
        let t = char_table(4).unwrap();
        let four = partition![4];
        let two_two = partition![2, 2];
        assert_eq!(t.get(&four, &two_two), Some(1));
        assert_eq!(t.get(&two_two, &two_two), Some(2));
        assert_eq!(t.get(&four, &partition![1, 1, 1, 1]), Some(1));
        assert_eq!(t.get(&two_two, &partition![1, 1, 1, 1]), Some(2));
        assert_eq!(t.get(&four, &partition![2, 1, 1]), Some(1));
        assert_eq!(t.get(&two_two, &partition![2, 1, 1]), Some(0));
        assert_eq!(character(&two_two, &two_two), Ok(2));
    }

    #[test]
    fn small_tables() {
        let t1 = char_table(1).unwrap();
        assert_eq!(t1.get(&partition![1], &partition![1]), Some(1));
        let t2 = char_table(2).unwrap();
        assert_eq!(t2.get(&partition![2], &partition![2]), Some(1));
        assert_eq!(t2.get(&partition![2], &partition![1, 1]), Some(1));
        assert_eq!(t2.get(&partition![1, 1], &partition![2]), Some(-1));
        assert_eq!(t2.get(&partition![1, 1], &partition![1, 1]), Some(1));
    }

    #[test]
    fn s3_table_by_hand() {
        // rows (3),(2,1),(1,1,1); columns (3),(2,1),(1,1,1)
        let t = char_table(3).unwrap();
        let rows: Vec<Vec<i64>> = t
            .partitions()
            .iter()
            .map(|l| t.row(l).unwrap().to_vec())
            .collect();
        assert_eq!(rows, vec![vec![1, 1, 1], vec![-1, 0, 2], vec![1, -1, 1]]);
    }

    #[test]
    fn errors() {
        assert_eq!(
            character(&partition![2], &partition![1]),
            Err(Error::WeightMismatch(2, 1))
        );
        assert!(matches!(char_table(0), Err(Error::Capacity { .. })));
        assert!(matches!(char_table(11), Err(Error::Capacity { .. })));
    }

    #[test]
    fn orthogonality_and_dimensions() {
        for k in 1..=8 {
            let t = char_table(k).unwrap();
            assert!(t.rows_orthonormal(), "rows k={k}");
            assert!(t.columns_orthogonal(), "columns k={k}");
            let identity = Partition::column(k);
            for l in t.partitions() {
                assert_eq!(t.get(l, &identity).unwrap(), l.dimension() as i64, "{l}");
                for r in t.partitions() {
                    assert_eq!(
                        t.get(&l.conjugate(), r).unwrap(),
                        r.sign() * t.get(l, r).unwrap(),
                        "conjugate {l} at {r}"
                    );
                }
            }
        }
    }

    #[test]
    fn table_ten_builds() {
        let t = char_table(10).unwrap();
        assert_eq!(t.partitions().len(), 42);
        assert!(t.rows_orthonormal());
    }
}
