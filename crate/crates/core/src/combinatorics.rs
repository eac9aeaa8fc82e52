//! Restricted set-partition counts and coefficient masses.
//!
//! The coefficient of every bound is a *coefficient mass*
//! `Σ_π (|π| − 1)!` taken over the partitions of `{1, …, n}` whose blocks are
//! all admissible for a [`PartitionClass`]. Counts are produced by the
//! block-of-the-last-element convolution
//!
//! ```text
//! T(n, k) = Σ_{admissible j} C(n − 1, j − 1) · T(n − j, k − 1),   T(0, 0) = 1
//! ```
//!
//! which covers all three classes uniformly. Enumeration ([`enumerate_partitions`])
//! is kept as a brute-force oracle and is capped at a configurable order.

use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, RwLock};

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Default cap on the order accepted by [`enumerate_partitions`]. `Bell(12)` is
/// about 4.2 million partitions.
pub const DEFAULT_ENUMERATION_LIMIT: usize = 12;

/// Which block sizes a partition may use.
///
/// `All` backs the raw-moment bound, `NoSingletons` (blocks of size ≥ 2) the
/// central-moment bound, and `EvenBlocks` (blocks of even size) the bound for
/// symmetric laws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PartitionClass {
    All,
    NoSingletons,
    EvenBlocks,
}

impl PartitionClass {
    pub const ALL: [PartitionClass; 3] = [
        PartitionClass::All,
        PartitionClass::NoSingletons,
        PartitionClass::EvenBlocks,
    ];

    /// Whether a block of `size` elements is allowed.
    pub fn admits_block(self, size: usize) -> bool {
        match self {
            PartitionClass::All => size >= 1,
            PartitionClass::NoSingletons => size >= 2,
            PartitionClass::EvenBlocks => size >= 2 && size.is_multiple_of(2),
        }
    }

    /// Short name used on the command line and in output (`raw`, `cen`, `sym`).
    pub fn short_name(self) -> &'static str {
        match self {
            PartitionClass::All => "raw",
            PartitionClass::NoSingletons => "cen",
            PartitionClass::EvenBlocks => "sym",
        }
    }

    fn index(self) -> usize {
        match self {
            PartitionClass::All => 0,
            PartitionClass::NoSingletons => 1,
            PartitionClass::EvenBlocks => 2,
        }
    }
}

impl fmt::Display for PartitionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            PartitionClass::All => "raw (all partitions)",
            PartitionClass::NoSingletons => "centered (no singletons)",
            PartitionClass::EvenBlocks => "symmetric (even blocks)",
        };
        f.write_str(name)
    }
}

impl FromStr for PartitionClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "raw" | "all" => Ok(PartitionClass::All),
            "cen" | "centered" | "no-singletons" => Ok(PartitionClass::NoSingletons),
            "sym" | "symmetric" | "even" => Ok(PartitionClass::EvenBlocks),
            other => Err(Error::InvalidParameter(format!(
                "unknown partition class `{other}`"
            ))),
        }
    }
}

/// `n!` as a big integer.
pub fn factorial(n: usize) -> BigUint {
    (1..=n as u64).fold(BigUint::one(), |acc, k| acc * k)
}

/// Binomial coefficient `C(n, k)`, zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= (n - i) as u64;
        acc /= (i + 1) as u64;
    }
    acc
}

/// Stirling number of the second kind via `S(n,k) = S(n−1,k−1) + k·S(n−1,k)`.
pub fn stirling2(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    if n == 0 {
        return BigUint::one();
    }
    if k == 0 {
        return BigUint::zero();
    }
    let mut row = vec![BigUint::zero(); k + 1];
    row[0] = BigUint::one();
    for i in 1..=n {
        for j in (1..=k.min(i)).rev() {
            let prev = std::mem::take(&mut row[j]);
            row[j] = &row[j - 1] + prev * j as u64;
        }
        row[0] = BigUint::zero();
    }
    row[k].clone()
}

/// Ordered Bell (Fubini) number `Σ_k S(m,k)·k!`.
pub fn ordered_bell(m: usize) -> BigUint {
    (0..=m).map(|k| stirling2(m, k) * factorial(k)).sum()
}

/// Ordinary Bell number `B_n = Σ_k S(n,k)`, the number of partitions of `[n]`.
pub fn bell_ordinary(n: usize) -> BigUint {
    (0..=n).map(|k| stirling2(n, k)).sum()
}

/// `B_n^{(0)}`, the number of partitions of `[n]` without singleton blocks.
pub fn no_singleton_bell(n: usize) -> BigUint {
    let table = PartitionCounts::shared(PartitionClass::NoSingletons, n);
    (0..=n).map(|k| table.count(n, k).clone()).sum()
}

/// Number of partitions of `[n]` into `k` blocks, all admissible for `class`.
pub fn count_restricted(class: PartitionClass, n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    PartitionCounts::shared(class, n).count(n, k).clone()
}

/// Coefficient mass `Σ_k T(n,k)·(k − 1)!` of the class at order `n`.
///
/// Equals `2·Bell(n − 1)` for `All` and `n ≥ 2`; the `All` value at `n = 1`
/// is `1`. Order zero has no non-empty partition and yields zero.
pub fn coefficient_mass(class: PartitionClass, n: usize) -> BigUint {
    if n == 0 {
        return BigUint::zero();
    }
    PartitionCounts::shared(class, n).mass(n).clone()
}

/// No-singleton counts from the two-term recurrence
/// `T(n,k) = k·T(n−1,k) + (n−1)·T(n−2,k−1)`.
///
/// Element `n` either joins one of the `k` blocks of a no-singleton partition
/// of `[n−1]`, or it forms a pair with one of the other `n − 1` elements that
/// is then removed. Kept as an independent route to the convolution table.
pub fn no_singleton_count_two_term(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    // rows[i][j] = T(i, j)
    let mut rows: Vec<Vec<BigUint>> = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let mut row = vec![BigUint::zero(); i + 1];
        if i == 0 {
            row[0] = BigUint::one();
        }
        for (j, slot) in row.iter_mut().enumerate().skip(1) {
            let mut value = BigUint::zero();
            if i >= 1 && j < i {
                value += &rows[i - 1][j] * j as u64;
            }
            if i >= 2 && j - 1 <= i - 2 {
                value += &rows[i - 2][j - 1] * (i - 1) as u64;
            }
            *slot = value;
        }
        rows.push(row);
    }
    rows[n][k].clone()
}

/// Dense triangular table of `T(n, k)` for one class with the derived masses.
///
/// Built once and then only read; [`PartitionCounts::shared`] hands out a
/// process-wide copy that grows when a larger order is requested.
#[derive(Debug)]
pub struct PartitionCounts {
    class: PartitionClass,
    max_order: usize,
    counts: Vec<Vec<BigUint>>,
    masses: Vec<BigUint>,
}

static SHARED: [RwLock<Option<Arc<PartitionCounts>>>; 3] =
    [RwLock::new(None), RwLock::new(None), RwLock::new(None)];

impl PartitionCounts {
    pub fn build(class: PartitionClass, max_order: usize) -> Self {
        let binomials = pascal_rows(max_order);
        let mut counts: Vec<Vec<BigUint>> = Vec::with_capacity(max_order + 1);
        counts.push(vec![BigUint::one()]);
        for n in 1..=max_order {
            let mut row = vec![BigUint::zero(); n + 1];
            for j in (1..=n).filter(|&j| class.admits_block(j)) {
                let ways = &binomials[n - 1][j - 1];
                let rest = &counts[n - j];
                for (k, value) in rest.iter().enumerate() {
                    if !value.is_zero() {
                        row[k + 1] += ways * value;
                    }
                }
            }
            counts.push(row);
        }

        let factorials: Vec<BigUint> = {
            let mut f = vec![BigUint::one()];
            for k in 1..=max_order {
                let next = &f[k - 1] * k as u64;
                f.push(next);
            }
            f
        };
        let masses = counts
            .iter()
            .enumerate()
            .map(|(n, row)| {
                if n == 0 {
                    return BigUint::zero();
                }
                row.iter()
                    .enumerate()
                    .skip(1)
                    .map(|(k, t)| t * &factorials[k - 1])
                    .sum()
            })
            .collect();

        PartitionCounts {
            class,
            max_order,
            counts,
            masses,
        }
    }

    /// A shared table covering at least `max_order`.
    pub fn shared(class: PartitionClass, max_order: usize) -> Arc<PartitionCounts> {
        let slot = &SHARED[class.index()];
        if let Some(table) = slot.read().expect("partition table lock").as_ref() {
            if table.max_order >= max_order {
                return Arc::clone(table);
            }
        }
        let mut guard = slot.write().expect("partition table lock");
        if let Some(table) = guard.as_ref() {
            if table.max_order >= max_order {
                return Arc::clone(table);
            }
        }
        // grow geometrically so that sweeps over n do not rebuild every step
        let target = max_order
            .max(guard.as_ref().map_or(0, |t| t.max_order * 2))
            .max(16);
        let table = Arc::new(PartitionCounts::build(class, target));
        *guard = Some(Arc::clone(&table));
        table
    }

    pub fn class(&self) -> PartitionClass {
        self.class
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn count(&self, n: usize, k: usize) -> &BigUint {
        &self.counts[n][k]
    }

    pub fn mass(&self, n: usize) -> &BigUint {
        &self.masses[n]
    }
}

fn pascal_rows(max: usize) -> Vec<Vec<BigUint>> {
    let mut rows: Vec<Vec<BigUint>> = Vec::with_capacity(max + 1);
    for n in 0..=max {
        let mut row = vec![BigUint::one(); n + 1];
        for k in 1..n {
            row[k] = &rows[n - 1][k - 1] + &rows[n - 1][k];
        }
        rows.push(row);
    }
    rows
}

/// How a [`CoefficientTable`] was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Recurrence,
    EgfSeries,
    BruteForce,
}

/// Coefficient masses `C_1 … C_N` of one class.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTable {
    class: PartitionClass,
    // values[n - 1] = C_n
    values: Vec<BigUint>,
    provenance: Provenance,
}

impl CoefficientTable {
    /// Wraps precomputed values `C_1 … C_N`.
    pub fn new(class: PartitionClass, values: Vec<BigUint>, provenance: Provenance) -> Self {
        CoefficientTable {
            class,
            values,
            provenance,
        }
    }

    pub fn from_recurrence(class: PartitionClass, max_order: usize) -> Self {
        let table = PartitionCounts::shared(class, max_order);
        let values = (1..=max_order).map(|n| table.mass(n).clone()).collect();
        Self::new(class, values, Provenance::Recurrence)
    }

    /// Sums `(|π| − 1)!` over enumerated partitions; capped by the enumeration limit.
    pub fn from_enumeration(class: PartitionClass, max_order: usize) -> Result<Self> {
        let mut values = Vec::with_capacity(max_order);
        for n in 1..=max_order {
            let mut mass: u128 = 0;
            for partition in enumerate_partitions(n, class)? {
                mass += factorial_u128(partition.len() - 1);
            }
            values.push(BigUint::from(mass));
        }
        Ok(Self::new(class, values, Provenance::BruteForce))
    }

    pub fn class(&self) -> PartitionClass {
        self.class
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn max_order(&self) -> usize {
        self.values.len()
    }

    /// `C_n`, or `None` outside `1..=max_order`.
    pub fn get(&self, n: usize) -> Option<&BigUint> {
        n.checked_sub(1).and_then(|i| self.values.get(i))
    }

    /// `(n, C_n)` pairs in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, &BigUint)> {
        self.values.iter().enumerate().map(|(i, v)| (i + 1, v))
    }

    /// True when both tables hold the same class and agree on every shared order.
    pub fn agrees_with(&self, other: &CoefficientTable) -> bool {
        self.class == other.class && self.values.iter().zip(&other.values).all(|(a, b)| a == b)
    }
}

fn factorial_u128(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// A set partition of `{0, …, n − 1}`, blocks ordered by their smallest element.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SetPartition {
    blocks: Vec<Vec<usize>>,
}

impl SetPartition {
    /// Validates that `blocks` are nonempty, disjoint and cover `0..n`.
    pub fn new(n: usize, mut blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; n];
        for block in &mut blocks {
            if block.is_empty() {
                return Err(Error::InvalidParameter("empty block".into()));
            }
            block.sort_unstable();
            for &e in block.iter() {
                if e >= n || seen[e] {
                    return Err(Error::InvalidParameter(format!(
                        "element {e} out of range or repeated"
                    )));
                }
                seen[e] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidParameter(
                "blocks do not cover the ground set".into(),
            ));
        }
        blocks.sort_unstable_by_key(|b| b[0]);
        Ok(SetPartition { blocks })
    }

    fn from_labels(labels: &[usize], block_count: usize) -> Self {
        let mut blocks = vec![Vec::new(); block_count];
        for (element, &label) in labels.iter().enumerate() {
            blocks[label].push(element);
        }
        SetPartition { blocks }
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// Number of blocks `|π|`.
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn block_sizes(&self) -> impl Iterator<Item = usize> + '_ {
        self.blocks.iter().map(Vec::len)
    }
}

/// Enumerates the admissible partitions of `[n]` under the default limit.
pub fn enumerate_partitions(n: usize, class: PartitionClass) -> Result<PartitionIter> {
    enumerate_partitions_with_limit(n, class, DEFAULT_ENUMERATION_LIMIT)
}

pub fn enumerate_partitions_with_limit(
    n: usize,
    class: PartitionClass,
    limit: usize,
) -> Result<PartitionIter> {
    if n > limit {
        return Err(Error::EnumerationLimit { n, limit });
    }
    Ok(PartitionIter {
        n,
        class,
        labels: vec![0; n],
        sizes: Vec::with_capacity(n),
        state: IterState::Fresh,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum IterState {
    Fresh,
    Running,
    Done,
}

/// Backtracking generator over restricted-growth label strings.
///
/// A prefix is only extended while it can still be completed to an admissible
/// partition, so restricted classes do not pay for the full Bell count.
#[derive(Debug, Clone)]
pub struct PartitionIter {
    n: usize,
    class: PartitionClass,
    labels: Vec<usize>,
    sizes: Vec<usize>,
    state: IterState,
}

impl PartitionIter {
    fn completable(&self, remaining: usize) -> bool {
        match self.class {
            PartitionClass::All => true,
            PartitionClass::NoSingletons => {
                self.sizes.iter().filter(|&&s| s == 1).count() <= remaining
            }
            PartitionClass::EvenBlocks => {
                let odd = self.sizes.iter().filter(|&&s| s % 2 == 1).count();
                odd <= remaining && (remaining - odd).is_multiple_of(2)
            }
        }
    }

    fn assign(&mut self, pos: usize, label: usize) {
        if label == self.sizes.len() {
            self.sizes.push(0);
        }
        self.sizes[label] += 1;
        self.labels[pos] = label;
    }

    fn unassign(&mut self, pos: usize) -> usize {
        let label = self.labels[pos];
        self.sizes[label] -= 1;
        if self.sizes[label] == 0 {
            self.sizes.pop();
        }
        label
    }

    fn try_labels(&mut self, pos: usize, start: usize) -> bool {
        let remaining = self.n - pos - 1;
        let mut label = start;
        while label <= self.sizes.len() {
            self.assign(pos, label);
            if self.completable(remaining) {
                return true;
            }
            self.unassign(pos);
            label += 1;
        }
        false
    }

    // positions < pos are assigned; find the next complete assignment
    fn advance(&mut self, mut pos: usize, mut start: usize) -> bool {
        loop {
            if pos == self.n {
                return true;
            }
            if self.try_labels(pos, start) {
                pos += 1;
                start = 0;
            } else {
                if pos == 0 {
                    return false;
                }
                pos -= 1;
                start = self.unassign(pos) + 1;
            }
        }
    }
}

impl Iterator for PartitionIter {
    type Item = SetPartition;

    fn next(&mut self) -> Option<SetPartition> {
        let found = match self.state {
            IterState::Done => return None,
            IterState::Fresh => {
                self.state = IterState::Running;
                self.advance(0, 0)
            }
            IterState::Running => {
                if self.n == 0 {
                    false
                } else {
                    let last = self.n - 1;
                    let label = self.unassign(last);
                    self.advance(last, label + 1)
                }
            }
        };
        if found {
            Some(SetPartition::from_labels(&self.labels, self.sizes.len()))
        } else {
            self.state = IterState::Done;
            None
        }
    }
}
