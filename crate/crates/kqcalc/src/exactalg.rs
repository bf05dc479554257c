//! Exact arithmetic of finitely generated abelian groups and integer
//! matrices: Smith normal form, kernels, cokernels, direct sums, Ext groups
//! and extension resolution.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// Canonical form of a finitely generated abelian group: a free rank plus an
/// invariant-factor chain d_1 | d_2 | ... | d_k with every d_i >= 2.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FGAbGroup {
    pub free_rank: usize,
    pub invariant_factors: Vec<BigUint>,
}

impl FGAbGroup {
    pub fn trivial() -> Self {
        FGAbGroup { free_rank: 0, invariant_factors: Vec::new() }
    }

    pub fn free(rank: usize) -> Self {
        FGAbGroup { free_rank: rank, invariant_factors: Vec::new() }
    }

    pub fn z() -> Self {
        Self::free(1)
    }

    /// Cyclic group of order n; n = 0 is rejected, n = 1 is the trivial group.
    pub fn cyclic(n: u64) -> Self {
        assert!(n > 0, "cyclic group order must be positive");
        Self::cyclic_big(BigUint::from(n))
    }

    pub fn cyclic_big(n: BigUint) -> Self {
        assert!(!n.is_zero(), "cyclic group order must be positive");
        if n.is_one() {
            Self::trivial()
        } else {
            FGAbGroup { free_rank: 0, invariant_factors: vec![n] }
        }
    }

    /// (Z/2)^k and friends.
    pub fn elementary(p: u64, k: usize) -> Self {
        FGAbGroup { free_rank: 0, invariant_factors: vec![BigUint::from(p); k] }
    }

    /// Builds the canonical form from an arbitrary list of cyclic orders
    /// (zero entries are not allowed; ones are dropped).
    pub fn from_orders(orders: &[BigUint]) -> Self {
        let n = orders.len();
        let mut m = IntMatrix::zero(n, n);
        for (i, d) in orders.iter().enumerate() {
            m.set(i, i, BigInt::from(d.clone()));
        }
        cokernel(&m)
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.invariant_factors.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    /// Order of the torsion subgroup.
    pub fn torsion_order(&self) -> BigUint {
        self.invariant_factors.iter().fold(BigUint::one(), |acc, d| acc * d)
    }

    /// Total order; None when infinite.
    pub fn order(&self) -> Option<BigUint> {
        if self.free_rank > 0 {
            None
        } else {
            Some(self.torsion_order())
        }
    }

    pub fn exponent(&self) -> Option<BigUint> {
        if self.free_rank > 0 {
            return None;
        }
        Some(self.invariant_factors.last().cloned().unwrap_or_else(BigUint::one))
    }

    /// Primary decomposition, for display: map p -> exponents of the cyclic
    /// p-power factors, descending.
    pub fn primary_decomposition(&self) -> BTreeMap<BigUint, Vec<u32>> {
        let mut out: BTreeMap<BigUint, Vec<u32>> = BTreeMap::new();
        for d in &self.invariant_factors {
            for (p, e) in factorize(d) {
                out.entry(p).or_default().push(e);
            }
        }
        for exps in out.values_mut() {
            exps.sort_unstable_by(|a, b| b.cmp(a));
        }
        out
    }

    /// Canonical text form, e.g. "Z^2 + Z/2 + Z/12"; "0" when trivial.
    pub fn text(&self) -> String {
        if self.is_trivial() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{}", r)),
        }
        for d in &self.invariant_factors {
            parts.push(format!("Z/{}", d));
        }
        parts.join(" + ")
    }

    /// Parses the canonical text form produced by [`FGAbGroup::text`].
    pub fn parse(s: &str) -> Result<Self, ExactAlgError> {
        let s = s.trim();
        if s == "0" {
            return Ok(Self::trivial());
        }
        let mut free_rank = 0usize;
        let mut orders: Vec<BigUint> = Vec::new();
        for part in s.split('+') {
            let part = part.trim();
            if part == "Z" {
                free_rank += 1;
            } else if let Some(r) = part.strip_prefix("Z^") {
                free_rank += r
                    .trim()
                    .parse::<usize>()
                    .map_err(|_| ExactAlgError::BadGroupLiteral(s.to_string()))?;
            } else if let Some(d) = part.strip_prefix("Z/") {
                let n: BigUint = d
                    .trim()
                    .parse()
                    .map_err(|_| ExactAlgError::BadGroupLiteral(s.to_string()))?;
                if n.is_zero() {
                    return Err(ExactAlgError::BadGroupLiteral(s.to_string()));
                }
                orders.push(n);
            } else {
                return Err(ExactAlgError::BadGroupLiteral(s.to_string()));
            }
        }
        let mut g = Self::from_orders(&orders);
        g.free_rank += free_rank;
        Ok(g)
    }
}

impl fmt::Display for FGAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.text())
    }
}

impl fmt::Debug for FGAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.text())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ExactAlgError {
    #[error("malformed group literal: {0}")]
    BadGroupLiteral(String),
}

/// Dense integer matrix with arbitrary-precision entries, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    pub rows: usize,
    pub cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, entries: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut m = Self::zero(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, v) in row.iter().enumerate() {
                m.set(i, j, BigInt::from(*v));
            }
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = IntMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.entries.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    fn add_multiple_of_row(&mut self, target: usize, source: usize, factor: &BigInt) {
        for j in 0..self.cols {
            let v = self.get(target, j) + factor * self.get(source, j);
            self.set(target, j, v);
        }
    }

    fn add_multiple_of_col(&mut self, target: usize, source: usize, factor: &BigInt) {
        for i in 0..self.rows {
            let v = self.get(i, target) + factor * self.get(i, source);
            self.set(i, target, v);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -self.get(i, j).clone();
            self.set(i, j, v);
        }
    }

    /// Determinant by fraction-free Gaussian elimination (Bareiss).
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut m = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if m.get(k, k).is_zero() {
                let Some(swap) = (k + 1..n).find(|&i| !m.get(i, k).is_zero()) else {
                    return BigInt::zero();
                };
                m.swap_rows(k, swap);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (m.get(i, j) * m.get(k, k) - m.get(i, k) * m.get(k, j)) / &prev;
                    m.set(i, j, v);
                }
            }
            for i in k + 1..n {
                m.set(i, k, BigInt::zero());
            }
            prev = m.get(k, k).clone();
        }
        sign * m.get(n - 1, n - 1).clone()
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[{}x{}]", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Invertible-change-of-basis witnesses for a Smith normal form: U * M * V = D.
#[derive(Clone, Debug)]
pub struct SNFResult {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl SNFResult {
    pub fn diagonal(&self) -> Vec<BigUint> {
        let n = self.d.rows.min(self.d.cols);
        (0..n).map(|i| self.d.get(i, i).magnitude().clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|d| !d.is_zero()).count()
    }
}

/// Smith normal form by row/column reduction with the pivot chosen as the
/// minimal nonzero absolute value (first such entry in row-major order), so
/// the output is deterministic.
pub fn snf(m: &IntMatrix) -> SNFResult {
    let mut a = m.clone();
    let mut u = IntMatrix::identity(m.rows);
    let mut v = IntMatrix::identity(m.cols);
    let n = m.rows.min(m.cols);

    for t in 0..n {
        loop {
            let Some((pi, pj)) = pivot(&a, t) else {
                break;
            };
            a.swap_rows(t, pi);
            u.swap_rows(t, pi);
            a.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let mut dirty = false;
            for i in t + 1..a.rows {
                if !a.get(i, t).is_zero() {
                    let q = -div_round_to_zero(a.get(i, t), a.get(t, t));
                    a.add_multiple_of_row(i, t, &q);
                    u.add_multiple_of_row(i, t, &q);
                    if !a.get(i, t).is_zero() {
                        dirty = true;
                    }
                }
            }
            for j in t + 1..a.cols {
                if !a.get(t, j).is_zero() {
                    let q = -div_round_to_zero(a.get(t, j), a.get(t, t));
                    a.add_multiple_of_col(j, t, &q);
                    v.add_multiple_of_col(j, t, &q);
                    if !a.get(t, j).is_zero() {
                        dirty = true;
                    }
                }
            }
            if dirty {
                continue;
            }
            // Row and column are clean; fix divisibility against the rest.
            if let Some((bi, _)) = non_divisible_entry(&a, t) {
                a.add_multiple_of_row(t, bi, &BigInt::one());
                u.add_multiple_of_row(t, bi, &BigInt::one());
                continue;
            }
            break;
        }
        if a.get(t, t).is_negative() {
            a.negate_row(t);
            u.negate_row(t);
        }
    }
    SNFResult { u, d: a, v }
}

fn pivot(a: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, BigInt)> = None;
    for i in t..a.rows {
        for j in t..a.cols {
            let e = a.get(i, j);
            if e.is_zero() {
                continue;
            }
            let mag = e.abs();
            match &best {
                Some((_, _, m)) if *m <= mag => {}
                _ => best = Some((i, j, mag)),
            }
        }
    }
    best.map(|(i, j, _)| (i, j))
}

fn non_divisible_entry(a: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let p = a.get(t, t).clone();
    if p.is_zero() {
        return None;
    }
    for i in t + 1..a.rows {
        for j in t + 1..a.cols {
            if !(a.get(i, j) % &p).is_zero() {
                return Some((i, j));
            }
        }
    }
    None
}

fn div_round_to_zero(a: &BigInt, b: &BigInt) -> BigInt {
    a / b
}

/// Canonical form of Z^rows / image(M), reading M as a presentation matrix
/// whose columns are relations on the standard generators of Z^rows.
pub fn cokernel(m: &IntMatrix) -> FGAbGroup {
    let s = snf(m);
    let diag = s.diagonal();
    let rank = diag.iter().filter(|d| !d.is_zero()).count();
    let invariant_factors: Vec<BigUint> =
        diag.into_iter().filter(|d| !d.is_zero() && !d.is_one()).collect();
    FGAbGroup { free_rank: m.rows - rank, invariant_factors }
}

/// Kernel of Z^cols -> Z^rows; always free.
pub fn kernel(m: &IntMatrix) -> FGAbGroup {
    let s = snf(m);
    FGAbGroup::free(m.cols - s.rank())
}

/// Canonical direct sum.
pub fn direct_sum(groups: &[FGAbGroup]) -> FGAbGroup {
    let free_rank = groups.iter().map(|g| g.free_rank).sum();
    let orders: Vec<BigUint> =
        groups.iter().flat_map(|g| g.invariant_factors.iter().cloned()).collect();
    let mut g = FGAbGroup::from_orders(&orders);
    g.free_rank = free_rank;
    g
}

/// Ext(B, A) computed through Ext(Z/m, A) = A/mA, Ext(Z, A) = 0 and additivity.
pub fn ext_group(b: &FGAbGroup, a: &FGAbGroup) -> FGAbGroup {
    let mut parts = Vec::new();
    for m in &b.invariant_factors {
        parts.push(quotient_by_multiple(a, m));
    }
    direct_sum(&parts)
}

/// A / mA in canonical form.
fn quotient_by_multiple(a: &FGAbGroup, m: &BigUint) -> FGAbGroup {
    let mut orders: Vec<BigUint> = vec![m.clone(); a.free_rank];
    for d in &a.invariant_factors {
        orders.push(d.gcd(m));
    }
    FGAbGroup::from_orders(&orders)
}

/// How a middle group of a two-step extension 0 -> sub -> X -> quot -> 0 was
/// settled.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Resolution {
    /// Ext(quot, sub) vanished, so X = sub + quot is forced.
    Split,
    /// An entry of the override table decided the group.
    Override { key: String, result: FGAbGroup, citation: String },
    /// The extension is not determined; all realizable middle groups.
    Ambiguous(AmbiguousSet),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AmbiguousSet {
    Candidates(Vec<FGAbGroup>),
    /// Enumeration was skipped (infinite input or above the order cap).
    Unevaluated,
}

/// One extension problem: the subgroup layer, the quotient layer, and a key
/// for looking up an override.
#[derive(Clone, Debug)]
pub struct ExtensionProblem {
    pub sub: FGAbGroup,
    pub quotient: FGAbGroup,
    pub override_key: Option<String>,
}

/// Table of named extension resolutions. Every entry carries the text of the
/// fact that justifies it.
#[derive(Clone, Debug, Default)]
pub struct OverrideTable {
    entries: BTreeMap<String, (FGAbGroup, String)>,
}

impl OverrideTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, key: &str, result: FGAbGroup, citation: &str) {
        self.entries.insert(key.to_string(), (result, citation.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&(FGAbGroup, String)> {
        self.entries.get(key)
    }
}

const AMBIGUOUS_ORDER_CAP: u64 = 1 << 20;

/// Resolves a two-step extension. Rules, in order: split when Ext(quot, sub)
/// vanishes; split off the free part of the quotient; keyed override; else
/// report the realizable middle groups.
pub fn resolve_extension(p: &ExtensionProblem, overrides: &OverrideTable) -> (FGAbGroup, Resolution) {
    // Free part of the quotient always splits off.
    let quot_torsion = FGAbGroup {
        free_rank: 0,
        invariant_factors: p.quotient.invariant_factors.clone(),
    };
    if ext_group(&quot_torsion, &p.sub).is_trivial() {
        return (direct_sum(&[p.sub.clone(), p.quotient.clone()]), Resolution::Split);
    }
    if let Some(key) = &p.override_key {
        if let Some((result, citation)) = overrides.get(key) {
            check_extension_law(&p.sub, &p.quotient, result);
            return (
                result.clone(),
                Resolution::Override {
                    key: key.clone(),
                    result: result.clone(),
                    citation: citation.clone(),
                },
            );
        }
    }
    let candidates = enumerate_middle_groups(&p.sub, &quot_torsion, p.quotient.free_rank);
    (
        direct_sum(&[p.sub.clone(), p.quotient.clone()]),
        Resolution::Ambiguous(candidates),
    )
}

/// Order/rank law every resolution must satisfy.
pub fn check_extension_law(sub: &FGAbGroup, quotient: &FGAbGroup, result: &FGAbGroup) {
    assert_eq!(
        result.free_rank,
        sub.free_rank + quotient.free_rank,
        "extension resolution violates the rank law"
    );
    if sub.is_finite() && quotient.is_finite() {
        assert_eq!(
            result.torsion_order(),
            sub.torsion_order() * quotient.torsion_order(),
            "extension resolution violates the order law"
        );
    }
}

/// All middle groups of extensions of `quot_torsion` (finite) by `sub`, with
/// `free_quot` free summands added back. Realizability of a candidate is
/// checked prime by prime with the Littlewood-Richardson criterion for
/// subgroup/quotient pairs of abelian p-groups.
fn enumerate_middle_groups(
    sub: &FGAbGroup,
    quot_torsion: &FGAbGroup,
    free_quot: usize,
) -> AmbiguousSet {
    if !sub.is_finite() {
        return AmbiguousSet::Unevaluated;
    }
    let cap = BigUint::from(AMBIGUOUS_ORDER_CAP);
    if sub.torsion_order() > cap || quot_torsion.torsion_order() > cap {
        return AmbiguousSet::Unevaluated;
    }
    let sub_primary = sub.primary_decomposition();
    let quot_primary = quot_torsion.primary_decomposition();
    let mut primes: Vec<BigUint> = sub_primary.keys().chain(quot_primary.keys()).cloned().collect();
    primes.sort();
    primes.dedup();

    // Per prime, the realizable partitions.
    let mut per_prime: Vec<(BigUint, Vec<Vec<u32>>)> = Vec::new();
    for p in primes {
        let mu = sub_primary.get(&p).cloned().unwrap_or_default();
        let nu = quot_primary.get(&p).cloned().unwrap_or_default();
        per_prime.push((p.clone(), realizable_partitions(&mu, &nu)));
    }

    let mut results: Vec<FGAbGroup> = vec![FGAbGroup::trivial()];
    for (p, lambdas) in per_prime {
        let mut next = Vec::new();
        for base in &results {
            for lambda in &lambdas {
                let orders: Vec<BigUint> = lambda.iter().map(|e| p.pow(*e)).collect();
                let part = FGAbGroup::from_orders(&orders);
                next.push(direct_sum(&[base.clone(), part]));
            }
        }
        results = next;
    }
    for g in &mut results {
        g.free_rank = free_quot;
    }
    results.sort();
    results.dedup();
    AmbiguousSet::Candidates(results)
}

/// Partitions lambda of |mu| + |nu| with nonzero Littlewood-Richardson
/// coefficient c^lambda_{mu,nu}; these are exactly the p-groups containing a
/// subgroup of type mu with quotient of type nu.
fn realizable_partitions(mu: &[u32], nu: &[u32]) -> Vec<Vec<u32>> {
    let total: u32 = mu.iter().sum::<u32>() + nu.iter().sum::<u32>();
    let mut out = Vec::new();
    let max_part = mu.first().copied().unwrap_or(0) + nu.first().copied().unwrap_or(0);
    let mut current = Vec::new();
    gen_partitions(total, max_part.max(1), &mut current, &mut |lambda| {
        if lr_coefficient_positive(lambda, nu, mu) {
            out.push(lambda.to_vec());
        }
    });
    out
}

fn gen_partitions(remaining: u32, max_part: u32, current: &mut Vec<u32>, emit: &mut impl FnMut(&[u32])) {
    if remaining == 0 {
        emit(current);
        return;
    }
    let hi = remaining.min(max_part);
    for part in (1..=hi).rev() {
        current.push(part);
        gen_partitions(remaining - part, part, current, emit);
        current.pop();
    }
}

/// Tests c^lambda_{mu,nu} > 0 by searching for a Littlewood-Richardson
/// filling of the skew shape lambda/nu with content mu: semistandard rows,
/// strictly increasing columns, and the reading word (right-to-left within
/// each row, rows top to bottom) a lattice word.
fn lr_coefficient_positive(lambda: &[u32], nu: &[u32], mu: &[u32]) -> bool {
    if nu.len() > lambda.len() {
        return false;
    }
    for (i, n) in nu.iter().enumerate() {
        if lambda[i] < *n {
            return false;
        }
    }
    let skew: u32 = lambda.iter().sum::<u32>() - nu.iter().sum::<u32>();
    if skew != mu.iter().sum::<u32>() {
        return false;
    }
    if mu.is_empty() {
        return skew == 0;
    }
    let rows = lambda.len();
    let nu_pad: Vec<u32> = (0..rows).map(|i| nu.get(i).copied().unwrap_or(0)).collect();
    // Cells in reading order: per row, rightmost absolute column first.
    let mut cells: Vec<(usize, u32)> = Vec::new();
    for (row, &lam) in lambda.iter().enumerate() {
        let mut c = lam;
        while c > nu_pad[row] {
            c -= 1;
            cells.push((row, c));
        }
    }
    let mut grid: BTreeMap<(usize, u32), u32> = BTreeMap::new();
    let mut counts = vec![0u32; mu.len()];
    search_lr(&cells, &nu_pad, lambda, mu, &mut grid, &mut counts, 0)
}

fn search_lr(
    cells: &[(usize, u32)],
    nu: &[u32],
    lambda: &[u32],
    mu: &[u32],
    grid: &mut BTreeMap<(usize, u32), u32>,
    counts: &mut Vec<u32>,
    idx: usize,
) -> bool {
    if idx == cells.len() {
        return counts.iter().zip(mu.iter()).all(|(c, m)| *c == *m);
    }
    let (row, col) = cells[idx];
    for value in 1..=(mu.len() as u32) {
        // Entries in row r of a lattice-word tableau never exceed r + 1.
        if value as usize > row + 1 {
            break;
        }
        // Weakly increasing along the row: the right neighbour was placed
        // earlier in reading order.
        if col + 1 < lambda[row] {
            if let Some(&right) = grid.get(&(row, col + 1)) {
                if value > right {
                    continue;
                }
            }
        }
        // Strictly increasing down the column.
        if row > 0 && col >= nu[row - 1] && col < lambda[row - 1] {
            let above = grid[&(row - 1, col)];
            if above >= value {
                continue;
            }
        }
        // Content bound.
        if counts[(value - 1) as usize] + 1 > mu[(value - 1) as usize] {
            continue;
        }
        // Lattice prefix condition at this point of the reading word.
        if value > 1 && counts[(value - 1) as usize] + 1 > counts[(value - 2) as usize] {
            continue;
        }
        grid.insert((row, col), value);
        counts[(value - 1) as usize] += 1;
        if search_lr(cells, nu, lambda, mu, grid, counts, idx + 1) {
            return true;
        }
        counts[(value - 1) as usize] -= 1;
        grid.remove(&(row, col));
    }
    false
}

/// Factorization helper (trial division; inputs here are desk-scale).
pub fn factorize(n: &BigUint) -> Vec<(BigUint, u32)> {
    let mut out = Vec::new();
    let mut n = n.clone();
    if n.is_zero() || n.is_one() {
        return out;
    }
    let mut p = BigUint::from(2u32);
    while &p * &p <= n {
        if (&n % &p).is_zero() {
            let mut e = 0u32;
            while (&n % &p).is_zero() {
                n /= &p;
                e += 1;
            }
            out.push((p.clone(), e));
        }
        p += 1u32;
    }
    if !n.is_one() {
        out.push((n, 1));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_rows(rows)
    }

    #[test]
    fn snf_one_by_one() {
        let s = snf(&m(&[vec![2]]));
        assert_eq!(s.diagonal(), vec![BigUint::from(2u32)]);
        assert_eq!(s.u, IntMatrix::identity(1));
        assert_eq!(s.v, IntMatrix::identity(1));
    }

    #[test]
    fn snf_identity() {
        let s = snf(&IntMatrix::identity(3));
        assert_eq!(s.d, IntMatrix::identity(3));
    }

    // Oracle for the 2x2 example: d1 is the gcd of all entries and d1*d2 the
    // absolute determinant.
    #[test]
    fn snf_two_by_two_oracle() {
        let a = m(&[vec![2, 4], vec![6, 8]]);
        let det = a.determinant().abs();
        assert_eq!(det, BigInt::from(8));
        let s = snf(&a);
        assert_eq!(s.diagonal(), vec![BigUint::from(2u32), BigUint::from(4u32)]);
        assert_eq!(s.u.mul(&a).mul(&s.v), s.d);
    }

    #[test]
    fn snf_transform_identity_holds() {
        let a = m(&[vec![1, -1, 5], vec![0, 2, -3], vec![9, -4, 1], vec![2, 3, 8]]);
        let s = snf(&a);
        assert_eq!(s.u.mul(&a).mul(&s.v), s.d);
        assert_eq!(s.u.determinant().abs(), BigInt::one());
        assert_eq!(s.v.determinant().abs(), BigInt::one());
        let diag = s.diagonal();
        for w in diag.windows(2) {
            if !w[0].is_zero() && !w[1].is_zero() {
                assert!((&w[1] % &w[0]).is_zero(), "divisibility chain broken");
            }
        }
    }

    #[test]
    fn cokernel_examples() {
        assert_eq!(cokernel(&m(&[vec![2]])), FGAbGroup::cyclic(2));
        // diag(2,3): enumeration oracle — Z^2 / <(2,0),(0,3)> has 6 elements,
        // cyclic because gcd(2,3)=1.
        let d23 = cokernel(&m(&[vec![2, 0], vec![0, 3]]));
        assert_eq!(d23, FGAbGroup::cyclic(6));
        assert_eq!(cokernel(&IntMatrix::zero(2, 2)), FGAbGroup::free(2));
    }

    #[test]
    fn cokernel_brute_force_diag_2_3() {
        // Enumerate Z^2 / image(diag(2,3)) over representatives mod 6.
        let mut classes = std::collections::BTreeSet::new();
        for x in 0..6i64 {
            for y in 0..6i64 {
                classes.insert((x.rem_euclid(2), y.rem_euclid(3)));
            }
        }
        assert_eq!(classes.len(), 6);
        // Element (1,1) has order lcm(2,3)=6, so the group is cyclic.
        let mut ord = 0;
        let (mut x, mut y) = (0i64, 0i64);
        loop {
            x = (x + 1).rem_euclid(2);
            y = (y + 1).rem_euclid(3);
            ord += 1;
            if x == 0 && y == 0 {
                break;
            }
        }
        assert_eq!(ord, 6);
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(kernel(&m(&[vec![2]])), FGAbGroup::trivial());
        assert_eq!(kernel(&m(&[vec![1, 1]])), FGAbGroup::z());
        // det != 0 forces injectivity.
        assert_eq!(kernel(&m(&[vec![2, 4], vec![6, 8]])), FGAbGroup::trivial());
    }

    #[test]
    fn direct_sum_examples() {
        assert_eq!(
            direct_sum(&[FGAbGroup::cyclic(2), FGAbGroup::cyclic(3)]),
            FGAbGroup::cyclic(6)
        );
        let g = direct_sum(&[FGAbGroup::z(), FGAbGroup::cyclic(2)]);
        assert_eq!(g.free_rank, 1);
        assert_eq!(g.invariant_factors, vec![BigUint::from(2u32)]);
        let h = direct_sum(&[FGAbGroup::cyclic(4), FGAbGroup::cyclic(6)]);
        assert_eq!(h.invariant_factors, vec![BigUint::from(2u32), BigUint::from(12u32)]);
    }

    #[test]
    fn ext_examples() {
        assert_eq!(ext_group(&FGAbGroup::z(), &FGAbGroup::cyclic(12)), FGAbGroup::trivial());
        assert_eq!(ext_group(&FGAbGroup::cyclic(2), &FGAbGroup::z()), FGAbGroup::cyclic(2));
        assert_eq!(ext_group(&FGAbGroup::cyclic(12), &FGAbGroup::cyclic(2)), FGAbGroup::cyclic(2));
        assert!(ext_group(&FGAbGroup::free(3), &FGAbGroup::cyclic(8)).is_trivial());
    }

    #[test]
    fn resolve_coprime_splits() {
        let p = ExtensionProblem {
            sub: FGAbGroup::cyclic(3),
            quotient: FGAbGroup::cyclic(16),
            override_key: None,
        };
        let (g, r) = resolve_extension(&p, &OverrideTable::new());
        assert_eq!(g, FGAbGroup::cyclic(48));
        assert_eq!(r, Resolution::Split);
    }

    #[test]
    fn resolve_with_override() {
        let mut table = OverrideTable::new();
        table.insert(
            "pi_1-(2)_vtilde0_Z",
            FGAbGroup::cyclic(48),
            "filtration of the third algebraic K-group of the integers, which is cyclic of order 48",
        );
        let p = ExtensionProblem {
            sub: FGAbGroup::cyclic(2),
            quotient: FGAbGroup::cyclic(24),
            override_key: Some("pi_1-(2)_vtilde0_Z".into()),
        };
        let (g, r) = resolve_extension(&p, &table);
        assert_eq!(g, FGAbGroup::cyclic(48));
        assert!(matches!(r, Resolution::Override { .. }));
    }

    #[test]
    fn resolve_ambiguous_two_by_two() {
        let p = ExtensionProblem {
            sub: FGAbGroup::cyclic(2),
            quotient: FGAbGroup::cyclic(2),
            override_key: None,
        };
        let (_, r) = resolve_extension(&p, &OverrideTable::new());
        match r {
            Resolution::Ambiguous(AmbiguousSet::Candidates(c)) => {
                assert_eq!(
                    c,
                    vec![FGAbGroup::elementary(2, 2), FGAbGroup::cyclic(4)]
                );
            }
            other => panic!("expected ambiguity, got {:?}", other),
        }
    }

    #[test]
    fn ambiguous_candidates_order_law() {
        let p = ExtensionProblem {
            sub: FGAbGroup::from_orders(&[BigUint::from(4u32), BigUint::from(2u32)]),
            quotient: FGAbGroup::cyclic(2),
            override_key: None,
        };
        let (_, r) = resolve_extension(&p, &OverrideTable::new());
        let Resolution::Ambiguous(AmbiguousSet::Candidates(c)) = r else {
            panic!("expected candidates");
        };
        assert!(!c.is_empty());
        for g in &c {
            assert_eq!(g.torsion_order(), BigUint::from(16u32));
        }
        // Z/8 contains Z/4 + Z/2? No: its subgroups are cyclic. The LR check
        // must exclude it.
        assert!(!c.contains(&FGAbGroup::cyclic(16)));
        assert!(c.contains(&FGAbGroup::from_orders(&[
            BigUint::from(8u32),
            BigUint::from(2u32)
        ])));
    }

    #[test]
    fn text_roundtrip() {
        for g in [
            FGAbGroup::trivial(),
            FGAbGroup::z(),
            FGAbGroup::free(2),
            FGAbGroup::cyclic(48),
            direct_sum(&[FGAbGroup::free(2), FGAbGroup::cyclic(2), FGAbGroup::cyclic(12)]),
        ] {
            assert_eq!(FGAbGroup::parse(&g.text()).unwrap(), g);
        }
        assert_eq!(FGAbGroup::parse("Z + Z/2 + Z/4").unwrap().text(), "Z + Z/2 + Z/4");
        assert!(FGAbGroup::parse("Z/0").is_err());
    }

    #[test]
    fn primary_decomposition_display() {
        let g = FGAbGroup::from_orders(&[BigUint::from(12u32), BigUint::from(2u32)]);
        let pd = g.primary_decomposition();
        assert_eq!(pd.get(&BigUint::from(2u32)), Some(&vec![2, 1]));
        assert_eq!(pd.get(&BigUint::from(3u32)), Some(&vec![1]));
    }
}
