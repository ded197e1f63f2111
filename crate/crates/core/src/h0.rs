//! `dim_𝕊 H⁰`: admissible subset-sum generation of the integer interval
//! `I = [-a, a]`.
//!
//! A set `G ⊂ I \ {0}` generates `(HZ)_I` when every `j ∈ I` is the sum of
//! some `Z ⊆ G` all of whose partial sums stay in `I`. For integers that is
//! the same as asking the positive part of `Z` and the magnitude of its
//! negative part to be at most `a`, so a realisable `j` is a difference
//! `P − Q` of a positive-generator subset sum `P ≤ a` and a
//! negative-generator subset sum `Q ≤ a`. Everything below works with those
//! two reachable sets.

use num_traits::{Signed, ToPrimitive};
use serde::Serialize;
use thiserror::Error;

use crate::degree::{DegreeError, DegreeValue};

/// Default largest `a` for [`min_generating_set`].
pub const DEFAULT_SEARCH_BUDGET: u64 = 31;

/// Hard limit of the bitset search: `2a + 1` bit positions must fit a `u64`.
pub const MAX_SEARCH_A: u64 = 31;

/// Largest `a` accepted by [`tabulated_generating_set`].
pub const MAX_CONSTRUCTION_A: u64 = 1 << 62;

/// Largest `a` for which [`generates`] builds a full certificate.
pub const MAX_CERTIFICATE_A: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum H0Error {
    #[error("target {j} is outside [-{a}, {a}]")]
    OutOfRange { j: i64, a: u64 },
    #[error("generator {value} is invalid for [-{a}, {a}]: {reason}")]
    InvalidGenerator {
        value: i64,
        a: u64,
        reason: &'static str,
    },
    #[error("{0} generators exceed the 64-element limit")]
    TooManyGenerators(usize),
    #[error("a = {a} exceeds the exhaustive-search budget {budget}; use the explicit construction instead")]
    BudgetExceeded { a: u64, budget: u64 },
    #[error("a = {a} is too large for {what}")]
    TooLarge { a: u64, what: &'static str },
    #[error("no generating set of at most {max} elements for a = {a}")]
    NotFound { a: u64, max: usize },
    #[error("the construction needs a >= 1")]
    ZeroTarget,
    #[error("thread pool: {0}")]
    ThreadPool(String),
}

/// Which branch of the explicit construction produced a set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ConstructionCase {
    /// `1 ≤ a ≤ 15`: the tabulated sets.
    Table,
    /// `a = 2^{n-1}`.
    PowerOfTwo,
    /// `a − σ` is already a power of two below `2^{n-1}`.
    Collision,
    /// `F = T ∪ {a − σ}`.
    Generic,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    /// Give up above this cardinality (`None`: up to `2a`).
    pub max_cardinality: Option<usize>,
    /// Worker threads (0 = rayon default).
    pub parallel_width: usize,
    /// Collect every minimal set, not just the lexicographically smallest.
    pub report_all_minima: bool,
    /// Largest `a` accepted.
    pub budget_a: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            max_cardinality: None,
            parallel_width: 0,
            report_all_minima: false,
            budget_a: DEFAULT_SEARCH_BUDGET,
        }
    }
}

/// `n` with `2^{n-1} ≤ a < 2^n` (0 for `a = 0`).
pub fn bit_length(a: u64) -> u32 {
    64 - a.leading_zeros()
}

/// Counting bound: the least `k` with `2^k ≥ 2a + 1`.
pub fn cardinality_lower_bound(a: u64) -> u32 {
    let size = 2 * a as u128 + 1;
    (0..=128)
        .find(|&k| 1u128.checked_shl(k).is_none_or(|p| p >= size))
        .unwrap()
}

/// Positive part ≤ a and negative magnitude ≤ a.
pub fn is_admissible(z: &[i64], a: u64) -> bool {
    let (pos, neg) = z.iter().fold((0i128, 0i128), |(p, n), &x| {
        if x > 0 {
            (p + x as i128, n)
        } else {
            (p, n - x as i128)
        }
    });
    pos <= a as i128 && neg <= a as i128
}

fn check_generators(g: &[i64], a: u64) -> Result<Vec<i64>, H0Error> {
    if g.len() > 64 {
        return Err(H0Error::TooManyGenerators(g.len()));
    }
    let mut sorted = g.to_vec();
    sorted.sort_unstable();
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            return Err(H0Error::InvalidGenerator {
                value: w[0],
                a,
                reason: "repeated",
            });
        }
    }
    for &x in &sorted {
        if x == 0 {
            return Err(H0Error::InvalidGenerator {
                value: 0,
                a,
                reason: "zero never helps and is excluded",
            });
        }
        if x.unsigned_abs() > a {
            return Err(H0Error::InvalidGenerator {
                value: x,
                a,
                reason: "outside the interval",
            });
        }
    }
    Ok(sorted)
}

/// Growable bitset over `0..len`.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Bits {
    words: Vec<u64>,
    len: usize,
}

impl Bits {
    fn new(len: usize) -> Self {
        Bits {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    fn get(&self, i: usize) -> bool {
        i < self.len && self.words[i / 64] >> (i % 64) & 1 == 1
    }

    fn set(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    /// `self |= self << shift`, truncated to `len`.
    fn or_shifted(&mut self, shift: usize) {
        if shift >= self.len {
            return;
        }
        let (word_shift, bit_shift) = (shift / 64, shift % 64);
        for i in (word_shift..self.words.len()).rev() {
            let mut v = self.words[i - word_shift] << bit_shift;
            if bit_shift > 0 && i > word_shift {
                v |= self.words[i - word_shift - 1] >> (64 - bit_shift);
            }
            self.words[i] |= v;
        }
        let tail = self.len % 64;
        if tail > 0 {
            *self.words.last_mut().unwrap() &= (1u64 << tail) - 1;
        }
    }
}

/// Subset sums `≤ a` of `values`.
fn bounded_sums(values: impl IntoIterator<Item = u64>, a: u64) -> Bits {
    let mut bits = Bits::new(a as usize + 1);
    bits.set(0);
    for v in values {
        bits.or_shifted(v as usize);
    }
    bits
}

/// An admissible `Z ⊆ G` with `Σ_Z = j`, or `None`.
///
/// Among all witnesses the one returned has the lexicographically smallest
/// indicator vector over `G` sorted ascending (an element is left out
/// whenever the rest of `G` can still finish the sum).
pub fn realize(j: i64, g: &[i64], a: u64) -> Result<Option<Vec<i64>>, H0Error> {
    if j.unsigned_abs() > a {
        return Err(H0Error::OutOfRange { j, a });
    }
    if a > MAX_CERTIFICATE_A {
        return Err(H0Error::TooLarge {
            a,
            what: "witness search",
        });
    }
    let g = check_generators(g, a)?;
    let k = g.len();
    // suffix[i]: reachable (positive, negative) sums of g[i..].
    let mut suffix = Vec::with_capacity(k + 1);
    suffix.push((bounded_sums([], a), bounded_sums([], a)));
    for &x in g.iter().rev() {
        let (mut p, mut q) = suffix.last().unwrap().clone();
        if x > 0 {
            p.or_shifted(x as usize);
        } else {
            q.or_shifted(x.unsigned_abs() as usize);
        }
        suffix.push((p, q));
    }
    suffix.reverse();

    let a_i = a as i64;
    let feasible = |i: usize, p: i64, q: i64| -> bool {
        let (sp, sq) = &suffix[i];
        let t = j - p + q;
        (0..=a_i - q).any(|q2| {
            let p2 = t + q2;
            (0..=a_i - p).contains(&p2) && sq.get(q2 as usize) && sp.get(p2 as usize)
        })
    };
    if !feasible(0, 0, 0) {
        return Ok(None);
    }
    let (mut p, mut q) = (0i64, 0i64);
    let mut chosen = Vec::new();
    for (i, &x) in g.iter().enumerate() {
        if feasible(i + 1, p, q) {
            continue;
        }
        if x > 0 {
            p += x;
        } else {
            q -= x;
        }
        chosen.push(x);
        debug_assert!(feasible(i + 1, p, q));
    }
    Ok(Some(chosen))
}

/// Certificate that `generators` generates `[-a, a]`: one admissible witness
/// subset per target, stored as a bitmask over the sorted generators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GeneratingCertificate {
    pub a: u64,
    pub generators: Vec<i64>,
    /// `witnesses[j + a]` selects the generators summing to `j`.
    pub witnesses: Vec<u64>,
}

impl GeneratingCertificate {
    pub fn witness(&self, j: i64) -> Option<Vec<i64>> {
        if j.unsigned_abs() > self.a {
            return None;
        }
        let mask = self.witnesses[(j + self.a as i64) as usize];
        Some(
            self.generators
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &x)| x)
                .collect(),
        )
    }

    /// Re-check every witness from scratch.
    pub fn verify(&self) -> bool {
        let a = self.a as i64;
        self.witnesses.len() == 2 * self.a as usize + 1
            && (-a..=a).all(|j| {
                let z = self.witness(j).unwrap();
                z.iter().sum::<i64>() == j && is_admissible(&z, self.a)
            })
    }

    pub fn positive_sum(&self) -> i64 {
        self.generators.iter().filter(|&&x| x > 0).sum()
    }

    pub fn negative_sum(&self) -> i64 {
        self.generators.iter().filter(|&&x| x < 0).sum()
    }
}

/// Outcome of [`generates`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Generation {
    Certified(GeneratingCertificate),
    Fails { least_unrealizable: i64 },
}

impl Generation {
    pub fn certificate(self) -> Option<GeneratingCertificate> {
        match self {
            Generation::Certified(c) => Some(c),
            Generation::Fails { .. } => None,
        }
    }

    pub fn is_certified(&self) -> bool {
        matches!(self, Generation::Certified(_))
    }
}

/// First-found subset (mask over `indexed`) for every reachable sum `≤ a`.
fn reach_masks(indexed: &[(usize, u64)], a: u64) -> Vec<Option<u64>> {
    let mut reach = vec![None; a as usize + 1];
    reach[0] = Some(0u64);
    for &(index, v) in indexed {
        let v = v as usize;
        for s in (0..reach.len().saturating_sub(v)).rev() {
            if let (Some(m), None) = (reach[s], reach[s + v]) {
                reach[s + v] = Some(m | 1 << index);
            }
        }
    }
    reach
}

/// Decide whether `g` generates `[-a, a]`, producing a certificate when it does.
pub fn generates(g: &[i64], a: u64) -> Result<Generation, H0Error> {
    if a > MAX_CERTIFICATE_A {
        return Err(H0Error::TooLarge {
            a,
            what: "a full certificate",
        });
    }
    let generators = check_generators(g, a)?;
    let positives: Vec<(usize, u64)> = generators
        .iter()
        .enumerate()
        .filter(|(_, &x)| x > 0)
        .map(|(i, &x)| (i, x as u64))
        .collect();
    let negatives: Vec<(usize, u64)> = generators
        .iter()
        .enumerate()
        .filter(|(_, &x)| x < 0)
        .map(|(i, &x)| (i, x.unsigned_abs()))
        .collect();
    let reach_p = reach_masks(&positives, a);
    let reach_q = reach_masks(&negatives, a);
    let q_list: Vec<(usize, u64)> = reach_q
        .iter()
        .enumerate()
        .filter_map(|(q, m)| m.map(|m| (q, m)))
        .collect();

    let a_i = a as i64;
    let mut witnesses = Vec::with_capacity(2 * a as usize + 1);
    for j in -a_i..=a_i {
        let found = q_list.iter().find_map(|&(q, qm)| {
            let p = j + q as i64;
            (0..=a_i)
                .contains(&p)
                .then(|| reach_p[p as usize].map(|pm| pm | qm))
                .flatten()
        });
        match found {
            Some(mask) => witnesses.push(mask),
            None => {
                return Ok(Generation::Fails {
                    least_unrealizable: j,
                })
            }
        }
    }
    Ok(Generation::Certified(GeneratingCertificate {
        a,
        generators,
        witnesses,
    }))
}

/// The tabulated generating sets for `1 ≤ a ≤ 15`.
const TABLE: [&[i64]; 15] = [
    &[-1, 1],
    &[-2, 1, 2],
    &[-3, 1, 2],
    &[-3, -1, 1, 3],
    &[-4, -1, 2, 3],
    &[-6, 1, 2, 3],
    &[-7, 1, 2, 4],
    &[-7, -1, 1, 2, 5],
    &[-8, -1, 1, 3, 5],
    &[-10, 1, 2, 3, 4],
    &[-11, 1, 2, 3, 5],
    &[-12, 1, 2, 3, 6],
    &[-13, 1, 2, 3, 7],
    &[-14, 1, 2, 4, 7],
    &[-15, 1, 2, 4, 8],
];

/// Branch of the construction used for `a`.
pub fn construction_case(a: u64) -> Result<ConstructionCase, H0Error> {
    if a == 0 {
        return Err(H0Error::ZeroTarget);
    }
    if a >= MAX_CONSTRUCTION_A {
        return Err(H0Error::TooLarge {
            a,
            what: "the explicit construction",
        });
    }
    if a <= 15 {
        return Ok(ConstructionCase::Table);
    }
    let n = bit_length(a);
    let sigma = (1u64 << (n - 1)) - 1;
    let gap = a - sigma;
    Ok(if a == 1 << (n - 1) {
        ConstructionCase::PowerOfTwo
    } else if gap.is_power_of_two() && gap <= 1 << (n - 2) {
        ConstructionCase::Collision
    } else {
        ConstructionCase::Generic
    })
}

/// Explicit generating set of cardinality `n + 1` for `[-a, a]`,
/// `2^{n-1} ≤ a < 2^n`, sorted ascending.
///
/// For `a ≥ 16` this is `{-a} ∪ F` where `F` has `n` distinct positive
/// elements summing to `a` whose subset sums cover `[0, a]`; below that the
/// table is used.
pub fn tabulated_generating_set(a: u64) -> Result<Vec<i64>, H0Error> {
    let case = construction_case(a)?;
    if case == ConstructionCase::Table {
        return Ok(TABLE[a as usize - 1].to_vec());
    }
    let n = bit_length(a);
    let sigma = (1u64 << (n - 1)) - 1;
    let low_powers = (0..=n - 3).map(|j| 1u64 << j);
    let mut positive: Vec<u64> = match case {
        ConstructionCase::PowerOfTwo => low_powers.chain([(1 << (n - 2)) - 2, 3]).collect(),
        ConstructionCase::Collision => low_powers
            .chain([(1 << (n - 2)) - 1, a - sigma + 1])
            .collect(),
        ConstructionCase::Generic => (0..=n - 2).map(|j| 1u64 << j).chain([a - sigma]).collect(),
        ConstructionCase::Table => unreachable!(),
    };
    positive.sort_unstable();
    let mut set = vec![-(a as i64)];
    set.extend(positive.into_iter().map(|x| x as i64));
    Ok(set)
}

/// Result of [`min_generating_set`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MinimalSets {
    pub a: u64,
    pub size: usize,
    pub lower_bound: u32,
    /// Lexicographically smallest minimal set (sorted ascending).
    pub set: Vec<i64>,
    pub certificate: GeneratingCertificate,
    /// Every minimal set in lexicographic order, when requested.
    pub all_minima: Option<Vec<Vec<i64>>>,
    /// `(negative part, positive part)` pairs examined.
    pub candidates_examined: u64,
}

/// A `k`-subset of `1..=a` with its bounded subset-sum bitset.
#[derive(Clone, Copy, Debug)]
struct Half {
    values: [u8; 8],
    len: u8,
    sums: u64,
}

impl Half {
    fn values(&self) -> &[u8] {
        &self.values[..self.len as usize]
    }
}

/// All `k`-subsets of `1..=a` (lexicographic) whose subset sums reach `a`
/// exactly; either half of a generating set must reach `a` to produce `±a`.
fn halves(a: u64, k: usize) -> Vec<Half> {
    fn walk(a: u64, k: usize, start: u64, cur: &mut Half, mask: u64, out: &mut Vec<Half>) {
        if cur.len as usize == k {
            if cur.sums >> a & 1 == 1 {
                out.push(*cur);
            }
            return;
        }
        let remaining = (k - cur.len as usize) as u64;
        for v in start..=a + 1 - remaining {
            let saved = *cur;
            cur.values[cur.len as usize] = v as u8;
            cur.len += 1;
            cur.sums = (cur.sums | cur.sums << v) & mask;
            walk(a, k, v + 1, cur, mask, out);
            *cur = saved;
        }
    }
    let mut out = Vec::new();
    if k == 0 || k > 8 || k as u64 > a {
        return out;
    }
    let mask = if a >= 63 {
        u64::MAX
    } else {
        (1u64 << (a + 1)) - 1
    };
    let mut cur = Half {
        values: [0; 8],
        len: 0,
        sums: 1,
    };
    walk(a, k, 1, &mut cur, mask, &mut out);
    out
}

/// Every `k`-subset of `[-a, a] \ {0}` that generates, in lexicographic
/// order of the sorted sets. Requires `1 ≤ a ≤ 31`.
fn generating_sets_of_size(
    a: u64,
    k: usize,
    width: usize,
) -> Result<(Vec<Vec<i64>>, u64), H0Error> {
    let full = (1u64 << (2 * a + 1)) - 1;
    let mut tasks = Vec::new();
    for kn in 1..k {
        let kp = k - kn;
        if kn > 8 || kp > 8 {
            continue;
        }
        let pos = halves(a, kp);
        if pos.is_empty() {
            continue;
        }
        for neg in halves(a, kn) {
            tasks.push((neg, kp));
        }
    }
    let positive_by_size: Vec<Vec<Half>> = (0..=k.min(8)).map(|kp| halves(a, kp)).collect();

    let run = |(neg, kp): &(Half, usize)| -> (Vec<Vec<i64>>, u64) {
        let q_sums: Vec<u64> = (0..=a).filter(|q| neg.sums >> q & 1 == 1).collect();
        let mut found = Vec::new();
        let mut examined = 0u64;
        for pos in &positive_by_size[*kp] {
            examined += 1;
            let reach = q_sums
                .iter()
                .fold(0u64, |acc, &q| acc | pos.sums << (a - q));
            if reach & full == full {
                let mut set: Vec<i64> = neg.values().iter().rev().map(|&v| -(v as i64)).collect();
                set.extend(pos.values().iter().map(|&v| v as i64));
                found.push(set);
            }
        }
        (found, examined)
    };

    let results: Vec<(Vec<Vec<i64>>, u64)> = run_tasks(&tasks, width, run)?;
    let examined = results.iter().map(|r| r.1).sum();
    let mut sets: Vec<Vec<i64>> = results.into_iter().flat_map(|r| r.0).collect();
    sets.sort();
    Ok((sets, examined))
}

#[cfg(feature = "parallel")]
fn run_tasks<T, R, F>(tasks: &[T], width: usize, f: F) -> Result<Vec<R>, H0Error>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    use rayon::prelude::*;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(width)
        .build()
        .map_err(|e| H0Error::ThreadPool(e.to_string()))?;
    Ok(pool.install(|| tasks.par_iter().map(&f).collect()))
}

#[cfg(not(feature = "parallel"))]
fn run_tasks<T, R, F>(tasks: &[T], _width: usize, f: F) -> Result<Vec<R>, H0Error>
where
    F: Fn(&T) -> R,
{
    Ok(tasks.iter().map(f).collect())
}

/// All generating sets of exactly `k` elements for `[-a, a]`, sorted.
pub fn generating_sets_with_cardinality(
    a: u64,
    k: usize,
    opts: &SearchOptions,
) -> Result<Vec<Vec<i64>>, H0Error> {
    if a > opts.budget_a.min(MAX_SEARCH_A) {
        return Err(H0Error::BudgetExceeded {
            a,
            budget: opts.budget_a.min(MAX_SEARCH_A),
        });
    }
    if a == 0 {
        return Ok(if k == 0 { vec![vec![]] } else { vec![] });
    }
    Ok(generating_sets_of_size(a, k, opts.parallel_width)?.0)
}

/// Exact minimum cardinality of a generating set for `[-a, a]`.
///
/// Cardinalities below the counting bound `2^k ≥ 2a + 1` are impossible and
/// skipped; from there each level is searched exhaustively. The result does
/// not depend on the worker count.
pub fn min_generating_set(a: u64, opts: &SearchOptions) -> Result<MinimalSets, H0Error> {
    let budget = opts.budget_a.min(MAX_SEARCH_A);
    if a > budget {
        return Err(H0Error::BudgetExceeded { a, budget });
    }
    let lower_bound = cardinality_lower_bound(a);
    if a == 0 {
        let certificate = generates(&[], 0)?
            .certificate()
            .expect("{0} is generated by the empty set");
        return Ok(MinimalSets {
            a,
            size: 0,
            lower_bound,
            set: vec![],
            certificate,
            all_minima: opts.report_all_minima.then(|| vec![vec![]]),
            candidates_examined: 1,
        });
    }
    let max = opts.max_cardinality.unwrap_or(2 * a as usize);
    let mut examined_total = 0;
    for k in lower_bound as usize..=max {
        let (sets, examined) = generating_sets_of_size(a, k, opts.parallel_width)?;
        examined_total += examined;
        if let Some(first) = sets.first() {
            let certificate = generates(first, a)?
                .certificate()
                .expect("search and certificate disagree");
            return Ok(MinimalSets {
                a,
                size: k,
                lower_bound,
                set: first.clone(),
                certificate,
                all_minima: opts.report_all_minima.then_some(sets),
                candidates_examined: examined_total,
            });
        }
    }
    Err(H0Error::NotFound { a, max })
}

/// `dim_𝕊 H⁰(D)` from `deg₂ D`: `n + 1` where `2^{n-1} ≤ ⌊2^{deg₂ D}⌋ < 2^n`,
/// and 0 when `deg₂ D < 0` (then `⌊2^{deg₂ D}⌋ = 0` and the empty set generates).
///
/// When `2^{deg₂ D}` is too large to expand (or its root too deep), the bit
/// length of `⌊2^x⌋` is read off as `⌊x⌋ + 1` instead.
pub fn dim_h0(deg2: &DegreeValue) -> Result<u64, DegreeError> {
    match deg2.pow2_floor() {
        Ok(a) => Ok(if a.bits() == 0 { 0 } else { a.bits() + 1 }),
        Err(DegreeError::TooLarge { bits, limit }) => {
            let f = deg2.floor()?;
            if f.is_negative() {
                return Ok(0);
            }
            f.to_u64()
                .and_then(|f| f.checked_add(2))
                .ok_or(DegreeError::TooLarge { bits, limit })
        }
        Err(e) => Err(e),
    }
}

/// The interval bound `a = ⌊2^{deg₂ D}⌋` of `H⁰(D) = (HZ)_{[-a, a]}`.
pub fn h0_interval_bound(deg2: &DegreeValue) -> Result<num_bigint::BigUint, DegreeError> {
    deg2.pow2_floor()
}
