//! The full invariant battery behind `verify-all`: every suite returns a
//! structured result with counts, skipped entries and the first
//! counterexample it met.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::degree::DegreeValue;
use crate::divisor::{euler_at, euler_characteristic, rr_scan, ArakelovDivisor};
use crate::gamma::{
    int, member_fast_symmetric, member_norm, member_subfunctor, pushforward, ratio, smash_action,
    PointedMap, PointedVector, Scalar, SubsetSpec,
};
use crate::h0::{
    self, bit_length, generates, min_generating_set, tabulated_generating_set, SearchOptions,
};
use crate::h1::{
    covering_radius, f_generators, inv_pow2, is_generating_circle, lower_bound_cardinality,
    min_separation, subset_sums_circle,
};
use crate::negabinary::{
    self, decode, delta_interval, encode, j_closed_form, j_value, verify_bijection,
};
use crate::RunConfig;

/// `dim H⁰` for `a = 1..=15`, read off the tabulated minimal sets.
pub const GOLDEN_DIMENSIONS: [usize; 15] = [2, 3, 3, 4, 4, 4, 4, 5, 5, 5, 5, 5, 5, 5, 5];

pub const RANDOM_SEED: u64 = 0x5eed_2a11;

/// A deliberately wrong expectation, used to check that failures surface.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Fault {
    #[default]
    None,
    /// Expect one more generator than the truth at `a = 7`.
    FlipGolden,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteResult {
    pub name: String,
    pub passed: bool,
    pub checks: u64,
    pub skipped: Vec<String>,
    pub first_failure: Option<String>,
}

impl SuiteResult {
    fn new(name: &str) -> Self {
        SuiteResult {
            name: name.to_string(),
            passed: true,
            checks: 0,
            skipped: Vec::new(),
            first_failure: None,
        }
    }

    /// Record one check. Only the first failure message is kept.
    pub fn check(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.passed = false;
            if self.first_failure.is_none() {
                self.first_failure = Some(witness());
            }
        }
    }

    fn error(&mut self, context: &str, err: impl std::fmt::Display) {
        self.check(false, || format!("{context}: {err}"));
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub passed: bool,
    pub suites: Vec<SuiteResult>,
}

impl SuiteReport {
    pub fn first_failure(&self) -> Option<(&str, &str)> {
        self.suites
            .iter()
            .find_map(|s| s.first_failure.as_deref().map(|f| (s.name.as_str(), f)))
    }
}

/// Sizes for the Γ-set law checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GammaParams {
    /// Largest `k` and `m` for maps `k₊ → m₊`.
    pub max_level: usize,
    /// Integer entries range over `[-entry_bound, entry_bound]`.
    pub entry_bound: i64,
    pub random_cases: usize,
    /// Largest level in the randomized membership cases.
    pub random_level: usize,
    pub seed: u64,
}

impl Default for GammaParams {
    fn default() -> Self {
        GammaParams {
            max_level: 3,
            entry_bound: 2,
            random_cases: 2_000,
            random_level: 10,
            seed: RANDOM_SEED,
        }
    }
}

fn grid(k: usize, bound: i64) -> impl Iterator<Item = PointedVector> {
    let side = (2 * bound + 1) as u64;
    let total = side.pow(k as u32);
    (0..total).map(move |mut code| {
        let values: Vec<i64> = (0..k)
            .map(|_| {
                let d = (code % side) as i64 - bound;
                code /= side;
                d
            })
            .collect();
        PointedVector::from_integers(&values)
    })
}

fn basis(k: usize, j: usize) -> PointedVector {
    let mut e = vec![0; k];
    e[j] = 1;
    PointedVector::from_integers(&e)
}

/// Functor laws of `HA` on pointed maps: identities, σ, δ, and composition.
///
/// Composition is checked on the full integer grid while all of `k, m, l`
/// are below `max_level`, and on basis vectors otherwise; additivity of the
/// pushforward (checked on the grid) carries basis agreement to every vector.
pub fn functor_laws(p: &GammaParams) -> SuiteResult {
    let mut r = SuiteResult::new("gamma functor laws");
    let top = p.max_level;
    for k in 0..=top {
        for x in grid(k, p.entry_bound) {
            let id = pushforward(&PointedMap::identity(k), &x);
            r.check(id.as_ref() == Ok(&x), || format!("identity moved {x}"));
            let total = pushforward(&PointedMap::sigma(k), &x);
            r.check(
                total.map(|t| t.entries()[0].clone()) == Ok(x.total()),
                || format!("sigma does not sum {x}"),
            );
            for j in 1..=k {
                let part = PointedMap::delta(j, k).and_then(|d| pushforward(&d, &x));
                r.check(
                    part.map(|t| t.entries()[0].clone()) == Ok(x.entries()[j - 1].clone()),
                    || format!("delta({j},{k}) does not select from {x}"),
                );
            }
            if k == top {
                continue;
            }
            for j in 0..k {
                let e = basis(k, j);
                let sum = PointedVector::new(
                    x.entries()
                        .iter()
                        .zip(e.entries())
                        .map(|(a, b)| a + b)
                        .collect(),
                );
                for m in 0..=top {
                    for phi in PointedMap::enumerate(k, m) {
                        let (Ok(lhs), Ok(px), Ok(pe)) = (
                            pushforward(&phi, &sum),
                            pushforward(&phi, &x),
                            pushforward(&phi, &e),
                        ) else {
                            r.error("pushforward", "level mismatch");
                            continue;
                        };
                        let rhs: Vec<Scalar> = px
                            .entries()
                            .iter()
                            .zip(pe.entries())
                            .map(|(a, b)| a + b)
                            .collect();
                        r.check(lhs.entries() == rhs.as_slice(), || {
                            format!("pushforward not additive on {x} + e{}", j + 1)
                        });
                    }
                }
            }
        }
    }
    for k in 0..=top {
        for m in 0..=top {
            for l in 0..=top {
                let small = k < top && m < top && l < top;
                let vectors: Vec<PointedVector> = if small {
                    grid(k, p.entry_bound).collect()
                } else {
                    (0..k).map(|j| basis(k, j)).collect()
                };
                for phi in PointedMap::enumerate(k, m) {
                    let images: Vec<PointedVector> = vectors
                        .iter()
                        .map(|x| pushforward(&phi, x).expect("levels match"))
                        .collect();
                    for psi in PointedMap::enumerate(m, l) {
                        let comp = phi.then(&psi).expect("composable");
                        for (x, y) in vectors.iter().zip(&images) {
                            let lhs = pushforward(&comp, x).expect("levels match");
                            let rhs = pushforward(&psi, y).expect("levels match");
                            r.check(lhs == rhs, || {
                                format!("(psi o phi)_* != psi_* phi_* on {x}")
                            });
                        }
                    }
                }
            }
        }
    }
    r
}

/// Subsets used for the closure check.
pub fn closure_subsets() -> Vec<(String, SubsetSpec)> {
    vec![
        ("[-2,2]".into(), SubsetSpec::IntegerInterval(2)),
        ("[-3,3]".into(), SubsetSpec::IntegerInterval(3)),
        (
            "[-5/2,5/2]".into(),
            SubsetSpec::symmetric(ratio(5, 2)).unwrap(),
        ),
        (
            "{-1,0,1,2}".into(),
            SubsetSpec::finite([int(-1), int(0), int(1), int(2)]).unwrap(),
        ),
        (
            "{0,1}".into(),
            SubsetSpec::finite([int(0), int(1)]).unwrap(),
        ),
    ]
}

/// `(HA)_X` is a subfunctor: pushforwards of members stay members.
pub fn subfunctor_closure(p: &GammaParams) -> SuiteResult {
    let mut r = SuiteResult::new("gamma subfunctor closure");
    let maps: Vec<Vec<Vec<PointedMap>>> = (0..=p.max_level)
        .map(|k| {
            (0..=p.max_level)
                .map(|m| PointedMap::enumerate(k, m).collect())
                .collect()
        })
        .collect();
    for (name, spec) in closure_subsets() {
        for (k, by_target) in maps.iter().enumerate() {
            for x in grid(k, p.entry_bound) {
                match member_subfunctor(&x, &spec) {
                    Ok(true) => {}
                    Ok(false) => continue,
                    Err(e) => {
                        r.error("membership", e);
                        continue;
                    }
                }
                for phi in by_target.iter().flatten() {
                    let y = pushforward(phi, &x).expect("levels match");
                    let ok = member_subfunctor(&y, &spec) == Ok(true);
                    r.check(ok, || format!("{x} in (HA)_{name} but image {y} is not"));
                }
            }
        }
    }
    r
}

fn random_rational(rng: &mut ChaCha8Rng, den_max: i64, num_max: i64) -> Scalar {
    let den = rng.gen_range(1..=den_max);
    let num = rng.gen_range(-num_max..=num_max);
    ratio(num, den)
}

fn random_vector(rng: &mut ChaCha8Rng, k: usize, den_max: i64, num_max: i64) -> PointedVector {
    PointedVector::new(
        (0..k)
            .map(|_| random_rational(rng, den_max, num_max))
            .collect(),
    )
}

/// Symmetric intervals: the subset-sum oracle agrees with the
/// positive/negative-part test, and the smash action of `‖HA‖₁` preserves
/// `(HA)_{[-λ, λ]}`.
pub fn symmetric_membership(p: &GammaParams) -> SuiteResult {
    let mut r = SuiteResult::new("gamma symmetric membership");
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    for case in 0..p.random_cases {
        let k = rng.gen_range(0..=p.random_level);
        let x = random_vector(&mut rng, k, 6, 12);
        let lambda = random_rational(&mut rng, 4, 24).abs();
        let Ok(spec) = SubsetSpec::symmetric(lambda.clone()) else {
            r.error("symmetric", "negative bound");
            continue;
        };
        let slow = member_subfunctor(&x, &spec);
        let fast = member_fast_symmetric(&x, &lambda);
        r.check(slow == Ok(fast), || {
            format!("case {case}: oracle {slow:?} vs fast {fast} for {x} at {lambda}")
        });

        let km = rng.gen_range(1..=3usize);
        let m = rng.gen_range(0..=p.random_level / km);
        let mut alpha = random_vector(&mut rng, km, 8, 8);
        let norm = alpha.l1_norm();
        if norm > Scalar::one() {
            alpha = PointedVector::new(alpha.entries().iter().map(|e| e / &norm).collect());
        }
        let mut a = random_vector(&mut rng, m, 4, 8);
        if !member_fast_symmetric(&a, &lambda) {
            let scale = a.positive_part().max(a.negative_part());
            if !scale.is_zero() {
                a = PointedVector::new(a.entries().iter().map(|e| e * &lambda / &scale).collect());
            }
        }
        r.check(member_norm(&alpha, &Scalar::one()), || {
            format!("{alpha} not in the unit ball")
        });
        match smash_action(&alpha, &a) {
            Ok(s) => {
                let inside = member_subfunctor(&s, &spec);
                r.check(inside == Ok(true), || {
                    format!("case {case}: {alpha} ∧ {a} = {s} leaves [-{lambda}, {lambda}]")
                });
            }
            Err(e) => r.error("smash", e),
        }
    }
    r
}

pub fn negabinary_suite(max_n: u32) -> SuiteResult {
    let mut r = SuiteResult::new("negabinary bijection");
    for n in 0..=63 {
        let rec = j_value(n);
        r.check(rec == Ok(j_closed_form(n)), || {
            format!("j({n}) recurrence {rec:?} vs closed form")
        });
    }
    for n in 1..=max_n {
        match verify_bijection(n, max_n.max(negabinary::DEFAULT_VERIFY_CAP)) {
            Ok(rep) => {
                r.check(rep.passed, || {
                    format!(
                        "n = {n}: {} distinct, {} outside",
                        rep.distinct_values, rep.out_of_range
                    )
                });
                let lo_word = rep.lo_witness.as_ref().map(|w| w.digits().to_vec());
                let want_lo: Vec<u8> = (0..n).map(|i| (i % 2 == 1) as u8).collect();
                r.check(lo_word.as_deref() == Some(&want_lo[..]), || {
                    format!("n = {n}: lower end not reached by 0101..")
                });
                let hi_word = rep.hi_witness.as_ref().map(|w| w.digits().to_vec());
                let want_hi: Vec<u8> = (0..n).map(|i| (i % 2 == 0) as u8).collect();
                r.check(hi_word.as_deref() == Some(&want_hi[..]), || {
                    format!("n = {n}: upper end not reached by 1010..")
                });
                let iv = rep.interval;
                let k = 2 * (n / 2) + 1;
                r.check(
                    iv.lo == j_closed_form(k) && iv.hi == iv.lo + (1i128 << n) - 1,
                    || format!("Δ({n}) = [{}, {}] off the closed forms", iv.lo, iv.hi),
                );
                for q in iv.lo..=iv.hi {
                    let back = encode(q, n).map(|w| decode(&w));
                    r.check(back == Ok(q), || {
                        format!("encode/decode of {q} at width {n} gave {back:?}")
                    });
                }
                let outside = encode(iv.hi + 1, n);
                r.check(outside.is_err(), || {
                    format!("{} encoded at width {n}", iv.hi + 1)
                });
            }
            Err(e) => r.error("bijection", e),
        }
        if let Err(e) = delta_interval(n) {
            r.error("interval", e);
        }
    }
    r
}

/// Tabulated sets, exhaustive minimality up to the search budget, the
/// balanced-sum exception at `a = 2`, and the construction on `16..=max_a`.
pub fn h0_suite(config: &RunConfig, max_construction: u64, fault: Fault) -> SuiteResult {
    let mut r = SuiteResult::new("interval h0 tables");
    let mut golden = GOLDEN_DIMENSIONS;
    if fault == Fault::FlipGolden {
        golden[6] += 1;
    }
    let opts = SearchOptions {
        parallel_width: config.workers,
        report_all_minima: true,
        budget_a: config.search_budget_a,
        ..SearchOptions::default()
    };
    for a in 1..=15u64 {
        let want = golden[a as usize - 1];
        r.check(want == bit_length(a) as usize + 1, || {
            format!(
                "a = {a}: expected {want} generators, n + 1 = {}",
                bit_length(a) + 1
            )
        });
        match tabulated_generating_set(a) {
            Ok(set) => {
                r.check(set.len() == want, || {
                    format!("a = {a}: table set {set:?} has {} elements", set.len())
                });
                let certified = generates(&set, a).map(|g| g.certificate().map(|c| c.verify()));
                r.check(certified == Ok(Some(true)), || {
                    format!("a = {a}: table set {set:?} does not generate")
                });
            }
            Err(e) => r.error("table", e),
        }
        if a > config.search_budget_a.min(h0::MAX_SEARCH_A) {
            r.skipped.push(format!(
                "brute-force minimality a = {a} (budget {})",
                config.search_budget_a
            ));
            continue;
        }
        match min_generating_set(a, &opts) {
            Ok(found) => {
                r.check(found.size == want, || {
                    format!(
                        "a = {a}: search found minimum {} ({:?}), expected {want}",
                        found.size, found.set
                    )
                });
                let balanced = found
                    .all_minima
                    .unwrap_or_default()
                    .into_iter()
                    .filter(|s| {
                        let pos: i64 = s.iter().filter(|&&v| v > 0).sum();
                        let neg: i64 = s.iter().filter(|&&v| v < 0).sum();
                        pos == a as i64 && neg == -(a as i64)
                    })
                    .count();
                r.check((a == 2) == (balanced == 0), || {
                    format!(
                        "a = {a}: {balanced} minimal sets with positive sum a and negative sum -a"
                    )
                });
            }
            Err(e) => r.error(&format!("search a = {a}"), e),
        }
    }
    for a in 16..=max_construction {
        match tabulated_generating_set(a) {
            Ok(set) => {
                r.check(set.len() == bit_length(a) as usize + 1, || {
                    format!("a = {a}: construction has {} elements", set.len())
                });
                let ok = generates(&set, a).map(|g| g.is_certified());
                r.check(ok == Ok(true), || {
                    format!("a = {a}: construction {set:?} does not generate")
                });
            }
            Err(e) => r.error("construction", e),
        }
    }
    r
}

pub fn h1_suite(max_m: u32, cap: usize) -> SuiteResult {
    let mut r = SuiteResult::new("circle h1 certification");
    for m in 1..=max_m {
        let half_gap = inv_pow2(m + 1);
        let family = f_generators(m);
        r.check(family.len() == m as usize, || {
            format!("F({m}) has {} points", family.len())
        });
        let lb = lower_bound_cardinality(&half_gap);
        r.check(lb == Ok(m), || {
            format!("lower bound at 2^-{} is {lb:?}, expected {m}", m + 1)
        });
        match subset_sums_circle(&family, cap).and_then(|s| covering_radius(&s)) {
            Ok(radius) => r.check(radius == half_gap, || {
                format!("F({m}) covering radius {radius}")
            }),
            Err(e) => r.error("covering radius", e),
        }
        if m >= 2 {
            match min_separation(&family) {
                Ok(sep) => r.check(sep > half_gap, || {
                    format!("F({m}) separation {sep} not above 2^-{}", m + 1)
                }),
                Err(e) => r.error("separation", e),
            }
        }
        let gen = is_generating_circle(&family, &half_gap, cap);
        r.check(gen == Ok(true), || {
            format!("F({m}) does not generate at 2^-{}: {gen:?}", m + 1)
        });
    }
    r
}

/// The Riemann-Roch sweep and the spot values at `0`, the canonical divisor
/// and `[-m-1, -m)`.
pub fn rr_suite(lo: i64, hi: i64, step: &BigRational) -> SuiteResult {
    let mut r = SuiteResult::new("riemann-roch sweep");
    match rr_scan(&int(lo), &int(hi), step) {
        Ok(rep) => {
            r.checks += rep.points.len() as u64;
            if let Some((x, chi, rhs)) = rep.violations.first() {
                r.check(false, || format!("at {x}: chi = {chi}, rhs = {rhs}"));
            }
            if let Some(n) = rep.right_continuity_failures.first() {
                r.check(false, || format!("not right continuous at {n}"));
            }
            r.check(rep.passed, || "scan reported failure".into());
        }
        Err(e) => r.error("scan", e),
    }
    let chi0 = euler_at(&DegreeValue::integer(0)).map(|e| e.chi);
    r.check(chi0 == Ok(2), || format!("deg 0 gives chi {chi0:?}"));
    let k = ArakelovDivisor::canonical();
    r.check(k.deg2() == DegreeValue::integer(-2), || {
        format!("deg2 K = {}", k.deg2())
    });
    let chik = euler_characteristic(&k).map(|e| e.chi);
    r.check(chik == Ok(-1), || format!("chi(K) = {chik:?}"));
    for m in 1..=3i64 {
        for t in [
            ratio(-m - 1, 1),
            ratio(-4 * m - 3, 4),
            ratio(-2 * m - 1, 2),
            ratio(-8 * m - 1, 8),
        ] {
            let chi = euler_at(&DegreeValue::rational(t.clone())).map(|e| e.chi);
            r.check(chi == Ok(-m), || {
                format!("deg2 {t}: chi {chi:?}, expected {}", -m)
            });
        }
    }
    r
}

/// Every suite at the sizes used by `verify-all`.
pub fn run_all(config: &RunConfig, fault: Fault) -> SuiteReport {
    let gamma = GammaParams::default();
    let suites = vec![
        functor_laws(&gamma),
        subfunctor_closure(&gamma),
        symmetric_membership(&gamma),
        negabinary_suite(16),
        h0_suite(config, 1024, fault),
        h1_suite(12, config.enumeration_cap),
        rr_suite(-6, 6, &ratio(1, 4)),
    ];
    SuiteReport {
        passed: suites.iter().all(|s| s.passed),
        suites,
    }
}
