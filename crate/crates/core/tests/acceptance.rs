//! Acceptance battery. Runs without the libtest harness so that every
//! criterion prints its own PASS/FAIL line; exits nonzero if any fails.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};

use rrz_core::degree::DegreeValue;
use rrz_core::divisor::{
    euler_at, euler_characteristic, reduce_to_infinity, rr_scan, ArakelovDivisor,
};
use rrz_core::gamma::ratio;
use rrz_core::h0::{
    self, dim_h0, generates, min_generating_set, tabulated_generating_set, SearchOptions,
};
use rrz_core::h1::{
    covering_radius, f_generators, lower_bound_cardinality, min_separation, subset_sums_circle,
};
use rrz_core::negabinary::{delta_interval, encode, verify_bijection};
use rrz_core::verify::{self, GammaParams, SuiteResult};

// ---------------------------------------------------------------------------
// Oracles. Written from the definitions, sharing no code with the library.

/// Least `n` with `a < 2^n`.
fn bits_of(a: u64) -> usize {
    let mut n = 0;
    while (1u64 << n) <= a {
        n += 1;
    }
    n
}

/// Every subset sum of `z` lies in `[-a, a]`.
fn admissible_by_definition(z: &[i64], a: i64) -> bool {
    (0u32..1 << z.len()).all(|mask| {
        let s: i64 = (0..z.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| z[i])
            .sum();
        -a <= s && s <= a
    })
}

/// `g` generates `[-a, a]`: every target is the sum of an admissible subset.
fn generates_by_definition(g: &[i64], a: i64) -> bool {
    let mut hit = vec![false; (2 * a + 1) as usize];
    for mask in 0u32..1 << g.len() {
        let z: Vec<i64> = (0..g.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| g[i])
            .collect();
        let s: i64 = z.iter().sum();
        if (-a..=a).contains(&s) && admissible_by_definition(&z, a) {
            hit[(s + a) as usize] = true;
        }
    }
    hit.into_iter().all(|h| h)
}

/// Extremal subset sums give admissibility directly; used where the
/// definition-level oracle is too slow.
fn generates_by_extremes(g: &[i64], a: i64) -> bool {
    let mut hit = vec![false; (2 * a + 1) as usize];
    for mask in 0u32..1 << g.len() {
        let (mut pos, mut neg) = (0i64, 0i64);
        for (i, &v) in g.iter().enumerate() {
            if mask >> i & 1 == 1 {
                if v > 0 {
                    pos += v;
                } else {
                    neg += v;
                }
            }
        }
        if pos <= a && neg >= -a {
            hit[(pos + neg + a) as usize] = true;
        }
    }
    hit.into_iter().all(|h| h)
}

fn k_subsets(universe: &[i64], k: usize, f: &mut impl FnMut(&[i64])) {
    fn go(u: &[i64], k: usize, start: usize, cur: &mut Vec<i64>, f: &mut impl FnMut(&[i64])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..u.len() {
            cur.push(u[i]);
            go(u, k, i + 1, cur, f);
            cur.pop();
        }
    }
    go(universe, k, 0, &mut Vec::new(), f);
}

fn nonzero_interval(a: i64) -> Vec<i64> {
    (-a..=a).filter(|&v| v != 0).collect()
}

/// `⌊2^x⌋` for rational `x`: the largest `a ≥ 0` with `a^q ≤ 2^p`.
fn floor_pow2(x: &BigRational) -> BigInt {
    let (p, q) = (x.numer().clone(), x.denom().clone());
    let q: u32 = q.try_into().expect("small denominator");
    let two = BigRational::from_integer(2.into());
    let bound: BigRational = if p >= BigInt::zero() {
        two.pow(u32::try_from(&p).unwrap())
    } else {
        BigRational::one() / two.pow(u32::try_from(-&p).unwrap())
    };
    let mut a = BigInt::zero();
    while BigRational::from_integer(Pow::pow(&a + BigInt::one(), q)) <= bound {
        a += 1;
    }
    a
}

/// `χ = h⁰ − h¹`: `h⁰` from the interval size, `h¹` from the measure bound
/// on the circle at radius `λ = 2^x` (least `k ≥ 0` with `2λ·2^k ≥ 1`).
fn chi_oracle(x: &BigRational) -> i64 {
    let a = floor_pow2(x);
    let h0 = if a.is_zero() { 0 } else { a.bits() as i64 + 1 };
    let need = -x - BigRational::one();
    let h1 = if need <= BigRational::zero() {
        0
    } else {
        need.ceil().to_integer().try_into().unwrap()
    };
    h0 - h1
}

/// `⌈x⌉′ + 1`: `⌊x⌋ + 2` for `x ≥ 0`, `⌊x⌋ + 1` for `x < 0`.
fn rhs_oracle(x: &BigRational) -> i64 {
    let (q, _) = x.numer().div_mod_floor(x.denom());
    let f: i64 = q.try_into().unwrap();
    if *x >= BigRational::zero() {
        f + 2
    } else {
        f + 1
    }
}

// ---------------------------------------------------------------------------

struct Outcome {
    ok: bool,
    detail: String,
}

fn pass(detail: impl Into<String>) -> Outcome {
    Outcome {
        ok: true,
        detail: detail.into(),
    }
}

fn fail(detail: impl Into<String>) -> Outcome {
    Outcome {
        ok: false,
        detail: detail.into(),
    }
}

fn from_suite(s: &SuiteResult) -> Outcome {
    match &s.first_failure {
        None if s.passed => pass(format!("{}: {} checks", s.name, s.checks)),
        other => fail(format!(
            "{}: {}",
            s.name,
            other.as_deref().unwrap_or("failed")
        )),
    }
}

fn serial() -> SearchOptions {
    SearchOptions {
        parallel_width: 1,
        ..SearchOptions::default()
    }
}

fn golden_table() -> Outcome {
    for a in 1..=15u64 {
        let n = bits_of(a);
        let found = match min_generating_set(a, &serial()) {
            Ok(f) => f,
            Err(e) => return fail(format!("a = {a}: {e}")),
        };
        if found.size != n + 1 {
            return fail(format!(
                "a = {a}: minimum {} but n + 1 = {}",
                found.size,
                n + 1
            ));
        }
        let ai = a as i64;
        if !generates_by_definition(&found.set, ai) {
            return fail(format!(
                "a = {a}: search answer {:?} fails the definition",
                found.set
            ));
        }
        let mut smaller = None;
        k_subsets(&nonzero_interval(ai), n, &mut |g| {
            if smaller.is_none() && generates_by_definition(g, ai) {
                smaller = Some(g.to_vec());
            }
        });
        if let Some(g) = smaller {
            return fail(format!("a = {a}: {g:?} generates with only {n} elements"));
        }
        let table = tabulated_generating_set(a).unwrap();
        if table.len() != n + 1 || !generates_by_definition(&table, ai) {
            return fail(format!(
                "a = {a}: table set {table:?} rejected by the definition"
            ));
        }
        match generates(&table, a) {
            Ok(g) if g.clone().certificate().is_some_and(|c| c.verify()) => {}
            other => return fail(format!("a = {a}: generates(table) = {other:?}")),
        }
    }
    pass("a = 1..15 minimum n + 1, tabulated sets generate")
}

fn balanced(set: &[i64], a: i64) -> bool {
    set.iter().filter(|&&v| v > 0).sum::<i64>() == a
        && set.iter().filter(|&&v| v < 0).sum::<i64>() == -a
}

fn two_anomaly() -> Outcome {
    let mut minima = Vec::new();
    k_subsets(&nonzero_interval(2), 3, &mut |g| {
        if generates_by_definition(g, 2) {
            minima.push(g.to_vec());
        }
    });
    let mut two_elements = false;
    k_subsets(&nonzero_interval(2), 2, &mut |g| {
        two_elements |= generates_by_definition(g, 2)
    });
    if two_elements || minima.is_empty() {
        return fail(format!("a = 2: minimum is not 3 (found {minima:?})"));
    }
    if let Some(s) = minima.iter().find(|s| balanced(s, 2)) {
        return fail(format!("a = 2: balanced minimal set {s:?}"));
    }
    let opts = SearchOptions {
        report_all_minima: true,
        ..serial()
    };
    for a in 1..=15u64 {
        let all = min_generating_set(a, &opts).unwrap().all_minima.unwrap();
        let count = all.iter().filter(|s| balanced(s, a as i64)).count();
        if (a == 2) != (count == 0) {
            return fail(format!(
                "a = {a}: {count} balanced minima among {}",
                all.len()
            ));
        }
        if a == 2 && all != minima {
            return fail(format!("a = 2: search minima {all:?} vs oracle {minima:?}"));
        }
    }
    pass(format!(
        "a = 2 minima {minima:?} all unbalanced; every other a <= 15 has a balanced minimum"
    ))
}

fn construction() -> Outcome {
    for a in 16..=4096u64 {
        let set = tabulated_generating_set(a).unwrap();
        let n = bits_of(a);
        if set.len() != n + 1 {
            return fail(format!("a = {a}: {} elements, want {}", set.len(), n + 1));
        }
        if !generates_by_extremes(&set, a as i64) {
            return fail(format!("a = {a}: {set:?} misses a target"));
        }
        match generates(&set, a) {
            Ok(g) if g.is_certified() => {}
            other => return fail(format!("a = {a}: dynamic program says {other:?}")),
        }
    }
    pass("16 <= a <= 4096: n + 1 elements, every target realized")
}

fn negabinary() -> Outcome {
    for n in 1..=16u32 {
        let mut values = BTreeSet::new();
        for mask in 0u64..1 << n {
            let v: i64 = (0..n)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| (-2i64).pow(i))
                .sum();
            values.insert(v);
        }
        let lo: i64 = (0..n).filter(|i| i % 2 == 1).map(|i| (-2i64).pow(i)).sum();
        let hi: i64 = (0..n).filter(|i| i % 2 == 0).map(|i| (-2i64).pow(i)).sum();
        let k = (2 * (n / 2) + 1) as i64;
        let closed_lo = (2 * (-2i64).pow(k as u32) - 3 * (-1i64).pow(k as u32) + 1) / 6;
        if values.len() != 1 << n || *values.first().unwrap() != lo || *values.last().unwrap() != hi
        {
            return fail(format!("n = {n}: image is not an interval of size 2^n"));
        }
        if lo != closed_lo || hi != closed_lo + (1 << n) - 1 {
            return fail(format!(
                "n = {n}: endpoints [{lo}, {hi}] off the closed form {closed_lo}"
            ));
        }
        let d = delta_interval(n).unwrap();
        if (d.lo, d.hi) != (lo as i128, hi as i128) {
            return fail(format!("n = {n}: library interval [{}, {}]", d.lo, d.hi));
        }
        let rep = verify_bijection(n, 16).unwrap();
        if !rep.passed {
            return fail(format!("n = {n}: library bijection check failed"));
        }
        if encode(lo as i128 - 1, n).is_ok() || encode(hi as i128 + 1, n).is_ok() {
            return fail(format!("n = {n}: value outside the interval was encoded"));
        }
    }
    pass("n <= 16: 2^n distinct values filling the interval, endpoints match")
}

fn circle() -> Outcome {
    for m in 1..=12u32 {
        let unit = 1i64 << m;
        // (-2)^{-j} = (-1)^j 2^{m-j} / 2^m.
        let pts: Vec<i64> = (1..=m)
            .map(|j| ((-1i64).pow(j) * (1 << (m - j))).rem_euclid(unit))
            .collect();
        let mut sums = BTreeSet::new();
        for mask in 0u32..1 << m {
            let s: i64 = (0..m as usize)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| pts[i])
                .sum();
            sums.insert(s.rem_euclid(unit));
        }
        let half_gap = ratio(1, 2 * unit);
        let want_radius = if sums.len() == unit as usize {
            half_gap.clone()
        } else {
            ratio(-1, 1)
        };
        let fam = f_generators(m);
        let got_points: BTreeSet<BigRational> = fam.iter().map(|p| p.value().clone()).collect();
        let want_points: BTreeSet<BigRational> = pts.iter().map(|&p| ratio(p, unit)).collect();
        if got_points != want_points {
            return fail(format!("m = {m}: F(m) differs from the oracle"));
        }
        let radius = covering_radius(&subset_sums_circle(&fam, 24).unwrap()).unwrap();
        if radius != want_radius {
            return fail(format!(
                "m = {m}: covering radius {radius}, want {want_radius}"
            ));
        }
        if m >= 2 {
            let sep = min_separation(&fam).unwrap();
            let mut oracle = unit;
            for (i, x) in pts.iter().enumerate() {
                for y in &pts[i + 1..] {
                    let d = (x - y).rem_euclid(unit);
                    oracle = oracle.min(d.min(unit - d));
                }
            }
            if sep != ratio(oracle, unit) || sep <= half_gap {
                return fail(format!("m = {m}: separation {sep}, oracle {oracle}/{unit}"));
            }
        }
        if lower_bound_cardinality(&half_gap) != Ok(m) {
            return fail(format!("m = {m}: lower bound at {half_gap} is not {m}"));
        }
    }
    pass("m <= 12: radius 2^-(m+1), separation above it, bound m")
}

fn rr_sweep() -> Outcome {
    let rep = match rr_scan(&ratio(-6, 1), &ratio(6, 1), &ratio(1, 4)) {
        Ok(r) => r,
        Err(e) => return fail(e.to_string()),
    };
    if !rep.passed {
        return fail(format!(
            "violations {:?}, right continuity {:?}",
            rep.violations.first(),
            rep.right_continuity_failures.first()
        ));
    }
    let mut x = ratio(-6, 1);
    while x <= ratio(6, 1) {
        let chi = chi_oracle(&x);
        if chi != rhs_oracle(&x) {
            return fail(format!("oracle disagrees with itself at {x}"));
        }
        let lib = euler_at(&DegreeValue::rational(x.clone())).map(|e| e.chi);
        if lib != Ok(chi) {
            return fail(format!("at {x}: library {lib:?}, oracle {chi}"));
        }
        x += ratio(1, 4);
    }
    let eps = ratio(1, 1024);
    for n in -6..=6 {
        let at = euler_at(&DegreeValue::integer(n)).unwrap().chi;
        let right = euler_at(&DegreeValue::rational(ratio(n, 1) + &eps))
            .unwrap()
            .chi;
        if at != right {
            return fail(format!("chi({n}) = {at} but chi({n} + 2^-10) = {right}"));
        }
    }
    pass(format!(
        "{} probes on [-6, 6], zero violations",
        rep.points.len()
    ))
}

fn spot_values() -> Outcome {
    let chi0 = euler_at(&DegreeValue::integer(0)).map(|e| e.chi);
    if chi0 != Ok(2) {
        return fail(format!("deg 0: chi {chi0:?}"));
    }
    let k = ArakelovDivisor::canonical();
    if reduce_to_infinity(&k) != DegreeValue::integer(-2) {
        return fail(format!("deg2 K = {}", k.deg2()));
    }
    let chik = euler_characteristic(&k).map(|e| e.chi);
    if chik != Ok(-1) {
        return fail(format!("chi(K) = {chik:?}"));
    }
    for m in 1..=3i64 {
        for t in [
            ratio(-m - 1, 1),
            ratio(-8 * m - 7, 8),
            ratio(-2 * m - 1, 2),
            ratio(-64 * m - 1, 64),
        ] {
            let chi = euler_at(&DegreeValue::rational(t.clone())).map(|e| e.chi);
            if chi != Ok(-m) {
                return fail(format!("deg2 {t}: chi {chi:?}, want {}", -m));
            }
        }
    }
    pass("chi(0) = 2, chi(K) = -1 with deg2 K = -2, chi = -m on [-m-1, -m)")
}

fn properties() -> Outcome {
    let exhaustive = GammaParams {
        max_level: 4,
        entry_bound: 3,
        random_cases: 10_000,
        random_level: 12,
        seed: verify::RANDOM_SEED,
    };
    let suites = [
        verify::functor_laws(&exhaustive),
        verify::subfunctor_closure(&exhaustive),
        verify::symmetric_membership(&exhaustive),
    ];
    let total: u64 = suites.iter().map(|s| s.checks).sum();
    for s in &suites {
        let o = from_suite(s);
        if !o.ok {
            return o;
        }
    }
    if suites[2].checks < 10_000 {
        return fail("fewer than 10^4 randomized cases");
    }
    pass(format!(
        "{total} checks over functor laws, closure, symmetric membership and smash closure"
    ))
}

fn scaling() -> Outcome {
    let opts = serial();
    for k in 0..=2i64 {
        for t2 in 0..=4i64 {
            // u - k = t2 / 2, so the lattice is {2^k z : (2^k z)^2 ≤ 2^{2u}}.
            let two_u = 2 * k + t2;
            let bound = BigInt::from(2).pow(two_u as u32);
            let mut a = 0i64;
            while BigInt::from((a + 1) << k).pow(2u32) <= bound {
                a += 1;
            }
            let direct = min_generating_set(a as u64, &opts).unwrap().size as u64;
            let d = ArakelovDivisor::new([(2, -k)], ratio(two_u, 2)).unwrap();
            let reduced = reduce_to_infinity(&d);
            if reduced != DegreeValue::rational(ratio(t2, 2)) {
                return fail(format!("k = {k}, u = {two_u}/2: reduced degree {reduced}"));
            }
            let via_degree = dim_h0(&reduced).unwrap();
            if via_degree != direct || h0::h0_interval_bound(&reduced).unwrap() != (a as u64).into()
            {
                return fail(format!("k = {k}, u = {two_u}/2: lattice a = {a}, direct {direct}, reduced {via_degree}"));
            }
        }
    }
    pass("reduced-degree dimension equals scaled-lattice minimum in all 15 cases")
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 9] = [
        ("golden dimension table", golden_table),
        ("a = 2 anomaly", two_anomaly),
        ("construction validity", construction),
        ("negabinary bijection", negabinary),
        ("h1 certification", circle),
        ("riemann-roch sweep", rr_sweep),
        ("spot values", spot_values),
        ("property suites", properties),
        ("scaling invariance", scaling),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let status = if o.ok { "PASS" } else { "FAIL" };
        println!(
            "{status} criterion {} ({name}) [{:.2}s]: {}",
            i + 1,
            start.elapsed().as_secs_f64(),
            o.detail
        );
        failed += usize::from(!o.ok);
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
