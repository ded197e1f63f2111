//! Riemann-Roch over the absolute base 𝕊 for Arakelov divisors on the
//! compactification of Spec Z.
//!
//! The crate computes the 𝕊-module dimensions of H⁰(D) and H¹(D) exactly and
//! certifies them against brute-force oracles:
//!
//! * [`gamma`] models finite pointed sets, their maps, the subfunctor
//!   `(HA)_X` of tuples whose subset sums stay in `X`, and the norm module.
//! * [`negabinary`] is base −2: the sequence `j(n)`, the intervals `Δ(n)` and
//!   the bijection with 0/1 digit words.
//! * [`h0`] handles admissible subset-sum generation of `[-a, a]`, both the
//!   explicit constructions and an exhaustive minimal-cardinality search.
//! * [`h1`] handles the tolerant module `(R/Z, d)_λ`: generators `(-2)^{-j}`,
//!   exact covering radius and separation.
//! * [`degree`] carries `deg₂ D` exactly (rational part plus odd-prime
//!   logarithms) and decides comparisons.
//! * [`divisor`] ties everything together: divisors, `⌈x⌉′`, the Euler
//!   characteristic, sweeps and the step-function series.
//! * [`verify`] runs every invariant suite and produces a structured report.

pub mod degree;
pub mod divisor;
pub mod figure;
pub mod gamma;
pub mod h0;
pub mod h1;
pub mod negabinary;
pub mod parse;
pub mod verify;

pub use degree::{DegreeError, DegreeValue};
pub use divisor::{euler_characteristic, ArakelovDivisor, EulerReport};
pub use gamma::{PointedMap, PointedVector, Scalar, SubsetSpec};
pub use h0::{GeneratingCertificate, SearchOptions};
pub use h1::CirclePoint;
pub use negabinary::{DeltaInterval, NegabinaryWord};

/// Working configuration shared by the verification runner and the CLI.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct RunConfig {
    /// Precision cap (bits) for odd-prime logarithm enclosures.
    pub precision_bits: u32,
    /// Largest `a` for which the exhaustive minimal-set search is attempted.
    pub search_budget_a: u64,
    /// Largest generator count for 2^k subset enumerations.
    pub enumeration_cap: usize,
    /// Worker threads for the parallel searches (0 = available parallelism).
    pub workers: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            precision_bits: degree::DEFAULT_PRECISION_BITS,
            search_budget_a: h0::DEFAULT_SEARCH_BUDGET,
            enumeration_cap: h1::DEFAULT_ENUMERATION_CAP,
            workers: 0,
        }
    }
}
