//! Finite pointed sets, their morphisms, and the 𝕊-modules `HA`, `(HA)_X`
//! and `‖HA‖_λ` evaluated on `k₊`.
//!
//! A pointed set `k₊ = {*, 1, …, k}` is identified with its size `k`. An
//! element of `HA(k₊)` is a [`PointedVector`] of `k` exact rationals; the base
//! point is the all-zero vector. A [`PointedMap`] `φ: k₊ → m₊` acts by
//! `φ_*(a)(ℓ) = Σ_{φ(j) = ℓ} a_j`, with everything mapped to `*` discarded.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use thiserror::Error;

/// Exact scalar used throughout: arbitrary-precision rationals.
pub type Scalar = BigRational;

/// Largest level accepted by the `2^k` subset-sum oracle.
pub const MAX_ORACLE_LEVEL: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GammaError {
    #[error("level mismatch: expected {expected}, found {found}")]
    LevelMismatch { expected: usize, found: usize },
    #[error("image entry {entry} at position {position} is outside 1..={target}")]
    ImageOutOfRange {
        position: usize,
        entry: usize,
        target: usize,
    },
    #[error("subset enumeration over {level} entries exceeds the cap of {cap}")]
    TooLarge { level: usize, cap: usize },
    #[error("scalar vector has l1 norm {norm}, outside the unit ball")]
    NotInUnitBall { norm: Scalar },
    #[error("interval bound must be nonnegative, got {0}")]
    NegativeBound(Scalar),
    #[error("explicit subset must contain 0")]
    MissingZero,
}

/// Build a scalar from an integer.
pub fn int(n: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(n))
}

/// Build a scalar `num / den`. Panics when `den == 0`.
pub fn ratio(num: i64, den: i64) -> Scalar {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// A morphism of pointed sets `k₊ → m₊`.
///
/// `image[i]` is the image of the point `i + 1`; `None` is the base point.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PointedMap {
    target_size: usize,
    image: Vec<Option<usize>>,
}

impl PointedMap {
    pub fn new(target_size: usize, image: Vec<Option<usize>>) -> Result<Self, GammaError> {
        for (position, entry) in image.iter().enumerate() {
            if let Some(l) = *entry {
                if l == 0 || l > target_size {
                    return Err(GammaError::ImageOutOfRange {
                        position,
                        entry: l,
                        target: target_size,
                    });
                }
            }
        }
        Ok(PointedMap { target_size, image })
    }

    pub fn identity(k: usize) -> Self {
        PointedMap {
            target_size: k,
            image: (1..=k).map(Some).collect(),
        }
    }

    /// `σ: k₊ → 1₊`, every non-base point goes to 1.
    pub fn sigma(k: usize) -> Self {
        PointedMap {
            target_size: 1,
            image: vec![Some(1); k],
        }
    }

    /// `δ(j, k): k₊ → 1₊`, sends `j` to 1 and everything else to the base point.
    pub fn delta(j: usize, k: usize) -> Result<Self, GammaError> {
        if j == 0 || j > k {
            return Err(GammaError::ImageOutOfRange {
                position: 0,
                entry: j,
                target: k,
            });
        }
        Ok(PointedMap {
            target_size: 1,
            image: (1..=k).map(|l| (l == j).then_some(1)).collect(),
        })
    }

    pub fn source_size(&self) -> usize {
        self.image.len()
    }

    pub fn target_size(&self) -> usize {
        self.target_size
    }

    pub fn image(&self) -> &[Option<usize>] {
        &self.image
    }

    /// The composite `next ∘ self`.
    pub fn then(&self, next: &PointedMap) -> Result<PointedMap, GammaError> {
        if next.source_size() != self.target_size {
            return Err(GammaError::LevelMismatch {
                expected: self.target_size,
                found: next.source_size(),
            });
        }
        let image = self
            .image
            .iter()
            .map(|e| e.and_then(|l| next.image[l - 1]))
            .collect();
        Ok(PointedMap {
            target_size: next.target_size,
            image,
        })
    }

    /// Every pointed map `k₊ → m₊`, `(m + 1)^k` of them.
    pub fn enumerate(k: usize, m: usize) -> impl Iterator<Item = PointedMap> {
        let choices = m + 1;
        let total = choices.pow(k as u32);
        (0..total).map(move |mut code| {
            let image = (0..k)
                .map(|_| {
                    let digit = code % choices;
                    code /= choices;
                    (digit != 0).then_some(digit)
                })
                .collect();
            PointedMap {
                target_size: m,
                image,
            }
        })
    }
}

/// An element of `HA(k₊)`: a `k`-tuple of exact scalars.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PointedVector {
    entries: Vec<Scalar>,
}

impl PointedVector {
    pub fn new(entries: Vec<Scalar>) -> Self {
        PointedVector { entries }
    }

    pub fn from_integers(values: &[i64]) -> Self {
        PointedVector {
            entries: values.iter().map(|&v| int(v)).collect(),
        }
    }

    /// The base point of `HA(k₊)`.
    pub fn basepoint(k: usize) -> Self {
        PointedVector {
            entries: vec![Scalar::zero(); k],
        }
    }

    pub fn level(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.entries
    }

    pub fn is_basepoint(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    /// Sum of the strictly positive entries.
    pub fn positive_part(&self) -> Scalar {
        self.entries
            .iter()
            .filter(|e| e.is_positive())
            .fold(Scalar::zero(), |acc, e| acc + e)
    }

    /// Sum of the magnitudes of the strictly negative entries.
    pub fn negative_part(&self) -> Scalar {
        self.entries
            .iter()
            .filter(|e| e.is_negative())
            .fold(Scalar::zero(), |acc, e| acc - e)
    }

    pub fn l1_norm(&self) -> Scalar {
        self.entries
            .iter()
            .fold(Scalar::zero(), |acc, e| acc + e.abs())
    }

    /// Sum of all entries (the empty sum is 0).
    pub fn total(&self) -> Scalar {
        self.entries.iter().fold(Scalar::zero(), |acc, e| acc + e)
    }
}

impl fmt::Display for PointedVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// The subset `X ⊂ A` (containing 0) cutting out `(HA)_X`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SubsetSpec {
    /// `[-λ, λ] ⊂ Q`.
    SymmetricInterval(Scalar),
    /// `[-a, a] ∩ Z`.
    IntegerInterval(u64),
    /// An explicit finite set of scalars containing 0.
    Finite(BTreeSet<Scalar>),
}

impl SubsetSpec {
    pub fn symmetric(lambda: Scalar) -> Result<Self, GammaError> {
        if lambda.is_negative() {
            return Err(GammaError::NegativeBound(lambda));
        }
        Ok(SubsetSpec::SymmetricInterval(lambda))
    }

    pub fn finite(values: impl IntoIterator<Item = Scalar>) -> Result<Self, GammaError> {
        let set: BTreeSet<Scalar> = values.into_iter().collect();
        if !set.contains(&Scalar::zero()) {
            return Err(GammaError::MissingZero);
        }
        Ok(SubsetSpec::Finite(set))
    }

    pub fn contains(&self, x: &Scalar) -> bool {
        match self {
            SubsetSpec::SymmetricInterval(lambda) => x.abs() <= *lambda,
            SubsetSpec::IntegerInterval(a) => {
                x.is_integer() && x.abs() <= BigRational::from_integer(BigInt::from(*a))
            }
            SubsetSpec::Finite(set) => set.contains(x),
        }
    }
}

/// `φ_*(x)`: entry `ℓ` of the result is the sum of the entries of `x` sent to `ℓ`.
pub fn pushforward(phi: &PointedMap, x: &PointedVector) -> Result<PointedVector, GammaError> {
    if x.level() != phi.source_size() {
        return Err(GammaError::LevelMismatch {
            expected: phi.source_size(),
            found: x.level(),
        });
    }
    let mut out = vec![Scalar::zero(); phi.target_size()];
    for (value, target) in x.entries.iter().zip(phi.image.iter()) {
        if let Some(l) = target {
            out[l - 1] += value;
        }
    }
    Ok(PointedVector::new(out))
}

/// Membership in `(HA)_X(k₊)` by visiting all `2^k` subset sums.
///
/// Subsets are walked in Gray-code order so each step adds or removes a
/// single entry; the walk stops at the first sum outside `X`.
pub fn member_subfunctor(x: &PointedVector, subset: &SubsetSpec) -> Result<bool, GammaError> {
    let k = x.level();
    if k > MAX_ORACLE_LEVEL {
        return Err(GammaError::TooLarge {
            level: k,
            cap: MAX_ORACLE_LEVEL,
        });
    }
    let mut sum = Scalar::zero();
    if !subset.contains(&sum) {
        return Ok(false);
    }
    let mut gray = 0u32;
    for step in 1u32..(1u32 << k) {
        let bit = step.trailing_zeros() as usize;
        gray ^= 1 << bit;
        if gray & (1 << bit) != 0 {
            sum += &x.entries[bit];
        } else {
            sum -= &x.entries[bit];
        }
        if !subset.contains(&sum) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Membership in `(HA)_{[-λ, λ]}(k₊)` through the positive and negative parts.
pub fn member_fast_symmetric(x: &PointedVector, lambda: &Scalar) -> bool {
    x.positive_part() <= *lambda && x.negative_part() <= *lambda
}

/// Membership in the norm module `‖HA‖_λ(k₊)`.
pub fn member_norm(x: &PointedVector, lambda: &Scalar) -> bool {
    x.l1_norm() <= *lambda
}

/// Action of `‖HR‖₁` on `(HR)_X` through the smash product `Y ∧ Y′`.
///
/// Entries are laid out row-major: `b[i * a.level() + j] = alpha_i * a_j`.
pub fn smash_action(alpha: &PointedVector, a: &PointedVector) -> Result<PointedVector, GammaError> {
    if !member_norm(alpha, &int(1)) {
        return Err(GammaError::NotInUnitBall {
            norm: alpha.l1_norm(),
        });
    }
    let entries = alpha
        .entries
        .iter()
        .flat_map(|ai| a.entries.iter().map(move |aj| ai * aj))
        .collect();
    Ok(PointedVector::new(entries))
}

/// A realised sum `x = Σ_j x_j` inside a module: the element `z` of level `k`
/// whose `σ`-image is the total and whose `δ(j, k)`-images are the parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SumWitness {
    pub z: PointedVector,
}

impl SumWitness {
    pub fn total(&self) -> Scalar {
        let image = pushforward(&PointedMap::sigma(self.z.level()), &self.z)
            .expect("sigma has the witness level as source");
        image.entries[0].clone()
    }

    pub fn part(&self, j: usize) -> Result<Scalar, GammaError> {
        let delta = PointedMap::delta(j, self.z.level())?;
        Ok(pushforward(&delta, &self.z)?.entries[0].clone())
    }
}

/// Realise `Σ parts` in `(HA)_X`, or `None` when the parts do not form an
/// element of `(HA)_X(k₊)`.
pub fn sum_witness(
    parts: &[Scalar],
    subset: &SubsetSpec,
) -> Result<Option<SumWitness>, GammaError> {
    let z = PointedVector::new(parts.to_vec());
    Ok(member_subfunctor(&z, subset)?.then_some(SumWitness { z }))
}
