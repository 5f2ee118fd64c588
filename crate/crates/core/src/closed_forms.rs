//! Closed-form point counts, translation periods and small arithmetic helpers.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::cartan::{DynkinType, Family};

/// Expected count and printed period for a catalog type.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CountFormulaResult {
    #[serde(rename = "type")]
    pub ty: DynkinType,
    #[serde(serialize_with = "crate::io::ser_big")]
    pub expected_count: BigUint,
    pub period: usize,
}

/// Binomial coefficient; zero when b > a.
pub fn binomial(a: u64, b: u64) -> BigUint {
    if b > a {
        return BigUint::zero();
    }
    let b = b.min(a - b);
    let mut r = BigUint::one();
    for i in 0..b {
        r = r * BigUint::from(a - i) / BigUint::from(i + 1);
    }
    r
}

/// The k-th Catalan number binom(2k, k)/(k+1).
pub fn catalan(k: u64) -> BigUint {
    binomial(2 * k, k) / BigUint::from(k + 1)
}

/// Number of positive divisors of m; zero for m = 0.
pub fn divisor_count(m: u64) -> u64 {
    if m == 0 {
        return 0;
    }
    let mut count = 0;
    let mut d = 1;
    while d * d <= m {
        if m.is_multiple_of(d) {
            count += if d * d == m { 1 } else { 2 };
        }
        d += 1;
    }
    count
}

/// Number of positive integral points of the catalog type's frieze system.
pub fn expected_count(t: DynkinType) -> BigUint {
    let n = t.rank as u64;
    match t.family {
        Family::A => catalan(n + 1),
        Family::B => {
            let top = (n + 1).isqrt();
            (1..=top).map(|m| binomial(2 * n - m * m + 1, n)).sum()
        }
        Family::C => binomial(2 * n, n),
        Family::D => (1..=n).map(|m| BigUint::from(divisor_count(m)) * binomial(2 * n - m - 1, n - m)).sum(),
        Family::E => BigUint::from(match n {
            6 => 868u32,
            7 => 4400,
            _ => 26952,
        }),
        Family::F => BigUint::from(112u32),
        Family::G => BigUint::from(9u32),
    }
}

/// The tabulated period P.
pub fn period(t: DynkinType) -> usize {
    let n = t.rank;
    match t.family {
        Family::A => n + 3,
        Family::B | Family::C => n + 1,
        Family::D => n,
        Family::E => match n {
            6 => 14,
            7 => 10,
            _ => 16,
        },
        Family::F => 7,
        Family::G => 4,
    }
}

/// Smallest period of the translation action on all points of the type.
///
/// Equals [`period`] except for D_n with n odd, where orbits of length 2n occur.
pub fn translation_period(t: DynkinType) -> usize {
    match t.family {
        Family::D if t.rank % 2 == 1 => 2 * t.rank,
        _ => period(t),
    }
}

/// Count and period bundle.
pub fn count_formula(t: DynkinType) -> CountFormulaResult {
    CountFormulaResult { ty: t, expected_count: expected_count(t), period: period(t) }
}
