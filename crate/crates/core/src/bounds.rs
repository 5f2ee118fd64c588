//! Explicit bounds: row sums of the inverse Cartan matrix, the b_i and c_i constants,
//! per-entry caps, the E8 refined constant and chain caps, and the tabulated N values.

use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::cartan::{inverse_exact, is_finite_type, DynkinType, Family, Gcm, RationalMatrix};
use crate::error::{Error, Result};

/// Fractional bits used when a real bound is emitted in fixed point.
pub const FRAC_BITS: u32 = 128;

fn ceil_root(v: &BigUint, d: u32) -> BigUint {
    let r = v.nth_root(d);
    if &r.pow(d) == v {
        r
    } else {
        r + 1u32
    }
}

fn to_biguint(v: &BigInt) -> BigUint {
    v.to_biguint().expect("nonnegative")
}

fn floor_pos(q: &BigRational) -> BigUint {
    to_biguint(&q.floor().to_integer())
}

fn ceil_pos(q: &BigRational) -> BigUint {
    to_biguint(&q.ceil().to_integer())
}

/// An exact positive real of the form base^(1/root) with rational base.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Surd {
    pub base: BigRational,
    pub root: u32,
}

impl Surd {
    /// ⌊value⌋.
    pub fn floor(&self) -> BigUint {
        floor_pos(&self.base).nth_root(self.root)
    }

    /// Smallest m with value ≤ m / 2^bits.
    pub fn upper_fixed(&self, bits: u32) -> BigUint {
        let scale = BigRational::from_integer(BigInt::one() << (bits as usize * self.root as usize));
        ceil_root(&ceil_pos(&(&self.base * scale)), self.root)
    }

    /// ⌊value^p / 2^shift⌋, computed exactly.
    pub fn pow_floor_shifted(&self, p: u32, shift: u32) -> BigUint {
        let num = self.base.numer().pow(p);
        let den = self.base.denom().pow(p) << (shift as usize * self.root as usize);
        to_biguint(&num.div_floor(&den)).nth_root(self.root)
    }

    /// Decimal expansion with `digits` fractional digits, rounded upward.
    pub fn decimal_up(&self, digits: u32) -> String {
        let scale = BigRational::from_integer(BigInt::from(10u32).pow(digits * self.root));
        let m = ceil_root(&ceil_pos(&(&self.base * scale)), self.root);
        let ten = BigUint::from(10u32).pow(digits);
        let (ip, fp) = m.div_rem(&ten);
        if digits == 0 {
            ip.to_string()
        } else {
            format!("{ip}.{:0>width$}", fp.to_string(), width = digits as usize)
        }
    }

    /// Floating approximation for display.
    pub fn to_f64(&self) -> f64 {
        let v = self.base.to_f64().unwrap_or(f64::INFINITY);
        v.powf(1.0 / self.root as f64)
    }

    /// Exact comparison value ≤ q for a rational q ≥ 0.
    pub fn le_rational(&self, q: &BigRational) -> bool {
        self.base <= q.pow(self.root as i32)
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.decimal_up(12))
    }
}

/// Π_j f_j^{q_j} as an exact surd; every exponent q_j must be positive.
fn product_of_powers(factors: &[BigRational], exps: &[BigRational]) -> Result<Surd> {
    let d = exps.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let mut base = BigRational::one();
    for (f, q) in factors.iter().zip(exps) {
        if !q.is_positive() {
            return Err(Error::NotFiniteType);
        }
        let e = (q * BigRational::from_integer(d.clone())).to_integer();
        base *= f.pow(e.to_i32().ok_or(Error::NotFiniteType)?);
    }
    Ok(Surd { base, root: d.to_u32().ok_or(Error::NotFiniteType)? })
}

fn two_pow(p: &BigRational) -> Surd {
    let e = p.numer().to_i32().expect("small exponent");
    let base = if e >= 0 {
        BigRational::from_integer(BigInt::one() << e as usize)
    } else {
        BigRational::new(BigInt::one(), BigInt::one() << (-e) as usize)
    };
    Surd { base, root: p.denom().to_u32().expect("small denominator") }
}

/// Bound data for one matrix and period.
#[derive(Clone, Debug)]
pub struct BoundProfile {
    pub inverse: RationalMatrix,
    pub log2_b: Vec<BigRational>,
    pub b_floor: Vec<BigUint>,
    pub c_values: Vec<Surd>,
    pub entry_caps: Vec<BigUint>,
    pub period: usize,
}

/// The factors 1 + 2^{s_j} with s_j the off-diagonal sum of row j.
fn neighbor_factors(c: &Gcm) -> Vec<BigRational> {
    (0..c.n())
        .map(|j| {
            let s: i64 = (0..c.n()).filter(|&k| k != j).map(|k| c.get(j, k)).sum();
            let p = BigInt::one() << (-s) as usize;
            BigRational::new(&p + 1u32, p)
        })
        .collect()
}

/// Computes b_i, c_i and the entry caps for a finite-type matrix and period P.
pub fn profile(c: &Gcm, period: usize) -> Result<BoundProfile> {
    if !is_finite_type(c)? {
        return Err(Error::NotFiniteType);
    }
    let inverse = inverse_exact(c)?;
    let log2_b = inverse.row_sums();
    let b_floor = log2_b.iter().map(|r| two_pow(r).floor()).collect();
    let entry_caps = log2_b
        .iter()
        .map(|r| {
            let s = two_pow(&(r * BigRational::from_integer(period.into())));
            ceil_root(&ceil_pos(&s.base), s.root)
        })
        .collect();
    let factors = neighbor_factors(c);
    let c_values = inverse.rows.iter().map(|row| product_of_powers(&factors, row)).collect::<Result<_>>()?;
    Ok(BoundProfile { inverse, log2_b, b_floor, c_values, entry_caps, period })
}

/// Row-wise Π_j (1 + 1/B_j)^{c^{-1}_{i,j}}, exact.
pub fn refined_c(c: &Gcm, b: &[BigUint]) -> Result<Vec<Surd>> {
    if b.len() != c.n() {
        return Err(Error::Length { expected: c.n(), got: b.len() });
    }
    if b.iter().any(|v| v < &BigUint::from(2u32)) {
        return Err(Error::Parameters("every B_j must be at least 2".into()));
    }
    if !is_finite_type(c)? {
        return Err(Error::NotFiniteType);
    }
    let inverse = inverse_exact(c)?;
    let factors: Vec<BigRational> = b
        .iter()
        .map(|v| {
            let v = BigInt::from_biguint(Sign::Plus, v.clone());
            BigRational::new(&v + 1u32, v)
        })
        .collect();
    inverse.rows.iter().map(|row| product_of_powers(&factors, row)).collect()
}

/// Caps for the search of points whose whole orbit has entries ≥ 2.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RestrictedBox {
    /// ⌊c_i⌋: some orbit member has x_i at most this.
    pub pivot_caps: Vec<BigUint>,
    /// ⌊c_i^P / 2^{P-1}⌋: every entry of row i is at most this.
    pub row_caps: Vec<BigUint>,
}

/// Restricted-search caps, taking the larger of the row and column conventions per row.
pub fn restricted_box(c: &Gcm, period: usize) -> Result<RestrictedBox> {
    let a = profile(c, period)?;
    let t = profile(&c.transpose(), period)?;
    let p = period as u32;
    let pivot_caps = a.c_values.iter().zip(&t.c_values).map(|(u, v)| u.floor().max(v.floor())).collect();
    let row_caps = a
        .c_values
        .iter()
        .zip(&t.c_values)
        .map(|(u, v)| u.pow_floor_shifted(p, p - 1).max(v.pow_floor_shifted(p, p - 1)))
        .collect();
    Ok(RestrictedBox { pivot_caps, row_caps })
}

/// Per-coordinate E8 caps given x4, as (x caps, y caps).
pub fn e8_chain_caps(x4: &BigUint) -> (Vec<BigUint>, Vec<BigUint>) {
    let p = |k: u32| x4 + k;
    let x = vec![p(1), p(2), p(1), x4.clone(), p(1), p(2), p(3), p(4)];
    let y = vec![p(1), p(2), p(2), p(3), p(2), p(3), p(4), p(4)];
    (x, y)
}

/// Sharper E8 caps under the assumption that every coordinate is at least 2, as (x caps, y caps).
pub fn e8_refined_fractional_caps(x4: &BigUint) -> (Vec<BigUint>, Vec<BigUint>) {
    let f = |a: u32, b: u32, d: u32| (x4 * a + b) / d;
    let shared = [f(1, 1, 2), f(1, 2, 3), f(2, 1, 3), BigUint::zero(), f(4, 1, 5), f(3, 2, 5), f(2, 3, 5), f(1, 4, 5)];
    let mut x = shared.to_vec();
    let mut y = shared.to_vec();
    x[3] = x4.clone();
    y[3] = x4 / 3u32 + 1u32;
    (x, y)
}

/// The explicit bound N on every coordinate of a point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TableN {
    #[serde(serialize_with = "crate::io::ser_big")]
    pub value: BigUint,
    /// For classical types the cap is N^P with this P.
    pub power: Option<usize>,
}

/// N_{Δn}, rounded up to an integer.
pub fn table_n(t: DynkinType) -> TableN {
    let n = t.rank as i64;
    let classical = |num: i64, den: i64| TableN {
        value: {
            let s = two_pow(&BigRational::new(num.into(), den.into()));
            ceil_root(&ceil_pos(&s.base), s.root)
        },
        power: Some(crate::closed_forms::period(t)),
    };
    let fixed = |v: u32| TableN { value: BigUint::from(v), power: None };
    match t.family {
        Family::A => classical((n + 1) * (n + 1), 8),
        Family::B => classical((n + 1) * (n - 2), 2),
        Family::C | Family::D => classical(n * n, 2),
        Family::E => fixed(match n {
            6 => 307,
            7 => 135503,
            _ => 2820839,
        }),
        Family::F => fixed(307),
        Family::G => fixed(14),
    }
}
