//! Rank-2 and rank-3 Mordell–Schinzel equations: the matrices, the maps from frieze
//! points to surface solutions, mutation streams for infinite types, and brute-force
//! solution counts with explicit caps.
//!
//! Caps. For x ≥ 2 and y·(xz − 1) = K with K ≡ 1 (mod x), both y and K/y are ≡ −1
//! (mod x). Write y = mx − 1, K/y = kx − 1 and K = 1 + k1·x + k2·x² + k3·x³. Then
//! m + k = tx − k1 with t ≥ 1 and (m−1)(k−1) + (t−1)(x−1) = L(x) := k2 + k3·x − x + k1 + 2.
//! For monic K of degree at most 3, L is nonincreasing, which gives
//! x ≤ max(1 + L(2), L(2) + 3 + k1). In rank 3 write g = gcd(y, z), y = gβ, z = gα;
//! then α | P, β | Q, x·g·w = P/α + Q/β, and αQ/β, βP/α are ≡ −1 (mod x) with product PQ,
//! so the same cap applies with K = PQ.

use std::collections::HashSet;

use num_bigint::BigUint;
use num_integer::Integer as _;
use num_traits::One;
use rug::integer::Order;
use rug::ops::Pow;
use rug::Integer;
use serde::Serialize;

use crate::cartan::{is_finite_type, validate_gcm, Gcm};
use crate::error::{Error, Result};
use crate::frieze::{knit_next, make_point, solve_y, FriezePoint};

fn check_positive(params: &[u32]) -> Result<()> {
    if params.contains(&0) {
        return Err(Error::Parameters(format!("parameters must be positive: {params:?}")));
    }
    Ok(())
}

/// Matrix with equations x1y1 = x2^a + 1, x2y2 = x1^b + 1.
pub fn rank2_matrix(a: u32, b: u32) -> Result<Gcm> {
    check_positive(&[a, b])?;
    validate_gcm(vec![vec![2, -(b as i64)], vec![-(a as i64), 2]])
}

/// Matrix with equations x1y1 = x2^a + 1, x2y2 = x1^b + x3^d, x3y3 = x2^c + 1.
pub fn rank3_matrix(a: u32, b: u32, c: u32, d: u32) -> Result<Gcm> {
    check_positive(&[a, b, c, d])?;
    let (a, b, c, d) = (a as i64, b as i64, c as i64, d as i64);
    validate_gcm(vec![vec![2, -b, 0], vec![-a, 2, -c], vec![0, -d, 2]])
}

fn surface2_residue_free(t: &[BigUint], a: u32, b: u32) -> bool {
    let (x, y, z) = (&t[0], &t[1], &t[2]);
    x * y * z == (x.pow(a) + 1u32).pow(b) + y
}

fn surface3_residue_free(t: &[BigUint], a: u32, b: u32, c: u32, d: u32) -> bool {
    let (x, y, z, w) = (&t[0], &t[1], &t[2], &t[3]);
    x * y * z * w == (x.pow(a) + 1u32).pow(b) * y + (x.pow(c) + 1u32).pow(d) * z
}

/// (x, y, z) = (x2, y1^b, y2), a solution of x·y·z = (x^a + 1)^b + y.
pub fn to_surface2(p: &FriezePoint, a: u32, b: u32) -> Result<Vec<BigUint>> {
    let p = make_point(&rank2_matrix(a, b)?, p.x.clone(), p.y.clone())?;
    let t = vec![p.x[1].clone(), p.y[0].pow(b), p.y[1].clone()];
    if !surface2_residue_free(&t, a, b) {
        return Err(Error::Residue(vec![1]));
    }
    Ok(t)
}

/// (x, y, z, w) = (x2, y3^d, y1^b, y2), a solution of
/// x·y·z·w = (x^a + 1)^b·y + (x^c + 1)^d·z.
pub fn to_surface3(p: &FriezePoint, a: u32, b: u32, c: u32, d: u32) -> Result<Vec<BigUint>> {
    let p = make_point(&rank3_matrix(a, b, c, d)?, p.x.clone(), p.y.clone())?;
    let t = vec![p.x[1].clone(), p.y[2].pow(d), p.y[0].pow(b), p.y[1].clone()];
    if !surface3_residue_free(&t, a, b, c, d) {
        return Err(Error::Residue(vec![1]));
    }
    Ok(t)
}

/// The rank-2 exchange recurrence s_{k+1} = (s_k^{e_k} + 1)/s_{k−1} from s_1 = s_2 = 1,
/// with e_k = b for odd k and e_k = a for even k. Terms grow doubly exponentially for
/// ab ≥ 5, so the arithmetic runs on GMP integers.
#[derive(Clone, Debug)]
pub struct MutationStream {
    pub a: u32,
    pub b: u32,
    prev: Integer,
    cur: Integer,
    /// Index of `cur`.
    k: usize,
}

/// Phase label recorded in stream output.
pub const STREAM_PHASE: &str = "e_k = b for odd k, a for even k";

impl MutationStream {
    /// Starts at the seed (1, 1).
    pub fn new(a: u32, b: u32) -> Result<MutationStream> {
        check_positive(&[a, b])?;
        Ok(MutationStream { a, b, prev: Integer::new(), cur: Integer::from(1), k: 0 })
    }

    fn exponent(&self, k: usize) -> u32 {
        if k % 2 == 1 {
            self.b
        } else {
            self.a
        }
    }

    /// Next term as a GMP integer.
    pub fn next_integer(&mut self) -> Result<Integer> {
        let next = match self.k {
            0 | 1 => Integer::from(1),
            k => {
                let num = Integer::from((&self.cur).pow(self.exponent(k))) + 1u32;
                if !num.is_divisible(&self.prev) {
                    return Err(Error::StreamDivision(k + 1));
                }
                num.div_exact(&self.prev)
            }
        };
        self.prev = std::mem::replace(&mut self.cur, next.clone());
        self.k += 1;
        Ok(next)
    }
}

impl Iterator for MutationStream {
    type Item = Result<BigUint>;

    fn next(&mut self) -> Option<Result<BigUint>> {
        Some(self.next_integer().map(|t| to_biguint(&t)))
    }
}

/// Converts a nonnegative GMP integer.
pub fn to_biguint(v: &Integer) -> BigUint {
    BigUint::from_slice(&v.to_digits::<u32>(Order::Lsf))
}

/// Converts to a GMP integer.
pub fn to_integer(v: &BigUint) -> Integer {
    Integer::from_digits(&v.to_u32_digits(), Order::Lsf)
}

/// One emitted stream element.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StreamItem {
    pub index: usize,
    pub point: FriezePoint,
    #[serde(serialize_with = "crate::io::ser_big_vec")]
    pub surface: Vec<BigUint>,
}

/// The first `count` points (s_k, s_{k+1}) of the stream, oriented as points of
/// `rank2_matrix(a, b)`, with their surface triples. Requires ab ≥ 4.
///
/// The y-coordinates of item k are s_{k−1} and s_{k+2}, where s_0 = 2. Both frieze
/// equations are checked exactly on GMP integers; the surface equation is their consequence.
pub fn stream2(a: u32, b: u32, count: usize) -> Result<Vec<StreamItem>> {
    check_positive(&[a, b])?;
    if a * b < 4 {
        return Err(Error::Parameters(format!("stream2 needs ab ≥ 4, got a = {a}, b = {b}")));
    }
    let mut stream = MutationStream::new(a, b)?;
    let mut s = vec![Integer::from(2)];
    for _ in 0..count + 2 {
        s.push(stream.next_integer()?);
    }
    (1..=count)
        .map(|k| {
            let (x, y) = if k % 2 == 1 {
                ([&s[k], &s[k + 1]], [&s[k + 2], &s[k - 1]])
            } else {
                ([&s[k + 1], &s[k]], [&s[k - 1], &s[k + 2]])
            };
            if Integer::from(x[0] * y[0]) != Integer::from(x[1].pow(a)) + 1u32 {
                return Err(Error::Residue(vec![0]));
            }
            if Integer::from(x[1] * y[1]) != Integer::from(x[0].pow(b)) + 1u32 {
                return Err(Error::Residue(vec![1]));
            }
            let yb = Integer::from(y[0].pow(b));
            let point = FriezePoint { x: x.map(to_biguint).to_vec(), y: y.map(to_biguint).to_vec() };
            let surface = vec![to_biguint(x[1]), to_biguint(&yb), to_biguint(y[1])];
            Ok(StreamItem { index: k, point, surface })
        })
        .collect()
}

/// `count` distinct points of `rank3_matrix(a, b, c, d)` along the knitting walk from
/// (1, 1, 1), with their surface quadruples. Requires an infinite-type matrix.
pub fn stream3(a: u32, b: u32, c: u32, d: u32, count: usize) -> Result<Vec<StreamItem>> {
    let m = rank3_matrix(a, b, c, d)?;
    if is_finite_type(&m)? {
        return Err(Error::Parameters(format!("stream3 needs abcd ≥ 3, got ({a}, {b}, {c}, {d})")));
    }
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(count);
    let mut x = vec![BigUint::one(); 3];
    let mut step = 0;
    while out.len() < count {
        step += 1;
        if step > 4 * count + 8 {
            return Err(Error::Parameters("knitting walk revisits points".into()));
        }
        let y = solve_y(&m, &x).ok_or(Error::StreamDivision(step))?;
        let point = make_point(&m, x.clone(), y)?;
        if seen.insert(x.clone()) {
            let surface = to_surface3(&point, a, b, c, d)?;
            out.push(StreamItem { index: step, point, surface });
        }
        x = knit_next(&m, &x).ok_or(Error::StreamDivision(step))?;
    }
    Ok(out)
}

/// Coefficients of (x^a + 1)^b, lowest degree first.
fn poly_power(a: u32, b: u32) -> Vec<u64> {
    let mut base = vec![0u64; a as usize + 1];
    base[0] = 1;
    base[a as usize] += 1;
    let mut acc = vec![1u64];
    for _ in 0..b {
        acc = poly_mul(&acc, &base);
    }
    acc
}

fn poly_mul(p: &[u64], q: &[u64]) -> Vec<u64> {
    let mut r = vec![0u64; p.len() + q.len() - 1];
    for (i, a) in p.iter().enumerate() {
        for (j, b) in q.iter().enumerate() {
            r[i + j] += a * b;
        }
    }
    r
}

fn poly_eval(p: &[u64], x: u64) -> u64 {
    p.iter().rev().fold(0, |acc, c| acc * x + c)
}

/// Cap on x for y·(xz − 1) = K(x) with K monic of degree at most 3 and K(0) = 1.
pub fn x_cap(k: &[u64]) -> Result<u64> {
    if k.len() > 4 || k.first() != Some(&1) || k.last() != Some(&1) {
        return Err(Error::Parameters(format!("cap needs a monic polynomial of degree ≤ 3 with K(0) = 1, got {k:?}")));
    }
    let coef = |i: usize| k.get(i).copied().unwrap_or(0) as i64;
    let l2 = coef(2) + 2 * coef(3) - 2 + coef(1) + 2;
    Ok((1 + l2).max(l2 + 3 + coef(1)).max(1) as u64)
}

fn divisors(m: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= m {
        if m.is_multiple_of(d) {
            small.push(d);
            if d * d != m {
                large.push(m / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

fn is_power_of_divisor(v: u64, e: u32, of: u64) -> bool {
    (1..=of).take_while(|t| t.pow(e) <= v).any(|t| t.pow(e) == v && of.is_multiple_of(t))
}

/// Which solution set a brute-force count covers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolutionSet {
    /// Every positive solution of the equation.
    Literal,
    /// Solutions whose y (and in rank 3 also z) is the required power of a divisor of
    /// x^a + 1 (resp. x^c + 1); exactly the image of the frieze points.
    FriezeImage,
}

/// All positive solutions (x, y, z) of x·y·z = (x^a + 1)^b + y; requires ab ≤ 3.
pub fn brute_force_surface2(a: u32, b: u32, set: SolutionSet) -> Result<Vec<[u64; 3]>> {
    check_positive(&[a, b])?;
    if a * b > 3 {
        return Err(Error::Parameters(format!("finite range needs ab ≤ 3, got a = {a}, b = {b}")));
    }
    let kp = poly_power(a, b);
    let mut out = Vec::new();
    for x in 1..=x_cap(&kp)? {
        let k = poly_eval(&kp, x);
        let base = x.pow(a) + 1;
        for y in divisors(k) {
            let rest = k / y + 1;
            if rest.is_multiple_of(x) && (set == SolutionSet::Literal || is_power_of_divisor(y, b, base)) {
                out.push([x, y, rest / x]);
            }
        }
    }
    Ok(out)
}

/// All positive solutions (x, y, z, w) of x·y·z·w = (x^a + 1)^b·y + (x^c + 1)^d·z;
/// requires abcd ≤ 2.
pub fn brute_force_surface3(a: u32, b: u32, c: u32, d: u32, set: SolutionSet) -> Result<Vec<[u64; 4]>> {
    check_positive(&[a, b, c, d])?;
    if a * b * c * d > 2 {
        return Err(Error::Parameters(format!("finite range needs abcd ≤ 2, got ({a}, {b}, {c}, {d})")));
    }
    let pp = poly_power(a, b);
    let qp = poly_power(c, d);
    let mut out = Vec::new();
    for x in 1..=x_cap(&poly_mul(&pp, &qp))? {
        let (p, q) = (poly_eval(&pp, x), poly_eval(&qp, x));
        for alpha in divisors(p) {
            for beta in divisors(q) {
                if alpha.gcd(&beta) != 1 {
                    continue;
                }
                let s = p / alpha + q / beta;
                if s % x != 0 {
                    continue;
                }
                for g in divisors(s / x) {
                    let (y, z, w) = (g * beta, g * alpha, s / x / g);
                    let image = is_power_of_divisor(y, d, x.pow(c) + 1) && is_power_of_divisor(z, b, x.pow(a) + 1);
                    if set == SolutionSet::Literal || image {
                        out.push([x, y, z, w]);
                    }
                }
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}
