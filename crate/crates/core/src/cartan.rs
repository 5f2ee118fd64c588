//! Generalized Cartan matrices: validation, finiteness via principal minors,
//! the Dynkin catalog, exact inverses and component classification.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest rank accepted by the exhaustive principal-minor scan.
pub const MINOR_GUARD: usize = 14;

/// A validated generalized Cartan matrix.
///
/// Indices are 0-based in the API; rendered equations and the CLI use 1-based labels.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "GcmJson", into = "GcmJson")]
pub struct Gcm {
    entries: Vec<Vec<i64>>,
}

#[derive(Serialize, Deserialize)]
struct GcmJson {
    n: usize,
    entries: Vec<Vec<i64>>,
}

impl TryFrom<GcmJson> for Gcm {
    type Error = Error;
    fn try_from(j: GcmJson) -> Result<Gcm> {
        if j.entries.len() != j.n {
            return Err(Error::NotSquare);
        }
        validate_gcm(j.entries)
    }
}

impl From<Gcm> for GcmJson {
    fn from(c: Gcm) -> GcmJson {
        GcmJson { n: c.n(), entries: c.entries }
    }
}

/// Checks the three GCM invariants and wraps the entries.
pub fn validate_gcm(entries: Vec<Vec<i64>>) -> Result<Gcm> {
    let n = entries.len();
    if n == 0 || entries.iter().any(|r| r.len() != n) {
        return Err(Error::NotSquare);
    }
    for i in 0..n {
        if entries[i][i] != 2 {
            return Err(Error::Diagonal(i, entries[i][i]));
        }
        for j in 0..n {
            if i == j {
                continue;
            }
            if entries[i][j] > 0 {
                return Err(Error::PositiveOffDiagonal(i, j, entries[i][j]));
            }
            if (entries[i][j] == 0) != (entries[j][i] == 0) {
                return Err(Error::ZeroPatternAsymmetry(i, j));
            }
        }
    }
    Ok(Gcm { entries })
}

impl Gcm {
    /// Rank of the matrix.
    pub fn n(&self) -> usize {
        self.entries.len()
    }

    /// Entry c_{i,j}.
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i][j]
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[Vec<i64>] {
        &self.entries
    }

    /// The transposed matrix, which is again a GCM.
    pub fn transpose(&self) -> Gcm {
        let n = self.n();
        Gcm { entries: (0..n).map(|i| (0..n).map(|j| self.entries[j][i]).collect()).collect() }
    }

    /// Principal submatrix on the given (ascending) indices.
    pub fn principal(&self, keep: &[usize]) -> Gcm {
        Gcm { entries: keep.iter().map(|&i| keep.iter().map(|&j| self.entries[i][j]).collect()).collect() }
    }

    /// Neighbors of node k in the Dynkin graph.
    pub fn neighbors(&self, k: usize) -> Vec<usize> {
        (0..self.n()).filter(|&j| j != k && self.entries[j][k] != 0).collect()
    }

    /// Connected components of the Dynkin graph, each sorted ascending.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut stack = vec![s];
            let mut comp = Vec::new();
            while let Some(u) = stack.pop() {
                comp.push(u);
                for v in self.neighbors(u) {
                    if !seen[v] {
                        seen[v] = true;
                        stack.push(v);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }
}

impl fmt::Display for Gcm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .entries
            .iter()
            .map(|r| format!("[{}]", r.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")))
            .collect();
        write!(f, "[{}]", rows.join(","))
    }
}

/// Exact determinant by fraction-free Bareiss elimination.
pub fn determinant(m: &[Vec<i64>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// t_C: the minimum principal minor over all kept-index subsets, the empty subset contributing 1.
pub fn min_principal_minor(c: &Gcm) -> Result<BigInt> {
    let n = c.n();
    if n > MINOR_GUARD {
        return Err(Error::RankGuard(n, MINOR_GUARD));
    }
    let mut best = BigInt::one();
    for mask in 1u32..(1u32 << n) {
        let keep: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        let d = determinant(c.principal(&keep).entries());
        if d < best {
            best = d;
        }
    }
    Ok(best)
}

/// Finite type iff every principal minor is positive.
pub fn is_finite_type(c: &Gcm) -> Result<bool> {
    Ok(min_principal_minor(c)?.is_positive())
}

/// Families of finite Dynkin types.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

/// A catalog entry such as A4 or E8.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DynkinType {
    pub family: Family,
    pub rank: usize,
}

impl DynkinType {
    /// Builds a type, rejecting ranks outside the family's legal range.
    pub fn new(family: Family, rank: usize) -> Result<DynkinType> {
        let ok = match family {
            Family::A => rank >= 1,
            Family::B | Family::C => rank >= 2,
            Family::D => rank >= 3,
            Family::E => (6..=8).contains(&rank),
            Family::F => rank == 4,
            Family::G => rank == 2,
        };
        if ok {
            Ok(DynkinType { family, rank })
        } else {
            Err(Error::UnknownType(format!("{family:?}{rank}")))
        }
    }
}

impl fmt::Display for DynkinType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}{}", self.family, self.rank)
    }
}

impl FromStr for DynkinType {
    type Err = Error;
    fn from_str(s: &str) -> Result<DynkinType> {
        let s = s.trim();
        let mut chars = s.chars();
        let fam = match chars.next().map(|c| c.to_ascii_uppercase()) {
            Some('A') => Family::A,
            Some('B') => Family::B,
            Some('C') => Family::C,
            Some('D') => Family::D,
            Some('E') => Family::E,
            Some('F') => Family::F,
            Some('G') => Family::G,
            _ => return Err(Error::UnknownType(s.to_string())),
        };
        let rank: usize = chars.as_str().parse().map_err(|_| Error::UnknownType(s.to_string()))?;
        DynkinType::new(fam, rank).map_err(|_| Error::UnknownType(s.to_string()))
    }
}

impl Serialize for DynkinType {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for DynkinType {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn path(n: usize) -> Vec<Vec<i64>> {
    let mut m = vec![vec![0i64; n]; n];
    for i in 0..n {
        m[i][i] = 2;
        if i + 1 < n {
            m[i][i + 1] = -1;
            m[i + 1][i] = -1;
        }
    }
    m
}

fn edge(m: &mut [Vec<i64>], i: usize, j: usize) {
    m[i - 1][j - 1] = -1;
    m[j - 1][i - 1] = -1;
}

/// Catalog matrix for a Dynkin type.
///
/// Orientations are chosen so that the generated equations and point counts agree:
/// B_n yields `x1 y1 = x2 + 1`, `x2 y2 = x1^2 + x3` (count 21 at n = 3) and C_n yields
/// `x1 y1 = x2^2 + 1`, `x2 y2 = x1 + x3` (count 20 at n = 3).
pub fn dynkin_matrix(t: DynkinType) -> Gcm {
    let n = t.rank;
    let entries = match t.family {
        Family::A => path(n),
        Family::B => {
            let mut m = path(n);
            m[0][1] = -2;
            m
        }
        Family::C => {
            let mut m = path(n);
            m[1][0] = -2;
            m
        }
        Family::D => {
            let mut m = path(n);
            for i in 0..n - 1 {
                m[i][i + 1] = 0;
                m[i + 1][i] = 0;
            }
            edge(&mut m, 1, 3);
            edge(&mut m, 2, 3);
            for k in 3..n {
                edge(&mut m, k, k + 1);
            }
            m
        }
        Family::E => {
            let mut m = vec![vec![0i64; n]; n];
            for (i, row) in m.iter_mut().enumerate() {
                row[i] = 2;
            }
            edge(&mut m, 1, 4);
            edge(&mut m, 2, 3);
            edge(&mut m, 3, 4);
            for k in 4..n {
                edge(&mut m, k, k + 1);
            }
            m
        }
        Family::F => vec![vec![2, -1, 0, 0], vec![-1, 2, -2, 0], vec![0, -1, 2, -1], vec![0, 0, -1, 2]],
        Family::G => vec![vec![2, -3], vec![-1, 2]],
    };
    Gcm { entries }
}

/// Exact rational square matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMatrix {
    pub rows: Vec<Vec<BigRational>>,
}

impl RationalMatrix {
    /// Entry (i, j).
    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.rows[i][j]
    }

    /// Row sums.
    pub fn row_sums(&self) -> Vec<BigRational> {
        self.rows.iter().map(|r| r.iter().fold(BigRational::zero(), |a, b| a + b)).collect()
    }

    /// Least common denominator of all entries.
    pub fn common_denominator(&self) -> BigInt {
        self.rows.iter().flatten().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
    }
}

/// Exact inverse by Gauss-Jordan elimination over the rationals.
pub fn inverse_exact(c: &Gcm) -> Result<RationalMatrix> {
    let n = c.n();
    let mut a: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            (0..2 * n)
                .map(|j| {
                    if j < n {
                        BigRational::from_integer(c.get(i, j).into())
                    } else if j - n == i {
                        BigRational::one()
                    } else {
                        BigRational::zero()
                    }
                })
                .collect()
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero()).ok_or(Error::Singular)?;
        a.swap(col, piv);
        let inv = a[col][col].recip();
        for v in a[col].iter_mut() {
            *v *= &inv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for j in 0..2 * n {
                    let d = &f * &a[col][j];
                    a[r][j] -= d;
                }
            }
        }
    }
    Ok(RationalMatrix { rows: a.into_iter().map(|r| r[n..].to_vec()).collect() })
}

/// Nodes of Dynkin-graph degree exactly 1.
pub fn degree_one_nodes(c: &Gcm) -> Vec<usize> {
    (0..c.n()).filter(|&k| c.neighbors(k).len() == 1).collect()
}

/// Positive integer diagonal D with D·C symmetric, or `None` when C is not symmetrizable.
pub fn symmetrizer(c: &Gcm) -> Option<Vec<BigInt>> {
    let n = c.n();
    let mut d: Vec<Option<BigRational>> = vec![None; n];
    for comp in c.components() {
        d[comp[0]] = Some(BigRational::one());
        let mut stack = vec![comp[0]];
        while let Some(i) = stack.pop() {
            let di = d[i].clone()?;
            for j in c.neighbors(i) {
                let want = &di * BigRational::new(c.get(i, j).into(), c.get(j, i).into());
                match &d[j] {
                    Some(dj) if *dj != want => return None,
                    Some(_) => {}
                    None => {
                        d[j] = Some(want);
                        stack.push(j);
                    }
                }
            }
        }
    }
    let d: Vec<BigRational> = d.into_iter().collect::<Option<_>>()?;
    let l = d.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let ints: Vec<BigInt> = d.iter().map(|q| (q * BigRational::from_integer(l.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
    Some(ints.into_iter().map(|v| v / &g).collect())
}

/// Identifies the Dynkin type of every connected component, or `None` if C is not of finite type.
///
/// Each entry pairs a type with the component's node indices (ascending).
pub fn classify(c: &Gcm) -> Result<Option<Vec<(DynkinType, Vec<usize>)>>> {
    if !is_finite_type(c)? {
        return Ok(None);
    }
    let mut out = Vec::new();
    for comp in c.components() {
        let sub = c.principal(&comp);
        out.push((classify_connected(&sub), comp));
    }
    Ok(Some(out))
}

fn classify_connected(c: &Gcm) -> DynkinType {
    let n = c.n();
    let ty = |f, r| DynkinType { family: f, rank: r };
    if n == 1 {
        return ty(Family::A, 1);
    }
    let mut weighted = None;
    for i in 0..n {
        for j in 0..n {
            if i != j && c.get(i, j) * c.get(j, i) > 1 {
                weighted = Some((i, j, c.get(i, j) * c.get(j, i)));
            }
        }
    }
    let deg: Vec<usize> = (0..n).map(|k| c.neighbors(k).len()).collect();
    match weighted {
        Some((_, _, 3)) => ty(Family::G, 2),
        Some((i, j, _)) => {
            if n == 2 {
                return ty(Family::B, 2);
            }
            let (leaf, other) = if deg[i] == 1 {
                (i, j)
            } else if deg[j] == 1 {
                (j, i)
            } else {
                return ty(Family::F, 4);
            };
            if c.get(leaf, other) == -2 {
                ty(Family::B, n)
            } else {
                ty(Family::C, n)
            }
        }
        None => match (0..n).find(|&k| deg[k] == 3) {
            None => ty(Family::A, n),
            Some(b) => {
                let mut arms: Vec<usize> = c
                    .neighbors(b)
                    .into_iter()
                    .map(|start| {
                        let (mut prev, mut cur, mut len) = (b, start, 1);
                        loop {
                            let next: Vec<usize> = c.neighbors(cur).into_iter().filter(|&v| v != prev).collect();
                            match next.first() {
                                Some(&v) => {
                                    prev = cur;
                                    cur = v;
                                    len += 1;
                                }
                                None => break len,
                            }
                        }
                    })
                    .collect();
                arms.sort_unstable();
                match (arms[0], arms[1]) {
                    (1, 1) => ty(Family::D, n),
                    _ => ty(Family::E, n),
                }
            }
        },
    }
}
