//! Frieze polynomial systems: points, knitting, the translation action, orbits and grids.

use std::fmt::Write as _;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::cartan::{classify, DynkinType, Gcm};
use crate::closed_forms;
use crate::error::{Error, Result};

/// Exponent terms of equation i: `lo` holds (j, -c_{j,i}) for j < i, `hi` for j > i.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equation {
    pub lo: Vec<(usize, u32)>,
    pub hi: Vec<(usize, u32)>,
}

/// The per-row exponent data of the lower-bound model.
pub fn equations(c: &Gcm) -> Vec<Equation> {
    let n = c.n();
    (0..n)
        .map(|i| {
            let term = |j: usize| (j, (-c.get(j, i)) as u32);
            Equation {
                lo: (0..i).filter(|&j| c.get(j, i) != 0).map(term).collect(),
                hi: (i + 1..n).filter(|&j| c.get(j, i) != 0).map(term).collect(),
            }
        })
        .collect()
}

/// Product of x_j^e over the terms.
pub fn monomial(terms: &[(usize, u32)], x: &[BigUint]) -> BigUint {
    terms.iter().fold(BigUint::one(), |acc, &(j, e)| acc * x[j].pow(e))
}

/// A positive integral point (x; y) of the lower-bound system.
///
/// Ordering is lexicographic on x, then y.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FriezePoint {
    #[serde(serialize_with = "crate::io::ser_big_vec")]
    pub x: Vec<BigUint>,
    #[serde(serialize_with = "crate::io::ser_big_vec")]
    pub y: Vec<BigUint>,
}

impl FriezePoint {
    /// Smallest entry across x and y.
    pub fn min_entry(&self) -> BigUint {
        self.x.iter().chain(&self.y).min().cloned().unwrap_or_default()
    }

    /// Largest entry across x and y.
    pub fn max_entry(&self) -> BigUint {
        self.x.iter().chain(&self.y).max().cloned().unwrap_or_default()
    }

    /// Builds a point from small integers without validation.
    pub fn from_u64(x: &[u64], y: &[u64]) -> FriezePoint {
        FriezePoint { x: x.iter().map(|&v| v.into()).collect(), y: y.iter().map(|&v| v.into()).collect() }
    }
}

/// A point (x; z) of the GLS model.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct GlsPoint {
    #[serde(serialize_with = "crate::io::ser_big_vec")]
    pub x: Vec<BigUint>,
    #[serde(serialize_with = "crate::io::ser_big_vec")]
    pub z: Vec<BigUint>,
}

/// An n × P array of frieze entries, stored row-major.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FriezeGrid {
    #[serde(rename = "P")]
    pub period: usize,
    #[serde(rename = "F", serialize_with = "ser_rows")]
    pub rows: Vec<Vec<BigUint>>,
}

fn ser_rows<S: serde::Serializer>(rows: &[Vec<BigUint>], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(rows.iter().map(|r| crate::io::big_strings(r)))
}

fn check_len(c: &Gcm, v: &[BigUint]) -> Result<()> {
    if v.len() != c.n() {
        return Err(Error::Length { expected: c.n(), got: v.len() });
    }
    if v.iter().any(|e| e.is_zero()) {
        return Err(Error::Nonpositive);
    }
    Ok(())
}

fn solve_y_with(eqs: &[Equation], x: &[BigUint]) -> Option<Vec<BigUint>> {
    eqs.iter()
        .zip(x)
        .map(|(eq, xi)| {
            let s = monomial(&eq.lo, x) + monomial(&eq.hi, x);
            let (q, r) = s.div_rem(xi);
            r.is_zero().then_some(q)
        })
        .collect()
}

fn knit_with(eqs: &[Equation], x: &[BigUint]) -> Option<Vec<BigUint>> {
    let mut z: Vec<BigUint> = Vec::with_capacity(x.len());
    for (i, eq) in eqs.iter().enumerate() {
        let s = monomial(&eq.hi, x) * monomial(&eq.lo, &z) + BigUint::one();
        let (q, r) = s.div_rem(&x[i]);
        if !r.is_zero() {
            return None;
        }
        z.push(q);
    }
    Some(z)
}

/// Renders the equations in the style `x2 y2 = x1^3 + 1`.
pub fn equations_render(c: &Gcm) -> Vec<String> {
    let mono = |terms: &[(usize, u32)]| -> Option<String> {
        if terms.is_empty() {
            return None;
        }
        Some(
            terms
                .iter()
                .map(|&(j, e)| if e == 1 { format!("x{}", j + 1) } else { format!("x{}^{}", j + 1, e) })
                .collect::<Vec<_>>()
                .join(" "),
        )
    };
    equations(c)
        .iter()
        .enumerate()
        .map(|(i, eq)| {
            let rhs = match (mono(&eq.lo), mono(&eq.hi)) {
                (None, None) => "2".to_string(),
                (Some(m), None) | (None, Some(m)) => format!("{m} + 1"),
                (Some(a), Some(b)) => format!("{a} + {b}"),
            };
            format!("x{0} y{0} = {1}", i + 1, rhs)
        })
        .collect()
}

/// Solves every equation for y_i; `None` if some division is not exact.
pub fn solve_y(c: &Gcm, x: &[BigUint]) -> Option<Vec<BigUint>> {
    if check_len(c, x).is_err() {
        return None;
    }
    solve_y_with(&equations(c), x)
}

/// Validates (x; y) against the system, listing every violated equation (1-based).
pub fn make_point(c: &Gcm, x: Vec<BigUint>, y: Vec<BigUint>) -> Result<FriezePoint> {
    check_len(c, &x)?;
    check_len(c, &y)?;
    let bad: Vec<usize> = equations(c)
        .iter()
        .enumerate()
        .filter(|(i, eq)| &x[*i] * &y[*i] != monomial(&eq.lo, &x) + monomial(&eq.hi, &x))
        .map(|(i, _)| i + 1)
        .collect();
    if bad.is_empty() {
        Ok(FriezePoint { x, y })
    } else {
        Err(Error::Residue(bad))
    }
}

/// Computes z from x by knitting in ascending row order; `None` at the first non-exact division.
pub fn knit_next(c: &Gcm, x: &[BigUint]) -> Option<Vec<BigUint>> {
    if check_len(c, x).is_err() {
        return None;
    }
    knit_with(&equations(c), x)
}

/// A matrix together with its equation data and, for finite types, its translation period.
#[derive(Clone, Debug)]
pub struct FriezeSystem {
    gcm: Gcm,
    eqs: Vec<Equation>,
    types: Option<Vec<(DynkinType, Vec<usize>)>>,
    period: Option<usize>,
}

impl FriezeSystem {
    /// Prepares a system; finiteness and the period are determined up front.
    pub fn new(gcm: Gcm) -> Result<FriezeSystem> {
        let types = classify(&gcm)?;
        let period = types
            .as_ref()
            .map(|ts| ts.iter().fold(1usize, |acc, (t, _)| acc.lcm(&closed_forms::translation_period(*t))));
        Ok(FriezeSystem { eqs: equations(&gcm), gcm, types, period })
    }

    /// Prepares the system of a catalog type.
    pub fn catalog(t: DynkinType) -> FriezeSystem {
        FriezeSystem::new(crate::cartan::dynkin_matrix(t)).expect("catalog matrices are within the rank guard")
    }

    /// The underlying matrix.
    pub fn gcm(&self) -> &Gcm {
        &self.gcm
    }

    /// Rank.
    pub fn n(&self) -> usize {
        self.gcm.n()
    }

    /// Equation data.
    pub fn equations(&self) -> &[Equation] {
        &self.eqs
    }

    /// Component types, or `None` for non-finite matrices.
    pub fn types(&self) -> Option<&[(DynkinType, Vec<usize>)]> {
        self.types.as_deref()
    }

    /// Translation period (lcm over components), or `None` for non-finite matrices.
    pub fn period(&self) -> Option<usize> {
        self.period
    }

    /// Tabulated period: lcm of the printed per-component periods.
    pub fn printed_period(&self) -> Option<usize> {
        self.types
            .as_ref()
            .map(|ts| ts.iter().fold(1usize, |acc, (t, _)| acc.lcm(&closed_forms::period(*t))))
    }

    fn finite_period(&self) -> Result<usize> {
        self.period.ok_or(Error::NotFiniteType)
    }

    /// See [`solve_y`].
    pub fn solve_y(&self, x: &[BigUint]) -> Option<Vec<BigUint>> {
        if x.len() != self.n() || x.iter().any(|v| v.is_zero()) {
            return None;
        }
        solve_y_with(&self.eqs, x)
    }

    /// See [`knit_next`].
    pub fn knit_next(&self, x: &[BigUint]) -> Option<Vec<BigUint>> {
        if x.len() != self.n() || x.iter().any(|v| v.is_zero()) {
            return None;
        }
        knit_with(&self.eqs, x)
    }

    /// Point with the given x, if y solves exactly.
    pub fn point_from_x(&self, x: Vec<BigUint>) -> Option<FriezePoint> {
        let y = self.solve_y(&x)?;
        Some(FriezePoint { x, y })
    }

    /// The x-part of σ(p), without re-deriving y.
    pub fn translate_x(&self, x: &[BigUint]) -> Result<Vec<BigUint>> {
        self.finite_period()?;
        let z = self.knit_next(x).ok_or(Error::KnitFailure)?;
        self.solve_y(&z).ok_or(Error::KnitFailure)?;
        Ok(z)
    }

    /// σ(p): knit the next diagonal, then re-solve y.
    pub fn translate(&self, p: &FriezePoint) -> Result<FriezePoint> {
        self.finite_period()?;
        let z = self.knit_next(&p.x).ok_or(Error::KnitFailure)?;
        self.point_from_x(z).ok_or(Error::KnitFailure)
    }

    /// The distinct points p, σ(p), σ²(p), … up to the return to p.
    pub fn orbit(&self, p: &FriezePoint) -> Result<Vec<FriezePoint>> {
        let period = self.finite_period()?;
        let mut out = vec![p.clone()];
        let mut cur = self.translate(p)?;
        while cur != *p {
            if out.len() >= period {
                return Err(Error::Period(format!("no return to the start within {period} steps")));
            }
            out.push(cur.clone());
            cur = self.translate(&cur)?;
        }
        if period % out.len() != 0 {
            return Err(Error::Period(format!("orbit length {} does not divide {period}", out.len())));
        }
        Ok(out)
    }

    /// Grid whose column j is the x-part of σ^{j-1}(p), for j = 1..P.
    pub fn frieze_grid(&self, p: &FriezePoint) -> Result<FriezeGrid> {
        let period = self.finite_period()?;
        let n = self.n();
        let mut rows = vec![Vec::with_capacity(period); n];
        let mut cur = p.x.clone();
        for _ in 0..period {
            for (i, row) in rows.iter_mut().enumerate() {
                row.push(cur[i].clone());
            }
            cur = self.translate_x(&cur)?;
        }
        if cur != p.x {
            return Err(Error::Period(format!("σ^{period} is not the identity")));
        }
        Ok(FriezeGrid { period, rows })
    }

    /// Checks every mesh relation of a grid, including the wraparound column.
    pub fn mesh_holds(&self, g: &FriezeGrid) -> bool {
        let p = g.period;
        let col = |j: usize| -> Vec<BigUint> { g.rows.iter().map(|r| r[j % p].clone()).collect() };
        (0..p).all(|j| {
            let (a, b) = (col(j), col(j + 1));
            self.eqs.iter().enumerate().all(|(i, eq)| {
                &a[i] * &b[i] == monomial(&eq.lo, &b) * monomial(&eq.hi, &a) + BigUint::one()
            })
        })
    }

    /// The corresponding GLS point (x, knit_next(x)).
    pub fn to_gls(&self, p: &FriezePoint) -> Result<GlsPoint> {
        self.finite_period()?;
        let z = self.knit_next(&p.x).ok_or(Error::KnitFailure)?;
        Ok(GlsPoint { x: p.x.clone(), z })
    }
}

/// Checks that (x; z) satisfies every GLS equation.
pub fn gls_holds(c: &Gcm, q: &GlsPoint) -> bool {
    equations(c)
        .iter()
        .enumerate()
        .all(|(i, eq)| &q.x[i] * &q.z[i] == monomial(&eq.hi, &q.x) * monomial(&eq.lo, &q.z) + BigUint::one())
}

/// Staggered text layout: row i is shifted by half a cell per row, one column per translate.
pub fn render_ascii(g: &FriezeGrid) -> String {
    let width = g.rows.iter().flatten().map(|v| v.to_string().len()).max().unwrap_or(1) + 1;
    let cell = 2 * width;
    let mut out = String::new();
    for (i, row) in g.rows.iter().enumerate() {
        let mut line = " ".repeat((i % 2) * width);
        for v in row {
            let _ = write!(line, "{:>cell$}", v.to_string());
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::dynkin_matrix;

    fn t(s: &str) -> DynkinType {
        s.parse().unwrap()
    }

    fn b(v: &[u64]) -> Vec<BigUint> {
        v.iter().map(|&e| e.into()).collect()
    }

    #[test]
    fn render_examples() {
        assert_eq!(equations_render(&dynkin_matrix(t("G2"))), vec!["x1 y1 = x2 + 1", "x2 y2 = x1^3 + 1"]);
        assert_eq!(equations_render(&dynkin_matrix(t("A1"))), vec!["x1 y1 = 2"]);
        assert_eq!(
            equations_render(&dynkin_matrix(t("F4"))),
            vec!["x1 y1 = x2 + 1", "x2 y2 = x1 + x3", "x3 y3 = x2^2 + x4", "x4 y4 = x3 + 1"]
        );
        let e8 = equations_render(&dynkin_matrix(t("E8")));
        assert_eq!(e8[0], "x1 y1 = x4 + 1");
        assert_eq!(e8[2], "x3 y3 = x2 + x4");
        assert_eq!(e8[3], "x4 y4 = x1 x3 + x5");
        assert_eq!(equations_render(&dynkin_matrix(t("D4")))[2], "x3 y3 = x1 x2 + x4");
        assert_eq!(&equations_render(&dynkin_matrix(t("B3")))[..2], ["x1 y1 = x2 + 1", "x2 y2 = x1^2 + x3"]);
        assert_eq!(&equations_render(&dynkin_matrix(t("C3")))[..2], ["x1 y1 = x2^2 + 1", "x2 y2 = x1 + x3"]);
    }

    #[test]
    fn solve_examples() {
        let g2 = dynkin_matrix(t("G2"));
        assert_eq!(solve_y(&g2, &b(&[2, 9])), Some(b(&[5, 1])));
        assert_eq!(solve_y(&g2, &b(&[4, 3])), None);
        let e8 = dynkin_matrix(t("E8"));
        assert_eq!(
            solve_y(&e8, &b(&[1320, 165, 16994, 2820839, 134632, 6433, 461, 21])),
            Some(b(&[2137, 103, 166, 8, 21, 21, 14, 22]))
        );
    }

    #[test]
    fn make_point_examples() {
        let a2 = dynkin_matrix(t("A2"));
        assert!(make_point(&a2, b(&[1, 1]), b(&[2, 2])).is_ok());
        assert!(matches!(make_point(&a2, b(&[1, 1]), b(&[2, 3])), Err(Error::Residue(v)) if v == vec![2]));
        assert!(matches!(make_point(&a2, b(&[0, 1]), b(&[2, 3])), Err(Error::Nonpositive)));
        let e8 = dynkin_matrix(t("E8"));
        assert!(make_point(&e8, b(&[6, 4, 11, 29, 21, 13, 5, 2]), b(&[5, 3, 3, 3, 2, 2, 3, 3])).is_ok());
    }

    #[test]
    fn knit_examples() {
        let a2 = dynkin_matrix(t("A2"));
        assert_eq!(knit_next(&a2, &b(&[1, 1])), Some(b(&[2, 3])));
        assert_eq!(knit_next(&a2, &b(&[2, 3])), Some(b(&[2, 1])));
        assert_eq!(knit_next(&dynkin_matrix(t("A1")), &b(&[1])), Some(b(&[2])));
        let e8 = dynkin_matrix(t("E8"));
        assert_eq!(knit_next(&e8, &b(&[6, 4, 11, 29, 21, 13, 5, 2])), Some(b(&[5, 3, 8, 29, 18, 7, 3, 2])));
    }

    #[test]
    fn translate_and_orbit() {
        let a2 = FriezeSystem::catalog(t("A2"));
        let p = FriezePoint::from_u64(&[1, 1], &[2, 2]);
        assert_eq!(a2.translate(&p).unwrap(), FriezePoint::from_u64(&[2, 3], &[2, 1]));
        assert_eq!(a2.orbit(&p).unwrap().len(), 5);
        let a1 = FriezeSystem::catalog(t("A1"));
        let q = FriezePoint::from_u64(&[2], &[1]);
        assert_eq!(a1.translate(&q).unwrap(), FriezePoint::from_u64(&[1], &[2]));
        assert_eq!(a1.orbit(&q).unwrap().len(), 2);
        let e8 = FriezeSystem::catalog(t("E8"));
        let r = FriezePoint::from_u64(&[6, 4, 11, 29, 21, 13, 5, 2], &[5, 3, 3, 3, 2, 2, 3, 3]);
        let orb = e8.orbit(&r).unwrap();
        assert_eq!(orb.len(), 4);
        assert!(orb.contains(&FriezePoint::from_u64(&[7, 4, 15, 41, 18, 13, 8, 3], &[6, 4, 3, 3, 3, 2, 2, 3])));
    }

    #[test]
    fn grids() {
        let a2 = FriezeSystem::catalog(t("A2"));
        let g = a2.frieze_grid(&FriezePoint::from_u64(&[1, 1], &[2, 2])).unwrap();
        assert_eq!(g.rows, vec![b(&[1, 2, 2, 1, 3]), b(&[1, 3, 1, 2, 2])]);
        assert!(a2.mesh_holds(&g));
        let a1 = FriezeSystem::catalog(t("A1"));
        let g1 = a1.frieze_grid(&FriezePoint::from_u64(&[1], &[2])).unwrap();
        assert_eq!(g1.rows, vec![b(&[1, 2, 1, 2])]);
        let e8 = FriezeSystem::catalog(t("E8"));
        let ge = e8.frieze_grid(&FriezePoint::from_u64(&[6, 4, 11, 29, 21, 13, 5, 2], &[5, 3, 3, 3, 2, 2, 3, 3])).unwrap();
        assert_eq!(ge.period, 16);
        for row in &ge.rows {
            assert_eq!(row[..4], row[4..8]);
            assert_eq!(row[..4], row[12..16]);
        }
        assert!(e8.mesh_holds(&ge));
        let mut broken = ge.clone();
        broken.rows[3][5] += 1u32;
        assert!(!e8.mesh_holds(&broken));
        assert!(render_ascii(&g).lines().count() == 2);
    }

    #[test]
    fn gls_examples() {
        let a2 = FriezeSystem::catalog(t("A2"));
        let q = a2.to_gls(&FriezePoint::from_u64(&[1, 1], &[2, 2])).unwrap();
        assert_eq!(q.z, b(&[2, 3]));
        assert!(gls_holds(a2.gcm(), &q));
        assert_eq!(a2.to_gls(&FriezePoint::from_u64(&[2, 3], &[2, 1])).unwrap().z, b(&[2, 1]));
        let a1 = FriezeSystem::catalog(t("A1"));
        assert_eq!(a1.to_gls(&FriezePoint::from_u64(&[2], &[1])).unwrap().z, b(&[1]));
    }

    #[test]
    fn infinite_type_is_refused() {
        let c = crate::cartan::validate_gcm(vec![vec![2, -4], vec![-1, 2]]).unwrap();
        let s = FriezeSystem::new(c).unwrap();
        assert!(s.period().is_none());
        let p = FriezePoint::from_u64(&[1, 1], &[2, 2]);
        assert!(matches!(s.translate(&p), Err(Error::NotFiniteType)));
        assert!(matches!(s.orbit(&p), Err(Error::NotFiniteType)));
    }
}
