//! Degree-one node deletion: the submatrix, the index relabeling, the lift of points
//! of the smaller system into the hyperplanes x_k = 1 or y_k = 1, and slices.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::One;
use serde::Serialize;

use crate::cartan::Gcm;
use crate::error::{Error, Result};
use crate::frieze::{make_point, monomial, solve_y, FriezePoint};

/// Which coordinate of the deleted node is set to 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Variant {
    #[serde(rename = "x")]
    SetX,
    #[serde(rename = "y")]
    SetY,
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Variant> {
        match s {
            "x" | "set_x" => Ok(Variant::SetX),
            "y" | "set_y" => Ok(Variant::SetY),
            other => Err(Error::Parse(format!("variant must be x or y, got {other:?}"))),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::SetX => "x",
            Variant::SetY => "y",
        })
    }
}

/// Order-preserving map from the surviving indices of the big matrix to 0..n-1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NodeRelabeling {
    /// Deleted index k (0-based).
    pub deleted: usize,
    /// Its unique neighbor k'.
    pub neighbor: usize,
    /// `surviving[f]` is the big index sent to small index f.
    pub surviving: Vec<usize>,
}

impl NodeRelabeling {
    /// Small index of a surviving big index.
    pub fn forward(&self, big: usize) -> Option<usize> {
        self.surviving.iter().position(|&b| b == big)
    }
}

/// Removes row and column k, which must be a node of degree 1.
pub fn delete_node(c: &Gcm, k: usize) -> Result<(Gcm, NodeRelabeling)> {
    if k >= c.n() {
        return Err(Error::Parameters(format!("node {} out of range", k + 1)));
    }
    let nb = c.neighbors(k);
    if nb.len() != 1 {
        return Err(Error::NodeDegree { node: k + 1, degree: nb.len() });
    }
    let surviving: Vec<usize> = (0..c.n()).filter(|&i| i != k).collect();
    Ok((c.principal(&surviving), NodeRelabeling { deleted: k, neighbor: nb[0], surviving }))
}

/// Lifts a point of the deleted-node system to the big system.
///
/// `SetX` puts x_k = 1, so y_k = x_{k'}^e + 1 and every other coordinate is copied.
/// `SetY` puts y_k = 1, so x_k = x_{k'}^e + 1 and y_{k'} is re-solved. Here e = −c_{k',k}.
pub fn lift_point(big: &Gcm, p: &FriezePoint, k: usize, variant: Variant) -> Result<FriezePoint> {
    let (_, rel) = delete_node(big, k)?;
    let n = big.n();
    if p.x.len() != n - 1 || p.y.len() != n - 1 {
        return Err(Error::Length { expected: n - 1, got: p.x.len() });
    }
    let kp = rel.neighbor;
    let e = (-big.get(kp, k)) as u32;
    let edge = p.x[rel.forward(kp).expect("neighbor survives")].pow(e) + 1u32;
    let mut x: Vec<BigUint> = p.x.clone();
    let mut y: Vec<BigUint> = p.y.clone();
    match variant {
        Variant::SetX => {
            x.insert(k, BigUint::one());
            y.insert(k, edge);
        }
        Variant::SetY => {
            x.insert(k, edge);
            y.insert(k, BigUint::one());
            let eq = &crate::frieze::equations(big)[kp];
            let s = monomial(&eq.lo, &x) + monomial(&eq.hi, &x);
            y[kp] = &s / &x[kp];
        }
    }
    make_point(big, x, y)
}

/// Inverse of [`lift_point`] on the slice: drops coordinate k and re-solves y.
pub fn restrict_point(big: &Gcm, p: &FriezePoint, k: usize) -> Result<FriezePoint> {
    let (small, _) = delete_node(big, k)?;
    let mut x = p.x.clone();
    x.remove(k);
    let y = solve_y(&small, &x).ok_or(Error::Residue(vec![]))?;
    make_point(&small, x, y)
}

/// Points with x_k = 1 (`SetX`) or y_k = 1 (`SetY`).
pub fn slice(points: &BTreeSet<FriezePoint>, k: usize, variant: Variant) -> BTreeSet<FriezePoint> {
    let one = BigUint::one();
    points
        .iter()
        .filter(|p| match variant {
            Variant::SetX => p.x[k] == one,
            Variant::SetY => p.y[k] == one,
        })
        .cloned()
        .collect()
}

/// Size of [`slice`].
pub fn slice_count(points: &BTreeSet<FriezePoint>, k: usize, variant: Variant) -> usize {
    slice(points, k, variant).len()
}

/// Lifts every point of the smaller system.
pub fn lift_all(big: &Gcm, points: &BTreeSet<FriezePoint>, k: usize, variant: Variant) -> Result<BTreeSet<FriezePoint>> {
    points.iter().map(|p| lift_point(big, p, k, variant)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::{dynkin_matrix, DynkinType};
    use crate::search::{enumerate, SearchConfig};

    fn m(s: &str) -> Gcm {
        dynkin_matrix(s.parse::<DynkinType>().unwrap())
    }

    fn points(s: &str) -> BTreeSet<FriezePoint> {
        enumerate(&SearchConfig::new(m(s))).unwrap().0
    }

    #[test]
    fn deletion() {
        assert_eq!(delete_node(&m("E8"), 7).unwrap().0, m("E7"));
        assert_eq!(delete_node(&m("A4"), 0).unwrap().0, m("A3"));
        assert!(matches!(delete_node(&m("E8"), 3), Err(Error::NodeDegree { node: 4, degree: 3 })));
        let (_, rel) = delete_node(&m("A4"), 0).unwrap();
        assert_eq!(rel.surviving, vec![1, 2, 3]);
        assert_eq!(rel.forward(2), Some(1));
    }

    #[test]
    fn single_lift() {
        let p = FriezePoint::from_u64(&[1, 1, 1], &[2, 2, 2]);
        let q = lift_point(&m("A4"), &p, 0, Variant::SetX).unwrap();
        assert_eq!(q, FriezePoint::from_u64(&[1, 1, 1, 1], &[2, 2, 2, 2]));
        let r = lift_point(&m("A4"), &p, 0, Variant::SetY).unwrap();
        assert_eq!(r.y[0], BigUint::one());
    }

    #[test]
    fn lifts_are_slices() {
        for (small, big, k) in [("A3", "A4", 0), ("A4", "A5", 0), ("D4", "D5", 4), ("B3", "B4", 3), ("C3", "C4", 3)] {
            let sp = points(small);
            let bp = points(big);
            for v in [Variant::SetX, Variant::SetY] {
                let lifted = lift_all(&m(big), &sp, k, v).unwrap();
                assert_eq!(lifted, slice(&bp, k, v), "{small}->{big} {v}");
                for q in &lifted {
                    assert!(sp.contains(&restrict_point(&m(big), q, k).unwrap()));
                }
            }
            let back: BTreeSet<_> =
                slice(&bp, k, Variant::SetX).iter().map(|q| restrict_point(&m(big), q, k).unwrap()).collect();
            assert_eq!(back, sp);
        }
    }

    #[test]
    fn chain_slices() {
        let d4 = points("D4");
        assert_eq!(slice_count(&d4, 1, Variant::SetX), 14);
        assert_eq!(slice_count(&points("A4"), 0, Variant::SetY), 14);
    }
}
