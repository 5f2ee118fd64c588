//! Enumerated counts against the closed forms for the whole acceptance suite.

use cartan_frieze::closed_forms::expected_count;
use cartan_frieze::search::{enumerate, SearchConfig};
use cartan_frieze::{dynkin_matrix, DynkinType};
use num_bigint::BigUint;

fn count(s: &str) -> (usize, BigUint) {
    let t: DynkinType = s.parse().unwrap();
    let (pts, _) = enumerate(&SearchConfig::new(dynkin_matrix(t))).unwrap();
    (pts.len(), expected_count(t))
}

#[test]
fn classical_counts() {
    for s in ["A1", "A2", "A3", "A4", "A5", "A6", "B2", "B3", "B4", "C2", "C3", "C4", "D3", "D4", "D5"] {
        let (got, want) = count(s);
        assert_eq!(BigUint::from(got), want, "{s}");
    }
}

#[test]
fn exceptional_counts() {
    for s in ["G2", "F4", "E6"] {
        let (got, want) = count(s);
        assert_eq!(BigUint::from(got), want, "{s}");
    }
}
