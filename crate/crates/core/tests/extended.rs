//! Long-running enumerations excluded from the default test run.
//!
//! Run with `cargo test --release --test extended -- --ignored`. Set
//! `CARTAN_E7_CHECKPOINT` to a file path to make the run resumable across interruptions.

use cartan_frieze::search::{enumerate, SearchConfig};
use cartan_frieze::{dynkin_matrix, DynkinType};
use num_bigint::BigUint;

#[test]
#[ignore = "takes hours on a desktop CPU"]
fn e7_full_count() {
    let t: DynkinType = "E7".parse().unwrap();
    let mut cfg = SearchConfig::new(dynkin_matrix(t));
    cfg.workers = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    if let Some(path) = std::env::var_os("CARTAN_E7_CHECKPOINT") {
        cfg.checkpoint_path = Some(path.into());
        cfg.resume = true;
    }
    let (points, report) = enumerate(&cfg).unwrap();
    assert_eq!(points.len(), 4400);
    assert_eq!(BigUint::from(points.len()), cartan_frieze::closed_forms::expected_count(t));
    eprintln!("E7: {} points, {} nodes, {:.1}s", report.total, report.nodes, report.elapsed.as_secs_f64());
}
