//! Skip pointers against linear scans, exhaustively over small forbidden sets.

mod common;

#[test]
fn skip_matches_scan_under_changes() {
    let mut compared = 0;
    for seed in 0..40 {
        compared += common::skip::run(seed, 25).unwrap_or_else(|m| panic!("{m}"));
    }
    assert!(compared > 10_000, "only {compared} comparisons");
}
