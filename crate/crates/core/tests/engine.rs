//! Both engine modes against brute force along random update streams.

mod common;

use common::{run_instance, Tally};

#[test]
fn random_streams_match_oracle() {
    let mut tally = Tally::default();
    for seed in 0..24 {
        let t = run_instance(1000 + seed, 80, 20).unwrap_or_else(|m| panic!("{m}"));
        tally.add(&t);
    }
    assert_eq!(tally.updates, 24 * 80);
    assert!(tally.answers_seen > 0);
}
