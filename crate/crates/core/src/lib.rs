pub mod graph;
pub mod query;
pub mod eval;
pub mod structure;
pub mod skiplist;
pub mod gen;
pub mod centered;
pub mod bds;
pub mod decomp;
pub mod engine;
pub mod bench;
