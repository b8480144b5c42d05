//! Counting non-isomorphic colorings of complete graphs: exact Pólya
//! enumeration, Monte-Carlo estimates of mono-free positions, and Ramsey
//! witnesses.

mod estimate;
mod polya;
mod witness;

pub use estimate::{
    estimate_l1, estimate_l2, mono_free, sample_coloring, EstimateReport, Method, Schedule, StratumReport, Z_99,
};
pub use polya::{
    count_colorings, count_table, cycle_index_pair_group, legal_strata, partitions, total_legal_positions,
    CountTable, CycleIndexMonomial, Partition,
};
pub use witness::{
    arrowing_threshold_c, bundled_k17_witness, extend_by_duplicate, parse_witness, verify_witness, write_witness,
    WitnessReport, ARROWING_MAX_FREE, K17_WITNESS,
};
