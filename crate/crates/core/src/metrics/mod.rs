//! VPQ^k, PQ and STQ over overlap tables, with mergeable accumulators.

mod accumulator;
mod matching;
mod stq;
mod vpq;

pub use accumulator::{AccumulatorSet, CategoryTally, FixedSum};
pub use matching::{
    match_window, MatchResult, TubeMatch, MATCH_IOU_THRESHOLD, VOID_DISCARD_FRACTION,
};
pub use stq::{stq, IouCounts, StqAccumulator, StqOptions, StqReport};
pub use vpq::{
    accumulate_spans, dataset_vpq, format_percent, pq_image, vpq_for_k, vpq_report, Pooling,
    PqReport, VpqReport, DEFAULT_SPANS,
};
