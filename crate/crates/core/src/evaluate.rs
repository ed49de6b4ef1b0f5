//! Dataset-level evaluation: per-video sufficient statistics, merged in order.

use crate::error::Result;
use crate::exec::{par_map, Execution};
use crate::metrics::{
    accumulate_spans, dataset_vpq, AccumulatorSet, Pooling, StqAccumulator, StqOptions, StqReport,
    VpqReport,
};
use crate::tubes::VideoOverlaps;
use crate::vpsdata::{CategorySet, PanopticVideo};

/// One prediction/ground-truth pair.
#[derive(Debug, Clone)]
pub struct VideoPair {
    pub video_id: String,
    pub pred: PanopticVideo,
    pub gt: PanopticVideo,
}

/// Everything needed to pool one video into dataset metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct VideoEvaluation {
    pub video_id: String,
    /// One tally set per requested span, in request order.
    pub vpq: Vec<AccumulatorSet>,
    pub stq: StqAccumulator,
}

/// Evaluates a single pair for `spans`, computing overlaps once.
pub fn evaluate_video(
    pair: &VideoPair,
    categories: &CategorySet,
    spans: &[usize],
) -> Result<VideoEvaluation> {
    let overlaps = VideoOverlaps::new(pair.video_id.clone(), &pair.pred, &pair.gt)?;
    Ok(VideoEvaluation {
        video_id: pair.video_id.clone(),
        vpq: accumulate_spans(&overlaps, spans)?,
        stq: StqAccumulator::from_overlaps(&overlaps, categories)?,
    })
}

/// Evaluates every pair. The first failing video (in input order) is reported.
pub fn evaluate_videos(
    pairs: &[VideoPair],
    categories: &CategorySet,
    spans: &[usize],
    exec: Execution,
) -> Result<Vec<VideoEvaluation>> {
    par_map(pairs, exec, |pair| evaluate_video(pair, categories, spans))
        .into_iter()
        .collect()
}

/// Pooled VPQ over a dataset.
pub fn pooled_vpq(
    evaluations: &[VideoEvaluation],
    spans: &[usize],
    pooling: Pooling,
) -> Result<(Vec<AccumulatorSet>, VpqReport)> {
    let per_video: Vec<Vec<AccumulatorSet>> = evaluations.iter().map(|e| e.vpq.clone()).collect();
    dataset_vpq(&per_video, spans, pooling)
}

/// Pooled STQ over a dataset: pixel counts and track scores are summed first.
pub fn pooled_stq(
    evaluations: &[VideoEvaluation],
    options: StqOptions,
) -> Result<(StqAccumulator, StqReport)> {
    let mut acc = StqAccumulator::default();
    for e in evaluations {
        acc.merge(&e.stq);
    }
    let report = acc.report(options)?;
    Ok((acc, report))
}
