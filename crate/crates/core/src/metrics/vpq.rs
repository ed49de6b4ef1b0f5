use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::metrics::accumulator::AccumulatorSet;
use crate::metrics::matching::match_window;
use crate::tubes::{OverlapTable, VideoOverlaps, WindowSpec};
use crate::vpsdata::{CategorySet, PanopticFrame, PanopticVideo, SegmentTable};

/// Spans reported by default: VPQ1, VPQ2, VPQ4 and VPQ6.
pub const DEFAULT_SPANS: [usize; 4] = [1, 2, 4, 6];

/// How tallies from several videos become one VPQ^k value.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Pooling {
    /// Sum TP/FP/FN/IoU over every window of every video, then average categories.
    #[default]
    Global,
    /// Compute VPQ^k per video, then average the videos where it is defined.
    PerVideoAverage,
}

/// Accumulates a stream of same-span tables and returns the tallies and VPQ^k.
pub fn vpq_for_k<'a>(
    tables: impl IntoIterator<Item = &'a OverlapTable>,
    categories: &CategorySet,
) -> Result<(AccumulatorSet, f64)> {
    let mut acc: Option<AccumulatorSet> = None;
    for table in tables {
        let acc = acc.get_or_insert_with(|| AccumulatorSet::new(table.window.span));
        if acc.span_k() != table.window.span {
            return Err(Error::Label(format!(
                "table for span {} in a span-{} stream",
                table.window.span,
                acc.span_k()
            )));
        }
        acc.record(&match_window(table));
    }
    let acc = acc.ok_or_else(|| Error::UndefinedMetric("no windows to evaluate".into()))?;
    if let Some(&c) = acc.tallies().keys().find(|&&c| !categories.contains(c)) {
        return Err(Error::Label(format!(
            "category {c} is not in the category set"
        )));
    }
    let value = acc.quality()?;
    Ok((acc, value))
}

/// Tallies of one video pair for each requested span, in the order given.
///
/// Spans longer than the video produce empty sets.
pub fn accumulate_spans(
    overlaps: &VideoOverlaps<'_>,
    spans: &[usize],
) -> Result<Vec<AccumulatorSet>> {
    spans
        .iter()
        .map(|&k| {
            let spec = WindowSpec::span(k)?;
            let mut acc = AccumulatorSet::new(k);
            for table in overlaps.windows(spec) {
                acc.record(&match_window(&table));
            }
            Ok(acc)
        })
        .collect()
}

/// VPQ values per span plus their mean.
#[derive(Debug, Clone, PartialEq)]
pub struct VpqReport {
    pub per_k: BTreeMap<usize, f64>,
    pub mean_vpq: f64,
    /// span → category → per-category quality.
    pub per_category: BTreeMap<usize, BTreeMap<u32, f64>>,
    /// span → number of categories averaged.
    pub n_categories: BTreeMap<usize, usize>,
}

/// Builds a report from already-computed per-span values.
pub fn vpq_report(per_k: &[(usize, f64)]) -> VpqReport {
    let mean_vpq = per_k.iter().map(|&(_, v)| v).sum::<f64>() / per_k.len() as f64;
    VpqReport {
        per_k: per_k.iter().copied().collect(),
        mean_vpq,
        per_category: BTreeMap::new(),
        n_categories: BTreeMap::new(),
    }
}

impl VpqReport {
    /// Report for pooled tallies, one set per span.
    pub fn from_accumulators(sets: &[AccumulatorSet]) -> Result<Self> {
        let mut values = Vec::with_capacity(sets.len());
        let mut per_category = BTreeMap::new();
        let mut n_categories = BTreeMap::new();
        for set in sets {
            values.push((set.span_k(), set.quality()?));
            per_category.insert(
                set.span_k(),
                set.present_categories()
                    .map(|(c, t)| (c, t.quality().expect("present")))
                    .collect(),
            );
            n_categories.insert(set.span_k(), set.category_count());
        }
        Ok(Self {
            per_category,
            n_categories,
            ..vpq_report(&values)
        })
    }
}

/// Combines per-video tallies (`per_video[v][i]` is video `v`, span `spans[i]`).
///
/// Returns the pooled tallies alongside the report; with
/// [`Pooling::PerVideoAverage`] the per-span values are video means while the
/// per-category breakdown still comes from the pooled tallies.
pub fn dataset_vpq(
    per_video: &[Vec<AccumulatorSet>],
    spans: &[usize],
    pooling: Pooling,
) -> Result<(Vec<AccumulatorSet>, VpqReport)> {
    let mut pooled: Vec<AccumulatorSet> = spans.iter().map(|&k| AccumulatorSet::new(k)).collect();
    for sets in per_video {
        for (acc, set) in pooled.iter_mut().zip(sets) {
            acc.merge(set)?;
        }
    }
    let mut report = VpqReport::from_accumulators(&pooled)?;
    if pooling == Pooling::PerVideoAverage {
        let mut values = Vec::with_capacity(spans.len());
        for (i, &k) in spans.iter().enumerate() {
            let defined: Vec<f64> = per_video
                .iter()
                .filter_map(|sets| sets[i].quality().ok())
                .collect();
            if defined.is_empty() {
                return Err(Error::UndefinedMetric(format!(
                    "no video defines VPQ for span {k}"
                )));
            }
            values.push((k, defined.iter().sum::<f64>() / defined.len() as f64));
        }
        let averaged = vpq_report(&values);
        report.per_k = averaged.per_k;
        report.mean_vpq = averaged.mean_vpq;
    }
    Ok((pooled, report))
}

/// `value × 100` rounded half-up to four decimals, e.g. `0.559332` → `"55.9332"`.
///
/// The value is first snapped to 1e-9 so binary noise below the display
/// precision cannot flip a tie.
pub fn format_percent(value: f64) -> String {
    let nano = (value * 1e9).round() as i64;
    let units = (nano + 500).div_euclid(1000); // 1e-6 of the value = 1e-4 percent
    let sign = if units < 0 { "-" } else { "" };
    let units = units.abs();
    format!("{sign}{}.{:04}", units / 10_000, units % 10_000)
}

/// PQ of a single frame.
#[derive(Debug, Clone, PartialEq)]
pub struct PqReport {
    pub pq: f64,
    pub per_category: BTreeMap<u32, f64>,
    pub tallies: AccumulatorSet,
}

/// Image-level panoptic quality: VPQ with a one-frame span on a one-frame video.
pub fn pq_image(
    pred: &PanopticFrame,
    pred_segments: &SegmentTable,
    gt: &PanopticFrame,
    gt_segments: &SegmentTable,
    categories: &CategorySet,
) -> Result<PqReport> {
    let as_video = |frame: &PanopticFrame, segments: &SegmentTable| {
        PanopticVideo::new(
            frame.width(),
            frame.height(),
            vec![frame.clone()],
            segments.clone(),
            categories,
        )
    };
    let pred = as_video(pred, pred_segments)?;
    let gt = as_video(gt, gt_segments)?;
    let overlaps = VideoOverlaps::new("", &pred, &gt)?;
    let tables: Vec<_> = overlaps.windows(WindowSpec::span(1)?).collect();
    let (tallies, pq) = vpq_for_k(&tables, categories)?;
    let per_category = tallies
        .present_categories()
        .map(|(c, t)| (c, t.quality().expect("present")))
        .collect();
    Ok(PqReport {
        pq,
        per_category,
        tallies,
    })
}
