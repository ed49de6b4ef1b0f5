//! Segment tubes over frame windows and their pairwise overlaps.
//!
//! The kernel histograms co-occurring `(pred segment id, gt segment id)`
//! pixel pairs once per frame. A window of `k` frames is then the sum of `k`
//! cached frame histograms, so every span is served without touching pixels
//! again. Every overlap statistic (tube areas, intersections, void overlaps)
//! is a marginal or an entry of that histogram.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::vpsdata::{PanopticVideo, VOID_SEGMENT};

/// Sliding window of `span` frames moved by `stride`; only full windows exist.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WindowSpec {
    span: usize,
    stride: usize,
}

impl WindowSpec {
    pub fn new(span: usize, stride: usize) -> Result<Self> {
        if span == 0 || stride == 0 {
            return Err(Error::Spec(format!(
                "window span and stride must be positive (got span {span}, stride {stride})"
            )));
        }
        Ok(Self { span, stride })
    }

    /// Unit-stride window of `span` frames.
    pub fn span(span: usize) -> Result<Self> {
        Self::new(span, 1)
    }

    pub fn span_k(&self) -> usize {
        self.span
    }

    pub fn stride(&self) -> usize {
        self.stride
    }

    pub fn count(&self, frames: usize) -> usize {
        if frames < self.span {
            0
        } else {
            (frames - self.span) / self.stride + 1
        }
    }

    pub fn starts(&self, frames: usize) -> impl Iterator<Item = usize> {
        let stride = self.stride;
        (0..self.count(frames)).map(move |i| i * stride)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TubeSource {
    Pred,
    Gt,
}

/// One segment aggregated over a window. Never materialized with zero area.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SegmentTube {
    pub segment_id: u32,
    pub category_id: u32,
    pub instance_id: u32,
    pub area: u64,
    pub source: TubeSource,
}

/// Intersection-over-union of two tubes given their shared pixel count.
pub fn tube_iou(p: &SegmentTube, g: &SegmentTube, intersection: u64) -> f64 {
    debug_assert!(intersection <= p.area.min(g.area));
    let union = p.area + g.area - intersection;
    intersection as f64 / union as f64
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WindowId {
    pub video: String,
    pub start: usize,
    pub span: usize,
}

/// Sufficient statistics for matching the tubes of one window.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapTable {
    pub window: WindowId,
    /// Sorted by segment id.
    pub pred_tubes: Vec<SegmentTube>,
    /// Sorted by segment id.
    pub gt_tubes: Vec<SegmentTube>,
    /// `(pred id, gt id)` → shared pixels; zero entries are absent.
    pub intersections: BTreeMap<(u32, u32), u64>,
    /// Pred id → pixels lying on GT void.
    pub gt_void_overlap: BTreeMap<u32, u64>,
    /// GT id → pixels lying on pred void.
    pub pred_void_overlap: BTreeMap<u32, u64>,
}

impl OverlapTable {
    pub fn pred_tube(&self, id: u32) -> Option<&SegmentTube> {
        find_tube(&self.pred_tubes, id)
    }

    pub fn gt_tube(&self, id: u32) -> Option<&SegmentTube> {
        find_tube(&self.gt_tubes, id)
    }
}

fn find_tube(tubes: &[SegmentTube], id: u32) -> Option<&SegmentTube> {
    tubes
        .binary_search_by_key(&id, |t| t.segment_id)
        .ok()
        .map(|i| &tubes[i])
}

#[inline]
fn pair_key(pred: u32, gt: u32) -> u64 {
    u64::from(pred) << 32 | u64::from(gt)
}

#[inline]
fn split_key(key: u64) -> (u32, u32) {
    ((key >> 32) as u32, key as u32)
}

/// Co-occurrence counts of `(pred id, gt id)` pixel pairs, void included.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PairHistogram {
    // Sorted by key, counts > 0.
    counts: Vec<(u64, u64)>,
}

impl PairHistogram {
    /// Single pass over two aligned label maps. Runs of identical pairs are
    /// folded before touching the hash map.
    pub fn from_maps(pred: &[u32], gt: &[u32]) -> Self {
        debug_assert_eq!(pred.len(), gt.len());
        let mut counts: HashMap<u64, u64> = HashMap::new();
        let mut pixels = pred.iter().zip(gt);
        if let Some((&p, &g)) = pixels.next() {
            let mut key = pair_key(p, g);
            let mut run = 1u64;
            for (&p, &g) in pixels {
                let k = pair_key(p, g);
                if k == key {
                    run += 1;
                } else {
                    *counts.entry(key).or_insert(0) += run;
                    key = k;
                    run = 1;
                }
            }
            *counts.entry(key).or_insert(0) += run;
        }
        let mut counts: Vec<_> = counts.into_iter().collect();
        counts.sort_unstable_by_key(|&(k, _)| k);
        Self { counts }
    }

    /// Sum of several histograms.
    pub fn sum<'a>(parts: impl IntoIterator<Item = &'a PairHistogram>) -> Self {
        let mut all: Vec<(u64, u64)> = parts
            .into_iter()
            .flat_map(|h| h.counts.iter().copied())
            .collect();
        all.sort_unstable_by_key(|&(k, _)| k);
        let mut counts: Vec<(u64, u64)> = Vec::with_capacity(all.len());
        for (k, c) in all {
            match counts.last_mut() {
                Some((last, total)) if *last == k => *total += c,
                _ => counts.push((k, c)),
            }
        }
        Self { counts }
    }

    /// `(pred id, gt id, pixels)` in ascending `(pred, gt)` order.
    pub fn iter(&self) -> impl Iterator<Item = (u32, u32, u64)> + '_ {
        self.counts.iter().map(|&(k, c)| {
            let (p, g) = split_key(k);
            (p, g, c)
        })
    }

    pub fn get(&self, pred: u32, gt: u32) -> u64 {
        let key = pair_key(pred, gt);
        self.counts
            .binary_search_by_key(&key, |&(k, _)| k)
            .map(|i| self.counts[i].1)
            .unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().map(|&(_, c)| c).sum()
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }
}

/// Per-frame pair histograms of one (pred, gt) video pair, computed once and
/// reused by every window span.
#[derive(Debug, Clone)]
pub struct VideoOverlaps<'a> {
    video_id: String,
    pred: &'a PanopticVideo,
    gt: &'a PanopticVideo,
    frames: Vec<PairHistogram>,
}

impl<'a> VideoOverlaps<'a> {
    pub fn new(
        video_id: impl Into<String>,
        pred: &'a PanopticVideo,
        gt: &'a PanopticVideo,
    ) -> Result<Self> {
        pred.check_same_shape(gt)?;
        let frames = pred
            .frames()
            .iter()
            .zip(gt.frames())
            .map(|(p, g)| PairHistogram::from_maps(p.pixels(), g.pixels()))
            .collect();
        Ok(Self {
            video_id: video_id.into(),
            pred,
            gt,
            frames,
        })
    }

    pub fn video_id(&self) -> &str {
        &self.video_id
    }

    pub fn pred(&self) -> &PanopticVideo {
        self.pred
    }

    pub fn gt(&self) -> &PanopticVideo {
        self.gt
    }

    pub fn frame_histograms(&self) -> &[PairHistogram] {
        &self.frames
    }

    /// Pair histogram over the full video length.
    pub fn whole_video(&self) -> PairHistogram {
        PairHistogram::sum(&self.frames)
    }

    /// Overlap table of frames `[start, start + span)`.
    pub fn window(&self, start: usize, span: usize) -> OverlapTable {
        let hist = PairHistogram::sum(&self.frames[start..start + span]);
        self.table_from_histogram(
            WindowId {
                video: self.video_id.clone(),
                start,
                span,
            },
            &hist,
        )
    }

    pub fn windows(&self, spec: WindowSpec) -> impl Iterator<Item = OverlapTable> + '_ {
        spec.starts(self.frames.len())
            .map(move |start| self.window(start, spec.span_k()))
    }

    fn table_from_histogram(&self, window: WindowId, hist: &PairHistogram) -> OverlapTable {
        let mut pred_area: BTreeMap<u32, u64> = BTreeMap::new();
        let mut gt_area: BTreeMap<u32, u64> = BTreeMap::new();
        let mut intersections = BTreeMap::new();
        let mut gt_void_overlap = BTreeMap::new();
        let mut pred_void_overlap = BTreeMap::new();
        for (p, g, c) in hist.iter() {
            if p != VOID_SEGMENT {
                *pred_area.entry(p).or_insert(0) += c;
            }
            if g != VOID_SEGMENT {
                *gt_area.entry(g).or_insert(0) += c;
            }
            match (p == VOID_SEGMENT, g == VOID_SEGMENT) {
                (false, false) => {
                    intersections.insert((p, g), c);
                }
                (false, true) => {
                    gt_void_overlap.insert(p, c);
                }
                (true, false) => {
                    pred_void_overlap.insert(g, c);
                }
                (true, true) => {}
            }
        }
        OverlapTable {
            window,
            pred_tubes: tubes(self.pred, &pred_area, TubeSource::Pred),
            gt_tubes: tubes(self.gt, &gt_area, TubeSource::Gt),
            intersections,
            gt_void_overlap,
            pred_void_overlap,
        }
    }
}

fn tubes(
    video: &PanopticVideo,
    areas: &BTreeMap<u32, u64>,
    source: TubeSource,
) -> Vec<SegmentTube> {
    areas
        .iter()
        .map(|(&id, &area)| {
            let info = video
                .segment(id)
                .expect("validated video has a table entry for every pixel id");
            SegmentTube {
                segment_id: id,
                category_id: info.category_id,
                instance_id: info.instance_id,
                area,
                source,
            }
        })
        .collect()
}

/// All window tables of one video pair, ordered by start frame.
pub fn extract_overlaps(
    pred: &PanopticVideo,
    gt: &PanopticVideo,
    window: WindowSpec,
) -> Result<Vec<OverlapTable>> {
    let overlaps = VideoOverlaps::new("", pred, gt)?;
    Ok(overlaps.windows(window).collect())
}
