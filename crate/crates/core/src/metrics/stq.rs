//! Segmentation and Tracking Quality.
//!
//! * SQ: mean over categories of pixel IoU between the semantic collapses of
//!   prediction and GT, counted over the whole video. Pixels that are void in
//!   GT are ignored; categories whose union is empty are skipped.
//! * AQ: mean over GT thing tracks `g` of
//!   `(1/|g|) · Σ_p |p∩g| · |p∩g| / |p∪g|`, where `p` ranges over predicted
//!   thing tracks and identity is the segment id over the full video,
//!   regardless of category.
//! * STQ = sqrt(SQ · AQ).
//!
//! Everything is derived from the full-video pair histogram.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::metrics::accumulator::FixedSum;
use crate::tubes::{PairHistogram, VideoOverlaps};
use crate::vpsdata::{CategorySet, PanopticVideo, VOID_SEGMENT};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IouCounts {
    pub intersection: u64,
    pub union: u64,
}

impl IouCounts {
    pub fn iou(&self) -> Option<f64> {
        (self.union > 0).then(|| self.intersection as f64 / self.union as f64)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StqOptions {
    /// Report AQ = 1 instead of an error when GT holds no thing tracks.
    pub empty_aq_as_one: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StqReport {
    pub sq: f64,
    pub aq: f64,
    pub stq: f64,
    pub per_category_iou: BTreeMap<u32, f64>,
}

/// Mergeable STQ sufficient statistics.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StqAccumulator {
    pub categories: BTreeMap<u32, IouCounts>,
    /// Sum of per-track association scores.
    pub aq_sum: FixedSum,
    pub gt_tracks: u64,
}

impl StqAccumulator {
    pub fn from_overlaps(overlaps: &VideoOverlaps<'_>, categories: &CategorySet) -> Result<Self> {
        Self::from_histogram(
            &overlaps.whole_video(),
            overlaps.pred(),
            overlaps.gt(),
            categories,
        )
    }

    pub fn from_histogram(
        hist: &PairHistogram,
        pred: &PanopticVideo,
        gt: &PanopticVideo,
        categories: &CategorySet,
    ) -> Result<Self> {
        let category_of = |video: &PanopticVideo, id: u32| -> Option<u32> {
            video.segment(id).map(|s| s.category_id)
        };
        let is_thing = |c: u32| categories.is_thing(c).unwrap_or(false);

        let mut per_cat: BTreeMap<u32, IouCounts> = BTreeMap::new();
        let mut gt_size: BTreeMap<u32, u64> = BTreeMap::new();
        let mut pred_size: BTreeMap<u32, u64> = BTreeMap::new();
        for (p, g, n) in hist.iter() {
            if g == VOID_SEGMENT {
                continue;
            }
            let gc = category_of(gt, g).expect("validated gt id");
            let pc = (p != VOID_SEGMENT).then(|| category_of(pred, p).expect("validated pred id"));
            if pc == Some(gc) {
                let e = per_cat.entry(gc).or_default();
                e.intersection += n;
                e.union += n;
            } else {
                per_cat.entry(gc).or_default().union += n;
                if let Some(pc) = pc {
                    per_cat.entry(pc).or_default().union += n;
                }
            }
            if is_thing(gc) {
                *gt_size.entry(g).or_insert(0) += n;
            }
            if let Some(pc) = pc {
                if is_thing(pc) {
                    *pred_size.entry(p).or_insert(0) += n;
                }
            }
        }

        // hist iterates in (pred, gt) order; regroup thing intersections by gt track.
        let mut by_track: BTreeMap<u32, Vec<(u32, u64)>> = BTreeMap::new();
        for (p, g, n) in hist.iter() {
            if gt_size.contains_key(&g) && pred_size.contains_key(&p) {
                by_track.entry(g).or_default().push((p, n));
            }
        }
        let mut aq_sum = FixedSum::default();
        for (&g, &g_area) in &gt_size {
            let mut score = 0.0;
            for &(p, inter) in by_track.get(&g).map(Vec::as_slice).unwrap_or(&[]) {
                let union = pred_size[&p] + g_area - inter;
                score += inter as f64 * (inter as f64 / union as f64);
            }
            aq_sum.add_unit((score / g_area as f64).min(1.0));
        }
        if let Some(&c) = per_cat.keys().find(|&&c| !categories.contains(c)) {
            return Err(Error::Label(format!(
                "category {c} is not in the category set"
            )));
        }
        Ok(Self {
            categories: per_cat,
            aq_sum,
            gt_tracks: gt_size.len() as u64,
        })
    }

    pub fn merge(&mut self, other: &StqAccumulator) {
        for (&c, counts) in &other.categories {
            let e = self.categories.entry(c).or_default();
            e.intersection += counts.intersection;
            e.union += counts.union;
        }
        self.aq_sum += other.aq_sum;
        self.gt_tracks += other.gt_tracks;
    }

    pub fn report(&self, options: StqOptions) -> Result<StqReport> {
        let per_category_iou: BTreeMap<u32, f64> = self
            .categories
            .iter()
            .filter_map(|(&c, counts)| counts.iou().map(|iou| (c, iou)))
            .collect();
        if per_category_iou.is_empty() {
            return Err(Error::UndefinedMetric(
                "no labeled pixels: segmentation quality is undefined".into(),
            ));
        }
        let sq = per_category_iou.values().sum::<f64>() / per_category_iou.len() as f64;
        let aq = if self.gt_tracks == 0 {
            if !options.empty_aq_as_one {
                return Err(Error::UndefinedMetric(
                    "ground truth has no thing tracks: association quality is undefined".into(),
                ));
            }
            1.0
        } else {
            self.aq_sum.value() / self.gt_tracks as f64
        };
        Ok(StqReport {
            sq,
            aq,
            stq: (sq * aq).sqrt(),
            per_category_iou,
        })
    }
}

/// STQ of one video pair.
pub fn stq(
    pred: &PanopticVideo,
    gt: &PanopticVideo,
    categories: &CategorySet,
    options: StqOptions,
) -> Result<StqReport> {
    let overlaps = VideoOverlaps::new("", pred, gt)?;
    StqAccumulator::from_overlaps(&overlaps, categories)?.report(options)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vpsdata::{Category, PanopticFrame, SegmentInfo, SegmentTable};

    fn cats() -> CategorySet {
        CategorySet::new(vec![
            Category {
                id: 1,
                name: "sky".into(),
                is_thing: false,
            },
            Category {
                id: 2,
                name: "sea".into(),
                is_thing: false,
            },
            Category {
                id: 7,
                name: "boat".into(),
                is_thing: true,
            },
        ])
        .unwrap()
    }

    fn video(w: usize, frames: Vec<Vec<u32>>, table: &[(u32, u32, u32)]) -> PanopticVideo {
        let frames = frames
            .into_iter()
            .map(|px| PanopticFrame::new(w, 1, px).unwrap())
            .collect();
        let table: SegmentTable = table
            .iter()
            .map(|&(id, c, i)| {
                (
                    id,
                    SegmentInfo {
                        category_id: c,
                        instance_id: i,
                    },
                )
            })
            .collect();
        PanopticVideo::new(w, 1, frames, table, &cats()).unwrap()
    }

    #[test]
    fn perfect_prediction_scores_one() {
        let gt = video(
            4,
            vec![vec![1, 1, 3, 2], vec![1, 3, 2, 2]],
            &[(1, 1, 0), (2, 2, 0), (3, 7, 1)],
        );
        let r = stq(&gt, &gt, &cats(), StqOptions::default()).unwrap();
        assert_eq!((r.sq, r.aq, r.stq), (1.0, 1.0, 1.0));
    }

    #[test]
    fn half_iou_category_with_perfect_tracking() {
        // sky loses one of its two pixels to pred void; the boat is perfect.
        let gt = video(3, vec![vec![1, 1, 3]], &[(1, 1, 0), (3, 7, 1)]);
        let pred = video(3, vec![vec![1, 0, 3]], &[(1, 1, 0), (3, 7, 1)]);
        let r = stq(&pred, &gt, &cats(), StqOptions::default()).unwrap();
        assert_eq!(r.per_category_iou, BTreeMap::from([(1, 0.5), (7, 1.0)]));
        assert_eq!(r.sq, 0.75);
        assert_eq!(r.aq, 1.0);
        assert_eq!(r.stq, 0.75f64.sqrt());
    }

    #[test]
    fn gt_void_pixels_are_ignored() {
        let gt = video(3, vec![vec![1, 0, 3]], &[(1, 1, 0), (3, 7, 1)]);
        let spill = video(3, vec![vec![1, 1, 3]], &[(1, 1, 0), (3, 7, 1)]);
        assert_eq!(
            stq(&spill, &gt, &cats(), StqOptions::default()).unwrap().sq,
            1.0
        );
    }

    #[test]
    fn no_tracks_is_undefined_unless_flagged() {
        let gt = video(2, vec![vec![1, 2]], &[(1, 1, 0), (2, 2, 0)]);
        let err = stq(&gt, &gt, &cats(), StqOptions::default()).unwrap_err();
        assert!(matches!(err, Error::UndefinedMetric(_)));
        let r = stq(
            &gt,
            &gt,
            &cats(),
            StqOptions {
                empty_aq_as_one: true,
            },
        )
        .unwrap();
        assert_eq!(r.aq, 1.0);
    }

    #[test]
    fn all_void_gt_is_undefined() {
        let gt = video(2, vec![vec![0, 0]], &[]);
        let pred = video(2, vec![vec![1, 1]], &[(1, 1, 0)]);
        let err = stq(
            &pred,
            &gt,
            &cats(),
            StqOptions {
                empty_aq_as_one: true,
            },
        )
        .unwrap_err();
        assert!(matches!(err, Error::UndefinedMetric(_)));
    }
}
