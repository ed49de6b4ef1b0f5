use crate::tubes::{tube_iou, OverlapTable, SegmentTube};

/// IoU a same-category pair must strictly exceed to count as a true positive.
pub const MATCH_IOU_THRESHOLD: f64 = 0.5;

/// Pred tubes with more than this fraction of their area on GT void are not
/// counted as false positives.
pub const VOID_DISCARD_FRACTION: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TubeMatch {
    pub pred: u32,
    pub gt: u32,
    pub category_id: u32,
    pub iou: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct MatchResult {
    pub matches: Vec<TubeMatch>,
    pub false_positives: Vec<SegmentTube>,
    pub false_negatives: Vec<SegmentTube>,
    /// Unmatched pred tubes dropped by the void rule.
    pub void_discarded: Vec<SegmentTube>,
}

/// Matches the tubes of one window.
///
/// A pair is a TP when both tubes share a category and their IoU exceeds one
/// half. Tubes partition the window's pixels, so each tube has at most one
/// such counterpart and the matching needs no assignment step.
pub fn match_window(table: &OverlapTable) -> MatchResult {
    let mut pred_matched = vec![false; table.pred_tubes.len()];
    let mut gt_matched = vec![false; table.gt_tubes.len()];
    let mut matches = Vec::new();

    for (&(p_id, g_id), &inter) in &table.intersections {
        let p_idx = table
            .pred_tubes
            .binary_search_by_key(&p_id, |t| t.segment_id)
            .expect("intersection pred id has a tube");
        let g_idx = table
            .gt_tubes
            .binary_search_by_key(&g_id, |t| t.segment_id)
            .expect("intersection gt id has a tube");
        let (p, g) = (&table.pred_tubes[p_idx], &table.gt_tubes[g_idx]);
        if p.category_id != g.category_id {
            continue;
        }
        let iou = tube_iou(p, g, inter);
        if iou > MATCH_IOU_THRESHOLD {
            debug_assert!(!pred_matched[p_idx] && !gt_matched[g_idx]);
            pred_matched[p_idx] = true;
            gt_matched[g_idx] = true;
            matches.push(TubeMatch {
                pred: p_id,
                gt: g_id,
                category_id: p.category_id,
                iou,
            });
        }
    }

    let mut false_positives = Vec::new();
    let mut void_discarded = Vec::new();
    for (p, _) in table
        .pred_tubes
        .iter()
        .zip(&pred_matched)
        .filter(|(_, &m)| !m)
    {
        let on_void = table
            .gt_void_overlap
            .get(&p.segment_id)
            .copied()
            .unwrap_or(0);
        if on_void as f64 / p.area as f64 > VOID_DISCARD_FRACTION {
            void_discarded.push(*p);
        } else {
            false_positives.push(*p);
        }
    }
    let false_negatives = table
        .gt_tubes
        .iter()
        .zip(&gt_matched)
        .filter(|(_, &m)| !m)
        .map(|(g, _)| *g)
        .collect();

    MatchResult {
        matches,
        false_positives,
        false_negatives,
        void_discarded,
    }
}
