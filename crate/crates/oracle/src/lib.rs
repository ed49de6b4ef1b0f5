//! Naive reference implementations. Everything here loops over pixels and
//! segment pairs directly; nothing shares code with the histogram path.

use std::collections::{BTreeMap, BTreeSet};

use vpseval_core::vpsdata::{CategorySet, PanopticVideo};

/// Per-category `(tp, fp, fn, iou_sum)`.
pub type Tallies = BTreeMap<u32, (u64, u64, u64, f64)>;

fn ids(video: &PanopticVideo, frames: std::ops::Range<usize>) -> BTreeSet<u32> {
    let mut out = BTreeSet::new();
    for t in frames {
        out.extend(video.frame(t).pixels().iter().copied().filter(|&i| i != 0));
    }
    out
}

/// Pixels in frames `frames` where `pred == p` and `gt == g` (either may be 0).
pub fn count_pair(
    pred: &PanopticVideo,
    gt: &PanopticVideo,
    frames: std::ops::Range<usize>,
    p: u32,
    g: u32,
) -> u64 {
    let mut n = 0;
    for t in frames {
        let a = pred.frame(t).pixels();
        let b = gt.frame(t).pixels();
        for i in 0..a.len() {
            if a[i] == p && b[i] == g {
                n += 1;
            }
        }
    }
    n
}

/// Pixels of `id` in `video` over `frames`.
pub fn area(video: &PanopticVideo, frames: std::ops::Range<usize>, id: u32) -> u64 {
    let mut n = 0;
    for t in frames {
        n += video.frame(t).pixels().iter().filter(|&&x| x == id).count() as u64;
    }
    n
}

/// Brute-force matching for the window `[start, start + k)`.
pub fn window_tallies(pred: &PanopticVideo, gt: &PanopticVideo, start: usize, k: usize) -> Tallies {
    let w = start..start + k;
    let mut out = Tallies::new();
    let pred_ids = ids(pred, w.clone());
    let gt_ids = ids(gt, w.clone());
    let cat = |v: &PanopticVideo, id: u32| v.segment(id).unwrap().category_id;
    let mut pred_hit = BTreeSet::new();
    let mut gt_hit = BTreeSet::new();
    for &p in &pred_ids {
        for &g in &gt_ids {
            if cat(pred, p) != cat(gt, g) {
                continue;
            }
            let inter = count_pair(pred, gt, w.clone(), p, g);
            let union = area(pred, w.clone(), p) + area(gt, w.clone(), g) - inter;
            let iou = inter as f64 / union as f64;
            if iou > 0.5 {
                let e = out.entry(cat(pred, p)).or_default();
                e.0 += 1;
                e.3 += iou;
                pred_hit.insert(p);
                gt_hit.insert(g);
            }
        }
    }
    for &p in pred_ids.difference(&pred_hit) {
        let on_void = count_pair(pred, gt, w.clone(), p, 0);
        if 2 * on_void <= area(pred, w.clone(), p) {
            out.entry(cat(pred, p)).or_default().1 += 1;
        }
    }
    for &g in gt_ids.difference(&gt_hit) {
        out.entry(cat(gt, g)).or_default().2 += 1;
    }
    out
}

/// Tallies pooled over every full window of every pair.
pub fn pooled_tallies(pairs: &[(&PanopticVideo, &PanopticVideo)], k: usize) -> Tallies {
    let mut out = Tallies::new();
    for (pred, gt) in pairs {
        let frames = gt.len();
        if frames < k {
            continue;
        }
        for start in 0..=frames - k {
            for (c, (tp, fp, fn_, s)) in window_tallies(pred, gt, start, k) {
                let e = out.entry(c).or_default();
                e.0 += tp;
                e.1 += fp;
                e.2 += fn_;
                e.3 += s;
            }
        }
    }
    out
}

/// Mean per-category quality; `None` when no category occurs.
pub fn quality(tallies: &Tallies) -> Option<f64> {
    let qs: Vec<f64> = tallies
        .values()
        .filter(|t| t.0 + t.1 + t.2 > 0)
        .map(|&(tp, fp, fn_, s)| s / (tp as f64 + fp as f64 / 2.0 + fn_ as f64 / 2.0))
        .collect();
    (!qs.is_empty()).then(|| qs.iter().sum::<f64>() / qs.len() as f64)
}

pub fn vpq_k(pairs: &[(&PanopticVideo, &PanopticVideo)], k: usize) -> Option<f64> {
    quality(&pooled_tallies(pairs, k))
}

/// PQ of frame `t` alone.
pub fn pq_frame(pred: &PanopticVideo, gt: &PanopticVideo, t: usize) -> Option<f64> {
    quality(&window_tallies(pred, gt, t, 1))
}

/// Semantic category of every pixel; `None` for void.
fn semantic(video: &PanopticVideo, t: usize) -> Vec<Option<u32>> {
    video
        .frame(t)
        .pixels()
        .iter()
        .map(|&id| (id != 0).then(|| video.segment(id).unwrap().category_id))
        .collect()
}

/// Whole-video SQ; `None` when GT is entirely void.
pub fn sq(pred: &PanopticVideo, gt: &PanopticVideo, categories: &CategorySet) -> Option<f64> {
    let mut ious = Vec::new();
    for c in categories.entries().iter().map(|c| c.id) {
        let (mut inter, mut union) = (0u64, 0u64);
        for t in 0..gt.len() {
            let (sp, sg) = (semantic(pred, t), semantic(gt, t));
            for i in 0..sp.len() {
                if sg[i].is_none() {
                    continue;
                }
                let (a, b) = (sp[i] == Some(c), sg[i] == Some(c));
                inter += (a && b) as u64;
                union += (a || b) as u64;
            }
        }
        if union > 0 {
            ious.push(inter as f64 / union as f64);
        }
    }
    (!ious.is_empty()).then(|| ious.iter().sum::<f64>() / ious.len() as f64)
}

/// Whole-video AQ; `None` when GT has no thing pixels.
pub fn aq(pred: &PanopticVideo, gt: &PanopticVideo, categories: &CategorySet) -> Option<f64> {
    let thing = |v: &PanopticVideo, id: u32| {
        id != 0 && categories.is_thing(v.segment(id).unwrap().category_id) == Some(true)
    };
    let all = 0..gt.len();
    let gt_tracks: Vec<u32> = ids(gt, all.clone())
        .into_iter()
        .filter(|&g| thing(gt, g))
        .collect();
    let pred_tracks: Vec<u32> = ids(pred, all.clone())
        .into_iter()
        .filter(|&p| thing(pred, p))
        .collect();
    if gt_tracks.is_empty() {
        return None;
    }
    // |p| restricted to pixels where GT is labeled.
    let labeled_area = |p: u32| -> u64 {
        let mut n = 0;
        for t in all.clone() {
            let (a, b) = (pred.frame(t).pixels(), gt.frame(t).pixels());
            n += (0..a.len()).filter(|&i| a[i] == p && b[i] != 0).count() as u64;
        }
        n
    };
    let mut total = 0.0;
    for &g in &gt_tracks {
        let g_area = area(gt, all.clone(), g);
        let mut score = 0.0;
        for &p in &pred_tracks {
            let inter = count_pair(pred, gt, all.clone(), p, g);
            if inter == 0 {
                continue;
            }
            let union = labeled_area(p) + g_area - inter;
            score += inter as f64 * inter as f64 / union as f64;
        }
        total += score / g_area as f64;
    }
    Some(total / gt_tracks.len() as f64)
}

pub fn stq(
    pred: &PanopticVideo,
    gt: &PanopticVideo,
    categories: &CategorySet,
) -> Option<(f64, f64, f64)> {
    let s = sq(pred, gt, categories)?;
    let a = aq(pred, gt, categories)?;
    Some((s, a, (s * a).sqrt()))
}
