#![allow(dead_code)]

use proptest::prelude::*;
use vpseval_core::vpsdata::{
    Category, CategorySet, PanopticFrame, PanopticVideo, SegmentInfo, SegmentTable,
};

/// Two stuff categories and one thing category.
pub fn tiny_categories() -> CategorySet {
    CategorySet::new(vec![
        Category {
            id: 1,
            name: "ground".into(),
            is_thing: false,
        },
        Category {
            id: 2,
            name: "sky".into(),
            is_thing: false,
        },
        Category {
            id: 3,
            name: "blob".into(),
            is_thing: true,
        },
    ])
    .unwrap()
}

/// Segment ids `1..=n` with categories drawn from `picks`; a repeated stuff
/// category falls back to the thing category so the table stays valid.
fn table(picks: &[u32], offset: u32) -> SegmentTable {
    let mut used_stuff = Vec::new();
    let mut out = SegmentTable::new();
    for (i, &c) in picks.iter().enumerate() {
        let id = offset + i as u32 + 1;
        let info = if c != 3 && !used_stuff.contains(&c) {
            used_stuff.push(c);
            SegmentInfo {
                category_id: c,
                instance_id: 0,
            }
        } else {
            SegmentInfo {
                category_id: 3,
                instance_id: id,
            }
        };
        out.insert(id, info);
    }
    out
}

/// A random valid video; segment ids are `offset + 1 ..= offset + n`.
pub fn video_strategy(
    w: usize,
    h: usize,
    frames: usize,
    offset: u32,
) -> impl Strategy<Value = PanopticVideo> {
    (prop::collection::vec(1u32..=3, 1..=4), any::<u64>()).prop_flat_map(move |(picks, _)| {
        let n = picks.len() as u32;
        prop::collection::vec(prop::collection::vec(0u32..=n, w * h), frames).prop_map(
            move |maps| {
                let cats = tiny_categories();
                let frames = maps
                    .into_iter()
                    .map(|m| {
                        PanopticFrame::new(
                            w,
                            h,
                            m.into_iter()
                                .map(|x| if x == 0 { 0 } else { x + offset })
                                .collect(),
                        )
                        .unwrap()
                    })
                    .collect();
                PanopticVideo::new(w, h, frames, table(&picks, offset), &cats).unwrap()
            },
        )
    })
}

/// Random (pred, gt) pairs of equal shape: ≤ 8×8, ≤ 3 frames, ≤ 4 segments each.
pub fn pair_strategy() -> impl Strategy<Value = (PanopticVideo, PanopticVideo)> {
    (1usize..=8, 1usize..=8, 1usize..=3, 0u32..3).prop_flat_map(|(w, h, t, off)| {
        (video_strategy(w, h, t, off * 5), video_strategy(w, h, t, 0))
    })
}

/// A pred that usually overlaps gt heavily: each pixel keeps gt's id with
/// probability ~3/4, so true positives are common.
pub fn near_pair_strategy() -> impl Strategy<Value = (PanopticVideo, PanopticVideo)> {
    (1usize..=8, 1usize..=8, 1usize..=3).prop_flat_map(|(w, h, t)| {
        video_strategy(w, h, t, 0).prop_flat_map(move |gt| {
            let n = w * h * t;
            prop::collection::vec((0u8..4, 0u32..=4), n).prop_map(move |noise| {
                let cats = tiny_categories();
                let ids: Vec<u32> = gt.segments().keys().copied().collect();
                let mut k = 0;
                let frames = gt
                    .frames()
                    .iter()
                    .map(|f| {
                        let px = f
                            .pixels()
                            .iter()
                            .map(|&g| {
                                let (keep, r) = noise[k];
                                k += 1;
                                if keep > 0 {
                                    g
                                } else if r == 0 {
                                    0
                                } else {
                                    ids[(r as usize - 1) % ids.len()]
                                }
                            })
                            .collect();
                        PanopticFrame::new(w, h, px).unwrap()
                    })
                    .collect();
                let pred = PanopticVideo::new(w, h, frames, gt.segments().clone(), &cats).unwrap();
                (pred, gt.clone())
            })
        })
    })
}
