use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::synth::rng::SynthRng;
use crate::vpsdata::{CategorySet, PanopticFrame, PanopticVideo, SegmentTable, VOID_SEGMENT};

/// Failure modes applied to a panoptic video. The all-zero spec is the identity.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CorruptionSpec {
    /// Chance that a stuff tube gets another stuff category.
    pub stuff_flip_prob: f64,
    /// Chance that a lone thing tube gets another thing category.
    pub thing_flip_prob: f64,
    /// Swap the ids of two same-category thing tubes from this frame onward.
    pub id_swap_frame: Option<usize>,
    /// Diamond (4-neighborhood) erosion radius applied to thing masks.
    pub erode_radius: usize,
    /// Chance that a stuff pixel is punched to void.
    pub void_hole_rate: f64,
    pub seed: u64,
}

impl CorruptionSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, p) in [
            ("stuff_flip_prob", self.stuff_flip_prob),
            ("thing_flip_prob", self.thing_flip_prob),
            ("void_hole_rate", self.void_hole_rate),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Spec(format!("{name} must lie in [0, 1], got {p}")));
            }
        }
        Ok(())
    }
}

/// Applies `spec` to `video`. Stages and draws, from one [`SynthRng`] seeded
/// with `spec.seed`:
///
/// 1. **stuff flips**: per stuff segment in id order, one `unit()`; below
///    `stuff_flip_prob` the segment takes `pool[below(len)]`, the pool being
///    stuff categories held by no segment. With an empty pool it swaps
///    categories with `others[below(len)]` among the other stuff segments,
///    and both count as flipped.
/// 2. **thing flips**: per thing category with exactly one tube, in id order,
///    one `unit()`; below `thing_flip_prob` the tube takes a thing category
///    absent from the video, `pool[below(len)]`, keeping its instance id.
/// 3. **id swap**: among same-category thing pairs visible in frame `t` and
///    `t - 1`, pair `below(n)` exchanges ids in frames `t..`.
/// 4. **erosion**: thing pixels whose diamond of radius `erode_radius`
///    (clipped to the frame) is not entirely the same segment become void.
/// 5. **void holes**: per frame, per stuff pixel in row-major order, one
///    `unit()`; below `void_hole_rate` the pixel becomes void.
///
/// Stages with a zero parameter draw nothing.
pub fn corrupt(
    video: &PanopticVideo,
    spec: &CorruptionSpec,
    categories: &CategorySet,
) -> Result<PanopticVideo> {
    spec.validate()?;
    let mut rng = SynthRng::new(spec.seed);
    let (width, height, frames, mut segments) = video.clone().into_parts();
    let is_thing = |c: u32| categories.is_thing(c) == Some(true);

    if spec.stuff_flip_prob > 0.0 {
        flip_stuff(&mut segments, spec.stuff_flip_prob, categories, &mut rng);
    }
    if spec.thing_flip_prob > 0.0 {
        flip_lone_things(
            video,
            &mut segments,
            spec.thing_flip_prob,
            categories,
            &mut rng,
        );
    }

    let mut maps: Vec<Vec<u32>> = frames.into_iter().map(PanopticFrame::into_pixels).collect();
    if let Some(t) = spec.id_swap_frame {
        swap_ids(&mut maps, &segments, t, &is_thing, &mut rng)?;
    }

    let thing_ids: BTreeSet<u32> = segments
        .iter()
        .filter(|(_, s)| is_thing(s.category_id))
        .map(|(&id, _)| id)
        .collect();
    if spec.erode_radius > 0 {
        for map in &mut maps {
            erode(map, width, height, spec.erode_radius, &thing_ids);
        }
    }
    if spec.void_hole_rate > 0.0 {
        for map in &mut maps {
            for id in map.iter_mut() {
                if *id != VOID_SEGMENT
                    && !thing_ids.contains(id)
                    && rng.unit() < spec.void_hole_rate
                {
                    *id = VOID_SEGMENT;
                }
            }
        }
    }

    let frames = maps
        .into_iter()
        .map(|px| PanopticFrame::new(width, height, px))
        .collect::<Result<Vec<_>>>()?;
    PanopticVideo::new(width, height, frames, segments, categories)
}

fn flip_stuff(segments: &mut SegmentTable, p: f64, categories: &CategorySet, rng: &mut SynthRng) {
    let stuff: Vec<u32> = segments
        .iter()
        .filter(|(_, s)| categories.is_thing(s.category_id) == Some(false))
        .map(|(&id, _)| id)
        .collect();
    let mut flipped = BTreeSet::new();
    for &id in &stuff {
        if rng.unit() >= p || flipped.contains(&id) {
            continue;
        }
        let held: BTreeSet<u32> = stuff.iter().map(|s| segments[s].category_id).collect();
        let pool: Vec<u32> = categories
            .stuff_ids()
            .filter(|c| !held.contains(c))
            .collect();
        if !pool.is_empty() {
            let c = pool[rng.below(pool.len() as u64) as usize];
            segments.get_mut(&id).expect("stuff id").category_id = c;
            flipped.insert(id);
        } else {
            let others: Vec<u32> = stuff.iter().copied().filter(|&s| s != id).collect();
            if others.is_empty() {
                continue;
            }
            let partner = others[rng.below(others.len() as u64) as usize];
            let a = segments[&id].category_id;
            let b = segments[&partner].category_id;
            segments.get_mut(&id).expect("stuff id").category_id = b;
            segments.get_mut(&partner).expect("stuff id").category_id = a;
            flipped.insert(id);
            flipped.insert(partner);
        }
    }
}

fn flip_lone_things(
    video: &PanopticVideo,
    segments: &mut SegmentTable,
    p: f64,
    categories: &CategorySet,
    rng: &mut SynthRng,
) {
    let areas = video.segment_areas();
    let mut tubes: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    for (&id, s) in segments.iter() {
        if categories.is_thing(s.category_id) == Some(true) && areas.contains_key(&id) {
            tubes.entry(s.category_id).or_default().push(id);
        }
    }
    for ids in tubes.values() {
        if ids.len() != 1 || rng.unit() >= p {
            continue;
        }
        let present: BTreeSet<u32> = segments.values().map(|s| s.category_id).collect();
        let pool: Vec<u32> = categories
            .thing_ids()
            .filter(|c| !present.contains(c))
            .collect();
        if pool.is_empty() {
            continue;
        }
        let c = pool[rng.below(pool.len() as u64) as usize];
        segments.get_mut(&ids[0]).expect("thing id").category_id = c;
    }
}

fn swap_ids(
    maps: &mut [Vec<u32>],
    segments: &SegmentTable,
    t: usize,
    is_thing: &impl Fn(u32) -> bool,
    rng: &mut SynthRng,
) -> Result<()> {
    if t >= maps.len() {
        return Err(Error::Spec(format!(
            "id_swap_frame {t} is past the last frame ({})",
            maps.len()
        )));
    }
    let visible = |frame: &[u32]| -> BTreeSet<u32> { frame.iter().copied().collect() };
    let at_t = visible(&maps[t]);
    let before = if t > 0 {
        visible(&maps[t - 1])
    } else {
        at_t.clone()
    };
    let things: Vec<(u32, u32)> = segments
        .iter()
        .filter(|(id, s)| is_thing(s.category_id) && at_t.contains(id) && before.contains(id))
        .map(|(&id, s)| (id, s.category_id))
        .collect();
    let mut pairs = Vec::new();
    for (i, &(a, ca)) in things.iter().enumerate() {
        for &(b, cb) in &things[i + 1..] {
            if ca == cb {
                pairs.push((a, b));
            }
        }
    }
    if pairs.is_empty() {
        return Err(Error::Spec(format!(
            "id swap at frame {t} needs two thing tubes of one category visible there"
        )));
    }
    let (a, b) = pairs[rng.below(pairs.len() as u64) as usize];
    for map in &mut maps[t..] {
        for id in map.iter_mut() {
            if *id == a {
                *id = b;
            } else if *id == b {
                *id = a;
            }
        }
    }
    Ok(())
}

fn erode(map: &mut [u32], width: usize, height: usize, radius: usize, things: &BTreeSet<u32>) {
    let src = map.to_vec();
    let r = radius as isize;
    for y in 0..height {
        for x in 0..width {
            let id = src[y * width + x];
            if !things.contains(&id) {
                continue;
            }
            let mut keep = true;
            'ball: for dy in -r..=r {
                let yy = y as isize + dy;
                if yy < 0 || yy >= height as isize {
                    continue;
                }
                let reach = r - dy.abs();
                for dx in -reach..=reach {
                    let xx = x as isize + dx;
                    if xx < 0 || xx >= width as isize {
                        continue;
                    }
                    if src[yy as usize * width + xx as usize] != id {
                        keep = false;
                        break 'ball;
                    }
                }
            }
            if !keep {
                map[y * width + x] = VOID_SEGMENT;
            }
        }
    }
}
