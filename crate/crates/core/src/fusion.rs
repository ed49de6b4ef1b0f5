//! Semantic-guided correction of panoptic videos.
//!
//! Three stages run in order, each gated by a [`FusionConfig`] flag:
//!
//! 1. **Stuff relabel.** Every stuff tube takes a whole-video majority vote
//!    over the semantic labels under its pixels. If the winner is a different
//!    stuff category with a vote fraction of at least `stuff_vote_threshold`,
//!    the tube is relabeled for the entire video. Tubes that end up sharing a
//!    category merge into one segment id.
//! 2. **Single-thing relabel.** A thing category with exactly one instance
//!    tube in the video is relabeled the same way, towards thing categories
//!    only. The instance id is kept unless the target pair is taken, in which
//!    case the smallest free instance id is used.
//! 3. **Void fill.** Panoptic void pixels whose semantic label is a stuff
//!    category join that category's stuff segment, created if missing.
//!    Things are never filled.
//!
//! Votes ignore semantic void pixels. Relabeling never crosses the
//! thing/stuff boundary.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vpsdata::{
    CategorySet, PanopticFrame, PanopticVideo, SegmentInfo, SegmentTable, SemanticVideo,
    VOID_CATEGORY, VOID_SEGMENT,
};

/// Which thing tubes the single-thing stage may touch.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SingleThingScope {
    /// A tube is eligible when its category has exactly one instance in the video.
    #[default]
    PerCategory,
    /// Only when the whole video holds exactly one thing tube.
    WholeVideo,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FusionConfig {
    pub stuff_vote_threshold: f64,
    pub thing_vote_threshold: f64,
    pub enable_stuff_correction: bool,
    pub enable_single_thing_correction: bool,
    pub enable_void_fill: bool,
    pub single_thing_scope: SingleThingScope,
}

impl Default for FusionConfig {
    fn default() -> Self {
        Self {
            stuff_vote_threshold: 0.5,
            thing_vote_threshold: 0.5,
            enable_stuff_correction: true,
            enable_single_thing_correction: true,
            enable_void_fill: false,
            single_thing_scope: SingleThingScope::PerCategory,
        }
    }
}

impl FusionConfig {
    /// Every stage off; `fuse` returns its input unchanged.
    pub fn disabled() -> Self {
        Self {
            enable_stuff_correction: false,
            enable_single_thing_correction: false,
            enable_void_fill: false,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, t) in [
            ("stuff vote threshold", self.stuff_vote_threshold),
            ("thing vote threshold", self.thing_vote_threshold),
        ] {
            if !(t > 0.0 && t <= 1.0) {
                return Err(Error::Spec(format!("{name} must lie in (0, 1], got {t}")));
            }
        }
        Ok(())
    }
}

/// Outcome of a majority vote over semantic labels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Vote {
    Category {
        category_id: u32,
        fraction: f64,
    },
    /// Every pixel was semantic void.
    NoVote,
}

/// Most frequent non-void label and its share of the non-void labels; ties go
/// to the smallest id.
pub fn majority_label(labels: impl IntoIterator<Item = u8>) -> Vote {
    let mut counts = [0u64; 256];
    for l in labels {
        counts[usize::from(l)] += 1;
    }
    vote_from_counts(&counts)
}

fn vote_from_counts(counts: &[u64; 256]) -> Vote {
    let mut total = 0u64;
    let mut best: Option<(usize, u64)> = None;
    for (label, &n) in counts.iter().enumerate() {
        if label == usize::from(VOID_CATEGORY) || n == 0 {
            continue;
        }
        total += n;
        if best.is_none_or(|(_, m)| n > m) {
            best = Some((label, n));
        }
    }
    match best {
        Some((label, n)) => Vote::Category {
            category_id: label as u32,
            fraction: n as f64 / total as f64,
        },
        None => Vote::NoVote,
    }
}

/// Semantic label histogram under every segment id, over all frames.
fn segment_label_counts(pan: &PanopticVideo, sem: &SemanticVideo) -> HashMap<u32, Box<[u64; 256]>> {
    let mut index: HashMap<u32, usize> = HashMap::new();
    let mut tables: Vec<Box<[u64; 256]>> = Vec::new();
    for (frame, labels) in pan.frames().iter().zip(sem.frames()) {
        let mut last: Option<(u32, usize)> = None;
        for (&id, &label) in frame.pixels().iter().zip(labels) {
            if id == VOID_SEGMENT {
                continue;
            }
            let slot = match last {
                Some((last_id, slot)) if last_id == id => slot,
                _ => {
                    let slot = *index.entry(id).or_insert_with(|| {
                        tables.push(Box::new([0; 256]));
                        tables.len() - 1
                    });
                    last = Some((id, slot));
                    slot
                }
            };
            tables[slot][usize::from(label)] += 1;
        }
    }
    index
        .into_iter()
        .map(|(id, slot)| (id, std::mem::replace(&mut tables[slot], Box::new([0; 256]))))
        .collect()
}

fn votes(pan: &PanopticVideo, sem: &SemanticVideo) -> BTreeMap<u32, Vote> {
    segment_label_counts(pan, sem)
        .into_iter()
        .map(|(id, counts)| (id, vote_from_counts(&counts)))
        .collect()
}

/// Majority vote over the semantic labels under one segment's pixels.
pub fn semantic_majority(
    pan: &PanopticVideo,
    sem: &SemanticVideo,
    segment_id: u32,
) -> Result<Vote> {
    sem.check_matches(pan)?;
    let labels = pan
        .frames()
        .iter()
        .zip(sem.frames())
        .flat_map(|(f, s)| f.pixels().iter().zip(s))
        .filter(|(&id, _)| id == segment_id)
        .map(|(_, &l)| l);
    Ok(majority_label(labels))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FusionRule {
    StuffRelabel,
    SingleThingRelabel,
    VoidFill,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FusionRecord {
    pub segment_id: u32,
    /// `None` for a segment created by void fill.
    pub old_category: Option<u32>,
    pub new_category: u32,
    pub vote_fraction: Option<f64>,
    pub rule: FusionRule,
    /// Set when a relabeled stuff tube was folded into an existing segment.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub merged_into: Option<u32>,
    /// Set when a relabeled thing had to change instance id.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub new_instance_id: Option<u32>,
    pub filled_pixels: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FusionAudit {
    pub records: Vec<FusionRecord>,
    pub relabeled_stuff: usize,
    pub relabeled_things: usize,
    pub filled_void_pixels: u64,
}

impl FusionAudit {
    pub fn extend(&mut self, other: FusionAudit) {
        self.records.extend(other.records);
        self.relabeled_stuff += other.relabeled_stuff;
        self.relabeled_things += other.relabeled_things;
        self.filled_void_pixels += other.filled_void_pixels;
    }
}

fn rebuild(
    pan: &PanopticVideo,
    frames: Vec<PanopticFrame>,
    segments: SegmentTable,
    categories: &CategorySet,
) -> Result<PanopticVideo> {
    PanopticVideo::new(pan.width(), pan.height(), frames, segments, categories)
}

pub fn correct_stuff(
    pan: &PanopticVideo,
    sem: &SemanticVideo,
    categories: &CategorySet,
    cfg: &FusionConfig,
) -> Result<(PanopticVideo, FusionAudit)> {
    sem.check_matches(pan)?;
    cfg.validate()?;
    let is_stuff = |c: u32| categories.is_thing(c) == Some(false);
    let votes = votes(pan, sem);

    // Decisions are taken against the input video only, so the outcome does
    // not depend on processing order.
    let mut decisions: BTreeMap<u32, (u32, f64)> = BTreeMap::new();
    for (&id, info) in pan.segments() {
        if !is_stuff(info.category_id) {
            continue;
        }
        if let Some(&Vote::Category {
            category_id,
            fraction,
        }) = votes.get(&id)
        {
            if is_stuff(category_id)
                && category_id != info.category_id
                && fraction >= cfg.stuff_vote_threshold
            {
                decisions.insert(id, (category_id, fraction));
            }
        }
    }
    if decisions.is_empty() {
        return Ok((pan.clone(), FusionAudit::default()));
    }

    // Group stuff segments by final category; an unchanged segment keeps its
    // id, otherwise the smallest id survives.
    let mut groups: BTreeMap<u32, Vec<(u32, bool)>> = BTreeMap::new();
    for (&id, info) in pan.segments() {
        if !is_stuff(info.category_id) {
            continue;
        }
        let (target, changed) = match decisions.get(&id) {
            Some(&(c, _)) => (c, true),
            None => (info.category_id, false),
        };
        groups.entry(target).or_default().push((id, changed));
    }
    let mut remap: HashMap<u32, u32> = HashMap::new();
    let mut segments = pan.segments().clone();
    let mut audit = FusionAudit::default();
    for (&target, members) in &groups {
        let survivor = members
            .iter()
            .find(|(_, changed)| !changed)
            .or_else(|| members.iter().min_by_key(|(id, _)| *id))
            .map(|&(id, _)| id)
            .expect("group is non-empty");
        for &(id, changed) in members {
            if !changed {
                continue;
            }
            let old = pan.segments()[&id].category_id;
            let merged_into = (id != survivor).then_some(survivor);
            if let Some(s) = merged_into {
                remap.insert(id, s);
                segments.remove(&id);
            } else {
                segments.insert(
                    id,
                    SegmentInfo {
                        category_id: target,
                        instance_id: 0,
                    },
                );
            }
            audit.records.push(FusionRecord {
                segment_id: id,
                old_category: Some(old),
                new_category: target,
                vote_fraction: Some(decisions[&id].1),
                rule: FusionRule::StuffRelabel,
                merged_into,
                new_instance_id: None,
                filled_pixels: 0,
            });
            audit.relabeled_stuff += 1;
        }
    }
    audit.records.sort_by_key(|r| r.segment_id);

    let frames = if remap.is_empty() {
        pan.frames().to_vec()
    } else {
        pan.frames()
            .iter()
            .map(|f| {
                let px = f
                    .pixels()
                    .iter()
                    .map(|id| remap.get(id).copied().unwrap_or(*id))
                    .collect();
                PanopticFrame::new(f.width(), f.height(), px)
            })
            .collect::<Result<_>>()?
    };
    Ok((rebuild(pan, frames, segments, categories)?, audit))
}

pub fn correct_single_thing(
    pan: &PanopticVideo,
    sem: &SemanticVideo,
    categories: &CategorySet,
    cfg: &FusionConfig,
) -> Result<(PanopticVideo, FusionAudit)> {
    sem.check_matches(pan)?;
    cfg.validate()?;
    let is_thing = |c: u32| categories.is_thing(c) == Some(true);
    let votes = votes(pan, sem);

    // Tubes are segments that actually cover pixels.
    let mut tubes_per_category: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    for (&id, info) in pan.segments() {
        if is_thing(info.category_id) && votes.contains_key(&id) {
            tubes_per_category
                .entry(info.category_id)
                .or_default()
                .push(id);
        }
    }
    let total_tubes: usize = tubes_per_category.values().map(Vec::len).sum();
    let eligible: Vec<u32> = match cfg.single_thing_scope {
        SingleThingScope::PerCategory => tubes_per_category
            .values()
            .filter(|ids| ids.len() == 1)
            .map(|ids| ids[0])
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect(),
        SingleThingScope::WholeVideo if total_tubes == 1 => {
            tubes_per_category.values().flatten().copied().collect()
        }
        SingleThingScope::WholeVideo => Vec::new(),
    };

    let mut occupied: BTreeSet<(u32, u32)> = pan
        .segments()
        .values()
        .filter(|s| is_thing(s.category_id))
        .map(|s| (s.category_id, s.instance_id))
        .collect();
    let mut segments = pan.segments().clone();
    let mut audit = FusionAudit::default();
    for id in eligible {
        let info = pan.segments()[&id];
        let Some(&Vote::Category {
            category_id,
            fraction,
        }) = votes.get(&id)
        else {
            continue;
        };
        if !is_thing(category_id)
            || category_id == info.category_id
            || fraction < cfg.thing_vote_threshold
        {
            continue;
        }
        let instance_id = if occupied.contains(&(category_id, info.instance_id)) {
            (1..)
                .find(|i| !occupied.contains(&(category_id, *i)))
                .expect("a free instance id exists")
        } else {
            info.instance_id
        };
        occupied.remove(&(info.category_id, info.instance_id));
        occupied.insert((category_id, instance_id));
        segments.insert(
            id,
            SegmentInfo {
                category_id,
                instance_id,
            },
        );
        audit.records.push(FusionRecord {
            segment_id: id,
            old_category: Some(info.category_id),
            new_category: category_id,
            vote_fraction: Some(fraction),
            rule: FusionRule::SingleThingRelabel,
            merged_into: None,
            new_instance_id: (instance_id != info.instance_id).then_some(instance_id),
            filled_pixels: 0,
        });
        audit.relabeled_things += 1;
    }
    if audit.records.is_empty() {
        return Ok((pan.clone(), audit));
    }
    Ok((
        rebuild(pan, pan.frames().to_vec(), segments, categories)?,
        audit,
    ))
}

pub fn fill_void(
    pan: &PanopticVideo,
    sem: &SemanticVideo,
    categories: &CategorySet,
) -> Result<(PanopticVideo, FusionAudit)> {
    sem.check_matches(pan)?;
    let mut stuff_lookup = [false; 256];
    for c in categories.stuff_ids() {
        stuff_lookup[c as usize] = true;
    }

    let mut needed = BTreeSet::new();
    for (frame, labels) in pan.frames().iter().zip(sem.frames()) {
        for (&id, &label) in frame.pixels().iter().zip(labels) {
            if id == VOID_SEGMENT && stuff_lookup[usize::from(label)] {
                needed.insert(u32::from(label));
            }
        }
    }
    if needed.is_empty() {
        return Ok((pan.clone(), FusionAudit::default()));
    }

    let mut segments = pan.segments().clone();
    let mut target = [VOID_SEGMENT; 256];
    let mut created = BTreeSet::new();
    for (&id, info) in pan.segments() {
        if stuff_lookup[info.category_id as usize] {
            target[info.category_id as usize] = id;
        }
    }
    let mut next_id = pan.segments().keys().next_back().map_or(1, |&m| m + 1);
    for &c in &needed {
        if target[c as usize] == VOID_SEGMENT {
            target[c as usize] = next_id;
            segments.insert(
                next_id,
                SegmentInfo {
                    category_id: c,
                    instance_id: 0,
                },
            );
            created.insert(next_id);
            next_id += 1;
        }
    }

    let mut filled: BTreeMap<u32, u64> = BTreeMap::new();
    let mut frames = Vec::with_capacity(pan.len());
    for (frame, labels) in pan.frames().iter().zip(sem.frames()) {
        let mut px = frame.pixels().to_vec();
        for (id, &label) in px.iter_mut().zip(labels) {
            if *id == VOID_SEGMENT && stuff_lookup[usize::from(label)] {
                *id = target[usize::from(label)];
                *filled.entry(*id).or_insert(0) += 1;
            }
        }
        frames.push(PanopticFrame::new(frame.width(), frame.height(), px)?);
    }

    let mut audit = FusionAudit::default();
    for (&id, &n) in &filled {
        let category = segments[&id].category_id;
        audit.records.push(FusionRecord {
            segment_id: id,
            old_category: (!created.contains(&id)).then_some(category),
            new_category: category,
            vote_fraction: None,
            rule: FusionRule::VoidFill,
            merged_into: None,
            new_instance_id: None,
            filled_pixels: n,
        });
        audit.filled_void_pixels += n;
    }
    Ok((rebuild(pan, frames, segments, categories)?, audit))
}

/// Runs the enabled stages in order: stuff relabel, single-thing relabel, void fill.
pub fn fuse(
    pan: &PanopticVideo,
    sem: &SemanticVideo,
    categories: &CategorySet,
    cfg: &FusionConfig,
) -> Result<(PanopticVideo, FusionAudit)> {
    sem.check_matches(pan)?;
    cfg.validate()?;
    let mut video = pan.clone();
    let mut audit = FusionAudit::default();
    if cfg.enable_stuff_correction {
        let (v, a) = correct_stuff(&video, sem, categories, cfg)?;
        video = v;
        audit.extend(a);
    }
    if cfg.enable_single_thing_correction {
        let (v, a) = correct_single_thing(&video, sem, categories, cfg)?;
        video = v;
        audit.extend(a);
    }
    if cfg.enable_void_fill {
        let (v, a) = fill_void(&video, sem, categories)?;
        video = v;
        audit.extend(a);
    }
    Ok((video, audit))
}
