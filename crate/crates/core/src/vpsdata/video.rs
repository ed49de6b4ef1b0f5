use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vpsdata::{CategorySet, VOID_CATEGORY, VOID_SEGMENT};

/// Category and instance identity of one segment id.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentInfo {
    pub category_id: u32,
    pub instance_id: u32,
}

/// Segment id → identity. Ordered so iteration and serialization are canonical.
pub type SegmentTable = BTreeMap<u32, SegmentInfo>;

/// One frame of dense segment ids, row-major, `0` = void.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PanopticFrame {
    width: usize,
    height: usize,
    segment_map: Vec<u32>,
}

impl PanopticFrame {
    pub fn new(width: usize, height: usize, segment_map: Vec<u32>) -> Result<Self> {
        if segment_map.len() != width * height {
            return Err(Error::Integrity(format!(
                "segment map holds {} pixels, expected {width}x{height}",
                segment_map.len()
            )));
        }
        Ok(Self {
            width,
            height,
            segment_map,
        })
    }

    pub fn void(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            segment_map: vec![VOID_SEGMENT; width * height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u32] {
        &self.segment_map
    }

    pub fn get(&self, x: usize, y: usize) -> u32 {
        self.segment_map[y * self.width + x]
    }

    pub fn into_pixels(self) -> Vec<u32> {
        self.segment_map
    }
}

/// A panoptic video: uniform-size frames plus the segment table they index.
///
/// Construction validates every invariant; a value of this type is always
/// consistent with the [`CategorySet`] it was built against.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PanopticVideo {
    width: usize,
    height: usize,
    frames: Vec<PanopticFrame>,
    segments: SegmentTable,
}

impl PanopticVideo {
    pub fn new(
        width: usize,
        height: usize,
        frames: Vec<PanopticFrame>,
        segments: SegmentTable,
        categories: &CategorySet,
    ) -> Result<Self> {
        if segments.contains_key(&VOID_SEGMENT) {
            return Err(Error::Integrity(
                "segment table contains the void id 0".into(),
            ));
        }
        let mut stuff_seen: BTreeMap<u32, u32> = BTreeMap::new();
        let mut things_seen: BTreeSet<(u32, u32)> = BTreeSet::new();
        for (&id, info) in &segments {
            let Some(cat) = categories.get(info.category_id) else {
                return Err(Error::Integrity(format!(
                    "segment {id} has unknown category {}",
                    info.category_id
                )));
            };
            if cat.is_thing {
                if !things_seen.insert((info.category_id, info.instance_id)) {
                    return Err(Error::Integrity(format!(
                        "thing (category {}, instance {}) appears under two segment ids",
                        info.category_id, info.instance_id
                    )));
                }
            } else {
                if info.instance_id != 0 {
                    return Err(Error::Integrity(format!(
                        "stuff segment {id} has instance id {} (must be 0)",
                        info.instance_id
                    )));
                }
                if let Some(other) = stuff_seen.insert(info.category_id, id) {
                    return Err(Error::Integrity(format!(
                        "stuff category {} has two segment ids ({other} and {id})",
                        info.category_id
                    )));
                }
            }
        }
        for (t, frame) in frames.iter().enumerate() {
            if frame.width != width || frame.height != height {
                return Err(Error::Integrity(format!(
                    "frame {t} is {}x{}, video is {width}x{height}",
                    frame.width, frame.height
                )));
            }
            let mut last = VOID_SEGMENT;
            for &id in &frame.segment_map {
                if id != last && id != VOID_SEGMENT && !segments.contains_key(&id) {
                    return Err(Error::Integrity(format!(
                        "frame {t} references segment id {id} absent from the segment table"
                    )));
                }
                last = id;
            }
        }
        Ok(Self {
            width,
            height,
            frames,
            segments,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn frames(&self) -> &[PanopticFrame] {
        &self.frames
    }

    pub fn frame(&self, t: usize) -> &PanopticFrame {
        &self.frames[t]
    }

    pub fn segments(&self) -> &SegmentTable {
        &self.segments
    }

    pub fn segment(&self, id: u32) -> Option<&SegmentInfo> {
        self.segments.get(&id)
    }

    pub fn into_parts(self) -> (usize, usize, Vec<PanopticFrame>, SegmentTable) {
        (self.width, self.height, self.frames, self.segments)
    }

    /// Pixel count of every segment id over the whole video (void excluded).
    pub fn segment_areas(&self) -> BTreeMap<u32, u64> {
        let mut areas = BTreeMap::new();
        for frame in &self.frames {
            for &id in &frame.segment_map {
                if id != VOID_SEGMENT {
                    *areas.entry(id).or_insert(0u64) += 1;
                }
            }
        }
        areas
    }

    /// Drops every frame-level category down to its semantic label (`255` for void).
    pub fn semantic_collapse(&self) -> SemanticVideo {
        let frames = self
            .frames
            .iter()
            .map(|f| {
                f.segment_map
                    .iter()
                    .map(|&id| match self.segments.get(&id) {
                        Some(info) => info.category_id as u8,
                        None => VOID_CATEGORY,
                    })
                    .collect()
            })
            .collect();
        SemanticVideo {
            width: self.width,
            height: self.height,
            frames,
        }
    }

    /// Checks that two videos can be compared pixel-for-pixel.
    pub fn check_same_shape(&self, other: &PanopticVideo) -> Result<()> {
        if self.width != other.width || self.height != other.height || self.len() != other.len() {
            return Err(Error::Shape(format!(
                "videos differ in shape: {}x{}x{} vs {}x{}x{}",
                self.width,
                self.height,
                self.len(),
                other.width,
                other.height,
                other.len()
            )));
        }
        Ok(())
    }
}

/// Per-frame dense category labels, `255` = void.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemanticVideo {
    width: usize,
    height: usize,
    frames: Vec<Vec<u8>>,
}

impl SemanticVideo {
    pub fn new(
        width: usize,
        height: usize,
        frames: Vec<Vec<u8>>,
        categories: &CategorySet,
    ) -> Result<Self> {
        let mut known = [false; 256];
        known[usize::from(VOID_CATEGORY)] = true;
        for c in categories.entries() {
            known[c.id as usize] = true;
        }
        for (t, frame) in frames.iter().enumerate() {
            if frame.len() != width * height {
                return Err(Error::Integrity(format!(
                    "semantic frame {t} holds {} pixels, expected {width}x{height}",
                    frame.len()
                )));
            }
            if let Some(&bad) = frame.iter().find(|&&v| !known[usize::from(v)]) {
                return Err(Error::Integrity(format!(
                    "semantic frame {t} contains label {bad}, which is not a known category"
                )));
            }
        }
        Ok(Self {
            width,
            height,
            frames,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn frames(&self) -> &[Vec<u8>] {
        &self.frames
    }

    pub fn frame(&self, t: usize) -> &[u8] {
        &self.frames[t]
    }

    pub fn check_matches(&self, pan: &PanopticVideo) -> Result<()> {
        if self.width != pan.width() || self.height != pan.height() || self.len() != pan.len() {
            return Err(Error::Shape(format!(
                "semantic video is {}x{}x{}, panoptic video is {}x{}x{}",
                self.width,
                self.height,
                self.len(),
                pan.width(),
                pan.height(),
                pan.len()
            )));
        }
        Ok(())
    }
}
