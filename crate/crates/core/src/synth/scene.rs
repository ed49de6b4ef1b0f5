use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::synth::rng::SynthRng;
use crate::vpsdata::{
    CategorySet, PanopticFrame, PanopticVideo, SegmentInfo, SegmentTable, SemanticVideo,
};

/// Description of one synthetic video.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneSpec {
    pub width: usize,
    pub height: usize,
    pub frames: usize,
    pub n_things: usize,
    /// Number of horizontal stuff bands covering the frame, top to bottom.
    pub stuff_bands: usize,
    /// Smallest instance side in pixels (default: half of `max_extent`).
    #[serde(default)]
    pub min_extent: Option<usize>,
    /// Largest instance side in pixels (default: a quarter of the shorter frame side).
    #[serde(default)]
    pub max_extent: Option<usize>,
    /// Per-axis velocity bound in pixels per frame.
    #[serde(default = "default_max_speed")]
    pub max_speed: i64,
    /// Categories instances are drawn from (default: every thing category).
    #[serde(default)]
    pub thing_categories: Option<Vec<u32>>,
    /// Categories bands are drawn from (default: every stuff category).
    #[serde(default)]
    pub stuff_categories: Option<Vec<u32>>,
    pub seed: u64,
}

fn default_max_speed() -> i64 {
    2
}

impl SceneSpec {
    pub fn new(
        width: usize,
        height: usize,
        frames: usize,
        n_things: usize,
        stuff_bands: usize,
        seed: u64,
    ) -> Self {
        Self {
            width,
            height,
            frames,
            n_things,
            stuff_bands,
            min_extent: None,
            max_extent: None,
            max_speed: default_max_speed(),
            thing_categories: None,
            stuff_categories: None,
            seed,
        }
    }

    fn extents(&self) -> Result<(usize, usize)> {
        let shorter = self.width.min(self.height);
        let max = self.max_extent.unwrap_or((shorter / 4).max(1));
        let min = self.min_extent.unwrap_or((max / 2).max(1));
        if max > shorter {
            return Err(Error::Spec(format!(
                "instance extent {max} is larger than the {}x{} frame",
                self.width, self.height
            )));
        }
        if min == 0 || min > max {
            return Err(Error::Spec(format!(
                "invalid instance extents [{min}, {max}]"
            )));
        }
        Ok((min, max))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Rectangle,
    Ellipse,
}

/// A moving instance; its box origin at frame `t` is
/// `((x0 + dx·t) mod W, (y0 + dy·t) mod H)` and the box wraps at borders.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ThingPlan {
    pub segment_id: u32,
    pub category_id: u32,
    pub instance_id: u32,
    pub shape: Shape,
    pub w: usize,
    pub h: usize,
    pub x0: usize,
    pub y0: usize,
    pub dx: i64,
    pub dy: i64,
}

impl ThingPlan {
    /// Whether box-local offset `(u, v)` is inside the shape.
    pub fn covers(&self, u: usize, v: usize) -> bool {
        match self.shape {
            Shape::Rectangle => u < self.w && v < self.h,
            Shape::Ellipse => {
                if u >= self.w || v >= self.h {
                    return false;
                }
                // (2u+1-w)^2 h^2 + (2v+1-h)^2 w^2 <= w^2 h^2
                let (w, h) = (self.w as i64, self.h as i64);
                let a = 2 * u as i64 + 1 - w;
                let b = 2 * v as i64 + 1 - h;
                a * a * h * h + b * b * w * w <= w * w * h * h
            }
        }
    }

    pub fn origin(&self, t: usize, width: usize, height: usize) -> (usize, usize) {
        let x = (self.x0 as i64 + self.dx * t as i64).rem_euclid(width as i64) as usize;
        let y = (self.y0 as i64 + self.dy * t as i64).rem_euclid(height as i64) as usize;
        (x, y)
    }
}

/// Everything needed to paint a scene; drawn from the seed before painting.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScenePlan {
    pub width: usize,
    pub height: usize,
    pub frames: usize,
    /// `(segment id, category id, first row, row count)` per band.
    pub bands: Vec<(u32, u32, usize, usize)>,
    pub things: Vec<ThingPlan>,
}

fn category_pool(
    requested: &Option<Vec<u32>>,
    available: Vec<u32>,
    categories: &CategorySet,
    want_thing: bool,
) -> Result<Vec<u32>> {
    match requested {
        None => Ok(available),
        Some(ids) => {
            for &id in ids {
                if categories.is_thing(id) != Some(want_thing) {
                    return Err(Error::Spec(format!(
                        "category {id} is not a known {} category",
                        if want_thing { "thing" } else { "stuff" }
                    )));
                }
            }
            Ok(ids.clone())
        }
    }
}

/// Draws the scene layout. Draw order, all from one [`SynthRng`] seeded with
/// `spec.seed`:
///
/// 1. band categories by partial Fisher–Yates over the stuff pool (sorted
///    ascending, duplicates dropped): for band
///    `i`, `j = i + below(len - i)`, swap `pool[i]` and `pool[j]`;
/// 2. per instance, in order: category `below(len)` of the thing pool, shape
///    `below(2)` (0 rectangle, 1 ellipse), width and height
///    `between(min, max)`, `x0 = below(W)`, `y0 = below(H)`,
///    `dx` and `dy` `between(-max_speed, max_speed)`.
///
/// Bands get segment ids `1..=B`, instances `B+1..` in draw order; instance
/// ids count from 1 per category.
pub fn plan(spec: &SceneSpec, categories: &CategorySet) -> Result<ScenePlan> {
    if spec.width == 0 || spec.height == 0 || spec.frames == 0 {
        return Err(Error::Spec(
            "scene dimensions and frame count must be positive".into(),
        ));
    }
    if spec.max_speed < 0 {
        return Err(Error::Spec("max_speed must be non-negative".into()));
    }
    let (min_extent, max_extent) = spec.extents()?;
    let mut stuff_pool = category_pool(
        &spec.stuff_categories,
        categories.stuff_ids().collect(),
        categories,
        false,
    )?;
    stuff_pool.sort_unstable();
    stuff_pool.dedup();
    let thing_pool = category_pool(
        &spec.thing_categories,
        categories.thing_ids().collect(),
        categories,
        true,
    )?;
    if spec.stuff_bands == 0 || spec.stuff_bands > stuff_pool.len() {
        return Err(Error::Spec(format!(
            "{} stuff bands requested, {} distinct stuff categories available (need at least one band)",
            spec.stuff_bands,
            stuff_pool.len()
        )));
    }
    if spec.stuff_bands > spec.height {
        return Err(Error::Spec("more stuff bands than rows".into()));
    }
    if spec.n_things > 0 && thing_pool.is_empty() {
        return Err(Error::Spec(
            "instances requested but no thing category available".into(),
        ));
    }

    let mut rng = SynthRng::new(spec.seed);
    for i in 0..spec.stuff_bands {
        let j = i + rng.below((stuff_pool.len() - i) as u64) as usize;
        stuff_pool.swap(i, j);
    }
    let base = spec.height / spec.stuff_bands;
    let mut bands = Vec::with_capacity(spec.stuff_bands);
    let mut row = 0;
    for (i, &category) in stuff_pool[..spec.stuff_bands].iter().enumerate() {
        let rows = if i + 1 == spec.stuff_bands {
            spec.height - row
        } else {
            base
        };
        bands.push((i as u32 + 1, category, row, rows));
        row += rows;
    }

    let mut next_instance: BTreeMap<u32, u32> = BTreeMap::new();
    let mut things = Vec::with_capacity(spec.n_things);
    for n in 0..spec.n_things {
        let category_id = thing_pool[rng.below(thing_pool.len() as u64) as usize];
        let shape = if rng.below(2) == 0 {
            Shape::Rectangle
        } else {
            Shape::Ellipse
        };
        let w = rng.between(min_extent as i64, max_extent as i64) as usize;
        let h = rng.between(min_extent as i64, max_extent as i64) as usize;
        let x0 = rng.below(spec.width as u64) as usize;
        let y0 = rng.below(spec.height as u64) as usize;
        let dx = rng.between(-spec.max_speed, spec.max_speed);
        let dy = rng.between(-spec.max_speed, spec.max_speed);
        let instance = next_instance.entry(category_id).or_insert(0);
        *instance += 1;
        things.push(ThingPlan {
            segment_id: (spec.stuff_bands + n + 1) as u32,
            category_id,
            instance_id: *instance,
            shape,
            w,
            h,
            x0,
            y0,
            dx,
            dy,
        });
    }
    Ok(ScenePlan {
        width: spec.width,
        height: spec.height,
        frames: spec.frames,
        bands,
        things,
    })
}

impl ScenePlan {
    pub fn segment_table(&self) -> SegmentTable {
        let stuff = self.bands.iter().map(|&(id, category_id, _, _)| {
            (
                id,
                SegmentInfo {
                    category_id,
                    instance_id: 0,
                },
            )
        });
        let things = self.things.iter().map(|t| {
            (
                t.segment_id,
                SegmentInfo {
                    category_id: t.category_id,
                    instance_id: t.instance_id,
                },
            )
        });
        stuff.chain(things).collect()
    }

    pub fn paint_frame(&self, t: usize) -> Vec<u32> {
        let (w, h) = (self.width, self.height);
        let mut px = vec![0u32; w * h];
        for &(id, _, first, rows) in &self.bands {
            px[first * w..(first + rows) * w].fill(id);
        }
        // Later instances occlude earlier ones.
        for thing in &self.things {
            let (ox, oy) = thing.origin(t, w, h);
            for v in 0..thing.h {
                let y = (oy + v) % h;
                for u in 0..thing.w {
                    if thing.covers(u, v) {
                        px[y * w + (ox + u) % w] = thing.segment_id;
                    }
                }
            }
        }
        px
    }
}

/// Ground-truth video and its exact semantic collapse.
pub fn generate(
    spec: &SceneSpec,
    categories: &CategorySet,
) -> Result<(PanopticVideo, SemanticVideo)> {
    let plan = plan(spec, categories)?;
    let frames = (0..plan.frames)
        .map(|t| PanopticFrame::new(plan.width, plan.height, plan.paint_frame(t)))
        .collect::<Result<Vec<_>>>()?;
    let gt = PanopticVideo::new(
        plan.width,
        plan.height,
        frames,
        plan.segment_table(),
        categories,
    )?;
    let sem = gt.semantic_collapse();
    Ok((gt, sem))
}
