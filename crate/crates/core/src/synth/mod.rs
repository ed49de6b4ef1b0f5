//! Deterministic synthetic videos and controlled corruptions of them.

mod corrupt;
mod rng;
mod scene;

pub use corrupt::{corrupt, CorruptionSpec};
pub use rng::SynthRng;
pub use scene::{generate, plan, ScenePlan, SceneSpec, Shape, ThingPlan};

use crate::vpsdata::{Category, CategorySet};

/// Small category set for demos and tests: stuff 1..=6, things 11..=16.
pub fn demo_categories() -> CategorySet {
    let stuff = ["sky", "road", "grass", "water", "building", "wall"];
    let things = ["person", "car", "bicycle", "dog", "boat", "bird"];
    let mut entries = Vec::new();
    for (i, name) in stuff.iter().enumerate() {
        entries.push(Category {
            id: 1 + i as u32,
            name: (*name).into(),
            is_thing: false,
        });
    }
    for (i, name) in things.iter().enumerate() {
        entries.push(Category {
            id: 11 + i as u32,
            name: (*name).into(),
            is_thing: true,
        });
    }
    CategorySet::new(entries).expect("demo categories are valid")
}
