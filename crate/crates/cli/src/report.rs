//! The report document. Field order is fixed by the struct definitions and
//! every map is ordered, so equal runs serialize to equal bytes.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use vpseval_core::fusion::{FusionAudit, FusionConfig, FusionRecord};
use vpseval_core::metrics::{
    format_percent, AccumulatorSet, CategoryTally, FixedSum, StqAccumulator, StqReport,
};
use vpseval_core::vpsdata::CategorySet;

pub const TOOL: &str = "vpseval";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: ConfigEcho,
    pub videos: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vpq: Option<VpqSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stq: Option<StqSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fusion: Option<FusionSection>,
    pub per_video: Vec<VideoEntry>,
    /// Everything that may differ between otherwise identical runs.
    pub timings: Timings,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigEcho {
    pub categories: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gt: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pred: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub semantic: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pooling: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub empty_aq_as_one: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fusion: Option<FusionConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VpqSection {
    pub pooling: String,
    pub mean_vpq: f64,
    pub mean_vpq_pct: String,
    pub per_k: Vec<SpanEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpanEntry {
    pub k: usize,
    pub vpq: f64,
    pub vpq_pct: String,
    pub n_categories: usize,
    /// Pooled tallies of every present category.
    pub categories: Vec<CategoryEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CategoryEntry {
    pub category_id: u32,
    pub name: String,
    pub is_thing: bool,
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    /// Summed TP IoU as a Q64 fixed-point integer (value × 2^64), in decimal.
    pub iou_sum_q64: String,
    pub vpq: f64,
}

impl CategoryEntry {
    pub fn tally(&self) -> Option<CategoryTally> {
        Some(CategoryTally {
            tp: self.tp,
            fp: self.fp,
            fn_: self.fn_,
            iou_sum: FixedSum::from_raw(self.iou_sum_q64.parse().ok()?),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StqSection {
    pub sq: f64,
    pub aq: f64,
    pub stq: f64,
    pub sq_pct: String,
    pub aq_pct: String,
    pub stq_pct: String,
    pub gt_tracks: u64,
    /// Summed per-track association scores, Q64 fixed point in decimal.
    pub aq_sum_q64: String,
    pub categories: Vec<IouEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IouEntry {
    pub category_id: u32,
    pub name: String,
    pub intersection: u64,
    pub union: u64,
    pub iou: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FusionSection {
    pub videos_changed: usize,
    pub relabeled_stuff: usize,
    pub relabeled_things: usize,
    pub filled_void_pixels: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VideoEntry {
    pub video_id: String,
    /// `null` where the span is undefined for this video alone.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vpq: Option<Vec<SpanValue>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stq: Option<VideoStq>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub audit: Option<VideoAudit>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpanValue {
    pub k: usize,
    pub vpq: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VideoStq {
    pub sq: Option<f64>,
    pub aq: Option<f64>,
    pub stq: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VideoAudit {
    pub relabeled_stuff: usize,
    pub relabeled_things: usize,
    pub filled_void_pixels: u64,
    pub records: Vec<FusionRecord>,
}

impl From<FusionAudit> for VideoAudit {
    fn from(a: FusionAudit) -> Self {
        Self {
            relabeled_stuff: a.relabeled_stuff,
            relabeled_things: a.relabeled_things,
            filled_void_pixels: a.filled_void_pixels,
            records: a.records,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Timings {
    pub jobs: usize,
    pub process_ms: f64,
    pub merge_ms: f64,
    pub total_ms: f64,
}

impl Report {
    pub fn new(command: &str, config: ConfigEcho, videos: Vec<String>) -> Self {
        Self {
            tool: TOOL.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config,
            videos,
            vpq: None,
            stq: None,
            fusion: None,
            per_video: Vec::new(),
            timings: Timings::default(),
        }
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// The document with `timings` zeroed, for run-to-run comparison.
    pub fn without_timings(&self) -> Report {
        Report {
            timings: Timings::default(),
            ..self.clone()
        }
    }
}

fn category_name(categories: &CategorySet, id: u32) -> String {
    categories
        .get(id)
        .map(|c| c.name.clone())
        .unwrap_or_default()
}

pub fn span_entry(set: &AccumulatorSet, value: f64, categories: &CategorySet) -> SpanEntry {
    SpanEntry {
        k: set.span_k(),
        vpq: value,
        vpq_pct: format_percent(value),
        n_categories: set.category_count(),
        categories: set
            .present_categories()
            .map(|(c, t)| CategoryEntry {
                category_id: c,
                name: category_name(categories, c),
                is_thing: categories.is_thing(c).unwrap_or(false),
                tp: t.tp,
                fp: t.fp,
                fn_: t.fn_,
                iou_sum_q64: t.iou_sum.raw().to_string(),
                vpq: t.quality().expect("present category"),
            })
            .collect(),
    }
}

pub fn stq_section(
    acc: &StqAccumulator,
    report: &StqReport,
    categories: &CategorySet,
) -> StqSection {
    StqSection {
        sq: report.sq,
        aq: report.aq,
        stq: report.stq,
        sq_pct: format_percent(report.sq),
        aq_pct: format_percent(report.aq),
        stq_pct: format_percent(report.stq),
        gt_tracks: acc.gt_tracks,
        aq_sum_q64: acc.aq_sum.raw().to_string(),
        categories: acc
            .categories
            .iter()
            .filter_map(|(&c, counts)| {
                counts.iou().map(|iou| IouEntry {
                    category_id: c,
                    name: category_name(categories, c),
                    intersection: counts.intersection,
                    union: counts.union,
                    iou,
                })
            })
            .collect(),
    }
}

/// Rebuilds the pooled tallies of one span from the embedded entries.
pub fn tallies_of(entry: &SpanEntry) -> Option<AccumulatorSet> {
    let mut map = BTreeMap::new();
    for c in &entry.categories {
        map.insert(c.category_id, c.tally()?);
    }
    Some(AccumulatorSet::from_tallies(entry.k, map))
}
